//! Series solution of the nonlocal problem on the half-strip:
//!
//! ```text
//! Δu = 0 in Π,  u(x, 0) = f(x),  u(0, y) = u(2π, y),  ∂ₓu(0, y) = 0
//! ```
//!
//! With `(a₀, aₙ, bₙ)` the root coefficients of `f`, the solution is
//!
//! ```text
//! u(x, y) = a₀ + Σₙ e^{-ny} [ aₙ cos nx + bₙ (y cos nx + x sin nx) ]
//! ```
//!
//! Every `n`-block is harmonic on its own:
//! `Δ[y e^{-ny} cos nx] = −2n e^{-ny} cos nx` cancels
//! `Δ[x e^{-ny} sin nx] = +2n e^{-ny} cos nx`, which pins the coefficient of
//! the `y cos nx` term to `bₙ`. [`Convention::StrictPaper`] instead uses
//! `(1/2π)∫ f sin nx = (π/2) bₙ` for that term; its Laplacian is
//! `2n(1 − π/2) bₙ e^{-ny} cos nx`, nonzero whenever some `bₙ ≠ 0`.

mod export;
mod norms;

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

pub use export::{write_field_csv, SolutionFile};
pub use norms::{apriori_ratio, apriori_ratios, boundary_residuals, mixed_norm, trace_error};

use crate::error::{Error, Result};
use crate::rootbasis::{root_coeffs, RootCoefficients};
use crate::vectorfn::norms::{euclidean, fd_derivative, FD_STEP};
use crate::vectorfn::{integrate, FunctionOnI, QuadratureRule};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// `y e^{-ny} cos nx` carries `bₙ`; the series is harmonic.
    #[default]
    #[serde(rename = "harmonic-consistent")]
    HarmonicConsistent,
    /// `y e^{-ny} cos nx` carries `(1/2π)∫ f sin nx`.
    #[serde(rename = "strict-paper")]
    StrictPaper,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::HarmonicConsistent => "harmonic-consistent",
            Self::StrictPaper => "strict-paper",
        }
    }

    /// Factor applied to `bₙ` for the `y cos nx` term.
    pub fn y_term_factor(&self) -> f64 {
        match self {
            Self::HarmonicConsistent => 1.0,
            Self::StrictPaper => FRAC_PI_2,
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic-consistent" => Ok(Self::HarmonicConsistent),
            "strict-paper" => Ok(Self::StrictPaper),
            _ => Err(Error::Parameter(format!("unknown convention `{s}`"))),
        }
    }
}

/// Truncated series solution built from the root coefficients of the trace.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSolution {
    coeffs: RootCoefficients,
    convention: Convention,
    y_coeffs: Vec<Vec<f64>>,
}

/// Mixed partial derivative order `(∂ₓ, ∂ᵧ)`.
pub type PartialOrder = (usize, usize);

/// All orders with `ox + oy ≤ 2`, in the order used by the `W²_{p,1}` norm.
pub const PARTIALS: [PartialOrder; 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

impl HarmonicSolution {
    pub fn from_coefficients(coeffs: RootCoefficients, convention: Convention) -> Result<Self> {
        coeffs.validate()?;
        if coeffs.n < 1 {
            return Err(Error::Parameter("solution needs N >= 1".into()));
        }
        let factor = convention.y_term_factor();
        let y_coeffs = coeffs.b.iter().map(|b| b.iter().map(|v| factor * v).collect()).collect();
        Ok(Self { coeffs, convention, y_coeffs })
    }

    pub fn coeffs(&self) -> &RootCoefficients {
        &self.coeffs
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.n
    }

    /// A nonzero constant mode makes the mixed norm over the unbounded strip
    /// diverge, so such a solution lies outside `L^{p,1}(Π)`.
    pub fn has_constant_mode(&self) -> bool {
        euclidean(&self.coeffs.a0) > 1e-12 * self.coeffs.max_norm().max(1.0)
    }

    /// Largest `n` whose block is not negligible (relative 1e-14).
    pub fn effective_order(&self) -> usize {
        let scale = self.coeffs.max_norm();
        (1..=self.coeffs.n)
            .rev()
            .find(|&n| euclidean(&self.coeffs.a[n - 1]) + euclidean(&self.coeffs.b[n - 1]) > 1e-14 * scale)
            .unwrap_or(0)
    }

    /// `Σₙ (‖aₙ‖ + ‖bₙ‖) e^{-nξ}/n`.
    pub fn tail_bound(&self, xi: f64) -> f64 {
        (1..=self.coeffs.n)
            .map(|n| {
                let nf = n as f64;
                (euclidean(&self.coeffs.a[n - 1]) + euclidean(&self.coeffs.b[n - 1])) * (-nf * xi).exp() / nf
            })
            .sum()
    }

    pub fn eval(&self, x: f64, y: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.accumulate(x, y, (0, 0), &mut out);
        out
    }

    pub fn eval_partial(&self, x: f64, y: f64, order: PartialOrder) -> Result<Vec<f64>> {
        if order.0 + order.1 > 2 {
            return Err(Error::Capability(format!(
                "partials are available up to total order 2, got ({}, {})",
                order.0, order.1
            )));
        }
        let mut out = vec![0.0; self.dim()];
        self.accumulate(x, y, order, &mut out);
        Ok(out)
    }

    /// `∂ₓ²u + ∂ᵧ²u` from the termwise analytic partials.
    pub fn laplacian(&self, x: f64, y: f64) -> Vec<f64> {
        let mut uxx = vec![0.0; self.dim()];
        let mut uyy = vec![0.0; self.dim()];
        self.accumulate(x, y, (2, 0), &mut uxx);
        self.accumulate(x, y, (0, 2), &mut uyy);
        uxx.iter().zip(&uyy).map(|(a, b)| a + b).collect()
    }

    /// Writes the requested partial at `(x, y)` into `out`.
    ///
    /// At `y = 0` the value path matches [`crate::rootbasis::reconstruct`]
    /// operation for operation, so the trace is reproduced bit for bit.
    pub(crate) fn accumulate(&self, x: f64, y: f64, order: PartialOrder, out: &mut [f64]) {
        if order == (0, 0) {
            out.copy_from_slice(&self.coeffs.a0);
        } else {
            out.fill(0.0);
        }
        for n in 1..=self.coeffs.n {
            let nf = n as f64;
            let (s, c) = (nf * x).sin_cos();
            self.add_block(n, x, y, (s, c), (-nf * y).exp(), order, out);
        }
    }

    /// Several partials at `(x, y)` at once, with `sin_cos(nx)` and
    /// `e^{-ny}` supplied for `n = 1..=N`; `out[i]` receives `orders[i]`.
    pub(crate) fn accumulate_tabulated(
        &self,
        x: f64,
        y: f64,
        orders: &[PartialOrder],
        trig: &[(f64, f64)],
        decay: &[f64],
        out: &mut [Vec<f64>],
    ) {
        for (o, &order) in out.iter_mut().zip(orders) {
            if order == (0, 0) {
                o.copy_from_slice(&self.coeffs.a0);
            } else {
                o.fill(0.0);
            }
        }
        for n in 1..=self.coeffs.n {
            for (o, &order) in out.iter_mut().zip(orders) {
                self.add_block(n, x, y, trig[n - 1], decay[n - 1], order, o);
            }
        }
    }

    #[inline]
    #[allow(clippy::too_many_arguments)]
    fn add_block(&self, n: usize, x: f64, y: f64, (s, c): (f64, f64), e: f64, order: PartialOrder, out: &mut [f64]) {
        let [t1, t2, t3] = block_terms(n as f64, x, y, s, c, e, order);
        let (a, cy, b) = (&self.coeffs.a[n - 1], &self.y_coeffs[n - 1], &self.coeffs.b[n - 1]);
        for j in 0..out.len() {
            out[j] += a[j] * t1;
            out[j] += cy[j] * t2;
            out[j] += b[j] * t3;
        }
    }
}

/// Partials of `cos(nx)e^{-ny}`, `y cos(nx)e^{-ny}` and `x sin(nx)e^{-ny}`.
#[inline]
fn block_terms(n: f64, x: f64, y: f64, s: f64, c: f64, e: f64, order: PartialOrder) -> [f64; 3] {
    let n2 = n * n;
    match order {
        (0, 0) => [c * e, y * c * e, (x * s) * e],
        (1, 0) => [-n * s * e, -n * y * s * e, (s + n * x * c) * e],
        (0, 1) => [-n * c * e, c * (1.0 - n * y) * e, -n * x * s * e],
        (2, 0) => [-n2 * c * e, -n2 * y * c * e, (2.0 * n * c - n2 * x * s) * e],
        (1, 1) => [n2 * s * e, -n * s * (1.0 - n * y) * e, -n * (s + n * x * c) * e],
        (0, 2) => [n2 * c * e, c * (n2 * y - 2.0 * n) * e, n2 * x * s * e],
        _ => unreachable!("order checked by caller"),
    }
}

pub fn solve(f: &FunctionOnI, n: usize, rule: &QuadratureRule) -> Result<HarmonicSolution> {
    solve_with(f, n, rule, Convention::HarmonicConsistent)
}

pub fn solve_with(f: &FunctionOnI, n: usize, rule: &QuadratureRule, convention: Convention) -> Result<HarmonicSolution> {
    if n < 1 {
        return Err(Error::Parameter(format!("truncation must be >= 1, got {n}")));
    }
    HarmonicSolution::from_coefficients(root_coeffs(f, n, rule), convention)
}

/// Which sufficient conditions for a finite-energy solution hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityFlags {
    pub f_at_0: bool,
    pub f_at_2pi: bool,
    pub fprime_at_0: bool,
    pub weighted_integral: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub f_at_0: Vec<f64>,
    pub f_at_2pi: Vec<f64>,
    pub fprime_at_0: Vec<f64>,
    /// `∫ f(x)(2π − x) dx`
    pub weighted_integral: Vec<f64>,
    pub tolerance: f64,
    pub satisfied: CompatibilityFlags,
}

impl CompatibilityReport {
    pub fn all_satisfied(&self) -> bool {
        let s = self.satisfied;
        s.f_at_0 && s.f_at_2pi && s.fprime_at_0 && s.weighted_integral
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |ok: bool, what: &str, v: &[f64]| {
            if !ok {
                out.push(format!("{what} = {v:?} exceeds tolerance {:e}", self.tolerance));
            }
        };
        push(self.satisfied.f_at_0, "f(0)", &self.f_at_0);
        push(self.satisfied.f_at_2pi, "f(2pi)", &self.f_at_2pi);
        push(self.satisfied.fprime_at_0, "f'(0)", &self.fprime_at_0);
        push(self.satisfied.weighted_integral, "int f(x)(2pi - x) dx", &self.weighted_integral);
        out
    }
}

/// Evaluates `f(0)`, `f(2π)`, `f′(0)` and `∫ f(x)(2π − x) dx`; never fails,
/// violations only clear the corresponding flag.
pub fn check_compatibility(f: &FunctionOnI, rule: &QuadratureRule, tol: f64) -> CompatibilityReport {
    let f_at_0 = f.eval(0.0);
    let f_at_2pi = f.eval(TAU);
    let fprime_at_0 = f.deriv1(0.0).unwrap_or_else(|| fd_derivative(f, 0.0, 1, FD_STEP));
    let weighted = FunctionOnI::new("weighted", f.dim(), {
        let f = f.clone();
        move |x, out| {
            f.eval_into(x, out);
            out.iter_mut().for_each(|v| *v *= TAU - x);
        }
    })
    .expect("dimension is positive");
    let weighted_integral = integrate(&weighted, rule);
    let ok = |v: &[f64]| euclidean(v) <= tol;
    let satisfied = CompatibilityFlags {
        f_at_0: ok(&f_at_0),
        f_at_2pi: ok(&f_at_2pi),
        fprime_at_0: ok(&fprime_at_0),
        weighted_integral: ok(&weighted_integral),
    };
    CompatibilityReport { f_at_0, f_at_2pi, fprime_at_0, weighted_integral, tolerance: tol, satisfied }
}

/// Sampling grid on `Π_ξ = [0, 2π] × (0, ξ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    xi: f64,
}

impl StripGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, xi: f64) -> Result<Self> {
        if !(xi.is_finite() && xi > 0.0) {
            return Err(Error::Parameter(format!("strip height must be positive, got {xi}")));
        }
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::Parameter("grid node lists must be nonempty".into()));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&xs) || !increasing(&ys) {
            return Err(Error::Parameter("grid nodes must be strictly increasing".into()));
        }
        if xs[0] < 0.0 || xs[xs.len() - 1] > TAU {
            return Err(Error::Parameter("x nodes must lie in [0, 2pi]".into()));
        }
        if ys[0] <= 0.0 || ys[ys.len() - 1] > xi {
            return Err(Error::Parameter("y nodes must lie in (0, xi]".into()));
        }
        Ok(Self { xs, ys, xi })
    }

    /// `nx` equispaced points on `[0, 2π]`, `ny` points `ξ·j/ny`, `j = 1..=ny`.
    pub fn uniform(nx: usize, ny: usize, xi: f64) -> Result<Self> {
        if nx < 2 || ny < 1 {
            return Err(Error::Parameter(format!("grid needs nx >= 2 and ny >= 1, got {nx}x{ny}")));
        }
        let xs = (0..nx).map(|i| TAU * i as f64 / (nx - 1) as f64).collect();
        let ys = (1..=ny).map(|j| xi * j as f64 / ny as f64).collect();
        Self::new(xs, ys, xi)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootbasis::reconstruct;
    use crate::vectorfn::catalog;
    use std::f64::consts::PI;

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn zero_input_gives_zero_solution() {
        let sol = solve(&catalog("zero", 2).unwrap(), 8, &rule()).unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, 2.0), (TAU, 0.1)] {
            assert_eq!(sol.eval(x, y), vec![0.0, 0.0]);
        }
        assert!(!sol.has_constant_mode());
    }

    #[test]
    fn golden_xsin3() {
        let sol = solve(&catalog("xsin_3", 1).unwrap(), 8, &rule()).unwrap();
        assert!((sol.eval(0.0, 1.0)[0] - (-3.0f64).exp()).abs() < 1e-12);
        assert!((sol.eval(0.0, 1.0)[0] - 0.0497871).abs() < 1e-7);
        assert!((sol.eval(PI / 2.0, 0.0)[0] + PI / 2.0).abs() < 1e-12);
        let lap = sol.laplacian(1.0, 0.5)[0];
        assert!(lap.abs() < 1e-12, "{lap}");
    }

    #[test]
    fn golden_cos2() {
        let sol = solve(&catalog("cos_2", 1).unwrap(), 8, &rule()).unwrap();
        assert!((sol.eval(PI, 1.0)[0] - (-2.0f64).exp()).abs() < 1e-12);
        for y in [0.0, 0.3, 2.0, 9.0] {
            assert_eq!(sol.eval_partial(0.0, y, (1, 0)).unwrap()[0].abs(), 0.0);
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let sol = solve(&catalog("combo", 2).unwrap(), 6, &rule()).unwrap();
        let h = 1e-4;
        let (x, y) = (1.3, 0.7);
        let u = |x, y| sol.eval(x, y)[1];
        let fd = [
            (u(x + h, y) - u(x - h, y)) / (2.0 * h),
            (u(x, y + h) - u(x, y - h)) / (2.0 * h),
            (u(x + h, y) - 2.0 * u(x, y) + u(x - h, y)) / (h * h),
            (u(x + h, y + h) - u(x + h, y - h) - u(x - h, y + h) + u(x - h, y - h)) / (4.0 * h * h),
            (u(x, y + h) - 2.0 * u(x, y) + u(x, y - h)) / (h * h),
        ];
        for (order, want) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)].into_iter().zip(fd) {
            let got = sol.eval_partial(x, y, order).unwrap()[1];
            assert!((got - want).abs() < 1e-6, "{order:?}: {got} vs {want}");
        }
        assert!(matches!(sol.eval_partial(x, y, (3, 0)), Err(Error::Capability(_))));
        assert!(matches!(sol.eval_partial(x, y, (1, 2)), Err(Error::Capability(_))));
    }

    #[test]
    fn trace_is_bitwise_reconstruction() {
        let sol = solve(&catalog("bump", 3).unwrap(), 24, &rule()).unwrap();
        for i in 0..50 {
            let x = i as f64 * TAU / 49.0;
            assert_eq!(sol.eval(x, 0.0), reconstruct(sol.coeffs(), x));
        }
    }

    #[test]
    fn strict_convention_is_not_harmonic() {
        let f = catalog("xsin_3", 1).unwrap();
        let strict = solve_with(&f, 8, &rule(), Convention::StrictPaper).unwrap();
        // 2n(1 − π/2) bₙ e^{-ny} cos nx at n = 3, x = 0, y = 0
        let want = 6.0 * (1.0 - FRAC_PI_2);
        assert!((strict.laplacian(0.0, 0.0)[0] - want).abs() < 1e-10);
        let cos = solve_with(&catalog("cos_2", 1).unwrap(), 8, &rule(), Convention::StrictPaper).unwrap();
        assert!(cos.laplacian(0.4, 0.2)[0].abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_truncation() {
        assert!(matches!(solve(&catalog("one", 1).unwrap(), 0, &rule()), Err(Error::Parameter(_))));
    }

    #[test]
    fn constant_mode_flag() {
        assert!(solve(&catalog("one", 1).unwrap(), 4, &rule()).unwrap().has_constant_mode());
        assert!(!solve(&catalog("xsin_3", 1).unwrap(), 4, &rule()).unwrap().has_constant_mode());
        assert!(!solve(&catalog("bump_balanced", 1).unwrap(), 32, &rule()).unwrap().has_constant_mode());
    }

    #[test]
    fn compatibility_examples() {
        let r = rule();
        let tol = 1e-10;
        let rep = check_compatibility(&catalog("xsin_3", 1).unwrap(), &r, tol);
        assert!(rep.all_satisfied(), "{rep:?}");

        let rep = check_compatibility(&catalog("cos_2", 1).unwrap(), &r, tol);
        assert!(!rep.satisfied.f_at_0 && rep.f_at_0 == vec![1.0]);
        assert!(rep.satisfied.weighted_integral);
        assert!(!rep.warnings().is_empty());

        let rep = check_compatibility(&catalog("one", 1).unwrap(), &r, tol);
        assert!(!rep.satisfied.weighted_integral);
        assert!((rep.weighted_integral[0] - 2.0 * PI * PI).abs() < 1e-10);

        let rep = check_compatibility(&catalog("bump_balanced", 2).unwrap(), &r, tol);
        assert!(rep.all_satisfied(), "{rep:?}");
    }

    #[test]
    fn compatibility_without_analytic_derivative() {
        let f = FunctionOnI::new("sin", 1, |x, out| out[0] = x.sin()).unwrap();
        let rep = check_compatibility(&f, &rule(), 1e-6);
        assert!((rep.fprime_at_0[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn strip_grid_validation() {
        let g = StripGrid::uniform(65, 65, 5.0).unwrap();
        assert_eq!(g.xs()[0], 0.0);
        assert_eq!(g.ys()[12], 1.0);
        assert_eq!(*g.ys().last().unwrap(), 5.0);
        assert!(StripGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], 2.0).is_err());
        assert!(StripGrid::new(vec![0.0, 1.0], vec![0.5, 3.0], 2.0).is_err());
        assert!(StripGrid::new(vec![1.0, 0.0], vec![0.5], 2.0).is_err());
    }

    #[test]
    fn tail_bound_decays() {
        let sol = solve(&catalog("bump", 1).unwrap(), 32, &rule()).unwrap();
        assert!(sol.tail_bound(10.0) < sol.tail_bound(1.0));
        assert!(sol.tail_bound(10.0) < 1e-4);
    }
}
