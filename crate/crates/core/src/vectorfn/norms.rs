//! Bochner integrals and norms of ℝ^d-valued functions on `[0, 2π]`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::function::FunctionOnI;
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};

/// Step used by the finite-difference fallback.
pub const FD_STEP: f64 = TAU / 4096.0;

/// Exponent and strip height for the mixed norms on `Π_ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub p: f64,
    pub xi: f64,
}

impl NormParams {
    pub fn new(p: f64, xi: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::Parameter(format!("p must lie in (1, inf), got {p}")));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(Error::Parameter(format!("strip height must be positive, got {xi}")));
        }
        Ok(Self { p, xi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    /// Require analytic derivatives.
    Analytic,
    /// Always use finite differences.
    FiniteDifference,
    /// Analytic when present, finite differences otherwise.
    PreferAnalytic,
}

/// Componentwise `Σ wᵢ f(xᵢ)`.
pub fn integrate(f: &FunctionOnI, rule: &QuadratureRule) -> Vec<f64> {
    let mut acc = vec![0.0; f.dim()];
    let mut buf = vec![0.0; f.dim()];
    for (x, w) in rule.iter() {
        f.eval_into(x, &mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += w * v;
        }
    }
    acc
}

/// Euclidean length, rescaled when the plain sum of squares would
/// underflow or overflow.
pub fn euclidean(v: &[f64]) -> f64 {
    let sq: f64 = v.iter().map(|c| c * c).sum();
    if (1e-290..1e290).contains(&sq) || sq == 0.0 && v.iter().all(|&c| c == 0.0) || sq.is_nan() {
        return sq.sqrt();
    }
    let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m == 0.0 || m.is_infinite() {
        return m;
    }
    m * v.iter().map(|c| (c / m) * (c / m)).sum::<f64>().sqrt()
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("p must lie in [1, inf), got {p}")))
    }
}

/// `(∫ ‖g(x)‖^p dx)^{1/p}` for a pointwise evaluator `g` writing into a buffer.
pub fn lp_norm_with<G>(dim: usize, p: f64, rule: &QuadratureRule, mut g: G) -> Result<f64>
where
    G: FnMut(f64, &mut [f64]),
{
    check_p(p)?;
    let mut buf = vec![0.0; dim];
    // Σ wᵢ (nᵢ/scale)^p, with scale the running maximum
    let (mut scale, mut acc) = (0.0f64, 0.0f64);
    for (x, w) in rule.iter() {
        g(x, &mut buf);
        let n = euclidean(&buf);
        if n > scale {
            acc *= (scale / n).powf(p);
            scale = n;
        }
        if n > 0.0 {
            acc += w * (n / scale).powf(p);
        } else if n.is_nan() {
            return Ok(f64::NAN);
        }
    }
    Ok(scale * acc.powf(1.0 / p))
}

pub fn lp_norm(f: &FunctionOnI, p: f64, rule: &QuadratureRule) -> Result<f64> {
    lp_norm_with(f.dim(), p, rule, |x, out| f.eval_into(x, out))
}

/// `‖f‖_p + ‖f′‖_p + ‖f″‖_p`.
pub fn sobolev2_norm(f: &FunctionOnI, p: f64, rule: &QuadratureRule, mode: DerivativeMode) -> Result<f64> {
    check_p(p)?;
    let analytic = match mode {
        DerivativeMode::Analytic if !f.has_derivatives() => {
            return Err(Error::Capability(format!(
                "`{}` has no analytic derivatives and finite differences were not requested",
                f.name()
            )))
        }
        DerivativeMode::Analytic => true,
        DerivativeMode::FiniteDifference => false,
        DerivativeMode::PreferAnalytic => f.has_derivatives(),
    };
    let mut total = lp_norm(f, p, rule)?;
    for order in 1..=2 {
        total += if analytic {
            lp_norm(&f.derivative(order)?, p, rule)?
        } else {
            lp_norm_with(f.dim(), p, rule, |x, out| {
                out.copy_from_slice(&fd_derivative(f, x, order, FD_STEP))
            })?
        };
    }
    Ok(total)
}

/// Derivative of `f` at `x` by fourth-order finite differences.
///
/// Central five-point stencils in the interior; one-sided stencils
/// when `x ± 2h` would leave `[0, 2π]`.
pub fn fd_derivative(f: &FunctionOnI, x: f64, order: usize, h: f64) -> Vec<f64> {
    const CENTRAL1: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
    const CENTRAL2: [(i32, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];
    const FORWARD1: [(i32, f64); 5] = [(0, -25.0), (1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0)];
    const FORWARD2: [(i32, f64); 6] = [(0, 45.0), (1, -154.0), (2, 214.0), (3, -156.0), (4, 61.0), (5, -10.0)];

    assert!(order == 1 || order == 2, "finite differences support orders 1 and 2");
    let dim = f.dim();
    let (stencil, dir): (&[(i32, f64)], f64) = if x - 2.0 * h < 0.0 {
        (if order == 1 { &FORWARD1 } else { &FORWARD2 }, 1.0)
    } else if x + 2.0 * h > TAU {
        (if order == 1 { &FORWARD1 } else { &FORWARD2 }, -1.0)
    } else {
        (if order == 1 { &CENTRAL1 } else { &CENTRAL2 }, 1.0)
    };
    let mut acc = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    for &(k, c) in stencil {
        f.eval_into(x + dir * k as f64 * h, &mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += c * v;
        }
    }
    // mirrored first-derivative stencils flip sign; second-derivative ones do not
    let scale = if order == 1 { dir / (12.0 * h) } else { 1.0 / (12.0 * h * h) };
    acc.iter_mut().for_each(|a| *a *= scale);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorfn::catalog::catalog;
    use std::f64::consts::PI;

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(integrate(&catalog("zero", 2).unwrap(), &rule()), vec![0.0, 0.0]);
        let one = integrate(&catalog("one", 1).unwrap(), &rule());
        assert!((one[0] - TAU).abs() < 1e-12);
        // ∫ x sin 3x = -2π/3 by parts
        let xs = integrate(&catalog("xsin_3", 1).unwrap(), &rule());
        assert!((xs[0] + TAU / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lp_examples() {
        let r = rule();
        assert!((lp_norm(&catalog("one", 1).unwrap(), 2.0, &r).unwrap() - TAU.sqrt()).abs() < 1e-12);
        assert!((lp_norm(&catalog("cos_2", 1).unwrap(), 2.0, &r).unwrap() - PI.sqrt()).abs() < 1e-12);
        for p in [1.0, 1.5, 7.0] {
            assert_eq!(lp_norm(&catalog("zero", 3).unwrap(), p, &r).unwrap(), 0.0);
        }
        assert!(matches!(lp_norm(&catalog("one", 1).unwrap(), 0.5, &r), Err(Error::Parameter(_))));
    }

    #[test]
    fn sobolev_examples() {
        let r = rule();
        let zero = catalog("zero", 1).unwrap();
        assert_eq!(sobolev2_norm(&zero, 2.0, &r, DerivativeMode::Analytic).unwrap(), 0.0);
        let c2 = catalog("cos_2", 1).unwrap();
        let got = sobolev2_norm(&c2, 2.0, &r, DerivativeMode::Analytic).unwrap();
        assert!((got - 7.0 * PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn sobolev_dual_path_agrees() {
        let r = rule();
        let f = catalog("xsin_3", 1).unwrap();
        let a = sobolev2_norm(&f, 2.0, &r, DerivativeMode::Analytic).unwrap();
        let b = sobolev2_norm(&f, 2.0, &r, DerivativeMode::FiniteDifference).unwrap();
        assert!(a > 0.0 && a.is_finite());
        assert!((a - b).abs() / a < 1e-6, "analytic {a} vs fd {b}");
    }

    #[test]
    fn sobolev_requires_derivatives() {
        let bare = FunctionOnI::new("bare", 1, |x, out| out[0] = x.sin()).unwrap();
        let r = rule();
        assert!(matches!(
            sobolev2_norm(&bare, 2.0, &r, DerivativeMode::Analytic),
            Err(Error::Capability(_))
        ));
        let fd = sobolev2_norm(&bare, 2.0, &r, DerivativeMode::PreferAnalytic).unwrap();
        // ‖sin‖₂ = √π for f, f′ and f″
        assert!((fd - 3.0 * PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn fd_one_sided_at_ends() {
        let f = catalog("xsin_3", 1).unwrap();
        for x in [0.0, 1e-4, TAU - 1e-4, TAU] {
            let d1 = fd_derivative(&f, x, 1, FD_STEP)[0];
            let d2 = fd_derivative(&f, x, 2, FD_STEP)[0];
            assert!((d1 - f.deriv1(x).unwrap()[0]).abs() < 1e-7, "d1 at {x}");
            assert!((d2 - f.deriv2(x).unwrap()[0]).abs() < 1e-4, "d2 at {x}");
        }
    }

    #[test]
    fn norm_params_validate() {
        assert!(NormParams::new(2.0, 10.0).is_ok());
        assert!(NormParams::new(1.0, 10.0).is_err());
        assert!(NormParams::new(2.0, 0.0).is_err());
    }
}
