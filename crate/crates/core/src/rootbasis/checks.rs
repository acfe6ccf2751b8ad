//! Numerical checks on the root system: biorthogonality, the spectral
//! problem, projector growth and the Hausdorff–Young inequality.

use std::f64::consts::TAU;

use super::coeffs::{root_coeffs, trig_coeffs};
use super::system::{bio_elements, root_elements, RootSystemElement};
use crate::error::{Error, Result};
use crate::vectorfn::norms::euclidean;
use crate::vectorfn::{lp_norm, FunctionOnI, QuadratureRule};

/// `⟨φᵢ, vⱼ⟩ = ∫ φᵢ vⱼ dx`, rows `(1, cos 1..N, x sin 1..N)`,
/// columns `(v₀ᶜ, vᶜ 1..N, vˢ 1..N)`.
pub fn gram_matrix(n: usize, rule: &QuadratureRule) -> Result<Vec<Vec<f64>>> {
    if n < 1 {
        return Err(Error::Parameter("Gram matrix needs N >= 1".into()));
    }
    let roots = root_elements(n);
    let bios = bio_elements(n);
    let phi: Vec<Vec<f64>> = roots.iter().map(|r| rule.iter().map(|(x, w)| w * r.eval(x)).collect()).collect();
    let v: Vec<Vec<f64>> = bios.iter().map(|b| rule.nodes().iter().map(|&x| b.eval(x)).collect()).collect();
    Ok(phi
        .iter()
        .map(|row| v.iter().map(|col| row.iter().zip(col).map(|(p, q)| p * q).sum()).collect())
        .collect())
}

/// Largest entrywise deviation of a square matrix from the identity.
pub fn identity_defect(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (v - if i == j { 1.0 } else { 0.0 }).abs()))
        .fold(0.0, f64::max)
}

/// Double-double value `hi + lo`, used where a residual is a cancellation
/// of terms much larger than the result.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn prod(a: f64, b: f64) -> Self {
        let hi = a * b;
        Self { hi, lo: a.mul_add(b, -hi) }
    }

    fn scale(self, b: f64) -> Self {
        let p = Self::prod(self.hi, b);
        Self::renorm(p.hi, p.lo + self.lo * b)
    }

    fn add(self, o: Self) -> Self {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (o.hi - bb);
        Self::renorm(s, e + self.lo + o.lo)
    }

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    fn renorm(a: f64, b: f64) -> Self {
        let hi = a + b;
        Self { hi, lo: b - (hi - a) }
    }
}

/// Residuals of the spectral problem at index `n` over `grid`:
///
/// * `max |(φₙᶜ)″ + n² φₙᶜ|` (eigenfunction equation),
/// * `max |−(φₙˢ)″ − n² φₙˢ + 2n φₙᶜ|` (associated function, with the
///   constant `−2n` that direct differentiation of `x sin nx` produces).
///
/// The analytic second derivatives are combined in double-double arithmetic,
/// since `n² x sin nx` reaches ~2.6e4 at `n = 64` and its plain f64 rounding
/// alone exceeds 1e-12.
pub fn spectral_residual(n: usize, grid: &[f64]) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::Parameter("spectral residual needs n >= 1".into()));
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let (mut eig, mut assoc) = (0.0f64, 0.0f64);
    for &x in grid {
        let (s, c) = (nf * x).sin_cos();
        // (cos nx)″ = −n² cos nx
        let d2c = Dd::prod(-n2, c);
        eig = eig.max(d2c.add(Dd::prod(n2, c)).hi.abs());
        // (x sin nx)″ = 2n cos nx − n² x sin nx
        let phi_s = Dd::prod(x, s);
        let two_n_c = Dd::prod(2.0 * nf, c);
        let d2s = two_n_c.add(phi_s.scale(-n2));
        let r = d2s.neg().add(phi_s.scale(-n2)).add(two_n_c);
        assoc = assoc.max(r.hi.abs());
    }
    Ok((eig, assoc))
}

/// Boundary data of the spectral problem for `φₙᶜ`:
/// `(φ(0), φ(2π), φ′(0))`.
pub fn spectral_boundary_values(n: usize) -> (f64, f64, f64) {
    let phi = if n == 0 { RootSystemElement::CONST } else { RootSystemElement::cos(n) };
    (phi.eval(0.0), phi.eval(TAU), phi.eval_derivative(0.0, 1))
}

/// `‖f‖_{L^p(dx/2π)} − (Σ_{|n|≤N} ‖f̂(n)‖^{p′})^{1/p′}` for `p ∈ (1, 2]`.
pub fn hausdorff_young_gap(f: &FunctionOnI, p: f64, n: usize, rule: &QuadratureRule) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::Parameter(format!(
            "Hausdorff-Young needs p in (1, 2], got {p}; apply it to the dual exponent instead"
        )));
    }
    let q = p / (p - 1.0);
    let lhs = lp_norm(f, p, rule)? * TAU.powf(-1.0 / p);
    let tc = trig_coeffs(f, n, rule);
    let mut sum = euclidean(&tc.c0).powf(q);
    for k in 0..n {
        // ‖f̂(±k)‖ = ½ √(Σⱼ cⱼ² + sⱼ²)
        let norm = 0.5 * tc.c[k].iter().zip(&tc.s[k]).map(|(c, s)| c * c + s * s).sum::<f64>().sqrt();
        sum += 2.0 * norm.powf(q);
    }
    Ok(lhs - sum.powf(1.0 / q))
}

/// Growth of the partial-sum projectors at one `(p, n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorRatio {
    pub p: f64,
    pub n: usize,
    /// `‖Pₙᶜ f‖_p / ‖f‖_p`
    pub cos: f64,
    /// `‖Pₙˢ f‖_p / ‖f‖_p`
    pub sin: f64,
}

/// Projector ratios for every `p` in `ps` and `n` in `ns`.
///
/// Coefficients are computed once up to `max(ns)` with `rule`, which must
/// resolve that frequency (see [`QuadratureRule::resolving`]); partial sums
/// are accumulated at the nodes in increasing `n`.
pub fn projector_ratios(f: &FunctionOnI, ps: &[f64], ns: &[usize], rule: &QuadratureRule) -> Result<Vec<ProjectorRatio>> {
    let denoms = ps.iter().map(|&p| lp_norm(f, p, rule)).collect::<Result<Vec<_>>>()?;
    if denoms.iter().any(|&d| d == 0.0) {
        return Err(Error::Degenerate(format!("`{}` has zero L^p norm", f.name())));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let n_max = ns.last().copied().unwrap_or(0);
    let coeffs = root_coeffs(f, n_max, rule);
    let dim = f.dim();
    let nodes = rule.nodes();
    let mut cos_sum: Vec<Vec<f64>> = nodes.iter().map(|_| coeffs.a0.clone()).collect();
    let mut sin_sum = vec![vec![0.0; dim]; nodes.len()];
    let norm = |vals: &[Vec<f64>], p: f64| -> f64 {
        rule.weights().iter().zip(vals).map(|(w, v)| w * euclidean(v).powf(p)).sum::<f64>().powf(1.0 / p)
    };
    let mut out = Vec::with_capacity(ns.len() * ps.len());
    let mut k = 0;
    for &n in &ns {
        while k < n {
            k += 1;
            let kf = k as f64;
            for (i, &x) in nodes.iter().enumerate() {
                let (s, c) = (kf * x).sin_cos();
                for j in 0..dim {
                    cos_sum[i][j] += coeffs.a[k - 1][j] * c;
                    sin_sum[i][j] += coeffs.b[k - 1][j] * (x * s);
                }
            }
        }
        for (&p, &d) in ps.iter().zip(&denoms) {
            out.push(ProjectorRatio { p, n, cos: norm(&cos_sum, p) / d, sin: norm(&sin_sum, p) / d });
        }
    }
    Ok(out)
}
