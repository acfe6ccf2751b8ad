//! Expansion coefficients against the trigonometric and the root systems.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vectorfn::{FunctionOnI, QuadratureRule};

/// Coefficients `(a₀, aₖ, bₖ)` of `a₀ + Σ aₖ cos kx + Σ bₖ x sin kx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootCoefficients {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub a0: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

/// Coefficients `(ℓ₀ᶜ, ℓₖᶜ, ℓₖˢ)` of `ℓ₀ᶜ + Σ ℓₖᶜ cos kx + Σ ℓₖˢ sin kx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigCoefficients {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub c0: Vec<f64>,
    pub c: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
}

fn check_shape(dim: usize, n: usize, zeroth: &[f64], first: &[Vec<f64>], second: &[Vec<f64>]) -> Result<()> {
    if dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    if first.len() != n || second.len() != n {
        return Err(Error::Parameter(format!(
            "coefficient sequences must have length N = {n}, got {} and {}",
            first.len(),
            second.len()
        )));
    }
    if zeroth.len() != dim || first.iter().chain(second).any(|v| v.len() != dim) {
        return Err(Error::Parameter(format!("every coefficient must have length dim = {dim}")));
    }
    Ok(())
}

impl RootCoefficients {
    pub fn zeros(dim: usize, n: usize) -> Self {
        Self {
            dim,
            n,
            a0: vec![0.0; dim],
            a: vec![vec![0.0; dim]; n],
            b: vec![vec![0.0; dim]; n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_shape(self.dim, self.n, &self.a0, &self.a, &self.b)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// First `n` modes (constant included).
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.n);
        Self {
            dim: self.dim,
            n,
            a0: self.a0.clone(),
            a: self.a[..n].to_vec(),
            b: self.b[..n].to_vec(),
        }
    }

    /// Same coefficients with every `bₖ` zeroed.
    pub fn cos_part(&self) -> Self {
        Self { b: vec![vec![0.0; self.dim]; self.n], ..self.clone() }
    }

    /// Same coefficients with `a₀` and every `aₖ` zeroed.
    pub fn sin_part(&self) -> Self {
        Self {
            a0: vec![0.0; self.dim],
            a: vec![vec![0.0; self.dim]; self.n],
            ..self.clone()
        }
    }

    /// `α·self + β·other`; the result has the larger truncation.
    pub fn combine(alpha: f64, lhs: &Self, beta: f64, rhs: &Self) -> Result<Self> {
        if lhs.dim != rhs.dim {
            return Err(Error::Parameter(format!("dimension mismatch: {} vs {}", lhs.dim, rhs.dim)));
        }
        let n = lhs.n.max(rhs.n);
        let zero = vec![0.0; lhs.dim];
        let mix = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| alpha * p + beta * q).collect::<Vec<_>>();
        let seq = |u: &[Vec<f64>], v: &[Vec<f64>]| {
            (0..n)
                .map(|k| mix(u.get(k).unwrap_or(&zero), v.get(k).unwrap_or(&zero)))
                .collect::<Vec<_>>()
        };
        Ok(Self {
            dim: lhs.dim,
            n,
            a0: mix(&lhs.a0, &rhs.a0),
            a: seq(&lhs.a, &rhs.a),
            b: seq(&lhs.b, &rhs.b),
        })
    }

    /// Largest Euclidean norm over all coefficients.
    pub fn max_norm(&self) -> f64 {
        std::iter::once(&self.a0)
            .chain(&self.a)
            .chain(&self.b)
            .map(|v| crate::vectorfn::norms::euclidean(v))
            .fold(0.0, f64::max)
    }
}

impl TrigCoefficients {
    pub fn validate(&self) -> Result<()> {
        check_shape(self.dim, self.n, &self.c0, &self.c, &self.s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Partial Fourier sum `S_N f(x)`.
    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = self.c0.clone();
        for k in 1..=self.n {
            let (s, c) = (k as f64 * x).sin_cos();
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.c[k - 1][j] * c + self.s[k - 1][j] * s;
            }
        }
        out
    }
}

/// Samples `f` at the rule's nodes, paired with the weights.
fn sample(f: &FunctionOnI, rule: &QuadratureRule) -> Vec<(f64, f64, Vec<f64>)> {
    rule.iter().map(|(x, w)| (x, w, f.eval(x))).collect()
}

fn axpy(acc: &mut [f64], alpha: f64, v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += alpha * x;
    }
}

/// Fourier coefficients: `ℓ₀ᶜ = (1/2π)∫f`, `ℓₖᶜ = (1/π)∫f cos kx`, `ℓₖˢ = (1/π)∫f sin kx`.
pub fn trig_coeffs(f: &FunctionOnI, n: usize, rule: &QuadratureRule) -> TrigCoefficients {
    let dim = f.dim();
    let samples = sample(f, rule);
    let mut c0 = vec![0.0; dim];
    let mut c = vec![vec![0.0; dim]; n];
    let mut s = vec![vec![0.0; dim]; n];
    for (x, w, fx) in &samples {
        axpy(&mut c0, *w, fx);
        for k in 1..=n {
            let (sk, ck) = (k as f64 * x).sin_cos();
            axpy(&mut c[k - 1], w * ck, fx);
            axpy(&mut s[k - 1], w * sk, fx);
        }
    }
    c0.iter_mut().for_each(|v| *v /= TAU);
    c.iter_mut().chain(s.iter_mut()).flatten().for_each(|v| *v /= PI);
    TrigCoefficients { dim, n, c0, c, s }
}

/// Coefficient functionals of the biorthogonal system:
/// `a₀ = ∫ f v₀ᶜ`, `aₖ = ∫ f vₖᶜ`, `bₖ = ∫ f vₖˢ`.
pub fn root_coeffs(f: &FunctionOnI, n: usize, rule: &QuadratureRule) -> RootCoefficients {
    let dim = f.dim();
    let samples = sample(f, rule);
    let mut out = RootCoefficients::zeros(dim, n);
    for (x, w, fx) in &samples {
        let weight = w * (TAU - x);
        axpy(&mut out.a0, weight, fx);
        for k in 1..=n {
            let (sk, ck) = (k as f64 * x).sin_cos();
            axpy(&mut out.a[k - 1], weight * ck, fx);
            axpy(&mut out.b[k - 1], w * sk, fx);
        }
    }
    let pi2 = PI * PI;
    out.a0.iter_mut().for_each(|v| *v /= 2.0 * pi2);
    out.a.iter_mut().chain(out.b.iter_mut()).flatten().for_each(|v| *v /= pi2);
    out
}

/// `a₀ + Σ aₖ cos kx + Σ bₖ x sin kx`, accumulated into `out`.
pub fn reconstruct_into(coeffs: &RootCoefficients, x: f64, out: &mut [f64]) {
    out.copy_from_slice(&coeffs.a0);
    for k in 1..=coeffs.n {
        let (s, c) = (k as f64 * x).sin_cos();
        let xs = x * s;
        let (ak, bk) = (&coeffs.a[k - 1], &coeffs.b[k - 1]);
        for j in 0..out.len() {
            out[j] += ak[j] * c;
            out[j] += bk[j] * xs;
        }
    }
}

pub fn reconstruct(coeffs: &RootCoefficients, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.dim];
    reconstruct_into(coeffs, x, &mut out);
    out
}

/// The finite root combination described by `coeffs`, as an evaluable
/// function with exact derivatives.
pub fn root_combination(name: impl Into<String>, coeffs: &RootCoefficients) -> FunctionOnI {
    let c0 = Arc::new(coeffs.clone());
    let (c1, c2) = (c0.clone(), c0.clone());
    FunctionOnI::new(name, coeffs.dim, move |x, out| reconstruct_into(&c0, x, out))
        .expect("coefficient dimension is positive")
        .with_derivatives(
            move |x, out| combination_derivative(&c1, x, 1, out),
            move |x, out| combination_derivative(&c2, x, 2, out),
        )
}

fn combination_derivative(coeffs: &RootCoefficients, x: f64, order: usize, out: &mut [f64]) {
    out.fill(0.0);
    for k in 1..=coeffs.n {
        let kf = k as f64;
        let (s, c) = (kf * x).sin_cos();
        let (dc, dxs) = match order {
            1 => (-kf * s, s + kf * x * c),
            _ => (-kf * kf * c, 2.0 * kf * c - kf * kf * x * s),
        };
        for j in 0..out.len() {
            out[j] += coeffs.a[k - 1][j] * dc + coeffs.b[k - 1][j] * dxs;
        }
    }
}

/// `Pₙᶜ f = Σ_{k≤n} vₖᶜ(f) φₖᶜ` (constant term included).
pub fn projector_cos(f: &FunctionOnI, n: usize, rule: &QuadratureRule) -> FunctionOnI {
    let coeffs = root_coeffs(f, n, rule).cos_part();
    root_combination(format!("P{n}c[{}]", f.name()), &coeffs)
}

/// `Pₙˢ f = Σ_{1≤k≤n} vₖˢ(f) φₖˢ`.
pub fn projector_sin(f: &FunctionOnI, n: usize, rule: &QuadratureRule) -> Result<FunctionOnI> {
    if n < 1 {
        return Err(Error::Parameter("sine projector needs n >= 1".into()));
    }
    let coeffs = root_coeffs(f, n, rule).sin_part();
    Ok(root_combination(format!("P{n}s[{}]", f.name()), &coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorfn::catalog;

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    fn entries(c: &RootCoefficients) -> Vec<(String, f64)> {
        let mut out = vec![("a0".to_string(), c.a0[0])];
        for k in 0..c.n {
            out.push((format!("a{}", k + 1), c.a[k][0]));
            out.push((format!("b{}", k + 1), c.b[k][0]));
        }
        out
    }

    #[test]
    fn trig_of_cos2() {
        let tc = trig_coeffs(&catalog("cos_2", 1).unwrap(), 6, &rule());
        assert!(tc.c0[0].abs() < 1e-10);
        for k in 1..=6 {
            let want = if k == 2 { 1.0 } else { 0.0 };
            assert!((tc.c[k - 1][0] - want).abs() < 1e-10);
            assert!(tc.s[k - 1][0].abs() < 1e-10);
        }
    }

    #[test]
    fn trig_of_constants() {
        let tc = trig_coeffs(&catalog("one", 2).unwrap(), 4, &rule());
        assert!(tc.c0.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(tc.c.iter().chain(&tc.s).flatten().all(|v| v.abs() < 1e-12));
        let z = trig_coeffs(&catalog("zero", 2).unwrap(), 4, &rule());
        assert!(z.c.iter().chain(&z.s).flatten().chain(&z.c0).all(|&v| v == 0.0));
    }

    #[test]
    fn root_of_xsin3() {
        let c = root_coeffs(&catalog("xsin_3", 1).unwrap(), 8, &rule());
        for (name, v) in entries(&c) {
            let want = if name == "b3" { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10, "{name} = {v}");
        }
    }

    #[test]
    fn root_of_cos2() {
        let c = root_coeffs(&catalog("cos_2", 1).unwrap(), 8, &rule());
        for (name, v) in entries(&c) {
            let want = if name == "a2" { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10, "{name} = {v}");
        }
        let z = root_coeffs(&catalog("zero", 1).unwrap(), 8, &rule());
        assert_eq!(z.max_norm(), 0.0);
    }

    #[test]
    fn reconstruct_examples() {
        assert_eq!(reconstruct(&RootCoefficients::zeros(3, 5), 1.0), vec![0.0; 3]);
        let c = root_coeffs(&catalog("xsin_3", 1).unwrap(), 8, &rule());
        assert!((reconstruct(&c, PI / 2.0)[0] + PI / 2.0).abs() < 1e-9);
        let c = root_coeffs(&catalog("cos_2", 1).unwrap(), 8, &rule());
        assert!((reconstruct(&c, PI)[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projector_examples() {
        let r = rule();
        let grid: Vec<f64> = (0..=64).map(|i| i as f64 * TAU / 64.0).collect();
        let c2 = catalog("cos_2", 1).unwrap();
        let p1 = projector_cos(&c2, 1, &r);
        let p2 = projector_cos(&c2, 2, &r);
        for &x in &grid {
            assert!(p1.eval(x)[0].abs() < 1e-10);
            assert!((p2.eval(x)[0] - (2.0 * x).cos()).abs() < 1e-9);
        }
        let xs3 = catalog("xsin_3", 1).unwrap();
        let p3 = projector_sin(&xs3, 3, &r).unwrap();
        for &x in &grid {
            assert!((p3.eval(x)[0] - x * (3.0 * x).sin()).abs() < 1e-9);
        }
        assert!(projector_sin(&xs3, 0, &r).is_err());
    }

    #[test]
    fn combination_derivatives_match_catalog() {
        let combo = catalog("combo", 1).unwrap();
        for i in 0..20 {
            let x = i as f64 * 0.31;
            let want1 = -0.5 * x.sin() - 0.25 * ((2.0 * x).sin() + 2.0 * x * (2.0 * x).cos()) - 0.4 * (4.0 * x).sin();
            assert!((combo.deriv1(x).unwrap()[0] - want1).abs() < 1e-13);
        }
    }

    #[test]
    fn json_shape() {
        let c = root_coeffs(&catalog("xsin_3", 2).unwrap(), 3, &rule());
        let v: serde_json::Value = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["N"], 3);
        assert_eq!(v["a"].as_array().unwrap().len(), 3);
        assert_eq!(v["b"][2].as_array().unwrap().len(), 2);
        assert_eq!(RootCoefficients::from_json(&c.to_json().unwrap()).unwrap(), c);

        let bad = r#"{"dim": 2, "N": 2, "a0": [0, 0], "a": [[1, 2]], "b": [[0, 0], [0, 0]]}"#;
        assert!(RootCoefficients::from_json(bad).is_err());
        let tc = trig_coeffs(&catalog("cos_2", 1).unwrap(), 2, &rule());
        let v: serde_json::Value = serde_json::from_str(&tc.to_json().unwrap()).unwrap();
        assert!(v.get("c0").is_some() && v.get("s").is_some() && v["N"] == 2);
    }
}
