//! Riesz projections on the two-sided exponential coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coeffs::TrigCoefficients;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RieszSign {
    /// Keep modes `n ≥ m`.
    Plus,
    /// Keep modes `n < m`.
    Minus,
}

/// Coefficients `f̂(n) ∈ ℂ^d` for `n = −N..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialCoefficients {
    pub dim: usize,
    pub n: usize,
    modes: Vec<Vec<Complex64>>,
}

/// Complex trigonometric coefficients, the image of a projection written
/// back in the `{1, cos kx, sin kx}` system.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTrigCoefficients {
    pub dim: usize,
    pub n: usize,
    pub c0: Vec<Complex64>,
    pub c: Vec<Vec<Complex64>>,
    pub s: Vec<Vec<Complex64>>,
}

impl ExponentialCoefficients {
    /// `f̂(0) = ℓ₀ᶜ`, `f̂(±k) = (ℓₖᶜ ∓ iℓₖˢ)/2`.
    pub fn from_trig(tc: &TrigCoefficients) -> Self {
        let n = tc.n;
        let mut modes = vec![vec![Complex64::new(0.0, 0.0); tc.dim]; 2 * n + 1];
        for j in 0..tc.dim {
            modes[n][j] = Complex64::new(tc.c0[j], 0.0);
            for k in 1..=n {
                let (c, s) = (tc.c[k - 1][j], tc.s[k - 1][j]);
                modes[n + k][j] = Complex64::new(c / 2.0, -s / 2.0);
                modes[n - k][j] = Complex64::new(c / 2.0, s / 2.0);
            }
        }
        Self { dim: tc.dim, n, modes }
    }

    /// `f̂(k)` for `|k| ≤ N`.
    pub fn mode(&self, k: i64) -> &[Complex64] {
        &self.modes[(k + self.n as i64) as usize]
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &[Complex64])> {
        let n = self.n as i64;
        self.modes.iter().enumerate().map(move |(i, v)| (i as i64 - n, v.as_slice()))
    }

    pub fn eval(&self, x: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (k, v) in self.modes() {
            let e = Complex64::from_polar(1.0, k as f64 * x);
            for (o, c) in out.iter_mut().zip(v) {
                *o += c * e;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.n != other.n {
            return Err(Error::Parameter("exponential coefficient shapes differ".into()));
        }
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(u, v)| u.iter().zip(v).map(|(a, b)| a + b).collect())
            .collect();
        Ok(Self { dim: self.dim, n: self.n, modes })
    }

    /// `cₖ = f̂(k) + f̂(−k)`, `sₖ = i(f̂(k) − f̂(−k))`.
    pub fn to_trig(&self) -> ComplexTrigCoefficients {
        let i = Complex64::new(0.0, 1.0);
        let c0 = self.mode(0).to_vec();
        let mut c = Vec::with_capacity(self.n);
        let mut s = Vec::with_capacity(self.n);
        for k in 1..=self.n as i64 {
            let (p, m) = (self.mode(k), self.mode(-k));
            c.push(p.iter().zip(m).map(|(a, b)| a + b).collect());
            s.push(p.iter().zip(m).map(|(a, b)| i * (a - b)).collect());
        }
        ComplexTrigCoefficients { dim: self.dim, n: self.n, c0, c, s }
    }
}

/// `R_m^+` keeps modes `n ≥ m`, `R_m^-` keeps modes `n < m`.
pub fn riesz_projection(tc: &TrigCoefficients, m: i64, sign: RieszSign) -> Result<ExponentialCoefficients> {
    if m.unsigned_abs() as usize > tc.n {
        return Err(Error::Range(format!("|m| = {} exceeds truncation N = {}", m.abs(), tc.n)));
    }
    let mut out = ExponentialCoefficients::from_trig(tc);
    let n = out.n as i64;
    for (idx, v) in out.modes.iter_mut().enumerate() {
        let k = idx as i64 - n;
        let keep = match sign {
            RieszSign::Plus => k >= m,
            RieszSign::Minus => k < m,
        };
        if !keep {
            v.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootbasis::trig_coeffs;
    use crate::vectorfn::{catalog, FunctionOnI, QuadratureRule};

    #[test]
    fn constant_has_no_positive_modes() {
        let tc = trig_coeffs(&catalog("one", 1).unwrap(), 3, &QuadratureRule::default());
        let r = riesz_projection(&tc, 1, RieszSign::Plus).unwrap();
        for x in [0.0, 1.0, 4.0] {
            assert!(r.eval(x)[0].norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_analytic_half() {
        let tc = trig_coeffs(&catalog("cos_1", 1).unwrap(), 3, &QuadratureRule::default());
        let r = riesz_projection(&tc, 0, RieszSign::Plus).unwrap();
        for i in 0..16 {
            let x = i as f64 * 0.4;
            let want = Complex64::new(x.cos() / 2.0, x.sin() / 2.0);
            assert!((r.eval(x)[0] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn plus_and_minus_partition_the_modes() {
        let f = FunctionOnI::new("c2s5", 2, |x, out| {
            out[0] = (2.0 * x).cos() + (5.0 * x).sin();
            out[1] = -(2.0 * x).cos();
        })
        .unwrap();
        let tc = trig_coeffs(&f, 6, &QuadratureRule::default());
        let full = ExponentialCoefficients::from_trig(&tc);
        for m in -5..=5 {
            let plus = riesz_projection(&tc, m, RieszSign::Plus).unwrap();
            let minus = riesz_projection(&tc, m, RieszSign::Minus).unwrap();
            assert_eq!(plus.add(&minus).unwrap(), full);
            for i in 0..10 {
                let x = i as f64 * 0.6;
                let sum = plus.add(&minus).unwrap().eval(x);
                let fx = f.eval(x);
                for j in 0..2 {
                    assert!((sum[j].re - fx[j]).abs() < 1e-12 && sum[j].im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn round_trip_to_trig() {
        let tc = trig_coeffs(&catalog("xsin_3", 1).unwrap(), 5, &QuadratureRule::default());
        let back = ExponentialCoefficients::from_trig(&tc).to_trig();
        for k in 0..5 {
            assert!((back.c[k][0].re - tc.c[k][0]).abs() < 1e-15 && back.c[k][0].im.abs() < 1e-15);
            assert!((back.s[k][0].re - tc.s[k][0]).abs() < 1e-15 && back.s[k][0].im.abs() < 1e-15);
        }
    }

    #[test]
    fn range_checked() {
        let tc = trig_coeffs(&catalog("one", 1).unwrap(), 3, &QuadratureRule::default());
        assert!(matches!(riesz_projection(&tc, 4, RieszSign::Plus), Err(Error::Range(_))));
        assert!(matches!(riesz_projection(&tc, -4, RieszSign::Minus), Err(Error::Range(_))));
        assert!(riesz_projection(&tc, -3, RieszSign::Minus).is_ok());
    }
}
