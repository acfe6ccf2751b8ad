//! Finite-difference oracle for the Laplacian and convergence-order fits.

use crate::error::{Error, Result};

/// Samples of an ℝ^d-valued field on a uniform grid, indexed `[iy][ix]`.
pub type Samples = Vec<Vec<Vec<f64>>>;

/// Five-point Laplacian at interior nodes; boundary nodes are `None`.
pub fn fd_laplacian(samples: &Samples, hx: f64, hy: f64) -> Result<Vec<Vec<Option<Vec<f64>>>>> {
    let ny = samples.len();
    let nx = samples.first().map_or(0, Vec::len);
    if ny < 3 || nx < 3 {
        return Err(Error::Parameter(format!("five-point stencil needs at least a 3x3 grid, got {nx}x{ny}")));
    }
    if samples.iter().any(|row| row.len() != nx) {
        return Err(Error::Parameter("sample rows have different lengths".into()));
    }
    if !(hx > 0.0 && hy > 0.0) {
        return Err(Error::Parameter("grid spacings must be positive".into()));
    }
    let (cx, cy) = (1.0 / (hx * hx), 1.0 / (hy * hy));
    Ok((0..ny)
        .map(|iy| {
            (0..nx)
                .map(|ix| {
                    if iy == 0 || ix == 0 || iy == ny - 1 || ix == nx - 1 {
                        return None;
                    }
                    let c = &samples[iy][ix];
                    Some(
                        (0..c.len())
                            .map(|j| {
                                (samples[iy][ix - 1][j] - 2.0 * c[j] + samples[iy][ix + 1][j]) * cx
                                    + (samples[iy - 1][ix][j] - 2.0 * c[j] + samples[iy + 1][ix][j]) * cy
                            })
                            .collect(),
                    )
                })
                .collect()
        })
        .collect())
}

/// Largest Euclidean norm over the interior of a stencil output.
pub fn max_interior(lap: &[Vec<Option<Vec<f64>>>]) -> f64 {
    lap.iter()
        .flatten()
        .flatten()
        .map(|v| crate::vectorfn::norms::euclidean(v))
        .fold(0.0, f64::max)
}

/// Least-squares slope of `log residual` against `log h`.
pub fn convergence_order(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::Parameter(format!("need at least 3 (h, residual) pairs, got {}", pairs.len())));
    }
    if pairs.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(Error::Parameter("step sizes must be strictly decreasing".into()));
    }
    if pairs.iter().any(|&(h, r)| !(h > 0.0 && r > 0.0 && r.is_finite())) {
        return Err(Error::Parameter("step sizes and residuals must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(h, r)| (h.ln(), r.ln())).collect();
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(nx: usize, ny: usize, h: f64, u: impl Fn(f64, f64) -> f64) -> Samples {
        (0..ny)
            .map(|iy| (0..nx).map(|ix| vec![u(ix as f64 * h, iy as f64 * h)]).collect())
            .collect()
    }

    #[test]
    fn exact_on_harmonic_quadratic() {
        let s = sample(7, 5, 0.1, |x, y| x * x - y * y);
        let lap = fd_laplacian(&s, 0.1, 0.1).unwrap();
        assert!(lap[0][0].is_none() && lap[4][6].is_none());
        assert!(max_interior(&lap) < 1e-11);
    }

    #[test]
    fn constant_field() {
        let s = sample(4, 4, 0.3, |_, _| 2.5);
        assert_eq!(max_interior(&fd_laplacian(&s, 0.3, 0.3).unwrap()), 0.0);
    }

    #[test]
    fn quartic_second_order_error() {
        // Δ_h x⁴ = 12x² + 2h² exactly
        let mut pairs = Vec::new();
        for h in [0.1, 0.05, 0.025] {
            let s = sample(5, 3, h, |x, _| (x + 1.0).powi(4));
            let lap = fd_laplacian(&s, h, h).unwrap();
            let x = 2.0 * h + 1.0;
            let got = lap[1][2].as_ref().unwrap()[0];
            assert!((got - 12.0 * x * x - 2.0 * h * h).abs() < 1e-8);
            pairs.push((h, (got - 12.0 * x * x).abs()));
        }
        assert!((convergence_order(&pairs).unwrap() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn undersized_grid() {
        let s = sample(2, 5, 0.1, |x, _| x);
        assert!(matches!(fd_laplacian(&s, 0.1, 0.1), Err(Error::Parameter(_))));
    }

    #[test]
    fn order_of_power_laws() {
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let quad: Vec<_> = hs.iter().map(|&h| (h, h * h)).collect();
        assert!((convergence_order(&quad).unwrap() - 2.0).abs() < 1e-12);
        let lin: Vec<_> = hs.iter().map(|&h| (h, 3.0 * h)).collect();
        assert!((convergence_order(&lin).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_rejects_bad_input() {
        assert!(convergence_order(&[(0.1, 1.0), (0.05, 0.5)]).is_err());
        assert!(convergence_order(&[(0.1, 1.0), (0.05, 0.0), (0.02, 0.1)]).is_err());
        assert!(convergence_order(&[(0.1, 1.0), (0.2, 0.5), (0.02, 0.1)]).is_err());
    }
}
