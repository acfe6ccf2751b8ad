//! Named test functions with analytic derivatives.
//!
//! Every entry is a scalar profile repeated in each of the `dim`
//! components.

use std::f64::consts::{FRAC_PI_2, PI};

use super::function::FunctionOnI;
use crate::error::{Error, Result};
use crate::rootbasis::{root_combination, RootCoefficients};

/// Names accepted by [`catalog`]; `<k>` is a positive integer.
pub const CATALOG_NAMES: &[&str] = &["zero", "one", "cos_<k>", "xsin_<k>", "combo", "bump", "bump_balanced"];

/// Catalog entries used by the verification suite.
pub const STANDARD_CATALOG: &[&str] = &["zero", "one", "cos_2", "xsin_3", "combo", "bump", "bump_balanced"];

pub fn catalog(name: &str, dim: usize) -> Result<FunctionOnI> {
    if dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    let f = match name {
        "zero" => FunctionOnI::replicated("zero", dim, |_| 0.0, |_| 0.0, |_| 0.0)?,
        "one" => FunctionOnI::replicated("one", dim, |_| 1.0, |_| 0.0, |_| 0.0)?,
        "combo" => root_combination("combo", &combo_coefficients(dim)),
        "bump" => FunctionOnI::replicated(
            "bump",
            dim,
            |x| bump(x, PI, PI, 0),
            |x| bump(x, PI, PI, 1),
            |x| bump(x, PI, PI, 2),
        )?,
        "bump_balanced" => {
            let g = |x: f64, order| bump(x, FRAC_PI_2, FRAC_PI_2, order) - 3.0 * bump(x, 3.0 * FRAC_PI_2, FRAC_PI_2, order);
            FunctionOnI::replicated("bump_balanced", dim, move |x| g(x, 0), move |x| g(x, 1), move |x| g(x, 2))?
        }
        _ => {
            if let Some(k) = indexed(name, "cos_") {
                let kf = k as f64;
                FunctionOnI::replicated(
                    name,
                    dim,
                    move |x| (kf * x).cos(),
                    move |x| -kf * (kf * x).sin(),
                    move |x| -kf * kf * (kf * x).cos(),
                )?
            } else if let Some(k) = indexed(name, "xsin_") {
                let kf = k as f64;
                FunctionOnI::replicated(
                    name,
                    dim,
                    move |x| x * (kf * x).sin(),
                    move |x| (kf * x).sin() + kf * x * (kf * x).cos(),
                    move |x| 2.0 * kf * (kf * x).cos() - kf * kf * x * (kf * x).sin(),
                )?
            } else {
                return Err(Error::Lookup(name.to_string()));
            }
        }
    };
    Ok(f)
}

fn indexed(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse::<usize>().ok().filter(|&k| k >= 1)
}

/// `0.5 cos x − 0.25 x sin 2x + 0.1 cos 4x` in every component.
pub fn combo_coefficients(dim: usize) -> RootCoefficients {
    let mut c = RootCoefficients::zeros(dim, 4);
    c.a[0].fill(0.5);
    c.b[1].fill(-0.25);
    c.a[3].fill(0.1);
    c
}

/// Derivative of order 0..=2 of `exp(-1/(1-t²))`, `t = (x - center)/radius`,
/// with respect to `x`. Zero outside `|t| < 1`.
fn bump(x: f64, center: f64, radius: f64, order: usize) -> f64 {
    let t = (x - center) / radius;
    let s = 1.0 - t * t;
    if s <= 0.0 {
        return 0.0;
    }
    let b = (-1.0 / s).exp();
    if b == 0.0 {
        return 0.0;
    }
    let g1 = -2.0 * t / (s * s);
    match order {
        0 => b,
        1 => b * g1 / radius,
        2 => {
            let g2 = -(2.0 + 6.0 * t * t) / (s * s * s);
            b * (g1 * g1 + g2) / (radius * radius)
        }
        _ => unreachable!("bump derivatives are available up to order 2"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorfn::norms::fd_derivative;
    use std::f64::consts::TAU;

    #[test]
    fn spot_values() {
        assert_eq!(catalog("zero", 3).unwrap().eval(1.3), vec![0.0; 3]);
        let v = catalog("xsin_3", 1).unwrap().eval(PI / 2.0)[0];
        assert!((v + PI / 2.0).abs() < 1e-15);
        assert_eq!(catalog("cos_2", 1).unwrap().deriv2(0.0).unwrap(), vec![-4.0]);
    }

    #[test]
    fn unknown_names() {
        for name in ["nosuch", "cos_", "xsin_0", "cos_x", ""] {
            assert!(matches!(catalog(name, 1), Err(Error::Lookup(_))), "{name}");
        }
    }

    #[test]
    fn bumps_vanish_to_second_order_at_ends() {
        for name in ["bump", "bump_balanced"] {
            let f = catalog(name, 2).unwrap();
            for x in [0.0, TAU] {
                assert_eq!(f.eval(x), vec![0.0, 0.0]);
                assert_eq!(f.deriv1(x).unwrap(), vec![0.0, 0.0]);
                assert_eq!(f.deriv2(x).unwrap(), vec![0.0, 0.0]);
            }
        }
    }

    #[test]
    fn replicated_components() {
        let f = catalog("xsin_3", 4).unwrap();
        let v = f.eval(0.7);
        assert!(v.iter().all(|&c| c == v[0]));
    }

    /// Observed order of the finite-difference derivatives against the
    /// analytic ones, halving h from 2π/64.
    #[test]
    fn fd_converges_to_analytic() {
        for name in STANDARD_CATALOG.iter().filter(|n| !matches!(**n, "zero" | "one")) {
            let f = catalog(name, 1).unwrap();
            let xs: Vec<f64> = (1..40).map(|i| i as f64 * TAU / 40.0).collect();
            for order in 1..=2 {
                let err = |h: f64| {
                    xs.iter()
                        .map(|&x| {
                            let exact = if order == 1 { f.deriv1(x) } else { f.deriv2(x) }.unwrap()[0];
                            (fd_derivative(&f, x, order, h)[0] - exact).abs()
                        })
                        .fold(0.0, f64::max)
                };
                let (h1, h2) = (TAU / 64.0, TAU / 128.0);
                let rate = (err(h1) / err(h2)).log2();
                assert!(rate >= 1.9, "{name} order {order}: rate {rate}");
            }
        }
    }
}
