use std::f64::consts::TAU;

use super::{HarmonicSolution, StripGrid, PARTIALS};
use crate::error::{Error, Result};
use crate::rootbasis::reconstruct_into;
use crate::vectorfn::norms::{euclidean, lp_norm_with};
use crate::vectorfn::quadrature::gauss_on_breaks;
use crate::vectorfn::{sobolev2_norm, DerivativeMode, FunctionOnI, NormParams, QuadratureRule};

const Y_ORDER: usize = 8;

/// `(max ‖u(0,y) − u(2π,y)‖, max ‖∂ₓu(0,y)‖)` over `ys`.
pub fn boundary_residuals(sol: &HarmonicSolution, ys: &[f64]) -> Result<(f64, f64)> {
    if ys.iter().any(|&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::Parameter("boundary residuals are taken at y > 0".into()));
    }
    let (mut periodic, mut flux) = (0.0f64, 0.0f64);
    for &y in ys {
        let diff: Vec<f64> = sol.eval(0.0, y).iter().zip(sol.eval(TAU, y)).map(|(a, b)| a - b).collect();
        periodic = periodic.max(euclidean(&diff));
        flux = flux.max(euclidean(&sol.eval_partial(0.0, y, (1, 0))?));
    }
    Ok((periodic, flux))
}

/// `‖u(·,0) − S_N f‖_p` at `y = 0`, where `S_N f` is the root-system partial
/// sum, and `‖u(·,y) − f‖_p` for `y > 0`.
pub fn trace_error(sol: &HarmonicSolution, f: &FunctionOnI, y: f64, p: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(y >= 0.0 && y.is_finite()) {
        return Err(Error::Parameter(format!("trace height must be >= 0, got {y}")));
    }
    if f.dim() != sol.dim() {
        return Err(Error::Parameter(format!("dimension mismatch: {} vs {}", f.dim(), sol.dim())));
    }
    let dim = sol.dim();
    let mut reference = vec![0.0; dim];
    lp_norm_with(dim, p, rule, |x, out| {
        sol.accumulate(x, y, (0, 0), out);
        if y == 0.0 {
            reconstruct_into(sol.coeffs(), x, &mut reference);
        } else {
            f.eval_into(x, &mut reference);
        }
        out.iter_mut().zip(&reference).for_each(|(o, r)| *o -= r);
    })
}

/// y-quadrature on `(0, ξ)`: Gauss panels between `0` and consecutive grid
/// ordinates, each split so that the fastest relevant mode `e^{-ny}` varies
/// by at most `e²` across a sub-panel.
fn y_rule(sol: &HarmonicSolution, grid: &StripGrid) -> (Vec<f64>, Vec<f64>) {
    let n_eff = sol.effective_order().max(1) as f64;
    let mut breaks = vec![0.0];
    for &y in grid.ys() {
        let lo = *breaks.last().expect("nonempty");
        // modes with n·y > 40 are below rounding, so the relevant frequency
        // near y is min(n_eff, 40/y)
        let width = (2.0 / n_eff).max(lo / 20.0);
        let pieces = ((y - lo) / width).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            breaks.push(lo + (y - lo) * k as f64 / pieces as f64);
        }
    }
    gauss_on_breaks(&breaks, Y_ORDER)
}

/// `∫₀^ξ ‖u(·,y)‖_{L^p} dy` on the truncated strip `Π_ξ`; with
/// `derivatives`, the sum of that quantity over all partials of order ≤ 2.
///
/// The x-integral uses `rule`; the y-integral uses Gauss panels between
/// the grid ordinates (see `grid.ys()`), refined near `y = 0`.
pub fn mixed_norm(
    sol: &HarmonicSolution,
    params: &NormParams,
    grid: &StripGrid,
    rule: &QuadratureRule,
    derivatives: bool,
) -> Result<f64> {
    check_height(grid, params.xi)?;
    Ok(mixed_norms(sol, &[params.p], grid, rule, derivatives)[0])
}

fn check_height(grid: &StripGrid, xi: f64) -> Result<()> {
    if (grid.xi() - xi).abs() > 1e-12 * xi {
        return Err(Error::Parameter(format!("grid height {} does not match norm height {xi}", grid.xi())));
    }
    Ok(())
}

/// `v^p`, avoiding `powf` for the common exponents.
#[inline]
fn pow_p(v: f64, p: f64) -> f64 {
    if p == 2.0 {
        v * v
    } else if p == 3.0 {
        v * v * v
    } else if p == 1.5 {
        v * v.sqrt()
    } else {
        v.powf(p)
    }
}

/// [`mixed_norm`] for several exponents in one pass over the tensor grid.
fn mixed_norms(sol: &HarmonicSolution, ps: &[f64], grid: &StripGrid, rule: &QuadratureRule, derivatives: bool) -> Vec<f64> {
    let orders: &[_] = if derivatives { &PARTIALS } else { &PARTIALS[..1] };
    let (y_nodes, y_weights) = y_rule(sol, grid);
    let n = sol.truncation();
    let trig: Vec<Vec<(f64, f64)>> =
        rule.nodes().iter().map(|&x| (1..=n).map(|k| (k as f64 * x).sin_cos()).collect()).collect();
    let mut decay = vec![0.0; n];
    let mut bufs = vec![vec![0.0; sol.dim()]; orders.len()];
    // sums[order][p]
    let mut sums = vec![vec![0.0; ps.len()]; orders.len()];
    let mut total = vec![0.0; ps.len()];
    for (&y, &wy) in y_nodes.iter().zip(&y_weights) {
        decay.iter_mut().enumerate().for_each(|(k, e)| *e = (-((k + 1) as f64) * y).exp());
        sums.iter_mut().for_each(|row| row.fill(0.0));
        for ((&x, &w), tx) in rule.nodes().iter().zip(rule.weights()).zip(&trig) {
            sol.accumulate_tabulated(x, y, orders, tx, &decay, &mut bufs);
            for (row, buf) in sums.iter_mut().zip(&bufs) {
                let v = euclidean(buf);
                if v > 0.0 {
                    row.iter_mut().zip(ps).for_each(|(sum, &p)| *sum += w * pow_p(v, p));
                }
            }
        }
        for (j, &p) in ps.iter().enumerate() {
            total[j] += wy * sums.iter().map(|row| row[j].powf(1.0 / p)).sum::<f64>();
        }
    }
    total
}

/// `‖u‖_{W²_{p,1}(Π_ξ)} / ‖f‖_{W²_p(I)}`.
pub fn apriori_ratio(
    f: &FunctionOnI,
    sol: &HarmonicSolution,
    params: &NormParams,
    rule: &QuadratureRule,
    grid: &StripGrid,
) -> Result<f64> {
    Ok(apriori_ratios(f, sol, &[params.p], params.xi, rule, grid)?[0])
}

/// [`apriori_ratio`] for each exponent in `ps`, sharing one field evaluation.
pub fn apriori_ratios(
    f: &FunctionOnI,
    sol: &HarmonicSolution,
    ps: &[f64],
    xi: f64,
    rule: &QuadratureRule,
    grid: &StripGrid,
) -> Result<Vec<f64>> {
    let mut denoms = Vec::with_capacity(ps.len());
    for &p in ps {
        NormParams::new(p, xi)?;
        let d = sobolev2_norm(f, p, rule, DerivativeMode::PreferAnalytic)?;
        if d == 0.0 {
            return Err(Error::Degenerate(format!("`{}` has zero W2p norm", f.name())));
        }
        denoms.push(d);
    }
    check_height(grid, xi)?;
    Ok(mixed_norms(sol, ps, grid, rule, true).iter().zip(&denoms).map(|(m, d)| m / d).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::solve;
    use crate::vectorfn::{catalog, QuadratureKind};
    use std::f64::consts::PI;

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn boundary_residuals_vanish() {
        for name in ["xsin_3", "cos_2", "combo", "bump"] {
            let sol = solve(&catalog(name, 2).unwrap(), 16, &rule()).unwrap();
            let (a, b) = boundary_residuals(&sol, &[0.1, 1.0, 10.0]).unwrap();
            assert!(a <= 1e-12 && b <= 1e-12, "{name}: {a} {b}");
        }
        let zero = solve(&catalog("zero", 1).unwrap(), 4, &rule()).unwrap();
        assert_eq!(boundary_residuals(&zero, &[0.5, 2.0]).unwrap(), (0.0, 0.0));
        assert!(boundary_residuals(&zero, &[0.0]).is_err());
    }

    #[test]
    fn trace_error_examples() {
        let f = catalog("xsin_3", 1).unwrap();
        let sol = solve(&f, 8, &rule()).unwrap();
        assert!(trace_error(&sol, &f, 0.0, 2.0, &rule()).unwrap() <= 1e-12);
        let errs: Vec<f64> = [1.0, 0.1, 0.01].iter().map(|&y| trace_error(&sol, &f, y, 2.0, &rule()).unwrap()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");

        let z = catalog("zero", 1).unwrap();
        let zs = solve(&z, 4, &rule()).unwrap();
        for y in [0.0, 0.5, 3.0] {
            assert_eq!(trace_error(&zs, &z, y, 2.0, &rule()).unwrap(), 0.0);
        }
        assert!(trace_error(&zs, &z, -1.0, 2.0, &rule()).is_err());
    }

    #[test]
    fn mixed_norm_closed_form() {
        let sol = solve(&catalog("cos_2", 1).unwrap(), 4, &rule()).unwrap();
        let params = NormParams::new(2.0, 5.0).unwrap();
        let grid = StripGrid::uniform(65, 64, 5.0).unwrap();
        let got = mixed_norm(&sol, &params, &grid, &rule(), false).unwrap();
        let want = PI.sqrt() * (1.0 - (-10.0f64).exp()) / 2.0;
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        // |∂^α u| scales by 1, 2, 2, 4, 4, 4
        let full = mixed_norm(&sol, &params, &grid, &rule(), true).unwrap();
        assert!((full - 17.0 * want).abs() < 1e-6, "{full}");
    }

    #[test]
    fn mixed_norm_of_zero() {
        let sol = solve(&catalog("zero", 1).unwrap(), 4, &rule()).unwrap();
        let params = NormParams::new(1.5, 3.0).unwrap();
        let grid = StripGrid::uniform(8, 8, 3.0).unwrap();
        assert_eq!(mixed_norm(&sol, &params, &grid, &rule(), true).unwrap(), 0.0);
        let wrong = StripGrid::uniform(8, 8, 4.0).unwrap();
        assert!(mixed_norm(&sol, &params, &wrong, &rule(), false).is_err());
    }

    #[test]
    fn mixed_norm_tail_is_exponentially_small() {
        let sol = solve(&catalog("xsin_3", 1).unwrap(), 8, &rule()).unwrap();
        let at = |xi: f64| {
            let params = NormParams::new(2.0, xi).unwrap();
            mixed_norm(&sol, &params, &StripGrid::uniform(16, 64, xi).unwrap(), &rule(), false).unwrap()
        };
        let (a, b) = (at(10.0), at(20.0));
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn apriori_ratio_cos2_closed_form() {
        let f = catalog("cos_2", 1).unwrap();
        let sol = solve(&f, 4, &rule()).unwrap();
        let xi = 10.0;
        let params = NormParams::new(2.0, xi).unwrap();
        let grid = StripGrid::uniform(16, 64, xi).unwrap();
        let got = apriori_ratio(&f, &sol, &params, &rule(), &grid).unwrap();
        let want = 17.0 * (1.0 - (-2.0 * xi).exp()) / 14.0;
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn apriori_ratio_refinement_and_scaling() {
        let f = catalog("xsin_3", 1).unwrap();
        let params = NormParams::new(2.0, 10.0).unwrap();
        let coarse_rule = rule();
        let fine_rule = QuadratureRule::new(QuadratureKind::GaussComposite, 128, 8).unwrap();
        let coarse = apriori_ratio(
            &f,
            &solve(&f, 8, &coarse_rule).unwrap(),
            &params,
            &coarse_rule,
            &StripGrid::uniform(16, 64, 10.0).unwrap(),
        )
        .unwrap();
        let fine = apriori_ratio(
            &f,
            &solve(&f, 8, &fine_rule).unwrap(),
            &params,
            &fine_rule,
            &StripGrid::uniform(16, 128, 10.0).unwrap(),
        )
        .unwrap();
        assert!(coarse.is_finite() && coarse > 0.0);
        assert!((coarse - fine).abs() / fine < 1e-3);

        let g = f.scaled(-3.5);
        let scaled = apriori_ratio(
            &g,
            &solve(&g, 8, &coarse_rule).unwrap(),
            &params,
            &coarse_rule,
            &StripGrid::uniform(16, 64, 10.0).unwrap(),
        )
        .unwrap();
        assert!((scaled - coarse).abs() / coarse < 1e-12);
    }

    #[test]
    fn apriori_ratio_degenerate() {
        let f = catalog("zero", 1).unwrap();
        let sol = solve(&f, 4, &rule()).unwrap();
        let params = NormParams::new(2.0, 5.0).unwrap();
        let grid = StripGrid::uniform(8, 8, 5.0).unwrap();
        assert!(matches!(apriori_ratio(&f, &sol, &params, &rule(), &grid), Err(Error::Degenerate(_))));
    }
}
