use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Convention, HarmonicSolution, StripGrid};
use crate::error::Result;
use crate::rootbasis::RootCoefficients;

/// On-disk form of a solution: the trace coefficients plus the convention
/// used for the `y cos nx` term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub a0: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub convention: Convention,
}

impl HarmonicSolution {
    pub fn to_file(&self) -> SolutionFile {
        let c = self.coeffs();
        SolutionFile {
            dim: c.dim,
            n: c.n,
            a0: c.a0.clone(),
            a: c.a.clone(),
            b: c.b.clone(),
            convention: self.convention(),
        }
    }

    pub fn from_file(file: SolutionFile) -> Result<Self> {
        let coeffs = RootCoefficients { dim: file.dim, n: file.n, a0: file.a0, a: file.a, b: file.b };
        Self::from_coefficients(coeffs, file.convention)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

/// Writes `u` on the grid as CSV, header `x,y,component_0..component_{d-1}`,
/// rows ordered by `y` then `x`, values with 17 significant digits.
pub fn write_field_csv<W: Write>(sol: &HarmonicSolution, grid: &StripGrid, mut out: W) -> Result<()> {
    let header: Vec<String> = ["x".to_string(), "y".to_string()]
        .into_iter()
        .chain((0..sol.dim()).map(|j| format!("component_{j}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let mut value = vec![0.0; sol.dim()];
    for &y in grid.ys() {
        for &x in grid.xs() {
            sol.accumulate(x, y, (0, 0), &mut value);
            write!(out, "{x:.16e},{y:.16e}")?;
            for v in &value {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::{solve, solve_with};
    use crate::vectorfn::{catalog, QuadratureRule};

    #[test]
    fn json_round_trip_keeps_convention() {
        let f = catalog("combo", 2).unwrap();
        let rule = QuadratureRule::default();
        for conv in [Convention::HarmonicConsistent, Convention::StrictPaper] {
            let sol = solve_with(&f, 6, &rule, conv).unwrap();
            let text = sol.to_json().unwrap();
            assert!(text.contains(conv.as_str()));
            let back = HarmonicSolution::from_json(&text).unwrap();
            assert_eq!(back, sol);
        }
    }

    #[test]
    fn csv_layout() {
        let sol = solve(&catalog("xsin_3", 2).unwrap(), 8, &QuadratureRule::default()).unwrap();
        let grid = StripGrid::uniform(3, 2, 1.0).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&sol, &grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,component_0,component_1");
        assert_eq!(lines.len(), 1 + 6);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields.len(), 4);
        assert_eq!(fields[1], "5.0000000000000000e-1");
        let v: f64 = fields[2].parse().unwrap();
        // u(0, 1/2) = e^{-3/2}/2
        assert!((v - 0.5 * (-1.5f64).exp()).abs() < 1e-12);
    }
}
