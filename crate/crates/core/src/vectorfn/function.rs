use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Writes the value at `x` into the output slice (length `dim`).
pub type EvalFn = Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>;

/// A map `[0, 2π] → ℝ^d`, optionally with analytic first and second derivatives.
#[derive(Clone)]
pub struct FunctionOnI {
    name: String,
    dim: usize,
    eval: EvalFn,
    deriv1: Option<EvalFn>,
    deriv2: Option<EvalFn>,
}

impl fmt::Debug for FunctionOnI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOnI")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("deriv1", &self.deriv1.is_some())
            .field("deriv2", &self.deriv2.is_some())
            .finish()
    }
}

impl FunctionOnI {
    pub fn new<F>(name: impl Into<String>, dim: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        Ok(Self {
            name: name.into(),
            dim,
            eval: Arc::new(eval),
            deriv1: None,
            deriv2: None,
        })
    }

    pub fn with_derivatives<F1, F2>(mut self, deriv1: F1, deriv2: F2) -> Self
    where
        F1: Fn(f64, &mut [f64]) + Send + Sync + 'static,
        F2: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        self.deriv1 = Some(Arc::new(deriv1));
        self.deriv2 = Some(Arc::new(deriv2));
        self
    }

    /// Lifts a scalar function (with analytic derivatives) to ℝ^d by
    /// repeating it in every component.
    pub fn replicated<F0, F1, F2>(name: impl Into<String>, dim: usize, f: F0, d1: F1, d2: F2) -> Result<Self>
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Ok(Self::new(name, dim, move |x, out: &mut [f64]| out.fill(f(x)))?
            .with_derivatives(move |x, out: &mut [f64]| out.fill(d1(x)), move |x, out: &mut [f64]| out.fill(d2(x))))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_derivatives(&self) -> bool {
        self.deriv1.is_some() && self.deriv2.is_some()
    }

    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        (self.eval)(x, out)
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    pub fn deriv1(&self, x: f64) -> Option<Vec<f64>> {
        self.deriv1.as_ref().map(|d| {
            let mut out = vec![0.0; self.dim];
            d(x, &mut out);
            out
        })
    }

    pub fn deriv2(&self, x: f64) -> Option<Vec<f64>> {
        self.deriv2.as_ref().map(|d| {
            let mut out = vec![0.0; self.dim];
            d(x, &mut out);
            out
        })
    }

    /// Derivative of order 0, 1 or 2 as an evaluable function.
    pub fn derivative(&self, order: usize) -> Result<FunctionOnI> {
        let eval = match order {
            0 => return Ok(self.clone()),
            1 => self.deriv1.clone(),
            2 => self.deriv2.clone(),
            _ => None,
        }
        .ok_or_else(|| Error::Capability(format!("`{}` has no analytic derivative of order {order}", self.name)))?;
        Ok(FunctionOnI {
            name: format!("{}^({order})", self.name),
            dim: self.dim,
            eval,
            deriv1: None,
            deriv2: None,
        })
    }

    /// `c · f`, derivatives included.
    pub fn scaled(&self, c: f64) -> FunctionOnI {
        let scale = |g: &EvalFn| -> EvalFn {
            let g = g.clone();
            Arc::new(move |x, out: &mut [f64]| {
                g(x, out);
                out.iter_mut().for_each(|v| *v *= c);
            })
        };
        FunctionOnI {
            name: format!("{c}*{}", self.name),
            dim: self.dim,
            eval: scale(&self.eval),
            deriv1: self.deriv1.as_ref().map(scale),
            deriv2: self.deriv2.as_ref().map(scale),
        }
    }

    /// `α f + β g`; derivatives are kept when both operands have them.
    pub fn linear_combination(alpha: f64, f: &FunctionOnI, beta: f64, g: &FunctionOnI) -> Result<FunctionOnI> {
        if f.dim != g.dim {
            return Err(Error::Parameter(format!("dimension mismatch: {} vs {}", f.dim, g.dim)));
        }
        let dim = f.dim;
        let combine = |a: &EvalFn, b: &EvalFn| -> EvalFn {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x, out: &mut [f64]| {
                let mut tmp = vec![0.0; dim];
                a(x, out);
                b(x, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o = alpha * *o + beta * t;
                }
            })
        };
        let pair = |a: &Option<EvalFn>, b: &Option<EvalFn>| match (a, b) {
            (Some(a), Some(b)) => Some(combine(a, b)),
            _ => None,
        };
        Ok(FunctionOnI {
            name: format!("{alpha}*{}+{beta}*{}", f.name, g.name),
            dim,
            eval: combine(&f.eval, &g.eval),
            deriv1: pair(&f.deriv1, &g.deriv1),
            deriv2: pair(&f.deriv2, &g.deriv2),
        })
    }
}
