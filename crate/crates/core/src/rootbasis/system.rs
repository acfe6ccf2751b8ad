use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    /// `φ₀ᶜ = 1`
    Const,
    /// `φₙᶜ = cos nx`, eigenfunction for `λₙ = n²`
    Cos,
    /// `φₙˢ = x sin nx`, associated function
    XSin,
}

/// Member of the root system `{1, cos nx, x sin nx}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootSystemElement {
    kind: RootKind,
    n: usize,
}

impl RootSystemElement {
    pub fn new(kind: RootKind, n: usize) -> Result<Self> {
        check_index(kind == RootKind::Const, n)?;
        Ok(Self { kind, n })
    }

    pub const CONST: Self = Self { kind: RootKind::Const, n: 0 };

    pub fn cos(n: usize) -> Self {
        assert!(n >= 1, "cos elements start at n = 1");
        Self { kind: RootKind::Cos, n }
    }

    pub fn xsin(n: usize) -> Self {
        assert!(n >= 1, "x·sin elements start at n = 1");
        Self { kind: RootKind::XSin, n }
    }

    pub fn kind(&self) -> RootKind {
        self.kind
    }

    pub fn index(&self) -> usize {
        self.n
    }

    /// Eigenvalue `λₙ = n²` the element is attached to.
    pub fn eigenvalue(&self) -> f64 {
        (self.n * self.n) as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_derivative(x, 0)
    }

    /// Analytic derivative of order 0, 1 or 2.
    pub fn eval_derivative(&self, x: f64, order: usize) -> f64 {
        let n = self.n as f64;
        let (s, c) = (n * x).sin_cos();
        match (self.kind, order) {
            (RootKind::Const, 0) => 1.0,
            (RootKind::Const, _) => 0.0,
            (RootKind::Cos, 0) => c,
            (RootKind::Cos, 1) => -n * s,
            (RootKind::Cos, 2) => -n * n * c,
            (RootKind::XSin, 0) => x * s,
            (RootKind::XSin, 1) => s + n * x * c,
            (RootKind::XSin, 2) => 2.0 * n * c - n * n * (x * s),
            _ => panic!("root functions are differentiated up to order 2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BioKind {
    /// `v₀ᶜ = (2π − x)/(2π²)`
    Const,
    /// `vₙᶜ = (2π − x) cos(nx)/π²`
    Cos,
    /// `vₙˢ = sin(nx)/π²`
    Sin,
}

/// Member of the system biorthogonal to the root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BioSystemElement {
    kind: BioKind,
    n: usize,
}

impl BioSystemElement {
    pub fn new(kind: BioKind, n: usize) -> Result<Self> {
        check_index(kind == BioKind::Const, n)?;
        Ok(Self { kind, n })
    }

    pub const CONST: Self = Self { kind: BioKind::Const, n: 0 };

    pub fn cos(n: usize) -> Self {
        assert!(n >= 1, "cos elements start at n = 1");
        Self { kind: BioKind::Cos, n }
    }

    pub fn sin(n: usize) -> Self {
        assert!(n >= 1, "sin elements start at n = 1");
        Self { kind: BioKind::Sin, n }
    }

    pub fn kind(&self) -> BioKind {
        self.kind
    }

    pub fn index(&self) -> usize {
        self.n
    }

    /// The root element this functional picks out.
    pub fn dual(&self) -> RootSystemElement {
        let kind = match self.kind {
            BioKind::Const => RootKind::Const,
            BioKind::Cos => RootKind::Cos,
            BioKind::Sin => RootKind::XSin,
        };
        RootSystemElement { kind, n: self.n }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pi2 = PI * PI;
        match self.kind {
            BioKind::Const => (TAU - x) / (2.0 * pi2),
            BioKind::Cos => (TAU - x) * (self.n as f64 * x).cos() / pi2,
            BioKind::Sin => (self.n as f64 * x).sin() / pi2,
        }
    }
}

fn check_index(is_const: bool, n: usize) -> Result<()> {
    match (is_const, n) {
        (true, 0) | (false, 1..) => Ok(()),
        (true, _) => Err(Error::Parameter(format!("constant element must have n = 0, got {n}"))),
        (false, _) => Err(Error::Parameter("oscillating elements start at n = 1".into())),
    }
}

/// `(const, cos 1..N, xsin 1..N)`, the row order of the Gram matrix.
pub fn root_elements(n_max: usize) -> Vec<RootSystemElement> {
    std::iter::once(RootSystemElement::CONST)
        .chain((1..=n_max).map(RootSystemElement::cos))
        .chain((1..=n_max).map(RootSystemElement::xsin))
        .collect()
}

/// `(const, cos 1..N, sin 1..N)`, the column order of the Gram matrix.
pub fn bio_elements(n_max: usize) -> Vec<BioSystemElement> {
    std::iter::once(BioSystemElement::CONST)
        .chain((1..=n_max).map(BioSystemElement::cos))
        .chain((1..=n_max).map(BioSystemElement::sin))
        .collect()
}
