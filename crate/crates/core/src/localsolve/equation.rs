use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `a x^k + b y^k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThueEquation {
    pub a: i64,
    pub b: i64,
    pub k: u32,
}

impl ThueEquation {
    pub fn new(a: i64, b: i64, k: u32) -> Result<Self> {
        if a == 0 || b == 0 {
            return invalid("Thue coefficients must be nonzero");
        }
        if k < 3 {
            return invalid(format!("degree must be at least 3, got {k}"));
        }
        Ok(Self { a, b, k })
    }
}

/// `a x^k + b y^k + c z^k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FermatEquation {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub k: u32,
}

impl FermatEquation {
    pub fn new(a: i64, b: i64, c: i64, k: u32) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return invalid("Fermat coefficients must be nonzero");
        }
        if k < 3 {
            return invalid(format!("degree must be at least 3, got {k}"));
        }
        Ok(Self { a, b, c, k })
    }
}

/// Either equation shape. Serialized without a tag: the presence of `c`
/// distinguishes the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Equation {
    Fermat(FermatEquation),
    Thue(ThueEquation),
}

impl Equation {
    pub fn k(&self) -> u32 {
        match self {
            Equation::Thue(e) => e.k,
            Equation::Fermat(e) => e.k,
        }
    }

    pub fn coefficients(&self) -> Vec<i64> {
        match self {
            Equation::Thue(e) => vec![e.a, e.b],
            Equation::Fermat(e) => vec![e.a, e.b, e.c],
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Equation::Fermat(_))
    }

    /// Re-checks the constructor invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Equation::Thue(e) => ThueEquation::new(e.a, e.b, e.k).map(|_| ()),
            Equation::Fermat(e) => FermatEquation::new(e.a, e.b, e.c, e.k).map(|_| ()),
        }
    }

    pub(crate) fn form(&self) -> DiagonalForm {
        DiagonalForm {
            coeffs: self.coefficients().into_iter().map(i128::from).collect(),
            constant: if self.is_homogeneous() { 0 } else { -1 },
            k: self.k(),
        }
    }
}

impl From<ThueEquation> for Equation {
    fn from(e: ThueEquation) -> Self {
        Equation::Thue(e)
    }
}

impl From<FermatEquation> for Equation {
    fn from(e: FermatEquation) -> Self {
        Equation::Fermat(e)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.k();
        for (i, (c, v)) in self.coefficients().iter().zip(["x", "y", "z"]).enumerate() {
            match (i, *c < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}{v}^{k}", c.unsigned_abs())?;
        }
        write!(f, " = {}", if self.is_homogeneous() { 0 } else { 1 })
    }
}

/// `sum c_i x_i^k + constant`, the polynomial whose zeros are sought.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DiagonalForm {
    pub coeffs: Vec<i128>,
    pub constant: i128,
    pub k: u32,
}

impl DiagonalForm {
    pub fn eval_mod(&self, point: &[i128], m: i128) -> i128 {
        use crate::arith::{mul_mod, pow_mod};
        let mut acc = self.constant.rem_euclid(m);
        for (&c, &x) in self.coeffs.iter().zip(point) {
            acc = (acc + mul_mod(c, pow_mod(x, self.k as u64, m), m)) % m;
        }
        acc
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant == 0
    }
}
