//! Transform families: scale functions, Laplace transforms, characteristic
//! functions and probability generating functions.

mod cf;
mod descriptor;
mod lt;
mod pgf;
mod scale;

use std::fmt;
use std::str::FromStr;

pub use cf::{theta_bound, CfFamily};
pub use descriptor::Descriptor;
pub use lt::{LtFamily, Outer};
pub use pgf::{ComplexPgf, FnPgf, PgfFamily};
pub use scale::{
    check_scale_equation, scale_equation_residual, ScaleFunction, ScaleKind, DEFAULT_EPSILON,
    DEFAULT_POWER_RATIO,
};

use crate::error::{Error, Result};

/// Either kind of continuous transform accepted by the stability checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Lt(LtFamily),
    Cf(CfFamily),
}

impl Transform {
    pub fn descriptor(&self) -> Descriptor {
        match self {
            Transform::Lt(f) => f.descriptor(),
            Transform::Cf(f) => f.descriptor(),
        }
    }
}

impl From<LtFamily> for Transform {
    fn from(f: LtFamily) -> Self {
        Transform::Lt(f)
    }
}

impl From<CfFamily> for Transform {
    fn from(f: CfFamily) -> Self {
        Transform::Cf(f)
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.descriptor().fmt(f)
    }
}

impl FromStr for Transform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let d = Descriptor::parse(s)?;
        match d.tag.as_str() {
            "linnik" | "gl" | "sal" | "gsal" => CfFamily::from_descriptor(&d).map(Transform::Cf),
            "gamma" | "ml" | "plinnik" | "sml" | "gsml" | "pstable" | "semistable" => {
                LtFamily::from_descriptor(&d).map(Transform::Lt)
            }
            other => Err(Error::descriptor(other, "unknown transform family")),
        }
    }
}
