use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::Elem;

pub type Result<T> = std::result::Result<T, Error>;

/// Where a map fails to preserve joins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JoinWitness {
    /// `f(0) != 0`.
    Bottom,
    /// `f(x ∨ y) != f(x) ∨ f(y)`.
    Pair(Elem, Elem),
}

impl fmt::Display for JoinWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JoinWitness::Bottom => write!(f, "f(bottom) is not bottom"),
            JoinWitness::Pair(x, y) => write!(f, "f({x} v {y}) != f({x}) v f({y})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NucleusLaw {
    Inflationary,
    Idempotent,
    PreservesMeets,
}

impl fmt::Display for NucleusLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NucleusLaw::Inflationary => "x <= j(x)",
            NucleusLaw::Idempotent => "j(j(x)) = j(x)",
            NucleusLaw::PreservesMeets => "j(x ^ y) = j(x) ^ j(y)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("order is not antisymmetric: {0} <= {1} and {1} <= {0}")]
    AntisymmetryViolation(Elem, Elem),
    #[error("index {index} out of range for {size} elements")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("{what} of size {requested} exceeds cap {cap}")]
    SizeCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("not a base: element {0} is not the join of the base elements below it")]
    NotABase(Elem),
    #[error("lattice is not a frame")]
    NotAFrame,
    #[error("map does not preserve joins: {0}")]
    NotJoinPreserving(JoinWitness),
    #[error("map is not symmetrizable: f({x}) >< {y} and {x} >< f†({y}) disagree")]
    NotSymmetrizable { x: Elem, y: Elem },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a nucleus: {law} fails at {witness:?}")]
    NotANucleus { law: NucleusLaw, witness: Vec<Elem> },
    /// An internal cross-check between two independent computations disagreed.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}
