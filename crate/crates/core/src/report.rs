//! Shared pieces of the check reports.

use serde::{Deserialize, Serialize};

use crate::lattice::Elem;

/// Outcome of one exhaustively checked law.
///
/// `witness` holds the lowest-index counterexample when the law fails; its
/// meaning (which positions are x, y, z) is documented by the check that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub witness: Option<Vec<Elem>>,
}

impl Check {
    pub fn pass(name: &str) -> Check {
        Check {
            name: name.to_string(),
            holds: true,
            witness: None,
        }
    }

    pub fn fail(name: &str, witness: Vec<Elem>) -> Check {
        Check {
            name: name.to_string(),
            holds: false,
            witness: Some(witness),
        }
    }

    /// Builds a check from the first counterexample of a scan.
    pub fn from_witness(name: &str, witness: Option<Vec<Elem>>) -> Check {
        match witness {
            None => Check::pass(name),
            Some(w) => Check::fail(name, w),
        }
    }
}

/// Collects violated internal equivalences; a report whose `violations`
/// list is non-empty means a law the toolkit asserts did not hold.
#[derive(Debug, Default)]
pub(crate) struct Violations(Vec<String>);

impl Violations {
    pub(crate) fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub(crate) fn into_vec(self) -> Vec<String> {
        self.0
    }
}
