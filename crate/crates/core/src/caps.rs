//! Size caps for constructions and exhaustive searches.

use std::str::FromStr;

use crate::error::{Error, Result};

/// Environment variable holding cap overrides.
pub const CAP_ENV: &str = "OAKIT_CAP";

/// Configurable size limits. Exceeding any of them is a clean
/// [`Error::SizeCap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of lattice elements.
    pub lattice: usize,
    /// Maximum base-set size for powersets.
    pub powerset: usize,
    /// Maximum poset size for down-set lattices.
    pub downset: usize,
    /// Maximum lattice size for the second-order positivity oracle.
    pub oracle: usize,
    /// Maximum lattice size for all-subsets splitting checks.
    pub exhaustive_split: usize,
    /// Maximum lattice size for nucleus enumeration.
    pub nuclei: usize,
    /// Maximum number of points in a topology.
    pub points: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            lattice: 4096,
            powerset: 5,
            downset: 12,
            oracle: 14,
            exhaustive_split: 12,
            nuclei: 10,
            points: 16,
        }
    }
}

impl Caps {
    /// Defaults with overrides from `OAKIT_CAP` applied, when set.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAP_ENV) {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }

    /// Applies an override string. A bare number sets the lattice cap;
    /// otherwise a comma-separated list of `key=value` pairs, where the keys
    /// are the field names of this struct.
    pub fn with_overrides(mut self, spec: &str) -> Result<Caps> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        if let Ok(n) = usize::from_str(spec) {
            self.lattice = n;
            return Ok(self);
        }
        for item in spec.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::PreconditionFailed(format!("bad cap override `{item}`")))?;
            let value = usize::from_str(value.trim())
                .map_err(|_| Error::PreconditionFailed(format!("bad cap value `{value}`")))?;
            let slot = match key.trim() {
                "lattice" => &mut self.lattice,
                "powerset" => &mut self.powerset,
                "downset" => &mut self.downset,
                "oracle" => &mut self.oracle,
                "exhaustive_split" => &mut self.exhaustive_split,
                "nuclei" => &mut self.nuclei,
                "points" => &mut self.points,
                other => {
                    return Err(Error::PreconditionFailed(format!("unknown cap `{other}`")));
                }
            };
            *slot = value;
        }
        Ok(self)
    }

    pub(crate) fn check(what: &'static str, requested: usize, cap: usize) -> Result<()> {
        if requested > cap {
            Err(Error::SizeCap {
                what,
                requested,
                cap,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_number_sets_lattice_cap() {
        let caps = Caps::default().with_overrides("100").unwrap();
        assert_eq!(caps.lattice, 100);
        assert_eq!(caps.powerset, 5);
    }

    #[test]
    fn keyed_overrides() {
        let caps = Caps::default()
            .with_overrides("powerset=7, nuclei=12")
            .unwrap();
        assert_eq!(caps.powerset, 7);
        assert_eq!(caps.nuclei, 12);
        assert!(Caps::default().with_overrides("bogus=1").is_err());
        assert!(Caps::default().with_overrides("powerset").is_err());
    }
}
