use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

use super::{FinLattice, FinPoset};

/// A subset of the points of a topology, as a bitmask.
pub type PointSet = u64;

fn fmt_set(s: PointSet) -> String {
    let members: Vec<String> = (0..64)
        .filter(|i| s & (1 << i) != 0)
        .map(|i| i.to_string())
        .collect();
    format!("{{{}}}", members.join(","))
}

/// A finite topological space on points `0..points`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    points: usize,
    /// Distinct opens in increasing bitmask order.
    opens: Vec<PointSet>,
}

/// Validates a family of opens. Missing `∅`, missing the full set, or a
/// missing intersection or union is an error naming the offending sets;
/// nothing is added silently. Duplicates are merged.
pub fn topology_from_opens(points: usize, opens: &[PointSet], caps: &Caps) -> Result<Topology> {
    Caps::check("topology points", points, caps.points.min(64))?;
    let full: PointSet = if points == 64 {
        u64::MAX
    } else {
        (1u64 << points) - 1
    };
    if let Some(&bad) = opens.iter().find(|&&u| u & !full != 0) {
        return Err(Error::NotATopology(format!(
            "{} mentions points outside 0..{points}",
            fmt_set(bad)
        )));
    }
    let mut family = opens.to_vec();
    family.sort_unstable();
    family.dedup();
    let present = |u: PointSet| family.binary_search(&u).is_ok();
    if !present(0) {
        return Err(Error::NotATopology("missing the empty set".into()));
    }
    for &u in &family {
        for &v in &family {
            if !present(u & v) {
                return Err(Error::NotATopology(format!(
                    "{} ∩ {} = {} is not open",
                    fmt_set(u),
                    fmt_set(v),
                    fmt_set(u & v)
                )));
            }
            if !present(u | v) {
                return Err(Error::NotATopology(format!(
                    "{} ∪ {} = {} is not open",
                    fmt_set(u),
                    fmt_set(v),
                    fmt_set(u | v)
                )));
            }
        }
    }
    if !present(full) {
        return Err(Error::NotATopology(format!(
            "missing the full set {}",
            fmt_set(full)
        )));
    }
    Ok(Topology {
        points,
        opens: family,
    })
}

impl Topology {
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn full(&self) -> PointSet {
        *self.opens.last().expect("a topology always has opens")
    }

    pub fn is_open(&self, u: PointSet) -> bool {
        self.opens.binary_search(&u).is_ok()
    }

    /// Union of the opens contained in `y`.
    pub fn interior(&self, y: PointSet) -> PointSet {
        self.opens
            .iter()
            .filter(|&&u| u & y == u)
            .fold(0, |acc, &u| acc | u)
    }

    /// Points every open neighbourhood of which overlaps `y`.
    pub fn closure(&self, y: PointSet) -> PointSet {
        (0..self.points)
            .filter(|&x| {
                self.opens
                    .iter()
                    .filter(|&&u| u & (1 << x) != 0)
                    .all(|&u| u & y != 0)
            })
            .fold(0, |acc, x| acc | (1 << x))
    }

    /// `int(cl(int(y)))`.
    pub fn regular_core(&self, y: PointSet) -> PointSet {
        self.interior(self.closure(self.interior(y)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoOps {
    pub interior: PointSet,
    pub closure: PointSet,
    pub regular_core: PointSet,
}

pub fn topo_ops(space: &Topology, y: PointSet) -> TopoOps {
    TopoOps {
        interior: space.interior(y),
        closure: space.closure(y),
        regular_core: space.regular_core(y),
    }
}

/// The frame of opens ordered by inclusion; element `i` is `opens()[i]`.
pub fn open_set_lattice(space: &Topology) -> Arc<FinLattice> {
    let opens = space.opens();
    let n = opens.len();
    let index = |u: PointSet| opens.binary_search(&u).expect("opens are closed") as u32;
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for (i, &u) in opens.iter().enumerate() {
        for (k, &v) in opens.iter().enumerate() {
            meet[i * n + k] = index(u & v);
            join[i * n + k] = index(u | v);
        }
    }
    let poset = FinPoset::from_leq_fn(n, |i, k| opens[i] & opens[k] == opens[i]);
    Arc::new(FinLattice::from_tables(poset, meet, join))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(points: usize, opens: &[PointSet]) -> Topology {
        topology_from_opens(points, opens, &Caps::default()).unwrap()
    }

    #[test]
    fn sierpinski() {
        let s = space(2, &[0b00, 0b10, 0b11]);
        assert_eq!(s.opens().len(), 3);
        assert_eq!(
            topo_ops(&s, 0b10),
            TopoOps {
                interior: 0b10,
                closure: 0b11,
                regular_core: 0b11
            }
        );
        assert!(open_set_lattice(&s).is_frame());
    }

    #[test]
    fn invalid_families() {
        let caps = Caps::default();
        let err = topology_from_opens(2, &[0b00, 0b01, 0b10], &caps).unwrap_err();
        assert!(matches!(err, Error::NotATopology(msg) if msg.contains("∪")));
        let err = topology_from_opens(2, &[0b01, 0b11], &caps).unwrap_err();
        assert!(matches!(err, Error::NotATopology(msg) if msg.contains("empty")));
        let err = topology_from_opens(2, &[0b00], &caps).unwrap_err();
        assert!(matches!(err, Error::NotATopology(msg) if msg.contains("full")));
        assert!(topology_from_opens(1, &[0, 0b10], &caps).is_err());
    }

    #[test]
    fn three_point_space() {
        let t = space(3, &[0, 0b010, 0b100, 0b110, 0b111]);
        assert_eq!(t.opens().len(), 5);
        // neighbourhoods of 0: only X; of 2: {2},{1,2},X
        assert_eq!(
            topo_ops(&t, 0b010),
            TopoOps {
                interior: 0b010,
                closure: 0b011,
                regular_core: 0b010
            }
        );
    }

    #[test]
    fn empty_set_is_fixed() {
        let t = space(3, &[0, 0b010, 0b100, 0b110, 0b111]);
        assert_eq!(
            topo_ops(&t, 0),
            TopoOps {
                interior: 0,
                closure: 0,
                regular_core: 0
            }
        );
    }
}
