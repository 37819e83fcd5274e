//! Finite posets, lattices and frames.
//!
//! Elements are dense indices `0..n`. The order is stored as two bit
//! matrices (up-sets and down-sets) and binary meets and joins as full
//! tables, since the exhaustive checks elsewhere in the crate spend nearly
//! all their time in these lookups.

mod build;
mod topology;

use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use build::{
    chain_lattice, downset_lattice, powerset_lattice, product_lattice, ProductLattice,
    ProductLayout,
};
pub(crate) use build::powerset_unchecked;
pub use topology::{
    open_set_lattice, topo_ops, topology_from_opens, PointSet, TopoOps, Topology,
};

/// Index of a lattice or poset element.
pub type Elem = usize;

/// A finite partial order on `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPoset {
    size: usize,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

impl FinPoset {
    /// Builds a poset from a relation already known to be a partial order.
    pub(crate) fn from_leq_fn(size: usize, leq: impl Fn(Elem, Elem) -> bool) -> FinPoset {
        let mut up = vec![FixedBitSet::with_capacity(size); size];
        for (x, row) in up.iter_mut().enumerate() {
            for y in 0..size {
                if leq(x, y) {
                    row.insert(y);
                }
            }
        }
        FinPoset::from_up_rows(up)
    }

    fn from_up_rows(up: Vec<FixedBitSet>) -> FinPoset {
        let size = up.len();
        let mut down = vec![FixedBitSet::with_capacity(size); size];
        for (x, row) in up.iter().enumerate() {
            for y in row.ones() {
                down[y].insert(x);
            }
        }
        FinPoset { size, up, down }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.leq(x, y)
    }

    /// `{y | x <= y}`.
    pub fn up(&self, x: Elem) -> &FixedBitSet {
        &self.up[x]
    }

    /// `{y | y <= x}`.
    pub fn down(&self, x: Elem) -> &FixedBitSet {
        &self.down[x]
    }

    /// Number of pairs `x < y`.
    pub fn strict_pair_count(&self) -> usize {
        self.up.iter().map(|r| r.count_ones(..)).sum::<usize>() - self.size
    }

    /// Covering pairs `x ⋖ y` of the Hasse diagram, in lexicographic order.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for x in 0..self.size {
            for y in self.up[x].ones() {
                if y == x {
                    continue;
                }
                let between = self.up[x]
                    .intersection(&self.down[y])
                    .filter(|&z| z != x && z != y)
                    .count();
                if between == 0 {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Elements sorted so that every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<Elem> {
        let mut order: Vec<Elem> = (0..self.size).collect();
        order.sort_by_key(|&x| (self.down[x].count_ones(..), x));
        order
    }
}

/// Builds the reflexive-transitive closure of `pairs` on `0..n`.
///
/// Closure is computed by repeated squaring of the relation matrix;
/// antisymmetry is checked afterwards and the lowest offending pair is
/// reported.
pub fn poset_from_pairs(n: usize, pairs: &[(Elem, Elem)]) -> Result<FinPoset> {
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    for (x, row) in up.iter_mut().enumerate() {
        row.insert(x);
    }
    for &(x, y) in pairs {
        for i in [x, y] {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, size: n });
            }
        }
        up[x].insert(y);
    }
    loop {
        let mut next = up.clone();
        for row in next.iter_mut() {
            let snapshot = row.clone();
            for y in snapshot.ones() {
                row.union_with(&up[y]);
            }
        }
        if next == up {
            break;
        }
        up = next;
    }
    for x in 0..n {
        for y in up[x].ones() {
            if y > x && up[y].contains(x) {
                return Err(Error::AntisymmetryViolation(x, y));
            }
        }
    }
    Ok(FinPoset::from_up_rows(up))
}

/// A finite bounded lattice with operation tables, plus the Heyting
/// implication when the lattice is a frame.
#[derive(Clone, Debug)]
pub struct FinLattice {
    poset: FinPoset,
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: Elem,
    top: Elem,
    implication: Option<Vec<u32>>,
    residuation_failure: Option<[Elem; 3]>,
    pub(crate) oa_verdict: OnceLock<bool>,
}

impl PartialEq for FinLattice {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset
    }
}

impl Eq for FinLattice {}

impl FinLattice {
    /// Assembles a lattice from a poset and its meet and join tables, which
    /// the caller guarantees are the glb and lub.
    pub(crate) fn from_tables(poset: FinPoset, meet: Vec<u32>, join: Vec<u32>) -> FinLattice {
        let n = poset.size();
        let bottom = (0..n)
            .find(|&x| poset.up(x).count_ones(..) == n)
            .expect("lattice tables without bottom");
        let top = (0..n)
            .find(|&x| poset.down(x).count_ones(..) == n)
            .expect("lattice tables without top");
        let mut lattice = FinLattice {
            poset,
            meet,
            join,
            bottom,
            top,
            implication: None,
            residuation_failure: None,
            oa_verdict: OnceLock::new(),
        };
        lattice.fill_implication();
        lattice
    }

    /// `x → y = ⋁{z | z ∧ x <= y}`, kept only if residuation holds.
    ///
    /// Every element is the join of the join-irreducibles below it, so it
    /// suffices to join the join-irreducible members of `{z | z ∧ x <= y}`.
    /// If that join `c` satisfies `c ∧ x <= y` it is the maximum of the set
    /// and residuation holds at `(x, y)`; otherwise `(c, x, y)` is a
    /// residuation counterexample.
    fn fill_implication(&mut self) {
        let n = self.size();
        let irreducibles = self.join_irreducible_elems();
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let c = irreducibles
                    .iter()
                    .copied()
                    .filter(|&j| self.leq(self.meet(j, x), y))
                    .fold(self.bottom, |acc, j| self.join(acc, j));
                if !self.leq(self.meet(c, x), y) {
                    self.residuation_failure = Some([c, x, y]);
                    return;
                }
                table[x * n + y] = c as u32;
            }
        }
        self.implication = Some(table);
    }

    /// Non-bottom elements strictly above the join of everything below them.
    pub(crate) fn join_irreducible_elems(&self) -> Vec<Elem> {
        (0..self.size())
            .filter(|&x| {
                x != self.bottom && {
                    let below = self
                        .poset
                        .down(x)
                        .ones()
                        .filter(|&z| z != x)
                        .fold(self.bottom, |acc, z| self.join(acc, z));
                    below != x
                }
            })
            .collect()
    }

    pub fn size(&self) -> usize {
        self.poset.size()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    pub fn poset(&self) -> &FinPoset {
        &self.poset
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.poset.leq(x, y)
    }

    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        self.poset.lt(x, y)
    }

    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.size() + y] as Elem
    }

    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.size() + y] as Elem
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// True when the Heyting implication exists (the lattice is a frame).
    pub fn is_frame(&self) -> bool {
        self.implication.is_some()
    }

    /// Heyting implication `x → y`; `None` unless the lattice is a frame.
    pub fn implies(&self, x: Elem, y: Elem) -> Option<Elem> {
        self.implication
            .as_ref()
            .map(|t| t[x * self.size() + y] as Elem)
    }

    /// Pseudo-complement `−x = x → 0`; `None` unless the lattice is a frame.
    pub fn neg(&self, x: Elem) -> Option<Elem> {
        self.implies(x, self.bottom)
    }

    /// Infallible implication for code paths that have already checked
    /// [`FinLattice::is_frame`].
    pub(crate) fn imp(&self, x: Elem, y: Elem) -> Elem {
        self.implies(x, y).expect("implication on a non-frame")
    }

    pub(crate) fn not(&self, x: Elem) -> Elem {
        self.imp(x, self.bottom)
    }

    /// Builds the lattice carried by `members` (a subset of this lattice),
    /// with the inherited order and meets and with joins computed as
    /// `close(x ∨ y)`. Returns the new lattice and the embedding from new
    /// indices to old ones (increasing).
    ///
    /// The caller guarantees `members` is closed under meets and under
    /// `close ∘ ∨`, and that `close` maps into `members`.
    pub(crate) fn induced(
        &self,
        members: &[Elem],
        close: impl Fn(Elem) -> Elem,
    ) -> Result<(Arc<FinLattice>, Vec<Elem>)> {
        let mut embedding = members.to_vec();
        embedding.sort_unstable();
        embedding.dedup();
        let m = embedding.len();
        let mut index = vec![usize::MAX; self.size()];
        for (i, &x) in embedding.iter().enumerate() {
            index[x] = i;
        }
        let lookup = |x: Elem| -> Result<u32> {
            match index[x] {
                usize::MAX => Err(Error::CrossCheck(format!(
                    "element {x} escapes the induced carrier"
                ))),
                i => Ok(i as u32),
            }
        };
        let mut meet = vec![0u32; m * m];
        let mut join = vec![0u32; m * m];
        for (i, &x) in embedding.iter().enumerate() {
            for (k, &y) in embedding.iter().enumerate() {
                meet[i * m + k] = lookup(self.meet(x, y))?;
                join[i * m + k] = lookup(close(self.join(x, y)))?;
            }
        }
        let poset = FinPoset::from_leq_fn(m, |i, k| self.leq(embedding[i], embedding[k]));
        Ok((
            Arc::new(FinLattice::from_tables(poset, meet, join)),
            embedding,
        ))
    }
}

/// Computes meets and joins of a poset.
///
/// Fails with [`Error::NotALattice`] naming the first pair without a meet or
/// join, or when the poset is empty.
pub fn lattice_from_poset(poset: FinPoset) -> Result<Arc<FinLattice>> {
    let n = poset.size();
    if n == 0 {
        return Err(Error::NotALattice("empty poset has no bottom".into()));
    }
    let down_counts: Vec<usize> = (0..n).map(|x| poset.down(x).count_ones(..)).collect();
    let up_counts: Vec<usize> = (0..n).map(|x| poset.up(x).count_ones(..)).collect();
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for x in 0..n {
        for y in x..n {
            let lower = poset.down(x).intersection(poset.down(y)).collect::<FixedBitSet>();
            let lower = widen(lower, n);
            let m = greatest(&lower, |z| poset.down(z), &down_counts)
                .ok_or_else(|| Error::NotALattice(format!("{x} and {y} have no meet")))?;
            let upper = widen(poset.up(x).intersection(poset.up(y)).collect(), n);
            let j = greatest(&upper, |z| poset.up(z), &up_counts)
                .ok_or_else(|| Error::NotALattice(format!("{x} and {y} have no join")))?;
            meet[x * n + y] = m as u32;
            meet[y * n + x] = m as u32;
            join[x * n + y] = j as u32;
            join[y * n + x] = j as u32;
        }
    }
    if !(0..n).any(|x| up_counts[x] == n) {
        return Err(Error::NotALattice("no bottom element".into()));
    }
    if !(0..n).any(|x| down_counts[x] == n) {
        return Err(Error::NotALattice("no top element".into()));
    }
    Ok(Arc::new(FinLattice::from_tables(poset, meet, join)))
}

/// The member of `set` whose row contains all of `set`, if any.
fn greatest<'a>(
    set: &FixedBitSet,
    rows: impl Fn(Elem) -> &'a FixedBitSet,
    counts: &[usize],
) -> Option<Elem> {
    let best = set.ones().max_by_key(|&z| (counts[z], std::cmp::Reverse(z)))?;
    set.is_subset(rows(best)).then_some(best)
}

fn widen(mut set: FixedBitSet, n: usize) -> FixedBitSet {
    set.grow(n);
    set
}

/// Frame and Boolean verdicts with the derived tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameReport {
    pub size: usize,
    pub is_frame: bool,
    pub is_boolean: bool,
    /// `implication[x][y] = x → y`, present for frames.
    pub implication: Option<Vec<Vec<Elem>>>,
    /// `pseudo_complement[x] = −x`, present for frames.
    pub pseudo_complement: Option<Vec<Elem>>,
    /// `(z, x, y)` with `z <= ⋁{w | w ∧ x <= y}` but `z ∧ x ≰ y`.
    pub residuation_witness: Option<[Elem; 3]>,
    /// An `x` with `x ∨ −x != 1`, for frames that are not Boolean.
    pub excluded_middle_witness: Option<Elem>,
}

pub fn frame_report(lattice: &FinLattice) -> FrameReport {
    let n = lattice.size();
    if !lattice.is_frame() {
        return FrameReport {
            size: n,
            is_frame: false,
            is_boolean: false,
            implication: None,
            pseudo_complement: None,
            residuation_witness: lattice.residuation_failure,
            excluded_middle_witness: None,
        };
    }
    let implication: Vec<Vec<Elem>> = (0..n)
        .map(|x| (0..n).map(|y| lattice.imp(x, y)).collect())
        .collect();
    let pseudo_complement: Vec<Elem> = (0..n).map(|x| lattice.not(x)).collect();
    let excluded_middle_witness =
        (0..n).find(|&x| lattice.join(x, pseudo_complement[x]) != lattice.top());
    FrameReport {
        size: n,
        is_frame: true,
        is_boolean: excluded_middle_witness.is_none(),
        implication: Some(implication),
        pseudo_complement: Some(pseudo_complement),
        residuation_witness: None,
        excluded_middle_witness,
    }
}

/// True when the lattice is a Boolean algebra.
pub fn is_boolean(lattice: &FinLattice) -> bool {
    lattice.is_frame()
        && lattice
            .elements()
            .all(|x| lattice.join(x, lattice.not(x)) == lattice.top())
}

/// Finds an order isomorphism `a → b` by backtracking, if one exists.
///
/// Candidates are pruned by the sizes of the down-set and up-set of each
/// element, which every order isomorphism preserves.
pub fn order_isomorphism(a: &FinLattice, b: &FinLattice) -> Option<Vec<Elem>> {
    let n = a.size();
    if n != b.size() || a.poset().strict_pair_count() != b.poset().strict_pair_count() {
        return None;
    }
    let signature = |l: &FinLattice, x: Elem| {
        (
            l.poset().down(x).count_ones(..),
            l.poset().up(x).count_ones(..),
        )
    };
    let order = a.poset().linear_extension();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        depth: usize,
        order: &[Elem],
        a: &FinLattice,
        b: &FinLattice,
        image: &mut [Elem],
        used: &mut [bool],
        signature: &dyn Fn(&FinLattice, Elem) -> (usize, usize),
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let x = order[depth];
        let sig = signature(a, x);
        for cand in 0..b.size() {
            if used[cand] || signature(b, cand) != sig {
                continue;
            }
            let consistent = order[..depth].iter().all(|&w| {
                a.leq(w, x) == b.leq(image[w], cand) && a.leq(x, w) == b.leq(cand, image[w])
            });
            if !consistent {
                continue;
            }
            image[x] = cand;
            used[cand] = true;
            if extend(depth + 1, order, a, b, image, used, signature) {
                return true;
            }
            used[cand] = false;
            image[x] = usize::MAX;
        }
        false
    }

    extend(0, &order, a, b, &mut image, &mut used, &signature).then_some(image)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn pentagon() -> Arc<FinLattice> {
        // 0 < a < c < 1, 0 < b < 1
        let p = poset_from_pairs(5, &[(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)]).unwrap();
        lattice_from_poset(p).unwrap()
    }

    fn diamond_poset() -> FinPoset {
        poset_from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn chain_closure() {
        let p = poset_from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert!(!p.leq(2, 0));
        assert_eq!(p.strict_pair_count(), 3);
    }

    #[test]
    fn forced_cycle_is_rejected() {
        assert_eq!(
            poset_from_pairs(2, &[(0, 1), (1, 0)]),
            Err(Error::AntisymmetryViolation(0, 1))
        );
    }

    #[test]
    fn out_of_range_pair() {
        assert!(matches!(
            poset_from_pairs(2, &[(0, 2)]),
            Err(Error::IndexOutOfRange { index: 2, size: 2 })
        ));
    }

    #[test]
    fn diamond_closure_has_five_strict_pairs_plus_top() {
        // by hand: 0<1, 0<2, 0<3, 1<3, 2<3 -- five strict pairs.
        let p = diamond_poset();
        let strict: Vec<(usize, usize)> = (0..4)
            .flat_map(|x| (0..4).map(move |y| (x, y)))
            .filter(|&(x, y)| p.lt(x, y))
            .collect();
        assert_eq!(strict, vec![(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]);
        assert_eq!(p.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn diamond_lattice() {
        let l = lattice_from_poset(diamond_poset()).unwrap();
        assert_eq!(l.meet(1, 2), 0);
        assert_eq!(l.join(1, 2), 3);
        assert_eq!((l.bottom(), l.top()), (0, 3));
        assert!(l.is_frame());
    }

    #[test]
    fn antichain_is_not_a_lattice() {
        let p = poset_from_pairs(2, &[]).unwrap();
        assert!(matches!(lattice_from_poset(p), Err(Error::NotALattice(_))));
        let empty = poset_from_pairs(0, &[]).unwrap();
        assert!(matches!(lattice_from_poset(empty), Err(Error::NotALattice(_))));
    }

    #[test]
    fn pentagon_has_no_implication() {
        let n5 = pentagon();
        assert!(!n5.is_frame());
        // independent residuation scan over all triples
        let mut found = false;
        for x in 0..5 {
            for y in 0..5 {
                let candidates: Vec<usize> =
                    (0..5).filter(|&z| n5.leq(n5.meet(z, x), y)).collect();
                let c = n5.join_all(candidates.iter().copied());
                if !n5.leq(n5.meet(c, x), y) {
                    found = true;
                }
            }
        }
        assert!(found);
        let r = frame_report(&n5);
        assert!(!r.is_frame && !r.is_boolean);
        let [z, x, y] = r.residuation_witness.unwrap();
        assert!(!n5.leq(n5.meet(z, x), y));
    }

    #[test]
    fn frame_report_on_small_frames() {
        let pow2 = powerset_lattice(2, &crate::Caps::default()).unwrap();
        let r = frame_report(&pow2);
        assert!(r.is_frame && r.is_boolean);

        let c3 = chain_lattice(3).unwrap();
        let r = frame_report(&c3);
        assert!(r.is_frame);
        assert!(!r.is_boolean);
        // ¬m = 0 and m ∨ ¬m = m
        assert_eq!(r.pseudo_complement, Some(vec![2, 0, 0]));
        assert_eq!(r.excluded_middle_witness, Some(1));
    }

    #[test]
    fn residuation_and_pseudocomplement_on_frames() {
        let caps = crate::Caps::default();
        let p = poset_from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        for l in [
            chain_lattice(4).unwrap(),
            powerset_lattice(3, &caps).unwrap(),
            downset_lattice(&p, &caps).unwrap(),
        ] {
            for x in l.elements() {
                assert_eq!(l.meet(x, l.not(x)), l.bottom());
                for y in l.elements() {
                    for z in l.elements() {
                        assert_eq!(l.leq(l.meet(z, x), y), l.leq(z, l.imp(x, y)));
                    }
                }
            }
        }
    }

    #[test]
    fn isomorphism_search() {
        let caps = crate::Caps::default();
        let pow2 = powerset_lattice(2, &caps).unwrap();
        let diamond = lattice_from_poset(diamond_poset()).unwrap();
        let iso = order_isomorphism(&pow2, &diamond).unwrap();
        for x in pow2.elements() {
            for y in pow2.elements() {
                assert_eq!(pow2.leq(x, y), diamond.leq(iso[x], iso[y]));
            }
        }
        assert!(order_isomorphism(&pow2, &chain_lattice(4).unwrap()).is_none());
    }
}
