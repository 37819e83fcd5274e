//! Positivity, the overlap relation and overlap-algebra verification.
//!
//! In a finite lattice the second-order positivity predicate collapses to
//! `x != 0`: the empty family has join `0`, and every other family is
//! inhabited. [`positivity`] keeps both readings so that the collapse itself
//! is checkable; everything else uses the fast one.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::{chain_lattice, frame_report, lattice_from_poset, Elem, FinLattice};
use crate::lattice::powerset_unchecked;
use crate::morphisms::LatticeMap;
use crate::report::{Check, Violations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositivityMode {
    /// `x != bottom`.
    Fast,
    /// Quantifies over every subset `X`: `x <= ⋁X` implies `X` is inhabited.
    Oracle,
}

/// Fast positivity, `x != bottom`.
pub fn pos(lattice: &FinLattice, x: Elem) -> bool {
    x != lattice.bottom()
}

pub fn positivity(lattice: &FinLattice, x: Elem, mode: PositivityMode, caps: &Caps) -> Result<bool> {
    match mode {
        PositivityMode::Fast => Ok(pos(lattice, x)),
        PositivityMode::Oracle => {
            let n = lattice.size();
            Caps::check("positivity oracle lattice", n, caps.oracle)?;
            let holds = (0u32..(1u32 << n)).all(|mask| {
                let join = lattice.join_all((0..n).filter(|&i| mask & (1 << i) != 0));
                !lattice.leq(x, join) || mask != 0
            });
            Ok(holds)
        }
    }
}

/// `x >< y`, i.e. `Pos(x ∧ y)`.
pub fn overlap(lattice: &FinLattice, x: Elem, y: Elem) -> bool {
    pos(lattice, lattice.meet(x, y))
}

/// A candidate positivity predicate on a lattice.
#[derive(Debug, Clone)]
pub struct PositivityAssignment {
    pub lattice: Arc<FinLattice>,
    pub holds: FixedBitSet,
}

impl PositivityAssignment {
    pub fn new(lattice: Arc<FinLattice>, members: impl IntoIterator<Item = Elem>) -> Self {
        let mut holds = FixedBitSet::with_capacity(lattice.size());
        for x in members {
            holds.insert(x);
        }
        PositivityAssignment { lattice, holds }
    }

    /// The assignment `{x | x != bottom}`.
    pub fn nonzero(lattice: Arc<FinLattice>) -> Self {
        let bottom = lattice.bottom();
        let members: Vec<Elem> = lattice.elements().filter(|&x| x != bottom).collect();
        PositivityAssignment::new(lattice, members)
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.holds.contains(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub valid: bool,
    /// `Pos(x) ∧ x <= y ⇒ Pos(y)`; witness `[x, y]`.
    pub monotonicity: Check,
    /// `Pos(⋁X) ⇒ ∃x∈X Pos(x)`; witness lists `X`.
    pub splitting: Check,
    pub splitting_exhaustive: bool,
    /// `(Pos(x) ⇒ x <= y) ⟹ x <= y`; witness `[x, y]`.
    pub positivity: Check,
    /// `y <= ⋁{x | Pos(x) ∧ x <= y}`; witness `[y]`.
    pub positivity_by_joins: Check,
    /// Whether the assignment equals the second-order predicate.
    pub equals_second_order: bool,
    /// For frames: whether the assignment is the left adjoint of the unique
    /// frame map from the two-element frame.
    pub matches_left_adjoint: Option<bool>,
    pub violations: Vec<String>,
}

pub fn check_positivity_predicate(assignment: &PositivityAssignment, caps: &Caps) -> PositivityReport {
    let l = &*assignment.lattice;
    let p = |x: Elem| assignment.contains(x);
    let n = l.size();
    let mut violations = Violations::default();

    let monotonicity = Check::from_witness(
        "monotonicity",
        pairs(n).find(|&(x, y)| p(x) && l.leq(x, y) && !p(y)).map(|(x, y)| vec![x, y]),
    );

    let splitting_exhaustive = n <= caps.exhaustive_split;
    let splitting_witness = if splitting_exhaustive {
        (0u32..(1u32 << n)).find_map(|mask| {
            let members: Vec<Elem> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let join = l.join_all(members.iter().copied());
            (p(join) && !members.iter().any(|&x| p(x))).then_some(members)
        })
    } else if p(l.bottom()) {
        Some(vec![])
    } else {
        pairs(n)
            .find(|&(x, y)| p(l.join(x, y)) && !p(x) && !p(y))
            .map(|(x, y)| vec![x, y])
    };
    let splitting = Check::from_witness("splitting", splitting_witness);

    let positivity_law = Check::from_witness(
        "positivity",
        pairs(n)
            .find(|&(x, y)| (!p(x) || l.leq(x, y)) && !l.leq(x, y))
            .map(|(x, y)| vec![x, y]),
    );
    let positivity_by_joins = Check::from_witness(
        "positivity_by_joins",
        l.elements()
            .find(|&y| {
                let s = l.join_all(l.elements().filter(|&x| p(x) && l.leq(x, y)));
                !l.leq(y, s)
            })
            .map(|y| vec![y]),
    );
    if monotonicity.holds {
        violations.require(positivity_law.holds == positivity_by_joins.holds, || {
            "positivity and positivity-by-joins disagree on a monotone predicate".into()
        });
    }

    let valid = monotonicity.holds && splitting.holds && positivity_law.holds;
    let second_order: Vec<bool> = l
        .elements()
        .map(|x| {
            let mode = if n <= caps.oracle {
                PositivityMode::Oracle
            } else {
                PositivityMode::Fast
            };
            positivity(l, x, mode, caps).expect("mode chosen within cap")
        })
        .collect();
    let equals_second_order = l.elements().all(|x| p(x) == second_order[x]);
    if valid {
        violations.require(equals_second_order, || {
            "a valid positivity predicate differs from the second-order one".into()
        });
    }

    let matches_left_adjoint = l.is_frame().then(|| {
        // ! : {0 < 1} → L sends 0 to bottom and 1 to top; its left adjoint
        // sends x to the least p with x <= !(p).
        let bang = |q: usize| if q == 0 { l.bottom() } else { l.top() };
        l.elements().all(|x| {
            let left = (0..2).find(|&q| l.leq(x, bang(q))).expect("x <= top");
            (left == 1) == p(x)
        })
    });
    if valid {
        violations.require(matches_left_adjoint != Some(false), || {
            "a valid positivity predicate is not the left adjoint of !".into()
        });
    }

    PositivityReport {
        valid,
        monotonicity,
        splitting,
        splitting_exhaustive,
        positivity: positivity_law,
        positivity_by_joins,
        equals_second_order,
        matches_left_adjoint,
        violations: violations.into_vec(),
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (Elem, Elem)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

fn triples(n: usize) -> impl Iterator<Item = (Elem, Elem, Elem)> {
    pairs(n).flat_map(move |(x, y)| (0..n).map(move |z| (x, y, z)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OverlapOptions {
    /// Check splitting of joins over every subset instead of binary and
    /// empty joins. Only honoured up to `Caps::exhaustive_split`.
    pub exhaustive_splitting: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub is_overlap_algebra: bool,
    /// symmetry `[x, y]`, meet closure `[x, y]`, splitting `[x, y1, y2]` (or
    /// `[x, members..]` in exhaustive mode), monotonicity `[x, y, z]`,
    /// density `[x, y]`.
    pub axioms: Vec<Check>,
    /// Whether the lattice is Boolean; must equal `is_overlap_algebra`.
    pub boolean_crosscheck: bool,
    /// The base the density quantifier ranged over, if any.
    pub base: Option<Vec<Elem>>,
    pub violations: Vec<String>,
}

impl OverlapReport {
    pub fn axiom(&self, name: &str) -> Option<&Check> {
        self.axioms.iter().find(|c| c.name == name)
    }
}

/// Checks `base` satisfies `p = ⋁{a ∈ base | a <= p}` for every `p`.
pub fn validate_base(lattice: &FinLattice, base: &[Elem]) -> Result<()> {
    for &a in base {
        if a >= lattice.size() {
            return Err(Error::IndexOutOfRange {
                index: a,
                size: lattice.size(),
            });
        }
    }
    match lattice
        .elements()
        .find(|&p| lattice.join_all(base.iter().copied().filter(|&a| lattice.leq(a, p))) != p)
    {
        Some(p) => Err(Error::NotABase(p)),
        None => Ok(()),
    }
}

pub fn check_overlap_algebra(lattice: &FinLattice, base: Option<&[Elem]>) -> Result<OverlapReport> {
    check_overlap_algebra_with(lattice, base, OverlapOptions::default(), &Caps::default())
}

pub fn check_overlap_algebra_with(
    lattice: &FinLattice,
    base: Option<&[Elem]>,
    options: OverlapOptions,
    caps: &Caps,
) -> Result<OverlapReport> {
    if let Some(base) = base {
        validate_base(lattice, base)?;
    }
    let l = lattice;
    let n = l.size();
    let ov = |x: Elem, y: Elem| overlap(l, x, y);

    let symmetry = Check::from_witness(
        "symmetry",
        pairs(n).find(|&(x, y)| ov(x, y) && !ov(y, x)).map(|(x, y)| vec![x, y]),
    );
    let meet_closure = Check::from_witness(
        "meet_closure",
        pairs(n)
            .find(|&(x, y)| ov(x, y) && !ov(x, l.meet(x, y)))
            .map(|(x, y)| vec![x, y]),
    );
    let splitting_witness = if options.exhaustive_splitting && n <= caps.exhaustive_split {
        (0..n).find_map(|x| {
            (0u32..(1u32 << n)).find_map(|mask| {
                let ys: Vec<Elem> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
                let join = l.join_all(ys.iter().copied());
                (ov(x, join) && !ys.iter().any(|&y| ov(x, y))).then(|| {
                    let mut w = vec![x];
                    w.extend(ys);
                    w
                })
            })
        })
    } else {
        (0..n)
            .find(|&x| ov(x, l.bottom()))
            .map(|x| vec![x])
            .or_else(|| {
                triples(n)
                    .find(|&(x, a, b)| ov(x, l.join(a, b)) && !ov(x, a) && !ov(x, b))
                    .map(|(x, a, b)| vec![x, a, b])
            })
    };
    let splitting = Check::from_witness("splitting", splitting_witness);
    let monotonicity = Check::from_witness(
        "monotonicity",
        triples(n)
            .find(|&(x, y, z)| ov(x, y) && l.leq(y, z) && !ov(x, z))
            .map(|(x, y, z)| vec![x, y, z]),
    );
    let quantifier: Vec<Elem> = match base {
        Some(b) => b.to_vec(),
        None => l.elements().collect(),
    };
    let density = Check::from_witness(
        "density",
        pairs(n)
            .find(|&(x, y)| !l.leq(x, y) && quantifier.iter().all(|&z| !ov(z, x) || ov(z, y)))
            .map(|(x, y)| vec![x, y]),
    );

    let axioms = vec![symmetry, meet_closure, splitting, monotonicity, density];
    let is_overlap_algebra = axioms.iter().all(|c| c.holds);
    let boolean_crosscheck = frame_report(l).is_boolean;
    let mut violations = Violations::default();
    violations.require(is_overlap_algebra == boolean_crosscheck, || {
        format!(
            "overlap verdict {is_overlap_algebra} differs from Boolean verdict {boolean_crosscheck}"
        )
    });
    Ok(OverlapReport {
        is_overlap_algebra,
        axioms,
        boolean_crosscheck,
        base: base.map(|b| b.to_vec()),
        violations: violations.into_vec(),
    })
}

/// Cached unbased overlap-algebra verdict.
pub fn is_overlap_algebra(lattice: &FinLattice) -> bool {
    *lattice.oa_verdict.get_or_init(|| {
        check_overlap_algebra(lattice, None)
            .map(|r| r.is_overlap_algebra)
            .unwrap_or(false)
    })
}

/// The finitely equivalent readings of "a is an atom".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomReport {
    /// `a != 0` and every nonzero `x <= a` equals `a`.
    pub minimal_nonzero: bool,
    /// `a != 0` and every `x <= a` is `0` or `a`.
    pub only_bottom_or_self_below: bool,
    /// `a != 0` and every `x < a` is `0`.
    pub strictly_below_is_bottom: bool,
    /// `a != 0` and there is no nonzero `x < a`.
    pub no_nonzero_strictly_below: bool,
    /// `Pos(a)` and every positive `x <= a` equals `a`.
    pub minimal_positive: bool,
    /// `Pos(a ∧ x) ⟺ a <= x` for all `x`.
    pub positive_meet_iff_below: bool,
    /// `a >< x ⟺ a <= x` for all `x`.
    pub overlap_iff_below: bool,
    /// `↓a` is order-isomorphic to the two-element lattice.
    pub downset_is_two_element: bool,
}

impl AtomReport {
    pub fn all(&self) -> bool {
        self.as_array().iter().all(|&b| b)
    }

    pub fn none(&self) -> bool {
        self.as_array().iter().all(|&b| !b)
    }

    pub fn as_array(&self) -> [bool; 8] {
        [
            self.minimal_nonzero,
            self.only_bottom_or_self_below,
            self.strictly_below_is_bottom,
            self.no_nonzero_strictly_below,
            self.minimal_positive,
            self.positive_meet_iff_below,
            self.overlap_iff_below,
            self.downset_is_two_element,
        ]
    }
}

pub fn atom_report(lattice: &FinLattice, a: Elem) -> AtomReport {
    let l = lattice;
    let zero = l.bottom();
    let nonzero = a != zero;
    let below = || l.poset().down(a).ones();
    AtomReport {
        minimal_nonzero: nonzero && below().all(|x| x == zero || x == a),
        only_bottom_or_self_below: nonzero && below().all(|x| x == zero || x == a),
        strictly_below_is_bottom: nonzero && below().filter(|&x| x != a).all(|x| x == zero),
        no_nonzero_strictly_below: nonzero && !below().any(|x| x != zero && x != a),
        minimal_positive: pos(l, a) && below().filter(|&x| pos(l, x)).all(|x| x == a),
        positive_meet_iff_below: l.elements().all(|x| pos(l, l.meet(a, x)) == l.leq(a, x)),
        overlap_iff_below: l.elements().all(|x| overlap(l, a, x) == l.leq(a, x)),
        downset_is_two_element: l.poset().down(a).count_ones(..) == 2,
    }
}

/// Atoms of a frame and, when atomic, the isomorphism with the powerset of
/// its atoms.
#[derive(Debug, Clone)]
pub struct AtomDecomposition {
    pub atoms: Vec<Elem>,
    pub is_atomic: bool,
    /// `x ↦ {atoms below x}`; the powerset is indexed by bitmask over
    /// `atoms` in increasing order.
    pub to_powerset: Option<LatticeMap>,
    /// `Y ↦ ⋁Y`.
    pub from_powerset: Option<LatticeMap>,
}

pub fn atoms_and_iso(lattice: &Arc<FinLattice>, caps: &Caps) -> Result<AtomDecomposition> {
    let l = &**lattice;
    if !l.is_frame() {
        return Err(Error::NotAFrame);
    }
    let atoms: Vec<Elem> = l
        .elements()
        .filter(|&a| atom_report(l, a).overlap_iff_below)
        .collect();
    let is_atomic = l
        .elements()
        .all(|x| l.join_all(atoms.iter().copied().filter(|&a| l.leq(a, x))) == x);
    if !is_atomic {
        return Ok(AtomDecomposition {
            atoms,
            is_atomic,
            to_powerset: None,
            from_powerset: None,
        });
    }
    let k = atoms.len();
    Caps::check("lattice", 1usize << k, caps.lattice)?;
    let pow = Arc::new(powerset_unchecked(k));
    let f_images: Vec<Elem> = l
        .elements()
        .map(|x| {
            atoms
                .iter()
                .enumerate()
                .filter(|&(_, &a)| l.leq(a, x))
                .fold(0, |m, (i, _)| m | (1 << i))
        })
        .collect();
    let g_images: Vec<Elem> = pow
        .elements()
        .map(|mask| {
            l.join_all(
                atoms
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &a)| a),
            )
        })
        .collect();
    let roundtrip_l = l.elements().all(|x| g_images[f_images[x]] == x);
    let roundtrip_p = pow.elements().all(|y| f_images[g_images[y]] == y);
    if !(roundtrip_l && roundtrip_p) {
        return Err(Error::CrossCheck(
            "atom isomorphism does not round-trip on an atomic frame".into(),
        ));
    }
    let f = LatticeMap::new(lattice.clone(), pow.clone(), f_images)?;
    let g = LatticeMap::new(pow, lattice.clone(), g_images)?;
    Ok(AtomDecomposition {
        atoms,
        is_atomic,
        to_powerset: Some(f),
        from_powerset: Some(g),
    })
}

/// Join-irreducible elements; they always form a base.
pub fn join_irreducibles(lattice: &FinLattice) -> Result<Vec<Elem>> {
    let ji = lattice.join_irreducible_elems();
    validate_base(lattice, &ji).map_err(|e| {
        Error::CrossCheck(format!("join-irreducibles do not form a base: {e}"))
    })?;
    Ok(ji)
}

/// A lattice of fixed points of a closure on a frame, with the embedding
/// into the frame.
#[derive(Debug, Clone)]
pub struct FixedPoints {
    pub lattice: Arc<FinLattice>,
    /// `embedding[i]` is the element of the ambient frame carried by `i`.
    pub embedding: Vec<Elem>,
}

#[derive(Debug, Clone)]
pub struct Booleanization {
    /// Fixed points of `¬¬`.
    pub negneg: FixedPoints,
    /// Fixed points of `y ↦ ⋁{x | ∀z (Pos(z ∧ x) ⇒ Pos(z ∧ y))}`.
    pub overlapized: FixedPoints,
    /// Whether the two fixed-point sets coincide.
    pub agree: bool,
    pub negneg_is_overlap_algebra: bool,
    pub overlapized_is_overlap_algebra: bool,
}

/// `⋁{x | ∀z (z >< x ⇒ z >< y)}`.
pub fn overlap_closure(lattice: &FinLattice, y: Elem) -> Elem {
    let l = lattice;
    l.join_all(
        l.elements()
            .filter(|&x| l.elements().all(|z| !overlap(l, z, x) || overlap(l, z, y))),
    )
}

pub fn booleanize(lattice: &FinLattice) -> Result<Booleanization> {
    let l = lattice;
    if !l.is_frame() {
        return Err(Error::NotAFrame);
    }
    let nn = |x: Elem| l.not(l.not(x));
    let negneg_members: Vec<Elem> = l.elements().filter(|&y| nn(y) == y).collect();
    let (negneg, negneg_embedding) = l.induced(&negneg_members, nn)?;

    let closure: Vec<Elem> = l.elements().map(|y| overlap_closure(l, y)).collect();
    let over_members: Vec<Elem> = l.elements().filter(|&y| closure[y] == y).collect();
    let (over, over_embedding) = l.induced(&over_members, |x| closure[x])?;

    Ok(Booleanization {
        agree: negneg_members == over_members,
        negneg_is_overlap_algebra: is_overlap_algebra(&negneg),
        overlapized_is_overlap_algebra: is_overlap_algebra(&over),
        negneg: FixedPoints {
            lattice: negneg,
            embedding: negneg_embedding,
        },
        overlapized: FixedPoints {
            lattice: over,
            embedding: over_embedding,
        },
    })
}

/// Small named lattices used across tests and the CLI.
pub mod examples {
    use super::*;
    use crate::lattice::poset_from_pairs;

    /// The three-element chain `0 < m < 1`.
    pub fn three_chain() -> Arc<FinLattice> {
        chain_lattice(3).expect("chain")
    }

    /// The non-distributive pentagon `0 < a < c < 1`, `0 < b < 1`.
    pub fn pentagon() -> Arc<FinLattice> {
        let p = poset_from_pairs(5, &[(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)]).expect("poset");
        lattice_from_poset(p).expect("lattice")
    }
}
