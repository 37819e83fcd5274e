//! Nuclei on finite frames and the sublocales they determine.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, NucleusLaw, Result};
use crate::lattice::{
    frame_report, open_set_lattice, order_isomorphism, powerset_lattice, Elem, FinLattice,
    PointSet, Topology,
};
use crate::morphisms::{as_powerset, enumerate_join_maps, left_adjoint, LatticeMap};
use crate::overlap::{booleanize, is_overlap_algebra, pos};

/// An inflationary, idempotent, meet-preserving self-map of a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nucleus {
    lattice: Arc<FinLattice>,
    images: Vec<Elem>,
}

impl Nucleus {
    pub fn lattice(&self) -> &Arc<FinLattice> {
        &self.lattice
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.images[x]
    }

    /// Fixed points in increasing index order.
    pub fn fixed_points(&self) -> Vec<Elem> {
        self.lattice.elements().filter(|&x| self.images[x] == x).collect()
    }
}

pub fn nucleus(lattice: Arc<FinLattice>, images: Vec<Elem>) -> Result<Nucleus> {
    let l = &*lattice;
    if !l.is_frame() {
        return Err(Error::NotAFrame);
    }
    if images.len() != l.size() {
        return Err(Error::ShapeMismatch(format!(
            "{} images for a frame of size {}",
            images.len(),
            l.size()
        )));
    }
    if let Some(&bad) = images.iter().find(|&&y| y >= l.size()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: l.size(),
        });
    }
    let j = |x: Elem| images[x];
    let fail = |law, witness| Err(Error::NotANucleus { law, witness });
    if let Some(x) = l.elements().find(|&x| !l.leq(x, j(x))) {
        return fail(NucleusLaw::Inflationary, vec![x]);
    }
    if let Some(x) = l.elements().find(|&x| j(j(x)) != j(x)) {
        return fail(NucleusLaw::Idempotent, vec![x]);
    }
    for x in l.elements() {
        for y in l.elements() {
            if j(l.meet(x, y)) != l.meet(j(x), j(y)) {
                return fail(NucleusLaw::PreservesMeets, vec![x, y]);
            }
        }
    }
    Ok(Nucleus { lattice, images })
}

/// The frame of fixed points of a nucleus with its quotient map and the
/// quotient's left adjoint.
#[derive(Debug, Clone)]
pub struct SublocaleFrame {
    /// Fixed points with inherited meets and joins `j(x ∨ y)`.
    pub lattice: Arc<FinLattice>,
    /// `embedding[i]` is the element of the ambient frame carried by `i`.
    pub embedding: Vec<Elem>,
    /// `m*(x) = j(x)`, a surjective frame map.
    pub m_star: LatticeMap,
    /// Left adjoint of `m*`; `exists_m(u) = ⋀{x | u <= j(x)}`.
    pub exists_m: LatticeMap,
}

impl SublocaleFrame {
    /// Index in the sublocale of the fixed point `x`.
    pub fn index_of(&self, x: Elem) -> Option<usize> {
        self.embedding.binary_search(&x).ok()
    }
}

pub fn sublocale_frame(j: &Nucleus) -> Result<SublocaleFrame> {
    let l = &*j.lattice;
    let (lj, embedding) = l.induced(&j.fixed_points(), |x| j.apply(x))?;
    let index = |x: Elem| embedding.binary_search(&x).expect("j lands in its fixed points");
    let m_star = LatticeMap::new(
        j.lattice.clone(),
        lj.clone(),
        l.elements().map(|x| index(j.apply(x))).collect(),
    )?;
    if !(m_star.preserves_joins() && m_star.preserves_finite_meets() && m_star.is_surjective()) {
        return Err(Error::CrossCheck("m* is not a surjective frame map".into()));
    }
    let exists_m = left_adjoint(&m_star)?
        .ok_or_else(|| Error::CrossCheck("m* has no left adjoint".into()))?;
    Ok(SublocaleFrame {
        lattice: lj,
        embedding,
        m_star,
        exists_m,
    })
}

#[derive(Debug, Clone)]
pub struct StandardNuclei {
    /// `x ↦ a → x`.
    pub open: Nucleus,
    /// `x ↦ x ∨ a`.
    pub closed: Nucleus,
    /// `x ↦ (x → a) → a`.
    pub boolean: Nucleus,
}

pub fn standard_nuclei(lattice: &Arc<FinLattice>, a: Elem) -> Result<StandardNuclei> {
    let l = &**lattice;
    if !l.is_frame() {
        return Err(Error::NotAFrame);
    }
    if a >= l.size() {
        return Err(Error::IndexOutOfRange {
            index: a,
            size: l.size(),
        });
    }
    let build = |f: &dyn Fn(Elem) -> Elem| nucleus(lattice.clone(), l.elements().map(f).collect());
    let open = build(&|x| l.imp(a, x))?;
    let closed = build(&|x| l.join(x, a))?;
    let boolean = build(&|x| l.imp(l.imp(x, a), a))?;
    if !frame_report(&sublocale_frame(&boolean)?.lattice).is_boolean {
        return Err(Error::CrossCheck(format!(
            "the sublocale of (· → {a}) → {a} is not Boolean"
        )));
    }
    Ok(StandardNuclei {
        open,
        closed,
        boolean,
    })
}

/// All nuclei on a frame, ordered by their image vectors.
///
/// Images are assigned along a linear extension, so everything below `x` is
/// assigned before `x`. Each candidate `j(x)` must lie above `x`, respect
/// monotonicity and meet preservation against every earlier element (the
/// meet of an earlier element with `x` is itself earlier or `x`), and be
/// consistent with idempotence wherever `j(j(x))` is already known. The
/// search visits at most `|L|^|L|` nodes but these constraints prune all
/// but a handful of branches on lattices of the default cap size.
pub fn enumerate_nuclei(lattice: &Arc<FinLattice>, caps: &Caps) -> Result<Vec<Nucleus>> {
    let l = &**lattice;
    Caps::check("nucleus enumeration lattice", l.size(), caps.nuclei)?;
    if !l.is_frame() {
        return Err(Error::NotAFrame);
    }
    let order = l.poset().linear_extension();
    let mut assigned: Vec<Option<Elem>> = vec![None; l.size()];
    let mut found = Vec::new();

    fn extend(
        depth: usize,
        order: &[Elem],
        l: &FinLattice,
        assigned: &mut Vec<Option<Elem>>,
        found: &mut Vec<Vec<Elem>>,
    ) {
        if depth == order.len() {
            let images: Vec<Elem> = assigned.iter().map(|v| v.expect("complete")).collect();
            if l.elements().all(|x| images[images[x]] == images[x]) {
                found.push(images);
            }
            return;
        }
        let x = order[depth];
        for v in l.poset().up(x).ones() {
            let consistent = order[..depth].iter().all(|&w| {
                let jw = assigned[w].expect("earlier");
                let m = l.meet(w, x);
                let jm = if m == x { v } else { assigned[m].expect("meet is earlier") };
                (!l.leq(w, x) || l.leq(jw, v)) && jm == l.meet(jw, v)
            });
            // idempotence where both sides are known: j(v) = v if v is
            // earlier, and x is fixed if an earlier element maps to it
            let idempotent = assigned[v].is_none_or(|jv| jv == v)
                && (v == x || order[..depth].iter().all(|&w| assigned[w] != Some(x)));
            if !(consistent && idempotent) {
                continue;
            }
            assigned[x] = Some(v);
            extend(depth + 1, order, l, assigned, found);
            assigned[x] = None;
        }
    }

    extend(0, &order, l, &mut assigned, &mut found);
    found.sort();
    found
        .into_iter()
        .map(|images| nucleus(lattice.clone(), images))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteCheck {
    /// `P = {x | Pos(j{x})}` with positivity of the sublocale, as a bitmask.
    pub points: PointSet,
    /// `j(U) = P → U` for every `U`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenSublocaleReport {
    /// Least `a` with `j(x) = a → x` for all `x`.
    pub open_witness: Option<Elem>,
    /// `∃_{m*}(1)`, as an element of the ambient frame.
    pub left_adjoint_at_top: Elem,
    /// For open nuclei: `∃_{m*}(j x) = a ∧ x` for all `x`, and `a = ∃_{m*}(1)`.
    pub left_adjoint_matches: Option<bool>,
    pub carrier_is_overlap_algebra: bool,
    /// For open nuclei on o-algebras.
    pub sublocale_is_overlap_algebra: Option<bool>,
    /// For open nuclei on o-algebras: `Pos_{L_j}(u) ⟺ Pos_L(∃_{m*}(u))`.
    pub positivity_composes: Option<bool>,
    /// For powerset carriers.
    pub discrete: Option<DiscreteCheck>,
    pub violations: Vec<String>,
}

pub fn open_sublocale_report(j: &Nucleus) -> Result<OpenSublocaleReport> {
    let l = &*j.lattice;
    let sub = sublocale_frame(j)?;
    let lj = &*sub.lattice;
    let ex = |u: usize| sub.exists_m.image(u);
    let open_witness = l
        .elements()
        .find(|&a| l.elements().all(|x| j.apply(x) == l.imp(a, x)));
    let left_adjoint_at_top = ex(lj.top());
    let left_adjoint_matches = open_witness.map(|a| {
        a == left_adjoint_at_top
            && l.elements()
                .all(|x| ex(sub.m_star.image(x)) == l.meet(a, x))
    });
    let carrier_is_overlap_algebra = is_overlap_algebra(l);
    let oa_open = open_witness.is_some() && carrier_is_overlap_algebra;
    let sublocale_is_overlap_algebra = oa_open.then(|| is_overlap_algebra(lj));
    let positivity_composes =
        oa_open.then(|| lj.elements().all(|u| pos(lj, u) == pos(l, ex(u))));

    let discrete = as_powerset(l).map(|n| {
        let bottom = j.apply(l.bottom());
        let points = (0..n)
            .filter(|&x| j.apply(1 << x) != bottom)
            .fold(0 as PointSet, |acc, x| acc | (1 << x));
        let holds = l.elements().all(|u| j.apply(u) == l.imp(points as Elem, u));
        DiscreteCheck { points, holds }
    });

    let mut violations = Vec::new();
    if left_adjoint_matches == Some(false) {
        violations.push("open nucleus whose left adjoint is not a ∧ ·".into());
    }
    if sublocale_is_overlap_algebra == Some(false) {
        violations.push("open sublocale of an o-algebra is not an o-algebra".into());
    }
    if positivity_composes == Some(false) {
        violations.push("sublocale positivity is not Pos ∘ ∃_{m*}".into());
    }
    if let Some(d) = &discrete {
        if !d.holds || open_witness != Some(d.points as Elem) {
            violations.push(format!(
                "nucleus on a powerset is not P → · for P = {:#b}",
                d.points
            ));
        }
    }
    Ok(OpenSublocaleReport {
        open_witness,
        left_adjoint_at_top,
        left_adjoint_matches,
        carrier_is_overlap_algebra,
        sublocale_is_overlap_algebra,
        positivity_composes,
        discrete,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    pub nuclei: usize,
    /// Nuclei whose sublocale is an o-algebra, by image vector.
    pub overlap_sublocales: Vec<Vec<Elem>>,
    /// Join maps to the two-element lattice from principal ideals `↓k`.
    pub join_maps_from_ideals: usize,
    /// Join maps to the two-element lattice from the generic enumeration.
    pub join_maps_enumerated: usize,
    /// `φ_j` for each entry of `overlap_sublocales`, as truth vectors.
    pub join_maps: Vec<Vec<bool>>,
    pub mutually_inverse: bool,
    pub counts_agree: bool,
    pub violations: Vec<String>,
}

/// `φ_j(x) = Pos(j x)` in the sublocale, i.e. `j(x) != j(0)`.
pub fn join_map_of_nucleus(j: &Nucleus) -> Vec<bool> {
    let bottom = j.apply(j.lattice.bottom());
    j.images.iter().map(|&y| y != bottom).collect()
}

/// `j_φ(y) = ⋁{x | ∀z (φ(z ∧ x) ⇒ φ(z ∧ y))}`.
pub fn nucleus_of_join_map(lattice: &Arc<FinLattice>, phi: &[bool]) -> Result<Nucleus> {
    let l = &**lattice;
    let images = l
        .elements()
        .map(|y| {
            l.join_all(l.elements().filter(|&x| {
                l.elements()
                    .all(|z| !phi[l.meet(z, x)] || phi[l.meet(z, y)])
            }))
        })
        .collect();
    nucleus(lattice.clone(), images)
}

pub fn sublocale_joinmap_bijection(lattice: &Arc<FinLattice>, caps: &Caps) -> Result<BijectionReport> {
    let l = &**lattice;
    let nuclei = enumerate_nuclei(lattice, caps)?;
    let mut oa = Vec::new();
    for j in &nuclei {
        if is_overlap_algebra(&sublocale_frame(j)?.lattice) {
            oa.push(j.clone());
        }
    }
    let mut from_ideals: Vec<Vec<bool>> = l
        .elements()
        .map(|k| l.elements().map(|x| !l.leq(x, k)).collect())
        .collect();
    from_ideals.sort();
    from_ideals.dedup();
    let two = powerset_lattice(1, caps)?;
    let mut enumerated: Vec<Vec<bool>> = enumerate_join_maps(l, &two)?
        .into_iter()
        .map(|images| images.into_iter().map(|v| v == 1).collect())
        .collect();
    enumerated.sort();

    let mut violations = Vec::new();
    if from_ideals != enumerated {
        violations.push("ideal kernels and enumerated join maps disagree".into());
    }
    let mut mutually_inverse = true;
    let join_maps: Vec<Vec<bool>> = oa.iter().map(join_map_of_nucleus).collect();
    for (j, phi) in oa.iter().zip(&join_maps) {
        if enumerated.binary_search(phi).is_err() {
            mutually_inverse = false;
            violations.push(format!("φ_j for j = {:?} is not a join map", j.images));
        }
        match nucleus_of_join_map(lattice, phi) {
            Ok(back) if back == *j => {}
            _ => {
                mutually_inverse = false;
                violations.push(format!("j_φ_j differs from j = {:?}", j.images));
            }
        }
    }
    for phi in &enumerated {
        let j = nucleus_of_join_map(lattice, phi)?;
        if !is_overlap_algebra(&sublocale_frame(&j)?.lattice) {
            mutually_inverse = false;
            violations.push(format!("sublocale of j_φ for φ = {phi:?} is not an o-algebra"));
        }
        if join_map_of_nucleus(&j) != *phi {
            mutually_inverse = false;
            violations.push(format!("φ_j_φ differs from φ = {phi:?}"));
        }
    }
    let counts_agree = oa.len() == enumerated.len()
        && from_ideals.len() == enumerated.len()
        && enumerated.len() == l.size();
    if !counts_agree {
        violations.push(format!(
            "counts: {} o-algebra sublocales, {} ideal join maps, {} enumerated, {} elements",
            oa.len(),
            from_ideals.len(),
            enumerated.len(),
            l.size()
        ));
    }
    Ok(BijectionReport {
        nuclei: nuclei.len(),
        overlap_sublocales: oa.iter().map(|j| j.images.clone()).collect(),
        join_maps_from_ideals: from_ideals.len(),
        join_maps_enumerated: enumerated.len(),
        join_maps,
        mutually_inverse,
        counts_agree,
        violations,
    })
}

/// Regular open sets of a finite space.
#[derive(Debug, Clone)]
pub struct RegularOpens {
    /// Ordered by inclusion, joins `int(cl(U ∪ V))`, meets `U ∩ V`.
    pub lattice: Arc<FinLattice>,
    /// The regular opens, in the lattice's index order.
    pub opens: Vec<PointSet>,
}

pub fn regular_open_algebra(space: &Topology) -> Result<RegularOpens> {
    let frame = open_set_lattice(space);
    let all = space.opens();
    let members: Vec<Elem> = (0..all.len())
        .filter(|&i| space.interior(space.closure(all[i])) == all[i])
        .collect();
    let index = |u: PointSet| all.binary_search(&u).expect("interior is open");
    let (lattice, embedding) = frame.induced(&members, |i| {
        index(space.interior(space.closure(all[i])))
    })?;
    if !is_overlap_algebra(&lattice) {
        return Err(Error::CrossCheck("regular opens do not form an o-algebra".into()));
    }
    let negneg = booleanize(&frame)?.negneg;
    if order_isomorphism(&lattice, &negneg.lattice).is_none() {
        return Err(Error::CrossCheck(
            "regular opens are not isomorphic to the ¬¬-fixed points".into(),
        ));
    }
    Ok(RegularOpens {
        lattice,
        opens: embedding.iter().map(|&i| all[i]).collect(),
    })
}
