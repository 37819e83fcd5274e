//! Products, zero object, equalizers and the powerset functor, checked by
//! bounded search.
//!
//! Universal properties are only ever verified against an explicit finite
//! family of test objects; every report records the sizes of the family
//! it was checked against.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::{
    powerset_lattice, powerset_unchecked, product_lattice, Elem, FinLattice, ProductLattice,
};
use crate::morphisms::{
    compose, enumerate_join_maps, is_sub_oalgebra, join_map, rel_to_map_in, LatticeMap, Relation,
};
use crate::overlap::{check_overlap_algebra, is_overlap_algebra, pos};

/// Boolean algebras with at most `max_size` elements, as powersets.
pub fn boolean_family(max_size: usize) -> Vec<Arc<FinLattice>> {
    (0..)
        .take_while(|&n| 1usize << n <= max_size)
        .map(|n| Arc::new(powerset_unchecked(n)))
        .collect()
}

fn sizes(family: &[Arc<FinLattice>]) -> Vec<usize> {
    family.iter().map(|l| l.size()).collect()
}

/// Adds `extra` to `family`, skipping lattices already present.
fn with_carriers(mut family: Vec<Arc<FinLattice>>, extra: &[&Arc<FinLattice>]) -> Vec<Arc<FinLattice>> {
    for l in extra {
        if !family.iter().any(|m| m == *l) {
            family.push((*l).clone());
        }
    }
    family
}

fn composite(g: &[Elem], f: &[Elem]) -> Vec<Elem> {
    f.iter().map(|&y| g[y]).collect()
}

#[derive(Debug, Clone)]
pub struct ProductWitness {
    pub product: ProductLattice,
    /// `π_k†(z)` is the tuple with `z` at `k` and bottom elsewhere.
    pub projection_daggers: Vec<LatticeMap>,
}

pub fn oa_product(factors: &[Arc<FinLattice>], caps: &Caps) -> Result<ProductWitness> {
    if let Some(k) = factors.iter().position(|l| !is_overlap_algebra(l)) {
        return Err(Error::PreconditionFailed(format!("factor {k} is not an o-algebra")));
    }
    let product = product_lattice(factors, caps)?;
    let p = &*product.lattice;
    let layout = &product.layout;
    for t in p.elements() {
        let some_positive = factors
            .iter()
            .enumerate()
            .any(|(k, l)| pos(l, layout.component(t, k)));
        if pos(p, t) != some_positive {
            return Err(Error::CrossCheck(format!(
                "positivity of tuple {:?} is not componentwise",
                layout.decode(t)
            )));
        }
    }
    if !check_overlap_algebra(p, None)?.is_overlap_algebra {
        return Err(Error::CrossCheck("product of o-algebras is not one".into()));
    }
    let mut projection_daggers = Vec::with_capacity(factors.len());
    for (k, (pi, l)) in product.projections.iter().zip(factors).enumerate() {
        let expected: Vec<Elem> = l
            .elements()
            .map(|z| {
                let parts: Vec<Elem> = factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| if i == k { z } else { f.bottom() })
                    .collect();
                layout.encode(&parts)
            })
            .collect();
        let d = pi.dagger()?;
        if d.images() != &expected[..] {
            return Err(Error::CrossCheck(format!(
                "dagger of projection {k} is not the injection"
            )));
        }
        if l.elements().any(|z| pi.image(d.image(z)) != z) {
            return Err(Error::CrossCheck(format!("π_{k} ∘ π_{k}† is not the identity")));
        }
        projection_daggers.push(d);
    }
    Ok(ProductWitness {
        product,
        projection_daggers,
    })
}

#[derive(Debug, Clone)]
pub struct Tupling {
    pub map: LatticeMap,
    /// Whether `h` is the only join map with `π_i ∘ h = g_i`; `None` when
    /// the enumeration would exceed its cap.
    pub unique: Option<bool>,
    /// `h†(t) = ⋁_i g_i†(t_i)`.
    pub dagger_formula: bool,
}

pub fn tupling(gs: &[LatticeMap], product: &ProductLattice) -> Result<Tupling> {
    if gs.len() != product.factors.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} maps for {} factors",
            gs.len(),
            product.factors.len()
        )));
    }
    let Some(first) = gs.first() else {
        return Err(Error::ShapeMismatch("tupling needs at least one map".into()));
    };
    let m = first.source().clone();
    for (k, g) in gs.iter().enumerate() {
        if *g.source() != m || *g.target() != product.factors[k] {
            return Err(Error::ShapeMismatch(format!("map {k} does not fit factor {k}")));
        }
    }
    let layout = &product.layout;
    let images: Vec<Elem> = m
        .elements()
        .map(|x| layout.encode(&gs.iter().map(|g| g.image(x)).collect::<Vec<_>>()))
        .collect();
    let h = join_map(m.clone(), product.lattice.clone(), images)?;
    for (k, g) in gs.iter().enumerate() {
        if compose(&product.projections[k], &h)?.images() != g.images() {
            return Err(Error::CrossCheck(format!("π_{k} ∘ h differs from g_{k}")));
        }
    }
    let unique = match enumerate_join_maps(&m, &product.lattice) {
        Ok(all) => Some(
            all.iter()
                .filter(|cand| {
                    gs.iter().enumerate().all(|(k, g)| {
                        m.elements().all(|x| layout.component(cand[x], k) == g.image(x))
                    })
                })
                .count()
                == 1,
        ),
        Err(Error::SizeCap { .. }) => None,
        Err(e) => return Err(e),
    };
    let hd = h.dagger()?;
    let daggers = gs.iter().map(|g| g.dagger()).collect::<Result<Vec<_>>>()?;
    let dagger_formula = product.lattice.elements().all(|t| {
        let expected = m.join_all(
            daggers
                .iter()
                .enumerate()
                .map(|(k, d)| d.image(layout.component(t, k))),
        );
        hd.image(t) == expected
    });
    Ok(Tupling {
        map: h,
        unique,
        dagger_formula,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroObjectEntry {
    pub size: usize,
    pub arrows_in: usize,
    pub arrows_out: usize,
    /// The unique arrows `0 → L` and `L → 0` are daggers of each other.
    pub mutually_dagger: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroObjectReport {
    pub holds: bool,
    pub entries: Vec<ZeroObjectEntry>,
}

/// Checks that the one-element lattice is initial and terminal among the
/// given o-algebras, with the two arrows daggers of each other.
pub fn zero_object_check(family: &[Arc<FinLattice>]) -> Result<ZeroObjectReport> {
    let zero = Arc::new(powerset_unchecked(0));
    let mut entries = Vec::new();
    for l in family {
        let ins = enumerate_join_maps(&zero, l)?;
        let outs = enumerate_join_maps(l, &zero)?;
        let mutually_dagger = match (ins.as_slice(), outs.as_slice()) {
            ([i], [o]) => {
                let i = LatticeMap::new(zero.clone(), l.clone(), i.clone())?;
                let o = LatticeMap::new(l.clone(), zero.clone(), o.clone())?;
                i.dagger()? == o && o.dagger()? == i
            }
            _ => false,
        };
        entries.push(ZeroObjectEntry {
            size: l.size(),
            arrows_in: ins.len(),
            arrows_out: outs.len(),
            mutually_dagger,
        });
    }
    Ok(ZeroObjectReport {
        holds: entries
            .iter()
            .all(|e| e.arrows_in == 1 && e.arrows_out == 1 && e.mutually_dagger),
        entries,
    })
}

/// A candidate equalizer with the evidence for its universal property.
#[derive(Debug, Clone)]
pub struct EqualizerWitness {
    pub object: Arc<FinLattice>,
    pub arrow: LatticeMap,
    /// Every equalizing cone from the family factors uniquely.
    pub universal: bool,
    pub cones_checked: usize,
    pub family_sizes: Vec<usize>,
}

fn check_parallel(f: &LatticeMap, g: &LatticeMap) -> Result<()> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::ShapeMismatch("arrows are not parallel".into()));
    }
    Ok(())
}

fn ofrm_arrows(x: &FinLattice, y: &FinLattice) -> Result<Vec<Vec<Elem>>> {
    Ok(enumerate_join_maps(x, y)?
        .into_iter()
        .filter(|images| {
            images[x.top()] == y.top()
                && x.elements()
                    .all(|a| x.elements().all(|b| images[x.meet(a, b)] == y.meet(images[a], images[b])))
        })
        .collect())
}

/// Image vectors of all arrows `X → Y` in some category.
type ArrowsFn = dyn Fn(&FinLattice, &FinLattice) -> Result<Vec<Vec<Elem>>>;

/// Counts the equalizing cones `u : X → L` from the family and checks
/// each factors through `e` in exactly one way. `arrows(X, Y)` supplies
/// the arrows of the category in question.
fn universal_against(
    e: &LatticeMap,
    f: &LatticeMap,
    g: &LatticeMap,
    family: &[Arc<FinLattice>],
    arrows: &ArrowsFn,
) -> Result<(bool, usize)> {
    let mut cones = 0;
    for x in family {
        let into_e = arrows(x, e.source())?;
        for u in arrows(x, f.source())? {
            if composite(f.images(), &u) != composite(g.images(), &u) {
                continue;
            }
            cones += 1;
            let factorizations = into_e
                .iter()
                .filter(|v| composite(e.images(), v) == u)
                .count();
            if factorizations != 1 {
                return Ok((false, cones));
            }
        }
    }
    Ok((true, cones))
}

/// The equalizer `{x | f x = g x}` of two parallel arrows that preserve
/// joins and finite meets, checked against `cone_family` plus both
/// carriers.
pub fn ofrm_equalizer(
    f: &LatticeMap,
    g: &LatticeMap,
    cone_family: &[Arc<FinLattice>],
) -> Result<EqualizerWitness> {
    check_parallel(f, g)?;
    for (name, h) in [("f", f), ("g", g)] {
        if !(h.preserves_joins() && h.preserves_finite_meets()) {
            return Err(Error::PreconditionFailed(format!(
                "{name} does not preserve joins and finite meets"
            )));
        }
        h.dagger()?;
    }
    let l = f.source();
    let members: Vec<Elem> = l.elements().filter(|&x| f.image(x) == g.image(x)).collect();
    let sub = is_sub_oalgebra(l, &members)?;
    let arrow = sub.inclusion.ok_or_else(|| {
        Error::CrossCheck(format!(
            "equalizer set is not a sub-o-algebra: {:?}",
            sub.failure
        ))
    })?;
    let family = with_carriers(cone_family.to_vec(), &[f.source(), f.target()]);
    let (universal, cones_checked) =
        universal_against(&arrow, f, g, &family, &|x, y| ofrm_arrows(x, y))?;
    Ok(EqualizerWitness {
        object: arrow.source().clone(),
        arrow,
        universal,
        cones_checked,
        family_sizes: sizes(&family),
    })
}

#[derive(Debug, Clone)]
pub struct EqualizerSearch {
    /// The first candidate mono that passed the universal-property check.
    pub witness: Option<EqualizerWitness>,
    /// Injective join maps from candidate objects that equalize `f, g`.
    pub equalizing_monos: usize,
    /// Largest image among those monos.
    pub max_mono_image: usize,
    pub candidate_sizes: Vec<usize>,
    pub family_sizes: Vec<usize>,
}

/// Searches for an equalizer of two join maps among monos out of
/// `candidates`, testing universality against `cone_family` plus both
/// carriers.
pub fn equalizer_search(
    f: &LatticeMap,
    g: &LatticeMap,
    candidates: &[Arc<FinLattice>],
    cone_family: &[Arc<FinLattice>],
) -> Result<EqualizerSearch> {
    check_parallel(f, g)?;
    let l = f.source();
    let family = with_carriers(cone_family.to_vec(), &[f.source(), f.target()]);
    let mut witness = None;
    let mut equalizing_monos = 0;
    let mut max_mono_image = 0;
    for e_obj in candidates {
        for images in enumerate_join_maps(e_obj, l)? {
            let e = LatticeMap::new(e_obj.clone(), l.clone(), images)?;
            if !e.is_injective() || composite(f.images(), e.images()) != composite(g.images(), e.images()) {
                continue;
            }
            equalizing_monos += 1;
            max_mono_image = max_mono_image.max(e_obj.size());
            if witness.is_some() {
                continue;
            }
            let (universal, cones_checked) =
                universal_against(&e, f, g, &family, &|x, y| enumerate_join_maps(x, y))?;
            if universal {
                witness = Some(EqualizerWitness {
                    object: e_obj.clone(),
                    arrow: e,
                    universal,
                    cones_checked,
                    family_sizes: sizes(&family),
                });
            }
        }
    }
    Ok(EqualizerSearch {
        witness,
        equalizing_monos,
        max_mono_image,
        candidate_sizes: sizes(candidates),
        family_sizes: sizes(&family),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakEqualizerReport {
    /// `f ∘ t = g ∘ t`.
    pub equalizes: bool,
    pub equalizing_arrows: usize,
    /// Every equalizing `h` factors as `t ∘ v` for some join map `v`.
    pub all_factor: bool,
    /// Every equalizing `h` satisfies `h = t ∘ h`.
    pub all_fixed: bool,
    /// Equalizing arrows that fail either test, as image vectors.
    pub failures: Vec<Vec<Elem>>,
    pub family_sizes: Vec<usize>,
}

impl WeakEqualizerReport {
    pub fn confirmed(&self) -> bool {
        self.equalizes && self.all_factor && self.all_fixed
    }
}

pub fn weak_equalizer_check(
    t: &LatticeMap,
    f: &LatticeMap,
    g: &LatticeMap,
    family: &[Arc<FinLattice>],
) -> Result<WeakEqualizerReport> {
    check_parallel(f, g)?;
    if t.source() != f.source() || t.target() != f.source() {
        return Err(Error::ShapeMismatch(
            "t must be an endomap of the source of f and g".into(),
        ));
    }
    let l = f.source();
    let equalizes = composite(f.images(), t.images()) == composite(g.images(), t.images());
    let mut equalizing_arrows = 0;
    let mut all_factor = true;
    let mut all_fixed = true;
    let mut failures = Vec::new();
    for x in family {
        let candidates = enumerate_join_maps(x, l)?;
        for h in &candidates {
            if composite(f.images(), h) != composite(g.images(), h) {
                continue;
            }
            equalizing_arrows += 1;
            let factors = candidates.iter().any(|v| composite(t.images(), v) == *h);
            let fixed = composite(t.images(), h) == *h;
            all_factor &= factors;
            all_fixed &= fixed;
            if !(factors && fixed) {
                failures.push(h.clone());
            }
        }
    }
    Ok(WeakEqualizerReport {
        equalizes,
        equalizing_arrows,
        all_factor,
        all_fixed,
        failures,
        family_sizes: sizes(family),
    })
}

/// Outcome of replaying the equalizer counterexample in the category of
/// o-algebras and join maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub verdict: String,
    pub weak_equalizer: String,
    /// `[0, a, -a, 1]` as elements of `Pow(2)`.
    pub element_names: Vec<String>,
    pub f: Vec<Elem>,
    pub g: Vec<Elem>,
    pub t: Vec<Elem>,
    pub join_preserving: bool,
    pub f_t_equals_g_t: bool,
    /// `(f(t(-a)), g(t(-a)))`.
    pub at_neg_a: (Elem, Elem),
    pub t_image_size: usize,
    pub equalizing_arrows: usize,
    pub equalizing_monos: usize,
    pub max_mono_image: usize,
    pub candidate_sizes: Vec<usize>,
    pub cone_family_sizes: Vec<usize>,
    pub weak_family_sizes: Vec<usize>,
}

pub const NO_EQUALIZER: &str = "NO_EQUALIZER";
pub const EQUALIZER_FOUND: &str = "EQUALIZER_FOUND";

/// The two maps `Pow(2) → 2` that agree except at `-a = {1}`, and the
/// endomap `t` that pushes `-a` to the top.
pub fn counterexample_arrows() -> (LatticeMap, LatticeMap, LatticeMap) {
    let l = Arc::new(powerset_unchecked(2));
    let two = Arc::new(powerset_unchecked(1));
    let f = LatticeMap::new(l.clone(), two.clone(), vec![0, 1, 0, 1]).expect("total");
    let g = LatticeMap::new(l.clone(), two, vec![0, 1, 1, 1]).expect("total");
    let t = LatticeMap::new(l.clone(), l, vec![0, 1, 3, 3]).expect("total");
    (f, g, t)
}

pub fn replay_counterexample() -> Result<ReplayReport> {
    let (f, g, t) = counterexample_arrows();
    let neg_a = 0b10;
    let join_preserving = f.preserves_joins() && g.preserves_joins() && t.preserves_joins();
    let f_t = composite(f.images(), t.images());
    let g_t = composite(g.images(), t.images());
    let weak_family = boolean_family(4);
    let weak = weak_equalizer_check(&t, &f, &g, &weak_family)?;
    let mut t_image: Vec<Elem> = t.images().to_vec();
    t_image.sort_unstable();
    t_image.dedup();
    let candidates = boolean_family(4);
    let cones = boolean_family(8);
    let search = equalizer_search(&f, &g, &candidates, &cones)?;
    let verdict = match (&search.witness, join_preserving, f_t == g_t) {
        (None, true, true) => NO_EQUALIZER,
        _ => EQUALIZER_FOUND,
    };
    Ok(ReplayReport {
        verdict: verdict.into(),
        weak_equalizer: if weak.confirmed() { "CONFIRMED" } else { "REFUTED" }.into(),
        element_names: ["0", "a", "-a", "1"].map(String::from).to_vec(),
        f: f.images().to_vec(),
        g: g.images().to_vec(),
        t: t.images().to_vec(),
        join_preserving,
        f_t_equals_g_t: f_t == g_t,
        at_neg_a: (f_t[neg_a], g_t[neg_a]),
        t_image_size: t_image.len(),
        equalizing_arrows: weak.equalizing_arrows,
        equalizing_monos: search.equalizing_monos,
        max_mono_image: search.max_mono_image,
        candidate_sizes: search.candidate_sizes,
        cone_family_sizes: search.family_sizes,
        weak_family_sizes: weak.family_sizes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowFunctorReport {
    pub x: usize,
    pub y: usize,
    pub relations: usize,
    pub join_maps: usize,
    pub faithful: bool,
    pub full: bool,
    pub dagger_preserved: bool,
    /// `(S∘R)⁻¹ = R⁻¹∘S⁻¹` with `S : Y → Z`, `|Z| = |X|`.
    pub functorial: bool,
    pub pairs_checked: usize,
    /// Whether composable pairs were sampled rather than exhausted.
    pub sampled: bool,
    /// `Pow(X ⊔ Y)` and `Pow(X) × Pow(Y)` coincide.
    pub coproduct_preserved: bool,
}

/// Composable pairs beyond this are sampled.
pub const EXHAUSTIVE_PAIRS: usize = 1 << 16;
const SAMPLED_PAIRS: usize = 4096;

pub fn pow_functor_report(nx: usize, ny: usize, seed: u64, caps: &Caps) -> Result<PowFunctorReport> {
    for n in [nx, ny] {
        Caps::check("pow-functor side", n, 3)?;
    }
    let pow_x = powerset_lattice(nx, caps)?;
    let pow_y = powerset_lattice(ny, caps)?;
    let all_relations = |a: usize, b: usize| -> Vec<Relation> {
        (0..1u64 << (a * b)).map(|bits| Relation::from_bits(a, b, bits)).collect()
    };
    let rels = all_relations(nx, ny);
    let maps = rels
        .iter()
        .map(|r| rel_to_map_in(r, &pow_y, &pow_x))
        .collect::<Result<Vec<_>>>()?;
    let distinct: HashSet<&[Elem]> = maps.iter().map(|m| m.images()).collect();
    let faithful = distinct.len() == rels.len();
    let enumerated = enumerate_join_maps(&pow_y, &pow_x)?;
    let full = enumerated.len() == distinct.len()
        && enumerated.iter().all(|e| distinct.contains(e.as_slice()));

    let mut dagger_preserved = true;
    for (r, m) in rels.iter().zip(&maps) {
        let transposed = rel_to_map_in(&r.transpose(), &pow_x, &pow_y)?;
        dagger_preserved &= m.dagger()? == transposed;
    }

    let zs = all_relations(ny, nx);
    let total = rels.len() * zs.len();
    let mut pairs: Vec<(usize, usize)> = if total <= EXHAUSTIVE_PAIRS {
        (0..rels.len())
            .flat_map(|i| (0..zs.len()).map(move |k| (i, k)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks: Vec<(usize, usize)> = (0..SAMPLED_PAIRS)
            .map(|_| (rng.gen_range(0..rels.len()), rng.gen_range(0..zs.len())))
            .collect();
        picks.sort_unstable();
        picks
    };
    pairs.dedup();
    let mut functorial = true;
    for &(i, k) in &pairs {
        let (r, s) = (&rels[i], &zs[k]);
        let lhs = rel_to_map_in(&r.then(s)?, &pow_x, &pow_x)?;
        let s_inv = rel_to_map_in(s, &pow_x, &pow_y)?;
        let rhs = compose(&maps[i], &s_inv)?;
        functorial &= lhs.images() == rhs.images();
    }

    Caps::check("lattice", 1usize << (nx + ny), caps.lattice)?;
    let disjoint_union = powerset_unchecked(nx + ny);
    let product = product_lattice(&[pow_x.clone(), pow_y.clone()], caps)?;
    let p = &*product.lattice;
    let coproduct_preserved = *p == disjoint_union
        && p.elements().all(|a| {
            p.elements().all(|b| {
                p.meet(a, b) == disjoint_union.meet(a, b) && p.join(a, b) == disjoint_union.join(a, b)
            })
        });

    Ok(PowFunctorReport {
        x: nx,
        y: ny,
        relations: rels.len(),
        join_maps: enumerated.len(),
        faithful,
        full,
        dagger_preserved,
        functorial,
        pairs_checked: pairs.len(),
        sampled: total > EXHAUSTIVE_PAIRS,
        coproduct_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{chain_lattice, order_isomorphism};

    fn caps() -> Caps {
        Caps::default()
    }

    fn pow(n: usize) -> Arc<FinLattice> {
        powerset_lattice(n, &caps()).unwrap()
    }

    #[test]
    fn products() {
        let w = oa_product(&[pow(1), pow(1)], &caps()).unwrap();
        assert!(order_isomorphism(&w.product.lattice, &pow(2)).is_some());
        let empty = oa_product(&[], &caps()).unwrap();
        assert_eq!(empty.product.lattice.size(), 1);

        let w = oa_product(&[pow(1), pow(2)], &caps()).unwrap();
        let t = w.product.layout.encode(&[0, 0b01]);
        assert!(pos(&w.product.lattice, t));
        assert!(matches!(
            oa_product(&[chain_lattice(3).unwrap()], &caps()),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn tupling_examples() {
        let p1 = pow(1);
        let prod = product_lattice(&[p1.clone(), p1.clone()], &caps()).unwrap();
        let id = LatticeMap::identity(p1.clone());
        let t = tupling(&[id.clone(), id], &prod).unwrap();
        assert_eq!(prod.layout.decode(t.map.image(1)), vec![1, 1]);
        assert_eq!(t.unique, Some(true));
        assert!(t.dagger_formula);

        let p2 = pow(2);
        let prod = product_lattice(&[p1.clone(), p2.clone()], &caps()).unwrap();
        for a in enumerate_join_maps(&p2, &p1).unwrap() {
            for b in enumerate_join_maps(&p2, &p2).unwrap() {
                let ga = LatticeMap::new(p2.clone(), p1.clone(), a.clone()).unwrap();
                let gb = LatticeMap::new(p2.clone(), p2.clone(), b).unwrap();
                let t = tupling(&[ga, gb], &prod).unwrap();
                assert!(t.dagger_formula && t.unique == Some(true));
            }
        }
    }

    #[test]
    fn zero_object() {
        let r = zero_object_check(&boolean_family(8)).unwrap();
        assert!(r.holds);
        assert_eq!(r.entries.len(), 4);
        assert!(r.entries.iter().all(|e| e.arrows_in == 1 && e.arrows_out == 1));
    }

    #[test]
    fn ofrm_equalizers() {
        let p2 = pow(2);
        let id = LatticeMap::identity(p2.clone());
        let w = ofrm_equalizer(&id, &id, &boolean_family(8)).unwrap();
        assert_eq!(w.object.size(), 4);
        assert!(w.universal);

        let nn: Vec<Elem> = p2.elements().map(|x| p2.not(p2.not(x))).collect();
        let g = LatticeMap::new(p2.clone(), p2.clone(), nn).unwrap();
        assert_eq!(ofrm_equalizer(&id, &g, &boolean_family(8)).unwrap().object.size(), 4);

        // the counterexample pair: g fails binary meets at ({0}, {1})
        let (f, g, _) = counterexample_arrows();
        assert!(matches!(
            ofrm_equalizer(&f, &g, &boolean_family(8)),
            Err(Error::PreconditionFailed(_))
        ));
        // and {x | f x = g x} = {0, a, 1} is not implication-closed
        let members: Vec<Elem> = (0..4).filter(|&x| f.image(x) == g.image(x)).collect();
        assert_eq!(members, vec![0, 1, 3]);
        assert!(!is_sub_oalgebra(f.source(), &members).unwrap().closed);

        // two projections Pow(2) → Pow(1): equalizer {∅, X}
        let p1 = pow(1);
        let a = LatticeMap::new(p2.clone(), p1.clone(), vec![0, 1, 0, 1]).unwrap();
        let b = LatticeMap::new(p2.clone(), p1, vec![0, 0, 1, 1]).unwrap();
        let w = ofrm_equalizer(&a, &b, &boolean_family(8)).unwrap();
        assert_eq!(w.arrow.images(), &[0, 3]);
        assert!(w.universal);
    }

    #[test]
    fn equalizer_searches() {
        let (f, g, _) = counterexample_arrows();
        let s = equalizer_search(&f, &g, &boolean_family(4), &boolean_family(8)).unwrap();
        assert!(s.witness.is_none());
        assert!(s.max_mono_image <= 2);

        let p1 = pow(1);
        let id = LatticeMap::identity(p1.clone());
        let s = equalizer_search(&id, &id, std::slice::from_ref(&p1), &boolean_family(8)).unwrap();
        assert_eq!(s.witness.unwrap().arrow, id);

        // the frame equalizer of two projections, re-run with join maps
        let p2 = pow(2);
        let a = LatticeMap::new(p2.clone(), p1.clone(), vec![0, 1, 0, 1]).unwrap();
        let b = LatticeMap::new(p2.clone(), p1, vec![0, 0, 1, 1]).unwrap();
        let w = ofrm_equalizer(&a, &b, &boolean_family(8)).unwrap();
        let s = equalizer_search(&a, &b, std::slice::from_ref(&w.object), &boolean_family(8)).unwrap();
        // every equalizing join map lands in {∅, X}, so the frame equalizer
        // is universal among join maps as well
        assert_eq!(s.equalizing_monos, 1);
        assert_eq!(s.witness.unwrap().arrow, w.arrow);
    }

    #[test]
    fn weak_equalizers() {
        let (f, g, t) = counterexample_arrows();
        let r = weak_equalizer_check(&t, &f, &g, &boolean_family(4)).unwrap();
        assert!(r.confirmed(), "{r:?}");

        let p1 = pow(1);
        let id = LatticeMap::identity(p1.clone());
        assert!(weak_equalizer_check(&id, &id, &id, &boolean_family(4)).unwrap().confirmed());

        let zero = LatticeMap::constant(p1.clone(), p1.clone(), 0).unwrap();
        let r = weak_equalizer_check(&zero, &id, &id, &boolean_family(4)).unwrap();
        assert!(r.equalizes && !r.all_factor && !r.all_fixed);
    }

    #[test]
    fn replay() {
        let r = replay_counterexample().unwrap();
        assert_eq!(r.verdict, NO_EQUALIZER);
        assert_eq!(r.weak_equalizer, "CONFIRMED");
        assert_eq!(r.t_image_size, 3);
        assert_eq!(r.at_neg_a, (1, 1));
        assert!(r.max_mono_image <= 2);
    }

    #[test]
    fn pow_functor() {
        let r = pow_functor_report(2, 2, 0, &caps()).unwrap();
        assert_eq!((r.relations, r.join_maps), (16, 16));
        assert!(r.faithful && r.full && r.dagger_preserved && r.functorial && r.coproduct_preserved);
        assert!(!r.sampled);
        let r = pow_functor_report(0, 0, 0, &caps()).unwrap();
        assert_eq!((r.relations, r.join_maps), (1, 1));
        let r = pow_functor_report(2, 1, 0, &caps()).unwrap();
        assert_eq!((r.relations, r.join_maps), (4, 4));
        assert!(matches!(pow_functor_report(4, 1, 0, &caps()), Err(Error::SizeCap { .. })));
    }
}
