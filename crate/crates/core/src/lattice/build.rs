use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::morphisms::LatticeMap;

use super::{lattice_from_poset, poset_from_pairs, Elem, FinLattice, FinPoset};

/// The Boolean lattice of subsets of `{0, .., n-1}`; element `i` is the
/// subset with bitmask `i`.
pub fn powerset_lattice(n: usize, caps: &Caps) -> Result<Arc<FinLattice>> {
    Caps::check("powerset base", n, caps.powerset)?;
    Caps::check("lattice", 1usize << n, caps.lattice)?;
    Ok(Arc::new(powerset_unchecked(n)))
}

pub(crate) fn powerset_unchecked(n: usize) -> FinLattice {
    let size = 1usize << n;
    let poset = FinPoset::from_leq_fn(size, |x, y| x & y == x);
    let mut meet = vec![0u32; size * size];
    let mut join = vec![0u32; size * size];
    for x in 0..size {
        for y in 0..size {
            meet[x * size + y] = (x & y) as u32;
            join[x * size + y] = (x | y) as u32;
        }
    }
    FinLattice::from_tables(poset, meet, join)
}

/// The chain `0 < 1 < .. < n-1`.
pub fn chain_lattice(n: usize) -> Result<Arc<FinLattice>> {
    let pairs: Vec<(Elem, Elem)> = (1..n).map(|i| (i - 1, i)).collect();
    lattice_from_poset(poset_from_pairs(n, &pairs)?)
}

/// Down-closed subsets of `poset` ordered by inclusion, indexed in
/// increasing bitmask order. Always a frame.
pub fn downset_lattice(poset: &FinPoset, caps: &Caps) -> Result<Arc<FinLattice>> {
    let p = poset.size();
    Caps::check("down-set poset", p, caps.downset)?;
    let below: Vec<u64> = (0..p)
        .map(|x| poset.down(x).ones().fold(0u64, |m, y| m | (1 << y)))
        .collect();
    let masks: Vec<u64> = (0..(1u64 << p))
        .filter(|&m| (0..p).all(|x| m & (1 << x) == 0 || m & below[x] == below[x]))
        .collect();
    let size = masks.len();
    Caps::check("lattice", size, caps.lattice)?;
    let mut index = vec![u32::MAX; 1 << p];
    for (i, &m) in masks.iter().enumerate() {
        index[m as usize] = i as u32;
    }
    let mut meet = vec![0u32; size * size];
    let mut join = vec![0u32; size * size];
    for (i, &a) in masks.iter().enumerate() {
        for (k, &b) in masks.iter().enumerate() {
            meet[i * size + k] = index[(a & b) as usize];
            join[i * size + k] = index[(a | b) as usize];
        }
    }
    let order = FinPoset::from_leq_fn(size, |i, k| masks[i] & masks[k] == masks[i]);
    Ok(Arc::new(FinLattice::from_tables(order, meet, join)))
}

/// Mixed-radix encoding of tuples: component 0 is the least significant
/// digit, so `Pow(X) × Pow(Y)` encodes exactly like `Pow(X ⊔ Y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductLayout {
    sizes: Vec<usize>,
    strides: Vec<usize>,
}

impl ProductLayout {
    fn new(sizes: Vec<usize>) -> ProductLayout {
        let mut strides = Vec::with_capacity(sizes.len());
        let mut acc = 1;
        for &s in &sizes {
            strides.push(acc);
            acc *= s;
        }
        ProductLayout { sizes, strides }
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn component(&self, e: Elem, k: usize) -> Elem {
        (e / self.strides[k]) % self.sizes[k]
    }

    pub fn decode(&self, e: Elem) -> Vec<Elem> {
        (0..self.arity()).map(|k| self.component(e, k)).collect()
    }

    pub fn encode(&self, parts: &[Elem]) -> Elem {
        parts.iter().zip(&self.strides).map(|(x, s)| x * s).sum()
    }
}

/// A product lattice with its layout and projections.
#[derive(Debug, Clone)]
pub struct ProductLattice {
    pub lattice: Arc<FinLattice>,
    pub layout: ProductLayout,
    pub factors: Vec<Arc<FinLattice>>,
    pub projections: Vec<LatticeMap>,
}

/// Cartesian product with the pointwise order.
pub fn product_lattice(factors: &[Arc<FinLattice>], caps: &Caps) -> Result<ProductLattice> {
    let size = factors
        .iter()
        .try_fold(1usize, |acc, l| acc.checked_mul(l.size()))
        .ok_or(Error::SizeCap {
            what: "lattice",
            requested: usize::MAX,
            cap: caps.lattice,
        })?;
    Caps::check("lattice", size, caps.lattice)?;
    let layout = ProductLayout::new(factors.iter().map(|l| l.size()).collect());
    let pointwise = |x: Elem, y: Elem, op: &dyn Fn(&FinLattice, Elem, Elem) -> Elem| {
        let parts: Vec<Elem> = factors
            .iter()
            .enumerate()
            .map(|(k, l)| op(l, layout.component(x, k), layout.component(y, k)))
            .collect();
        layout.encode(&parts) as u32
    };
    let mut meet = vec![0u32; size * size];
    let mut join = vec![0u32; size * size];
    for x in 0..size {
        for y in 0..size {
            meet[x * size + y] = pointwise(x, y, &|l, a, b| l.meet(a, b));
            join[x * size + y] = pointwise(x, y, &|l, a, b| l.join(a, b));
        }
    }
    let poset = FinPoset::from_leq_fn(size, |x, y| {
        factors
            .iter()
            .enumerate()
            .all(|(k, l)| l.leq(layout.component(x, k), layout.component(y, k)))
    });
    let lattice = Arc::new(FinLattice::from_tables(poset, meet, join));
    let projections = factors
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let images = (0..size).map(|e| layout.component(e, k)).collect();
            LatticeMap::new(lattice.clone(), l.clone(), images)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductLattice {
        lattice,
        layout,
        factors: factors.to_vec(),
        projections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{frame_report, order_isomorphism};

    #[test]
    fn small_powersets() {
        let caps = Caps::default();
        let p0 = powerset_lattice(0, &caps).unwrap();
        assert_eq!(p0.size(), 1);
        assert_eq!(p0.bottom(), p0.top());
        let p2 = powerset_lattice(2, &caps).unwrap();
        assert_eq!(p2.size(), 4);
        assert_eq!(p2.meet(1, 2), 0);
        assert_eq!(p2.join(1, 2), 3);
        let p3 = powerset_lattice(3, &caps).unwrap();
        assert_eq!(p3.size(), 8);
        // x → y = (complement x) ∪ y
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(p3.implies(x, y), Some((!x & 7) | y));
            }
        }
        assert!(matches!(
            powerset_lattice(6, &caps),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn downsets_of_small_posets() {
        let caps = Caps::default();
        let one = poset_from_pairs(1, &[]).unwrap();
        assert_eq!(downset_lattice(&one, &caps).unwrap().size(), 2);

        // {∅, {0}, {0,1}}
        let c2 = poset_from_pairs(2, &[(0, 1)]).unwrap();
        let d = downset_lattice(&c2, &caps).unwrap();
        assert_eq!(d, chain_lattice(3).unwrap());

        // four down-sets of an antichain
        let anti = poset_from_pairs(2, &[]).unwrap();
        let d = downset_lattice(&anti, &caps).unwrap();
        assert_eq!(d.size(), 4);
        assert!(order_isomorphism(&d, &powerset_lattice(2, &caps).unwrap()).is_some());

        let big = poset_from_pairs(13, &[]).unwrap();
        assert!(matches!(
            downset_lattice(&big, &caps),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn products() {
        let caps = Caps::default();
        let empty = product_lattice(&[], &caps).unwrap();
        assert_eq!(empty.lattice.size(), 1);

        let c2 = chain_lattice(2).unwrap();
        let sq = product_lattice(&[c2.clone(), c2.clone()], &caps).unwrap();
        assert_eq!(*sq.lattice, *powerset_lattice(2, &caps).unwrap());

        let c3 = chain_lattice(3).unwrap();
        let p = product_lattice(&[c3.clone(), c2.clone()], &caps).unwrap();
        assert_eq!(p.lattice.size(), 6);
        assert_eq!(p.layout.decode(p.lattice.bottom()), vec![0, 0]);
        assert_eq!(p.layout.decode(p.lattice.top()), vec![2, 1]);
        assert!(frame_report(&p.lattice).is_frame);
        for x in p.lattice.elements() {
            for y in p.lattice.elements() {
                let pointwise = (0..2).all(|k| {
                    p.factors[k].leq(p.layout.component(x, k), p.layout.component(y, k))
                });
                assert_eq!(p.lattice.leq(x, y), pointwise);
            }
        }
        assert_eq!(p.projections[0].image(5), 2);
        assert_eq!(p.projections[1].image(5), 1);
    }
}
