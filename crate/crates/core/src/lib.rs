//! Finite models of overlap algebras, frames and locales.
//!
//! Every structure here is a desk-scale finite object stored as dense
//! element indices with precomputed operation tables. The checks are
//! exhaustive: a verdict is always backed by a complete scan of the finite
//! model, and a failed property reports the lowest-index witness.
//!
//! Module map:
//!
//! - [`lattice`]: posets, lattices, frames, powersets, products, down-set
//!   lattices, finite topologies with interior and closure.
//! - [`overlap`]: positivity, the overlap relation, overlap-algebra
//!   verification, atoms, Booleanization and base-relative density.
//! - [`morphisms`]: join maps, adjoints, daggers, the relation bridge and
//!   image factorization.
//! - [`categories`]: products, tupling, the zero object, equalizers and the
//!   non-completeness counterexample.
//! - [`sublocales`]: nuclei, sublocale frames, open sublocales, the
//!   sublocale/join-map bijection and regular-open algebras.

pub mod caps;
pub mod categories;
pub mod error;
pub mod lattice;
pub mod morphisms;
pub mod overlap;
pub mod report;
pub mod sublocales;

pub use caps::Caps;
pub use error::{Error, JoinWitness, NucleusLaw, Result};
pub use lattice::{Elem, FinLattice, FinPoset, Topology};
pub use morphisms::{LatticeMap, Relation};
pub use sublocales::Nucleus;
