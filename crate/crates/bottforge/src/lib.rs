//! Free-fermion ground states as subspaces of Nambu space: pseudo-symmetry generators,
//! the (1,1) periodicity, the diagonal Bott map, sampled bundles over spheres with
//! involution, topological invariants and the periodic-table lookups.

pub mod bott;
pub mod clifford;
pub mod error;
pub mod examples;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod periodicity;
pub mod spaces;
pub mod tables;

pub use bott::{beta, suspend, BottContext};
pub use clifford::{
    build_generators, membership, verify_generator_set, GeneratorReport, GeneratorSet,
    MembershipReport, SymmetryClass,
};
pub use error::{Error, Result};
pub use invariants::{InvariantKind, InvariantResult, InvariantValue, Sector};
pub use io::{load_bundle, save_bundle, BundleFile};
pub use linalg::{CMat, CVec, NambuSpace, Subspace, C64};
pub use periodicity::{double_11, reduce_11, DoubledContext};
pub use spaces::{
    check_bundle, check_bundle_with, AxisKind, BundleReport, CheckOptions, MomentumSpace,
    SampledBundle,
};
pub use tables::{AbGroupLabel, BoundsResult};
