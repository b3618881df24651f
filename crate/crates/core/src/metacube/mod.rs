//! Meta-cube contents, the reduction from the product body to the meta-cube,
//! and numerical checks of the related integral-geometric identities.

mod caps;
pub mod quadrature;
pub mod special;

pub use caps::{
    cap_content_meta, cap_content_meta_general, section_content_meta, section_content_meta_general, MetaCap,
    MAX_META_DIM,
};
pub use quadrature::{Estimate, QuadratureSpec};
pub use special::incomplete_beta;
mod verify;
pub use verify::{
    cap_content_full, cap_content_full_mc, meta_betas, meta_normal, reduction_constant,
    verify_blaschke_petkantschin_2d, verify_bounds, verify_polyspherical, verify_reduction, BoundsGrid,
    ReductionReport, TestFn, REDUCTION_PASS_FRACTION,
};
