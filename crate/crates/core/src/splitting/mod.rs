//! Box covers of J, cone-field certificates for dominated splitting and
//! hyperbolicity, a pointwise soundness oracle, and rate estimates.
//!
//! Interval arithmetic is rigorous up to the slack model of
//! [`crate::interval`]: outward widening by a fixed number of ulps per
//! operation, with no hardware rounding modes.

mod cones;
mod cover;
mod oracle;
mod rates;

pub use crate::interval::{enclose, ComplexBox, IntervalMatrix2C};
pub use cones::{
    cone_separation, cone_slope, recheck, refine, stable_frame_direction, verify_dominated_splitting,
    verify_hyperbolicity, BoxReport, BoxStatus, CertParams, ConeParams, RecheckReport,
    SplittingCertificate, DEFAULT_ALPHA, DEFAULT_DEPTHS, DEFAULT_MARGIN, DEFAULT_R, DEFAULT_RHO,
    EDGE_EVALUATION_CAP,
};
pub use cover::{
    build_julia_cover, certify_traps, children, grid_box, max_boxes_from_env, prune, refine_cover,
    CoverOptions, GridBox, JuliaCover, DEFAULT_MAX_BOXES, MAX_BOXES_ENV, MAX_LEVEL,
};
pub use oracle::{sampling_oracle, OracleOptions, OracleReport};
pub use rates::{estimate_rates, estimate_stable_direction, RateReport, RateRow, STABILIZATION_TOL};
