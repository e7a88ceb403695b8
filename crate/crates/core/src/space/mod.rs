//! Weighted sequence spaces over lattice graphs: scalars, finitely
//! supported vectors, weight families, norms and the boundedness probe.

mod norms;
mod scalar;
mod vector;
mod weights;

pub use norms::{
    boundedness_report, norm, norm_p_power_exact, sup_norm_exact, BoundednessReport,
    BoundednessVerdict, LayerRatio, SpaceSpec, DEFAULT_GROWTH_FACTOR,
};
pub use scalar::{pow_i, pow_u, Scalar};
pub use vector::SparseVector;
pub use weights::{
    format_ratio, parse_ratio, LayerTail, LayerWeights, Param, WeightFamily, WeightTable,
    WeightValue,
};
