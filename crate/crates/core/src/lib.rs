//! Backward shift operators on weighted lattice graphs.
//!
//! The crate models the operator `(Bf)(v) = sum_{u in Chi(v)} f(u)` on
//! weighted `lp` and `c0` spaces over a family of directed lattice
//! graphs (finite and bilateral strips, the discrete quadrant and
//! half-plane, and a few path-like graphs). It provides:
//!
//! * closed-form operator powers and their brute-force/matrix cross
//!   checks ([`shift`], [`oracle`]);
//! * explicit right inverses on strips and on the quadrant's diagonal
//!   eigenbasis, and the orbit approximants built from them
//!   ([`rightinv`]);
//! * weight-decay scans that collect evidence for or against
//!   transitivity-type behaviour of the shift, plus exact obstruction
//!   certificates where rational arithmetic settles the question
//!   ([`criteria`]);
//! * eigenvector families and spectral region scans ([`spectral`]).
//!
//! Exact (`BigRational`) and approximate (`Complex64`) computations are
//! separated at the type level; a vector is either exact or floating,
//! never a mixture.

mod combi;
pub mod criteria;
pub mod error;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod rightinv;
pub mod shift;
pub mod space;
pub mod spectral;

pub use criteria::{
    default_thresholds, necessary_sum, quadrant_mixing_test, quadrant_obstruction_test,
    skip_graph_test, strip_criterion, strip_criterion_bilateral, structural_report,
    CriterionReport, NecSumValue, ScanPoint, Verdict, WitnessConfig, DEFAULT_MARGIN,
    DEFAULT_WINDOW, GOLDEN_RATIO,
};
pub use error::{Error, Result};
pub use graph::{
    children, children_n, parents, structural_obstruction, truncate, Extent, GraphModel, Vertex,
};
pub use io::{
    alpha_to_csv, layer_weights_from_csv, layer_weights_to_csv, region_to_csv, trace_to_csv,
    vector_from_json, vector_to_json_approx, vector_to_json_exact, weight_table_from_csv,
    weight_table_to_csv, VectorData,
};
pub use oracle::{
    equivalence_check, matrix_power_apply, truncated_matrix, TruncatedMatrix, MAX_ORACLE_VERTICES,
};
pub use rightinv::{
    diagonal_basis_vector, hc_approximant, right_inverse_basis_closed, right_inverse_quadrant,
    right_inverse_strip, AlphaTable, DiagonalBasisParams,
};
pub use shift::{
    apply, diagonal_regroup, generalized_shift_apply, power_apply, power_closed, restrict,
    DiagonalBlocks,
};
pub use space::{
    boundedness_report, norm, norm_p_power_exact, sup_norm_exact, BoundednessReport,
    BoundednessVerdict, LayerRatio, Param, Scalar, SpaceSpec, SparseVector, WeightFamily,
    WeightTable, WeightValue,
};
pub use spectral::{
    eigen_residual, eigenvector_quadrant, eigenvector_skip, gs_region_scan, EigenFamily, EigenPair,
    RegionPoint, RegionReport, RegionTag, ResidualReport,
};
