//! Sections of sums of canonical and trivial line bundles over RP¹ and RP²,
//! realized as equivariant functions on the covering sphere, together with
//! rank-drop searches and spans of square matrices.

mod rankdrop;
mod search;
mod sections;
mod span;

pub use rankdrop::{
    extract_rho_maps, rank_drop_search_rp1, rank_drop_search_rp2, RhoExtraction, Rp1Witness,
    BRACKET_WIDTH, DET_ZERO, RHO_ZERO,
};
pub use search::{
    canonical_sign, search_circle, search_sphere, SearchOutcome, RANK_DROP_TOL, RERUN_CEILING,
};
pub use sections::{
    canonical_sections_2gamma, canonical_sections_4gamma, check_equivariance, section_matrix,
    EquivariantSection, ParitySignature,
};
pub use span::{
    complex_matrices_to_json, min_rank_over_circle, min_rank_over_sphere, parse_matrix_json,
    span_morphism, MatrixSet, SpanFamily, SpanMinimum, RANK_THRESHOLD,
};
