//! Toric surface codes over small finite fields: lattice polygon geometry,
//! code construction, exact minimum distance search, Minkowski
//! decompositions and the distance bounds derived from them.

pub mod bounds;
pub mod code;
pub mod decomp;
pub mod field;
pub mod polygon;

pub use bounds::{full_report, BoundEntry, BoundKind, BoundReport, BoundsError, ClosedForm, Rank3Case, ReportOptions};
pub use code::{
    build_code, count_torus_zeros, min_distance_exact, weight_distribution, CodeError, MinDistance, SearchOptions,
    SectionPoly, ToricCode,
};
pub use decomp::{best_subpolygon_decomposition, factor_polygon, DecompError, MinkowskiDecomposition};
pub use field::{FieldElement, FieldError, FieldSpec};
pub use polygon::{
    lattice_equivalence, minkowski_sum, Counts, GeometryError, LatticePoint, LatticePolygon, UnimodularAffineMap,
};
