//! Fixtures shared by the benchmarks.

use toricode::{FieldSpec, LatticePolygon};

pub fn hexagon() -> LatticePolygon {
    LatticePolygon::from_points(&[(1, 0), (2, 0), (0, 1), (1, 2), (3, 2), (3, 3)])
}

pub fn pentagon() -> LatticePolygon {
    LatticePolygon::from_points(&[(0, 0), (1, 0), (3, 1), (2, 2), (1, 2)])
}

/// A pentagon with many lattice points, for the decomposition search.
pub fn wide_pentagon() -> LatticePolygon {
    LatticePolygon::from_points(&[(0, 0), (6, 0), (7, 3), (3, 6), (0, 4)])
}

pub fn field(q: u32) -> FieldSpec {
    FieldSpec::with_order(q, None).expect("prime power")
}
