//! Exact integral convex geometry in the plane.
//!
//! Polygons are kept in a canonical form: counterclockwise, no three
//! consecutive vertices collinear, starting at the lexicographically smallest
//! vertex. Two polygons are equal iff their canonical vertex lists are equal.
//! Degenerate polygons (a point or a segment) are allowed.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Input coordinates must stay within this magnitude so every intermediate
/// product fits comfortably in `i128` and sums of two polygons still fit.
pub const COORD_LIMIT: i64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("no input points")]
    EmptyInput,
    #[error("coordinate exceeds the supported range of +/-2^30")]
    CoordinateOverflow,
    #[error("operation needs a two-dimensional polygon")]
    DegeneratePolygon,
    #[error("not applicable: polygon has no interior lattice points")]
    NotApplicable,
    #[error("matrix determinant is {0}, expected +/-1")]
    NotUnimodular(i64),
    #[error("polygon parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl From<[i64; 2]> for LatticePoint {
    fn from([x, y]: [i64; 2]) -> Self {
        LatticePoint { x, y }
    }
}

impl From<LatticePoint> for [i64; 2] {
    fn from(p: LatticePoint) -> Self {
        [p.x, p.y]
    }
}

impl From<(i64, i64)> for LatticePoint {
    fn from((x, y): (i64, i64)) -> Self {
        LatticePoint { x, y }
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl std::ops::Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.x, -self.y)
    }
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }

    pub fn scale(self, k: i64) -> Self {
        LatticePoint::new(self.x * k, self.y * k)
    }

    fn in_range(self) -> bool {
        self.x.abs() <= COORD_LIMIT && self.y.abs() <= COORD_LIMIT
    }

    /// `(self / g, g)` with `g = gcd(x, y)`; the zero vector maps to itself with `g = 0`.
    pub fn primitive(self) -> (LatticePoint, i64) {
        let g = gcd(self.x, self.y);
        if g == 0 {
            (self, 0)
        } else {
            (LatticePoint::new(self.x / g, self.y / g), g)
        }
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, s, t)` with `a s + b t = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let quot = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub(crate) fn cross(a: LatticePoint, b: LatticePoint) -> i128 {
    a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128
}

fn orient(o: LatticePoint, a: LatticePoint, b: LatticePoint) -> i128 {
    cross(a - o, b - o)
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b) - if b < 0 && a.rem_euclid(b) != 0 { 1 } else { 0 }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// Total order on nonzero vectors by polar angle in `[0, 2pi)`.
pub fn angle_cmp(a: LatticePoint, b: LatticePoint) -> Ordering {
    let half = |v: LatticePoint| u8::from(!(v.y > 0 || (v.y == 0 && v.x > 0)));
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    /// Twice the area.
    pub volume2: i64,
    pub total: i64,
    pub boundary: i64,
    pub interior: i64,
}

/// An integral convex polygon in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolygonFile", into = "PolygonFile")]
pub struct LatticePolygon {
    vertices: Vec<LatticePoint>,
}

/// On-disk polygon description; any point set is accepted and its hull taken.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<LatticePoint>,
}

impl TryFrom<PolygonFile> for LatticePolygon {
    type Error = GeometryError;
    fn try_from(f: PolygonFile) -> Result<Self, Self::Error> {
        convex_hull(&f.vertices)
    }
}

impl From<LatticePolygon> for PolygonFile {
    fn from(p: LatticePolygon) -> Self {
        PolygonFile { vertices: p.vertices }
    }
}

impl fmt::Display for LatticePolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conv{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Canonical convex hull (Andrew's monotone chain, collinear points dropped).
pub fn convex_hull(points: &[LatticePoint]) -> Result<LatticePolygon, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    if points.iter().any(|p| !p.in_range()) {
        return Err(GeometryError::CoordinateOverflow);
    }
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(LatticePolygon { vertices: pts });
    }
    let mut lower: Vec<LatticePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    // all points collinear: the chains collapse to the two extreme points
    Ok(LatticePolygon { vertices: lower })
}

impl LatticePolygon {
    /// Hull of the given points; panics on empty or out-of-range input.
    pub fn from_points<P: Into<LatticePoint> + Copy>(points: &[P]) -> LatticePolygon {
        let pts: Vec<LatticePoint> = points.iter().map(|&p| p.into()).collect();
        convex_hull(&pts).expect("valid point set")
    }

    pub fn point(p: LatticePoint) -> LatticePolygon {
        LatticePolygon { vertices: vec![p] }
    }

    pub fn from_json(text: &str) -> Result<LatticePolygon, GeometryError> {
        serde_json::from_str::<PolygonFile>(text)
            .map_err(|e| GeometryError::Parse(e.to_string()))
            .and_then(LatticePolygon::try_from)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polygon serializes")
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn dim(&self) -> u8 {
        match self.vertices.len() {
            1 => 0,
            2 => 1,
            _ => 2,
        }
    }

    /// Vertex with minimal `(y, x)`; edges leave it in increasing angle order.
    fn bottom_left(&self) -> LatticePoint {
        *self.vertices.iter().min_by_key(|v| (v.y, v.x)).expect("nonempty")
    }

    pub fn first_vertex(&self) -> LatticePoint {
        self.vertices[0]
    }

    /// `(min corner, max corner)` of the bounding box.
    pub fn bounding_box(&self) -> (LatticePoint, LatticePoint) {
        let xmin = self.vertices.iter().map(|v| v.x).min().unwrap();
        let xmax = self.vertices.iter().map(|v| v.x).max().unwrap();
        let ymin = self.vertices.iter().map(|v| v.y).min().unwrap();
        let ymax = self.vertices.iter().map(|v| v.y).max().unwrap();
        (LatticePoint::new(xmin, ymin), LatticePoint::new(xmax, ymax))
    }

    pub fn translate(&self, t: LatticePoint) -> LatticePolygon {
        LatticePolygon {
            vertices: self.vertices.iter().map(|&v| v + t).collect(),
        }
    }

    /// Translate so the first canonical vertex sits at the origin.
    pub fn normalized(&self) -> LatticePolygon {
        self.translate(-self.vertices[0])
    }

    /// Edge vectors in counterclockwise angle order starting from the
    /// bottom-left vertex. A segment contributes its two opposite vectors.
    pub fn edge_vectors(&self) -> Vec<LatticePoint> {
        match self.dim() {
            0 => Vec::new(),
            1 => {
                let d = self.vertices[1] - self.vertices[0];
                let mut v = vec![d, -d];
                v.sort_by(|a, b| angle_cmp(*a, *b));
                v
            }
            _ => {
                let n = self.vertices.len();
                let start = self.vertices.iter().position(|&v| v == self.bottom_left()).unwrap();
                (0..n)
                    .map(|k| self.vertices[(start + k + 1) % n] - self.vertices[(start + k) % n])
                    .collect()
            }
        }
    }

    /// Primitive edge directions with lattice lengths, in angle order.
    pub fn primitive_edges(&self) -> Vec<(LatticePoint, i64)> {
        self.edge_vectors().into_iter().map(|e| e.primitive()).collect()
    }

    pub fn counts(&self) -> Counts {
        let boundary = match self.dim() {
            0 => 1,
            1 => {
                gcd(
                    self.vertices[1].x - self.vertices[0].x,
                    self.vertices[1].y - self.vertices[0].y,
                ) + 1
            }
            _ => self.edge_vectors().iter().map(|e| gcd(e.x, e.y)).sum(),
        };
        if self.dim() < 2 {
            return Counts {
                volume2: 0,
                total: boundary,
                boundary,
                interior: 0,
            };
        }
        let volume2 = self.volume2();
        let total: i64 = self.rows().map(|(_, lo, hi)| (hi - lo + 1).max(0)).sum();
        let interior = total - boundary;
        assert_eq!(volume2, 2 * total - boundary - 2, "Pick's identity failed for {self}");
        Counts {
            volume2,
            total,
            boundary,
            interior,
        }
    }

    /// Twice the area, by the shoelace formula.
    pub fn volume2(&self) -> i64 {
        if self.dim() < 2 {
            return 0;
        }
        let n = self.vertices.len();
        let s: i128 = (0..n)
            .map(|i| cross(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum();
        s as i64
    }

    /// For each row `y`, the inclusive range of lattice `x` inside the polygon.
    fn rows(&self) -> impl Iterator<Item = (i64, i64, i64)> + '_ {
        let (lo, hi) = self.bounding_box();
        let n = self.vertices.len();
        (lo.y..=hi.y).map(move |y| {
            let mut xl = i128::MIN;
            let mut xr = i128::MAX;
            for i in 0..n {
                let v = self.vertices[i];
                let e = self.vertices[(i + 1) % n] - v;
                // inside: e.y * (px - v.x) <= e.x * (y - v.y)
                let rhs = e.x as i128 * (y - v.y) as i128;
                match e.y.cmp(&0) {
                    Ordering::Greater => xr = xr.min(v.x as i128 + floor_div(rhs, e.y as i128)),
                    Ordering::Less => xl = xl.max(v.x as i128 + ceil_div(rhs, e.y as i128)),
                    Ordering::Equal => {
                        if rhs < 0 {
                            xl = i128::MAX;
                            xr = i128::MIN;
                        }
                    }
                }
            }
            let xl = xl.clamp(lo.x as i128 - 1, hi.x as i128 + 1) as i64;
            let xr = xr.clamp(lo.x as i128 - 1, hi.x as i128 + 1) as i64;
            (y, xl, xr)
        })
    }

    /// All lattice points, sorted lexicographically.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let mut pts = match self.dim() {
            0 => self.vertices.clone(),
            1 => {
                let (d, g) = (self.vertices[1] - self.vertices[0]).primitive();
                (0..=g).map(|k| self.vertices[0] + d.scale(k)).collect()
            }
            _ => self
                .rows()
                .flat_map(|(y, lo, hi)| (lo..=hi).map(move |x| LatticePoint::new(x, y)))
                .collect(),
        };
        pts.sort();
        pts
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        match self.dim() {
            0 => self.vertices[0] == p,
            1 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                orient(a, b, p) == 0
                    && p.x >= a.x.min(b.x)
                    && p.x <= a.x.max(b.x)
                    && p.y >= a.y.min(b.y)
                    && p.y <= a.y.max(b.y)
            }
            _ => {
                let n = self.vertices.len();
                (0..n).all(|i| orient(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0)
            }
        }
    }

    /// Containment of convex sets reduces to containment of vertices.
    pub fn contains_polygon(&self, other: &LatticePolygon) -> bool {
        other.vertices.iter().all(|&v| self.contains(v))
    }

    pub fn apply_map(&self, t: &UnimodularAffineMap) -> LatticePolygon {
        let pts: Vec<LatticePoint> = self.vertices.iter().map(|&v| t.apply(v)).collect();
        convex_hull(&pts).expect("image of a valid polygon")
    }

    /// Arithmetic genus of a curve with this Newton polygon: `I(P)`.
    pub fn genus(&self) -> Result<i64, GeometryError> {
        if self.dim() < 2 {
            return Err(GeometryError::DegeneratePolygon);
        }
        let c = self.counts();
        assert_eq!(c.volume2 + 2 - c.total, c.interior);
        Ok(c.interior)
    }

    /// `#(P) <= 3 I(P) + 7`, defined only when `I(P) > 0`.
    pub fn scott_check(&self) -> Result<bool, GeometryError> {
        let c = self.counts();
        if c.interior == 0 {
            return Err(GeometryError::NotApplicable);
        }
        Ok(c.total <= 3 * c.interior + 7)
    }

    /// Translation placing the polygon in `[0, q-2]^2`, if the bounding box allows it.
    pub fn fits_in_box(&self, q: u32) -> Option<LatticePoint> {
        let (lo, hi) = self.bounding_box();
        let side = q as i64 - 2;
        (hi.x - lo.x <= side && hi.y - lo.y <= side).then(|| -lo)
    }
}

/// Pointwise sum of two polygons, by merging their angle-sorted edge sequences.
pub fn minkowski_sum(a: &LatticePolygon, b: &LatticePolygon) -> Result<LatticePolygon, GeometryError> {
    let mut edges = a.edge_vectors();
    edges.extend(b.edge_vectors());
    edges.sort_by(|u, v| angle_cmp(*u, *v));
    let mut cur = a.bottom_left() + b.bottom_left();
    let mut walk = vec![cur];
    for e in edges {
        cur = cur + e;
        walk.push(cur);
    }
    convex_hull(&walk)
}

/// Sum of several polygons; the empty sum is the origin.
pub fn minkowski_sum_all<'a, I>(parts: I) -> Result<LatticePolygon, GeometryError>
where
    I: IntoIterator<Item = &'a LatticePolygon>,
{
    parts
        .into_iter()
        .try_fold(LatticePolygon::point(LatticePoint::ORIGIN), |acc, p| {
            minkowski_sum(&acc, p)
        })
}

/// `x -> M x + t` with `det M = +/-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnimodularAffineMap {
    matrix: [[i64; 2]; 2],
    translation: LatticePoint,
}

impl UnimodularAffineMap {
    pub fn new(matrix: [[i64; 2]; 2], translation: LatticePoint) -> Result<Self, GeometryError> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(GeometryError::NotUnimodular(det));
        }
        Ok(UnimodularAffineMap { matrix, translation })
    }

    pub fn identity() -> Self {
        UnimodularAffineMap {
            matrix: [[1, 0], [0, 1]],
            translation: LatticePoint::ORIGIN,
        }
    }

    pub fn translation(t: LatticePoint) -> Self {
        UnimodularAffineMap {
            matrix: [[1, 0], [0, 1]],
            translation: t,
        }
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn offset(&self) -> LatticePoint {
        self.translation
    }

    pub fn det(&self) -> i64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    pub fn apply(&self, p: LatticePoint) -> LatticePoint {
        let m = &self.matrix;
        LatticePoint::new(
            m[0][0] * p.x + m[0][1] * p.y + self.translation.x,
            m[1][0] * p.x + m[1][1] * p.y + self.translation.y,
        )
    }

    pub fn apply_linear(&self, p: LatticePoint) -> LatticePoint {
        self.apply(p) - self.translation
    }

    pub fn inverse(&self) -> Self {
        let m = &self.matrix;
        let d = self.det();
        let inv = [[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]];
        let lin = UnimodularAffineMap {
            matrix: inv,
            translation: LatticePoint::ORIGIN,
        };
        let t = lin.apply(self.translation);
        UnimodularAffineMap {
            matrix: inv,
            translation: -t,
        }
    }
}

/// A unimodular affine map taking `a` onto `b`, if one exists.
///
/// One edge of `a` is anchored to every edge of `b` in both orientations; the
/// linear part is then forced, and the candidate is accepted if it is
/// integral, unimodular and maps the vertex set onto `b`'s.
pub fn lattice_equivalence(a: &LatticePolygon, b: &LatticePolygon) -> Option<UnimodularAffineMap> {
    if a.dim() != b.dim() || a.vertices.len() != b.vertices.len() || a.counts() != b.counts() {
        return None;
    }
    match a.dim() {
        0 => Some(UnimodularAffineMap::translation(b.vertices[0] - a.vertices[0])),
        1 => {
            let (u, _) = (a.vertices[1] - a.vertices[0]).primitive();
            let (w, _) = (b.vertices[1] - b.vertices[0]).primitive();
            let basis_u = complete_basis(u);
            let basis_w = complete_basis(w);
            // M = W U^{-1}, where U has det 1
            let ui = [[basis_u[1][1], -basis_u[0][1]], [-basis_u[1][0], basis_u[0][0]]];
            let m = mat_mul(basis_w, ui);
            let lin = UnimodularAffineMap::new(m, LatticePoint::ORIGIN).ok()?;
            let t = b.vertices[0] - lin.apply(a.vertices[0]);
            Some(UnimodularAffineMap::new(m, t).ok()?)
        }
        _ => {
            let n = a.vertices.len();
            let a0 = a.vertices[0];
            let c1 = a.vertices[1] - a0;
            let c2 = a.vertices[n - 1] - a0;
            let det_a = c1.x * c2.y - c2.x * c1.y;
            for j in 0..n {
                let bj = b.vertices[j];
                let next = b.vertices[(j + 1) % n] - bj;
                let prev = b.vertices[(j + n - 1) % n] - bj;
                for (d1, d2) in [(next, prev), (prev, next)] {
                    // M [c1 c2] = [d1 d2]  =>  M = [d1 d2] adj([c1 c2]) / det
                    let num = [
                        [d1.x * c2.y - d2.x * c1.y, -d1.x * c2.x + d2.x * c1.x],
                        [d1.y * c2.y - d2.y * c1.y, -d1.y * c2.x + d2.y * c1.x],
                    ];
                    if num.iter().flatten().any(|v| v % det_a != 0) {
                        continue;
                    }
                    let m = [
                        [num[0][0] / det_a, num[0][1] / det_a],
                        [num[1][0] / det_a, num[1][1] / det_a],
                    ];
                    let Ok(lin) = UnimodularAffineMap::new(m, LatticePoint::ORIGIN) else {
                        continue;
                    };
                    let t = bj - lin.apply(a0);
                    let map = UnimodularAffineMap::new(m, t).ok()?;
                    if a.apply_map(&map) == *b {
                        return Some(map);
                    }
                }
            }
            None
        }
    }
}

fn complete_basis(u: LatticePoint) -> [[i64; 2]; 2] {
    // columns (u, v) with det = u.x v.y - u.y v.x = 1
    let (_, s, t) = ext_gcd(u.x, u.y);
    // u.x s + u.y t = 1  =>  v = (-t, s)
    [[u.x, -t], [u.y, s]]
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// `conv{(0,0),(a,0),(0,a)}`.
pub fn standard_triangle(a: i64) -> LatticePolygon {
    LatticePolygon::from_points(&[(0, 0), (a, 0), (0, a)])
}
