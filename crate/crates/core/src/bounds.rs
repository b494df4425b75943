//! Closed-form distances for special polygon families, upper and lower bounds
//! from Minkowski decompositions, and the Hasse-Weil interval.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::code::{
    build_code, count_torus_zeros, min_distance_exact, search_size, CodeError, SearchOptions, SectionPoly,
};
use crate::decomp::{best_subpolygon_decomposition, DecompError, MinkowskiDecomposition};
use crate::field::{FieldElement, FieldSpec};
use crate::polygon::{lattice_equivalence, LatticePoint, LatticePolygon};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("polygon does not fit in the box for q = {q}")]
    FieldTooSmall { q: u32 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no decomposition with a nontrivial summand")]
    NoDecomposition,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

type Result<T> = std::result::Result<T, BoundsError>;

fn poly(pts: &[(i64, i64)]) -> LatticePolygon {
    LatticePolygon::from_points(pts)
}

fn fit(p: &LatticePolygon, q: u32) -> Result<()> {
    p.fits_in_box(q).map(|_| ()).ok_or(BoundsError::FieldTooSmall { q })
}

fn sq(q: u32) -> i64 {
    let m = q as i64 - 1;
    m * m
}

/// `(q-1)^2 - t (q-1)`.
fn lines(q: u32, t: i64) -> i64 {
    let m = q as i64 - 1;
    m * m - t * m
}

pub fn segment_polygon(a: i64) -> LatticePolygon {
    poly(&[(0, 0), (a, 0)])
}

/// `conv{(0,0), (a,0), (b,c)}`.
pub fn triangle_polygon(a: i64, b: i64, c: i64) -> LatticePolygon {
    poly(&[(0, 0), (a, 0), (b, c)])
}

pub fn rectangle_polygon(d: i64, e: i64) -> LatticePolygon {
    poly(&[(0, 0), (d, 0), (0, e), (d, e)])
}

/// `conv{(0,0), (d,0), (0,e), (d, e + r d)}`.
pub fn hirzebruch_polygon(d: i64, e: i64, r: i64) -> LatticePolygon {
    poly(&[(0, 0), (d, 0), (0, e), (d, e + r * d)])
}

/// Length-`a` segment: `(q-1)^2 - a (q-1)`.
pub fn d_segment(a: i64, q: u32) -> Result<i64> {
    if a < 0 {
        return Err(BoundsError::HypothesisViolated("a >= 0".into()));
    }
    fit(&segment_polygon(a), q)?;
    Ok(lines(q, a))
}

/// `conv{(0,0),(a,0),(b,c)}` with `a >= b + c`: `(q-1)^2 - a (q-1)`.
pub fn d_triangle(a: i64, b: i64, c: i64, q: u32) -> Result<i64> {
    if b < 0 || c < 0 || a < b + c {
        return Err(BoundsError::HypothesisViolated("a >= b + c, b, c >= 0".into()));
    }
    fit(&triangle_polygon(a, b, c), q)?;
    Ok(lines(q, a))
}

/// `conv{(0,0),(a,0),(0,a)}`.
pub fn d_full_triangle(a: i64, q: u32) -> Result<i64> {
    if a < 0 {
        return Err(BoundsError::HypothesisViolated("a >= 0".into()));
    }
    fit(&triangle_polygon(a, 0, a), q)?;
    Ok(lines(q, a))
}

/// `d x e` rectangle: `(q-1)^2 - (d+e)(q-1) + de`.
pub fn d_rectangle(d: i64, e: i64, q: u32) -> Result<i64> {
    if d < 0 || e < 0 {
        return Err(BoundsError::HypothesisViolated("d, e >= 0".into()));
    }
    fit(&rectangle_polygon(d, e), q)?;
    Ok(lines(q, d + e) + d * e)
}

/// `(q-1)^2 - (rd + e)(q-1)` for `r >= 1`; `r = 0` is the rectangle.
pub fn d_hirzebruch(d: i64, e: i64, r: i64, q: u32) -> Result<i64> {
    if r == 0 {
        return d_rectangle(d, e, q);
    }
    if d < 0 || e < 0 || r < 0 {
        return Err(BoundsError::HypothesisViolated("d, e, r >= 0".into()));
    }
    fit(&hirzebruch_polygon(d, e, r), q)?;
    Ok(lines(q, r * d + e))
}

/// The four smooth rank-3 families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rank3Case {
    I,
    II,
    III,
    IV,
}

impl Rank3Case {
    pub const ALL: [Rank3Case; 4] = [Rank3Case::I, Rank3Case::II, Rank3Case::III, Rank3Case::IV];
}

impl fmt::Display for Rank3Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rank3Case::I => "I",
            Rank3Case::II => "II",
            Rank3Case::III => "III",
            Rank3Case::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for Rank3Case {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Rank3Case::I),
            "II" | "2" => Ok(Rank3Case::II),
            "III" | "3" => Ok(Rank3Case::III),
            "IV" | "4" => Ok(Rank3Case::IV),
            _ => Err(format!("unknown case {s:?}")),
        }
    }
}

/// Pentagon of the given family with edge-length parameters `a, b, c, r`.
///
/// * I: bottom edge `r(a+b)+b+c`, then edges of lengths `a+b`, `c`, `b`, `a`.
/// * II: bottom edge `c+(r-1)a+rb`, then `a+b`, `c`, `b`, `a` with a corner cut of normal `(-1,-1)`.
/// * III: the triangle of side `2b+c-a` with two corners cut; needs `b > a`.
/// * IV: the mirror image of I across its short edges.
pub fn rank3_polygon(case: Rank3Case, a: i64, b: i64, c: i64, r: i64) -> Result<LatticePolygon> {
    if a < 1 || b < 1 || c < 1 || r < 1 {
        return Err(BoundsError::HypothesisViolated("a, b, c, r >= 1".into()));
    }
    let p = match case {
        Rank3Case::I => {
            let w = r * (a + b) + b + c;
            poly(&[(0, 0), (w, 0), (b + c, a + b), (b, a + b), (0, a)])
        }
        Rank3Case::II => {
            let w = c + (r - 1) * a + r * b;
            poly(&[(a, 0), (a + w, 0), (c, a + b), (0, a + b), (0, a)])
        }
        Rank3Case::III => {
            if b <= a {
                return Err(BoundsError::HypothesisViolated("case III needs b > a".into()));
            }
            let n = 2 * b + c - a;
            poly(&[(2 * b - a, 0), (n, 0), (0, n), (0, b), (a, b - a)])
        }
        Rank3Case::IV => {
            let w = r * (a + b) + b + c;
            poly(&[(0, 0), (w, 0), (r * b + b + c, a), (c, a + b), (0, a + b)])
        }
    };
    Ok(p)
}

/// Closed-form distance of a rank-3 family code, with the polygon it refers to.
pub fn rank3_family_distance(case: Rank3Case, a: i64, b: i64, c: i64, r: i64, q: u32) -> Result<(i64, LatticePolygon)> {
    let p = rank3_polygon(case, a, b, c, r)?;
    fit(&p, q)?;
    let t = match case {
        Rank3Case::I | Rank3Case::IV => c + r * a + (r + 1) * b,
        Rank3Case::II => (a + b).max(c + (r - 1) * a + r * b),
        Rank3Case::III => 2 * b + c - a,
    };
    Ok((lines(q, t), p))
}

/// A polygon family with a closed-form distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClosedForm {
    Segment {
        a: i64,
    },
    Triangle {
        a: i64,
        b: i64,
        c: i64,
    },
    FullTriangle {
        a: i64,
    },
    Rectangle {
        d: i64,
        e: i64,
    },
    Hirzebruch {
        d: i64,
        e: i64,
        r: i64,
    },
    Rank3 {
        case: Rank3Case,
        a: i64,
        b: i64,
        c: i64,
        r: i64,
    },
}

impl ClosedForm {
    pub fn polygon(&self) -> Result<LatticePolygon> {
        Ok(match *self {
            ClosedForm::Segment { a } => segment_polygon(a),
            ClosedForm::Triangle { a, b, c } => triangle_polygon(a, b, c),
            ClosedForm::FullTriangle { a } => triangle_polygon(a, 0, a),
            ClosedForm::Rectangle { d, e } => rectangle_polygon(d, e),
            ClosedForm::Hirzebruch { d, e, r } => hirzebruch_polygon(d, e, r),
            ClosedForm::Rank3 { case, a, b, c, r } => rank3_polygon(case, a, b, c, r)?,
        })
    }

    pub fn distance(&self, q: u32) -> Result<i64> {
        match *self {
            ClosedForm::Segment { a } => d_segment(a, q),
            ClosedForm::Triangle { a, b, c } => d_triangle(a, b, c, q),
            ClosedForm::FullTriangle { a } => d_full_triangle(a, q),
            ClosedForm::Rectangle { d, e } => d_rectangle(d, e, q),
            ClosedForm::Hirzebruch { d, e, r } => d_hirzebruch(d, e, r, q),
            ClosedForm::Rank3 { case, a, b, c, r } => rank3_family_distance(case, a, b, c, r, q).map(|v| v.0),
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Segment { a } => write!(f, "segment a={a}"),
            ClosedForm::Triangle { a, b, c } => write!(f, "triangle a={a} b={b} c={c}"),
            ClosedForm::FullTriangle { a } => write!(f, "full triangle a={a}"),
            ClosedForm::Rectangle { d, e } => write!(f, "rectangle d={d} e={e}"),
            ClosedForm::Hirzebruch { d, e, r } => write!(f, "hirzebruch d={d} e={e} r={r}"),
            ClosedForm::Rank3 { case, a, b, c, r } => {
                write!(f, "rank-3 case {case} a={a} b={b} c={c} r={r}")
            }
        }
    }
}

/// Family members with exactly `points` lattice points, up to parameter
/// bounds implied by that count.
fn family_members(points: i64) -> Vec<ClosedForm> {
    let n = points;
    let mut out = Vec::new();
    for a in 1..n {
        out.push(ClosedForm::Segment { a });
        out.push(ClosedForm::FullTriangle { a });
        for b in 0..=a {
            for c in 1..=a - b {
                out.push(ClosedForm::Triangle { a, b, c });
            }
        }
    }
    for d in 1..n {
        for e in 1..n {
            if (d + 1) * (e + 1) <= n {
                out.push(ClosedForm::Rectangle { d, e });
            }
            for r in 1..n {
                if (d + 1) * (e + 1) + r * d * (d + 1) / 2 > n {
                    break;
                }
                out.push(ClosedForm::Hirzebruch { d, e, r });
            }
        }
    }
    for case in Rank3Case::ALL {
        for a in 1..n {
            for b in 1..n {
                for c in 1..n {
                    for r in 1..n {
                        let base = match case {
                            Rank3Case::I | Rank3Case::IV => r * (a + b) + b + c,
                            Rank3Case::II => c + (r - 1) * a + r * b,
                            Rank3Case::III => 2 * b + c - a,
                        };
                        // the bottom edge alone holds base + 1 points
                        if base + 1 > n {
                            break;
                        }
                        if case == Rank3Case::III && (b <= a || r > 1) {
                            continue;
                        }
                        out.push(ClosedForm::Rank3 { case, a, b, c, r });
                    }
                }
            }
        }
    }
    out
}

/// Closed-form families lattice equivalent to `p`.
pub fn recognize_closed_forms(p: &LatticePolygon) -> Vec<ClosedForm> {
    if p.dim() == 0 {
        return Vec::new();
    }
    let target = p.counts();
    let nv = p.vertices().len();
    family_members(target.total)
        .into_iter()
        .filter(|f| {
            let Ok(g) = f.polygon() else { return false };
            g.vertices().len() == nv && g.counts() == target && lattice_equivalence(&g, p).is_some()
        })
        .collect()
}

/// `sum d_i - (ell - 1)(q-1)^2`, valid when the summands' zero sets are disjoint.
pub fn upper_bound_from_decomposition(dec: &MinkowskiDecomposition, q: u32, component_distances: &[i64]) -> i64 {
    assert_eq!(dec.summands.len(), component_distances.len());
    let ell = component_distances.len() as i64;
    component_distances.iter().sum::<i64>() - (ell - 1) * sq(q)
}

/// A section with many torus zeros supported on a polygon.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSection {
    pub section: SectionPoly,
    pub zeros: usize,
    /// True when the maximum was not established by exhaustive search.
    pub heuristic: bool,
}

/// Default cap on the codewords searched per summand in [`max_zero_section`].
pub const SECTION_BUDGET: u64 = 20_000_000;

/// Products `x^base prod_j (x^w - xi^j)` along the longest lattice segment of
/// each small primitive direction `w` inside `p`.
pub fn split_sections(p: &LatticePolygon, field: &FieldSpec) -> Vec<SectionPoly> {
    let pts = p.lattice_points();
    let mut out = Vec::new();
    for x in -2i64..=2 {
        for y in 0i64..=2 {
            let w = LatticePoint::new(x, y);
            if (y == 0 && x <= 0) || w.primitive().1 != 1 {
                continue;
            }
            let mut best: Option<(i64, LatticePoint)> = None;
            for &base in &pts {
                let mut t = 0;
                while p.contains(base + w.scale(t + 1)) {
                    t += 1;
                }
                if t > 0 && best.is_none_or(|(bt, _)| t > bt) {
                    best = Some((t, base));
                }
            }
            let Some((t, base)) = best else { continue };
            let mut s = SectionPoly::monomial(base, FieldElement::ONE);
            for j in 0..t {
                let factor = SectionPoly::from_terms(
                    field,
                    [
                        (w, FieldElement::ONE),
                        (LatticePoint::ORIGIN, field.neg(field.xi_pow(j))),
                    ],
                );
                s = s.mul(&factor, field);
            }
            out.push(s);
        }
    }
    out
}

/// A section on `pi` with the most torus zeros: exact by exhaustive search
/// when the search fits in `budget` codewords, otherwise the best split form.
pub fn max_zero_section(
    pi: &LatticePolygon,
    field: &FieldSpec,
    budget: u64,
    options: &SearchOptions,
) -> Result<ZeroSection> {
    fit(pi, field.order())?;
    if pi.dim() == 0 {
        return Ok(ZeroSection {
            section: SectionPoly::monomial(pi.first_vertex(), FieldElement::ONE),
            zeros: 0,
            heuristic: false,
        });
    }
    let code = build_code(pi, field)?;
    if search_size(&code) <= budget {
        let opts = SearchOptions {
            checkpoint: None,
            ..options.clone()
        };
        let md = min_distance_exact(&code, &opts)?;
        let section = code.section_of(&md.witness).expect("witness is a codeword");
        return Ok(ZeroSection {
            section,
            zeros: code.n() - md.distance,
            heuristic: false,
        });
    }
    let best = split_sections(pi, field)
        .into_iter()
        .map(|s| {
            let z = count_torus_zeros(&s, field);
            (z, s)
        })
        .max_by_key(|(z, _)| *z)
        .expect("a polygon of positive dimension has a segment");
    Ok(ZeroSection {
        section: best.1,
        zeros: best.0,
        heuristic: true,
    })
}

/// An upper bound on `d` realized by the codeword of `witness`.
#[derive(Debug, Clone, Serialize)]
pub struct CertifiedBound {
    pub value: i64,
    pub zeros: usize,
    pub witness: SectionPoly,
    /// Index into the decompositions used, or `None` for a split section of the whole polygon.
    pub decomposition: Option<usize>,
}

/// Zero positions of `s` as `i * (q-1) + j` for torus point `(xi^i, xi^j)`.
fn zero_set(s: &SectionPoly, field: &FieldSpec) -> Vec<usize> {
    s.evaluate_on_torus(field)
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// `s(xi^u x, xi^v y)`, whose zeros are those of `s` shifted by `(-u, -v)`.
fn rescale(s: &SectionPoly, field: &FieldSpec, u: i64, v: i64) -> SectionPoly {
    SectionPoly::from_terms(
        field,
        s.terms()
            .map(|(e, c)| (e, field.mul(c, field.xi_pow(u * e.x + v * e.y)))),
    )
}

/// Candidate sections for one summand: the max-zero section plus split forms
/// reaching the same count.
fn section_pool(
    pi: &LatticePolygon,
    field: &FieldSpec,
    budget: u64,
    options: &SearchOptions,
) -> Result<Vec<(SectionPoly, Vec<usize>)>> {
    let best = max_zero_section(pi, field, budget, options)?;
    let mut pool = vec![(best.section.clone(), zero_set(&best.section, field))];
    for s in split_sections(pi, field) {
        let z = zero_set(&s, field);
        if z.len() == best.zeros && s != best.section {
            pool.push((s, z));
        }
    }
    Ok(pool)
}

/// Builds product sections along each decomposition, rescaling factors so
/// their zero sets overlap as little as possible, and counts the zeros of the
/// product exactly. Split sections of `p` itself are also tried.
pub fn certified_upper_bound(
    p: &LatticePolygon,
    field: &FieldSpec,
    decs: &[MinkowskiDecomposition],
    budget: u64,
    options: &SearchOptions,
) -> Result<CertifiedBound> {
    let q = field.order();
    fit(p, q)?;
    let m = q as usize - 1;
    let mut best = CertifiedBound {
        value: sq(q),
        zeros: 0,
        witness: SectionPoly::monomial(p.first_vertex(), FieldElement::ONE),
        decomposition: None,
    };
    if p.dim() > 0 {
        for s in split_sections(p, field) {
            let z = count_torus_zeros(&s, field);
            if z > best.zeros {
                best = CertifiedBound {
                    value: sq(q) - z as i64,
                    zeros: z,
                    witness: s,
                    decomposition: None,
                };
            }
        }
    }
    let mut pools: BTreeMap<LatticePolygon, Vec<(SectionPoly, Vec<usize>)>> = BTreeMap::new();
    for (di, dec) in decs.iter().enumerate() {
        for s in &dec.summands {
            if !pools.contains_key(s) {
                pools.insert(s.clone(), section_pool(s, field, budget, options)?);
            }
        }
        let mut order: Vec<&LatticePolygon> = dec.summands.iter().collect();
        order.sort_by_key(|s| std::cmp::Reverse(pools[*s][0].1.len()));
        let mut covered = vec![false; m * m];
        let mut product = SectionPoly::monomial(dec.translation, FieldElement::ONE);
        for s in order {
            // (gain, pool index, u, v), first maximum wins
            let mut pick = (0usize, 0usize, 0usize, 0usize);
            let mut found = false;
            for (pi, (_, zs)) in pools[s].iter().enumerate() {
                for u in 0..m {
                    for v in 0..m {
                        let gain = zs
                            .iter()
                            .filter(|&&z| {
                                let (i, j) = (z / m, z % m);
                                !covered[((i + m - u) % m) * m + (j + m - v) % m]
                            })
                            .count();
                        if !found || gain > pick.0 {
                            pick = (gain, pi, u, v);
                            found = true;
                        }
                    }
                }
            }
            let (_, pi, u, v) = pick;
            let (sec, zs) = &pools[s][pi];
            for &z in zs {
                let (i, j) = (z / m, z % m);
                covered[((i + m - u) % m) * m + (j + m - v) % m] = true;
            }
            product = product.mul(&rescale(sec, field, u as i64, v as i64), field);
        }
        let zeros = count_torus_zeros(&product, field);
        debug_assert_eq!(zeros, covered.iter().filter(|&&c| c).count());
        if let Some(np) = product.newton_polygon() {
            assert!(p.contains_polygon(&np), "product section leaves the polygon");
        }
        if zeros > best.zeros {
            best = CertifiedBound {
                value: sq(q) - zeros as i64,
                zeros,
                witness: product,
                decomposition: Some(di),
            };
        }
    }
    Ok(best)
}

fn isqrt(n: u128) -> u128 {
    n.isqrt()
}

/// Integer range allowed by `|N - (q+1)| <= 2 g sqrt(q)`, with the lower
/// end clamped at zero.
pub fn hasse_weil_interval(g: u64, q: u64) -> (u64, u64) {
    let t = isqrt(4 * (g as u128) * (g as u128) * (q as u128));
    let center = q as u128 + 1;
    let low = center.saturating_sub(t);
    let high = center + t;
    (low as u64, high as u64)
}

/// Lower bound from maximal decompositions.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub value: i64,
    pub ell: usize,
    /// Whether the field is large enough for the bound to be proven.
    pub applicable: bool,
    /// `(4 I(P) + 3)^2`.
    pub threshold: u64,
    /// `#(P) + ell`, present when every summand has no interior points.
    pub relaxed_threshold: Option<u64>,
    /// Whether every summand distance came from an exhaustive search.
    pub exact_components: bool,
}

/// `min over maximal decompositions of sum d(C_{P_i}) - (ell-1)(q-1)^2`.
pub fn decomposition_lower_bound(
    p: &LatticePolygon,
    field: &FieldSpec,
    decs: &[MinkowskiDecomposition],
    budget: u64,
    options: &SearchOptions,
) -> Result<LowerBound> {
    let q = field.order();
    let ell = decs.iter().map(|d| d.ell).max().unwrap_or(0);
    if ell < 1 {
        return Err(BoundsError::NoDecomposition);
    }
    let mut dist: BTreeMap<&LatticePolygon, (i64, bool)> = BTreeMap::new();
    let mut value = i64::MAX;
    for dec in decs.iter().filter(|d| d.ell == ell) {
        let mut comps = Vec::with_capacity(ell);
        for s in &dec.summands {
            if !dist.contains_key(s) {
                let z = max_zero_section(s, field, budget, options)?;
                dist.insert(s, (sq(q) - z.zeros as i64, !z.heuristic));
            }
            comps.push(dist[s].0);
        }
        value = value.min(upper_bound_from_decomposition(dec, q, &comps));
    }
    let interior = p.counts().interior as u64;
    let threshold = (4 * interior + 3).pow(2);
    let relaxed_threshold = dist
        .keys()
        .all(|s| s.counts().interior == 0)
        .then(|| p.counts().total as u64 + ell as u64);
    let exact_components = dist.values().all(|v| v.1);
    let applicable = exact_components && (q as u64 >= threshold || relaxed_threshold.is_some_and(|t| q as u64 > t));
    Ok(LowerBound {
        value,
        ell,
        applicable,
        threshold,
        relaxed_threshold,
        exact_components,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Upper,
    Lower,
    ExactFormula,
    Exact,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Decomposition(MinkowskiDecomposition),
    Section { section: SectionPoly, zeros: usize },
    Family(ClosedForm),
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub kind: BoundKind,
    pub value: i64,
    /// Whether the value is proven for this polygon and field.
    pub applicable: bool,
    /// Reported below its field-size threshold; not checked against other entries.
    pub conditional: bool,
    /// Depends on an unchecked hypothesis; not checked against other entries.
    pub hypothetical: bool,
    pub provenance: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub polygon: LatticePolygon,
    pub q: u32,
    pub points: i64,
    pub interior: i64,
    pub hasse_weil: (u64, u64),
    pub ell: usize,
    pub exhaustive_decomposition: bool,
    pub exact_d: Option<usize>,
    pub entries: Vec<BoundEntry>,
    /// Broken consistency checks; empty when the report is coherent.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub exact: bool,
    pub decomposition_budget: usize,
    pub section_budget: u64,
    pub search: SearchOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            exact: false,
            decomposition_budget: crate::decomp::DEFAULT_BUDGET,
            section_budget: SECTION_BUDGET,
            search: SearchOptions::default(),
        }
    }
}

fn entry(name: &str, kind: BoundKind, value: i64, provenance: &str) -> BoundEntry {
    BoundEntry {
        name: name.into(),
        kind,
        value,
        applicable: true,
        conditional: false,
        hypothetical: false,
        provenance: provenance.into(),
        witness: None,
    }
}

/// Every bound the library knows for `C_P(F_q)`, checked for consistency.
pub fn full_report(p: &LatticePolygon, field: &FieldSpec, options: &ReportOptions) -> Result<BoundReport> {
    let q = field.order();
    fit(p, q)?;
    let counts = p.counts();
    let n = sq(q);
    let mut entries = Vec::new();

    for form in recognize_closed_forms(p) {
        if let Ok(v) = form.distance(q) {
            let mut e = entry("closed-form", BoundKind::ExactFormula, v, &form.to_string());
            e.witness = Some(Witness::Family(form));
            entries.push(e);
        }
    }

    entries.push(entry("singleton", BoundKind::Upper, n - counts.total + 1, "n - k + 1"));

    let mut ell = 0;
    let mut exhaustive = true;
    if p.dim() > 0 {
        let decs = best_subpolygon_decomposition(p, options.decomposition_budget)?;
        ell = decs.first().map_or(0, |d| d.ell);
        exhaustive = decs.iter().all(|d| d.exhaustive);

        let cert = certified_upper_bound(p, field, &decs, options.section_budget, &options.search)?;
        let mut e = entry(
            "certified",
            BoundKind::Upper,
            cert.value,
            "weight of an explicit product section",
        );
        e.witness = Some(Witness::Section {
            section: cert.witness,
            zeros: cert.zeros,
        });
        entries.push(e);

        if !decs.is_empty() {
            let mut best_formula: Option<(i64, &MinkowskiDecomposition)> = None;
            let mut comps_cache: BTreeMap<&LatticePolygon, i64> = BTreeMap::new();
            for dec in &decs {
                let mut comps = Vec::new();
                for s in &dec.summands {
                    if !comps_cache.contains_key(s) {
                        let z = max_zero_section(s, field, options.section_budget, &options.search)?;
                        comps_cache.insert(s, n - z.zeros as i64);
                    }
                    comps.push(comps_cache[s]);
                }
                let v = upper_bound_from_decomposition(dec, q, &comps);
                if best_formula.is_none_or(|(b, _)| v < b) {
                    best_formula = Some((v, dec));
                }
            }
            if let Some((v, dec)) = best_formula {
                let mut e = entry(
                    "decomposition",
                    BoundKind::Upper,
                    v,
                    "sum of summand distances minus (ell-1)(q-1)^2, assuming disjoint zeros",
                );
                e.applicable = false;
                e.hypothetical = true;
                e.witness = Some(Witness::Decomposition(dec.clone()));
                entries.push(e);
            }

            let lb = decomposition_lower_bound(p, field, &decs, options.section_budget, &options.search)?;
            let mut e = entry(
                "decomposition-lower",
                BoundKind::Lower,
                lb.value,
                &format!(
                    "minimum over maximal decompositions; proven for q >= {}{}",
                    lb.threshold,
                    lb.relaxed_threshold.map_or(String::new(), |t| format!(" or q > {t}"))
                ),
            );
            e.applicable = lb.applicable;
            e.conditional = !lb.applicable;
            entries.push(e);
        }
    }

    let mut exact_d = None;
    if options.exact {
        let code = build_code(p, field)?;
        let md = min_distance_exact(&code, &options.search)?;
        exact_d = Some(md.distance);
        let mut e = entry("exact", BoundKind::Exact, md.distance as i64, "exhaustive search");
        if let Some(s) = code.section_of(&md.witness) {
            e.witness = Some(Witness::Section {
                section: s,
                zeros: code.n() - md.distance,
            });
        }
        entries.push(e);
    }

    let violations = check_consistency(&entries, exact_d);
    Ok(BoundReport {
        polygon: p.clone(),
        q,
        points: counts.total,
        interior: counts.interior,
        hasse_weil: hasse_weil_interval(counts.interior as u64, q as u64),
        ell,
        exhaustive_decomposition: exhaustive,
        exact_d,
        entries,
        violations,
    })
}

fn check_consistency(entries: &[BoundEntry], exact: Option<usize>) -> Vec<String> {
    let sound: Vec<&BoundEntry> = entries
        .iter()
        .filter(|e| e.applicable && !e.conditional && !e.hypothetical)
        .collect();
    let uppers = sound
        .iter()
        .filter(|e| matches!(e.kind, BoundKind::Upper | BoundKind::ExactFormula | BoundKind::Exact));
    let lowers: Vec<&&BoundEntry> = sound
        .iter()
        .filter(|e| matches!(e.kind, BoundKind::Lower | BoundKind::ExactFormula | BoundKind::Exact))
        .collect();
    let mut out = Vec::new();
    for u in uppers {
        for l in &lowers {
            if l.value > u.value {
                out.push(format!(
                    "{} ({}) = {} exceeds {} ({}) = {}",
                    l.name, l.provenance, l.value, u.name, u.provenance, u.value
                ));
            }
        }
    }
    if let Some(d) = exact {
        for e in entries
            .iter()
            .filter(|e| e.kind == BoundKind::ExactFormula && e.value != d as i64)
        {
            let msg = format!("{} ({}) = {} differs from exact {}", e.name, e.provenance, e.value, d);
            if !out.contains(&msg) {
                out.push(msg);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::hamming_weight;
    use crate::decomp::DEFAULT_BUDGET;

    fn field(q: u32) -> FieldSpec {
        FieldSpec::with_order(q, None).unwrap()
    }

    fn hexagon() -> LatticePolygon {
        poly(&[(1, 0), (2, 0), (0, 1), (1, 2), (3, 2), (3, 3)])
    }

    #[test]
    fn closed_forms() {
        assert_eq!(d_segment(3, 8).unwrap(), 28);
        assert_eq!(d_segment(1, 5).unwrap(), 12);
        assert!(matches!(d_segment(4, 5), Err(BoundsError::FieldTooSmall { q: 5 })));
        assert_eq!(d_triangle(4, 2, 2, 8).unwrap(), 21);
        assert_eq!(d_triangle(2, 1, 1, 5).unwrap(), 8);
        assert!(matches!(
            d_triangle(2, 2, 1, 8),
            Err(BoundsError::HypothesisViolated(_))
        ));
        assert_eq!(d_full_triangle(3, 8).unwrap(), 28);
        assert_eq!(d_rectangle(1, 1, 5).unwrap(), 9);
        assert_eq!(d_rectangle(1, 2, 8).unwrap(), 30);
        assert_eq!(d_rectangle(0, 3, 8).unwrap(), d_segment(3, 8).unwrap());
        assert_eq!(d_hirzebruch(1, 1, 1, 7).unwrap(), 24);
        assert_eq!(d_hirzebruch(1, 2, 1, 8).unwrap(), 28);
        assert_eq!(d_hirzebruch(2, 1, 0, 7).unwrap(), d_rectangle(2, 1, 7).unwrap());
    }

    #[test]
    fn rank3_values() {
        assert_eq!(rank3_family_distance(Rank3Case::I, 1, 1, 1, 1, 7).unwrap().0, 12);
        assert_eq!(rank3_family_distance(Rank3Case::IV, 1, 1, 1, 1, 8).unwrap().0, 21);
        assert!(matches!(
            rank3_family_distance(Rank3Case::III, 2, 1, 1, 1, 8),
            Err(BoundsError::HypothesisViolated(_))
        ));
        for case in Rank3Case::ALL {
            let (a, b, c, r) = if case == Rank3Case::III {
                (1, 2, 1, 1)
            } else {
                (1, 1, 1, 1)
            };
            let p = rank3_polygon(case, a, b, c, r).unwrap();
            assert_eq!(p.vertices().len(), 5);
            // smooth: unimodular cones at every vertex
            let e = p.primitive_edges();
            for i in 0..5 {
                let (u, v) = (e[i].0, e[(i + 1) % 5].0);
                assert_eq!((u.x * v.y - u.y * v.x).abs(), 1, "case {case}");
            }
            assert!(
                recognize_closed_forms(&p)
                    .iter()
                    .filter(|f| matches!(f, ClosedForm::Rank3 { .. }))
                    .count()
                    >= 1
            );
        }
    }

    #[test]
    fn recognition_up_to_equivalence() {
        let seg = poly(&[(1, 1), (4, 4)]);
        assert!(recognize_closed_forms(&seg).contains(&ClosedForm::Segment { a: 3 }));
        let sq = poly(&[(0, 0), (1, 1), (0, 1), (-1, 0)]);
        assert!(recognize_closed_forms(&sq).contains(&ClosedForm::Rectangle { d: 1, e: 1 }));
        let h = hirzebruch_polygon(1, 1, 1).translate(LatticePoint::new(2, 3));
        assert!(recognize_closed_forms(&h).contains(&ClosedForm::Hirzebruch { d: 1, e: 1, r: 1 }));
        assert!(recognize_closed_forms(&hexagon()).is_empty());
    }

    #[test]
    fn decomposition_upper_bounds() {
        let q1 = poly(&[(0, 0), (1, 1), (2, 1), (1, 2)]);
        let p = poly(&[(0, 0), (1, 0), (3, 1), (2, 2), (1, 2)]);
        let f8 = field(8);
        let decs = best_subpolygon_decomposition(&p, DEFAULT_BUDGET).unwrap();
        let opts = SearchOptions::default();
        let dist = |s: &LatticePolygon| 49 - max_zero_section(s, &f8, SECTION_BUDGET, &opts).unwrap().zeros as i64;
        let whole = decs.iter().find(|d| d.subpolygon == p).unwrap();
        let comps: Vec<i64> = whole.summands.iter().map(dist).collect();
        assert_eq!(upper_bound_from_decomposition(whole, 8, &comps), 33);
        assert!(whole.summands.contains(&q1));
        let square = decs.iter().find(|d| d.subpolygon.counts().total == 4).unwrap();
        let comps: Vec<i64> = square.summands.iter().map(dist).collect();
        assert_eq!(upper_bound_from_decomposition(square, 8, &comps), 35);
        let single = MinkowskiDecomposition::new(&p, &q1, vec![q1.clone()], true);
        assert_eq!(upper_bound_from_decomposition(&single, 8, &[17]), 17);
    }

    #[test]
    fn max_zero_sections() {
        let f5 = field(5);
        let opts = SearchOptions::default();
        let z = max_zero_section(&poly(&[(0, 0), (1, 0)]), &f5, SECTION_BUDGET, &opts).unwrap();
        assert_eq!((z.zeros, z.heuristic), (4, false));
        let z = max_zero_section(&triangle_polygon(1, 0, 1), &f5, SECTION_BUDGET, &opts).unwrap();
        assert_eq!(z.zeros, 4);
        assert_eq!(count_torus_zeros(&z.section, &f5), 4);
        let z = max_zero_section(&LatticePolygon::point(LatticePoint::new(1, 1)), &f5, 10, &opts).unwrap();
        assert_eq!(z.zeros, 0);
        // over budget: split forms
        let z = max_zero_section(&rectangle_polygon(2, 1), &f5, 10, &opts).unwrap();
        assert!(z.heuristic);
        assert_eq!(z.zeros, 8);
    }

    #[test]
    fn certified_bounds() {
        let opts = SearchOptions::default();
        let f8 = field(8);
        let p = hexagon();
        let decs = best_subpolygon_decomposition(&p, DEFAULT_BUDGET).unwrap();
        let c = certified_upper_bound(&p, &f8, &decs, SECTION_BUDGET, &opts).unwrap();
        assert!(c.value <= 30, "{}", c.value);
        let code = build_code(&p, &f8).unwrap();
        let w = code.evaluate_section(&c.witness).unwrap();
        assert_eq!(hamming_weight(&w) as i64, c.value);

        let six_point_triangle = poly(&[(0, 0), (1, 4), (4, 1)]);
        let decs = best_subpolygon_decomposition(&six_point_triangle, DEFAULT_BUDGET).unwrap();
        let c = certified_upper_bound(&six_point_triangle, &f8, &decs, SECTION_BUDGET, &opts).unwrap();
        assert!(c.value <= 28, "{}", c.value);

        let pt = LatticePolygon::point(LatticePoint::new(2, 2));
        let c = certified_upper_bound(&pt, &f8, &[], SECTION_BUDGET, &opts).unwrap();
        assert_eq!(c.value, 49);
    }

    #[test]
    fn hasse_weil() {
        assert_eq!(hasse_weil_interval(0, 7), (8, 8));
        assert_eq!(hasse_weil_interval(1, 49), (36, 64));
        assert_eq!(hasse_weil_interval(6, 8), (0, 42));
        for q in 2..200 {
            assert_eq!(hasse_weil_interval(0, q), (q + 1, q + 1));
        }
    }

    #[test]
    fn lower_bounds() {
        let opts = SearchOptions::default();
        let p = hexagon();
        let decs = best_subpolygon_decomposition(&p, DEFAULT_BUDGET).unwrap();
        for q in [7u32, 13] {
            let f = field(q);
            let lb = decomposition_lower_bound(&p, &f, &decs, SECTION_BUDGET, &opts).unwrap();
            let m = q as i64 - 1;
            assert_eq!(lb.value, m * m - 3 * m);
            assert_eq!(lb.relaxed_threshold, Some(12));
            assert_eq!(lb.applicable, q > 12);
        }
        let d3 = triangle_polygon(3, 0, 3);
        let decs = best_subpolygon_decomposition(&d3, DEFAULT_BUDGET).unwrap();
        let lb = decomposition_lower_bound(&d3, &field(8), &decs, SECTION_BUDGET, &opts).unwrap();
        assert_eq!(lb.threshold, 49);

        let pentagon = poly(&[(0, 0), (1, 0), (3, 1), (2, 2), (1, 2)]);
        let decs = best_subpolygon_decomposition(&pentagon, DEFAULT_BUDGET).unwrap();
        let lb = decomposition_lower_bound(&pentagon, &field(8), &decs, SECTION_BUDGET, &opts).unwrap();
        assert_eq!((lb.value, lb.applicable), (33, false));
        assert!(matches!(
            decomposition_lower_bound(&pentagon, &field(8), &[], SECTION_BUDGET, &opts),
            Err(BoundsError::NoDecomposition)
        ));
    }

    #[test]
    fn report_hexagon_f7() {
        let opts = ReportOptions {
            exact: true,
            ..Default::default()
        };
        let r = full_report(&hexagon(), &field(7), &opts).unwrap();
        assert_eq!(r.exact_d, Some(20));
        let get = |name: &str| r.entries.iter().find(|e| e.name == name).unwrap();
        assert_eq!(get("certified").value, 20);
        let lower = get("decomposition-lower");
        assert_eq!((lower.value, lower.conditional), (18, true));
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.ell, 3);
    }

    #[test]
    fn report_hirzebruch_matches_exact() {
        let opts = ReportOptions {
            exact: true,
            ..Default::default()
        };
        let r = full_report(&hirzebruch_polygon(1, 1, 1), &field(7), &opts).unwrap();
        assert_eq!(r.exact_d, Some(24));
        assert!(r
            .entries
            .iter()
            .any(|e| e.kind == BoundKind::ExactFormula && e.value == 24));
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }
}
