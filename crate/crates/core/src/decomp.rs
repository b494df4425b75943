//! Minkowski factorization of lattice polygons and the search for subpolygons
//! with the largest number of nontrivial summands.
//!
//! A lattice polygon is determined up to translation by its multiset of
//! primitive edge directions with multiplicities. Summands correspond to
//! sub-multisets whose vectors sum to zero, so a factorization is a partition
//! of the edge multiset into zero-sum groups.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::polygon::{angle_cmp, convex_hull, minkowski_sum_all, LatticePoint, LatticePolygon};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("a point has no nontrivial Minkowski summands")]
    DegeneratePolygon,
    #[error("candidate budget must be positive")]
    BudgetExceeded,
}

/// Default cap on the number of candidate subpolygons.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Edge multiset of a polygon: primitive directions in angle order with lengths.
#[derive(Debug, Clone)]
struct EdgeMultiset {
    dirs: Vec<LatticePoint>,
    mults: Vec<i64>,
}

impl EdgeMultiset {
    fn of(q: &LatticePolygon) -> Self {
        let mut merged: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for (d, m) in q.primitive_edges() {
            *merged.entry((d.x, d.y)).or_insert(0) += m;
        }
        let mut pairs: Vec<(LatticePoint, i64)> = merged
            .into_iter()
            .map(|((x, y), m)| (LatticePoint::new(x, y), m))
            .collect();
        pairs.sort_by(|a, b| angle_cmp(a.0, b.0));
        EdgeMultiset {
            dirs: pairs.iter().map(|p| p.0).collect(),
            mults: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// All nonzero `c <= mults` with `sum c_i d_i = 0`.
    fn zero_sum_groups(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.dirs.len()];
        self.groups_rec(0, LatticePoint::ORIGIN, &mut cur, &mut out);
        out
    }

    fn groups_rec(&self, i: usize, acc: LatticePoint, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == self.dirs.len() {
            if acc == LatticePoint::ORIGIN && cur.iter().any(|&c| c > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for c in 0..=self.mults[i] {
            cur[i] = c;
            self.groups_rec(i + 1, acc + self.dirs[i].scale(c), cur, out);
        }
        cur[i] = 0;
    }

    /// Polygon with the group's edges, normalized to start at the origin.
    fn polygon(&self, group: &[i64]) -> LatticePolygon {
        let mut cur = LatticePoint::ORIGIN;
        let mut walk = vec![cur];
        for (d, &c) in self.dirs.iter().zip(group) {
            if c > 0 {
                cur = cur + d.scale(c);
                walk.push(cur);
            }
        }
        convex_hull(&walk).expect("closed edge walk").normalized()
    }
}

/// Enumerates partitions of `remaining` into groups with nondecreasing index,
/// so each multiset partition is produced once.
struct Partitioner<'a> {
    groups: &'a [Vec<i64>],
    max_parts: usize,
    only_best: bool,
    best: usize,
    found: Vec<Vec<usize>>,
}

impl Partitioner<'_> {
    fn run(&mut self, remaining: &mut Vec<i64>, start: usize, parts: &mut Vec<usize>) {
        if remaining.iter().all(|&r| r == 0) {
            if self.only_best {
                match parts.len().cmp(&self.best) {
                    std::cmp::Ordering::Greater => {
                        self.best = parts.len();
                        self.found.clear();
                        self.found.push(parts.clone());
                    }
                    std::cmp::Ordering::Equal => self.found.push(parts.clone()),
                    std::cmp::Ordering::Less => {}
                }
            } else {
                self.found.push(parts.clone());
            }
            return;
        }
        if parts.len() >= self.max_parts {
            return;
        }
        if self.only_best {
            // every group uses at least two edges
            let left: i64 = remaining.iter().sum();
            if parts.len() + ((left / 2) as usize) < self.best {
                return;
            }
        }
        for idx in start..self.groups.len() {
            let g = &self.groups[idx];
            if g.iter().zip(remaining.iter()).any(|(c, r)| c > r) {
                continue;
            }
            for (r, c) in remaining.iter_mut().zip(g) {
                *r -= c;
            }
            parts.push(idx);
            self.run(remaining, idx, parts);
            parts.pop();
            for (r, c) in remaining.iter_mut().zip(g) {
                *r += c;
            }
        }
    }
}

fn partitions(q: &LatticePolygon, max_parts: usize, only_best: bool) -> Vec<Vec<LatticePolygon>> {
    let edges = EdgeMultiset::of(q);
    let groups = edges.zero_sum_groups();
    let polys: Vec<LatticePolygon> = groups.iter().map(|g| edges.polygon(g)).collect();
    let mut part = Partitioner {
        groups: &groups,
        max_parts,
        only_best,
        best: 0,
        found: Vec::new(),
    };
    let mut remaining = edges.mults.clone();
    part.run(&mut remaining, 0, &mut Vec::new());
    let mut out: Vec<Vec<LatticePolygon>> = part
        .found
        .into_iter()
        .map(|idxs| {
            let mut s: Vec<LatticePolygon> = idxs.into_iter().map(|i| polys[i].clone()).collect();
            s.sort();
            s
        })
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

/// All ways to write `q` (up to translation) as a sum of at most `max_parts`
/// nontrivial summands, most parts first. Summands are normalized so their
/// first canonical vertex is the origin.
pub fn factor_polygon(q: &LatticePolygon, max_parts: usize) -> Result<Vec<Vec<LatticePolygon>>, DecompError> {
    if q.dim() == 0 {
        return Err(DecompError::DegeneratePolygon);
    }
    Ok(partitions(q, max_parts.max(1), false))
}

/// Factorizations of `q` with the largest possible number of summands.
pub fn maximal_factorizations(q: &LatticePolygon) -> Result<Vec<Vec<LatticePolygon>>, DecompError> {
    if q.dim() == 0 {
        return Err(DecompError::DegeneratePolygon);
    }
    Ok(partitions(q, usize::MAX, true))
}

/// `P' = P_1 + ... + P_ell` with `P'` inside a parent polygon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinkowskiDecomposition {
    pub parent: LatticePolygon,
    /// Positioned inside `parent`.
    pub subpolygon: LatticePolygon,
    /// Normalized summands, sorted.
    pub summands: Vec<LatticePolygon>,
    /// `sum(summands) + translation == subpolygon`.
    pub translation: LatticePoint,
    pub ell: usize,
    /// False when the candidate budget cut the subpolygon enumeration short.
    pub exhaustive: bool,
}

impl MinkowskiDecomposition {
    pub fn new(
        parent: &LatticePolygon,
        subpolygon: &LatticePolygon,
        summands: Vec<LatticePolygon>,
        exhaustive: bool,
    ) -> Self {
        assert!(summands.iter().all(|s| s.dim() >= 1), "trivial summand");
        let sum = minkowski_sum_all(&summands).expect("summands are in range");
        let translation = subpolygon.first_vertex() - sum.first_vertex();
        assert_eq!(sum.translate(translation), *subpolygon, "summands do not recompose");
        assert!(parent.contains_polygon(subpolygon), "subpolygon outside parent");
        MinkowskiDecomposition {
            parent: parent.clone(),
            subpolygon: subpolygon.clone(),
            ell: summands.len(),
            summands,
            translation,
            exhaustive,
        }
    }
}

/// Distinct convex lattice subpolygons of `p` (as hulls of subsets of its
/// lattice points), grown one point at a time from single points. Returns
/// the candidates found and whether the enumeration finished within `budget`.
pub fn subpolygons(p: &LatticePolygon, budget: usize) -> (Vec<LatticePolygon>, bool) {
    let pts = p.lattice_points();
    let mut seen: HashSet<LatticePolygon> = HashSet::new();
    let mut queue: VecDeque<LatticePolygon> = VecDeque::new();
    for &pt in &pts {
        let s = LatticePolygon::point(pt);
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    let mut complete = true;
    'bfs: while let Some(g) = queue.pop_front() {
        for &pt in &pts {
            if g.contains(pt) {
                continue;
            }
            let mut verts = g.vertices().to_vec();
            verts.push(pt);
            let h = convex_hull(&verts).expect("points of p");
            if !seen.contains(&h) {
                if seen.len() >= budget {
                    complete = false;
                    break 'bfs;
                }
                seen.insert(h.clone());
                queue.push_back(h);
            }
        }
    }
    let mut out: Vec<LatticePolygon> = seen.into_iter().collect();
    out.sort();
    (out, complete)
}

/// Parallelograms `a [0,u] + b [0,v]` and segments that fit in `p`, for small
/// primitive directions. Used when the exhaustive enumeration is cut off.
fn greedy_candidates(p: &LatticePolygon) -> Vec<LatticePolygon> {
    let pts = p.lattice_points();
    let (lo, hi) = p.bounding_box();
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1);
    let mut dirs = Vec::new();
    for x in -2i64..=2 {
        for y in -2i64..=2 {
            let v = LatticePoint::new(x, y);
            if (x, y) != (0, 0) && v.primitive().1 == 1 && (y > 0 || (y == 0 && x > 0)) {
                dirs.push(v);
            }
        }
    }
    let mut out = BTreeSet::new();
    for (i, &u) in dirs.iter().enumerate() {
        for &v in &dirs[i..] {
            for &base in &pts {
                for a in 1..=span {
                    let end_a = base + u.scale(a);
                    if !p.contains(end_a) {
                        break;
                    }
                    out.insert(LatticePolygon::from_points(&[base, end_a]));
                    if u == v {
                        continue;
                    }
                    for b in 1..=span {
                        let c = base + v.scale(b);
                        let d = end_a + v.scale(b);
                        if !p.contains(c) || !p.contains(d) {
                            break;
                        }
                        out.insert(LatticePolygon::from_points(&[base, end_a, c, d]));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// All decompositions `P' = P_1 + ... + P_ell` with `P' ⊆ P` and `ell`
/// maximal. Ties are all returned; one representative placement is kept per
/// translation class of `P'`.
pub fn best_subpolygon_decomposition(
    p: &LatticePolygon,
    budget: usize,
) -> Result<Vec<MinkowskiDecomposition>, DecompError> {
    if budget == 0 {
        return Err(DecompError::BudgetExceeded);
    }
    let (mut candidates, complete) = subpolygons(p, budget);
    if !complete {
        candidates.extend(greedy_candidates(p));
    }
    // one placement per translation class, the smallest in canonical order
    let mut classes: BTreeMap<LatticePolygon, LatticePolygon> = BTreeMap::new();
    for c in candidates.into_iter().filter(|c| c.dim() >= 1) {
        classes.entry(c.normalized()).or_insert(c);
    }
    let factored: Vec<(LatticePolygon, Vec<Vec<LatticePolygon>>)> = classes
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|sub| {
            let f = maximal_factorizations(&sub).expect("dim >= 1");
            (sub, f)
        })
        .collect();
    let ell = factored
        .iter()
        .filter_map(|(_, f)| f.first().map(|s| s.len()))
        .max()
        .unwrap_or(0);
    let mut out = Vec::new();
    for (sub, facts) in factored {
        for summands in facts.into_iter().filter(|s| s.len() == ell) {
            out.push(MinkowskiDecomposition::new(p, &sub, summands, complete));
        }
    }
    out.sort_by(|a, b| (&a.subpolygon, &a.summands).cmp(&(&b.subpolygon, &b.summands)));
    Ok(out)
}
