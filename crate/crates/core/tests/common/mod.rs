//! Strategies and property checks shared by the property and acceptance suites.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use toricode::bounds::{certified_upper_bound, decomposition_lower_bound, SECTION_BUDGET};
use toricode::code::{hamming_weight, search_size, DISTRIBUTION_LIMIT};
use toricode::decomp::{maximal_factorizations, DEFAULT_BUDGET};
use toricode::polygon::minkowski_sum_all;
use toricode::*;

pub const CASES: u32 = 500;

pub fn config(seed: u64) -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn polygon_in(side: i64, max_points: usize) -> impl Strategy<Value = LatticePolygon> {
    prop::collection::vec((0..=side, 0..=side), 1..=max_points).prop_map(|pts| LatticePolygon::from_points(&pts))
}

pub fn full_polygon(side: i64) -> impl Strategy<Value = LatticePolygon> {
    polygon_in(side, 7).prop_filter("two-dimensional", |p| p.dim() == 2)
}

/// Products of elementary unimodular matrices, with a translation.
pub fn unimodular() -> impl Strategy<Value = UnimodularAffineMap> {
    let gens = [
        [[1, 1], [0, 1]],
        [[1, 0], [1, 1]],
        [[1, -1], [0, 1]],
        [[0, 1], [1, 0]],
        [[-1, 0], [0, 1]],
    ];
    (prop::collection::vec(0..gens.len(), 0..5), -3i64..=3, -3i64..=3).prop_map(move |(word, tx, ty)| {
        let mut m = [[1i64, 0], [0, 1]];
        for g in word {
            let h = gens[g];
            m = [
                [
                    m[0][0] * h[0][0] + m[0][1] * h[1][0],
                    m[0][0] * h[0][1] + m[0][1] * h[1][1],
                ],
                [
                    m[1][0] * h[0][0] + m[1][1] * h[1][0],
                    m[1][0] * h[0][1] + m[1][1] * h[1][1],
                ],
            ];
        }
        UnimodularAffineMap::new(m, LatticePoint::new(tx, ty)).unwrap()
    })
}

fn edge_multiset(p: &LatticePolygon) -> BTreeMap<LatticePoint, i64> {
    let mut out = BTreeMap::new();
    for (d, m) in p.primitive_edges() {
        *out.entry(d).or_insert(0) += m;
    }
    out
}

fn brute_count(p: &LatticePolygon) -> i64 {
    let (lo, hi) = p.bounding_box();
    let mut n = 0;
    for x in lo.x..=hi.x {
        for y in lo.y..=hi.y {
            n += p.contains(LatticePoint::new(x, y)) as i64;
        }
    }
    n
}

type Check = std::result::Result<(), TestCaseError>;

pub fn pick_identity(p: LatticePolygon) -> Check {
    let c = p.counts();
    prop_assert_eq!(c.volume2, 2 * c.interior + c.boundary - 2);
    prop_assert_eq!(c.total, brute_count(&p));
    Ok(())
}

pub fn scott_inequality(p: LatticePolygon) -> Check {
    match p.scott_check() {
        Ok(holds) => prop_assert!(holds),
        Err(_) => prop_assert_eq!(p.counts().interior, 0),
    }
    Ok(())
}

pub fn genus_is_interior_count(p: LatticePolygon) -> Check {
    let c = p.counts();
    prop_assert_eq!(p.genus().unwrap(), c.interior);
    prop_assert_eq!(c.volume2 + 2 - c.total, c.interior);
    Ok(())
}

pub fn minkowski_edges_add((a, b, c): (LatticePolygon, LatticePolygon, LatticePolygon)) -> Check {
    let ab = minkowski_sum(&a, &b).unwrap();
    prop_assert_eq!(&ab, &minkowski_sum(&b, &a).unwrap());
    let left = minkowski_sum(&ab, &c).unwrap();
    let right = minkowski_sum(&a, &minkowski_sum(&b, &c).unwrap()).unwrap();
    prop_assert_eq!(&left, &right);
    prop_assert!(ab.counts().total >= a.counts().total + b.counts().total - 1);
    if ab.dim() == 2 {
        let mut want = edge_multiset(&a);
        for (d, m) in edge_multiset(&b) {
            *want.entry(d).or_insert(0) += m;
        }
        prop_assert_eq!(edge_multiset(&ab), want);
    }
    Ok(())
}

pub fn factorizations_recompose(p: LatticePolygon) -> Check {
    if p.dim() == 0 {
        return Ok(());
    }
    let target = p.normalized();
    for parts in factor_polygon(&p, 4).unwrap() {
        prop_assert!(parts.len() <= 4);
        prop_assert!(parts.iter().all(|s| s.dim() >= 1));
        prop_assert_eq!(minkowski_sum_all(&parts).unwrap().normalized(), target.clone());
    }
    let best = maximal_factorizations(&p).unwrap();
    prop_assert_eq!(minkowski_sum_all(&best[0]).unwrap().normalized(), target);
    Ok(())
}

pub fn counts_survive_unimodular_maps((p, t): (LatticePolygon, UnimodularAffineMap)) -> Check {
    let image = p.apply_map(&t);
    prop_assert_eq!(image.counts(), p.counts());
    prop_assert!(lattice_equivalence(&p, &image).is_some());
    Ok(())
}

pub fn weight_distribution_survives_unimodular_maps((p, t, q): (LatticePolygon, UnimodularAffineMap, u32)) -> Check {
    let image = p.apply_map(&t);
    if image.fits_in_box(q).is_none() || p.fits_in_box(q).is_none() {
        return Ok(());
    }
    let f = FieldSpec::with_order(q, None).unwrap();
    let a = build_code(&p, &f).unwrap();
    let b = build_code(&image, &f).unwrap();
    prop_assert_eq!(
        weight_distribution(&a, DISTRIBUTION_LIMIT, 1).unwrap(),
        weight_distribution(&b, DISTRIBUTION_LIMIT, 1).unwrap()
    );
    Ok(())
}

pub fn dimension_is_point_count((p, q): (LatticePolygon, u32)) -> Check {
    let f = FieldSpec::with_order(q, None).unwrap();
    let code = build_code(&p, &f).unwrap();
    prop_assert_eq!(code.k() as i64, p.counts().total);
    prop_assert_eq!(code.rank(), code.k());
    Ok(())
}

pub fn bounds_bracket_exact_distance((p, q): (LatticePolygon, u32)) -> Check {
    let f = FieldSpec::with_order(q, None).unwrap();
    let code = build_code(&p, &f).unwrap();
    if search_size(&code) > 400_000 {
        return Ok(());
    }
    let opts = SearchOptions::with_threads(1);
    let exact = min_distance_exact(&code, &opts).unwrap().distance as i64;
    let decs = if p.dim() > 0 {
        best_subpolygon_decomposition(&p, DEFAULT_BUDGET).unwrap()
    } else {
        Vec::new()
    };
    let cert = certified_upper_bound(&p, &f, &decs, SECTION_BUDGET, &opts).unwrap();
    prop_assert!(cert.value >= exact);
    prop_assert_eq!(
        hamming_weight(&code.evaluate_section(&cert.witness).unwrap()) as i64,
        cert.value
    );
    if !decs.is_empty() {
        let lb = decomposition_lower_bound(&p, &f, &decs, SECTION_BUDGET, &opts).unwrap();
        if lb.applicable {
            prop_assert!(lb.value <= exact, "lower {} > exact {}", lb.value, exact);
        }
    }
    Ok(())
}

pub fn small_field() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 4, 5])
}

pub fn mid_field() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![5u32, 7, 8])
}

pub fn large_field() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![8u32, 9, 11])
}

fn run<S: Strategy>(seed: u64, strategy: S, check: fn(S::Value) -> Check) -> Result<(), String> {
    TestRunner::new(config(seed))
        .run(&strategy, check)
        .map_err(|e| e.to_string())
}

/// Every property suite with its fixed seed, for callers that report results.
pub fn all_suites() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("pick identity", run(0x5eed_0001, full_polygon(6), pick_identity)),
        ("scott inequality", run(0x5eed_0002, full_polygon(6), scott_inequality)),
        (
            "genus = interior = 2v+2-#",
            run(0x5eed_0003, full_polygon(6), genus_is_interior_count),
        ),
        (
            "minkowski edge additivity",
            run(
                0x5eed_0004,
                (polygon_in(4, 5), polygon_in(4, 5), polygon_in(3, 4)),
                minkowski_edges_add,
            ),
        ),
        (
            "factorization round trip",
            run(0x5eed_0005, polygon_in(3, 6), factorizations_recompose),
        ),
        (
            "counts under unimodular maps",
            run(
                0x5eed_0006,
                (polygon_in(5, 6), unimodular()),
                counts_survive_unimodular_maps,
            ),
        ),
        (
            "weight distribution under unimodular maps",
            run(
                0x5eed_0007,
                (polygon_in(2, 5), unimodular(), small_field()),
                weight_distribution_survives_unimodular_maps,
            ),
        ),
        (
            "k = #(P)",
            run(0x5eed_0008, (polygon_in(6, 7), large_field()), dimension_is_point_count),
        ),
        (
            "certified upper >= d >= applicable lower",
            run(
                0x5eed_0009,
                (polygon_in(3, 6), mid_field()),
                bounds_bracket_exact_distance,
            ),
        ),
    ]
}
