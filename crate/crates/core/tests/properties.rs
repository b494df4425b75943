mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(0x5eed_0001))]
    #[test]
    fn pick(p in full_polygon(6)) {
        pick_identity(p)?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0002))]
    #[test]
    fn scott(p in full_polygon(6)) {
        scott_inequality(p)?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0003))]
    #[test]
    fn genus(p in full_polygon(6)) {
        genus_is_interior_count(p)?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0004))]
    #[test]
    fn minkowski(a in polygon_in(4, 5), b in polygon_in(4, 5), c in polygon_in(3, 4)) {
        minkowski_edges_add((a, b, c))?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0005))]
    #[test]
    fn factorization(p in polygon_in(3, 6)) {
        factorizations_recompose(p)?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0006))]
    #[test]
    fn counts_under_maps(p in polygon_in(5, 6), t in unimodular()) {
        counts_survive_unimodular_maps((p, t))?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0007))]
    #[test]
    fn weights_under_maps(p in polygon_in(2, 5), t in unimodular(), q in small_field()) {
        weight_distribution_survives_unimodular_maps((p, t, q))?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0008))]
    #[test]
    fn dimension(p in polygon_in(6, 7), q in large_field()) {
        dimension_is_point_count((p, q))?;
    }
}

proptest! {
    #![proptest_config(config(0x5eed_0009))]
    #[test]
    fn bounds_bracket_distance(p in polygon_in(3, 6), q in mid_field()) {
        bounds_bracket_exact_distance((p, q))?;
    }
}

#[test]
fn zero_count_independent_of_modulus() {
    let s = toricode::SectionPoly::from_terms(
        &toricode::FieldSpec::with_order(8, None).unwrap(),
        [(1, 0), (3, 3), (0, 2)].map(|(x, y)| (toricode::LatticePoint::new(x, y), toricode::FieldElement::ONE)),
    );
    for modulus in [[1, 1, 0, 1], [1, 0, 1, 1]] {
        let f = toricode::FieldSpec::with_order(8, Some(&modulus)).unwrap();
        assert_eq!(toricode::count_torus_zeros(&s, &f), 21);
    }
}
