use delpezzo_core::coxring::generator_classes;
use delpezzo_core::picard::{self, lattice, pair, reflect, simple_roots, PicClass};
use proptest::prelude::*;

fn class(r: u8, bound: i32) -> impl Strategy<Value = PicClass> {
    prop::collection::vec(-bound..=bound, r as usize + 1).prop_map(move |c| PicClass::new(r, &c).unwrap())
}

fn rank_and_classes(n: usize, bound: i32) -> impl Strategy<Value = (u8, Vec<PicClass>)> {
    (3u8..=8).prop_flat_map(move |r| (Just(r), prop::collection::vec(class(r, bound), n)))
}

proptest! {
    #[test]
    fn pairing_is_bilinear_and_symmetric((_, v) in rank_and_classes(3, 9), s in -5i32..=5) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(pair(&a, &b).unwrap(), pair(&b, &a).unwrap());
        prop_assert_eq!(pair(&(a + b), &c).unwrap(), pair(&a, &c).unwrap() + pair(&b, &c).unwrap());
        prop_assert_eq!(pair(&(s * a), &b).unwrap(), s as i64 * pair(&a, &b).unwrap());
    }

    #[test]
    fn reflections_are_isometric_involutions((r, v) in rank_and_classes(2, 9), i in 0usize..8) {
        let roots = simple_roots(r);
        let a = roots[i % roots.len()];
        let (x, y) = (reflect(&v[0], &a).unwrap(), reflect(&v[1], &a).unwrap());
        prop_assert_eq!(pair(&x, &y).unwrap(), pair(&v[0], &v[1]).unwrap());
        prop_assert_eq!(x.degree(), v[0].degree());
        prop_assert_eq!(reflect(&x, &a).unwrap(), v[0]);
    }

    #[test]
    fn h0_is_weyl_invariant((r, v) in rank_and_classes(1, 6)) {
        let lat = lattice(r).unwrap();
        let h = lat.h0(&v[0]);
        for a in simple_roots(r) {
            prop_assert_eq!(lat.h0(&reflect(&v[0], &a).unwrap()), h);
        }
    }

    #[test]
    fn adding_an_effective_class_never_lowers_h0((r, v) in rank_and_classes(1, 4), g in 0usize..240) {
        let lat = lattice(r).unwrap();
        let gens = generator_classes(r).unwrap();
        let e = gens[g % gens.len()];
        prop_assert!(lat.h0(&(v[0] + e)) >= lat.h0(&v[0]));
    }

    #[test]
    fn nef_classes_follow_riemann_roch((r, v) in rank_and_classes(1, 8)) {
        let lat = lattice(r).unwrap();
        let d = v[0];
        if lat.is_nef(&d) {
            let chi = (d.self_intersection() + d.degree()) / 2 + 1;
            prop_assert_eq!(lat.h0(&d) as i64, chi);
        }
    }

    #[test]
    fn negative_degree_classes_have_no_sections((r, v) in rank_and_classes(1, 8)) {
        if v[0].degree() < 0 {
            prop_assert_eq!(lattice(r).unwrap().h0(&v[0]), 0);
        }
    }

    #[test]
    fn class_strings_round_trip((_, v) in rank_and_classes(1, 50)) {
        let s = v[0].to_string();
        prop_assert_eq!(s.parse::<PicClass>().unwrap(), v[0]);
    }
}

#[test]
fn exceptional_and_generator_sets_are_weyl_stable() {
    for r in 3..=8u8 {
        let exc = lattice(r).unwrap().exceptional().to_vec();
        let gens = generator_classes(r).unwrap();
        for a in simple_roots(r) {
            let mut image: Vec<_> = exc.iter().map(|e| reflect(e, &a).unwrap()).collect();
            image.sort();
            assert_eq!(image, exc, "r = {r}");
            let mut image: Vec<_> = gens.iter().map(|e| reflect(e, &a).unwrap()).collect();
            image.sort();
            let mut sorted = gens.clone();
            sorted.sort();
            assert_eq!(image, sorted, "r = {r}");
        }
    }
}

#[test]
fn every_exceptional_class_reaches_the_last_basis_vector() {
    for r in [4u8, 6] {
        let target = PicClass::basis(r, r as usize);
        for e in lattice(r).unwrap().exceptional() {
            let word = picard::weyl_word(e, &target, 10_000).unwrap().unwrap();
            assert_eq!(picard::apply_word(&word, e), target);
            assert_eq!(picard::apply_word_inverse(&word, &target), *e);
        }
    }
}

#[test]
fn anticanonical_sections() {
    for r in 3..=8u8 {
        let k = PicClass::anticanonical(r);
        assert_eq!(picard::h0(&k), 10 - r as u64);
        assert_eq!(picard::h0(&(2 * k)), 3 * (9 - r as u64) + 1);
    }
}
