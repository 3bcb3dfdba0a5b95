use delpezzo_core::coxring::{
    chart_check, chart_check_interpolated, effective_classes_of_degree, gap_probe, quadratic_relation_count,
};
use delpezzo_core::nagata::{component_dimension, product_span_dim, sample_points, sample_points_free};
use delpezzo_core::picard::{lattice, PicClass};
use delpezzo_core::sampling::random_classes;

/// All classes of degree `n` in the box `0 <= a_0 <= n`, `|a_i| <= n`.
///
/// For `r <= 5` every effective class lies in it: `l_0 - l_i` and
/// `2 l_0 - sum_{j != i} l_j` are nef and sum to `-K`, so both pair with an
/// effective class of degree `n` into `[0, n]`.
fn box_classes(r: u8, n: i32) -> Vec<PicClass> {
    let mut out = Vec::new();
    let mut c = vec![0i32; r as usize + 1];
    fn go(r: u8, n: i32, i: usize, c: &mut Vec<i32>, out: &mut Vec<PicClass>) {
        if i == c.len() {
            let d = PicClass::new(r, c).unwrap();
            if d.degree() == n as i64 {
                out.push(d);
            }
            return;
        }
        let range = if i == 0 { 0..=n } else { -n..=n };
        for v in range {
            c[i] = v;
            go(r, n, i + 1, c, out);
        }
    }
    go(r, n, 0, &mut c, &mut out);
    out
}

#[test]
fn effective_classes_match_a_boxed_interpolation_search() {
    for r in [3u8, 4] {
        let pts = sample_points_free(r, 5).unwrap();
        for n in 0..=3 {
            let mut found: Vec<PicClass> = box_classes(r, n)
                .into_iter()
                .filter(|d| component_dimension(&pts, d).unwrap() > 0)
                .collect();
            found.sort();
            assert_eq!(found, effective_classes_of_degree(r, n as i64).unwrap(), "r = {r}, n = {n}");
        }
    }
}

#[test]
fn interpolation_does_not_depend_on_the_configuration() {
    for r in 3u8..=6 {
        let configs = [sample_points(r, 11).unwrap(), sample_points(r, 12).unwrap(), sample_points_free(r, 13).unwrap()];
        let lat = lattice(r).unwrap();
        for d in random_classes(r, 40, 3, 99).unwrap() {
            let dims: Vec<u64> = configs.iter().map(|p| component_dimension(p, &d).unwrap()).collect();
            assert!(dims.iter().all(|&x| x == lat.h0(&d)), "r = {r}, class {d}: {dims:?}");
        }
    }
}

#[test]
fn relation_counts_do_not_depend_on_the_seed() {
    for (r, expected) in [(3u8, 0u64), (4, 5), (5, 20)] {
        for seed in [1, 2] {
            let c = quadratic_relation_count(&sample_points_free(r, seed).unwrap(), 5).unwrap();
            assert_eq!(c.relations, expected, "r = {r}, seed {seed}");
            assert_eq!(c.symmetric_square - c.product_span, expected);
        }
    }
}

#[test]
fn degree_two_is_spanned_by_products_at_r4() {
    let pts = sample_points(4, 3).unwrap();
    let gens = lattice(4).unwrap().exceptional().to_vec();
    let mut total = 0;
    for d in effective_classes_of_degree(4, 2).unwrap() {
        let mut span = 0;
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i..] {
                if *a + *b == d {
                    span = span.max(product_span_dim(&pts, &[*a, *b], &d).unwrap());
                }
            }
        }
        total += component_dimension(&pts, &d).unwrap();
        assert!(span > 0, "class {d} has no product");
    }
    assert_eq!(total, 50);
}

#[test]
fn interpolated_charts_agree_with_the_lattice() {
    for r in 4u8..=6 {
        let pts = sample_points(r, 21).unwrap();
        let e = PicClass::basis(r, r as usize);
        for d2 in random_classes(r - 1, 15, 3, 7).unwrap() {
            let interpolated = chart_check_interpolated(&pts, &d2, 2).unwrap();
            let combinatorial = chart_check(r, &e, &d2, 2).unwrap();
            assert!(interpolated.holds(), "r = {r}, D2 = {d2}: {interpolated:?}");
            assert_eq!(interpolated, combinatorial);
        }
    }
}

#[test]
fn gap_probe_on_a_pair_of_disjoint_lines() {
    let pts = sample_points(8, 4).unwrap();
    let d = PicClass::basis(8, 1) + PicClass::basis(8, 2);
    let g = gap_probe(&pts, &d, 2).unwrap();
    assert_eq!(g.factorizations, 1);
    assert_eq!((g.subring_dim, g.full_dim), (1, 1));
    assert_eq!(g.full_dim, lattice(8).unwrap().h0(&d));
}
