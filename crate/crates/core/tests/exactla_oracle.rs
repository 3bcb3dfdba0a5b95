use delpezzo_core::exactla::{kernel_basis, rank, rat, rref, Rational, RationalMatrix};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Textbook Gauss-Jordan over the rationals: first nonzero pivot, divide,
/// clear the column.
fn naive_rref(rows: &[Vec<i64>], cols: usize) -> (Vec<Vec<Rational>>, usize) {
    let mut a: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
    let mut lead = 0;
    for c in 0..cols {
        let Some(p) = (lead..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(lead, p);
        let inv = Rational::one() / a[lead][c].clone();
        for x in a[lead].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..a.len() {
            if i != lead && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = a[lead][j].clone() * f.clone();
                    a[i][j] -= v;
                }
            }
        }
        lead += 1;
    }
    (a, lead)
}

fn matrix() -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        // small entries with plenty of zeros so rank deficiency is common
        (prop::collection::vec(prop::collection::vec(prop_oneof![Just(0i64), -4i64..=4], c), r), Just(c))
    })
}

proptest! {
    #[test]
    fn rank_and_rref_match_naive_elimination((rows, cols) in matrix()) {
        let m = RationalMatrix::from_i64_rows(&rows);
        let (expected, expected_rank) = naive_rref(&rows, cols);
        prop_assert_eq!(rank(&m), expected_rank);
        let got = rref(&m);
        for (i, row) in expected.iter().enumerate() {
            prop_assert_eq!(got.row(i), &row[..]);
        }
    }

    #[test]
    fn rref_is_idempotent((rows, _) in matrix()) {
        let once = rref(&RationalMatrix::from_i64_rows(&rows));
        prop_assert_eq!(rref(&once), once);
    }

    #[test]
    fn kernel_is_annihilated_and_complements_rank((rows, cols) in matrix()) {
        let m = RationalMatrix::from_i64_rows(&rows);
        let ker = kernel_basis(&m);
        prop_assert_eq!(ker.len() + rank(&m), cols);
        for v in &ker {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
        if !ker.is_empty() {
            let k = RationalMatrix::from_rows(cols, ker.clone()).unwrap();
            prop_assert_eq!(rank(&k), ker.len());
        }
    }

    #[test]
    fn rank_is_transpose_invariant((rows, cols) in matrix()) {
        let t: Vec<Vec<i64>> = (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        prop_assert_eq!(rank(&RationalMatrix::from_i64_rows(&rows)), rank(&RationalMatrix::from_i64_rows(&t)));
    }
}
