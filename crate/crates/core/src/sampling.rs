//! Seeded random classes for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coxring::generator_classes;
use crate::error::Result;
use crate::picard::{check_r, PicClass};

/// Roots of anticanonical degree zero of the form `l_i - l_j` and
/// `±(l_0 - l_i - l_j - l_k)`.
pub fn degree_zero_roots(r: u8) -> Vec<PicClass> {
    let n = r as usize;
    let mut roots = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                roots.push(PicClass::basis(r, i) - PicClass::basis(r, j));
            }
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let a = PicClass::line(r) - PicClass::basis(r, i) - PicClass::basis(r, j) - PicClass::basis(r, k);
                roots.push(a);
                roots.push(-a);
            }
        }
    }
    roots
}

/// `count` classes on `X_r` of degree in `[0, max_degree]`.
///
/// Each is a sum of `n` random degree-one generator classes (`n` uniform in
/// `[0, max_degree]`) plus zero, one or two random degree-zero roots, so the
/// sample mixes effective and non-effective classes of the same degree.
pub fn random_classes(r: u8, count: usize, max_degree: u32, seed: u64) -> Result<Vec<PicClass>> {
    let r = check_r(r as i64)?;
    let gens = generator_classes(r)?;
    let roots = degree_zero_roots(r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_degree);
            let mut d = PicClass::zero(r);
            for _ in 0..n {
                d += *gens.choose(&mut rng).expect("generators exist");
            }
            for _ in 0..rng.gen_range(0..=2) {
                d += *roots.choose(&mut rng).expect("roots exist");
            }
            d
        })
        .collect())
}
