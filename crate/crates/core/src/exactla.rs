//! Exact rational linear algebra.
//!
//! Rank is computed by fraction-free (Bareiss) elimination on an integer copy
//! of the matrix; reduced row echelon forms use the fraction-free
//! Gauss–Jordan variant and divide by the common pivot only at the end.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` with an optional leading sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("malformed rational {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share the length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Self { rows: nrows, cols, data })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let rows = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Self::from_rows(cols, rows).expect("rectangular input")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::InvalidInput(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Each row multiplied by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Picks the pivot row for column `col` among `from..`: the nonzero entry of
/// smallest bit length, lowest row index on ties.
fn choose_pivot(a: &[Vec<BigInt>], from: usize, col: usize) -> Option<usize> {
    (from..a.len())
        .filter(|&i| !a[i][col].is_zero())
        .min_by_key(|&i| (a[i][col].bits(), i))
}

fn exact_div(x: BigInt, d: &BigInt) -> BigInt {
    let (q, r) = x.div_rem(d);
    assert!(r.is_zero(), "fraction-free elimination produced an inexact division");
    q
}

/// One fraction-free elimination step on row `i` against pivot row `p`.
fn eliminate_row(a: &mut [Vec<BigInt>], i: usize, p: usize, col: usize, prev: &BigInt) {
    let pivot = a[p][col].clone();
    let factor = std::mem::take(&mut a[i][col]);
    let (pivot_row, target) = if p < i {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[p], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(p);
        (&hi[0], &mut lo[i])
    };
    for j in 0..target.len() {
        if j == col {
            continue;
        }
        let lhs = &pivot * &target[j];
        let value = if factor.is_zero() || pivot_row[j].is_zero() {
            lhs
        } else {
            lhs - &factor * &pivot_row[j]
        };
        target[j] = if prev.is_one() { value } else { exact_div(value, prev) };
    }
}

/// Fraction-free elimination. With `jordan` the rows above each pivot are
/// cleared as well. Returns the pivot columns in order.
fn fraction_free(a: &mut [Vec<BigInt>], cols: usize, jordan: bool) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    for col in 0..cols {
        let rank = pivots.len();
        if rank == rows {
            break;
        }
        let Some(p) = choose_pivot(a, rank, col) else { continue };
        a.swap(rank, p);
        let start = if jordan { 0 } else { rank + 1 };
        for i in start..rows {
            if i != rank {
                eliminate_row(a, i, rank, col, &prev);
            }
        }
        prev = a[rank][col].clone();
        pivots.push(col);
    }
    pivots
}

/// Exact rank via Bareiss elimination.
pub fn rank(m: &RationalMatrix) -> usize {
    let mut a = m.integer_rows();
    fraction_free(&mut a, m.cols, false).len()
}

/// Rank of an integer matrix given as rows (all of length `cols`).
pub fn integer_rank(mut rows: Vec<Vec<BigInt>>, cols: usize) -> usize {
    debug_assert!(rows.iter().all(|r| r.len() == cols));
    fraction_free(&mut rows, cols, false).len()
}

fn rref_with_pivots(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let mut a = m.integer_rows();
    let pivots = fraction_free(&mut a, m.cols, true);
    let mut out = RationalMatrix::zeros(m.rows, m.cols);
    for (i, &pc) in pivots.iter().enumerate() {
        let d = &a[i][pc];
        for j in 0..m.cols {
            if !a[i][j].is_zero() {
                out[(i, j)] = Rational::new(a[i][j].clone(), d.clone());
            }
        }
    }
    (out, pivots)
}

/// Reduced row echelon form; zero rows are moved to the bottom.
pub fn rref(m: &RationalMatrix) -> RationalMatrix {
    rref_with_pivots(m).0
}

/// Basis of the right null space, one vector per free column, with a 1 in
/// that column and zeros in the other free columns.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref_with_pivots(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(i, f)].clone();
            }
            v
        })
        .collect()
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        let sign = ints.iter().find(|x| !x.is_zero()).map_or(false, |x| x.is_negative());
        for x in &mut ints {
            *x = &*x / &g;
            if sign {
                *x = -&*x;
            }
        }
    }
    ints
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(rank(&RationalMatrix::identity(3)), 3);
        assert_eq!(rank(&RationalMatrix::zeros(4, 5)), 0);
        assert_eq!(rref(&RationalMatrix::identity(4)), RationalMatrix::identity(4));
        assert!(kernel_basis(&RationalMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&RationalMatrix::zeros(2, 3)).len(), 3);
    }

    #[test]
    fn vandermonde_has_full_rank() {
        let rows: Vec<Vec<i64>> = (1..=4).map(|x: i64| (0..4).map(|k| x.pow(k)).collect()).collect();
        assert_eq!(rank(&RationalMatrix::from_i64_rows(&rows)), 4);
    }

    #[test]
    fn kernel_of_single_row() {
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k, vec![vec![rat(-1), rat(1)]]);
    }

    #[test]
    fn rref_of_rational_entries() {
        let mut a = RationalMatrix::zeros(2, 3);
        a[(0, 0)] = ratio(1, 2);
        a[(0, 1)] = ratio(1, 3);
        a[(1, 0)] = ratio(2, 5);
        a[(1, 2)] = rat(7);
        let r = rref(&a);
        assert_eq!(r[(0, 0)], rat(1));
        assert_eq!(r[(1, 1)], rat(1));
        assert_eq!(r[(0, 1)], rat(0));
        for v in kernel_basis(&a) {
            assert!(a.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn column_skipping_and_zero_rows() {
        let a = m(&[&[0, 2, 4, 1], &[0, 1, 2, 0], &[0, 3, 6, 1]]);
        assert_eq!(rank(&a), 2);
        let r = rref(&a);
        assert!(r.is_zero_row(2));
        assert_eq!(r.row(0), &[rat(0), rat(1), rat(2), rat(0)]);
        assert_eq!(r.row(1), &[rat(0), rat(0), rat(0), rat(1)]);
        assert_eq!(kernel_basis(&a).len(), 2);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("17").unwrap(), rat(17));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&rat(5)), "5");
    }

    #[test]
    fn primitive_vectors() {
        let v = primitive_integer_vector(&[ratio(-1, 2), rat(0), ratio(3, 4)]);
        assert_eq!(v, vec![BigInt::from(2), BigInt::from(0), BigInt::from(-3)]);
    }
}
