//! Picard lattice of a Del Pezzo surface `X_r`: intersection pairing,
//! Weyl group reflections, exceptional classes and the lattice-level `h0`.
//!
//! A class is stored in the basis `l_0, l_1, ..., l_r` where `l_0` is the
//! pullback of a line and `l_i` are the exceptional divisors of the blow-up.
//! The pairing has signature `(1, -1, ..., -1)` and the canonical class is
//! `K = -3 l_0 + l_1 + ... + l_r`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MIN_R: u8 = 3;
pub const MAX_R: u8 = 8;

/// Default bound on the number of elements a Weyl orbit may reach.
pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

const SLOTS: usize = MAX_R as usize + 1;

pub fn check_r(r: i64) -> Result<u8> {
    if (MIN_R as i64..=MAX_R as i64).contains(&r) {
        Ok(r as u8)
    } else {
        Err(Error::RankOutOfRange(r))
    }
}

/// A divisor class `a_0 l_0 + a_1 l_1 + ... + a_r l_r` on `X_r`.
///
/// Coefficients past index `r` are always zero, so the derived ordering is
/// lexicographic in `(a_0, ..., a_r)` within one lattice.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PicClass {
    r: u8,
    c: [i32; SLOTS],
}

impl PicClass {
    pub fn new(r: u8, coeffs: &[i32]) -> Result<Self> {
        check_r(r as i64)?;
        if coeffs.len() != r as usize + 1 {
            return Err(Error::InvalidInput(format!(
                "a class on X_{r} needs {} coefficients, got {}",
                r + 1,
                coeffs.len()
            )));
        }
        let mut c = [0; SLOTS];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { r, c })
    }

    /// Class `d l_0 - m_1 l_1 - ... - m_r l_r` of plane curves of degree `d`
    /// with multiplicity `m_j` at the `j`-th point.
    pub fn from_plane_model(r: u8, d: i32, mults: &[i32]) -> Result<Self> {
        let mut coeffs = vec![d];
        coeffs.extend(mults.iter().map(|m| -m));
        Self::new(r, &coeffs)
    }

    fn raw(r: u8) -> Self {
        debug_assert!((MIN_R..=MAX_R).contains(&r));
        Self { r, c: [0; SLOTS] }
    }

    pub fn zero(r: u8) -> Self {
        Self::raw(r)
    }

    /// Basis vector `l_i`, `0 <= i <= r`.
    pub fn basis(r: u8, i: usize) -> Self {
        assert!(i <= r as usize, "l_{i} does not exist on X_{r}");
        let mut d = Self::raw(r);
        d.c[i] = 1;
        d
    }

    pub fn line(r: u8) -> Self {
        Self::basis(r, 0)
    }

    pub fn canonical(r: u8) -> Self {
        let mut k = Self::raw(r);
        k.c[0] = -3;
        for i in 1..=r as usize {
            k.c[i] = 1;
        }
        k
    }

    pub fn anticanonical(r: u8) -> Self {
        -Self::canonical(r)
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.c[..=self.r as usize]
    }

    pub fn coeff(&self, i: usize) -> i32 {
        self.coeffs()[i]
    }

    /// Plane degree `d = a_0`.
    pub fn plane_degree(&self) -> i32 {
        self.c[0]
    }

    /// Multiplicities `m_j = -a_j`, `j = 1..=r`.
    pub fn multiplicities(&self) -> Vec<i32> {
        self.c[1..=self.r as usize].iter().map(|a| -a).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&a| a == 0)
    }

    /// Intersection number; panics when the lattices differ.
    pub fn dot(&self, other: &PicClass) -> i64 {
        assert_eq!(self.r, other.r, "pairing classes from different lattices");
        let mut s = self.c[0] as i64 * other.c[0] as i64;
        for i in 1..=self.r as usize {
            s -= self.c[i] as i64 * other.c[i] as i64;
        }
        s
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    /// Anticanonical degree `(D, -K) = 3 a_0 + a_1 + ... + a_r`.
    pub fn degree(&self) -> i64 {
        3 * self.c[0] as i64 + self.c[1..=self.r as usize].iter().map(|&a| a as i64).sum::<i64>()
    }

    /// Pullback along the blow-down `X_{r+1} -> X_r` of `l_{r+1}`.
    pub fn pullback(&self) -> Result<PicClass> {
        let r = check_r(self.r as i64 + 1)?;
        Ok(PicClass { r, c: self.c })
    }
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs().iter().map(i32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PicClass({self})")
    }
}

/// Parses `"a_0,a_1,...,a_r"`; `r` is the number of entries minus one.
impl FromStr for PicClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i32>()
                    .map_err(|_| Error::InvalidInput(format!("malformed class {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let r = check_r(coeffs.len() as i64 - 1)?;
        PicClass::new(r, &coeffs)
    }
}

impl Serialize for PicClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PicClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for PicClass {
    type Output = PicClass;

    fn add(self, rhs: PicClass) -> PicClass {
        assert_eq!(self.r, rhs.r, "adding classes from different lattices");
        let mut out = self;
        for i in 0..SLOTS {
            out.c[i] += rhs.c[i];
        }
        out
    }
}

impl AddAssign for PicClass {
    fn add_assign(&mut self, rhs: PicClass) {
        *self = *self + rhs;
    }
}

impl Sub for PicClass {
    type Output = PicClass;

    fn sub(self, rhs: PicClass) -> PicClass {
        self + (-rhs)
    }
}

impl Neg for PicClass {
    type Output = PicClass;

    fn neg(self) -> PicClass {
        let mut out = self;
        for a in &mut out.c {
            *a = -*a;
        }
        out
    }
}

impl Mul<PicClass> for i32 {
    type Output = PicClass;

    fn mul(self, rhs: PicClass) -> PicClass {
        let mut out = rhs;
        for a in &mut out.c {
            *a *= self;
        }
        out
    }
}

fn same_lattice(a: &PicClass, b: &PicClass) -> Result<()> {
    if a.r == b.r {
        Ok(())
    } else {
        Err(Error::ContextMismatch { left: a.r, right: b.r })
    }
}

/// Intersection pairing `a_0 b_0 - sum a_i b_i`.
pub fn pair(d: &PicClass, d2: &PicClass) -> Result<i64> {
    same_lattice(d, d2)?;
    Ok(d.dot(d2))
}

/// Anticanonical degree `(D, -K)`.
pub fn degree(d: &PicClass) -> i64 {
    d.degree()
}

/// Reflection `D + (D, root) root` in a `(-2)`-class.
pub fn reflect(d: &PicClass, root: &PicClass) -> Result<PicClass> {
    same_lattice(d, root)?;
    if root.self_intersection() != -2 {
        return Err(Error::NotARoot(root.to_string()));
    }
    Ok(reflect_unchecked(d, root))
}

fn reflect_unchecked(d: &PicClass, root: &PicClass) -> PicClass {
    let k = d.dot(root) as i32;
    if k == 0 {
        *d
    } else {
        *d + k * *root
    }
}

/// Simple roots `l_i - l_{i+1}` (`1 <= i < r`) followed by `l_0 - l_1 - l_2 - l_3`.
pub fn simple_roots(r: u8) -> Vec<PicClass> {
    let mut roots: Vec<PicClass> = (1..r as usize)
        .map(|i| PicClass::basis(r, i) - PicClass::basis(r, i + 1))
        .collect();
    roots.push(PicClass::line(r) - PicClass::basis(r, 1) - PicClass::basis(r, 2) - PicClass::basis(r, 3));
    roots
}

/// All classes with `(E, E) = -1` and `(E, -K) = 1`, sorted.
///
/// Writing `E = a_0 l_0 - sum m_i l_i`, the conditions read
/// `sum m_i = 3 a_0 - 1` and `sum m_i^2 = a_0^2 + 1`. Cauchy–Schwarz gives
/// `(3 a_0 - 1)^2 <= r (a_0^2 + 1)`, which bounds `a_0` (at most 7 for
/// `r = 8`) and hence every `|m_i| <= 7`. Inside that box the search is
/// exhaustive, pruned only by the same inequality on the unfilled tail.
pub fn exceptional_curves(r: u8) -> Result<Vec<PicClass>> {
    check_r(r as i64)?;
    let n = r as i64;
    let mut out = Vec::new();
    let mut mults = vec![0i32; r as usize];
    for a0 in -8i64..=8 {
        let sum = 3 * a0 - 1;
        let sq = a0 * a0 + 1;
        if sum * sum > n * sq {
            continue;
        }
        search_multiplicities(0, sum, sq, &mut mults, &mut |m| {
            let class = PicClass::from_plane_model(r, a0 as i32, m).expect("valid rank");
            out.push(class);
        });
    }
    out.sort();
    Ok(out)
}

fn search_multiplicities(pos: usize, sum: i64, sq: i64, mults: &mut [i32], emit: &mut impl FnMut(&[i32])) {
    let left = (mults.len() - pos) as i64;
    if left == 0 {
        if sum == 0 && sq == 0 {
            emit(mults);
        }
        return;
    }
    if sq < 0 || sum * sum > left * sq {
        return;
    }
    for m in -7i64..=7 {
        if m * m > sq {
            continue;
        }
        mults[pos] = m as i32;
        search_multiplicities(pos + 1, sum - m, sq - m * m, mults, emit);
    }
    mults[pos] = 0;
}

/// Orbit of `seed` under the group generated by the simple reflections,
/// found breadth-first and returned sorted.
pub fn weyl_orbit(seed: &PicClass, cap: usize) -> Result<Vec<PicClass>> {
    let roots = simple_roots(seed.r);
    let mut seen = HashSet::from([*seed]);
    let mut queue = VecDeque::from([*seed]);
    while let Some(d) = queue.pop_front() {
        for root in &roots {
            let image = reflect_unchecked(&d, root);
            if seen.insert(image) {
                if seen.len() > cap {
                    return Err(Error::OrbitCap(cap));
                }
                queue.push_back(image);
            }
        }
    }
    let mut orbit: Vec<PicClass> = seen.into_iter().collect();
    orbit.sort();
    Ok(orbit)
}

/// A word in the simple reflections (indices into [`simple_roots`]) that
/// carries `from` to `to`, applied left to right; `None` if `to` is not in
/// the orbit of `from`.
pub fn weyl_word(from: &PicClass, to: &PicClass, cap: usize) -> Result<Option<Vec<usize>>> {
    same_lattice(from, to)?;
    let roots = simple_roots(from.r);
    let mut parent: HashMap<PicClass, Option<(PicClass, usize)>> = HashMap::from([(*from, None)]);
    let mut queue = VecDeque::from([*from]);
    while let Some(d) = queue.pop_front() {
        if d == *to {
            let mut word = Vec::new();
            let mut cur = d;
            while let Some(Some((prev, i))) = parent.get(&cur) {
                word.push(*i);
                cur = *prev;
            }
            word.reverse();
            return Ok(Some(word));
        }
        for (i, root) in roots.iter().enumerate() {
            let image = reflect_unchecked(&d, root);
            if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(image) {
                v.insert(Some((d, i)));
                if parent.len() > cap {
                    return Err(Error::OrbitCap(cap));
                }
                queue.push_back(image);
            }
        }
    }
    Ok(None)
}

/// Applies the reflections of `word` to `d`, first letter first.
pub fn apply_word(word: &[usize], d: &PicClass) -> PicClass {
    let roots = simple_roots(d.r);
    word.iter().fold(*d, |acc, &i| reflect_unchecked(&acc, &roots[i]))
}

/// Applies the inverse of `word` (its letters in reverse order).
pub fn apply_word_inverse(word: &[usize], d: &PicClass) -> PicClass {
    let roots = simple_roots(d.r);
    word.iter().rev().fold(*d, |acc, &i| reflect_unchecked(&acc, &roots[i]))
}

/// Per-`r` context: canonical class, simple roots and the cached set of
/// exceptional classes.
#[derive(Debug)]
pub struct DelPezzoLattice {
    r: u8,
    canonical: PicClass,
    simple_roots: Vec<PicClass>,
    exceptional: OnceLock<Vec<PicClass>>,
}

static LATTICES: [OnceLock<DelPezzoLattice>; 6] = [const { OnceLock::new() }; 6];

/// Shared lattice context for `X_r`.
pub fn lattice(r: u8) -> Result<&'static DelPezzoLattice> {
    let r = check_r(r as i64)?;
    Ok(LATTICES[(r - MIN_R) as usize].get_or_init(|| DelPezzoLattice::new(r).expect("checked rank")))
}

impl DelPezzoLattice {
    pub fn new(r: u8) -> Result<Self> {
        let r = check_r(r as i64)?;
        Ok(Self {
            r,
            canonical: PicClass::canonical(r),
            simple_roots: simple_roots(r),
            exceptional: OnceLock::new(),
        })
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    pub fn canonical(&self) -> PicClass {
        self.canonical
    }

    pub fn simple_roots(&self) -> &[PicClass] {
        &self.simple_roots
    }

    pub fn exceptional(&self) -> &[PicClass] {
        self.exceptional
            .get_or_init(|| exceptional_curves(self.r).expect("checked rank"))
    }

    fn check(&self, d: &PicClass) {
        assert_eq!(d.r, self.r, "class from X_{} used with X_{}", d.r, self.r);
    }

    /// Nonnegative against every exceptional class.
    pub fn is_nef(&self, d: &PicClass) -> bool {
        self.check(d);
        self.exceptional().iter().all(|e| d.dot(e) >= 0)
    }

    /// Dimension of the space of global sections of `d`.
    ///
    /// Exceptional classes meeting `d` negatively are fixed components and
    /// are peeled off one at a time (most negative first, lexicographically
    /// smallest on ties). Each step lowers the degree by one; the loop ends
    /// at negative degree (no sections) or at a nef class, where Riemann–Roch
    /// gives `h0 = ((D,D) + (D,-K)) / 2 + 1`.
    pub fn h0(&self, d: &PicClass) -> u64 {
        self.check(d);
        let mut d = *d;
        loop {
            if d.is_zero() {
                return 1;
            }
            if d.degree() < 0 {
                return 0;
            }
            let mut worst: Option<(i64, PicClass)> = None;
            for e in self.exceptional() {
                let p = d.dot(e);
                if p < 0 && worst.map_or(true, |(w, _)| p < w) {
                    worst = Some((p, *e));
                }
            }
            match worst {
                Some((_, e)) => d = d - e,
                None => {
                    let twice = d.self_intersection() + d.degree();
                    debug_assert!(twice >= 0 && twice % 2 == 0, "Riemann-Roch parity for {d}");
                    return (twice / 2 + 1) as u64;
                }
            }
        }
    }

    pub fn is_effective(&self, d: &PicClass) -> bool {
        self.h0(d) > 0
    }
}

pub fn is_nef(d: &PicClass) -> bool {
    lattice(d.r).expect("PicClass carries a checked rank").is_nef(d)
}

pub fn h0(d: &PicClass) -> u64 {
    lattice(d.r).expect("PicClass carries a checked rank").h0(d)
}

pub fn is_effective(d: &PicClass) -> bool {
    h0(d) > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> PicClass {
        s.parse().unwrap()
    }

    #[test]
    fn pairing_examples() {
        let l0 = PicClass::line(6);
        assert_eq!(pair(&l0, &l0).unwrap(), 1);
        assert_eq!(pair(&PicClass::canonical(6), &PicClass::canonical(6)).unwrap(), 3);
        let l1 = PicClass::basis(6, 1);
        assert_eq!(pair(&l1, &l1).unwrap(), -1);
        assert_eq!(pair(&class("1,-1,-1,0"), &class("1,-1,0,-1")).unwrap(), 0);
        assert!(matches!(
            pair(&PicClass::line(3), &PicClass::line(4)),
            Err(Error::ContextMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn degree_examples() {
        for r in MIN_R..=MAX_R {
            assert_eq!(degree(&PicClass::anticanonical(r)), 9 - r as i64);
            assert_eq!(degree(&PicClass::zero(r)), 0);
        }
    }

    #[test]
    fn exceptional_r3() {
        let expected: Vec<PicClass> = ["0,1,0,0", "0,0,1,0", "0,0,0,1", "1,-1,-1,0", "1,-1,0,-1", "1,0,-1,-1"]
            .iter()
            .map(|s| class(s))
            .collect();
        let mut expected = expected;
        expected.sort();
        assert_eq!(exceptional_curves(3).unwrap(), expected);
        assert!(exceptional_curves(9).is_err());
        assert!(exceptional_curves(2).is_err());
    }

    #[test]
    fn reflection_examples() {
        let r = 5;
        let l1 = PicClass::basis(r, 1);
        let l2 = PicClass::basis(r, 2);
        assert_eq!(reflect(&l1, &(l1 - l2)).unwrap(), l2);
        for a in simple_roots(r) {
            assert_eq!(reflect(&PicClass::canonical(r), &a).unwrap(), PicClass::canonical(r));
        }
        assert!(matches!(reflect(&l1, &l1), Err(Error::NotARoot(_))));
    }

    #[test]
    fn trivial_orbits() {
        for r in MIN_R..=MAX_R {
            let k = PicClass::canonical(r);
            assert_eq!(weyl_orbit(&k, DEFAULT_ORBIT_CAP).unwrap(), vec![k]);
        }
        assert_eq!(weyl_orbit(&PicClass::anticanonical(8), 10).unwrap(), vec![PicClass::anticanonical(8)]);
        assert!(matches!(weyl_orbit(&PicClass::basis(8, 8), 100), Err(Error::OrbitCap(100))));
    }

    #[test]
    fn weyl_word_reaches_target() {
        let r = 7;
        let e = class("3,-2,-1,-1,-1,-1,-1,-1");
        let word = weyl_word(&e, &PicClass::basis(r, 7), DEFAULT_ORBIT_CAP).unwrap().unwrap();
        assert_eq!(apply_word(&word, &e), PicClass::basis(r, 7));
        assert_eq!(apply_word_inverse(&word, &PicClass::basis(r, 7)), e);
        assert_eq!(weyl_word(&e, &PicClass::line(r), DEFAULT_ORBIT_CAP).unwrap(), None);
    }

    #[test]
    fn nef_examples() {
        for r in MIN_R..=MAX_R {
            assert!(is_nef(&PicClass::anticanonical(r)));
            assert!(!is_nef(&PicClass::basis(r, 1)));
            assert!(is_nef(&PicClass::line(r)));
        }
    }

    #[test]
    fn h0_examples() {
        for r in MIN_R..=MAX_R {
            assert_eq!(h0(&PicClass::anticanonical(r)), 10 - r as u64);
            assert_eq!(h0(&PicClass::line(r)), 3);
            assert_eq!(h0(&-PicClass::line(r)), 0);
            for e in lattice(r).unwrap().exceptional() {
                assert_eq!(h0(e), 1);
                assert!(is_effective(e));
            }
            assert!(is_effective(&PicClass::zero(r)));
            assert!(!is_effective(&PicClass::canonical(r)));
        }
        assert_eq!(h0(&class("3,-1,-1,-1,-1,-1")), 5);
        // l_1 - l_2 has degree 0 but is not effective.
        assert_eq!(h0(&class("0,1,-1,0,0")), 0);
        // conics through 6 points at r = 6: none
        assert_eq!(h0(&class("2,-1,-1,-1,-1,-1,-1")), 0);
    }

    #[test]
    fn parse_and_display() {
        let d = class("3,-1,-1,-1,-1,-1");
        assert_eq!(d.r(), 5);
        assert_eq!(d.to_string(), "3,-1,-1,-1,-1,-1");
        assert!("1,2".parse::<PicClass>().is_err());
        assert!("1,a,0,0".parse::<PicClass>().is_err());
        assert_eq!(serde_json::to_string(&d).unwrap(), "\"3,-1,-1,-1,-1,-1\"");
        let back: PicClass = serde_json::from_str("\"3,-1,-1,-1,-1,-1\"").unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn pullback_appends_zero() {
        let d = class("3,-1,-1,-1");
        assert_eq!(d.pullback().unwrap(), class("3,-1,-1,-1,0"));
        assert!(PicClass::line(8).pullback().is_err());
    }
}
