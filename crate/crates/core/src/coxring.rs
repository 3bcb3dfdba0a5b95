//! The anticanonical grading of `Cox(X_r)`: graded pieces, Hilbert
//! numerators and the structural checks derived from them.
//!
//! The ring is generated in degree one by the sections of the exceptional
//! classes, plus two sections of `-K` when `r = 8`. The effective classes of
//! degree `n` are therefore exactly the `n`-fold sums of generator classes,
//! and `dim Cox_n` is the sum of `h0` over them.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nagata::{self, PointConfiguration, SectionCache};
use crate::picard::{self, check_r, lattice, PicClass, DEFAULT_ORBIT_CAP};
use crate::poly::MultiPoly;

/// Degree-one generator classes: the exceptional classes, and `-K` at `r = 8`.
pub fn generator_classes(r: u8) -> Result<Vec<PicClass>> {
    let lat = lattice(r)?;
    let mut gens = lat.exceptional().to_vec();
    if r == 8 {
        gens.push(PicClass::anticanonical(8));
    }
    gens.sort();
    Ok(gens)
}

/// Number of degree-one generators: one per exceptional curve, plus two
/// independent sections of `-K` when `r = 8`.
pub fn generator_count(r: u8) -> Result<u64> {
    let e = lattice(r)?.exceptional().len() as u64;
    Ok(if r == 8 { e + 2 } else { e })
}

fn check_deadline(deadline: Option<(Instant, Duration)>) -> Result<()> {
    match deadline {
        Some((end, budget)) if Instant::now() > end => Err(Error::TimeBox(budget)),
        _ => Ok(()),
    }
}

/// Effective classes of each degree `0..=max_degree`, sorted, built as
/// iterated sumsets of the generator classes.
pub fn effective_classes_by_degree(r: u8, max_degree: u32) -> Result<Vec<Vec<PicClass>>> {
    effective_classes_timed(r, max_degree, None)
}

fn effective_classes_timed(
    r: u8,
    max_degree: u32,
    deadline: Option<(Instant, Duration)>,
) -> Result<Vec<Vec<PicClass>>> {
    let gens = generator_classes(r)?;
    // Sums are sharded by plane degree a_0, so shards never overlap.
    let mut gens_by_degree: BTreeMap<i32, Vec<PicClass>> = BTreeMap::new();
    for g in &gens {
        gens_by_degree.entry(g.plane_degree()).or_default().push(*g);
    }
    let mut levels = vec![vec![PicClass::zero(r)]];
    for _ in 0..max_degree {
        check_deadline(deadline)?;
        let prev = levels.last().expect("degree 0 present");
        let mut prev_by_degree: BTreeMap<i32, Vec<PicClass>> = BTreeMap::new();
        for d in prev {
            prev_by_degree.entry(d.plane_degree()).or_default().push(*d);
        }
        let mut targets: Vec<i32> = prev_by_degree
            .keys()
            .flat_map(|a| gens_by_degree.keys().map(move |b| a + b))
            .collect();
        targets.sort_unstable();
        targets.dedup();
        let shards: Vec<Vec<PicClass>> = targets
            .par_iter()
            .map(|&t| {
                let mut shard = FxHashSet::default();
                for (a, ds) in &prev_by_degree {
                    let Some(gs) = gens_by_degree.get(&(t - a)) else { continue };
                    for d in ds {
                        for g in gs {
                            shard.insert(*d + *g);
                        }
                    }
                }
                let mut shard: Vec<PicClass> = shard.into_iter().collect();
                shard.sort_unstable();
                shard
            })
            .collect();
        levels.push(shards.concat());
    }
    Ok(levels)
}

pub fn effective_classes_of_degree(r: u8, n: i64) -> Result<Vec<PicClass>> {
    if n < 0 {
        return Err(Error::InvalidInput(format!("degree {n} is negative")));
    }
    let mut levels = effective_classes_by_degree(r, n as u32)?;
    Ok(levels.pop().expect("nonempty"))
}

fn total_h0(r: u8, classes: &[PicClass]) -> u64 {
    let lat = lattice(r).expect("checked rank");
    classes.par_iter().map(|d| lat.h0(d)).sum()
}

/// `dim Cox(X_r)_n`.
pub fn cox_dimension(r: u8, n: i64) -> Result<u64> {
    let classes = effective_classes_of_degree(r, n)?;
    Ok(total_h0(r, &classes))
}

#[derive(Debug, Clone, Serialize)]
pub struct GradedEntry {
    pub degree: u32,
    pub classes: Vec<PicClass>,
    pub dimension: u64,
}

/// Effective classes and dimensions of `Cox(X_r)_n` for `n = 0..=max_degree`.
#[derive(Debug, Clone, Serialize)]
pub struct GradedDimensionTable {
    pub r: u8,
    pub entries: Vec<GradedEntry>,
}

impl GradedDimensionTable {
    pub fn compute(r: u8, max_degree: u32) -> Result<Self> {
        Self::compute_timed(r, max_degree, None)
    }

    fn compute_timed(r: u8, max_degree: u32, deadline: Option<(Instant, Duration)>) -> Result<Self> {
        let levels = effective_classes_timed(r, max_degree, deadline)?;
        let mut entries = Vec::with_capacity(levels.len());
        for (n, classes) in levels.into_iter().enumerate() {
            check_deadline(deadline)?;
            let dimension = total_h0(r, &classes);
            entries.push(GradedEntry { degree: n as u32, classes, dimension });
        }
        Ok(Self { r, entries })
    }

    pub fn dimensions(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.dimension).collect()
    }

    /// `degree<TAB>class_count<TAB>dimension`, one line per degree, with a header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("degree\tclasses\tdimension\n");
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\n", e.degree, e.classes.len(), e.dimension));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Hilbert series data of `Cox(X_r)` for the anticanonical grading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertData {
    pub r: u8,
    pub krull_dim: u32,
    /// `dim Cox_n` for `n = 0..=dims.len() - 1`.
    pub dims: Vec<u64>,
    /// Numerator coefficients `c_0, ..., c_s` with `c_s != 0`.
    pub numerator: Vec<i64>,
    /// Coefficients of the truncated product beyond the expected degree `2r - 6`.
    pub guard: Vec<i64>,
    pub a_invariant: i64,
}

impl HilbertData {
    /// Multiplies the truncated series `sum dims[n] t^n` by
    /// `(1 - t)^(r + 3)`. Coefficients past `expected_degree` form the guard
    /// and must vanish; trailing zeros are trimmed from the numerator.
    pub fn from_dimensions(r: u8, dims: &[u64], expected_degree: usize) -> Result<Self> {
        let krull_dim = r as u32 + 3;
        if dims.len() < expected_degree + 2 {
            return Err(Error::InvalidInput(format!(
                "need dimensions through degree {}, have {}",
                expected_degree + 1,
                dims.len()
            )));
        }
        let mut factor = vec![1i64];
        for _ in 0..krull_dim {
            let mut next = vec![0i64; factor.len() + 1];
            for (i, c) in factor.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c;
            }
            factor = next;
        }
        let coeffs: Vec<i64> = (0..dims.len())
            .map(|n| {
                (0..=n.min(factor.len() - 1))
                    .map(|k| factor[k] * dims[n - k] as i64)
                    .sum()
            })
            .collect();
        let guard = coeffs[expected_degree + 1..].to_vec();
        if guard.iter().any(|&c| c != 0) {
            return Err(Error::Internal(format!(
                "numerator does not terminate at degree {expected_degree}: guard coefficients {guard:?}"
            )));
        }
        let mut numerator = coeffs[..=expected_degree].to_vec();
        while numerator.len() > 1 && numerator.last() == Some(&0) {
            numerator.pop();
        }
        let s = numerator.len() as i64 - 1;
        Ok(Self {
            r,
            krull_dim,
            dims: dims.to_vec(),
            numerator,
            guard,
            a_invariant: s - krull_dim as i64,
        })
    }

    pub fn numerator_degree(&self) -> usize {
        self.numerator.len() - 1
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HilbertOptions {
    /// Permit `r = 7` (degree 9 over a rank-8 lattice).
    pub allow_r7: bool,
    /// Abort with [`Error::TimeBox`] once this much wall time has passed.
    pub time_box: Option<Duration>,
}

/// Expected numerator degree `2r - 6`, i.e. a-invariant `r - 9`.
pub fn expected_numerator_degree(r: u8) -> usize {
    2 * r as usize - 6
}

/// Hilbert numerator from the graded dimensions through degree `2r - 5`
/// (one guard degree past the expected numerator degree).
pub fn hilbert_numerator(r: u8, opts: HilbertOptions) -> Result<HilbertData> {
    let r = check_r(r as i64)?;
    match r {
        8 => return Err(Error::Unsupported("the r = 8 Hilbert numerator needs degree 11 over a rank-9 lattice".into())),
        7 if !opts.allow_r7 => {
            return Err(Error::Unsupported("r = 7 requires the time-boxed opt-in".into()))
        }
        _ => {}
    }
    let deadline = opts.time_box.map(|b| (Instant::now() + b, b));
    let expected = expected_numerator_degree(r);
    let table = GradedDimensionTable::compute_timed(r, expected as u32 + 1, deadline)?;
    HilbertData::from_dimensions(r, &table.dimensions(), expected)
}

pub fn gorenstein_palindrome_check(h: &HilbertData) -> bool {
    let c = &h.numerator;
    c.iter().eq(c.iter().rev())
}

/// The a-invariant equals `r - 9`, i.e. the numerator has degree `2r - 6`.
pub fn a_invariant_check(h: &HilbertData) -> bool {
    h.numerator_degree() as i64 - (h.r as i64 + 3) == h.r as i64 - 9
}

/// Quadratic relations among the degree-one generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCount {
    pub generators: u64,
    pub symmetric_square: u64,
    pub product_span: u64,
    pub relations: u64,
}

/// Largest `r` [`quadratic_relation_count`] accepts unless told otherwise.
pub const DEFAULT_RELATION_MAX_R: u8 = 5;

/// `dim Sym^2(Cox_1)` minus the dimension of the span of all products of
/// two degree-one sections, computed in the invariant-ring model.
pub fn quadratic_relation_count(points: &PointConfiguration, max_r: u8) -> Result<RelationCount> {
    let r = points.r();
    if r > max_r {
        return Err(Error::Resource(format!("relation count at r = {r} exceeds the limit r <= {max_r}")));
    }
    let mut cache = SectionCache::new(points);
    let mut sections: Vec<(PicClass, MultiPoly)> = Vec::new();
    for g in generator_classes(r)? {
        for b in &cache.get(&g)?.basis {
            sections.push((g, b.clone()));
        }
    }
    let n = sections.len() as u64;
    let mut by_target: BTreeMap<PicClass, Vec<MultiPoly>> = BTreeMap::new();
    for i in 0..sections.len() {
        for j in i..sections.len() {
            let target = sections[i].0 + sections[j].0;
            by_target.entry(target).or_default().push(&sections[i].1 * &sections[j].1);
        }
    }
    let span: u64 = by_target
        .par_iter()
        .map(|(_, polys)| nagata::span_rank(polys) as u64)
        .sum();
    let symmetric_square = n * (n + 1) / 2;
    Ok(RelationCount { generators: n, symmetric_square, product_span: span, relations: symmetric_square - span })
}

/// Outcome of a chart comparison for the blow-down of `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartCheck {
    pub exceptional: PicClass,
    pub base_class: PicClass,
    /// The pullback of `base_class` in the basis adapted to `exceptional`.
    pub pullback: PicClass,
    pub base_h0: u64,
    pub pullback_h0: u64,
    /// `h0(pullback + k E)` for `k = 0..=max_k`.
    pub saturation_h0: Vec<u64>,
}

impl ChartCheck {
    pub fn holds(&self) -> bool {
        self.base_h0 == self.pullback_h0 && self.saturation_h0.iter().all(|&h| h == self.base_h0)
    }
}

/// Compares `h0` of `d2` on `X_{r-1}` with `h0` of its pullback to `X_r`
/// under the contraction of `e`, and with `h0` of the pullback plus `k e`.
///
/// The contraction of `l_r` pulls `(a_0, ..., a_{r-1})` back to
/// `(a_0, ..., a_{r-1}, 0)`. A general `e` is first moved to `l_r` by a Weyl
/// element `w`; the pullback along the contraction of `e` is then
/// `w^{-1}` applied to that class.
pub fn chart_check(r: u8, e: &PicClass, d2: &PicClass, max_k: u32) -> Result<ChartCheck> {
    let r = check_r(r as i64)?;
    let small = check_r(r as i64 - 1).map_err(|_| Error::Unsupported(format!("no blow-down target for r = {r}")))?;
    if e.r() != r {
        return Err(Error::ContextMismatch { left: r, right: e.r() });
    }
    if d2.r() != small {
        return Err(Error::ContextMismatch { left: small, right: d2.r() });
    }
    let lat = lattice(r)?;
    if lat.exceptional().binary_search(e).is_err() {
        return Err(Error::NotExceptional(e.to_string()));
    }
    let target = PicClass::basis(r, r as usize);
    let word = picard::weyl_word(e, &target, DEFAULT_ORBIT_CAP)?
        .ok_or_else(|| Error::Internal(format!("{e} is not in the Weyl orbit of l_{r}")))?;
    let pullback = picard::apply_word_inverse(&word, &d2.pullback()?);
    debug_assert_eq!(pullback.dot(e), 0);
    let saturation_h0 = (0..=max_k).map(|k| lat.h0(&(pullback + k as i32 * *e))).collect();
    Ok(ChartCheck {
        exceptional: *e,
        base_class: *d2,
        pullback,
        base_h0: lattice(small)?.h0(d2),
        pullback_h0: lat.h0(&pullback),
        saturation_h0,
    })
}

/// [`chart_check`] for `E = l_r` with both sides computed by interpolation:
/// `X_{r-1}` uses the first `r - 1` points of `points`.
pub fn chart_check_interpolated(points: &PointConfiguration, d2: &PicClass, max_k: u32) -> Result<ChartCheck> {
    let r = points.r();
    let small_points = points.prefix(r as usize - 1)?;
    let e = PicClass::basis(r, r as usize);
    let pullback = d2.pullback()?;
    let saturation_h0 = (0..=max_k)
        .map(|k| nagata::component_dimension(points, &(pullback + k as i32 * e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChartCheck {
        exceptional: e,
        base_class: *d2,
        pullback,
        base_h0: nagata::component_dimension(&small_points, d2)?,
        pullback_h0: nagata::component_dimension(points, &pullback)?,
        saturation_h0,
    })
}

/// Data from one run of the `r = 8` generation experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapProbe {
    pub class: PicClass,
    /// Ways of writing the class as a sum of exceptional classes.
    pub factorizations: usize,
    /// Dimension of the component of the subring generated by the
    /// exceptional sections.
    pub subring_dim: u64,
    /// Dimension of the full component.
    pub full_dim: u64,
}

/// Multisets of `n` exceptional classes (nondecreasing in the sorted list)
/// summing to `d`.
pub fn exceptional_factorizations(d: &PicClass) -> Result<Vec<Vec<PicClass>>> {
    let lat = lattice(d.r())?;
    let n = d.degree();
    let mut out = Vec::new();
    if n < 0 {
        return Ok(out);
    }
    fn go(
        lat: &picard::DelPezzoLattice,
        rest: PicClass,
        left: i64,
        start: usize,
        cur: &mut Vec<PicClass>,
        out: &mut Vec<Vec<PicClass>>,
    ) {
        if left == 0 {
            if rest.is_zero() {
                out.push(cur.clone());
            }
            return;
        }
        if !lat.is_effective(&rest) {
            return;
        }
        let exc = lat.exceptional();
        for i in start..exc.len() {
            cur.push(exc[i]);
            go(lat, rest - exc[i], left - 1, i, cur, out);
            cur.pop();
        }
    }
    go(lat, *d, n, 0, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Compares, for `r = 8`, the component of class `d` in the subring
/// generated by exceptional sections with the full component.
pub fn gap_probe(points: &PointConfiguration, d: &PicClass, max_factor_degree: u32) -> Result<GapProbe> {
    if points.r() != 8 {
        return Err(Error::Unsupported(format!("the gap probe concerns r = 8, got r = {}", points.r())));
    }
    if d.r() != 8 {
        return Err(Error::ContextMismatch { left: 8, right: d.r() });
    }
    if d.degree() > max_factor_degree as i64 {
        return Err(Error::Resource(format!(
            "class of degree {} exceeds the factor limit {max_factor_degree}",
            d.degree()
        )));
    }
    let factorizations = exceptional_factorizations(d)?;
    let mut cache = SectionCache::new(points);
    let subring_dim = if factorizations.is_empty() {
        0
    } else {
        nagata::products_span_dim(&mut cache, &factorizations, d)? as u64
    };
    Ok(GapProbe {
        class: *d,
        factorizations: factorizations.len(),
        subring_dim,
        full_dim: nagata::component_dimension(points, d)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nagata::sample_points;

    #[test]
    fn degree_zero_and_one() {
        for r in 3..=8 {
            assert_eq!(effective_classes_of_degree(r, 0).unwrap(), vec![PicClass::zero(r)]);
            assert_eq!(cox_dimension(r, 0).unwrap(), 1);
        }
        assert_eq!(effective_classes_of_degree(3, 1).unwrap(), lattice(3).unwrap().exceptional());
        assert_eq!(effective_classes_of_degree(8, 1).unwrap().len(), 241);
        assert!(effective_classes_of_degree(4, -1).is_err());
    }

    #[test]
    fn generator_counts() {
        assert_eq!(generator_count(4).unwrap(), 10);
        assert_eq!(generator_count(7).unwrap(), 56);
        assert_eq!(generator_count(8).unwrap(), 242);
    }

    #[test]
    fn r3_is_a_polynomial_ring() {
        let dims: Vec<u64> = (0..4).map(|n| cox_dimension(3, n).unwrap()).collect();
        assert_eq!(dims, vec![1, 6, 21, 56]);
        let h = hilbert_numerator(3, HilbertOptions::default()).unwrap();
        assert_eq!(h.numerator, vec![1]);
        assert_eq!(h.a_invariant, -6);
    }

    #[test]
    fn r4_grassmannian() {
        assert_eq!(cox_dimension(4, 1).unwrap(), 10);
        assert_eq!(cox_dimension(4, 2).unwrap(), 50);
        let h = hilbert_numerator(4, HilbertOptions::default()).unwrap();
        assert_eq!(h.numerator, vec![1, 3, 1]);
        assert_eq!(h.a_invariant, -5);
        assert!(gorenstein_palindrome_check(&h));
        assert!(a_invariant_check(&h));
    }

    #[test]
    fn numerator_checks_on_constructed_data() {
        let mk = |r: u8, numerator: Vec<i64>| HilbertData {
            r,
            krull_dim: r as u32 + 3,
            dims: vec![],
            a_invariant: numerator.len() as i64 - 1 - (r as i64 + 3),
            numerator,
            guard: vec![0],
        };
        assert!(gorenstein_palindrome_check(&mk(4, vec![1, 3, 1])));
        assert!(gorenstein_palindrome_check(&mk(3, vec![1])));
        assert!(!gorenstein_palindrome_check(&mk(4, vec![1, 2, 3])));
        assert!(a_invariant_check(&mk(3, vec![1])));
        assert!(a_invariant_check(&mk(4, vec![1, 3, 1])));
        assert!(!a_invariant_check(&mk(4, vec![1, 3, 3, 1])));
    }

    #[test]
    fn truncation_guard_rejects_inconsistent_series() {
        // 1/(1-t)^7 has numerator 1; perturb degree 3.
        let mut dims: Vec<u64> = (0..4u64).map(|n| (1..=6).map(|k| n + k).product::<u64>() / 720).collect();
        assert!(HilbertData::from_dimensions(4, &dims, 2).is_ok());
        dims[3] += 1;
        assert!(matches!(HilbertData::from_dimensions(4, &dims, 2), Err(Error::Internal(_))));
    }

    #[test]
    fn unsupported_hilbert_ranks() {
        assert!(matches!(hilbert_numerator(8, HilbertOptions::default()), Err(Error::Unsupported(_))));
        assert!(matches!(hilbert_numerator(7, HilbertOptions::default()), Err(Error::Unsupported(_))));
        let tiny = HilbertOptions { allow_r7: true, time_box: Some(Duration::ZERO) };
        assert!(matches!(hilbert_numerator(7, tiny), Err(Error::TimeBox(_))));
    }

    #[test]
    fn relation_counts_small() {
        let r3 = quadratic_relation_count(&sample_points(3, 1).unwrap(), 5).unwrap();
        assert_eq!(r3.relations, 0);
        let r4 = quadratic_relation_count(&sample_points(4, 1).unwrap(), 5).unwrap();
        assert_eq!((r4.symmetric_square, r4.product_span, r4.relations), (55, 50, 5));
        assert!(matches!(
            quadratic_relation_count(&sample_points(6, 1).unwrap(), 5),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn chart_examples() {
        let d2 = PicClass::anticanonical(3);
        let c = chart_check(4, &PicClass::basis(4, 4), &d2, 3).unwrap();
        assert_eq!((c.base_h0, c.pullback_h0), (7, 7));
        assert!(c.holds());
        let z = chart_check(4, &PicClass::basis(4, 4), &PicClass::zero(3), 3).unwrap();
        assert_eq!((z.base_h0, z.pullback_h0), (1, 1));
        assert!(matches!(
            chart_check(4, &PicClass::line(4), &d2, 1),
            Err(Error::NotExceptional(_))
        ));
        let other = "1,-1,-1,0,0".parse::<PicClass>().unwrap();
        let c = chart_check(4, &other, &d2, 2).unwrap();
        assert_eq!(c.pullback.dot(&other), 0);
        assert!(c.holds());
        let pts = sample_points(4, 2).unwrap();
        let i = chart_check_interpolated(&pts, &d2, 2).unwrap();
        assert_eq!((i.base_h0, i.pullback_h0), (7, 7));
        assert!(i.holds());
    }

    #[test]
    fn gap_probe_small_cases() {
        let pts = sample_points(8, 1).unwrap();
        let k = gap_probe(&pts, &PicClass::anticanonical(8), 2).unwrap();
        assert_eq!((k.subring_dim, k.full_dim), (0, 2));
        let e = PicClass::basis(8, 8);
        let g = gap_probe(&pts, &e, 2).unwrap();
        assert_eq!((g.subring_dim, g.full_dim), (1, 1));
        assert!(matches!(gap_probe(&pts, &(3 * e), 2), Err(Error::Resource(_))));
        assert!(matches!(gap_probe(&sample_points(7, 1).unwrap(), &PicClass::basis(7, 1), 2), Err(Error::Unsupported(_))));
    }
}
