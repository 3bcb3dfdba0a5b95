//! The Cox ring of `X_r` as the invariant ring `k[V]^U`.
//!
//! `V` has coordinates `x_1, y_1, ..., x_r, y_r` and the unipotent group `U`
//! acts by `x_j -> x_j + u_j y_j`, `y_j -> y_j`, where `u` ranges over the
//! solutions of `sum_j a_ij u_j = 0` (`a` the 3 x r matrix of point
//! coordinates). The component of class `d l_0 - sum m_j l_j` consists of
//! `F(w_0, w_1, w_2) / prod y_j^{m_j}` for ternary forms `F` of degree `d`
//! with multiplicity at least `m_j` at `P_j`.
//!
//! Polynomials on `V` use variable `2j` for `x_{j+1}` and `2j + 1` for
//! `y_{j+1}`; the formal group parameter `t`, when present, is variable `2r`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{self, format_rational, parse_rational, rat, Rational, RationalMatrix};
use crate::picard::{check_r, PicClass};
use crate::poly::{Exponents, MultiPoly};

/// Number of attempts [`sample_points`] makes before giving up.
pub const SAMPLE_ATTEMPTS: usize = 1000;

/// Coordinate range of sampled points.
pub const SAMPLE_RANGE: i64 = 20;

pub fn x_var(j: usize) -> usize {
    2 * j
}

pub fn y_var(j: usize) -> usize {
    2 * j + 1
}

/// `x1, y1, ..., xr, yr` followed by `t` when `with_t`.
pub fn variable_names(r: u8, with_t: bool) -> Vec<String> {
    let mut names: Vec<String> = (1..=r).flat_map(|j| [format!("x{j}"), format!("y{j}")]).collect();
    if with_t {
        names.push("t".into());
    }
    names
}

/// Reason a configuration fails general position. Point indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Collinear { points: [usize; 3] },
    SixOnConic { points: [usize; 6] },
    SingularCubic { double_point: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Collinear { points } => write!(f, "points {points:?} are collinear"),
            Violation::SixOnConic { points } => write!(f, "points {points:?} lie on a conic"),
            Violation::SingularCubic { double_point } => write!(
                f,
                "a cubic through all eight points is singular at point {double_point}"
            ),
        }
    }
}

/// Record of the checks a configuration passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub r: u8,
    pub lines_checked: usize,
    pub conics_checked: usize,
    pub cubics_checked: usize,
}

/// `r` points of the projective plane with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfiguration {
    r: u8,
    points: Vec<[Rational; 3]>,
    validated: bool,
}

#[derive(Serialize, Deserialize)]
struct PointsFile {
    r: i64,
    points: Vec<[String; 3]>,
}

impl PointConfiguration {
    pub fn new(points: Vec<[Rational; 3]>) -> Result<Self> {
        let r = check_r(points.len() as i64)?;
        if let Some(j) = points.iter().position(|p| p.iter().all(Zero::is_zero)) {
            return Err(Error::InvalidInput(format!("point {} is the zero vector", j + 1)));
        }
        Ok(Self { r, points, validated: false })
    }

    pub fn from_integers(points: &[[i64; 3]]) -> Result<Self> {
        Self::new(points.iter().map(|p| p.map(rat)).collect())
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    pub fn points(&self) -> &[[Rational; 3]] {
        &self.points
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    /// Runs the general position checks and marks the configuration as valid.
    pub fn validated(mut self) -> Result<Self> {
        validate_general_position(&self).map_err(Error::Degenerate)?;
        self.validated = true;
        Ok(self)
    }

    /// The first `k` points (a blow-down of the last `r - k` exceptional
    /// curves). Subsets of a configuration in general position stay in
    /// general position, so the certificate carries over.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        let mut out = Self::new(self.points[..k.min(self.points.len())].to_vec())?;
        out.validated = self.validated;
        Ok(out)
    }

    fn require_valid(&self) -> Result<()> {
        if self.validated {
            Ok(())
        } else {
            Err(Error::NotValidated)
        }
    }

    /// `a_ij`: coordinate `i` of point `j`.
    pub fn coord(&self, i: usize, j: usize) -> &Rational {
        &self.points[j][i]
    }

    pub fn to_json(&self) -> String {
        let file = PointsFile {
            r: self.r as i64,
            points: self.points.iter().map(|p| p.each_ref().map(format_rational)).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Parses a points file. The result is not yet validated.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: PointsFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("points file: {e}")))?;
        let r = check_r(file.r)?;
        if file.points.len() != r as usize {
            return Err(Error::InvalidInput(format!(
                "points file declares r = {r} but lists {} points",
                file.points.len()
            )));
        }
        let points = file
            .points
            .iter()
            .map(|p| Ok([parse_rational(&p[0])?, parse_rational(&p[1])?, parse_rational(&p[2])?]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }
}

fn det3(a: &[Rational; 3], b: &[Rational; 3], c: &[Rational; 3]) -> Rational {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Exponent triples of the ternary monomials of degree `d`, in a fixed order.
pub fn plane_monomials(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::with_capacity(((d + 1) * (d + 2) / 2) as usize);
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push([i, j, d - i - j]);
        }
    }
    out
}

fn eval_monomial(e: &[u32; 3], p: &[Rational; 3]) -> Rational {
    let mut v = Rational::one();
    for k in 0..3 {
        if e[k] > 0 {
            v *= num_traits::pow(p[k].clone(), e[k] as usize);
        }
    }
    v
}

fn eval_partial(e: &[u32; 3], var: usize, p: &[Rational; 3]) -> Rational {
    if e[var] == 0 {
        return Rational::zero();
    }
    let mut f = *e;
    f[var] -= 1;
    rat(e[var] as i64) * eval_monomial(&f, p)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Checks that no three points are collinear, no six lie on a conic and,
/// for `r = 8`, no cubic through all eight points is singular at one of them.
/// Returns the first violation found, in that order of checks.
pub fn validate_general_position(points: &PointConfiguration) -> std::result::Result<Certificate, Violation> {
    let p = &points.points;
    let n = p.len();
    let mut cert = Certificate { r: points.r, lines_checked: 0, conics_checked: 0, cubics_checked: 0 };

    for s in subsets(n, 3) {
        cert.lines_checked += 1;
        if det3(&p[s[0]], &p[s[1]], &p[s[2]]).is_zero() {
            return Err(Violation::Collinear { points: [s[0] + 1, s[1] + 1, s[2] + 1] });
        }
    }

    let conics = plane_monomials(2);
    for s in subsets(n, 6) {
        cert.conics_checked += 1;
        let rows: Vec<Vec<Rational>> =
            s.iter().map(|&j| conics.iter().map(|e| eval_monomial(e, &p[j])).collect()).collect();
        let m = RationalMatrix::from_rows(6, rows).expect("6 columns");
        if exactla::rank(&m) < 6 {
            let w: Vec<usize> = s.iter().map(|j| j + 1).collect();
            return Err(Violation::SixOnConic { points: w.try_into().expect("six indices") });
        }
    }

    if n == 8 {
        let cubics = plane_monomials(3);
        for i in 0..n {
            cert.cubics_checked += 1;
            let mut rows: Vec<Vec<Rational>> = (0..n)
                .filter(|&k| k != i)
                .map(|k| cubics.iter().map(|e| eval_monomial(e, &p[k])).collect())
                .collect();
            for var in 0..3 {
                rows.push(cubics.iter().map(|e| eval_partial(e, var, &p[i])).collect());
            }
            let m = RationalMatrix::from_rows(10, rows).expect("10 columns");
            if exactla::rank(&m) < 10 {
                return Err(Violation::SingularCubic { double_point: i + 1 });
            }
        }
    }
    Ok(cert)
}

/// `w_i = sum_j a_ij x_j prod_{k != j} y_k`, the cleared form of
/// `y_1 ... y_r sum_j a_ij z_j` with `z_j = x_j / y_j`.
pub fn w_forms(points: &PointConfiguration) -> Result<[MultiPoly; 3]> {
    points.require_valid()?;
    let r = points.r as usize;
    let nvars = 2 * r;
    Ok(std::array::from_fn(|i| {
        MultiPoly::from_terms(
            nvars,
            (0..r).map(|j| {
                let mut e = vec![1; nvars];
                for k in 0..r {
                    e[x_var(k)] = 0;
                }
                e[x_var(j)] = 1;
                e[y_var(j)] = 0;
                (e, points.coord(i, j).clone())
            }),
        )
    }))
}

/// Basis of `{u : sum_j a_ij u_j = 0, i = 0, 1, 2}`, of dimension `r - 3`.
pub fn constraint_basis(points: &PointConfiguration) -> Vec<Vec<Rational>> {
    let r = points.r as usize;
    let rows = (0..3).map(|i| (0..r).map(|j| points.coord(i, j).clone()).collect()).collect();
    exactla::kernel_basis(&RationalMatrix::from_rows(r, rows).expect("r columns"))
}

fn check_constraints(points: &PointConfiguration, u: &[Rational]) -> Result<()> {
    if u.len() != points.r as usize {
        return Err(Error::InvalidInput(format!("u has {} entries, expected {}", u.len(), points.r)));
    }
    for i in 0..3 {
        let s: Rational = u.iter().enumerate().map(|(j, uj)| points.coord(i, j) * uj).sum();
        if !s.is_zero() {
            return Err(Error::InvalidInput(format!("u violates constraint {i}: sum = {}", format_rational(&s))));
        }
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// Rows `0..=n` of Pascal's triangle.
fn pascal(n: u32) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for i in 1..=n as usize {
        let prev = &rows[i - 1];
        let row = (0..=i)
            .map(|k| match k {
                0 => BigInt::one(),
                k if k == i => BigInt::one(),
                k => &prev[k - 1] + &prev[k],
            })
            .collect();
        rows.push(row);
    }
    rows
}

fn lcm_of_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()))
}

/// Expands `p(x + s u y, y)` where `s` is the scalar 1 (`formal = false`)
/// or a new trailing variable `t` (`formal = true`).
///
/// Works over the integers: `p` is cleared of denominators, and the shift
/// of `x_j` by `(a/b) y_j` is applied to `b^n p` where `n` is the largest
/// power of `x_j`. The accumulated scale is divided out at the end. One
/// `x_j` is shifted at a time, with like terms merged in between.
fn substitute_shift(p: &MultiPoly, u: &[Rational], formal: bool) -> MultiPoly {
    let r = u.len();
    let nvars = 2 * r + usize::from(formal);
    let mut scale = lcm_of_denominators(p.terms().map(|(_, c)| c));
    let mut cur: FxHashMap<Exponents, BigInt> = p
        .terms()
        .map(|(e, c)| {
            let mut e = e.clone();
            e.resize(nvars, 0);
            (e, c.numer() * (&scale / c.denom()))
        })
        .collect();
    for j in 0..r {
        if u[j].is_zero() {
            continue;
        }
        let top = cur.keys().map(|e| e[x_var(j)]).max().unwrap_or(0);
        let (a, b) = (u[j].numer(), u[j].denom());
        let apow: Vec<BigInt> = (0..=top).map(|k| a.pow(k)).collect();
        let bpow: Vec<BigInt> = (0..=top).map(|k| b.pow(k)).collect();
        let binom = pascal(top);
        let mut next: FxHashMap<Exponents, BigInt> = FxHashMap::default();
        next.reserve(cur.len() * 2);
        for (e, c) in cur {
            let n = e[x_var(j)];
            for k in 0..=n {
                let mut g = e.clone();
                g[x_var(j)] -= k;
                g[y_var(j)] += k;
                if formal {
                    g[2 * r] += k;
                }
                let (k, n) = (k as usize, n as usize);
                let factor = &binom[n][k] * &apow[k] * &bpow[top as usize - k];
                *next.entry(g).or_default() += &c * factor;
            }
        }
        next.retain(|_, c| !c.is_zero());
        cur = next;
        scale *= &bpow[top as usize];
    }
    MultiPoly::from_terms(nvars, cur.into_iter().map(|(e, c)| (e, Rational::new(c, scale.clone()))))
}

/// Action of the group element `u`: `x_j -> x_j + u_j y_j`, `y_j -> y_j`.
pub fn u_action(points: &PointConfiguration, p: &MultiPoly, u: &[Rational]) -> Result<MultiPoly> {
    check_constraints(points, u)?;
    Ok(substitute_shift(p, u, false))
}

/// Action of the one-parameter subgroup `t u`, with `t` a formal variable
/// appended after the coordinates of `V`.
pub fn u_action_formal(points: &PointConfiguration, p: &MultiPoly, u: &[Rational]) -> Result<MultiPoly> {
    check_constraints(points, u)?;
    Ok(substitute_shift(p, u, true))
}

/// Whether `p` is fixed by `t u` as a polynomial identity in `t`.
pub fn is_u_invariant(points: &PointConfiguration, p: &MultiPoly, u: &[Rational]) -> Result<bool> {
    let moved = u_action_formal(points, p, u)?;
    Ok(moved == p.extend_vars(2 * points.r as usize + 1))
}

/// Affine chart at `p`: index of the coordinate of largest absolute value
/// (lowest index on ties) and the two remaining affine coordinates.
fn affine_chart(p: &[Rational; 3]) -> (usize, [usize; 2], [Rational; 2]) {
    let mut c = 0;
    for k in 1..3 {
        if p[k].abs() > p[c].abs() {
            c = k;
        }
    }
    let others: [usize; 2] = match c {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let vals = others.map(|k| &p[k] / &p[c]);
    (c, others, vals)
}

/// Linear conditions on degree-`d` ternary forms (coefficients ordered as
/// [`plane_monomials`]) for multiplicity at least `m_j` at each point.
///
/// At each point with `m_j > 0`, in the affine chart of its largest
/// coordinate, the rows are the Taylor coefficients of order `< m_j`, i.e.
/// the partial derivatives up to the factorial normalisation.
pub fn interpolation_matrix(points: &PointConfiguration, d: u32, mults: &[i32]) -> RationalMatrix {
    let monos = plane_monomials(d);
    let mut rows = Vec::new();
    for (j, &m) in mults.iter().enumerate() {
        if m <= 0 {
            continue;
        }
        let (_, others, [p, q]) = affine_chart(&points.points[j]);
        let ppow = powers(&p, d);
        let qpow = powers(&q, d);
        for order in 0..m as u32 {
            for a in 0..=order {
                let b = order - a;
                rows.push(
                    monos
                        .iter()
                        .map(|e| {
                            let (i, k) = (e[others[0]], e[others[1]]);
                            if i < a || k < b {
                                Rational::zero()
                            } else {
                                Rational::from_integer(binomial(i, a) * binomial(k, b))
                                    * &ppow[(i - a) as usize]
                                    * &qpow[(k - b) as usize]
                            }
                        })
                        .collect(),
                );
            }
        }
    }
    RationalMatrix::from_rows(monos.len(), rows).expect("uniform rows")
}

fn powers(x: &Rational, d: u32) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for _ in 0..d {
        let next = out.last().unwrap() * x;
        out.push(next);
    }
    out
}

fn check_class(points: &PointConfiguration, d: &PicClass) -> Result<()> {
    if d.r() != points.r {
        return Err(Error::ContextMismatch { left: points.r, right: d.r() });
    }
    Ok(())
}

/// Dimension of the component of class `d` computed by fat-point
/// interpolation: forms of degree `a_0` with multiplicity at least
/// `max(m_j, 0)` at `P_j`.
pub fn component_dimension(points: &PointConfiguration, d: &PicClass) -> Result<u64> {
    points.require_valid()?;
    check_class(points, d)?;
    let deg = d.plane_degree();
    if deg < 0 {
        return Ok(0);
    }
    let mults = d.multiplicities();
    let cols = (deg as u64 + 1) * (deg as u64 + 2) / 2;
    let m = interpolation_matrix(points, deg as u32, &mults);
    Ok(cols - exactla::rank(&m) as u64)
}

/// Basis of one multihomogeneous component of `k[V]^U`.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub class: PicClass,
    /// Elements of `k[V]` in the variables `x_1, y_1, ..., x_r, y_r`.
    pub basis: Vec<MultiPoly>,
    /// The corresponding ternary forms `F` (variables `X_0, X_1, X_2`).
    pub plane_model: Vec<MultiPoly>,
}

impl SectionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Polynomial in `z_1, ..., z_r` (`r <= 8`) with integer coefficients.
type ZPoly = FxHashMap<[u8; 8], BigInt>;

fn z_mul_linear(p: &ZPoly, lin: &[BigInt]) -> ZPoly {
    let mut out = ZPoly::default();
    out.reserve(p.len() * lin.len());
    for (e, c) in p {
        for (j, a) in lin.iter().enumerate() {
            if !a.is_zero() {
                let mut f = *e;
                f[j] += 1;
                *out.entry(f).or_default() += c * a;
            }
        }
    }
    out
}

fn z_add_scaled(acc: &mut ZPoly, p: &ZPoly, s: &BigInt) {
    for (e, c) in p {
        *acc.entry(*e).or_default() += c * s;
    }
}

/// Substitutes `w_i` into a ternary form of degree `d` by way of
/// `F(w) = (y_1...y_r)^d F(L(z))` with `L_i(z) = sum_j a_ij z_j`; the
/// monomial `z^e` becomes `x^e prod y_j^{d - e_j}`.
///
/// `F(L(z))` is evaluated by nested Horner schemes over integer multiples
/// of the `L_i`. Terms of `form` of degree other than `d` are ignored.
pub fn substitute_w(points: &PointConfiguration, form: &MultiPoly, d: u32) -> MultiPoly {
    let r = points.r as usize;
    let n = d as usize;
    // L_i = lin[i] / den[i] with lin[i] integral
    let den: Vec<BigInt> = (0..3).map(|i| lcm_of_denominators((0..r).map(|j| points.coord(i, j)))).collect();
    let lin: Vec<Vec<BigInt>> = (0..3)
        .map(|i| (0..r).map(|j| (points.coord(i, j) * Rational::from_integer(den[i].clone())).to_integer()).collect())
        .collect();
    let form_den = lcm_of_denominators(form.terms().map(|(_, c)| c));
    // coefficient of w0^a w1^b w2^(d-a-b), scaled by form_den * prod_i den[i]^(d - e_i)
    let mut coeff = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for (e, c) in form.terms() {
        if e.iter().sum::<u32>() != d {
            continue;
        }
        let mut v = c.numer() * (&form_den / c.denom());
        for i in 0..3 {
            v *= den[i].pow(d - e[i]);
        }
        coeff[e[0] as usize][e[1] as usize] = v;
    }
    let one: ZPoly = [([0u8; 8], BigInt::one())].into_iter().collect();
    let mut w2pow = vec![one];
    for k in 0..n {
        let next = z_mul_linear(&w2pow[k], &lin[2]);
        w2pow.push(next);
    }
    let mut outer: Option<ZPoly> = None;
    for a in (0..=n).rev() {
        let m = n - a;
        let mut inner = ZPoly::default();
        for b in (0..=m).rev() {
            if b < m {
                inner = z_mul_linear(&inner, &lin[1]);
            }
            if !coeff[a][b].is_zero() {
                z_add_scaled(&mut inner, &w2pow[m - b], &coeff[a][b]);
            }
        }
        outer = Some(match outer {
            None => inner,
            Some(o) => {
                let mut o = z_mul_linear(&o, &lin[0]);
                z_add_scaled(&mut o, &inner, &BigInt::one());
                o
            }
        });
    }
    let scale = form_den * den.iter().map(|l| l.pow(d)).product::<BigInt>();
    MultiPoly::from_terms(
        2 * r,
        outer.unwrap_or_default().into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| {
            let mut f = vec![0; 2 * r];
            for j in 0..r {
                f[x_var(j)] = e[j] as u32;
                f[y_var(j)] = d - e[j] as u32;
            }
            (f, Rational::new(c, scale.clone()))
        }),
    )
}

/// Explicit basis of the component of class `d`.
///
/// Kernel vectors of the interpolation system give the forms `F`; each
/// `F(w)` is divided exactly by `prod y_j^{max(m_j, 0)}` and multiplied by
/// `prod y_j^{max(-m_j, 0)}`. A failed division is reported as an internal
/// error since it cannot happen for points in general position.
pub fn section_basis(points: &PointConfiguration, d: &PicClass) -> Result<SectionSpace> {
    points.require_valid()?;
    check_class(points, d)?;
    let r = points.r as usize;
    let deg = d.plane_degree();
    let mut space = SectionSpace { class: *d, basis: Vec::new(), plane_model: Vec::new() };
    if deg < 0 {
        return Ok(space);
    }
    let deg = deg as u32;
    let mults = d.multiplicities();
    let monos = plane_monomials(deg);
    let kernel = exactla::kernel_basis(&interpolation_matrix(points, deg, &mults));

    let mut divisor = vec![0u32; 2 * r];
    let mut multiplier = vec![0u32; 2 * r];
    for (j, &m) in mults.iter().enumerate() {
        if m > 0 {
            divisor[y_var(j)] = m as u32;
        } else {
            multiplier[y_var(j)] = (-m) as u32;
        }
    }

    for v in kernel {
        let coeffs = exactla::primitive_integer_vector(&v);
        let form = MultiPoly::from_terms(
            3,
            monos.iter().zip(coeffs).map(|(e, c)| (e.to_vec(), Rational::from_integer(c))),
        );
        let full = substitute_w(points, &form, deg);
        let quotient = full.div_monomial(&divisor).ok_or_else(|| {
            Error::Internal(format!("F(w) for class {d} is not divisible by the y-monomial"))
        })?;
        space.basis.push(quotient.mul_monomial(&multiplier));
        space.plane_model.push(form);
    }
    Ok(space)
}

/// Memoised section bases for one configuration.
pub struct SectionCache<'a> {
    points: &'a PointConfiguration,
    spaces: HashMap<PicClass, SectionSpace>,
}

impl<'a> SectionCache<'a> {
    pub fn new(points: &'a PointConfiguration) -> Self {
        Self { points, spaces: HashMap::new() }
    }

    pub fn points(&self) -> &PointConfiguration {
        self.points
    }

    pub fn get(&mut self, d: &PicClass) -> Result<&SectionSpace> {
        if !self.spaces.contains_key(d) {
            let space = section_basis(self.points, d)?;
            self.spaces.insert(*d, space);
        }
        Ok(&self.spaces[d])
    }
}

fn all_products(cache: &mut SectionCache<'_>, factors: &[PicClass]) -> Result<Vec<MultiPoly>> {
    let nvars = 2 * cache.points().r as usize;
    let mut products = vec![MultiPoly::one(nvars)];
    for f in factors {
        let space = cache.get(f)?;
        if space.basis.is_empty() {
            return Ok(Vec::new());
        }
        let mut next = Vec::with_capacity(products.len() * space.basis.len());
        for p in &products {
            for b in &space.basis {
                next.push(p * b);
            }
        }
        products = next;
    }
    Ok(products)
}

/// Rank of a list of polynomials as vectors of coefficients.
pub fn span_rank(polys: &[MultiPoly]) -> usize {
    let monomials: BTreeSet<&Exponents> = polys.iter().flat_map(|p| p.terms().map(|(e, _)| e)).collect();
    if monomials.is_empty() {
        return 0;
    }
    let index: HashMap<&Exponents, usize> = monomials.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let cols = monomials.len();
    let rows: Vec<Vec<BigInt>> = polys
        .iter()
        .map(|p| {
            let mut row = vec![Rational::zero(); cols];
            for (e, c) in p.terms() {
                row[index[e]] = c.clone();
            }
            exactla::primitive_integer_vector(&row)
        })
        .collect();
    exactla::integer_rank(rows, cols)
}

/// Dimension of the span of all products `s_1 ... s_k` inside the
/// component `target`, over every listed factorisation and every choice of
/// one basis element per factor.
pub fn products_span_dim(
    cache: &mut SectionCache<'_>,
    factorizations: &[Vec<PicClass>],
    target: &PicClass,
) -> Result<usize> {
    let points = cache.points();
    points.require_valid()?;
    check_class(points, target)?;
    let mut all = Vec::new();
    for factors in factorizations {
        let sum = factors.iter().fold(PicClass::zero(target.r()), |acc, f| acc + *f);
        if sum != *target {
            return Err(Error::InvalidInput(format!(
                "factor classes sum to {sum}, not to the target {target}"
            )));
        }
        all.extend(all_products(cache, factors)?);
    }
    Ok(span_rank(&all))
}

/// [`products_span_dim`] for a single factorisation.
pub fn product_span_dim(points: &PointConfiguration, factors: &[PicClass], target: &PicClass) -> Result<usize> {
    let mut cache = SectionCache::new(points);
    products_span_dim(&mut cache, &[factors.to_vec()], target)
}

/// Rank of the Jacobian matrix of `polys` at `point`.
pub fn jacobian_rank(polys: &[MultiPoly], point: &[Rational]) -> usize {
    let n = point.len();
    let rows = polys
        .iter()
        .map(|p| (0..n).map(|i| p.derivative(i).eval(point)).collect())
        .collect();
    exactla::rank(&RationalMatrix::from_rows(n, rows).expect("uniform rows"))
}

const STANDARD: [[i64; 3]; 4] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];

fn sample_with(r: u8, seed: u64, standard_prefix: usize) -> Result<PointConfiguration> {
    check_r(r as i64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut pts: Vec<[i64; 3]> = STANDARD[..standard_prefix].to_vec();
        while pts.len() < r as usize {
            let p = [(); 3].map(|_| rng.gen_range(-SAMPLE_RANGE..=SAMPLE_RANGE));
            pts.push(p);
        }
        if pts.iter().any(|p| p.iter().all(|&c| c == 0)) {
            continue;
        }
        let cfg = PointConfiguration::from_integers(&pts)?;
        if let Ok(valid) = cfg.validated() {
            return Ok(valid);
        }
    }
    Err(Error::Resource(format!(
        "no configuration in general position after {SAMPLE_ATTEMPTS} attempts"
    )))
}

/// Validated configuration: for `r >= 4` the first four points are
/// `(1:0:0), (0:1:0), (0:0:1), (1:1:1)`; the other coordinates are seeded
/// uniform integers in `[-20, 20]`.
pub fn sample_points(r: u8, seed: u64) -> Result<PointConfiguration> {
    sample_with(r, seed, if r >= 4 { 4 } else { 0 })
}

/// Like [`sample_points`] but with every coordinate random, so two seeds give
/// different coordinates even for `r <= 4`.
pub fn sample_points_free(r: u8, seed: u64) -> Result<PointConfiguration> {
    sample_with(r, seed, 0)
}
