//! Small-weight eigenform data at levels 1 and 2, the quaternionic forms on
//! the Hurwitz order, the Eichler correspondence between them, toral periods
//! and Petersson norms.
//!
//! Level-2 cusp forms are cut out of `C[e2, E4]` by the constant terms at
//! both cusps. The Fricke involution acts by `e2 -> -e2`, `E4 -> 4 E4(2 tau)`,
//! so the constant term of `e2^a E4^b` at the cusp 0 is `(-1)^a 4^b`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{FromPrimitive, One, Signed, Zero};
use serde_json::json;

use crate::exact::matrix::Mat;
use crate::exact::powprod::PowerProduct;
use crate::exact::quadnum::QuadNum;
use crate::exact::{binom, primes_up_to, q, q_to_f64, qi, qpow, FieldElem, Scalar, Q};
use crate::heckechar::{unramified_character, HeckeCharacter};
use crate::quadfield::QuadField;
use crate::report::Report;
use crate::Error;

// ---------------------------------------------------------------------------
// q-expansions

/// `sum_{n <= N} a_n q^n`; `coeffs.len() = N + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    pub weight: u32,
    pub level: u32,
    pub coeffs: Vec<Q>,
}

fn all_integral(v: &[Q]) -> bool {
    v.iter().all(|c| c.is_integer())
}

impl QExpansion {
    pub fn new(weight: u32, level: u32, coeffs: Vec<Q>) -> Self {
        QExpansion { weight, level, coeffs }
    }

    /// Truncation order `N`.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Q {
        &self.coeffs[k]
    }

    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.n());
        QExpansion::new(self.weight, self.level, self.coeffs[..=n].to_vec())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.n().min(o.n());
        let c = (0..=n).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect();
        QExpansion::new(self.weight, self.level.max(o.level), c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        QExpansion::new(self.weight, self.level, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n().min(o.n());
        let coeffs = if all_integral(&self.coeffs[..=n]) && all_integral(&o.coeffs[..=n]) {
            let a: Vec<BigInt> = self.coeffs[..=n].iter().map(|c| c.to_integer()).collect();
            let b: Vec<BigInt> = o.coeffs[..=n].iter().map(|c| c.to_integer()).collect();
            let mut out = vec![BigInt::zero(); n + 1];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b[..=n - i].iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out.into_iter().map(Q::from_integer).collect()
        } else {
            let mut out = vec![Q::zero(); n + 1];
            for i in 0..=n {
                for j in 0..=n - i {
                    out[i + j] += &self.coeffs[i] * &o.coeffs[j];
                }
            }
            out
        };
        QExpansion::new(self.weight + o.weight, self.level.max(o.level), coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QExpansion::new(0, 1, {
            let mut c = vec![Q::zero(); self.n() + 1];
            c[0] = Q::one();
            c
        });
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `f(2 tau)`, truncated at the same order.
    pub fn raise(&self) -> Self {
        let n = self.n();
        let mut c = vec![Q::zero(); n + 1];
        for k in 0..=n / 2 {
            c[2 * k] = self.coeffs[k].clone();
        }
        QExpansion::new(self.weight, 2, c)
    }

    /// Sum at `z` in the upper half plane, in floating point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval_series(&self.coeffs_f64(), z)
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(q_to_f64).collect()
    }

    /// Plain-text cache: `label weight level N`, then the coefficients.
    pub fn to_cache(&self, label: &str) -> String {
        let mut s = format!("{} {} {} {}\n", label, self.weight, self.level, self.n());
        for c in &self.coeffs {
            let _ = writeln!(s, "{}", c);
        }
        s
    }

    pub fn from_cache(text: &str) -> Result<(String, Self), Error> {
        let bad = |m: &str| Error::Domain(format!("malformed q-expansion cache: {}", m));
        let mut lines = text.lines();
        let head: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if head.len() != 4 {
            return Err(bad("header"));
        }
        let weight: u32 = head[1].parse().map_err(|_| bad("weight"))?;
        let level: u32 = head[2].parse().map_err(|_| bad("level"))?;
        let n: usize = head[3].parse().map_err(|_| bad("N"))?;
        let coeffs = lines
            .take(n + 1)
            .map(|l| l.trim().parse::<Q>().map_err(|_| bad(l)))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.len() != n + 1 {
            return Err(bad("too few coefficients"));
        }
        Ok((head[0].to_string(), QExpansion::new(weight, level, coeffs)))
    }
}

fn eval_series(c: &[f64], z: Complex64) -> Complex64 {
    let qz = (Complex64::new(0.0, 2.0 * PI) * z).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        acc = acc * qz + a;
    }
    acc
}

pub fn bernoulli(k: usize) -> Q {
    let mut b = vec![Q::one()];
    for m in 1..=k {
        let mut s = Q::zero();
        for (j, bj) in b.iter().enumerate() {
            s += Q::from_integer(binom(m as u64 + 1, j as u64)) * bj;
        }
        b.push(-s / qi(m as i64 + 1));
    }
    b[k].clone()
}

fn sigma_power(n: u64, e: u32, odd_only: bool) -> BigInt {
    let mut s = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 && (!odd_only || d % 2 == 1) {
            s += BigInt::from(d).pow(e);
        }
    }
    s
}

/// Level-1 Eisenstein series normalized with constant term 1.
pub fn eisenstein(k: u32, n: usize) -> Result<QExpansion, Error> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::Domain(format!("no holomorphic Eisenstein series of weight {}", k)));
    }
    let c = qi(-2 * k as i64) / bernoulli(k as usize);
    let mut coeffs = vec![Q::one()];
    for m in 1..=n as u64 {
        coeffs.push(&c * Q::from_integer(sigma_power(m, k - 1, false)));
    }
    Ok(QExpansion::new(k, 1, coeffs))
}

/// `2 E2(2 tau) - E2(tau) = 1 + 24 sum sigma_1^odd(n) q^n`.
pub fn e2_level2(n: usize) -> QExpansion {
    let mut coeffs = vec![Q::one()];
    for m in 1..=n as u64 {
        coeffs.push(qi(24) * Q::from_integer(sigma_power(m, 1, true)));
    }
    QExpansion::new(2, 2, coeffs)
}

/// `eta(tau)^a eta(2 tau)^b` when the leading exponent `(a + 2b)/24` is integral.
pub fn eta_product(a: u32, b: u32, n: usize) -> Result<QExpansion, Error> {
    if (a + 2 * b) % 24 != 0 || (a + b) % 2 != 0 {
        return Err(Error::Domain(format!("eta^{} eta_2^{} is not an integral-weight q-series", a, b)));
    }
    let shift = ((a + 2 * b) / 24) as usize;
    let mut c = vec![BigInt::zero(); n + 1];
    if shift > n {
        return Ok(QExpansion::new((a + b) / 2, if b > 0 { 2 } else { 1 }, c.into_iter().map(Q::from_integer).collect()));
    }
    c[0] = BigInt::one();
    let len = n - shift;
    let mut times = |step: usize, e: u32| {
        for m in (step..=len).step_by(step) {
            for _ in 0..e {
                for i in (m..=len).rev() {
                    let t = c[i - m].clone();
                    c[i] -= t;
                }
            }
        }
    };
    times(1, a);
    times(2, b);
    let mut out = vec![Q::zero(); n + 1];
    for i in 0..=len {
        out[i + shift] = Q::from_integer(c[i].clone());
    }
    Ok(QExpansion::new((a + b) / 2, if b > 0 { 2 } else { 1 }, out))
}

fn check_level(level: u32) -> Result<(), Error> {
    if level == 1 || level == 2 {
        Ok(())
    } else {
        Err(Error::Domain(format!("level {} is outside {{1, 2}}", level)))
    }
}

/// Monomial generators of `M_k(level)` with their constant terms at the
/// cusps (one cusp at level 1, two at level 2).
fn monomials(weight: u32, level: u32, n: usize) -> Result<Vec<(QExpansion, Vec<Q>)>, Error> {
    check_level(level)?;
    if weight % 2 != 0 {
        return Ok(vec![]);
    }
    let mut out = vec![];
    if level == 1 {
        let e4 = eisenstein(4, n)?;
        let e6 = eisenstein(6, n)?;
        for b in 0..=weight / 6 {
            let rest = weight - 6 * b;
            if rest % 4 == 0 {
                let f = e4.pow(rest / 4).mul(&e6.pow(b));
                out.push((f, vec![Q::one()]));
            }
        }
    } else {
        let e2 = e2_level2(n);
        let e4 = eisenstein(4, n)?;
        for b in 0..=weight / 4 {
            let a = (weight - 4 * b) / 2;
            let mut f = e2.pow(a).mul(&e4.pow(b));
            f.level = 2;
            let at_zero = qi(if a % 2 == 0 { 1 } else { -1 }) * qpow(4, b as i32);
            out.push((f, vec![Q::one(), at_zero]));
        }
    }
    Ok(out)
}

/// Reduced row echelon basis of the span, with pivot positions.
fn echelon(forms: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<usize>) {
    if forms.is_empty() {
        return (vec![], vec![]);
    }
    let m = Mat::from_rows(forms.to_vec());
    let (r, piv) = m.rref();
    let rows = (0..piv.len())
        .map(|i| (0..r.cols).map(|j| r.get(i, j).clone()).collect())
        .collect();
    (rows, piv)
}

/// A cusp-form space with an echelonized basis: `basis[i]` has coefficient
/// `delta_ij` at `pivots[j]`.
#[derive(Clone, Debug)]
pub struct CuspSpace {
    pub weight: u32,
    pub level: u32,
    pub basis: Vec<QExpansion>,
    pub pivots: Vec<usize>,
}

impl CuspSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.basis.first().map_or(0, |b| b.n())
    }

    /// Coordinates of `f` read off at the pivots, if `f` lies in the span.
    pub fn coords(&self, f: &QExpansion) -> Option<Vec<Q>> {
        let c: Vec<Q> = self.pivots.iter().map(|&k| f.coeffs.get(k).cloned().unwrap_or_default()).collect();
        let back = self.combine(&c);
        let n = back.n().min(f.n());
        (0..=n).all(|k| back.coeffs[k] == f.coeffs[k]).then_some(c)
    }

    pub fn combine(&self, c: &[Q]) -> QExpansion {
        let mut out = QExpansion::new(self.weight, self.level, vec![Q::zero(); self.n() + 1]);
        for (ci, b) in c.iter().zip(&self.basis) {
            if !ci.is_zero() {
                out = out.add(&b.scale(ci));
            }
        }
        out
    }

    /// Matrix of `T_p` (or `U_p` for `p | level`) in basis coordinates;
    /// column `i` is the image of `basis[i]`.
    pub fn hecke_matrix(&self, p: u64) -> Result<Mat<Q>, Error> {
        let need = self.pivots.last().map_or(0, |&x| x);
        if (self.n() / p as usize) < need.max(1) {
            return Err(Error::Numeric(format!(
                "truncation insufficient: T_{} needs N >= {} but N = {}",
                p,
                p as usize * need.max(1),
                self.n()
            )));
        }
        let mut cols = vec![];
        for b in &self.basis {
            let t = hecke_tp(b, p);
            let c = self.coords(&t).ok_or_else(|| {
                Error::Numeric(format!("T_{} image left the span; truncation insufficient", p))
            })?;
            cols.push(c);
        }
        Ok(Mat::from_cols(&cols))
    }
}

/// The cusp forms of the given weight and level, echelonized to order `n`.
pub fn basis(weight: u32, level: u32, n: usize) -> Result<CuspSpace, Error> {
    if weight > 30 {
        return Err(Error::Domain(format!("weight {} beyond the desk-scale range", weight)));
    }
    let gens = monomials(weight, level, n)?;
    let cusps = if level == 1 { 1 } else { 2 };
    // constant-term functionals, one row per cusp
    let cons = Mat::from_rows((0..cusps).map(|c| gens.iter().map(|(_, t)| t[c].clone()).collect()).collect());
    let kernel = if gens.is_empty() { vec![] } else { cons.kernel() };
    let forms: Vec<Vec<Q>> = kernel
        .iter()
        .map(|v| {
            let mut acc = vec![Q::zero(); n + 1];
            for (c, (g, _)) in v.iter().zip(&gens) {
                for (a, b) in acc.iter_mut().zip(&g.coeffs) {
                    *a += c * b;
                }
            }
            acc
        })
        .collect();
    let (rows, pivots) = echelon(&forms);
    if rows.len() < forms.len() {
        return Err(Error::Numeric(format!(
            "truncation insufficient: rank {} < {} at N = {}",
            rows.len(),
            forms.len(),
            n
        )));
    }
    Ok(CuspSpace {
        weight,
        level,
        basis: rows.into_iter().map(|c| QExpansion::new(weight, level, c)).collect(),
        pivots,
    })
}

/// `(T_p f)_n = a_{pn} + p^{k-1} a_{n/p}`, with the second term dropped when
/// `p` divides the level.
pub fn hecke_tp(f: &QExpansion, p: u64) -> QExpansion {
    let p = p as usize;
    let n = f.n() / p;
    let bad = f.level as usize % p == 0;
    let pk = qpow(p as i64, f.weight as i32 - 1);
    let c = (0..=n)
        .map(|m| {
            let mut v = f.coeffs[p * m].clone();
            if !bad && m % p == 0 {
                v += &pk * &f.coeffs[m / p];
            }
            v
        })
        .collect();
    QExpansion::new(f.weight, f.level, c)
}

// ---------------------------------------------------------------------------
// Exact eigen-decomposition

/// Field elements that may turn out rational.
pub trait RationalPart: FieldElem {
    fn rational(&self) -> Option<Q>;
}

impl RationalPart for Q {
    fn rational(&self) -> Option<Q> {
        Some(self.clone())
    }
}

impl RationalPart for QuadNum {
    fn rational(&self) -> Option<Q> {
        self.y.is_zero().then(|| self.x.clone())
    }
}

/// Monic characteristic polynomial `c_0 + ... + c_n x^n` (Faddeev-LeVerrier).
pub fn charpoly<F: FieldElem>(a: &Mat<F>) -> Vec<F> {
    let n = a.rows;
    let mut c = vec![F::nil(); n + 1];
    c[n] = F::unit();
    let id = Mat::<F>::identity(n);
    let mut m = Mat::<F>::zeros(n, n);
    for k in 1..=n {
        m = a.mul(&m).add(&id.scale(&c[n - k + 1]));
        let am = a.mul(&m);
        let mut tr = F::nil();
        for i in 0..n {
            tr = tr.plus(am.get(i, i));
        }
        c[n - k] = tr.negate().scale(&q(1, k as i64));
    }
    c
}

fn poly_eval_q(c: &[Q], x: &Q) -> Q {
    c.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
}

fn durand_kerner(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let lead = c[d];
    let mut s: f64 = 0.0;
    for (i, a) in c[..d].iter().enumerate() {
        s = s.max((a / lead).abs().powf(1.0 / (d - i) as f64));
    }
    let s = if s > 0.0 { s } else { 1.0 };
    let norm: Vec<f64> = (0..=d).map(|i| c[i] / lead / s.powi((d - i) as i32)).collect();
    let f = |z: Complex64| norm.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = f(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z.into_iter().map(|r| r * s).collect()
}

/// Best rational approximations of `x` by continued fractions.
fn convergents(x: f64, max_den: i64) -> Vec<Q> {
    let mut out = vec![];
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        let Some(ab) = BigInt::from_f64(a) else { break };
        let h2 = &ab * &h1 + &h0;
        let k2 = &ab * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(Q::new(h2.clone(), k2.clone()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

/// Distinct rational roots of a polynomial with rational coefficients.
pub fn rational_roots(c: &[Q]) -> Vec<Q> {
    let d = c.len() - 1;
    if d == 0 {
        return vec![];
    }
    if d == 1 {
        return vec![-&c[0] / &c[1]];
    }
    let cf: Vec<f64> = c.iter().map(q_to_f64).collect();
    let mut out: Vec<Q> = vec![];
    for r in durand_kerner(&cf) {
        if r.im.abs() > 1e-6 * r.norm().max(1.0) {
            continue;
        }
        let mut cands = convergents(r.re, 1 << 20);
        if let Some(base) = BigInt::from_f64(r.re.round()) {
            for e in -2..=2 {
                cands.push(Q::from_integer(&base + e));
            }
        }
        for x in cands {
            if poly_eval_q(c, &x).is_zero() && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

fn restrict<F: FieldElem>(t: &Mat<F>, w: &Mat<F>) -> Option<Mat<F>> {
    let cols: Option<Vec<Vec<F>>> = (0..w.cols).map(|j| w.solve(&t.mul_vec(&w.col(j)))).collect();
    cols.map(|c| Mat::from_cols(&c))
}

/// Common rational eigenvectors of commuting operators inside the span of
/// `space`. Parts of the space whose eigenvalues are irrational are dropped.
pub fn common_eigenvectors<F: RationalPart>(ops: &[Mat<F>], space: Vec<Vec<F>>) -> Vec<Vec<F>> {
    let mut done = vec![];
    let mut stack = if space.is_empty() { vec![] } else { vec![space] };
    'outer: while let Some(w) = stack.pop() {
        if w.len() == 1 {
            done.push(w[0].clone());
            continue;
        }
        let wm = Mat::from_cols(&w);
        for t in ops {
            let Some(r) = restrict(t, &wm) else { continue };
            let cp: Option<Vec<Q>> = charpoly(&r).iter().map(|c| c.rational()).collect();
            let Some(cp) = cp else { continue };
            let id = Mat::<F>::identity(r.rows);
            let mut pieces = vec![];
            for lam in rational_roots(&cp) {
                let k = r.sub(&id.scale(&F::from_q(&lam))).kernel();
                if !k.is_empty() {
                    pieces.push(k.iter().map(|v| wm.mul_vec(v)).collect::<Vec<_>>());
                }
            }
            if pieces.len() == 1 && pieces[0].len() == w.len() {
                continue;
            }
            stack.extend(pieces);
            continue 'outer;
        }
    }
    done
}

// ---------------------------------------------------------------------------
// Elliptic eigenforms

#[derive(Clone, Debug)]
pub struct EllipticEigenform {
    pub expansion: QExpansion,
    pub eigenvalues: BTreeMap<u64, Q>,
    /// `epsilon_2` for level-2 newforms.
    pub al_sign: Option<i32>,
}

impl EllipticEigenform {
    pub fn weight(&self) -> u32 {
        self.expansion.weight
    }

    pub fn level(&self) -> u32 {
        self.expansion.level
    }

    pub fn a(&self, n: usize) -> &Q {
        self.expansion.coeff(n)
    }

    /// `a_{p^2} = a_p^2 - p^{k-1}` at good `p` with `p^2 <= N`.
    pub fn hecke_relation_holds(&self) -> bool {
        let n = self.expansion.n();
        primes_up_to((n as f64).sqrt() as usize)
            .into_iter()
            .filter(|&p| self.level() as u64 % p != 0)
            .all(|p| {
                let p = p as usize;
                self.a(p * p) == &(self.a(p) * self.a(p) - qpow(p as i64, self.weight() as i32 - 1))
            })
    }

    /// `a_{mn} = a_m a_n` for coprime `m, n` with `mn <= N`.
    pub fn multiplicative(&self) -> bool {
        let n = self.expansion.n();
        for m in 2..=n {
            for k in 2..=n / m {
                if num_integer::gcd(m, k) == 1 && self.a(m * k) != &(self.a(m) * self.a(k)) {
                    return false;
                }
            }
        }
        true
    }
}

/// `U_2^2 = 2^{k-2}` on newforms, while an oldform eigenvalue of `U_2`
/// solves `x^2 - a_2 x + 2^{k-1} = 0` and cannot square to `2^{k-2}` under the
/// Ramanujan bound.
pub struct LevelTwoSpace {
    pub space: CuspSpace,
    pub new: Vec<Vec<Q>>,
    pub old: Vec<Vec<Q>>,
}

pub fn level_two_space(weight: u32, n: usize) -> Result<LevelTwoSpace, Error> {
    let space = basis(weight, 2, n)?;
    let d = space.dim();
    let new = if d == 0 {
        vec![]
    } else {
        let u2 = space.hecke_matrix(2)?;
        let c = qpow(2, weight as i32 - 2);
        u2.mul(&u2).sub(&Mat::identity(d).scale(&c)).kernel()
    };
    let level1 = basis(weight, 1, n)?;
    let mut old = vec![];
    for f in &level1.basis {
        for g in [f.clone(), f.raise()] {
            let mut g = g;
            g.level = 2;
            let c = space
                .coords(&g)
                .ok_or_else(|| Error::Numeric("level-raised form not in the level-2 span".into()))?;
            old.push(c);
        }
    }
    let all: Vec<Vec<Q>> = new.iter().chain(&old).cloned().collect();
    if d > 0 && Mat::from_cols(&all).rank() != d {
        return Err(Error::Numeric(format!(
            "new ({}) and old ({}) parts do not fill S_{}(2) of dimension {}",
            new.len(),
            old.len(),
            weight,
            d
        )));
    }
    Ok(LevelTwoSpace { space, new, old })
}

/// Dimension of the new subspace of `S_k(2)`.
pub fn new_dimension(weight: u32) -> Result<usize, Error> {
    Ok(level_two_space(weight, default_n(weight))?.new.len())
}

fn default_n(weight: u32) -> usize {
    let d = (weight / 4 + 1) as usize;
    (7 * (d + 2)).max(40)
}

const SPLIT_PRIMES: [u64; 3] = [3, 5, 7];

/// Primitive forms with rational eigenvalues (level 1: all eigenforms; level
/// 2: the newforms), expanded to order `n`.
pub fn eigenforms(weight: u32, level: u32, n: usize) -> Result<Vec<EllipticEigenform>, Error> {
    check_level(level)?;
    let n = n.max(default_n(weight));
    let (space, sub) = if level == 1 {
        let s = basis(weight, 1, n)?;
        let id: Vec<Vec<Q>> = (0..s.dim()).map(|i| (0..s.dim()).map(|j| qi((i == j) as i64)).collect()).collect();
        (s, id)
    } else {
        let l2 = level_two_space(weight, n)?;
        (l2.space, l2.new)
    };
    if sub.is_empty() {
        return Ok(vec![]);
    }
    let mut ops = vec![space.hecke_matrix(2)?];
    for p in SPLIT_PRIMES {
        ops.push(space.hecke_matrix(p)?);
    }
    let mut out = vec![];
    for v in common_eigenvectors(&ops, sub) {
        let f = space.combine(&v);
        let a1 = f.coeffs[1].clone();
        if a1.is_zero() {
            return Err(Error::Numeric("eigenvector with vanishing a_1".into()));
        }
        let f = f.scale(&a1.recip());
        let eigenvalues = primes_up_to(n).into_iter().map(|p| (p, f.coeffs[p as usize].clone())).collect();
        let mut e = EllipticEigenform {
            expansion: f,
            eigenvalues,
            al_sign: None,
        };
        if level == 2 {
            e.al_sign = Some(atkin_lehner_sign(&e)?);
        }
        out.push(e);
    }
    out.sort_by(|a, b| a.a(2).cmp(b.a(2)));
    Ok(out)
}

/// `epsilon_2` from `a_2 = -epsilon_2 2^{k/2 - 1}`.
pub fn atkin_lehner_sign(f: &EllipticEigenform) -> Result<i32, Error> {
    if f.level() != 2 || !f.a(1).is_one() {
        return Err(Error::Precondition("Atkin-Lehner sign needs a normalized level-2 form".into()));
    }
    let m = qpow(2, f.weight() as i32 / 2 - 1);
    if f.a(2) == &-&m {
        Ok(1)
    } else if f.a(2) == &m {
        Ok(-1)
    } else {
        Err(Error::Precondition(format!(
            "a_2 = {} is not +-2^{}: the form is not primitive",
            f.a(2),
            f.weight() / 2 - 1
        )))
    }
}

// ---------------------------------------------------------------------------
// The Hurwitz order and sigma_kappa

/// `(a + b i + c j + d k) / 2` stored as the doubled coordinates, all of
/// one parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hurwitz(pub [i64; 4]);

impl Hurwitz {
    pub fn mul(&self, o: &Self) -> Self {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        let raw = [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ];
        debug_assert!(raw.iter().all(|x| x % 2 == 0));
        Hurwitz(raw.map(|x| x / 2))
    }

    pub fn norm(&self) -> i64 {
        self.0.iter().map(|x| x * x).sum::<i64>() / 4
    }

    /// Image under `i -> diag(i, -i)`, `j -> [[0, 1], [-1, 0]]`.
    pub fn matrix(&self) -> [[QuadNum; 2]; 2] {
        let h = |x: i64| q(x, 2);
        let [a, b, c, d] = self.0;
        [
            [QuadNum::gauss(h(a), h(b)), QuadNum::gauss(h(c), h(d))],
            [QuadNum::gauss(h(-c), h(d)), QuadNum::gauss(h(a), h(-b))],
        ]
    }
}

/// All Hurwitz quaternions of norm `n`.
pub fn hurwitz_of_norm(n: i64) -> Vec<Hurwitz> {
    let t = 4 * n;
    let r = (t as f64).sqrt().ceil() as i64;
    let mut out = vec![];
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let rest = t - a * a - b * b - c * c;
                if rest < 0 {
                    continue;
                }
                let d = (rest as f64).sqrt().round() as i64;
                for d in if d == 0 { vec![0] } else { vec![d, -d] } {
                    if d * d == rest {
                        let par = a.rem_euclid(2);
                        if [b, c, d].iter().all(|x| x.rem_euclid(2) == par) {
                            out.push(Hurwitz([a, b, c, d]));
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

pub fn hurwitz_units() -> Vec<Hurwitz> {
    hurwitz_of_norm(1)
}

/// One representative per class `alpha O^x`, the lexicographically largest.
pub fn norm_classes(n: i64) -> Vec<Hurwitz> {
    let units = hurwitz_units();
    let mut reps: Vec<Hurwitz> = hurwitz_of_norm(n)
        .into_iter()
        .map(|a| units.iter().map(|u| a.mul(u)).max().unwrap())
        .collect();
    reps.sort();
    reps.dedup();
    reps
}

fn poly_mul_qn(a: &[QuadNum], b: &[QuadNum]) -> Vec<QuadNum> {
    let mut out = vec![QuadNum::nil(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].plus(&x.times(y));
        }
    }
    out
}

fn poly_pow_qn(a: &[QuadNum], e: u32) -> Vec<QuadNum> {
    let mut acc = vec![QuadNum::unit()];
    for _ in 0..e {
        acc = poly_mul_qn(&acc, a);
    }
    acc
}

/// `sigma_kappa(g)` on binary forms in the basis `X^{kappa-j} Y^j`:
/// `(sigma(g) P)(X, Y) = P((X, Y) g)`.
pub fn sigma(g: &[[QuadNum; 2]; 2], kappa: u32) -> Mat<QuadNum> {
    let k = kappa as usize;
    // X -> a X + c Y, Y -> b X + d Y, as polynomials in Y over X = 1
    let x_img = [g[0][0].clone(), g[1][0].clone()];
    let y_img = [g[0][1].clone(), g[1][1].clone()];
    let mut m = Mat::zeros(k + 1, k + 1);
    for j in 0..=k {
        let col = poly_mul_qn(&poly_pow_qn(&x_img, (k - j) as u32), &poly_pow_qn(&y_img, j as u32));
        for (r, v) in col.into_iter().enumerate() {
            m.set(r, j, v);
        }
    }
    m
}

/// `(1/24) sum_eps sigma(eps)`.
pub fn unit_projector(kappa: u32) -> Mat<QuadNum> {
    let units = hurwitz_units();
    let k = kappa as usize;
    let mut acc = Mat::zeros(k + 1, k + 1);
    for u in &units {
        acc = acc.add(&sigma(&u.matrix(), kappa));
    }
    acc.scale(&QuadNum::from_q(&q(1, units.len() as i64)))
}

#[derive(Clone, Debug)]
pub struct QuaternionicForm {
    pub kappa: u32,
    pub v: Vec<QuadNum>,
}

impl QuaternionicForm {
    /// `sigma(eps) v = v` for all 24 units, checked exactly.
    pub fn invariance_certificate(&self) -> bool {
        hurwitz_units().iter().all(|u| {
            let w = sigma(&u.matrix(), self.kappa).mul_vec(&self.v);
            w.iter().zip(&self.v).all(|(a, b)| a.eq_exact(b))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|c| c.is_nil())
    }
}

/// A basis of `V_kappa^{O^x}`.
pub fn quaternionic_space(kappa: u32) -> Result<Vec<QuaternionicForm>, Error> {
    if kappa % 2 != 0 || kappa > 30 {
        return Err(Error::Domain(format!("kappa = {} must be even and at most 30", kappa)));
    }
    let p = unit_projector(kappa);
    Ok(p.column_basis()
        .into_iter()
        .map(|v| QuaternionicForm { kappa, v })
        .collect())
}

/// `sum_{alpha in X_p / O^x} sigma(alpha)` on `V_kappa`.
pub fn hecke_operator(kappa: u32, p: u64) -> Mat<QuadNum> {
    let k = kappa as usize;
    let mut acc = Mat::zeros(k + 1, k + 1);
    for a in norm_classes(p as i64) {
        acc = acc.add(&sigma(&a.matrix(), kappa));
    }
    acc
}

#[derive(Clone, Debug)]
pub struct QuaternionicHecke {
    pub kappa: u32,
    pub p: u64,
    /// In the coordinates of `quaternionic_space(kappa)`.
    pub matrix: Mat<QuadNum>,
    pub charpoly: Vec<Q>,
    pub eigenvalues: Vec<Q>,
}

pub fn quaternionic_hecke(kappa: u32, p: u64) -> Result<QuaternionicHecke, Error> {
    if p == 2 || !crate::exact::is_prime(p) {
        return Err(Error::Domain(format!("T_{} needs an odd prime", p)));
    }
    let space = quaternionic_space(kappa)?;
    let t = hecke_operator(kappa, p);
    let matrix = if space.is_empty() {
        Mat::zeros(0, 0)
    } else {
        let w = Mat::from_cols(&space.iter().map(|f| f.v.clone()).collect::<Vec<_>>());
        restrict(&t, &w).ok_or_else(|| Error::Numeric("T_p does not preserve the invariants".into()))?
    };
    let charpoly: Vec<Q> = charpoly(&matrix)
        .iter()
        .map(|c| c.rational())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Numeric("non-rational characteristic polynomial".into()))?;
    let eigenvalues = rational_roots(&charpoly);
    Ok(QuaternionicHecke {
        kappa,
        p,
        matrix,
        charpoly,
        eigenvalues,
    })
}

/// Hecke eigenvectors of `V_kappa^{O^x}` with rational eigenvalues.
pub fn quaternionic_eigenforms(kappa: u32) -> Result<Vec<(QuaternionicForm, BTreeMap<u64, Q>)>, Error> {
    let k = kappa as usize;
    let space = quaternionic_space(kappa)?;
    let ops: Vec<Mat<QuadNum>> = SPLIT_PRIMES.iter().map(|&p| hecke_operator(kappa, p)).collect();
    let vecs = common_eigenvectors(&ops, space.iter().map(|f| f.v.clone()).collect());
    let mut out = vec![];
    for v in vecs {
        let mut ev = BTreeMap::new();
        for (&p, t) in SPLIT_PRIMES.iter().zip(&ops) {
            let w = t.mul_vec(&v);
            let i = (0..=k).find(|&i| !v[i].is_nil()).unwrap();
            let lam = w[i].divide(&v[i]);
            let lam = lam
                .rational()
                .ok_or_else(|| Error::Numeric("non-rational quaternionic eigenvalue".into()))?;
            ev.insert(p, lam);
        }
        out.push((QuaternionicForm { kappa, v }, ev));
    }
    Ok(out)
}

/// `lambda_quat = sign * p^exponent * a_p`, fixed once at a reference pair.
#[derive(Clone, Debug, PartialEq)]
pub struct JlCalibration {
    pub kappa: u32,
    pub p: u64,
    pub sign: i32,
    pub exponent: i32,
}

impl JlCalibration {
    pub fn factor(&self, p: u64) -> Q {
        qi(self.sign as i64) * qpow(p as i64, self.exponent)
    }
}

pub const CALIBRATION_POINT: (u32, u64) = (6, 3);

fn newspace_charpoly(weight: u32, p: u64) -> Result<Vec<Q>, Error> {
    let n = default_n(weight).max(p as usize * (weight as usize / 4 + 2));
    let l2 = level_two_space(weight, n)?;
    if l2.new.is_empty() {
        return Ok(vec![Q::one()]);
    }
    let t = l2.space.hecke_matrix(p)?;
    let r = restrict(&t, &Mat::from_cols(&l2.new)).ok_or_else(|| Error::Numeric("new space not T_p-stable".into()))?;
    Ok(charpoly(&r))
}

pub fn jl_calibration() -> Result<JlCalibration, Error> {
    let (kappa, p) = CALIBRATION_POINT;
    let quat = quaternionic_hecke(kappa, p)?;
    let forms = eigenforms(kappa + 2, 2, 0)?;
    if quat.eigenvalues.len() != 1 || forms.len() != 1 {
        return Err(Error::Numeric("calibration point is not one-dimensional".into()));
    }
    let ratio = &quat.eigenvalues[0] / forms[0].a(p as usize);
    let sign = if ratio.is_negative() { -1 } else { 1 };
    let mut r = ratio.abs();
    let mut exponent = 0;
    let pq = qi(p as i64);
    while r > Q::one() && (&r / &pq).is_integer() {
        r /= &pq;
        exponent += 1;
    }
    while r < Q::one() && (&r * &pq) <= Q::one() {
        r *= &pq;
        exponent -= 1;
    }
    if !r.is_one() {
        return Err(Error::Numeric(format!("calibration ratio {} is not +-{}^e", ratio, p)));
    }
    Ok(JlCalibration {
        kappa,
        p,
        sign,
        exponent,
    })
}

/// Characteristic polynomial of quaternionic `T_p` against that of `T_p`
/// on the new part of `S_{kappa+2}(2)` rescaled by the calibration.
pub fn jl_match(kappa: u32, p: u64, cal: &JlCalibration) -> Result<Report, Error> {
    let quat = quaternionic_hecke(kappa, p)?;
    let cl = newspace_charpoly(kappa + 2, p)?;
    let c = cal.factor(p);
    let d = cl.len() - 1;
    // c^d P(x / c)
    let scaled: Vec<Q> = (0..=d).map(|i| &cl[i] * Scalar::power(&c, (d - i) as u32)).collect();
    let fmt = |v: &[Q]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    Ok(Report::exact(
        "jl",
        format!("kappa={},p={}", kappa, p),
        json!({"kappa": kappa, "p": p, "calibration": {"sign": cal.sign, "exponent": cal.exponent, "at": [cal.kappa, cal.p]}}),
        format!("[{}]", fmt(&quat.charpoly)),
        format!("[{}]", fmt(&scaled)),
        quat.charpoly == scaled,
    ))
}

pub fn dimension_match(kappa: u32) -> Result<Report, Error> {
    let dq = quaternionic_space(kappa)?.len();
    let dn = new_dimension(kappa + 2)?;
    Ok(Report::exact(
        "jl-dimension",
        format!("kappa={}", kappa),
        json!({"kappa": kappa}),
        dq,
        dn,
        dq == dn,
    ))
}

// ---------------------------------------------------------------------------
// Toral periods

#[derive(Clone, Debug)]
pub struct ToralPeriod {
    /// `Im(z)^{kappa/2} f(z)` at the CM point.
    pub value: Complex64,
    pub tail_bound: f64,
    pub z: Complex64,
    /// The adelic-to-classical constant, kept symbolic.
    pub constant: PowerProduct,
}

impl ToralPeriod {
    /// Nonvanishing with the tail bound as a margin.
    pub fn certified_nonzero(&self) -> bool {
        self.value.norm() > 2.0 * self.tail_bound + 1e-300
    }
}

fn check_torus(chi: &HeckeCharacter) -> Result<(), Error> {
    if !chi.conductor_exponents.is_empty() {
        return Err(Error::Precondition("toral periods need an unramified character".into()));
    }
    if chi.field.class_number != 1 {
        return Err(Error::Precondition(format!("h(E) = {} is not 1", chi.field.class_number)));
    }
    if chi.kappa % chi.field.unit_count != 0 {
        return Err(Error::Precondition(format!(
            "w(E) = {} does not divide kappa = {}",
            chi.field.unit_count, chi.kappa
        )));
    }
    Ok(())
}

/// The CM point of the maximal order, `(-b + sqrt d) / 2` with `b = d mod 2`.
/// Writing `xi` with `n(xi) = |d| r^2 / 4`, this is the point `i sqrt(n(xi))`
/// moved by `r^{-1}`, i.e. by `p^{-mu_p}` at every `p`.
pub fn cm_point(field: &QuadField) -> Complex64 {
    let re = if field.disc % 2 != 0 { -0.5 } else { 0.0 };
    Complex64::new(re, (field.disc.abs() as f64).sqrt() / 2.0)
}

pub fn toral_period_f(f: &EllipticEigenform, chi: &HeckeCharacter) -> Result<ToralPeriod, Error> {
    check_torus(chi)?;
    if chi.kappa != f.weight() {
        return Err(Error::Precondition(format!(
            "character weight {} differs from the form's weight {}",
            chi.kappa,
            f.weight()
        )));
    }
    let z = cm_point(&chi.field);
    let k = f.weight() as f64;
    let n = f.expansion.n();
    let r = (-2.0 * PI * z.im).exp();
    // |a_m| <= d(m) m^{(k-1)/2} <= 2 m^{k/2}
    let rho = ((n as f64 + 2.0) / (n as f64 + 1.0)).powf(k / 2.0) * r;
    if rho >= 1.0 {
        return Err(Error::Numeric("q-series tail bound does not converge at this truncation".into()));
    }
    let tail = 2.0 * (n as f64 + 1.0).powf(k / 2.0) * r.powi(n as i32 + 1) / (1.0 - rho);
    let scale = z.im.powf(k / 2.0);
    Ok(ToralPeriod {
        value: f.expansion.eval(z) * scale,
        tail_bound: tail * scale,
        z,
        constant: PowerProduct::symbol("c_torus", 1),
    })
}

/// Rejects `w(E) not dividing kappa` before touching the form.
pub fn toral_period_for(f: &EllipticEigenform, field: &QuadField) -> Result<ToralPeriod, Error> {
    let chi = unramified_character(field, f.weight()).map_err(|e| Error::Precondition(e.to_string()))?;
    toral_period_f(f, &chi)
}

/// `(v, v*) v_{kappa,xi}` with `v_{kappa,xi} = X^kappa`, the highest weight
/// line of the torus `diag(z, zbar)`.
pub fn toral_period_fprime(v: &QuaternionicForm, chi: &HeckeCharacter) -> Result<Vec<QuadNum>, Error> {
    check_torus(chi)?;
    if chi.field.disc != -4 {
        return Err(Error::Precondition("the Hurwitz order carries the torus Q(i) only".into()));
    }
    if chi.kappa != v.kappa {
        return Err(Error::Precondition("weight mismatch".into()));
    }
    Ok(highest_weight_projection(&v.v))
}

pub fn highest_weight_projection(v: &[QuadNum]) -> Vec<QuadNum> {
    let mut out = vec![QuadNum::nil(); v.len()];
    out[0] = v[0].clone();
    out
}

// ---------------------------------------------------------------------------
// Petersson norms

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct Petersson {
    pub value: f64,
    pub error: f64,
}

/// `int_F sum_translates |f|^2 y^k dx dy / y^2` with `panels` panels per unit
/// length and `nodes` Gauss points each.
fn petersson_rule(c: &[f64], k: u32, level: u32, panels: usize, nodes: usize) -> f64 {
    let gl = gauss_legendre(nodes);
    let g = |z: Complex64| eval_series(c, z).norm_sqr() * z.im.powi(k as i32);
    let integrand = |z: Complex64| {
        let v = if level == 1 {
            g(z)
        } else {
            // F, S F and S T F: for a Fricke eigenform |f|_k S|^2 y^k at z
            // equals g(z / 2)
            g(z) + g(z / 2.0) + g((z + 1.0) / 2.0)
        };
        v / (z.im * z.im)
    };
    let quad = |a: f64, b: f64, m: usize, f: &dyn Fn(f64) -> f64| -> f64 {
        let h = (b - a) / m as f64;
        let mut s = 0.0;
        for j in 0..m {
            let lo = a + j as f64 * h;
            for &(x, w) in &gl {
                s += w * h / 2.0 * f(lo + (x + 1.0) * h / 2.0);
            }
        }
        s
    };
    let height = 12.0;
    let inner = |x: f64| {
        let y0 = (1.0 - x * x).sqrt();
        quad(y0, y0 + height, (height as usize) * panels, &|y| integrand(Complex64::new(x, y)))
    };
    2.0 * quad(0.0, 0.5, panels.max(1), &inner)
}

/// `<f, f>` over `Gamma_0(level) \ H` with `dx dy / y^2`.
pub fn petersson_norm(f: &EllipticEigenform, rel_tol: f64) -> Result<Petersson, Error> {
    check_level(f.level())?;
    if f.level() == 2 && f.al_sign.is_none() {
        return Err(Error::Precondition("level-2 quadrature needs a newform".into()));
    }
    let c = f.expansion.coeffs_f64();
    let k = f.weight();
    let mut panels = 1;
    let mut prev = petersson_rule(&c, k, f.level(), panels, 12);
    for _ in 0..6 {
        panels *= 2;
        let cur = petersson_rule(&c, k, f.level(), panels, 12);
        let err = (cur - prev).abs();
        if err <= rel_tol * cur.abs() {
            if cur <= 0.0 {
                return Err(Error::Numeric("non-positive Petersson norm".into()));
            }
            return Ok(Petersson { value: cur, error: err.max(cur * 1e-15) });
        }
        prev = cur;
    }
    Err(Error::Numeric("Petersson quadrature did not converge".into()))
}

/// Satake traces `a_p / p^{(k-1)/2}` for all primes up to the truncation.
pub fn satake_traces(f: &EllipticEigenform) -> Vec<(u64, f64)> {
    f.eigenvalues
        .iter()
        .map(|(&p, a)| (p, q_to_f64(a) / (p as f64).powf((f.weight() as f64 - 1.0) / 2.0)))
        .collect()
}
