//! Cyclotomic arithmetic for sampled exact checks.
//!
//! `Cyclo` lives in `Q(zeta_n)(sqrt p)`: coefficients are pairs `a + b*sqrt(p)`
//! of small rationals in the power basis of `zeta_n` reduced modulo the
//! cyclotomic polynomial. `CycloZ` is the integer version used for character
//! sums, where only addition of roots of unity is needed.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer as _;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use super::{Scalar, Q};

pub type R128 = Ratio<i128>;

fn q_to_r128(x: &Q) -> R128 {
    let n = x.numer().to_i128().expect("numerator exceeds i128");
    let d = x.denom().to_i128().expect("denominator exceeds i128");
    R128::new(n, d)
}

pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            out -= out / d;
        }
        d += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Integer coefficients of the n-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let den = cyclotomic_poly(d);
            num = exact_div(&num, &den);
        }
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn];
    assert!(lead == 1);
    let qn = r.len() - 1 - dn;
    let mut qv = vec![0i64; qn + 1];
    for k in (0..=qn).rev() {
        let c = r[k + dn];
        qv[k] = c;
        for j in 0..=dn {
            r[k + j] -= c * den[j];
        }
    }
    assert!(r.iter().all(|&x| x == 0), "inexact cyclotomic division");
    qv
}

/// `x^k mod Phi_n` for `0 <= k < n`, each of length `phi(n)`.
struct ReductionTable {
    phi: usize,
    rows: Vec<Vec<i64>>,
}

fn table(n: u64) -> Arc<ReductionTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<ReductionTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return t.clone();
    }
    let phi_poly = cyclotomic_poly(n);
    let phi = phi_poly.len() - 1;
    let mut rows = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..n {
        rows.push(cur.clone());
        // multiply by x and reduce with the monic relation
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        for j in (1..phi).rev() {
            next[j] = cur[j - 1];
        }
        for j in 0..phi {
            next[j] -= top * phi_poly[j];
        }
        cur = next;
    }
    let t = Arc::new(ReductionTable { phi, rows });
    cache.lock().unwrap().insert(n, t.clone());
    t
}

#[derive(Clone, Debug, PartialEq)]
pub struct QS {
    pub a: R128,
    pub b: R128,
}

impl QS {
    fn zero() -> Self {
        QS {
            a: R128::zero(),
            b: R128::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        QS {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
    fn mul(&self, o: &Self, p: i128) -> Self {
        QS {
            a: self.a * o.a + self.b * o.b * R128::from_integer(p),
            b: self.a * o.b + self.b * o.a,
        }
    }
    fn scale_int(&self, k: i64) -> Self {
        let k = R128::from_integer(k as i128);
        QS {
            a: self.a * k,
            b: self.b * k,
        }
    }
}

/// Element of `Q(zeta_n)(sqrt p)` (with `p = 0` meaning no square root).
#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u64,
    p: u64,
    c: Vec<QS>,
}

impl Cyclo {
    /// `zeta_n^k`.
    pub fn root(n: u64, k: i64) -> Self {
        let t = table(n);
        let k = k.rem_euclid(n as i64) as usize;
        let c = t.rows[k]
            .iter()
            .map(|&v| QS {
                a: R128::from_integer(v as i128),
                b: R128::zero(),
            })
            .collect();
        Cyclo { n, p: 0, c }
    }

    /// `sqrt(p)^e` with `e` in {-1, 1}, or higher odd/even powers.
    pub fn sqrt_p(p: u64, e: i32) -> Self {
        let half = e.div_euclid(2);
        let odd = e.rem_euclid(2) == 1;
        let base = if half >= 0 {
            R128::from_integer((p as i128).pow(half as u32))
        } else {
            R128::new(1, (p as i128).pow((-half) as u32))
        };
        let qs = if odd {
            QS {
                a: R128::zero(),
                b: base,
            }
        } else {
            QS {
                a: base,
                b: R128::zero(),
            }
        };
        Cyclo {
            n: 1,
            p,
            c: vec![qs],
        }
    }

    fn lift(&self, m: u64) -> Self {
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let t = table(m);
        let mut out = vec![QS::zero(); t.phi];
        for (k, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (j, &r) in t.rows[(k * step) % m as usize].iter().enumerate() {
                if r != 0 {
                    out[j] = out[j].add(&v.scale_int(r));
                }
            }
        }
        Cyclo {
            n: m,
            p: self.p,
            c: out,
        }
    }

    fn common(&self, o: &Self) -> (Self, Self, u64) {
        let p = match (self.p, o.p) {
            (0, x) | (x, 0) => x,
            (x, y) => {
                assert_eq!(x, y, "mixing square roots of different primes");
                x
            }
        };
        let m = self.n.lcm(&o.n);
        let mut a = self.lift(m);
        let mut b = o.lift(m);
        a.p = p;
        b.p = p;
        (a, b, p)
    }

    /// Complex value under `zeta_n -> exp(2 pi i / n)`, `sqrt p -> +sqrt p`.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let sp = (self.p as f64).sqrt();
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (k, v) in self.c.iter().enumerate() {
            let re = v.a.to_f64().unwrap() + v.b.to_f64().unwrap() * sp;
            let ang = 2.0 * std::f64::consts::PI * k as f64 / self.n as f64;
            acc += num_complex::Complex64::from_polar(re, ang);
        }
        acc
    }
}

impl Scalar for Cyclo {
    fn nil() -> Self {
        Cyclo {
            n: 1,
            p: 0,
            c: vec![QS::zero()],
        }
    }
    fn unit() -> Self {
        Cyclo::root(1, 0)
    }
    fn from_q(x: &Q) -> Self {
        Cyclo {
            n: 1,
            p: 0,
            c: vec![QS {
                a: q_to_r128(x),
                b: R128::zero(),
            }],
        }
    }
    fn plus(&self, o: &Self) -> Self {
        let (a, b, p) = self.common(o);
        Cyclo {
            n: a.n,
            p,
            c: a.c.iter().zip(&b.c).map(|(x, y)| x.add(y)).collect(),
        }
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let (a, b, p) = self.common(o);
        let t = table(a.n);
        let phi = t.phi;
        let mut raw = vec![QS::zero(); 2 * phi - 1];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                raw[i + j] = raw[i + j].add(&x.mul(y, p as i128));
            }
        }
        let mut out: Vec<QS> = raw[..phi].to_vec();
        for (k, v) in raw.iter().enumerate().skip(phi) {
            if v.is_zero() {
                continue;
            }
            for (j, &r) in t.rows[k].iter().enumerate() {
                if r != 0 {
                    out[j] = out[j].add(&v.scale_int(r));
                }
            }
        }
        Cyclo { n: a.n, p, c: out }
    }
    fn negate(&self) -> Self {
        Cyclo {
            n: self.n,
            p: self.p,
            c: self.c.iter().map(|x| x.scale_int(-1)).collect(),
        }
    }
    fn is_nil(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl std::fmt::Display for Cyclo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = vec![];
        for (k, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let coef = match (v.a.is_zero(), v.b.is_zero()) {
                (false, true) => format!("{}", v.a),
                (true, false) => format!("{}*s{}", v.b, self.p),
                _ => format!("({} + {}*s{})", v.a, v.b, self.p),
            };
            parts.push(if k == 0 { coef } else { format!("{}*z{}^{}", coef, self.n, k) });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Integer combination of `e`-th roots of unity, canonically reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloZ {
    n: u64,
    c: Vec<i64>,
}

impl CycloZ {
    /// Build from a histogram `counts[k]` = multiplicity of `zeta_n^k`.
    pub fn from_counts(n: u64, counts: &[i64]) -> Self {
        let t = table(n);
        let mut c = vec![0i64; t.phi];
        for (k, &m) in counts.iter().enumerate() {
            if m == 0 {
                continue;
            }
            for (j, &r) in t.rows[k % n as usize].iter().enumerate() {
                c[j] += m * r;
            }
        }
        CycloZ { n, c }
    }

    pub fn integer(n: u64, v: i64) -> Self {
        let mut counts = vec![0i64; n as usize];
        counts[0] = v;
        Self::from_counts(n, &counts)
    }

    /// `v * zeta_n^k`.
    pub fn scaled_root(n: u64, k: i64, v: i64) -> Self {
        let mut counts = vec![0i64; n as usize];
        counts[k.rem_euclid(n as i64) as usize] = v;
        Self::from_counts(n, &counts)
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        if self.c.iter().skip(1).all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// Sum of two elements written over the same roots of unity.
    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "adding over different roots of unity");
        CycloZ {
            n: self.n,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qi;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        for n in 1..40u64 {
            assert_eq!(cyclotomic_poly(n).len() as u64 - 1, euler_phi(n));
        }
    }

    #[test]
    fn roots_multiply() {
        let z = Cyclo::root(12, 5);
        let w = Cyclo::root(8, 3);
        let prod = z.times(&w);
        assert!(prod.eq_exact(&Cyclo::root(24, 10 + 9)));
        let s = Cyclo::root(4, 1);
        assert!(s.times(&s).eq_exact(&Cyclo::from_q(&qi(-1))));
    }

    #[test]
    fn sum_of_roots_vanishes() {
        let mut acc = Cyclo::nil();
        for k in 0..7 {
            acc = acc.plus(&Cyclo::root(7, k));
        }
        assert!(acc.is_nil());
        let counts = vec![1i64; 9];
        assert!(CycloZ::from_counts(9, &counts).is_zero());
    }

    #[test]
    fn square_root_symbol() {
        let s = Cyclo::sqrt_p(13, 1);
        assert!(s.times(&s).eq_exact(&Cyclo::from_q(&qi(13))));
        assert!(s.times(&Cyclo::sqrt_p(13, -1)).eq_exact(&Cyclo::unit()));
        let v = s.to_complex();
        assert!((v.re - 13f64.sqrt()).abs() < 1e-12);
    }
}
