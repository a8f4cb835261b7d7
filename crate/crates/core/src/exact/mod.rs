//! Exact scalar domains shared by the symbolic and sampled identity checks.

pub mod cyclo;
pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod powprod;
pub mod quadnum;
pub mod ratfunc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `base^e` for integer base and possibly negative exponent.
pub fn qpow(base: i64, e: i32) -> Q {
    let b = qi(base);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    // Ratio<BigInt>::to_f64 handles huge numerators/denominators well enough here.
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Commutative ring operations needed by the polynomial-in-t machinery.
pub trait Scalar: Clone + std::fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_q(q: &Q) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn is_nil(&self) -> bool;

    fn from_i64(n: i64) -> Self {
        Self::from_q(&qi(n))
    }
    fn scale(&self, c: &Q) -> Self {
        self.times(&Self::from_q(c))
    }
    fn power(&self, e: u32) -> Self {
        let mut acc = Self::unit();
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }
    fn eq_exact(&self, o: &Self) -> bool {
        self.minus(o).is_nil()
    }
}

pub trait FieldElem: Scalar {
    fn invert(&self) -> Self;
    fn divide(&self, o: &Self) -> Self {
        self.times(&o.invert())
    }
}

impl Scalar for Q {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl FieldElem for Q {
    fn invert(&self) -> Self {
        self.recip()
    }
}

impl Scalar for Complex64 {
    fn nil() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn unit() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_q(q: &Q) -> Self {
        Complex64::new(q_to_f64(q), 0.0)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_nil(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl FieldElem for Complex64 {
    fn invert(&self) -> Self {
        1.0 / self
    }
}

/// Exact square root of a non-negative rational, if it is a square.
pub fn q_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// p-adic valuation of a nonzero rational.
pub fn q_ord(x: &Q, p: u64) -> i32 {
    fn ord_int(n: &BigInt, p: u64) -> i32 {
        let pb = BigInt::from(p);
        let mut n = n.abs();
        let mut k = 0;
        while !n.is_zero() && (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    }
    assert!(!Zero::is_zero(x), "valuation of zero");
    ord_int(x.numer(), p) - ord_int(x.denom(), p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| k as u64)
        .collect()
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn binom(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}
