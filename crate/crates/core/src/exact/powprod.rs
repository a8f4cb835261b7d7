//! Exact products `±∏ prime^e ∏ symbol^k` with rational prime exponents and
//! integer exponents on opaque transcendental symbols (L-values, exponentials).
//! Used to compare closed-form constants that mix surds and named factors.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{factorize, Q};

pub type Exp = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerProduct {
    /// `None` for the zero constant.
    pub sign: Option<i8>,
    pub primes: BTreeMap<u64, Exp>,
    pub symbols: BTreeMap<String, i64>,
}

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct {
            sign: Some(1),
            primes: BTreeMap::new(),
            symbols: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        PowerProduct {
            sign: None,
            primes: BTreeMap::new(),
            symbols: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign.is_none()
    }

    pub fn rational(x: &Q) -> Self {
        Self::rational_pow(x, Exp::from_integer(1))
    }

    /// `|x|^e` times the sign of `x` (the sign is only allowed for integer `e`).
    pub fn rational_pow(x: &Q, e: Exp) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        let mut out = Self::one();
        if x.is_negative() {
            assert!(e.is_integer(), "fractional power of a negative number");
            if e.to_integer().is_odd() {
                out.sign = Some(-1);
            }
        }
        let num = x.numer().abs().to_u64().expect("numerator too large");
        let den = x.denom().to_u64().expect("denominator too large");
        for (p, k) in factorize(num) {
            *out.primes.entry(p).or_insert_with(Exp::zero) += e * k as i64;
        }
        for (p, k) in factorize(den) {
            *out.primes.entry(p).or_insert_with(Exp::zero) -= e * k as i64;
        }
        out.primes.retain(|_, v| !v.is_zero());
        out
    }

    pub fn int(n: i64) -> Self {
        Self::rational(&super::qi(n))
    }

    pub fn symbol(name: &str, k: i64) -> Self {
        let mut out = Self::one();
        if k != 0 {
            out.symbols.insert(name.to_string(), k);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (Some(s1), Some(s2)) = (self.sign, o.sign) else {
            return Self::zero();
        };
        let mut out = self.clone();
        out.sign = Some(s1 * s2);
        for (p, e) in &o.primes {
            *out.primes.entry(*p).or_insert_with(Exp::zero) += *e;
        }
        out.primes.retain(|_, v| !v.is_zero());
        for (s, k) in &o.symbols {
            *out.symbols.entry(s.clone()).or_insert(0) += *k;
        }
        out.symbols.retain(|_, v| *v != 0);
        out
    }

    pub fn pow(&self, k: i64) -> Self {
        let Some(s) = self.sign else {
            assert!(k > 0, "non-positive power of zero");
            return Self::zero();
        };
        PowerProduct {
            sign: Some(if k % 2 == 0 { 1 } else { s }),
            primes: self.primes.iter().map(|(p, e)| (*p, *e * k)).collect(),
            symbols: self.symbols.iter().map(|(n, e)| (n.clone(), e * k)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    /// The rational value when no surds or symbols remain.
    pub fn as_rational(&self) -> Option<Q> {
        let Some(s) = self.sign else {
            return Some(Q::zero());
        };
        if !self.symbols.is_empty() || self.primes.values().any(|e| !e.is_integer()) {
            return None;
        }
        let mut acc = super::qi(s as i64);
        for (p, e) in &self.primes {
            acc *= super::qpow(*p as i64, e.to_integer() as i32);
        }
        Some(acc)
    }

    /// Numeric value given values for the symbols.
    pub fn to_f64(&self, symbol_value: impl Fn(&str) -> f64) -> f64 {
        let Some(s) = self.sign else {
            return 0.0;
        };
        let mut acc = s as f64;
        for (p, e) in &self.primes {
            acc *= (*p as f64).powf(*e.numer() as f64 / *e.denom() as f64);
        }
        for (n, k) in &self.symbols {
            acc *= symbol_value(n).powi(*k as i32);
        }
        acc
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(s) = self.sign else {
            return write!(f, "0");
        };
        let mut parts: Vec<String> = vec![];
        // collect integer parts into a rational coefficient for readability
        let mut coef = super::qi(s as i64);
        for (p, e) in &self.primes {
            let whole = e.floor().to_integer();
            let frac = *e - Exp::from_integer(whole);
            coef *= super::qpow(*p as i64, whole as i32);
            if !frac.is_zero() {
                parts.push(format!("{}^({})", p, frac));
            }
        }
        for (n, k) in &self.symbols {
            if *k == 1 {
                parts.push(n.clone());
            } else {
                parts.push(format!("{}^{}", n, k));
            }
        }
        if parts.is_empty() {
            write!(f, "{}", coef)
        } else {
            write!(f, "{} * {}", coef, parts.join(" * "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn surds_combine() {
        let a = PowerProduct::rational_pow(&q(1, 4), Exp::new(3, 1));
        assert_eq!(a.as_rational(), Some(q(1, 64)));
        let r = PowerProduct::rational_pow(&q(4, 1), Exp::new(1, 2));
        let r3 = PowerProduct::rational_pow(&q(4, 1), Exp::new(3, 2));
        assert_eq!(r.mul(&PowerProduct::int(4)), r3);
        let s = PowerProduct::rational_pow(&q(2, 1), Exp::new(1, 2));
        assert_eq!(s.pow(2).as_rational(), Some(q(2, 1)));
        assert_eq!(s.as_rational(), None);
    }
}
