//! Laurent polynomials over Q in the formal parameters used throughout the
//! identity suites: two Satake parameters, a split character value and a
//! square root of the residue characteristic.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{q, qi, Scalar, Q};

pub const NVARS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Satake parameter of the elliptic form.
    A = 0,
    /// Satake parameter of the quaternionic partner.
    B = 1,
    /// Inverse character value at the first split prime.
    X = 2,
    /// Square root of the prime attached to the ring (`S^2 = sq`).
    S = 3,
}

const NAMES: [&str; NVARS] = ["A", "B", "X", "S"];

#[derive(Clone, Debug)]
pub struct Laurent {
    terms: BTreeMap<[i32; NVARS], Q>,
    /// Integer whose square root `S` denotes, 0 when `S` does not occur.
    sq: u64,
}

impl Laurent {
    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; NVARS], c);
        }
        Laurent { terms, sq: 0 }
    }

    pub fn monomial(c: Q, exps: [i32; NVARS], sq: u64) -> Self {
        let mut l = Laurent {
            terms: BTreeMap::new(),
            sq,
        };
        if !c.is_zero() {
            l.terms.insert(exps, c);
        }
        l.reduce_sqrt()
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        assert!(v != Var::S, "use sqrt_p for the square-root symbol");
        let mut exps = [0; NVARS];
        exps[v as usize] = e;
        Self::monomial(qi(1), exps, 0)
    }

    /// `v + v^{-1}`.
    pub fn var_sym(v: Var) -> Self {
        Self::var(v).plus(&Self::var_pow(v, -1))
    }

    /// `sqrt(p)^e`, reduced to the normal form `c` or `c*S`.
    pub fn sqrt_p(p: u64, e: i32) -> Self {
        let mut exps = [0; NVARS];
        exps[Var::S as usize] = e;
        Self::monomial(qi(1), exps, p)
    }

    pub fn sq(&self) -> u64 {
        self.sq
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32; NVARS], &Q)> {
        self.terms.iter()
    }

    fn join_sq(a: u64, b: u64) -> u64 {
        match (a, b) {
            (0, x) | (x, 0) => x,
            (x, y) => {
                assert_eq!(x, y, "mixing square roots of different primes");
                x
            }
        }
    }

    fn reduce_sqrt(mut self) -> Self {
        let si = Var::S as usize;
        if self.terms.keys().all(|e| e[si] == 0 || e[si] == 1) {
            return self;
        }
        assert!(self.sq > 0, "S occurs without an attached prime");
        let p = self.sq as i64;
        let mut out: BTreeMap<[i32; NVARS], Q> = BTreeMap::new();
        for (mut e, c) in std::mem::take(&mut self.terms) {
            let k = e[si];
            let r = k.rem_euclid(2);
            let half = (k - r) / 2;
            e[si] = r;
            let factor = if half >= 0 {
                num_traits::pow(qi(p), half as usize)
            } else {
                num_traits::pow(q(1, p), (-half) as usize)
            };
            let entry = out.entry(e).or_insert_with(Q::zero);
            *entry += c * factor;
        }
        out.retain(|_, c| !c.is_zero());
        self.terms = out;
        self
    }

    /// Substitute numeric exponent patterns: used to specialise `X -> X^{-1}` etc.
    pub fn map_exponents(&self, f: impl Fn([i32; NVARS]) -> [i32; NVARS]) -> Self {
        let mut out: BTreeMap<[i32; NVARS], Q> = BTreeMap::new();
        for (e, c) in &self.terms {
            *out.entry(f(*e)).or_insert_with(Q::zero) += c.clone();
        }
        out.retain(|_, c| !c.is_zero());
        Laurent {
            terms: out,
            sq: self.sq,
        }
        .reduce_sqrt()
    }

    /// Evaluate with every formal variable replaced by a value in a ring `R`.
    /// `vals[i]` and `inv_vals[i]` must be mutually inverse.
    pub fn eval<R: Scalar>(&self, vals: &[R; NVARS], inv_vals: &[R; NVARS]) -> R {
        let mut acc = R::nil();
        for (e, c) in &self.terms {
            let mut m = R::from_q(c);
            for i in 0..NVARS {
                let k = e[i];
                if k > 0 {
                    m = m.times(&vals[i].power(k as u32));
                } else if k < 0 {
                    m = m.times(&inv_vals[i].power((-k) as u32));
                }
            }
            acc = acc.plus(&m);
        }
        acc
    }

    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                if e.iter().all(|&k| k == 0) {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl Scalar for Laurent {
    fn nil() -> Self {
        Laurent::constant(Q::zero())
    }
    fn unit() -> Self {
        Laurent::constant(Q::one())
    }
    fn from_q(c: &Q) -> Self {
        Laurent::constant(c.clone())
    }
    fn plus(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            *terms.entry(*e).or_insert_with(Q::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Laurent {
            terms,
            sq: Self::join_sq(self.sq, o.sq),
        }
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let mut terms: BTreeMap<[i32; NVARS], Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = [0; NVARS];
                for i in 0..NVARS {
                    e[i] = e1[i] + e2[i];
                }
                *terms.entry(e).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Laurent {
            terms,
            sq: Self::join_sq(self.sq, o.sq),
        }
        .reduce_sqrt()
    }
    fn negate(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            sq: self.sq,
        }
    }
    fn is_nil(&self) -> bool {
        self.terms.is_empty()
    }
}

impl PartialEq for Laurent {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for i in 0..NVARS {
                match e[i] {
                    0 => {}
                    1 => write!(f, "*{}", NAMES[i])?,
                    k => write!(f, "*{}^{}", NAMES[i], k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_symbol_reduces() {
        let s = Laurent::sqrt_p(5, 1);
        assert_eq!(s.times(&s), Laurent::constant(qi(5)));
        let inv = Laurent::sqrt_p(5, -1);
        assert_eq!(s.times(&inv), Laurent::unit());
        assert_eq!(Laurent::sqrt_p(5, 3), s.scale(&qi(5)));
    }

    #[test]
    fn inverse_monomials_cancel() {
        let a = Laurent::var(Var::A);
        let ai = Laurent::var_pow(Var::A, -1);
        assert_eq!(a.times(&ai), Laurent::unit());
        let sym = Laurent::var_sym(Var::A);
        let sq = sym.times(&sym);
        let expect = Laurent::var_pow(Var::A, 2)
            .plus(&Laurent::var_pow(Var::A, -2))
            .plus(&Laurent::constant(qi(2)));
        assert_eq!(sq, expect);
    }
}
