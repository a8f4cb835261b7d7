//! Elements `x + y*s` of an imaginary quadratic field with `s^2 = m`, `m < 0`
//! squarefree (so `m = -1` gives the Gaussian rationals).

use std::fmt;

use num_traits::{One, Zero};

use super::{qi, FieldElem, Scalar, Q};

#[derive(Clone, Debug)]
pub struct QuadNum {
    pub x: Q,
    pub y: Q,
    /// `s^2`; 0 while the element is known to be rational.
    pub m: i64,
}

impl QuadNum {
    pub fn new(x: Q, y: Q, m: i64) -> Self {
        QuadNum { x, y, m }
    }

    pub fn gauss(x: Q, y: Q) -> Self {
        QuadNum { x, y, m: -1 }
    }

    pub fn i() -> Self {
        Self::gauss(Q::zero(), Q::one())
    }

    pub fn conj(&self) -> Self {
        QuadNum {
            x: self.x.clone(),
            y: -&self.y,
            m: self.m,
        }
    }

    /// Field norm `x^2 - m y^2`.
    pub fn norm(&self) -> Q {
        &self.x * &self.x - qi(self.m) * &self.y * &self.y
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        use super::q_to_f64;
        let s = (-(self.m as f64)).sqrt();
        num_complex::Complex64::new(q_to_f64(&self.x), q_to_f64(&self.y) * s)
    }

    fn join(a: i64, b: i64) -> i64 {
        match (a, b) {
            (0, x) | (x, 0) => x,
            (x, y) => {
                assert_eq!(x, y, "mixing quadratic fields");
                x
            }
        }
    }

    pub fn powi(&self, e: i64) -> Self {
        if e >= 0 {
            self.power(e as u32)
        } else {
            self.invert().power((-e) as u32)
        }
    }
}

impl PartialEq for QuadNum {
    fn eq(&self, o: &Self) -> bool {
        self.x == o.x && self.y == o.y
    }
}

impl Scalar for QuadNum {
    fn nil() -> Self {
        QuadNum::new(Q::zero(), Q::zero(), 0)
    }
    fn unit() -> Self {
        QuadNum::new(Q::one(), Q::zero(), 0)
    }
    fn from_q(c: &Q) -> Self {
        QuadNum::new(c.clone(), Q::zero(), 0)
    }
    fn plus(&self, o: &Self) -> Self {
        QuadNum::new(&self.x + &o.x, &self.y + &o.y, Self::join(self.m, o.m))
    }
    fn minus(&self, o: &Self) -> Self {
        QuadNum::new(&self.x - &o.x, &self.y - &o.y, Self::join(self.m, o.m))
    }
    fn times(&self, o: &Self) -> Self {
        let m = Self::join(self.m, o.m);
        QuadNum::new(
            &self.x * &o.x + qi(m) * &self.y * &o.y,
            &self.x * &o.y + &self.y * &o.x,
            m,
        )
    }
    fn negate(&self) -> Self {
        QuadNum::new(-&self.x, -&self.y, self.m)
    }
    fn is_nil(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl FieldElem for QuadNum {
    fn invert(&self) -> Self {
        let n = self.norm();
        let c = self.conj();
        QuadNum::new(&c.x / &n, &c.y / &n, self.m)
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let s = if self.m == -1 {
            "i".to_string()
        } else {
            format!("sqrt({})", self.m)
        };
        write!(f, "{} + {}*{}", self.x, self.y, s)
    }
}
