//! Quotients of Laurent polynomials, compared by cross-multiplication.

use std::fmt;

use super::laurent::Laurent;
use super::{Scalar, Q};

#[derive(Clone, Debug)]
pub struct RatFunc {
    pub num: Laurent,
    pub den: Laurent,
}

impl RatFunc {
    pub fn new(num: Laurent, den: Laurent) -> Self {
        assert!(!den.is_nil(), "zero denominator");
        RatFunc { num, den }
    }

    pub fn from_laurent(l: Laurent) -> Self {
        RatFunc::new(l, Laurent::unit())
    }

    pub fn constant(c: Q) -> Self {
        Self::from_laurent(Laurent::constant(c))
    }

    pub fn add(&self, o: &Self) -> Self {
        RatFunc::new(
            self.num.times(&o.den).plus(&o.num.times(&self.den)),
            self.den.times(&o.den),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc::new(self.num.negate(), self.den.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFunc::new(self.num.times(&o.num), self.den.times(&o.den))
    }

    pub fn div(&self, o: &Self) -> Self {
        RatFunc::new(self.num.times(&o.den), self.den.times(&o.num))
    }

    pub fn inv(&self) -> Self {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Q) -> Self {
        RatFunc::new(self.num.scale(c), self.den.clone())
    }

    pub fn eq_exact(&self, o: &Self) -> bool {
        self.num.times(&o.den).eq_exact(&o.num.times(&self.den))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_nil()
    }

    pub fn eval<R: crate::exact::FieldElem>(
        &self,
        vals: &[R; crate::exact::laurent::NVARS],
        inv_vals: &[R; crate::exact::laurent::NVARS],
    ) -> R {
        self.num.eval(vals, inv_vals).divide(&self.den.eval(vals, inv_vals))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
