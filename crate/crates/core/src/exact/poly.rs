//! Polynomials in the Euler variable `t = p^{-s}` with coefficients in any
//! exact or numeric scalar domain.

use std::fmt;

use super::{Scalar, Q};

#[derive(Clone, Debug)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Scalar> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_nil()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn one() -> Self {
        Poly::new(vec![R::unit()])
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// `1 - c t`.
    pub fn one_minus(c: &R) -> Self {
        Poly::new(vec![R::unit(), c.negate()])
    }

    /// `1 - c t^k`.
    pub fn one_minus_pow(c: &R, k: usize) -> Self {
        let mut v = vec![R::nil(); k + 1];
        v[0] = R::unit();
        v[k] = c.negate();
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::nil)
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).plus(&o.coeff(k))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).minus(&o.coeff(k))).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::new(vec![]);
        }
        let mut out = vec![R::nil(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_nil() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Poly::new(out)
    }

    pub fn product<'a>(items: impl IntoIterator<Item = &'a Poly<R>>) -> Self
    where
        R: 'a,
    {
        items.into_iter().fold(Poly::one(), |acc, p| acc.mul(p))
    }

    /// The polynomial `P(c t)`.
    pub fn scale_var(&self, c: &R) -> Self {
        let mut pw = R::unit();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.times(&pw));
            pw = pw.times(c);
        }
        Poly::new(out)
    }

    pub fn eval(&self, t: &R) -> R {
        let mut acc = R::nil();
        for a in self.coeffs.iter().rev() {
            acc = acc.times(t).plus(a);
        }
        acc
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eq_exact(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Coefficients read the same in reverse order.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|k| self.coeffs[k].eq_exact(&self.coeffs[n - 1 - k]))
    }

    pub fn scale(&self, c: &Q) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.scale(c)).collect())
    }
}

impl<R: Scalar + fmt::Display> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_nil() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*t", c)?,
                _ => write!(f, "({})*t^{}", c, k)?,
            }
        }
        Ok(())
    }
}
