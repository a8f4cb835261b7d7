//! Unramified Hecke characters of an imaginary quadratic field with
//! archimedean weight `-kappa`, and finite-conductor local characters for the
//! brute-force sums.
//!
//! Values live in `E` itself: for a principal ideal `(alpha)` the value is
//! `(alpha/|alpha|)^kappa = (alpha/conj(alpha))^{kappa/2}`. The complex
//! embedding sends the square root of the squarefree part of the
//! discriminant to the upper half plane.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::charsums::UnitQuotient;
use crate::exact::cyclo::Cyclo;
use crate::exact::quadnum::QuadNum;
use crate::exact::{q, qi, FieldElem, Scalar};
use crate::quadfield::{QuadField, Splitting};
use crate::Error;

#[derive(Clone, Debug)]
pub struct HeckeCharacter {
    pub field: QuadField,
    pub kappa: u32,
    /// Index into the dual of the class group; 0 is the trivial class character.
    pub class_char: usize,
    /// `p -> i_p(chi)`; empty for everywhere-unramified characters.
    pub conductor_exponents: BTreeMap<u64, u32>,
}

/// Squarefree `m` with `E = Q(sqrt m)`.
pub fn squarefree_root(disc: i64) -> i64 {
    if disc.rem_euclid(4) == 1 {
        disc
    } else {
        disc / 4
    }
}

pub fn unramified_character(field: &QuadField, kappa: u32) -> Result<HeckeCharacter, Error> {
    if kappa == 0 || kappa % 2 != 0 {
        return Err(Error::Character(format!("weight {} is not a positive even integer", kappa)));
    }
    if kappa % field.unit_count != 0 {
        return Err(Error::Character(format!(
            "infinity type {} is not trivial on the {} units of Q(sqrt {})",
            kappa,
            field.unit_count,
            field.disc
        )));
    }
    Ok(HeckeCharacter {
        field: field.clone(),
        kappa,
        class_char: 0,
        conductor_exponents: BTreeMap::new(),
    })
}

/// The element `x + y theta` as `u + v sqrt(m)`.
pub fn element(field: &QuadField, x: i64, y: i64) -> QuadNum {
    let m = squarefree_root(field.disc);
    let t = qi(field.theta_trace);
    let half = q(1, 2);
    let s = if field.disc.rem_euclid(4) == 1 { half.clone() } else { qi(1) };
    QuadNum::new(qi(x) + qi(y) * t * half, qi(y) * s, m)
}

/// Units of `O_E` as `(x, y)` coordinates.
pub fn units(field: &QuadField) -> Vec<(i64, i64)> {
    let mut out = vec![];
    for y in -2..=2i64 {
        for x in -3..=3i64 {
            if x * x + field.theta_trace * x * y + field.theta_norm * y * y == 1 {
                out.push((x, y));
            }
        }
    }
    out
}

/// All `x + y theta` of norm `n`.
pub fn elements_of_norm(field: &QuadField, n: i64) -> Vec<(i64, i64)> {
    let absd = (-field.disc) as f64;
    let ymax = (2.0 * (n as f64).sqrt() / absd.sqrt()).ceil() as i64 + 1;
    let t = field.theta_trace;
    let mut out = vec![];
    for y in -ymax..=ymax {
        let xmax = (n as f64).sqrt().ceil() as i64 + (t * y).abs() + 1;
        for x in -xmax..=xmax {
            if x * x + t * x * y + field.theta_norm * y * y == n {
                out.push((x, y));
            }
        }
    }
    out
}

/// The associate whose argument lies in `[0, 2 pi / w)`.
fn normalize(field: &QuadField, alpha: (i64, i64)) -> (i64, i64) {
    let w = field.unit_count as f64;
    let width = 2.0 * std::f64::consts::PI / w;
    for u in units(field) {
        let x = alpha.0 * u.0 - field.theta_norm * alpha.1 * u.1;
        let y = alpha.0 * u.1 + alpha.1 * u.0 + field.theta_trace * alpha.1 * u.1;
        let z = element(field, x, y).to_complex();
        let mut arg = z.arg();
        if arg < -1e-12 {
            arg += 2.0 * std::f64::consts::PI;
        }
        if arg.abs() < 1e-12 || (arg > 0.0 && arg < width - 1e-12) {
            return (x, y);
        }
    }
    unreachable!("some associate lies in the fundamental sector")
}

impl HeckeCharacter {
    /// `chi((alpha)) = (alpha / conj alpha)^{kappa/2}`.
    pub fn value_at_element(&self, alpha: &QuadNum) -> QuadNum {
        let u = alpha.times(&alpha.conj().invert());
        u.powi(self.kappa as i64 / 2)
    }

    /// Generators of the primes above `p`, first-sector normalized; the two
    /// split primes are conjugate.
    pub fn prime_generators(&self, p: u64) -> Result<Vec<(i64, i64)>, Error> {
        let f = &self.field;
        match f.splitting(p) {
            Splitting::Inert => Ok(vec![(p as i64, 0)]),
            s => {
                let mut sols: Vec<((i64, i64), f64)> = elements_of_norm(f, p as i64)
                    .into_iter()
                    .map(|x| normalize(f, x))
                    .map(|x| (x, element(f, x.0, x.1).to_complex().arg()))
                    .collect();
                sols.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
                let Some(&(a, _)) = sols.first() else {
                    return Err(Error::Character(format!(
                        "primes above {} are not principal; class characters are not tabulated",
                        p
                    )));
                };
                if s == Splitting::Ramified {
                    return Ok(vec![a]);
                }
                let (cx, cy) = (a.0 + f.theta_trace * a.1, -a.1);
                Ok(vec![a, normalize(f, (cx, cy))])
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct PrimeValues {
    pub p: u64,
    pub splitting: Splitting,
    pub generators: Vec<QuadNum>,
    /// `chi_p(varpi)` for each prime element listed.
    pub values: Vec<QuadNum>,
}

impl PrimeValues {
    pub fn inverses(&self) -> Vec<QuadNum> {
        self.values.iter().map(|v| v.invert()).collect()
    }
}

pub fn value_at_prime(chi: &HeckeCharacter, p: u64) -> Result<PrimeValues, Error> {
    if chi.conductor_exponents.get(&p).copied().unwrap_or(0) > 0 {
        return Err(Error::Character(format!("chi is ramified at {}", p)));
    }
    let f = &chi.field;
    let gens: Vec<QuadNum> = chi
        .prime_generators(p)?
        .into_iter()
        .map(|(x, y)| element(f, x, y))
        .collect();
    let values = gens.iter().map(|g| chi.value_at_element(g)).collect();
    Ok(PrimeValues {
        p,
        splitting: f.splitting(p),
        generators: gens,
        values,
    })
}

/// `(alpha_p^chi, beta_p^chi)`: the inverse values at the split primes,
/// `(1, -1)` when inert, `(chi(varpi)^{-1}, 0)` when ramified.
pub fn alpha_beta_chi(chi: &HeckeCharacter, p: u64) -> Result<(QuadNum, QuadNum), Error> {
    let pv = value_at_prime(chi, p)?;
    let inv = pv.inverses();
    Ok(match pv.splitting {
        Splitting::Split => (inv[0].clone(), inv[1].clone()),
        Splitting::Inert => (QuadNum::unit(), QuadNum::from_i64(-1)),
        Splitting::Ramified => (inv[0].clone(), QuadNum::nil()),
    })
}

/// A character of `E_p^x / Q_p^x O_{E_p,i}^x` (unit part, plus the
/// uniformizer coset at a ramified prime).
#[derive(Clone, Debug)]
pub struct LocalCharacter {
    pub p: u64,
    pub i_p: u32,
    pub model: Arc<UnitQuotient>,
    /// `chi(model.elems[k]) = zeta_e^{values[k]}`, `e = model.exponent`.
    pub values: Vec<u32>,
    pub omega_p_value: Option<i8>,
}

impl LocalCharacter {
    pub fn value(&self, k: usize) -> Cyclo {
        Cyclo::root(self.model.exponent, self.values[k] as i64)
    }

    /// Exponent table restricted to the group generators.
    pub fn generator_values(&self) -> Vec<(usize, u32)> {
        self.model.generators.iter().map(|&(g, _)| (g, self.values[g])).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

/// All characters of the level-`i` quotient, each labelled by its exact
/// conductor exponent.
pub fn local_characters(p: u64, i: u32, field: &QuadField) -> Result<Vec<LocalCharacter>, Error> {
    if i == 0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let mut g = UnitQuotient::new(field, p, i)?;
    let tables = g.characters();
    let g = Arc::new(g);
    Ok(tables
        .into_iter()
        .map(|values| LocalCharacter {
            p,
            i_p: g.conductor(&values),
            model: g.clone(),
            values,
            omega_p_value: None,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::field_from_xi;
    use proptest::prelude::*;

    fn gauss() -> QuadField {
        field_from_xi(&q(1, 4)).unwrap()
    }

    #[test]
    fn existence_by_weight() {
        let f = gauss();
        assert!(unramified_character(&f, 12).is_ok());
        assert!(unramified_character(&f, 8).is_ok());
        assert!(unramified_character(&f, 10).is_err());
        let e3 = field_from_xi(&qi(3)).unwrap();
        assert!(unramified_character(&e3, 12).is_ok());
        assert!(unramified_character(&e3, 8).is_err());
    }

    #[test]
    fn split_value_at_five() {
        let chi = unramified_character(&gauss(), 12).unwrap();
        let pv = value_at_prime(&chi, 5).unwrap();
        assert_eq!(pv.generators[0], QuadNum::gauss(qi(2), qi(1)));
        let v = &pv.values[0];
        assert_eq!(v, &QuadNum::gauss(q(11753, 15625), q(-10296, 15625)));
        assert_eq!(v.norm(), qi(1));
        // the conjugate prime carries the conjugate value
        assert_eq!(pv.values[1], v.conj());
        assert_eq!(11753i64 * 11753 + 10296 * 10296, 5i64.pow(12));
    }

    #[test]
    fn inert_and_ramified_values() {
        let f = gauss();
        for kappa in [4, 8, 12] {
            let chi = unramified_character(&f, kappa).unwrap();
            assert_eq!(value_at_prime(&chi, 3).unwrap().values[0], QuadNum::unit());
        }
        let chi12 = unramified_character(&f, 12).unwrap();
        let v = &value_at_prime(&chi12, 2).unwrap().values[0];
        assert_eq!(v, &QuadNum::from_i64(-1));
        let chi8 = unramified_character(&f, 8).unwrap();
        assert_eq!(value_at_prime(&chi8, 2).unwrap().values[0], QuadNum::unit());
        // the square is the value at (2), which is 1
        assert_eq!(v.times(v), QuadNum::unit());
    }

    #[test]
    fn alpha_beta_cases() {
        let chi = unramified_character(&gauss(), 12).unwrap();
        let (a, b) = alpha_beta_chi(&chi, 3).unwrap();
        assert_eq!(a.times(&b), QuadNum::from_i64(-1));
        let (a, b) = alpha_beta_chi(&chi, 5).unwrap();
        assert_eq!(a.times(&b), QuadNum::unit());
        assert_eq!(b, a.conj());
        assert_eq!(a.norm(), qi(1));
        let (_, b) = alpha_beta_chi(&chi, 2).unwrap();
        assert!(b.is_nil());
    }

    #[test]
    fn local_character_counts() {
        let f = gauss();
        let c5 = local_characters(5, 1, &f).unwrap();
        assert_eq!(c5.len(), 4);
        assert_eq!(c5.iter().filter(|c| c.i_p == 1).count(), 3);
        let c3 = local_characters(3, 1, &f).unwrap();
        assert_eq!(c3.len(), 4);
        assert_eq!(c3.iter().filter(|c| c.i_p == 1).count(), 3);
        for p in [2u64, 3, 5, 7] {
            let cs = local_characters(p, 1, &f).unwrap();
            assert!(cs.iter().any(|c| c.is_trivial() && c.i_p == 0));
        }
        assert!(local_characters(31, 3, &f).is_err());
    }

    proptest! {
        #[test]
        fn multiplicative_and_unit_independent(
            x1 in -20i64..20, y1 in -20i64..20, x2 in -20i64..20, y2 in -20i64..20,
            di in 0usize..2, k in 1u32..4,
        ) {
            prop_assume!((x1, y1) != (0, 0) && (x2, y2) != (0, 0));
            let f = field_from_xi(&[q(1, 4), qi(3)][di]).unwrap();
            let kappa = f.unit_count * k;
            let chi = unramified_character(&f, kappa).unwrap();
            let a = element(&f, x1, y1);
            let b = element(&f, x2, y2);
            let va = chi.value_at_element(&a);
            let vb = chi.value_at_element(&b);
            prop_assert_eq!(chi.value_at_element(&a.times(&b)), va.times(&vb));
            prop_assert_eq!(va.norm(), qi(1));
            for (ux, uy) in units(&f) {
                let u = element(&f, ux, uy);
                prop_assert_eq!(chi.value_at_element(&u.times(&a)), va.clone());
            }
        }
    }
}
