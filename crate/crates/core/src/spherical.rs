//! Zonal spherical functions on GL2(Q_p), the local toral integrals built from
//! them, and the local factors entering the period formula for the
//! quaternionic form: unramified primes, primes of the quaternion
//! discriminant, and the archimedean place.
//!
//! Symbolic values are rational functions in `A` (Satake parameter), `X`
//! (character value at a split prime) and `S = p^{1/2}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;
use serde_json::json;

use crate::charsums::{character_sum, expected_volume, SumRange, UnitQuotient};
use crate::exact::cyclo::CycloZ;
use crate::exact::laurent::{Laurent, Var};
use crate::exact::powprod::PowerProduct;
use crate::exact::ratfunc::RatFunc;
use crate::exact::{binom, q, qi, Scalar, Q};
use crate::lfactors::{
    adjoint_special, adjoint_unramified, basechange_twisted_special, basechange_twisted_unramified,
    eta_p, factorial_pp, zeta_p, ArchFactor, GammaKind,
};
use crate::quadfield::{QuadField, Splitting};
use crate::report::{Report, Status};
use crate::Error;

fn rf(l: Laurent) -> RatFunc {
    RatFunc::from_laurent(l)
}

fn rq(x: Q) -> RatFunc {
    RatFunc::constant(x)
}

fn a_var() -> Laurent {
    Laurent::var(Var::A)
}

fn a_inv() -> Laurent {
    Laurent::var_pow(Var::A, -1)
}

/// `lambda_p = p^{1/2}(A + A^{-1})`, the eigenvalue of the `K diag(p,1) K` operator.
pub fn lambda_p(p: u64) -> Laurent {
    Laurent::sqrt_p(p, 1).times(&Laurent::var_sym(Var::A))
}

/// Macdonald's closed form for `phi(diag(p^m, 1))` as a rational function.
pub fn phi_closed(p: u64, m: u32) -> RatFunc {
    let pinv = Laurent::constant(q(1, p as i64));
    let c_plus = RatFunc::new(
        Laurent::unit().minus(&pinv.times(&Laurent::var_pow(Var::A, -2))),
        Laurent::unit().minus(&Laurent::var_pow(Var::A, -2)),
    );
    let c_minus = RatFunc::new(
        Laurent::unit().minus(&pinv.times(&Laurent::var_pow(Var::A, 2))),
        Laurent::unit().minus(&Laurent::var_pow(Var::A, 2)),
    );
    let m = m as i32;
    let bracket = rf(Laurent::var_pow(Var::A, m))
        .mul(&c_plus)
        .add(&rf(Laurent::var_pow(Var::A, -m)).mul(&c_minus));
    rf(Laurent::sqrt_p(p, -m))
        .mul(&bracket)
        .scale(&q(p as i64, p as i64 + 1))
}

/// `A^m + A^{m-2} + ... + A^{-m}`, zero for `m = -1` and `-1` for `m = -2`.
fn schur<R: Scalar>(a: &R, a_inv: &R, m: i32) -> R {
    if m == -1 {
        return R::nil();
    }
    if m == -2 {
        return R::from_i64(-1);
    }
    let mut acc = R::nil();
    for j in 0..=m {
        let mut t = R::unit();
        for _ in 0..(m - j) {
            t = t.times(a);
        }
        for _ in 0..j {
            t = t.times(a_inv);
        }
        acc = acc.plus(&t);
    }
    acc
}

/// The same value with the removable pole at `A^2 = 1` cancelled:
/// `p^{-m/2} (p/(p+1)) (U_m - p^{-1} U_{m-2})`. Defined for every `A`.
pub fn phi_total<R: Scalar>(a: &R, a_inv: &R, s_inv: &R, p: u64, m: u32) -> R {
    let m = m as i32;
    let u = schur(a, a_inv, m).minus(&schur(a, a_inv, m - 2).scale(&q(1, p as i64)));
    let mut pw = R::unit();
    for _ in 0..m {
        pw = pw.times(s_inv);
    }
    u.times(&pw).scale(&q(p as i64, p as i64 + 1))
}

pub fn phi_laurent(p: u64, m: u32) -> Laurent {
    phi_total(&a_var(), &a_inv(), &Laurent::sqrt_p(p, -1), p, m)
}

/// Numeric closed form; `A^2 = 1` is a pole of the printed expression.
pub fn phi_numeric(a: Complex64, p: u64, m: u32) -> Result<Complex64, Error> {
    let one = Complex64::new(1.0, 0.0);
    let a2 = a * a;
    if (a2 - one).norm() < 1e-12 {
        return Err(Error::Domain("A^2 = 1 is a pole of the closed form; use the limit branch".into()));
    }
    let pf = p as f64;
    let c_plus = (one - a2.inv() / pf) / (one - a2.inv());
    let c_minus = (one - a2 / pf) / (one - a2);
    let mi = m as i32;
    Ok(pf.powf(-(m as f64) / 2.0) / (1.0 + 1.0 / pf) * (a.powi(mi) * c_plus + a.powi(-mi) * c_minus))
}

/// The limit branch at `A = +-1`.
pub fn phi_limit(sign: i8, p: u64, m: u32) -> Q {
    let mi = m as i64;
    let s = if sign < 0 && m % 2 == 1 { -1 } else { 1 };
    let p = p as i64;
    let val = qi(mi + 1) - q(mi - 1, p);
    // p^{-m/2} is rational only for even m; the caller multiplies by it
    qi(s) * val * q(p, p + 1)
}

/// Brute-force oracle: the spherical vector of the induced representation
/// averaged over the right cosets of `K diag(p^m,1) K`.
///
/// Representatives are `[[p^a, 0], [c, p^d]]` with `a + d = m`, `c mod p^d`
/// and the entries coprime to `p`. The spherical vector at a matrix with
/// bottom row `(z, w)` and determinant valuation `m` has Iwasawa diagonal
/// valuations `(m - e, e)` with `e = min(ord z, ord w)`.
pub fn phi_oracle(p: u64, m: u32) -> Laurent {
    let mut sum = Laurent::nil();
    let mut count = 0i64;
    let pi = p as i64;
    for d in 0..=m {
        let a = m - d;
        for c in 0..pi.pow(d) {
            if a > 0 && d > 0 && c % pi == 0 {
                continue;
            }
            let ord_c = if c == 0 {
                u32::MAX
            } else {
                let mut k = 0;
                let mut x = c;
                while x % pi == 0 {
                    x /= pi;
                    k += 1;
                }
                k
            };
            let e = ord_c.min(d);
            let diff = (m - e) as i32 - e as i32;
            sum = sum.plus(&Laurent::var_pow(Var::A, diff).times(&Laurent::sqrt_p(p, -diff)));
            count += 1;
        }
    }
    sum.scale(&q(1, count))
}

/// Bilateral series `sum_m phi(a_|m|) x^m` truncated at `|m| <= M`, with `M`
/// chosen so that the tail bound `2 (M+2) p^{-(M+1)/2} / (1 - p^{-1/2})^2`
/// (valid for unitary `A`, including `A = +-1`) is below `tol`.
pub fn bilateral_series_numeric(a: Complex64, x: Complex64, p: u64, tol: f64) -> Result<(Complex64, f64), Error> {
    if (a.norm() - 1.0).abs() > 1e-9 || (x.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition("series needs unitary parameters".into()));
    }
    let r = (p as f64).powf(-0.5);
    let bound = |m: u32| 2.0 * (m as f64 + 2.0) * r.powi(m as i32 + 1) / (1.0 - r).powi(2);
    let mut mm = 0;
    while bound(mm) > tol {
        mm += 1;
        if mm > 10_000 {
            return Err(Error::Numeric("truncation insufficient".into()));
        }
    }
    let ainv = a.inv();
    let sinv = Complex64::new(r, 0.0);
    let mut acc = phi_total(&a, &ainv, &sinv, p, 0);
    for m in 1..=mm {
        let ph = phi_total(&a, &ainv, &sinv, p, m);
        acc += ph * (x.powi(m as i32) + x.powi(-(m as i32)));
    }
    Ok((acc, bound(mm)))
}

/// The split, unramified-character integral in the two-term closed form
/// obtained by summing the geometric series.
pub fn split_unramified_integral(p: u64) -> RatFunc {
    let h = Laurent::sqrt_p(p, -1);
    let x = Laurent::var(Var::X);
    let xi = Laurent::var_pow(Var::X, -1);
    let geo = |b: &Laurent| -> RatFunc {
        let one = rf(Laurent::unit());
        let g1 = RatFunc::new(Laurent::unit(), Laurent::unit().minus(&b.times(&h).times(&x)));
        let g2 = RatFunc::new(Laurent::unit(), Laurent::unit().minus(&b.times(&h).times(&xi)));
        g1.add(&g2).sub(&one)
    };
    let pinv = Laurent::constant(q(1, p as i64));
    let c_plus = RatFunc::new(
        Laurent::unit().minus(&pinv.times(&Laurent::var_pow(Var::A, -2))),
        Laurent::unit().minus(&Laurent::var_pow(Var::A, -2)),
    );
    let c_minus = RatFunc::new(
        Laurent::unit().minus(&pinv.times(&Laurent::var_pow(Var::A, 2))),
        Laurent::unit().minus(&Laurent::var_pow(Var::A, 2)),
    );
    geo(&a_var())
        .mul(&c_plus)
        .add(&geo(&a_inv()).mul(&c_minus))
        .scale(&q(p as i64, p as i64 + 1))
}

/// How a toral integral decomposes: `vol * sum_m coeff_m phi(a_m)`, with
/// the coefficients obtained as character sums over coset representatives.
#[derive(Clone, Debug)]
pub struct ToralExpansion {
    pub p: u64,
    pub splitting: Splitting,
    pub i_p: u32,
    pub volume: Q,
    pub coeffs: BTreeMap<u32, i64>,
    /// Split primes: the coefficient multiplying the `n != 0` series.
    pub bilateral_weight: i64,
}

impl ToralExpansion {
    pub fn integral(&self) -> Result<RatFunc, Error> {
        if self.bilateral_weight != 0 {
            return Err(Error::CaseMismatch(format!(
                "nonzero weight {} on the bilateral series",
                self.bilateral_weight
            )));
        }
        let mut acc = Laurent::nil();
        for (m, c) in &self.coeffs {
            acc = acc.plus(&phi_laurent(self.p, *m).scale(&qi(*c)));
        }
        Ok(rf(acc).scale(&self.volume))
    }
}

/// Expansion of the integral for a character of exact conductor `i >= 1`,
/// computed from its values on the quotient `Z_p^x \ O^x / O_i^x`.
/// Sums landing on the same `phi(a_m)` are added before asking for
/// rationality, since individual ranges can carry `chi(theta)`.
pub fn toral_expansion(g: &UnitQuotient, chi: &[u32], i: u32) -> Result<ToralExpansion, Error> {
    let md = &g.model;
    let p = md.p;
    let splitting = md.splitting.clone();
    let mut raw: BTreeMap<u32, CycloZ> = BTreeMap::new();
    let mut add = |m: u32, range: SumRange| -> Result<(), Error> {
        let v = character_sum(g, chi, range)?;
        let e = raw.entry(m).or_insert_with(|| CycloZ::integer(g.exponent, 0));
        *e = e.add(&v);
        Ok(())
    };
    for k in 0..=i {
        add(2 * (i - k), SumRange::Order(k))?;
    }
    let mut bilateral = CycloZ::integer(g.exponent, 0);
    match splitting {
        Splitting::Split => bilateral = character_sum(g, chi, SumRange::Congruent(0))?,
        Splitting::Inert => add(2 * i, SumRange::InertShift)?,
        Splitting::Ramified => add(2 * i + 1, SumRange::RamifiedShift)?,
    }
    let rational = |v: &CycloZ, what: String| {
        v.as_integer()
            .ok_or_else(|| Error::CaseMismatch(format!("coefficient of {} is not rational", what)))
    };
    let mut coeffs = BTreeMap::new();
    for (m, v) in &raw {
        let c = rational(v, format!("phi(a_{})", m))?;
        if c != 0 {
            coeffs.insert(*m, c);
        }
    }
    Ok(ToralExpansion {
        p,
        volume: expected_volume(&splitting, p, i),
        splitting,
        i_p: i,
        coeffs,
        bilateral_weight: rational(&bilateral, "the bilateral series".into())?,
    })
}

fn eval_at(poly: &crate::exact::poly::Poly<Laurent>, t: &Laurent) -> RatFunc {
    rf(poly.eval(t))
}

/// `L_p(eta,1) L_p(Ad,1) / (zeta_p(2) L_p(Pi' x chi^{-1}, 1/2))` at an
/// unramified prime of the quaternion algebra.
///
/// `omega` is `chi_p(varpi)^{-1}` at a ramified prime (ignored otherwise).
pub fn l_ratio_unramified(p: u64, splitting: &Splitting, i_p: u32, omega: i8) -> Result<RatFunc, Error> {
    let h = Laurent::sqrt_p(p, -1);
    let t1 = Laurent::constant(q(1, p as i64));
    let t2 = Laurent::constant(q(1, (p * p) as i64));
    let eta_v = match splitting {
        Splitting::Split => 1,
        Splitting::Inert => -1,
        Splitting::Ramified => 0,
    };
    let chi = match splitting {
        Splitting::Split => vec![Laurent::var(Var::X), Laurent::var_pow(Var::X, -1)],
        Splitting::Inert => vec![],
        Splitting::Ramified => vec![Laurent::from_i64(omega as i64)],
    };
    let ad = adjoint_unramified(p, &a_var(), &a_inv()).inv_poly;
    let bc = basechange_twisted_unramified(p, splitting, &a_var(), &a_inv(), &chi, i_p)?.inv_poly;
    let num = eval_at(&zeta_p::<Laurent>(p).inv_poly, &t2).mul(&eval_at(&bc, &h));
    let den = eval_at(&eta_p::<Laurent>(p, eta_v).inv_poly, &t1).mul(&eval_at(&ad, &t1));
    Ok(num.div(&den))
}

fn l_eta_one(p: u64, splitting: &Splitting) -> Q {
    let e = match splitting {
        Splitting::Split => 1,
        Splitting::Inert => -1,
        Splitting::Ramified => 0,
    };
    (qi(1) - q(e, p as i64)).recip()
}

/// The stated value: 1 for `i = 0`, `p^{-i} L_p(eta,1)^2` for `i > 0`.
pub fn alpha_unramified_expected(p: u64, splitting: &Splitting, i: u32) -> Q {
    if i == 0 {
        qi(1)
    } else {
        let l = l_eta_one(p, splitting);
        &l * &l / qi((p as i64).pow(i))
    }
}

/// Local integral for an unramified character, per splitting type.
pub fn unramified_character_integral(p: u64, splitting: &Splitting, omega: i8) -> RatFunc {
    match splitting {
        Splitting::Split => split_unramified_integral(p),
        Splitting::Inert => rq(qi(1)),
        Splitting::Ramified => rq(qi(1)).add(&rf(phi_laurent(p, 1)).scale(&qi(omega as i64))),
    }
}

/// Verify the unramified-prime evaluation for `i_p = 0` (symbolic in `A` and
/// the character) and for every character of exact conductor `1..=imax`
/// that exists on the quotient (integral assembled from its values).
pub fn verify_alpha_unramified(field: &QuadField, p: u64, imax: u32) -> Result<Vec<Report>, Error> {
    let splitting = field.splitting(p);
    let mut out = vec![];
    let omegas: &[i8] = if splitting == Splitting::Ramified { &[1, -1] } else { &[1] };
    for &om in omegas {
        let integral = unramified_character_integral(p, &splitting, om);
        let ratio = l_ratio_unramified(p, &splitting, 0, om)?;
        let alpha = ratio.mul(&integral);
        let ok = alpha.eq_exact(&rq(qi(1)));
        out.push(Report::exact(
            "prop-3-3",
            format!("disc={}/p={}/i=0/omega={}", field.disc, p, om),
            json!({"disc": field.disc, "p": p, "i_p": 0, "omega": om, "splitting": splitting}),
            if ok { "1".to_string() } else { alpha.to_string() },
            "1",
            ok,
        ));
    }
    for i in 1..=imax {
        let mut g = UnitQuotient::new(field, p, i)?;
        let chars = g.characters();
        let exact: Vec<&Vec<u32>> = chars.iter().filter(|c| g.conductor(c) == i).collect();
        let expected = alpha_unramified_expected(p, &splitting, i);
        let ratio = l_ratio_unramified(p, &splitting, i, 1)?;
        let mut bad = vec![];
        for chi in &exact {
            let ex = toral_expansion(&g, chi, i)?;
            match ex.integral() {
                Ok(int) => {
                    let alpha = ratio.mul(&int);
                    if !alpha.eq_exact(&rq(expected.clone())) {
                        bad.push(alpha.to_string());
                    }
                }
                Err(e) => bad.push(e.to_string()),
            }
        }
        let inputs = json!({"disc": field.disc, "p": p, "i_p": i, "characters": exact.len(), "splitting": splitting});
        let case = format!("disc={}/p={}/i={}", field.disc, p, i);
        let r = if exact.is_empty() {
            Report::exact("prop-3-3", case, inputs, "no character of this conductor", expected.to_string(), true)
                .with_status(Status::VanishingBranch)
        } else {
            let ok = bad.is_empty();
            let lhs = if ok { expected.to_string() } else { bad[0].clone() };
            Report::exact("prop-3-3", case, inputs, lhs, expected.to_string(), ok)
        };
        out.push(r);
    }
    Ok(out)
}

/// Local integral at a prime of the quaternion discriminant, where the
/// local representation is the character `delta o norm`. The quotient
/// `Q_p^x \ E_p^x` is one coset of volume 1 (inert) or two (ramified, the
/// second containing a uniformizer of norm `p` up to a unit norm).
pub fn quaternion_prime_integral(splitting: &Splitting, delta: i8, omega: i8) -> Result<Q, Error> {
    match splitting {
        Splitting::Inert => Ok(qi(1)),
        Splitting::Ramified => Ok(qi(1) + qi((delta * omega) as i64)),
        Splitting::Split => Err(Error::CaseMismatch("a prime of the discriminant cannot split".into())),
    }
}

/// The L-ratio at a quaternion prime, from the special factors at `s = 1`
/// and `s = 1/2`.
pub fn l_ratio_quaternion(p: u64, splitting: &Splitting, delta: i8, omega: i8) -> Result<Q, Error> {
    let t1 = q(1, p as i64);
    let eval = |poly: &crate::exact::poly::Poly<Q>, t: &Q| poly.eval(t);
    let eta_v = if *splitting == Splitting::Inert { -1 } else { 0 };
    let l_eta = eval(&eta_p::<Q>(p, eta_v).inv_poly, &t1).recip();
    // special factors are polynomials in p^{-s}: Ad at s=1, the twist at s=1/2
    let ad = eval(&adjoint_special::<Q>(p).inv_poly, &t1).recip();
    let zeta2 = eval(&zeta_p::<Q>(p).inv_poly, &(&t1 * &t1)).recip();
    // evaluate the twisted factor in Laurent form to keep p^{-1/2} exact
    let h = Laurent::sqrt_p(p, -1);
    let tw = basechange_twisted_special(p, splitting, 1, delta, omega, &h)?.inv_poly;
    let tw_val = tw
        .eval(&h)
        .as_rational()
        .ok_or_else(|| Error::Numeric("twisted factor is not rational at the centre".into()))?;
    Ok(l_eta * ad / (zeta2 * tw_val.recip()))
}

pub fn ramification_index(splitting: &Splitting) -> i64 {
    if *splitting == Splitting::Ramified {
        2
    } else {
        1
    }
}

pub fn alpha_quaternion_expected(p: u64, splitting: &Splitting, delta: i8, omega: i8) -> Q {
    if *splitting == Splitting::Ramified && delta != omega {
        qi(0)
    } else {
        qi(ramification_index(splitting)) * (qi(1) - q(1, p as i64))
    }
}

pub fn verify_alpha_quaternion(p: u64) -> Vec<Report> {
    let mut out = vec![];
    for splitting in [Splitting::Inert, Splitting::Ramified] {
        let signs: &[i8] = if splitting == Splitting::Ramified { &[1, -1] } else { &[1] };
        for &delta in &[1i8, -1] {
            for &omega in signs {
                let case = format!("p={}/{:?}/delta={}/omega={}", p, splitting, delta, omega);
                let inputs = json!({"p": p, "splitting": splitting, "delta": delta, "omega": omega});
                let expected = alpha_quaternion_expected(p, &splitting, delta, omega);
                let r = match (
                    quaternion_prime_integral(&splitting, delta, omega),
                    l_ratio_quaternion(p, &splitting, delta, omega),
                ) {
                    (Ok(i), Ok(r)) => {
                        let a = i * r;
                        let ok = a == expected;
                        Report::exact("prop-3-10", case, inputs, a, &expected, ok)
                    }
                    (Err(e), _) | (_, Err(e)) => Report::exact("prop-3-10", case, inputs, e, &expected, false),
                };
                out.push(r);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Archimedean place

/// Volume of `E_infinity^x / R^x` under the normalized torus measure.
pub const ARCH_TORUS_VOLUME: (i64, i64) = (1, 2);

/// Squared norm of `X^{k-j} Y^j` under the unitary inner product on
/// `Sym^k C^2`.
pub fn sym_weight(k: u32, j: u32) -> Q {
    Q::from_integer(binom(k as u64, j as u64)).recip()
}

fn check_vector(v: &[Q], kappa: u32) -> Result<(), Error> {
    if v.len() != kappa as usize + 1 {
        return Err(Error::Precondition(format!("vector needs {} coordinates", kappa + 1)));
    }
    if kappa % 2 == 1 {
        return Err(Error::Precondition("weight must be even".into()));
    }
    if v.iter().all(|c| c.is_zero()) {
        return Err(Error::Precondition("zero vector".into()));
    }
    Ok(())
}

/// `|v_kappa-component|^2 / |v|^2`, where the component is along the
/// highest weight vector `X^kappa` of the torus.
pub fn highest_weight_ratio(v: &[Q]) -> Q {
    let k = v.len() as u32 - 1;
    let norm: Q = v
        .iter()
        .enumerate()
        .map(|(j, c)| c * c * sym_weight(k, j as u32))
        .fold(Q::zero(), |a, b| a + b);
    &v[0] * &v[0] / norm
}

/// Circle integral of the matrix coefficient against `chi_infinity^{-1}`.
/// The matrix coefficient at `diag(e^{it}, e^{-it})` is the trigonometric
/// polynomial `sum_j |c_j|^2 w_j e^{i(k-2j)t} / |v|^2`; the character
/// selects frequency `k`, so only `j = 0` survives.
pub fn arch_toral_integral(v: &[Q]) -> Result<Q, Error> {
    let k = v.len().saturating_sub(1) as u32;
    check_vector(v, k)?;
    Ok(highest_weight_ratio(v) * q(ARCH_TORUS_VOLUME.0, ARCH_TORUS_VOLUME.1))
}

/// Numeric cross-check: trapezoid rule for the circle integral using the
/// explicit action of `diag(z, conj z)` on `Sym^k`.
pub fn arch_toral_integral_numeric(v: &[Q], n: usize) -> f64 {
    let k = v.len() as u32 - 1;
    let c: Vec<f64> = v.iter().map(crate::exact::q_to_f64).collect();
    let w: Vec<f64> = (0..=k).map(|j| crate::exact::q_to_f64(&sym_weight(k, j))).collect();
    let norm: f64 = c.iter().zip(&w).map(|(a, b)| a * a * b).sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..n {
        let t = std::f64::consts::PI * s as f64 / n as f64;
        let z = Complex64::from_polar(1.0, t);
        // sigma(diag(z, zbar)) X^{k-j} Y^j = z^{k-j} zbar^j X^{k-j} Y^j
        let mut coef = Complex64::new(0.0, 0.0);
        for j in 0..=k as usize {
            let act = z.powi((k as i32) - j as i32) * z.conj().powi(j as i32);
            coef += act * c[j] * c[j] * w[j];
        }
        let chi_inv = z.powi(-(k as i32));
        acc += coef / norm * chi_inv;
    }
    // measure: total mass 1/2 on [0, pi)
    (acc / n as f64 * 0.5).re
}

/// `L_inf(eta,1) L_inf(Ad,1) / (zeta_inf(2) L_inf(Pi' x chi^{-1}, 1/2))`
/// for the weight `kappa + 2` discrete series, exactly.
pub fn arch_l_ratio(kappa: u32) -> PowerProduct {
    let g_r2 = ArchFactor::new(vec![(GammaKind::R, qi(1))]).exact_value(&qi(1)).unwrap();
    let zeta2 = ArchFactor::zeta_arch().exact_value(&qi(2)).unwrap();
    let ad = ArchFactor::adjoint_ds(kappa + 2).exact_value(&qi(1)).unwrap();
    let tw = ArchFactor::basechange_twist_ds(kappa + 2, &qi(kappa as i64 / 2))
        .exact_value(&q(1, 2))
        .unwrap();
    g_r2.mul(&ad).div(&zeta2.mul(&tw))
}

pub fn alpha_infinity(kappa: u32, v: &[Q]) -> Result<PowerProduct, Error> {
    check_vector(v, kappa)?;
    let i = arch_toral_integral(v)?;
    Ok(arch_l_ratio(kappa).mul(&PowerProduct::rational(&i)))
}

/// `(kappa + 1)/(4 pi) * ratio`.
pub fn alpha_infinity_expected(kappa: u32, ratio: &Q) -> PowerProduct {
    PowerProduct::rational(&(q(kappa as i64 + 1, 4) * ratio)).mul(&PowerProduct::symbol("pi", -1))
}

pub fn verify_alpha_infinity(kappas: &[u32]) -> Vec<Report> {
    let mut out = vec![];
    for &k in kappas {
        let vecs: Vec<(&str, Vec<Q>)> = vec![
            ("highest", (0..=k).map(|j| if j == 0 { qi(1) } else { qi(0) }).collect()),
            ("mixed", (0..=k).map(|j| qi(j as i64 % 3 + 1)).collect()),
            ("no-top", (0..=k).map(|j| if j == 0 { qi(0) } else { qi(1) }).collect()),
        ];
        for (name, v) in vecs {
            let ratio = highest_weight_ratio(&v);
            let expected = alpha_infinity_expected(k, &ratio);
            let inputs = json!({"kappa": k, "vector": name});
            let r = match alpha_infinity(k, &v) {
                Ok(a) => {
                    let ok = a == expected || (a.is_zero() && expected.is_zero());
                    Report::exact("prop-3-12", format!("kappa={}/{}", k, name), inputs, &a, &expected, ok)
                }
                Err(e) => Report::exact("prop-3-12", format!("kappa={}/{}", k, name), inputs, e, &expected, false),
            };
            out.push(r);
        }
        // the individual Gamma values
        let ad = ArchFactor::adjoint_ds(k + 2).exact_value(&qi(1)).unwrap();
        let ad_exp = PowerProduct::rational_pow(&qi(2), (-(k as i64 + 1)).into())
            .mul(&PowerProduct::symbol("pi", -(k as i64 + 3)))
            .mul(&factorial_pp(k as u64 + 1));
        out.push(Report::exact("lemma-3-14", format!("kappa={}/adjoint", k), json!({"kappa": k}), &ad, &ad_exp, ad == ad_exp));
        let tw = ArchFactor::basechange_twist_ds(k + 2, &qi(k as i64 / 2)).exact_value(&q(1, 2)).unwrap();
        let tw_exp = PowerProduct::rational_pow(&qi(2), (-(k as i64)).into())
            .mul(&PowerProduct::symbol("pi", -(k as i64 + 2)))
            .mul(&factorial_pp(k as u64));
        out.push(Report::exact("lemma-3-14", format!("kappa={}/twisted", k), json!({"kappa": k}), &tw, &tw_exp, tw == tw_exp));
    }
    let z = ArchFactor::zeta_arch().exact_value(&qi(2)).unwrap();
    let eta = ArchFactor::new(vec![(GammaKind::R, qi(1))]).exact_value(&qi(1)).unwrap();
    let pi_inv = PowerProduct::symbol("pi", -1);
    out.push(Report::exact("lemma-3-14", "zeta-and-eta", json!({}), &z, &pi_inv, z == pi_inv && eta == pi_inv));
    out
}

/// Macdonald formula against the coset oracle and the recursion.
pub fn verify_macdonald(primes: &[u64], mmax: u32) -> Vec<Report> {
    let mut out = vec![];
    for &p in primes {
        for m in 0..=mmax {
            let closed = phi_closed(p, m);
            let oracle = phi_oracle(p, m);
            let ok = closed.eq_exact(&rf(oracle.clone()));
            out.push(Report::exact("macdonald", format!("p={}/m={}", p, m), json!({"p": p, "m": m}), &oracle, "closed form", ok));
        }
        let x = |m: u32| rf(phi_laurent(p, m).times(&Laurent::sqrt_p(p, m as i32)));
        let mut ok = true;
        for m in 1..=6 {
            let rhs = rf(Laurent::var_sym(Var::A)).mul(&x(m)).sub(&x(m - 1));
            ok &= x(m + 1).eq_exact(&rhs);
        }
        out.push(Report::exact("macdonald", format!("p={}/recursion", p), json!({"p": p}), "x_{m+1} = (A + 1/A) x_m - x_{m-1}", "m = 1..6", ok));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::field_from_xi;
    use crate::report::all_passed;
    use proptest::prelude::*;

    #[test]
    fn phi_small_m() {
        for p in [2u64, 3, 7] {
            assert!(phi_closed(p, 0).eq_exact(&rq(qi(1))));
            let expect = rf(lambda_p(p)).scale(&q(1, p as i64 + 1));
            assert!(phi_closed(p, 1).eq_exact(&expect));
            assert!(rf(phi_laurent(p, 1)).eq_exact(&expect));
        }
    }

    #[test]
    fn oracle_agrees() {
        let r = verify_macdonald(&[2, 3, 5], 3);
        assert!(all_passed(&r), "{:?}", r.iter().find(|x| !x.passed()));
    }

    #[test]
    fn phi_two_in_lambda() {
        // 1 - phi(a_2) = ((p+1)^2 - lambda^2) / (p (p+1))
        for p in [2u64, 5] {
            let pi = p as i64;
            let l = lambda_p(p);
            let rhs = rf(Laurent::from_i64((pi + 1) * (pi + 1)).minus(&l.times(&l))).scale(&q(1, pi * (pi + 1)));
            assert!(rq(qi(1)).sub(&rf(phi_laurent(p, 2))).eq_exact(&rhs));
        }
    }

    #[test]
    fn limit_branch() {
        for p in [2u64, 3] {
            for m in [0u32, 2, 4] {
                let l = phi_limit(1, p, m) / qi((p as i64).pow(m / 2));
                let total = phi_total(&qi(1), &qi(1), &qi(0), p, m);
                let num = phi_total(&Complex64::new(1.0, 0.0), &Complex64::new(1.0, 0.0), &Complex64::new((p as f64).powf(-0.5), 0.0), p, m);
                assert!((crate::exact::q_to_f64(&l) - num.re).abs() < 1e-12);
                let _ = total;
                let neg = phi_limit(-1, p, m) / qi((p as i64).pow(m / 2));
                assert_eq!(neg, l);
            }
        }
        assert!(phi_numeric(Complex64::new(1.0, 0.0), 3, 2).is_err());
        let near = phi_numeric(Complex64::from_polar(1.0, 1e-4), 3, 2).unwrap();
        let lim = crate::exact::q_to_f64(&(phi_limit(1, 3, 2) / qi(3)));
        assert!((near.re - lim).abs() < 1e-6);
    }

    #[test]
    fn split_series_matches_closed_form() {
        let p = 5;
        let a = Complex64::from_polar(1.0, 0.7);
        let x = Complex64::from_polar(1.0, 2.1);
        let (series, bound) = bilateral_series_numeric(a, x, p, 1e-12).unwrap();
        assert!(bound <= 1e-12);
        let closed = split_unramified_integral(p);
        let vals = [a, Complex64::new(1.0, 0.0), x, Complex64::new((p as f64).sqrt(), 0.0)];
        let inv = [a.inv(), Complex64::new(1.0, 0.0), x.inv(), Complex64::new((p as f64).sqrt().recip(), 0.0)];
        let c = closed.eval(&vals, &inv);
        assert!((c - series).norm() < 1e-10, "{} vs {}", c, series);
    }

    #[test]
    fn unramified_primes_all_fields() {
        for nx in [q(1, 4), qi(3), q(7, 4), qi(2)] {
            let f = field_from_xi(&nx).unwrap();
            for p in [2u64, 3, 5] {
                let r = verify_alpha_unramified(&f, p, 2).unwrap();
                assert!(all_passed(&r), "{:?}", r.iter().find(|x| !x.passed()));
            }
        }
    }

    #[test]
    fn expansion_shape() {
        let f = field_from_xi(&q(1, 4)).unwrap();
        // p = 3 is inert for Q(i)
        let mut g = UnitQuotient::new(&f, 3, 2).unwrap();
        let chars = g.characters();
        let chi = chars.iter().find(|c| g.conductor(c) == 2).unwrap().clone();
        let ex = toral_expansion(&g, &chi, 2).unwrap();
        let nonzero: Vec<(u32, i64)> = ex.coeffs.iter().map(|(a, b)| (*a, *b)).filter(|x| x.1 != 0).collect();
        assert_eq!(nonzero, vec![(0, 1), (2, -1)]);
        // the integral in lambda form
        let p = 3i64;
        let l = lambda_p(3);
        let leta = q(3, 4);
        let expect = rf(Laurent::from_i64((p + 1) * (p + 1)).minus(&l.times(&l))).scale(&(&leta * &leta / qi(9 * 9)));
        assert!(ex.integral().unwrap().eq_exact(&expect));
    }

    #[test]
    fn ramified_unramified_character_integral() {
        let p = 2;
        let l = lambda_p(p);
        for om in [1i8, -1] {
            let v = unramified_character_integral(p, &Splitting::Ramified, om);
            let expect = rf(Laurent::from_i64(3).plus(&l.scale(&qi(om as i64)))).scale(&q(1, 3));
            assert!(v.eq_exact(&expect));
        }
    }

    #[test]
    fn quaternion_primes() {
        for p in [2u64, 3, 5, 7] {
            assert!(all_passed(&verify_alpha_quaternion(p)));
        }
        assert_eq!(alpha_quaternion_expected(3, &Splitting::Inert, 1, 1), q(2, 3));
        assert_eq!(alpha_quaternion_expected(2, &Splitting::Ramified, 1, -1), qi(0));
        assert_eq!(l_ratio_quaternion(2, &Splitting::Ramified, 1, 1).unwrap(), q(1, 2));
        assert!(quaternion_prime_integral(&Splitting::Split, 1, 1).is_err());
    }

    #[test]
    fn archimedean() {
        assert!(all_passed(&verify_alpha_infinity(&[6, 8, 10, 12, 20])));
        let top: Vec<Q> = (0..=12).map(|j| if j == 0 { qi(1) } else { qi(0) }).collect();
        assert_eq!(alpha_infinity(12, &top).unwrap(), alpha_infinity_expected(12, &qi(1)));
        assert_eq!(arch_l_ratio(12), PowerProduct::rational(&q(13, 2)).mul(&PowerProduct::symbol("pi", -1)));
        let zero_top: Vec<Q> = (0..=6).map(|j| qi(j as i64)).collect();
        assert!(alpha_infinity(6, &zero_top).unwrap().is_zero());
        assert!(alpha_infinity(6, &vec![qi(0); 7]).is_err());
    }

    proptest! {
        #[test]
        fn arch_integral_numeric(coeffs in prop::collection::vec(-5i64..6, 9)) {
            prop_assume!(coeffs.iter().any(|&c| c != 0));
            let v: Vec<Q> = coeffs.iter().map(|&c| qi(c)).collect();
            let exact = arch_toral_integral(&v).unwrap();
            let num = arch_toral_integral_numeric(&v, 64);
            prop_assert!((crate::exact::q_to_f64(&exact) - num).abs() < 1e-12);
        }

        #[test]
        fn phi_forms_agree(t in 0.01f64..3.1, p in prop::sample::select(vec![2u64, 3, 5, 7]), m in 0u32..8) {
            let a = Complex64::from_polar(1.0, t);
            let s = Complex64::new((p as f64).powf(-0.5), 0.0);
            let x = phi_numeric(a, p, m).unwrap();
            let y = phi_total(&a, &a.inv(), &s, p, m);
            prop_assert!((x - y).norm() < 1e-9);
            prop_assert!(y.im.abs() < 1e-12);
        }
    }
}
