//! Constants of the lift at the CM point: the local constants `C_p`, the
//! period constants of both sides, the Fourier-coefficient prefactor, the
//! assembled constant, central values and the positivity pipeline.
//!
//! `L(Ad, 1)` stays symbolic (`L_ad`, `L_ad'`) in every exact constant and is
//! only substituted at the report layer.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde_json::json;

use crate::eigenforms::{
    eigenforms, quaternionic_eigenforms, satake_traces, sigma, toral_period_f,
    toral_period_fprime, EllipticEigenform, Hurwitz, QuaternionicForm, ToralPeriod,
};
use crate::exact::powprod::{Exp, PowerProduct};
use crate::exact::quadnum::QuadNum;
use crate::exact::{factorize, q, q_to_f64, qi, qpow, FieldElem, Scalar, Q};
use crate::heckechar::{unramified_character, value_at_prime, HeckeCharacter};
use crate::lfactors::{
    adjoint_special, adjoint_unramified, basechange_twisted_special, basechange_twisted_unramified, dirichlet_coeffs,
    satake_from_trace, AfeParams, ArchFactor, CompletedL,
};
use crate::quadfield::{field_from_xi, QuadField, Splitting};
use crate::report::{Report, Status};
use crate::spherical::sym_weight;
use crate::Error;

pub const L_AD: &str = "L_ad";
pub const L_AD_PRIME: &str = "L_ad'";
/// `e^{-4 pi sqrt(n(xi))}`.
pub const E_XI: &str = "e_xi";

/// Where the coefficient function is evaluated. Carried, never used.
#[derive(Clone, Debug, Default)]
pub struct G0Profile {
    /// `p -> i_p(chi) - mu_p` for the diagonal local components.
    pub exponents: BTreeMap<u64, i32>,
    pub eta_inf: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct LiftContext {
    pub d_b: u64,
    pub d: u64,
    pub kappa: u32,
    pub field: QuadField,
    pub xi_primitive: bool,
    pub chi: HeckeCharacter,
    /// Atkin-Lehner signs of `f` at `p | D`.
    pub eps: BTreeMap<u64, i8>,
    /// Signs of `f'` at `p | d_B`: the eigenvalue of a uniformizer of the
    /// local maximal order divided by `p^{kappa/2}`.
    pub eps_prime: BTreeMap<u64, i8>,
    pub g0: G0Profile,
}

fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

impl LiftContext {
    /// The unramified character of weight `kappa` on `Q(xi)`.
    pub fn new(d_b: u64, d: u64, kappa: u32, norm_xi: &Q, xi_primitive: bool) -> Result<Self, Error> {
        if d_b == 0 || factorize(d_b).iter().any(|&(_, e)| e > 1) || prime_divisors(d_b).len() % 2 == 0 {
            return Err(Error::Precondition(format!(
                "d_B = {} is not a product of an odd number of distinct primes",
                d_b
            )));
        }
        if d == 0 || d_b % d != 0 {
            return Err(Error::Precondition(format!("D = {} does not divide d_B = {}", d, d_b)));
        }
        if kappa <= 4 || kappa % 2 != 0 {
            return Err(Error::Precondition(format!("kappa = {} is not even and > 4", kappa)));
        }
        let field = field_from_xi(norm_xi)?;
        if let Some(p) = prime_divisors(d_b).into_iter().find(|&p| field.splitting(p) == Splitting::Split) {
            return Err(Error::Precondition(format!("{} | d_B splits in E: E does not embed in B", p)));
        }
        let chi = unramified_character(&field, kappa)?;
        Ok(Self::with_character(d_b, d, kappa, chi, xi_primitive))
    }

    /// No checks on the character: inadmissible ones are the point of the
    /// vanishing tables.
    pub fn with_character(d_b: u64, d: u64, kappa: u32, chi: HeckeCharacter, xi_primitive: bool) -> Self {
        let field = chi.field.clone();
        let mut g0 = G0Profile::default();
        for p in prime_divisors(d_b).into_iter().chain(field.mu_support()).chain(chi.conductor_exponents.keys().copied()) {
            let i = *chi.conductor_exponents.get(&p).unwrap_or(&0) as i32;
            g0.exponents.insert(p, i - field.splitting_type(p).mu_p);
        }
        LiftContext {
            d_b,
            d,
            kappa,
            field,
            xi_primitive,
            chi,
            eps: BTreeMap::new(),
            eps_prime: BTreeMap::new(),
            g0,
        }
    }

    pub fn set_eps(mut self, p: u64, s: i8) -> Self {
        self.eps.insert(p, s);
        self
    }

    pub fn set_eps_prime(mut self, p: u64, s: i8) -> Self {
        self.eps_prime.insert(p, s);
        self
    }

    pub fn i_p(&self, p: u64) -> u32 {
        *self.chi.conductor_exponents.get(&p).unwrap_or(&0)
    }

    /// `A(chi) = prod p^{i_p}`.
    pub fn a_chi(&self) -> u64 {
        self.chi.conductor_exponents.iter().map(|(p, i)| p.pow(*i)).product()
    }

    pub fn d_primes(&self) -> Vec<u64> {
        prime_divisors(self.d)
    }

    pub fn d_b_primes(&self) -> Vec<u64> {
        prime_divisors(self.d_b)
    }

    /// Primes where some local constant can differ from 1.
    pub fn relevant_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.g0.exponents.keys().copied().collect();
        ps.sort();
        ps.dedup();
        ps
    }

    /// `chi_p(varpi_p)` at a ramified `p`, which is `+-1` in the cases used.
    pub fn omega(&self, p: u64) -> Result<i8, Error> {
        if self.field.splitting(p) != Splitting::Ramified {
            return Err(Error::CaseMismatch(format!("{} is not ramified in E", p)));
        }
        if self.i_p(p) > 0 {
            return Err(Error::Precondition(format!("chi is ramified at {}", p)));
        }
        let v = value_at_prime(&self.chi, p)?.values.remove(0);
        sign_of(&v).ok_or_else(|| Error::Domain(format!("chi_{}(varpi) = {} is not +-1", p, v)))
    }

    fn n_xi(&self) -> Q {
        self.field.norm_xi.clone()
    }

    fn w_over_h(&self) -> Q {
        q(self.field.unit_count as i64, self.field.class_number as i64)
    }
}

fn sign_of(v: &QuadNum) -> Option<i8> {
    if !v.y.is_zero() {
        return None;
    }
    if v.x.is_one() {
        Some(1)
    } else if v.x == -Q::one() {
        Some(-1)
    } else {
        None
    }
}

/// Why a quantity is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Vanishing {
    /// `i_p(chi) > 0` at some `p | d_B`.
    RamifiedAtDb(u64),
    /// The infinity type of `chi` is not `-kappa`.
    Weight { chi: u32, kappa: u32 },
    /// `epsilon_p != epsilon'_p` at `p | D`.
    SignMismatch(u64),
    /// `p | D` inert in `E`.
    InertAtD(u64),
    /// `p | D` ramified with `chi_p(varpi_p) = -epsilon_p`.
    RootNumber(u64),
    /// `p | d_B` ramified with `delta_p != omega_p`.
    LocalCharacter(u64),
}

impl fmt::Display for Vanishing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vanishing::RamifiedAtDb(p) => write!(f, "chi is ramified at {} | d_B", p),
            Vanishing::Weight { chi, kappa } => write!(f, "chi has weight {} but kappa = {}", chi, kappa),
            Vanishing::SignMismatch(p) => write!(f, "Atkin-Lehner signs of f and f' differ at {}", p),
            Vanishing::InertAtD(p) => write!(f, "{} | D is inert in E", p),
            Vanishing::RootNumber(p) => write!(f, "chi_{0}(varpi_{0}) = -epsilon_{0}", p),
            Vanishing::LocalCharacter(p) => write!(f, "the local character of f' differs from chi at {}", p),
        }
    }
}

fn missing(what: &str, p: u64) -> Error {
    Error::Precondition(format!("{} at {} is not set", what, p))
}

/// The lift is nonzero only for admissible characters and matching signs.
pub fn lift_admissible(ctx: &LiftContext) -> Result<Result<(), Vanishing>, Error> {
    for p in ctx.d_b_primes() {
        if ctx.i_p(p) > 0 {
            return Ok(Err(Vanishing::RamifiedAtDb(p)));
        }
    }
    if ctx.chi.kappa != ctx.kappa {
        return Ok(Err(Vanishing::Weight { chi: ctx.chi.kappa, kappa: ctx.kappa }));
    }
    for p in ctx.d_primes() {
        let e = ctx.eps.get(&p).ok_or_else(|| missing("epsilon", p))?;
        let e2 = ctx.eps_prime.get(&p).ok_or_else(|| missing("epsilon'", p))?;
        if e != e2 {
            return Ok(Err(Vanishing::SignMismatch(p)));
        }
    }
    Ok(Ok(()))
}

/// The two sets that kill the period of `f`.
pub fn f_side_vanishing(ctx: &LiftContext) -> Result<Option<Vanishing>, Error> {
    for p in ctx.d_primes() {
        match ctx.field.splitting(p) {
            Splitting::Inert => return Ok(Some(Vanishing::InertAtD(p))),
            Splitting::Ramified => {
                let e = *ctx.eps.get(&p).ok_or_else(|| missing("epsilon", p))?;
                if ctx.omega(p)? == -e {
                    return Ok(Some(Vanishing::RootNumber(p)));
                }
            }
            Splitting::Split => {}
        }
    }
    Ok(None)
}

pub fn fprime_side_vanishing(ctx: &LiftContext) -> Result<Option<Vanishing>, Error> {
    for p in ctx.d_b_primes() {
        if ctx.field.splitting(p) == Splitting::Ramified {
            let delta = *ctx.eps_prime.get(&p).ok_or_else(|| missing("epsilon'", p))?;
            if ctx.omega(p)? != delta {
                return Ok(Some(Vanishing::LocalCharacter(p)));
            }
        }
    }
    Ok(None)
}

/// `C_p(f, xi, chi)`.
pub fn local_constant_cp(ctx: &LiftContext, p: u64) -> Result<PowerProduct, Error> {
    let loc = ctx.field.splitting_type(p);
    if ctx.d_b % p != 0 {
        let i = ctx.i_p(p) as i32;
        let mut c = qpow(p as i64, 2 * loc.mu_p - i);
        if i > 0 {
            c *= Q::one() - q(loc.e_p as i64, p as i64);
        }
        return Ok(PowerProduct::rational(&c));
    }
    if loc.splitting == Splitting::Split {
        return Err(Error::Precondition(format!("{} | d_B splits in E: no embedding", p)));
    }
    if ctx.d % p != 0 {
        return Ok(PowerProduct::one());
    }
    match loc.splitting {
        Splitting::Inert => {
            let e = *ctx.eps.get(&p).ok_or_else(|| missing("epsilon", p))?;
            Ok(PowerProduct::int(2 * e as i64))
        }
        Splitting::Ramified => Ok(PowerProduct::rational(&q(1, p as i64 + 1))),
        Splitting::Split => Err(Error::Precondition(format!("{} | d_B splits in E: no embedding", p))),
    }
}

pub fn cp_product(ctx: &LiftContext) -> Result<PowerProduct, Error> {
    let mut acc = PowerProduct::one();
    for p in ctx.relevant_primes() {
        acc = acc.mul(&local_constant_cp(ctx, p)?);
    }
    Ok(acc)
}

/// `L_p(eta_p, 1)`.
fn l_eta(ctx: &LiftContext, p: u64) -> Q {
    let e = ctx.field.splitting_type(p).e_p;
    (Q::one() - q(e as i64, p as i64)).recip()
}

fn l_eta_product(ctx: &LiftContext, k: i64) -> PowerProduct {
    let mut acc = PowerProduct::one();
    for p in ctx.chi.conductor_exponents.keys() {
        acc = acc.mul(&PowerProduct::rational(&l_eta(ctx, *p)).pow(k));
    }
    acc
}

fn abs_disc(ctx: &LiftContext) -> Q {
    qi(ctx.field.disc.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Constant {
    Value(PowerProduct),
    Vanishes(Vanishing),
}

impl Constant {
    pub fn value(&self) -> Option<&PowerProduct> {
        match self {
            Constant::Value(v) => Some(v),
            Constant::Vanishes(_) => None,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Value(v) => write!(f, "{}", v),
            Constant::Vanishes(r) => write!(f, "0 ({})", r),
        }
    }
}

/// The constant relating `|P_chi(f)|^2 / <f, f>` to `L(Pi, chi^{-1}, 1/2)`.
pub fn constant_c_f_chi(ctx: &LiftContext) -> Result<Constant, Error> {
    if let Some(v) = f_side_vanishing(ctx)? {
        return Ok(Constant::Vanishes(v));
    }
    let dd = ctx.d_primes().len() as i64;
    let c = PowerProduct::rational_pow(&qi(2), Exp::from_integer(dd - 2))
        .mul(&PowerProduct::rational(&abs_disc(ctx)))
        .mul(&l_eta_product(ctx, 2))
        .div(&PowerProduct::rational_pow(&qi(ctx.d as i64), Exp::new(3, 2)))
        .div(&PowerProduct::int(ctx.a_chi() as i64))
        .mul(&PowerProduct::symbol(L_AD, -1));
    Ok(Constant::Value(c))
}

/// The same for `f'`; `ratio` is the highest-weight share of `f'_infinity`.
pub fn constant_c_fprime_chi(ctx: &LiftContext, ratio: &Q) -> Result<Constant, Error> {
    if let Some(v) = fprime_side_vanishing(ctx)? {
        return Ok(Constant::Vanishes(v));
    }
    let mut c = PowerProduct::rational_pow(&abs_disc(ctx), Exp::new(1, 2))
        .mul(&PowerProduct::int(ctx.kappa as i64 + 1))
        .div(&PowerProduct::int(4 * ctx.a_chi() as i64))
        .mul(&l_eta_product(ctx, 2))
        .mul(&PowerProduct::rational(ratio))
        .mul(&PowerProduct::symbol(L_AD_PRIME, -1));
    for p in ctx.d_b_primes() {
        let r = ctx.field.splitting_type(p).r_p;
        c = c.mul(&PowerProduct::rational(&q(r as i64, p as i64)));
    }
    Ok(Constant::Value(c))
}

/// `|(v, X^kappa)|^2 / |v|^2` for the unitary inner product on `V_kappa`.
pub fn fprime_ratio(v: &[QuadNum]) -> Result<Q, Error> {
    let k = v.len().checked_sub(1).ok_or_else(|| Error::Precondition("empty vector".into()))? as u32;
    let norm = v
        .iter()
        .enumerate()
        .fold(Q::zero(), |acc, (j, c)| acc + c.norm() * sym_weight(k, j as u32));
    if norm.is_zero() {
        return Err(Error::Precondition("zero vector".into()));
    }
    Ok(v[0].norm() / norm)
}

// ---------------------------------------------------------------------------
// The Fourier coefficient at the CM point

#[derive(Clone, Debug, PartialEq)]
pub struct FourierPrefactor {
    pub coefficient: PowerProduct,
    /// The power of `eta_infinity`, `kappa/2 + 1`.
    pub eta_power: u32,
    /// `4 sqrt(n(xi))`, the rate of `exp(-pi rate eta)`.
    pub rate: PowerProduct,
}

impl FourierPrefactor {
    pub fn eval(&self, eta: f64) -> f64 {
        self.coefficient.to_f64(|_| f64::NAN)
            * eta.powi(self.eta_power as i32)
            * (-std::f64::consts::PI * self.rate.to_f64(|_| f64::NAN) * eta).exp()
    }
}

impl fmt::Display for FourierPrefactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rate = if self.rate == PowerProduct::one() {
            String::new()
        } else {
            format!("{}*", self.rate.to_string().replace(" * ", "*"))
        };
        write!(f, "{} * eta^{} * exp(-{}pi*eta)", self.coefficient, self.eta_power, rate)
    }
}

/// `2^{kappa-1} n^{kappa/4} (w/h) prod C_p eta^{kappa/2+1} e^{-4 pi sqrt(n) eta}`.
pub fn fourier_prefactor(ctx: &LiftContext) -> Result<FourierPrefactor, Error> {
    let k = ctx.kappa as i64;
    let coefficient = PowerProduct::rational_pow(&qi(2), Exp::from_integer(k - 1))
        .mul(&PowerProduct::rational_pow(&ctx.n_xi(), Exp::new(k, 4)))
        .mul(&PowerProduct::rational(&ctx.w_over_h()))
        .mul(&cp_product(ctx)?);
    let rate = PowerProduct::int(4).mul(&PowerProduct::rational_pow(&ctx.n_xi(), Exp::new(1, 2)));
    Ok(FourierPrefactor {
        coefficient,
        eta_power: ctx.kappa / 2 + 1,
        rate,
    })
}

/// The vector `L(f,f')^chi_xi(g_0)` from the two periods.
pub fn fourier_coefficient_value(
    ctx: &LiftContext,
    p_f: Complex64,
    p_fprime: &[Complex64],
    eta: f64,
) -> Result<Vec<Complex64>, Error> {
    if !ctx.xi_primitive {
        return Err(Error::Precondition("xi must be primitive".into()));
    }
    if !(eta > 0.0) {
        return Err(Error::Domain("eta_infinity must be positive".into()));
    }
    match lift_admissible(ctx)? {
        Err(v @ Vanishing::SignMismatch(_)) => {
            return Err(Error::Precondition(format!("the lift vanishes identically: {}", v)));
        }
        Err(_) => return Ok(vec![Complex64::zero(); p_fprime.len()]),
        Ok(()) => {}
    }
    let c = fourier_prefactor(ctx)?.eval(eta) * p_f.conj();
    Ok(p_fprime.iter().map(|v| c * v).collect())
}

// ---------------------------------------------------------------------------
// The assembled constant

/// The closed form of `C(f, f', xi, chi)`.
pub fn constant_c_total(ctx: &LiftContext, ratio: &Q) -> Result<Constant, Error> {
    if let Err(v) = lift_admissible(ctx)? {
        return Ok(Constant::Vanishes(v));
    }
    if let Some(v) = f_side_vanishing(ctx)?.or(fprime_side_vanishing(ctx)?) {
        return Ok(Constant::Vanishes(v));
    }
    let k = ctx.kappa as i64;
    let dd = ctx.d_primes().len() as i64;
    let mut c = PowerProduct::rational_pow(&qi(2), Exp::from_integer(2 * k + dd - 6))
        .mul(&PowerProduct::int(k + 1))
        .mul(&PowerProduct::rational_pow(&ctx.n_xi(), Exp::new(k, 2)))
        .mul(&PowerProduct::rational_pow(&abs_disc(ctx), Exp::new(3, 2)))
        .mul(&PowerProduct::rational(&ctx.w_over_h()).pow(2))
        .div(&PowerProduct::rational_pow(&qi(ctx.d as i64), Exp::new(3, 2)))
        .mul(&PowerProduct::symbol(L_AD, -1))
        .mul(&PowerProduct::symbol(L_AD_PRIME, -1));
    for p in ctx.relevant_primes() {
        c = c.mul(&printed_local(ctx, p));
    }
    c = c.mul(&PowerProduct::symbol(E_XI, 2)).mul(&PowerProduct::rational(ratio));
    Ok(Constant::Value(c))
}

/// The prime-`p` part of the closed form, with `p^{-4 i_p}` from `A(chi)^{-4}`.
fn printed_local(ctx: &LiftContext, p: u64) -> PowerProduct {
    let loc = ctx.field.splitting_type(p);
    if ctx.d_b % p != 0 {
        let mut c = qpow(p as i64, 4 * loc.mu_p - 4 * ctx.i_p(p) as i32);
        if ctx.i_p(p) > 0 {
            let t = Q::one() - q(loc.e_p as i64, p as i64);
            c *= &t * &t;
        }
        PowerProduct::rational(&c)
    } else {
        let mut c = q(loc.r_p as i64, p as i64);
        if ctx.d % p == 0 {
            c /= qi(p as i64 + 1).pow(2);
        }
        PowerProduct::rational(&c)
    }
}

/// The prime-`p` part of `|prefactor|^2 C(f,chi) C(f',chi)`.
fn assembled_local(ctx: &LiftContext, p: u64) -> Result<PowerProduct, Error> {
    let mut c = local_constant_cp(ctx, p)?.pow(2);
    let i = ctx.i_p(p) as i64;
    if i > 0 {
        c = c
            .mul(&PowerProduct::rational_pow(&qi(p as i64), Exp::from_integer(-2 * i)))
            .mul(&PowerProduct::rational(&l_eta(ctx, p)).pow(4));
    }
    if ctx.d_b % p == 0 {
        c = c.mul(&PowerProduct::rational(&q(ctx.field.splitting_type(p).r_p as i64, p as i64)));
    }
    Ok(c)
}

/// `|prefactor(eta = 1)|^2 C(f, chi) C(f', chi)` with `e^{-8 pi sqrt n}` as `e_xi^2`.
pub fn assembled_constant(ctx: &LiftContext, ratio: &Q) -> Result<Constant, Error> {
    if let Err(v) = lift_admissible(ctx)? {
        return Ok(Constant::Vanishes(v));
    }
    let cf = constant_c_f_chi(ctx)?;
    let cfp = constant_c_fprime_chi(ctx, ratio)?;
    let (Constant::Value(cf), Constant::Value(cfp)) = (&cf, &cfp) else {
        let v = [cf, cfp].into_iter().find_map(|c| match c {
            Constant::Vanishes(v) => Some(v),
            _ => None,
        });
        return Ok(Constant::Vanishes(v.expect("one side vanishes")));
    };
    let pre = fourier_prefactor(ctx)?;
    Ok(Constant::Value(
        pre.coefficient.pow(2).mul(&PowerProduct::symbol(E_XI, 2)).mul(cf).mul(cfp),
    ))
}

/// Compares the closed form with the assembled product, in total and prime
/// by prime. The ratio must be `prod_{p | A(chi)} L_p(eta_p, 1)^4`, which is 1
/// when `A(chi) = 1`.
pub fn verify_constant_consistency(ctx: &LiftContext, ratio: &Q) -> Result<Vec<Report>, Error> {
    let suite = "constants-consistency";
    let inputs = json!({
        "d_B": ctx.d_b, "D": ctx.d, "kappa": ctx.kappa, "n_xi": ctx.n_xi().to_string(),
        "A_chi": ctx.a_chi(), "ratio_fprime": ratio.to_string(),
    });
    let total = constant_c_total(ctx, ratio)?;
    let assembled = assembled_constant(ctx, ratio)?;
    let mut out = vec![];
    match (&total, &assembled) {
        (Constant::Value(t), Constant::Value(a)) => {
            let r = a.div(t);
            let expected = l_eta_product(ctx, 4);
            out.push(
                Report::exact(suite, "total", inputs.clone(), a, t, r == expected).with_ratio(&r),
            );
            for p in ctx.relevant_primes() {
                let pa = assembled_local(ctx, p)?;
                let pt = printed_local(ctx, p);
                let rp = pa.div(&pt);
                let want = if ctx.i_p(p) > 0 {
                    PowerProduct::rational(&l_eta(ctx, p)).pow(4)
                } else {
                    PowerProduct::one()
                };
                out.push(
                    Report::exact(suite, format!("prime-{}", p), inputs.clone(), &pa, &pt, rp == want).with_ratio(&rp),
                );
            }
        }
        (Constant::Vanishes(a), Constant::Vanishes(b)) => {
            out.push(Report::exact(suite, "total", inputs, &total, &assembled, true).with_status(Status::VanishingBranch));
            let _ = (a, b);
        }
        _ => out.push(Report::exact(suite, "total", inputs, &total, &assembled, false)),
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Central values

/// `gamma(s) L(s)`, the completed value without the conductor power.
#[derive(Clone, Copy, Debug)]
pub struct LValue {
    pub value: f64,
    pub residual: f64,
    pub terms: usize,
}

const MAX_TERMS: usize = 4000;

fn afe_growing(
    first: usize,
    build: impl Fn(usize) -> Result<CompletedL, Error>,
    s: f64,
) -> Result<LValue, Error> {
    let mut n = first;
    loop {
        let l = build(n)?;
        match l.evaluate(Complex64::new(s, 0.0), &AfeParams::default()) {
            Ok(r) => {
                let val = r.completed.0 / (l.conductor.powf(s / 2.0));
                // the functional equation off the symmetry point
                let off = l.evaluate(Complex64::new(s.max(1.0 - s) + 0.3, 0.5), &AfeParams::default())?;
                return Ok(LValue {
                    value: val,
                    residual: r.residual.max(off.residual / off.completed.0.hypot(off.completed.1).max(1e-300)),
                    terms: n,
                });
            }
            Err(Error::Numeric(m)) if m.starts_with("insufficient") && n < MAX_TERMS => n *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn check_twist_data(g: &EllipticEigenform, chi: &HeckeCharacter) -> Result<(), Error> {
    if !chi.conductor_exponents.is_empty() {
        return Err(Error::Precondition("central values are implemented for unramified chi only".into()));
    }
    if g.level() == 2 && (g.al_sign.is_none() || chi.field.splitting(2) != Splitting::Ramified) {
        return Err(Error::Precondition("level 2 needs a newform and 2 ramified in E".into()));
    }
    Ok(())
}

/// `L(Pi, chi^{-1}, 1/2)` for the base change `Pi` of `g`, with `chi` of
/// weight `kappa = weight(g) - 2` or `weight(g)` (the archimedean
/// parameter is `kappa/2`). Needs the eigenvalues of `g` up to the
/// number of terms used; `g` is re-expanded when more are needed.
pub fn twisted_central_value(g: &EllipticEigenform, chi: &HeckeCharacter) -> Result<LValue, Error> {
    check_twist_data(g, chi)?;
    let k = g.weight();
    let d2 = (chi.field.disc * chi.field.disc) as f64;
    let conductor = if g.level() == 1 { d2 } else { 2.0 * d2 };
    let omega2 = if g.level() == 2 {
        let v = value_at_prime(chi, 2)?.values.remove(0);
        sign_of(&v).ok_or_else(|| Error::Domain("chi_2(varpi) is not +-1".into()))?
    } else {
        1
    };
    let build = |n: usize| -> Result<CompletedL, Error> {
        let g = expanded(g, n)?;
        let tr: BTreeMap<u64, f64> = satake_traces(&g).into_iter().collect();
        let err = std::cell::RefCell::new(None);
        let coeffs = dirichlet_coeffs(n, |p| {
            let sp = chi.field.splitting(p);
            let r = if g.level() == 2 && p == 2 {
                // 1 + epsilon omega 2^{-1/2} t
                let eps = g.al_sign.unwrap_or(1) as i8;
                basechange_twisted_special(2, &sp, 1, -eps, omega2, &Complex64::new(0.5f64.sqrt(), 0.0))
                    .map(|f| f.inv_poly)
            } else {
                let a = satake_from_trace(tr[&p]);
                value_at_prime(chi, p).and_then(|v| {
                    let ci: Vec<Complex64> = v.inverses().iter().map(|c| c.to_complex()).collect();
                    basechange_twisted_unramified(p, &sp, &a, &a.inv(), &ci, 0).map(|f| f.inv_poly)
                })
            };
            r.unwrap_or_else(|e| {
                *err.borrow_mut() = Some(e);
                crate::exact::poly::Poly::one()
            })
        });
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        Ok(CompletedL {
            coeffs: coeffs.iter().map(|c| c.re).collect(),
            arch: ArchFactor::basechange_twist_ds(k, &qi(chi.kappa as i64 / 2)),
            conductor,
            eps: 1.0,
            poles: vec![],
        })
    };
    afe_growing(g.expansion.n().max(200), build, 0.5)
}

/// `L(Ad g, 1)`.
pub fn adjoint_value(g: &EllipticEigenform) -> Result<LValue, Error> {
    if g.level() == 2 && g.al_sign.is_none() {
        return Err(Error::Precondition("adjoint value needs a newform".into()));
    }
    let build = |n: usize| -> Result<CompletedL, Error> {
        let g = expanded(g, n)?;
        let tr: BTreeMap<u64, f64> = satake_traces(&g).into_iter().collect();
        let coeffs = dirichlet_coeffs(n, |p| {
            if g.level() == 2 && p == 2 {
                adjoint_special::<Complex64>(2).inv_poly
            } else {
                let a = satake_from_trace(tr[&p]);
                adjoint_unramified(p, &a, &a.inv()).inv_poly
            }
        });
        Ok(CompletedL {
            coeffs: coeffs.iter().map(|c| c.re).collect(),
            arch: ArchFactor::adjoint_ds(g.weight()),
            conductor: if g.level() == 1 { 1.0 } else { 4.0 },
            eps: 1.0,
            poles: vec![],
        })
    };
    afe_growing(g.expansion.n().max(200), build, 1.0)
}

/// `g` with at least `n` coefficients, matched by its Hecke eigenvalues.
fn expanded(g: &EllipticEigenform, n: usize) -> Result<EllipticEigenform, Error> {
    if g.expansion.n() >= n {
        return Ok(g.clone());
    }
    eigenforms(g.weight(), g.level(), n)?
        .into_iter()
        .find(|h| (2..=7).all(|m| h.a(m) == g.a(m)))
        .ok_or_else(|| Error::Numeric("eigenform lost on re-expansion".into()))
}

// ---------------------------------------------------------------------------
// The quaternionic side

/// `epsilon'_2`: `sigma(1 + i) f' = epsilon' 2^{kappa/2} f'`.
pub fn quaternionic_sign(f: &QuaternionicForm) -> Result<i8, Error> {
    let w = sigma(&Hurwitz([2, 2, 0, 0]).matrix(), f.kappa);
    let img = w.mul_vec(&f.v);
    let i = (0..f.v.len())
        .find(|&i| !f.v[i].is_nil())
        .ok_or_else(|| Error::Precondition("zero form".into()))?;
    let l = img[i].divide(&f.v[i]);
    let scale = qpow(2, f.kappa as i32 / 2);
    let ok = img.iter().zip(&f.v).all(|(a, b)| *a == l.times(b));
    match (ok, l.y.is_zero()) {
        (true, true) if l.x == scale => Ok(1),
        (true, true) if l.x == -scale => Ok(-1),
        _ => Err(Error::Precondition("not an eigenvector of the uniformizer at 2".into())),
    }
}

/// The level-2 newform of weight `kappa + 2` matching `f'` at `T_3`.
pub fn jl_partner(f: &QuaternionicForm, eigenvalues: &BTreeMap<u64, Q>, n: usize) -> Result<EllipticEigenform, Error> {
    let t3 = eigenvalues.get(&3).ok_or_else(|| Error::Precondition("T_3 eigenvalue missing".into()))?;
    eigenforms(f.kappa + 2, 2, n)?
        .into_iter()
        .find(|g| g.a(3) == t3)
        .ok_or_else(|| Error::Numeric(format!("no newform of weight {} with a_3 = {}", f.kappa + 2, t3)))
}

// ---------------------------------------------------------------------------
// The central-value identity

pub struct Pair {
    pub f: EllipticEigenform,
    pub fprime: QuaternionicForm,
    pub fprime_eigenvalues: BTreeMap<u64, Q>,
}

fn symbol_values(l_ad: f64, l_ad_prime: f64, n_xi: &Q) -> impl Fn(&str) -> f64 {
    let e = (-4.0 * std::f64::consts::PI * q_to_f64(n_xi).sqrt()).exp();
    move |s: &str| match s {
        L_AD => l_ad,
        L_AD_PRIME => l_ad_prime,
        E_XI => e,
        _ => f64::NAN,
    }
}

/// Both sides of `|L(f,f')(g_0)|^2 / (<f,f><f',f'>) = C L(L(f,f'), chi^{-1}, 1/2)`
/// with the periods expressed through the one-sided constants, the split of
/// the degree-8 function into the two base changes, and the period
/// normalization of `f` (the symbolic torus constant) at two truncations.
pub fn central_value_identity(ctx: &LiftContext, pair: &Pair) -> Result<Vec<Report>, Error> {
    let suite = "central-value";
    let inputs = json!({"D": ctx.d, "kappa": ctx.kappa, "n_xi": ctx.n_xi().to_string()});
    let mut out = vec![];

    let split = crate::spinor::verify_convolution(&[2, 3, 5], 2, 7);
    let ok = crate::report::all_passed(&split);
    out.push(Report::exact(
        suite,
        "degree-8-split",
        json!({"cites": "prop-2-10", "cases": split.len()}),
        "L(L(f,f'), chi^-1, s)",
        "L(Pi, chi^-1, s) L(Pi', chi^-1, s)",
        ok,
    ));

    let ratio = fprime_ratio(&pair.fprime.v)?;
    let total = constant_c_total(ctx, &ratio)?;
    let assembled = assembled_constant(ctx, &ratio)?;
    let (Constant::Value(total), Constant::Value(assembled)) = (total, assembled) else {
        out.push(
            Report::exact(suite, "both-sides", inputs, 0, 0, true).with_status(Status::VanishingBranch),
        );
        return Ok(out);
    };
    let g = jl_partner(&pair.fprime, &pair.fprime_eigenvalues, 0)?;
    let l_pi = twisted_central_value(&pair.f, &ctx.chi)?;
    let l_pi_prime = twisted_central_value(&g, &ctx.chi)?;
    let l_ad = adjoint_value(&pair.f)?;
    let l_ad_prime = adjoint_value(&g)?;
    let sv = symbol_values(l_ad.value, l_ad_prime.value, &ctx.n_xi());
    let product = l_pi.value * l_pi_prime.value;
    let lhs = assembled.to_f64(&sv) * product;
    let rhs = total.to_f64(&sv) * product;
    let residual = [l_pi, l_pi_prime, l_ad, l_ad_prime].iter().map(|l| l.residual).fold(0.0, f64::max);
    let tol = (residual * 1e3).max(1e-10);
    out.push(Report::numeric(suite, "both-sides", inputs.clone(), lhs, rhs, tol));

    if f_side_vanishing(ctx)?.is_some() {
        return Ok(out);
    }
    let (c1, p1) = torus_constant_squared(ctx, &pair.f)?;
    let finer = expanded(&pair.f, 2 * pair.f.expansion.n())?;
    let (c2, _) = torus_constant_squared(ctx, &finer)?;
    out.push(
        Report::numeric(suite, "torus-constant-squared", inputs, c1, c2, 1e-8)
            .with_ratio(format!("{:.12e} (period {:.6e} +- {:.1e})", c1, p1.value.norm(), p1.tail_bound)),
    );
    Ok(out)
}

/// `|y^{k/2} f(z)|^2 / (<f,f> C(f,chi) L(Pi, chi^{-1}, 1/2))` with
/// `<f,f> = 2^{-k-1} D L(Ad, 1)`, so `L(Ad, 1)` cancels: the square of the
/// constant between the classical value at the CM point and the adelic
/// period.
pub fn torus_constant_squared(ctx: &LiftContext, f: &EllipticEigenform) -> Result<(f64, ToralPeriod), Error> {
    let Constant::Value(cf) = constant_c_f_chi(ctx)? else {
        return Err(Error::Precondition("the period of f vanishes".into()));
    };
    let cf0 = cf.mul(&PowerProduct::symbol(L_AD, 1)).to_f64(|_| f64::NAN);
    let norm0 = 2f64.powi(-(ctx.kappa as i32) - 1) * ctx.d as f64;
    let p = toral_period_f(f, &ctx.chi)?;
    let l = twisted_central_value(f, &ctx.chi)?;
    Ok((p.value.norm_sqr() / (norm0 * cf0 * l.value), p))
}

// ---------------------------------------------------------------------------
// Positivity

pub struct PositivityOutcome {
    pub context: LiftContext,
    pub pair: Pair,
    pub reports: Vec<Report>,
}

/// The instance `d_B = 2`, `xi = i/2`, unramified `chi`.
pub fn instance(d: u64, kappa: u32) -> Result<LiftContext, Error> {
    match d {
        1 if kappa >= 12 && kappa % 4 == 0 => {}
        2 if kappa >= 8 && kappa % 8 == 0 => {}
        1 | 2 => {
            return Err(Error::Precondition(format!(
                "(D, kappa) = ({}, {}) is outside kappa >= 12, 4 | kappa (D = 1) and kappa >= 8, 8 | kappa (D = 2)",
                d, kappa
            )))
        }
        _ => return Err(Error::Precondition(format!("D = {} does not divide 2", d))),
    }
    LiftContext::new(2, d, kappa, &q(1, 4), true)
}

/// Finds `(f, f')` with nonzero periods on both sides and concludes
/// positivity of the three central values.
pub fn positivity_report(d: u64, kappa: u32) -> Result<PositivityOutcome, Error> {
    let base = instance(d, kappa)?;
    let suite = "positivity";
    let inputs = json!({"D": d, "kappa": kappa, "n_xi": "1/4", "chi": "unramified"});
    let fs = eigenforms(kappa, d as u32, 0)?;
    let fps = quaternionic_eigenforms(kappa)?;
    let mut reports = vec![];
    let mut found = None;
    'outer: for f in &fs {
        let period = toral_period_f(f, &base.chi)?;
        if !period.certified_nonzero() {
            continue;
        }
        for (fp, ev) in &fps {
            let proj = toral_period_fprime(fp, &base.chi)?;
            if proj.iter().all(|c| c.is_nil()) {
                continue;
            }
            let mut ctx = base.clone().set_eps_prime(2, quaternionic_sign(fp)?);
            if let Some(e) = f.al_sign {
                ctx = ctx.set_eps(2, e as i8);
            }
            let ratio = fprime_ratio(&fp.v)?;
            if let Constant::Value(_) = constant_c_total(&ctx, &ratio)? {
                found = Some((ctx, f.clone(), fp.clone(), ev.clone(), period, proj, ratio));
                break 'outer;
            }
        }
    }
    let Some((ctx, f, fp, ev, period, proj, ratio)) = found else {
        return Err(Error::Numeric(format!(
            "no admissible pair with nonzero periods for (D, kappa) = ({}, {}): this contradicts the existence result",
            d, kappa
        )));
    };
    reports.push(Report {
        suite: suite.into(),
        case_id: "period-f".into(),
        inputs: inputs.clone(),
        lhs: format!("{:.12e}", period.value.norm()),
        rhs: format!("> 2 * {:.1e}", period.tail_bound),
        ratio: None,
        abs_err: Some(period.tail_bound),
        status: if period.certified_nonzero() { Status::NumericPass } else { Status::Fail },
    });
    reports.push(Report::exact(suite, "period-fprime", inputs.clone(), &proj[0], "nonzero", !proj[0].is_nil()));

    let g = jl_partner(&fp, &ev, 0)?;
    let l_ad = adjoint_value(&f)?;
    let l_ad_prime = adjoint_value(&g)?;
    let sv = symbol_values(l_ad.value, l_ad_prime.value, &ctx.n_xi());
    let cf = constant_c_f_chi(&ctx)?;
    let cfp = constant_c_fprime_chi(&ctx, &ratio)?;
    let positive = |c: &Constant, l: f64| match c {
        Constant::Value(v) => v.sign == Some(1) && l > 0.0 && v.to_f64(&sv) > 0.0,
        Constant::Vanishes(_) => false,
    };
    let pf = positive(&cf, l_ad.value);
    let pfp = positive(&cfp, l_ad_prime.value);
    reports.push(Report::exact(suite, "C(f,chi)>0", inputs.clone(), &cf, format!("L_ad = {:.10e}", l_ad.value), pf));
    reports.push(Report::exact(
        suite,
        "C(f',chi)>0",
        inputs.clone(),
        &cfp,
        format!("L_ad' = {:.10e}", l_ad_prime.value),
        pfp,
    ));

    // L(Pi) = |P_f|^2 / (<f,f> C(f,chi)) > 0 follows; the AFE value is an
    // independent witness
    let l_pi = twisted_central_value(&f, &ctx.chi)?;
    let l_pi_prime = twisted_central_value(&g, &ctx.chi)?;
    let concl = |name: &str, implied: bool, l: f64, res: f64| {
        let ok = implied && l > 10.0 * res;
        Report {
            suite: suite.into(),
            case_id: name.into(),
            inputs: inputs.clone(),
            lhs: format!("{:.12e}", l),
            rhs: "> 0".into(),
            ratio: None,
            abs_err: Some(res),
            status: if ok { Status::NumericPass } else { Status::Fail },
        }
    };
    reports.push(concl("L(Pi,chi^-1,1/2)>0", period.certified_nonzero() && pf, l_pi.value, l_pi.residual));
    reports.push(concl("L(Pi',chi^-1,1/2)>0", !proj[0].is_nil() && pfp, l_pi_prime.value, l_pi_prime.residual));
    reports.push(concl(
        "L(L(f,f'),chi^-1,1/2)>0",
        period.certified_nonzero() && pf && !proj[0].is_nil() && pfp,
        l_pi.value * l_pi_prime.value,
        l_pi.residual.max(l_pi_prime.residual) * (l_pi.value + l_pi_prime.value),
    ));
    Ok(PositivityOutcome {
        context: ctx,
        pair: Pair { f, fprime: fp, fprime_eigenvalues: ev },
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss(d: u64, kappa: u32) -> LiftContext {
        LiftContext::new(2, d, kappa, &q(1, 4), true).unwrap()
    }

    fn ramified_chi(norm_xi: Q, kappa: u32, p: u64, i: u32) -> HeckeCharacter {
        let field = field_from_xi(&norm_xi).unwrap();
        let mut chi = unramified_character(&field, kappa).unwrap();
        chi.conductor_exponents.insert(p, i);
        chi
    }

    #[test]
    fn local_constants_printed_cases() {
        let ctx = gauss(1, 12);
        // 5 splits in Q(i), mu_5 = 0, chi unramified
        assert_eq!(local_constant_cp(&ctx, 5).unwrap(), PowerProduct::one());
        // 2 | d_B / D
        assert_eq!(local_constant_cp(&ctx, 2).unwrap(), PowerProduct::one());
        let ctx = gauss(2, 8).set_eps(2, 1).set_eps_prime(2, 1);
        assert_eq!(local_constant_cp(&ctx, 2).unwrap().as_rational(), Some(q(1, 3)));
        // 2 | D inert in Q(sqrt -3)
        let ctx = LiftContext::new(2, 2, 12, &q(3, 4), true).unwrap().set_eps(2, -1);
        assert_eq!(local_constant_cp(&ctx, 2).unwrap().as_rational(), Some(qi(-2)));
    }

    #[test]
    fn c_f_chi_examples() {
        let ctx = gauss(1, 12);
        assert_eq!(constant_c_f_chi(&ctx).unwrap(), Constant::Value(PowerProduct::symbol(L_AD, -1)));
        let ctx = LiftContext::new(2, 2, 12, &q(3, 4), true).unwrap().set_eps(2, 1);
        assert_eq!(constant_c_f_chi(&ctx).unwrap(), Constant::Vanishes(Vanishing::InertAtD(2)));
        // omega_2 = i^4 = 1 at kappa = 8
        let ctx = gauss(2, 8).set_eps(2, -1);
        assert_eq!(constant_c_f_chi(&ctx).unwrap(), Constant::Vanishes(Vanishing::RootNumber(2)));
        let ctx = gauss(2, 8).set_eps(2, 1);
        let c = constant_c_f_chi(&ctx).unwrap();
        // 2^{-1} 4 / 2^{3/2}
        let want = PowerProduct::rational_pow(&qi(2), Exp::new(-1, 2)).mul(&PowerProduct::symbol(L_AD, -1));
        assert_eq!(c, Constant::Value(want));
    }

    #[test]
    fn c_fprime_chi_examples() {
        // omega_2 = -1 at kappa = 12
        assert_eq!(gauss(1, 12).omega(2).unwrap(), -1);
        let ctx = gauss(1, 12).set_eps_prime(2, -1);
        let c = constant_c_fprime_chi(&ctx, &Q::one()).unwrap();
        // sqrt 4 * 13 / 4 * (r_2 / 2 = 1)
        let want = PowerProduct::rational(&q(13, 2)).mul(&PowerProduct::symbol(L_AD_PRIME, -1));
        assert_eq!(c, Constant::Value(want));
        let ctx = gauss(1, 12).set_eps_prime(2, 1);
        assert_eq!(
            constant_c_fprime_chi(&ctx, &Q::one()).unwrap(),
            Constant::Vanishes(Vanishing::LocalCharacter(2))
        );
    }

    #[test]
    fn prefactor_at_weight_twelve() {
        let ctx = gauss(1, 12);
        let pre = fourier_prefactor(&ctx).unwrap();
        // 2^{11} (1/4)^3 * 4 / 1 * 1
        let oracle = qpow(2, 11) * qpow(4, -3) * qi(4);
        assert_eq!(pre.coefficient.as_rational(), Some(oracle));
        assert_eq!(pre.to_string(), "128 * eta^7 * exp(-2*pi*eta)");
        let x = pre.eval(0.7);
        assert!((x - 128.0 * 0.7f64.powi(7) * (-2.0 * std::f64::consts::PI * 0.7).exp()).abs() < 1e-12);
    }

    #[test]
    fn fourier_value_branches() {
        let ctx = gauss(1, 12);
        let v = fourier_coefficient_value(&ctx, Complex64::zero(), &[Complex64::new(1.0, 0.0); 13], 1.0).unwrap();
        assert!(v.iter().all(|c| c.norm() == 0.0));
        let bad = gauss(2, 8).set_eps(2, 1).set_eps_prime(2, -1);
        assert!(matches!(
            fourier_coefficient_value(&bad, Complex64::new(1.0, 0.0), &[Complex64::new(1.0, 0.0)], 1.0),
            Err(Error::Precondition(_))
        ));
        let mut ramified = gauss(1, 12);
        ramified.chi.conductor_exponents.insert(2, 1);
        let v = fourier_coefficient_value(&ramified, Complex64::new(1.0, 0.0), &[Complex64::new(1.0, 0.0)], 1.0).unwrap();
        assert_eq!(v[0].norm(), 0.0);
        let mut loose = gauss(1, 12);
        loose.xi_primitive = false;
        assert!(fourier_coefficient_value(&loose, Complex64::new(1.0, 0.0), &[], 1.0).is_err());
    }

    #[test]
    fn constants_consistent_when_unramified() {
        for (d, k, e) in [(1u64, 12u32, None), (1, 16, None), (2, 8, Some(1i8)), (2, 16, Some(1))] {
            let mut ctx = gauss(d, k).set_eps_prime(2, gauss(d, k).omega(2).unwrap());
            if let Some(e) = e {
                ctx = ctx.set_eps(2, e).set_eps_prime(2, e);
            }
            let reports = verify_constant_consistency(&ctx, &q(3, 7)).unwrap();
            assert!(reports.len() > 1);
            for r in &reports {
                assert_eq!(r.status, Status::ExactPass, "{:?}", r);
                assert_eq!(r.ratio.as_deref(), Some("1"));
            }
        }
    }

    #[test]
    fn consistency_ratio_with_ramified_chi() {
        // 3 inert in Q(i): L_3(eta, 1) = 3/4
        let chi = ramified_chi(q(1, 4), 12, 3, 1);
        let ctx = LiftContext::with_character(2, 1, 12, chi, true).set_eps_prime(2, -1);
        let reports = verify_constant_consistency(&ctx, &Q::one()).unwrap();
        let total = reports.iter().find(|r| r.case_id == "total").unwrap();
        assert_eq!(total.ratio.as_deref(), Some("81/256"));
        assert!(reports.iter().all(|r| r.passed()));
    }

    /// Rows: p outside d_B with i_p = 0, with i_p > 0, p | d_B / D, p | D.
    /// Columns: split, inert, ramified.
    #[test]
    fn vanishing_table() {
        // (norm_xi, kappa) giving p = 2 split / inert / ramified; same for 5
        let fields2 = [(q(7, 4), 2u32 * 6), (q(3, 4), 12), (q(1, 4), 12)];
        let fields5 = [(q(1, 4), 12u32), (q(3, 4), 12), (q(5, 1), 12)];
        let cols = [Splitting::Split, Splitting::Inert, Splitting::Ramified];
        for (j, ((n2, k2), (n5, k5))) in fields2.iter().zip(&fields5).enumerate() {
            // p = 5 outside d_B = 2
            let ctx = LiftContext::new(2, 1, *k5, n5, true);
            if let Ok(ctx) = ctx {
                assert_eq!(ctx.field.splitting(5), cols[j]);
                assert_eq!(local_constant_cp(&ctx, 5).unwrap(), PowerProduct::one());
            }
            let chi = ramified_chi(n5.clone(), *k5, 5, 1);
            let ctx = LiftContext::with_character(2, 1, *k5, chi, true);
            let want = [q(4, 25), q(6, 25), q(1, 5)][j].clone();
            assert_eq!(local_constant_cp(&ctx, 5).unwrap().as_rational(), Some(want));
            assert!(lift_admissible(&ctx).unwrap().is_ok());

            // p = 2 | d_B
            let field = field_from_xi(n2).unwrap();
            assert_eq!(field.splitting(2), cols[j]);
            for d in [1u64, 2] {
                if cols[j] == Splitting::Split {
                    assert!(LiftContext::new(2, d, *k2, n2, true).is_err());
                    let chi = unramified_character(&field, *k2).unwrap();
                    let ctx = LiftContext::with_character(2, d, *k2, chi, true).set_eps(2, 1).set_eps_prime(2, 1);
                    assert!(local_constant_cp(&ctx, 2).is_err());
                    continue;
                }
                for e in [1i8, -1] {
                    for ep in [1i8, -1] {
                        let ctx = LiftContext::new(2, d, *k2, n2, true).unwrap().set_eps(2, e).set_eps_prime(2, ep);
                        let total = constant_c_total(&ctx, &Q::one()).unwrap();
                        let omega = (cols[j] == Splitting::Ramified).then(|| ctx.omega(2).unwrap());
                        let expected = if d == 2 && e != ep {
                            Some(Vanishing::SignMismatch(2))
                        } else if d == 2 && cols[j] == Splitting::Inert {
                            Some(Vanishing::InertAtD(2))
                        } else if d == 2 && omega == Some(-e) {
                            Some(Vanishing::RootNumber(2))
                        } else if omega.is_some() && omega != Some(ep) {
                            Some(Vanishing::LocalCharacter(2))
                        } else {
                            None
                        };
                        match expected {
                            Some(v) => assert_eq!(total, Constant::Vanishes(v), "{:?} d={} e={} e'={}", cols[j], d, e, ep),
                            None => assert!(total.value().is_some(), "{:?} d={} e={} e'={}", cols[j], d, e, ep),
                        }
                        let cp = local_constant_cp(&ctx, 2).unwrap().as_rational().unwrap();
                        let want = match (d, &cols[j]) {
                            (1, _) => Q::one(),
                            (_, Splitting::Inert) => qi(2 * e as i64),
                            _ => q(1, 3),
                        };
                        assert_eq!(cp, want);
                    }
                }
            }
        }
        // chi ramified at p | d_B kills everything
        let chi = ramified_chi(q(1, 4), 12, 2, 1);
        let ctx = LiftContext::with_character(2, 1, 12, chi, true);
        assert_eq!(lift_admissible(&ctx).unwrap(), Err(Vanishing::RamifiedAtDb(2)));
        assert_eq!(constant_c_total(&ctx, &Q::one()).unwrap(), Constant::Vanishes(Vanishing::RamifiedAtDb(2)));
        // wrong infinity type
        let chi = unramified_character(&field_from_xi(&q(1, 4)).unwrap(), 8).unwrap();
        let ctx = LiftContext::with_character(2, 1, 12, chi, true);
        assert!(matches!(lift_admissible(&ctx).unwrap(), Err(Vanishing::Weight { .. })));
    }

    #[test]
    fn quaternionic_sign_matches_partner_a2() {
        for kappa in [6u32, 8, 12] {
            for (f, ev) in quaternionic_eigenforms(kappa).unwrap() {
                let g = jl_partner(&f, &ev, 0).unwrap();
                let s = quaternionic_sign(&f).unwrap();
                assert_eq!(g.a(2) / qpow(2, kappa as i32 / 2), qi(s as i64), "kappa {}", kappa);
            }
        }
    }

    #[test]
    fn positivity_preconditions() {
        assert!(matches!(positivity_report(1, 10), Err(Error::Precondition(_))));
        assert!(matches!(positivity_report(2, 12), Err(Error::Precondition(_))));
        assert!(matches!(positivity_report(3, 12), Err(Error::Precondition(_))));
    }

    #[test]
    fn fprime_ratio_full_concentration() {
        let mut v = vec![QuadNum::nil(); 9];
        v[0] = QuadNum::gauss(qi(3), qi(1));
        assert_eq!(fprime_ratio(&v).unwrap(), Q::one());
        v[4] = QuadNum::gauss(qi(0), qi(70));
        // |c_0|^2 = 10, |c_4|^2 / 70 = 70
        assert_eq!(fprime_ratio(&v).unwrap(), q(1, 8));
    }

    /// Frozen from this pipeline: `4 D^{-3/2}` for every weight tried.
    #[test]
    fn torus_constant_is_weight_independent() {
        for (d, k) in [(1u64, 12u32), (1, 16), (2, 8), (2, 16)] {
            let ctx = instance(d, k).unwrap();
            for f in eigenforms(k, d as u32, 0).unwrap() {
                let ctx = if d == 2 { ctx.clone().set_eps(2, f.al_sign.unwrap() as i8) } else { ctx.clone() };
                let (c, p) = torus_constant_squared(&ctx, &f).unwrap();
                assert!(p.certified_nonzero());
                let want = 4.0 / (d as f64).powf(1.5);
                assert!((c / want - 1.0).abs() < 1e-9, "{:?}: {}", (d, k), c);
            }
        }
    }

    /// The quadrature over `Gamma_0(2)` gives twice `2^{-k-1} D L(Ad, 1)`, as at level 1.
    #[test]
    fn petersson_level_two_against_adjoint() {
        let f = &eigenforms(8, 2, 0).unwrap()[0];
        let pn = crate::eigenforms::petersson_norm(f, 1e-10).unwrap();
        let l = adjoint_value(f).unwrap();
        assert!(l.residual < 1e-10);
        let expected = 2f64.powi(-9) * 2.0 * l.value;
        assert!((pn.value / 2.0 / expected - 1.0).abs() < 1e-8);
    }

    #[test]
    fn central_identity_at_weight_twelve() {
        let out = positivity_report(1, 12).unwrap();
        assert!(out.reports.iter().all(|r| r.passed()), "{:?}", out.reports);
        assert_eq!(out.pair.f.a(2), &qi(-24));
        assert_eq!(out.pair.fprime_eigenvalues[&3], qi(-1836));
        let reports = central_value_identity(&out.context, &out.pair).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.passed()), "{:?}", reports);
    }

    #[test]
    fn central_identity_vanishing_branch() {
        let out = positivity_report(2, 8).unwrap();
        let flipped = out.context.clone().set_eps(2, -1).set_eps_prime(2, -1);
        let reports = central_value_identity(&flipped, &out.pair).unwrap();
        assert!(reports.iter().any(|r| r.status == Status::VanishingBranch));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn nonvanishing_constants_are_positive(field in 0usize..3, d in 1u64..3, k in 3u32..9,
                                               e in prop::bool::ANY, ep in prop::bool::ANY) {
            let (n, w) = [(q(1, 4), 4u32), (q(3, 4), 6), (q(2, 1), 2)][field].clone();
            let kappa = 2 * k * w / num_integer::gcd(2, w);
            let Ok(ctx) = LiftContext::new(2, d, kappa, &n, true) else { return Ok(()); };
            let ctx = ctx.set_eps(2, if e { 1 } else { -1 }).set_eps_prime(2, if ep { 1 } else { -1 });
            for c in [constant_c_f_chi(&ctx).unwrap(), constant_c_fprime_chi(&ctx, &q(1, 3)).unwrap(),
                      constant_c_total(&ctx, &q(1, 3)).unwrap()] {
                if let Constant::Value(v) = c {
                    prop_assert_eq!(v.sign, Some(1));
                }
            }
            for r in verify_constant_consistency(&ctx, &q(1, 3)).unwrap() {
                prop_assert!(r.passed());
                if r.status == Status::ExactPass {
                    prop_assert_eq!(r.ratio.as_deref(), Some("1"));
                }
            }
        }
    }
}
