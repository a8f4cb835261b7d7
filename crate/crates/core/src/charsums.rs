//! Finite models of `O_{E_p}/p^N`, the quotient `E_p^x / Q_p^x O_{E_p,i}^x`
//! (units only, plus the uniformizer coset when `p` ramifies), brute-force
//! character sums over the standard coset representatives, and the volumes
//! of the orders `Z_p + p^i O_{E_p}`.
//!
//! At a split prime the sums are taken in the basis `{1, e}` with `e` the
//! idempotent `(1, 0)` of `Q_p x Q_p`; everywhere else `{1, theta}`.

use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde_json::json;

use crate::exact::cyclo::CycloZ;
use crate::exact::{q, qi, Q};
use crate::quadfield::{QuadField, Splitting};
use crate::report::{Report, Status};
use crate::Error;

/// Largest residue ring `(O/p^N)` we are willing to enumerate.
pub const RING_GUARD: u64 = 10_000_000;

fn modinv(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

fn guard(p: u64, depth: u32) -> Result<(), Error> {
    let size = (p as u128).checked_pow(2 * depth);
    match size {
        Some(s) if s <= RING_GUARD as u128 => Ok(()),
        _ => Err(Error::Guard(format!(
            "(O/{}^{})^x has more than {} elements",
            p, depth, RING_GUARD
        ))),
    }
}

/// `(Z/p^N)[theta]` with `theta^2 = trace * theta - norm`.
#[derive(Clone, Debug)]
pub struct FiniteRingModel {
    pub p: u64,
    pub depth: u32,
    pub modulus: i64,
    pub trace: i64,
    pub norm: i64,
    pub splitting: Splitting,
}

impl FiniteRingModel {
    /// The model in the integral basis `{1, theta}` of the field.
    pub fn field_basis(field: &QuadField, p: u64, depth: u32) -> Result<Self, Error> {
        guard(p, depth)?;
        let m = (p as i64).pow(depth);
        Ok(FiniteRingModel {
            p,
            depth,
            modulus: m,
            trace: field.theta_trace.rem_euclid(m),
            norm: field.theta_norm.rem_euclid(m),
            splitting: field.splitting(p),
        })
    }

    /// The basis the character-sum lemmas are written in: the idempotent at a
    /// split prime, `theta` otherwise.
    pub fn lemma_basis(field: &QuadField, p: u64, depth: u32) -> Result<Self, Error> {
        let mut m = Self::field_basis(field, p, depth)?;
        if m.splitting == Splitting::Split {
            m.trace = 1 % m.modulus;
            m.norm = 0;
        }
        Ok(m)
    }

    pub fn reduce(&self, x: (i64, i64)) -> (i64, i64) {
        (x.0.rem_euclid(self.modulus), x.1.rem_euclid(self.modulus))
    }

    pub fn mul(&self, a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        let m = self.modulus as i128;
        let (a0, a1, b0, b1) = (a.0 as i128, a.1 as i128, b.0 as i128, b.1 as i128);
        let t = self.trace as i128;
        let n = self.norm as i128;
        let c0 = (a0 * b0 - n * a1 % m * b1).rem_euclid(m);
        let c1 = (a0 * b1 + a1 * b0 + t * a1 % m * b1).rem_euclid(m);
        (c0 as i64, c1 as i64)
    }

    pub fn norm_of(&self, x: (i64, i64)) -> i64 {
        let m = self.modulus as i128;
        let (x0, x1) = (x.0 as i128, x.1 as i128);
        (x0 * x0 + self.trace as i128 * x0 % m * x1 + self.norm as i128 * x1 % m * x1)
            .rem_euclid(m) as i64
    }

    pub fn is_unit(&self, x: (i64, i64)) -> bool {
        self.modulus == 1 || self.norm_of(x) % self.p as i64 != 0
    }

    pub fn units(&self) -> Vec<(i64, i64)> {
        let m = self.modulus;
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .filter(|&x| self.is_unit(x))
            .collect()
    }

    /// Image of `(Z/p^N)^x`.
    pub fn z_image(&self) -> Vec<(i64, i64)> {
        (0..self.modulus)
            .filter(|&a| self.modulus == 1 || a % self.p as i64 != 0)
            .map(|a| (a, 0))
            .collect()
    }

    /// Unit count predicted by the splitting type.
    pub fn expected_unit_count(&self) -> u64 {
        let p = self.p;
        let n = self.depth;
        if n == 0 {
            return 1;
        }
        match self.splitting {
            Splitting::Split => p.pow(2 * (n - 1)) * (p - 1) * (p - 1),
            Splitting::Inert => p.pow(2 * (n - 1)) * (p * p - 1),
            Splitting::Ramified => p.pow(2 * n - 1) * (p - 1),
        }
    }
}

/// Element of the quotient: `theta^w (x0 + x1 theta)` in canonical form,
/// `(1, c)` or `(c, 1)` with `p | c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QElem {
    pub w: u8,
    pub x0: i64,
    pub x1: i64,
}

/// `E_p^x / Q_p^x O_{E_p,i}^x`, restricted to units except at a ramified
/// prime, where the uniformizer coset is kept.
#[derive(Debug)]
pub struct UnitQuotient {
    pub model: FiniteRingModel,
    pub uniformizer: bool,
    pub elems: Vec<QElem>,
    index: HashMap<QElem, usize>,
    table: Vec<u32>,
    pub identity: usize,
    pub exponent: u64,
    /// `theta^2 / p`, a unit when `p` ramifies.
    theta_sq_over_p: (i64, i64),
    /// Generators met while building the character table, with relative orders.
    pub generators: Vec<(usize, u64)>,
}

impl UnitQuotient {
    pub fn new(field: &QuadField, p: u64, depth: u32) -> Result<Self, Error> {
        let model = FiniteRingModel::lemma_basis(field, p, depth)?;
        let m = model.modulus;
        let uniformizer = model.splitting == Splitting::Ramified;
        let theta_sq_over_p = if uniformizer {
            let pi = p as i64;
            assert!(field.theta_trace % pi == 0 && field.theta_norm % pi == 0);
            model.reduce((-field.theta_norm / pi, field.theta_trace / pi))
        } else {
            (0, 0)
        };
        let mut elems = vec![];
        let ws: &[u8] = if uniformizer { &[0, 1] } else { &[0] };
        for &w in ws {
            for c in 0..m {
                if model.is_unit((1, c)) {
                    elems.push(QElem { w, x0: 1 % m, x1: c });
                }
                if m > 1 && c % p as i64 == 0 && model.is_unit((c, 1)) {
                    elems.push(QElem { w, x0: c, x1: 1 });
                }
            }
        }
        elems.sort();
        elems.dedup();
        let index: HashMap<QElem, usize> = elems.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        let mut g = UnitQuotient {
            model,
            uniformizer,
            identity: 0,
            elems,
            index,
            table: vec![],
            exponent: 1,
            theta_sq_over_p,
            generators: vec![],
        };
        g.identity = g.index[&g.canonical(0, (1, 0))];
        let n = g.elems.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = g.slow_mul(a, b) as u32;
            }
        }
        g.table = table;
        g.exponent = (0..n).map(|a| g.order(a)).fold(1, |acc, o| acc.lcm(&o));
        Ok(g)
    }

    fn canonical(&self, w: u8, x: (i64, i64)) -> QElem {
        let md = &self.model;
        let m = md.modulus;
        let (x0, x1) = md.reduce(x);
        if m == 1 {
            return QElem { w, x0: 0, x1: 0 };
        }
        if let Some(inv) = modinv(x0, m) {
            let c = (x1 as i128 * inv as i128).rem_euclid(m as i128) as i64;
            QElem { w, x0: 1, x1: c }
        } else {
            let inv = modinv(x1, m).expect("non-unit in the quotient");
            let c = (x0 as i128 * inv as i128).rem_euclid(m as i128) as i64;
            QElem { w, x0: c, x1: 1 }
        }
    }

    fn slow_mul(&self, a: usize, b: usize) -> usize {
        let (ea, eb) = (self.elems[a], self.elems[b]);
        let mut x = self.model.mul((ea.x0, ea.x1), (eb.x0, eb.x1));
        let mut w = ea.w + eb.w;
        if w == 2 {
            x = self.model.mul(x, self.theta_sq_over_p);
            w = 0;
        }
        self.index[&self.canonical(w, x)]
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.elems.len() + b] as usize
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Index of the class of the unit `x0 + x1 theta` (times `theta` if `w = 1`).
    pub fn class_of(&self, w: u8, x: (i64, i64)) -> Option<usize> {
        if !self.model.is_unit(x) {
            return None;
        }
        Some(self.index[&self.canonical(w, x)])
    }

    /// `1 + b theta`, if a unit.
    pub fn one_plus_b_theta(&self, b: i64) -> Option<usize> {
        self.class_of(0, (1, b))
    }

    /// `a + theta` for `p | a` (inert prime).
    pub fn a_plus_theta(&self, a: i64) -> Option<usize> {
        self.class_of(0, (a, 1))
    }

    /// `a p + theta = theta (1 + a p / theta)` at a ramified prime.
    pub fn ap_plus_theta(&self, a: i64) -> usize {
        assert!(self.uniformizer);
        let p = self.model.p as i64;
        let m = self.model.modulus;
        // p / theta = (T - theta) / (N / p)
        let np = self.theta_sq_over_p.0.rem_euclid(m); // -N/p
        let inv = modinv(-np, m).expect("N/p is a unit");
        let t = self.model.trace;
        let x0 = 1 + (a as i128 * t as i128 % m as i128 * inv as i128 % m as i128) as i64;
        let x1 = -(a as i128 * inv as i128 % m as i128) as i64;
        let _ = p;
        self.index[&self.canonical(1, (x0, x1))]
    }

    /// Class of `theta` itself (inert: a unit; ramified: the uniformizer).
    pub fn theta(&self) -> usize {
        if self.uniformizer {
            self.index[&self.canonical(1, (1, 0))]
        } else {
            self.index[&self.canonical(0, (0, 1))]
        }
    }

    /// Elements of `Z_p^x \ O_{E_p,j}^x` inside the quotient.
    pub fn order_units(&self, j: u32) -> Vec<usize> {
        let pj = (self.model.p as i64).pow(j);
        (0..self.len())
            .filter(|&k| {
                let e = self.elems[k];
                e.w == 0 && (j == 0 || (e.x0 == 1 % self.model.modulus && e.x1 % pj == 0))
            })
            .collect()
    }

    /// All characters, as exponent tables `k -> chi(elems[k]) = zeta_e^{v_k}`.
    pub fn characters(&mut self) -> Vec<Vec<u32>> {
        let n = self.len();
        let e = self.exponent;
        let mut in_sub = vec![false; n];
        in_sub[self.identity] = true;
        let mut sub = vec![self.identity];
        let mut chars: Vec<Vec<u32>> = vec![vec![0u32; n]];
        let mut gens = vec![];
        for g in 0..n {
            if in_sub[g] {
                continue;
            }
            let mut m = 1u64;
            let mut gm = g;
            while !in_sub[gm] {
                gm = self.mul(gm, g);
                m += 1;
            }
            gens.push((g, m));
            let mut new_elems = vec![];
            let mut gj = self.identity;
            for j in 1..m {
                gj = self.mul(gj, g);
                for &h in &sub {
                    let x = self.mul(h, gj);
                    new_elems.push((x, h, j));
                }
            }
            let mut out = Vec::with_capacity(chars.len() * m as usize);
            for psi in &chars {
                let u = psi[gm] as u64;
                assert!(u % m == 0, "character extension not divisible");
                for l in 0..m {
                    let w = (u / m + l * (e / m)) % e;
                    let mut chi = psi.clone();
                    for &(x, h, j) in &new_elems {
                        chi[x] = ((psi[h] as u64 + j * w) % e) as u32;
                    }
                    out.push(chi);
                }
            }
            chars = out;
            for &(x, _, _) in &new_elems {
                in_sub[x] = true;
                sub.push(x);
            }
        }
        self.generators = gens;
        chars
    }

    /// Least `j` with the character trivial on `O_{E_p,j}^x`.
    pub fn conductor(&self, chi: &[u32]) -> u32 {
        (0..=self.model.depth)
            .find(|&j| self.order_units(j).iter().all(|&k| chi[k] == 0))
            .unwrap_or(self.model.depth)
    }
}

/// Summation ranges appearing in the split/inert/ramified lemmas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumRange {
    /// `b in p^k Z_p / p^i Z_p` with `1 + b theta` a unit.
    Congruent(u32),
    /// `b mod p^i` with `ord_p(b) = k`; `b = 0` counts as `k = i`.
    Order(u32),
    /// `a + theta` for `a in p Z_p / p^i Z_p`.
    InertShift,
    /// `a p + theta` for `a mod p^i`.
    RamifiedShift,
    /// The whole quotient.
    Full,
}

/// Elements a range runs over, as quotient indices.
pub fn range_elements(g: &UnitQuotient, range: SumRange) -> Result<Vec<usize>, Error> {
    let md = &g.model;
    let m = md.modulus;
    let p = md.p as i64;
    let ord = |b: i64| -> u32 {
        if b == 0 {
            return md.depth;
        }
        let mut b = b;
        let mut k = 0;
        while b % p == 0 {
            b /= p;
            k += 1;
        }
        k
    };
    Ok(match range {
        SumRange::Congruent(k) => {
            if k > md.depth {
                return Err(Error::Precondition(format!(
                    "congruence level {} exceeds the conductor exponent {}",
                    k, md.depth
                )));
            }
            let step = p.pow(k);
            (0..m / step)
                .filter_map(|t| g.one_plus_b_theta(t * step))
                .collect()
        }
        SumRange::Order(k) => (0..m)
            .filter(|&b| ord(b) == k)
            .filter_map(|b| g.one_plus_b_theta(b))
            .collect(),
        SumRange::InertShift => {
            if md.splitting != Splitting::Inert {
                return Err(Error::CaseMismatch("a + theta range needs an inert prime".into()));
            }
            (0..m / p)
                .map(|t| g.a_plus_theta(t * p).expect("a + theta is a unit"))
                .collect()
        }
        SumRange::RamifiedShift => {
            if !g.uniformizer {
                return Err(Error::CaseMismatch("ap + theta range needs a ramified prime".into()));
            }
            (0..m).map(|a| g.ap_plus_theta(a)).collect()
        }
        SumRange::Full => (0..g.len()).collect(),
    })
}

/// `sum chi(x)^{-1}` over the range, as an exact cyclotomic integer.
pub fn character_sum(g: &UnitQuotient, chi: &[u32], range: SumRange) -> Result<CycloZ, Error> {
    let e = g.exponent;
    let mut counts = vec![0i64; e as usize];
    for k in range_elements(g, range)? {
        let v = chi[k] as u64;
        counts[((e - v % e) % e) as usize] += 1;
    }
    Ok(CycloZ::from_counts(e, &counts))
}

/// The closed-form value the lemmas assign to a range, for a character of
/// exact conductor `i`; `None` where no value is stated.
pub fn lemma_value(g: &UnitQuotient, chi: &[u32], i: u32, range: SumRange) -> Option<CycloZ> {
    let e = g.exponent;
    let graded = |k: u32| -> Option<CycloZ> {
        let v = if k + 1 < i {
            0
        } else if k + 1 == i {
            -1
        } else if k == i {
            1
        } else {
            return None;
        };
        Some(CycloZ::integer(e, v))
    };
    let theta_inv = |sign: i64| CycloZ::scaled_root(e, -(chi[g.theta()] as i64), sign);
    match (&g.model.splitting, range) {
        (Splitting::Split, SumRange::Congruent(k)) => {
            Some(CycloZ::integer(e, if k < i { 0 } else if k == i { 1 } else { return None }))
        }
        (Splitting::Split, SumRange::Order(k)) => graded(k),
        (Splitting::Inert, SumRange::Congruent(0)) => Some(if i == 1 {
            theta_inv(-1)
        } else {
            CycloZ::integer(e, 0)
        }),
        (Splitting::Inert, SumRange::InertShift) => Some(if i == 1 {
            theta_inv(1)
        } else {
            CycloZ::integer(e, 0)
        }),
        (Splitting::Ramified, SumRange::Congruent(0)) | (Splitting::Ramified, SumRange::RamifiedShift) => {
            Some(CycloZ::integer(e, 0))
        }
        (Splitting::Inert, SumRange::Order(k)) | (Splitting::Ramified, SumRange::Order(k)) if i > 1 => {
            graded(k)
        }
        (_, SumRange::Full) => Some(CycloZ::integer(e, if chi.iter().all(|&v| v == 0) { g.len() as i64 } else { 0 })),
        _ => None,
    }
}

/// Coset representatives of `Q_p^x \ E_p^x / O_{E_p,i}^x` (the uniformizer
/// powers at a split prime are left out), as literal elements `x0 + x1 theta`
/// in the lemma basis.
pub fn coset_reps(field: &QuadField, p: u64, i: u32) -> Result<Vec<(i64, i64)>, Error> {
    guard(p, i)?;
    if i == 0 {
        return Ok(vec![(1, 0)]);
    }
    let md = FiniteRingModel::lemma_basis(field, p, i)?;
    let m = md.modulus;
    let pi = p as i64;
    let mut out: Vec<(i64, i64)> = (0..m).filter(|&b| md.is_unit((1, b))).map(|b| (1, b)).collect();
    match md.splitting {
        Splitting::Split => {}
        Splitting::Inert => out.extend((0..m / pi).map(|a| (a * pi, 1))),
        Splitting::Ramified => out.extend((0..m).map(|a| (a * pi, 1))),
    }
    Ok(out)
}

/// `vol(Z_p^x \ O_{E_p,i}^x) = [O_{E_p}^x : O_{E_p,i}^x]^{-1}`, counted in
/// `(O/p^N)^x` for a depth `N >= i`.
pub fn volume_index(field: &QuadField, p: u64, i: u32, depth: u32) -> Result<Q, Error> {
    if depth < i {
        return Err(Error::Precondition(format!("depth {} below level {}", depth, i)));
    }
    let md = FiniteRingModel::field_basis(field, p, depth)?;
    let units = md.units();
    let pi = (p as i64).pow(i);
    let sub = units.iter().filter(|x| x.1 % pi == 0).count();
    Ok(q(sub as i64, units.len() as i64))
}

/// `p^{-i} L_p(eta_p, 1)` for `i > 0`, and 1 at `i = 0`.
pub fn expected_volume(splitting: &Splitting, p: u64, i: u32) -> Q {
    if i == 0 {
        return qi(1);
    }
    let e = match splitting {
        Splitting::Split => 1,
        Splitting::Inert => -1,
        Splitting::Ramified => 0,
    };
    let l = (qi(1) - q(e, p as i64)).recip();
    l / qi((p as i64).pow(i))
}

fn ranges_for(s: &Splitting, i: u32) -> Vec<SumRange> {
    let mut out = vec![SumRange::Full];
    match s {
        Splitting::Split => {
            out.extend((0..=i).map(SumRange::Congruent));
            out.extend((0..=i).map(SumRange::Order));
        }
        Splitting::Inert => {
            out.push(SumRange::Congruent(0));
            out.push(SumRange::InertShift);
            if i > 1 {
                out.extend((0..=i).map(SumRange::Order));
            }
        }
        Splitting::Ramified => {
            out.push(SumRange::Congruent(0));
            out.push(SumRange::RamifiedShift);
            if i > 1 {
                out.extend((0..=i).map(SumRange::Order));
            }
        }
    }
    out
}

/// Every stated character-sum value, for every character of exact conductor
/// `p^i` with `1 <= i <= imax`; one report per (level, range).
pub fn verify_sum_lemmas(field: &QuadField, p: u64, imax: u32) -> Result<Vec<Report>, Error> {
    let mut reports = vec![];
    for i in 1..=imax {
        let mut g = UnitQuotient::new(field, p, i)?;
        let chars = g.characters();
        let exact: Vec<&Vec<u32>> = chars.iter().filter(|c| g.conductor(c) == i).collect();
        let split = g.model.splitting.clone();
        for range in ranges_for(&split, i) {
            let results: Vec<bool> = exact
                .par_iter()
                .map(|chi| {
                    let lhs = character_sum(&g, chi, range).expect("range valid");
                    let rhs = lemma_value(&g, chi, i, range).expect("value stated");
                    lhs == rhs
                })
                .collect();
            let good = results.iter().filter(|&&b| b).count();
            reports.push(Report::exact(
                "lemmas-3x",
                format!("sum/{}/p{}/i{}/{:?}", field.disc, p, i, range),
                json!({"disc": field.disc, "p": p, "i": i, "splitting": split, "range": format!("{:?}", range)}),
                format!("{} characters match", good),
                format!("{} characters of exact conductor", exact.len()),
                good == exact.len(),
            ));
        }
    }
    Ok(reports)
}

/// Index computations at depths `N = i` and `N = i + 1`.
pub fn verify_volume_lemmas(field: &QuadField, p: u64, imax: u32) -> Result<Vec<Report>, Error> {
    let split = field.splitting(p);
    let mut reports = vec![];
    for i in 0..=imax {
        let rhs = expected_volume(&split, p, i);
        for depth in [i.max(1), i + 1] {
            let lhs = volume_index(field, p, i, depth)?;
            reports.push(Report::exact(
                "lemmas-3x",
                format!("vol/{}/p{}/i{}/N{}", field.disc, p, i, depth),
                json!({"disc": field.disc, "p": p, "i": i, "depth": depth, "splitting": split}),
                &lhs,
                &rhs,
                lhs == rhs,
            ));
        }
    }
    Ok(reports)
}

/// Coset counts against the group order.
pub fn verify_coset_counts(field: &QuadField, p: u64, imax: u32) -> Result<Vec<Report>, Error> {
    let mut out = vec![];
    for i in 1..=imax {
        let reps = coset_reps(field, p, i)?;
        let g = UnitQuotient::new(field, p, i)?;
        let distinct: std::collections::HashSet<usize> = reps
            .iter()
            .map(|&x| {
                if g.uniformizer && x.1 == 1 && x.0 % p as i64 == 0 {
                    let a = x.0 / p as i64;
                    g.ap_plus_theta(a)
                } else {
                    g.class_of(0, x).expect("unit representative")
                }
            })
            .collect();
        let ok = distinct.len() == reps.len() && reps.len() == g.len();
        out.push(Report::exact(
            "lemmas-3x",
            format!("cosets/{}/p{}/i{}", field.disc, p, i),
            json!({"disc": field.disc, "p": p, "i": i}),
            reps.len(),
            g.len(),
            ok,
        ).with_status(if ok { Status::ExactPass } else { Status::Fail }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::field_from_xi;
    use proptest::prelude::*;

    fn gauss() -> QuadField {
        field_from_xi(&q(1, 4)).unwrap()
    }

    fn field_for(disc: i64) -> QuadField {
        let n = match disc {
            -4 => q(1, 4),
            -3 => qi(3),
            -7 => q(7, 4),
            -8 => qi(2),
            _ => unreachable!(),
        };
        field_from_xi(&n).unwrap()
    }

    #[test]
    fn unit_counts_by_enumeration() {
        for disc in [-4, -3, -7, -8] {
            let f = field_for(disc);
            for p in [2u64, 3, 5, 7] {
                for n in 1..=2 {
                    for md in [
                        FiniteRingModel::field_basis(&f, p, n).unwrap(),
                        FiniteRingModel::lemma_basis(&f, p, n).unwrap(),
                    ] {
                        assert_eq!(md.units().len() as u64, md.expected_unit_count(), "disc {} p {} N {}", disc, p, n);
                    }
                }
            }
        }
    }

    #[test]
    fn quotient_orders() {
        let f = gauss();
        assert_eq!(UnitQuotient::new(&f, 5, 1).unwrap().len(), 4);
        assert_eq!(UnitQuotient::new(&f, 3, 1).unwrap().len(), 4);
        assert_eq!(UnitQuotient::new(&f, 2, 2).unwrap().len(), 8);
        assert_eq!(coset_reps(&f, 3, 1).unwrap().len(), 4);
        assert_eq!(coset_reps(&f, 5, 1).unwrap().len(), 4);
        assert_eq!(coset_reps(&f, 5, 0).unwrap(), vec![(1, 0)]);
    }

    #[test]
    fn characters_are_homomorphisms() {
        let f = field_for(-7);
        let mut g = UnitQuotient::new(&f, 7, 2).unwrap();
        let chars = g.characters();
        assert_eq!(chars.len(), g.len());
        let e = g.exponent as u32;
        for chi in chars.iter().step_by(7) {
            for a in 0..g.len() {
                for b in (0..g.len()).step_by(5) {
                    assert_eq!(chi[g.mul(a, b)], (chi[a] + chi[b]) % e);
                }
            }
        }
        let mut sorted = chars.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), chars.len());
    }

    #[test]
    fn volumes_of_examples() {
        let f = gauss();
        assert_eq!(volume_index(&f, 5, 1, 2).unwrap(), q(1, 4));
        assert_eq!(volume_index(&f, 3, 1, 2).unwrap(), q(1, 4));
        assert_eq!(volume_index(&f, 3, 0, 1).unwrap(), qi(1));
        assert_eq!(expected_volume(&Splitting::Split, 5, 1), q(1, 4));
        assert_eq!(expected_volume(&Splitting::Inert, 3, 1), q(1, 4));
    }

    #[test]
    fn lemma_congruence_beyond_conductor_rejected() {
        let g = UnitQuotient::new(&gauss(), 5, 1).unwrap();
        assert!(range_elements(&g, SumRange::Congruent(2)).is_err());
    }

    #[test]
    fn inert_level_one_theta_value() {
        let f = gauss();
        let mut g = UnitQuotient::new(&f, 3, 1).unwrap();
        let chars = g.characters();
        for chi in chars.iter().filter(|c| g.conductor(c) == 1) {
            let s = character_sum(&g, chi, SumRange::Congruent(0)).unwrap();
            let t = CycloZ::scaled_root(g.exponent, -(chi[g.theta()] as i64), -1);
            assert_eq!(s, t);
        }
    }

    #[test]
    fn all_lemmas_small() {
        for disc in [-4, -3, -7, -8] {
            let f = field_for(disc);
            for p in [2u64, 3, 5] {
                for r in verify_sum_lemmas(&f, p, 2).unwrap() {
                    assert!(r.passed(), "{:?}", r);
                }
                for r in verify_volume_lemmas(&f, p, 2).unwrap() {
                    assert!(r.passed(), "{:?}", r);
                }
                for r in verify_coset_counts(&f, p, 2).unwrap() {
                    assert!(r.passed(), "{:?}", r);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn orthogonality_and_stability(di in 0usize..4, pi in 0usize..4, i in 1u32..3) {
            let f = field_for([-4, -3, -7, -8][di]);
            let p = [2u64, 3, 5, 7][pi];
            let mut g = UnitQuotient::new(&f, p, i).unwrap();
            let chars = g.characters();
            for chi in &chars {
                let s = character_sum(&g, chi, SumRange::Full).unwrap();
                let trivial = chi.iter().all(|&v| v == 0);
                prop_assert_eq!(s.as_integer(), Some(if trivial { g.len() as i64 } else { 0 }));
            }
            let a = volume_index(&f, p, i, i).unwrap();
            let b = volume_index(&f, p, i, i + 1).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn z_image_is_trivial_in_quotient(pi in 0usize..4, i in 1u32..3) {
            let f = gauss();
            let p = [2u64, 3, 5, 7][pi];
            let g = UnitQuotient::new(&f, p, i).unwrap();
            let md = FiniteRingModel::lemma_basis(&f, p, i).unwrap();
            for z in md.z_image() {
                prop_assert_eq!(g.class_of(0, z), Some(g.identity));
            }
        }
    }
}
