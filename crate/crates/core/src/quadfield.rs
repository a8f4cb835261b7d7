//! The imaginary quadratic field cut out by a pure quaternion of given norm,
//! with its integral basis `{1, theta}`, local splitting data and the two
//! matrix embeddings.
//!
//! Square-root branches: `sqrt(-n) = i sqrt(n)` and `sqrt(d) = i sqrt(|d|)`,
//! which makes `r > 0` and `a < 0`.

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::exact::{q_ord, q_sqrt, qi, Q};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug)]
pub struct QuadField {
    pub norm_xi: Q,
    pub disc: i64,
    pub a: Q,
    pub b: Q,
    /// Trace and norm of theta; its minimal polynomial is `x^2 - T x + N`.
    pub theta_trace: i64,
    pub theta_norm: i64,
    pub r: Q,
    pub class_number: u64,
    pub unit_count: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeLocalData {
    pub p: u64,
    pub splitting: Splitting,
    pub e_p: i32,
    pub r_p: u32,
    pub mu_p: i32,
    pub eta_p_value: i32,
}

fn squarefree_part(mut n: u64) -> u64 {
    let mut out = 1;
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    out * n
}

pub fn fundamental_disc_of(m: u64) -> i64 {
    let m = squarefree_part(m) as i64;
    if (-m).rem_euclid(4) == 1 {
        -m
    } else {
        -4 * m
    }
}

pub fn field_from_xi(norm_xi: &Q) -> Result<QuadField, Error> {
    if !norm_xi.is_positive() {
        return Err(Error::Domain(format!(
            "norm of a pure quaternion must be positive, got {}",
            norm_xi
        )));
    }
    let u = norm_xi.numer().to_u64().ok_or_else(|| Error::Domain("norm too large".into()))?;
    let v = norm_xi.denom().to_u64().ok_or_else(|| Error::Domain("norm too large".into()))?;
    let disc = fundamental_disc_of(u * v);
    let absd = qi(-disc);
    let r = q_sqrt(&(qi(4) * norm_xi / &absd)).expect("4n/|d| is a rational square");
    let rd = &r * &absd;
    let a = if disc % 2 != 0 { -rd } else { -rd / qi(2) };
    let b = -norm_xi - &a * &a / qi(4);
    let trace = -&a / &r;
    let norm = -&b / (&r * &r);
    assert!(trace.is_integer() && norm.is_integer(), "theta is not integral");
    let theta_trace = trace.to_integer().to_i64().unwrap();
    let theta_norm = norm.to_integer().to_i64().unwrap();
    let (class_number, unit_count) = class_data(disc);
    Ok(QuadField {
        norm_xi: norm_xi.clone(),
        disc,
        a,
        b,
        theta_trace,
        theta_norm,
        r,
        class_number,
        unit_count,
    })
}

/// Class number by counting reduced primitive forms, and the number of units.
pub fn class_data(disc: i64) -> (u64, u32) {
    assert!(disc < 0);
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if c == a && b < 0 {
                continue;
            }
            if num_integer::gcd(num_integer::gcd(a, b.abs()), c) != 1 {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    let w = match disc {
        -4 => 4,
        -3 => 6,
        _ => 2,
    };
    (h, w)
}

pub fn legendre(a: i64, p: u64) -> i32 {
    let p = p as i64;
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

impl QuadField {
    pub fn theta_minpoly(&self) -> [i64; 3] {
        [self.theta_norm, -self.theta_trace, 1]
    }

    pub fn splitting(&self, p: u64) -> Splitting {
        if self.disc.rem_euclid(p as i64) == 0 {
            Splitting::Ramified
        } else if p == 2 {
            if self.disc.rem_euclid(8) == 1 {
                Splitting::Split
            } else {
                Splitting::Inert
            }
        } else if legendre(self.disc, p) == 1 {
            Splitting::Split
        } else {
            Splitting::Inert
        }
    }

    pub fn splitting_type(&self, p: u64) -> PrimeLocalData {
        let splitting = self.splitting(p);
        let e_p = match splitting {
            Splitting::Split => 1,
            Splitting::Inert => -1,
            Splitting::Ramified => 0,
        };
        PrimeLocalData {
            p,
            r_p: if splitting == Splitting::Ramified { 2 } else { 1 },
            splitting,
            e_p,
            mu_p: q_ord(&self.r, p),
            eta_p_value: e_p,
        }
    }

    /// `N_{E/Q}(x + y theta)`.
    pub fn norm_form(&self, x: &Q, y: &Q) -> Q {
        x * x + x * y * qi(self.theta_trace) + y * y * qi(self.theta_norm)
    }

    /// `iota_xi(x + y theta)`.
    pub fn embed_iota(&self, x: &Q, y: &Q) -> [[Q; 2]; 2] {
        [
            [x.clone(), -&self.r * qi(self.theta_norm) * y],
            [y / &self.r, x + qi(self.theta_trace) * y],
        ]
    }

    /// `iota'_xi(x + y theta')` with `theta' = -conj(theta)`.
    pub fn embed_iota_prime(&self, x: &Q, y: &Q) -> [[Q; 2]; 2] {
        [
            [x.clone(), qi(self.theta_norm) * y],
            [-y.clone(), x - qi(self.theta_trace) * y],
        ]
    }

    /// Coordinates of `conj(x + y theta)` in the basis `{1, theta}`.
    pub fn conj_coords(&self, x: &Q, y: &Q) -> (Q, Q) {
        (x + y * qi(self.theta_trace), -y.clone())
    }

    /// Coordinates of `x + y theta` in the basis `{1, theta'}`.
    pub fn to_theta_prime(&self, x: &Q, y: &Q) -> (Q, Q) {
        (x + y * qi(self.theta_trace), y.clone())
    }

    /// Primes p with `mu_p != 0`.
    pub fn mu_support(&self) -> Vec<u64> {
        let mut out = vec![];
        for (p, _) in crate::exact::factorize(self.r.numer().to_u64().unwrap())
            .into_iter()
            .chain(crate::exact::factorize(self.r.denom().to_u64().unwrap()))
        {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out.sort();
        out
    }

    /// The CM point `a/2 + i sqrt(n)` as (real part, imaginary part squared).
    pub fn cm_point(&self) -> (Q, Q) {
        (&self.a / qi(2), self.norm_xi.clone())
    }
}

pub fn mat_mul(a: &[[Q; 2]; 2], b: &[[Q; 2]; 2]) -> [[Q; 2]; 2] {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat_det(a: &[[Q; 2]; 2]) -> Q {
    &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use proptest::prelude::*;

    #[test]
    fn gaussian_instance() {
        let e = field_from_xi(&q(1, 4)).unwrap();
        assert_eq!(e.disc, -4);
        assert_eq!(e.r, q(1, 2));
        assert_eq!(e.a, qi(-1));
        assert_eq!(e.theta_minpoly(), [2, -2, 1]);
        assert_eq!((e.class_number, e.unit_count), (1, 4));
        let two = e.splitting_type(2);
        assert_eq!(two.splitting, Splitting::Ramified);
        assert_eq!((two.e_p, two.r_p, two.mu_p), (0, 2, -1));
        assert_eq!(e.splitting_type(5).splitting, Splitting::Split);
        assert_eq!(e.splitting_type(3).splitting, Splitting::Inert);
    }

    #[test]
    fn other_norms() {
        let e = field_from_xi(&qi(3)).unwrap();
        assert_eq!((e.disc, e.r.clone()), (-3, qi(2)));
        let e = field_from_xi(&q(7, 4)).unwrap();
        assert_eq!((e.disc, e.r.clone()), (-7, qi(1)));
        assert!(field_from_xi(&qi(0)).is_err());
        assert!(field_from_xi(&qi(-2)).is_err());
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_data(-4), (1, 4));
        assert_eq!(class_data(-3), (1, 6));
        assert_eq!(class_data(-23), (3, 2));
        assert_eq!(class_data(-7), (1, 2));
        assert_eq!(class_data(-8), (1, 2));
        assert_eq!(class_data(-20), (2, 2));
    }

    #[test]
    fn identity_embedding() {
        let e = field_from_xi(&q(1, 4)).unwrap();
        let m = e.embed_iota(&qi(1), &qi(0));
        assert_eq!(m, [[qi(1), qi(0)], [qi(0), qi(1)]]);
    }

    fn small_q() -> impl Strategy<Value = Q> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| q(n, d))
    }

    fn norm_xi() -> impl Strategy<Value = Q> {
        (1i64..60, 1i64..12).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn field_invariants(n in norm_xi()) {
            let e = field_from_xi(&n).unwrap();
            prop_assert!(e.disc < 0);
            prop_assert!(e.disc.rem_euclid(4) == 0 || e.disc.rem_euclid(4) == 1);
            prop_assert_eq!(&e.r * &e.r * qi(-e.disc), qi(4) * &n);
            prop_assert_eq!(e.theta_trace * e.theta_trace - 4 * e.theta_norm, e.disc);
            prop_assert!(e.r.is_positive());
        }

        #[test]
        fn embedding_determinant_is_norm(n in norm_xi(), x in small_q(), y in small_q()) {
            let e = field_from_xi(&n).unwrap();
            prop_assert_eq!(mat_det(&e.embed_iota(&x, &y)), e.norm_form(&x, &y));
        }

        #[test]
        fn embedding_is_multiplicative(n in norm_xi(), x1 in small_q(), y1 in small_q(),
                                       x2 in small_q(), y2 in small_q()) {
            let e = field_from_xi(&n).unwrap();
            // (x1 + y1 t)(x2 + y2 t) with t^2 = T t - N
            let x = &x1 * &x2 - &y1 * &y2 * qi(e.theta_norm);
            let y = &x1 * &y2 + &x2 * &y1 + &y1 * &y2 * qi(e.theta_trace);
            let lhs = mat_mul(&e.embed_iota(&x1, &y1), &e.embed_iota(&x2, &y2));
            prop_assert_eq!(lhs, e.embed_iota(&x, &y));
        }

        #[test]
        fn conjugate_embeddings(n in norm_xi(), x in small_q(), y in small_q()) {
            let e = field_from_xi(&n).unwrap();
            let (cx, cy) = e.conj_coords(&x, &y);
            let lhs = e.embed_iota(&cx, &cy);
            let (px, py) = e.to_theta_prime(&x, &y);
            let dr = [[e.r.clone(), qi(0)], [qi(0), qi(1)]];
            let dri = [[e.r.recip(), qi(0)], [qi(0), qi(1)]];
            let rhs = mat_mul(&mat_mul(&dr, &e.embed_iota_prime(&px, &py)), &dri);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn split_iff_minpoly_factors(n in norm_xi(), pi in 0usize..8) {
            let p = [3u64, 5, 7, 11, 13, 17, 19, 23][pi];
            let e = field_from_xi(&n).unwrap();
            let [c0, c1, _] = e.theta_minpoly();
            let roots = (0..p as i64)
                .filter(|x| (x * x + c1 * x + c0).rem_euclid(p as i64) == 0)
                .count();
            let expect = match e.splitting(p) {
                Splitting::Split => 2,
                Splitting::Inert => 0,
                Splitting::Ramified => 1,
            };
            prop_assert_eq!(roots, expect);
        }

        #[test]
        fn mu_vanishes_off_support(n in norm_xi(), p in 2u64..60) {
            prop_assume!(crate::exact::is_prime(p));
            let e = field_from_xi(&n).unwrap();
            if !e.mu_support().contains(&p) {
                prop_assert_eq!(e.splitting_type(p).mu_p, 0);
            }
        }
    }
}
