//! Parsing closed-form inputs like `-24/2^(11/2)` and rewriting symmetric
//! Laurent coefficients as polynomials in the normalized eigenvalue.

use lift_core::exact::laurent::{Laurent, Var};
use lift_core::exact::poly::Poly;
use lift_core::exact::powprod::{Exp, PowerProduct};
use lift_core::exact::{qi, Scalar};

fn parse_exp(s: &str) -> Result<Exp, String> {
    let s = s.trim();
    let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    let bad = || format!("bad exponent {}", s);
    let (n, d) = match inner.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (inner.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Exp::new(n, d))
}

fn parse_factor(s: &str) -> Result<PowerProduct, String> {
    let s = s.trim();
    if let Some(arg) = s.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
        let n: i64 = arg.trim().parse().map_err(|_| format!("bad factor {}", s))?;
        return Ok(PowerProduct::rational_pow(&qi(n), Exp::new(1, 2)));
    }
    let (base, exp) = match s.split_once('^') {
        Some((b, e)) => (b, parse_exp(e)?),
        None => (s, Exp::from_integer(1)),
    };
    let n: i64 = base.trim().parse().map_err(|_| format!("bad factor {}", s))?;
    if n == 0 {
        return Ok(PowerProduct::zero());
    }
    if n < 0 && *exp.denom() != 1 {
        return Err(format!("negative base under a root: {}", s));
    }
    Ok(PowerProduct::rational_pow(&qi(n), exp))
}

/// `[+-] f (* f | / f)*` with `f` one of `n`, `n^k`, `n^(a/b)`, `sqrt(n)`.
pub fn parse_power_product(s: &str) -> Result<PowerProduct, String> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err("empty expression".into());
    }
    let mut acc = PowerProduct::int(if neg { -1 } else { 1 });
    let mut depth = 0i32;
    let mut start = 0;
    let mut op = '*';
    let bytes: Vec<char> = body.chars().collect();
    for i in 0..=bytes.len() {
        let c = bytes.get(i).copied();
        match c {
            Some('(') => depth += 1,
            Some(')') => depth -= 1,
            _ => {}
        }
        let split = match c {
            None => true,
            Some(ch @ ('*' | '/')) if depth == 0 => {
                // `^(a/b)` never reaches here: the slash sits inside parentheses.
                let _ = ch;
                true
            }
            _ => false,
        };
        if split {
            let piece: String = bytes[start..i].iter().collect();
            let f = parse_factor(&piece)?;
            acc = if op == '*' {
                acc.mul(&f)
            } else {
                if f.is_zero() {
                    return Err("division by zero".into());
                }
                acc.div(&f)
            };
            if let Some(ch) = c {
                op = ch;
            }
            start = i + 1;
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in {}", s));
    }
    Ok(acc)
}

/// A product `r * p^{e/2}` as an element of the Laurent ring with `S = sqrt(p)`.
pub fn to_laurent(x: &PowerProduct, p: u64) -> Result<Laurent, String> {
    if !x.symbols.is_empty() {
        return Err(format!("{} has transcendental factors", x));
    }
    let Some(sign) = x.sign else {
        return Ok(Laurent::nil());
    };
    let mut acc = Laurent::from_i64(sign as i64);
    for (&l, e) in &x.primes {
        let twice = e * Exp::from_integer(2);
        if !twice.is_integer() || (*e.denom() != 1 && l != p) {
            return Err(format!("{}^{} is not a rational multiple of a power of sqrt({})", l, e, p));
        }
        if l == p {
            acc = acc.times(&Laurent::sqrt_p(p, twice.to_integer() as i32));
        } else {
            let v = lift_core::exact::qpow(l as i64, e.to_integer() as i32);
            acc = acc.times(&Laurent::constant(v));
        }
    }
    Ok(acc)
}

fn power(x: &Laurent, k: i32) -> Laurent {
    (0..k).fold(Laurent::unit(), |acc, _| acc.times(x))
}

/// Substitutes `A + A^{-1} = lambda` into a coefficient symmetric under
/// `A -> A^{-1}`.
pub fn substitute_trace(coef: &Laurent, lambda: &Laurent) -> Result<Laurent, String> {
    let a = Var::A as usize;
    let mut rest = coef.clone();
    let mut out = Laurent::nil();
    let sym = Laurent::var_sym(Var::A);
    loop {
        let Some(k) = rest.terms().map(|(e, _)| e[a]).max() else {
            return Ok(out);
        };
        if k <= 0 {
            if rest.terms().any(|(e, _)| e[a] != 0) {
                return Err("coefficient is not symmetric in A".into());
            }
            return Ok(out.plus(&rest));
        }
        let mut top = Laurent::nil();
        for (e, c) in rest.terms().filter(|(e, _)| e[a] == k) {
            let mut e2 = *e;
            e2[a] = 0;
            top = top.plus(&Laurent::monomial(c.clone(), e2, rest.sq()));
        }
        out = out.plus(&top.times(&power(lambda, k)));
        rest = rest.minus(&top.times(&power(&sym, k)));
    }
}

pub fn laurent_string(x: &Laurent) -> String {
    let s = x.to_string();
    if x.sq() > 0 {
        s.replace("*S", &format!("*sqrt({})", x.sq()))
    } else {
        s
    }
}

/// `1 + c_1 t + ...` with zero terms dropped.
pub fn poly_string(p: &Poly<Laurent>) -> String {
    let mut parts = vec![];
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.eq_exact(&Laurent::nil()) {
            continue;
        }
        let c = laurent_string(c);
        parts.push(match k {
            0 => c,
            1 => format!("({})*t", c),
            _ => format!("({})*t^{}", c, k),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lift_core::exact::q;

    #[test]
    fn parses_normalized_eigenvalue() {
        let x = parse_power_product("-24/2^(11/2)").unwrap();
        let l = to_laurent(&x, 2).unwrap();
        // -24 / (32 sqrt 2) = -(3/8) sqrt 2
        let want = Laurent::sqrt_p(2, 1).scale(&q(-3, 8));
        assert!(l.eq_exact(&want), "{}", l);
        assert!(parse_power_product("3^(1/2").is_err());
        assert!(parse_power_product("1/0").is_err());
        assert!(to_laurent(&parse_power_product("sqrt(3)").unwrap(), 2).is_err());
    }

    #[test]
    fn trace_substitution_on_adjoint_cubic() {
        // (1-t)(1-A^2 t)(1-A^{-2} t) has t-coefficient -(lambda^2 - 1).
        let a2 = Laurent::var_pow(Var::A, 2);
        let am2 = Laurent::var_pow(Var::A, -2);
        let c1 = Laurent::unit().plus(&a2).plus(&am2).negate();
        let lam = Laurent::constant(q(1, 2));
        let v = substitute_trace(&c1, &lam).unwrap();
        assert_eq!(v.as_rational(), Some(q(3, 4)));
        assert!(substitute_trace(&Laurent::var(Var::A), &lam).is_err());
    }
}
