//! Canonical, whitespace-free text form for rings and scalars.
//!
//! Polynomials print as sign-joined `coeff*t^k` terms in descending exponent
//! order (graded-lex for multivariate payloads), quadratic-extension elements
//! as `(a)+(b)s`. Writing then parsing reproduces the scalar exactly, which
//! the algebra file format relies on.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;

use super::{RingDescriptor, Scalar, ScalarError, Value};

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Rationals => write!(f, "Q"),
            RingDescriptor::PrimeField(p) => write!(f, "F{p}"),
            RingDescriptor::Poly(b, v) => write!(f, "poly({b},{v})"),
            RingDescriptor::Laurent(b, v) => write!(f, "laurent({b},{v})"),
            RingDescriptor::QuadExt(b, c) => write!(f, "quadext({b};{c})"),
            RingDescriptor::MultiPoly(b, n) => write!(f, "multipoly({b};{n})"),
        }
    }
}

fn coeff_text(c: &Scalar) -> String {
    match c.value {
        Value::Rational(_) | Value::Residue(_) => c.to_string(),
        _ => format!("({c})"),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rational(q) => write!(f, "{q}"),
            Value::Residue(r) => write!(f, "{r}"),
            Value::Poly(terms) => {
                if terms.is_empty() {
                    return write!(f, "0");
                }
                let var = self.ring.var_name().unwrap_or("t");
                for (i, (e, c)) in terms.iter().rev().enumerate() {
                    let t = coeff_text(c);
                    if i > 0 && !t.starts_with('-') {
                        write!(f, "+")?;
                    }
                    write!(f, "{t}*{var}^{e}")?;
                }
                Ok(())
            }
            Value::Quad(a, b) => write!(f, "({a})+({b})s"),
            Value::Multi(m) => {
                if m.is_zero() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (mono, c) in m.terms().collect::<Vec<_>>().into_iter().rev() {
                    if !first {
                        write!(f, "+")?;
                    }
                    first = false;
                    write!(f, "({c})")?;
                    for (i, e) in mono.exponents().iter().enumerate() {
                        if *e > 0 {
                            write!(f, "*z{i}^{e}")?;
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Splits `s` at top-level occurrences of `sep` (ignoring separators nested
/// inside parentheses).
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

pub fn parse_ring(s: &str) -> Result<RingDescriptor, ScalarError> {
    let s = s.trim();
    if s == "Q" {
        return Ok(RingDescriptor::Rationals);
    }
    if let Some(p) = s.strip_prefix('F') {
        let p: u64 = p
            .parse()
            .map_err(|_| ScalarError::Parse(format!("bad prime field `{s}`")))?;
        return RingDescriptor::prime_field(p);
    }
    let open = s
        .find('(')
        .ok_or_else(|| ScalarError::Parse(format!("unknown ring `{s}`")))?;
    if !s.ends_with(')') {
        return Err(ScalarError::Parse(format!("unbalanced ring `{s}`")));
    }
    let head = &s[..open];
    let inner = &s[open + 1..s.len() - 1];
    match head {
        "poly" | "laurent" => {
            let parts = split_top_level(inner, ',');
            if parts.len() != 2 {
                return Err(ScalarError::Parse(format!("bad ring arguments `{s}`")));
            }
            let base = parse_ring(parts[0])?;
            if head == "poly" {
                RingDescriptor::poly(base, parts[1].trim())
            } else {
                RingDescriptor::laurent(base, parts[1].trim())
            }
        }
        "quadext" => {
            let parts = split_top_level(inner, ';');
            if parts.len() != 2 {
                return Err(ScalarError::Parse(format!("bad ring arguments `{s}`")));
            }
            let base = parse_ring(parts[0])?;
            let c = parse_scalar(&base, parts[1].trim())?;
            RingDescriptor::quad_ext(base, c)
        }
        "multipoly" => {
            let parts = split_top_level(inner, ';');
            if parts.len() != 2 {
                return Err(ScalarError::Parse(format!("bad ring arguments `{s}`")));
            }
            let base = parse_ring(parts[0])?;
            let n: usize = parts[1]
                .trim()
                .parse()
                .map_err(|_| ScalarError::Parse(format!("bad variable count in `{s}`")))?;
            RingDescriptor::multi_poly(base, n)
        }
        _ => Err(ScalarError::Parse(format!("unknown ring `{s}`"))),
    }
}

/// Splits a sign-joined polynomial body into term slices. A `+`/`-` starts a
/// new term only at parenthesis depth 0 and directly after a digit, `)` or
/// `s`, so exponent signs like `t^-1` stay attached.
fn split_terms(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes = s.as_bytes();
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '+' | '-' if depth == 0 && i > 0 => {
                let prev = bytes[i - 1] as char;
                if prev.is_ascii_digit() || prev == ')' || prev == 's' {
                    parts.push(&s[start..i]);
                    start = if c == '+' { i + 1 } else { i };
                }
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_coeff(base: &RingDescriptor, s: &str) -> Result<Scalar, ScalarError> {
    match base {
        RingDescriptor::Rationals | RingDescriptor::PrimeField(_) => parse_scalar(base, s),
        _ => {
            let inner = s
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| {
                    ScalarError::Parse(format!("expected parenthesized coefficient `{s}`"))
                })?;
            parse_scalar(base, inner)
        }
    }
}

pub fn parse_scalar(ring: &RingDescriptor, s: &str) -> Result<Scalar, ScalarError> {
    let s = s.trim();
    match ring {
        RingDescriptor::Rationals => {
            let q: BigRational = s
                .parse()
                .map_err(|_| ScalarError::Parse(format!("bad rational `{s}`")))?;
            Ok(Scalar { ring: ring.clone(), value: Value::Rational(q) })
        }
        RingDescriptor::PrimeField(_) => {
            let v: BigInt = s
                .parse()
                .map_err(|_| ScalarError::Parse(format!("bad residue `{s}`")))?;
            Ok(Scalar::from_bigint(ring, &v))
        }
        RingDescriptor::Poly(base, var) | RingDescriptor::Laurent(base, var) => {
            if s == "0" {
                return Ok(Scalar::zero(ring));
            }
            let mut acc = Scalar::zero(ring);
            for term in split_terms(s) {
                let star = find_top_level_rsplit(term, '*').ok_or_else(|| {
                    ScalarError::Parse(format!("bad polynomial term `{term}`"))
                })?;
                let (coeff_s, mono_s) = (&term[..star], &term[star + 1..]);
                let exp_s = mono_s
                    .strip_prefix(var.as_ref())
                    .and_then(|t| t.strip_prefix('^'))
                    .ok_or_else(|| {
                        ScalarError::Parse(format!("bad monomial `{mono_s}`"))
                    })?;
                let e: i64 = exp_s
                    .parse()
                    .map_err(|_| ScalarError::Parse(format!("bad exponent `{exp_s}`")))?;
                if e < 0 && matches!(ring, RingDescriptor::Poly(..)) {
                    return Err(ScalarError::Parse(format!(
                        "negative exponent in polynomial ring: `{term}`"
                    )));
                }
                let c = parse_coeff(base, coeff_s)?.embed(ring)?;
                let t = Scalar::variable(ring);
                let powed = if e >= 0 {
                    t.pow(e as u32)
                } else {
                    t.try_invert().unwrap().pow((-e) as u32)
                };
                acc = acc.add(&c.mul(&powed));
            }
            Ok(acc)
        }
        RingDescriptor::QuadExt(base, _) => {
            // shape: (a)+(b)s
            let rest = s
                .strip_suffix('s')
                .ok_or_else(|| ScalarError::Parse(format!("bad quad scalar `{s}`")))?;
            let parts = split_terms(rest);
            if parts.len() != 2 {
                return Err(ScalarError::Parse(format!("bad quad scalar `{s}`")));
            }
            let unwrap = |t: &str| -> Result<String, ScalarError> {
                t.strip_prefix('(')
                    .and_then(|u| u.strip_suffix(')'))
                    .map(|u| u.to_string())
                    .ok_or_else(|| ScalarError::Parse(format!("bad quad component `{t}`")))
            };
            let a = parse_scalar(base, &unwrap(parts[0])?)?;
            let b = parse_scalar(base, &unwrap(parts[1])?)?;
            Ok(Scalar {
                ring: ring.clone(),
                value: Value::Quad(Box::new(a), Box::new(b)),
            })
        }
        RingDescriptor::MultiPoly(..) => Err(ScalarError::Unsupported(ring.to_string())),
    }
}

fn find_top_level_rsplit(s: &str, sep: char) -> Option<usize> {
    let mut depth = 0usize;
    let mut found = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => found = Some(i),
            _ => {}
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn ring_round_trip() {
        for text in [
            "Q",
            "F11",
            "poly(Q,t)",
            "laurent(Q,t)",
            "quadext(Q;5)",
            "laurent(quadext(Q;5),t)",
            "multipoly(laurent(Q,t);4)",
        ] {
            let r = parse_ring(text).unwrap();
            assert_eq!(r.to_string(), text);
        }
    }

    #[test]
    fn scalar_round_trip() {
        let q = RingDescriptor::Rationals;
        let lq = RingDescriptor::laurent(q.clone(), "t").unwrap();
        let qe = RingDescriptor::quad_ext(q.clone(), Scalar::from_int(&q, 5)).unwrap();
        let lqe = RingDescriptor::laurent(qe.clone(), "t").unwrap();

        let t = Scalar::variable(&lq);
        let samples = vec![
            Scalar::from_rational(-5, 6),
            Scalar::zero(&lq),
            t.pow(3)
                .mul(&Scalar::from_int(&lq, 2))
                .sub(&t.try_invert().unwrap()),
            Scalar::from_int(&qe, 2).add(&Scalar::quad_generator(&qe)),
            Scalar::variable(&lqe).mul(&Scalar::quad_generator(&qe).embed(&lqe).unwrap()),
        ];
        for s in samples {
            let text = s.to_string();
            let back = parse_scalar(&s.ring, &text).unwrap();
            assert_eq!(back, s, "round trip failed for `{text}`");
        }
    }

    #[test]
    fn laurent_display_shape() {
        let lq = RingDescriptor::laurent(RingDescriptor::Rationals, "t").unwrap();
        let t = Scalar::variable(&lq);
        let x = t.pow(2).mul(&Scalar::from_int(&lq, -3)).add(
            &t.try_invert().unwrap().mul(&Scalar::from_rational(1, 2).embed(&lq).unwrap()),
        );
        assert_eq!(x.to_string(), "-3*t^2+1/2*t^-1");
    }
}
