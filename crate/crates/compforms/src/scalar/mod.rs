//! Exact scalar arithmetic for a small tower of commutative rings.
//!
//! Supported kinds: rationals, prime fields F_p, univariate polynomial and
//! Laurent polynomial rings over a field kind, quadratic extensions, and
//! multivariate polynomial rings (used for generic-element identity checks).
//! Every scalar is kept in canonical form, so equality is structural.

mod text;

pub use text::{parse_ring, parse_scalar};

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::mpoly::MPoly;

/// Maximum nesting height of the ring tower (base field counts as 1).
pub const MAX_TOWER_HEIGHT: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("not a unit")]
    NotAUnit,
    #[error("inexact division")]
    InexactDivision,
    #[error("specialization point for Laurent variable `{0}` must be a unit")]
    NonUnitPoint(String),
    #[error("missing assignment for variable `{0}`")]
    MissingVariable(String),
    #[error("ring tower exceeds height {MAX_TOWER_HEIGHT}")]
    TowerTooDeep,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("quadratic extension constant must be a non-square unit in the base")]
    BadQuadExt,
    #[error("invalid variable name `{0}`")]
    BadVariable(String),
    #[error("operation not supported over ring {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Describes one ring in the tower. Cheap to clone; nested pieces are shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingDescriptor {
    Rationals,
    PrimeField(u64),
    Poly(Arc<RingDescriptor>, Arc<str>),
    Laurent(Arc<RingDescriptor>, Arc<str>),
    QuadExt(Arc<RingDescriptor>, Arc<Scalar>),
    MultiPoly(Arc<RingDescriptor>, usize),
}

impl RingDescriptor {
    pub fn prime_field(p: u64) -> Result<Self, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(RingDescriptor::PrimeField(p))
    }

    pub fn poly(base: RingDescriptor, var: &str) -> Result<Self, ScalarError> {
        check_var_name(var)?;
        let r = RingDescriptor::Poly(Arc::new(base), Arc::from(var));
        r.check_height()?;
        Ok(r)
    }

    pub fn laurent(base: RingDescriptor, var: &str) -> Result<Self, ScalarError> {
        check_var_name(var)?;
        let r = RingDescriptor::Laurent(Arc::new(base), Arc::from(var));
        r.check_height()?;
        Ok(r)
    }

    /// Quadratic extension by `sqrt(c)`. `c` must be a unit; for rationals and
    /// prime fields it is also checked to be a non-square. Over polynomial and
    /// Laurent bases the non-square condition is the caller's responsibility.
    pub fn quad_ext(base: RingDescriptor, c: Scalar) -> Result<Self, ScalarError> {
        if c.ring != base {
            return Err(ScalarError::RingMismatch(
                c.ring.to_string(),
                base.to_string(),
            ));
        }
        if c.try_invert().is_err() {
            return Err(ScalarError::BadQuadExt);
        }
        match &base {
            RingDescriptor::Rationals => {
                if let Value::Rational(q) = &c.value {
                    if rational_is_square(q) {
                        return Err(ScalarError::BadQuadExt);
                    }
                }
            }
            RingDescriptor::PrimeField(p) => {
                if let Value::Residue(r) = &c.value {
                    if *p > 2 && mod_pow(*r, (p - 1) / 2, *p) == 1 {
                        return Err(ScalarError::BadQuadExt);
                    }
                }
            }
            _ => {}
        }
        let r = RingDescriptor::QuadExt(Arc::new(base), Arc::new(c));
        r.check_height()?;
        Ok(r)
    }

    pub fn multi_poly(base: RingDescriptor, vars: usize) -> Result<Self, ScalarError> {
        let r = RingDescriptor::MultiPoly(Arc::new(base), vars);
        r.check_height()?;
        Ok(r)
    }

    pub fn height(&self) -> usize {
        match self {
            RingDescriptor::Rationals | RingDescriptor::PrimeField(_) => 1,
            RingDescriptor::Poly(b, _)
            | RingDescriptor::Laurent(b, _)
            | RingDescriptor::QuadExt(b, _)
            | RingDescriptor::MultiPoly(b, _) => 1 + b.height(),
        }
    }

    fn check_height(&self) -> Result<(), ScalarError> {
        if self.height() > MAX_TOWER_HEIGHT {
            Err(ScalarError::TowerTooDeep)
        } else {
            Ok(())
        }
    }

    pub fn base(&self) -> Option<&RingDescriptor> {
        match self {
            RingDescriptor::Rationals | RingDescriptor::PrimeField(_) => None,
            RingDescriptor::Poly(b, _)
            | RingDescriptor::Laurent(b, _)
            | RingDescriptor::QuadExt(b, _)
            | RingDescriptor::MultiPoly(b, _) => Some(b),
        }
    }

    pub fn var_name(&self) -> Option<&str> {
        match self {
            RingDescriptor::Poly(_, v) | RingDescriptor::Laurent(_, v) => Some(v),
            _ => None,
        }
    }

    /// True for kinds where every nonzero element is invertible.
    pub fn is_field(&self) -> bool {
        match self {
            RingDescriptor::Rationals | RingDescriptor::PrimeField(_) => true,
            // QuadExt over a field by a non-square is a field; over Poly/Laurent
            // it is only a domain, and non-squareness is caller-asserted there.
            RingDescriptor::QuadExt(b, _) => b.is_field(),
            _ => false,
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(self)
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(self)
    }

    pub fn int(&self, v: i64) -> Scalar {
        Scalar::from_int(self, v)
    }
}

/// Canonical payload of a scalar; the variant always matches the ring kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Rational(BigRational),
    Residue(u64),
    /// Terms sorted by ascending exponent, no zero coefficients. Used for both
    /// `Poly` (exponents >= 0) and `Laurent` kinds.
    Poly(Vec<(i64, Scalar)>),
    /// `a + b*sqrt(c)` with components in the base ring.
    Quad(Box<Scalar>, Box<Scalar>),
    Multi(MPoly),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    pub ring: RingDescriptor,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl Scalar {
    pub fn zero(ring: &RingDescriptor) -> Scalar {
        let value = match ring {
            RingDescriptor::Rationals => Value::Rational(BigRational::zero()),
            RingDescriptor::PrimeField(_) => Value::Residue(0),
            RingDescriptor::Poly(..) | RingDescriptor::Laurent(..) => Value::Poly(Vec::new()),
            RingDescriptor::QuadExt(b, _) => Value::Quad(
                Box::new(Scalar::zero(b)),
                Box::new(Scalar::zero(b)),
            ),
            RingDescriptor::MultiPoly(_, vars) => Value::Multi(MPoly::zero(*vars)),
        };
        Scalar { ring: ring.clone(), value }
    }

    pub fn one(ring: &RingDescriptor) -> Scalar {
        Scalar::from_int(ring, 1)
    }

    pub fn from_int(ring: &RingDescriptor, v: i64) -> Scalar {
        Scalar::from_bigint(ring, &BigInt::from(v))
    }

    pub fn from_bigint(ring: &RingDescriptor, v: &BigInt) -> Scalar {
        match ring {
            RingDescriptor::Rationals => Scalar {
                ring: ring.clone(),
                value: Value::Rational(BigRational::from_integer(v.clone())),
            },
            RingDescriptor::PrimeField(p) => {
                let m = BigInt::from(*p);
                let mut r = v % &m;
                if r.is_negative() {
                    r += &m;
                }
                let digits = r.to_u64_digits().1;
                Scalar {
                    ring: ring.clone(),
                    value: Value::Residue(digits.first().copied().unwrap_or(0)),
                }
            }
            RingDescriptor::Poly(b, _) | RingDescriptor::Laurent(b, _) => {
                let c = Scalar::from_bigint(b, v);
                let terms = if c.is_zero() { Vec::new() } else { vec![(0, c)] };
                Scalar { ring: ring.clone(), value: Value::Poly(terms) }
            }
            RingDescriptor::QuadExt(b, _) => Scalar {
                ring: ring.clone(),
                value: Value::Quad(
                    Box::new(Scalar::from_bigint(b, v)),
                    Box::new(Scalar::zero(b)),
                ),
            },
            RingDescriptor::MultiPoly(b, vars) => {
                let c = Scalar::from_bigint(b, v);
                Scalar {
                    ring: ring.clone(),
                    value: Value::Multi(MPoly::constant(*vars, c)),
                }
            }
        }
    }

    pub fn from_rational(num: i64, den: i64) -> Scalar {
        assert!(den != 0);
        Scalar {
            ring: RingDescriptor::Rationals,
            value: Value::Rational(BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    /// The distinguished variable of a Poly/Laurent ring as a scalar.
    pub fn variable(ring: &RingDescriptor) -> Scalar {
        match ring {
            RingDescriptor::Poly(b, _) | RingDescriptor::Laurent(b, _) => Scalar {
                ring: ring.clone(),
                value: Value::Poly(vec![(1, Scalar::one(b))]),
            },
            _ => panic!("variable() requires a Poly or Laurent ring"),
        }
    }

    /// `sqrt(c)` in a quadratic extension ring.
    pub fn quad_generator(ring: &RingDescriptor) -> Scalar {
        match ring {
            RingDescriptor::QuadExt(b, _) => Scalar {
                ring: ring.clone(),
                value: Value::Quad(Box::new(Scalar::zero(b)), Box::new(Scalar::one(b))),
            },
            _ => panic!("quad_generator() requires a QuadExt ring"),
        }
    }

    /// Indeterminate `z_i` of a MultiPoly ring.
    pub fn indeterminate(ring: &RingDescriptor, i: usize) -> Scalar {
        match ring {
            RingDescriptor::MultiPoly(b, vars) => {
                assert!(i < *vars, "indeterminate index out of range");
                Scalar {
                    ring: ring.clone(),
                    value: Value::Multi(MPoly::var(*vars, i, Scalar::one(b))),
                }
            }
            _ => panic!("indeterminate() requires a MultiPoly ring"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rational(q) => q.is_zero(),
            Value::Residue(r) => *r == 0,
            Value::Poly(t) => t.is_empty(),
            Value::Quad(a, b) => a.is_zero() && b.is_zero(),
            Value::Multi(m) => m.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::one(&self.ring)
    }

    fn assert_same_ring(&self, other: &Scalar) {
        assert!(
            self.ring == other.ring,
            "ring mismatch: {} vs {}",
            self.ring,
            other.ring
        );
    }

    /// Checked arithmetic entry point; reports ring mismatches as errors.
    pub fn arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
        if a.ring != b.ring {
            return Err(ScalarError::RingMismatch(
                a.ring.to_string(),
                b.ring.to_string(),
            ));
        }
        Ok(match op {
            ArithOp::Add => a.add(b),
            ArithOp::Sub => a.sub(b),
            ArithOp::Mul => a.mul(b),
        })
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.assert_same_ring(other);
        let value = match (&self.value, &other.value) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a + b),
            (Value::Residue(a), Value::Residue(b)) => {
                let p = prime_of(&self.ring);
                Value::Residue(((*a as u128 + *b as u128) % p as u128) as u64)
            }
            (Value::Poly(a), Value::Poly(b)) => Value::Poly(poly_add(a, b, false)),
            (Value::Quad(a1, b1), Value::Quad(a2, b2)) => {
                Value::Quad(Box::new(a1.add(a2)), Box::new(b1.add(b2)))
            }
            (Value::Multi(a), Value::Multi(b)) => Value::Multi(a.add(b)),
            _ => unreachable!("payload mismatch"),
        };
        Scalar { ring: self.ring.clone(), value }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        let value = match &self.value {
            Value::Rational(a) => Value::Rational(-a),
            Value::Residue(a) => {
                let p = prime_of(&self.ring);
                Value::Residue(if *a == 0 { 0 } else { p - a })
            }
            Value::Poly(t) => Value::Poly(t.iter().map(|(e, c)| (*e, c.neg())).collect()),
            Value::Quad(a, b) => Value::Quad(Box::new(a.neg()), Box::new(b.neg())),
            Value::Multi(m) => Value::Multi(m.neg()),
        };
        Scalar { ring: self.ring.clone(), value }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.assert_same_ring(other);
        let value = match (&self.value, &other.value) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            (Value::Residue(a), Value::Residue(b)) => {
                let p = prime_of(&self.ring);
                Value::Residue(((*a as u128 * *b as u128) % p as u128) as u64)
            }
            (Value::Poly(a), Value::Poly(b)) => Value::Poly(poly_mul(a, b)),
            (Value::Quad(a1, b1), Value::Quad(a2, b2)) => {
                let c = quad_const(&self.ring);
                // (a1 + b1 s)(a2 + b2 s) = a1 a2 + c b1 b2 + (a1 b2 + b1 a2) s
                let re = a1.mul(a2).add(&c.mul(&b1.mul(b2)));
                let im = a1.mul(b2).add(&b1.mul(a2));
                Value::Quad(Box::new(re), Box::new(im))
            }
            (Value::Multi(a), Value::Multi(b)) => Value::Multi(a.mul(b)),
            _ => unreachable!("payload mismatch"),
        };
        Scalar { ring: self.ring.clone(), value }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse, or `NotAUnit`.
    pub fn try_invert(&self) -> Result<Scalar, ScalarError> {
        match &self.value {
            Value::Rational(q) => {
                if q.is_zero() {
                    Err(ScalarError::NotAUnit)
                } else {
                    Ok(Scalar {
                        ring: self.ring.clone(),
                        value: Value::Rational(q.recip()),
                    })
                }
            }
            Value::Residue(r) => {
                if *r == 0 {
                    Err(ScalarError::NotAUnit)
                } else {
                    let p = prime_of(&self.ring);
                    Ok(Scalar {
                        ring: self.ring.clone(),
                        value: Value::Residue(mod_pow(*r, p - 2, p)),
                    })
                }
            }
            Value::Poly(t) => {
                // Units: invertible constants for Poly; c*t^k with c invertible
                // for Laurent.
                if t.len() != 1 {
                    return Err(ScalarError::NotAUnit);
                }
                let (e, c) = &t[0];
                let laurent = matches!(self.ring, RingDescriptor::Laurent(..));
                if *e != 0 && !laurent {
                    return Err(ScalarError::NotAUnit);
                }
                let ci = c.try_invert()?;
                Ok(Scalar {
                    ring: self.ring.clone(),
                    value: Value::Poly(vec![(-e, ci)]),
                })
            }
            Value::Quad(a, b) => {
                // (a + b s)^-1 = (a - b s) / (a^2 - c b^2) when the norm is a unit.
                let c = quad_const(&self.ring);
                let norm = a.mul(a).sub(&c.mul(&b.mul(b)));
                let ni = norm.try_invert()?;
                Ok(Scalar {
                    ring: self.ring.clone(),
                    value: Value::Quad(Box::new(a.mul(&ni)), Box::new(b.neg().mul(&ni))),
                })
            }
            Value::Multi(m) => {
                let c = m.constant_only().ok_or(ScalarError::NotAUnit)?;
                let ci = c.try_invert()?;
                Ok(Scalar {
                    ring: self.ring.clone(),
                    value: Value::Multi(MPoly::constant(m.vars, ci)),
                })
            }
        }
    }

    /// Exact division; `other` must divide `self` in the ring.
    pub fn exact_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.assert_same_ring(other);
        if other.is_zero() {
            return Err(ScalarError::InexactDivision);
        }
        if let Ok(inv) = other.try_invert() {
            return Ok(self.mul(&inv));
        }
        match (&self.value, &other.value) {
            (Value::Poly(a), Value::Poly(b)) => {
                let q = poly_exact_div(a, b).ok_or(ScalarError::InexactDivision)?;
                if matches!(self.ring, RingDescriptor::Poly(..))
                    && q.first().is_some_and(|(e, _)| *e < 0)
                {
                    return Err(ScalarError::InexactDivision);
                }
                Ok(Scalar { ring: self.ring.clone(), value: Value::Poly(q) })
            }
            (Value::Quad(a, b), Value::Quad(x, y)) => {
                let c = quad_const(&self.ring);
                let norm = x.mul(x).sub(&c.mul(&y.mul(y)));
                // (a + b s)(x - y s) / norm
                let re = a.mul(x).sub(&c.mul(&b.mul(y)));
                let im = b.mul(x).sub(&a.mul(y));
                Ok(Scalar {
                    ring: self.ring.clone(),
                    value: Value::Quad(
                        Box::new(re.exact_div(&norm)?),
                        Box::new(im.exact_div(&norm)?),
                    ),
                })
            }
            (Value::Multi(a), Value::Multi(b)) => Ok(Scalar {
                ring: self.ring.clone(),
                value: Value::Multi(a.exact_div(b).ok_or(ScalarError::InexactDivision)?),
            }),
            _ => Err(ScalarError::InexactDivision),
        }
    }

    /// Embeds a scalar into a larger ring of the tower built over it.
    pub fn embed(&self, target: &RingDescriptor) -> Result<Scalar, ScalarError> {
        if self.ring == *target {
            return Ok(self.clone());
        }
        match target {
            RingDescriptor::Poly(b, _) | RingDescriptor::Laurent(b, _) => {
                let c = self.embed(b)?;
                let terms = if c.is_zero() { Vec::new() } else { vec![(0, c)] };
                Ok(Scalar { ring: target.clone(), value: Value::Poly(terms) })
            }
            RingDescriptor::QuadExt(b, _) => {
                let a = self.embed(b)?;
                Ok(Scalar {
                    ring: target.clone(),
                    value: Value::Quad(Box::new(a), Box::new(Scalar::zero(b))),
                })
            }
            RingDescriptor::MultiPoly(b, vars) => {
                let c = self.embed(b)?;
                Ok(Scalar {
                    ring: target.clone(),
                    value: Value::Multi(MPoly::constant(*vars, c)),
                })
            }
            _ => Err(ScalarError::RingMismatch(
                self.ring.to_string(),
                target.to_string(),
            )),
        }
    }

    /// Evaluates away variables. Poly/Laurent variables are looked up by name;
    /// MultiPoly indeterminates by the conventional names `z0`, `z1`, ...
    /// Laurent evaluation requires the assigned value to be a unit.
    pub fn specialize(
        &self,
        assignment: &BTreeMap<String, Scalar>,
    ) -> Result<Scalar, ScalarError> {
        match (&self.ring, &self.value) {
            (RingDescriptor::Rationals, _) | (RingDescriptor::PrimeField(_), _) => {
                Ok(self.clone())
            }
            (RingDescriptor::Poly(base, var), Value::Poly(terms))
            | (RingDescriptor::Laurent(base, var), Value::Poly(terms)) => {
                let point = assignment
                    .get(var.as_ref())
                    .ok_or_else(|| ScalarError::MissingVariable(var.to_string()))?;
                if point.ring != **base {
                    return Err(ScalarError::RingMismatch(
                        point.ring.to_string(),
                        base.to_string(),
                    ));
                }
                let needs_inverse = terms.first().is_some_and(|(e, _)| *e < 0);
                let point_inv = if needs_inverse {
                    Some(
                        point
                            .try_invert()
                            .map_err(|_| ScalarError::NonUnitPoint(var.to_string()))?,
                    )
                } else {
                    None
                };
                let mut acc = Scalar::zero(base);
                for (e, coeff) in terms {
                    let c = coeff.specialize(assignment)?;
                    let powed = if *e >= 0 {
                        point.pow(*e as u32)
                    } else {
                        point_inv.as_ref().unwrap().pow((-e) as u32)
                    };
                    acc = acc.add(&c.mul(&powed));
                }
                Ok(acc)
            }
            (RingDescriptor::QuadExt(..), _) => {
                Err(ScalarError::Unsupported(self.ring.to_string()))
            }
            (RingDescriptor::MultiPoly(base, _), Value::Multi(m)) => {
                let mut acc = Scalar::zero(base);
                for (mono, coeff) in m.terms() {
                    let mut term = coeff.specialize_base(assignment)?;
                    for (i, e) in mono.exponents().iter().enumerate() {
                        if *e > 0 {
                            let name = format!("z{i}");
                            let point = assignment
                                .get(&name)
                                .ok_or(ScalarError::MissingVariable(name))?;
                            term = term.mul(&point.pow(*e as u32));
                        }
                    }
                    acc = acc.add(&term);
                }
                Ok(acc)
            }
            _ => unreachable!("payload mismatch"),
        }
    }

    fn specialize_base(
        &self,
        assignment: &BTreeMap<String, Scalar>,
    ) -> Result<Scalar, ScalarError> {
        match &self.ring {
            RingDescriptor::Poly(_, var) | RingDescriptor::Laurent(_, var) => {
                if assignment.contains_key(var.as_ref()) {
                    self.specialize(assignment)
                } else {
                    Ok(self.clone())
                }
            }
            _ => Ok(self.clone()),
        }
    }

    /// Access the multivariate payload of a MultiPoly scalar.
    pub fn as_mpoly(&self) -> Option<&MPoly> {
        match &self.value {
            Value::Multi(m) => Some(m),
            _ => None,
        }
    }

    pub fn from_mpoly(ring: &RingDescriptor, m: MPoly) -> Scalar {
        debug_assert!(matches!(ring, RingDescriptor::MultiPoly(_, v) if *v == m.vars));
        Scalar { ring: ring.clone(), value: Value::Multi(m) }
    }
}

/// Inverse of `d!` in the ring, or `NotAUnit` when the construction must be
/// rejected (e.g. `d >= p` over a prime field).
pub fn factorial_unit(d: u32, ring: &RingDescriptor) -> Result<Scalar, ScalarError> {
    assert!(d >= 1);
    let mut f = BigInt::one();
    for i in 2..=d as i64 {
        f *= i;
    }
    Scalar::from_bigint(ring, &f).try_invert()
}

pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient mapped into `ring`; 0 when `k > n`.
pub fn binomial(n: u64, k: u64, ring: &RingDescriptor) -> Scalar {
    Scalar::from_bigint(ring, &binomial_big(n, k))
}

fn prime_of(ring: &RingDescriptor) -> u64 {
    match ring {
        RingDescriptor::PrimeField(p) => *p,
        _ => unreachable!("residue payload outside a prime field"),
    }
}

fn quad_const(ring: &RingDescriptor) -> Scalar {
    match ring {
        RingDescriptor::QuadExt(_, c) => (**c).clone(),
        _ => unreachable!("quad payload outside a quadratic extension"),
    }
}

fn check_var_name(var: &str) -> Result<(), ScalarError> {
    let ok = !var.is_empty()
        && var != "s"
        && var.chars().next().unwrap().is_ascii_lowercase()
        && var.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(ScalarError::BadVariable(var.to_string()))
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b: u128 = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

fn rational_is_square(q: &BigRational) -> bool {
    if q.is_negative() {
        return false;
    }
    let n = q.numer();
    let d = q.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    &sn * &sn == *n && &sd * &sd == *d
}

fn poly_add(a: &[(i64, Scalar)], b: &[(i64, Scalar)], _: bool) -> Vec<(i64, Scalar)> {
    let mut out: Vec<(i64, Scalar)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let pick_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let pick_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if pick_a {
            out.push(a[i].clone());
            i += 1;
        } else if pick_b {
            out.push(b[j].clone());
            j += 1;
        } else {
            let c = a[i].1.add(&b[j].1);
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn poly_mul(a: &[(i64, Scalar)], b: &[(i64, Scalar)]) -> Vec<(i64, Scalar)> {
    let mut acc: BTreeMap<i64, Scalar> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea + eb;
            let c = ca.mul(cb);
            match acc.remove(&e) {
                Some(prev) => {
                    let s = prev.add(&c);
                    if !s.is_zero() {
                        acc.insert(e, s);
                    }
                }
                None => {
                    if !c.is_zero() {
                        acc.insert(e, c);
                    }
                }
            }
        }
    }
    acc.into_iter().collect()
}

/// Long division returning the quotient when the remainder vanishes exactly.
/// Coefficients live in a field kind, so leading-coefficient division is free.
/// If `a = q*b` then every quotient exponent is at least
/// `min_exp(a) - min_exp(b)`; hitting that floor with a nonzero remainder
/// proves inexactness (and bounds the loop for Laurent inputs).
fn poly_exact_div(a: &[(i64, Scalar)], b: &[(i64, Scalar)]) -> Option<Vec<(i64, Scalar)>> {
    if b.is_empty() {
        return None;
    }
    if a.is_empty() {
        return Some(Vec::new());
    }
    let (lead_e, lead_c) = b.last().unwrap();
    let lead_inv = lead_c.try_invert().ok()?;
    let min_q = a.first().unwrap().0 - b.first().unwrap().0;
    let mut rem: Vec<(i64, Scalar)> = a.to_vec();
    let mut quo: Vec<(i64, Scalar)> = Vec::new();
    while let Some((re, rc)) = rem.last().cloned() {
        let qe = re - lead_e;
        if qe < min_q {
            return None;
        }
        let qc = rc.mul(&lead_inv);
        let shifted: Vec<(i64, Scalar)> =
            b.iter().map(|(e, c)| (e + qe, c.mul(&qc).neg())).collect();
        rem = poly_add(&rem, &shifted, false);
        quo.push((qe, qc));
    }
    quo.sort_by_key(|(e, _)| *e);
    Some(quo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RingDescriptor {
        RingDescriptor::Rationals
    }

    fn laurent_q() -> RingDescriptor {
        RingDescriptor::laurent(q(), "t").unwrap()
    }

    fn poly_q() -> RingDescriptor {
        RingDescriptor::poly(q(), "t").unwrap()
    }

    #[test]
    fn rational_addition() {
        let a = Scalar::from_rational(1, 2);
        let b = Scalar::from_rational(1, 3);
        assert_eq!(
            Scalar::arith(&a, &b, ArithOp::Add).unwrap(),
            Scalar::from_rational(5, 6)
        );
    }

    #[test]
    fn laurent_unit_cancellation() {
        let r = laurent_q();
        let t = Scalar::variable(&r);
        let ti = t.try_invert().unwrap();
        assert_eq!(t.mul(&ti), Scalar::one(&r));
    }

    #[test]
    fn quadratic_extension_norm() {
        let r = RingDescriptor::quad_ext(q(), Scalar::from_int(&q(), 5)).unwrap();
        let two = Scalar::from_int(&r, 2);
        let s = Scalar::quad_generator(&r);
        let a = two.add(&s);
        let b = two.sub(&s);
        assert_eq!(a.mul(&b), Scalar::from_int(&r, -1));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            Scalar::from_int(&q(), 6).try_invert().unwrap(),
            Scalar::from_rational(1, 6)
        );
        let t = Scalar::variable(&laurent_q());
        let ti = t.try_invert().unwrap();
        assert_eq!(ti.mul(&t), Scalar::one(&laurent_q()));
        let tp = Scalar::variable(&poly_q());
        assert_eq!(tp.try_invert(), Err(ScalarError::NotAUnit));
        assert_eq!(Scalar::zero(&q()).try_invert(), Err(ScalarError::NotAUnit));
    }

    #[test]
    fn factorial_unit_examples() {
        assert_eq!(factorial_unit(3, &q()).unwrap(), Scalar::from_rational(1, 6));
        let f5 = RingDescriptor::prime_field(5).unwrap();
        // 3! = 6 = 1 mod 5
        assert_eq!(factorial_unit(3, &f5).unwrap(), Scalar::from_int(&f5, 1));
        let f3 = RingDescriptor::prime_field(3).unwrap();
        assert_eq!(factorial_unit(4, &f3), Err(ScalarError::NotAUnit));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2, &q()), Scalar::from_int(&q(), 6));
        assert_eq!(binomial(3, 1, &q()), Scalar::from_int(&q(), 3));
        assert_eq!(binomial(3, 5, &q()), Scalar::zero(&q()));
    }

    #[test]
    fn specialize_examples() {
        let r = poly_q();
        let t = Scalar::variable(&r);
        let p = t.mul(&t).add(&Scalar::one(&r)); // t^2 + 1
        let mut at = BTreeMap::new();
        at.insert("t".to_string(), Scalar::from_int(&q(), 2));
        assert_eq!(p.specialize(&at).unwrap(), Scalar::from_int(&q(), 5));

        let rl = laurent_q();
        let mu_t = Scalar::variable(&rl).mul(&Scalar::from_int(&rl, 3));
        let mut at1 = BTreeMap::new();
        at1.insert("t".to_string(), Scalar::from_int(&q(), 1));
        assert_eq!(mu_t.specialize(&at1).unwrap(), Scalar::from_int(&q(), 3));

        let ti = Scalar::variable(&rl).try_invert().unwrap();
        let mut at0 = BTreeMap::new();
        at0.insert("t".to_string(), Scalar::zero(&q()));
        assert_eq!(
            ti.specialize(&at0),
            Err(ScalarError::NonUnitPoint("t".to_string()))
        );
    }

    #[test]
    fn exact_poly_division() {
        let r = poly_q();
        let t = Scalar::variable(&r);
        let one = Scalar::one(&r);
        // (t^2 - 1) / (t - 1) = t + 1
        let num = t.mul(&t).sub(&one);
        let den = t.sub(&one);
        assert_eq!(num.exact_div(&den).unwrap(), t.add(&one));
        assert_eq!(
            one.exact_div(&den.mul(&den)).err(),
            Some(ScalarError::InexactDivision)
        );
    }

    #[test]
    fn quad_ext_rejects_squares() {
        assert!(RingDescriptor::quad_ext(q(), Scalar::from_int(&q(), 4)).is_err());
        assert!(RingDescriptor::quad_ext(q(), Scalar::from_rational(9, 4)).is_err());
        assert!(RingDescriptor::quad_ext(q(), Scalar::zero(&q())).is_err());
        assert!(RingDescriptor::quad_ext(q(), Scalar::from_int(&q(), 5)).is_ok());
        let f7 = RingDescriptor::prime_field(7).unwrap();
        // squares mod 7: 1, 2, 4
        assert!(RingDescriptor::quad_ext(f7.clone(), Scalar::from_int(&f7, 2)).is_err());
        assert!(RingDescriptor::quad_ext(f7.clone(), Scalar::from_int(&f7, 3)).is_ok());
    }

    #[test]
    fn tower_height_is_bounded() {
        let l = laurent_q();
        let m = RingDescriptor::multi_poly(l.clone(), 4).unwrap();
        assert_eq!(m.height(), 3);
        assert_eq!(
            RingDescriptor::poly(m, "u").err(),
            Some(ScalarError::TowerTooDeep)
        );
    }
}
