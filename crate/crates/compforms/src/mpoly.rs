//! Dense-exponent multivariate polynomials over a scalar tower, ordered by
//! graded lexicographic monomial order. These back the `MultiPoly` scalar kind
//! and all generic-element identity checking.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Dense exponent tuple. Ordered graded-lex: total degree first, then
/// lexicographic on exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mono(Vec<u16>);

impl Mono {
    pub fn unit(vars: usize) -> Mono {
        Mono(vec![0; vars])
    }

    pub fn var(vars: usize, i: usize) -> Mono {
        let mut e = vec![0; vars];
        e[i] = 1;
        Mono(e)
    }

    pub fn from_exponents(e: Vec<u16>) -> Mono {
        Mono(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|e| *e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Exceeding the symbolic expansion budget is not an error in itself; checks
/// that hit it fall back to deterministic sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded;

/// Accounts for term-by-term products performed during a symbolic expansion.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: usize,
    spent: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Budget {
        Budget { limit, spent: 0 }
    }

    pub fn unlimited() -> Budget {
        Budget { limit: usize::MAX, spent: 0 }
    }

    pub fn charge(&mut self, amount: usize) -> Result<(), BudgetExceeded> {
        self.spent = self.spent.saturating_add(amount);
        if self.spent > self.limit {
            Err(BudgetExceeded)
        } else {
            Ok(())
        }
    }

    pub fn spent(&self) -> usize {
        self.spent
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub vars: usize,
    terms: BTreeMap<Mono, Scalar>,
}

impl MPoly {
    pub fn zero(vars: usize) -> MPoly {
        MPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Scalar) -> MPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::unit(vars), c);
        }
        MPoly { vars, terms }
    }

    pub fn var(vars: usize, i: usize, coeff: Scalar) -> MPoly {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(Mono::var(vars, i), coeff);
        }
        MPoly { vars, terms }
    }

    pub fn from_terms(vars: usize, entries: Vec<(Mono, Scalar)>) -> MPoly {
        let mut p = MPoly::zero(vars);
        for (m, c) in entries {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    /// Returns the constant coefficient if the polynomial has no other term.
    pub fn constant_only(&self) -> Option<&Scalar> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c);
            }
        }
        None
    }

    pub fn constant_coeff(&self) -> Option<&Scalar> {
        self.terms.get(&Mono::unit(self.vars))
    }

    pub fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(prev) => {
                let s = prev.add(&c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.vars);
        }
        let mut out = MPoly::zero(self.vars);
        for (m, coeff) in &self.terms {
            out.add_term(m.clone(), coeff.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        self.mul_budget(other, &mut Budget::unlimited())
            .expect("unlimited budget")
    }

    pub fn mul_budget(
        &self,
        other: &MPoly,
        budget: &mut Budget,
    ) -> Result<MPoly, BudgetExceeded> {
        assert_eq!(self.vars, other.vars);
        budget.charge(self.terms.len().saturating_mul(other.terms.len()))?;
        let mut out = MPoly::zero(self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn pow_budget(&self, e: u32, budget: &mut Budget) -> Result<MPoly, BudgetExceeded> {
        let one = match self.terms.values().next() {
            Some(c) => MPoly::constant(self.vars, Scalar::one(&c.ring)),
            None => {
                // zero polynomial: 0^0 has no well-defined ring here, but every
                // caller raises nonzero polynomials or uses e >= 1
                if e == 0 {
                    panic!("pow of zero polynomial with zero exponent");
                }
                return Ok(MPoly::zero(self.vars));
            }
        };
        let mut acc = one;
        for _ in 0..e {
            acc = acc.mul_budget(self, budget)?;
        }
        Ok(acc)
    }

    /// Total degree of the highest term, or None for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.total_degree())
    }

    /// Some(d) when every term has total degree exactly d.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = it.next()?.total_degree();
        for m in it {
            if m.total_degree() != d {
                return None;
            }
        }
        Some(d)
    }

    /// Evaluates at scalar arguments (one per variable, in the coefficient
    /// ring). Panics if the argument count does not match.
    pub fn eval(&self, args: &[Scalar]) -> Scalar {
        assert_eq!(args.len(), self.vars);
        let zero_arg: Vec<bool> = args.iter().map(Scalar::is_zero).collect();
        let mut acc: Option<Scalar> = None;
        'terms: for (m, c) in &self.terms {
            for (i, e) in m.exponents().iter().enumerate() {
                if *e > 0 && zero_arg[i] {
                    continue 'terms;
                }
            }
            let mut term = c.clone();
            for (i, e) in m.exponents().iter().enumerate() {
                if *e > 0 {
                    term = term.mul(&args[i].pow(*e as u32));
                }
            }
            acc = Some(match acc {
                Some(a) => a.add(&term),
                None => term,
            });
        }
        acc.unwrap_or_else(|| {
            Scalar::zero(&args.first().expect("evaluable polynomial").ring)
        })
    }

    /// Substitutes a polynomial for each variable. Distinct argument powers
    /// are cached per call.
    pub fn subst(
        &self,
        args: &[MPoly],
        out_vars: usize,
        budget: &mut Budget,
    ) -> Result<MPoly, BudgetExceeded> {
        assert_eq!(args.len(), self.vars);
        let mut powers: BTreeMap<(usize, u16), MPoly> = BTreeMap::new();
        let mut out = MPoly::zero(out_vars);
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(out_vars, c.clone());
            for (i, e) in m.exponents().iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                if !powers.contains_key(&(i, *e)) {
                    let p = args[i].pow_budget(*e as u32, budget)?;
                    powers.insert((i, *e), p);
                }
                term = term.mul_budget(&powers[&(i, *e)], budget)?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Re-indexes variables into a wider polynomial ring: variable `i`
    /// becomes `i + offset`.
    pub fn shift_vars(&self, new_vars: usize, offset: usize) -> MPoly {
        let mut out = MPoly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; new_vars];
            for (i, x) in m.exponents().iter().enumerate() {
                if *x > 0 {
                    e[i + offset] = *x;
                }
            }
            out.add_term(Mono::from_exponents(e), c.clone());
        }
        out
    }

    pub fn map_coeffs<F>(&self, f: F) -> MPoly
    where
        F: Fn(&Scalar) -> Scalar,
    {
        let mut out = MPoly::zero(self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Greedy leading-term division; returns the quotient when the division
    /// is exact (which the callers guarantee for determinant cofactors).
    pub fn exact_div(&self, other: &MPoly) -> Option<MPoly> {
        assert_eq!(self.vars, other.vars);
        if other.is_zero() {
            return None;
        }
        let (lead_m, lead_c) = other.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut quo = MPoly::zero(self.vars);
        while !rem.is_zero() {
            let (rm, rc) = rem.terms.iter().next_back().unwrap();
            if !lead_m.divides(rm) {
                return None;
            }
            let qm = rm.div(lead_m);
            let qc = rc.exact_div(lead_c).ok()?;
            let mut partial = MPoly::zero(self.vars);
            partial.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&partial.mul(other));
            quo.add_term(qm, qc);
        }
        Some(quo)
    }
}
