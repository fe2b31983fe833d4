//! The analytical core: trace towers, composition and degree-equation
//! verification, nondegeneracy, radicals and their filtrations, idempotent
//! relations, factorization over ideal decompositions, orthogonal splittings,
//! rank admissibility, and specialization checks.
//!
//! Identity checks run symbolically (exact multivariate polynomial identity)
//! while the expansion stays within the term budget; past it they fall back to
//! a deterministic sampled check with the published seed, and the report
//! records which method ran.

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{
    self, ideal_product, witness_from_polynomial, Algebra, AlgebraError, Ideal,
};
use crate::construct::{BuildError, FormedAlgebra, Provenance};
use crate::form::{polarize, DegreeForm, FormError, SymmetricTensor};
use crate::linalg::{self, ExactMatrix};
use crate::mpoly::{Budget, BudgetExceeded, MPoly};
use crate::report::{
    budget_limit, Method, SampleStream, VerificationReport, Witness, SAMPLE_POINTS, SAMPLE_SEED,
};
use crate::scalar::{binomial, binomial_big, RingDescriptor, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("rank admissibility lists exist only for degrees 3 and 4 (got {0})")]
    UnsupportedDegree(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// The forms `T_0 .. T_d` (with `T_0 = 1`, `T_d = N`), the trace `T = T_1`,
/// and the Gram matrix of the associative bilinear form `B(x, y) = T(xy)`.
#[derive(Debug, Clone)]
pub struct TraceTower {
    pub forms: Vec<DegreeForm>,
    pub gram: ExactMatrix,
}

impl TraceTower {
    pub fn trace(&self) -> &DegreeForm {
        &self.forms[1]
    }

    pub fn degree(&self) -> usize {
        self.forms.len() - 1
    }
}

pub fn trace_tower(f: &FormedAlgebra) -> Result<TraceTower, EngineError> {
    let theta = polarize(&f.form)?;
    trace_tower_from(f, &theta)
}

/// Builds `T_i(x) = C(d, i) theta(x, .., x, 1, .., 1)` symbolically by
/// evaluating theta with `i` generic slots and `d - i` unit slots.
pub fn trace_tower_from(
    f: &FormedAlgebra,
    theta: &SymmetricTensor,
) -> Result<TraceTower, EngineError> {
    let d = f.degree;
    let n = f.rank();
    let ring = f.ring().clone();
    let mring = RingDescriptor::multi_poly(ring.clone(), n).map_err(FormError::Scalar)?;
    let generic: Vec<Scalar> = (0..n).map(|i| Scalar::indeterminate(&mring, i)).collect();
    let unit_m: Vec<Scalar> = f
        .algebra
        .unit_coords()
        .iter()
        .map(|c| c.embed(&mring).expect("unit embeds"))
        .collect();
    let mut forms = Vec::with_capacity(d + 1);
    forms.push(DegreeForm::new(
        ring.clone(),
        n,
        0,
        MPoly::constant(n, Scalar::one(&ring)),
    )?);
    for i in 1..=d {
        let mut args: Vec<&[Scalar]> = Vec::with_capacity(d);
        for _ in 0..i {
            args.push(&generic);
        }
        for _ in i..d {
            args.push(&unit_m);
        }
        let val = theta.theta_eval(&args);
        let poly = val
            .as_mpoly()
            .expect("symbolic theta value")
            .scale(&binomial(d as u64, i as u64, &ring));
        forms.push(DegreeForm::new(ring.clone(), n, i, poly)?);
    }
    if forms[d].poly != f.form.poly {
        return Err(EngineError::Form(FormError::DiagonalMismatch));
    }
    let mut gram = ExactMatrix::zero(&ring, n, n);
    for i in 0..n {
        let ei = f.algebra.basis_coords(i);
        for j in 0..n {
            let prod = f.algebra.mul_coords(&ei, &f.algebra.basis_coords(j));
            *gram.at_mut(i, j) = forms[1].eval(&prod);
        }
    }
    Ok(TraceTower { forms, gram })
}

/// Splits `x` as `(T(x)/d) 1 + x_0` with `x_0` in the kernel of the trace.
pub fn trace_split(
    f: &FormedAlgebra,
    tower: &TraceTower,
    x: &[Scalar],
) -> Result<(Scalar, Vec<Scalar>), EngineError> {
    let d_inv = Scalar::from_int(f.ring(), f.degree as i64)
        .try_invert()
        .map_err(|_| EngineError::Precondition("degree is not a unit in the ring".into()))?;
    let t = tower.trace().eval(x).mul(&d_inv);
    let x0 = f
        .algebra
        .sub_coords(x, &f.algebra.scale_coords(&t, f.algebra.unit_coords()));
    debug_assert!(tower.trace().eval(&x0).is_zero());
    Ok((t, x0))
}

/// Nondegeneracy of the polarized form: the `n x C(n+d-2, d-1)` contraction
/// matrix has full row rank over the fraction field.
pub fn nondegenerate(theta: &SymmetricTensor) -> bool {
    theta.contraction_matrix().rank_over_fractions() == theta.rank
}

/// Radical of the form: the left kernel of the contraction matrix, returned
/// as coordinate vectors with ring entries.
pub fn radical(theta: &SymmetricTensor) -> Vec<Vec<Scalar>> {
    theta.contraction_matrix().transpose().kernel_basis()
}

/// Radical packaged as a verified two-sided ideal (it always is one for forms
/// permitting composition).
pub fn radical_ideal(f: &FormedAlgebra, theta: &SymmetricTensor) -> Result<Ideal, EngineError> {
    let basis = radical(theta);
    Ideal::new(f.algebra.clone(), basis).map_err(EngineError::Algebra)
}

/// Dimension chain of radical powers and the nilpotency index (least `k`
/// with `rad^k = 0`), or `None` when the chain stabilizes above zero.
pub fn radical_filtration(
    f: &FormedAlgebra,
    theta: &SymmetricTensor,
) -> Result<(Vec<usize>, Option<usize>), EngineError> {
    let rad = radical_ideal(f, theta)?;
    let mut dims = vec![rad.dimension()];
    if rad.is_zero() {
        return Ok((dims, Some(1)));
    }
    let mut current = rad.clone();
    for _ in 0..f.rank() {
        let next = ideal_product(&current, &rad)?;
        let dim = next.dimension();
        dims.push(dim);
        if dim == 0 {
            let index = dims.len();
            return Ok((dims, Some(index)));
        }
        if dim == current.dimension() {
            return Ok((dims, None));
        }
        current = next;
    }
    Ok((dims, None))
}

/// Extracts the multivariate payloads of lifted coordinates.
fn coord_polys(coords: &[Scalar]) -> Vec<MPoly> {
    coords
        .iter()
        .map(|c| c.as_mpoly().expect("lifted coordinate").clone())
        .collect()
}

/// `N(xy) - N(x) N(y) = 0` for generic `x, y`, with the sampled fallback past
/// the budget. Also confirms `N(1) = 1`.
pub fn check_composition(f: &FormedAlgebra) -> VerificationReport {
    check_composition_with_budget(f, budget_limit())
}

/// Same check with an explicit symbolic budget (term-by-term products).
pub fn check_composition_with_budget(f: &FormedAlgebra, limit: usize) -> VerificationReport {
    let check = "composition";
    if !f.form.eval(f.algebra.unit_coords()).is_one() {
        return VerificationReport::fail(
            check,
            Method::Symbolic,
            Witness {
                inputs: vec!["N(1)".into()],
                discrepancy: f.form.eval(f.algebra.unit_coords()).to_string(),
            },
        );
    }
    let n = f.rank();
    let symbolic = || -> Result<(MPoly, Budget), BudgetExceeded> {
        let mut budget = Budget::new(limit);
        let lifted = f.algebra.lift(2 * n);
        let x = Algebra::generic_coords(&lifted, 0);
        let y = Algebra::generic_coords(&lifted, n);
        let xy = coord_polys(&lifted.mul_coords(&x, &y));
        let n_xy = f.form.poly.subst(&xy, 2 * n, &mut budget)?;
        let n_x = f.form.poly.shift_vars(2 * n, 0);
        let n_y = f.form.poly.shift_vars(2 * n, n);
        let rhs = n_x.mul_budget(&n_y, &mut budget)?;
        Ok((n_xy.sub(&rhs), budget))
    };
    match symbolic() {
        Ok((diff, budget)) => {
            let rep = if diff.is_zero() {
                VerificationReport::pass(check, Method::Symbolic)
            } else {
                let wrapped = Scalar::from_mpoly(
                    &RingDescriptor::multi_poly(f.ring().clone(), 2 * n).expect("lift ring"),
                    diff,
                );
                let witness =
                    witness_from_polynomial(f.ring(), &[wrapped], 2 * n, "N(xy) - N(x)N(y)");
                VerificationReport::fail(check, Method::Symbolic, witness)
            };
            rep.with_counter("budget_spent", budget.spent() as u64)
        }
        Err(BudgetExceeded) => sampled_composition(f, check),
    }
}

fn sampled_composition(f: &FormedAlgebra, check: &str) -> VerificationReport {
    let n = f.rank();
    let ring = f.ring();
    let mut stream = SampleStream::new(SAMPLE_SEED);
    for sample in 0..SAMPLE_POINTS {
        let x: Vec<Scalar> = (0..n)
            .map(|_| Scalar::from_int(ring, stream.small_int()))
            .collect();
        let y: Vec<Scalar> = (0..n)
            .map(|_| Scalar::from_int(ring, stream.small_int()))
            .collect();
        let lhs = f.form.eval(&f.algebra.mul_coords(&x, &y));
        let rhs = f.form.eval(&x).mul(&f.form.eval(&y));
        let diff = lhs.sub(&rhs);
        if !diff.is_zero() {
            let fmt =
                |v: &[Scalar]| v.iter().map(Scalar::to_string).collect::<Vec<_>>().join(",");
            return VerificationReport::fail(
                check,
                Method::Sampled,
                Witness {
                    inputs: vec![format!("x=({})", fmt(&x)), format!("y=({})", fmt(&y))],
                    discrepancy: diff.to_string(),
                },
            )
            .with_counter("samples", sample as u64 + 1);
        }
    }
    VerificationReport::pass(check, Method::Sampled).with_counter("samples", SAMPLE_POINTS as u64)
}

/// Dense view of a symmetric tensor keyed by the colexicographic rank of the
/// sorted multi-index, for the exhaustive linearization loops.
struct DenseTheta {
    binom: Vec<Vec<usize>>,
    values: Vec<Option<Scalar>>,
}

impl DenseTheta {
    fn new(theta: &SymmetricTensor) -> DenseTheta {
        let top = theta.rank + theta.degree + 1;
        let mut binom = vec![vec![0usize; theta.degree + 2]; top];
        for x in 0..top {
            binom[x][0] = 1;
            for k in 1..theta.degree + 2 {
                binom[x][k] = if x == 0 {
                    0
                } else {
                    binom[x - 1][k - 1] + binom[x - 1][k]
                };
            }
        }
        let mut dense = DenseTheta {
            binom,
            values: vec![None; n_multisets(theta.rank, theta.degree)],
        };
        for (key, v) in theta.entries() {
            let r = dense.rank_of(key);
            dense.values[r] = Some(v.clone());
        }
        dense
    }

    /// Colex rank of a sorted key: `sum_l C(key[l] + l, l + 1)`.
    fn rank_of(&self, key: &[u8]) -> usize {
        key.iter()
            .enumerate()
            .map(|(l, k)| self.binom[*k as usize + l][l + 1])
            .sum()
    }

    fn get(&self, key: &[u8]) -> Option<&Scalar> {
        self.values[self.rank_of(key)].as_ref()
    }
}

fn n_multisets(n: usize, d: usize) -> usize {
    let v = binomial_big((n + d - 1) as u64, d as u64);
    let digits = v.to_u64_digits().1;
    digits.first().copied().unwrap_or(0) as usize
}

type SparseVec = Vec<(u8, Scalar)>;

const MAX_DEGREE: usize = 8;

fn sparsify(coords: &[Scalar]) -> SparseVec {
    coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as u8, c.clone()))
        .collect()
}

/// Accumulates the multilinear theta evaluation on sparse arguments into
/// `acc` (None = zero so far). Stack-only buffers; this sits inside loops
/// over millions of multiset pairs.
fn theta_accumulate(
    dense: &DenseTheta,
    args: &[&SparseVec],
    slot: usize,
    key: &mut [u8; MAX_DEGREE],
    coeff: Option<&Scalar>,
    acc: &mut Option<Scalar>,
) {
    if slot == args.len() {
        let mut sorted = [0u8; MAX_DEGREE];
        sorted[..slot].copy_from_slice(&key[..slot]);
        sorted[..slot].sort_unstable();
        if let Some(theta) = dense.get(&sorted[..slot]) {
            let term = match coeff {
                Some(c) => theta.mul(c),
                None => theta.clone(),
            };
            *acc = Some(match acc.take() {
                Some(prev) => prev.add(&term),
                None => term,
            });
        }
        return;
    }
    for (idx, c) in args[slot] {
        key[slot] = *idx;
        match coeff {
            Some(prev) => {
                let next = prev.mul(c);
                theta_accumulate(dense, args, slot + 1, key, Some(&next), acc);
            }
            None => theta_accumulate(dense, args, slot + 1, key, Some(c), acc),
        }
    }
}

/// Exhaustive check of the linearized composition identities on basis
/// multisets:
/// (6)  `theta(x_1 y, .., x_d y) = theta(x_1, .., x_d) N(y)` over all
///      (sorted multiset, basis vector) pairs, and
/// (7)  `sum_sigma theta(x_1 y_{sigma(1)}, .., x_d y_{sigma(d)})
///        = d! theta(x) theta(y)` over all pairs of sorted multisets.
/// Multilinearity and symmetry make this equivalent to the full identities.
pub fn check_linearized_composition(f: &FormedAlgebra) -> VerificationReport {
    let theta = match polarize(&f.form) {
        Ok(t) => t,
        Err(e) => {
            return VerificationReport::fail(
                "linearized",
                Method::Symbolic,
                Witness {
                    inputs: vec!["polarization".into()],
                    discrepancy: e.to_string(),
                },
            )
        }
    };
    check_linearized_composition_from(f, &theta)
}

/// Same check with a precomputed polarization.
pub fn check_linearized_composition_from(
    f: &FormedAlgebra,
    theta: &SymmetricTensor,
) -> VerificationReport {
    let check = "linearized";
    let n = f.rank();
    let d = f.degree;
    let ring = f.ring().clone();
    let dense = DenseTheta::new(theta);
    let keys: Vec<Vec<u8>> = SymmetricTensor::sorted_keys(n, d);
    let products: Vec<SparseVec> = (0..n)
        .flat_map(|i| {
            let ei = f.algebra.basis_coords(i);
            (0..n)
                .map(|j| sparsify(&f.algebra.mul_coords(&ei, &f.algebra.basis_coords(j))))
                .collect::<Vec<_>>()
        })
        .collect();
    let norm_of_basis: Vec<Scalar> = (0..n)
        .map(|j| f.form.eval(&f.algebra.basis_coords(j)))
        .collect();
    // None = zero theta entry; skipping zero work dominates the big loops
    let theta_of_key: Vec<Option<Scalar>> = keys.iter().map(|k| dense.get(k).cloned()).collect();
    let nonzero: Vec<bool> = products.iter().map(|p| !p.is_empty()).collect();
    let equal = |lhs: &Option<Scalar>, rhs: &Option<Scalar>| -> bool {
        match (lhs, rhs) {
            (None, None) => true,
            (Some(a), None) => a.is_zero(),
            (None, Some(b)) => b.is_zero(),
            (Some(a), Some(b)) => a == b,
        }
    };
    let mut pairs6 = 0u64;
    // identity (6): one multiset, one basis vector
    let mut keybuf = [0u8; MAX_DEGREE];
    let mut argbuf: [&SparseVec; MAX_DEGREE] = [&products[0]; MAX_DEGREE];
    for (ki, key) in keys.iter().enumerate() {
        for j in 0..n {
            pairs6 += 1;
            let mut all = true;
            for (l, x) in key.iter().enumerate() {
                let slot = *x as usize * n + j;
                if !nonzero[slot] {
                    all = false;
                    break;
                }
                argbuf[l] = &products[slot];
            }
            let mut lhs: Option<Scalar> = None;
            if all {
                theta_accumulate(&dense, &argbuf[..d], 0, &mut keybuf, None, &mut lhs);
            }
            let rhs = theta_of_key[ki]
                .as_ref()
                .map(|t| t.mul(&norm_of_basis[j]));
            if !equal(&lhs, &rhs) {
                let l = lhs.unwrap_or_else(|| Scalar::zero(&ring));
                let r = rhs.unwrap_or_else(|| Scalar::zero(&ring));
                return VerificationReport::fail(
                    check,
                    Method::Symbolic,
                    Witness {
                        inputs: vec![format!(
                            "identity (6) at x-multiset {key:?}, y = basis {j}"
                        )],
                        discrepancy: l.sub(&r).to_string(),
                    },
                )
                .with_counter("pairs6", pairs6);
            }
        }
    }
    // identity (7): two multisets, sum over permutations
    let perms: Vec<Vec<usize>> = (0..d).permutations(d).collect();
    let d_factorial: Scalar = {
        let mut acc = Scalar::one(&ring);
        for i in 2..=d as i64 {
            acc = acc.mul(&Scalar::from_int(&ring, i));
        }
        acc
    };
    let mut pairs7 = 0u64;
    for (xi, xkey) in keys.iter().enumerate() {
        for (yi, ykey) in keys.iter().enumerate() {
            pairs7 += 1;
            let mut lhs: Option<Scalar> = None;
            for sigma in &perms {
                let mut all = true;
                for (l, (x, s)) in xkey.iter().zip(sigma).enumerate() {
                    let slot = *x as usize * n + ykey[*s] as usize;
                    if !nonzero[slot] {
                        all = false;
                        break;
                    }
                    argbuf[l] = &products[slot];
                }
                if all {
                    theta_accumulate(&dense, &argbuf[..d], 0, &mut keybuf, None, &mut lhs);
                }
            }
            let rhs = match (&theta_of_key[xi], &theta_of_key[yi]) {
                (Some(a), Some(b)) => Some(d_factorial.mul(a).mul(b)),
                _ => None,
            };
            if !equal(&lhs, &rhs) {
                let l = lhs.unwrap_or_else(|| Scalar::zero(&ring));
                let r = rhs.unwrap_or_else(|| Scalar::zero(&ring));
                return VerificationReport::fail(
                    check,
                    Method::Symbolic,
                    Witness {
                        inputs: vec![format!(
                            "identity (7) at x-multiset {xkey:?}, y-multiset {ykey:?}"
                        )],
                        discrepancy: l.sub(&r).to_string(),
                    },
                )
                .with_counter("pairs7", pairs7);
            }
        }
    }
    VerificationReport::pass(check, Method::Symbolic)
        .with_counter("pairs6", pairs6)
        .with_counter("pairs7", pairs7)
}

/// Generic-element check of
/// `x^d - T_1(x) x^{d-1} + .. + (-1)^d T_d(x) 1 = 0` (left-normed powers).
pub fn check_degree_equation(f: &FormedAlgebra, tower: &TraceTower) -> VerificationReport {
    let check = "degree-eq";
    let n = f.rank();
    let d = f.degree;
    let lifted = f.algebra.lift(n);
    let x = Algebra::generic_coords(&lifted, 0);
    let mut powers: Vec<Vec<Scalar>> = Vec::with_capacity(d + 1);
    powers.push(
        f.algebra
            .unit_coords()
            .iter()
            .map(|c| c.embed(lifted.ring()).expect("unit embeds"))
            .collect(),
    );
    powers.push(x.clone());
    for _ in 2..=d {
        let prev = powers.last().unwrap();
        powers.push(lifted.mul_coords(prev, &x));
    }
    let mut failure: Option<(usize, MPoly)> = None;
    let mut diff_coords: Vec<Scalar> = Vec::with_capacity(n);
    for c in 0..n {
        let mut acc = MPoly::zero(n);
        for i in 0..=d {
            let pw = powers[d - i][c].as_mpoly().expect("lifted coords");
            let term = tower.forms[i].poly.mul(pw);
            if i % 2 == 0 {
                acc = acc.add(&term);
            } else {
                acc = acc.sub(&term);
            }
        }
        if failure.is_none() && !acc.is_zero() {
            failure = Some((c, acc.clone()));
        }
        diff_coords.push(Scalar::from_mpoly(lifted.ring(), acc));
    }
    match failure {
        None => VerificationReport::pass(check, Method::Symbolic),
        Some((c, _)) => {
            let witness = witness_from_polynomial(
                f.ring(),
                &diff_coords,
                n,
                &format!("degree equation, coordinate {c}"),
            );
            VerificationReport::fail(check, Method::Symbolic, witness)
        }
    }
}

/// Idempotent trace relations: for an idempotent `e` distinct from 0 and 1
/// (and linearly independent from 1), with `m` the least integer such that
/// `T_{m+1}(e) = .. = T_d(e) = 0`:
/// `(j+1) T_{j+1}(e) = (T(e) - j) T_j(e)`, `T_i(e) = C(m, i)`, `N(e) = 0`,
/// and `T(e) = m`.
pub fn idempotent_relations(
    f: &FormedAlgebra,
    tower: &TraceTower,
    e: &[Scalar],
) -> Result<VerificationReport, EngineError> {
    let check = "idempotent";
    if !f.algebra.is_idempotent(e) {
        return Err(EngineError::Precondition("e^2 != e".into()));
    }
    if e.iter().all(Scalar::is_zero) || e == f.algebra.unit_coords() {
        return Err(EngineError::Precondition("e must differ from 0 and 1".into()));
    }
    if !algebra::lin_independent_with_unit(&f.algebra, e)? {
        return Err(EngineError::Precondition(
            "1 and e must be linearly independent".into(),
        ));
    }
    let d = f.degree;
    let ring = f.ring();
    let t: Vec<Scalar> = (0..=d).map(|i| tower.forms[i].eval(e)).collect();
    let m = (0..=d).rev().find(|i| !t[*i].is_zero()).unwrap_or(0);
    let fail = |what: String, diff: &Scalar| {
        VerificationReport::fail(
            check,
            Method::Symbolic,
            Witness {
                inputs: vec![what],
                discrepancy: diff.to_string(),
            },
        )
        .with_counter("m", m as u64)
    };
    if !t[d].is_zero() {
        return Ok(fail("N(e) = 0".into(), &t[d]));
    }
    for j in 1..d {
        // (j+1) T_{j+1}(e) = (T(e) - j) T_j(e)
        let lhs = Scalar::from_int(ring, (j + 1) as i64).mul(&t[j + 1]);
        let rhs = t[1].sub(&Scalar::from_int(ring, j as i64)).mul(&t[j]);
        let diff = lhs.sub(&rhs);
        if !diff.is_zero() {
            return Ok(fail(format!("recurrence (38) at j = {j}"), &diff));
        }
    }
    for i in 1..=d {
        let expected = binomial(m as u64, i as u64, ring);
        let diff = t[i].sub(&expected);
        if !diff.is_zero() {
            return Ok(fail(format!("T_{i}(e) = C({m}, {i})"), &diff));
        }
    }
    let trace_diff = t[1].sub(&Scalar::from_int(ring, m as i64));
    if !trace_diff.is_zero() {
        return Ok(fail("T(e) = m".into(), &trace_diff));
    }
    Ok(VerificationReport::pass(check, Method::Symbolic).with_counter("m", m as u64))
}

/// One factor of a decomposition: the restricted algebra with its form.
pub struct FactorOutcome {
    pub factors: Vec<FormedAlgebra>,
    pub degrees: Vec<usize>,
    pub report: VerificationReport,
}

/// Expresses `v` in a reduced-echelon basis (unit pivots, zeros elsewhere in
/// pivot columns): coefficients read off the pivot slots, then the
/// recombination is verified. Works coordinate-wise, so symbolic vectors with
/// polynomial entries are fine.
fn express_in_basis(
    basis: &[Vec<Scalar>],
    pivots: &[usize],
    v: &[Scalar],
) -> Option<Vec<Scalar>> {
    let coeffs: Vec<Scalar> = pivots.iter().map(|p| v[*p].clone()).collect();
    let mut recombined = vec![Scalar::zero(&v[0].ring); v.len()];
    for (c, b) in coeffs.iter().zip(basis) {
        for (slot, b_val) in b.iter().enumerate() {
            if !b_val.is_zero() {
                let lifted = b_val.embed(&v[0].ring).expect("basis embeds");
                recombined[slot] = recombined[slot].add(&c.mul(&lifted));
            }
        }
    }
    if recombined.iter().zip(v).all(|(a, b)| a == b) {
        Some(coeffs)
    } else {
        None
    }
}

fn pivot_columns(basis: &[Vec<Scalar>]) -> Vec<usize> {
    basis
        .iter()
        .map(|b| b.iter().position(|c| !c.is_zero()).expect("nonzero basis row"))
        .collect()
}

/// Theorem-4 factorization over a complete system of pairwise orthogonal
/// central idempotents: restricts to each ideal `A_i = e_i A`, defines
/// `N_i(g) = N(g + 1 - e_i)`, verifies homogeneity of degree `m_i = T(e_i)`,
/// that the degrees sum to `d`, that each factor permits composition, and
/// that `N = prod N_i` identically.
pub fn factor_over_decomposition(
    f: &FormedAlgebra,
    tower: &TraceTower,
    idempotents: &[Vec<Scalar>],
) -> Result<FactorOutcome, EngineError> {
    let check = "factor";
    let r = idempotents.len();
    if r < 2 {
        return Err(EngineError::Precondition("need at least two idempotents".into()));
    }
    let ring = f.ring().clone();
    if !ring.is_field() {
        return Err(EngineError::Precondition(
            "factorization is implemented over field scalars".into(),
        ));
    }
    let alg = &f.algebra;
    let n = f.rank();
    let mut sum = vec![Scalar::zero(&ring); n];
    for (idx, e) in idempotents.iter().enumerate() {
        if !alg.is_idempotent(e) {
            return Err(EngineError::Precondition(format!("e_{idx} is not idempotent")));
        }
        if let Err(reason) = alg.is_central(e) {
            return Err(EngineError::Precondition(format!("e_{idx} is not central: {reason}")));
        }
        for (jdx, e2) in idempotents.iter().enumerate() {
            if idx != jdx && !alg.mul_coords(e, e2).iter().all(Scalar::is_zero) {
                return Err(EngineError::Precondition(format!(
                    "e_{idx} e_{jdx} != 0"
                )));
            }
        }
        sum = alg.add_coords(&sum, e);
    }
    if sum != alg.unit_coords() {
        return Err(EngineError::Precondition("idempotents do not sum to 1".into()));
    }

    let mut factors = Vec::new();
    let mut degrees = Vec::new();
    let mut bases = Vec::new();
    for (idx, e) in idempotents.iter().enumerate() {
        let span: Vec<Vec<Scalar>> = (0..n)
            .map(|j| alg.mul_coords(e, &alg.basis_coords(j)))
            .collect();
        let basis = linalg::row_space_basis(&ring, &span);
        let pivots = pivot_columns(&basis);
        let m_i = basis.len();
        // N_i(g) = N(g + 1 - e_i) as a polynomial in the basis coordinates
        let shift = alg.sub_coords(alg.unit_coords(), e);
        let coords: Vec<MPoly> = (0..n)
            .map(|slot| {
                let mut p = MPoly::constant(m_i, shift[slot].clone());
                for (g, b) in basis.iter().enumerate() {
                    if !b[slot].is_zero() {
                        p.add_term(crate::mpoly::Mono::var(m_i, g), b[slot].clone());
                    }
                }
                p
            })
            .collect();
        let n_i = f
            .form
            .poly
            .subst(&coords, m_i, &mut Budget::unlimited())
            .expect("unlimited budget");
        let Some(deg) = n_i.homogeneous_degree() else {
            return Ok(FactorOutcome {
                factors,
                degrees,
                report: VerificationReport::fail(
                    check,
                    Method::Symbolic,
                    Witness {
                        inputs: vec![format!("N_{idx} is not homogeneous")],
                        discrepancy: format!("N_{idx}(g) = N(g + 1 - e_{idx}) mixes degrees"),
                    },
                ),
            });
        };
        let deg = deg as usize;
        // T(e_i) must equal the homogeneous degree
        let trace_e = tower.trace().eval(e);
        if trace_e != Scalar::from_int(&ring, deg as i64) {
            return Ok(FactorOutcome {
                factors,
                degrees,
                report: VerificationReport::fail(
                    check,
                    Method::Symbolic,
                    Witness {
                        inputs: vec![format!("T(e_{idx}) = deg N_{idx}")],
                        discrepancy: trace_e.sub(&Scalar::from_int(&ring, deg as i64)).to_string(),
                    },
                ),
            });
        }
        // subalgebra structure constants in the echelon basis
        let mut triples = Vec::new();
        for (p, bp) in basis.iter().enumerate() {
            for (q, bq) in basis.iter().enumerate() {
                let prod = alg.mul_coords(bp, bq);
                let coeffs = express_in_basis(&basis, &pivots, &prod)
                    .ok_or_else(|| EngineError::Precondition(format!("e_{idx} A is not closed")))?;
                for (k, c) in coeffs.into_iter().enumerate() {
                    if !c.is_zero() {
                        triples.push((p, q, k, c));
                    }
                }
            }
        }
        let unit_i = express_in_basis(&basis, &pivots, e)
            .ok_or_else(|| EngineError::Precondition(format!("e_{idx} outside its own block")))?;
        let sub_alg = Algebra::new(ring.clone(), m_i, unit_i, triples, None)?;
        let form_i = DegreeForm::new(ring.clone(), m_i, deg, n_i)?;
        let factor = FormedAlgebra::new(
            sub_alg,
            form_i,
            Provenance::Factor {
                parent: Box::new(f.provenance.clone()),
                index: idx,
            },
            f.expect_nondegenerate,
        )?;
        factors.push(factor);
        degrees.push(deg);
        bases.push((basis, pivots));
    }

    if degrees.iter().sum::<usize>() != f.degree {
        return Ok(FactorOutcome {
            factors,
            degrees: degrees.clone(),
            report: VerificationReport::fail(
                check,
                Method::Symbolic,
                Witness {
                    inputs: vec!["sum of factor degrees".into()],
                    discrepancy: format!("{degrees:?} does not sum to {}", f.degree),
                },
            ),
        });
    }
    for (idx, factor) in factors.iter().enumerate() {
        let comp = check_composition(factor);
        if !comp.passed() {
            return Ok(FactorOutcome {
                factors: Vec::new(),
                degrees,
                report: VerificationReport::fail(
                    check,
                    Method::Symbolic,
                    Witness {
                        inputs: vec![format!("factor {idx} composition")],
                        discrepancy: comp
                            .witness
                            .map(|w| w.discrepancy)
                            .unwrap_or_else(|| "composition failed".into()),
                    },
                ),
            });
        }
    }
    // N = prod N_i with x_i = e_i x, symbolically
    let mring = RingDescriptor::multi_poly(ring.clone(), n).map_err(FormError::Scalar)?;
    let lifted = f.algebra.lift(n);
    let x = Algebra::generic_coords(&lifted, 0);
    let mut product = MPoly::constant(n, Scalar::one(&ring));
    for (e, (factor, (basis, pivots))) in idempotents.iter().zip(factors.iter().zip(&bases)) {
        let e_lift: Vec<Scalar> = e.iter().map(|c| c.embed(&mring).expect("embed")).collect();
        let proj = lifted.mul_coords(&e_lift, &x);
        let coeffs = express_in_basis(basis, pivots, &proj).ok_or_else(|| {
            EngineError::Precondition("projection leaves the block span".into())
        })?;
        let args: Vec<MPoly> = coeffs
            .iter()
            .map(|c| c.as_mpoly().expect("symbolic projection").clone())
            .collect();
        let value = factor
            .form
            .poly
            .subst(&args, n, &mut Budget::unlimited())
            .expect("unlimited budget");
        product = product.mul(&value);
    }
    let report = if product == f.form.poly {
        VerificationReport::pass(check, Method::Symbolic)
            .with_counter("factors", r as u64)
    } else {
        let wrapped = Scalar::from_mpoly(&mring, product.sub(&f.form.poly));
        VerificationReport::fail(
            check,
            Method::Symbolic,
            witness_from_polynomial(&ring, &[wrapped], n, "prod N_i - N"),
        )
    };
    Ok(FactorOutcome { factors, degrees, report })
}

/// Lemma-7 orthogonal splitting along a unital subalgebra `D` on which `B`
/// is nondegenerate: verifies `A = D + D_perp` as modules and the closure
/// `D D_perp + D_perp D` inside `D_perp`.
pub fn orthogonal_split(
    f: &FormedAlgebra,
    tower: &TraceTower,
    d_basis: &[Vec<Scalar>],
) -> Result<VerificationReport, EngineError> {
    let check = "orthogonal-split";
    let ring = f.ring().clone();
    let n = f.rank();
    let alg = &f.algebra;
    if !linalg::in_span(&ring, d_basis, alg.unit_coords()) {
        return Err(EngineError::Precondition("D does not contain the unit".into()));
    }
    for b1 in d_basis {
        for b2 in d_basis {
            if !linalg::in_span(&ring, d_basis, &alg.mul_coords(b1, b2)) {
                return Err(EngineError::Precondition("D is not a subalgebra".into()));
            }
        }
    }
    let m = d_basis.len();
    let mut restricted = ExactMatrix::zero(&ring, m, m);
    for (i, bi) in d_basis.iter().enumerate() {
        let bi_gram = tower.gram.mat_vec(bi);
        for (j, bj) in d_basis.iter().enumerate() {
            let mut acc = Scalar::zero(&ring);
            for (c, v) in bj.iter().zip(&bi_gram) {
                if !c.is_zero() && !v.is_zero() {
                    acc = acc.add(&c.mul(v));
                }
            }
            *restricted.at_mut(i, j) = acc;
        }
    }
    if restricted.rank_over_fractions() != m {
        return Err(EngineError::Precondition(
            "B restricted to D is degenerate".into(),
        ));
    }
    // D_perp = kernel of the rows (B b_i)^T
    let rows: Vec<Vec<Scalar>> = d_basis.iter().map(|b| tower.gram.mat_vec(b)).collect();
    let perp = linalg::solve_homogeneous_system(&ring, n, &rows);
    let mut all = d_basis.to_vec();
    all.extend(perp.clone());
    let split_ok = d_basis.len() + perp.len() == n
        && ExactMatrix::from_rows(&ring, all).rank_over_fractions() == n;
    if !split_ok {
        return Ok(VerificationReport::fail(
            check,
            Method::Symbolic,
            Witness {
                inputs: vec!["A = D + D_perp".into()],
                discrepancy: format!("dim D = {}, dim D_perp = {}, n = {n}", m, perp.len()),
            },
        ));
    }
    for b in d_basis {
        for p in &perp {
            for prod in [alg.mul_coords(b, p), alg.mul_coords(p, b)] {
                if !linalg::in_span(&ring, &perp, &prod) {
                    return Ok(VerificationReport::fail(
                        check,
                        Method::Symbolic,
                        Witness {
                            inputs: vec!["D D_perp inside D_perp".into()],
                            discrepancy: "product escapes the complement".into(),
                        },
                    ));
                }
            }
        }
    }
    Ok(VerificationReport::pass(check, Method::Symbolic)
        .with_counter("dim_d", m as u64)
        .with_counter("dim_perp", perp.len() as u64))
}

/// Admissible module ranks for nondegenerate forms permitting composition.
pub fn rank_admissible(d: usize, n: usize) -> Result<bool, EngineError> {
    match d {
        3 => Ok([1, 2, 3, 5, 9].contains(&n)),
        4 => Ok([1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 16].contains(&n)),
        _ => Err(EngineError::UnsupportedDegree(d)),
    }
}

/// Specializes a Poly/Laurent-based pair at each point and asserts that the
/// specialized radical vanishes (the per-point notion of nondegeneracy).
pub fn specialization_nondegeneracy(
    f: &FormedAlgebra,
    points: &[Scalar],
) -> Result<VerificationReport, EngineError> {
    let check = "specialize";
    for point in points {
        let spec = f.specialize_at(point)?;
        let theta = polarize(&spec.form)?;
        let rad = radical(&theta);
        if !rad.is_empty() {
            return Ok(VerificationReport::fail(
                check,
                Method::Symbolic,
                Witness {
                    inputs: vec![format!("specialization at {point}")],
                    discrepancy: format!("radical has dimension {}", rad.len()),
                },
            ));
        }
    }
    Ok(VerificationReport::pass(check, Method::Symbolic)
        .with_counter("points", points.len() as u64))
}

/// Kernel of the Gram matrix of `B`; coincides with the radical of `N` on
/// composition-verified examples.
pub fn gram_radical(tower: &TraceTower) -> Vec<Vec<Scalar>> {
    tower.gram.transpose().kernel_basis()
}

pub fn check_alternative(f: &FormedAlgebra) -> VerificationReport {
    algebra::check_alternative(&f.algebra)
}

/// Splits off an ideal pair along a central idempotent (Theorem 4 setting).
pub fn split_by_idempotent(
    f: &FormedAlgebra,
    e: &[Scalar],
) -> Result<(Ideal, Ideal), AlgebraError> {
    algebra::split_by_idempotent(&f.algebra, e)
}

pub use crate::algebra::check_alternative as check_alternative_algebra;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct;

    fn q() -> RingDescriptor {
        RingDescriptor::Rationals
    }

    fn qi(v: i64) -> Scalar {
        Scalar::from_int(&q(), v)
    }

    #[test]
    fn trace_tower_of_split_etale() {
        // T(x) = x1 + x2 + x3, T_2 = e_2(x), T_3 = x1 x2 x3, from the
        // characteristic polynomial (t - x1)(t - x2)(t - x3)
        let f = construct::split_etale(&q(), &[1, 1, 1]).unwrap();
        let tower = trace_tower(&f).unwrap();
        let x = vec![qi(2), qi(3), qi(5)];
        assert_eq!(tower.forms[1].eval(&x), qi(10));
        assert_eq!(tower.forms[2].eval(&x), qi(31));
        assert_eq!(tower.forms[3].eval(&x), qi(30));
        // T(1) = d
        assert_eq!(tower.forms[1].eval(&[qi(1), qi(1), qi(1)]), qi(3));
        // Gram of B for N = x1 x2 x3 is the identity
        assert_eq!(tower.gram, ExactMatrix::identity(&q(), 3));
    }

    #[test]
    fn trace_split_shapes() {
        let f = construct::matrix_algebra_det(&q(), 3).unwrap();
        let tower = trace_tower(&f).unwrap();
        // x = E12: trace 0, stays put
        let mut e12 = vec![qi(0); 9];
        e12[1] = qi(1);
        let (t, x0) = trace_split(&f, &tower, &e12).unwrap();
        assert!(t.is_zero());
        assert_eq!(x0, e12);
        // x = E11: (1/3, E11 - 1/3)
        let mut e11 = vec![qi(0); 9];
        e11[0] = qi(1);
        let (t, x0) = trace_split(&f, &tower, &e11).unwrap();
        assert_eq!(t, Scalar::from_rational(1, 3));
        assert!(tower.trace().eval(&x0).is_zero());
    }

    #[test]
    fn composition_of_split_etale() {
        let f = construct::split_etale(&q(), &[1, 1, 1]).unwrap();
        let rep = check_composition(&f);
        assert!(rep.passed());
        assert_eq!(rep.method, Method::Symbolic);
    }

    #[test]
    fn composition_failure_has_witness() {
        // N = x1^3 + x2^3 on Q + Q does not permit composition
        let alg = construct::split_etale(&q(), &[1, 1]).unwrap();
        let poly = MPoly::from_terms(
            2,
            vec![
                (crate::mpoly::Mono::from_exponents(vec![3, 0]), qi(1)),
                (crate::mpoly::Mono::from_exponents(vec![0, 3]), qi(1)),
            ],
        );
        let form = DegreeForm::new(q(), 2, 3, poly).unwrap();
        let broken = FormedAlgebra {
            algebra: alg.algebra.clone(),
            form,
            degree: 3,
            provenance: alg.provenance.clone(),
            expect_nondegenerate: false,
        };
        let rep = check_composition(&broken);
        assert!(!rep.passed());
        assert!(rep.witness.is_some());
    }

    #[test]
    fn linearized_on_cubic_tits() {
        let f = construct::cubic_tits(&q(), &qi(2)).unwrap();
        let rep = check_linearized_composition(&f);
        assert!(rep.passed(), "{:?}", rep.witness);
        // C(5,3)^2 = 100 multiset pairs
        assert_eq!(rep.counters["pairs7"], 100);
    }

    #[test]
    fn degree_equation_on_mat3_and_tits() {
        let f = construct::matrix_algebra_det(&q(), 3).unwrap();
        let tower = trace_tower(&f).unwrap();
        assert!(check_degree_equation(&f, &tower).passed());
        let t = construct::cubic_tits(&q(), &qi(2)).unwrap();
        let tt = trace_tower(&t).unwrap();
        // x = generator: x^3 - 0 x^2 + 0 x - 2 = 0
        let x = vec![qi(0), qi(1), qi(0)];
        assert!(tt.trace().eval(&x).is_zero());
        assert_eq!(tt.forms[3].eval(&x), qi(2));
        assert!(check_degree_equation(&t, &tt).passed());
    }

    #[test]
    fn nondegeneracy_and_radical_of_det() {
        let f = construct::matrix_algebra_det(&q(), 3).unwrap();
        let theta = polarize(&f.form).unwrap();
        assert!(nondegenerate(&theta));
        assert!(radical(&theta).is_empty());
    }

    #[test]
    fn degenerate_power_form_radical() {
        // N = x1^3 viewed on Q^2 (ignores x2): e2 spans the radical
        let poly = MPoly::from_terms(
            2,
            vec![(crate::mpoly::Mono::from_exponents(vec![3, 0]), qi(1))],
        );
        let form = DegreeForm::new(q(), 2, 3, poly).unwrap();
        let theta = polarize(&form).unwrap();
        assert!(!nondegenerate(&theta));
        let rad = radical(&theta);
        assert_eq!(rad.len(), 1);
        assert_eq!(rad[0], vec![qi(0), qi(1)]);
    }

    #[test]
    fn rank_admissibility_lists() {
        assert!(rank_admissible(3, 9).unwrap());
        assert!(!rank_admissible(3, 4).unwrap());
        assert!(rank_admissible(4, 12).unwrap());
        assert!(rank_admissible(3, 5).unwrap());
        assert!(!rank_admissible(4, 7).unwrap());
        assert!(rank_admissible(5, 1).is_err());
    }
}
