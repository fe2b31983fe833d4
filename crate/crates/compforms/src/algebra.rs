//! Finite-rank free nonassociative algebras presented by structure constants.
//!
//! An algebra is a free module of rank `n` with a distinguished unit vector
//! and a multiplication tensor `e_i e_j = sum_k c[i][j][k] e_k`. The unit law
//! is checked at construction. Identity checking "for all x, y" happens
//! symbolically over a multivariate polynomial extension of the base ring,
//! with a deterministic sampled fallback above the symbolic budget.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{self, ExactMatrix};

use crate::report::{
    budget_limit, Method, SampleStream, VerificationReport, Witness, SAMPLE_POINTS,
    SAMPLE_SEED,
};
use crate::scalar::{binomial_big, RingDescriptor, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("ring mismatch")]
    RingMismatch,
    #[error("algebra mismatch")]
    AlgebraMismatch,
    #[error("unit law fails on basis vector {0}")]
    UnitLaw(usize),
    #[error("coordinate vector has the wrong length")]
    BadCoords,
    #[error("not a central idempotent: {0}")]
    NotCentralIdempotent(String),
    #[error("subspace is not a two-sided ideal")]
    NotAnIdeal,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone)]
pub struct Algebra {
    ring: RingDescriptor,
    rank: usize,
    unit: Vec<Scalar>,
    /// Sparse rows of the structure tensor: `table[i * rank + j]` lists the
    /// nonzero `(k, c[i][j][k])`, sorted by `k`.
    table: Vec<Vec<(usize, Scalar)>>,
    labels: Option<Vec<String>>,
}

impl Algebra {
    /// Builds an algebra from sparse structure-constant triples and checks
    /// the unit law.
    pub fn new(
        ring: RingDescriptor,
        rank: usize,
        unit: Vec<Scalar>,
        triples: Vec<(usize, usize, usize, Scalar)>,
        labels: Option<Vec<String>>,
    ) -> Result<Algebra, AlgebraError> {
        assert!(rank >= 1);
        if unit.len() != rank {
            return Err(AlgebraError::BadCoords);
        }
        let mut dense: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); rank * rank];
        for (i, j, k, c) in triples {
            assert!(i < rank && j < rank && k < rank, "structure index out of range");
            assert!(c.ring == ring, "structure constant in the wrong ring");
            if c.is_zero() {
                continue;
            }
            let slot = &mut dense[i * rank + j];
            match slot.remove(&k) {
                Some(prev) => {
                    let s = prev.add(&c);
                    if !s.is_zero() {
                        slot.insert(k, s);
                    }
                }
                None => {
                    slot.insert(k, c);
                }
            }
        }
        let table: Vec<Vec<(usize, Scalar)>> = dense
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        let alg = Algebra { ring, rank, unit, table, labels };
        for j in 0..rank {
            let e = alg.basis_coords(j);
            if alg.mul_coords(&alg.unit, &e) != e || alg.mul_coords(&e, &alg.unit) != e {
                return Err(AlgebraError::UnitLaw(j));
            }
        }
        Ok(alg)
    }

    /// Convenience constructor from a basis-product closure.
    pub fn from_products<F>(
        ring: RingDescriptor,
        rank: usize,
        unit: Vec<Scalar>,
        labels: Option<Vec<String>>,
        product: F,
    ) -> Result<Algebra, AlgebraError>
    where
        F: Fn(usize, usize) -> Vec<(usize, Scalar)>,
    {
        let mut triples = Vec::new();
        for i in 0..rank {
            for j in 0..rank {
                for (k, c) in product(i, j) {
                    triples.push((i, j, k, c));
                }
            }
        }
        Algebra::new(ring, rank, unit, triples, labels)
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn unit_coords(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("e{i}"),
        }
    }

    pub fn structure_entry(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.table[i * self.rank + j]
    }

    pub fn basis_coords(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(&self.ring); self.rank];
        v[i] = Scalar::one(&self.ring);
        v
    }

    pub fn zero_coords(&self) -> Vec<Scalar> {
        vec![Scalar::zero(&self.ring); self.rank]
    }

    pub fn mul_coords(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.rank);
        assert_eq!(y.len(), self.rank);
        let mut out = vec![Scalar::zero(&self.ring); self.rank];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let prod = xi.mul(yj);
                for (k, c) in self.structure_entry(i, j) {
                    out[*k] = out[*k].add(&prod.mul(c));
                }
            }
        }
        out
    }

    pub fn add_coords(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        x.iter().zip(y).map(|(a, b)| a.add(b)).collect()
    }

    pub fn sub_coords(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        x.iter().zip(y).map(|(a, b)| a.sub(b)).collect()
    }

    pub fn scale_coords(&self, c: &Scalar, x: &[Scalar]) -> Vec<Scalar> {
        x.iter().map(|a| a.mul(c)).collect()
    }

    pub fn commutator_coords(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.sub_coords(&self.mul_coords(x, y), &self.mul_coords(y, x))
    }

    /// `(xy)z - x(yz)`.
    pub fn associator_coords(&self, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Vec<Scalar> {
        let left = self.mul_coords(&self.mul_coords(x, y), z);
        let right = self.mul_coords(x, &self.mul_coords(y, z));
        self.sub_coords(&left, &right)
    }

    /// Matrix of left multiplication by `x` acting on coordinates.
    pub fn left_mult_matrix(&self, x: &[Scalar]) -> ExactMatrix {
        let mut m = ExactMatrix::zero(&self.ring, self.rank, self.rank);
        for j in 0..self.rank {
            let col = self.mul_coords(x, &self.basis_coords(j));
            for (i, v) in col.into_iter().enumerate() {
                *m.at_mut(i, j) = v;
            }
        }
        m
    }

    pub fn right_mult_matrix(&self, x: &[Scalar]) -> ExactMatrix {
        let mut m = ExactMatrix::zero(&self.ring, self.rank, self.rank);
        for j in 0..self.rank {
            let col = self.mul_coords(&self.basis_coords(j), x);
            for (i, v) in col.into_iter().enumerate() {
                *m.at_mut(i, j) = v;
            }
        }
        m
    }

    /// The same multiplication table over a multivariate polynomial extension
    /// of the base ring, for generic-element identity checks.
    pub fn lift(&self, vars: usize) -> Algebra {
        let ring = RingDescriptor::multi_poly(self.ring.clone(), vars)
            .expect("lift keeps the tower within bounds");
        let embed = |s: &Scalar| s.embed(&ring).expect("embedding into own extension");
        Algebra {
            ring: ring.clone(),
            rank: self.rank,
            unit: self.unit.iter().map(embed).collect(),
            table: self
                .table
                .iter()
                .map(|row| row.iter().map(|(k, c)| (*k, embed(c))).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    /// Generic element with coordinates `z_offset .. z_{offset+rank}` of the
    /// lifted algebra.
    pub fn generic_coords(lifted: &Algebra, offset: usize) -> Vec<Scalar> {
        (0..lifted.rank)
            .map(|i| Scalar::indeterminate(&lifted.ring, offset + i))
            .collect()
    }

    /// Evaluates MultiPoly coordinates at a concrete point of the base ring.
    pub fn eval_generic(coords: &[Scalar], point: &[Scalar]) -> Vec<Scalar> {
        coords
            .iter()
            .map(|c| c.as_mpoly().expect("generic coordinate").eval(point))
            .collect()
    }

    pub fn is_idempotent(&self, e: &[Scalar]) -> bool {
        self.mul_coords(e, e) == e
    }

    /// Central means: commutes with every basis vector and associates in all
    /// three slots against all basis pairs.
    pub fn is_central(&self, x: &[Scalar]) -> Result<(), String> {
        for i in 0..self.rank {
            let ei = self.basis_coords(i);
            if self.commutator_coords(x, &ei).iter().any(|c| !c.is_zero()) {
                return Err(format!("[x,{}] != 0", self.label(i)));
            }
        }
        for i in 0..self.rank {
            let ei = self.basis_coords(i);
            for j in 0..self.rank {
                let ej = self.basis_coords(j);
                for (name, assoc) in [
                    ("x,.,.", self.associator_coords(x, &ei, &ej)),
                    (".,x,.", self.associator_coords(&ei, x, &ej)),
                    (".,.,x", self.associator_coords(&ei, &ej, x)),
                ] {
                    if assoc.iter().any(|c| !c.is_zero()) {
                        return Err(format!(
                            "associator [{name}] with ({}, {}) != 0",
                            self.label(i),
                            self.label(j)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Nucleus and center as solution spaces of the associator (and
    /// commutator) linear constraints.
    pub fn center_and_nucleus(&self) -> (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) {
        let n = self.rank;
        let mut assoc_rows: Vec<Vec<Scalar>> = Vec::new();
        for i in 0..n {
            let ei = self.basis_coords(i);
            let l_i = self.left_mult_matrix(&ei);
            let r_i = self.right_mult_matrix(&ei);
            for j in 0..n {
                let ej = self.basis_coords(j);
                let l_j = self.left_mult_matrix(&ej);
                let r_j = self.right_mult_matrix(&ej);
                let prod = self.mul_coords(&ei, &ej);
                let l_prod = self.left_mult_matrix(&prod);
                let r_prod = self.right_mult_matrix(&prod);
                // [x, e_i, e_j] = R_j R_i x - R_prod x
                // [e_i, x, e_j] = R_j L_i x - L_i R_j x
                // [e_i, e_j, x] = L_prod x - L_i L_j x
                for row in 0..n {
                    assoc_rows.push(matrix_row_diff(&r_j, &r_i, Some(&r_prod), row, n, self));
                    assoc_rows.push(matrix_row_cross(&r_j, &l_i, row, n, self));
                    assoc_rows.push(matrix_row_diff2(&l_prod, &l_i, &l_j, row, n));
                }
            }
        }
        let nucleus = linalg::solve_homogeneous_system(&self.ring, n, &assoc_rows);
        let mut center_rows = assoc_rows;
        for i in 0..n {
            let ei = self.basis_coords(i);
            let l_i = self.left_mult_matrix(&ei);
            let r_i = self.right_mult_matrix(&ei);
            for row in 0..n {
                // (x e_i - e_i x) coordinate `row`
                let r: Vec<Scalar> = (0..n)
                    .map(|col| r_i.at(row, col).sub(l_i.at(row, col)))
                    .collect();
                center_rows.push(r);
            }
        }
        let center = linalg::solve_homogeneous_system(&self.ring, n, &center_rows);
        (center, nucleus)
    }
}

fn matrix_row_diff(
    a: &ExactMatrix,
    b: &ExactMatrix,
    sub: Option<&ExactMatrix>,
    row: usize,
    n: usize,
    alg: &Algebra,
) -> Vec<Scalar> {
    // row of (a*b - sub)
    (0..n)
        .map(|col| {
            let mut acc = Scalar::zero(&alg.ring);
            for t in 0..n {
                let x = a.at(row, t);
                let y = b.at(t, col);
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.add(&x.mul(y));
                }
            }
            if let Some(s) = sub {
                acc = acc.sub(s.at(row, col));
            }
            acc
        })
        .collect()
}

fn matrix_row_cross(a: &ExactMatrix, b: &ExactMatrix, row: usize, n: usize, alg: &Algebra) -> Vec<Scalar> {
    // row of (a*b - b*a)
    (0..n)
        .map(|col| {
            let mut acc = Scalar::zero(&alg.ring);
            for t in 0..n {
                let x = a.at(row, t);
                let y = b.at(t, col);
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.add(&x.mul(y));
                }
                let u = b.at(row, t);
                let v = a.at(t, col);
                if !u.is_zero() && !v.is_zero() {
                    acc = acc.sub(&u.mul(v));
                }
            }
            acc
        })
        .collect()
}

fn matrix_row_diff2(
    lhs: &ExactMatrix,
    a: &ExactMatrix,
    b: &ExactMatrix,
    row: usize,
    n: usize,
) -> Vec<Scalar> {
    // row of (lhs - a*b)
    (0..n)
        .map(|col| {
            let mut acc = lhs.at(row, col).clone();
            for t in 0..n {
                let x = a.at(row, t);
                let y = b.at(t, col);
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.sub(&x.mul(y));
                }
            }
            acc
        })
        .collect()
}

/// An element tied to its algebra handle.
#[derive(Debug, Clone)]
pub struct Element {
    pub algebra: Arc<Algebra>,
    pub coords: Vec<Scalar>,
}

impl Element {
    pub fn new(algebra: Arc<Algebra>, coords: Vec<Scalar>) -> Result<Element, AlgebraError> {
        if coords.len() != algebra.rank() {
            return Err(AlgebraError::BadCoords);
        }
        Ok(Element { algebra, coords })
    }

    pub fn basis(algebra: &Arc<Algebra>, i: usize) -> Element {
        Element {
            algebra: algebra.clone(),
            coords: algebra.basis_coords(i),
        }
    }

    pub fn unit(algebra: &Arc<Algebra>) -> Element {
        Element {
            algebra: algebra.clone(),
            coords: algebra.unit_coords().to_vec(),
        }
    }

    fn same_algebra(&self, other: &Element) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch)
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.same_algebra(other)?;
        Ok(Element {
            algebra: self.algebra.clone(),
            coords: self.algebra.mul_coords(&self.coords, &other.coords),
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.same_algebra(other)?;
        Ok(Element {
            algebra: self.algebra.clone(),
            coords: self.algebra.add_coords(&self.coords, &other.coords),
        })
    }

    pub fn sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.same_algebra(other)?;
        Ok(Element {
            algebra: self.algebra.clone(),
            coords: self.algebra.sub_coords(&self.coords, &other.coords),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }
}

pub fn commutator(x: &Element, y: &Element) -> Result<Element, AlgebraError> {
    x.same_algebra(y)?;
    Ok(Element {
        algebra: x.algebra.clone(),
        coords: x.algebra.commutator_coords(&x.coords, &y.coords),
    })
}

pub fn associator(x: &Element, y: &Element, z: &Element) -> Result<Element, AlgebraError> {
    x.same_algebra(y)?;
    x.same_algebra(z)?;
    Ok(Element {
        algebra: x.algebra.clone(),
        coords: x.algebra.associator_coords(&x.coords, &y.coords, &z.coords),
    })
}

/// True iff `{1, e}` has rank 2 over the fraction field. Preconditions of the
/// idempotent lemmas: `e` idempotent, distinct from 0 and 1.
pub fn lin_independent_with_unit(alg: &Algebra, e: &[Scalar]) -> Result<bool, AlgebraError> {
    if !alg.is_idempotent(e) {
        return Err(AlgebraError::Precondition("element is not idempotent".into()));
    }
    if e.iter().all(Scalar::is_zero) || e == alg.unit_coords() {
        return Err(AlgebraError::Precondition("idempotent must differ from 0 and 1".into()));
    }
    let m = ExactMatrix::from_rows(
        alg.ring(),
        vec![alg.unit_coords().to_vec(), e.to_vec()],
    );
    Ok(m.rank_over_fractions() == 2)
}

/// Two-sided ideal with an explicit basis; two-sidedness is verified at
/// construction by membership tests.
#[derive(Debug, Clone)]
pub struct Ideal {
    pub algebra: Arc<Algebra>,
    pub basis: Vec<Vec<Scalar>>,
}

impl Ideal {
    pub fn new(algebra: Arc<Algebra>, basis: Vec<Vec<Scalar>>) -> Result<Ideal, AlgebraError> {
        let ring = algebra.ring().clone();
        let basis = linalg::row_space_basis(&ring, &basis);
        for b in &basis {
            for i in 0..algebra.rank() {
                let ei = algebra.basis_coords(i);
                if !linalg::in_span(&ring, &basis, &algebra.mul_coords(&ei, b))
                    || !linalg::in_span(&ring, &basis, &algebra.mul_coords(b, &ei))
                {
                    return Err(AlgebraError::NotAnIdeal);
                }
            }
        }
        Ok(Ideal { algebra, basis })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        linalg::in_span(self.algebra.ring(), &self.basis, v)
    }
}

/// Smallest two-sided ideal containing the generators: span saturation under
/// left and right multiplication by basis vectors. Dimension strictly grows
/// or a fixpoint is reached, so `rank` rounds suffice.
pub fn ideal_closure(algebra: &Arc<Algebra>, generators: &[Vec<Scalar>]) -> Ideal {
    let ring = algebra.ring().clone();
    let mut basis = linalg::row_space_basis(&ring, generators);
    for _ in 0..algebra.rank() {
        let mut candidates = basis.clone();
        for b in &basis {
            for i in 0..algebra.rank() {
                let ei = algebra.basis_coords(i);
                candidates.push(algebra.mul_coords(&ei, b));
                candidates.push(algebra.mul_coords(b, &ei));
            }
        }
        let next = linalg::row_space_basis(&ring, &candidates);
        if next.len() == basis.len() {
            basis = next;
            break;
        }
        basis = next;
    }
    Ideal { algebra: algebra.clone(), basis }
}

/// Ideal closure of the span of pairwise products of basis vectors.
pub fn ideal_product(i: &Ideal, j: &Ideal) -> Result<Ideal, AlgebraError> {
    if !Arc::ptr_eq(&i.algebra, &j.algebra) {
        return Err(AlgebraError::AlgebraMismatch);
    }
    let alg = &i.algebra;
    let mut products = Vec::new();
    for b in &i.basis {
        for b2 in &j.basis {
            products.push(alg.mul_coords(b, b2));
        }
    }
    Ok(ideal_closure(alg, &products))
}

/// Block-diagonal sum of two algebras over the same ring.
pub fn direct_sum(a1: &Algebra, a2: &Algebra) -> Result<Algebra, AlgebraError> {
    if a1.ring() != a2.ring() {
        return Err(AlgebraError::RingMismatch);
    }
    let ring = a1.ring().clone();
    let n1 = a1.rank();
    let n = n1 + a2.rank();
    let mut unit = a1.unit_coords().to_vec();
    unit.extend_from_slice(a2.unit_coords());
    let mut triples = Vec::new();
    for i in 0..n1 {
        for j in 0..n1 {
            for (k, c) in a1.structure_entry(i, j) {
                triples.push((i, j, *k, c.clone()));
            }
        }
    }
    for i in 0..a2.rank() {
        for j in 0..a2.rank() {
            for (k, c) in a2.structure_entry(i, j) {
                triples.push((n1 + i, n1 + j, n1 + k, c.clone()));
            }
        }
    }
    let labels = match (a1.labels(), a2.labels()) {
        (Some(l1), Some(l2)) => {
            let mut l: Vec<String> = l1.iter().map(|s| format!("a.{s}")).collect();
            l.extend(l2.iter().map(|s| format!("b.{s}")));
            Some(l)
        }
        _ => None,
    };
    Algebra::new(ring, n, unit, triples, labels)
}

/// Splits the algebra along a central idempotent `e` into the ideals `eA`
/// and `(1-e)A`.
pub fn split_by_idempotent(
    algebra: &Arc<Algebra>,
    e: &[Scalar],
) -> Result<(Ideal, Ideal), AlgebraError> {
    if !algebra.is_idempotent(e) {
        return Err(AlgebraError::NotCentralIdempotent("e^2 != e".into()));
    }
    if e.iter().all(Scalar::is_zero) {
        return Err(AlgebraError::NotCentralIdempotent("e = 0".into()));
    }
    if e == algebra.unit_coords() {
        return Err(AlgebraError::NotCentralIdempotent("e = 1".into()));
    }
    if let Err(reason) = algebra.is_central(e) {
        return Err(AlgebraError::NotCentralIdempotent(reason));
    }
    let comp = algebra.sub_coords(algebra.unit_coords(), e);
    let span_of = |idem: &[Scalar]| -> Vec<Vec<Scalar>> {
        (0..algebra.rank())
            .map(|i| algebra.mul_coords(idem, &algebra.basis_coords(i)))
            .collect()
    };
    let left = Ideal::new(algebra.clone(), span_of(e))?;
    let right = Ideal::new(algebra.clone(), span_of(&comp))?;
    // eA and (1-e)A must recover A as a module direct sum
    let mut all = left.basis.clone();
    all.extend(right.basis.clone());
    let total = ExactMatrix::from_rows(algebra.ring(), all).rank_over_fractions();
    if left.dimension() + right.dimension() != algebra.rank() || total != algebra.rank() {
        return Err(AlgebraError::NotCentralIdempotent(
            "eA + (1-e)A does not split the module".into(),
        ));
    }
    Ok((left, right))
}

/// Outcome of a symbolic identity check on generic elements: the list of
/// coordinate polynomials that must vanish.
pub(crate) fn generic_identity_report(
    check: &str,
    base_ring: &RingDescriptor,
    differences: &[(String, Vec<Scalar>)],
    counters: &[(&str, u64)],
) -> VerificationReport {
    for (label, diff) in differences {
        if let Some(poly) = diff.iter().find(|c| !c.is_zero()) {
            let vars = poly.as_mpoly().map(|m| m.vars).unwrap_or(0);
            let witness = witness_from_polynomial(base_ring, diff, vars, label);
            let mut rep = VerificationReport::fail(check, Method::Symbolic, witness);
            for (k, v) in counters {
                rep = rep.with_counter(k, *v);
            }
            return rep;
        }
    }
    let mut rep = VerificationReport::pass(check, Method::Symbolic);
    for (k, v) in counters {
        rep = rep.with_counter(k, *v);
    }
    rep
}

/// Finds a concrete point where some coordinate of the nonzero difference
/// vector evaluates to a nonzero scalar, and packages it as a witness.
pub(crate) fn witness_from_polynomial(
    base_ring: &RingDescriptor,
    diff: &[Scalar],
    vars: usize,
    label: &str,
) -> Witness {
    let mut stream = SampleStream::new(SAMPLE_SEED);
    for attempt in 0..512 {
        let point: Vec<Scalar> = if attempt == 0 {
            vec![Scalar::one(base_ring); vars]
        } else {
            (0..vars)
                .map(|_| Scalar::from_int(base_ring, stream.small_int()))
                .collect()
        };
        for c in diff {
            let m = c.as_mpoly().expect("generic coordinate");
            let v = m.eval(&point);
            if !v.is_zero() {
                let point_text = point
                    .iter()
                    .map(Scalar::to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                return Witness {
                    inputs: vec![format!("{label} at ({point_text})")],
                    discrepancy: v.to_string(),
                };
            }
        }
    }
    // A nonzero polynomial over our infinite base rings is nonzero at some
    // sampled point; tiny prime fields may defeat the search, so fall back to
    // quoting the polynomial.
    let poly = diff.iter().find(|c| !c.is_zero()).unwrap();
    Witness {
        inputs: vec![format!("{label}: difference polynomial {poly}")],
        discrepancy: poly.to_string(),
    }
}

/// Verifies `x^2 y = x(xy)` and `y x^2 = (yx)x` for generic `x, y`.
/// Runs symbolically when the dense coefficient-count estimate
/// `C(2n + 3, 3)` stays within the budget, otherwise falls back to a
/// deterministic sampled check with the published seed.
pub fn check_alternative(algebra: &Algebra) -> VerificationReport {
    assert!(
        Scalar::from_int(algebra.ring(), 2).try_invert().is_ok(),
        "check_alternative requires 2 to be a unit"
    );
    let n = algebra.rank();
    let limit = budget_limit();
    let estimate = binomial_big((2 * n + 3) as u64, 3);
    if estimate <= num::BigInt::from(limit) {
        let lifted = algebra.lift(2 * n);
        let x = Algebra::generic_coords(&lifted, 0);
        let y = Algebra::generic_coords(&lifted, n);
        let xx = lifted.mul_coords(&x, &x);
        let left = lifted.sub_coords(
            &lifted.mul_coords(&xx, &y),
            &lifted.mul_coords(&x, &lifted.mul_coords(&x, &y)),
        );
        let right = lifted.sub_coords(
            &lifted.mul_coords(&y, &xx),
            &lifted.mul_coords(&lifted.mul_coords(&y, &x), &x),
        );
        generic_identity_report(
            "alternative",
            algebra.ring(),
            &[
                ("x^2*y - x*(x*y)".to_string(), left),
                ("y*x^2 - (y*x)*x".to_string(), right),
            ],
            &[("generic_vars", 2 * n as u64)],
        )
    } else {
        let mut stream = SampleStream::new(SAMPLE_SEED);
        for sample in 0..SAMPLE_POINTS {
            let x: Vec<Scalar> = (0..n)
                .map(|_| Scalar::from_int(algebra.ring(), stream.small_int()))
                .collect();
            let y: Vec<Scalar> = (0..n)
                .map(|_| Scalar::from_int(algebra.ring(), stream.small_int()))
                .collect();
            let xx = algebra.mul_coords(&x, &x);
            let left = algebra.sub_coords(
                &algebra.mul_coords(&xx, &y),
                &algebra.mul_coords(&x, &algebra.mul_coords(&x, &y)),
            );
            let right = algebra.sub_coords(
                &algebra.mul_coords(&y, &xx),
                &algebra.mul_coords(&algebra.mul_coords(&y, &x), &x),
            );
            for (label, diff) in [("x^2*y - x*(x*y)", left), ("y*x^2 - (y*x)*x", right)] {
                if let Some(idx) = diff.iter().position(|c| !c.is_zero()) {
                    let fmt = |v: &[Scalar]| {
                        v.iter().map(Scalar::to_string).collect::<Vec<_>>().join(",")
                    };
                    return VerificationReport::fail(
                        "alternative",
                        Method::Sampled,
                        Witness {
                            inputs: vec![
                                format!("x=({})", fmt(&x)),
                                format!("y=({})", fmt(&y)),
                                format!("{label} coordinate {idx}"),
                            ],
                            discrepancy: diff[idx].to_string(),
                        },
                    )
                    .with_counter("samples", sample as u64 + 1);
                }
            }
        }
        VerificationReport::pass("alternative", Method::Sampled)
            .with_counter("samples", SAMPLE_POINTS as u64)
    }
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.rank == other.rank
            && self.unit == other.unit
            && self.table == other.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RingDescriptor {
        RingDescriptor::Rationals
    }

    fn qi(v: i64) -> Scalar {
        Scalar::from_int(&q(), v)
    }

    /// Split étale Q^r: e_i e_j = delta_ij e_i.
    fn etale(r: usize) -> Algebra {
        let unit = vec![Scalar::one(&q()); r];
        Algebra::from_products(q(), r, unit, None, |i, j| {
            if i == j {
                vec![(i, Scalar::one(&q()))]
            } else {
                vec![]
            }
        })
        .unwrap()
    }

    /// Q[x]/(x^3 - 2) in the basis {1, x, x^2}.
    fn cubic_root_two() -> Algebra {
        let two = qi(2);
        let unit = vec![qi(1), qi(0), qi(0)];
        Algebra::from_products(q(), 3, unit, None, |i, j| {
            let e = i + j;
            if e < 3 {
                vec![(e, qi(1))]
            } else {
                vec![(e - 3, two.clone())]
            }
        })
        .unwrap()
    }

    #[test]
    fn unit_law_is_enforced() {
        // e0 is not a two-sided unit here: e0*e1 = 0
        let bad = Algebra::new(
            q(),
            2,
            vec![qi(1), qi(0)],
            vec![(0, 0, 0, qi(1)), (1, 1, 1, qi(1))],
            None,
        );
        assert!(matches!(bad, Err(AlgebraError::UnitLaw(_))));
    }

    #[test]
    fn etale_products() {
        let a = Arc::new(etale(3));
        let e1 = Element::basis(&a, 0);
        let e2 = Element::basis(&a, 1);
        assert!(e1.mul(&e2).unwrap().is_zero());
        assert_eq!(e1.mul(&e1).unwrap().coords, e1.coords);
    }

    #[test]
    fn x_squared_in_cubic_extension() {
        let a = Arc::new(cubic_root_two());
        let x = Element::basis(&a, 1);
        assert_eq!(x.mul(&x).unwrap().coords, vec![qi(0), qi(0), qi(1)]);
        let x2 = Element::basis(&a, 2);
        assert_eq!(x.mul(&x2).unwrap().coords, vec![qi(2), qi(0), qi(0)]);
    }

    #[test]
    fn algebra_mismatch_is_an_error() {
        let a = Arc::new(etale(2));
        let b = Arc::new(etale(2));
        let x = Element::unit(&a);
        let y = Element::unit(&b);
        assert!(matches!(x.mul(&y), Err(AlgebraError::AlgebraMismatch)));
    }

    #[test]
    fn commutative_associative_examples() {
        let a = Arc::new(etale(3));
        let x = Element::basis(&a, 0);
        let y = Element::basis(&a, 1);
        let z = Element::basis(&a, 2);
        assert!(commutator(&x, &y).unwrap().is_zero());
        assert!(associator(&x, &y, &z).unwrap().is_zero());
    }

    #[test]
    fn center_of_etale_is_everything() {
        let a = etale(3);
        let (center, nucleus) = a.center_and_nucleus();
        assert_eq!(center.len(), 3);
        assert_eq!(nucleus.len(), 3);
    }

    #[test]
    fn split_on_central_idempotent() {
        let a = Arc::new(etale(3));
        let e = vec![qi(1), qi(0), qi(0)];
        let (left, right) = split_by_idempotent(&a, &e).unwrap();
        assert_eq!(left.dimension(), 1);
        assert_eq!(right.dimension(), 2);
        assert!(left.contains(&e));
    }

    #[test]
    fn closure_of_unit_is_everything() {
        let a = Arc::new(cubic_root_two());
        let i = ideal_closure(&a, &[a.unit_coords().to_vec()]);
        assert_eq!(i.dimension(), 3);
        let e1 = ideal_closure(&Arc::new(etale(3)), &[vec![qi(1), qi(0), qi(0)]]);
        assert_eq!(e1.dimension(), 1);
    }

    #[test]
    fn zero_ideal_product() {
        let a = Arc::new(etale(2));
        let zero = Ideal::new(a.clone(), vec![]).unwrap();
        let full = ideal_closure(&a, &[a.unit_coords().to_vec()]);
        let p = ideal_product(&zero, &full).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn alternative_check_on_commutative_algebra() {
        let rep = check_alternative(&etale(3));
        assert!(rep.passed());
        assert_eq!(rep.method, Method::Symbolic);
    }

    #[test]
    fn lin_independence_with_unit() {
        let a = etale(3);
        assert!(lin_independent_with_unit(&a, &[qi(1), qi(0), qi(0)]).unwrap());
        assert!(lin_independent_with_unit(&a, &[qi(1), qi(1), qi(1)]).is_err());
    }

    #[test]
    fn direct_sum_blocks_annihilate() {
        let s = direct_sum(&etale(1), &cubic_root_two()).unwrap();
        let x = {
            let mut v = s.zero_coords();
            v[0] = qi(1);
            v
        };
        let y = {
            let mut v = s.zero_coords();
            v[2] = qi(1);
            v
        };
        assert!(s.mul_coords(&x, &y).iter().all(Scalar::is_zero));
        assert_eq!(s.mul_coords(&s.unit_coords().to_vec(), &y), y);
    }
}
