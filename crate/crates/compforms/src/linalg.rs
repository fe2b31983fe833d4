//! Exact linear algebra over the fraction field of a base ring.
//!
//! Elimination is fraction-free (Bareiss / Gauss-Jordan one-step), so all
//! intermediate values stay in the ring and ranks are ranks over the fraction
//! field. Pivots are chosen as the first nonzero entry in column order; no
//! heuristics, so echelon output is deterministic.

use crate::scalar::{RingDescriptor, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    pub ring: RingDescriptor,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zero(ring: &RingDescriptor, rows: usize, cols: usize) -> ExactMatrix {
        ExactMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![Scalar::zero(ring); rows * cols],
        }
    }

    pub fn identity(ring: &RingDescriptor, n: usize) -> ExactMatrix {
        let mut m = ExactMatrix::zero(ring, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one(ring);
        }
        m
    }

    pub fn from_rows(ring: &RingDescriptor, rows: Vec<Vec<Scalar>>) -> ExactMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        ExactMatrix { ring: ring.clone(), rows: r, cols: c, entries }
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut m = ExactMatrix::zero(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mat_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(&self.ring);
                for j in 0..self.cols {
                    let e = self.at(i, j);
                    if !e.is_zero() && !v[j].is_zero() {
                        acc = acc.add(&e.mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Rank over the fraction field of the (domain) coefficient ring.
    pub fn rank_over_fractions(&self) -> usize {
        self.clone().fraction_free_jordan().pivots.len()
    }

    /// Determinant of a square matrix, fraction-free.
    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let red = self.clone().fraction_free_jordan();
        if red.pivots.len() < self.rows {
            return Scalar::zero(&self.ring);
        }
        if red.sign_flips % 2 == 0 {
            red.last_pivot
        } else {
            red.last_pivot.neg()
        }
    }

    /// Basis of the right kernel. Entries are ring elements (denominators are
    /// cleared by the fraction-free reduction); the basis order follows the
    /// free columns left to right.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let red = self.clone().fraction_free_jordan();
        let pivot_cols: Vec<usize> = red.pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v = vec![Scalar::zero(&self.ring); self.cols];
            v[f] = red.last_pivot.clone();
            for &(r, c) in &red.pivots {
                v[c] = red.matrix.at(r, f).neg();
            }
            basis.push(normalize_vector(&self.ring, v));
        }
        basis
    }

    /// One-step fraction-free Gauss-Jordan elimination (Bareiss): divisions by
    /// the previous pivot are exact over any integral domain, and after the
    /// sweep every pivot entry equals the final pivot determinant.
    fn fraction_free_jordan(mut self) -> Reduced {
        let ring = self.ring.clone();
        let mut prev = Scalar::one(&ring);
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut sign_flips = 0usize;
        let mut next_row = 0usize;
        for col in 0..self.cols {
            // first nonzero entry in column order
            let Some(pr) = (next_row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if pr != next_row {
                for j in 0..self.cols {
                    self.entries.swap(next_row * self.cols + j, pr * self.cols + j);
                }
                sign_flips += 1;
            }
            let pivot = self.at(next_row, col).clone();
            for r in 0..self.rows {
                if r == next_row {
                    continue;
                }
                let factor = self.at(r, col).clone();
                for j in 0..self.cols {
                    let new = pivot
                        .mul(self.at(r, j))
                        .sub(&factor.mul(self.at(next_row, j)));
                    *self.at_mut(r, j) = new
                        .exact_div(&prev)
                        .expect("Bareiss division is exact over a domain");
                }
            }
            pivots.push((next_row, col));
            prev = pivot;
            next_row += 1;
            if next_row == self.rows {
                break;
            }
        }
        Reduced {
            matrix: self,
            pivots,
            last_pivot: prev,
            sign_flips,
        }
    }
}

struct Reduced {
    matrix: ExactMatrix,
    pivots: Vec<(usize, usize)>,
    last_pivot: Scalar,
    sign_flips: usize,
}

/// Over a field, rescale so the first nonzero entry is 1; over other domains
/// leave entries as produced (already denominator-free).
fn normalize_vector(ring: &RingDescriptor, v: Vec<Scalar>) -> Vec<Scalar> {
    if !ring.is_field() {
        return v;
    }
    let Some(lead) = v.iter().find(|x| !x.is_zero()) else {
        return v;
    };
    let inv = lead.try_invert().expect("nonzero field element");
    v.iter().map(|x| x.mul(&inv)).collect()
}

/// Basis of the common kernel of a list of constraint rows (all the same
/// width). An empty constraint set leaves the full space.
pub fn solve_homogeneous_system(
    ring: &RingDescriptor,
    width: usize,
    constraints: &[Vec<Scalar>],
) -> Vec<Vec<Scalar>> {
    if constraints.is_empty() {
        return (0..width)
            .map(|i| {
                let mut v = vec![Scalar::zero(ring); width];
                v[i] = Scalar::one(ring);
                v
            })
            .collect();
    }
    ExactMatrix::from_rows(ring, constraints.to_vec()).kernel_basis()
}

/// Row-space basis in deterministic echelon order with ring entries.
pub fn row_space_basis(ring: &RingDescriptor, vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let red = ExactMatrix::from_rows(ring, vectors.to_vec()).fraction_free_jordan();
    red.pivots
        .iter()
        .map(|&(r, _)| normalize_vector(ring, red.matrix.row(r).to_vec()))
        .collect()
}

/// Does `v` lie in the span of `basis`?
pub fn in_span(ring: &RingDescriptor, basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    if v.iter().all(Scalar::is_zero) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let r0 = ExactMatrix::from_rows(ring, basis.to_vec()).rank_over_fractions();
    let mut rows = basis.to_vec();
    rows.push(v.to_vec());
    let r1 = ExactMatrix::from_rows(ring, rows).rank_over_fractions();
    r0 == r1
}

/// Do two lists of vectors span the same subspace?
pub fn same_span(ring: &RingDescriptor, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> bool {
    let ra = if a.is_empty() {
        0
    } else {
        ExactMatrix::from_rows(ring, a.to_vec()).rank_over_fractions()
    };
    let rb = if b.is_empty() {
        0
    } else {
        ExactMatrix::from_rows(ring, b.to_vec()).rank_over_fractions()
    };
    if ra != rb {
        return false;
    }
    if ra == 0 {
        return true;
    }
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    ExactMatrix::from_rows(ring, all).rank_over_fractions() == ra
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RingDescriptor;

    fn q() -> RingDescriptor {
        RingDescriptor::Rationals
    }

    fn qi(v: i64) -> Scalar {
        Scalar::from_int(&q(), v)
    }

    #[test]
    fn identity_rank() {
        assert_eq!(ExactMatrix::identity(&q(), 2).rank_over_fractions(), 2);
    }

    #[test]
    fn polynomial_rank_drop() {
        // [[t, t^2], [1, t]] has rank 1 over Frac(Q[t])
        let r = RingDescriptor::poly(q(), "t").unwrap();
        let t = Scalar::variable(&r);
        let m = ExactMatrix::from_rows(
            &r,
            vec![
                vec![t.clone(), t.mul(&t)],
                vec![Scalar::one(&r), t.clone()],
            ],
        );
        assert_eq!(m.rank_over_fractions(), 1);
    }

    #[test]
    fn kernel_shapes() {
        let z = ExactMatrix::zero(&q(), 2, 3);
        assert_eq!(z.kernel_basis().len(), 3);
        let id = ExactMatrix::identity(&q(), 2);
        assert!(id.kernel_basis().is_empty());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = ExactMatrix::from_rows(
            &q(),
            vec![
                vec![qi(1), qi(2), qi(3), qi(4)],
                vec![qi(2), qi(4), qi(6), qi(8)],
                vec![qi(0), qi(1), qi(1), qi(0)],
            ],
        );
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mat_vec(v).iter().all(Scalar::is_zero));
        }
        assert_eq!(m.rank_over_fractions() + ker.len(), m.cols);
    }

    #[test]
    fn solve_constraints() {
        // x1 - x2 = 0 in two variables
        let basis = solve_homogeneous_system(&q(), 2, &[vec![qi(1), qi(-1)]]);
        assert_eq!(basis, vec![vec![qi(1), qi(1)]]);
        assert_eq!(solve_homogeneous_system(&q(), 3, &[]).len(), 3);
    }

    #[test]
    fn determinant_values() {
        let m = ExactMatrix::from_rows(
            &q(),
            vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]],
        );
        assert_eq!(m.determinant(), qi(-1));
        let m2 = ExactMatrix::from_rows(
            &q(),
            vec![
                vec![qi(2), qi(0), qi(0)],
                vec![qi(0), qi(3), qi(0)],
                vec![qi(0), qi(0), qi(4)],
            ],
        );
        assert_eq!(m2.determinant(), qi(24));
    }

    #[test]
    fn bareiss_stays_integral() {
        // On integer input all intermediates divide exactly; spot-check by
        // running over Q and asserting integral pivots for an integer matrix.
        let m = ExactMatrix::from_rows(
            &q(),
            vec![
                vec![qi(3), qi(1), qi(4)],
                vec![qi(1), qi(5), qi(9)],
                vec![qi(2), qi(6), qi(5)],
            ],
        );
        assert_eq!(m.determinant(), qi(-90));
    }

    #[test]
    fn span_utilities() {
        let b = vec![vec![qi(1), qi(0), qi(1)], vec![qi(0), qi(1), qi(0)]];
        assert!(in_span(&q(), &b, &[qi(2), qi(3), qi(2)]));
        assert!(!in_span(&q(), &b, &[qi(0), qi(0), qi(1)]));
        let b2 = vec![vec![qi(1), qi(1), qi(1)], vec![qi(1), qi(-1), qi(1)]];
        assert!(same_span(&q(), &b, &b2));
    }
}
