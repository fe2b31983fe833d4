//! Forms of degree `d` and their full polarizations.
//!
//! A `DegreeForm` is a homogeneous degree-`d` polynomial in the coordinates of
//! a rank-`n` free module. Polarization recovers the symmetric `d`-linear form
//! `theta` by inclusion-exclusion over subset sums of basis vectors, with the
//! `1/d!` normalization; `theta` is stored only on sorted basis multi-indices.

use std::collections::BTreeMap;

use itertools::Itertools;
use thiserror::Error;

use crate::mpoly::MPoly;
use crate::scalar::{factorial_unit, RingDescriptor, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("d! is not a unit in the ring")]
    FactorialNotUnit,
    #[error("polynomial is not homogeneous of the stated degree")]
    NotHomogeneous,
    #[error("coordinate polynomial has the wrong variable count")]
    WrongArity,
    #[error("form does not evaluate to 1 on the unit")]
    UnitValue,
    #[error("polarization does not reproduce the form on the diagonal")]
    DiagonalMismatch,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A form of degree `d`: a homogeneous polynomial in `rank` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeForm {
    pub ring: RingDescriptor,
    pub rank: usize,
    pub degree: usize,
    pub poly: MPoly,
}

impl DegreeForm {
    pub fn new(
        ring: RingDescriptor,
        rank: usize,
        degree: usize,
        poly: MPoly,
    ) -> Result<DegreeForm, FormError> {
        if poly.vars != rank {
            return Err(FormError::WrongArity);
        }
        if !poly.is_zero() && poly.homogeneous_degree() != Some(degree as u32) {
            return Err(FormError::NotHomogeneous);
        }
        Ok(DegreeForm { ring, rank, degree, poly })
    }

    /// Evaluates at coordinates living in `ring` or any extension of it.
    pub fn eval(&self, coords: &[Scalar]) -> Scalar {
        assert_eq!(coords.len(), self.rank);
        let target = &coords[0].ring;
        if *target == self.ring {
            self.poly.eval(coords)
        } else {
            let lifted = self
                .poly
                .map_coeffs(|c| c.embed(target).expect("form ring embeds in argument ring"));
            lifted.eval(coords)
        }
    }

    /// The defining polynomial with coefficients embedded into `target`.
    pub fn poly_in(&self, target: &RingDescriptor) -> MPoly {
        if *target == self.ring {
            self.poly.clone()
        } else {
            self.poly
                .map_coeffs(|c| c.embed(target).expect("form ring embeds in target"))
        }
    }
}

/// The polarized symmetric `d`-linear form on sorted basis multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensor {
    pub ring: RingDescriptor,
    pub rank: usize,
    pub degree: usize,
    entries: BTreeMap<Vec<u8>, Scalar>,
}

impl SymmetricTensor {
    /// theta on a sorted multi-index; zero if absent.
    pub fn get(&self, key: &[u8]) -> Scalar {
        debug_assert!(key.windows(2).all(|w| w[0] <= w[1]));
        self.entries
            .get(key)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(&self.ring))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u8>, &Scalar)> {
        self.entries.iter()
    }

    pub fn sorted_keys(rank: usize, degree: usize) -> Vec<Vec<u8>> {
        (0..rank as u8)
            .combinations_with_replacement(degree)
            .collect()
    }

    /// Multilinear evaluation on `degree` coordinate vectors. Entries may live
    /// in `ring` or an extension; theta values are embedded as needed. The sum
    /// runs over ordered index tuples drawn from the vectors' supports, with
    /// each tuple looked up by its sorted key.
    pub fn theta_eval(&self, vectors: &[&[Scalar]]) -> Scalar {
        assert_eq!(vectors.len(), self.degree);
        let target = vectors
            .first()
            .and_then(|v| v.first())
            .map(|s| s.ring.clone())
            .unwrap_or_else(|| self.ring.clone());
        let supports: Vec<Vec<(u8, &Scalar)>> = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (i as u8, c))
                    .collect()
            })
            .collect();
        let mut acc = Scalar::zero(&target);
        if supports.iter().any(Vec::is_empty) {
            return acc;
        }
        let mut embed_cache: BTreeMap<Vec<u8>, Scalar> = BTreeMap::new();
        for tuple in supports.iter().multi_cartesian_product() {
            let mut key: Vec<u8> = tuple.iter().map(|(i, _)| *i).collect();
            key.sort_unstable();
            let Some(theta) = self.entries.get(&key) else {
                continue;
            };
            let theta_t = embed_cache
                .entry(key)
                .or_insert_with(|| theta.embed(&target).expect("theta embeds in argument ring"));
            let mut term = theta_t.clone();
            for (_, c) in &tuple {
                term = term.mul(c);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Contraction matrix of `x -> theta(x, . , ..., .)` over sorted
    /// (d-1)-multiset columns; its fraction-field rank decides nondegeneracy
    /// and its left kernel is the radical.
    pub fn contraction_matrix(&self) -> crate::linalg::ExactMatrix {
        let cols = Self::sorted_keys(self.rank, self.degree - 1);
        let mut m = crate::linalg::ExactMatrix::zero(&self.ring, self.rank, cols.len());
        for (cj, partial) in cols.iter().enumerate() {
            for i in 0..self.rank {
                let mut key = partial.clone();
                key.push(i as u8);
                key.sort_unstable();
                let v = self.get(&key);
                if !v.is_zero() {
                    *m.at_mut(i, cj) = v;
                }
            }
        }
        m
    }
}

/// Polarizes a degree form by inclusion-exclusion on subset sums of basis
/// vectors:
/// `theta(e_{i_1},..,e_{i_d}) = (1/d!) sum_{S != {}} (-1)^{d-|S|} N(sum_{l in S} e_{i_l})`.
/// Checks the diagonal identity `theta(x,..,x) = N(x)` on basis vectors and
/// the all-ones vector before returning.
pub fn polarize(form: &DegreeForm) -> Result<SymmetricTensor, FormError> {
    let d = form.degree;
    let inv_fact =
        factorial_unit(d as u32, &form.ring).map_err(|_| FormError::FactorialNotUnit)?;
    let mut entries = BTreeMap::new();
    for key in SymmetricTensor::sorted_keys(form.rank, d) {
        let mut acc = Scalar::zero(&form.ring);
        for mask in 1u32..(1 << d) {
            let mut counts = vec![0i64; form.rank];
            for (l, idx) in key.iter().enumerate() {
                if mask & (1 << l) != 0 {
                    counts[*idx as usize] += 1;
                }
            }
            let point: Vec<Scalar> = counts
                .into_iter()
                .map(|c| Scalar::from_int(&form.ring, c))
                .collect();
            let value = form.eval(&point);
            if (d - mask.count_ones() as usize) % 2 == 0 {
                acc = acc.add(&value);
            } else {
                acc = acc.sub(&value);
            }
        }
        let theta = acc.mul(&inv_fact);
        if !theta.is_zero() {
            entries.insert(key, theta);
        }
    }
    let tensor = SymmetricTensor {
        ring: form.ring.clone(),
        rank: form.rank,
        degree: d,
        entries,
    };
    // diagonal check on basis vectors and the all-ones vector
    let mut probes: Vec<Vec<Scalar>> = (0..form.rank)
        .map(|i| {
            let mut v = vec![Scalar::zero(&form.ring); form.rank];
            v[i] = Scalar::one(&form.ring);
            v
        })
        .collect();
    probes.push(vec![Scalar::one(&form.ring); form.rank]);
    for x in &probes {
        let args: Vec<&[Scalar]> = (0..d).map(|_| x.as_slice()).collect();
        if tensor.theta_eval(&args) != form.eval(x) {
            return Err(FormError::DiagonalMismatch);
        }
    }
    Ok(tensor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::Mono;

    fn q() -> RingDescriptor {
        RingDescriptor::Rationals
    }

    fn qi(v: i64) -> Scalar {
        Scalar::from_int(&q(), v)
    }

    fn cube_form() -> DegreeForm {
        // N(x) = x^3 on rank 1
        let poly = MPoly::from_terms(1, vec![(Mono::from_exponents(vec![3]), qi(1))]);
        DegreeForm::new(q(), 1, 3, poly).unwrap()
    }

    fn product_form3() -> DegreeForm {
        // N = x1 x2 x3 on rank 3
        let poly = MPoly::from_terms(3, vec![(Mono::from_exponents(vec![1, 1, 1]), qi(1))]);
        DegreeForm::new(q(), 3, 3, poly).unwrap()
    }

    #[test]
    fn homogeneity_is_checked() {
        let bad = MPoly::from_terms(
            2,
            vec![
                (Mono::from_exponents(vec![3, 0]), qi(1)),
                (Mono::from_exponents(vec![1, 0]), qi(1)),
            ],
        );
        assert_eq!(DegreeForm::new(q(), 2, 3, bad).err(), Some(FormError::NotHomogeneous));
    }

    #[test]
    fn polarize_cube() {
        let theta = polarize(&cube_form()).unwrap();
        assert_eq!(theta.get(&[0, 0, 0]), qi(1));
    }

    #[test]
    fn polarize_triple_product() {
        let theta = polarize(&product_form3()).unwrap();
        assert_eq!(theta.get(&[0, 1, 2]), Scalar::from_rational(1, 6));
        assert_eq!(theta.get(&[0, 0, 1]), qi(0));
    }

    #[test]
    fn theta_eval_recovers_form() {
        let form = product_form3();
        let theta = polarize(&form).unwrap();
        let x = vec![qi(2), qi(-3), qi(5)];
        let args: Vec<&[Scalar]> = vec![&x, &x, &x];
        assert_eq!(theta.theta_eval(&args), form.eval(&x));
    }

    #[test]
    fn theta_is_multilinear() {
        let theta = polarize(&product_form3()).unwrap();
        let x = vec![qi(1), qi(2), qi(0)];
        let y = vec![qi(0), qi(1), qi(4)];
        let z = vec![qi(3), qi(0), qi(1)];
        let w = vec![qi(2), qi(2), qi(2)];
        let (a, b) = (qi(3), qi(-2));
        let combo: Vec<Scalar> = x
            .iter()
            .zip(&y)
            .map(|(u, v)| u.mul(&a).add(&v.mul(&b)))
            .collect();
        let lhs = theta.theta_eval(&[&combo, &z, &w]);
        let rhs = a
            .mul(&theta.theta_eval(&[&x, &z, &w]))
            .add(&b.mul(&theta.theta_eval(&[&y, &z, &w])));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn brute_force_inclusion_exclusion_matches_coefficient_route() {
        // independent oracle: extract theta from monomial coefficients with
        // multinomial weights and compare against the subset-sum route
        let form = product_form3();
        let theta = polarize(&form).unwrap();
        for key in SymmetricTensor::sorted_keys(3, 3) {
            let mut counts = [0u16; 3];
            for i in &key {
                counts[*i as usize] += 1;
            }
            let mono = Mono::from_exponents(counts.to_vec());
            let coeff = form
                .poly
                .terms()
                .find(|(m, _)| **m == mono)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| qi(0));
            // theta_key = coeff * prod(counts!) / d!
            let mut mult = qi(1);
            for c in counts {
                for f in 1..=c as i64 {
                    mult = mult.mul(&qi(f));
                }
            }
            let expected = coeff.mul(&mult).mul(&Scalar::from_rational(1, 6));
            assert_eq!(theta.get(&key), expected, "key {key:?}");
        }
    }
}
