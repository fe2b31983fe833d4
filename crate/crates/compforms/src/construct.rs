//! Builders for the named algebra/form pairs: base ring powers, split étale
//! algebras, quadratic étale extensions, the rank-3 cubic Tits construction,
//! Cayley-Dickson doubling, Zorn vector matrices, matrix algebras with
//! determinant norms, product and power forms, and the global-section
//! algebras over projective space.
//!
//! Sign conventions for Zorn and Cayley-Dickson are self-validating: the Zorn
//! builder verifies norm multiplicativity symbolically and refuses to hand
//! out an algebra that fails it.

use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{direct_sum, Algebra, AlgebraError};
use crate::engine;
use crate::form::{polarize, DegreeForm, FormError};
use crate::mpoly::{MPoly, Mono};
use crate::scalar::{factorial_unit, RingDescriptor, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("{0} must be a unit")]
    NotAUnit(String),
    #[error("{0}! is not a unit in {1}")]
    FactorialNotUnit(u32, String),
    #[error("Cayley-Dickson doubling requires a degree-2 input")]
    NotDegreeTwo,
    #[error("parameters outside the supported cases: {0}")]
    UnsupportedParameters(String),
    #[error("construction self-check failed: {0}")]
    SelfCheck(String),
}

/// How a formed algebra was built; carries enough structure to recover block
/// decompositions and the expected radical slots of the section algebras.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Base { d: u32 },
    SplitEtale { mults: Vec<u32> },
    QuadraticEtale { c: Scalar },
    CubicTits { mu: Scalar },
    CayleyDickson { mu: Scalar, inner: Box<Provenance> },
    Zorn,
    MatrixDet { r: usize },
    Product {
        left: Box<Provenance>,
        right: Box<Provenance>,
        left_rank: usize,
        left_degree: usize,
    },
    Power { k: u32, base: Box<Provenance> },
    SectionEnd { n: u32, a: u32, b: u32 },
    SectionZorn { n: u32, l: u32, m: u32 },
    /// A factor produced by Theorem-4 factorization.
    Factor { parent: Box<Provenance>, index: usize },
    /// Loaded from an algebra definition file; the tag is kept verbatim.
    External { tag: String },
}

impl Provenance {
    pub fn tag(&self) -> String {
        match self {
            Provenance::Base { d } => format!("base_algebra(d={d})"),
            Provenance::SplitEtale { mults } => {
                format!("split_etale(mults={mults:?})")
            }
            Provenance::QuadraticEtale { c } => format!("quadratic_etale(c={c})"),
            Provenance::CubicTits { mu } => format!("cubic_tits(mu={mu})"),
            Provenance::CayleyDickson { mu, inner } => {
                format!("cayley_dickson({}, mu={mu})", inner.tag())
            }
            Provenance::Zorn => "zorn".to_string(),
            Provenance::MatrixDet { r } => format!("matrix_algebra_det(r={r})"),
            Provenance::Product { left, right, .. } => {
                format!("product({}, {})", left.tag(), right.tag())
            }
            Provenance::Power { k, base } => format!("power({}, k={k})", base.tag()),
            Provenance::SectionEnd { n, a, b } => {
                format!("section_end(n={n}, a={a}, b={b})")
            }
            Provenance::SectionZorn { n, l, m } => {
                format!("section_zorn(n={n}, l={l}, m={m})")
            }
            Provenance::Factor { parent, index } => {
                format!("factor({}, {index})", parent.tag())
            }
            Provenance::External { tag } => tag.clone(),
        }
    }

    /// (rank, degree) of the direct-sum blocks, flattened left to right.
    fn blocks_into(&self, total_rank: usize, total_degree: usize, out: &mut Vec<(usize, usize)>) {
        match self {
            Provenance::Product { left, right, left_rank, left_degree } => {
                left.blocks_into(*left_rank, *left_degree, out);
                right.blocks_into(total_rank - left_rank, total_degree - left_degree, out);
            }
            Provenance::SplitEtale { mults } => {
                for m in mults {
                    out.push((1, *m as usize));
                }
            }
            _ => out.push((total_rank, total_degree)),
        }
    }
}

/// An algebra equipped with a (possibly degenerate) form of degree `d`
/// attached to its coordinate space. `expect_nondegenerate` records whether
/// the verification suites should assert a zero radical.
#[derive(Debug, Clone)]
pub struct FormedAlgebra {
    pub algebra: Arc<Algebra>,
    pub form: DegreeForm,
    pub degree: usize,
    pub provenance: Provenance,
    pub expect_nondegenerate: bool,
}

impl FormedAlgebra {
    pub fn new(
        algebra: Algebra,
        form: DegreeForm,
        provenance: Provenance,
        expect_nondegenerate: bool,
    ) -> Result<FormedAlgebra, BuildError> {
        let degree = form.degree;
        let ring = algebra.ring().clone();
        if factorial_unit(degree as u32, &ring).is_err() {
            return Err(BuildError::FactorialNotUnit(degree as u32, ring.to_string()));
        }
        assert_eq!(form.rank, algebra.rank(), "form arity must match the rank");
        assert!(form.ring == ring, "form and algebra must share a ring");
        if !form.eval(algebra.unit_coords()).is_one() {
            return Err(BuildError::Form(FormError::UnitValue));
        }
        Ok(FormedAlgebra {
            algebra: Arc::new(algebra),
            form,
            degree,
            provenance,
            expect_nondegenerate,
        })
    }

    pub fn ring(&self) -> &RingDescriptor {
        self.algebra.ring()
    }

    pub fn rank(&self) -> usize {
        self.algebra.rank()
    }

    /// Unit idempotents of the direct-sum blocks recorded in the provenance
    /// (in basis order), or None for indecomposable constructions.
    pub fn block_idempotents(&self) -> Option<Vec<Vec<Scalar>>> {
        let mut blocks = Vec::new();
        self.provenance
            .blocks_into(self.rank(), self.degree, &mut blocks);
        if blocks.len() < 2 {
            return None;
        }
        let unit = self.algebra.unit_coords();
        let zero = Scalar::zero(self.ring());
        let mut out = Vec::new();
        let mut start = 0;
        for (r, _) in &blocks {
            let mut e = vec![zero.clone(); self.rank()];
            e[start..start + r].clone_from_slice(&unit[start..start + r]);
            out.push(e);
            start += r;
        }
        Some(out)
    }

    /// Expected degrees of the block forms, matching `block_idempotents`.
    pub fn block_degrees(&self) -> Option<Vec<usize>> {
        let mut blocks = Vec::new();
        self.provenance
            .blocks_into(self.rank(), self.degree, &mut blocks);
        if blocks.len() < 2 {
            None
        } else {
            Some(blocks.into_iter().map(|(_, d)| d).collect())
        }
    }

    /// Basis indices that the source construction predicts to span the
    /// radical (section algebras only).
    pub fn expected_radical_indices(&self) -> Option<Vec<usize>> {
        match &self.provenance {
            Provenance::SectionEnd { n, a, b } => {
                let layout = section_end_layout(*n, *a, *b);
                Some(
                    layout
                        .slots
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.strictly_positive_twist)
                        .map(|(i, _)| i)
                        .collect(),
                )
            }
            Provenance::SectionZorn { n, l, m } => {
                let layout = section_zorn_layout(*n, *l, *m);
                Some((3..layout.rank).collect())
            }
            _ => None,
        }
    }

    /// Specializes a Poly/Laurent-based construction at a point of the base
    /// ring (the map `t -> point`).
    pub fn specialize_at(&self, point: &Scalar) -> Result<FormedAlgebra, BuildError> {
        let ring = self.ring();
        let (base, var) = match ring {
            RingDescriptor::Poly(b, v) | RingDescriptor::Laurent(b, v) => {
                ((**b).clone(), v.to_string())
            }
            _ => {
                return Err(BuildError::UnsupportedParameters(
                    "specialization needs a Poly or Laurent base ring".into(),
                ))
            }
        };
        if point.ring != base {
            return Err(BuildError::Scalar(ScalarError::RingMismatch(
                point.ring.to_string(),
                base.to_string(),
            )));
        }
        let mut assign = std::collections::BTreeMap::new();
        assign.insert(var, point.clone());
        let spec = |s: &Scalar| s.specialize(&assign);
        let n = self.rank();
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in self.algebra.structure_entry(i, j) {
                    triples.push((i, j, *k, spec(c)?));
                }
            }
        }
        let unit = self
            .algebra
            .unit_coords()
            .iter()
            .map(&spec)
            .collect::<Result<Vec<_>, _>>()?;
        let algebra = Algebra::new(
            base.clone(),
            n,
            unit,
            triples,
            self.algebra.labels().map(<[String]>::to_vec),
        )?;
        let mut poly = MPoly::zero(n);
        for (mono, c) in self.form.poly.terms() {
            poly.add_term(mono.clone(), spec(c)?);
        }
        let form = DegreeForm::new(base, n, self.degree, poly)?;
        FormedAlgebra::new(algebra, form, self.provenance.clone(), self.expect_nondegenerate)
    }
}

fn require_factorial(d: u32, ring: &RingDescriptor) -> Result<(), BuildError> {
    factorial_unit(d, ring)
        .map(|_| ())
        .map_err(|_| BuildError::FactorialNotUnit(d, ring.to_string()))
}

fn require_unit(s: &Scalar, what: &str) -> Result<(), BuildError> {
    s.try_invert()
        .map(|_| ())
        .map_err(|_| BuildError::NotAUnit(what.to_string()))
}

/// Rank 1, `N(x) = x^d`.
pub fn base_algebra(ring: &RingDescriptor, d: u32) -> Result<FormedAlgebra, BuildError> {
    require_factorial(d, ring)?;
    let one = Scalar::one(ring);
    let algebra = Algebra::new(
        ring.clone(),
        1,
        vec![one.clone()],
        vec![(0, 0, 0, one.clone())],
        Some(vec!["1".into()]),
    )?;
    let poly = MPoly::from_terms(1, vec![(Mono::from_exponents(vec![d as u16]), one)]);
    let form = DegreeForm::new(ring.clone(), 1, d as usize, poly)?;
    FormedAlgebra::new(algebra, form, Provenance::Base { d }, true)
}

/// `ring^r` with componentwise product and `N(x) = prod x_i^{m_i}`.
pub fn split_etale(
    ring: &RingDescriptor,
    mults: &[u32],
) -> Result<FormedAlgebra, BuildError> {
    let r = mults.len();
    assert!(r >= 1);
    let d: u32 = mults.iter().sum();
    require_factorial(d, ring)?;
    let one = Scalar::one(ring);
    let unit = vec![one.clone(); r];
    let labels = (0..r).map(|i| format!("e{}", i + 1)).collect();
    let algebra = Algebra::from_products(ring.clone(), r, unit, Some(labels), |i, j| {
        if i == j {
            vec![(i, one.clone())]
        } else {
            vec![]
        }
    })?;
    let mono = Mono::from_exponents(mults.iter().map(|m| *m as u16).collect());
    let poly = MPoly::from_terms(r, vec![(mono, one)]);
    let form = DegreeForm::new(ring.clone(), r, d as usize, poly)?;
    FormedAlgebra::new(
        algebra,
        form,
        Provenance::SplitEtale { mults: mults.to_vec() },
        true,
    )
}

/// Basis `{1, w}` with `w^2 = c`; norm `n(a + bw) = a^2 - c b^2`.
pub fn quadratic_etale(ring: &RingDescriptor, c: &Scalar) -> Result<FormedAlgebra, BuildError> {
    require_factorial(2, ring)?;
    require_unit(c, "c")?;
    assert!(c.ring == *ring);
    let one = Scalar::one(ring);
    let algebra = Algebra::new(
        ring.clone(),
        2,
        vec![one.clone(), Scalar::zero(ring)],
        vec![
            (0, 0, 0, one.clone()),
            (0, 1, 1, one.clone()),
            (1, 0, 1, one.clone()),
            (1, 1, 0, c.clone()),
        ],
        Some(vec!["1".into(), "w".into()]),
    )?;
    let poly = MPoly::from_terms(
        2,
        vec![
            (Mono::from_exponents(vec![2, 0]), one),
            (Mono::from_exponents(vec![0, 2]), c.neg()),
        ],
    );
    let form = DegreeForm::new(ring.clone(), 2, 2, poly)?;
    FormedAlgebra::new(
        algebra,
        form,
        Provenance::QuadraticEtale { c: c.clone() },
        true,
    )
}

/// The rank-3 commutative associative algebra `ring[x]/(x^3 - mu)` with its
/// cubic norm, in the monomial basis `{1, x, x^2}`. The monomial-basis norm
/// `a^3 + mu v^3 + mu^2 w^3 - 3 mu a v w` is verified against the general
/// Tits expression `a^3 + N_L(w) + dual + (-3) a <w, dual>` under the
/// identification `w_dual = mu * w`.
pub fn cubic_tits(ring: &RingDescriptor, mu: &Scalar) -> Result<FormedAlgebra, BuildError> {
    require_factorial(3, ring)?;
    require_unit(mu, "mu")?;
    assert!(mu.ring == *ring);
    let one = Scalar::one(ring);
    let algebra = Algebra::from_products(
        ring.clone(),
        3,
        vec![one.clone(), Scalar::zero(ring), Scalar::zero(ring)],
        Some(vec!["1".into(), "x".into(), "x2".into()]),
        |i, j| {
            let e = i + j;
            if e < 3 {
                vec![(e, one.clone())]
            } else {
                vec![(e - 3, mu.clone())]
            }
        },
    )?;
    let mono_norm = MPoly::from_terms(
        3,
        vec![
            (Mono::from_exponents(vec![3, 0, 0]), one.clone()),
            (Mono::from_exponents(vec![0, 3, 0]), mu.clone()),
            (Mono::from_exponents(vec![0, 0, 3]), mu.mul(mu)),
            (
                Mono::from_exponents(vec![1, 1, 1]),
                mu.mul(&Scalar::from_int(ring, -3)),
            ),
        ],
    );
    // Tits coordinates (a, w, w_dual): a^3 + mu w^3 + mu^-1 w_dual^3 - 3 a w w_dual
    let mu_inv = mu.try_invert().expect("checked unit");
    let tits = MPoly::from_terms(
        3,
        vec![
            (Mono::from_exponents(vec![3, 0, 0]), one.clone()),
            (Mono::from_exponents(vec![0, 3, 0]), mu.clone()),
            (Mono::from_exponents(vec![0, 0, 3]), mu_inv),
            (Mono::from_exponents(vec![1, 1, 1]), Scalar::from_int(ring, -3)),
        ],
    );
    // substitute w_dual = mu * w (third coordinate) into the Tits expression
    let args = vec![
        MPoly::var(3, 0, one.clone()),
        MPoly::var(3, 1, one.clone()),
        MPoly::var(3, 2, mu.clone()),
    ];
    let tits_in_monomial = tits
        .subst(&args, 3, &mut crate::mpoly::Budget::unlimited())
        .expect("unlimited budget");
    if tits_in_monomial != mono_norm {
        return Err(BuildError::SelfCheck(
            "Tits expression does not match the monomial-basis norm".into(),
        ));
    }
    let form = DegreeForm::new(ring.clone(), 3, 3, mono_norm)?;
    FormedAlgebra::new(
        algebra,
        form,
        Provenance::CubicTits { mu: mu.clone() },
        true,
    )
}

/// Classical Cayley-Dickson doubling of a degree-2 formed algebra:
/// `(x1, x2)(y1, y2) = (x1 y1 + mu conj(y2) x2, y2 x1 + x2 conj(y1))` with
/// norm `n(x1) - mu n(x2)`. The input's composition property is verified.
pub fn cayley_dickson(d_alg: &FormedAlgebra, mu: &Scalar) -> Result<FormedAlgebra, BuildError> {
    if d_alg.degree != 2 {
        return Err(BuildError::NotDegreeTwo);
    }
    let ring = d_alg.ring().clone();
    require_unit(mu, "mu")?;
    assert!(mu.ring == ring);
    let comp = engine::check_composition(d_alg);
    if !comp.passed() {
        return Err(BuildError::SelfCheck(
            "Cayley-Dickson input does not permit composition".into(),
        ));
    }
    let m = d_alg.rank();
    let inner = &d_alg.algebra;
    // conjugation from the degree-2 trace: conj(x) = T(x) 1 - x
    let theta = polarize(&d_alg.form)?;
    let unit = inner.unit_coords().to_vec();
    let conj: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            let e = inner.basis_coords(i);
            let t = theta
                .theta_eval(&[&e, &unit])
                .mul(&Scalar::from_int(&ring, 2));
            inner.sub_coords(&inner.scale_coords(&t, &unit), &e)
        })
        .collect();
    let mut triples: Vec<(usize, usize, usize, Scalar)> = Vec::new();
    let push_block =
        |triples: &mut Vec<(usize, usize, usize, Scalar)>,
         i: usize,
         j: usize,
         dst: usize,
         coords: &[Scalar],
         factor: Option<&Scalar>| {
            for (k, c) in coords.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let c = match factor {
                    Some(f) => c.mul(f),
                    None => c.clone(),
                };
                triples.push((i, j, dst + k, c));
            }
        };
    for i in 0..m {
        let ei = inner.basis_coords(i);
        for j in 0..m {
            let ej = inner.basis_coords(j);
            // (e_i, 0)(e_j, 0) = (e_i e_j, 0)
            push_block(&mut triples, i, j, 0, &inner.mul_coords(&ei, &ej), None);
            // (e_i, 0)(0, e_j) = (0, e_j e_i)
            push_block(&mut triples, i, m + j, m, &inner.mul_coords(&ej, &ei), None);
            // (0, e_i)(e_j, 0) = (0, e_i conj(e_j))
            push_block(&mut triples, m + i, j, m, &inner.mul_coords(&ei, &conj[j]), None);
            // (0, e_i)(0, e_j) = (mu conj(e_j) e_i, 0)
            push_block(
                &mut triples,
                m + i,
                m + j,
                0,
                &inner.mul_coords(&conj[j], &ei),
                Some(mu),
            );
        }
    }
    let mut unit2 = unit.clone();
    unit2.extend(vec![Scalar::zero(&ring); m]);
    let labels = inner.labels().map(|l| {
        let mut out: Vec<String> = l.to_vec();
        out.extend(l.iter().map(|s| format!("j.{s}")));
        out
    });
    let algebra = Algebra::new(ring.clone(), 2 * m, unit2, triples, labels)?;
    let n1 = d_alg.form.poly.shift_vars(2 * m, 0);
    let n2 = d_alg.form.poly.shift_vars(2 * m, m).scale(&mu.neg());
    let form = DegreeForm::new(ring.clone(), 2 * m, 2, n1.add(&n2))?;
    FormedAlgebra::new(
        algebra,
        form,
        Provenance::CayleyDickson {
            mu: mu.clone(),
            inner: Box::new(d_alg.provenance.clone()),
        },
        true,
    )
}

/// Index layout of the Zorn vector-matrix basis: scalar slots 0, 1 and vector
/// slots u1,u2,u3 = 2..5, v1,v2,v3 = 5..8.
const ZORN_LABELS: [&str; 8] = ["e11", "e22", "u1", "u2", "u3", "v1", "v2", "v3"];

fn zorn_triples(ring: &RingDescriptor) -> Vec<(usize, usize, usize, Scalar)> {
    let one = Scalar::one(ring);
    let neg = Scalar::from_int(ring, -1);
    let mut t = Vec::new();
    // scalar idempotents
    t.push((0, 0, 0, one.clone()));
    t.push((1, 1, 1, one.clone()));
    for i in 0..3 {
        let (u, v) = (2 + i, 5 + i);
        // e11 u_i = u_i, u_i e22 = u_i ; e22 v_i = v_i, v_i e11 = v_i
        t.push((0, u, u, one.clone()));
        t.push((u, 1, u, one.clone()));
        t.push((1, v, v, one.clone()));
        t.push((v, 0, v, one.clone()));
        // u_i v_i = e11, v_i u_i = e22
        t.push((u, v, 0, one.clone()));
        t.push((v, u, 1, one.clone()));
    }
    // cross products: u_i u_j = eps_ijk v_k, v_i v_j = -eps_ijk u_k
    let eps = [(0usize, 1usize, 2usize, 1i64), (1, 2, 0, 1), (2, 0, 1, 1)];
    for (i, j, k, _) in eps {
        t.push((2 + i, 2 + j, 5 + k, one.clone()));
        t.push((2 + j, 2 + i, 5 + k, neg.clone()));
        t.push((5 + i, 5 + j, 2 + k, neg.clone()));
        t.push((5 + j, 5 + i, 2 + k, one.clone()));
    }
    t
}

/// Zorn vector matrices over `ring`: rank 8, split octonions, norm
/// `n = ab - v.w`. Norm multiplicativity is verified symbolically at build
/// time; a sign drift fails loudly.
pub fn zorn(ring: &RingDescriptor) -> Result<FormedAlgebra, BuildError> {
    require_factorial(2, ring)?;
    let one = Scalar::one(ring);
    let mut unit = vec![Scalar::zero(ring); 8];
    unit[0] = one.clone();
    unit[1] = one.clone();
    let algebra = Algebra::new(
        ring.clone(),
        8,
        unit,
        zorn_triples(ring),
        Some(ZORN_LABELS.iter().map(|s| s.to_string()).collect()),
    )?;
    let mut poly = MPoly::from_terms(
        8,
        vec![(
            {
                let mut e = vec![0u16; 8];
                e[0] = 1;
                e[1] = 1;
                Mono::from_exponents(e)
            },
            one,
        )],
    );
    for i in 0..3 {
        let mut e = vec![0u16; 8];
        e[2 + i] = 1;
        e[5 + i] = 1;
        poly.add_term(Mono::from_exponents(e), Scalar::from_int(ring, -1));
    }
    let form = DegreeForm::new(ring.clone(), 8, 2, poly)?;
    let fa = FormedAlgebra::new(algebra, form, Provenance::Zorn, true)?;
    let comp = engine::check_composition(&fa);
    if !comp.passed() {
        return Err(BuildError::SelfCheck(
            "Zorn norm is not multiplicative under the chosen signs".into(),
        ));
    }
    Ok(fa)
}

/// Full matrix algebra of rank `r^2` with the determinant as its degree-`r`
/// norm, `r` in {2, 3, 4}.
pub fn matrix_algebra_det(ring: &RingDescriptor, r: usize) -> Result<FormedAlgebra, BuildError> {
    if !(2..=4).contains(&r) {
        return Err(BuildError::UnsupportedParameters(format!(
            "matrix_algebra_det supports r in 2..=4, got {r}"
        )));
    }
    require_factorial(r as u32, ring)?;
    let one = Scalar::one(ring);
    let n = r * r;
    let idx = |i: usize, j: usize| i * r + j;
    let mut unit = vec![Scalar::zero(ring); n];
    for i in 0..r {
        unit[idx(i, i)] = one.clone();
    }
    let labels = (0..r)
        .flat_map(|i| (0..r).map(move |j| format!("E{}{}", i + 1, j + 1)))
        .collect();
    let algebra = Algebra::from_products(ring.clone(), n, unit, Some(labels), |p, q| {
        let (i, j) = (p / r, p % r);
        let (k, l) = (q / r, q % r);
        if j == k {
            vec![(idx(i, l), one.clone())]
        } else {
            vec![]
        }
    })?;
    // Leibniz determinant
    let mut poly = MPoly::zero(n);
    for perm in (0..r).permutations(r) {
        let mut inversions = 0;
        for a in 0..r {
            for b in a + 1..r {
                if perm[a] > perm[b] {
                    inversions += 1;
                }
            }
        }
        let mut e = vec![0u16; n];
        for (i, s) in perm.iter().enumerate() {
            e[idx(i, *s)] += 1;
        }
        poly.add_term(
            Mono::from_exponents(e),
            Scalar::from_int(ring, if inversions % 2 == 0 { 1 } else { -1 }),
        );
    }
    let form = DegreeForm::new(ring.clone(), n, r, poly)?;
    FormedAlgebra::new(algebra, form, Provenance::MatrixDet { r }, true)
}

/// Direct sum of the algebras with the product of the forms,
/// `N(x1 + x2) = N1(x1) N2(x2)` of degree `d1 + d2`.
pub fn product_form(f1: &FormedAlgebra, f2: &FormedAlgebra) -> Result<FormedAlgebra, BuildError> {
    if f1.ring() != f2.ring() {
        return Err(BuildError::Algebra(AlgebraError::RingMismatch));
    }
    let d = (f1.degree + f2.degree) as u32;
    require_factorial(d, f1.ring())?;
    let algebra = direct_sum(&f1.algebra, &f2.algebra)?;
    let n = algebra.rank();
    let p1 = f1.form.poly.shift_vars(n, 0);
    let p2 = f2.form.poly.shift_vars(n, f1.rank());
    let form = DegreeForm::new(f1.ring().clone(), n, d as usize, p1.mul(&p2))?;
    let expect = f1.expect_nondegenerate && f2.expect_nondegenerate;
    FormedAlgebra::new(
        algebra,
        form,
        Provenance::Product {
            left: Box::new(f1.provenance.clone()),
            right: Box::new(f2.provenance.clone()),
            left_rank: f1.rank(),
            left_degree: f1.degree,
        },
        expect,
    )
}

/// Same algebra, form raised to the `k`-th power (degree `k d`).
pub fn power_form(f: &FormedAlgebra, k: u32) -> Result<FormedAlgebra, BuildError> {
    assert!(k >= 1);
    let d = (f.degree as u32) * k;
    require_factorial(d, f.ring())?;
    let poly = f
        .form
        .poly
        .pow_budget(k, &mut crate::mpoly::Budget::unlimited())
        .expect("unlimited budget");
    let form = DegreeForm::new(f.ring().clone(), f.rank(), d as usize, poly)?;
    Ok(FormedAlgebra {
        algebra: f.algebra.clone(),
        form,
        degree: d as usize,
        provenance: Provenance::Power {
            k,
            base: Box::new(f.provenance.clone()),
        },
        expect_nondegenerate: f.expect_nondegenerate,
    })
}

/// Monomial exponent vectors of total degree `d` in `vars` variables,
/// deterministic (lexicographic, first variable highest) order.
pub fn monomials_of_degree(vars: usize, d: u32) -> Vec<Vec<u16>> {
    fn rec(vars: usize, d: u32, out: &mut Vec<Vec<u16>>, prefix: &mut Vec<u16>) {
        if vars == 1 {
            prefix.push(d as u16);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u16);
            rec(vars - 1, d - e, out, prefix);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, d, &mut out, &mut Vec::new());
    out
}

#[derive(Debug, Clone)]
pub struct SectionSlot {
    pub row: usize,
    pub col: usize,
    pub mono: Vec<u16>,
    /// True when the slot's line-bundle twist is strictly positive, i.e. the
    /// slot lies in the predicted radical.
    pub strictly_positive_twist: bool,
}

#[derive(Debug, Clone)]
pub struct SectionLayout {
    pub rank: usize,
    pub slots: Vec<SectionSlot>,
}

/// Basis layout for the endomorphism section algebra: slots `(i, j)` with
/// twist `d_ij = m_i - m_j >= 0`, each carrying the monomials of `S_{d_ij}`
/// in `n + 1` variables.
pub fn section_end_layout(n: u32, a: u32, b: u32) -> SectionLayout {
    let m = [0i64, -(a as i64), -(b as i64)];
    let mut slots = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let d = m[i] - m[j];
            if d < 0 {
                continue;
            }
            for mono in monomials_of_degree(n as usize + 1, d as u32) {
                slots.push(SectionSlot {
                    row: i,
                    col: j,
                    mono,
                    strictly_positive_twist: d > 0,
                });
            }
        }
    }
    SectionLayout { rank: slots.len(), slots }
}

/// Global sections of `End(O + O(-a) + O(-b))` over projective `n`-space as a
/// structure-constant algebra over the base field, with the restricted
/// determinant as its (possibly degenerate) cubic form.
pub fn section_end_algebra(
    ring: &RingDescriptor,
    n: u32,
    m1: i64,
    m2: i64,
    m3: i64,
) -> Result<FormedAlgebra, BuildError> {
    let a = m1 - m2;
    let b = m1 - m3;
    if a < 0 || b < 0 {
        return Err(BuildError::UnsupportedParameters(
            "need a = m1-m2 >= 0 and b = m1-m3 >= 0".into(),
        ));
    }
    let covered = (a > 0 && b > 0 && b > a) || (a == b && a > 0) || (a == 0 && b > 0);
    if !covered {
        return Err(BuildError::UnsupportedParameters(format!(
            "twists (a={a}, b={b}) outside the three covered cases"
        )));
    }
    section_end_from_twists(ring, n, a as u32, b as u32)
}

pub fn section_end_from_twists(
    ring: &RingDescriptor,
    n: u32,
    a: u32,
    b: u32,
) -> Result<FormedAlgebra, BuildError> {
    require_factorial(3, ring)?;
    let layout = section_end_layout(n, a, b);
    let rank = layout.rank;
    let index_of = |row: usize, col: usize, mono: &[u16]| -> Option<usize> {
        layout
            .slots
            .iter()
            .position(|s| s.row == row && s.col == col && s.mono == mono)
    };
    let one = Scalar::one(ring);
    let mut triples = Vec::new();
    for (p, sp) in layout.slots.iter().enumerate() {
        for (q, sq) in layout.slots.iter().enumerate() {
            if sp.col != sq.row {
                continue;
            }
            let mono: Vec<u16> = sp
                .mono
                .iter()
                .zip(&sq.mono)
                .map(|(x, y)| x + y)
                .collect();
            let k = index_of(sp.row, sq.col, &mono)
                .expect("degrees add along matrix products");
            triples.push((p, q, k, one.clone()));
        }
    }
    let mut unit = vec![Scalar::zero(ring); rank];
    let mut labels = Vec::with_capacity(rank);
    for (p, s) in layout.slots.iter().enumerate() {
        if s.row == s.col {
            unit[p] = one.clone();
        }
        let mono_label: String = s
            .mono
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(v, e)| format!("t{v}^{e}"))
            .collect::<Vec<_>>()
            .join("*");
        labels.push(if mono_label.is_empty() {
            format!("E{}{}", s.row + 1, s.col + 1)
        } else {
            format!("E{}{}:{mono_label}", s.row + 1, s.col + 1)
        });
    }
    let algebra = Algebra::new(ring.clone(), rank, unit, triples, Some(labels))?;
    // restricted determinant: only permutations through zero-twist scalar
    // slots contribute (twists along a permutation sum to zero)
    let mut poly = MPoly::zero(rank);
    let zero_mono = vec![0u16; n as usize + 1];
    for perm in (0..3usize).permutations(3) {
        let slots: Option<Vec<usize>> = (0..3)
            .map(|i| index_of(i, perm[i], &zero_mono))
            .collect();
        let Some(slots) = slots else { continue };
        let mut inversions = 0;
        for x in 0..3 {
            for y in x + 1..3 {
                if perm[x] > perm[y] {
                    inversions += 1;
                }
            }
        }
        let mut e = vec![0u16; rank];
        for s in slots {
            e[s] += 1;
        }
        poly.add_term(
            Mono::from_exponents(e),
            Scalar::from_int(ring, if inversions % 2 == 0 { 1 } else { -1 }),
        );
    }
    let form = DegreeForm::new(ring.clone(), rank, 3, poly)?;
    FormedAlgebra::new(
        algebra,
        form,
        Provenance::SectionEnd { n, a, b },
        false,
    )
}

#[derive(Debug, Clone)]
pub struct SectionZornLayout {
    pub rank: usize,
    /// (slot kind, monomial): kind 0 = R summand, 1..=2 scalar diagonal,
    /// 3 = upper S_l, 4 = upper S_m, 5 = lower S_{l+m}.
    pub slots: Vec<(u8, Vec<u16>)>,
}

pub fn section_zorn_layout(n: u32, l: u32, m: u32) -> SectionZornLayout {
    let vars = n as usize + 1;
    let zero = vec![0u16; vars];
    let mut slots = vec![(0u8, zero.clone()), (1, zero.clone()), (2, zero)];
    for mono in monomials_of_degree(vars, l) {
        slots.push((3, mono));
    }
    for mono in monomials_of_degree(vars, m) {
        slots.push((4, mono));
    }
    for mono in monomials_of_degree(vars, l + m) {
        slots.push((5, mono));
    }
    SectionZornLayout { rank: slots.len(), slots }
}

/// Global sections of `R + Zor(O(l) + O(m) + O(-l-m))` over projective
/// `n`-space: the Zorn product with graded polynomial slots (upper vector
/// entries in `S_l + S_m`, lower entry in `S_{l+m}`; all dot products vanish
/// by slot disjointness) and the degenerate cubic `N((x1, z)) = x1 * a * b`.
pub fn section_zorn_algebra(
    ring: &RingDescriptor,
    n: u32,
    l: u32,
    m: u32,
) -> Result<FormedAlgebra, BuildError> {
    if l < 1 || m < 1 {
        return Err(BuildError::UnsupportedParameters("need l, m >= 1".into()));
    }
    require_factorial(3, ring)?;
    let layout = section_zorn_layout(n, l, m);
    let rank = layout.rank;
    let one = Scalar::one(ring);
    let index_of = |kind: u8, mono: &[u16]| -> usize {
        layout
            .slots
            .iter()
            .position(|(k, mo)| *k == kind && mo == mono)
            .expect("graded slot exists")
    };
    let mut triples = Vec::new();
    triples.push((0, 0, 0, one.clone()));
    triples.push((1, 1, 1, one.clone()));
    triples.push((2, 2, 2, one.clone()));
    for (p, (kind, mono)) in layout.slots.iter().enumerate() {
        match kind {
            3 | 4 => {
                // upper slot: e11 x = x, x e22 = x; cross with the other
                // upper slot lands in the lower S_{l+m} entry
                triples.push((1, p, p, one.clone()));
                triples.push((p, 2, p, one.clone()));
            }
            5 => {
                // lower slot: e22 x = x, x e11 = x
                triples.push((2, p, p, one.clone()));
                triples.push((p, 1, p, one.clone()));
            }
            _ => {}
        }
        if *kind == 3 {
            for (q, (kind2, mono2)) in layout.slots.iter().enumerate() {
                if *kind2 != 4 {
                    continue;
                }
                let sum: Vec<u16> = mono.iter().zip(mono2).map(|(x, y)| x + y).collect();
                let k = index_of(5, &sum);
                // v x v' with v = (f,0,0), v' = (0,g,0): third component f g
                triples.push((p, q, k, one.clone()));
                triples.push((q, p, k, Scalar::from_int(ring, -1)));
            }
        }
    }
    let mut unit = vec![Scalar::zero(ring); rank];
    unit[0] = one.clone();
    unit[1] = one.clone();
    unit[2] = one.clone();
    let labels: Vec<String> = layout
        .slots
        .iter()
        .map(|(kind, mono)| {
            let head = match kind {
                0 => "r",
                1 => "e11",
                2 => "e22",
                3 => "u1",
                4 => "u2",
                _ => "w3",
            };
            let mono_label: String = mono
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(v, e)| format!("t{v}^{e}"))
                .collect::<Vec<_>>()
                .join("*");
            if mono_label.is_empty() {
                head.to_string()
            } else {
                format!("{head}:{mono_label}")
            }
        })
        .collect();
    let algebra = Algebra::new(ring.clone(), rank, unit, triples, Some(labels))?;
    let mut e = vec![0u16; rank];
    e[0] = 1;
    e[1] = 1;
    e[2] = 1;
    let poly = MPoly::from_terms(rank, vec![(Mono::from_exponents(e), one)]);
    let form = DegreeForm::new(ring.clone(), rank, 3, poly)?;
    FormedAlgebra::new(
        algebra,
        form,
        Provenance::SectionZorn { n, l, m },
        false,
    )
}
