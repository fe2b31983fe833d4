//! Named registry of the example algebra/form pairs, their expected
//! properties, and the suite runner behind `verify` and `report`.
//!
//! Expected ranks, radical dimension chains, nilpotency indices, and
//! decomposition degrees are computed from the closed-form expressions the
//! examples are supposed to satisfy, then compared against what the built
//! artifacts actually do.

use serde::Serialize;

use crate::construct::{self, BuildError, FormedAlgebra};
use crate::engine::{self, EngineError, TraceTower};
use crate::form::{polarize, SymmetricTensor};
use crate::linalg;
use crate::report::{budget_limit, Method, Outcome, VerificationReport, Witness, SAMPLE_SEED};
use crate::scalar::{binomial_big, RingDescriptor, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RingSpec {
    Q,
    Fp(u64),
    PolyT,
    LaurentT,
}

impl RingSpec {
    pub fn descriptor(&self) -> Result<RingDescriptor, BuildError> {
        Ok(match self {
            RingSpec::Q => RingDescriptor::Rationals,
            RingSpec::Fp(p) => RingDescriptor::prime_field(*p).map_err(BuildError::Scalar)?,
            RingSpec::PolyT => {
                RingDescriptor::poly(RingDescriptor::Rationals, "t").map_err(BuildError::Scalar)?
            }
            RingSpec::LaurentT => RingDescriptor::laurent(RingDescriptor::Rationals, "t")
                .map_err(BuildError::Scalar)?,
        })
    }

    pub fn parse(text: &str) -> Option<RingSpec> {
        match text {
            "Q" => Some(RingSpec::Q),
            "poly(Q,t)" => Some(RingSpec::PolyT),
            "laurent(Q,t)" => Some(RingSpec::LaurentT),
            _ => text
                .strip_prefix('F')
                .and_then(|p| p.parse().ok())
                .map(RingSpec::Fp),
        }
    }
}

impl std::fmt::Display for RingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RingSpec::Q => write!(f, "Q"),
            RingSpec::Fp(p) => write!(f, "F{p}"),
            RingSpec::PolyT => write!(f, "poly(Q,t)"),
            RingSpec::LaurentT => write!(f, "laurent(Q,t)"),
        }
    }
}

/// A scalar parameter that may involve the distinguished variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParamScalar {
    Int(i64),
    /// `mu * t` over a Poly/Laurent ring.
    MuT(i64),
}

impl ParamScalar {
    fn resolve(&self, ring: &RingDescriptor) -> Result<Scalar, BuildError> {
        match self {
            ParamScalar::Int(v) => Ok(Scalar::from_int(ring, *v)),
            ParamScalar::MuT(mu) => match ring {
                RingDescriptor::Poly(..) | RingDescriptor::Laurent(..) => {
                    Ok(Scalar::variable(ring).mul(&Scalar::from_int(ring, *mu)))
                }
                _ => Err(BuildError::UnsupportedParameters(
                    "mu*t parameter needs a polynomial or Laurent ring".into(),
                )),
            },
        }
    }
}

impl std::fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamScalar::Int(v) => write!(f, "{v}"),
            ParamScalar::MuT(mu) => write!(f, "{mu}*t"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EntrySpec {
    Base { d: u32 },
    SplitEtale { mults: Vec<u32> },
    QuadraticEtale { c: ParamScalar },
    CubicTits { mu: ParamScalar },
    /// Iterated Cayley-Dickson doubling starting from the rank-1 base with
    /// its squared linear form.
    CayleyTower { mus: Vec<ParamScalar> },
    Zorn,
    MatrixDet { r: usize },
    Product { factors: Vec<EntrySpec> },
    Power { base: Box<EntrySpec>, k: u32 },
    SectionEnd { n: u32, a: u32, b: u32 },
    SectionZorn { n: u32, l: u32, m: u32 },
}

impl EntrySpec {
    pub fn build(&self, ring: &RingDescriptor) -> Result<FormedAlgebra, BuildError> {
        match self {
            EntrySpec::Base { d } => construct::base_algebra(ring, *d),
            EntrySpec::SplitEtale { mults } => construct::split_etale(ring, mults),
            EntrySpec::QuadraticEtale { c } => {
                construct::quadratic_etale(ring, &c.resolve(ring)?)
            }
            EntrySpec::CubicTits { mu } => construct::cubic_tits(ring, &mu.resolve(ring)?),
            EntrySpec::CayleyTower { mus } => {
                let mut cur = construct::power_form(&construct::base_algebra(ring, 1)?, 2)?;
                for mu in mus {
                    cur = construct::cayley_dickson(&cur, &mu.resolve(ring)?)?;
                }
                Ok(cur)
            }
            EntrySpec::Zorn => construct::zorn(ring),
            EntrySpec::MatrixDet { r } => construct::matrix_algebra_det(ring, *r),
            EntrySpec::Product { factors } => {
                assert!(factors.len() >= 2);
                let mut built = factors[0].build(ring)?;
                for f in &factors[1..] {
                    built = construct::product_form(&built, &f.build(ring)?)?;
                }
                Ok(built)
            }
            EntrySpec::Power { base, k } => construct::power_form(&base.build(ring)?, *k),
            EntrySpec::SectionEnd { n, a, b } => {
                construct::section_end_algebra(ring, *n, 0, -(*a as i64), -(*b as i64))
            }
            EntrySpec::SectionZorn { n, l, m } => {
                construct::section_zorn_algebra(ring, *n, *l, *m)
            }
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            EntrySpec::Base { .. } => 1,
            EntrySpec::SplitEtale { mults } => mults.len(),
            EntrySpec::QuadraticEtale { .. } => 2,
            EntrySpec::CubicTits { .. } => 3,
            EntrySpec::CayleyTower { mus } => 1 << mus.len(),
            EntrySpec::Zorn => 8,
            EntrySpec::MatrixDet { r } => r * r,
            EntrySpec::Product { factors } => factors.iter().map(EntrySpec::rank).sum(),
            EntrySpec::Power { base, .. } => base.rank(),
            EntrySpec::SectionEnd { n, a, b } => {
                let c = |x: u32| usize_binom(x + n, *n);
                if *a > 0 && b > a {
                    3 + c(*a) + c(*b) + c(b - a)
                } else if a == b {
                    // zero twist between the second and third summand adds
                    // two scalar slots below the diagonal
                    5 + 2 * c(*a)
                } else {
                    // a = 0 < b
                    5 + 2 * c(*b)
                }
            }
            EntrySpec::SectionZorn { n, l, m } => {
                let c = |x: u32| usize_binom(x + n, *n);
                3 + c(*l) + c(*m) + c(l + m)
            }
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            EntrySpec::Base { d } => *d as usize,
            EntrySpec::SplitEtale { mults } => mults.iter().sum::<u32>() as usize,
            EntrySpec::QuadraticEtale { .. } | EntrySpec::CayleyTower { .. } | EntrySpec::Zorn => 2,
            EntrySpec::CubicTits { .. } => 3,
            EntrySpec::MatrixDet { r } => *r,
            EntrySpec::Product { factors } => factors.iter().map(EntrySpec::degree).sum(),
            EntrySpec::Power { base, k } => base.degree() * *k as usize,
            EntrySpec::SectionEnd { .. } | EntrySpec::SectionZorn { .. } => 3,
        }
    }

    fn nondegenerate(&self) -> bool {
        !matches!(
            self,
            EntrySpec::SectionEnd { .. } | EntrySpec::SectionZorn { .. }
        )
    }

    /// Leaf degrees of the direct-sum decomposition, when there is one.
    fn decomposition_degrees(&self) -> Option<Vec<usize>> {
        match self {
            EntrySpec::SplitEtale { mults } if mults.len() >= 2 => {
                Some(mults.iter().map(|m| *m as usize).collect())
            }
            EntrySpec::Product { factors } => {
                let mut out = Vec::new();
                for f in factors {
                    match f.decomposition_degrees() {
                        Some(inner) => out.extend(inner),
                        None => out.push(f.degree()),
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Expected radical dimension chain (including the terminal 0) and
    /// nilpotency index.
    fn radical_chain(&self) -> (Vec<usize>, Option<usize>) {
        match self {
            EntrySpec::SectionEnd { n, a, b } => {
                let c = |x: u32| usize_binom(x + n, *n);
                if *a > 0 && *b > *a {
                    (vec![c(*a) + c(*b) + c(b - a), c(*b), 0], Some(3))
                } else {
                    // a = b > 0 or a = 0 < b: two slots, square zero
                    let dim = if a == b { 2 * c(*a) } else { 2 * c(*b) };
                    (vec![dim, 0], Some(2))
                }
            }
            EntrySpec::SectionZorn { n, l, m } => {
                let c = |x: u32| usize_binom(x + n, *n);
                (vec![c(*l) + c(*m) + c(l + m), c(l + m), 0], Some(3))
            }
            _ => (vec![0], Some(1)),
        }
    }
}

fn usize_binom(n: u32, k: u32) -> usize {
    let v = binomial_big(n as u64, k as u64);
    let digits = v.to_u64_digits().1;
    digits.first().copied().unwrap_or(0) as usize
}

/// An idempotent designated for the trace-relation checks.
#[derive(Debug, Clone, Serialize)]
pub struct IdempotentSpec {
    /// Basis indices summed with coefficient 1.
    pub basis_sum: Vec<usize>,
    pub expected_m: usize,
    pub label: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Expected {
    pub rank: usize,
    pub degree: usize,
    pub nondegenerate: bool,
    /// Radical power dimension chain, ending in 0 for nilpotent radicals.
    pub radical_dims: Vec<usize>,
    pub nilpotency_index: Option<usize>,
    pub decomposition_degrees: Option<Vec<usize>>,
    pub idempotents: Vec<IdempotentSpec>,
    /// Specialization points (integers, units in the base field).
    pub specialization_points: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegistryEntry {
    pub name: String,
    pub ring: RingSpec,
    pub spec: EntrySpec,
    /// Where in the source text this example lives.
    pub anchor: String,
}

/// An entry assembled from explicit CLI parameters rather than the shipped
/// table; expectations are still computed from the closed-form formulas.
pub fn custom_entry(name: &str, ring: RingSpec, spec: EntrySpec) -> RegistryEntry {
    RegistryEntry {
        name: name.to_string(),
        ring,
        spec,
        anchor: "custom parameters".to_string(),
    }
}

impl RegistryEntry {
    pub fn build(&self) -> Result<FormedAlgebra, BuildError> {
        self.spec.build(&self.ring.descriptor()?)
    }

    pub fn expected(&self) -> Expected {
        let (radical_dims, nilpotency_index) = self.spec.radical_chain();
        let over_field = matches!(self.ring, RingSpec::Q | RingSpec::Fp(_));
        let mut idempotents = Vec::new();
        if let EntrySpec::MatrixDet { r: 3 } = self.spec {
            idempotents.push(IdempotentSpec {
                basis_sum: vec![0],
                expected_m: 1,
                label: "E11",
            });
            idempotents.push(IdempotentSpec {
                basis_sum: vec![0, 4],
                expected_m: 2,
                label: "E11+E22",
            });
        }
        let specialization_points = match self.ring {
            RingSpec::LaurentT | RingSpec::PolyT => vec![1, 2, -1],
            _ => Vec::new(),
        };
        Expected {
            rank: self.spec.rank(),
            degree: self.spec.degree(),
            nondegenerate: self.spec.nondegenerate(),
            radical_dims,
            nilpotency_index,
            decomposition_degrees: if over_field {
                self.spec.decomposition_degrees()
            } else {
                None
            },
            idempotents,
            specialization_points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Composition,
    Linearized,
    Alternative,
    DegreeEq,
    Nondegenerate,
    Radical,
    Filtration,
    Factor,
    Idempotent,
    Specialize,
    RankAdmissible,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::Composition,
        CheckKind::Linearized,
        CheckKind::Alternative,
        CheckKind::DegreeEq,
        CheckKind::Nondegenerate,
        CheckKind::Radical,
        CheckKind::Filtration,
        CheckKind::Factor,
        CheckKind::Idempotent,
        CheckKind::Specialize,
        CheckKind::RankAdmissible,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Composition => "composition",
            CheckKind::Linearized => "linearized",
            CheckKind::Alternative => "alternative",
            CheckKind::DegreeEq => "degree-eq",
            CheckKind::Nondegenerate => "nondegenerate",
            CheckKind::Radical => "radical",
            CheckKind::Filtration => "filtration",
            CheckKind::Factor => "factor",
            CheckKind::Idempotent => "idempotent",
            CheckKind::Specialize => "specialize",
            CheckKind::RankAdmissible => "rank-admissible",
        }
    }

    pub fn parse(text: &str) -> Option<CheckKind> {
        CheckKind::ALL.iter().copied().find(|k| k.name() == text)
    }
}

/// The shipped registry: every example family from the source text, with the
/// anchor of the claim it exercises.
pub fn registry() -> Vec<RegistryEntry> {
    use EntrySpec as S;
    use RingSpec as R;
    vec![
        RegistryEntry {
            name: "base3".into(),
            ring: R::Q,
            spec: S::Base { d: 3 },
            anchor: "Proposition 2(i): A = R and N(x) = x^3".into(),
        },
        RegistryEntry {
            name: "base4".into(),
            ring: R::Q,
            spec: S::Base { d: 4 },
            anchor: "Section 5.1(i): A = R and N(x) = x^4".into(),
        },
        RegistryEntry {
            name: "split_etale2".into(),
            ring: R::Q,
            spec: S::SplitEtale { mults: vec![1, 1] },
            anchor: "Section 2.2: split quadratic etale, N = x1 x2".into(),
        },
        RegistryEntry {
            name: "split_etale2_cubic".into(),
            ring: R::Q,
            spec: S::SplitEtale { mults: vec![1, 2] },
            anchor: "Proposition 2 proof (rank 2): N(x1 + x2) = x1 x2^2".into(),
        },
        RegistryEntry {
            name: "split_etale2_quartic".into(),
            ring: R::Q,
            spec: S::SplitEtale { mults: vec![1, 3] },
            anchor: "Section 5.1(vi)(1): A = R + R and N(x1 + x2) = x1 x2^3".into(),
        },
        RegistryEntry {
            name: "split_etale3".into(),
            ring: R::Q,
            spec: S::SplitEtale { mults: vec![1, 1, 1] },
            anchor: "Lemma 5(ii): N(x1 + x2 + x3) = x1 x2 x3".into(),
        },
        RegistryEntry {
            name: "split_etale4".into(),
            ring: R::Q,
            spec: S::SplitEtale { mults: vec![1, 1, 1, 1] },
            anchor: "Lemma 6(3): N(x1 + .. + x4) = x1 x2 x3 x4".into(),
        },
        RegistryEntry {
            name: "quadratic_etale_split".into(),
            ring: R::Q,
            spec: S::QuadraticEtale { c: ParamScalar::Int(1) },
            anchor: "Section 2.2: quadratic etale with zero divisors".into(),
        },
        RegistryEntry {
            name: "quadratic_etale_5".into(),
            ring: R::Q,
            spec: S::QuadraticEtale { c: ParamScalar::Int(5) },
            anchor: "Section 5: k(sqrt(c)) tensor R".into(),
        },
        RegistryEntry {
            name: "quadratic_etale_laurent".into(),
            ring: R::LaurentT,
            spec: S::QuadraticEtale { c: ParamScalar::MuT(1) },
            anchor: "Section 5.2: Cay(R, mu t) over k[t, 1/t]".into(),
        },
        RegistryEntry {
            name: "cubic_tits_2".into(),
            ring: R::Q,
            spec: S::CubicTits { mu: ParamScalar::Int(2) },
            anchor: "Example 1: first Tits construction J(R, mu)".into(),
        },
        RegistryEntry {
            name: "cubic_tits_laurent".into(),
            ring: R::LaurentT,
            spec: S::CubicTits { mu: ParamScalar::MuT(1) },
            anchor: "Section 5.2: J(R, mu t) = R(cbrt(mu t))".into(),
        },
        RegistryEntry {
            name: "cd_complex".into(),
            ring: R::Q,
            spec: S::CayleyTower { mus: vec![ParamScalar::Int(-1)] },
            anchor: "Section 5: Cay(D, mu) doubling, rank 2".into(),
        },
        RegistryEntry {
            name: "cd_quaternion".into(),
            ring: R::Q,
            spec: S::CayleyTower {
                mus: vec![ParamScalar::Int(-1), ParamScalar::Int(-1)],
            },
            anchor: "Section 5: Cay(D, mu) doubling, rank 4".into(),
        },
        RegistryEntry {
            name: "cd_octonion".into(),
            ring: R::Q,
            spec: S::CayleyTower {
                mus: vec![
                    ParamScalar::Int(-1),
                    ParamScalar::Int(-1),
                    ParamScalar::Int(-1),
                ],
            },
            anchor: "Section 5: Cay(D, mu) doubling, rank 8 anisotropic".into(),
        },
        RegistryEntry {
            name: "cd_quaternion_laurent".into(),
            ring: R::LaurentT,
            spec: S::CayleyTower {
                mus: vec![ParamScalar::Int(-1), ParamScalar::MuT(1)],
            },
            anchor: "Section 5.2: Cay(T, mu t) with T defined over k".into(),
        },
        RegistryEntry {
            name: "zorn".into(),
            ring: R::Q,
            spec: S::Zorn,
            anchor: "Section 5.2: Mat_2(R) or Zor R (split octonions)".into(),
        },
        RegistryEntry {
            name: "mat2".into(),
            ring: R::Q,
            spec: S::MatrixDet { r: 2 },
            anchor: "Section 5.2: Mat_2(R) with determinant norm".into(),
        },
        RegistryEntry {
            name: "mat3".into(),
            ring: R::Q,
            spec: S::MatrixDet { r: 3 },
            anchor: "Proposition 2(iv) and Remark 5: rank-9 Azumaya, N = det".into(),
        },
        RegistryEntry {
            name: "mat4".into(),
            ring: R::Q,
            spec: S::MatrixDet { r: 4 },
            anchor: "Remark 5: rank-16 Azumaya with quartic norm".into(),
        },
        RegistryEntry {
            name: "prod_q_zorn".into(),
            ring: R::Q,
            spec: S::Product {
                factors: vec![S::Base { d: 1 }, S::Zorn],
            },
            anchor: "Lemma 5(i): N(x1 + x2) = x1 n(x2) on rank 9".into(),
        },
        RegistryEntry {
            name: "prod_q_tits".into(),
            ring: R::Q,
            spec: S::Product {
                factors: vec![S::Base { d: 1 }, S::CubicTits { mu: ParamScalar::Int(2) }],
            },
            anchor: "Section 5.1(vi): A = R + A_2 with cubic n_2 (quartic)".into(),
        },
        RegistryEntry {
            name: "prod_qq_etale".into(),
            ring: R::Q,
            spec: S::Product {
                factors: vec![
                    S::SplitEtale { mults: vec![1, 1] },
                    S::QuadraticEtale { c: ParamScalar::Int(5) },
                ],
            },
            anchor: "Section 5.1(vi)(3): N = x1 x2 n_C(x3) on rank 4".into(),
        },
        RegistryEntry {
            name: "prod_etale_zorn".into(),
            ring: R::Q,
            spec: S::Product {
                factors: vec![S::QuadraticEtale { c: ParamScalar::Int(5) }, S::Zorn],
            },
            anchor: "Section 5.1(v): A = C + D, N = n_C n_D on rank 10".into(),
        },
        RegistryEntry {
            name: "prod_q_quat_laurent".into(),
            ring: R::LaurentT,
            spec: S::Product {
                factors: vec![
                    S::Base { d: 1 },
                    S::CayleyTower {
                        mus: vec![ParamScalar::Int(-1), ParamScalar::MuT(1)],
                    },
                ],
            },
            anchor: "Section 5.2: cubic N = x1 n_C(x2) with C = Cay(T, mu t)".into(),
        },
        RegistryEntry {
            name: "prod_qq_etale_laurent".into(),
            ring: R::LaurentT,
            spec: S::Product {
                factors: vec![
                    S::SplitEtale { mults: vec![1, 1] },
                    S::QuadraticEtale { c: ParamScalar::MuT(1) },
                ],
            },
            anchor: "Section 5.2(vii): N = x1 x2 n_C(x3) over k[t, 1/t]".into(),
        },
        RegistryEntry {
            name: "zorn_squared".into(),
            ring: R::Q,
            spec: S::Power {
                base: Box::new(S::Zorn),
                k: 2,
            },
            anchor: "Section 5.1(ii): N(x) = n(x)^2 on a composition algebra".into(),
        },
        RegistryEntry {
            name: "quadratic_etale_squared".into(),
            ring: R::Q,
            spec: S::Power {
                base: Box::new(S::QuadraticEtale { c: ParamScalar::Int(5) }),
                k: 2,
            },
            anchor: "Section 5.1(ii): quartic n^2 on rank 2".into(),
        },
        RegistryEntry {
            name: "section_end_n1_a1_b2".into(),
            ring: R::Q,
            spec: S::SectionEnd { n: 1, a: 1, b: 2 },
            anchor: "Section 8 Example 4 case 1: rank 6 + 2b, (rad N_0)^3 = 0".into(),
        },
        RegistryEntry {
            name: "section_end_n1_a1_b1".into(),
            ring: R::Q,
            spec: S::SectionEnd { n: 1, a: 1, b: 1 },
            anchor: "Section 8 Example 4 case 2: rank 5 + 2(a+1), (rad N_0)^2 = 0".into(),
        },
        RegistryEntry {
            name: "section_end_n1_a0_b1".into(),
            ring: R::Q,
            spec: S::SectionEnd { n: 1, a: 0, b: 1 },
            anchor: "Section 8 Example 4 case 3: rank 5 + 2(b+1), (rad N_0)^2 = 0".into(),
        },
        RegistryEntry {
            name: "section_end_n2_a1_b2".into(),
            ring: R::Q,
            spec: S::SectionEnd { n: 2, a: 1, b: 2 },
            anchor: "Section 8 Example 4: general binomial rank formula".into(),
        },
        RegistryEntry {
            name: "section_zorn_n1_l1_m1".into(),
            ring: R::Q,
            spec: S::SectionZorn { n: 1, l: 1, m: 1 },
            anchor: "Section 8 Example 3: rank 6 + 2(l+m), (rad N_0)^3 = 0".into(),
        },
        RegistryEntry {
            name: "section_zorn_n1_l1_m2".into(),
            ring: R::Q,
            spec: S::SectionZorn { n: 1, l: 1, m: 2 },
            anchor: "Section 8 Example 3: general binomial rank formula".into(),
        },
    ]
}

pub fn find_entry(name: &str) -> Option<RegistryEntry> {
    registry().into_iter().find(|e| e.name == name)
}

/// Checks that make sense for an entry, given its expectations.
pub fn applicable_checks(entry: &RegistryEntry) -> Vec<CheckKind> {
    let expected = entry.expected();
    let mut out = vec![
        CheckKind::Composition,
        CheckKind::Linearized,
        CheckKind::Alternative,
        CheckKind::DegreeEq,
        CheckKind::Nondegenerate,
        CheckKind::Radical,
    ];
    if !expected.nondegenerate {
        out.push(CheckKind::Filtration);
    }
    if expected.nondegenerate && matches!(expected.degree, 3 | 4) {
        out.push(CheckKind::RankAdmissible);
    }
    if expected.decomposition_degrees.is_some() {
        out.push(CheckKind::Factor);
    }
    if !expected.idempotents.is_empty() {
        out.push(CheckKind::Idempotent);
    }
    if !expected.specialization_points.is_empty() {
        out.push(CheckKind::Specialize);
    }
    out.sort();
    out
}

fn mismatch(check: &str, what: &str, expected: impl std::fmt::Debug, got: impl std::fmt::Debug) -> VerificationReport {
    VerificationReport::fail(
        check,
        Method::Symbolic,
        Witness {
            inputs: vec![what.to_string()],
            discrepancy: format!("expected {expected:?}, got {got:?}"),
        },
    )
}

/// Runs one check on a built entry, comparing against its expectations.
/// The polarization and trace tower are computed once per entry and shared.
pub fn run_check(
    fa: &FormedAlgebra,
    expected: &Expected,
    kind: CheckKind,
    theta: &SymmetricTensor,
    tower: &TraceTower,
) -> Result<VerificationReport, EngineError> {
    Ok(match kind {
        CheckKind::Composition => engine::check_composition(fa),
        CheckKind::Linearized => engine::check_linearized_composition_from(fa, theta),
        CheckKind::Alternative => engine::check_alternative(fa),
        CheckKind::DegreeEq => engine::check_degree_equation(fa, tower),
        CheckKind::Nondegenerate => {
            let nondeg = engine::nondegenerate(theta);
            if nondeg != expected.nondegenerate {
                return Ok(mismatch(
                    "nondegenerate",
                    "nondegeneracy flag",
                    expected.nondegenerate,
                    nondeg,
                ));
            }
            if expected.nondegenerate {
                // coherence: B inherits nondegeneracy from N
                let gram_rank = tower.gram.rank_over_fractions();
                if gram_rank != fa.rank() {
                    return Ok(mismatch(
                        "nondegenerate",
                        "Gram matrix rank of B",
                        fa.rank(),
                        gram_rank,
                    ));
                }
            }
            VerificationReport::pass("nondegenerate", Method::Symbolic)
                .with_counter("rank", fa.rank() as u64)
        }
        CheckKind::Radical => {
            let rad = engine::radical(theta);
            if rad.len() != expected.radical_dims[0] {
                return Ok(mismatch(
                    "radical",
                    "radical dimension",
                    expected.radical_dims[0],
                    rad.len(),
                ));
            }
            // rad(N) = rad(B) as subspaces
            let gram_rad = engine::gram_radical(tower);
            if !linalg::same_span(fa.ring(), &rad, &gram_rad) {
                return Ok(mismatch(
                    "radical",
                    "rad(N) = rad(B)",
                    rad.len(),
                    gram_rad.len(),
                ));
            }
            // section algebras pin the exact block
            if let Some(indices) = fa.expected_radical_indices() {
                let block: Vec<Vec<Scalar>> = indices
                    .iter()
                    .map(|i| fa.algebra.basis_coords(*i))
                    .collect();
                if !linalg::same_span(fa.ring(), &rad, &block) {
                    return Ok(mismatch(
                        "radical",
                        "radical equals the predicted block",
                        indices.len(),
                        rad.len(),
                    ));
                }
            }
            VerificationReport::pass("radical", Method::Symbolic)
                .with_counter("dimension", rad.len() as u64)
        }
        CheckKind::Filtration => {
            let (dims, index) = engine::radical_filtration(fa, theta)?;
            if dims != expected.radical_dims || index != expected.nilpotency_index {
                return Ok(mismatch(
                    "filtration",
                    "radical power dimensions / nilpotency index",
                    (&expected.radical_dims, expected.nilpotency_index),
                    (&dims, index),
                ));
            }
            let mut rep = VerificationReport::pass("filtration", Method::Symbolic);
            if let Some(ix) = index {
                rep = rep.with_counter("nilpotency_index", ix as u64);
            }
            rep.with_counter("chain_length", dims.len() as u64)
        }
        CheckKind::Factor => {
            let Some(idems) = fa.block_idempotents() else {
                return Ok(mismatch("factor", "block idempotents", "present", "absent"));
            };
            let outcome = engine::factor_over_decomposition(fa, tower, &idems)?;
            if !outcome.report.passed() {
                return Ok(outcome.report);
            }
            let want = expected.decomposition_degrees.as_ref();
            if want != Some(&outcome.degrees) {
                return Ok(mismatch(
                    "factor",
                    "component degrees",
                    want,
                    &outcome.degrees,
                ));
            }
            outcome
                .report
                .with_counter("degree_sum", outcome.degrees.iter().sum::<usize>() as u64)
        }
        CheckKind::Idempotent => {
            for spec in &expected.idempotents {
                let mut e = fa.algebra.zero_coords();
                for i in &spec.basis_sum {
                    e[*i] = Scalar::one(fa.ring());
                }
                let rep = engine::idempotent_relations(fa, tower, &e)?;
                if !rep.passed() {
                    return Ok(rep);
                }
                if rep.counters.get("m") != Some(&(spec.expected_m as u64)) {
                    return Ok(mismatch(
                        "idempotent",
                        &format!("m for {}", spec.label),
                        spec.expected_m,
                        rep.counters.get("m"),
                    ));
                }
            }
            VerificationReport::pass("idempotent", Method::Symbolic)
                .with_counter("idempotents", expected.idempotents.len() as u64)
        }
        CheckKind::Specialize => {
            let base = match fa.ring() {
                RingDescriptor::Poly(b, _) | RingDescriptor::Laurent(b, _) => (**b).clone(),
                _ => {
                    return Ok(mismatch(
                        "specialize",
                        "ring kind",
                        "Poly/Laurent",
                        fa.ring().to_string(),
                    ))
                }
            };
            let points: Vec<Scalar> = expected
                .specialization_points
                .iter()
                .map(|v| Scalar::from_int(&base, *v))
                .collect();
            engine::specialization_nondegeneracy(fa, &points)?
        }
        CheckKind::RankAdmissible => {
            let ok = engine::rank_admissible(expected.degree, fa.rank())?;
            if ok {
                VerificationReport::pass("rank-admissible", Method::Symbolic)
                    .with_counter("rank", fa.rank() as u64)
            } else {
                mismatch(
                    "rank-admissible",
                    "rank in the admissible list",
                    expected.degree,
                    fa.rank(),
                )
            }
        }
    })
}

/// Structural expectations checked at build time (rank and degree).
pub fn check_shape(fa: &FormedAlgebra, expected: &Expected) -> Option<VerificationReport> {
    if fa.rank() != expected.rank {
        return Some(mismatch("shape", "module rank", expected.rank, fa.rank()));
    }
    if fa.degree != expected.degree {
        return Some(mismatch("shape", "form degree", expected.degree, fa.degree));
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteRow {
    pub entry: String,
    /// Duplicated inside the flattened report; kept for sorting.
    #[serde(skip)]
    pub check: String,
    pub anchor: String,
    #[serde(flatten)]
    pub report: VerificationReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub schema: &'static str,
    pub budget: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    pub rows: Vec<SuiteRow>,
    pub summary: SuiteSummary,
}

impl SuiteResult {
    pub fn new(mut rows: Vec<SuiteRow>, echo_seed: bool) -> SuiteResult {
        rows.sort_by(|a, b| (&a.entry, &a.check).cmp(&(&b.entry, &b.check)));
        let total = rows.len();
        let passed = rows
            .iter()
            .filter(|r| r.report.outcome == Outcome::Pass)
            .count();
        let sampled = rows.iter().any(|r| r.report.method == Method::Sampled);
        SuiteResult {
            schema: "v1",
            budget: budget_limit(),
            seed: (echo_seed || sampled).then(|| format!("{SAMPLE_SEED:#x}")),
            rows,
            summary: SuiteSummary {
                total,
                passed,
                failed: total - passed,
            },
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite serializes")
    }
}

/// Runs the selected checks (or all applicable ones) for one entry.
pub fn run_entry(
    entry: &RegistryEntry,
    checks: Option<&[CheckKind]>,
) -> Result<Vec<SuiteRow>, EngineError> {
    let expected = entry.expected();
    let fa = entry.build()?;
    let mut rows = Vec::new();
    let kinds: Vec<CheckKind> = match checks {
        Some(list) => list.to_vec(),
        None => applicable_checks(entry),
    };
    if let Some(shape) = check_shape(&fa, &expected) {
        rows.push(SuiteRow {
            entry: entry.name.to_string(),
            check: "shape".into(),
            anchor: entry.anchor.to_string(),
            report: shape,
        });
        return Ok(rows);
    }
    rows.push(SuiteRow {
        entry: entry.name.to_string(),
        check: "shape".into(),
        anchor: entry.anchor.to_string(),
        report: VerificationReport::pass("shape", Method::Symbolic)
            .with_counter("rank", fa.rank() as u64)
            .with_counter("degree", fa.degree as u64),
    });
    let theta = polarize(&fa.form)?;
    let tower = engine::trace_tower_from(&fa, &theta)?;
    for kind in kinds {
        let report = run_check(&fa, &expected, kind, &theta, &tower)?;
        rows.push(SuiteRow {
            entry: entry.name.to_string(),
            check: kind.name().to_string(),
            anchor: entry.anchor.to_string(),
            report,
        });
    }
    Ok(rows)
}

/// Runs the full expected-property suite over the whole registry.
pub fn run_full_suite(echo_seed: bool) -> Result<SuiteResult, EngineError> {
    let mut rows = Vec::new();
    for entry in registry() {
        rows.extend(run_entry(&entry, None)?);
    }
    Ok(SuiteResult::new(rows, echo_seed))
}

/// One-line listing for the CLI.
pub fn list_lines(filter_degree: Option<usize>) -> Vec<String> {
    registry()
        .iter()
        .filter(|e| filter_degree.is_none_or(|d| e.spec.degree() == d))
        .map(|e| {
            format!(
                "{:<28} ring={:<14} rank={:<3} degree={} [{}]",
                e.name,
                e.ring.to_string(),
                e.spec.rank(),
                e.spec.degree(),
                e.anchor
            )
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ListEntryJson {
    pub name: String,
    pub ring: String,
    pub rank: usize,
    pub degree: usize,
    pub nondegenerate: bool,
    pub anchor: String,
}

pub fn list_json(filter_degree: Option<usize>) -> String {
    let entries: Vec<ListEntryJson> = registry()
        .iter()
        .filter(|e| filter_degree.is_none_or(|d| e.spec.degree() == d))
        .map(|e| ListEntryJson {
            name: e.name.to_string(),
            ring: e.ring.to_string(),
            rank: e.spec.rank(),
            degree: e.spec.degree(),
            nondegenerate: e.spec.nondegenerate(),
            anchor: e.anchor.to_string(),
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("list serializes")
}
