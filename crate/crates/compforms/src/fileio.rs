//! The algebra definition file: a plain-text, bit-exact round-trippable
//! description of a formed algebra.
//!
//! ```text
//! compforms-algebra v1
//! ring laurent(Q,t)
//! rank 8
//! degree 2
//! unit 1 1 0 0 0 0 0 0
//! c 0 0 0 1
//! ...                      # sparse structure triples "c i j k scalar"
//! form 1 1 0 0 0 0 0 0 -1  # n exponents then the coefficient
//! labels e11 e22 ...       # optional
//! provenance zorn
//! nondegenerate true
//! ```
//!
//! Scalars use the canonical whitespace-free text form, triples are sorted by
//! `(i, j, k)` and form terms descending in graded-lex order, so writing is
//! deterministic.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError};
use crate::construct::{BuildError, FormedAlgebra, Provenance};
use crate::form::{DegreeForm, FormError};
use crate::mpoly::{MPoly, Mono};
use crate::scalar::{parse_ring, RingDescriptor, Scalar, ScalarError};

pub const FORMAT_HEADER: &str = "compforms-algebra v1";

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("missing section: {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

pub fn write_formed_algebra(f: &FormedAlgebra) -> String {
    let mut out = String::new();
    let n = f.rank();
    writeln!(out, "{FORMAT_HEADER}").unwrap();
    writeln!(out, "ring {}", f.ring()).unwrap();
    writeln!(out, "rank {n}").unwrap();
    writeln!(out, "degree {}", f.degree).unwrap();
    let unit = f
        .algebra
        .unit_coords()
        .iter()
        .map(Scalar::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(out, "unit {unit}").unwrap();
    for i in 0..n {
        for j in 0..n {
            for (k, c) in f.algebra.structure_entry(i, j) {
                writeln!(out, "c {i} {j} {k} {c}").unwrap();
            }
        }
    }
    let mut terms: Vec<(Mono, Scalar)> = f
        .form
        .poly
        .terms()
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    terms.reverse(); // descending graded-lex
    for (mono, coeff) in terms {
        let exps = mono
            .exponents()
            .iter()
            .map(u16::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "form {exps} {coeff}").unwrap();
    }
    if let Some(labels) = f.algebra.labels() {
        writeln!(out, "labels {}", labels.join(" ")).unwrap();
    }
    writeln!(out, "provenance {}", f.provenance.tag()).unwrap();
    writeln!(out, "nondegenerate {}", f.expect_nondegenerate).unwrap();
    out
}

pub fn read_formed_algebra(text: &str) -> Result<FormedAlgebra, FileError> {
    let mut ring: Option<RingDescriptor> = None;
    let mut rank: Option<usize> = None;
    let mut degree: Option<usize> = None;
    let mut unit: Option<Vec<Scalar>> = None;
    let mut triples: Vec<(usize, usize, usize, Scalar)> = Vec::new();
    let mut form_terms: Vec<(Mono, Scalar)> = Vec::new();
    let mut labels: Option<Vec<String>> = None;
    let mut provenance_tag: Option<String> = None;
    let mut nondegenerate = true;

    let bad = |ln: usize, msg: &str| FileError::Malformed(ln + 1, msg.to_string());

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if ln == 0 {
            if line != FORMAT_HEADER {
                return Err(bad(ln, "unrecognized header"));
            }
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "ring" => ring = Some(parse_ring(rest)?),
            "rank" => {
                rank = Some(rest.parse().map_err(|_| bad(ln, "bad rank"))?);
            }
            "degree" => {
                degree = Some(rest.parse().map_err(|_| bad(ln, "bad degree"))?);
            }
            "unit" => {
                let r = ring.as_ref().ok_or(FileError::Missing("ring"))?;
                unit = Some(
                    rest.split_whitespace()
                        .map(|t| crate::scalar::parse_scalar(r, t))
                        .collect::<Result<_, _>>()?,
                );
            }
            "c" => {
                let r = ring.as_ref().ok_or(FileError::Missing("ring"))?;
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(bad(ln, "structure triple needs i j k scalar"));
                }
                let i = parts[0].parse().map_err(|_| bad(ln, "bad index"))?;
                let j = parts[1].parse().map_err(|_| bad(ln, "bad index"))?;
                let k = parts[2].parse().map_err(|_| bad(ln, "bad index"))?;
                triples.push((i, j, k, crate::scalar::parse_scalar(r, parts[3])?));
            }
            "form" => {
                let r = ring.as_ref().ok_or(FileError::Missing("ring"))?;
                let n = rank.ok_or(FileError::Missing("rank"))?;
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != n + 1 {
                    return Err(bad(ln, "form term needs n exponents and a coefficient"));
                }
                let exps: Vec<u16> = parts[..n]
                    .iter()
                    .map(|t| t.parse().map_err(|_| bad(ln, "bad exponent")))
                    .collect::<Result<_, _>>()?;
                form_terms.push((
                    Mono::from_exponents(exps),
                    crate::scalar::parse_scalar(r, parts[n])?,
                ));
            }
            "labels" => {
                labels = Some(rest.split_whitespace().map(str::to_string).collect());
            }
            "provenance" => provenance_tag = Some(rest.to_string()),
            "nondegenerate" => nondegenerate = rest.trim() == "true",
            _ => return Err(bad(ln, "unknown directive")),
        }
    }
    let ring = ring.ok_or(FileError::Missing("ring"))?;
    let rank = rank.ok_or(FileError::Missing("rank"))?;
    let degree = degree.ok_or(FileError::Missing("degree"))?;
    let unit = unit.ok_or(FileError::Missing("unit"))?;
    let algebra = Algebra::new(ring.clone(), rank, unit, triples, labels)?;
    let poly = MPoly::from_terms(rank, form_terms);
    let form = DegreeForm::new(ring, rank, degree, poly)?;
    let fa = FormedAlgebra::new(
        algebra,
        form,
        Provenance::External {
            tag: provenance_tag.unwrap_or_else(|| "file".to_string()),
        },
        nondegenerate,
    )?;
    Ok(fa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct;
    use crate::scalar::Scalar;

    #[test]
    fn round_trip_is_bit_exact() {
        let q = RingDescriptor::Rationals;
        for fa in [
            construct::zorn(&q).unwrap(),
            construct::cubic_tits(&q, &Scalar::from_int(&q, 2)).unwrap(),
            construct::quadratic_etale(
                &RingDescriptor::laurent(q.clone(), "t").unwrap(),
                &Scalar::variable(&RingDescriptor::laurent(q.clone(), "t").unwrap()),
            )
            .unwrap(),
        ] {
            let text = write_formed_algebra(&fa);
            let back = read_formed_algebra(&text).unwrap();
            let text2 = write_formed_algebra(&back);
            assert_eq!(text, text2, "file round trip must be byte-identical");
            assert_eq!(*back.algebra, *fa.algebra);
            assert_eq!(back.form.poly, fa.form.poly);
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(read_formed_algebra("not a header").is_err());
        let partial = format!("{FORMAT_HEADER}\nring Q\nrank 1\n");
        assert!(read_formed_algebra(&partial).is_err());
    }
}
