//! Structured outcomes of identity checks and suite runs.

use std::collections::BTreeMap;

use serde::Serialize;

/// Fixed seed for the deterministic sampled fallback; published in reports.
pub const SAMPLE_SEED: u64 = 0x5EED;

/// Number of sample points used per identity when a check runs sampled.
pub const SAMPLE_POINTS: usize = 8;

/// Default budget (term-by-term products) for symbolic expansion; the
/// `COMPFORMS_BUDGET` environment variable overrides it.
pub const DEFAULT_BUDGET: usize = 1_000_000;

pub fn budget_limit() -> usize {
    std::env::var("COMPFORMS_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Symbolic,
    Sampled,
    Exhaustive,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

/// A concrete refutation: the inputs that break the identity and the nonzero
/// discrepancy they produce, all printed exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub inputs: Vec<String>,
    pub discrepancy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub method: Method,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub counters: BTreeMap<String, u64>,
}

impl VerificationReport {
    pub fn pass(check: &str, method: Method) -> VerificationReport {
        VerificationReport {
            check: check.to_string(),
            method,
            outcome: Outcome::Pass,
            witness: None,
            counters: BTreeMap::new(),
        }
    }

    pub fn fail(check: &str, method: Method, witness: Witness) -> VerificationReport {
        VerificationReport {
            check: check.to_string(),
            method,
            outcome: Outcome::Fail,
            witness: Some(witness),
            counters: BTreeMap::new(),
        }
    }

    pub fn with_counter(mut self, key: &str, value: u64) -> VerificationReport {
        self.counters.insert(key.to_string(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

/// Deterministic integer stream for the sampled fallback (splitmix64).
/// Self-contained so reports stay byte-stable across toolchains.
#[derive(Debug, Clone)]
pub struct SampleStream {
    state: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> SampleStream {
        SampleStream { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Small integer in [-9, 9].
    pub fn small_int(&mut self) -> i64 {
        (self.next_u64() % 19) as i64 - 9
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_stream_is_deterministic() {
        let a: Vec<i64> = {
            let mut s = SampleStream::new(SAMPLE_SEED);
            (0..16).map(|_| s.small_int()).collect()
        };
        let b: Vec<i64> = {
            let mut s = SampleStream::new(SAMPLE_SEED);
            (0..16).map(|_| s.small_int()).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (-9..=9).contains(v)));
        assert!(a.iter().any(|v| *v != a[0]));
    }
}
