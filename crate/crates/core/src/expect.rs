//! Expected-state expressions: tensor products of named-register factors,
//! each given as an amplitude list over bit patterns. Checkpoints compare the
//! live state against these by fidelity.

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::registers::Label;
use crate::statevec::StateVector;
use crate::tol::PROB_TOL;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// One factor: an entangled block over `labels` with explicit terms. A term's
/// pattern string is read left-to-right in label order ("011" puts the first
/// label in 0).
#[derive(Clone, Debug)]
pub struct StateFactor {
    pub labels: Vec<Label>,
    /// (basis index, amplitude); bit i of the index belongs to labels[i].
    pub terms: Vec<(usize, Complex64)>,
}

impl StateFactor {
    /// Build from pattern strings, validating length and charset.
    pub fn from_patterns(
        labels: &[&str],
        terms: &[(&str, Complex64)],
    ) -> Result<StateFactor> {
        let labels: Vec<Label> = labels.iter().map(|s| Label::new(*s)).collect();
        let mut out = Vec::with_capacity(terms.len());
        for (pattern, amp) in terms {
            if pattern.len() != labels.len() {
                return Err(SimError::InvalidExpectedState(format!(
                    "pattern `{pattern}` does not cover {} register(s)",
                    labels.len()
                )));
            }
            let mut idx = 0usize;
            for (bit, ch) in pattern.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => idx |= 1 << bit,
                    other => {
                        return Err(SimError::InvalidExpectedState(format!(
                            "pattern `{pattern}` contains `{other}`"
                        )))
                    }
                }
            }
            out.push((idx, *amp));
        }
        Ok(StateFactor {
            labels,
            terms: out,
        })
    }

    pub fn epr(a: &str, b: &str) -> StateFactor {
        let amp = Complex64::new(FRAC_1_SQRT_2, 0.0);
        StateFactor::from_patterns(&[a, b], &[("00", amp), ("11", amp)]).expect("static pattern")
    }

    pub fn ghz(a: &str, b: &str, c: &str) -> StateFactor {
        let amp = Complex64::new(FRAC_1_SQRT_2, 0.0);
        StateFactor::from_patterns(&[a, b, c], &[("000", amp), ("111", amp)])
            .expect("static pattern")
    }

    pub fn ket(label: &str, bit: u8) -> StateFactor {
        let pattern = if bit == 0 { "0" } else { "1" };
        StateFactor::from_patterns(&[label], &[(pattern, Complex64::new(1.0, 0.0))])
            .expect("static pattern")
    }

    pub fn plus(label: &str) -> StateFactor {
        let amp = Complex64::new(FRAC_1_SQRT_2, 0.0);
        StateFactor::from_patterns(&[label], &[("0", amp), ("1", amp)]).expect("static pattern")
    }

    fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }
}

/// Tensor product of factors; must cover each register once and be normalized.
#[derive(Clone, Debug)]
pub struct ExpectedState {
    pub factors: Vec<StateFactor>,
}

impl ExpectedState {
    pub fn product(factors: Vec<StateFactor>) -> ExpectedState {
        ExpectedState { factors }
    }

    pub fn labels(&self) -> Vec<Label> {
        self.factors
            .iter()
            .flat_map(|f| f.labels.iter().cloned())
            .collect()
    }

    /// Expand into a dense state; register order is factor declaration order.
    pub fn to_statevector(&self) -> Result<StateVector> {
        let mut labels: Vec<Label> = Vec::new();
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for factor in &self.factors {
            if (factor.norm_sqr() - 1.0).abs() > 1e-9 {
                return Err(SimError::InvalidExpectedState(format!(
                    "factor over {:?} has norm² {}",
                    factor.labels,
                    factor.norm_sqr()
                )));
            }
            let dim = amps.len();
            let fdim = 1usize << factor.labels.len();
            let mut next = vec![Complex64::new(0.0, 0.0); dim * fdim];
            for (fidx, famp) in &factor.terms {
                for (i, a) in amps.iter().enumerate() {
                    next[i + fidx * dim] += famp * a;
                }
            }
            amps = next;
            labels.extend(factor.labels.iter().cloned());
        }
        let sv = StateVector::from_amplitudes(labels, amps)?;
        debug_assert!((sv.norm_sqr() - 1.0).abs() < PROB_TOL);
        Ok(sv)
    }
}
