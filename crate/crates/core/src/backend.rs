//! Backend selection: the dense statevector and the stabilizer tableau expose
//! the same operations, so networks and protocols run unchanged on either.

use crate::error::Result;
use crate::registers::{Label, LabelMap};
use crate::stab::{StabilizerTableau, DEFAULT_STATEVECTOR_CAP};
use crate::statevec::{MeasurementOutcome, OutcomePolicy, SingleState, StateVector};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BackendKind {
    Statevector,
    Stabilizer,
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Statevector => "statevector",
            BackendKind::Stabilizer => "stabilizer",
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "statevector" | "vec" | "sv" => Ok(BackendKind::Statevector),
            "stabilizer" | "stab" => Ok(BackendKind::Stabilizer),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

/// Quantum state held by a [`crate::net::Network`].
#[derive(Clone, Debug)]
pub enum BackendState {
    Statevector(StateVector),
    Stabilizer(StabilizerTableau),
}

impl BackendState {
    pub fn make_state(
        kind: BackendKind,
        pairs: &[(Label, Label)],
        singles: &[(Label, SingleState)],
    ) -> Result<BackendState> {
        Ok(match kind {
            BackendKind::Statevector => {
                BackendState::Statevector(StateVector::make_state(pairs, singles)?)
            }
            BackendKind::Stabilizer => {
                BackendState::Stabilizer(StabilizerTableau::make_state(pairs, singles)?)
            }
        })
    }

    pub fn kind(&self) -> BackendKind {
        match self {
            BackendState::Statevector(_) => BackendKind::Statevector,
            BackendState::Stabilizer(_) => BackendKind::Stabilizer,
        }
    }

    pub fn qubit_count(&self) -> usize {
        match self {
            BackendState::Statevector(s) => s.qubit_count(),
            BackendState::Stabilizer(t) => t.qubit_count(),
        }
    }

    pub fn labels(&self) -> &LabelMap {
        match self {
            BackendState::Statevector(s) => s.labels(),
            BackendState::Stabilizer(t) => t.labels(),
        }
    }

    pub fn apply_h(&mut self, q: &Label) -> Result<()> {
        match self {
            BackendState::Statevector(s) => s.apply_h(q),
            BackendState::Stabilizer(t) => t.apply_h(q),
        }
    }

    pub fn apply_x(&mut self, q: &Label) -> Result<()> {
        match self {
            BackendState::Statevector(s) => s.apply_x(q),
            BackendState::Stabilizer(t) => t.apply_x(q),
        }
    }

    pub fn apply_z(&mut self, q: &Label) -> Result<()> {
        match self {
            BackendState::Statevector(s) => s.apply_z(q),
            BackendState::Stabilizer(t) => t.apply_z(q),
        }
    }

    pub fn apply_cnot(&mut self, control: &Label, target: &Label) -> Result<()> {
        match self {
            BackendState::Statevector(s) => s.apply_cnot(control, target),
            BackendState::Stabilizer(t) => t.apply_cnot(control, target),
        }
    }

    pub fn measure_z(&mut self, q: &Label, policy: OutcomePolicy) -> Result<MeasurementOutcome> {
        match self {
            BackendState::Statevector(s) => s.measure_z(q, policy),
            BackendState::Stabilizer(t) => t.measure_z(q, policy),
        }
    }

    pub fn drop_qubit(&mut self, q: &Label) -> Result<()> {
        match self {
            BackendState::Statevector(s) => s.drop_qubit(q),
            BackendState::Stabilizer(t) => t.drop_qubit(q),
        }
    }

    /// Dense view of the current state (clone for the statevector backend,
    /// tableau expansion for the stabilizer backend).
    pub fn to_statevector(&self) -> Result<StateVector> {
        match self {
            BackendState::Statevector(s) => Ok(s.clone()),
            BackendState::Stabilizer(t) => t.to_statevector_capped(DEFAULT_STATEVECTOR_CAP),
        }
    }

    /// Fidelity between the reduced state on (a, b) and |Ψ⁺⟩. The stabilizer
    /// backend answers by group membership, so the result there is 0 or 1.
    pub fn epr_fidelity(&self, a: &Label, b: &Label) -> Result<f64> {
        match self {
            BackendState::Statevector(s) => {
                let subset: std::collections::BTreeSet<Label> = [a.clone(), b.clone()].into();
                // |Ψ⁺⟩ is symmetric in its two registers, so the bit order of
                // the reduced matrix does not matter.
                let rho = s.reduced_density(&subset)?;
                let f = 0.5 * (rho[0][0] + rho[0][3] + rho[3][0] + rho[3][3]).re;
                Ok(f.clamp(0.0, 1.0))
            }
            BackendState::Stabilizer(t) => {
                let n = t.qubit_count();
                let ia = t.labels().index_of(a)?.0;
                let ib = t.labels().index_of(b)?.0;
                let mut xx = vec![false; n];
                xx[ia] = true;
                xx[ib] = true;
                let zeros = vec![false; n];
                let mut zz = vec![false; n];
                zz[ia] = true;
                zz[ib] = true;
                let ok = t.contains_pauli(&xx, &zeros, 0) && t.contains_pauli(&zeros, &zz, 0);
                Ok(if ok { 1.0 } else { 0.0 })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn epr_fidelity_detects_pairs_on_both_backends() {
        for kind in [BackendKind::Statevector, BackendKind::Stabilizer] {
            let mut st = BackendState::make_state(
                kind,
                &[(label("A"), label("B")), (label("C"), label("D"))],
                &[],
            )
            .unwrap();
            assert!((st.epr_fidelity(&label("A"), &label("B")).unwrap() - 1.0).abs() < 1e-12);
            assert!(st.epr_fidelity(&label("A"), &label("C")).unwrap() < 0.6);
            // Breaking the pair is visible.
            st.apply_h(&label("A")).unwrap();
            assert!(st.epr_fidelity(&label("A"), &label("B")).unwrap() < 0.9);
        }
    }
}
