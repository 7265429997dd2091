use thiserror::Error;

use crate::registers::Label;

/// Errors raised by state backends, the network model and the protocol engine.
#[derive(Debug, Clone, Error)]
pub enum SimError {
    #[error("duplicate register label `{0}`")]
    DuplicateLabel(Label),
    #[error("unknown register label `{0}`")]
    UnknownLabel(Label),
    #[error("control and target are the same register `{0}`")]
    SameRegister(Label),
    #[error("impossible branch: outcome {bit} on `{label}` has probability {probability:e}")]
    ImpossibleBranch {
        label: Label,
        bit: u8,
        probability: f64,
    },
    #[error("register `{0}` cannot be dropped: still entangled or in superposition")]
    NotDisposable(Label),
    #[error("state dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("relabeling of `{0}` is not a bijection onto the other state's registers")]
    RelabelNotBijective(Label),
    #[error("invalid register subset: {0}")]
    InvalidSubset(String),
    #[error("{qubits} qubits exceed the statevector conversion cap of {cap}")]
    QubitCapExceeded { qubits: usize, cap: usize },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("register `{0}` is owned by more than one node")]
    OwnershipConflict(Label),
    #[error("EPR link {0}-{1} joins the same node")]
    LinkWithinNode(Label, Label),
    #[error("locality violation: node `{node}` does not own register `{label}`")]
    LocalityViolation { node: String, label: Label },
    #[error("no classical channel between `{from}` and `{to}`")]
    NoChannel { from: String, to: String },
    #[error("registers {0}-{1} are not a live EPR link of the topology")]
    NotEprLink(Label, Label),
    #[error("registers {a}-{b} do not hold an EPR pair (fidelity {fidelity})")]
    NotEprPair {
        a: Label,
        b: Label,
        fidelity: f64,
    },
    #[error("topology error at line {line}: {message}")]
    Topology { line: usize, message: String },
    #[error("trace parse error at line {line}: {message}")]
    TraceParse { line: usize, message: String },
    #[error("invalid expected state: {0}")]
    InvalidExpectedState(String),
    #[error("checkpoint `{0}` has no expected state bound to this scenario")]
    UnknownCheckpoint(String),
    #[error("forced bit string has {got} bits but the script has {expected} measurement sites")]
    ForcedBitsMismatch { expected: usize, got: usize },
    #[error("{sites} measurement sites exceed the branch enumeration cap of {cap}")]
    BranchCapExceeded { sites: usize, cap: usize },
    #[error("unknown builtin scenario `{0}`")]
    UnknownBuiltin(String),
    #[error("primitive arity mismatch: {0}")]
    Arity(String),
    #[error("script is invalid: {0}")]
    InvalidScript(String),
}

// `NotEprPair` is written with named fields so the message can show both
// registers and the measured fidelity.
impl SimError {
    pub fn not_epr_pair(a: &Label, b: &Label, fidelity: f64) -> Self {
        SimError::NotEprPair {
            a: a.clone(),
            b: b.clone(),
            fidelity,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
