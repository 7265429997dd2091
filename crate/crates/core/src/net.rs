//! The distributed-system layer: nodes own registers, EPR links connect
//! nodes, every classical bit transfer is an explicit logged message, and
//! gates are rejected unless all of their registers sit on one node. A
//! complete run therefore leaves a trace that can be audited for the LOCC
//! property after the fact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::backend::{BackendKind, BackendState};
use crate::error::{Result, SimError};
use crate::registers::Label;
use crate::statevec::{MeasurementOutcome, OutcomePolicy, SingleState};

/// Name of a repeater node, e.g. `s1`, `r2`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        NodeId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GateKind {
    H,
    X,
    Z,
    Cnot,
}

impl GateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
        }
    }
}

impl std::str::FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "H" => Ok(GateKind::H),
            "X" => Ok(GateKind::X),
            "Z" => Ok(GateKind::Z),
            "CNOT" => Ok(GateKind::Cnot),
            other => Err(format!("unknown gate `{other}`")),
        }
    }
}

/// One entry of the append-only event log.
#[derive(Clone, PartialEq, Debug)]
pub enum Event {
    Gate {
        node: NodeId,
        gate: GateKind,
        labels: Vec<Label>,
    },
    Measure {
        node: NodeId,
        label: Label,
        bit: u8,
        probability: f64,
    },
    Message {
        from: NodeId,
        to: NodeId,
        bit: u8,
        tag: String,
    },
    Correction {
        node: NodeId,
        gate: GateKind,
        label: Label,
        conditioned_on: String,
    },
    Drop {
        node: NodeId,
        label: Label,
    },
}

/// Ordered event log plus the static ownership/channel declarations, so a
/// stored trace can be audited on its own.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct EventTrace {
    pub ownership: BTreeMap<Label, NodeId>,
    pub channels: BTreeSet<(NodeId, NodeId)>,
    pub events: Vec<Event>,
}

fn channel_key(a: &NodeId, b: &NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl EventTrace {
    pub fn message_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Message { .. }))
            .count()
    }

    pub fn drop_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Drop { .. }))
            .count()
    }

    pub fn measure_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Measure { .. }))
            .count()
    }

    /// Structural equality with a tolerance on measurement probabilities
    /// (the statevector backend reports them in floating point).
    pub fn equivalent(&self, other: &EventTrace, prob_tol: f64) -> bool {
        if self.ownership != other.ownership
            || self.channels != other.channels
            || self.events.len() != other.events.len()
        {
            return false;
        }
        self.events.iter().zip(other.events.iter()).all(|(a, b)| {
            if let (
                Event::Measure {
                    node: n1,
                    label: l1,
                    bit: b1,
                    probability: p1,
                },
                Event::Measure {
                    node: n2,
                    label: l2,
                    bit: b2,
                    probability: p2,
                },
            ) = (a, b)
            {
                n1 == n2 && l1 == l2 && b1 == b2 && (p1 - p2).abs() <= prob_tol
            } else {
                a == b
            }
        })
    }

    /// Serialize as a line-oriented text file (see README for the grammar).
    pub fn to_text(&self) -> String {
        let mut out = String::from("# qnc trace v1\n");
        for (label, node) in &self.ownership {
            out.push_str(&format!("own {label} {node}\n"));
        }
        for (a, b) in &self.channels {
            out.push_str(&format!("chan {a} {b}\n"));
        }
        for e in &self.events {
            match e {
                Event::Gate { node, gate, labels } => {
                    let regs: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
                    out.push_str(&format!(
                        "gate {node} {} {}\n",
                        gate.as_str(),
                        regs.join(" ")
                    ));
                }
                Event::Measure {
                    node,
                    label,
                    bit,
                    probability,
                } => {
                    out.push_str(&format!(
                        "measure {node} {label} {bit} {probability:.12}\n"
                    ));
                }
                Event::Message { from, to, bit, tag } => {
                    out.push_str(&format!("message {from} {to} {bit} {tag}\n"));
                }
                Event::Correction {
                    node,
                    gate,
                    label,
                    conditioned_on,
                } => {
                    out.push_str(&format!(
                        "correction {node} {} {label} {conditioned_on}\n",
                        gate.as_str()
                    ));
                }
                Event::Drop { node, label } => {
                    out.push_str(&format!("drop {node} {label}\n"));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<EventTrace> {
        let mut trace = EventTrace::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SimError::TraceParse {
                line: ln + 1,
                message,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "own" if tokens.len() == 3 => {
                    trace
                        .ownership
                        .insert(Label::new(tokens[1]), NodeId::new(tokens[2]));
                }
                "chan" if tokens.len() == 3 => {
                    trace
                        .channels
                        .insert(channel_key(&NodeId::new(tokens[1]), &NodeId::new(tokens[2])));
                }
                "gate" if tokens.len() >= 4 => {
                    let gate: GateKind = tokens[2].parse().map_err(&err)?;
                    trace.events.push(Event::Gate {
                        node: NodeId::new(tokens[1]),
                        gate,
                        labels: tokens[3..].iter().map(|t| Label::new(*t)).collect(),
                    });
                }
                "measure" if tokens.len() == 5 => {
                    let bit: u8 = tokens[3]
                        .parse()
                        .map_err(|e| err(format!("bad bit: {e}")))?;
                    let probability: f64 = tokens[4]
                        .parse()
                        .map_err(|e| err(format!("bad probability: {e}")))?;
                    trace.events.push(Event::Measure {
                        node: NodeId::new(tokens[1]),
                        label: Label::new(tokens[2]),
                        bit,
                        probability,
                    });
                }
                "message" if tokens.len() == 5 => {
                    let bit: u8 = tokens[3]
                        .parse()
                        .map_err(|e| err(format!("bad bit: {e}")))?;
                    trace.events.push(Event::Message {
                        from: NodeId::new(tokens[1]),
                        to: NodeId::new(tokens[2]),
                        bit,
                        tag: tokens[4].to_string(),
                    });
                }
                "correction" if tokens.len() == 5 => {
                    let gate: GateKind = tokens[2].parse().map_err(&err)?;
                    trace.events.push(Event::Correction {
                        node: NodeId::new(tokens[1]),
                        gate,
                        label: Label::new(tokens[3]),
                        conditioned_on: tokens[4].to_string(),
                    });
                }
                "drop" if tokens.len() == 3 => {
                    trace.events.push(Event::Drop {
                        node: NodeId::new(tokens[1]),
                        label: Label::new(tokens[2]),
                    });
                }
                other => {
                    return Err(err(format!(
                        "unrecognized or malformed declaration `{other}`"
                    )));
                }
            }
        }
        Ok(trace)
    }
}

/// Outcome of [`audit_locc`]: PASS plus an explicit violation list.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Check that a trace uses only local operations and classical communication:
/// (a) every gate and correction touches registers of a single owning node,
/// (b) every correction is justified by an earlier message carrying its tag
///     to the correcting node,
/// (c) no event references a register outside the declared ownership (no
///     register creation), and messages only cross declared channels.
pub fn audit_locc(trace: &EventTrace) -> AuditReport {
    fn check_owned(
        trace: &EventTrace,
        who: &NodeId,
        label: &Label,
        what: &str,
        idx: usize,
    ) -> Option<String> {
        match trace.ownership.get(label) {
            None => Some(format!(
                "event {idx}: {what} on `{label}` references a register that was never declared"
            )),
            Some(owner) if owner != who => Some(format!(
                "event {idx}: {what} on `{label}` executed by `{who}` \
                 but the register is owned by `{owner}`"
            )),
            _ => None,
        }
    }
    let mut violations = Vec::new();
    for (idx, event) in trace.events.iter().enumerate() {
        match event {
            Event::Gate { node, gate, labels } => {
                for l in labels {
                    violations
                        .extend(check_owned(trace, node, l, &format!("gate {}", gate.as_str()), idx));
                }
            }
            Event::Measure { node, label, .. } => {
                violations.extend(check_owned(trace, node, label, "measurement", idx));
            }
            Event::Drop { node, label } => {
                violations.extend(check_owned(trace, node, label, "drop", idx));
            }
            Event::Message { from, to, .. } => {
                if from != to && !trace.channels.contains(&channel_key(from, to)) {
                    violations.push(format!(
                        "event {idx}: message `{from}` -> `{to}` without a classical channel"
                    ));
                }
            }
            Event::Correction {
                node,
                gate,
                label,
                conditioned_on,
            } => {
                violations.extend(check_owned(
                    trace,
                    node,
                    label,
                    &format!("correction {}", gate.as_str()),
                    idx,
                ));
                let justified = trace.events[..idx].iter().any(|e| {
                    matches!(e, Event::Message { to, tag, .. }
                        if to == node && tag == conditioned_on)
                });
                if !justified {
                    violations.push(format!(
                        "event {idx}: correction at `{node}` conditioned on \
                         `{conditioned_on}` has no prior message delivering that tag"
                    ));
                }
            }
        }
    }
    AuditReport { violations }
}

/// Declarative description of a network: nodes, register ownership, EPR
/// links, classical channels, and initial states for unlinked registers.
#[derive(Clone, Debug, Default)]
pub struct Topology {
    pub nodes: Vec<NodeId>,
    pub ownership: Vec<(Label, NodeId)>,
    pub links: Vec<(Label, Label)>,
    pub channels: Vec<(NodeId, NodeId)>,
    pub inits: Vec<(Label, SingleState)>,
}

impl Topology {
    /// Parse the line-oriented topology format: `node <name>`,
    /// `own <name> <label>...`, `epr <label> <label>`, `chan <name> <name>`,
    /// `init <label> 0|1|+`, with `#` comments.
    pub fn parse(text: &str) -> Result<Topology> {
        let mut topo = Topology::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SimError::Topology {
                line: ln + 1,
                message,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "node" if tokens.len() == 2 => {
                    topo.nodes.push(NodeId::new(tokens[1]));
                }
                "own" if tokens.len() >= 3 => {
                    let node = NodeId::new(tokens[1]);
                    for t in &tokens[2..] {
                        topo.ownership.push((Label::new(*t), node.clone()));
                    }
                }
                "epr" if tokens.len() == 3 => {
                    topo.links
                        .push((Label::new(tokens[1]), Label::new(tokens[2])));
                }
                "chan" if tokens.len() == 3 => {
                    topo.channels
                        .push((NodeId::new(tokens[1]), NodeId::new(tokens[2])));
                }
                "init" if tokens.len() == 3 => {
                    let state = match tokens[2] {
                        "0" => SingleState::Zero,
                        "1" => SingleState::One,
                        "+" => SingleState::Plus,
                        other => {
                            return Err(err(format!(
                                "unknown initial state `{other}` (expected 0, 1 or +)"
                            )))
                        }
                    };
                    topo.inits.push((Label::new(tokens[1]), state));
                }
                other => {
                    return Err(err(format!(
                        "unrecognized or malformed declaration `{other}`"
                    )));
                }
            }
        }
        Ok(topo)
    }

    pub fn owner(&self, label: &Label) -> Option<&NodeId> {
        self.ownership
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, n)| n)
    }
}

/// A live network: topology plus the quantum state and the event log.
#[derive(Clone, Debug)]
pub struct Network {
    nodes: BTreeSet<NodeId>,
    ownership: BTreeMap<Label, NodeId>,
    live_links: Vec<(Label, Label)>,
    channels: BTreeSet<(NodeId, NodeId)>,
    state: BackendState,
    trace: EventTrace,
}

impl Network {
    /// Validate a topology and initialize |Ψ⁺⟩ on every link plus the
    /// declared single-register states (unlinked registers default to |0⟩).
    pub fn build(topology: &Topology, backend: BackendKind) -> Result<Network> {
        let (nodes, ownership, channels) = Self::check_topology(topology)?;
        let mut singles = topology.inits.clone();
        let mut initialized: BTreeSet<Label> = topology
            .links
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        for (l, _) in &topology.inits {
            if !initialized.insert(l.clone()) {
                return Err(SimError::DuplicateLabel(l.clone()));
            }
        }
        for (l, _) in &topology.ownership {
            if !initialized.contains(l) {
                singles.push((l.clone(), SingleState::Zero));
            }
        }
        let state = BackendState::make_state(backend, &topology.links, &singles)?;
        let trace = EventTrace {
            ownership: ownership.clone(),
            channels: channels.clone(),
            events: Vec::new(),
        };
        Ok(Network {
            nodes,
            ownership,
            live_links: topology.links.clone(),
            channels,
            state,
            trace,
        })
    }

    /// Attach a caller-prepared state to a topology. The state's registers
    /// must be exactly the owned registers; used by the randomized property
    /// suites, which need arbitrary (non-EPR-product) input states.
    pub fn with_backend_state(topology: &Topology, state: BackendState) -> Result<Network> {
        let (nodes, ownership, channels) = Self::check_topology(topology)?;
        for l in state.labels().in_index_order() {
            if !ownership.contains_key(l) {
                return Err(SimError::UnknownLabel(l.clone()));
            }
        }
        if state.labels().len() != ownership.len() {
            return Err(SimError::DimensionMismatch {
                left: state.labels().len(),
                right: ownership.len(),
            });
        }
        let trace = EventTrace {
            ownership: ownership.clone(),
            channels: channels.clone(),
            events: Vec::new(),
        };
        Ok(Network {
            nodes,
            ownership,
            live_links: topology.links.clone(),
            channels,
            state,
            trace,
        })
    }

    #[allow(clippy::type_complexity)]
    fn check_topology(
        topology: &Topology,
    ) -> Result<(
        BTreeSet<NodeId>,
        BTreeMap<Label, NodeId>,
        BTreeSet<(NodeId, NodeId)>,
    )> {
        let nodes: BTreeSet<NodeId> = topology.nodes.iter().cloned().collect();
        let mut ownership = BTreeMap::new();
        for (label, node) in &topology.ownership {
            if !nodes.contains(node) {
                return Err(SimError::UnknownNode(node.to_string()));
            }
            if ownership.insert(label.clone(), node.clone()).is_some() {
                return Err(SimError::OwnershipConflict(label.clone()));
            }
        }
        for (a, b) in &topology.links {
            let owner_a = ownership
                .get(a)
                .ok_or_else(|| SimError::UnknownLabel(a.clone()))?;
            let owner_b = ownership
                .get(b)
                .ok_or_else(|| SimError::UnknownLabel(b.clone()))?;
            if owner_a == owner_b {
                return Err(SimError::LinkWithinNode(a.clone(), b.clone()));
            }
        }
        for (l, _) in &topology.inits {
            if !ownership.contains_key(l) {
                return Err(SimError::UnknownLabel(l.clone()));
            }
        }
        let mut channels = BTreeSet::new();
        for (a, b) in &topology.channels {
            if !nodes.contains(a) {
                return Err(SimError::UnknownNode(a.to_string()));
            }
            if !nodes.contains(b) {
                return Err(SimError::UnknownNode(b.to_string()));
            }
            channels.insert(channel_key(a, b));
        }
        Ok((nodes, ownership, channels))
    }

    pub fn state(&self) -> &BackendState {
        &self.state
    }

    pub fn trace(&self) -> &EventTrace {
        &self.trace
    }

    pub fn backend(&self) -> BackendKind {
        self.state.kind()
    }

    pub fn owner(&self, label: &Label) -> Result<&NodeId> {
        self.ownership
            .get(label)
            .ok_or_else(|| SimError::UnknownLabel(label.clone()))
    }

    pub fn channel_exists(&self, a: &NodeId, b: &NodeId) -> bool {
        self.channels.contains(&channel_key(a, b))
    }

    pub fn is_live_link(&self, a: &Label, b: &Label) -> bool {
        self.live_links
            .iter()
            .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    fn require_owned(&self, node: &NodeId, label: &Label) -> Result<()> {
        let owner = self.owner(label)?;
        if owner != node {
            return Err(SimError::LocalityViolation {
                node: node.to_string(),
                label: label.clone(),
            });
        }
        Ok(())
    }

    fn apply_gate(&mut self, gate: GateKind, labels: &[Label]) -> Result<()> {
        match (gate, labels) {
            (GateKind::H, [q]) => self.state.apply_h(q),
            (GateKind::X, [q]) => self.state.apply_x(q),
            (GateKind::Z, [q]) => self.state.apply_z(q),
            (GateKind::Cnot, [c, t]) => self.state.apply_cnot(c, t),
            _ => Err(SimError::Arity(format!(
                "gate {} takes {} register(s), got {}",
                gate.as_str(),
                if gate == GateKind::Cnot { 2 } else { 1 },
                labels.len()
            ))),
        }
    }

    /// Apply a gate at `node`; rejected unless the node owns every register.
    pub fn local_gate(&mut self, node: &NodeId, gate: GateKind, labels: &[Label]) -> Result<()> {
        for l in labels {
            self.require_owned(node, l)?;
        }
        self.apply_gate(gate, labels)?;
        self.trace.events.push(Event::Gate {
            node: node.clone(),
            gate,
            labels: labels.to_vec(),
        });
        Ok(())
    }

    /// Measure a register at its owning node. The register is left in a basis
    /// state; the caller drops it once its conditional correction is done.
    pub fn local_measure(
        &mut self,
        node: &NodeId,
        label: &Label,
        policy: OutcomePolicy,
    ) -> Result<MeasurementOutcome> {
        self.require_owned(node, label)?;
        let outcome = self.state.measure_z(label, policy)?;
        self.trace.events.push(Event::Measure {
            node: node.clone(),
            label: label.clone(),
            bit: outcome.bit,
            probability: outcome.probability,
        });
        Ok(outcome)
    }

    /// Send one classical bit over a declared channel; self-delivery needs no
    /// channel. Always logged, whether or not a correction follows.
    pub fn send_bit(&mut self, from: &NodeId, to: &NodeId, bit: u8, tag: &str) -> Result<()> {
        if !self.nodes.contains(from) {
            return Err(SimError::UnknownNode(from.to_string()));
        }
        if !self.nodes.contains(to) {
            return Err(SimError::UnknownNode(to.to_string()));
        }
        if from != to && !self.channel_exists(from, to) {
            return Err(SimError::NoChannel {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        self.trace.events.push(Event::Message {
            from: from.clone(),
            to: to.clone(),
            bit,
            tag: tag.to_string(),
        });
        Ok(())
    }

    /// Apply a Pauli correction conditioned on a previously received bit.
    pub fn local_correction(
        &mut self,
        node: &NodeId,
        gate: GateKind,
        label: &Label,
        conditioned_on: &str,
    ) -> Result<()> {
        self.require_owned(node, label)?;
        self.apply_gate(gate, std::slice::from_ref(label))?;
        self.trace.events.push(Event::Correction {
            node: node.clone(),
            gate,
            label: label.clone(),
            conditioned_on: conditioned_on.to_string(),
        });
        Ok(())
    }

    /// Discard a measured register; any EPR link it was part of dies with it.
    pub fn drop_register(&mut self, node: &NodeId, label: &Label) -> Result<()> {
        self.require_owned(node, label)?;
        self.state.drop_qubit(label)?;
        self.live_links.retain(|(a, b)| a != label && b != label);
        self.trace.events.push(Event::Drop {
            node: node.clone(),
            label: label.clone(),
        });
        Ok(())
    }

    /// Fidelity of the reduced state on (a, b) against |Ψ⁺⟩.
    pub fn epr_fidelity(&self, a: &Label, b: &Label) -> Result<f64> {
        self.state.epr_fidelity(a, b)
    }
}
