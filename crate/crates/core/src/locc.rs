//! The network-coding primitives. Each one is a short composite of local
//! gates, one Z measurement, classical messages and conditional Pauli
//! corrections, finishing with the disposal of the measured register:
//!
//! * `con` — CNOT(C,R); measure R; send the bit; σX on T if 1.
//! * `fanout` — two `con`s sharing the control.
//! * `add` — local CNOT(C1,R), then `con` with control C2.
//! * `rem` — H on R; measure; send the bit; σZ on T if 1.
//! * `rem_add` — H on R; measure; send the bit to both target owners;
//!   σZ on T1 and T2 if 1.
//!
//! `entanglement_swap` and `teleport` are the classic baselines, included for
//! comparison with plain repeater forwarding.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::net::{GateKind, Network};
use crate::registers::Label;
use crate::statevec::OutcomePolicy;
use crate::tol::FIDELITY_TOL;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PrimitiveKind {
    Con,
    Fanout,
    Add,
    Rem,
    RemAdd,
    Swap,
    Teleport,
    LocalCnot,
}

impl PrimitiveKind {
    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Con => "con",
            PrimitiveKind::Fanout => "fanout",
            PrimitiveKind::Add => "add",
            PrimitiveKind::Rem => "rem",
            PrimitiveKind::RemAdd => "remadd",
            PrimitiveKind::Swap => "swap",
            PrimitiveKind::Teleport => "teleport",
            PrimitiveKind::LocalCnot => "cnot",
        }
    }

    /// (ctrl, res, tgt) arities.
    pub fn arity(self) -> (usize, usize, usize) {
        match self {
            PrimitiveKind::Con => (1, 1, 1),
            PrimitiveKind::Fanout => (1, 2, 2),
            PrimitiveKind::Add => (2, 1, 1),
            PrimitiveKind::Rem => (0, 1, 1),
            PrimitiveKind::RemAdd => (0, 1, 2),
            PrimitiveKind::Swap => (0, 2, 2),
            PrimitiveKind::Teleport => (1, 1, 1),
            PrimitiveKind::LocalCnot => (1, 0, 1),
        }
    }

    /// Z measurements performed by one invocation.
    pub fn measurement_count(self) -> usize {
        match self {
            PrimitiveKind::Con | PrimitiveKind::Add | PrimitiveKind::Rem | PrimitiveKind::RemAdd => 1,
            PrimitiveKind::Fanout | PrimitiveKind::Swap | PrimitiveKind::Teleport => 2,
            PrimitiveKind::LocalCnot => 0,
        }
    }
}

/// A parsed primitive invocation: control, resource and target registers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrimitiveCall {
    pub kind: PrimitiveKind,
    pub ctrl: Vec<Label>,
    pub res: Vec<Label>,
    pub tgt: Vec<Label>,
}

impl PrimitiveCall {
    pub fn new(kind: PrimitiveKind, ctrl: Vec<Label>, res: Vec<Label>, tgt: Vec<Label>) -> Self {
        PrimitiveCall {
            kind,
            ctrl,
            res,
            tgt,
        }
    }

    pub fn check_arity(&self) -> Result<()> {
        let (c, r, t) = self.kind.arity();
        if self.ctrl.len() != c || self.res.len() != r || self.tgt.len() != t {
            return Err(SimError::Arity(format!(
                "{} takes ctrl={c} res={r} tgt={t}, got ctrl={} res={} tgt={}",
                self.kind.name(),
                self.ctrl.len(),
                self.res.len(),
                self.tgt.len()
            )));
        }
        Ok(())
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.ctrl.iter().chain(self.res.iter()).chain(self.tgt.iter())
    }
}

/// Supplies one [`OutcomePolicy`] per measurement site, either from a run
/// PRNG (per-site seeds drawn from one seeded generator) or from a forced
/// bit string indexed in execution order.
#[derive(Clone, Debug)]
pub enum OutcomeSource {
    Seeded(ChaCha8Rng),
    Forced { bits: VecDeque<u8>, total: usize },
}

impl OutcomeSource {
    pub fn seeded(seed: u64) -> Self {
        OutcomeSource::Seeded(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn forced(bits: impl IntoIterator<Item = u8>) -> Self {
        let bits: VecDeque<u8> = bits.into_iter().collect();
        let total = bits.len();
        OutcomeSource::Forced { bits, total }
    }

    pub fn next_policy(&mut self) -> Result<OutcomePolicy> {
        match self {
            OutcomeSource::Seeded(rng) => Ok(OutcomePolicy::Random(rng.gen())),
            OutcomeSource::Forced { bits, total } => {
                bits.pop_front().map(OutcomePolicy::Forced).ok_or(
                    SimError::ForcedBitsMismatch {
                        expected: *total + 1,
                        got: *total,
                    },
                )
            }
        }
    }
}

/// The lemmas assume a |Ψ⁺⟩ factor on (R, T); enforce it instead: the pair
/// must be a live link of the topology and the reduced state must actually be
/// an EPR pair.
fn require_epr_link(net: &Network, r: &Label, t: &Label) -> Result<()> {
    if !net.is_live_link(r, t) {
        return Err(SimError::NotEprLink(r.clone(), t.clone()));
    }
    require_epr_state(net, r, t)
}

fn require_epr_state(net: &Network, r: &Label, t: &Label) -> Result<()> {
    let f = net.epr_fidelity(r, t)?;
    if f < 1.0 - FIDELITY_TOL {
        return Err(SimError::not_epr_pair(r, t, f));
    }
    Ok(())
}

/// Connection: entangle the target with the control through a shared EPR
/// pair, consuming the resource register.
pub fn con(
    net: &mut Network,
    ctrl: &Label,
    res: &Label,
    tgt: &Label,
    outcomes: &mut OutcomeSource,
) -> Result<()> {
    require_epr_link(net, res, tgt)?;
    let u = net.owner(ctrl)?.clone();
    let v = net.owner(tgt)?.clone();
    let tag = format!("con-{res}");
    net.local_gate(&u, GateKind::Cnot, &[ctrl.clone(), res.clone()])?;
    let m = net.local_measure(&u, res, outcomes.next_policy()?)?;
    net.send_bit(&u, &v, m.bit, &tag)?;
    if m.bit == 1 {
        net.local_correction(&v, GateKind::X, tgt, &tag)?;
    }
    net.drop_register(&u, res)?;
    Ok(())
}

/// Connection:Fanout — the same control drives two Connections.
pub fn fanout(
    net: &mut Network,
    ctrl: &Label,
    res1: &Label,
    tgt1: &Label,
    res2: &Label,
    tgt2: &Label,
    outcomes: &mut OutcomeSource,
) -> Result<()> {
    con(net, ctrl, res1, tgt1, outcomes)?;
    con(net, ctrl, res2, tgt2, outcomes)?;
    Ok(())
}

/// Connection:Add — a local CNOT folds the first control into the resource,
/// then a Connection with the second control.
pub fn add(
    net: &mut Network,
    ctrl1: &Label,
    ctrl2: &Label,
    res: &Label,
    tgt: &Label,
    outcomes: &mut OutcomeSource,
) -> Result<()> {
    require_epr_link(net, res, tgt)?;
    let u = net.owner(ctrl1)?.clone();
    net.local_gate(&u, GateKind::Cnot, &[ctrl1.clone(), res.clone()])?;
    con(net, ctrl2, res, tgt, outcomes)
}

/// Removal: delete a register that an earlier Connection entangled, fixing
/// the phase at the far end.
pub fn rem(
    net: &mut Network,
    res: &Label,
    tgt: &Label,
    outcomes: &mut OutcomeSource,
) -> Result<()> {
    let u = net.owner(res)?.clone();
    let v = net.owner(tgt)?.clone();
    let tag = format!("rem-{res}");
    net.local_gate(&u, GateKind::H, &[res.clone()])?;
    let m = net.local_measure(&u, res, outcomes.next_policy()?)?;
    net.send_bit(&u, &v, m.bit, &tag)?;
    if m.bit == 1 {
        net.local_correction(&v, GateKind::Z, tgt, &tag)?;
    }
    net.drop_register(&u, res)?;
    Ok(())
}

/// Removal:Add — one measured bit, broadcast to both target owners, each of
/// which applies the conditional σZ.
pub fn rem_add(
    net: &mut Network,
    res: &Label,
    tgt1: &Label,
    tgt2: &Label,
    outcomes: &mut OutcomeSource,
) -> Result<()> {
    let u = net.owner(res)?.clone();
    let v1 = net.owner(tgt1)?.clone();
    let v2 = net.owner(tgt2)?.clone();
    let tag = format!("remadd-{res}");
    net.local_gate(&u, GateKind::H, &[res.clone()])?;
    let m = net.local_measure(&u, res, outcomes.next_policy()?)?;
    // One recipient per target register, even when both live on one node.
    net.send_bit(&u, &v1, m.bit, &tag)?;
    net.send_bit(&u, &v2, m.bit, &tag)?;
    if m.bit == 1 {
        net.local_correction(&v1, GateKind::Z, tgt1, &tag)?;
        net.local_correction(&v2, GateKind::Z, tgt2, &tag)?;
    }
    net.drop_register(&u, res)?;
    Ok(())
}

/// Entanglement swapping: a Bell measurement at the relay converts the links
/// (endA, relayB) and (relayC, endD) into one EPR pair (endA, endD).
/// Corrections at endD: X for the CNOT-target outcome, Z for the H-measured
/// outcome.
pub fn entanglement_swap(
    net: &mut Network,
    relay_b: &Label,
    relay_c: &Label,
    end_a: &Label,
    end_d: &Label,
    outcomes: &mut OutcomeSource,
) -> Result<()> {
    require_epr_link(net, end_a, relay_b)?;
    require_epr_link(net, relay_c, end_d)?;
    let relay = net.owner(relay_b)?.clone();
    let far = net.owner(end_d)?.clone();
    let tag_z = format!("swap-z-{relay_b}");
    let tag_x = format!("swap-x-{relay_c}");
    net.local_gate(&relay, GateKind::Cnot, &[relay_b.clone(), relay_c.clone()])?;
    net.local_gate(&relay, GateKind::H, &[relay_b.clone()])?;
    let m1 = net.local_measure(&relay, relay_b, outcomes.next_policy()?)?;
    let m2 = net.local_measure(&relay, relay_c, outcomes.next_policy()?)?;
    net.send_bit(&relay, &far, m1.bit, &tag_z)?;
    net.send_bit(&relay, &far, m2.bit, &tag_x)?;
    if m2.bit == 1 {
        net.local_correction(&far, GateKind::X, end_d, &tag_x)?;
    }
    if m1.bit == 1 {
        net.local_correction(&far, GateKind::Z, end_d, &tag_z)?;
    }
    net.drop_register(&relay, relay_b)?;
    net.drop_register(&relay, relay_c)?;
    Ok(())
}

/// Teleport the payload register's state into `epr_b` through the EPR pair
/// (epr_a, epr_b). Accepts protocol-produced pairs, so the precondition is
/// checked on the state rather than the topology's link list.
pub fn teleport(
    net: &mut Network,
    payload: &Label,
    epr_a: &Label,
    epr_b: &Label,
    outcomes: &mut OutcomeSource,
) -> Result<()> {
    require_epr_state(net, epr_a, epr_b)?;
    let u = net.owner(payload)?.clone();
    let v = net.owner(epr_b)?.clone();
    let tag_z = format!("teleport-z-{payload}");
    let tag_x = format!("teleport-x-{epr_a}");
    net.local_gate(&u, GateKind::Cnot, &[payload.clone(), epr_a.clone()])?;
    net.local_gate(&u, GateKind::H, &[payload.clone()])?;
    let m1 = net.local_measure(&u, payload, outcomes.next_policy()?)?;
    let m2 = net.local_measure(&u, epr_a, outcomes.next_policy()?)?;
    net.send_bit(&u, &v, m1.bit, &tag_z)?;
    net.send_bit(&u, &v, m2.bit, &tag_x)?;
    if m2.bit == 1 {
        net.local_correction(&v, GateKind::X, epr_b, &tag_x)?;
    }
    if m1.bit == 1 {
        net.local_correction(&v, GateKind::Z, epr_b, &tag_z)?;
    }
    net.drop_register(&u, payload)?;
    net.drop_register(&u, epr_a)?;
    Ok(())
}

/// Plain CNOT between two registers of one node.
pub fn local_cnot(net: &mut Network, ctrl: &Label, tgt: &Label) -> Result<()> {
    let node = net.owner(ctrl)?.clone();
    net.local_gate(&node, GateKind::Cnot, &[ctrl.clone(), tgt.clone()])
}

/// Execute one parsed call.
pub fn dispatch(net: &mut Network, call: &PrimitiveCall, outcomes: &mut OutcomeSource) -> Result<()> {
    call.check_arity()?;
    match call.kind {
        PrimitiveKind::Con => con(net, &call.ctrl[0], &call.res[0], &call.tgt[0], outcomes),
        PrimitiveKind::Fanout => fanout(
            net,
            &call.ctrl[0],
            &call.res[0],
            &call.tgt[0],
            &call.res[1],
            &call.tgt[1],
            outcomes,
        ),
        PrimitiveKind::Add => add(
            net,
            &call.ctrl[0],
            &call.ctrl[1],
            &call.res[0],
            &call.tgt[0],
            outcomes,
        ),
        PrimitiveKind::Rem => rem(net, &call.res[0], &call.tgt[0], outcomes),
        PrimitiveKind::RemAdd => rem_add(net, &call.res[0], &call.tgt[0], &call.tgt[1], outcomes),
        PrimitiveKind::Swap => entanglement_swap(
            net,
            &call.res[0],
            &call.res[1],
            &call.tgt[0],
            &call.tgt[1],
            outcomes,
        ),
        PrimitiveKind::Teleport => teleport(
            net,
            &call.ctrl[0],
            &call.res[0],
            &call.tgt[0],
            outcomes,
        ),
        PrimitiveKind::LocalCnot => local_cnot(net, &call.ctrl[0], &call.tgt[0]),
    }
}
