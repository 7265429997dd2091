//! Dense pure-state simulation: exact complex amplitudes for up to ~20 qubits.
//!
//! Registers are addressed by label; the label with qubit index `i` owns bit
//! `i` of the basis-state integer (little-endian). All state comparisons go
//! through [`StateVector::fidelity`], which is insensitive to global phase.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::registers::{Label, LabelMap};
use crate::tol::PROB_TOL;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Initial state of a register that is not half of an EPR pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SingleState {
    Zero,
    One,
    Plus,
}

/// How a single Z-basis measurement outcome is chosen.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutcomePolicy {
    /// Draw the outcome from a PRNG seeded with this value.
    Random(u64),
    /// Force the outcome; an outcome of probability zero is an impossible
    /// branch and is reported as an error.
    Forced(u8),
}

/// Realized measurement outcome together with its pre-measurement probability.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct MeasurementOutcome {
    pub bit: u8,
    pub probability: f64,
}

/// An n-qubit pure state as 2^n complex amplitudes plus a register directory.
#[derive(Clone, Debug)]
pub struct StateVector {
    amps: Vec<Complex64>,
    labels: LabelMap,
}

impl StateVector {
    /// Tensor product of |Ψ⁺⟩ on each `pairs` entry and the listed single-qubit
    /// states. Registers take tensor positions in declaration order.
    pub fn make_state(
        pairs: &[(Label, Label)],
        singles: &[(Label, SingleState)],
    ) -> Result<StateVector> {
        let mut labels = LabelMap::new();
        for (a, b) in pairs {
            labels.push(a.clone())?;
            labels.push(b.clone())?;
        }
        for (l, _) in singles {
            labels.push(l.clone())?;
        }
        let n = labels.len();
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        // Build factor by factor; each pair doubles into the Bell combination.
        for k in 0..pairs.len() {
            let dim = amps.len();
            let mut next = vec![Complex64::new(0.0, 0.0); dim * 4];
            for (i, a) in amps.iter().enumerate() {
                next[i] = a * FRAC_1_SQRT_2; // |00⟩ on the new pair
                next[i + 3 * dim] = a * FRAC_1_SQRT_2; // |11⟩
            }
            amps = next;
            let _ = k;
        }
        for (_, s) in singles {
            let dim = amps.len();
            let mut next = vec![Complex64::new(0.0, 0.0); dim * 2];
            for (i, a) in amps.iter().enumerate() {
                match s {
                    SingleState::Zero => next[i] = *a,
                    SingleState::One => next[i + dim] = *a,
                    SingleState::Plus => {
                        next[i] = a * FRAC_1_SQRT_2;
                        next[i + dim] = a * FRAC_1_SQRT_2;
                    }
                }
            }
            amps = next;
        }
        debug_assert_eq!(amps.len(), 1 << n);
        Ok(StateVector { amps, labels })
    }

    /// Build from explicit amplitudes; `labels[i]` owns bit `i`. The vector is
    /// normalized here so callers can pass unnormalized term lists.
    pub fn from_amplitudes(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<StateVector> {
        let mut map = LabelMap::new();
        for l in labels {
            map.push(l)?;
        }
        if amps.len() != 1 << map.len() {
            return Err(SimError::DimensionMismatch {
                left: amps.len(),
                right: 1 << map.len(),
            });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= PROB_TOL {
            return Err(SimError::InvalidExpectedState(
                "zero-norm amplitude list".into(),
            ));
        }
        let scale = norm_sqr.sqrt().recip();
        let amps = amps.into_iter().map(|a| a * scale).collect();
        Ok(StateVector { amps, labels: map })
    }

    pub fn qubit_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit_of(&self, q: &Label) -> Result<usize> {
        Ok(self.labels.index_of(q)?.0)
    }

    pub fn apply_h(&mut self, q: &Label) -> Result<()> {
        let step = 1 << self.bit_of(q)?;
        for base in (0..self.amps.len()).step_by(2 * step) {
            for offset in 0..step {
                let i = base + offset;
                let j = i + step;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[j] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: &Label) -> Result<()> {
        let step = 1 << self.bit_of(q)?;
        for base in (0..self.amps.len()).step_by(2 * step) {
            for offset in 0..step {
                self.amps.swap(base + offset, base + offset + step);
            }
        }
        Ok(())
    }

    pub fn apply_z(&mut self, q: &Label) -> Result<()> {
        let bit = self.bit_of(q)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> bit) & 1 == 1 {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: &Label, target: &Label) -> Result<()> {
        if control == target {
            return Err(SimError::SameRegister(control.clone()));
        }
        let c = self.bit_of(control)?;
        let t = self.bit_of(target)?;
        for i in 0..self.amps.len() {
            if (i >> c) & 1 == 1 && (i >> t) & 1 == 0 {
                self.amps.swap(i, i ^ (1 << t));
            }
        }
        Ok(())
    }

    /// Probability of measuring `q` as 1.
    pub fn prob_one(&self, q: &Label) -> Result<f64> {
        let bit = self.bit_of(q)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> bit) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Z-basis measurement. The post-measurement state is the renormalized
    /// projection; the measured register stays in place (in a basis state)
    /// until [`StateVector::drop_qubit`].
    pub fn measure_z(&mut self, q: &Label, policy: OutcomePolicy) -> Result<MeasurementOutcome> {
        let p1 = self.prob_one(q)?;
        let p0 = 1.0 - p1;
        debug_assert!((p0 + p1 - 1.0).abs() < PROB_TOL);
        let bit = match policy {
            OutcomePolicy::Forced(b) => b,
            OutcomePolicy::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                u8::from(rng.gen::<f64>() < p1)
            }
        };
        let prob = if bit == 1 { p1 } else { p0 };
        if prob <= PROB_TOL {
            return Err(SimError::ImpossibleBranch {
                label: q.clone(),
                bit,
                probability: prob,
            });
        }
        let pos = self.bit_of(q)?;
        let scale = prob.sqrt().recip();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i >> pos) & 1) as u8 == bit {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementOutcome {
            bit,
            probability: prob,
        })
    }

    /// Discard a register that is unentangled and in a computational basis
    /// state; the state dimension halves.
    pub fn drop_qubit(&mut self, q: &Label) -> Result<()> {
        let p1 = self.prob_one(q)?;
        let value = if p1 <= PROB_TOL {
            0
        } else if p1 >= 1.0 - PROB_TOL {
            1
        } else {
            return Err(SimError::NotDisposable(q.clone()));
        };
        let pos = self.bit_of(q)?;
        let low_mask = (1usize << pos) - 1;
        let dim = self.amps.len() / 2;
        let mut next = vec![Complex64::new(0.0, 0.0); dim];
        for (j, slot) in next.iter_mut().enumerate() {
            let src = (j & low_mask) | ((j & !low_mask) << 1) | (value << pos);
            *slot = self.amps[src];
        }
        self.amps = next;
        self.labels.remove(q)?;
        // Renormalize away the residual weight the tolerance allowed on the
        // discarded value.
        let norm = self.norm_sqr().sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(())
    }

    /// |⟨self|other⟩|² after mapping `self`'s registers through `relabel`
    /// (labels absent from the map must match by name).
    pub fn fidelity(&self, other: &StateVector, relabel: &BTreeMap<Label, Label>) -> Result<f64> {
        if self.qubit_count() != other.qubit_count() {
            return Err(SimError::DimensionMismatch {
                left: self.qubit_count(),
                right: other.qubit_count(),
            });
        }
        let n = self.qubit_count();
        let mut perm = vec![0usize; n];
        let mut used = vec![false; n];
        for (i, label) in self.labels.in_index_order().iter().enumerate() {
            let target = relabel.get(label).unwrap_or(label);
            let j = other.labels.index_of(target)?.0;
            if used[j] {
                return Err(SimError::RelabelNotBijective(label.clone()));
            }
            used[j] = true;
            perm[i] = j;
        }
        let mut overlap = Complex64::new(0.0, 0.0);
        for (x, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut y = 0usize;
            for (i, &p) in perm.iter().enumerate() {
                y |= ((x >> i) & 1) << p;
            }
            overlap += a.conj() * other.amps[y];
        }
        Ok(overlap.norm_sqr())
    }

    /// Fidelity with labels matched by name on both sides.
    pub fn fidelity_same_labels(&self, other: &StateVector) -> Result<f64> {
        self.fidelity(other, &BTreeMap::new())
    }

    /// Reduced density matrix of `subset`, row/column bits ordered by the
    /// subset labels' tensor order.
    pub fn reduced_density(&self, subset: &BTreeSet<Label>) -> Result<Vec<Vec<Complex64>>> {
        if subset.is_empty() {
            return Err(SimError::InvalidSubset("subset is empty".into()));
        }
        let mut bits = Vec::new();
        for l in subset {
            bits.push(self.bit_of(l)?);
        }
        bits.sort_unstable();
        let k = bits.len();
        let n = self.qubit_count();
        if k == n {
            return Err(SimError::InvalidSubset(
                "subset must be a proper subset of the registers".into(),
            ));
        }
        let env_bits: Vec<usize> = (0..n).filter(|b| !bits.contains(b)).collect();
        let dim = 1 << k;
        let mut rho = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        let compose = |sub: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (i, &b) in bits.iter().enumerate() {
                idx |= ((sub >> i) & 1) << b;
            }
            for (i, &b) in env_bits.iter().enumerate() {
                idx |= ((env >> i) & 1) << b;
            }
            idx
        };
        for env in 0..(1usize << env_bits.len()) {
            for row in 0..dim {
                let a = self.amps[compose(row, env)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for col in 0..dim {
                    rho[row][col] += a * self.amps[compose(col, env)].conj();
                }
            }
        }
        Ok(rho)
    }

    /// Purity Tr(ρ²) of the reduced state on `subset`: 1 for a separable
    /// subset, 0.5 for one maximally entangled qubit.
    pub fn reduced_purity(&self, subset: &BTreeSet<Label>) -> Result<f64> {
        let rho = self.reduced_density(subset)?;
        let mut purity = 0.0;
        for row in &rho {
            for v in row {
                purity += v.norm_sqr();
            }
        }
        Ok(purity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn label(s: &str) -> Label {
        Label::new(s)
    }

    fn random_state(labels: &[&str], rng: &mut ChaCha8Rng) -> StateVector {
        let names: Vec<Label> = labels.iter().map(|s| label(s)).collect();
        let dim = 1 << names.len();
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        StateVector::from_amplitudes(names, amps).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn make_state_single_pair_is_epr() {
        let s = StateVector::make_state(&[(label("A"), label("B"))], &[]).unwrap();
        assert_eq!(s.qubit_count(), 2);
        assert_close(s.amps[0].re, FRAC_1_SQRT_2, 1e-15);
        assert_close(s.amps[3].re, FRAC_1_SQRT_2, 1e-15);
        assert_eq!(s.amps[1], Complex64::new(0.0, 0.0));
        assert_eq!(s.amps[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn make_state_single_zero() {
        let s = StateVector::make_state(&[], &[(label("A"), SingleState::Zero)]).unwrap();
        assert_eq!(s.amps, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn make_state_seven_pairs_is_normalized_and_pairwise_entangled() {
        let names = [
            ("A", "B"),
            ("C", "D"),
            ("E", "F"),
            ("G", "H"),
            ("I", "J"),
            ("K", "L"),
            ("M", "N"),
        ];
        let pairs: Vec<(Label, Label)> =
            names.iter().map(|(a, b)| (label(a), label(b))).collect();
        let s = StateVector::make_state(&pairs, &[]).unwrap();
        assert_eq!(s.qubit_count(), 14);
        assert_close(s.norm_sqr(), 1.0, PROB_TOL);
        // Partial-trace oracle: each half of a pair is maximally mixed, each
        // full pair is pure.
        for (a, b) in &names {
            let single: BTreeSet<Label> = [label(a)].into();
            assert_close(s.reduced_purity(&single).unwrap(), 0.5, 1e-12);
            let both: BTreeSet<Label> = [label(a), label(b)].into();
            assert_close(s.reduced_purity(&both).unwrap(), 1.0, 1e-12);
        }
    }

    #[test]
    fn make_state_duplicate_label_rejected() {
        let err = StateVector::make_state(&[(label("A"), label("A"))], &[]).unwrap_err();
        assert!(matches!(err, SimError::DuplicateLabel(_)));
    }

    #[test]
    fn h_takes_zero_to_plus() {
        let mut s = StateVector::make_state(&[], &[(label("A"), SingleState::Zero)]).unwrap();
        s.apply_h(&label("A")).unwrap();
        assert_close(s.amps[0].re, FRAC_1_SQRT_2, 1e-15);
        assert_close(s.amps[1].re, FRAC_1_SQRT_2, 1e-15);
    }

    #[test]
    fn h_on_epr_half_matches_hand_expansion() {
        // H on A of |Ψ⁺⟩_AB expands to (1/2)(|00⟩+|10⟩+|01⟩−|11⟩), written
        // with A as the first symbol (bit 0).
        let mut s = StateVector::make_state(&[(label("A"), label("B"))], &[]).unwrap();
        s.apply_h(&label("A")).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (i, e) in expected.iter().enumerate() {
            assert_close(s.amps[i].re, *e, 1e-15);
            assert_close(s.amps[i].im, 0.0, 1e-15);
        }
    }

    #[test]
    fn x_flips_and_z_phases() {
        let a = label("A");
        let mut s = StateVector::make_state(&[], &[(a.clone(), SingleState::Zero)]).unwrap();
        s.apply_x(&a).unwrap();
        assert_eq!(s.amps[1], Complex64::new(1.0, 0.0));
        s.apply_z(&a).unwrap();
        assert_eq!(s.amps[1], Complex64::new(-1.0, 0.0));
        // σZ|+⟩ = |−⟩
        let mut p = StateVector::make_state(&[], &[(a.clone(), SingleState::Plus)]).unwrap();
        p.apply_z(&a).unwrap();
        assert_close(p.amps[0].re, FRAC_1_SQRT_2, 1e-15);
        assert_close(p.amps[1].re, -FRAC_1_SQRT_2, 1e-15);
    }

    #[test]
    fn x_on_target_fixes_phi_plus() {
        // (1/√2)(|01⟩+|10⟩) on (C,T) becomes |Ψ⁺⟩ after σX on T.
        let amps = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0), // |1⟩_C|0⟩_T
            Complex64::new(FRAC_1_SQRT_2, 0.0), // |0⟩_C|1⟩_T
            Complex64::new(0.0, 0.0),
        ];
        let mut s = StateVector::from_amplitudes(vec![label("C"), label("T")], amps).unwrap();
        s.apply_x(&label("T")).unwrap();
        let epr = StateVector::make_state(&[(label("C"), label("T"))], &[]).unwrap();
        assert_close(s.fidelity_same_labels(&epr).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn cnot_basis_action() {
        let (c, t) = (label("C"), label("T"));
        let mut s = StateVector::make_state(
            &[],
            &[(c.clone(), SingleState::One), (t.clone(), SingleState::Zero)],
        )
        .unwrap();
        s.apply_cnot(&c, &t).unwrap();
        assert_eq!(s.amps[3], Complex64::new(1.0, 0.0)); // |11⟩
        let mut z = StateVector::make_state(
            &[],
            &[(c.clone(), SingleState::Zero), (t.clone(), SingleState::Zero)],
        )
        .unwrap();
        z.apply_cnot(&c, &t).unwrap();
        assert_eq!(z.amps[0], Complex64::new(1.0, 0.0)); // |00⟩ fixed
        assert!(matches!(
            z.apply_cnot(&c, &c),
            Err(SimError::SameRegister(_))
        ));
    }

    #[test]
    fn gate_algebra_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s0 = random_state(&["A", "B", "C"], &mut rng);
            let q = label(["A", "B", "C"][(rng.next_u32() % 3) as usize]);
            // H² = X² = Z² = I
            for gate in ["h", "x", "z"] {
                let mut s = s0.clone();
                for _ in 0..2 {
                    match gate {
                        "h" => s.apply_h(&q).unwrap(),
                        "x" => s.apply_x(&q).unwrap(),
                        _ => s.apply_z(&q).unwrap(),
                    }
                }
                assert_close(s.fidelity_same_labels(&s0).unwrap(), 1.0, 1e-12);
            }
            // HZH = X
            let mut hzh = s0.clone();
            hzh.apply_h(&q).unwrap();
            hzh.apply_z(&q).unwrap();
            hzh.apply_h(&q).unwrap();
            let mut x = s0.clone();
            x.apply_x(&q).unwrap();
            assert_close(hzh.fidelity_same_labels(&x).unwrap(), 1.0, 1e-12);
            // CNOT² = I
            let mut cc = s0.clone();
            cc.apply_cnot(&label("A"), &label("B")).unwrap();
            cc.apply_cnot(&label("A"), &label("B")).unwrap();
            assert_close(cc.fidelity_same_labels(&s0).unwrap(), 1.0, 1e-12);
            // Norm preserved throughout
            assert_close(s0.norm_sqr(), 1.0, PROB_TOL);
        }
    }

    #[test]
    fn measure_plus_forced_one() {
        let a = label("A");
        let mut s = StateVector::make_state(&[], &[(a.clone(), SingleState::Plus)]).unwrap();
        let m = s.measure_z(&a, OutcomePolicy::Forced(1)).unwrap();
        assert_eq!(m.bit, 1);
        assert_close(m.probability, 0.5, PROB_TOL);
        assert_eq!(s.amps[0], Complex64::new(0.0, 0.0));
        assert_close(s.amps[1].re, 1.0, 1e-12);
    }

    #[test]
    fn measure_zero_forced_one_is_impossible() {
        let a = label("A");
        let mut s = StateVector::make_state(&[], &[(a.clone(), SingleState::Zero)]).unwrap();
        let err = s.measure_z(&a, OutcomePolicy::Forced(1)).unwrap_err();
        assert!(matches!(err, SimError::ImpossibleBranch { .. }));
    }

    #[test]
    fn measure_completeness_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s = random_state(&["A", "B"], &mut rng);
            let p1 = s.prob_one(&label("A")).unwrap();
            let p0 = 1.0 - p1;
            assert!((p0 + p1 - 1.0).abs() < PROB_TOL);
        }
    }

    #[test]
    fn measure_ghz_register_projects_by_brute_force_oracle() {
        // GHZ on (C,R,T); force R = 0. Oracle: project the 8-amplitude vector
        // onto R=0 by hand and renormalize.
        let (c, r, t) = (label("C"), label("R"), label("T"));
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[7] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut s =
            StateVector::from_amplitudes(vec![c.clone(), r.clone(), t.clone()], amps.clone())
                .unwrap();
        let m = s.measure_z(&r, OutcomePolicy::Forced(0)).unwrap();
        assert_close(m.probability, 0.5, PROB_TOL);

        let mut projected = amps;
        for (i, a) in projected.iter_mut().enumerate() {
            if (i >> 1) & 1 == 1 {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let oracle =
            StateVector::from_amplitudes(vec![c.clone(), r.clone(), t.clone()], projected)
                .unwrap();
        assert_close(s.fidelity_same_labels(&oracle).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn drop_unentangled_register() {
        let s0 = StateVector::make_state(
            &[(label("B"), label("C"))],
            &[(label("A"), SingleState::Zero)],
        )
        .unwrap();
        let mut s = s0.clone();
        s.drop_qubit(&label("A")).unwrap();
        assert_eq!(s.qubit_count(), 2);
        let epr = StateVector::make_state(&[(label("B"), label("C"))], &[]).unwrap();
        assert_close(s.fidelity_same_labels(&epr).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn drop_entangled_register_rejected() {
        let mut s = StateVector::make_state(&[(label("A"), label("B"))], &[]).unwrap();
        assert!(matches!(
            s.drop_qubit(&label("A")),
            Err(SimError::NotDisposable(_))
        ));
    }

    #[test]
    fn drop_after_measure_preserves_remaining_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let mut s1 = random_state(&["A", "B", "C"], &mut rng);
            let mut s2 = random_state(&["A", "B", "C"], &mut rng);
            s1.measure_z(&label("A"), OutcomePolicy::Forced(0)).unwrap();
            s2.measure_z(&label("A"), OutcomePolicy::Forced(0)).unwrap();
            let before = s1.fidelity_same_labels(&s2).unwrap();
            s1.drop_qubit(&label("A")).unwrap();
            s2.drop_qubit(&label("A")).unwrap();
            let after = s1.fidelity_same_labels(&s2).unwrap();
            assert_close(before, after, 1e-10);
        }
    }

    #[test]
    fn fidelity_basics() {
        let ghz = |names: [&str; 3]| {
            let mut amps = vec![Complex64::new(0.0, 0.0); 8];
            amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[7] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            StateVector::from_amplitudes(names.map(Label::new).to_vec(), amps).unwrap()
        };
        let g1 = ghz(["A", "B", "C"]);
        let g2 = ghz(["A", "B", "C"]);
        assert_close(g1.fidelity_same_labels(&g2).unwrap(), 1.0, 1e-12);

        let zero = StateVector::make_state(&[], &[(label("A"), SingleState::Zero)]).unwrap();
        let one = StateVector::make_state(&[], &[(label("A"), SingleState::One)]).unwrap();
        assert_close(zero.fidelity_same_labels(&one).unwrap(), 0.0, 1e-12);

        // Global phase is invisible.
        let phased = StateVector::from_amplitudes(
            vec![label("A")],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        assert_close(zero.fidelity_same_labels(&phased).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn fidelity_with_relabeling() {
        let s1 = StateVector::make_state(&[(label("A"), label("B"))], &[]).unwrap();
        let s2 = StateVector::make_state(&[(label("X"), label("Y"))], &[]).unwrap();
        let map: BTreeMap<Label, Label> = [
            (label("A"), label("X")),
            (label("B"), label("Y")),
        ]
        .into();
        assert_close(s1.fidelity(&s2, &map).unwrap(), 1.0, 1e-12);
        let bad: BTreeMap<Label, Label> = [
            (label("A"), label("X")),
            (label("B"), label("X")),
        ]
        .into();
        assert!(matches!(
            s1.fidelity(&s2, &bad),
            Err(SimError::RelabelNotBijective(_))
        ));
    }

    #[test]
    fn reduced_purity_psi7_pair_subset() {
        // |Ψ₇⟩ = (1/2)(|0000⟩+|1111⟩+|0110⟩+|1001⟩) over (A',B,E',F); the
        // subset {A',B} traces to the maximally mixed two-qubit state, so the
        // partial-trace oracle gives purity 1/4.
        let names = vec![label("A'"), label("B"), label("E'"), label("F")];
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        for pattern in [0b0000usize, 0b1111, 0b0110, 0b1001] {
            // written A'BE'F left-to-right; bit i of the index is register i
            let mut idx = 0;
            for bit in 0..4 {
                idx |= ((pattern >> (3 - bit)) & 1) << bit;
            }
            amps[idx] = Complex64::new(0.5, 0.0);
        }
        let s = StateVector::from_amplitudes(names, amps).unwrap();
        let subset: BTreeSet<Label> = [label("A'"), label("B")].into();
        assert_close(s.reduced_purity(&subset).unwrap(), 0.25, 1e-12);
        // Sanity: the state is EPR on (A',F) and (B,E').
        let single: BTreeSet<Label> = [label("A'")].into();
        assert_close(s.reduced_purity(&single).unwrap(), 0.5, 1e-12);
        let pair: BTreeSet<Label> = [label("A'"), label("F")].into();
        assert_close(s.reduced_purity(&pair).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn reduced_purity_rejects_empty_and_full_subsets() {
        let s = StateVector::make_state(&[(label("A"), label("B"))], &[]).unwrap();
        assert!(s.reduced_purity(&BTreeSet::new()).is_err());
        let full: BTreeSet<Label> = [label("A"), label("B")].into();
        assert!(s.reduced_purity(&full).is_err());
    }
}
