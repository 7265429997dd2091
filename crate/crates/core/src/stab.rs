//! Stabilizer-tableau simulation of the H/X/Z/CNOT gate set with Z-basis
//! measurement, in the Aaronson-Gottesman destabilizer layout.
//!
//! A row stores the Pauli `i^phase · X^x Z^z` as two bit vectors plus a phase
//! exponent mod 4. Rows `0..n` are destabilizers, rows `n..2n` stabilizers.
//! With this convention row multiplication is
//! `phase += phase' + 2·(z · x')` and CNOT conjugation needs no phase update.
//! Measurement outcomes are classified as deterministic (probability 0 or 1)
//! or uniform (probability 1/2); no other probabilities occur for stabilizer
//! states.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::registers::{Label, LabelMap};
use crate::statevec::{MeasurementOutcome, OutcomePolicy, SingleState, StateVector};

/// Default qubit cap for [`StabilizerTableau::to_statevector`].
pub const DEFAULT_STATEVECTOR_CAP: usize = 20;

#[derive(Clone, PartialEq, Eq, Debug)]
struct PauliRow {
    x: Vec<bool>,
    z: Vec<bool>,
    /// Exponent of i in `i^phase · X^x Z^z`; valid rows keep
    /// `phase ≡ x·z (mod 2)`.
    phase: u8,
}

impl PauliRow {
    fn identity(n: usize) -> Self {
        PauliRow {
            x: vec![false; n],
            z: vec![false; n],
            phase: 0,
        }
    }

    fn is_identity_pauli(&self) -> bool {
        !self.x.iter().any(|&b| b) && !self.z.iter().any(|&b| b)
    }

    /// self <- self · other (operator product).
    fn mul_assign(&mut self, other: &PauliRow) {
        let mut cross = 0u8;
        for (zs, xo) in self.z.iter().zip(other.x.iter()) {
            cross ^= u8::from(*zs && *xo);
        }
        self.phase = (self.phase + other.phase + 2 * cross) & 3;
        for (xs, xo) in self.x.iter_mut().zip(other.x.iter()) {
            *xs ^= xo;
        }
        for (zs, zo) in self.z.iter_mut().zip(other.z.iter()) {
            *zs ^= zo;
        }
    }

    /// Symplectic product: 1 if the Paulis anticommute.
    fn anticommutes(&self, other: &PauliRow) -> bool {
        let mut acc = false;
        for i in 0..self.x.len() {
            acc ^= self.x[i] && other.z[i];
            acc ^= self.z[i] && other.x[i];
        }
        acc
    }
}

/// Binary symplectic tableau for a stabilizer state of n qubits, with
/// destabilizer rows for O(n²) measurement updates.
#[derive(Clone, Debug)]
pub struct StabilizerTableau {
    n: usize,
    /// 2n rows: destabilizers first, then stabilizers.
    rows: Vec<PauliRow>,
    labels: LabelMap,
}

impl StabilizerTableau {
    /// Same construction contract as [`StateVector::make_state`].
    pub fn make_state(
        pairs: &[(Label, Label)],
        singles: &[(Label, SingleState)],
    ) -> Result<StabilizerTableau> {
        let mut labels = LabelMap::new();
        for (a, b) in pairs {
            labels.push(a.clone())?;
            labels.push(b.clone())?;
        }
        for (l, _) in singles {
            labels.push(l.clone())?;
        }
        let n = labels.len();
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut r = PauliRow::identity(n);
            r.x[i] = true;
            rows.push(r);
        }
        for i in 0..n {
            let mut r = PauliRow::identity(n);
            r.z[i] = true;
            rows.push(r);
        }
        let mut t = StabilizerTableau { n, rows, labels };
        for (a, b) in pairs {
            t.apply_h(a)?;
            t.apply_cnot(a, b)?;
        }
        for (l, s) in singles {
            match s {
                SingleState::Zero => {}
                SingleState::One => t.apply_x(l)?,
                SingleState::Plus => t.apply_h(l)?,
            }
        }
        Ok(t)
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    fn bit_of(&self, q: &Label) -> Result<usize> {
        Ok(self.labels.index_of(q)?.0)
    }

    pub fn apply_h(&mut self, q: &Label) -> Result<()> {
        let k = self.bit_of(q)?;
        for row in &mut self.rows {
            if row.x[k] && row.z[k] {
                row.phase = (row.phase + 2) & 3;
            }
            std::mem::swap(&mut row.x[k], &mut row.z[k]);
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: &Label) -> Result<()> {
        let k = self.bit_of(q)?;
        for row in &mut self.rows {
            if row.z[k] {
                row.phase = (row.phase + 2) & 3;
            }
        }
        Ok(())
    }

    pub fn apply_z(&mut self, q: &Label) -> Result<()> {
        let k = self.bit_of(q)?;
        for row in &mut self.rows {
            if row.x[k] {
                row.phase = (row.phase + 2) & 3;
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
        for row in &mut self.rows {
            row.x[t] ^= row.x[c];
            row.z[c] ^= row.z[t];
        }
        Ok(())
    }

    /// Pauli part of ±Z_q expressed over the stabilizer generators; the sign
    /// encodes the deterministic Z outcome on `q`.
    fn deterministic_z_row(&self, q_bit: usize) -> PauliRow {
        let mut acc = PauliRow::identity(self.n);
        for i in 0..self.n {
            if self.rows[i].x[q_bit] {
                let stab = self.rows[self.n + i].clone();
                acc.mul_assign(&stab);
            }
        }
        debug_assert!(!acc.x.iter().any(|&b| b), "deterministic row has X part");
        debug_assert!(acc.phase % 2 == 0);
        acc
    }

    /// Z-basis measurement. Outcome probability is exactly 0, 0.5 or 1.
    pub fn measure_z(&mut self, q: &Label, policy: OutcomePolicy) -> Result<MeasurementOutcome> {
        let k = self.bit_of(q)?;
        let pivot = (self.n..2 * self.n).find(|&p| self.rows[p].x[k]);
        match pivot {
            Some(p) => {
                let bit = match policy {
                    OutcomePolicy::Forced(b) => b,
                    OutcomePolicy::Random(seed) => {
                        u8::from(ChaCha8Rng::seed_from_u64(seed).gen::<bool>())
                    }
                };
                let pivot_row = self.rows[p].clone();
                for i in 0..2 * self.n {
                    if i != p && self.rows[i].x[k] {
                        self.rows[i].mul_assign(&pivot_row);
                    }
                }
                self.rows[p - self.n] = pivot_row;
                let mut fresh = PauliRow::identity(self.n);
                fresh.z[k] = true;
                fresh.phase = 2 * bit;
                self.rows[p] = fresh;
                Ok(MeasurementOutcome {
                    bit,
                    probability: 0.5,
                })
            }
            None => {
                let det = self.deterministic_z_row(k);
                let bit = if det.phase == 2 { 1 } else { 0 };
                if let OutcomePolicy::Forced(b) = policy {
                    if b != bit {
                        return Err(SimError::ImpossibleBranch {
                            label: q.clone(),
                            bit: b,
                            probability: 0.0,
                        });
                    }
                }
                Ok(MeasurementOutcome {
                    bit,
                    probability: 1.0,
                })
            }
        }
    }

    /// Multiply stabilizer row `dst` by stabilizer row `src` and apply the
    /// compensating destabilizer update that keeps the tableau valid.
    fn mul_stab_rows(&mut self, dst: usize, src: usize) {
        debug_assert!(dst >= self.n && src >= self.n && dst != src);
        let src_row = self.rows[src].clone();
        self.rows[dst].mul_assign(&src_row);
        let dst_destab = self.rows[dst - self.n].clone();
        self.rows[src - self.n].mul_assign(&dst_destab);
    }

    fn swap_stab_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
        self.rows.swap(a - self.n, b - self.n);
    }

    /// Discard a register whose Z value is deterministic (i.e. it is in a
    /// computational basis state and unentangled).
    pub fn drop_qubit(&mut self, q: &Label) -> Result<()> {
        let k = self.bit_of(q)?;
        if (self.n..2 * self.n).any(|p| self.rows[p].x[k]) {
            return Err(SimError::NotDisposable(q.clone()));
        }
        // Indices whose destabilizer has X support on q: the corresponding
        // stabilizers multiply to ±Z_q.
        let witness: Vec<usize> = (0..self.n).filter(|&i| self.rows[i].x[k]).collect();
        debug_assert!(!witness.is_empty(), "Z_q missing from a valid tableau");
        let p = self.n + witness[0];
        for &i in &witness[1..] {
            self.mul_stab_rows(p, self.n + i);
        }
        debug_assert!(
            !self.rows[p].x.iter().any(|&b| b)
                && self.rows[p].z.iter().enumerate().all(|(j, &b)| b == (j == k)),
            "pivot row is not ±Z_q"
        );
        let pivot_row = self.rows[p].clone();
        for j in self.n..2 * self.n {
            if j != p && self.rows[j].z[k] {
                self.mul_stab_rows(j, p);
            }
        }
        // Clear residual Z_q support on the surviving destabilizers; the only
        // pairing this disturbs is with the row pair being deleted.
        for i in 0..self.n {
            if self.n + i != p {
                debug_assert!(!self.rows[i].x[k], "destabilizer kept X support on a dropped qubit");
                if self.rows[i].z[k] {
                    self.rows[i].mul_assign(&pivot_row);
                }
            }
        }
        let stab_idx = p;
        let destab_idx = p - self.n;
        self.rows.remove(stab_idx);
        self.rows.remove(destab_idx);
        for row in &mut self.rows {
            row.x.remove(k);
            row.z.remove(k);
        }
        self.n -= 1;
        self.labels.remove(q)?;
        Ok(())
    }

    /// Row-reduced echelon form of the stabilizer generators (X block first,
    /// then pure-Z rows). Idempotent and state-preserving; two tableaus of the
    /// same state canonicalize to bit-identical stabilizer rows.
    pub fn canonical_form(&self) -> StabilizerTableau {
        let mut t = self.clone();
        let n = t.n;
        let mut rank = 0usize;
        for col in 0..n {
            if let Some(pivot) = (t.n + rank..2 * t.n).find(|&r| t.rows[r].x[col]) {
                t.swap_stab_rows(pivot, t.n + rank);
                for r in t.n..2 * t.n {
                    if r != t.n + rank && t.rows[r].x[col] {
                        t.mul_stab_rows(r, t.n + rank);
                    }
                }
                rank += 1;
            }
        }
        for col in 0..n {
            if let Some(pivot) = (t.n + rank..2 * t.n).find(|&r| t.rows[r].z[col]) {
                t.swap_stab_rows(pivot, t.n + rank);
                for r in t.n..2 * t.n {
                    if r != t.n + rank && t.rows[r].z[col] {
                        t.mul_stab_rows(r, t.n + rank);
                    }
                }
                rank += 1;
            }
        }
        debug_assert_eq!(rank, n, "stabilizer generators are not independent");
        t
    }

    /// Stabilizer rows as (x bits, z bits, phase) triples, for comparisons.
    pub fn stabilizer_rows(&self) -> Vec<(Vec<bool>, Vec<bool>, u8)> {
        self.rows[self.n..]
            .iter()
            .map(|r| (r.x.clone(), r.z.clone(), r.phase))
            .collect()
    }

    /// True if both tableaus stabilize the same state (labels must match).
    pub fn state_eq(&self, other: &StabilizerTableau) -> bool {
        if self.labels != other.labels {
            return false;
        }
        self.canonical_form().stabilizer_rows() == other.canonical_form().stabilizer_rows()
    }

    /// Test whether `i^phase · X^x Z^z` (bits over tensor order) is in the
    /// stabilizer group, phase included.
    pub fn contains_pauli(&self, x: &[bool], z: &[bool], phase: u8) -> bool {
        assert_eq!(x.len(), self.n);
        assert_eq!(z.len(), self.n);
        // Echelonize a copy of the generators, remembering which original
        // generators make up each reduced row, then peel the target.
        let mut gens: Vec<(PauliRow, Vec<usize>)> = (0..self.n)
            .map(|i| (self.rows[self.n + i].clone(), vec![i]))
            .collect();
        let mut target = PauliRow {
            x: x.to_vec(),
            z: z.to_vec(),
            phase,
        };
        let mut used = vec![false; gens.len()];
        let mut members: Vec<usize> = Vec::new();
        for col in 0..2 * self.n {
            let bit_of = |r: &PauliRow| {
                if col < self.n {
                    r.x[col]
                } else {
                    r.z[col - self.n]
                }
            };
            let Some(pi) = (0..gens.len()).find(|&i| !used[i] && bit_of(&gens[i].0)) else {
                continue;
            };
            used[pi] = true;
            let (pivot_row, pivot_members) = gens[pi].clone();
            for (i, (row, mem)) in gens.iter_mut().enumerate() {
                if i != pi && !used[i] && bit_of(row) {
                    row.mul_assign(&pivot_row);
                    mem.extend_from_slice(&pivot_members);
                }
            }
            if bit_of(&target) {
                // Track which original generators compose the candidate; the
                // group phase is recomputed from them below.
                members.extend_from_slice(&pivot_members);
                target.mul_assign(&pivot_row);
            }
        }
        if !target.is_identity_pauli() {
            return false;
        }
        let mut acc = PauliRow::identity(self.n);
        let mut counts = vec![0usize; self.n];
        for m in members {
            counts[m] += 1;
        }
        for (i, c) in counts.iter().enumerate() {
            if c % 2 == 1 {
                acc.mul_assign(&self.rows[self.n + i]);
            }
        }
        acc.x == x && acc.z == z && acc.phase == phase
    }

    /// Expand the tableau into the stabilized statevector (up to global
    /// phase). Capped because the output is dense.
    pub fn to_statevector_capped(&self, cap: usize) -> Result<StateVector> {
        if self.n > cap {
            return Err(SimError::QubitCapExceeded {
                qubits: self.n,
                cap,
            });
        }
        let canon = self.canonical_form();
        let n = self.n;
        let dim = 1usize << n;
        // Basis point with nonzero support: solve z·x0 = r/2 over the pure-Z
        // stabilizer rows by Gaussian elimination.
        let mut eqs: Vec<(Vec<bool>, bool)> = canon.rows[n..]
            .iter()
            .filter(|r| !r.x.iter().any(|&b| b))
            .map(|r| (r.z.clone(), r.phase == 2))
            .collect();
        let mut x0 = vec![false; n];
        let mut row_i = 0usize;
        for col in 0..n {
            let Some(pivot) = (row_i..eqs.len()).find(|&r| eqs[r].0[col]) else {
                continue;
            };
            eqs.swap(row_i, pivot);
            let pivot_row = eqs[row_i].clone();
            for (r, eq) in eqs.iter_mut().enumerate() {
                if r != row_i && eq.0[col] {
                    for (av, bv) in eq.0.iter_mut().zip(pivot_row.0.iter()) {
                        *av ^= bv;
                    }
                    eq.1 ^= pivot_row.1;
                }
            }
            row_i += 1;
        }
        // After full reduction each pivot row reads x0[pivot_col] = rhs with
        // free coordinates fixed to 0.
        for (z, rhs) in eqs.iter().take(row_i) {
            let col = z.iter().position(|&b| b).expect("pivot vanished");
            x0[col] = *rhs;
        }
        let mut index0 = 0usize;
        for (j, &b) in x0.iter().enumerate() {
            if b {
                index0 |= 1 << j;
            }
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[index0] = Complex64::new(1.0, 0.0);
        let phase_table = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for row in &canon.rows[n..] {
            let mut xmask = 0usize;
            for (j, &b) in row.x.iter().enumerate() {
                if b {
                    xmask |= 1 << j;
                }
            }
            let mut next = v.clone();
            for (y, amp) in v.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let mut sign = false;
                for (j, &zb) in row.z.iter().enumerate() {
                    sign ^= zb && ((y >> j) & 1 == 1);
                }
                let mut factor = phase_table[row.phase as usize];
                if sign {
                    factor = -factor;
                }
                next[y ^ xmask] += factor * amp;
            }
            for nv in &mut next {
                *nv *= 0.5;
            }
            v = next;
        }
        StateVector::from_amplitudes(self.labels.in_index_order().to_vec(), v)
    }

    pub fn to_statevector(&self) -> Result<StateVector> {
        self.to_statevector_capped(DEFAULT_STATEVECTOR_CAP)
    }

    /// Structural validity: mutually commuting independent stabilizers,
    /// correctly paired destabilizers, Hermitian rows.
    pub fn check_valid(&self) -> std::result::Result<(), String> {
        let n = self.n;
        for (i, row) in self.rows.iter().enumerate() {
            let xz: u8 = row
                .x
                .iter()
                .zip(row.z.iter())
                .map(|(&a, &b)| u8::from(a && b))
                .sum::<u8>()
                & 1;
            if row.phase & 1 != xz {
                return Err(format!("row {i} is not Hermitian"));
            }
        }
        for i in n..2 * n {
            for j in (i + 1)..2 * n {
                if self.rows[i].anticommutes(&self.rows[j]) {
                    return Err(format!("stabilizers {} and {} anticommute", i - n, j - n));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let anti = self.rows[i].anticommutes(&self.rows[n + j]);
                if anti != (i == j) {
                    return Err(format!("destabilizer {i} pairing with stabilizer {j} broken"));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.rows[i].anticommutes(&self.rows[j]) {
                    return Err(format!("destabilizers {i} and {j} anticommute"));
                }
            }
        }
        // Independence: X|Z bit matrix of the stabilizers has rank n.
        let mut m: Vec<Vec<bool>> = self.rows[n..]
            .iter()
            .map(|r| r.x.iter().chain(r.z.iter()).copied().collect())
            .collect();
        let mut rank = 0;
        for col in 0..2 * n {
            if let Some(p) = (rank..n).find(|&r| m[r][col]) {
                m.swap(rank, p);
                let pivot_row = m[rank].clone();
                for (r, row) in m.iter_mut().enumerate() {
                    if r != rank && row[col] {
                        for (av, bv) in row.iter_mut().zip(pivot_row.iter()) {
                            *av ^= *bv;
                        }
                    }
                }
                rank += 1;
            }
        }
        if rank != n {
            return Err(format!("stabilizer rank {rank} < {n}"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::PROB_TOL;

    fn label(s: &str) -> Label {
        Label::new(s)
    }

    fn epr(a: &str, b: &str) -> StabilizerTableau {
        StabilizerTableau::make_state(&[(label(a), label(b))], &[]).unwrap()
    }

    #[test]
    fn epr_generators() {
        let t = epr("A", "B").canonical_form();
        let rows = t.stabilizer_rows();
        // Canonical order: X_A X_B then Z_A Z_B, both with phase +1.
        assert_eq!(rows[0], (vec![true, true], vec![false, false], 0));
        assert_eq!(rows[1], (vec![false, false], vec![true, true], 0));
        t.check_valid().unwrap();
    }

    #[test]
    fn h_cnot_from_zeros_gives_epr() {
        let mut t = StabilizerTableau::make_state(
            &[],
            &[
                (label("A"), SingleState::Zero),
                (label("B"), SingleState::Zero),
            ],
        )
        .unwrap();
        t.apply_h(&label("A")).unwrap();
        t.apply_cnot(&label("A"), &label("B")).unwrap();
        assert!(t.state_eq(&epr("A", "B")));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let mut t = StabilizerTableau::make_state(
            &[(label("A"), label("B")), (label("C"), label("D"))],
            &[],
        )
        .unwrap();
        t.apply_cnot(&label("A"), &label("C")).unwrap();
        t.apply_h(&label("D")).unwrap();
        let c1 = t.canonical_form();
        let c2 = c1.canonical_form();
        assert_eq!(c1.stabilizer_rows(), c2.stabilizer_rows());
        c1.check_valid().unwrap();
    }

    #[test]
    fn different_generator_sets_canonicalize_identically() {
        // Build |Ψ⁺⟩ twice through different circuits.
        let t1 = epr("A", "B");
        let mut t2 = StabilizerTableau::make_state(
            &[],
            &[
                (label("A"), SingleState::Plus),
                (label("B"), SingleState::Zero),
            ],
        )
        .unwrap();
        t2.apply_cnot(&label("A"), &label("B")).unwrap();
        assert_eq!(
            t1.canonical_form().stabilizer_rows(),
            t2.canonical_form().stabilizer_rows()
        );
    }

    #[test]
    fn measurement_classification() {
        // |0⟩: deterministic 0; |+⟩: uniform; |1⟩: deterministic 1.
        let mut zero =
            StabilizerTableau::make_state(&[], &[(label("A"), SingleState::Zero)]).unwrap();
        let m = zero.measure_z(&label("A"), OutcomePolicy::Forced(0)).unwrap();
        assert_eq!((m.bit, m.probability), (0, 1.0));
        assert!(matches!(
            zero.measure_z(&label("A"), OutcomePolicy::Forced(1)),
            Err(SimError::ImpossibleBranch { .. })
        ));

        let mut one =
            StabilizerTableau::make_state(&[], &[(label("A"), SingleState::One)]).unwrap();
        let m = one.measure_z(&label("A"), OutcomePolicy::Forced(1)).unwrap();
        assert_eq!((m.bit, m.probability), (1, 1.0));

        let mut plus =
            StabilizerTableau::make_state(&[], &[(label("A"), SingleState::Plus)]).unwrap();
        let m = plus.measure_z(&label("A"), OutcomePolicy::Forced(1)).unwrap();
        assert_eq!((m.bit, m.probability), (1, 0.5));
        plus.check_valid().unwrap();
        // Collapsed: now deterministic.
        let m2 = plus.measure_z(&label("A"), OutcomePolicy::Forced(1)).unwrap();
        assert_eq!((m2.bit, m2.probability), (1, 1.0));
    }

    #[test]
    fn epr_measurements_correlate() {
        let mut t = epr("A", "B");
        let m1 = t.measure_z(&label("A"), OutcomePolicy::Forced(1)).unwrap();
        assert_eq!(m1.probability, 0.5);
        let m2 = t.measure_z(&label("B"), OutcomePolicy::Forced(1)).unwrap();
        assert_eq!(m2.probability, 1.0);
        t.check_valid().unwrap();
    }

    #[test]
    fn drop_measured_qubit() {
        let mut t = StabilizerTableau::make_state(
            &[(label("A"), label("B"))],
            &[(label("C"), SingleState::Zero)],
        )
        .unwrap();
        assert!(matches!(
            t.drop_qubit(&label("A")),
            Err(SimError::NotDisposable(_))
        ));
        t.measure_z(&label("A"), OutcomePolicy::Forced(1)).unwrap();
        t.drop_qubit(&label("A")).unwrap();
        assert_eq!(t.qubit_count(), 2);
        t.check_valid().unwrap();
        // B collapsed to |1⟩, C still |0⟩.
        let m = t.measure_z(&label("B"), OutcomePolicy::Forced(1)).unwrap();
        assert_eq!(m.probability, 1.0);
        t.drop_qubit(&label("C")).unwrap();
        assert_eq!(t.qubit_count(), 1);
        t.check_valid().unwrap();
    }

    #[test]
    fn to_statevector_basics() {
        let zero = StabilizerTableau::make_state(&[], &[(label("A"), SingleState::Zero)]).unwrap();
        let sv = zero.to_statevector().unwrap();
        assert!((sv.amplitudes()[0].norm() - 1.0).abs() < PROB_TOL);

        let t = epr("A", "B");
        let sv = t.to_statevector().unwrap();
        let epr_sv = StateVector::make_state(&[(label("A"), label("B"))], &[]).unwrap();
        assert!((sv.fidelity_same_labels(&epr_sv).unwrap() - 1.0).abs() < 1e-12);

        let minus_one = {
            let mut t =
                StabilizerTableau::make_state(&[], &[(label("A"), SingleState::One)]).unwrap();
            t.apply_z(&label("A")).unwrap();
            t
        };
        let sv = minus_one.to_statevector().unwrap();
        let one = StateVector::make_state(&[], &[(label("A"), SingleState::One)]).unwrap();
        assert!((sv.fidelity_same_labels(&one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contains_pauli_finds_epr_factors() {
        let t = StabilizerTableau::make_state(
            &[(label("A"), label("B"))],
            &[(label("C"), SingleState::Plus)],
        )
        .unwrap();
        // +X_A X_B and +Z_A Z_B are in the group; -Z_A Z_B is not.
        assert!(t.contains_pauli(&[true, true, false], &[false, false, false], 0));
        assert!(t.contains_pauli(&[false, false, false], &[true, true, false], 0));
        assert!(!t.contains_pauli(&[false, false, false], &[true, true, false], 2));
        assert!(t.contains_pauli(&[false, false, true], &[false, false, false], 0));
        assert!(!t.contains_pauli(&[true, false, false], &[false, false, false], 0));
    }

    #[test]
    fn random_circuits_stay_valid_and_match_statevector() {
        use rand::RngCore;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let names = ["A", "B", "C", "D", "E"];
            let singles: Vec<(Label, SingleState)> = names
                .iter()
                .map(|s| (label(s), SingleState::Zero))
                .collect();
            let mut t = StabilizerTableau::make_state(&[], &singles).unwrap();
            let mut sv = StateVector::make_state(&[], &singles).unwrap();
            for _ in 0..25 {
                let q = label(names[(rng.next_u32() % 5) as usize]);
                match rng.next_u32() % 4 {
                    0 => {
                        t.apply_h(&q).unwrap();
                        sv.apply_h(&q).unwrap();
                    }
                    1 => {
                        t.apply_x(&q).unwrap();
                        sv.apply_x(&q).unwrap();
                    }
                    2 => {
                        t.apply_z(&q).unwrap();
                        sv.apply_z(&q).unwrap();
                    }
                    _ => {
                        let mut r = label(names[(rng.next_u32() % 5) as usize]);
                        while r == q {
                            r = label(names[(rng.next_u32() % 5) as usize]);
                        }
                        t.apply_cnot(&q, &r).unwrap();
                        sv.apply_cnot(&q, &r).unwrap();
                    }
                }
            }
            t.check_valid().unwrap();
            let converted = t.to_statevector().unwrap();
            let f = converted.fidelity_same_labels(&sv).unwrap();
            assert!((f - 1.0).abs() < 1e-10, "fidelity {f}");
        }
    }
}
