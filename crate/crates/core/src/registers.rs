//! Register labels and the label <-> qubit-index directory shared by both
//! simulation backends.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Result, SimError};

/// Name of a one-qubit register, e.g. `A`, `E'`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({})", self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

/// Position of a register in the tensor order. The register at index `i`
/// corresponds to bit `i` of the basis-state integer (little-endian).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct QubitIndex(pub usize);

/// Bijection between register labels and qubit indices.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct LabelMap {
    by_label: BTreeMap<Label, usize>,
    by_index: Vec<Label>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.by_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_index.is_empty()
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.by_label.contains_key(label)
    }

    /// Append a fresh label at the next free index.
    pub fn push(&mut self, label: Label) -> Result<QubitIndex> {
        if self.contains(&label) {
            return Err(SimError::DuplicateLabel(label));
        }
        let idx = self.by_index.len();
        self.by_label.insert(label.clone(), idx);
        self.by_index.push(label);
        Ok(QubitIndex(idx))
    }

    pub fn index_of(&self, label: &Label) -> Result<QubitIndex> {
        self.by_label
            .get(label)
            .copied()
            .map(QubitIndex)
            .ok_or_else(|| SimError::UnknownLabel(label.clone()))
    }

    pub fn label_at(&self, index: usize) -> &Label {
        &self.by_index[index]
    }

    /// Remove a label; every register above it shifts down one index.
    pub fn remove(&mut self, label: &Label) -> Result<usize> {
        let idx = self.index_of(label)?.0;
        self.by_index.remove(idx);
        self.by_label.remove(label);
        for (i, l) in self.by_index.iter().enumerate().skip(idx) {
            *self.by_label.get_mut(l).expect("directory out of sync") = i;
        }
        Ok(idx)
    }

    /// Labels in tensor order (index 0 first).
    pub fn in_index_order(&self) -> &[Label] {
        &self.by_index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_lookup() {
        let mut m = LabelMap::new();
        assert_eq!(m.push(Label::new("A")).unwrap(), QubitIndex(0));
        assert_eq!(m.push(Label::new("B")).unwrap(), QubitIndex(1));
        assert_eq!(m.index_of(&Label::new("B")).unwrap(), QubitIndex(1));
        assert!(matches!(
            m.push(Label::new("A")),
            Err(SimError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn remove_shifts_higher_indices() {
        let mut m = LabelMap::new();
        for name in ["A", "B", "C"] {
            m.push(Label::new(name)).unwrap();
        }
        assert_eq!(m.remove(&Label::new("B")).unwrap(), 1);
        assert_eq!(m.index_of(&Label::new("A")).unwrap(), QubitIndex(0));
        assert_eq!(m.index_of(&Label::new("C")).unwrap(), QubitIndex(1));
        assert!(m.index_of(&Label::new("B")).is_err());
    }
}
