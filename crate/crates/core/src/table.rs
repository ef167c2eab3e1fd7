use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Value;
use crate::subset::SubsetMask;

/// How an index value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Quadrature => "quadrature",
            Provenance::MonteCarlo => "monte_carlo",
        })
    }
}

/// An index value with provenance. `stderr` is present exactly for Monte Carlo values.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexValue {
    value: Value,
    provenance: Provenance,
    stderr: Option<f64>,
}

impl IndexValue {
    pub fn closed_form(value: Value) -> Self {
        IndexValue {
            value,
            provenance: Provenance::ClosedForm,
            stderr: None,
        }
    }

    pub fn quadrature(value: f64) -> Self {
        IndexValue {
            value: Value::Approx(value),
            provenance: Provenance::Quadrature,
            stderr: None,
        }
    }

    pub fn monte_carlo(value: f64, stderr: f64) -> Self {
        IndexValue {
            value: Value::Approx(value),
            provenance: Provenance::MonteCarlo,
            stderr: Some(stderr),
        }
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        use crate::scalar::Scalar;
        self.value.to_f64()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn stderr(&self) -> Option<f64> {
        self.stderr
    }
}

/// `S ↦ 𝓘(f, S)` over a family of subsets, iterated in report order
/// (cardinality, then lexicographic).
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionTable {
    n: usize,
    entries: BTreeMap<SubsetMask, IndexValue>,
}

impl InteractionTable {
    pub fn new(n: usize) -> Self {
        InteractionTable {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, s: SubsetMask, value: IndexValue) -> Result<()> {
        if s.n() != self.n {
            return Err(Error::invalid(format!(
                "subset {s} does not belong to a ground set of size {}",
                self.n
            )));
        }
        self.entries.insert(s, value);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: SubsetMask) -> Option<&IndexValue> {
        self.entries.get(&s)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetMask, &IndexValue)> + '_ {
        self.entries.iter().map(|(s, v)| (*s, v))
    }

    /// True when every entry is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.entries.values().all(|v| v.value.is_exact())
    }
}
