//! One-dimensional charges: homomorphisms `G -> U(1)` given by value tables.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::phase::{PhaseValue, PHASE_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct Charge {
    group: Arc<FiniteGroup>,
    values: Vec<PhaseValue>,
}

/// A pair `(g, h)` at which `q(gh) != q(g) q(h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChargeViolation {
    pub g: usize,
    pub h: usize,
}

/// JSON form: `{"group": str, "phases": [{"num":p,"den":q}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChargeJson {
    pub group: String,
    pub phases: Vec<PhaseValue>,
}

impl Charge {
    /// Wrap a value table; the table is not required to be multiplicative, see [`Charge::validate`].
    pub fn new(group: Arc<FiniteGroup>, values: Vec<PhaseValue>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::Validation(format!(
                "charge has {} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        Ok(Charge { group, values })
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let values = vec![PhaseValue::ONE; group.order()];
        Charge { group, values }
    }

    /// The character `g -> e^{2πi k g / n}` of a cyclic group `Zn` (catalog ordering).
    pub fn cyclic_character(group: Arc<FiniteGroup>, k: i64) -> Result<Self> {
        let n = group.order();
        let values = (0..n).map(|g| PhaseValue::exact(k * g as i64, n as u64)).collect();
        let q = Charge::new(group, values)?;
        if !q.validate().is_empty() {
            return Err(Error::Validation(format!("{} is not cyclic in catalog ordering", q.group.name())));
        }
        Ok(q)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[PhaseValue] {
        &self.values
    }

    pub fn value(&self, g: usize) -> PhaseValue {
        self.values[g]
    }

    /// Every pair `(g, h)` violating multiplicativity (and `(e, e)` if `q(e) != 1`).
    pub fn validate(&self) -> Vec<ChargeViolation> {
        let g = &self.group;
        let mut out = Vec::new();
        if !self.values[0].is_one(PHASE_TOL) {
            out.push(ChargeViolation { g: 0, h: 0 });
        }
        for a in g.elements() {
            for b in g.elements() {
                let lhs = self.values[g.mul(a, b)];
                let rhs = self.values[a].mul(&self.values[b]);
                if !lhs.approx_eq(&rhs, PHASE_TOL) && !(a == 0 && b == 0) {
                    out.push(ChargeViolation { g: a, h: b });
                }
            }
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one(PHASE_TOL))
    }

    pub fn product(&self, other: &Charge) -> Result<Charge> {
        if !self.group.same_table(&other.group) {
            return Err(Error::GroupMismatch(self.group.name().into(), other.group.name().into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.mul(b)).collect();
        Ok(Charge { group: self.group.clone(), values })
    }

    pub fn conjugate(&self) -> Charge {
        Charge { group: self.group.clone(), values: self.values.iter().map(|v| v.inv()).collect() }
    }

    pub fn approx_eq(&self, other: &Charge, tol: f64) -> bool {
        self.group.same_table(&other.group)
            && self.values.iter().zip(&other.values).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn to_json(&self) -> ChargeJson {
        ChargeJson { group: self.group.name().to_string(), phases: self.values.clone() }
    }

    pub fn from_json(j: &ChargeJson, group: Arc<FiniteGroup>) -> Result<Self> {
        Charge::new(group, j.phases.clone())
    }
}
