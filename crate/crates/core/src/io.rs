//! JSON file formats shared by the library and the command-line tool.
//!
//! Groups are referenced either by catalog name (`"Z2xZ2"`, `"d4"`, …) or by an
//! inline table object. Complex matrices are nested arrays of `[re, im]` pairs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charge::Charge;
use crate::cohomology::{Cocycle, CocycleJson};
use crate::detector::DetectorKind;
use crate::error::{Error, Result};
use crate::factory::{ChargedProductJson, ChargedProductSpec};
use crate::group::{FiniteGroup, GroupJson};
use crate::mps::SymmetricMPS;
use crate::phase::PhaseValue;
use crate::projrep::{matrix_from_json, matrix_to_json, MultiplierRep, RepJson};

/// Either a catalog name or an explicit table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Table(GroupJson),
}

impl GroupRef {
    pub fn resolve(&self) -> Result<Arc<FiniteGroup>> {
        match self {
            GroupRef::Name(n) => Ok(Arc::new(catalog_group(n)?)),
            GroupRef::Table(t) => Ok(Arc::new(FiniteGroup::from_json(t)?)),
        }
    }
}

/// Catalog lookup that ignores letter case (`z2xz2`, `Z2XZ2`, `q8`).
pub fn catalog_group(name: &str) -> Result<FiniteGroup> {
    let canonical = name.trim().to_uppercase().replace('X', "x");
    FiniteGroup::catalog(&canonical)
}

/// Parse JSON, keeping serde's line/column information in the error.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// A group file is either a table object or a bare catalog name string.
pub fn group_from_str(text: &str) -> Result<Arc<FiniteGroup>> {
    parse::<GroupRef>(text)?.resolve()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub label: String,
    pub group: GroupRef,
    /// `tensor[i]` is the `D×D` matrix `A^i`.
    pub tensor: Vec<Vec<Vec<[f64; 2]>>>,
    /// `onsite[g]` is the `d×d` matrix `U(g)`.
    pub onsite: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<String>,
}

pub fn state_to_json(m: &SymmetricMPS) -> StateJson {
    let group = if catalog_group(m.group().name()).map(|g| g.same_table(m.group())).unwrap_or(false) {
        GroupRef::Name(m.group().name().to_string())
    } else {
        GroupRef::Table(m.group().to_json())
    };
    StateJson {
        label: m.label().to_string(),
        group,
        tensor: m.tensor().iter().map(matrix_to_json).collect(),
        onsite: m.onsite().iter().map(matrix_to_json).collect(),
        detector: m.detector().map(|k| k.to_string()),
    }
}

pub fn state_from_json(j: &StateJson) -> Result<SymmetricMPS> {
    let group = j.group.resolve()?;
    let tensor = j.tensor.iter().map(|a| matrix_from_json(a)).collect::<Result<Vec<_>>>()?;
    let onsite = j.onsite.iter().map(|u| matrix_from_json(u)).collect::<Result<Vec<_>>>()?;
    let mut m = SymmetricMPS::new(j.label.clone(), tensor, group, onsite)?;
    if let Some(d) = &j.detector {
        m.set_detector(Some(d.parse::<DetectorKind>()?));
    }
    Ok(m)
}

/// Group named inside a cocycle/charge/rep file, unless one is supplied explicitly.
fn group_or_named(name: &str, explicit: Option<Arc<FiniteGroup>>) -> Result<Arc<FiniteGroup>> {
    match explicit {
        Some(g) => Ok(g),
        None => Ok(Arc::new(catalog_group(name).map_err(|_| {
            Error::Validation(format!("group '{name}' is not in the catalog; pass the group table explicitly"))
        })?)),
    }
}

pub fn cocycle_from_str(text: &str, group: Option<Arc<FiniteGroup>>) -> Result<Cocycle> {
    let j: CocycleJson = parse(text)?;
    let g = group_or_named(&j.group, group)?;
    Cocycle::from_json(&j, g)
}

pub fn rep_from_str(text: &str, group: Option<Arc<FiniteGroup>>) -> Result<MultiplierRep> {
    let j: RepJson = parse(text)?;
    let g = group_or_named(&j.group, group)?;
    MultiplierRep::from_json(&j, g)
}

/// Charges file: either a full product spec or a list of cyclic exponents on `Z_n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChargesFile {
    Spec(ChargedProductJson),
    /// `{"group": "Z4", "exponents": [k_0, k_1, …]}`: site `j` carries `g ↦ e^{2πi k_j g/n}`.
    Cyclic { group: String, exponents: Vec<i64> },
}

pub fn charges_from_str(text: &str, group: Option<Arc<FiniteGroup>>) -> Result<ChargedProductSpec> {
    match parse::<ChargesFile>(text)? {
        ChargesFile::Spec(j) => {
            let g = group_or_named(&j.group, group)?;
            ChargedProductSpec::from_json(&j, g)
        }
        ChargesFile::Cyclic { group: name, exponents } => {
            let g = group_or_named(&name, group)?;
            if !g.is_abelian() || g.order() > 1 && g.element_order(1) != g.order() {
                return Err(Error::Validation("exponent lists need a cyclic group in catalog order".into()));
            }
            let charges = exponents.iter().map(|&k| Charge::cyclic_character(g.clone(), k)).collect::<Result<Vec<_>>>()?;
            ChargedProductSpec::new(g, charges)
        }
    }
}

/// Render phases compactly for reports: `p/q` for exact values, the angle in turns otherwise.
pub fn phase_label(p: &PhaseValue) -> String {
    match p {
        PhaseValue::Exact { num, den } => format!("{num}/{den}"),
        PhaseValue::Approx { .. } => format!("{:.12}", p.turns()),
    }
}
