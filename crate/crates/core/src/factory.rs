//! Explicit symmetric states: AKLT, cluster, charged products and fixed-point
//! states realizing a prescribed cohomology class.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::charge::{Charge, ChargeJson};
use crate::cohomology::{normalize, Cocycle};
use crate::detector::CompactDetectorSpec;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{c, kron, pauli, CMatrix};
use crate::mps::SymmetricMPS;
use crate::projrep::{regular_projective_rep, MultiplierRep};

/// Per-site charges `q_j` of a product state, with a label for each site's basis vector.
#[derive(Clone, Debug)]
pub struct ChargedProductSpec {
    pub group: Arc<FiniteGroup>,
    pub charges: Vec<Charge>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChargedProductJson {
    pub group: String,
    pub charges: Vec<ChargeJson>,
    #[serde(default)]
    pub labels: Vec<String>,
}

impl ChargedProductSpec {
    pub fn new(group: Arc<FiniteGroup>, charges: Vec<Charge>) -> Result<Self> {
        for (j, q) in charges.iter().enumerate() {
            if !q.group().same_table(&group) {
                return Err(Error::GroupMismatch(q.group().name().into(), group.name().into()));
            }
            if !q.validate().is_empty() {
                return Err(Error::Validation(format!("charge at site {j} is not multiplicative")));
            }
        }
        let labels = (0..charges.len()).map(|j| format!("xi_{j}")).collect();
        Ok(ChargedProductSpec { group, charges, labels })
    }

    pub fn len(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    /// Whether every on-site charge is trivial (a special product state).
    pub fn is_special(&self) -> bool {
        self.charges.iter().all(Charge::is_trivial)
    }

    pub fn to_json(&self) -> ChargedProductJson {
        ChargedProductJson {
            group: self.group.name().to_string(),
            charges: self.charges.iter().map(Charge::to_json).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_json(j: &ChargedProductJson, group: Arc<FiniteGroup>) -> Result<Self> {
        let charges = j.charges.iter().map(|q| Charge::from_json(q, group.clone())).collect::<Result<Vec<_>>>()?;
        let mut spec = ChargedProductSpec::new(group, charges)?;
        if !j.labels.is_empty() {
            if j.labels.len() != spec.len() {
                return Err(Error::Validation("one basis label per site is required".into()));
            }
            spec.labels = j.labels.clone();
        }
        Ok(spec)
    }
}

/// AKLT chain in the basis `m = +1, 0, −1`, probed by the SO(3) detector.
pub fn aklt() -> SymmetricMPS {
    let a = (2.0f64 / 3.0).sqrt();
    let b = (1.0f64 / 3.0).sqrt();
    let z = c(0.0, 0.0);
    let plus = CMatrix::from_row_slice(2, 2, &[z, c(a, 0.0), z, z]);
    let zero = CMatrix::from_row_slice(2, 2, &[c(-b, 0.0), z, z, c(b, 0.0)]);
    let minus = CMatrix::from_row_slice(2, 2, &[z, z, c(-a, 0.0), z]);
    SymmetricMPS::with_detector("aklt", vec![plus, zero, minus], &CompactDetectorSpec::so3(2)).expect("AKLT tensor is valid")
}

/// Spin-`two_s/2` product of `|m = 0⟩` (or the lowest weight for half-integer spin), SO(3) detector.
pub fn spin_product(two_s: usize) -> SymmetricMPS {
    let d = two_s + 1;
    let k = d / 2;
    let tensor = (0..d).map(|i| CMatrix::from_element(1, 1, c(if i == k { 1.0 } else { 0.0 }, 0.0))).collect();
    SymmetricMPS::with_detector("spin-product", tensor, &CompactDetectorSpec::so3(two_s)).expect("product tensor is valid")
}

/// Cluster state, two sites blocked into one (`d = 4`), with `Z2xZ2` acting as
/// `X^a ⊗ X^b` on element `a + 2b`.
pub fn cluster() -> SymmetricMPS {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a0 = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]);
    let a1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0), c(-h, 0.0)]);
    let single = [a0, a1];
    let tensor = single.iter().flat_map(|x| single.iter().map(move |y| x * y)).collect();
    let group = Arc::new(FiniteGroup::catalog("Z2xZ2").expect("catalog"));
    let (x, _, _) = pauli();
    let id = crate::linalg::identity(2);
    let onsite = (0..4)
        .map(|g| {
            let first = if g & 1 == 1 { &x } else { &id };
            let second = if g & 2 == 2 { &x } else { &id };
            kron(first, second)
        })
        .collect();
    SymmetricMPS::new("cluster", tensor, group, onsite).expect("cluster tensor is valid")
}

/// `d = D = 1` product state whose single basis vector carries charge `q`.
pub fn product_state(q: &Charge) -> SymmetricMPS {
    let onsite = q.values().iter().map(|p| CMatrix::from_element(1, 1, p.to_complex())).collect();
    SymmetricMPS::new("product", vec![CMatrix::from_element(1, 1, c(1.0, 0.0))], q.group().clone(), onsite)
        .expect("a valid charge is a one-dimensional representation")
}

/// Bonded-singlet state with on-site action `v(g) ⊗ conj(v(g))`, built on the
/// regular `μ`-projective representation.
pub fn fixed_point_state(mu: &Cocycle) -> Result<SymmetricMPS> {
    let rep = regular_projective_rep(&normalize(mu)?)?;
    fixed_point_state_from_rep(&rep)
}

/// Bonded-singlet state from a chosen projective representation `v`.
///
/// Physical index `(a, b) ↦ a·D + b` and `A^{(a,b)} = E_{ba}/√D`, so that
/// `Σ_j U(g)_{ij} A^j = v(g)† A^i v(g)`: the edge action is `v` itself and the
/// transfer map is the one-shot projection `X ↦ tr(X)·1/D`.
pub fn fixed_point_state_from_rep(rep: &MultiplierRep) -> Result<SymmetricMPS> {
    let d = rep.dim();
    let scale = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut tensor = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut m = CMatrix::zeros(d, d);
            m[(b, a)] = scale;
            tensor.push(m);
        }
    }
    let onsite = rep.matrices().iter().map(|v| kron(v, &v.map(|z| z.conj()))).collect();
    SymmetricMPS::new(format!("fixed-point[{}]", rep.group().name()), tensor, rep.group().clone(), onsite)
}

/// Parameters for [`catalog_state`].
#[derive(Clone, Debug, Default)]
pub struct CatalogParams {
    /// Charge of the product state's basis vector; trivial `Z2xZ2` charge if absent.
    pub charge: Option<Charge>,
}

pub fn catalog_state(name: &str, params: &CatalogParams) -> Result<SymmetricMPS> {
    match name.to_ascii_lowercase().as_str() {
        "aklt" => Ok(aklt()),
        "cluster" => Ok(cluster()),
        "product" => {
            let q = match &params.charge {
                Some(q) => q.clone(),
                None => Charge::trivial(Arc::new(FiniteGroup::catalog("Z2xZ2")?)),
            };
            Ok(product_state(&q))
        }
        other => Err(Error::Validation(format!("unknown catalog state '{other}' (expected aklt, cluster or product)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{classify, compute_h2};
    use crate::index::{compute_index, compute_index_with};
    use crate::mps::{connected_correlation, schmidt_spectrum, transfer_fixed_point};
    use crate::projrep::pauli_rep;

    fn all_catalog() -> Vec<SymmetricMPS> {
        let mut out = vec![aklt(), cluster(), spin_product(2)];
        out.push(fixed_point_state_from_rep(&pauli_rep()).unwrap());
        out
    }

    #[test]
    fn catalog_states_are_symmetric() {
        for m in all_catalog() {
            let m = m.canonicalize().unwrap();
            for u in m.onsite() {
                let fp = transfer_fixed_point(&m, Some(u)).unwrap();
                assert!((fp.eigenvalue.norm() - 1.0).abs() < 1e-8, "{}", m.label());
            }
            let spec = schmidt_spectrum(&m).unwrap();
            assert!((spec.values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let bond = m.bond_dim() as f64;
            assert!(spec.values[0] >= 1.0 / (bond * bond));
        }
    }

    #[test]
    fn cluster_spectrum() {
        let spec = schmidt_spectrum(&cluster().canonicalize().unwrap()).unwrap();
        assert!((spec.values[0] - 0.5).abs() < 1e-10 && (spec.values[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_roundtrip_for_all_generators() {
        for name in ["Z2xZ2", "Z2xZ2xZ2", "Z3xZ3", "Z2xZ4", "D4", "Z4"] {
            let g = Arc::new(FiniteGroup::catalog(name).unwrap());
            let h2 = Arc::new(compute_h2(g).unwrap());
            for class in h2.all_classes() {
                let mu = class.representative();
                let m = fixed_point_state(mu).unwrap();
                let res = compute_index_with(&m, &h2).unwrap();
                assert_eq!(res.class, classify(mu).unwrap(), "{name}");
            }
        }
    }

    #[test]
    fn fixed_point_correlations_vanish() {
        let m = fixed_point_state_from_rep(&pauli_rep()).unwrap().canonicalize().unwrap();
        let (x, _, z) = pauli();
        let op_a = kron(&x, &z);
        let op_b = kron(&z, &crate::linalg::identity(2));
        for r in 2..6 {
            assert!(connected_correlation(&m, &op_a, &op_b, r).unwrap().norm() < 1e-12);
        }
        assert!(!compute_index(&m).unwrap().trivial);
    }

    #[test]
    fn trivial_cocycle_gives_trivial_index() {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let m = fixed_point_state(&Cocycle::trivial(g)).unwrap();
        assert_eq!(m.bond_dim(), 2);
        assert!(compute_index(&m).unwrap().trivial);
    }

    #[test]
    fn catalog_names() {
        assert!(compute_index(&catalog_state("product", &CatalogParams::default()).unwrap()).unwrap().trivial);
        assert!(!compute_index(&catalog_state("cluster", &CatalogParams::default()).unwrap()).unwrap().trivial);
        assert!(catalog_state("ising", &CatalogParams::default()).is_err());
    }
}
