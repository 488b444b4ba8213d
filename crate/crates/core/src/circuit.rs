//! Finite charge-transfer circuit between G-product states.
//!
//! Every site `j` of a window `[0, n)` carries an original two-level space
//! `{e, ν}` (with `ν` of charge `q_j`) stacked with an auxiliary space
//! `{e', ν', ξ'}`. One extra edge site `n` closes the window. Local basis index
//! is `orig·3 + aux`; on a two-site support the first site is most significant.
//!
//! Three layers of equivariant swaps move the charges off the window:
//!
//! * `T_i` (single site): `(ν, e') ↔ (e, ν')` — charge leaves the original chain;
//! * `V_0` on site 0: `ν' ↔ ξ'`; `V_j` (odd `j`) on `(j, j+1)`: `(ν', ν') ↔ (ξ', ξ')`
//!   — charges accumulate, with `ξ'_j` carrying `c_j`;
//! * `W_{2k}` on `(2k, 2k+1)`: `(ξ', ξ') ↔ (e', e')` — opposite charges cancel.
//!
//! With `P_m = q_m ⋯ q_0`, the `ξ'` charges are `c_0 = q_0`, `c_{2m+1} = P̄_{2m}`
//! and `c_{2m+2} = P_{2m+2}`, so `V` and `W` swap states of equal charge. The
//! edge site ends holding `ξ'_n` with the total charge `P_{n-1}`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::charge::Charge;
use crate::error::{Error, Result};
use crate::factory::ChargedProductSpec;
use crate::group::FiniteGroup;
use crate::linalg::{frobenius, identity, CMatrix};
use crate::projrep::{matrix_from_json, matrix_to_json};

/// Largest window for which the circuit is built and simulated.
pub const CIRCUIT_LENGTH_GUARD: usize = 24;
/// Equivariance tolerance for every emitted gate.
pub const EQUIVARIANCE_TOL: f64 = 1e-12;
/// Dimension of one site: `{e, ν} ⊗ {e', ν', ξ'}`.
pub const SITE_DIM: usize = 6;

const ORIG_E: usize = 0;
const ORIG_NU: usize = 1;
const AUX_E: usize = 0;
const AUX_NU: usize = 1;
const AUX_XI: usize = 2;

fn local(orig: usize, aux: usize) -> usize {
    orig * 3 + aux
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layer {
    T,
    V,
    W,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Layer::T => "T",
            Layer::V => "V",
            Layer::W => "W",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Gate {
    /// First and last site of the (contiguous) support.
    pub support: (usize, usize),
    pub matrix: CMatrix,
    pub layer: Layer,
}

impl Gate {
    pub fn sites(&self) -> Vec<usize> {
        (self.support.0..=self.support.1).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GateCircuit {
    pub group: Arc<FiniteGroup>,
    /// Number of window sites; the circuit acts on `length + 1` sites including the edge.
    pub length: usize,
    pub gates: Vec<Gate>,
    /// Charge of each local basis state, per site and group element.
    site_charges: Vec<[Charge; SITE_DIM]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateJson {
    pub support: [usize; 2],
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub layer: Layer,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitJson {
    pub group: String,
    pub length: usize,
    pub gates: Vec<GateJson>,
}

/// Output of [`charge_transfer_circuit`].
#[derive(Clone, Debug)]
pub struct ChargeTransfer {
    pub circuit: GateCircuit,
    /// Initial total charge per site (window plus edge site).
    pub initial: ChargedProductSpec,
    /// Final total charge per site; trivial on the window, total charge on the edge site.
    pub final_spec: ChargedProductSpec,
    pub initial_config: Vec<usize>,
    pub final_config: Vec<usize>,
}

/// Sparse vector over product-basis configurations.
pub type SparseState = BTreeMap<Vec<usize>, C64>;

fn swap_matrix(dim: usize, a: usize, b: usize) -> CMatrix {
    let mut m = identity(dim);
    if a != b {
        m[(a, a)] = C64::default();
        m[(b, b)] = C64::default();
        m[(a, b)] = C64::new(1.0, 0.0);
        m[(b, a)] = C64::new(1.0, 0.0);
    }
    m
}

/// Build the three-layer circuit for a window of even length `length`.
pub fn charge_transfer_circuit(spec: &ChargedProductSpec, length: usize) -> Result<ChargeTransfer> {
    if length == 0 || length % 2 != 0 {
        return Err(Error::Validation(format!("window length must be even and positive, got {length}")));
    }
    if length > CIRCUIT_LENGTH_GUARD {
        return Err(Error::Guard(format!("window length {length} exceeds {CIRCUIT_LENGTH_GUARD}")));
    }
    if let Some(j) = (length..spec.len()).find(|&j| !spec.charges[j].is_trivial()) {
        return Err(Error::Validation(format!(
            "site {j} lies outside the window [0, {length}) but carries a nontrivial charge"
        )));
    }
    let group = spec.group.clone();
    let trivial = Charge::trivial(group.clone());
    let q: Vec<Charge> =
        (0..=length).map(|j| spec.charges.get(j).cloned().filter(|_| j < length).unwrap_or_else(|| trivial.clone())).collect();

    // P_m = q_m ⋯ q_0 and the ξ' charges c_j
    let mut prefix = Vec::with_capacity(length + 1);
    let mut acc = trivial.clone();
    for qj in &q {
        acc = acc.product(qj)?;
        prefix.push(acc.clone());
    }
    let c: Vec<Charge> = (0..=length)
        .map(|j| match j {
            0 => q[0].clone(),
            j if j % 2 == 1 => prefix[j - 1].conjugate(),
            j => prefix[j].clone(),
        })
        .collect();

    let site_charges: Vec<[Charge; SITE_DIM]> = (0..=length)
        .map(|j| {
            let orig = [trivial.clone(), q[j].clone()];
            let aux = [trivial.clone(), q[j].clone(), c[j].clone()];
            std::array::from_fn(|k| orig[k / 3].product(&aux[k % 3]).expect("same group"))
        })
        .collect();

    let special = spec.is_special();
    let gate = |support: (usize, usize), a: usize, b: usize, layer: Layer| {
        let dim = SITE_DIM.pow((support.1 - support.0 + 1) as u32);
        let matrix = if special { identity(dim) } else { swap_matrix(dim, a, b) };
        Gate { support, matrix, layer }
    };
    let pair = |x: usize, y: usize| x * SITE_DIM + y;

    let mut gates = Vec::new();
    for i in 0..length {
        gates.push(gate((i, i), local(ORIG_NU, AUX_E), local(ORIG_E, AUX_NU), Layer::T));
    }
    gates.push(gate((0, 0), local(ORIG_E, AUX_NU), local(ORIG_E, AUX_XI), Layer::V));
    for j in (1..length).step_by(2) {
        // the edge site enters with e' rather than ν'
        let right = if j + 1 == length { local(ORIG_E, AUX_E) } else { local(ORIG_E, AUX_NU) };
        let xi = local(ORIG_E, AUX_XI);
        gates.push(gate((j, j + 1), pair(local(ORIG_E, AUX_NU), right), pair(xi, xi), Layer::V));
    }
    for k in (0..length).step_by(2) {
        let xi = local(ORIG_E, AUX_XI);
        let e = local(ORIG_E, AUX_E);
        gates.push(gate((k, k + 1), pair(xi, xi), pair(e, e), Layer::W));
    }

    let circuit = GateCircuit { group: group.clone(), length, gates, site_charges };
    let (initial_config, final_config) = if special {
        let cfg: Vec<usize> = (0..=length).map(|j| if j < length { local(ORIG_NU, AUX_E) } else { local(ORIG_E, AUX_E) }).collect();
        (cfg.clone(), cfg)
    } else {
        let init = (0..=length).map(|j| if j < length { local(ORIG_NU, AUX_E) } else { local(ORIG_E, AUX_E) }).collect();
        let fin = (0..=length).map(|j| if j < length { local(ORIG_E, AUX_E) } else { local(ORIG_E, AUX_XI) }).collect();
        (init, fin)
    };
    let spec_of = |cfg: &[usize]| -> Result<ChargedProductSpec> {
        let charges = cfg.iter().enumerate().map(|(j, &s)| circuit.site_charges[j][s].clone()).collect();
        ChargedProductSpec::new(group.clone(), charges)
    };
    let initial = spec_of(&initial_config)?;
    let final_spec = spec_of(&final_config)?;
    Ok(ChargeTransfer { circuit, initial, final_spec, initial_config, final_config })
}

impl GateCircuit {
    /// Diagonal on-site action of `g` on the local basis of site `j`.
    pub fn site_action(&self, j: usize, g: usize) -> CMatrix {
        let mut m = CMatrix::zeros(SITE_DIM, SITE_DIM);
        for (k, q) in self.site_charges[j].iter().enumerate() {
            m[(k, k)] = q.value(g).to_complex();
        }
        m
    }

    fn support_action(&self, gate: &Gate, g: usize) -> CMatrix {
        gate.sites().iter().fold(identity(1), |acc, &j| crate::linalg::kron(&acc, &self.site_action(j, g)))
    }

    /// `max_g ‖[gate, U_support(g)]‖_F` for every gate.
    pub fn equivariance_residuals(&self) -> Vec<f64> {
        self.gates
            .iter()
            .map(|gate| {
                self.group
                    .elements()
                    .map(|g| {
                        let u = self.support_action(gate, g);
                        frobenius(&(&gate.matrix * &u - &u * &gate.matrix))
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Whether gates within each layer have pairwise disjoint supports.
    pub fn layers_disjoint(&self) -> bool {
        for layer in [Layer::T, Layer::V, Layer::W] {
            let mut used = vec![false; self.length + 1];
            for gate in self.gates.iter().filter(|g| g.layer == layer) {
                for j in gate.sites() {
                    if used[j] {
                        return false;
                    }
                    used[j] = true;
                }
            }
        }
        true
    }

    pub fn apply_gate(&self, gate: &Gate, state: &SparseState) -> SparseState {
        let sites = gate.sites();
        let mut out = SparseState::new();
        for (cfg, amp) in state {
            let col = sites.iter().fold(0, |acc, &j| acc * SITE_DIM + cfg[j]);
            for row in 0..gate.matrix.nrows() {
                let entry = gate.matrix[(row, col)];
                if entry == C64::default() {
                    continue;
                }
                let mut next = cfg.clone();
                let mut rest = row;
                for &j in sites.iter().rev() {
                    next[j] = rest % SITE_DIM;
                    rest /= SITE_DIM;
                }
                *out.entry(next).or_default() += entry * amp;
            }
        }
        out.retain(|_, a| a.norm() > 0.0);
        out
    }

    pub fn apply(&self, state: &SparseState) -> SparseState {
        self.gates.iter().fold(state.clone(), |s, gate| self.apply_gate(gate, &s))
    }

    /// Hermitian generators `H = (π/2)(1 − G)` with `exp(iH) = G`, one slice per layer.
    pub fn layer_generators(&self) -> Vec<Vec<((usize, usize), CMatrix)>> {
        [Layer::T, Layer::V, Layer::W]
            .iter()
            .map(|&layer| {
                self.gates
                    .iter()
                    .filter(|g| g.layer == layer)
                    .map(|g| {
                        let dim = g.matrix.nrows();
                        (g.support, (identity(dim) - &g.matrix) * C64::new(FRAC_PI_2, 0.0))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> CircuitJson {
        CircuitJson {
            group: self.group.name().to_string(),
            length: self.length,
            gates: self
                .gates
                .iter()
                .map(|g| GateJson { support: [g.support.0, g.support.1], matrix: matrix_to_json(&g.matrix), layer: g.layer })
                .collect(),
        }
    }
}

/// Parse a gate list (no charge data is stored in the JSON form).
pub fn gates_from_json(j: &CircuitJson) -> Result<Vec<Gate>> {
    j.gates
        .iter()
        .map(|g| {
            if g.support[0] > g.support[1] || g.support[1] - g.support[0] > 1 {
                return Err(Error::Validation(format!("gate support {:?} is not an interval of at most 2 sites", g.support)));
            }
            Ok(Gate { support: (g.support[0], g.support[1]), matrix: matrix_from_json(&g.matrix)?, layer: g.layer })
        })
        .collect()
}

/// Overlap `⟨a|b⟩` of two sparse states.
pub fn overlap(a: &SparseState, b: &SparseState) -> C64 {
    a.iter().filter_map(|(k, x)| b.get(k).map(|y| x.conj() * y)).sum()
}

pub fn basis_state(cfg: &[usize]) -> SparseState {
    let mut s = SparseState::new();
    s.insert(cfg.to_vec(), C64::new(1.0, 0.0));
    s
}
