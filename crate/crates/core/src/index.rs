//! The SPT index of a symmetric injective MPS.
//!
//! For a left-canonical tensor with right fixed point `r`, a symmetry satisfies
//! `Σ_j U(g)_ij A^j = e^{iθ(g)} u(g)† A^i u(g)`. The `U(g)`-twisted transfer map
//! then has leading eigenvalue `e^{iθ(g)}` with eigenmatrix `u(g)† r`, from which
//! `u(g)` is recovered. The edge unitaries form a projective representation
//! whose class in `H²(G, U(1))` is the index.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::charge::Charge;
use crate::cohomology::{compute_h2, CohomologyClass, H2Group};
use crate::detector::{CompactDetectorSpec, DetectorKind};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{frobenius, operator_norm, polar_unitary, CMatrix};
use crate::mps::{schmidt_basis, stack_states, transfer_fixed_point, SymmetricMPS};
use crate::phase::{PhaseValue, PHASE_TOL};
use crate::projrep::{extract_multiplier, MultiplierRep};

/// `|λ| < 1 − BROKEN_TOL` for a twisted transfer map means the symmetry is broken.
pub const BROKEN_TOL: f64 = 1e-6;
/// Largest allowed distance between the raw eigenmatrix and its unitary polar factor.
pub const POLAR_TOL: f64 = 1e-6;
/// Tolerance on the fixed-point equation of the extracted edge action.
pub const EDGE_RESIDUAL_TOL: f64 = 1e-8;
/// Commutator phases of the SO(3) detector must be within this of ±1.
pub const COMMUTATOR_TOL: f64 = 1e-6;
/// Largest number of sites blocked when a stacked state is not injective.
pub const MAX_BLOCKING: usize = 3;

#[derive(Clone, Debug)]
pub struct EdgeRep {
    pub group: Arc<FiniteGroup>,
    pub detector: Option<DetectorKind>,
    /// `u(g)`, gauge-fixed so the largest-modulus entry of the first row is real positive.
    pub unitaries: Vec<CMatrix>,
    /// `e^{iθ(g)}`, the twisted leading eigenvalue.
    pub phases: Vec<PhaseValue>,
    /// `Σ_i ‖Σ_j U_ij A^j − e^{iθ} u† A^i u‖_F` per element.
    pub residuals: Vec<f64>,
    /// Distance of the raw eigenmatrix (rescaled) from its polar factor, per element.
    pub polar_residuals: Vec<f64>,
    pub rep: MultiplierRep,
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub max_edge_residual: f64,
    pub max_polar_residual: f64,
    pub max_snap_error: f64,
    pub multiplier_residual: f64,
}

#[derive(Clone, Debug)]
pub struct SPTIndexResult {
    pub class: CohomologyClass,
    pub trivial: bool,
    pub diagnostics: Diagnostics,
    /// Named verdict for detector runs, e.g. `"haldane"` or `"trivial"`.
    pub verdict: Option<String>,
    /// Gauge-invariant commutator phase of the SO(3) detector.
    pub commutator_phase: Option<C64>,
    pub edge: EdgeRep,
}

fn gauge_fix(u: &CMatrix) -> CMatrix {
    let row = u.row(0);
    let (_, big) = row.iter().enumerate().fold((0.0, C64::new(1.0, 0.0)), |(best, z), (_, w)| {
        if w.norm() > best + 1e-12 {
            (w.norm(), *w)
        } else {
            (best, z)
        }
    });
    u * (big.conj() / big.norm())
}

/// Rescale to unit determinant so the multiplier takes values in `D`-th roots of unity.
fn unit_determinant(u: &CMatrix) -> CMatrix {
    let det = u.clone().determinant();
    u * C64::from_polar(1.0, -det.arg() / u.nrows() as f64)
}

fn canonical(m: &SymmetricMPS) -> Result<SymmetricMPS> {
    if m.is_canonical() {
        Ok(m.clone())
    } else {
        m.canonicalize()
    }
}

/// Extract `u(g)` for every group element of a symmetric injective state.
pub fn compute_edge_rep(m: &SymmetricMPS) -> Result<EdgeRep> {
    let m = canonical(m)?;
    let r = m.right_fixed_point()?;
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NonInjective("right fixed point is singular".into()))?;
    let bond = m.bond_dim();
    let n = m.group().order();
    let mut unitaries = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut polar_residuals = Vec::with_capacity(n);
    for g in 0..n {
        let twist = &m.onsite()[g];
        let fp = transfer_fixed_point(&m, Some(twist))?;
        let modulus = fp.eigenvalue.norm();
        if modulus < 1.0 - BROKEN_TOL {
            return Err(Error::BrokenSymmetry { element: g, modulus });
        }
        let raw = (&fp.right * &r_inv).adjoint();
        let raw = &raw * C64::new((bond as f64).sqrt() / frobenius(&raw), 0.0);
        let polar = polar_unitary(&raw);
        polar_residuals.push(frobenius(&(&raw - &polar)));
        if frobenius(&(&raw - &polar)) > POLAR_TOL {
            return Err(Error::Classification(format!(
                "edge eigenmatrix for element {g} is not proportional to a unitary (polar residual {:e})",
                frobenius(&(&raw - &polar))
            )));
        }
        let u = if g == m.group().identity() { CMatrix::identity(bond, bond) } else { gauge_fix(&polar) };
        let theta = fp.eigenvalue / modulus;
        let residual: f64 = (0..m.phys_dim())
            .map(|i| {
                let mut acted = CMatrix::zeros(bond, bond);
                for (j, aj) in m.tensor().iter().enumerate() {
                    acted += aj * twist[(i, j)];
                }
                frobenius(&(acted - u.adjoint() * &m.tensor()[i] * &u * theta))
            })
            .sum();
        residuals.push(residual);
        unitaries.push(u);
        phases.push(PhaseValue::from_complex(theta));
    }
    let rep = extract_multiplier(m.group().clone(), unitaries.clone())?;
    Ok(EdgeRep { group: m.group().clone(), detector: m.detector(), unitaries, phases, residuals, polar_residuals, rep })
}

/// Class of the projective representation `u`, snapping after a unit-determinant regauge.
pub fn classify_unitaries(h2: &Arc<H2Group>, unitaries: &[CMatrix]) -> Result<(CohomologyClass, f64, f64)> {
    let dim = unitaries[0].nrows();
    let mut regauged: Vec<CMatrix> = unitaries.iter().map(unit_determinant).collect();
    // any projective representation has u(e) ∝ 1; fix that phase too
    let e = h2.group().identity();
    let scalar = regauged[e].trace() / dim as f64;
    if frobenius(&(&regauged[e] - CMatrix::identity(dim, dim) * scalar)) > POLAR_TOL {
        return Err(Error::Classification("u(e) is not proportional to the identity".into()));
    }
    regauged[e] = CMatrix::identity(dim, dim);
    let rep = extract_multiplier(h2.group().clone(), regauged)?;
    let max_den = 2 * h2.group().order() as u64 * dim as u64;
    let mu = rep.multiplier();
    let snapped = mu.snap(max_den, crate::cohomology::SNAP_TOL)?;
    let snap_err = mu
        .table()
        .iter()
        .flatten()
        .zip(snapped.table().iter().flatten())
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    let class = h2.classify(&snapped)?;
    Ok((class, snap_err, rep.residual()))
}

/// Index of a symmetric injective MPS.
pub fn compute_index(m: &SymmetricMPS) -> Result<SPTIndexResult> {
    let h2 = Arc::new(compute_h2(m.group().clone())?);
    compute_index_with(m, &h2)
}

/// Index using a precomputed `H²` of the state's group.
pub fn compute_index_with(m: &SymmetricMPS, h2: &Arc<H2Group>) -> Result<SPTIndexResult> {
    if !h2.group().same_table(m.group()) {
        return Err(Error::GroupMismatch(m.group().name().into(), h2.group().name().into()));
    }
    let edge = compute_edge_rep(m)?;
    index_from_edge(edge, h2)
}

pub fn index_from_edge(edge: EdgeRep, h2: &Arc<H2Group>) -> Result<SPTIndexResult> {
    let (class, snap_err, mult_res) = classify_unitaries(h2, &edge.unitaries)?;
    let diagnostics = Diagnostics {
        max_edge_residual: edge.residuals.iter().cloned().fold(0.0, f64::max),
        max_polar_residual: edge.polar_residuals.iter().cloned().fold(0.0, f64::max),
        max_snap_error: snap_err,
        multiplier_residual: mult_res,
    };
    Ok(SPTIndexResult { trivial: class.is_trivial(), class, diagnostics, verdict: None, commutator_phase: None, edge })
}

#[derive(Clone, Debug)]
pub struct StackCheck {
    pub holds: bool,
    pub stacked: SPTIndexResult,
    pub expected: CohomologyClass,
    /// Number of sites blocked to make the stacked state injective (1 = none).
    pub blocked_sites: usize,
}

/// Index of `a ⊗ b` against `σ(a)·σ(b)`, blocking up to three sites if needed.
pub fn stacked_index_check(a: &SymmetricMPS, b: &SymmetricMPS) -> Result<StackCheck> {
    let h2 = Arc::new(compute_h2(a.group().clone())?);
    let ia = compute_index_with(a, &h2)?;
    let ib = compute_index_with(b, &h2)?;
    let expected = ia.class.compose(&ib.class)?;
    let stacked = stack_states(a, b)?;
    let mut last_err = None;
    for k in 1..=MAX_BLOCKING {
        let candidate = if k == 1 { stacked.clone() } else { stacked.blocked(k)? };
        match compute_index_with(&candidate, &h2) {
            Ok(res) => {
                // blocking k sites multiplies the index by itself k times
                let mut single_expected = expected.clone();
                for _ in 1..k {
                    single_expected = single_expected.compose(&expected)?;
                }
                let holds = res.class == single_expected;
                return Ok(StackCheck { holds, stacked: res, expected: single_expected, blocked_sites: k });
            }
            Err(e @ Error::NonInjective(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonInjective(format!(
        "stacked state is not injective even after blocking {MAX_BLOCKING} sites ({}); block more sites by hand",
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// `g ↦ Π_{j ∈ support} q_j(g) q'_j(g)^{-1}` for two finite product-state charge assignments.
pub fn relative_charge(a: &[Charge], b: &[Charge], support: &[usize]) -> Result<Charge> {
    let first = a.first().or(b.first()).ok_or_else(|| Error::Validation("empty charge assignments".into()))?;
    let group = first.group().clone();
    let len = a.len().max(b.len());
    let trivial = Charge::trivial(group.clone());
    let at = |v: &[Charge], j: usize| v.get(j).cloned().unwrap_or_else(|| trivial.clone());
    for j in 0..len {
        if !support.contains(&j) && !at(a, j).approx_eq(&at(b, j), PHASE_TOL) {
            return Err(Error::Validation(format!("charges differ at site {j}, outside the declared support")));
        }
    }
    let mut q = trivial.clone();
    for &j in support {
        q = q.product(&at(a, j))?.product(&at(b, j).conjugate())?;
    }
    Ok(q)
}

/// Run a compact-group detector: the state's tensor with the detector's on-site realizations.
pub fn detector_verdict(m: &SymmetricMPS, spec: &CompactDetectorSpec) -> Result<SPTIndexResult> {
    if spec.realizations()[0].nrows() != m.phys_dim() {
        return Err(Error::Validation(format!(
            "detector acts on dimension {} but the state has physical dimension {}",
            spec.realizations()[0].nrows(),
            m.phys_dim()
        )));
    }
    let probe = SymmetricMPS::with_detector(m.label().to_string(), m.tensor().to_vec(), spec)?;
    verdict_for(&probe, spec.kind())
}

/// Detector verdict using the state's own on-site action.
pub fn verdict_for(m: &SymmetricMPS, kind: DetectorKind) -> Result<SPTIndexResult> {
    let mut res = compute_index(m)?;
    match kind {
        DetectorKind::SO3 => {
            if m.group().order() != 4 || !m.group().same_table(&FiniteGroup::catalog("Z2xZ2")?) {
                return Err(Error::Validation("the SO(3) detector needs the Z2xZ2 subgroup of π-rotations".into()));
            }
            let u = &res.edge.unitaries;
            let dim = u[0].nrows() as f64;
            let phase = (&u[1] * &u[2] * u[1].adjoint() * u[2].adjoint()).trace() / dim;
            let sign = if (phase - C64::new(1.0, 0.0)).norm() < COMMUTATOR_TOL {
                1
            } else if (phase + C64::new(1.0, 0.0)).norm() < COMMUTATOR_TOL {
                -1
            } else {
                return Err(Error::Classification(format!("commutator phase {phase} is not ±1")));
            };
            res.commutator_phase = Some(phase);
            res.verdict = Some(if sign < 0 { "haldane" } else { "trivial" }.to_string());
        }
        DetectorKind::U1 => {
            let g = m.group();
            let n = g.order();
            if n > 1 && g.element_order(1) != n {
                return Err(Error::Validation("the U(1) detector needs a cyclic subgroup in catalog order".into()));
            }
            let lift = linear_lift_residual(&res.edge.unitaries, g);
            if lift > 1e-6 {
                return Err(Error::Classification(format!("edge action of Z_{n} does not lift linearly (residual {lift:e})")));
            }
            res.diagnostics.multiplier_residual = res.diagnostics.multiplier_residual.max(lift);
            res.verdict = Some("trivial".to_string());
        }
    }
    Ok(res)
}

/// Rescale `u(1)` so that its `n`-th power is the identity and compare its powers with `u(g)`.
fn linear_lift_residual(u: &[CMatrix], g: &FiniteGroup) -> f64 {
    let n = g.order();
    if n == 1 {
        return 0.0;
    }
    let dim = u[0].nrows();
    let mut power = CMatrix::identity(dim, dim);
    for _ in 0..n {
        power = &power * &u[1];
    }
    let lambda = power.trace() / dim as f64;
    let w = &u[1] * C64::from_polar(1.0, -lambda.arg() / n as f64);
    let mut acc = CMatrix::identity(dim, dim);
    let mut worst: f64 = 0.0;
    let mut elem = 0;
    for _ in 0..n {
        let target = &u[elem];
        let overlap = (target.adjoint() * &acc).trace() / dim as f64;
        worst = worst.max(frobenius(&(&acc - target * overlap)));
        acc = &acc * &w;
        elem = g.mul(elem, 1);
    }
    worst
}

/// Class of the edge action restricted to the top Schmidt degeneracy block.
pub fn top_block_class(m: &SymmetricMPS) -> Result<CohomologyClass> {
    let m = canonical(m)?;
    let edge = compute_edge_rep(&m)?;
    let (spec, vecs) = schmidt_basis(&m)?;
    let block = spec.blocks[0].clone();
    let p = vecs.columns(block.start, block.len()).into_owned();
    let restricted: Vec<CMatrix> = edge.unitaries.iter().map(|u| p.adjoint() * u * &p).collect();
    let h2 = Arc::new(compute_h2(m.group().clone())?);
    let (class, _, _) = classify_unitaries(&h2, &restricted)?;
    Ok(class)
}

/// `‖P₁† E^w(E_O(r)) P₁ / λ₁ − ψ(O)·1‖`: matrix elements of `O`, placed `w` sites
/// beyond the cut, between normalized half-chain Schmidt vectors of the top block,
/// compared with `⟨ξ|ξ'⟩ψ(O)`.
pub fn top_block_deviation(m: &SymmetricMPS, op: &CMatrix, w: usize) -> Result<f64> {
    let m = canonical(m)?;
    let (spec, vecs) = schmidt_basis(&m)?;
    let r = m.right_fixed_point()?;
    let block = spec.blocks[0].clone();
    let p = vecs.columns(block.start, block.len()).into_owned();
    let psi = m.apply_transfer(&r, Some(op)).trace();
    let mut x = m.apply_transfer(&r, Some(op));
    for _ in 0..w {
        x = m.apply_transfer(&x, None);
    }
    let lambda1 = spec.values[block.start] * r.trace().re;
    let restricted = p.adjoint() * x * &p / C64::new(lambda1, 0.0);
    let k = block.len();
    Ok(operator_norm(&(restricted - CMatrix::identity(k, k) * psi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory;
    use crate::linalg::{random_unitary, spin_matrices};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn aklt_edge_is_pauli_like() {
        let m = factory::aklt();
        let edge = compute_edge_rep(&m).unwrap();
        let (x, y, z) = crate::linalg::pauli();
        for (u, p) in edge.unitaries[1..].iter().zip([x, y, z]) {
            // u ∝ Pauli: |tr(u p)| = 2
            assert!(((u * p).trace().norm() - 2.0).abs() < 1e-8);
        }
        assert!(edge.residuals.iter().all(|&r| r < EDGE_RESIDUAL_TOL));
        let res = verdict_for(&m, DetectorKind::SO3).unwrap();
        assert_eq!(res.verdict.as_deref(), Some("haldane"));
        assert!((res.commutator_phase.unwrap() + C64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(!res.trivial);
    }

    #[test]
    fn spin_one_product_is_trivial() {
        let m = factory::spin_product(2);
        let res = detector_verdict(&m, &CompactDetectorSpec::so3(2)).unwrap();
        assert_eq!(res.verdict.as_deref(), Some("trivial"));
        assert!(res.trivial);
    }

    #[test]
    fn charged_product_edge_phases() {
        let g = Arc::new(FiniteGroup::cyclic(4).unwrap());
        let q = Charge::cyclic_character(g, 1).unwrap();
        let m = factory::product_state(&q);
        let edge = compute_edge_rep(&m).unwrap();
        for (p, v) in edge.phases.iter().zip(q.values()) {
            assert!(p.approx_eq(v, 1e-10));
        }
        assert!(edge.unitaries.iter().all(|u| (u[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12));
        assert!(compute_index(&m).unwrap().trivial);
    }

    #[test]
    fn cluster_edge_anticommutes() {
        let m = factory::cluster();
        let edge = compute_edge_rep(&m).unwrap();
        let (a, b) = (&edge.unitaries[1], &edge.unitaries[2]);
        assert!(frobenius(&(a * b + b * a)) < 1e-8);
        assert!(!compute_index(&m).unwrap().trivial);
    }

    #[test]
    fn broken_symmetry_is_reported() {
        // the Z2 action X on a product of |0>: not symmetric
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let (x, _, _) = crate::linalg::pauli();
        let tensor = vec![CMatrix::identity(1, 1), CMatrix::zeros(1, 1)];
        let m = SymmetricMPS::new("broken", tensor, g, vec![CMatrix::identity(2, 2), x]).unwrap();
        assert!(matches!(compute_edge_rep(&m), Err(Error::BrokenSymmetry { element: 1, .. })));
    }

    #[test]
    fn index_is_gauge_and_basis_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = factory::aklt();
        let h2 = Arc::new(compute_h2(m.group().clone()).unwrap());
        let base = compute_index_with(&m, &h2).unwrap();
        for _ in 0..10 {
            let mut edge = base.edge.clone();
            for u in edge.unitaries.iter_mut().skip(1) {
                *u *= C64::from_polar(1.0, rng.gen::<f64>() * 6.28);
            }
            assert_eq!(index_from_edge(edge, &h2).unwrap().class, base.class);
            let v = random_unitary(2, &mut rng);
            let rotated = m.canonicalize().unwrap().rotate_virtual(&v);
            assert_eq!(compute_index_with(&rotated, &h2).unwrap().class, base.class);
        }
    }

    #[test]
    fn stacking_aklt_twice_is_trivial() {
        let a = factory::aklt();
        let check = stacked_index_check(&a, &a).unwrap();
        assert!(check.holds);
        assert!(check.stacked.trivial);
        let twice = stack_states(&a, &a).unwrap();
        assert_eq!(verdict_for(&twice, DetectorKind::SO3).unwrap().verdict.as_deref(), Some("trivial"));
    }

    #[test]
    fn relative_charges() {
        let g = Arc::new(FiniteGroup::cyclic(4).unwrap());
        let q = Charge::cyclic_character(g.clone(), 1).unwrap();
        let e = Charge::trivial(g.clone());
        let a = vec![e.clone(), q.clone(), e.clone()];
        assert!(relative_charge(&a, &a, &[0, 1, 2]).unwrap().is_trivial());
        let b = vec![e.clone(), e.clone(), e.clone()];
        assert_eq!(relative_charge(&a, &b, &[1]).unwrap(), q);
        assert!(relative_charge(&a, &b, &[0]).is_err());
        // stacking a pair (w carrying q̄ vs e) cancels the charge
        let stacked_a: Vec<Charge> = a.iter().map(|c| c.product(&q.conjugate()).unwrap()).collect();
        let stacked_b: Vec<Charge> = b.iter().map(|c| c.clone()).collect();
        let rel = relative_charge(&stacked_a[1..2], &stacked_b[1..2], &[0]).unwrap();
        assert!(rel.is_trivial());
    }

    #[test]
    fn top_block_linearity() {
        assert!(!top_block_class(&factory::aklt()).unwrap().is_trivial());
        assert!(!top_block_class(&factory::cluster()).unwrap().is_trivial());
        assert!(top_block_class(&factory::spin_product(2)).unwrap().is_trivial());
    }

    #[test]
    fn top_block_deviation_decay() {
        let (_, _, sz) = spin_matrices(2);
        let m = factory::aklt();
        for w in 2..=8 {
            let dev = top_block_deviation(&m, &sz, w).unwrap();
            let ratio = dev / (1.0f64 / 3.0).powi(w as i32);
            assert!((0.5..=2.0).contains(&ratio), "w = {w}, ratio = {ratio}");
        }
    }
}
