//! The acceptance battery behind `sptkit verify suite`.
//!
//! Reports contain no timings and format every number with a fixed precision,
//! so two runs with the same seed serialize to identical bytes.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charge::Charge;
use crate::circuit::{basis_state, charge_transfer_circuit, overlap};
use crate::cohomology::{brute_force_h2, classify, compute_h2, H2Group};
use crate::detector::DetectorKind;
use crate::error::Result;
use crate::factory::{self, ChargedProductSpec};
use crate::group::FiniteGroup;
use crate::index::{compute_index_with, index_from_edge, stacked_index_check, top_block_class, top_block_deviation, verdict_for};
use crate::linalg::{random_unitary, spin_matrices, CMatrix};
use crate::locality::{build_f_function, DecayFunction};
use crate::mps::{connected_correlation, schmidt_spectrum, SymmetricMPS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

type Check = fn(u64) -> Result<(bool, String)>;

const CHECKS: [(u32, &str, Check); 10] = [
    (1, "H2 correctness", h2_correctness),
    (2, "surjectivity roundtrip", surjectivity),
    (3, "Haldane detection", haldane),
    (4, "stacking homomorphism", stacking),
    (5, "gauge and basis invariance", gauge_invariance),
    (6, "charge-transfer circuit", charge_transfer),
    (7, "Schmidt structure", schmidt),
    (8, "correlation decay", correlations),
    (9, "top-block diagnostics", top_block),
    (10, "F-function axioms", f_axioms),
];

/// Run the battery with `threads` workers (results are collected in criterion order).
pub fn run_suite(seed: u64, threads: usize) -> SuiteReport {
    let mut criteria = run_checks(seed, threads);
    let again = run_checks(seed, threads);
    let same = serde_json::to_string(&criteria).ok() == serde_json::to_string(&again).ok();
    criteria.push(CriterionResult {
        id: 11,
        name: "determinism".into(),
        passed: same,
        detail: format!("criteria 1-10 rerun with seed {seed}: {}", if same { "identical" } else { "different" }),
    });
    SuiteReport { seed, passed: criteria.iter().all(|c| c.passed), criteria }
}

fn run_checks(seed: u64, threads: usize) -> Vec<CriterionResult> {
    let threads = threads.max(1);
    let mut slots: Vec<Option<CriterionResult>> = vec![None; CHECKS.len()];
    for chunk in CHECKS.iter().enumerate().collect::<Vec<_>>().chunks(threads) {
        let done: Vec<(usize, CriterionResult)> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&(k, &(id, name, check))| s.spawn(move || (k, run_one(id, name, check, seed))))
                .collect();
            handles.into_iter().map(|h| h.join().expect("criterion thread panicked")).collect()
        });
        for (k, r) in done {
            slots[k] = Some(r);
        }
    }
    slots.into_iter().map(|r| r.expect("every criterion ran")).collect()
}

fn run_one(id: u32, name: &str, check: Check, seed: u64) -> CriterionResult {
    let (passed, detail) = match check(seed) {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name: name.to_string(), passed, detail }
}

fn group(name: &str) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::catalog(name).expect("catalog group"))
}

fn z2xz2_h2() -> Result<Arc<H2Group>> {
    Ok(Arc::new(compute_h2(group("Z2xZ2"))?))
}

/// Catalog states on `Z2xZ2`, canonicalized.
pub fn catalog_states() -> Result<Vec<SymmetricMPS>> {
    let h2 = z2xz2_h2()?;
    let mut states = vec![factory::aklt(), factory::cluster(), factory::spin_product(2)];
    states.push(factory::product_state(&Charge::trivial(group("Z2xZ2"))));
    for class in h2.all_classes() {
        states.push(factory::fixed_point_state(class.representative())?);
    }
    states.into_iter().map(|m| m.canonicalize()).collect()
}

fn h2_correctness(_seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 2..=8 {
        let d = compute_h2(Arc::new(FiniteGroup::cyclic(n)?))?.divisors().to_vec();
        ok &= d.is_empty();
        if !d.is_empty() {
            notes.push(format!("Z{n}: {d:?}"));
        }
    }
    for (name, expected) in [("Z2xZ2", vec![2u64]), ("Z2xZ2xZ2", vec![2, 2, 2])] {
        let d = compute_h2(group(name))?.divisors().to_vec();
        ok &= d == expected;
        notes.push(format!("{name}: {d:?}"));
    }
    for (name, root) in [("Z2", 2), ("Z3", 3), ("Z2xZ2", 2)] {
        let g = group(name);
        let brute = brute_force_h2(&g, root)?;
        let linear = compute_h2(g)?.order() as usize;
        ok &= brute == linear;
        notes.push(format!("brute {name}: {brute}"));
    }
    Ok((ok, notes.join("; ")))
}

fn surjectivity(_seed: u64) -> Result<(bool, String)> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for name in ["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z2xZ2", "Z2xZ2xZ2", "D4", "Q8", "S3"] {
        let h2 = Arc::new(compute_h2(group(name))?);
        let mut reps = h2.generators();
        reps.push(h2.trivial_class().representative().clone());
        for mu in reps {
            let m = factory::fixed_point_state(&mu)?;
            let res = compute_index_with(&m, &h2)?;
            checked += 1;
            if res.class != classify(&mu)? {
                failures.push(name.to_string());
            }
        }
    }
    Ok((failures.is_empty(), format!("{checked} classes checked; mismatches: {failures:?}")))
}

fn haldane(_seed: u64) -> Result<(bool, String)> {
    let aklt = verdict_for(&factory::aklt(), DetectorKind::SO3)?;
    let prod = verdict_for(&factory::spin_product(2), DetectorKind::SO3)?;
    let pa = aklt.commutator_phase.unwrap_or_default();
    let pp = prod.commutator_phase.unwrap_or_default();
    let ok = (pa + C64::new(1.0, 0.0)).norm() < 1e-8 && (pp - C64::new(1.0, 0.0)).norm() < 1e-8;
    Ok((
        ok,
        format!(
            "aklt phase {:+.9} ({}), product phase {:+.9} ({})",
            pa.re,
            aklt.verdict.unwrap_or_default(),
            pp.re,
            prod.verdict.unwrap_or_default()
        ),
    ))
}

fn stacking(_seed: u64) -> Result<(bool, String)> {
    let states = catalog_states()?;
    let mut pairs = 0;
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for a in &states {
        for b in &states {
            let check = stacked_index_check(a, b)?;
            let d = &check.stacked.diagnostics;
            let res = d.max_edge_residual.max(d.max_snap_error).max(d.multiplier_residual);
            worst = worst.max(res);
            pairs += 1;
            if !check.holds || res >= 1e-6 {
                failures.push(format!("{}*{}", a.label(), b.label()));
            }
        }
    }
    let aklt = factory::aklt();
    let twice = stacked_index_check(&aklt, &aklt)?;
    let ok = failures.is_empty() && twice.stacked.trivial;
    Ok((ok, format!("{pairs} pairs, worst residual {worst:.1e}, aklt*aklt trivial: {}, failures: {failures:?}", twice.stacked.trivial)))
}

fn gauge_invariance(seed: u64) -> Result<(bool, String)> {
    let h2 = z2xz2_h2()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5);
    let mut failures = Vec::new();
    let states = catalog_states()?;
    for m in &states {
        let base = compute_index_with(m, &h2)?;
        let fp = base.class.fingerprint();
        for _ in 0..50 {
            let mut edge = base.edge.clone();
            for u in edge.unitaries.iter_mut() {
                *u *= C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
            }
            let res = index_from_edge(edge, &h2)?;
            if res.class.fingerprint() != fp || res.class != base.class {
                failures.push(format!("{} phase gauge", m.label()));
            }
        }
        for _ in 0..20 {
            let v = random_unitary(m.bond_dim(), &mut rng);
            let res = compute_index_with(&m.rotate_virtual(&v), &h2)?;
            if res.class.fingerprint() != fp || res.class != base.class {
                failures.push(format!("{} basis rotation", m.label()));
            }
        }
    }
    Ok((failures.is_empty(), format!("{} states x (50 gauges + 20 rotations); failures: {failures:?}", states.len())))
}

fn charge_transfer(seed: u64) -> Result<(bool, String)> {
    let g = group("Z4");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    let mut worst_equiv: f64 = 0.0;
    let mut worst_overlap: f64 = 0.0;
    let mut interior_trivial = true;
    for _ in 0..5 {
        let charges = (0..12).map(|_| Charge::cyclic_character(g.clone(), rng.gen_range(0..4))).collect::<Result<Vec<_>>>()?;
        let ct = charge_transfer_circuit(&ChargedProductSpec::new(g.clone(), charges)?, 12)?;
        worst_equiv = ct.circuit.equivariance_residuals().into_iter().fold(worst_equiv, f64::max);
        let out = ct.circuit.apply(&basis_state(&ct.initial_config));
        let ov = overlap(&basis_state(&ct.final_config), &out);
        worst_overlap = worst_overlap.max((ov - C64::new(1.0, 0.0)).norm());
        interior_trivial &= ct.final_spec.charges[..12].iter().all(Charge::is_trivial);
    }
    let ok = worst_equiv < 1e-12 && worst_overlap <= 1e-12 && interior_trivial;
    Ok((ok, format!("equivariance {worst_equiv:.1e}, overlap defect {worst_overlap:.1e}, window trivial: {interior_trivial}")))
}

fn schmidt(_seed: u64) -> Result<(bool, String)> {
    let aklt = schmidt_spectrum(&factory::aklt().canonicalize()?)?;
    let mut ok = aklt.values.len() == 2 && aklt.values.iter().all(|v| (v - 0.5).abs() < 1e-10);
    for m in catalog_states()? {
        let s = schmidt_spectrum(&m)?;
        let d = m.bond_dim() as f64;
        ok &= (s.values.iter().sum::<f64>() - 1.0).abs() <= 1e-9 && s.values[0] >= 1.0 / (d * d);
    }
    Ok((ok, format!("aklt spectrum [{:.10}, {:.10}]", aklt.values[0], aklt.values.get(1).copied().unwrap_or(0.0))))
}

fn correlations(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8);
    let mut worst_fp: f64 = 0.0;
    for m in catalog_states()?.into_iter().filter(|m| m.label().starts_with("fixed-point")) {
        let d = m.phys_dim();
        for _ in 0..3 {
            let a = crate::linalg::random_matrix(d, d, &mut rng);
            let b = crate::linalg::random_matrix(d, d, &mut rng);
            for r in 2..=6 {
                worst_fp = worst_fp.max(connected_correlation(&m, &a, &b, r)?.norm());
            }
        }
    }
    let aklt = factory::aklt().canonicalize()?;
    let (_, _, sz) = spin_matrices(2);
    let mut worst_ratio: f64 = 0.0;
    for r in 2..=10 {
        let c0 = connected_correlation(&aklt, &sz, &sz, r)?.norm();
        let c1 = connected_correlation(&aklt, &sz, &sz, r + 1)?.norm();
        worst_ratio = worst_ratio.max((c1 / c0 - 1.0 / 3.0).abs());
    }
    let ok = worst_fp < 1e-12 && worst_ratio <= 1e-6;
    Ok((ok, format!("fixed-point max |C| {worst_fp:.1e}, aklt ratio error {worst_ratio:.1e}")))
}

fn top_block(seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    let h2 = z2xz2_h2()?;
    for m in catalog_states()? {
        let trivial_index = compute_index_with(&m, &h2)?.trivial;
        let restricted = top_block_class(&m)?.is_trivial();
        ok &= restricted == trivial_index;
        notes.push(format!("{}:{}", m.label(), if restricted { "linear" } else { "projective" }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9);
    let mut worst_fp: f64 = 0.0;
    for m in catalog_states()?.into_iter().filter(|m| m.label().starts_with("fixed-point")) {
        let d = m.phys_dim();
        let a = crate::linalg::random_matrix(d, d, &mut rng);
        let op: CMatrix = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        for w in 2..=8 {
            worst_fp = worst_fp.max(top_block_deviation(&m, &op, w)?);
        }
    }
    let (_, _, sz) = spin_matrices(2);
    let aklt = factory::aklt();
    let mut ratio_range = (f64::INFINITY, 0.0f64);
    for w in 2..=8 {
        let r = top_block_deviation(&aklt, &sz, w)? / (1.0f64 / 3.0).powi(w as i32);
        ratio_range = (ratio_range.0.min(r), ratio_range.1.max(r));
    }
    ok &= worst_fp < 1e-12 && ratio_range.0 >= 0.5 && ratio_range.1 <= 2.0;
    notes.push(format!("fixed-point deviation {worst_fp:.1e}, aklt ratio in [{:.4}, {:.4}]", ratio_range.0, ratio_range.1));
    Ok((ok, notes.join("; ")))
}

fn f_axioms(_seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, f) in [("exp", DecayFunction::Exponential { a: 1.0 }), ("sqrt", DecayFunction::Stretched { a: 1.0, theta: 0.5 })] {
        let big = build_f_function(&f, 1000)?;
        let ax = big.axioms();
        ok &= ax.all_hold();
        notes.push(format!(
            "{label}: monotone {}, f(r)<=F(r+1) {}, C'_F {:.6e}->{:.6e} ({}), C_F {:.6e}->{:.6e} ({})",
            ax.non_increasing,
            ax.dominates_shifted_decay,
            ax.integrability_half_window,
            ax.integrability_full_window,
            if ax.integrable { "stable" } else { "grows with window" },
            ax.convolution_half_window,
            ax.convolution_full_window,
            if ax.convolution_bounded { "stable" } else { "grows with window" },
        ));
    }
    Ok((ok, notes.join("; ")))
}
