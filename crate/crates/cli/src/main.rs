//! `sptkit`: command-line front end for spt-core.
//!
//! Results go to stdout as JSON (byte-identical for identical inputs); a run
//! manifest with input digests and wall time goes to stderr as one JSON line.
//!
//! Exit codes: 0 success, 1 validation error, 2 broken symmetry,
//! 3 snapping/classification failure, 4 resource guard.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use spt_core::circuit::{basis_state, charge_transfer_circuit, overlap};
use spt_core::cohomology::{check_cocycle, compute_h2, CohomologyClass, SNAP_TOL};
use spt_core::detector::{CompactDetectorSpec, DetectorKind};
use spt_core::factory::{self, CatalogParams};
use spt_core::index::{detector_verdict, verdict_for, SPTIndexResult, BROKEN_TOL, EDGE_RESIDUAL_TOL, POLAR_TOL};
use spt_core::io::{self, catalog_group, state_from_json, state_to_json};
use spt_core::locality::{build_f_function_with, DecayFunction, FRecursion};
use spt_core::mps::CANONICAL_TOL;
use spt_core::phase::PhaseValue;
use spt_core::projrep::{extract_multiplier, EXTRACTION_TOL};
use spt_core::verify::run_suite;
use spt_core::{Charge, Cocycle, Error, FiniteGroup};

#[derive(Parser)]
#[command(name = "sptkit", version, about = "Classify 1d SPT states: H², edge projective representations, fixed-point states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite groups.
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Second cohomology H²(G, U(1)).
    Cohomology {
        #[command(subcommand)]
        action: CohomologyAction,
    },
    /// Validate or classify a 2-cocycle.
    Cocycle {
        #[command(subcommand)]
        action: CocycleAction,
    },
    /// Projective representations.
    Rep {
        #[command(subcommand)]
        action: RepAction,
    },
    /// Build symmetric matrix product states.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
    /// The SPT index of a state.
    Index {
        #[command(subcommand)]
        action: IndexAction,
    },
    /// Equivariant circuits.
    Circuit {
        #[command(subcommand)]
        action: CircuitAction,
    },
    /// F-functions and interaction norms.
    Locality {
        #[command(subcommand)]
        action: LocalityAction,
    },
    /// The acceptance battery.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
}

#[derive(Args)]
struct GroupArg {
    /// Catalog name (Zn, Z2xZ2, Z2xZ2xZ2, D4, Q8, S3) or path to a group JSON file.
    #[arg(long)]
    group: String,
}

#[derive(Subcommand)]
enum GroupAction {
    Show(GroupArg),
}

#[derive(Subcommand)]
enum CohomologyAction {
    H2(GroupArg),
}

#[derive(Args)]
struct CocycleArgs {
    #[arg(long)]
    cocycle: PathBuf,
    /// Group table, when the cocycle's group is not a catalog name.
    #[arg(long)]
    group: Option<String>,
    /// Largest denominator for snapping approximate phases (default 2|G|).
    #[arg(long)]
    max_den: Option<u64>,
}

#[derive(Subcommand)]
enum CocycleAction {
    Check(CocycleArgs),
    Classify(CocycleArgs),
}

#[derive(Subcommand)]
enum RepAction {
    /// Extract the multiplier of a list of unitaries and classify it.
    Extract {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        group: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Aklt,
    Cluster,
    Product,
    FixedPoint,
}

#[derive(Subcommand)]
enum StateAction {
    Build {
        #[arg(long, value_enum)]
        kind: StateKind,
        /// Cocycle for `fixed-point` (regular projective representation).
        #[arg(long)]
        cocycle: Option<PathBuf>,
        /// Smaller projective representation for `fixed-point`, instead of `--cocycle`.
        #[arg(long)]
        rep: Option<PathBuf>,
        /// Group for `product` (default Z2xZ2) or for resolving `--cocycle`/`--rep`.
        #[arg(long)]
        group: Option<String>,
        /// Cyclic charge exponent k for `product` on Z_n: g ↦ e^{2πi k g/n}.
        #[arg(long)]
        charge: Option<i64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    So3,
    U1,
}

#[derive(Subcommand)]
enum IndexAction {
    Compute {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        detector: Option<DetectorArg>,
    },
}

#[derive(Subcommand)]
enum CircuitAction {
    ChargeTransfer {
        /// Charges file: a product spec or `{"group": "Z4", "exponents": [...]}`.
        #[arg(long)]
        charges: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RecursionArg {
    Shifted,
    Literal,
}

#[derive(Subcommand)]
enum LocalityAction {
    Ffunction {
        /// `exp:A`, `sqrt:A` or `stretched:A:THETA`.
        #[arg(long)]
        decay: String,
        #[arg(long, default_value_t = 1000)]
        rmax: usize,
        #[arg(long, value_enum, default_value_t = RecursionArg::Shifted)]
        recursion: RecursionArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyAction {
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
    /// Partial result to print anyway (e.g. cocycle violations).
    output: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::BrokenSymmetry { .. } => 2,
            Error::Snap { .. } | Error::Classification(_) | Error::NonConvergence { .. } => 3,
            Error::Guard(_) => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string(), output: None }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string(), output: None }
    }
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    inputs: Vec<InputDigest>,
    version: &'static str,
    tolerances: Value,
    wall_time_s: f64,
}

#[derive(Default)]
struct Context {
    inputs: Vec<InputDigest>,
}

impl Context {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure { code: 1, message: format!("{}: {e}", path.display()), output: None })?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        String::from_utf8(bytes).map_err(|_| Failure { code: 1, message: format!("{} is not UTF-8", path.display()), output: None })
    }

    /// A catalog name, or a file holding a group table or name.
    fn group(&mut self, spec: &str) -> Result<Arc<FiniteGroup>, Failure> {
        let path = Path::new(spec);
        if path.is_file() {
            let text = self.read(path)?;
            Ok(io::group_from_str(&text).map_err(|e| with_path(e, path))?)
        } else {
            Ok(Arc::new(catalog_group(spec)?))
        }
    }

    fn optional_group(&mut self, spec: &Option<String>) -> Result<Option<Arc<FiniteGroup>>, Failure> {
        spec.as_deref().map(|s| self.group(s)).transpose()
    }
}

fn with_path(e: Error, path: &Path) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::from(Error::from(e)))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn phases_json(rows: &[Vec<PhaseValue>]) -> Value {
    json!(rows.iter().map(|r| r.iter().map(io::phase_label).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn class_json(class: &CohomologyClass) -> Value {
    let mut v = json!({
        "divisors": class.divisors(),
        "coords": class.coords(),
        "trivial": class.is_trivial(),
    });
    if let Some(fp) = class.fingerprint() {
        v["fingerprint"] = phases_json(&fp);
    }
    v
}

fn group_json(g: &FiniteGroup) -> Value {
    json!({
        "name": g.name(),
        "order": g.order(),
        "abelian": g.is_abelian(),
        "element_orders": g.elements().map(|x| g.element_order(x)).collect::<Vec<_>>(),
        "inverses": g.elements().map(|x| g.inv(x)).collect::<Vec<_>>(),
        "mult": g.table(),
    })
}

fn index_json(res: &SPTIndexResult) -> Value {
    let d = &res.diagnostics;
    let mut v = class_json(&res.class);
    v["group"] = json!(res.edge.group.name());
    v["edge_dim"] = json!(res.edge.unitaries[0].nrows());
    v["edge_phases"] = json!(res.edge.phases.iter().map(|p| format!("{:.12}", p.turns())).collect::<Vec<_>>());
    v["diagnostics"] = json!({
        "max_edge_residual": format!("{:.3e}", d.max_edge_residual),
        "max_polar_residual": format!("{:.3e}", d.max_polar_residual),
        "max_snap_error": format!("{:.3e}", d.max_snap_error),
        "multiplier_residual": format!("{:.3e}", d.multiplier_residual),
    });
    if let Some(verdict) = &res.verdict {
        v["verdict"] = json!(verdict);
    }
    if let Some(p) = res.commutator_phase {
        v["commutator_phase"] = json!(format!("{:+.9}", p.re + 0.0));
    }
    v
}

fn tolerances() -> Value {
    json!({
        "snap": SNAP_TOL,
        "canonical": CANONICAL_TOL,
        "broken_symmetry": BROKEN_TOL,
        "polar": POLAR_TOL,
        "edge_residual": EDGE_RESIDUAL_TOL,
        "extraction": EXTRACTION_TOL,
    })
}

fn threads() -> usize {
    std::env::var("TOOL_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0).unwrap_or(1)
}

fn resolve_cocycle(ctx: &mut Context, path: &Path, group: &Option<String>) -> Result<Cocycle, Failure> {
    let g = ctx.optional_group(group)?;
    let text = ctx.read(path)?;
    io::cocycle_from_str(&text, g).map_err(|e| with_path(e, path))
}

fn run(cli: Cli, ctx: &mut Context) -> Result<Value, Failure> {
    match cli.command {
        Command::Group { action: GroupAction::Show(a) } => Ok(group_json(ctx.group(&a.group)?.as_ref())),
        Command::Cohomology { action: CohomologyAction::H2(a) } => {
            let g = ctx.group(&a.group)?;
            let h2 = compute_h2(g.clone())?;
            Ok(json!({
                "group": g.name(),
                "divisors": h2.divisors(),
                "order": h2.order(),
                "generators": h2.generators().iter().map(|c| phases_json(c.table())).collect::<Vec<_>>(),
            }))
        }
        Command::Cocycle { action: CocycleAction::Check(a) } => {
            let mu = resolve_cocycle(ctx, &a.cocycle, &a.group)?;
            let violations = check_cocycle(&mu);
            let out = json!({
                "cocycle": violations.is_empty(),
                "normalized": mu.is_normalized(),
                "exact": mu.is_exact(),
                "violations": violations.iter().take(16).map(|&(x, y, z)| [x, y, z]).collect::<Vec<_>>(),
                "violation_count": violations.len(),
            });
            if violations.is_empty() {
                Ok(out)
            } else {
                let (x, y, z) = violations[0];
                Err(Failure { code: 1, message: Error::NotCocycle(x, y, z).to_string(), output: Some(out) })
            }
        }
        Command::Cocycle { action: CocycleAction::Classify(a) } => {
            let mu = resolve_cocycle(ctx, &a.cocycle, &a.group)?;
            let h2 = Arc::new(compute_h2(mu.group().clone())?);
            let max_den = a.max_den.unwrap_or(2 * mu.group().order() as u64);
            Ok(class_json(&h2.classify_with(&mu, max_den)?))
        }
        Command::Rep { action: RepAction::Extract { rep, group } } => {
            let g = ctx.optional_group(&group)?;
            let text = ctx.read(&rep)?;
            let r = io::rep_from_str(&text, g).map_err(|e| with_path(e, &rep))?;
            let h2 = Arc::new(compute_h2(r.group().clone())?);
            let (class, snap_err, _) = spt_core::index::classify_unitaries(&h2, r.matrices())?;
            let mut out = class_json(&class);
            out["dim"] = json!(r.dim());
            out["multiplier_residual"] = json!(format!("{:.3e}", r.residual()));
            out["max_snap_error"] = json!(format!("{:.3e}", snap_err));
            out["multiplier"] = phases_json(extract_multiplier(r.group().clone(), r.matrices().to_vec())?.multiplier().table());
            Ok(out)
        }
        Command::State { action: StateAction::Build { kind, cocycle, rep, group, charge, out } } => {
            let state = match kind {
                StateKind::Aklt => factory::aklt(),
                StateKind::Cluster => factory::cluster(),
                StateKind::Product => {
                    let g = match &group {
                        Some(s) => ctx.group(s)?,
                        None => Arc::new(FiniteGroup::catalog("Z2xZ2")?),
                    };
                    let q = match charge {
                        Some(k) => Charge::cyclic_character(g, k)?,
                        None => Charge::trivial(g),
                    };
                    factory::catalog_state("product", &CatalogParams { charge: Some(q) })?
                }
                StateKind::FixedPoint => match (cocycle, rep) {
                    (Some(c), None) => factory::fixed_point_state(&resolve_cocycle(ctx, &c, &group)?)?,
                    (None, Some(r)) => {
                        let g = ctx.optional_group(&group)?;
                        let text = ctx.read(&r)?;
                        factory::fixed_point_state_from_rep(&io::rep_from_str(&text, g).map_err(|e| with_path(e, &r))?)?
                    }
                    _ => return Err(Error::Validation("fixed-point needs exactly one of --cocycle or --rep".into()).into()),
                },
            };
            write_json(&out, &state_to_json(&state))?;
            Ok(json!({
                "label": state.label(),
                "group": state.group().name(),
                "phys_dim": state.phys_dim(),
                "bond_dim": state.bond_dim(),
                "out": out.display().to_string(),
            }))
        }
        Command::Index { action: IndexAction::Compute { state, detector } } => {
            let text = ctx.read(&state)?;
            let m = state_from_json(&io::parse(&text).map_err(|e| with_path(e, &state))?)?;
            let res = match detector {
                None => spt_core::compute_index(&m)?,
                Some(DetectorArg::So3) => {
                    if m.detector() == Some(DetectorKind::SO3) {
                        verdict_for(&m, DetectorKind::SO3)?
                    } else {
                        detector_verdict(&m, &CompactDetectorSpec::so3(m.phys_dim() - 1))?
                    }
                }
                Some(DetectorArg::U1) => verdict_for(&m, DetectorKind::U1)?,
            };
            Ok(index_json(&res))
        }
        Command::Circuit { action: CircuitAction::ChargeTransfer { charges, length, group, out } } => {
            let g = ctx.optional_group(&group)?;
            let text = ctx.read(&charges)?;
            let spec = io::charges_from_str(&text, g).map_err(|e| with_path(e, &charges))?;
            let ct = charge_transfer_circuit(&spec, length)?;
            let residual = ct.circuit.equivariance_residuals().into_iter().fold(0.0, f64::max);
            let produced = ct.circuit.apply(&basis_state(&ct.initial_config));
            let ov = overlap(&basis_state(&ct.final_config), &produced);
            write_json(&out, &ct.circuit.to_json())?;
            let charge_labels = |s: &spt_core::factory::ChargedProductSpec| {
                s.charges.iter().map(|q| q.values().iter().map(io::phase_label).collect::<Vec<_>>()).collect::<Vec<_>>()
            };
            Ok(json!({
                "length": length,
                "gates": ct.circuit.gates.len(),
                "max_equivariance_residual": format!("{residual:.3e}"),
                "overlap_defect": format!("{:.3e}", (ov.re - 1.0).hypot(ov.im)),
                "window_trivial": ct.final_spec.charges[..length].iter().all(Charge::is_trivial),
                "initial_charges": charge_labels(&ct.initial),
                "final_charges": charge_labels(&ct.final_spec),
                "out": out.display().to_string(),
            }))
        }
        Command::Locality { action: LocalityAction::Ffunction { decay, rmax, recursion, out } } => {
            let f: DecayFunction = decay.parse()?;
            let recursion = match recursion {
                RecursionArg::Shifted => FRecursion::Shifted,
                RecursionArg::Literal => FRecursion::Literal,
            };
            let big = build_f_function_with(&f, rmax, recursion)?;
            let axioms = big.axioms();
            write_json(&out, &json!({ "f_function": big, "axioms": axioms }))?;
            Ok(json!({
                "r_max": rmax,
                "convolution_constant": format!("{:.6e}", big.convolution_constant),
                "integrability_constant": format!("{:.6e}", big.integrability_constant),
                "axioms_hold": axioms.all_hold(),
                "integrable": axioms.integrable,
                "convolution_bounded": axioms.convolution_bounded,
                "non_increasing": axioms.non_increasing,
                "dominates_shifted_decay": axioms.dominates_shifted_decay,
                "out": out.display().to_string(),
            }))
        }
        Command::Verify { action: VerifyAction::Suite { seed } } => {
            let report = run_suite(seed, threads());
            let value = serde_json::to_value(&report).map_err(|e| Failure::from(Error::from(e)))?;
            if report.passed {
                Ok(value)
            } else {
                let failed: Vec<u32> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect();
                Err(Failure { code: 1, message: format!("failing criteria: {failed:?}"), output: Some(value) })
            }
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let mut ctx = Context::default();
    let result = run(cli, &mut ctx);
    let manifest = RunManifest {
        command: argv.into_iter().skip(1).collect(),
        inputs: std::mem::take(&mut ctx.inputs),
        version: env!("CARGO_PKG_VERSION"),
        tolerances: tolerances(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    eprintln!("{}", serde_json::to_string(&manifest).unwrap_or_default());
    match result {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(v) = f.output {
                println!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            }
            eprintln!("{}", json!({ "error": f.message, "exit_code": f.code }));
            ExitCode::from(f.code)
        }
    }
}
