//! Command-line front end.
//!
//! Exit codes: 0 success (including "no design"), 1 input error, 2 capacity error.
//! `SPINREG_CONSTANTS` names a JSON constants table used when `--constants` is absent.

mod output;

pub use output::{human, machine, round15, Cell, Provenance, Table};

use crate::designer::{
    estimate_position, optimize_register_gate, DesignConstraints, GateDesign, PhysicalConstants,
    Ranking,
};
use crate::entanglement::{makhlin_g1, makhlin_g2, scaled_nuclear_one_tangle};
use crate::error::{invalid, Error, Result};
use crate::fidelity::{
    target_subspace_fidelity, target_subspace_fidelity_factorized, RegisterPartition,
};
use crate::qec::{error_surface, run_bitflip_code, QecError, QecScenario, QecScheme};
use crate::register::{dataset, dataset_names, RegisterFile};
use crate::spin_model::{
    build_sequence, coherence, resonance_time, unit_propagator, ConditionalRotation, Electron,
    NuclearSpin, ResonanceVariant, SequenceKind,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

pub const CONSTANTS_ENV: &str = "SPINREG_CONSTANTS";

#[derive(Parser, Debug)]
#[command(
    name = "spinreg",
    version,
    about = "Electron-nuclear register gate design and analysis"
)]
pub struct Cli {
    /// Worker threads for parallel scans.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON constants table for position estimates.
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List bundled registers.
    Datasets,
    /// Resonance times per spin and order.
    Resonances(ResonancesArgs),
    /// Synchronous multi-spin gate design.
    Design(DesignArgs),
    /// Gate error and tangles of a fixed gate.
    Fidelity(FidelityArgs),
    /// Three-qubit bit-flip code.
    Qec(QecArgs),
    /// Tangle, invariant and fidelity series over unit time and iterations.
    Sweep(SweepArgs),
    /// Distance and polar angle from hyperfine couplings.
    Position(PositionArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RegisterArgs {
    /// Register CSV file.
    #[arg(long, conflicts_with = "dataset")]
    pub register: Option<PathBuf>,
    /// Bundled register name.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long)]
    pub larmor_khz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s1: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to a file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Primary,
    Udd4Extra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RankingArg {
    MostTargets,
    MeanTangle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Sequential,
    Multispin,
}

#[derive(Args, Debug)]
pub struct ResonancesArgs {
    #[command(flatten)]
    pub register: RegisterArgs,
    #[arg(long, default_value_t = 1)]
    pub k_min: u32,
    #[arg(long, default_value_t = 4)]
    pub k_max: u32,
    #[arg(long, default_value = "cpmg")]
    pub sequence: String,
    #[arg(long, value_enum, default_value_t = VariantArg::Primary)]
    pub variant: VariantArg,
    /// Restrict to these labels (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    #[command(flatten)]
    pub register: RegisterArgs,
    #[arg(long)]
    pub anchor: String,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 1500.0)]
    pub max_gate_time_us: f64,
    #[arg(long, default_value_t = 0.8)]
    pub target_min: f64,
    #[arg(long, default_value_t = 0.14)]
    pub unwanted_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub unwanted_mean_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub window_us: f64,
    #[arg(long, default_value_t = 1.0)]
    pub step_ns: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n_max: u64,
    #[arg(long, default_value_t = 2)]
    pub min_targets: usize,
    #[arg(long, value_enum, default_value_t = RankingArg::MostTargets)]
    pub ranking: RankingArg,
    #[arg(long, default_value = "cpmg")]
    pub sequence: String,
    #[arg(long)]
    pub no_refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GateArgs {
    /// Target labels (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub targets: Vec<String>,
    /// Unit time; defaults to the `k`-th resonance of the first target.
    #[arg(long)]
    pub unit_time_us: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long, default_value = "cpmg")]
    pub sequence: String,
}

#[derive(Args, Debug)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub register: RegisterArgs,
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct QecArgs {
    #[command(flatten)]
    pub register: RegisterArgs,
    #[arg(long, value_enum, default_value_t = SchemeArg::Multispin)]
    pub scheme: SchemeArg,
    /// Design anchor for the multi-spin gate.
    #[arg(long)]
    pub anchor: Option<String>,
    /// Resonance order of the design.
    #[arg(long)]
    pub design_k: Option<u32>,
    #[command(flatten)]
    pub gate: GateArgs,
    /// none, electron, n1 or n2.
    #[arg(long, default_value = "electron")]
    pub error: String,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub gamma: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub delta: f64,
    /// Evaluate a `G×G` grid over `γ ∈ [0, π]`, `δ ∈ [0, 2π)`.
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub register: RegisterArgs,
    #[arg(long)]
    pub t_start_us: Option<f64>,
    #[arg(long)]
    pub t_stop_us: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub t_step_us: f64,
    /// Centre the scan on this spin's `k`-th resonance instead of a fixed range.
    #[arg(long, requires = "k")]
    pub anchor: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value_t = 0.0)]
    pub window_us: f64,
    #[arg(long, default_value_t = 1)]
    pub n_min: u64,
    #[arg(long, default_value_t = 100)]
    pub n_max: u64,
    /// Any of tangle, g1, g2, m, fidelity.
    #[arg(long, value_delimiter = ',', default_value = "tangle,g1,g2")]
    pub metrics: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
    #[arg(long, default_value = "cpmg")]
    pub sequence: String,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PositionArgs {
    #[command(flatten)]
    pub register: RegisterArgs,
    #[arg(long, allow_hyphen_values = true, requires = "b_khz")]
    pub a_khz: Option<f64>,
    #[arg(long)]
    pub b_khz: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) => 2,
        _ => 1,
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&cli, &args, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli, args: &[String], out: &mut dyn Write) -> Result<()> {
    let consts = load_constants(cli.constants.as_ref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let shown: Vec<String> = std::iter::once("spinreg".to_string())
        .chain(args.iter().skip(1).cloned())
        .collect();
    let prov = Provenance::new(&shown, None, &consts);
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| {
        let out = &mut buf;
        match &cli.command {
            Command::Datasets => {
                for n in dataset_names() {
                    writeln!(out, "{n}")?;
                }
                Ok(())
            }
            Command::Resonances(a) => cmd_resonances(a, &prov, out),
            Command::Design(a) => cmd_design(a, &prov, out),
            Command::Fidelity(a) => cmd_fidelity(a, &prov, out),
            Command::Qec(a) => cmd_qec(a, &prov, out),
            Command::Sweep(a) => cmd_sweep(a, &prov, out),
            Command::Position(a) => cmd_position(a, &consts, &prov, out),
        }
    });
    out.write_all(&buf)?;
    result
}

fn load_constants(path: Option<&PathBuf>) -> Result<PhysicalConstants> {
    let path = path
        .cloned()
        .or_else(|| std::env::var_os(CONSTANTS_ENV).map(PathBuf::from));
    match path {
        None => Ok(PhysicalConstants::default()),
        Some(p) => serde_json::from_str(&std::fs::read_to_string(&p)?)
            .map_err(|e| Error::InvalidInput(format!("constants table {}: {e}", p.display()))),
    }
}

struct Loaded {
    file: RegisterFile,
    spins: Vec<NuclearSpin>,
    electron: Electron,
}

fn load_register(a: &RegisterArgs) -> Result<Loaded> {
    let file = match (&a.register, &a.dataset) {
        (Some(p), None) => RegisterFile::load(p)?,
        (None, Some(n)) => dataset(n)?,
        _ => return invalid("give one of --register or --dataset"),
    };
    let spins = file.spins(a.larmor_khz)?;
    let electron = file.electron(a.s0, a.s1)?;
    Ok(Loaded {
        file,
        spins,
        electron,
    })
}

fn emit(out: &mut dyn Write, o: &OutputArgs, text: &str) -> Result<()> {
    match &o.out {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render(t: &Table, o: &OutputArgs, prov: &Provenance) -> String {
    match o.format {
        Format::Table => t.pretty(),
        Format::Csv => t.csv(prov),
        Format::Json => t.json(prov),
    }
}

fn natural_key(label: &str) -> (String, u64, String) {
    let split = label
        .find(|c: char| c.is_ascii_digit())
        .unwrap_or(label.len());
    let (head, tail) = label.split_at(split);
    (
        head.to_string(),
        tail.parse().unwrap_or(u64::MAX),
        label.to_string(),
    )
}

fn cmd_resonances(a: &ResonancesArgs, prov: &Provenance, out: &mut dyn Write) -> Result<()> {
    let reg = load_register(&a.register)?;
    let kind: SequenceKind = a.sequence.parse()?;
    let variant = match a.variant {
        VariantArg::Primary => ResonanceVariant::Primary,
        VariantArg::Udd4Extra => ResonanceVariant::Udd4Extra,
    };
    if a.k_min < 1 || a.k_min > a.k_max {
        return invalid("need 1 <= k-min <= k-max");
    }
    let mut idx: Vec<usize> = (0..reg.spins.len())
        .filter(|&i| a.labels.is_empty() || a.labels.contains(&reg.spins[i].label))
        .collect();
    idx.sort_by_key(|&i| natural_key(&reg.spins[i].label));
    let mut t = Table::new(&["label", "k", "sequence", "t_us"]);
    for i in idx {
        for k in a.k_min..=a.k_max {
            let time = resonance_time(&reg.spins[i], &reg.electron, k, variant)?;
            t.push(vec![
                Cell::Text(reg.spins[i].label.clone()),
                Cell::Int(k as u64),
                Cell::Text(kind.to_string()),
                Cell::Num(time * 1e6),
            ]);
        }
    }
    emit(out, &a.output, &render(&t, &a.output, prov))
}

fn design_table(d: &GateDesign) -> Table {
    let mut t = Table::new(&["label", "role", "scaled_tangle"]);
    for (l, e) in d.targets.iter().zip(&d.target_tangles) {
        t.push(vec![
            Cell::Text(l.clone()),
            Cell::Text("target".into()),
            Cell::Num(*e),
        ]);
    }
    for (l, e) in d.unwanted.iter().zip(&d.unwanted_tangles) {
        t.push(vec![
            Cell::Text(l.clone()),
            Cell::Text("unwanted".into()),
            Cell::Num(*e),
        ]);
    }
    t
}

fn design_json(d: &GateDesign) -> serde_json::Value {
    let r = |x: f64| serde_json::Value::from(round15(x));
    let rs = |v: &[f64]| v.iter().map(|x| round15(*x)).collect::<Vec<_>>();
    serde_json::json!({
        "anchor": d.anchor,
        "k": d.k,
        "unit_time_s": r(d.unit_time),
        "iterations": d.iterations,
        "gate_time_s": r(d.gate_time),
        "targets": d.targets,
        "target_tangles": rs(&d.target_tangles),
        "mean_target_tangle": r(d.mean_target_tangle),
        "unwanted": d.unwanted,
        "unwanted_tangles": rs(&d.unwanted_tangles),
        "gate_error": r(d.gate_error),
    })
}

fn cmd_design(a: &DesignArgs, prov: &Provenance, out: &mut dyn Write) -> Result<()> {
    let reg = load_register(&a.register)?;
    let anchor = reg.file.index_of(&a.anchor)?;
    let c = DesignConstraints {
        max_gate_time: a.max_gate_time_us * 1e-6,
        target_tangle_min: a.target_min,
        unwanted_tangle_max: a.unwanted_max,
        unwanted_tangle_mean_max: a.unwanted_mean_max,
        time_window: a.window_us * 1e-6,
        time_step: a.step_ns * 1e-9,
        k_range: (a.k, a.k),
        n_max: a.n_max,
        min_targets: a.min_targets,
        ranking: match a.ranking {
            RankingArg::MostTargets => Ranking::MostTargets,
            RankingArg::MeanTangle => Ranking::MeanTangle,
        },
        sequence: a.sequence.parse()?,
        refine: !a.no_refine,
    };
    let design = optimize_register_gate(&reg.spins, &reg.electron, &c, anchor, a.k)?;
    let text = match (&design, a.output.format) {
        (_, Format::Json) => {
            let v = serde_json::json!({
                "provenance": prov,
                "design": design.as_ref().map(design_json),
            });
            serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
        }
        (None, Format::Csv) => format!("{}no design\n", prov.comment()),
        (None, Format::Table) => "no design\n".to_string(),
        (Some(d), Format::Csv) => design_table(d).csv(prov),
        (Some(d), Format::Table) => {
            let mut s = format!(
                "anchor {}  k {}  t {} us  N {}  T {} us\ntargets {}\ngate error {}\n\n",
                d.anchor,
                d.k,
                human(d.unit_time * 1e6, 9),
                d.iterations,
                human(d.gate_time * 1e6, 5),
                d.targets.join(","),
                human(d.gate_error, 5),
            );
            s += &design_table(d).pretty();
            s
        }
    };
    emit(out, &a.output, &text)
}

/// Unit rotations, unit time and iterations of a gate described on the command line.
fn gate_from_args(
    reg: &Loaded,
    g: &GateArgs,
) -> Result<(Vec<usize>, Vec<ConditionalRotation>, f64, u64)> {
    if g.targets.is_empty() {
        return invalid("--targets is required");
    }
    let idx: Vec<usize> = g
        .targets
        .iter()
        .map(|l| reg.file.index_of(l))
        .collect::<Result<_>>()?;
    let t = match (g.unit_time_us, g.k) {
        (Some(t), _) => t * 1e-6,
        (None, Some(k)) => resonance_time(
            &reg.spins[idx[0]],
            &reg.electron,
            k,
            ResonanceVariant::Primary,
        )?,
        (None, None) => return invalid("give --unit-time-us or --k"),
    };
    let Some(n) = g.iterations else {
        return invalid("--iterations is required");
    };
    let seq = build_sequence(&g.sequence.parse()?, t)?;
    let rots = reg
        .spins
        .iter()
        .map(|s| unit_propagator(&seq, s, &reg.electron))
        .collect();
    Ok((idx, rots, t, n))
}

fn cmd_fidelity(a: &FidelityArgs, prov: &Provenance, out: &mut dyn Write) -> Result<()> {
    let reg = load_register(&a.register)?;
    let (idx, rots, t, n) = gate_from_args(&reg, &a.gate)?;
    let targets: Vec<_> = idx.iter().map(|&i| rots[i]).collect();
    let unwanted: Vec<_> = (0..rots.len())
        .filter(|i| !idx.contains(i))
        .map(|i| rots[i])
        .collect();
    let p = RegisterPartition::from_units(&targets, &unwanted, n)?;
    let f = target_subspace_fidelity(&p)?;
    let mut table = Table::new(&["label", "role", "scaled_tangle"]);
    for (i, s) in reg.spins.iter().enumerate() {
        let role = if idx.contains(&i) {
            "target"
        } else {
            "unwanted"
        };
        table.push(vec![
            Cell::Text(s.label.clone()),
            Cell::Text(role.into()),
            Cell::Num(scaled_nuclear_one_tangle(&rots[i], n)),
        ]);
    }
    let text = match a.output.format {
        Format::Table => format!(
            "t {} us  N {}  T {} us  gate error {}\n\n{}",
            human(t * 1e6, 9),
            n,
            human(n as f64 * t * 1e6, 7),
            human(1.0 - f, 5),
            table.pretty()
        ),
        Format::Csv => table.csv(prov),
        Format::Json => {
            let v = serde_json::json!({
                "provenance": prov,
                "unit_time_s": round15(t),
                "iterations": n,
                "gate_time_s": round15(n as f64 * t),
                "gate_error": round15(1.0 - f),
                "spins": table.records(),
            });
            serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
        }
    };
    emit(out, &a.output, &text)
}

fn qec_gates(a: &QecArgs, reg: &Loaded) -> Result<[ConditionalRotation; 2]> {
    if let (Some(anchor), Some(k)) = (&a.anchor, a.design_k) {
        let ai = reg.file.index_of(anchor)?;
        let c = DesignConstraints::default();
        let Some(d) = optimize_register_gate(&reg.spins, &reg.electron, &c, ai, k)? else {
            return Err(Error::NoSolution(format!(
                "no design for anchor {anchor}, k={k}"
            )));
        };
        if d.targets.len() != 2 {
            return Err(Error::NoSolution(format!(
                "design targets {} spins, need 2",
                d.targets.len()
            )));
        }
        let seq = build_sequence(&c.sequence, d.unit_time)?;
        return Ok([0, 1].map(|j| {
            unit_propagator(&seq, &reg.spins[d.target_indices[j]], &reg.electron)
                .iterate(d.iterations)
        }));
    }
    let (idx, rots, _, n) = gate_from_args(reg, &a.gate)?;
    if idx.len() != 2 {
        return invalid("the code needs exactly two target nuclei");
    }
    Ok([rots[idx[0]].iterate(n), rots[idx[1]].iterate(n)])
}

fn cmd_qec(a: &QecArgs, prov: &Provenance, out: &mut dyn Write) -> Result<()> {
    let error: QecError = a.error.parse()?;
    let scenario = match a.scheme {
        SchemeArg::Sequential => QecScenario::sequential_ideal(error, a.gamma, a.delta),
        SchemeArg::Multispin => {
            let reg = load_register(&a.register)?;
            QecScenario::multispin(qec_gates(a, &reg)?, error, a.gamma, a.delta)
        }
    };
    if let Some(g) = a.grid {
        if g < 2 {
            return invalid("grid needs at least 2 points per axis");
        }
        let gammas: Vec<f64> = (0..g)
            .map(|i| std::f64::consts::PI * i as f64 / (g - 1) as f64)
            .collect();
        let deltas: Vec<f64> = (0..g)
            .map(|i| std::f64::consts::TAU * i as f64 / g as f64)
            .collect();
        let s = error_surface(&scenario, &gammas, &deltas);
        let mut t = Table::new(&["gamma", "delta", "error_probability"]);
        for (gi, row) in s.iter().enumerate() {
            for (di, v) in row.iter().enumerate() {
                t.push(vec![
                    Cell::Num(gammas[gi]),
                    Cell::Num(deltas[di]),
                    Cell::Num(*v),
                ]);
            }
        }
        let fmt = if a.output.format == Format::Table {
            Format::Csv
        } else {
            a.output.format
        };
        let o = OutputArgs {
            format: fmt,
            out: a.output.out.clone(),
        };
        return emit(out, &o, &render(&t, &o, prov));
    }
    let r = run_bitflip_code(&scenario);
    let scheme = match scenario.scheme {
        QecScheme::Sequential => "sequential",
        QecScheme::Multispin => "multispin",
    };
    let mut t = Table::new(&["stage", "basis", "re", "im"]);
    for (name, s) in r.stages() {
        for (i, x) in s.iter().enumerate() {
            t.push(vec![
                Cell::Text(name.into()),
                Cell::Text(format!("{i:03b}")),
                Cell::Num(x.re),
                Cell::Num(x.im),
            ]);
        }
    }
    let text = match a.output.format {
        Format::Table => format!(
            "scheme {scheme}  error {:?}\nrecovery {}\npurity {}\n",
            scenario.error,
            human(r.recovery, 6),
            human(r.purity, 6)
        ),
        Format::Csv => t.csv(prov),
        Format::Json => {
            let v = serde_json::json!({
                "provenance": prov,
                "scheme": scheme,
                "error": format!("{:?}", scenario.error),
                "recovery": round15(r.recovery),
                "purity": round15(r.purity),
                "stages": t.records(),
            });
            serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
        }
    };
    emit(out, &a.output, &text)
}

const METRICS: [&str; 5] = ["tangle", "g1", "g2", "m", "fidelity"];

fn cmd_sweep(a: &SweepArgs, prov: &Provenance, out: &mut dyn Write) -> Result<()> {
    let metrics: Vec<String> = a
        .metrics
        .iter()
        .map(|m| m.trim().to_ascii_lowercase())
        .filter(|m| !m.is_empty())
        .collect();
    if metrics.is_empty() {
        return invalid("the metrics list is empty");
    }
    if let Some(m) = metrics.iter().find(|m| !METRICS.contains(&m.as_str())) {
        return invalid(format!(
            "unknown metric '{m}' (expected one of {})",
            METRICS.join(", ")
        ));
    }
    let reg = load_register(&a.register)?;
    let kind: SequenceKind = a.sequence.parse()?;
    if a.n_min < 1 || a.n_min > a.n_max || !(a.t_step_us > 0.0) {
        return invalid("need 1 <= n-min <= n-max and a positive step");
    }
    let (t0, t1) = match (&a.anchor, a.k, a.t_start_us, a.t_stop_us) {
        (Some(l), Some(k), _, _) => {
            let tk = resonance_time(
                &reg.spins[reg.file.index_of(l)?],
                &reg.electron,
                k,
                ResonanceVariant::Primary,
            )?;
            (tk - a.window_us * 1e-6, tk + a.window_us * 1e-6)
        }
        (None, _, Some(s), Some(e)) => (s * 1e-6, e * 1e-6),
        _ => return invalid("give --t-start-us and --t-stop-us, or --anchor with --k"),
    };
    let steps = ((t1 - t0) / (a.t_step_us * 1e-6) + 1e-9).floor() as u64;
    let chosen: Vec<usize> = (0..reg.spins.len())
        .filter(|&i| a.labels.is_empty() || a.labels.contains(&reg.spins[i].label))
        .collect();
    let mut cols = vec!["t_us", "n", "k", "label", "gate_time_us"];
    cols.extend(METRICS.iter().filter(|m| metrics.iter().any(|x| x == *m)));
    let mut table = Table::new(&cols);
    let kcell = a.k.map_or(Cell::Empty, |k| Cell::Int(k as u64));
    for s in 0..=steps {
        let t = t0 + s as f64 * a.t_step_us * 1e-6;
        if t <= 0.0 {
            continue;
        }
        let seq = build_sequence(&kind, t)?;
        let rots: Vec<_> = reg
            .spins
            .iter()
            .map(|sp| unit_propagator(&seq, sp, &reg.electron))
            .collect();
        for n in a.n_min..=a.n_max {
            for &i in &chosen {
                let mut row = vec![
                    Cell::Num(t * 1e6),
                    Cell::Int(n),
                    kcell.clone(),
                    Cell::Text(reg.spins[i].label.clone()),
                    Cell::Num(t * n as f64 * 1e6),
                ];
                for m in &cols[5..] {
                    let v = match *m {
                        "tangle" => scaled_nuclear_one_tangle(&rots[i], n),
                        "g1" => makhlin_g1(&rots[i], n),
                        "g2" => makhlin_g2(&rots[i], n),
                        "m" => coherence(&rots[i].iterate(n)).m,
                        _ => {
                            let others: Vec<_> = (0..rots.len())
                                .filter(|&j| j != i)
                                .map(|j| rots[j])
                                .collect();
                            target_subspace_fidelity_factorized(&RegisterPartition::from_units(
                                &[rots[i]],
                                &others,
                                n,
                            )?)
                        }
                    };
                    row.push(Cell::Num(v));
                }
                table.push(row);
            }
        }
    }
    if let Some(p) = &a.out_csv {
        std::fs::write(p, table.csv(prov))?;
    }
    if let Some(p) = &a.out_json {
        std::fs::write(p, table.json(prov))?;
    }
    if a.out_csv.is_none() && a.out_json.is_none() || a.output.out.is_some() {
        emit(out, &a.output, &render(&table, &a.output, prov))?;
    }
    Ok(())
}

fn cmd_position(
    a: &PositionArgs,
    consts: &PhysicalConstants,
    prov: &Provenance,
    out: &mut dyn Write,
) -> Result<()> {
    let rows: Vec<(String, f64, f64)> = match (a.a_khz, a.b_khz) {
        (Some(x), Some(y)) => vec![("-".into(), x, y)],
        _ => load_register(&a.register)?
            .file
            .rows
            .into_iter()
            .map(|r| (r.label, r.a_khz, r.b_khz))
            .collect(),
    };
    let mut t = Table::new(&["label", "A_kHz", "B_kHz", "R_angstrom", "theta_deg"]);
    for (l, x, y) in rows {
        let (r, th) =
            match estimate_position(crate::spin_model::khz(x), crate::spin_model::khz(y), consts) {
                Ok(p) => (Cell::Num(p.r_angstrom), Cell::Num(p.theta_deg)),
                Err(_) => (Cell::Empty, Cell::Empty),
            };
        t.push(vec![Cell::Text(l), Cell::Num(x), Cell::Num(y), r, th]);
    }
    emit(out, &a.output, &render(&t, &a.output, prov))
}
