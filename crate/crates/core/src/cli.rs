//! `xcube` command line.
//!
//! Every command accepts `--config FILE` (TOML with the same keys as the
//! long flags, e.g. `lx = 4`, `boundary = "one-storey"`,
//! `inject = ["X:c3:post"]`); flags given on the command line win.
//!
//! Exit codes: `0` success, `1` verification failure or runtime error,
//! `2` invalid spec, config or usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, CodeQubitId, DualLayer, Lattice, LatticeSpec};
use crate::protocol::{
    apply_correction, measure_ancillae, prepare_cluster, run_rng, solve_correction, verify_xcube, CorrectionMode,
    MeasurementRecord, StabilizerReport, Strategy,
};
use crate::scheduler::{
    cz12_schedule, cz12_schedule_greedy, emit_circuit, movement_schedule, validate_schedule, CircuitForm, Schedule,
    ScheduleDocument,
};
use crate::stabilizer::{run_circuit, Circuit, Tableau};
use crate::syndrome::{
    extract_syndromes, run_with_events, sweep, sweep_events, ErrorEvent, RunSettings, SweepKind, SyndromeReport,
};

#[derive(Parser, Debug)]
#[command(name = "xcube", version, about = "X-cube ground-state preparation from a measured cluster state")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline and write a run report (exit 0 iff all stabilizers are +1).
    Prepare(CommonArgs),
    /// One run per single error; JSON lines plus a summary line.
    SweepErrors(CommonArgs),
    /// Write the preparation circuit in the text format.
    Emit(CommonArgs),
    /// Write the lattice document.
    Lattice(CommonArgs),
    /// Write the preparation schedule.
    Schedule(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum StrategyArg {
    Movement,
    Cz12,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Physical,
    PauliFrame,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FormArg {
    Cz,
    DynamicCnot,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    #[arg(long)]
    lx: Option<usize>,
    #[arg(long)]
    ly: Option<usize>,
    #[arg(long)]
    lz: Option<usize>,
    #[arg(long, conflicts_with = "one_storey")]
    periodic: bool,
    #[arg(long)]
    one_storey: bool,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    /// `<X|Y|Z>:<cN|aN>:<pre|post>`; repeatable.
    #[arg(long)]
    inject: Vec<String>,
    /// code-x, code-y, code-z, ancilla-x, ancilla-y, ancilla-z or all; repeatable.
    #[arg(long)]
    sweep: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    validate: bool,
    /// Fall back to first-fit colouring when parity CZ12 classes do not wrap.
    #[arg(long)]
    greedy: bool,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    lx: Option<usize>,
    ly: Option<usize>,
    lz: Option<usize>,
    boundary: Option<String>,
    strategy: Option<StrategyArg>,
    seed: Option<u64>,
    mode: Option<ModeArg>,
    form: Option<FormArg>,
    inject: Option<Vec<String>>,
    sweep: Option<Vec<String>>,
    out: Option<PathBuf>,
    validate: Option<bool>,
    greedy: Option<bool>,
    timing: Option<bool>,
    verbose: Option<u8>,
}

/// Fully resolved settings for one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub spec: LatticeSpec,
    pub strategy: Strategy,
    pub seed: u64,
    pub mode: CorrectionMode,
    pub form: CircuitForm,
    pub events: Vec<ErrorEvent>,
    pub sweeps: Vec<SweepKind>,
    pub out: Option<PathBuf>,
    pub validate: bool,
    pub greedy: bool,
    pub timing: bool,
    pub verbose: u8,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl RunConfig {
    fn resolve(args: &CommonArgs) -> Result<RunConfig> {
        let file: ConfigFile = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let boundary = if args.one_storey {
            Boundary::OneStoreyOpen
        } else if args.periodic {
            Boundary::Periodic3D
        } else {
            match file.boundary.as_deref() {
                None | Some("periodic") => Boundary::Periodic3D,
                Some("one-storey") => Boundary::OneStoreyOpen,
                Some(other) => return Err(usage(format!("unknown boundary {other:?}"))),
            }
        };
        let default_lz = if boundary == Boundary::OneStoreyOpen { 1 } else { 2 };
        let spec = LatticeSpec::new(
            args.lx.or(file.lx).unwrap_or(2),
            args.ly.or(file.ly).unwrap_or(2),
            args.lz.or(file.lz).unwrap_or(default_lz),
            boundary,
        )?;
        let strategy = match args.strategy.or(file.strategy).unwrap_or(StrategyArg::Movement) {
            StrategyArg::Movement => Strategy::Movement12,
            StrategyArg::Cz12 => Strategy::Cz12Colored,
        };
        let mode = match args.mode.or(file.mode).unwrap_or(ModeArg::Physical) {
            ModeArg::Physical => CorrectionMode::Physical,
            ModeArg::PauliFrame => CorrectionMode::PauliFrame,
        };
        let form = match args.form.or(file.form).unwrap_or(FormArg::Cz) {
            FormArg::Cz => CircuitForm::Cz,
            FormArg::DynamicCnot => CircuitForm::DynamicCnot,
        };
        let inject = if args.inject.is_empty() { file.inject.unwrap_or_default() } else { args.inject.clone() };
        let sweep = if args.sweep.is_empty() { file.sweep.unwrap_or_default() } else { args.sweep.clone() };
        Ok(RunConfig {
            spec,
            strategy,
            seed: args.seed.or(file.seed).unwrap_or(0),
            mode,
            form,
            events: inject.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            sweeps: sweep.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            out: args.out.clone().or(file.out),
            validate: args.validate || file.validate.unwrap_or(false),
            greedy: args.greedy || file.greedy.unwrap_or(false),
            timing: args.timing || file.timing.unwrap_or(false),
            verbose: args.verbose.max(file.verbose.unwrap_or(0)),
        })
    }

    pub fn lattice(&self) -> Result<Arc<Lattice>> {
        let l = Lattice::build(self.spec)?;
        for e in &self.events {
            e.validate(&l)?;
        }
        Ok(Arc::new(l))
    }

    pub fn schedule(&self, lattice: &Lattice) -> Result<Schedule> {
        match self.strategy {
            Strategy::Movement12 => Ok(movement_schedule(lattice)),
            Strategy::Cz12Colored if self.greedy => Ok(cz12_schedule_greedy(lattice)),
            Strategy::Cz12Colored => cz12_schedule(lattice),
        }
    }
}

// ---- run report -------------------------------------------------------------

pub const RUN_REPORT_SCHEMA: &str = "xcube.run-report/v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSection {
    pub order: String,
    pub outcomes: Vec<i8>,
    pub consistent: bool,
    pub violated_layers: Vec<DualLayer>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub lattice: LatticeSpec,
    pub code_count: usize,
    pub ancilla_count: usize,
    pub seed: u64,
    pub stream: u64,
    pub strategy: Strategy,
    pub correction_mode: CorrectionMode,
    pub injected: Vec<ErrorEvent>,
    pub record: RecordSection,
    /// `None` when the record is inconsistent.
    pub x_support: Option<Vec<CodeQubitId>>,
    pub stabilizers: StabilizerReport,
    pub syndromes: SyndromeReport,
    pub all_plus: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

/// Run the pipeline once (stream 0) and assemble its report.
pub fn run_report(
    lattice: &Arc<Lattice>,
    strategy: Strategy,
    mode: CorrectionMode,
    seed: u64,
    events: &[ErrorEvent],
) -> Result<RunReport> {
    let sim = run_with_events(lattice, RunSettings { strategy, mode, seed }, 0, events)?;
    let record = sim.record().expect("measured");
    let stabilizers = sim.verify()?;
    let syndromes = extract_syndromes(&sim)?;
    let consistent = syndromes.record_consistent == Some(true);
    let x_support = sim.frame().map(|f| f.x_support.iter().map(|&c| lattice.code_id(c)).collect());
    Ok(RunReport {
        schema: RUN_REPORT_SCHEMA.into(),
        lattice: *lattice.spec(),
        code_count: lattice.code_count(),
        ancilla_count: lattice.ancilla_count(),
        seed,
        stream: sim.stream(),
        strategy,
        correction_mode: mode,
        injected: events.to_vec(),
        record: RecordSection {
            order: "ascending-ancilla-index".into(),
            outcomes: record.outcomes.clone(),
            consistent,
            violated_layers: record.violated_layers(lattice),
        },
        x_support,
        all_plus: stabilizers.all_plus,
        stabilizers,
        syndromes,
        timing: None,
    })
}

// ---- emit validation --------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitSummary {
    pub schema: String,
    pub form: CircuitForm,
    pub strategy: Strategy,
    pub coloring: crate::scheduler::Coloring,
    /// Entangling rounds of the schedule.
    pub depth: usize,
    /// Moments of the emitted circuit, including initialisation and readout.
    pub moments: usize,
    pub gates: usize,
    pub measurements: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub validated: Option<bool>,
}

/// Outcome record, code-qubit stabilizer group and corrected stabilizer
/// report of a state produced by a preparation circuit.
#[derive(Debug, PartialEq, Eq)]
pub struct CircuitOutcome {
    pub record: MeasurementRecord,
    pub code_group: String,
    pub report: Option<StabilizerReport>,
}

fn finish_outcome(mut t: Tableau, lattice: &Lattice, record: MeasurementRecord) -> Result<CircuitOutcome> {
    let code: Vec<usize> = (0..lattice.code_count()).collect();
    let code_group = crate::stabilizer::tableau::join_rows(&t.subsystem_group(&code));
    let report = match solve_correction(lattice, &record) {
        Ok(frame) => {
            apply_correction(&mut t, lattice, &frame)?;
            Some(verify_xcube(&t, lattice)?)
        }
        Err(Error::InconsistentRecord { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(CircuitOutcome { record, code_group, report })
}

/// Simulate an emitted circuit with run stream 0 of `seed`.
pub fn simulate_circuit(circuit: &Circuit, lattice: &Lattice, seed: u64) -> Result<CircuitOutcome> {
    let mut t = Tableau::new(circuit.num_qubits);
    let bits = run_circuit(circuit, &mut t, &mut run_rng(seed, 0))?;
    finish_outcome(t, lattice, MeasurementRecord::from_bits(seed, 0, &bits))
}

/// The same quantities from the direct pipeline.
pub fn simulate_pipeline(lattice: &Lattice, strategy: Strategy, seed: u64) -> Result<CircuitOutcome> {
    let mut t = prepare_cluster(lattice, strategy);
    let bits = measure_ancillae(&mut t, lattice, &mut run_rng(seed, 0))?;
    finish_outcome(t, lattice, MeasurementRecord::from_bits(seed, 0, &bits))
}

// ---- commands ---------------------------------------------------------------

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

fn write_output(io: &mut Io<'_>, out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => io.stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn cmd_prepare(cfg: &RunConfig, io: &mut Io<'_>) -> Result<i32> {
    let start = Instant::now();
    let lattice = cfg.lattice()?;
    let mut report = run_report(&lattice, cfg.strategy, cfg.mode, cfg.seed, &cfg.events)?;
    if cfg.timing {
        report.timing = Some(Timing { total_ms: start.elapsed().as_secs_f64() * 1e3 });
    }
    write_output(io, cfg.out.as_deref(), &to_json(&report)?)?;
    if !report.record.consistent {
        writeln!(
            io.stderr,
            "measurement record violates constraints: {} dual layer(s) with product -1",
            report.record.violated_layers.len()
        )?;
    } else if !report.all_plus {
        writeln!(io.stderr, "stabilizer verification failed: not every cube and star is +1")?;
    }
    if cfg.verbose > 0 {
        writeln!(io.stderr, "prepared {:?} with {:?}, all_plus={}", cfg.spec, cfg.strategy, report.all_plus)?;
    }
    Ok(if report.all_plus { 0 } else { 1 })
}

#[derive(Serialize)]
struct SweepSummaryLine<'a> {
    schema: &'static str,
    lattice: LatticeSpec,
    seed: u64,
    strategy: Strategy,
    correction_mode: CorrectionMode,
    classification: &'static str,
    #[serde(flatten)]
    summary: &'a crate::syndrome::SweepSummary,
}

fn cmd_sweep(cfg: &RunConfig, io: &mut Io<'_>) -> Result<i32> {
    let lattice = cfg.lattice()?;
    let mut events: Vec<ErrorEvent> = cfg.sweeps.iter().flat_map(|&k| sweep_events(&lattice, k)).collect();
    events.extend(&cfg.events);
    let settings = RunSettings { strategy: cfg.strategy, mode: cfg.mode, seed: cfg.seed };
    let (entries, summary) = sweep(&lattice, settings, &events)?;
    let mut text = String::new();
    for e in &entries {
        text.push_str(&serde_json::to_string(e)?);
        text.push('\n');
    }
    let line = SweepSummaryLine {
        schema: "xcube.sweep-summary/v1",
        lattice: cfg.spec,
        seed: cfg.seed,
        strategy: cfg.strategy,
        correction_mode: cfg.mode,
        classification: if summary.detected == 0 { "clean" } else { "detected" },
        summary: &summary,
    };
    text.push_str(&serde_json::to_string(&line)?);
    text.push('\n');
    write_output(io, cfg.out.as_deref(), &text)?;
    if cfg.verbose > 0 {
        writeln!(io.stderr, "{} runs", summary.runs)?;
    }
    Ok(0)
}

fn cmd_emit(cfg: &RunConfig, io: &mut Io<'_>) -> Result<i32> {
    let lattice = cfg.lattice()?;
    let schedule = cfg.schedule(&lattice)?;
    let circuit = emit_circuit(&schedule, cfg.form);
    let text = circuit.to_text();
    let validated = if cfg.validate {
        let parsed = Circuit::parse(&text)?;
        parsed.validate()?;
        let same_text = parsed == circuit && parsed.to_text() == text;
        let from_circuit = simulate_circuit(&parsed, &lattice, cfg.seed)?;
        let reference = simulate_pipeline(&lattice, cfg.strategy, cfg.seed)?;
        Some(same_text && from_circuit == reference)
    } else {
        None
    };
    let summary = EmitSummary {
        schema: "xcube.emit/v1".into(),
        form: cfg.form,
        strategy: cfg.strategy,
        coloring: schedule.coloring,
        depth: schedule.depth(),
        moments: circuit.depth(),
        gates: circuit.gate_count(),
        measurements: circuit.measurement_count(),
        validated,
    };
    let summary_json = to_json(&summary)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            io.stdout.write_all(summary_json.as_bytes())?;
        }
        None => {
            io.stdout.write_all(text.as_bytes())?;
            io.stderr.write_all(summary_json.as_bytes())?;
        }
    }
    if validated == Some(false) {
        writeln!(io.stderr, "validation failed: emitted circuit and pipeline disagree")?;
        return Ok(1);
    }
    Ok(0)
}

fn cmd_lattice(cfg: &RunConfig, io: &mut Io<'_>) -> Result<i32> {
    let lattice = cfg.lattice()?;
    write_output(io, cfg.out.as_deref(), &to_json(&lattice.to_document())?)?;
    Ok(0)
}

fn cmd_schedule(cfg: &RunConfig, io: &mut Io<'_>) -> Result<i32> {
    let lattice = cfg.lattice()?;
    let schedule = cfg.schedule(&lattice)?;
    validate_schedule(&lattice, &schedule)?;
    write_output(io, cfg.out.as_deref(), &to_json(&ScheduleDocument::from(&schedule))?)?;
    Ok(0)
}

type CommandFn = fn(&RunConfig, &mut Io<'_>) -> Result<i32>;

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidSpec(_)
        | Error::InvalidEvent(_)
        | Error::ColoringDoesNotWrap { .. }
        | Error::UndefinedStabilizer { .. } => 2,
        _ => 1,
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let msg = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(msg.as_bytes());
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    let (args, cmd): (&CommonArgs, CommandFn) = match &cli.command {
        Command::Prepare(a) => (a, cmd_prepare),
        Command::SweepErrors(a) => (a, cmd_sweep),
        Command::Emit(a) => (a, cmd_emit),
        Command::Lattice(a) => (a, cmd_lattice),
        Command::Schedule(a) => (a, cmd_schedule),
    };
    let result = RunConfig::resolve(args).and_then(|cfg| cmd(&cfg, &mut io));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            if let Error::ColoringDoesNotWrap { .. } = e {
                let _ = writeln!(io.stderr, "hint: pass --greedy for a first-fit CZ12 colouring");
            }
            if exit_code_for(&e) == 2 {
                let _ = writeln!(io.stderr, "usage: xcube <prepare|sweep-errors|emit|lattice|schedule> [--help]");
            }
            exit_code_for(&e)
        }
    }
}
