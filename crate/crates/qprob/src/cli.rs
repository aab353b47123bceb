//! The `qprob` command line.
//!
//! Exit codes: `0` success, `1` configuration or usage error, `2` violated
//! domain invariant, `3` numerical failure, `4` IO error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Grid, Preset, ScenarioConfig};
use crate::error::QprobError;
use crate::figures;
use crate::io::{Constraint, Format, Metadata, Payload, ResultEnvelope, Sweep, NORMALIZATION_TOL};
use crate::ising;
use crate::linalg::{c64, trace_product};
use crate::manybody;
use crate::presets::TwoTimeSetup;
use crate::quasiprob::{self, Ordering};
use crate::random;
use crate::schemes;
use crate::thermo;
use crate::tol;

#[derive(Parser, Debug)]
#[command(name = "qprob", version, about = "Two-time quasiprobability tables, distributions and figure data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Scenario file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output prefix; writes `<out>.csv` and/or `<out>.json`. Without it the
    /// CSV (or JSON) goes to standard output and the summary to standard error.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Both)]
    format: OutFormat,
    #[arg(long, global = true, env = "QPROB_THREADS")]
    threads: Option<usize>,
    /// Seed for the randomized checks; physics presets never use it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Sweep grid as `start,stop,count` (inclusive)
    #[arg(long, global = true, value_parser = Grid::parse)]
    grid: Option<Grid>,
    #[command(flatten)]
    params: Params,
}

/// Preset parameter overrides, each a number or `re,im`.
#[derive(Args, Debug, Clone, Default, Serialize)]
struct Params {
    #[arg(long, global = true, allow_hyphen_values = true)]
    rho01: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    rho11: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    p0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long = "beta-c", alias = "beta_c", global = true, allow_hyphen_values = true)]
    beta_c: Option<String>,
    #[arg(long = "beta-h", alias = "beta_h", global = true, allow_hyphen_values = true)]
    beta_h: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b2: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    j: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long = "N", global = true)]
    n: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda1: Option<String>,
}

impl Params {
    fn overrides(&self) -> Vec<(String, String)> {
        let fields = [
            ("rho01", &self.rho01),
            ("rho11", &self.rho11),
            ("kappa", &self.kappa),
            ("sigma", &self.sigma),
            ("p0", &self.p0),
            ("omega", &self.omega),
            ("delta", &self.delta),
            ("p", &self.p),
            ("c", &self.c),
            ("t", &self.t),
            ("eta", &self.eta),
            ("xi", &self.xi),
            ("theta", &self.theta),
            ("beta_c", &self.beta_c),
            ("beta_h", &self.beta_h),
            ("b1", &self.b1),
            ("b2", &self.b2),
            ("j", &self.j),
            ("beta", &self.beta),
            ("u", &self.u),
            ("b", &self.b),
            ("N", &self.n),
            ("lambda0", &self.lambda0),
            ("lambda1", &self.lambda1),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum OutFormat {
    Csv,
    Json,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum OrderingArg {
    Kdq1,
    Kdq2,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
enum Command {
    /// Two-point-measurement joint probabilities
    Tpm,
    /// Kirkwood-Dirac quasiprobability table
    Kdq {
        #[arg(long, value_enum, default_value_t = OrderingArg::Kdq1)]
        ordering: OrderingArg,
    },
    /// Margenau-Hill quasiprobability table
    Mhq,
    /// Three-index non-demolition quasiprobability
    Ndqp,
    /// Margenau-Hill table rebuilt from weak two-point measurements
    Wtpm,
    /// Simulated ancilla readout of the characteristic function and its inversion
    Ramsey,
    /// Detector pointer density and phase
    Detector,
    /// Work quasiprobability distribution and its moments
    Work {
        /// Also check the Jarzynski relations at this inverse temperature
        #[arg(long, allow_hyphen_values = true)]
        jarzynski_beta: Option<f64>,
    },
    /// Heat exchange quasiprobabilities between two thermal qubits
    Heat,
    /// Out-of-time-ordered correlator as a characteristic function
    Otoc,
    /// Loschmidt echo as a characteristic function
    Loschmidt,
    /// Ising-chain quench work distribution
    Ising,
    /// Data series behind a published figure
    Figure {
        id: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Randomized identity checks
    Check {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tpm => "tpm",
            Command::Kdq { .. } => "kdq",
            Command::Mhq => "mhq",
            Command::Ndqp => "ndqp",
            Command::Wtpm => "wtpm",
            Command::Ramsey => "ramsey",
            Command::Detector => "detector",
            Command::Work { .. } => "work",
            Command::Heat => "heat",
            Command::Otoc => "otoc",
            Command::Loschmidt => "loschmidt",
            Command::Ising => "ising",
            Command::Figure { .. } => "figure",
            Command::Check { .. } => "check",
        }
    }

    fn default_preset(&self) -> &'static str {
        match self {
            Command::Wtpm => "spin1_wtpm",
            Command::Ramsey => "qubit_ramsey",
            Command::Detector => "gaussian_detector",
            Command::Work { .. } => "driven_qubit",
            Command::Heat => "two_qubit_heat",
            Command::Otoc => "two_qubit_otoc",
            Command::Loschmidt => "qubit_loschmidt",
            Command::Ising => "ising_quench",
            _ => "stern_gerlach",
        }
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Domain(QprobError),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Domain(QprobError::InvalidParameter(_)) => 1,
            CliError::Domain(e) if e.is_numerical() => 3,
            CliError::Domain(_) => 2,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Domain(e) if e.is_numerical() => write!(f, "numerical failure: {e}"),
            CliError::Domain(QprobError::InvalidParameter(m)) => write!(f, "configuration error: {m}"),
            CliError::Domain(e) => write!(f, "invariant violation: {e}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<QprobError> for CliError {
    fn from(e: QprobError) -> Self {
        CliError::Domain(e)
    }
}

/// What a subcommand produced, with the summary printed alongside.
struct Outcome {
    payload: Payload,
    /// `aleph` and normalization residual of the underlying table when the
    /// payload itself is not a table or distribution
    aleph: Option<f64>,
    residual: Option<f64>,
    notes: Vec<String>,
}

impl Outcome {
    fn new(payload: Payload) -> Self {
        Outcome {
            payload,
            aleph: None,
            residual: None,
            notes: Vec::new(),
        }
    }

    fn with_table(mut self, t: &quasiprob::OutcomePairTable) -> Self {
        self.aleph = Some(t.nonpositivity());
        self.residual = Some(t.normalization_residual());
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// Everything that determines the output, hashed into the envelope.
#[derive(Serialize)]
struct Resolved<'a> {
    command: &'a Command,
    scenario: &'a ScenarioConfig,
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qprob: {e}");
            e.code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = &cli.common;
    if let Some(n) = common.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Check { cases } => return check(common.seed, *cases),
        Command::Figure { list: true, .. } => {
            for (id, what) in figures::FIGURE_IDS {
                println!("{id:8} {what}");
            }
            return Ok(());
        }
        _ => {}
    }

    let scenario = resolve(&cli.command, common)?;
    let outcome = execute(&cli.command, &scenario)?;
    let resolved = Resolved {
        command: &cli.command,
        scenario: &scenario,
    };
    let mut name = cli.command.name().to_string();
    if let Command::Figure { id: Some(id), .. } = &cli.command {
        name = format!("figure {id}");
    }
    let envelope = ResultEnvelope::new(Metadata::new(&name, &resolved), outcome.payload)?;

    let aleph = outcome.aleph.or(envelope.checks.nonpositivity);
    let residual = outcome.residual.or(envelope.checks.normalization_residual);
    let mut summary = vec![
        format!("aleph = {}", aleph.map_or("n/a".into(), |v| format!("{v:.12e}"))),
        format!(
            "normalization residual = {}",
            residual.map_or("n/a".into(), |v| format!("{v:.3e}"))
        ),
    ];
    summary.extend(outcome.notes);

    let format = match common.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
        OutFormat::Both => Format::Both,
    };
    match &common.out {
        Some(prefix) => {
            let written = envelope.write(prefix, format).map_err(|e| CliError::Io(e.to_string()))?;
            let mut out = std::io::stdout().lock();
            for line in &summary {
                writeln!(out, "{line}").map_err(|e| CliError::Io(e.to_string()))?;
            }
            for p in written {
                writeln!(out, "wrote {}", p.display()).map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let io_err = |e: std::io::Error| CliError::Io(e.to_string());
            if format == Format::Json {
                writeln!(stdout.lock(), "{}", envelope.to_json()).map_err(io_err)?;
            } else {
                envelope.payload.write_csv(stdout.lock()).map_err(io_err)?;
            }
            for line in &summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}

/// Config file, then `--preset`, then the command's default preset; flag
/// overrides are applied last.
fn resolve(command: &Command, common: &Common) -> Result<ScenarioConfig, CliError> {
    let mut scenario = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::from_toml(&text).map_err(CliError::Config)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(name) = &common.preset {
        if scenario.preset.as_ref().map(|p| p.name()) != Some(name.as_str()) {
            scenario.preset = Some(Preset::by_name(name).map_err(|e| CliError::Config(e.to_string()))?);
            scenario.explicit = None;
        }
    }
    if matches!(command, Command::Figure { .. }) {
        if scenario.preset.is_some() || scenario.explicit.is_some() || common.grid.is_some() || !common.params.overrides().is_empty() {
            return Err(CliError::Config("figure data series use fixed parameters; drop the scenario flags".into()));
        }
        return Ok(scenario);
    }
    if scenario.preset.is_none() && scenario.explicit.is_none() {
        scenario.preset = Some(Preset::by_name(command.default_preset()).expect("known preset"));
    }
    let overrides = common.params.overrides();
    if !overrides.is_empty() {
        match &scenario.preset {
            Some(p) => scenario.preset = Some(p.with_overrides(&overrides).map_err(CliError::Config)?),
            None => return Err(CliError::Config("parameter flags need a preset".into())),
        }
    }
    if common.grid.is_some() {
        scenario.grid = common.grid;
    }
    let sweeps = matches!(command, Command::Ramsey | Command::Detector | Command::Otoc | Command::Loschmidt);
    if scenario.grid.is_some() && !sweeps {
        return Err(CliError::Config(format!("`{}` does not take a grid", command.name())));
    }
    Ok(scenario)
}

fn preset(scenario: &ScenarioConfig) -> Result<&Preset, CliError> {
    scenario
        .preset
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs a preset".into()))
}

fn config_err(e: QprobError) -> CliError {
    match e {
        QprobError::InvalidParameter(m) => CliError::Config(m),
        other => CliError::Domain(other),
    }
}

fn execute(command: &Command, scenario: &ScenarioConfig) -> Result<Outcome, CliError> {
    let grid = |default: Grid| scenario.grid.unwrap_or(default).points();
    match command {
        Command::Tpm => {
            let t = scenario.two_time().map_err(config_err)?.kdq(Ordering::Kdq1)?;
            let mut tpm = t.clone();
            tpm.q = t.p_tpm.map(|p| c64(p, 0.0));
            Ok(Outcome::new(Payload::table(&tpm)).note(format!("KDQ aleph of the same setup = {:.12e}", t.nonpositivity())))
        }
        Command::Kdq { ordering } => {
            let ord = match ordering {
                OrderingArg::Kdq1 => Ordering::Kdq1,
                OrderingArg::Kdq2 => Ordering::Kdq2,
            };
            let t = scenario.two_time().map_err(config_err)?.kdq(ord)?;
            Ok(Outcome::new(Payload::table(&t)))
        }
        Command::Mhq => {
            let mut t = scenario.two_time().map_err(config_err)?.kdq(Ordering::Kdq1)?;
            t.q = t.q.map(|z| c64(z.re, 0.0));
            Ok(Outcome::new(Payload::table(&t)))
        }
        Command::Ndqp => ndqp(&scenario.two_time().map_err(config_err)?),
        Command::Wtpm => wtpm(&scenario.two_time().map_err(config_err)?),
        Command::Ramsey => ramsey(&scenario.two_time().map_err(config_err)?, scenario.grid),
        Command::Detector => {
            let (s, mut spec) = preset(scenario)?.detector().map_err(config_err)?;
            if let Some(g) = scenario.grid {
                spec.grid = (g.start, g.stop, g.count);
            }
            detector(&s, &spec)
        }
        Command::Work { jarzynski_beta } => work(&scenario.work().map_err(config_err)?, *jarzynski_beta),
        Command::Heat => heat(&preset(scenario)?.heat().map_err(config_err)?),
        Command::Otoc => {
            let (spec, u) = preset(scenario)?.otoc().map_err(config_err)?;
            let freqs = match preset(scenario)? {
                Preset::TwoQubitOtoc(p) => Some(manybody::two_qubit_otoc_frequencies(p.b1, p.b2, p.j)),
                _ => None,
            };
            otoc(&spec, u, &grid(Grid::new(0.0, 20.0, 401)), freqs)
        }
        Command::Loschmidt => loschmidt(
            &preset(scenario)?.loschmidt().map_err(config_err)?,
            &grid(Grid::new(0.0, 20.0, 401)),
        ),
        Command::Ising => {
            let spec = preset(scenario)?.ising().map_err(config_err)?;
            let dist = ising::assemble_distribution(&spec)?;
            let negative_at_positive_w = dist
                .atoms
                .iter()
                .filter(|a| a.value > 0.0 && a.weight.re < -1e-12)
                .count();
            Ok(Outcome::new(Payload::distribution(&dist))
                .note(format!("atoms = {}", dist.len()))
                .note(format!("mean work = {:.12e}", dist.mean().re))
                .note(format!("work variance = {:.12e}", dist.variance().re))
                .note(format!("min weight = {:.12e}", dist.min_real_weight()))
                .note(format!("negative weights at W > 0 = {negative_at_positive_w}")))
        }
        Command::Figure { id, .. } => {
            let id = id
                .as_deref()
                .ok_or_else(|| CliError::Config("figure needs an id; see `qprob figure --list`".into()))?;
            Ok(Outcome::new(figures::figure(id).map_err(config_err)?))
        }
        Command::Check { .. } => unreachable!("handled before scenario resolution"),
    }
}

fn ndqp(s: &TwoTimeSetup) -> Result<Outcome, CliError> {
    let t = s.ndqp()?;
    let mut sweep = Sweep::new(&["s1_index", "s1p_index", "s2_index", "o1", "o1p", "o2", "re_q", "im_q"])
        .constrain(Constraint::column_sum("re_q", 1.0))
        .constrain(Constraint::column_sum("im_q", 0.0));
    for a in 0..t.n1() {
        for b in 0..t.n1() {
            for j in 0..t.n2() {
                let q = t.get(a, b, j);
                sweep.push(vec![
                    a as f64,
                    b as f64,
                    j as f64,
                    t.outcomes1[a],
                    t.outcomes1[b],
                    t.outcomes2[j],
                    q.re,
                    q.im,
                ]);
            }
        }
    }
    let kdq = s.kdq(Ordering::Kdq1)?;
    let gap = crate::linalg::max_abs(&(&kdq.q - kdq.p_tpm.map(|p| c64(p, 0.0)) - t.cross_terms()));
    Ok(Outcome::new(Payload::Sweep(sweep))
        .with_table(&kdq)
        .note(format!("max |KDQ - TPM - cross terms| = {gap:.3e}")))
}

fn wtpm(s: &TwoTimeSetup) -> Result<Outcome, CliError> {
    let kdq = s.kdq(Ordering::Kdq1)?;
    let ph = quasiprob::heisenberg_projectors(&s.channel, &s.o2)?;
    let mut sweep = Sweep::new(&["s1_index", "s2_index", "o1", "o2", "p_tpm", "p_s2", "w", "mhq_wtpm", "mhq"])
        .constrain(Constraint::column_sum("mhq_wtpm", 1.0))
        .constrain(Constraint::column_sum("mhq", 1.0));
    let mut worst: f64 = 0.0;
    for i in 0..s.o1.len() {
        for (j, h) in ph.iter().enumerate() {
            let p_s2 = trace_product(h, s.rho.matrix()).re;
            let w = schemes::wtpm_probability(&s.rho, s.o1.projector(i), &s.channel, s.o2.projector(j))?;
            let rebuilt = schemes::mhq_from_wtpm(kdq.p_tpm[(i, j)], p_s2, w);
            worst = worst.max((rebuilt - kdq.q[(i, j)].re).abs());
            sweep.push(vec![
                i as f64,
                j as f64,
                kdq.outcomes1[i],
                kdq.outcomes2[j],
                kdq.p_tpm[(i, j)],
                p_s2,
                w,
                rebuilt,
                kdq.q[(i, j)].re,
            ]);
        }
    }
    Ok(Outcome::new(Payload::Sweep(sweep))
        .with_table(&kdq)
        .note(format!("max |MHQ from wTPM - Re KDQ| = {worst:.3e}")))
}

fn ramsey(s: &TwoTimeSetup, grid: Option<Grid>) -> Result<Outcome, CliError> {
    let kdq = s.kdq(Ordering::Kdq1)?;
    let support = quasiprob::support(&kdq.outcomes1, &kdq.outcomes2);
    let us = match grid {
        Some(g) => g.points(),
        None => schemes::default_u_grid(&support),
    };
    let readout = schemes::ramsey_simulate(&s.rho, &s.o1, &s.channel, &s.o2, &us)?;
    let rec = schemes::reconstruct_distribution(&readout, &support)?;
    let direct = kdq.distribution()?;
    let readout_err = readout
        .samples
        .iter()
        .map(|x| (x.value() - kdq.characteristic(c64(x.u, 0.0))).norm())
        .fold(0.0, f64::max);
    let weight_err = rec
        .distribution
        .atoms
        .iter()
        .map(|a| (a.weight - direct.weight_at(a.value, tol::COALESCE_TOL)).norm())
        .fold(0.0, f64::max);
    Ok(Outcome::new(Payload::readout(&readout, &rec.distribution))
        .with_table(&kdq)
        .note(format!("max |readout - G(u)| = {readout_err:.3e}"))
        .note(format!("max |reconstructed - KDQ weight| = {weight_err:.3e}"))
        .note(format!("inversion condition number = {:.3e}", rec.condition)))
}

fn detector(s: &TwoTimeSetup, spec: &schemes::DetectorSpec) -> Result<Outcome, CliError> {
    let d = schemes::detector_position(&s.rho, &s.o1, &s.channel, &s.o2, spec)?;
    let phase: Complex64 = schemes::detector_phase(&s.rho, &s.o1, &s.channel, &s.o2, spec.kappa * spec.p0)?;
    let mut sweep = Sweep::new(&["x", "density"]).constrain(Constraint::Integral {
        x: "x".into(),
        y: "density".into(),
        target: 1.0,
        tol: tol::GRID_MASS_TOL,
    });
    for (x, p) in d.xs.iter().zip(&d.density) {
        sweep.push(vec![*x, *p]);
    }
    let kdq = s.kdq(Ordering::Kdq1)?;
    Ok(Outcome::new(Payload::Sweep(sweep))
        .with_table(&kdq)
        .note(format!("detector phase = {:.12e} {:+.12e}i", phase.re, phase.im))
        .note(format!("position asymmetry = {:.12e}", d.asymmetry()))
        .note(format!("position integral = {:.12e}", d.integral())))
}

fn work(protocol: &thermo::WorkProtocol, beta: Option<f64>) -> Result<Outcome, CliError> {
    let table = thermo::work_table(protocol)?;
    let dist = table.distribution()?;
    let bound = thermo::classical_bound(protocol)?;
    let var = thermo::work_variance(protocol)?;
    let mut out = Outcome::new(Payload::distribution(&dist))
        .with_table(&table)
        .note(format!("mean work (KDQ) = {:.12e}", bound.avg_work_kdq))
        .note(format!("mean work (TPM) = {:.12e}", bound.avg_work_tpm))
        .note(format!("classical extraction bound = {:.12e}", bound.classical_bound))
        .note(format!("bound violated = {}", bound.violation))
        .note(format!("work variance = {:.12e} {:+.12e}i", var.re, var.im))
        .note(format!("Robertson bound on |Im| = {:.12e}", var.robertson_bound))
        .note(format!("TPM work variance = {:.12e}", var.tpm_variance));
    if let Some(beta) = beta {
        let jt = thermo::jarzynski_tpm(protocol, beta)?;
        let jk = thermo::jarzynski_kdq(protocol, beta)?;
        out = out
            .note(format!("Jarzynski TPM: lhs = {:.12e}, rhs = {:.12e}, gamma = {:.12e}", jt.lhs, jt.rhs, jt.gamma))
            .note(format!(
                "Jarzynski KDQ: |lhs - rhs| = {:.3e}, Gamma = {:.12e} {:+.12e}i",
                (jk.lhs - jk.rhs).norm(),
                jk.correction.re,
                jk.correction.im
            ));
    }
    Ok(out)
}

fn heat(spec: &thermo::HeatExchangeSpec) -> Result<Outcome, CliError> {
    let t = thermo::heat_table(spec)?;
    let mut sweep = Sweep::new(&["ic", "ih", "fc", "fh", "heat", "re_q", "im_q", "p_tpm"])
        .constrain(Constraint::column_sum("re_q", 1.0))
        .constrain(Constraint::column_sum("im_q", 0.0))
        .constrain(Constraint::column_sum("p_tpm", 1.0));
    for (ic, ih, fc, fh) in t.indices() {
        let q = t.get(ic, ih, fc, fh);
        sweep.push(vec![
            ic as f64,
            ih as f64,
            fc as f64,
            fh as f64,
            t.heat(ic, fc),
            q.re,
            q.im,
            t.tpm(ic, ih, fc, fh),
        ]);
    }
    let fl = thermo::exchange_fluctuation(spec)?;
    let total = t.total();
    Ok(Outcome {
        payload: Payload::Sweep(sweep),
        aleph: Some(t.nonpositivity()),
        residual: Some((total - 1.0).norm()),
        notes: Vec::new(),
    }
    .note(format!("average heat = {:.12e}", t.average_heat()))
    .note(format!("average heat (TPM) = {:.12e}", t.tpm_average_heat()))
    .note(format!("backflow = {}, strong backflow = {}", spec.is_backflow(), spec.is_strong_backflow()))
    .note(format!(
        "exchange relation: lhs = {:.12e} {:+.12e}i, 1 + Upsilon = {:.12e} {:+.12e}i",
        fl.lhs.re,
        fl.lhs.im,
        1.0 + fl.upsilon.re,
        fl.upsilon.im
    )))
}

fn otoc(spec: &manybody::OtocSpec, u: f64, times: &[f64], freqs: Option<(f64, f64)>) -> Result<Outcome, CliError> {
    let labels = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut cols: Vec<String> = ["t", "re_f", "im_f", "re_g", "im_g", "oto_commutator", "aleph"]
        .map(String::from)
        .to_vec();
    let two = spec.obs.len() == 2;
    if two {
        cols.extend(labels.iter().map(|(n, m)| format!("re_q{n}{m}")));
    }
    let q_cols: Vec<String> = cols[7..].to_vec();
    let mut sweep = Sweep::with_columns(cols);
    if two {
        sweep = sweep.constrain(Constraint::RowSum {
            columns: q_cols,
            target: 1.0,
            tol: NORMALIZATION_TOL,
        });
    }
    let (mut worst_identity, mut worst_aleph, mut worst_residual, mut min_re) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for &t in times {
        let f = manybody::otoc(spec, t, u)?;
        let table = manybody::otoc_kdq(spec, t)?;
        let g = table.characteristic(c64(-u, 0.0));
        worst_identity = worst_identity.max((f - g).norm());
        worst_aleph = worst_aleph.max(table.nonpositivity());
        worst_residual = worst_residual.max(table.normalization_residual());
        min_re = min_re.min(g.re);
        let mut row = vec![t, f.re, f.im, g.re, g.im, manybody::oto_commutator(spec, t, u)?, table.nonpositivity()];
        if two {
            // table rows are the first measurement m; paper label 0 is the +1 branch
            row.extend(labels.iter().map(|&(n, m)| table.q[(1 - m, 1 - n)].re));
        }
        sweep.push(row);
    }
    let mut out = Outcome {
        payload: Payload::Sweep(sweep),
        aleph: Some(worst_aleph),
        residual: Some(worst_residual),
        notes: Vec::new(),
    }
    .note(format!("max |F(t) - G(u,t)| = {worst_identity:.3e}"))
    .note(format!("min Re G = {min_re:.12e}"));
    if let Some((a, b)) = freqs {
        out = out.note(format!("sector frequencies = {a:.12e}, {b:.12e}"));
    }
    Ok(out)
}

fn loschmidt(spec: &manybody::LoschmidtSpec, times: &[f64]) -> Result<Outcome, CliError> {
    let table = manybody::loschmidt_kdq(spec)?;
    let mut sweep = Sweep::new(&["t", "re_g", "im_g", "echo", "re_g_kdq", "im_g_kdq"]);
    let mut worst: f64 = 0.0;
    for &t in times {
        let g = manybody::loschmidt_amplitude(spec, t);
        let gk = manybody::loschmidt_from_kdq(&table, t);
        worst = worst.max((g - gk).norm());
        sweep.push(vec![t, g.re, g.im, g.norm_sqr(), gk.re, gk.im]);
    }
    let mut out = Outcome::new(Payload::Sweep(sweep))
        .with_table(&table)
        .note(format!("max |G(t) - KDQ characteristic| = {worst:.3e}"));
    for (i, row) in (0..table.q.nrows()).enumerate() {
        let entries: Vec<String> = (0..table.q.ncols())
            .map(|j| format!("{:.12e}{:+.12e}i", table.q[(row, j)].re, table.q[(row, j)].im))
            .collect();
        out = out.note(format!("q[{i}][..] (ascending energies) = {}", entries.join(", ")));
    }
    Ok(out)
}

fn check(seed: u64, cases: usize) -> Result<(), CliError> {
    let results = random::property_suite(seed, cases)?;
    let mut failed = None;
    for r in &results {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        println!("{verdict} {} (cases {}, worst {:.3e}, tol {:.0e})", r.name, r.cases, r.worst, r.tol);
        if !r.passed() && failed.is_none() {
            failed = Some(QprobError::InvariantViolation {
                name: r.name.to_string(),
                residual: r.worst,
            });
        }
    }
    match failed {
        Some(e) => Err(CliError::Domain(e)),
        None => Ok(()),
    }
}
