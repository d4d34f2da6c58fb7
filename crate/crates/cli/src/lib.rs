//! The `coulomb` command-line tool.
//!
//! [`Cli`] is the clap definition, [`RunConfig`] the parsed request and
//! [`run`] does the work and returns the rendered output together with the
//! exit status: 0 on success, 1 for mathematical verdicts (divergence,
//! failed checks, duality mismatches), 2 for unreadable or malformed input.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use coulomb_core::abelian::{self, AbelianAlgebra, AbelianError};
use coulomb_core::checks;
use coulomb_core::format::{self, ParseError};
use coulomb_core::higgs::{self, HiggsError};
use coulomb_core::monopole::{self, HilbertOptions, MonopoleError};
use coulomb_core::series::TruncatedSeries;
use coulomb_core::theory::GaugeTheory;
use serde_json::{json, Value};
use thiserror::Error;

pub const ELEMENT_SYNTAX: &str = "\
Element syntax (poisson --expr):
  element := [\"-\"] term ((\"+\" | \"-\") term)*
  term    := factor (\"*\" factor)*
  factor  := rational | w | w<i> | h | E[l1,...,lk]   each optionally ^<exponent>
`w` alone is allowed in rank one; `h` is the quantization parameter and is
rejected by poisson. A term without an E factor sits on E[0,...,0].
Example: 2*w1^2*E[1,-1] - 1/3*E[0,2]";

#[derive(Debug, Parser)]
#[command(name = "coulomb", version, about = "Coulomb branches of 3d N=4 gauge theories", after_help = ELEMENT_SYNTAX)]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Monopole-formula Hilbert series of a theory file.
    Hilbert {
        file: PathBuf,
        #[arg(long)]
        order: u32,
        /// Keep the pi_1 fugacities.
        #[arg(long)]
        refined: bool,
        /// Character added to the grading, comma separated (e.g. --shift=-1,2).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        shift: Option<Vec<i64>>,
    },
    /// Finite presentation of a torus theory's Coulomb branch.
    Present {
        file: PathBuf,
        /// Degree through which generator sufficiency is re-checked.
        #[arg(long, default_value_t = 6)]
        order: u32,
    },
    /// Poisson bracket of two elements.
    Poisson {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true, required = true)]
        expr: Vec<String>,
    },
    /// Randomized checks of the quantized product.
    QuantizeCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compare Coulomb and Higgs sides of a torus sequence.
    CheckDuality {
        file: PathBuf,
        #[arg(long)]
        order: u32,
    },
    /// Convert a quiver file to a theory file.
    FromQuiver {
        file: PathBuf,
        /// Write the theory here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the built-in property suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Hilbert,
    Present,
    Poisson,
    QuantizeCheck,
    CheckDuality,
    FromQuiver,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Hilbert => "hilbert",
            Command::Present => "present",
            Command::Poisson => "poisson",
            Command::QuantizeCheck => "quantize-check",
            Command::CheckDuality => "check-duality",
            Command::FromQuiver => "from-quiver",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub order: u32,
    pub refined: bool,
    pub shift: Option<Vec<i64>>,
    pub seed: Option<u64>,
    pub trials: usize,
    pub exprs: Vec<String>,
    pub output: Option<PathBuf>,
    pub json: bool,
}

impl RunConfig {
    pub fn new(command: Command, input_path: Option<PathBuf>) -> Self {
        Self {
            command,
            input_path,
            order: 0,
            refined: false,
            shift: None,
            seed: None,
            trials: 0,
            exprs: Vec::new(),
            output: None,
            json: false,
        }
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let mut cfg = match cli.command {
            Sub::Hilbert { file, order, refined, shift } => {
                RunConfig { order, refined, shift, ..RunConfig::new(Command::Hilbert, Some(file)) }
            }
            Sub::Present { file, order } => RunConfig { order, ..RunConfig::new(Command::Present, Some(file)) },
            Sub::Poisson { file, expr } => RunConfig { exprs: expr, ..RunConfig::new(Command::Poisson, Some(file)) },
            Sub::QuantizeCheck { file, trials, seed } => {
                RunConfig { trials, seed: Some(seed), ..RunConfig::new(Command::QuantizeCheck, Some(file)) }
            }
            Sub::CheckDuality { file, order } => RunConfig { order, ..RunConfig::new(Command::CheckDuality, Some(file)) },
            Sub::FromQuiver { file, output } => RunConfig { output, ..RunConfig::new(Command::FromQuiver, Some(file)) },
            Sub::Verify { seed, trials } => RunConfig { trials, seed: Some(seed), ..RunConfig::new(Command::Verify, None) },
        };
        cfg.json = cli.json;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    /// Verdict already rendered to stdout.
    #[error("{0}")]
    Failed(String, String),
}

impl CliError {
    fn parse(path: &Path, e: ParseError) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl From<MonopoleError> for CliError {
    fn from(e: MonopoleError) -> Self {
        match e {
            MonopoleError::ShiftLength { .. } | MonopoleError::Theory(_) => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<AbelianError> for CliError {
    fn from(e: AbelianError) -> Self {
        match e {
            AbelianError::Parse(_) | AbelianError::HbarPresent | AbelianError::RankMismatch { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<HiggsError> for CliError {
    fn from(e: HiggsError) -> Self {
        match e {
            HiggsError::Coulomb(m) => m.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

/// Size the global rayon pool from `COULOMB_THREADS`; ignored when unset or
/// unparsable, or when the pool already exists.
pub fn configure_threads() {
    if let Some(n) = std::env::var("COULOMB_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn run(cfg: &RunConfig) -> RunOutput {
    match dispatch(cfg) {
        Ok(stdout) => RunOutput { status: 0, stdout, stderr: String::new() },
        Err(CliError::Input(msg)) => RunOutput { status: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(CliError::Domain(msg)) => RunOutput { status: 1, stdout: String::new(), stderr: format!("{msg}\n") },
        Err(CliError::Failed(stdout, msg)) => RunOutput { status: 1, stdout, stderr: format!("{msg}\n") },
    }
}

fn input_path(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.input_path.as_deref().ok_or_else(|| CliError::Input(format!("{} needs an input file", cfg.command.name())))
}

fn read_input(cfg: &RunConfig) -> Result<(&Path, String), CliError> {
    let path = input_path(cfg)?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((path, text))
}

fn read_theory(cfg: &RunConfig) -> Result<GaugeTheory, CliError> {
    let (path, text) = read_input(cfg)?;
    format::parse_theory(&text).map_err(|e| CliError::parse(path, e))
}

fn read_algebra(cfg: &RunConfig) -> Result<AbelianAlgebra, CliError> {
    Ok(AbelianAlgebra::from_theory(&read_theory(cfg)?)?)
}

fn envelope(cfg: &RunConfig, result: Value) -> String {
    let input = cfg.input_path.as_ref().map(|p| Value::String(p.display().to_string())).unwrap_or(Value::Null);
    let doc = json!({ "command": cfg.command.name(), "input": input, "result": result });
    format!("{}\n", serde_json::to_string_pretty(&doc).expect("json values serialize"))
}

/// Terms sorted by t-degree, then fugacity; coefficients as exact strings.
pub fn series_json(s: &TruncatedSeries, refined: bool) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|((k, z), c)| json!({ "t": k, "fugacity": z, "coeff": c.to_string() }))
        .collect();
    json!({ "order": s.order(), "refined": refined, "terms": terms })
}

fn dispatch(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.command {
        Command::Hilbert => hilbert(cfg),
        Command::Present => present(cfg),
        Command::Poisson => poisson(cfg),
        Command::QuantizeCheck => quantize_check(cfg),
        Command::CheckDuality => check_duality(cfg),
        Command::FromQuiver => from_quiver(cfg),
        Command::Verify => verify(cfg),
    }
}

fn hilbert(cfg: &RunConfig) -> Result<String, CliError> {
    let theory = read_theory(cfg)?;
    let mut opts = HilbertOptions::new(cfg.order);
    if cfg.refined {
        opts = opts.refined();
    }
    if let Some(s) = &cfg.shift {
        opts = opts.with_shift(s.clone());
    }
    let series = monopole::hilbert_series(&theory, &opts)?;
    Ok(if cfg.json { envelope(cfg, series_json(&series, cfg.refined)) } else { format!("{series}\n") })
}

fn present(cfg: &RunConfig) -> Result<String, CliError> {
    let alg = read_algebra(cfg)?;
    let p = abelian::presentation(&alg)?;
    let checked = if alg.is_good() {
        p.check_sufficiency(&alg, cfg.order)?;
        Some(cfg.order)
    } else {
        None
    };
    if cfg.json {
        let generators: Vec<Value> = p
            .generators()
            .iter()
            .map(|g| {
                json!({
                    "name": g.name,
                    "degree": g.degree,
                    "weight": g.weight,
                    "element": g.element(alg.rank()).to_string(),
                })
            })
            .collect();
        let relations: Vec<String> = p.relations().iter().map(|r| p.render_relation(r)).collect();
        let result = json!({
            "generators": generators,
            "relations": relations,
            "laurent": p.is_laurent(),
            "sufficiency_checked_through": checked,
        });
        return Ok(envelope(cfg, result));
    }
    let mut out = p.to_string();
    match checked {
        Some(n) => out.push_str(&format!("generators span every graded piece through t^{n}\n")),
        None => out.push_str("Laurent directions present; graded sufficiency not applicable\n"),
    }
    Ok(out)
}

fn poisson(cfg: &RunConfig) -> Result<String, CliError> {
    let alg = read_algebra(cfg)?;
    let [a, b] = cfg.exprs.as_slice() else {
        return Err(CliError::Input("poisson needs exactly two expressions".into()));
    };
    let (x, y) = (alg.parse_element(a)?, alg.parse_element(b)?);
    let bracket = alg.poisson_bracket(&x, &y)?;
    Ok(if cfg.json {
        envelope(cfg, json!({ "a": x.to_string(), "b": y.to_string(), "bracket": bracket.to_string() }))
    } else {
        format!("{bracket}\n")
    })
}

fn report_lines(reports: &[checks::CheckReport]) -> String {
    reports.iter().map(|r| format!("{r}\n")).collect()
}

fn reports_json(reports: &[checks::CheckReport]) -> Value {
    Value::Array(
        reports
            .iter()
            .map(|r| json!({ "name": r.name, "seed": r.seed, "trials": r.trials, "passed": r.passed(), "failures": r.failures }))
            .collect(),
    )
}

fn finish_checks(cfg: &RunConfig, seed: u64, reports: Vec<checks::CheckReport>) -> Result<String, CliError> {
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let out = if cfg.json {
        envelope(cfg, json!({ "seed": seed, "reports": reports_json(&reports), "passed": failed == 0 }))
    } else {
        format!("seed: {seed}\n{}", report_lines(&reports))
    };
    if failed > 0 {
        return Err(CliError::Failed(out, format!("{failed} check(s) failed (seed {seed})")));
    }
    Ok(out)
}

fn quantize_check(cfg: &RunConfig) -> Result<String, CliError> {
    let alg = read_algebra(cfg)?;
    let seed = cfg.seed.unwrap_or(1);
    let reports = vec![checks::check_quantization(&alg, cfg.trials, seed)];
    finish_checks(cfg, seed, reports)
}

fn verify(cfg: &RunConfig) -> Result<String, CliError> {
    let seed = cfg.seed.unwrap_or(1);
    finish_checks(cfg, seed, checks::verify_all(seed, cfg.trials))
}

fn check_duality(cfg: &RunConfig) -> Result<String, CliError> {
    let (path, text) = read_input(cfg)?;
    let seq = format::parse_sequence(&text).map_err(|e| CliError::parse(path, e))?;
    let report = higgs::check_toric_duality(&seq, cfg.order)?;
    let out = if cfg.json {
        let rows: Vec<Value> = report
            .rows
            .iter()
            .map(|(d, c, h)| json!({ "t": d, "coulomb": c.to_string(), "higgs": h.to_string() }))
            .collect();
        envelope(cfg, json!({ "order": report.order, "rows": rows, "match": report.matches(), "verdict": report.verdict() }))
    } else {
        let mut s = format!("{:>6} {:>12} {:>12}\n", "degree", "coulomb", "higgs");
        for (d, c, h) in &report.rows {
            s.push_str(&format!("{:>6} {:>12} {:>12}\n", d, c.to_string(), h));
        }
        s.push_str(&report.verdict());
        s.push('\n');
        s
    };
    if !report.matches() {
        return Err(CliError::Failed(out, report.verdict()));
    }
    Ok(out)
}

fn from_quiver(cfg: &RunConfig) -> Result<String, CliError> {
    let (path, text) = read_input(cfg)?;
    let quiver = format::parse_quiver(&text).map_err(|e| CliError::parse(path, e))?;
    let theory = quiver.to_theory();
    let rendered = format::render_theory(&theory);
    let back = format::parse_theory(&rendered).map_err(|e| CliError::Domain(format!("derived theory does not re-parse: {e}")))?;
    if back != theory.validate().map_err(|e| CliError::Domain(e.to_string()))? {
        return Err(CliError::Domain("derived theory does not round-trip".into()));
    }
    if let Some(out) = &cfg.output {
        fs::write(out, &rendered).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    }
    Ok(if cfg.json {
        envelope(cfg, json!({ "theory": rendered, "matter_dimension": quiver.matter_dimension() }))
    } else if cfg.output.is_some() {
        String::new()
    } else {
        rendered
    })
}
