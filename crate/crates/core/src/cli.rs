//! The `janus` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Result;
use crate::experiments::{
    fit_column, late_window, reproduce, run, sweep, Figure, InitSpec, Metadata, Model, ReproOptions, RunMeta,
    RunOptions, Table,
};
use crate::graph::{Configuration, Constraint};
use crate::observables::{EntropyVariant, Meter, NameNorm, Observable, Value};
use crate::render::{spacetime_svg_configs, ColorScheme, Geometry, Overlay};
use crate::rulecheck::{check_bijective, check_bijective_over, check_energy_laws, i3_folded_alphabet};
use crate::steps::{Direction, Drift, Dynamics, RuleTable, Rules, StepKind};

const HELP: &str = "\
Dynamics tokens (comma separated, rightmost applied first; append ^-1 for an inverse):
  sqrt_tau  half step of free propagation
  tau       full step of free propagation
  I         split/merge on layer 1
  I2        split/merge on layers 1 and 2
  I3        split/merge on layer 3, blocked by layers 1-2
  Ie        split/merge of clumps into four vertices
  F         complement every bit
  T         exchange ports a and b
  R         exchange a1<->b2 and a2<->b1
  Dr, Dl    inelastic collision rules right and left of a clump
  D         shorthand for Dl,Dr

Observable keys: size, p_total, p_a, p_b, p_layer{j}, S_global, S_local_avg_r{r},
  S_local_sum_r{r}, S_var_rho{rho}, S_name, E, Eprime, n_f, d_f

Figures: fig4a fig4b fig6a fig6b fig8 fig10a fig10b fig11 fig12 fig16 fig17

Exit status: 0 success, 1 domain error or failed check, 2 usage error";

#[derive(Debug, Parser)]
#[command(name = "janus", version, about = "Reversible circular graph dynamics: run, check, fit, render")]
#[command(after_help = HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random configuration and print it as JSON.
    Gen(GenArgs),
    /// Run a dynamics and record observables as CSV.
    #[command(after_help = HELP)]
    Run(RunArgs),
    /// Exhaustively check that a step or dynamics is a bijection.
    Validate(ValidateArgs),
    /// Least-squares fit of one CSV column against the step column.
    Fit(FitArgs),
    /// Reproduce a figure scenario as CSV.
    Repro(ReproArgs),
    /// Run a dynamics and draw its spacetime diagram as SVG.
    #[command(after_help = HELP)]
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConstraintArg {
    None,
    OneOfEach,
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::None => Constraint::None,
            ConstraintArg::OneOfEach => Constraint::OneOfEach,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DriftArg {
    AlongPort,
    AgainstPort,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Slots,
    Literal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    PerVertex,
    PerPart,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Power,
    Log,
    Linear,
    Exponential,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Ports,
    Matter,
}

#[derive(Debug, Clone, Args)]
pub struct InitArgs {
    /// Number of vertices of the random start.
    #[arg(long, default_value_t = 100)]
    pub size: usize,
    /// Layers per port (defaults to what the dynamics needs).
    #[arg(long)]
    pub layers: Option<usize>,
    /// Probability of each bit.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "one-of-each")]
    pub constraint: ConstraintArg,
    /// Start from this graph JSON instead of a random draw.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RuleArgs {
    #[arg(long, value_enum, default_value = "along-port")]
    pub drift: DriftArg,
    /// JSON rule table for Dr/Dl.
    #[arg(long, value_name = "PATH")]
    pub rule_table: Option<PathBuf>,
    /// I3 also requires the neighbouring vertices to be free of layers 1-2.
    #[arg(long)]
    pub i3_flanks: bool,
}

impl RuleArgs {
    fn rules(&self) -> Result<Rules> {
        let table = match &self.rule_table {
            Some(p) => RuleTable::from_json(&fs::read_to_string(p)?)?,
            None => RuleTable::default(),
        };
        let drift = match self.drift {
            DriftArg::AlongPort => Drift::AlongPort,
            DriftArg::AgainstPort => Drift::AgainstPort,
        };
        Ok(Rules { drift, table, i3_flanks: self.i3_flanks })
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_dynamics)]
    pub dynamics: Dynamics,
    #[arg(long, value_enum, default_value = "forward")]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[command(flatten)]
    pub init: InitArgs,
    /// Run every seed in a..b (end exclusive) and add a seed column.
    #[arg(long, value_parser = parse_seeds, value_name = "A..B")]
    pub seeds: Option<std::ops::Range<u64>>,
    /// Observable keys, comma separated.
    #[arg(long, value_parser = parse_record, value_delimiter = ',', default_value = "size,S_global")]
    pub record: Vec<Observable>,
    /// CSV path; metadata goes next to it with extension .meta.json.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Stop early once the circle exceeds this many vertices.
    #[arg(long)]
    pub size_cap: Option<usize>,
    /// Check name disjointness after every step.
    #[arg(long)]
    pub validate: bool,
    #[arg(long, value_enum, default_value = "slots")]
    pub entropy: VariantArg,
    #[arg(long, value_enum, default_value = "per-vertex")]
    pub name_norm: NormArg,
    #[command(flatten)]
    pub rules: RuleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// A single step token.
    #[arg(long, value_parser = parse_dynamics, conflicts_with_all = ["dynamics", "energy"])]
    pub step: Option<Dynamics>,
    #[arg(long, value_parser = parse_dynamics, conflicts_with = "energy")]
    pub dynamics: Option<Dynamics>,
    /// Check the two energy laws of the collision rules instead.
    #[arg(long)]
    pub energy: bool,
    #[arg(long, default_value_t = 6)]
    pub max_size: usize,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Enumerate every rotation and compare images by names.
    #[arg(long)]
    pub non_canonical: bool,
    /// Fold layers 1-2 to empty/occupied (exact for I3 only).
    #[arg(long)]
    pub fold_i3: bool,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub rules: RuleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub column: String,
    #[arg(long, value_enum, default_value = "power")]
    pub model: ModelArg,
    /// Start of the fit window (default: the second half, at least 10 points).
    #[arg(long)]
    pub from: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproArgs {
    #[arg(value_parser = parse_figure)]
    pub figure: Figure,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Override the preset's step count.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also draw the first run's first --svg-steps steps.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub svg_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[arg(long, value_parser = parse_dynamics)]
    pub dynamics: Dynamics,
    #[arg(long, value_enum, default_value = "forward")]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long, value_enum, default_value = "ports")]
    pub scheme: SchemeArg,
    /// Shade cells by local entropy of this radius.
    #[arg(long)]
    pub overlay_radius: Option<usize>,
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    #[arg(long, default_value_t = 6.0)]
    pub row_height: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub rules: RuleArgs,
}

fn parse_dynamics(s: &str) -> std::result::Result<Dynamics, String> {
    s.parse::<Dynamics>().map_err(|e| e.to_string())
}

fn parse_record(s: &str) -> std::result::Result<Observable, String> {
    s.parse::<Observable>().map_err(|e| e.to_string())
}

fn parse_figure(s: &str) -> std::result::Result<Figure, String> {
    s.parse::<Figure>().map_err(|e| e.to_string())
}

fn parse_seeds(s: &str) -> std::result::Result<std::ops::Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a: u64 = a.parse().map_err(|_| format!("bad seed '{a}'"))?;
    let b: u64 = b.parse().map_err(|_| format!("bad seed '{b}'"))?;
    if a >= b {
        return Err("empty seed range".into());
    }
    Ok(a..b)
}

/// A usage problem found after parsing; exits with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

/// Moves `--config <path>` JSON into flags placed before the user's own, so
/// that explicit flags win.
pub fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, Usage> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config=")) else {
        return Ok(args);
    };
    let arg = args[pos].to_string_lossy().into_owned();
    let (path, consumed) = match arg.strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => match args.get(pos + 1) {
            Some(p) => (p.to_string_lossy().into_owned(), 2),
            None => return Err(Usage("--config needs a path".into())),
        },
    };
    if args.len() < 2 || pos < 2 {
        return Err(Usage("--config goes after the subcommand".into()));
    }
    let text = fs::read_to_string(&path).map_err(|e| Usage(format!("cannot read config {path}: {e}")))?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| Usage(format!("config {path}: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| Usage(format!("config {path}: expected a JSON object")))?;
    let mut flags: Vec<OsString> = Vec::new();
    for (k, v) in obj {
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            serde_json::Value::Bool(true) => flags.push(flag.into()),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::String(s) => {
                flags.push(flag.into());
                flags.push(s.into());
            }
            serde_json::Value::Number(n) => {
                flags.push(flag.into());
                flags.push(n.to_string().into());
            }
            _ => return Err(Usage(format!("config key '{k}' must be a string, number or boolean"))),
        }
    }
    let mut out: Vec<OsString> = args[..2].to_vec();
    out.extend(flags);
    out.extend(args[2..pos].iter().cloned());
    out.extend(args[pos + consumed..].iter().cloned());
    Ok(out)
}

/// Parses and executes; returns the process exit status.
pub fn main_with_args(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return 2;
        }
    };
    let cli = {
        use clap::CommandFactory;
        let cmd = Cli::command().args_override_self(true);
        match cmd.try_get_matches_from(args).and_then(|m| <Cli as clap::FromArgMatches>::from_arg_matches(&m)) {
            Ok(c) => c,
            Err(e) => {
                let code = e.exit_code();
                let text = e.render().to_string();
                if code == 0 {
                    let _ = write!(stdout, "{text}");
                } else {
                    let _ = write!(stderr, "{text}");
                }
                return code;
            }
        }
    };
    if let Err(Usage(m)) = check(&cli.command) {
        let _ = writeln!(stderr, "error: {m}");
        return 2;
    }
    match execute(cli.command, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn layers_for(init: &InitArgs, d: &Dynamics) -> usize {
    init.layers.unwrap_or_else(|| d.min_layers())
}

fn check_init(init: &InitArgs, d: &Dynamics, record: &[Observable]) -> std::result::Result<(), Usage> {
    if init.input.is_some() {
        return Ok(());
    }
    let layers = layers_for(init, d);
    if let Err(e) = d.check_layers(layers) {
        return Err(Usage(e.to_string()));
    }
    if let Some(k) = record.iter().find(|k| k.min_layers() > layers) {
        return Err(Usage(format!("observable {k} needs {} layers, configuration has {layers}", k.min_layers())));
    }
    if !(0.0..=1.0).contains(&init.density) {
        return Err(Usage(format!("density {} outside [0, 1]", init.density)));
    }
    if init.size == 0 {
        return Err(Usage("size must be at least 1".into()));
    }
    Ok(())
}

/// Flag validation that clap cannot express.
fn check(c: &Command) -> std::result::Result<(), Usage> {
    match c {
        Command::Gen(g) => {
            if !(0.0..=1.0).contains(&g.init.density) {
                return Err(Usage(format!("density {} outside [0, 1]", g.init.density)));
            }
            Ok(())
        }
        Command::Run(r) => check_init(&r.init, &r.dynamics, &r.record),
        Command::Render(r) => check_init(&r.init, &r.dynamics, &[]),
        Command::Validate(v) => {
            let d = match (&v.step, &v.dynamics) {
                (Some(s), _) => {
                    if s.steps().len() != 1 {
                        return Err(Usage("--step takes a single token; use --dynamics".into()));
                    }
                    s
                }
                (None, Some(d)) => d,
                (None, None) if v.energy => return Ok(()),
                (None, None) => return Err(Usage("one of --step, --dynamics or --energy is required".into())),
            };
            if let Some(l) = v.layers {
                d.check_layers(l).map_err(|e| Usage(e.to_string()))?;
            }
            if v.fold_i3 && d.steps().iter().any(|s| s.kind != StepKind::I3) {
                return Err(Usage("--fold-i3 is only exact for I3".into()));
            }
            Ok(())
        }
        Command::Fit(_) | Command::Repro(_) => Ok(()),
    }
}

fn direction(d: DirectionArg) -> Direction {
    match d {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    }
}

fn start(init: &InitArgs, d: &Dynamics, seed: u64) -> Result<(Configuration, InitSpec)> {
    let spec = InitSpec {
        size: init.size,
        layers: layers_for(init, d),
        density: init.density,
        constraint: init.constraint.into(),
        seed,
    };
    match &init.input {
        Some(p) => {
            let x = Configuration::from_json(&fs::read_to_string(p)?)?;
            let spec = InitSpec { size: x.len(), layers: x.layers(), density: f64::NAN, ..spec };
            Ok((x, spec))
        }
        None => Ok((spec.generate()?, spec)),
    }
}

fn write_out(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn execute(c: Command, stdout: &mut dyn Write) -> Result<bool> {
    match c {
        Command::Gen(g) => {
            let d = Dynamics::new(vec![]);
            let (x, _) = start(&g.init, &d, g.init.seed)?;
            let mut text = x.to_json();
            text.push('\n');
            write_out(g.out.as_deref(), &text, stdout)?;
            Ok(true)
        }
        Command::Run(r) => {
            let rules = r.rules.rules()?;
            let meter = Meter {
                variant: match r.entropy {
                    VariantArg::Slots => EntropyVariant::Slots,
                    VariantArg::Literal => EntropyVariant::Literal,
                },
                name_norm: match r.name_norm {
                    NormArg::PerVertex => NameNorm::PerVertex,
                    NormArg::PerPart => NameNorm::PerPart,
                },
            };
            let dir = direction(r.direction);
            let d = r.dynamics.directed(dir);
            let opts = RunOptions {
                steps: r.steps,
                record: r.record.clone(),
                keep_configs: false,
                size_cap: r.size_cap,
                validate: r.validate,
                meter,
            };
            let seeds = r.seeds.clone().unwrap_or(r.init.seed..r.init.seed + 1);
            let swept = r.seeds.is_some();
            let named = r.validate || r.record.contains(&Observable::SName);
            let results = sweep(seeds.clone(), |seed| {
                let (x, spec) = start(&r.init, &d, seed)?;
                let (table, done, capped) = if named {
                    let tr = run(&x, &d, &rules, &opts)?;
                    (tr.table(), tr.steps(), tr.capped)
                } else {
                    let tr = run(&x.anonymize(), &d, &rules, &opts)?;
                    (tr.table(), tr.steps(), tr.capped)
                };
                let meta = RunMeta {
                    dynamics: r.dynamics.to_string(),
                    direction: dir,
                    init: spec,
                    steps: r.steps,
                    steps_done: done,
                    capped,
                    step_offset: 0,
                };
                Ok((seed, table, meta))
            });
            let mut table = Table::default();
            let mut metas = Vec::new();
            for res in results {
                let (seed, t, meta) = res?;
                if table.headers.is_empty() {
                    table.headers = t.headers.clone();
                    if swept {
                        table.headers.insert(0, "seed".into());
                    }
                }
                for mut row in t.rows {
                    if swept {
                        row.insert(0, Value::Int(seed as i64));
                    }
                    table.rows.push(row);
                }
                metas.push(meta);
            }
            let csv = table.to_csv_string();
            write_out(r.out.as_deref(), &csv, stdout)?;
            if let Some(p) = &r.out {
                fs::write(sidecar(p), Metadata::new(None, metas, &rules, meter).to_json())?;
            }
            Ok(true)
        }
        Command::Validate(v) => {
            let rules = v.rules.rules()?;
            let report = if v.energy && v.step.is_none() && v.dynamics.is_none() {
                check_energy_laws(v.max_size, &rules)?
            } else {
                let d = v.step.or(v.dynamics).expect("checked");
                let layers = v.layers.unwrap_or_else(|| d.min_layers());
                if v.fold_i3 {
                    check_bijective_over(&d, v.max_size, layers, &i3_folded_alphabet(), &rules, !v.non_canonical)?
                } else {
                    check_bijective(&d, v.max_size, layers, &rules, !v.non_canonical)?
                }
            };
            if v.json {
                writeln!(stdout, "{}", report.to_json())?;
            } else {
                write!(stdout, "{report}")?;
            }
            Ok(report.passed())
        }
        Command::Fit(f) => {
            let table = Table::read_csv(fs::File::open(&f.input)?)?;
            let t0 = match f.from {
                Some(t) => t,
                None => {
                    let last = table.column("step")?.into_iter().flatten().fold(f64::NEG_INFINITY, f64::max);
                    late_window(last.max(0.0) as usize)
                }
            };
            let model = match f.model {
                ModelArg::Power => Model::Power,
                ModelArg::Log => Model::Log,
                ModelArg::Linear => Model::Linear,
                ModelArg::Exponential => Model::Exponential,
            };
            let fit = fit_column(&table, &f.column, model, t0)?;
            writeln!(stdout, "{fit}")?;
            Ok(true)
        }
        Command::Repro(r) => {
            let keep = r.svg.is_some();
            let opts = ReproOptions { steps: r.steps, keep_configs: keep };
            let rep = reproduce(r.figure, r.seed, &opts)?;
            write_out(r.out.as_deref(), &rep.table.to_csv_string(), stdout)?;
            if let Some(p) = &r.out {
                fs::write(sidecar(p), rep.metadata.to_json())?;
            }
            if let Some(p) = &r.svg {
                let configs = &rep.traces[rep.traces.len() - 1].configs;
                let n = configs.len().min(r.svg_steps + 1);
                let scheme =
                    if rep.traces[0].last.layers() >= 3 { ColorScheme::matter() } else { ColorScheme::ports() };
                fs::write(p, spacetime_svg_configs(&configs[..n], &scheme, Geometry::default())?)?;
            }
            Ok(true)
        }
        Command::Render(r) => {
            let rules = r.rules.rules()?;
            let d = r.dynamics.directed(direction(r.direction));
            let (x, _) = start(&r.init, &d, r.init.seed)?;
            let mut opts = RunOptions::new(r.steps, vec![]);
            opts.keep_configs = true;
            let tr = run(&x.anonymize(), &d, &rules, &opts)?;
            let scheme = match r.scheme {
                SchemeArg::Ports => ColorScheme::ports(),
                SchemeArg::Matter => ColorScheme::matter(),
            };
            let scheme = scheme.with_overlay(r.overlay_radius.map_or(Overlay::None, Overlay::LocalEntropy));
            let svg =
                spacetime_svg_configs(&tr.configs, &scheme, Geometry { width: r.width, row_height: r.row_height })?;
            write_out(r.out.as_deref(), &svg, stdout)?;
            Ok(true)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> ! {
    let code = main_with_args(std::env::args_os().collect(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("janus").chain(args.iter().copied()).map(OsString::from).collect();
        let code = main_with_args(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parses_run() {
        let cli = Cli::try_parse_from([
            "janus",
            "run",
            "--dynamics",
            "sqrt_tau,I",
            "--steps",
            "5000",
            "--size",
            "100",
            "--density",
            "0.5",
            "--layers",
            "1",
            "--seed",
            "42",
            "--record",
            "size,S_global",
            "--out",
            "run.csv",
        ])
        .unwrap();
        let Command::Run(r) = cli.command else { panic!() };
        assert_eq!(r.dynamics.to_string(), "sqrt_tau,I");
        assert_eq!(r.record, vec![Observable::Size, Observable::SGlobal]);
        assert_eq!(r.init.seed, 42);
    }

    #[test]
    fn layer_arity_is_usage_error() {
        let (code, _, err) = call(&["run", "--dynamics", "sqrt_tau,I3,D", "--layers", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("I3 requires at least 3 layers"), "{err}");
    }

    #[test]
    fn unknown_flag() {
        assert_eq!(call(&["run", "--dynamics", "I", "--bogus"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
    }

    #[test]
    fn help_lists_tokens_and_keys() {
        let (code, out, _) = call(&["run", "--help"]);
        assert_eq!(code, 0);
        for t in ["sqrt_tau", "tau", "I2", "I3", "Ie", "F", "T", "R", "Dr", "Dl", "D"] {
            assert!(out.contains(t), "{t}");
        }
        for k in Observable::KEYS {
            assert!(out.contains(k), "{k}");
        }
    }

    #[test]
    fn run_to_stdout() {
        let (code, out, _) =
            call(&["run", "--dynamics", "sqrt_tau,I", "--steps", "3", "--size", "10", "--record", "size,p_total"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("step,size,p_total\n0,10,"));
        assert_eq!(out.lines().count(), 5);
    }

    #[test]
    fn seeds_sweep() {
        let (code, out, _) =
            call(&["run", "--dynamics", "sqrt_tau,I", "--steps", "2", "--size", "8", "--seeds", "3..5"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("seed,step,size,S_global\n3,0,"));
        assert_eq!(out.lines().count(), 7);
    }

    #[test]
    fn validate_step() {
        let (code, out, _) = call(&["validate", "--step", "I", "--max-size", "4"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("PASS"));
    }

    #[test]
    fn config_file_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        fs::write(&cfg, r#"{"dynamics": "sqrt_tau,I", "steps": 7, "size": 12, "record": "size"}"#).unwrap();
        let cfg = cfg.to_str().unwrap();
        let (code, out, err) = call(&["run", "--config", cfg, "--steps", "2"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(
            out,
            call(&["run", "--dynamics", "sqrt_tau,I", "--steps", "2", "--size", "12", "--record", "size"]).1
        );
    }

    #[test]
    fn fit_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("run.csv");
        let (code, _, _) = call(&[
            "run",
            "--dynamics",
            "sqrt_tau,I",
            "--steps",
            "400",
            "--record",
            "size",
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(dir.path().join("run.meta.json").exists());
        let (code, out, _) =
            call(&["fit", "--in", csv.to_str().unwrap(), "--column", "size", "--model", "power", "--from", "200"]);
        assert_eq!(code, 0);
        assert!(out.contains("exponent=") && out.contains("R2="));
    }

    #[test]
    fn no_files_on_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("x.csv");
        let (code, _, _) = call(&["run", "--dynamics", "I2", "--layers", "1", "--out", csv.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(!csv.exists());
    }
}
