//! Seeded runs, trace tables, least-squares fits and the figure presets.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::graph::{random_config, Configuration, Constraint};
use crate::names::{Anon, Label};
use crate::observables::{merger_census, Meter, Observable, Value};
use crate::steps::{Direction, Drift, Dynamics, Rules};

/// How to draw a starting configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub size: usize,
    pub layers: usize,
    pub density: f64,
    pub constraint: Constraint,
    pub seed: u64,
}

impl InitSpec {
    pub fn uniform(size: usize, layers: usize, seed: u64) -> Self {
        Self { size, layers, density: 0.5, constraint: Constraint::OneOfEach, seed }
    }

    pub fn generate(&self) -> Result<Configuration> {
        random_config(self.size, self.layers, self.density, self.seed, self.constraint)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub steps: usize,
    pub record: Vec<Observable>,
    pub keep_configs: bool,
    /// Stop once the circle has more vertices than this.
    pub size_cap: Option<usize>,
    /// Check the name condition after every step.
    pub validate: bool,
    pub meter: Meter,
}

impl RunOptions {
    pub fn new(steps: usize, record: Vec<Observable>) -> Self {
        Self { steps, record, keep_configs: false, size_cap: None, validate: false, meter: Meter::default() }
    }
}

/// Observables recorded after every step of a run; row 0 is the start.
#[derive(Debug, Clone)]
pub struct RunTrace<L: Label = crate::names::Name> {
    pub dynamics: Dynamics,
    pub keys: Vec<Observable>,
    pub rows: Vec<Vec<Value>>,
    pub configs: Vec<Configuration<L>>,
    pub last: Configuration<L>,
    /// The run stopped early at the size cap.
    pub capped: bool,
}

impl<L: Label> RunTrace<L> {
    /// Number of steps actually applied.
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn column(&self, key: Observable) -> Option<Vec<Option<f64>>> {
        let i = self.keys.iter().position(|&k| k == key)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    /// A table with a leading `step` column.
    pub fn table(&self) -> Table {
        let mut headers = vec!["step".to_string()];
        headers.extend(self.keys.iter().map(ToString::to_string));
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(t, r)| {
                let mut row = vec![Value::Int(t as i64)];
                row.extend_from_slice(r);
                row
            })
            .collect();
        Table { headers, rows }
    }
}

/// Applies `d` up to `opts.steps` times, recording after each full step.
pub fn run<L: Label>(x0: &Configuration<L>, d: &Dynamics, rules: &Rules, opts: &RunOptions) -> Result<RunTrace<L>> {
    d.check_layers(x0.layers())?;
    for &k in &opts.record {
        if k.min_layers() > x0.layers() {
            return Err(Error::Domain(format!("observable {k} needs {} layers", k.min_layers())));
        }
    }
    let check = |x: &Configuration<L>| -> Result<()> {
        if opts.validate {
            let v = x.validate();
            if !v.is_empty() {
                return Err(Error::Invalid(v));
            }
        }
        Ok(())
    };
    let measure = |x: &Configuration<L>| -> Result<Vec<Value>> {
        opts.record.iter().map(|&k| opts.meter.measure(x, k)).collect()
    };
    check(x0)?;
    let mut rows = vec![measure(x0)?];
    let mut configs = Vec::new();
    if opts.keep_configs {
        configs.push(x0.clone());
    }
    let mut cur = x0.clone();
    let mut capped = false;
    for _ in 0..opts.steps {
        if opts.size_cap.is_some_and(|c| cur.len() > c) {
            capped = true;
            break;
        }
        cur = d.step(&cur, rules);
        check(&cur)?;
        rows.push(measure(&cur)?);
        if opts.keep_configs {
            configs.push(cur.clone());
        }
    }
    Ok(RunTrace { dynamics: d.clone(), keys: opts.record.clone(), rows, configs, last: cur, capped })
}

/// First step at which the merger census reports no pattern.
pub fn census_zero<L: Label>(x0: &Configuration<L>, d: &Dynamics, rules: &Rules, max_steps: usize) -> Option<usize> {
    let mut cur = x0.clone();
    for t in 0..=max_steps {
        if merger_census(&cur).n_f == 0 {
            return Some(t);
        }
        cur = d.step(&cur, rules);
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// `y = c * t^a`, fitted in ln-ln coordinates.
    Power,
    /// `y = a ln t + c`.
    Log,
    Linear,
    /// `y = c * e^(a t)`, fitted on `ln y`.
    Exponential,
}

impl FromStr for Model {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s {
            "power" => Ok(Model::Power),
            "log" => Ok(Model::Log),
            "linear" => Ok(Model::Linear),
            "exponential" | "exp" => Ok(Model::Exponential),
            _ => Err(ParseError::new(0, format!("unknown model '{s}'"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Power => "power",
            Model::Log => "log",
            Model::Linear => "linear",
            Model::Exponential => "exponential",
        })
    }
}

pub const MIN_FIT_POINTS: usize = 10;

/// Start of the default fit window for a run ending at step `last`: the
/// second half, widened to keep at least [`MIN_FIT_POINTS`] points.
pub fn late_window(last: usize) -> f64 {
    (last / 2).min(last.saturating_sub(MIN_FIT_POINTS - 1)) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Model,
    /// Exponent for `power`, rate for `exponential`, slope otherwise.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub t0: f64,
    pub t1: f64,
    pub points: usize,
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.model {
            Model::Power => "exponent",
            Model::Exponential => "rate",
            _ => "slope",
        };
        write!(
            f,
            "model={} {what}={:.6} intercept={:.6} R2={:.6} window=[{}, {}] points={}",
            self.model, self.slope, self.intercept, self.r2, self.t0, self.t1, self.points
        )
    }
}

/// Least squares of `model` over the points with `t >= t0`.
pub fn fit(ts: &[f64], ys: &[f64], model: Model, t0: f64) -> Result<FitResult> {
    if ts.len() != ys.len() {
        return Err(Error::Domain("abscissa and ordinate lengths differ".into()));
    }
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&t, &y) in ts.iter().zip(ys) {
        if t < t0 {
            continue;
        }
        let x = match model {
            Model::Power | Model::Log => {
                if t <= 0.0 {
                    return Err(Error::Domain(format!("non-positive abscissa {t} under a log transform")));
                }
                t.ln()
            }
            _ => t,
        };
        let z = match model {
            Model::Power | Model::Exponential => {
                if y <= 0.0 {
                    return Err(Error::Domain(format!("non-positive value {y} under a log transform")));
                }
                y.ln()
            }
            _ => y,
        };
        lo = lo.min(t);
        hi = hi.max(t);
        xs.push(x);
        zs.push(z);
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!("{n} points after t0 = {t0}, need {MIN_FIT_POINTS}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let mz = zs.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let szz: f64 = zs.iter().map(|z| (z - mz) * (z - mz)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae are equal".into()));
    }
    let slope = sxz / sxx;
    let intercept = mz - slope * mx;
    let ss_res: f64 = xs.iter().zip(&zs).map(|(x, z)| (z - intercept - slope * x).powi(2)).sum();
    let r2 = if szz == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - ss_res / szz).clamp(0.0, 1.0)
    };
    Ok(FitResult { model, slope, intercept, r2, t0: lo, t1: hi, points: n })
}

/// Fits a table column against its `step` column, skipping missing cells.
pub fn fit_column(table: &Table, column: &str, model: Model, t0: f64) -> Result<FitResult> {
    let ts = table.column("step")?;
    let ys = table.column(column)?;
    let (t, y): (Vec<f64>, Vec<f64>) = ts.into_iter().zip(ys).filter_map(|(t, y)| Some((t?, y?))).unzip();
    fit(&t, &y, model, t0)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// Runs `f` for every seed on all available cores, results in seed order.
pub fn sweep<T, F>(seeds: std::ops::Range<u64>, f: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let seeds: Vec<u64> = seeds.collect();
    let slots: Vec<Mutex<Option<Result<T>>>> = seeds.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(seeds.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&seed) = seeds.get(i) else { break };
                let r = f(seed);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().expect("every seed ran")).collect()
}

/// Rows of values under string headers; the CSV shape of every output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Domain(format!("no column '{name}' (have {})", self.headers.join(","))))?;
        Ok(self.rows.iter().map(|r| r.get(i).and_then(|v| v.as_f64())).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.headers)?;
        for r in &self.rows {
            out.write_record(r.iter().map(ToString::to_string))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Table> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(Value::Missing)
                    } else if let Ok(i) = cell.parse::<i64>() {
                        Ok(Value::Int(i))
                    } else {
                        cell.parse::<f64>()
                            .map(Value::Real)
                            .map_err(|_| Error::Domain(format!("cell '{cell}' is not a number")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table { headers, rows })
    }
}

/// Sidecar document written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    pub runs: Vec<RunMeta>,
    pub drift: Drift,
    pub meter: Meter,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub dynamics: String,
    pub direction: Direction,
    pub init: InitSpec,
    pub steps: usize,
    pub steps_done: usize,
    pub capped: bool,
    /// Subtracted from the raw step index in the `step` column.
    #[serde(default)]
    pub step_offset: i64,
}

impl Metadata {
    pub fn new(figure: Option<String>, runs: Vec<RunMeta>, rules: &Rules, meter: Meter) -> Self {
        Self { figure, runs, drift: rules.drift, meter, tool_version: env!("CARGO_PKG_VERSION").to_string() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig4a,
    Fig4b,
    Fig6a,
    Fig6b,
    Fig8,
    Fig10a,
    Fig10b,
    Fig11,
    Fig12,
    Fig16,
    Fig17,
}

impl Figure {
    pub const ALL: [Figure; 11] = [
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig6a,
        Figure::Fig6b,
        Figure::Fig8,
        Figure::Fig10a,
        Figure::Fig10b,
        Figure::Fig11,
        Figure::Fig12,
        Figure::Fig16,
        Figure::Fig17,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig6a => "fig6a",
            Figure::Fig6b => "fig6b",
            Figure::Fig8 => "fig8",
            Figure::Fig10a => "fig10a",
            Figure::Fig10b => "fig10b",
            Figure::Fig11 => "fig11",
            Figure::Fig12 => "fig12",
            Figure::Fig16 => "fig16",
            Figure::Fig17 => "fig17",
        }
    }

    /// Default number of steps (per direction for two-sided figures).
    pub fn default_steps(self) -> usize {
        match self {
            Figure::Fig8 => 2000,
            _ => 5000,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Figure::Fig4a | Figure::Fig4b => "size and global entropy under sqrt_tau,I; uniform size 100",
            Figure::Fig6a => "size and global entropy under sqrt_tau,I backward and forward from one start",
            Figure::Fig6b => "size and global entropy under sqrt_tau,I2; uniform size 100",
            Figure::Fig8 => {
                "size under sqrt_tau,I2 from size 1000 at bit probability 0.01, both directions, minimum at 0"
            }
            Figure::Fig10a => "size under sqrt_tau,Ie; size 100, density 0.1, cap 1e5",
            Figure::Fig10b => "size under F,sqrt_tau,I; uniform size 100, cap 1e5",
            Figure::Fig11 => "average local entropy (r=5) under sqrt_tau,I",
            Figure::Fig12 => "sum of local entropies (r=5) under sqrt_tau,I and sqrt_tau,I2",
            Figure::Fig16 => "size and global entropy under sqrt_tau,I3,D on three layers",
            Figure::Fig17 => "average and summed local entropy (r=5) under sqrt_tau,I3,D",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ParseError::new(0, format!("unknown figure '{s}'")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReproOptions {
    pub steps: Option<usize>,
    pub keep_configs: bool,
}

pub const SIZE_CAP: usize = 100_000;

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub table: Table,
    pub metadata: Metadata,
    /// Forward traces in the order they appear in the table.
    pub traces: Vec<RunTrace<Anon>>,
}

struct Scenario {
    dynamics: &'static str,
    direction: Direction,
    init: InitSpec,
    record: Vec<Observable>,
    cap: Option<usize>,
}

fn dynamics(s: &str) -> Dynamics {
    s.parse().expect("preset dynamics parse")
}

fn execute(sc: &Scenario, steps: usize, rules: &Rules, meter: Meter, keep: bool) -> Result<(RunTrace<Anon>, RunMeta)> {
    let d = dynamics(sc.dynamics).directed(sc.direction);
    let x0 = sc.init.generate()?.anonymize();
    let opts =
        RunOptions { steps, record: sc.record.clone(), keep_configs: keep, size_cap: sc.cap, validate: false, meter };
    let tr = run(&x0, &d, rules, &opts)?;
    let meta = RunMeta {
        dynamics: sc.dynamics.to_string(),
        direction: sc.direction,
        init: sc.init,
        steps,
        steps_done: tr.steps(),
        capped: tr.capped,
        step_offset: 0,
    };
    Ok((tr, meta))
}

/// Runs the scenario behind `fig` with the default rules.
pub fn reproduce(fig: Figure, seed: u64, opts: &ReproOptions) -> Result<Reproduction> {
    let rules = Rules::default();
    let meter = Meter::default();
    let steps = opts.steps.unwrap_or_else(|| fig.default_steps());
    let size_entropy = vec![Observable::Size, Observable::SGlobal];
    let one = |dyn_: &'static str, init: InitSpec, record: Vec<Observable>, cap: Option<usize>| Scenario {
        dynamics: dyn_,
        direction: Direction::Forward,
        init,
        record,
        cap,
    };
    let single = |sc: Scenario| -> Result<Reproduction> {
        let (tr, meta) = execute(&sc, steps, &rules, meter, opts.keep_configs)?;
        Ok(Reproduction {
            table: tr.table(),
            metadata: Metadata::new(Some(fig.name().into()), vec![meta], &rules, meter),
            traces: vec![tr],
        })
    };
    match fig {
        Figure::Fig4a | Figure::Fig4b => single(one("sqrt_tau,I", InitSpec::uniform(100, 1, seed), size_entropy, None)),
        Figure::Fig6b => single(one("sqrt_tau,I2", InitSpec::uniform(100, 2, seed), size_entropy, None)),
        Figure::Fig10a => {
            let init = InitSpec { size: 100, layers: 1, density: 0.1, constraint: Constraint::None, seed };
            single(one("sqrt_tau,Ie", init, vec![Observable::Size, Observable::PTotal], Some(SIZE_CAP)))
        }
        Figure::Fig10b => single(one(
            "F,sqrt_tau,I",
            InitSpec::uniform(100, 1, seed),
            vec![Observable::Size, Observable::PTotal],
            Some(SIZE_CAP),
        )),
        Figure::Fig11 => {
            single(one("sqrt_tau,I", InitSpec::uniform(100, 1, seed), vec![Observable::SLocalAvg(5)], None))
        }
        Figure::Fig16 => single(one("sqrt_tau,I3,D", InitSpec::uniform(100, 3, seed), size_entropy, None)),
        Figure::Fig17 => single(one(
            "sqrt_tau,I3,D",
            InitSpec::uniform(100, 3, seed),
            vec![Observable::SLocalAvg(5), Observable::SLocalSum(5)],
            None,
        )),
        Figure::Fig6a | Figure::Fig8 => {
            let (dyn_, init, record) = if fig == Figure::Fig6a {
                ("sqrt_tau,I", InitSpec::uniform(100, 1, seed), size_entropy)
            } else {
                let init = InitSpec { size: 1000, layers: 2, density: 0.01, constraint: Constraint::None, seed };
                ("sqrt_tau,I2", init, vec![Observable::Size])
            };
            let mut back = one(dyn_, init, record.clone(), None);
            back.direction = Direction::Backward;
            let fwd = one(dyn_, init, record, None);
            let (tb, mut mb) = execute(&back, steps, &rules, meter, opts.keep_configs)?;
            let (tf, mut mf) = execute(&fwd, steps, &rules, meter, opts.keep_configs)?;
            let mut rows: Vec<(i64, Vec<Value>)> = Vec::new();
            for (t, r) in tb.rows.iter().enumerate().skip(1).rev() {
                rows.push((-(t as i64), r.clone()));
            }
            for (t, r) in tf.rows.iter().enumerate() {
                rows.push((t as i64, r.clone()));
            }
            let offset = if fig == Figure::Fig8 {
                let (at, _) = rows
                    .iter()
                    .map(|(t, r)| (*t, r[0].as_f64().unwrap_or(f64::INFINITY)))
                    .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
                at
            } else {
                0
            };
            mb.step_offset = offset;
            mf.step_offset = offset;
            let mut headers = vec!["step".to_string()];
            headers.extend(tf.keys.iter().map(ToString::to_string));
            let rows = rows
                .into_iter()
                .map(|(t, r)| {
                    let mut row = vec![Value::Int(t - offset)];
                    row.extend(r);
                    row
                })
                .collect();
            Ok(Reproduction {
                table: Table { headers, rows },
                metadata: Metadata::new(Some(fig.name().into()), vec![mb, mf], &rules, meter),
                traces: vec![tb, tf],
            })
        }
        Figure::Fig12 => {
            let a = one("sqrt_tau,I", InitSpec::uniform(100, 1, seed), vec![Observable::SLocalSum(5)], None);
            let b = one("sqrt_tau,I2", InitSpec::uniform(100, 2, seed), vec![Observable::SLocalSum(5)], None);
            let (ta, ma) = execute(&a, steps, &rules, meter, opts.keep_configs)?;
            let (tb, mb) = execute(&b, steps, &rules, meter, opts.keep_configs)?;
            let headers = vec!["step".into(), "S_local_sum_r5_I".into(), "S_local_sum_r5_I2".into()];
            let rows = ta
                .rows
                .iter()
                .zip(&tb.rows)
                .enumerate()
                .map(|(t, (ra, rb))| vec![Value::Int(t as i64), ra[0], rb[0]])
                .collect();
            Ok(Reproduction {
                table: Table { headers, rows },
                metadata: Metadata::new(Some(fig.name().into()), vec![ma, mb], &rules, meter),
                traces: vec![ta, tb],
            })
        }
    }
}
