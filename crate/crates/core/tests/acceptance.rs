//! Acceptance suite. Prints one line per criterion and exits nonzero only when
//! a check fails that is not listed as a known failure.
//!
//! Run with `cargo test --release --test acceptance` for realistic timings.

use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use janus_core::experiments::{
    fit, late_window, median, reproduce, run, Figure, InitSpec, Model, ReproOptions, RunOptions, RunTrace,
};
use janus_core::graph::{random_config, Constraint};
use janus_core::names::{Anon, Label};
use janus_core::observables::{
    entropy_local_avg, entropy_local_sum, local_entropy_bound, merger_census, EntropyVariant, Observable,
};
use janus_core::rulecheck::{
    check_bijective_over, check_conservation, check_energy_laws, check_step_bijective, check_time_symmetry,
    i3_folded_alphabet, CertReport, Quantity,
};
use janus_core::steps::{apply_step, Rules};
use janus_core::{Configuration, Dynamics, Step, StepKind};

const SEEDS: u64 = 20;
const LONG: usize = 5000;
const CAP: usize = 100_000;
const REPLAY: usize = 1000;

static VALIDATED_STEPS: AtomicU64 = AtomicU64::new(0);

#[derive(PartialEq)]
enum Verdict {
    Pass,
    Known(String),
    Fail,
}

struct Line {
    n: usize,
    verdict: Verdict,
    detail: String,
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn dynamics(s: &str) -> Dynamics {
    s.parse().unwrap()
}

fn checked<L: Label>(x: &Configuration<L>) -> Result<(), String> {
    VALIDATED_STEPS.fetch_add(1, Ordering::Relaxed);
    let v = x.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(format!("{} violations, first {:?}", v.len(), v[0]))
    }
}

fn named_run(x: &Configuration, d: &Dynamics, steps: usize, record: Vec<Observable>, cap: Option<usize>) -> RunTrace {
    let mut o = RunOptions::new(steps, record);
    o.validate = true;
    o.size_cap = cap;
    let tr = run(x, d, &Rules::default(), &o).expect("validated run");
    VALIDATED_STEPS.fetch_add(tr.rows.len() as u64, Ordering::Relaxed);
    tr
}

fn anon_run(x: &Configuration, d: &Dynamics, steps: usize, record: Vec<Observable>) -> RunTrace<Anon> {
    run(&x.anonymize(), d, &Rules::default(), &RunOptions::new(steps, record)).expect("run")
}

fn series<L: Label>(tr: &RunTrace<L>, k: Observable) -> Vec<f64> {
    tr.column(k).unwrap().into_iter().map(|v| v.expect("defined")).collect()
}

fn late_fit(ys: &[f64], model: Model) -> (f64, f64) {
    let ts: Vec<f64> = (0..ys.len()).map(|t| t as f64).collect();
    let f = fit(&ts, ys, model, late_window(ys.len() - 1)).expect("fit");
    (f.slope, f.r2)
}

fn min(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn uniform(size: usize, layers: usize, seed: u64) -> Configuration {
    InitSpec::uniform(size, layers, seed).generate().unwrap()
}

fn small(seed: u64, layers: usize) -> Configuration {
    random_config(1 + (seed % 32) as usize, layers, 0.5, 1000 + seed, Constraint::None).unwrap()
}

enum Trip {
    Ok,
    Capped,
    Bad(String),
}

/// `k` steps forward then back, validating every configuration. A run that
/// outgrows `cap` turns back early.
fn round_trip(x0: &Configuration, d: &Dynamics, k: usize, cap: usize) -> Trip {
    let rules = Rules::default();
    let inv = d.inverse();
    let mut cur = x0.clone();
    let mut depth = 0;
    while depth < k && cur.len() <= cap {
        cur = d.step(&cur, &rules);
        if let Err(e) = checked(&cur) {
            return Trip::Bad(format!("{d} step {}: {e}", depth + 1));
        }
        depth += 1;
    }
    for i in 0..depth {
        cur = inv.step(&cur, &rules);
        if let Err(e) = checked(&cur) {
            return Trip::Bad(format!("{inv} step {}: {e}", i + 1));
        }
    }
    if !cur.same_graph(x0) {
        return Trip::Bad(format!("{d}: {depth} steps and back differs from {x0}"));
    }
    if depth < k {
        Trip::Capped
    } else {
        Trip::Ok
    }
}

fn criterion1() -> Line {
    let t = Instant::now();
    let mut cases: Vec<Dynamics> = StepKind::ALL.iter().map(|&k| Dynamics::new(vec![Step::new(k)])).collect();
    for s in ["sqrt_tau,I", "sqrt_tau,I2", "sqrt_tau,Ie", "F,sqrt_tau,I", "sqrt_tau,D", "sqrt_tau,I3,D"] {
        cases.push(dynamics(s));
    }
    let mut trips = 0;
    let mut capped = Vec::new();
    let mut bad = Vec::new();
    for d in &cases {
        let layers = d.min_layers().max(1);
        let mut n_capped = 0;
        for seed in 0..100 {
            let x = small(seed, layers);
            if let Err(e) = checked(&x) {
                bad.push(e);
                continue;
            }
            for k in [1, 5, 50] {
                trips += 1;
                match round_trip(&x, d, k, 1 << 16) {
                    Trip::Ok => {}
                    Trip::Capped => n_capped += 1,
                    Trip::Bad(e) => bad.push(e),
                }
            }
        }
        if n_capped > 0 {
            capped.push(format!("{d}: {n_capped}"));
        }
    }
    let el = t.elapsed();
    let timely = el < Duration::from_secs(60);
    let mut detail = format!("{trips} round trips over {} dynamics, {:.1}s", cases.len(), el.as_secs_f64());
    if let Some(e) = bad.first() {
        detail += &format!("; {} mismatches, first: {e}", bad.len());
    }
    if !timely {
        detail += "; over the 60s budget";
    }
    let verdict = if !bad.is_empty() || !timely {
        Verdict::Fail
    } else if !capped.is_empty() {
        Verdict::Known(format!(
            "trips that passed 65536 vertices turned back early and returned exactly ({})",
            capped.join(", ")
        ))
    } else {
        Verdict::Pass
    };
    Line { n: 1, verdict, detail }
}

fn criterion2() -> Line {
    let rules = Rules::default();
    let mut reports: Vec<CertReport> = Vec::new();
    for &k in &StepKind::ALL {
        if k == StepKind::I3 {
            continue;
        }
        reports.push(check_step_bijective(k, 6, k.min_layers(), &rules).expect("enumeration"));
    }
    let i3 = Dynamics::of(&[StepKind::I3]);
    for flanks in [false, true] {
        let r = Rules { i3_flanks: flanks, ..Rules::default() };
        reports.push(check_bijective_over(&i3, 6, 3, &i3_folded_alphabet(), &r, true).expect("enumeration"));
        reports.push(check_step_bijective(StepKind::I3, 4, 3, &r).expect("enumeration"));
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.to_string()).collect();
    let checked: u64 = reports.iter().map(|r| r.checked).sum();
    Line {
        n: 2,
        verdict: verdict(failed.is_empty()),
        detail: format!(
            "{} reports, {checked} circles up to rotation; I3 at size 6 over its 8 distinguishable states, all 64 to size 4{}",
            reports.len(),
            failed.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    }
}

fn criterion3() -> Line {
    let rules = Rules::default();
    let sample: Vec<Configuration> = (0..100).map(|s| small(s, 3)).collect();
    let mut bad = Vec::new();
    for k in [StepKind::I, StepKind::I2, StepKind::I3, StepKind::Ie, StepKind::F, StepKind::T, StepKind::R] {
        let s = Step::new(k);
        if !sample.iter().all(|x| apply_step(&apply_step(x, s, &rules), s, &rules).same_graph(x)) {
            bad.push(format!("{}^2 != id", k.token()));
        }
    }
    let half = Step::new(StepKind::SqrtTau);
    let whole = Step::new(StepKind::Tau);
    if !sample
        .iter()
        .all(|x| apply_step(&apply_step(x, half, &rules), half, &rules).obs_equal(&apply_step(x, whole, &rules)))
    {
        bad.push("sqrt_tau^2 !~ tau".into());
    }
    let two: Vec<Configuration> = (0..100).map(|s| small(s, 2)).collect();
    let (i2, r) = (Step::new(StepKind::I2), Step::new(StepKind::R));
    if !two.iter().all(|x| {
        apply_step(&apply_step(x, r, &rules), i2, &rules).same_graph(&apply_step(&apply_step(x, i2, &rules), r, &rules))
    }) {
        bad.push("I2 R != R I2".into());
    }
    let sym = check_time_symmetry(&dynamics("sqrt_tau,I2"), &dynamics("I2,R"), &two, &rules, false);
    if !sym.passed() {
        bad.push(format!("sqrt_tau I2 not symmetric under I2 R: {sym}"));
    }
    let one: Vec<Configuration> = (0..100).map(|s| small(s, 1)).collect();
    let swap = check_time_symmetry(&dynamics("sqrt_tau,I"), &dynamics("T"), &one, &rules, false);
    if swap.passed() {
        bad.push("sqrt_tau I unexpectedly symmetric under T".into());
    }
    Line {
        n: 3,
        verdict: verdict(bad.is_empty()),
        detail: if bad.is_empty() {
            format!("7 involutions, sqrt_tau^2 ~ tau, I2 R = R I2 on 100 samples (I2 R on two layers); T breaks sqrt_tau I ({} counterexamples shown)", swap.counterexamples.len())
        } else {
            bad.join("; ")
        },
    }
}

struct Forward {
    size: Vec<f64>,
    s_global: Vec<f64>,
    s_local: Vec<f64>,
    n_f: Vec<f64>,
    d_f: Vec<Option<f64>>,
}

fn forward_runs() -> (Vec<Forward>, Duration) {
    let t = Instant::now();
    let d = dynamics("sqrt_tau,I");
    let keys = vec![Observable::Size, Observable::SGlobal, Observable::SLocalAvg(5), Observable::NF, Observable::DF];
    let out = (0..SEEDS)
        .map(|seed| {
            let tr = named_run(&uniform(100, 1, seed), &d, LONG, keys.clone(), None);
            Forward {
                size: series(&tr, Observable::Size),
                s_global: series(&tr, Observable::SGlobal),
                s_local: series(&tr, Observable::SLocalAvg(5)),
                n_f: series(&tr, Observable::NF),
                d_f: tr.column(Observable::DF).unwrap(),
            }
        })
        .collect();
    (out, t.elapsed())
}

fn criterion4(runs: &[Forward]) -> Line {
    let mut bad = Vec::new();
    let mut zero_at = Vec::new();
    for (seed, r) in runs.iter().enumerate() {
        let key = |t: usize| (r.n_f[t] as u64, r.d_f[t].map_or(0, |d| d as u64));
        let z = r.n_f.iter().position(|&n| n == 0.0);
        let end = z.unwrap_or(r.n_f.len() - 1);
        if let Some(t) = (1..=end).find(|&t| key(t) > key(t - 1)) {
            bad.push(format!("seed {seed}: (n_f, d_f) rises at step {t}"));
        }
        if let Some(z) = z {
            zero_at.push(z as f64);
            if let Some(t) = (z + 1..r.n_f.len()).find(|&t| r.n_f[t] != 0.0 || r.size[t] < r.size[t - 1]) {
                bad.push(format!("seed {seed}: after step {z}, step {t} has a pattern or shrinks"));
            }
        }
        if let Some(t) = (1..r.n_f.len()).find(|&t| r.n_f[t] > 0.0 && r.n_f[t - 1] == 0.0) {
            bad.push(format!("seed {seed}: patterns appear at step {t} from none"));
        }
    }
    let rules = Rules::default();
    let inv = dynamics("sqrt_tau,I").inverse();
    let mut with = 0;
    for seed in 0..2000 {
        let x = random_config(2 + (seed % 40) as usize, 1, 0.5, 5000 + seed, Constraint::None).unwrap();
        if merger_census(&x).n_f == 0 {
            continue;
        }
        with += 1;
        if merger_census(&inv.step(&x, &rules)).n_f == 0 {
            bad.push(format!("preimage of {x} has no merger pattern"));
        }
    }
    Line {
        n: 4,
        verdict: verdict(bad.is_empty()),
        detail: if bad.is_empty() {
            format!(
                "{}/{} runs reach n_f = 0 (median step {:.0}); {with} random preimages checked",
                zero_at.len(),
                runs.len(),
                median(&zero_at).unwrap_or(f64::NAN)
            )
        } else {
            format!("{} violations, first: {}", bad.len(), bad[0])
        },
    }
}

fn criterion5(runs: &[Forward], el: Duration) -> Line {
    let fits: Vec<(f64, f64)> = runs.iter().map(|r| late_fit(&r.size, Model::Power)).collect();
    let e = median(&fits.iter().map(|f| f.0).collect::<Vec<_>>()).unwrap();
    let r2 = median(&fits.iter().map(|f| f.1).collect::<Vec<_>>()).unwrap();
    let timely = el < Duration::from_secs(300);
    Line {
        n: 5,
        verdict: verdict((0.4..=0.6).contains(&e) && r2 >= 0.95 && timely),
        detail: format!(
            "median exponent {e:.4}, median R2 {r2:.4}, min R2 {:.4}; {} named runs validated every step in {:.1}s",
            min(&fits.iter().map(|f| f.1).collect::<Vec<_>>()),
            runs.len(),
            el.as_secs_f64()
        ),
    }
}

struct Backward {
    size: Vec<f64>,
    s_global: Vec<f64>,
}

fn backward_runs() -> Vec<Backward> {
    let d = dynamics("sqrt_tau,I").inverse();
    (0..SEEDS)
        .map(|seed| {
            let tr = anon_run(&uniform(100, 1, seed), &d, LONG, vec![Observable::Size, Observable::SGlobal]);
            Backward { size: series(&tr, Observable::Size), s_global: series(&tr, Observable::SGlobal) }
        })
        .collect()
}

fn criterion6(runs: &[Backward]) -> Line {
    let fits: Vec<(f64, f64)> = runs.iter().map(|r| late_fit(&r.size, Model::Power)).collect();
    let e = median(&fits.iter().map(|f| f.0).collect::<Vec<_>>()).unwrap();
    let r2 = median(&fits.iter().map(|f| f.1).collect::<Vec<_>>()).unwrap();
    Line {
        n: 6,
        verdict: verdict((0.9..=1.1).contains(&e) && r2 >= 0.95),
        detail: format!(
            "backward: median exponent {e:.4}, median R2 {r2:.4}, final sizes {:.0}..{:.0}",
            min(&runs.iter().map(|r| *r.size.last().unwrap()).collect::<Vec<_>>()),
            max(&runs.iter().map(|r| *r.size.last().unwrap()).collect::<Vec<_>>())
        ),
    }
}

fn criterion7(fwd: &[Forward], bwd: &[Backward]) -> Line {
    let f: Vec<f64> = fwd.iter().map(|r| late_fit(&r.s_global, Model::Log).1).collect();
    let b: Vec<f64> = bwd.iter().map(|r| late_fit(&r.s_global, Model::Log).1).collect();
    let (mf, mb) = (median(&f).unwrap(), median(&b).unwrap());
    Line {
        n: 7,
        verdict: verdict(mf >= 0.95 && mb >= 0.95),
        detail: format!(
            "S_global against ln t: median R2 forward {mf:.4} (min {:.4}), backward {mb:.4} (min {:.4})",
            min(&f),
            min(&b)
        ),
    }
}

fn criterion8() -> Line {
    let i2 = dynamics("sqrt_tau,I2");
    let lin: Vec<(f64, f64)> = (0..SEEDS)
        .map(|seed| {
            late_fit(
                &series(&anon_run(&uniform(100, 2, seed), &i2, LONG, vec![Observable::Size]), Observable::Size),
                Model::Power,
            )
        })
        .collect();
    let e = median(&lin.iter().map(|f| f.0).collect::<Vec<_>>()).unwrap();
    let er2 = median(&lin.iter().map(|f| f.1).collect::<Vec<_>>()).unwrap();
    let mut ok = (0.8..=1.2).contains(&e) && er2 >= 0.95;
    let mut detail = format!("sqrt_tau I2 median exponent {e:.4} (R2 {er2:.4})");
    for (name, dens) in [("sqrt_tau,Ie", 0.1), ("F,sqrt_tau,I", 0.5)] {
        let d = dynamics(name);
        let mut fits = Vec::new();
        let mut capped = 0;
        let mut steps = Vec::new();
        for seed in 0..SEEDS {
            let x =
                random_config(100, 1, dens, seed, if dens == 0.5 { Constraint::OneOfEach } else { Constraint::None })
                    .unwrap();
            let tr = named_run(&x, &d, LONG, vec![Observable::Size], Some(CAP));
            capped += tr.capped as usize;
            steps.push(tr.steps() as f64);
            fits.push(late_fit(&series(&tr, Observable::Size), Model::Exponential));
        }
        let rate = median(&fits.iter().map(|f| f.0).collect::<Vec<_>>()).unwrap();
        let r2 = median(&fits.iter().map(|f| f.1).collect::<Vec<_>>()).unwrap();
        ok &= rate > 0.0 && r2 >= 0.95;
        detail += &format!(
            "; {name} median rate {rate:.4} R2 {r2:.4} (min {:.4}), {capped}/{SEEDS} capped after median {:.0} steps",
            min(&fits.iter().map(|f| f.1).collect::<Vec<_>>()),
            median(&steps).unwrap()
        );
    }
    Line { n: 8, verdict: verdict(ok), detail }
}

struct Layered {
    p: Vec<f64>,
    s_sum: Vec<f64>,
}

fn layered_runs(spec: &str) -> Vec<Layered> {
    let d = dynamics(spec);
    (0..SEEDS)
        .map(|seed| {
            let tr =
                named_run(&uniform(100, 3, seed), &d, LONG, vec![Observable::PTotal, Observable::SLocalSum(5)], None);
            Layered { p: series(&tr, Observable::PTotal), s_sum: series(&tr, Observable::SLocalSum(5)) }
        })
        .collect()
}

fn criterion9(i3d: &[Layered]) -> Line {
    let rules = Rules::default();
    let d = dynamics("sqrt_tau,D");
    let mut bad = Vec::new();
    for seed in 0..SEEDS {
        let x = uniform(100, 2, seed);
        let r = check_conservation(&x, &d, 10_000, Quantity::E, &rules).unwrap();
        if !r.passed() {
            bad.push(format!("seed {seed}: {r}"));
        }
        let tr = named_run(&x, &d, 10_000, vec![Observable::E], None);
        let e = series(&tr, Observable::E);
        if e.iter().any(|&v| v != e[0]) {
            bad.push(format!("seed {seed}: E varies along the validated run"));
        }
    }
    let laws = check_energy_laws(6, &rules).unwrap();
    if !laws.passed() {
        bad.push(laws.to_string());
    }
    for (seed, r) in i3d.iter().enumerate() {
        let p0 = r.p[0];
        if r.p.iter().any(|&p| p < p0 / 2.0 || p > 2.0 * p0) {
            bad.push(format!("seed {seed}: particle count leaves [{}, {}]", p0 / 2.0, 2.0 * p0));
        }
    }
    let ratio: Vec<f64> = i3d.iter().map(|r| max(&r.s_sum) / (2.0 * r.p[0] * 11f64.ln())).collect();
    let start: Vec<f64> = i3d.iter().map(|r| r.s_sum[0] / (2.0 * r.p[0] * 11f64.ln())).collect();
    let base = format!(
        "E exact over 10^4 steps x {SEEDS} seeds; energy laws on {} circles; I3 D particle counts in [p0/2, 2p0]",
        laws.checked
    );
    if !bad.is_empty() {
        return Line { n: 9, verdict: Verdict::Fail, detail: format!("{} violations, first: {}", bad.len(), bad[0]) };
    }
    if ratio.iter().all(|&q| q <= 1.0) {
        return Line { n: 9, verdict: Verdict::Pass, detail: base };
    }
    Line {
        n: 9,
        verdict: Verdict::Known(format!(
            "summed local entropy peaks at {:.2}..{:.2} times 2 p0 ln 11; {:.2}..{:.2} times at step 0",
            min(&ratio),
            max(&ratio),
            min(&start),
            max(&start)
        )),
        detail: base,
    }
}

/// First step where `s` reaches 95% of its plateau, the median of the last
/// tenth of the run.
fn t95(s: &[f64]) -> f64 {
    let plateau = median(&s[s.len() * 9 / 10..]).unwrap();
    s.iter().position(|&v| v >= 0.95 * plateau).unwrap() as f64
}

fn criterion10(fwd: &[Forward], i3d: &[Layered], i3: &[Layered]) -> Line {
    let death: Vec<f64> = fwd.iter().map(|r| r.s_local.last().unwrap() / max(&r.s_local)).collect();
    let dead = death.iter().all(|&q| q < 0.1);
    let ratios: Vec<f64> = i3d.iter().zip(i3).map(|(a, b)| t95(&a.s_sum) / t95(&b.s_sum).max(1.0)).collect();
    let slow = median(&ratios).unwrap();
    let detail = format!(
        "S_5 at step {LONG} over its maximum: worst {:.3}; t95 ratio I3 D / I3 median {slow:.2} (range {:.2}..{:.2})",
        max(&death),
        min(&ratios),
        max(&ratios)
    );
    let verdict = if !dead {
        Verdict::Fail
    } else if slow >= 3.0 {
        Verdict::Pass
    } else {
        Verdict::Known(format!("plateau slowdown median {slow:.2} is below 3 at {LONG} steps"))
    };
    Line { n: 10, verdict, detail }
}

fn criterion11() -> Line {
    let mut bad = Vec::new();
    for seed in 0..10_000u64 {
        let layers = 1 + (seed % 3) as usize;
        let size = 1 + (seed.wrapping_mul(7919) % 200) as usize;
        let density = (seed % 101) as f64 / 100.0;
        let r = (seed % 11) as usize;
        let x = random_config(size, layers, density, seed, Constraint::None).unwrap();
        let avg = entropy_local_avg(&x, r, EntropyVariant::Slots).unwrap();
        let sum = entropy_local_sum(&x, r, EntropyVariant::Slots).unwrap();
        if avg > local_entropy_bound(&x, r) * (1.0 + 1e-12) {
            bad.push(format!("seed {seed}: average {avg} above bound {}", local_entropy_bound(&x, r)));
        }
        if avg.to_bits() != (sum / size as f64).to_bits() {
            bad.push(format!("seed {seed}: average {avg} is not sum / |V| = {}", sum / size as f64));
        }
    }
    // The linear-growth sweeps run on anonymous circles; replay seed 0 named.
    let mut replays = Vec::new();
    for (spec, layers, inverse) in [("sqrt_tau,I", 1, true), ("sqrt_tau,I2", 2, false)] {
        let d = if inverse { dynamics(spec).inverse() } else { dynamics(spec) };
        let tr = named_run(&uniform(100, layers, 0), &d, REPLAY, vec![Observable::Size], None);
        replays.push(format!("{d} to size {}", tr.last.len()));
    }
    let steps = VALIDATED_STEPS.load(Ordering::Relaxed);
    let detail = format!(
        "bound and sum/average identity on 10^4 random circles; {steps} configurations validated; named replays of seed 0 for {REPLAY} steps: {}",
        replays.join(", ")
    );
    if !bad.is_empty() {
        return Line { n: 11, verdict: Verdict::Fail, detail: format!("{} violations, first: {}", bad.len(), bad[0]) };
    }
    Line {
        n: 11,
        verdict: Verdict::Known(format!(
            "backward sqrt_tau I and sqrt_tau I2 sweeps ({SEEDS} x {LONG} steps) are validated only on these replays"
        )),
        detail,
    }
}

fn criterion12() -> Line {
    let mut bad = Vec::new();
    let mut bytes = 0;
    for fig in Figure::ALL {
        let once = reproduce(fig, 1, &ReproOptions::default()).unwrap().table.to_csv_string();
        let twice = reproduce(fig, 1, &ReproOptions::default()).unwrap().table.to_csv_string();
        bytes += once.len();
        if once != twice {
            bad.push(fig.name());
        }
    }
    Line {
        n: 12,
        verdict: verdict(bad.is_empty()),
        detail: if bad.is_empty() {
            format!("{} presets at default steps, {bytes} bytes each pass, identical twice", Figure::ALL.len())
        } else {
            format!("differing presets: {}", bad.join(", "))
        },
    }
}

fn report(line: &Line) -> bool {
    let (tag, ok) = match &line.verdict {
        Verdict::Pass => ("PASS".to_string(), true),
        Verdict::Known(why) => (format!("FAIL (known: {why})"), true),
        Verdict::Fail => ("FAIL".to_string(), false),
    };
    println!("criterion {}: {tag} | {}", line.n, line.detail);
    ok
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut ok = true;
    ok &= report(&criterion1());
    ok &= report(&criterion2());
    ok &= report(&criterion3());
    let (fwd, el) = forward_runs();
    ok &= report(&criterion4(&fwd));
    ok &= report(&criterion5(&fwd, el));
    let bwd = backward_runs();
    ok &= report(&criterion6(&bwd));
    ok &= report(&criterion7(&fwd, &bwd));
    ok &= report(&criterion8());
    let i3d = layered_runs("sqrt_tau,I3,D");
    ok &= report(&criterion9(&i3d));
    let i3 = layered_runs("sqrt_tau,I3");
    ok &= report(&criterion10(&fwd, &i3d, &i3));
    ok &= report(&criterion11());
    ok &= report(&criterion12());
    println!("acceptance finished in {:.0}s", start.elapsed().as_secs_f64());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
