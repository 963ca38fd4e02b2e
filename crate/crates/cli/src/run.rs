//! Experiment dispatch.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use histlab_core::baire::Escaper;
use histlab_core::entropy::{weak_gibbs_series, WeakGibbsReport};
use histlab_core::sampler::cell_rng;
use histlab_core::{
    brin_katok_trace, build_irregular_word, criterion_check, criterion_check_subadditive,
    escaper_probe, lyapunov_gap, replay_escaper, smallest_exponent_gap, tail_bounds, trace,
    AverageTrace, CheckpointPolicy, CriterionVerdict, EntropyTrace, LambdaQuery, LambdaReport,
    LyapunovGap, Observable, Point, SystemSpec, TailBounds,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    render, CriterionConfig, EntropyConfig, Experiment, ExperimentConfig, Exponent,
    IrregularConfig, LyapunovConfig, ProbeConfig, TraceConfig, WeakGibbsConfig,
};
use crate::error::{io_error, CliError, Context};
use crate::report::{float, sha256_hex, Emitter, Plot, RunManifest, WallClock};

#[derive(Serialize)]
struct TraceReport<'a> {
    trace: &'a AverageTrace,
    tail: Option<TailBounds>,
}

/// Every report of one probe run, in cover order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub reports: Vec<LambdaReport>,
}

#[derive(Serialize)]
struct EntropyReport<'a> {
    tail_start: u64,
    tail_lower: f64,
    tail_upper: f64,
    trace: &'a EntropyTrace,
}

#[derive(Serialize)]
struct IrregularReport<'a> {
    schedule: &'a histlab_core::BlockSchedule,
    switches: &'a [usize],
    alpha_target: f64,
    beta_target: f64,
    delta_last: f64,
    cycles_completed: usize,
    tail: TailBounds,
}

#[derive(Serialize)]
struct WeakGibbsOutput<'a> {
    report: &'a WeakGibbsReport,
    points: &'a [Point],
}

/// Runs one experiment into `out` and writes its manifest.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<RunManifest, CliError> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let mut em = Emitter::new(out, config.emit)?;
    let system = &config.system;
    let seed = config.seed;
    match &config.experiment {
        Experiment::Trace(c) => run_trace(system, c, &mut em)?,
        Experiment::Criterion(c) => run_criterion(system, c, seed, &mut em)?,
        Experiment::Probe(c) => run_probe(system, c, seed.expect("validated"), &mut em)?,
        Experiment::Lyapunov(c) => run_lyapunov(system, c, &mut em)?,
        Experiment::Entropy(c) => run_entropy(system, c, &mut em)?,
        Experiment::IrregularBuild(c) => run_irregular(system, c, &mut em)?,
        Experiment::WeakGibbs(c) => run_weak_gibbs(system, c, seed.expect("validated"), &mut em)?,
    }
    let manifest = RunManifest {
        experiment: config.kind().name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(config),
        seed,
        wall_clock: WallClock {
            started,
            elapsed_seconds: clock.elapsed().as_secs_f64(),
        },
        files: em.files().to_vec(),
    };
    em.manifest(&manifest)?;
    Ok(manifest)
}

/// Hash of the canonical config, ignoring where the outputs go.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let mut c = config.clone();
    c.out = None;
    sha256_hex(render(&c).as_bytes())
}

fn rows(it: impl Iterator<Item = (u64, f64)>) -> impl Iterator<Item = Vec<String>> {
    it.map(|(n, v)| vec![n.to_string(), float(v)])
}

fn series_plot(title: String, points: impl Iterator<Item = (u64, f64)>) -> Plot {
    Plot {
        title,
        x_label: "n",
        y_label: "value",
        points: points.map(|(n, v)| (n as f64, v)).collect(),
    }
}

fn run_trace(system: &SystemSpec, c: &TraceConfig, em: &mut Emitter) -> Result<(), CliError> {
    let x = c
        .point
        .resolve(system)
        .context(|| "trace: resolving the start point".into())?;
    let t =
        trace(system, &c.observable, &x, c.horizon, &c.checkpoints).context(|| "trace".into())?;
    let tail = match c.tail_start.or(t.dense_tail_start) {
        Some(n) => Some(tail_bounds(&t, n).context(|| format!("trace: tail bounds from n = {n}"))?),
        None => None,
    };
    em.csv("trace.csv", &["n", "psi_n"], rows(t.rows()))?;
    em.json("trace.json", &TraceReport { trace: &t, tail })?;
    em.svg(
        "trace.svg",
        &series_plot(
            format!("running average of {} on {}", t.observable, t.system),
            t.rows(),
        ),
    )
}

fn run_criterion(
    system: &SystemSpec,
    c: &CriterionConfig,
    seed: Option<u64>,
    em: &mut Emitter,
) -> Result<(), CliError> {
    let seed = seed.unwrap_or(0);
    let a = c
        .sampler_a
        .resolve(system, seed)
        .context(|| "criterion: sampler_a".into())?;
    let b = c
        .sampler_b
        .resolve(system, seed.wrapping_add(1))
        .context(|| "criterion: sampler_b".into())?;
    let v: CriterionVerdict = match (&c.observable, &c.subadditive) {
        (Some(o), _) => criterion_check(system, o, &a, &b, c.count, c.horizon, c.tail_start),
        (None, Some(s)) => criterion_check_subadditive(system, s, &a, &b, c.count, c.horizon),
        (None, None) => unreachable!("validated config"),
    }
    .context(|| "criterion".into())?;
    em.json("criterion.json", &v)?;
    let mut index = [0u64; 2];
    em.csv(
        "criterion.csv",
        &["class", "index", "value"],
        v.samples.iter().map(|s| {
            let slot = &mut index[(s.class == 'B') as usize];
            *slot += 1;
            vec![s.class.to_string(), (*slot - 1).to_string(), float(s.value)]
        }),
    )?;
    Ok(())
}

fn run_probe(
    system: &SystemSpec,
    c: &ProbeConfig,
    seed: u64,
    em: &mut Emitter,
) -> Result<(), CliError> {
    let q = LambdaQuery::new(c.n, c.epsilon, c.horizon).context(|| "probe: query".into())?;
    let reports = c
        .covers
        .iter()
        .map(|cover| {
            escaper_probe(system, &c.observable, cover, &q, c.budget, seed)
                .context(|| format!("probe: cover {cover:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    em.csv(
        "probe.csv",
        &["resolution", "fraction"],
        reports
            .iter()
            .map(|r| vec![float(r.resolution), float(r.fraction)]),
    )?;
    em.svg(
        "probe.svg",
        &Plot {
            title: format!("escaper fraction, N = {}, ε = {}", q.n, q.epsilon),
            x_label: "resolution",
            y_label: "fraction",
            points: reports.iter().map(|r| (r.resolution, r.fraction)).collect(),
        },
    )?;
    em.json("probe.json", &ProbeReport { reports })
}

fn run_lyapunov(system: &SystemSpec, c: &LyapunovConfig, em: &mut Emitter) -> Result<(), CliError> {
    let x = c
        .point
        .resolve(system)
        .context(|| "lyapunov: resolving the point".into())?;
    let g: LyapunovGap = match c.exponent {
        Exponent::Top => lyapunov_gap(&c.cocycle, system, &x, c.n_tail, c.horizon),
        Exponent::Bottom => smallest_exponent_gap(&c.cocycle, system, &x, c.n_tail, c.horizon),
    }
    .context(|| format!("lyapunov: {}", c.cocycle.id()))?;
    em.csv(
        "lyapunov.csv",
        &["n", "value"],
        rows(g.series.iter().copied()),
    )?;
    em.json("lyapunov.json", &g)?;
    em.svg(
        "lyapunov.svg",
        &series_plot(
            format!("exponent estimate for {}", c.cocycle.id()),
            g.series.iter().copied(),
        ),
    )
}

fn run_entropy(system: &SystemSpec, c: &EntropyConfig, em: &mut Emitter) -> Result<(), CliError> {
    let x = c
        .point
        .resolve(system)
        .context(|| "entropy: resolving the point".into())?;
    let t = brin_katok_trace(system, &c.measure, &x, c.horizon).context(|| "entropy".into())?;
    let (lo, hi) = t
        .tail_bounds(c.tail_start)
        .context(|| "entropy: tail bounds".into())?;
    em.csv("entropy.csv", &["n", "value"], rows(t.rows()))?;
    em.json(
        "entropy.json",
        &EntropyReport {
            tail_start: c.tail_start,
            tail_lower: lo,
            tail_upper: hi,
            trace: &t,
        },
    )?;
    em.svg(
        "entropy.svg",
        &series_plot(format!("local entropy of {}", c.measure.id()), t.rows()),
    )
}

fn run_irregular(
    system: &SystemSpec,
    c: &IrregularConfig,
    em: &mut Emitter,
) -> Result<(), CliError> {
    let w =
        build_irregular_word(system, c.schedule.clone()).context(|| "irregular-build".into())?;
    let alphabet = system.alphabet().expect("validated full shift") as usize;
    let mut indicator = vec![0.0; alphabet];
    indicator[c.schedule.tracked as usize] = 1.0;
    let observable = Observable::SymbolTable { values: indicator };
    let cap = c.schedule.cap as u64;
    let t = trace(
        system,
        &observable,
        &w.point,
        cap,
        &CheckpointPolicy::DenseTail { start: Some(1) },
    )
    .context(|| "irregular-build: rescan".into())?;
    let tail = tail_bounds(&t, c.tail_start).context(|| "irregular-build: tail bounds".into())?;
    em.csv("irregular.csv", &["n", "psi_n"], rows(t.rows()))?;
    em.json(
        "irregular.json",
        &IrregularReport {
            schedule: &c.schedule,
            switches: &w.switches,
            alpha_target: w.alpha_target,
            beta_target: w.beta_target,
            delta_last: w.delta_last,
            cycles_completed: w.cycles_completed,
            tail,
        },
    )?;
    em.svg(
        "irregular.svg",
        &series_plot("running frequency of the tracked symbol".into(), t.rows()),
    )
}

fn run_weak_gibbs(
    system: &SystemSpec,
    c: &WeakGibbsConfig,
    seed: u64,
    em: &mut Emitter,
) -> Result<(), CliError> {
    let points = (0..c.points)
        .map(|i| system.random_point(&mut cell_rng(seed, i)))
        .collect::<histlab_core::Result<Vec<_>>>()
        .context(|| "weak-gibbs: sampling points".into())?;
    let report = histlab_core::weak_gibbs_check(
        system,
        &c.measure,
        &c.potential,
        c.pressure,
        &points,
        c.horizon,
        c.envelope,
    )
    .context(|| "weak-gibbs".into())?;
    let per_point = points
        .par_iter()
        .map(|x| weak_gibbs_series(system, &c.measure, &c.potential, c.pressure, x, c.horizon))
        .collect::<histlab_core::Result<Vec<_>>>()
        .context(|| "weak-gibbs: series".into())?;
    let worst: Vec<(u64, f64)> = (0..c.horizon as usize)
        .map(|i| {
            let m = per_point
                .iter()
                .map(|s| s[i].normalized)
                .fold(0.0, f64::max);
            (i as u64 + 1, m)
        })
        .collect();
    em.csv(
        "weak-gibbs.csv",
        &["n", "value"],
        rows(worst.iter().copied()),
    )?;
    em.json(
        "weak-gibbs.json",
        &WeakGibbsOutput {
            report: &report,
            points: &points,
        },
    )?;
    em.svg(
        "weak-gibbs.svg",
        &series_plot(
            "max over points of (1/n)|log ratio|".into(),
            worst.into_iter(),
        ),
    )
}

/// Outcome of re-tracing one escaper.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayOutcome {
    pub report: usize,
    pub cell: u64,
    pub sample: u32,
    /// Λ_N membership of the re-traced point; `false` confirms the escaper.
    pub lambda_membership: bool,
}

pub fn load_probe_report(path: &Path) -> Result<ProbeReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Re-traces escapers of a probe report; `only` selects (report, escaper).
pub fn replay(
    report: &ProbeReport,
    only: Option<(usize, usize)>,
) -> Result<Vec<ReplayOutcome>, CliError> {
    let mut selected: Vec<(usize, &LambdaReport, &Escaper)> = Vec::new();
    for (i, r) in report.reports.iter().enumerate() {
        for (k, e) in r.escapers.iter().enumerate() {
            if only.is_none_or(|sel| sel == (i, k)) {
                selected.push((i, r, e));
            }
        }
    }
    if let Some((i, k)) = only {
        if selected.is_empty() {
            return Err(CliError::config(format!("no escaper {k} in report {i}")));
        }
    }
    selected
        .par_iter()
        .map(|(i, r, e)| {
            let escaped = replay_escaper(r, e).context(|| format!("replay: cell {}", e.cell))?;
            Ok(ReplayOutcome {
                report: *i,
                cell: e.cell,
                sample: e.sample,
                lambda_membership: !escaped,
            })
        })
        .collect()
}
