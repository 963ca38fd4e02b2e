//! Experiment configuration files.
//!
//! A config is a TOML document with a handful of shared keys (`seed`, `out`,
//! `[emit]`, `[system]`) and exactly one experiment table named after its kind:
//!
//! ```toml
//! seed = 7
//!
//! [system]
//! kind = "doubling"
//! d = 2
//!
//! [trace]
//! observable = { kind = "cos_circle" }
//! point = { rational = [1, 3] }
//! horizon = 1000
//! ```
//!
//! Parsing is strict: unknown keys anywhere in the tree are errors, and every
//! problem found is reported rather than only the first.

use std::path::PathBuf;

use histlab_core::cocycle::CocycleSpec;
use histlab_core::irregular::build_irregular_word;
use histlab_core::{
    BlockSchedule, CheckpointPolicy, Cover, DenseSampler, Envelope, Measure, Observable,
    PeriodicWord, Point, SamplerStrategy, SubadditiveSpec, SystemKind, SystemSpec,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

pub const MAX_HORIZON: u64 = 1 << 32;
pub const MAX_SAMPLES: u64 = 1 << 20;
pub const MAX_BUDGET: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Trace,
    Criterion,
    Probe,
    Lyapunov,
    Entropy,
    IrregularBuild,
    WeakGibbs,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Trace,
        ExperimentKind::Criterion,
        ExperimentKind::Probe,
        ExperimentKind::Lyapunov,
        ExperimentKind::Entropy,
        ExperimentKind::IrregularBuild,
        ExperimentKind::WeakGibbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Trace => "trace",
            ExperimentKind::Criterion => "criterion",
            ExperimentKind::Probe => "probe",
            ExperimentKind::Lyapunov => "lyapunov",
            ExperimentKind::Entropy => "entropy",
            ExperimentKind::IrregularBuild => "irregular-build",
            ExperimentKind::WeakGibbs => "weak-gibbs",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Emit {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
            svg: false,
        }
    }
}

/// Starting points as written in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointConfig {
    Circle(f64),
    Torus([f64; 2]),
    /// (x, y) ∈ S¹ × ℝ, the Viana phase space.
    Cylinder([f64; 2]),
    /// Exact p/q on the circle.
    Rational([u64; 2]),
    Word(PeriodicWord),
    /// The greedy block word of a schedule, built on the configured full shift.
    Irregular(BlockSchedule),
}

impl PointConfig {
    pub fn resolve(&self, system: &SystemSpec) -> histlab_core::Result<Point> {
        let p = match self {
            PointConfig::Circle(x) => Point::circle(*x)?,
            PointConfig::Torus([x, y]) => Point::torus(*x, *y)?,
            PointConfig::Cylinder([x, y]) => Point::cylinder(*x, *y)?,
            PointConfig::Rational([p, q]) => Point::rational(*p, *q)?,
            PointConfig::Word(w) => Point::Symbolic(histlab_core::Word::Periodic(w.clone())),
            PointConfig::Irregular(s) => build_irregular_word(system, s.clone())?.point,
        };
        system.validate_point(&p)?;
        Ok(p)
    }
}

/// Dense-set samplers; jittered grids draw their seed from the run seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum SamplerConfig {
    PreimageTree { target: PointConfig, depth: u32 },
    StableTail { word: PeriodicWord, prefix_len: u32 },
    GridJitter { resolution: u64 },
}

impl SamplerConfig {
    pub fn resolve(&self, system: &SystemSpec, seed: u64) -> histlab_core::Result<DenseSampler> {
        let strategy = match self {
            SamplerConfig::PreimageTree { target, depth } => SamplerStrategy::PreimageTree {
                target: target.resolve(system)?,
                depth: *depth,
            },
            SamplerConfig::StableTail { word, prefix_len } => SamplerStrategy::StableTail {
                word: word.clone(),
                prefix_len: *prefix_len,
            },
            SamplerConfig::GridJitter { resolution } => SamplerStrategy::GridJitter {
                resolution: *resolution,
                seed,
            },
        };
        Ok(DenseSampler::new(system.clone(), strategy))
    }

    fn is_seeded(&self) -> bool {
        matches!(self, SamplerConfig::GridJitter { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceConfig {
    pub observable: Observable,
    pub point: PointConfig,
    pub horizon: u64,
    pub checkpoints: CheckpointPolicy,
    /// First n of the reported tail bounds; defaults to the dense-tail start.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_start: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subadditive: Option<SubadditiveSpec>,
    pub sampler_a: SamplerConfig,
    pub sampler_b: SamplerConfig,
    pub count: u64,
    pub horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_start: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub observable: Observable,
    pub covers: Vec<Cover>,
    pub n: u64,
    pub epsilon: f64,
    pub horizon: u64,
    pub budget: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exponent {
    /// Top exponent, (1/n) log ‖A^n‖.
    Top,
    /// Smallest exponent, through the inverse-transpose cocycle.
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovConfig {
    pub cocycle: CocycleSpec,
    pub point: PointConfig,
    pub horizon: u64,
    pub n_tail: u64,
    pub exponent: Exponent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyConfig {
    pub measure: Measure,
    pub point: PointConfig,
    pub horizon: u64,
    pub tail_start: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrregularConfig {
    pub schedule: BlockSchedule,
    pub tail_start: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakGibbsConfig {
    pub measure: Measure,
    pub potential: SubadditiveSpec,
    pub pressure: f64,
    pub points: u64,
    pub horizon: u64,
    pub envelope: Envelope,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Trace(TraceConfig),
    Criterion(CriterionConfig),
    Probe(ProbeConfig),
    Lyapunov(LyapunovConfig),
    Entropy(EntropyConfig),
    IrregularBuild(IrregularConfig),
    WeakGibbs(WeakGibbsConfig),
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::Trace(_) => ExperimentKind::Trace,
            Experiment::Criterion(_) => ExperimentKind::Criterion,
            Experiment::Probe(_) => ExperimentKind::Probe,
            Experiment::Lyapunov(_) => ExperimentKind::Lyapunov,
            Experiment::Entropy(_) => ExperimentKind::Entropy,
            Experiment::IrregularBuild(_) => ExperimentKind::IrregularBuild,
            Experiment::WeakGibbs(_) => ExperimentKind::WeakGibbs,
        }
    }

    fn needs_seed(&self) -> bool {
        match self {
            Experiment::Probe(_) | Experiment::WeakGibbs(_) => true,
            Experiment::Criterion(c) => c.sampler_a.is_seeded() || c.sampler_b.is_seeded(),
            _ => false,
        }
    }
}

/// TOML integers are signed, so seeds beyond i64::MAX are written as strings.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SeedRepr {
    Int(u64),
    Text(String),
}

fn serialize_seed<S: serde::Serializer>(seed: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
    match seed {
        Some(v) if *v > i64::MAX as u64 => SeedRepr::Text(v.to_string()).serialize(s),
        Some(v) => SeedRepr::Int(*v).serialize(s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_seed"
    )]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub emit: Emit,
    pub system: SystemSpec,
    #[serde(flatten)]
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn kind(&self) -> ExperimentKind {
        self.experiment.kind()
    }
}

/// Canonical TOML form; `parse_config(&render(c))` gives back `c`.
pub fn render(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("configs serialize to TOML")
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<String>> {
    parse_config_with_seed(text, None)
}

/// Parses with an optional seed override, which also satisfies the
/// seed requirement of sampled experiments.
pub fn parse_config_with_seed(
    text: &str,
    seed_override: Option<u64>,
) -> Result<ExperimentConfig, Vec<String>> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| vec![e.to_string().trim_end().to_string()])?;
    let mut errors = Vec::new();
    let mut top = Fields::new(&root, "", &mut errors);
    let seed = top.opt::<SeedRepr>("seed").and_then(|r| match r {
        SeedRepr::Int(v) => Some(v),
        SeedRepr::Text(t) => match t.parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                top.errors
                    .push(format!("seed: `{t}` is not an unsigned 64-bit integer"));
                None
            }
        },
    });
    let out = top.opt::<PathBuf>("out");
    let emit = top.opt::<Emit>("emit");
    let system = top.req::<SystemSpec>("system");
    let present: Vec<ExperimentKind> = ExperimentKind::ALL
        .into_iter()
        .filter(|k| root.contains_key(k.name()))
        .collect();
    for k in &present {
        top.seen.push(k.name());
    }
    top.finish();

    let experiment = match present.as_slice() {
        [kind] => match root[kind.name()].as_table() {
            Some(t) => experiment(*kind, t, system.as_ref(), &mut errors),
            None => {
                errors.push(format!("{}: expected a table", kind.name()));
                None
            }
        },
        [] => {
            let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            errors.push(format!(
                "missing experiment table: expected one of {}",
                names.join(", ")
            ));
            None
        }
        many => {
            let names: Vec<_> = many.iter().map(|k| k.name()).collect();
            errors.push(format!(
                "only one experiment per config, found {}",
                names.join(", ")
            ));
            None
        }
    };

    let seed = seed_override.or(seed);
    let needs_seed = match (&experiment, present.as_slice()) {
        (Some(e), _) => e.needs_seed(),
        (None, [k]) => matches!(k, ExperimentKind::Probe | ExperimentKind::WeakGibbs),
        _ => false,
    };
    if needs_seed && seed.is_none() && !root.contains_key("seed") {
        let kind = present.first().expect("experiment present").name();
        errors.push(format!(
            "seed: missing key (required for {kind} experiments)"
        ));
    }
    match (errors.is_empty(), system, experiment) {
        (true, Some(system), Some(experiment)) => Ok(ExperimentConfig {
            seed,
            out,
            emit: emit.unwrap_or_default(),
            system,
            experiment,
        }),
        _ => Err(errors),
    }
}

fn experiment(
    kind: ExperimentKind,
    t: &Table,
    system: Option<&SystemSpec>,
    errors: &mut Vec<String>,
) -> Option<Experiment> {
    let mut f = Fields::new(t, kind.name(), errors);
    let e = experiment_fields(kind, &mut f, system);
    f.finish();
    e
}

fn experiment_fields(
    kind: ExperimentKind,
    f: &mut Fields,
    system: Option<&SystemSpec>,
) -> Option<Experiment> {
    let e = match kind {
        ExperimentKind::Trace => {
            let observable = f.req::<Observable>("observable");
            let point = f.req::<PointConfig>("point");
            let horizon = f.horizon("horizon");
            let checkpoints = f
                .opt::<CheckpointPolicy>("checkpoints")
                .unwrap_or(CheckpointPolicy::DenseTail { start: None });
            let tail_start = f.opt::<u64>("tail_start");
            if let (Some(s), Some(h)) = (tail_start, horizon) {
                f.check(
                    "tail_start",
                    (1..=h).contains(&s),
                    "must lie in [1, horizon]",
                );
            }
            if let (Some(o), Some(s)) = (&observable, system) {
                f.domain("observable", o.validate_for(s));
            }
            Experiment::Trace(TraceConfig {
                observable: observable?,
                point: point?,
                horizon: horizon?,
                checkpoints,
                tail_start,
            })
        }
        ExperimentKind::Criterion => {
            let observable = f.opt::<Observable>("observable");
            let subadditive = f.opt::<SubadditiveSpec>("subadditive");
            let sampler_a = f.req::<SamplerConfig>("sampler_a");
            let sampler_b = f.req::<SamplerConfig>("sampler_b");
            let count = f.req::<u64>("count");
            let horizon = f.horizon("horizon");
            let tail_start = f.opt::<u64>("tail_start");
            if f.table.contains_key("observable") == f.table.contains_key("subadditive") {
                f.errors.push(
                    "criterion: exactly one of `observable` and `subadditive` must be given".into(),
                );
            }
            if let Some(c) = count {
                f.check(
                    "count",
                    (2..=MAX_SAMPLES).contains(&c),
                    &format!("must lie in [2, {MAX_SAMPLES}]"),
                );
            }
            if let (Some(s), Some(h)) = (tail_start, horizon) {
                f.check(
                    "tail_start",
                    (1..=h).contains(&s),
                    "must lie in [1, horizon]",
                );
                f.check(
                    "tail_start",
                    subadditive.is_none(),
                    "only applies to observable criteria",
                );
            }
            if let (Some(o), Some(s)) = (&observable, system) {
                f.domain("observable", o.validate_for(s));
            }
            Experiment::Criterion(CriterionConfig {
                observable,
                subadditive,
                sampler_a: sampler_a?,
                sampler_b: sampler_b?,
                count: count?,
                horizon: horizon?,
                tail_start,
            })
        }
        ExperimentKind::Probe => {
            let observable = f.req::<Observable>("observable");
            let covers = f.req::<Vec<Cover>>("covers");
            let n = f.req::<u64>("n");
            let epsilon = f.req::<f64>("epsilon");
            let horizon = f.horizon("horizon");
            let budget = f.req::<u32>("budget");
            if let Some(c) = &covers {
                f.check("covers", !c.is_empty(), "needs at least one cover");
                if let Some(s) = system {
                    for (i, cover) in c.iter().enumerate() {
                        f.domain(&format!("covers[{i}]"), cover.cell_count(s).map(|_| ()));
                    }
                }
            }
            if let (Some(n), Some(h)) = (n, horizon) {
                f.check("n", (1..=h).contains(&n), "must lie in [1, horizon]");
            }
            if let Some(e) = epsilon {
                f.check(
                    "epsilon",
                    e > 0.0 && e.is_finite(),
                    "must be positive and finite",
                );
            }
            if let Some(b) = budget {
                f.check(
                    "budget",
                    (1..=MAX_BUDGET).contains(&b),
                    &format!("must lie in [1, {MAX_BUDGET}]"),
                );
            }
            if let (Some(o), Some(s)) = (&observable, system) {
                f.domain("observable", o.validate_for(s));
            }
            Experiment::Probe(ProbeConfig {
                observable: observable?,
                covers: covers?,
                n: n?,
                epsilon: epsilon?,
                horizon: horizon?,
                budget: budget?,
            })
        }
        ExperimentKind::Lyapunov => {
            let cocycle = f.req::<CocycleSpec>("cocycle");
            let point = f.req::<PointConfig>("point");
            let horizon = f.horizon("horizon");
            let n_tail = f.req::<u64>("n_tail");
            let exponent = f.opt::<Exponent>("exponent").unwrap_or(Exponent::Top);
            if let (Some(n), Some(h)) = (n_tail, horizon) {
                f.check("n_tail", (1..=h).contains(&n), "must lie in [1, horizon]");
            }
            if let (Some(c), Some(s)) = (&cocycle, system) {
                f.domain("cocycle", c.validate_for(s));
            }
            Experiment::Lyapunov(LyapunovConfig {
                cocycle: cocycle?,
                point: point?,
                horizon: horizon?,
                n_tail: n_tail?,
                exponent,
            })
        }
        ExperimentKind::Entropy => {
            let measure = f.req::<Measure>("measure");
            let point = f.req::<PointConfig>("point");
            let horizon = f.horizon("horizon");
            let tail_start = f.opt::<u64>("tail_start").unwrap_or(1);
            if let Some(h) = horizon {
                f.check(
                    "tail_start",
                    (1..=h).contains(&tail_start),
                    "must lie in [1, horizon]",
                );
            }
            if let (Some(m), Some(s)) = (&measure, system) {
                f.domain("measure", m.validate(s.alphabet()));
            }
            Experiment::Entropy(EntropyConfig {
                measure: measure?,
                point: point?,
                horizon: horizon?,
                tail_start,
            })
        }
        ExperimentKind::IrregularBuild => {
            let schedule = f.req::<BlockSchedule>("schedule");
            let tail_start = f.opt::<u64>("tail_start").unwrap_or(1);
            if let Some(s) = &schedule {
                f.check(
                    "schedule.cap",
                    (s.cap as u64) <= MAX_HORIZON,
                    &format!("must not exceed {MAX_HORIZON}"),
                );
                f.check(
                    "tail_start",
                    (1..=s.cap as u64).contains(&tail_start),
                    "must lie in [1, cap]",
                );
                if let Some(sys) = system {
                    match sys.kind() {
                        SystemKind::FullShift { alphabet } => {
                            f.domain("schedule", s.validate(*alphabet))
                        }
                        _ => f
                            .errors
                            .push("irregular-build: needs a full_shift system".into()),
                    }
                }
            }
            Experiment::IrregularBuild(IrregularConfig {
                schedule: schedule?,
                tail_start,
            })
        }
        ExperimentKind::WeakGibbs => {
            let measure = f.req::<Measure>("measure");
            let potential = f.req::<SubadditiveSpec>("potential");
            let pressure = f.opt::<f64>("pressure").unwrap_or(0.0);
            let points = f.req::<u64>("points");
            let horizon = f.horizon("horizon");
            let envelope = f.req::<Envelope>("envelope");
            f.check("pressure", pressure.is_finite(), "must be finite");
            if let Some(p) = points {
                f.check(
                    "points",
                    (1..=MAX_SAMPLES).contains(&p),
                    &format!("must lie in [1, {MAX_SAMPLES}]"),
                );
            }
            if let (Some(m), Some(s)) = (&measure, system) {
                f.domain("measure", m.validate(s.alphabet()));
            }
            Experiment::WeakGibbs(WeakGibbsConfig {
                measure: measure?,
                potential: potential?,
                pressure,
                points: points?,
                horizon: horizon?,
                envelope: envelope?,
            })
        }
    };
    Some(e)
}

/// Typed access to one table, recording every error and every key read.
struct Fields<'a> {
    table: &'a Table,
    path: &'static str,
    seen: Vec<&'static str>,
    errors: &'a mut Vec<String>,
}

impl<'a> Fields<'a> {
    fn new(table: &'a Table, path: &'static str, errors: &'a mut Vec<String>) -> Self {
        Self {
            table,
            path,
            seen: Vec::new(),
            errors,
        }
    }

    fn key_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn opt<T: DeserializeOwned + Serialize>(&mut self, key: &'static str) -> Option<T> {
        self.seen.push(key);
        let v = self.table.get(key)?;
        let path = self.key_path(key);
        strict(v, &path, self.errors)
    }

    fn req<T: DeserializeOwned + Serialize>(&mut self, key: &'static str) -> Option<T> {
        if !self.table.contains_key(key) {
            self.seen.push(key);
            self.errors
                .push(format!("{}: missing key", self.key_path(key)));
            return None;
        }
        self.opt(key)
    }

    fn horizon(&mut self, key: &'static str) -> Option<u64> {
        let h = self.req::<u64>(key)?;
        self.check(
            key,
            (1..=MAX_HORIZON).contains(&h),
            &format!("must lie in [1, {MAX_HORIZON}]"),
        );
        Some(h)
    }

    fn check(&mut self, key: &str, ok: bool, message: &str) {
        if !ok {
            let p = self.key_path(key);
            self.errors.push(format!("{p}: {message}"));
        }
    }

    fn domain(&mut self, key: &str, r: histlab_core::Result<()>) {
        if let Err(e) = r {
            let p = self.key_path(key);
            self.errors.push(format!("{p}: {e}"));
        }
    }

    fn finish(self) {
        for key in self.table.keys() {
            if !self.seen.contains(&key.as_str()) {
                self.errors
                    .push(format!("{}: unknown key", self.key_path(key)));
            }
        }
    }
}

/// Deserializes `v` and flags keys the typed value dropped on the way in.
fn strict<T: DeserializeOwned + Serialize>(
    v: &Value,
    path: &str,
    errors: &mut Vec<String>,
) -> Option<T> {
    match T::deserialize(v.clone()) {
        Ok(t) => {
            if let Ok(back) = Value::try_from(&t) {
                unknown_keys(v, &back, path, errors);
            }
            Some(t)
        }
        Err(e) => {
            errors.push(format!("{path}: {}", e.to_string().trim_end()));
            None
        }
    }
}

fn unknown_keys(input: &Value, typed: &Value, path: &str, errors: &mut Vec<String>) {
    match (input, typed) {
        (Value::Table(a), Value::Table(b)) => {
            for (k, v) in a {
                match b.get(k) {
                    Some(w) => unknown_keys(v, w, &format!("{path}.{k}"), errors),
                    None => errors.push(format!("{path}.{k}: unknown key")),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (v, w)) in a.iter().zip(b).enumerate() {
                unknown_keys(v, w, &format!("{path}[{i}]"), errors);
            }
        }
        _ => {}
    }
}
