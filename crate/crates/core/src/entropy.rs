//! Cylinder measures on full shifts, Brin–Katok local entropy and weak-Gibbs
//! ratios.
//!
//! With ε = 1/2 the dynamical ball B_n(x, ε) of the symbolic metric is the
//! length-n cylinder [x_0 … x_{n−1}], so every quantity here is an exact
//! finite product of weights evaluated in log space.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::point::Point;
use crate::subadditive::{SubadditiveSpec, SubadditiveWalk};
use crate::sum::CompensatedSum;
use crate::system::{SystemKind, SystemSpec};
use crate::word::Word;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const STATIONARY_RESIDUAL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Measure {
    Bernoulli {
        weights: Vec<f64>,
    },
    /// Stationary Markov measure of a row-stochastic matrix with positive entries.
    Markov {
        matrix: Vec<Vec<f64>>,
    },
}

impl Measure {
    pub fn bernoulli(weights: Vec<f64>) -> Result<Self> {
        let m = Measure::Bernoulli { weights };
        m.validate(None)?;
        Ok(m)
    }

    pub fn id(&self) -> String {
        match self {
            Measure::Bernoulli { weights } => format!("bernoulli{weights:?}"),
            Measure::Markov { matrix } => format!("markov{matrix:?}"),
        }
    }

    pub fn alphabet(&self) -> usize {
        match self {
            Measure::Bernoulli { weights } => weights.len(),
            Measure::Markov { matrix } => matrix.len(),
        }
    }

    pub fn validate(&self, alphabet: Option<u8>) -> Result<()> {
        let check_row = |row: &[f64], what: &str| -> Result<()> {
            if let Some(s) = row.iter().position(|w| *w == 0.0) {
                return Err(LabError::ZeroWeight { symbol: s as u8 });
            }
            if row.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(LabError::InvalidMeasure(format!(
                    "{what} entries must be positive"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(LabError::InvalidMeasure(format!(
                    "{what} sums to {sum}, not 1"
                )));
            }
            Ok(())
        };
        match self {
            Measure::Bernoulli { weights } => check_row(weights, "weight vector")?,
            Measure::Markov { matrix } => {
                if matrix.iter().any(|r| r.len() != matrix.len()) {
                    return Err(LabError::InvalidMeasure(
                        "transition matrix must be square".into(),
                    ));
                }
                for (i, row) in matrix.iter().enumerate() {
                    check_row(row, &format!("row {i}"))?;
                }
            }
        }
        if self.alphabet() < 2 {
            return Err(LabError::InvalidMeasure("need at least two symbols".into()));
        }
        if let Some(a) = alphabet {
            if self.alphabet() != a as usize {
                return Err(LabError::InvalidMeasure(format!(
                    "measure has {} symbols, shift has {a}",
                    self.alphabet()
                )));
            }
        }
        Ok(())
    }

    /// Stationary vector π = πP (Bernoulli: the weights themselves).
    pub fn stationary(&self) -> Result<Vec<f64>> {
        match self {
            Measure::Bernoulli { weights } => Ok(weights.clone()),
            Measure::Markov { matrix } => {
                let k = matrix.len();
                let p = DMatrix::from_fn(k, k, |i, j| matrix[i][j]);
                // (Pᵀ − I)π = 0 with the last equation replaced by Σπ = 1
                let mut a = p.transpose() - DMatrix::identity(k, k);
                a.row_mut(k - 1).fill(1.0);
                let mut b = DVector::zeros(k);
                b[k - 1] = 1.0;
                let pi = a.lu().solve(&b).ok_or_else(|| {
                    LabError::InvalidMeasure(
                        "transition matrix has no unique stationary vector".into(),
                    )
                })?;
                let residual = (pi.transpose() * &p - pi.transpose()).amax();
                if residual > STATIONARY_RESIDUAL || pi.iter().any(|v| *v <= 0.0) {
                    return Err(LabError::InvalidMeasure(format!(
                        "stationary solve residual {residual:e} exceeds {STATIONARY_RESIDUAL:e}"
                    )));
                }
                Ok(pi.iter().copied().collect())
            }
        }
    }
}

fn shift_word<'a>(system: &SystemSpec, measure: &Measure, x: &'a Point) -> Result<&'a Word> {
    let SystemKind::FullShift { alphabet } = system.kind() else {
        return Err(LabError::InvalidArgument(format!(
            "cylinder measures need a full shift, got {}",
            system.id()
        )));
    };
    measure.validate(Some(*alphabet))?;
    system.validate_point(x)?;
    x.as_word()
        .ok_or_else(|| LabError::InvalidPoint("expected a symbolic point".into()))
}

/// Incremental log μ([x_0 … x_{n−1}]).
#[derive(Clone, Debug)]
pub struct CylinderLog {
    log_weights: Vec<Vec<f64>>,
    log_initial: Vec<f64>,
    markov: bool,
    last: Option<u8>,
    sum: CompensatedSum,
}

impl CylinderLog {
    pub fn new(measure: &Measure) -> Result<Self> {
        measure.validate(None)?;
        let (log_weights, log_initial, markov) = match measure {
            Measure::Bernoulli { weights } => {
                let l: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
                (vec![l.clone()], l, false)
            }
            Measure::Markov { matrix } => (
                matrix
                    .iter()
                    .map(|r| r.iter().map(|w| w.ln()).collect())
                    .collect(),
                measure.stationary()?.iter().map(|w| w.ln()).collect(),
                true,
            ),
        };
        Ok(Self {
            log_weights,
            log_initial,
            markov,
            last: None,
            sum: CompensatedSum::new(),
        })
    }

    /// Log-weight contributed by appending `symbol`.
    pub fn term(&self, symbol: u8) -> f64 {
        match (self.last, self.markov) {
            (None, _) | (_, false) => self.log_initial[symbol as usize],
            (Some(prev), true) => self.log_weights[prev as usize][symbol as usize],
        }
    }

    pub fn push(&mut self, symbol: u8) -> f64 {
        let t = self.term(symbol);
        self.sum.add(t);
        self.last = Some(symbol);
        self.sum.value()
    }
}

/// log μ([x_0 … x_{n−1}]).
pub fn log_cylinder_measure(
    system: &SystemSpec,
    measure: &Measure,
    x: &Point,
    n: u64,
) -> Result<f64> {
    let w = shift_word(system, measure, x)?;
    let mut c = CylinderLog::new(measure)?;
    let mut v = 0.0;
    for i in 0..n as usize {
        v = c.push(w.symbol(i)?);
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrace {
    pub measure: Measure,
    pub stationary: Vec<f64>,
    pub point: Point,
    /// values[n − 1] = −(1/n) log μ(B_n(x, 1/2))
    pub values: Vec<f64>,
}

impl EntropyTrace {
    pub fn rows(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (i as u64 + 1, *v))
    }

    /// (min, max) of the values over n ∈ [from, n_max].
    pub fn tail_bounds(&self, from: u64) -> Result<(f64, f64)> {
        if from == 0 || from as usize > self.values.len() {
            return Err(LabError::InvalidArgument(format!(
                "tail start {from} outside [1, {}]",
                self.values.len()
            )));
        }
        Ok(self.values[from as usize - 1..]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            }))
    }
}

/// −(1/n) log μ(B_n(x, 1/2)) for every n ≤ n_max.
///
/// Occurrences are counted per distinct log-weight, and each value is
/// Σ_g (count_g / n)·ℓ_g, so a measure with a single weight class reproduces
/// −ℓ exactly at every n.
pub fn brin_katok_trace(
    system: &SystemSpec,
    measure: &Measure,
    x: &Point,
    n_max: u64,
) -> Result<EntropyTrace> {
    if n_max == 0 {
        return Err(LabError::InvalidArgument("n_max must be at least 1".into()));
    }
    let w = shift_word(system, measure, x)?;
    let k = measure.alphabet();
    let logs = CylinderLog::new(measure)?;
    // classes of equal log-weight among transitions (Bernoulli: among symbols)
    let mut class_values: Vec<f64> = Vec::new();
    let class_of = |v: f64, classes: &mut Vec<f64>| match classes.iter().position(|c| *c == v) {
        Some(i) => i,
        None => {
            classes.push(v);
            classes.len() - 1
        }
    };
    let mut transition_class = vec![vec![0usize; k]; k];
    let bern_class: Vec<usize> = match measure {
        Measure::Bernoulli { .. } => (0..k)
            .map(|s| class_of(logs.log_initial[s], &mut class_values))
            .collect(),
        Measure::Markov { .. } => {
            for (i, row) in transition_class.iter_mut().enumerate() {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = class_of(logs.log_weights[i][j], &mut class_values);
                }
            }
            Vec::new()
        }
    };
    let mut counts = vec![0u64; class_values.len()];
    let mut values = Vec::with_capacity(n_max as usize);
    let first = w.symbol(0)?;
    let initial = match measure {
        Measure::Bernoulli { .. } => {
            counts[bern_class[first as usize]] += 1;
            0.0
        }
        Measure::Markov { .. } => logs.log_initial[first as usize],
    };
    let mut prev = first;
    for n in 1..=n_max {
        if n > 1 {
            let s = w.symbol(n as usize - 1)?;
            let class = match measure {
                Measure::Bernoulli { .. } => bern_class[s as usize],
                Measure::Markov { .. } => transition_class[prev as usize][s as usize],
            };
            counts[class] += 1;
            prev = s;
        }
        let mut acc = CompensatedSum::new();
        acc.add(-initial / n as f64);
        for (c, l) in counts.iter().zip(&class_values) {
            if *c > 0 {
                acc.add(-(*c as f64 / n as f64) * l);
            }
        }
        values.push(acc.value());
    }
    Ok(EntropyTrace {
        measure: measure.clone(),
        stationary: measure.stationary()?,
        point: x.clone(),
        values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakGibbsRatio {
    pub n: u64,
    /// log μ(B_n(x, 1/2)) + nP − φ_n(x)
    pub log_ratio: f64,
    pub ratio: f64,
    /// (1/n) |log ratio|
    pub normalized: f64,
}

/// μ(B_n(x, 1/2)) / exp(−nP + φ_n(x)) in log space.
pub fn weak_gibbs_ratio(
    system: &SystemSpec,
    measure: &Measure,
    spec: &SubadditiveSpec,
    pressure: f64,
    x: &Point,
    n: u64,
) -> Result<WeakGibbsRatio> {
    Ok(*weak_gibbs_series(system, measure, spec, pressure, x, n)?
        .last()
        .expect("n ≥ 1"))
}

/// Ratios for every length 1..=n along one pass.
pub fn weak_gibbs_series(
    system: &SystemSpec,
    measure: &Measure,
    spec: &SubadditiveSpec,
    pressure: f64,
    x: &Point,
    n: u64,
) -> Result<Vec<WeakGibbsRatio>> {
    if n == 0 {
        return Err(LabError::InvalidArgument("n must be at least 1".into()));
    }
    if !pressure.is_finite() {
        return Err(LabError::InvalidArgument("pressure must be finite".into()));
    }
    let w = shift_word(system, measure, x)?;
    let mut cyl = CylinderLog::new(measure)?;
    let mut phi = SubadditiveWalk::new(spec, system, x)?;
    let mut out = Vec::with_capacity(n as usize);
    for k in 1..=n {
        let log_mu = cyl.push(w.symbol(k as usize - 1)?);
        let (_, phi_k) = phi.next_value()?;
        let mut acc = CompensatedSum::new();
        acc.add(log_mu);
        acc.add(k as f64 * pressure);
        acc.add(-phi_k);
        let log_ratio = acc.value();
        out.push(WeakGibbsRatio {
            n: k,
            log_ratio,
            ratio: log_ratio.exp(),
            normalized: log_ratio.abs() / k as f64,
        });
    }
    Ok(out)
}

/// Declared decay envelope e(n) for (1/n)|log K_n|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Envelope {
    Constant {
        bound: f64,
    },
    /// c · log(n + 1) / n
    LogOverN {
        c: f64,
    },
}

impl Envelope {
    pub fn at(&self, n: u64) -> f64 {
        match self {
            Envelope::Constant { bound } => *bound,
            Envelope::LogOverN { c } => c * ((n + 1) as f64).ln() / n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakGibbsReport {
    pub pressure: f64,
    pub horizon: u64,
    pub envelope: Envelope,
    pub points: usize,
    pub max_normalized: f64,
    /// (point index, n) attaining the maximum.
    pub worst: (usize, u64),
    pub violations: u64,
    pub weak_gibbs: bool,
}

/// Checks (1/n)|log ratio| ≤ e(n) over all sampled points and n ≤ horizon.
pub fn weak_gibbs_check(
    system: &SystemSpec,
    measure: &Measure,
    spec: &SubadditiveSpec,
    pressure: f64,
    points: &[Point],
    horizon: u64,
    envelope: Envelope,
) -> Result<WeakGibbsReport> {
    let mut max_normalized = 0.0;
    let mut worst = (0, 1);
    let mut violations = 0;
    for (i, x) in points.iter().enumerate() {
        for r in weak_gibbs_series(system, measure, spec, pressure, x, horizon)? {
            if r.normalized > max_normalized {
                max_normalized = r.normalized;
                worst = (i, r.n);
            }
            if r.normalized > envelope.at(r.n) {
                violations += 1;
            }
        }
    }
    Ok(WeakGibbsReport {
        pressure,
        horizon,
        envelope,
        points: points.len(),
        max_normalized,
        worst,
        violations,
        weak_gibbs: violations == 0,
    })
}
