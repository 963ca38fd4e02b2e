//! Finite-horizon probes of the category structure of irregular sets.
//!
//! Λ_N(ε) is the closed set of points whose averages beyond time N oscillate
//! by at most ε. Membership can only be refuted at a finite horizon: a
//! `false` answer is certain, a `true` answer holds "up to horizon H". An
//! escaper is a sampled point of a cover cell that fails membership; escaper
//! fraction 1.0 over refining covers is the empirical shadow of Λ_N having
//! empty interior.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::birkhoff::{tail_bounds, trace, AverageTrace, CheckpointPolicy, RunningAverages};
use crate::error::{LabError, Result};
use crate::observable::Observable;
use crate::point::Point;
use crate::sampler::{cell_rng, DenseSampler};
use crate::subadditive::{m_phi_estimate, SubadditiveSpec};
use crate::sum::CompensatedSum;
use crate::system::{random_word, SystemKind, SystemSpec};
use crate::word::{PeriodicWord, Word};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaQuery {
    pub n: u64,
    pub epsilon: f64,
    pub horizon: u64,
}

impl LambdaQuery {
    pub fn new(n: u64, epsilon: f64, horizon: u64) -> Result<Self> {
        let q = Self {
            n,
            epsilon,
            horizon,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(LabError::InvalidArgument(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        if self.n == 0 || self.horizon < self.n {
            return Err(LabError::InvalidArgument(format!(
                "need H ≥ N ≥ 1, got N = {}, H = {}",
                self.n, self.horizon
            )));
        }
        Ok(())
    }
}

/// Membership in Λ_N up to horizon H: |ψ_n − ψ_m| ≤ ε for all N ≤ m, n ≤ H.
pub fn lambda_membership(trace: &AverageTrace, q: &LambdaQuery) -> Result<bool> {
    q.validate()?;
    if trace.horizon < q.horizon {
        return Err(LabError::HorizonTooShort(format!(
            "trace horizon {} < query horizon {}",
            trace.horizon, q.horizon
        )));
    }
    let tail = trace.tail(q.n, q.horizon)?;
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    Ok(hi - lo <= q.epsilon)
}

/// Pair of tail indices whose averages differ by more than ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeWitness {
    pub low_at: u64,
    pub low: f64,
    pub high_at: u64,
    pub high: f64,
}

impl EscapeWitness {
    pub fn oscillation(&self) -> f64 {
        self.high - self.low
    }
}

/// Streams ψ_n and stops at the first n where the tail oscillation exceeds ε.
pub fn find_escape(
    system: &SystemSpec,
    observable: &Observable,
    x: &Point,
    q: &LambdaQuery,
) -> Result<Option<EscapeWitness>> {
    let mut run = RunningAverages::new(system, observable, x)?;
    let mut w = EscapeWitness {
        low_at: 0,
        low: f64::INFINITY,
        high_at: 0,
        high: f64::NEG_INFINITY,
    };
    for _ in 0..q.horizon {
        let (n, psi) = run.next_average()?;
        if n < q.n {
            continue;
        }
        if psi < w.low {
            w.low = psi;
            w.low_at = n;
        }
        if psi > w.high {
            w.high = psi;
            w.high_at = n;
        }
        if w.high - w.low > q.epsilon {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Finite cover of the state space by metric balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Cover {
    /// `count` equal arcs of the circle.
    CircleIntervals { count: u64 },
    /// All cylinders of the given length (balls of radius A^{−(length−1)}).
    Cylinders { length: u32 },
    /// per_axis × per_axis boxes of the torus or of S¹ × (Viana core).
    Grid { per_axis: u64 },
}

impl Cover {
    /// 2^level dyadic arcs.
    pub fn dyadic(level: u32) -> Self {
        Cover::CircleIntervals {
            count: 1u64 << level,
        }
    }

    pub fn cell_count(&self, system: &SystemSpec) -> Result<u64> {
        let n = match (self, system.kind()) {
            (
                Cover::CircleIntervals { count },
                SystemKind::Doubling { .. } | SystemKind::Rotation { .. },
            ) => Some(*count),
            (Cover::Cylinders { length }, SystemKind::FullShift { alphabet }) => {
                (*alphabet as u64).checked_pow(*length)
            }
            (
                Cover::Grid { per_axis },
                SystemKind::SkewProduct { .. } | SystemKind::Viana { .. },
            ) => per_axis.checked_mul(*per_axis),
            _ => {
                return Err(LabError::InvalidArgument(format!(
                    "cover {self:?} does not apply to {}",
                    system.id()
                )))
            }
        };
        match n {
            Some(0) => Err(LabError::InvalidArgument("empty cover".into())),
            Some(n) => Ok(n),
            None => Err(LabError::InvalidArgument("cover too large".into())),
        }
    }

    /// Side length of a cell (cylinder mass A^{−length} for shift covers).
    pub fn resolution(&self, system: &SystemSpec) -> f64 {
        match self {
            Cover::CircleIntervals { count } => 1.0 / *count as f64,
            Cover::Cylinders { length } => {
                (system.alphabet().unwrap_or(2) as f64).powi(-(*length as i32))
            }
            Cover::Grid { per_axis } => 1.0 / *per_axis as f64,
        }
    }

    fn cell(&self, system: &SystemSpec, index: u64) -> Result<(Point, f64)> {
        match (self, system.kind()) {
            (Cover::CircleIntervals { count }, _) => {
                let w = 1.0 / *count as f64;
                Ok((Point::circle((index as f64 + 0.5) * w)?, 0.5 * w))
            }
            (Cover::Cylinders { length }, SystemKind::FullShift { alphabet }) => {
                let prefix = cylinder_digits(index, *alphabet, *length);
                let center = Point::Symbolic(Word::Periodic(PeriodicWord::new(prefix, vec![0])?));
                Ok((center, (*alphabet as f64).powi(1 - *length as i32)))
            }
            (Cover::Grid { per_axis }, kind) => {
                let w = 1.0 / *per_axis as f64;
                let (i, j) = ((index / per_axis) as f64, (index % per_axis) as f64);
                match kind {
                    SystemKind::Viana { .. } => {
                        let (lo, hi) = system.viana_core().expect("viana");
                        let h = (hi - lo) * w;
                        Ok((
                            Point::cylinder((i + 0.5) * w, lo + (j + 0.5) * h)?,
                            0.5 * w.max(h),
                        ))
                    }
                    _ => Ok((Point::torus((i + 0.5) * w, (j + 0.5) * w)?, 0.5 * w)),
                }
            }
            _ => Err(LabError::InvalidArgument("cover/system mismatch".into())),
        }
    }

    fn sample_in_cell<R: rand::Rng>(
        &self,
        system: &SystemSpec,
        index: u64,
        rng: &mut R,
    ) -> Result<Point> {
        match (self, system.kind()) {
            (Cover::CircleIntervals { count }, _) => {
                let x = (index as f64 + rng.random::<f64>()) / *count as f64;
                Point::circle(x.min(1.0 - f64::EPSILON))
            }
            (Cover::Cylinders { length }, SystemKind::FullShift { alphabet }) => {
                let prefix = cylinder_digits(index, *alphabet, *length);
                Ok(Point::Symbolic(Word::Periodic(random_word(
                    *alphabet, prefix, rng,
                )?)))
            }
            (Cover::Grid { per_axis }, kind) => {
                let w = 1.0 / *per_axis as f64;
                let (i, j) = ((index / per_axis) as f64, (index % per_axis) as f64);
                let x = ((i + rng.random::<f64>()) * w).min(1.0 - f64::EPSILON);
                let v = (j + rng.random::<f64>()) * w;
                match kind {
                    SystemKind::Viana { .. } => {
                        let (lo, hi) = system.viana_core().expect("viana");
                        Point::cylinder(x, lo + (hi - lo) * v)
                    }
                    _ => Point::torus(x, v.min(1.0 - f64::EPSILON)),
                }
            }
            _ => Err(LabError::InvalidArgument("cover/system mismatch".into())),
        }
    }
}

fn cylinder_digits(mut index: u64, alphabet: u8, length: u32) -> Vec<u8> {
    let mut out = vec![0u8; length as usize];
    for slot in out.iter_mut().rev() {
        *slot = (index % alphabet as u64) as u8;
        index /= alphabet as u64;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CellVerdict {
    Escaper { sample: u32 },
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub index: u64,
    pub center: Point,
    pub radius: f64,
    pub verdict: CellVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Escaper {
    pub cell: u64,
    pub sample: u32,
    pub point: Point,
    pub witness: EscapeWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub system: SystemSpec,
    pub observable: Observable,
    pub cover: Cover,
    pub query: LambdaQuery,
    pub budget: u32,
    pub seed: u64,
    pub resolution: f64,
    pub cells: Vec<CellReport>,
    pub escapers: Vec<Escaper>,
    pub fraction: f64,
}

/// Searches every cover cell for a point outside Λ_N.
///
/// Each cell draws up to `budget` points from its own counter-based stream
/// keyed by (seed, cell index), so the report does not depend on the order in
/// which cells are processed.
pub fn escaper_probe(
    system: &SystemSpec,
    observable: &Observable,
    cover: &Cover,
    q: &LambdaQuery,
    budget: u32,
    seed: u64,
) -> Result<LambdaReport> {
    q.validate()?;
    observable.validate_for(system)?;
    if budget == 0 {
        return Err(LabError::InvalidArgument(
            "per-cell budget must be at least 1".into(),
        ));
    }
    let cells = cover.cell_count(system)?;
    let results: Vec<(CellReport, Option<Escaper>)> = (0..cells)
        .into_par_iter()
        .map(|index| {
            let (center, radius) = cover.cell(system, index)?;
            let mut rng = cell_rng(seed, index);
            for sample in 0..budget {
                let x = cover.sample_in_cell(system, index, &mut rng)?;
                if let Some(witness) = find_escape(system, observable, &x, q)? {
                    let report = CellReport {
                        index,
                        center,
                        radius,
                        verdict: CellVerdict::Escaper { sample },
                    };
                    return Ok((
                        report,
                        Some(Escaper {
                            cell: index,
                            sample,
                            point: x,
                            witness,
                        }),
                    ));
                }
            }
            Ok((
                CellReport {
                    index,
                    center,
                    radius,
                    verdict: CellVerdict::Exhausted,
                },
                None,
            ))
        })
        .collect::<Result<_>>()?;
    let (cells_out, escapers): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let escapers: Vec<Escaper> = escapers.into_iter().flatten().collect();
    let fraction = escapers.len() as f64 / cells_out.len() as f64;
    Ok(LambdaReport {
        system: system.clone(),
        observable: observable.clone(),
        cover: cover.clone(),
        query: *q,
        budget,
        seed,
        resolution: cover.resolution(system),
        cells: cells_out,
        escapers,
        fraction,
    })
}

/// Re-traces an escaper from scratch and checks that it is outside Λ_N.
pub fn replay_escaper(report: &LambdaReport, escaper: &Escaper) -> Result<bool> {
    let q = &report.query;
    let t = trace(
        &report.system,
        &report.observable,
        &escaper.point,
        q.horizon,
        &CheckpointPolicy::DenseTail { start: Some(q.n) },
    )?;
    Ok(!lambda_membership(&t, q)?)
}

/// x ∈ E_N(target) up to horizon H: some n ∈ (N, H] has |ψ_n − target| < 1/N.
pub fn e_set_membership(trace: &AverageTrace, target: f64, n: u64) -> Result<bool> {
    if n == 0 || n >= trace.horizon {
        return Err(LabError::InvalidArgument(format!(
            "need 1 ≤ N < H, got N = {n}, H = {}",
            trace.horizon
        )));
    }
    let tol = 1.0 / n as f64;
    Ok(trace
        .tail(n + 1, trace.horizon)?
        .iter()
        .any(|&psi| (psi - target).abs() < tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HypothesesSupported,
    Inconclusive,
    RefutedAtHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub class: char,
    pub point: Point,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub dispersion_a: f64,
    pub dispersion_b: f64,
    /// |alpha_hat − beta_hat| / 6
    pub epsilon: f64,
    pub verdict: Verdict,
    /// ε to hand to escaper probes, present only when the hypotheses hold.
    pub implied_epsilon: Option<f64>,
    pub horizon: u64,
    pub tail_start: u64,
    pub samples: Vec<SampleRow>,
}

impl CriterionVerdict {
    fn assemble(a: Vec<(Point, f64)>, b: Vec<(Point, f64)>, horizon: u64, tail_start: u64) -> Self {
        let stats = |vals: &[(Point, f64)]| {
            // centered at the first value so identical samples average exactly
            let first = vals[0].1;
            let offsets: CompensatedSum = vals.iter().map(|v| v.1 - first).collect();
            let mean = first + offsets.value() / vals.len() as f64;
            let disp = vals.iter().map(|v| (v.1 - mean).abs()).fold(0.0, f64::max);
            (mean, disp)
        };
        let (alpha_hat, dispersion_a) = stats(&a);
        let (beta_hat, dispersion_b) = stats(&b);
        let gap = (alpha_hat - beta_hat).abs();
        let epsilon = gap / 6.0;
        let verdict = if gap == 0.0 {
            Verdict::RefutedAtHorizon
        } else if dispersion_a < epsilon && dispersion_b < epsilon {
            Verdict::HypothesesSupported
        } else {
            Verdict::Inconclusive
        };
        let samples = a
            .into_iter()
            .map(|(point, value)| SampleRow {
                class: 'A',
                point,
                value,
            })
            .chain(b.into_iter().map(|(point, value)| SampleRow {
                class: 'B',
                point,
                value,
            }))
            .collect();
        Self {
            alpha_hat,
            beta_hat,
            dispersion_a,
            dispersion_b,
            epsilon,
            verdict,
            implied_epsilon: (verdict == Verdict::HypothesesSupported).then_some(epsilon),
            horizon,
            tail_start,
            samples,
        }
    }
}

fn criterion_samples(
    a: &DenseSampler,
    b: &DenseSampler,
    count: u64,
) -> Result<(Vec<Point>, Vec<Point>)> {
    if count < 2 {
        return Err(LabError::InvalidArgument(
            "criterion samples need count ≥ 2".into(),
        ));
    }
    if a.system != b.system {
        return Err(LabError::SamplerMismatch(
            "samplers refer to different systems".into(),
        ));
    }
    Ok((a.sample(count)?, b.sample(count)?))
}

/// Checks the two-dense-sets hypothesis for the limsup of Birkhoff averages:
/// the tail maximum of ψ_n over [N_tail, H] should be (nearly) constant on
/// each sample with distinct values across samples.
pub fn criterion_check(
    system: &SystemSpec,
    observable: &Observable,
    sampler_a: &DenseSampler,
    sampler_b: &DenseSampler,
    count: u64,
    horizon: u64,
    tail_start: Option<u64>,
) -> Result<CriterionVerdict> {
    if &sampler_a.system != system {
        return Err(LabError::SamplerMismatch(
            "sampler system differs from the checked system".into(),
        ));
    }
    let (pa, pb) = criterion_samples(sampler_a, sampler_b, count)?;
    let start = tail_start.unwrap_or((horizon / 2).max(1));
    let policy = CheckpointPolicy::DenseTail { start: Some(start) };
    let upper = |points: Vec<Point>| -> Result<Vec<(Point, f64)>> {
        points
            .into_par_iter()
            .map(|x| {
                let t = trace(system, observable, &x, horizon, &policy)?;
                let u = tail_bounds(&t, start)?.upper;
                Ok((x, u))
            })
            .collect()
    };
    Ok(CriterionVerdict::assemble(
        upper(pa)?,
        upper(pb)?,
        horizon,
        start,
    ))
}

/// Sub-additive analogue: compares the truncated infimum
/// min_{n ≤ H} φ_n / n across the two samples.
pub fn criterion_check_subadditive(
    system: &SystemSpec,
    spec: &SubadditiveSpec,
    sampler_a: &DenseSampler,
    sampler_b: &DenseSampler,
    count: u64,
    horizon: u64,
) -> Result<CriterionVerdict> {
    if &sampler_a.system != system {
        return Err(LabError::SamplerMismatch(
            "sampler system differs from the checked system".into(),
        ));
    }
    let (pa, pb) = criterion_samples(sampler_a, sampler_b, count)?;
    let infimum = |points: Vec<Point>| -> Result<Vec<(Point, f64)>> {
        points
            .into_par_iter()
            .map(|x| {
                let m = m_phi_estimate(spec, system, &x, horizon)?;
                Ok((x, m))
            })
            .collect()
    };
    Ok(CriterionVerdict::assemble(
        infimum(pa)?,
        infimum(pb)?,
        horizon,
        1,
    ))
}
