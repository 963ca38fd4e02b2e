//! Birkhoff averages ψ_n(x) = (1/n) Σ_{j<n} φ(f^j x) and their finite-horizon
//! tail statistics.
//!
//! Limits are never claimed: tail minima and maxima are reported together
//! with the horizon at which they were observed.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::observable::Observable;
use crate::point::Point;
use crate::sum::CompensatedSum;
use crate::system::{Orbit, SystemKind, SystemSpec};

/// Steps between exact re-evaluations of cos 2πx in the rotation kernel.
const ROTATION_ANCHOR: u64 = 256;

/// How φ(f^j x) is produced along the orbit.
enum Kernel {
    Generic,
    /// cos 2πx_j on a rotation by angle addition, re-anchored from the exact
    /// coordinate every `ROTATION_ANCHOR` steps (drift stays below 1e-13).
    RotationCos {
        cos: f64,
        sin: f64,
        step_cos: f64,
        step_sin: f64,
    },
}

/// Streams (n, ψ_n) for n = 1, 2, … along one orbit.
///
/// Every consumer of running averages goes through this type, so traces,
/// streaming Λ_N checks and replays share one arithmetic path.
pub struct RunningAverages<'a> {
    orbit: Orbit<'a>,
    observable: &'a Observable,
    kernel: Kernel,
    sum: CompensatedSum,
    /// Set while every term so far equals the first one.
    uniform: Option<f64>,
    n: u64,
}

impl<'a> RunningAverages<'a> {
    pub fn new(system: &'a SystemSpec, observable: &'a Observable, x: &Point) -> Result<Self> {
        observable.validate_for(system)?;
        let kernel = match (system.kind(), observable) {
            (SystemKind::Rotation { theta }, Observable::CosCircle) => {
                let (step_sin, step_cos) = (TAU * theta).sin_cos();
                Kernel::RotationCos {
                    cos: 1.0,
                    sin: 0.0,
                    step_cos,
                    step_sin,
                }
            }
            _ => Kernel::Generic,
        };
        Ok(Self {
            orbit: Orbit::new(system, x)?,
            observable,
            kernel,
            sum: CompensatedSum::new(),
            uniform: None,
            n: 0,
        })
    }

    /// Advances to ψ_{n+1} and returns (n+1, ψ_{n+1}).
    #[inline]
    pub fn next_average(&mut self) -> Result<(u64, f64)> {
        if self.n > 0 {
            self.orbit.advance()?;
        }
        let v = match &mut self.kernel {
            Kernel::Generic => self.observable.eval_state(self.orbit.state())?,
            Kernel::RotationCos {
                cos,
                sin,
                step_cos,
                step_sin,
            } => {
                if self.n.is_multiple_of(ROTATION_ANCHOR) {
                    let x = self
                        .orbit
                        .state()
                        .circle_coordinate()
                        .expect("rotation state");
                    (*sin, *cos) = (TAU * x).sin_cos();
                } else {
                    (*cos, *sin) = (
                        *cos * *step_cos - *sin * *step_sin,
                        *sin * *step_cos + *cos * *step_sin,
                    );
                }
                *cos
            }
        };
        self.sum.add(v);
        self.n += 1;
        // S_n / n need not round back to c when all n terms equal c
        self.uniform = match self.uniform {
            None if self.n == 1 => Some(v),
            Some(c) if c == v => Some(c),
            _ => None,
        };
        Ok((
            self.n,
            self.uniform.unwrap_or(self.sum.value() / self.n as f64),
        ))
    }

    /// Birkhoff sum S_n at the current n.
    pub fn sum(&self) -> f64 {
        self.sum.value()
    }
}

/// ψ_n(x), with compensated summation.
pub fn birkhoff_average(
    system: &SystemSpec,
    observable: &Observable,
    x: &Point,
    n: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(LabError::InvalidArgument("n must be at least 1".into()));
    }
    let mut run = RunningAverages::new(system, observable, x)?;
    let mut last = 0.0;
    for _ in 0..n {
        last = run.next_average()?.1;
    }
    Ok(last)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum CheckpointPolicy {
    /// Every n in [start, H]; powers of two below. `start` defaults to H/2.
    DenseTail {
        start: Option<u64>,
    },
    /// Powers of two, plus H.
    Dyadic,
    Explicit {
        checkpoints: Vec<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageTrace {
    pub system: String,
    pub observable: String,
    pub base_point: Point,
    pub horizon: u64,
    /// First index of the dense tail, when every n in [start, H] is recorded.
    pub dense_tail_start: Option<u64>,
    /// sup |φ|, used for accumulation tolerances.
    pub bound: f64,
    pub checkpoints: Vec<u64>,
    pub values: Vec<f64>,
}

impl AverageTrace {
    pub fn is_dense_tail(&self) -> bool {
        self.dense_tail_start.is_some()
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("traces are nonempty")
    }

    /// Values at n ∈ [from, to], which must lie in the dense tail.
    pub fn tail(&self, from: u64, to: u64) -> Result<&[f64]> {
        match self.dense_tail_start {
            Some(start) if start <= from && from <= to && to <= self.horizon => {
                let offset = self.checkpoints.len() - (self.horizon - start + 1) as usize;
                let lo = offset + (from - start) as usize;
                let hi = offset + (to - start) as usize;
                Ok(&self.values[lo..=hi])
            }
            _ => Err(LabError::NotDenseTail {
                needed_from: from,
                needed_to: to,
            }),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.checkpoints
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }
}

fn checkpoint_list(policy: &CheckpointPolicy, horizon: u64) -> Result<(Vec<u64>, Option<u64>)> {
    let dyadic_below = |limit: u64| {
        std::iter::successors(Some(1u64), |n| n.checked_mul(2)).take_while(move |&n| n < limit)
    };
    match policy {
        CheckpointPolicy::DenseTail { start } => {
            let start = start.unwrap_or((horizon / 2).max(1));
            if start == 0 || start > horizon {
                return Err(LabError::InvalidArgument(format!(
                    "dense tail start {start} outside [1, {horizon}]"
                )));
            }
            let mut v: Vec<u64> = dyadic_below(start).collect();
            v.extend(start..=horizon);
            Ok((v, Some(start)))
        }
        CheckpointPolicy::Dyadic => {
            let mut v: Vec<u64> = dyadic_below(horizon).collect();
            v.push(horizon);
            Ok((v, None))
        }
        CheckpointPolicy::Explicit { checkpoints } => {
            if checkpoints.is_empty()
                || checkpoints.windows(2).any(|w| w[1] <= w[0])
                || checkpoints[0] == 0
                || *checkpoints.last().expect("nonempty") > horizon
            {
                return Err(LabError::InvalidArgument(
                    "explicit checkpoints must be strictly increasing within [1, H]".into(),
                ));
            }
            let mut v = checkpoints.clone();
            if *v.last().expect("nonempty") != horizon {
                v.push(horizon);
            }
            Ok((v, None))
        }
    }
}

/// Single orbit pass recording ψ_n at the policy's checkpoints.
pub fn trace(
    system: &SystemSpec,
    observable: &Observable,
    x: &Point,
    horizon: u64,
    policy: &CheckpointPolicy,
) -> Result<AverageTrace> {
    if horizon == 0 {
        return Err(LabError::InvalidArgument(
            "horizon must be at least 1".into(),
        ));
    }
    let (checkpoints, dense_tail_start) = checkpoint_list(policy, horizon)?;
    let mut run = RunningAverages::new(system, observable, x)?;
    let mut values = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for _ in 0..horizon {
        let (n, psi) = run.next_average()?;
        if next.peek() == Some(&&n) {
            values.push(psi);
            next.next();
        }
    }
    Ok(AverageTrace {
        system: system.id(),
        observable: observable.id(),
        base_point: x.clone(),
        horizon,
        dense_tail_start,
        bound: observable.bound(system),
        checkpoints,
        values,
    })
}

/// Min and max of ψ_n over the dense tail n ∈ [N, H].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    pub start: u64,
    pub horizon: u64,
    pub lower: f64,
    pub upper: f64,
    pub lower_at: u64,
    pub upper_at: u64,
}

impl TailBounds {
    pub fn oscillation(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn tail_bounds(trace: &AverageTrace, n: u64) -> Result<TailBounds> {
    let values = trace.tail(n, trace.horizon)?;
    let (mut lo, mut hi) = (0usize, 0usize);
    for (i, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = i;
        }
        if *v > values[hi] {
            hi = i;
        }
    }
    Ok(TailBounds {
        start: n,
        horizon: trace.horizon,
        lower: values[lo],
        upper: values[hi],
        lower_at: n + lo as u64,
        upper_at: n + hi as u64,
    })
}

/// max_{N ≤ m,n ≤ H} |ψ_n − ψ_m|.
pub fn oscillation(trace: &AverageTrace, n: u64) -> Result<f64> {
    tail_bounds(trace, n).map(|b| b.oscillation())
}

/// ψ_n(x) for each observable of a finite test family.
pub fn empirical_signature(
    system: &SystemSpec,
    x: &Point,
    n: u64,
    family: &[Observable],
) -> Result<Vec<f64>> {
    if family.is_empty() {
        return Err(LabError::InvalidArgument(
            "observable family is empty".into(),
        ));
    }
    family
        .iter()
        .map(|phi| birkhoff_average(system, phi, x, n))
        .collect()
}

/// Sup-distance between two signatures.
pub fn signature_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}
