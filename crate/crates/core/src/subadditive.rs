//! Sub-additive sequences φ_{m+n} ≤ φ_m ∘ f^n + φ_n, their truncated
//! Lyapunov function M_Φ = inf_n φ_n / n, and exponent gaps of cocycles.

use serde::{Deserialize, Serialize};

use crate::cocycle::{CocycleSpec, CocycleWalk};
use crate::entropy::{CylinderLog, Measure};
use crate::error::{LabError, Result};
use crate::observable::Observable;
use crate::point::Point;
use crate::sum::CompensatedSum;
use crate::system::{iterate, Orbit, SystemSpec};

/// Number of evenly spaced tail samples kept in a gap series.
pub const GAP_SERIES_TAIL_POINTS: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SubadditiveSpec {
    /// φ_n = log ‖A^n(x)‖
    CocycleLogNorm { cocycle: CocycleSpec },
    /// φ_n = Σ_{j<n} φ(f^j x)
    AdditiveFromObservable { observable: Observable },
    /// φ_n = −log μ(B_n(x, 1/2)) on a full shift
    NegLogBallMeasure { measure: Measure },
}

impl SubadditiveSpec {
    pub fn id(&self) -> String {
        match self {
            SubadditiveSpec::CocycleLogNorm { cocycle } => format!("log-norm({})", cocycle.id()),
            SubadditiveSpec::AdditiveFromObservable { observable } => {
                format!("additive({})", observable.id())
            }
            SubadditiveSpec::NegLogBallMeasure { measure } => {
                format!("neg-log-ball({})", measure.id())
            }
        }
    }
}

enum Walker<'a> {
    Cocycle(CocycleWalk<'a>),
    Additive {
        orbit: Orbit<'a>,
        observable: &'a Observable,
        sum: CompensatedSum,
    },
    Ball {
        orbit: Orbit<'a>,
        cylinder: CylinderLog,
    },
}

/// Streams φ_1(x), φ_2(x), … in one pass.
pub struct SubadditiveWalk<'a> {
    walker: Walker<'a>,
    n: u64,
}

impl<'a> SubadditiveWalk<'a> {
    pub fn new(spec: &'a SubadditiveSpec, system: &'a SystemSpec, x: &Point) -> Result<Self> {
        let walker = match spec {
            SubadditiveSpec::CocycleLogNorm { cocycle } => {
                Walker::Cocycle(CocycleWalk::new(cocycle, system, x)?)
            }
            SubadditiveSpec::AdditiveFromObservable { observable } => {
                observable.validate_for(system)?;
                Walker::Additive {
                    orbit: Orbit::new(system, x)?,
                    observable,
                    sum: CompensatedSum::new(),
                }
            }
            SubadditiveSpec::NegLogBallMeasure { measure } => {
                let Some(a) = system.alphabet() else {
                    return Err(LabError::InvalidArgument(
                        "ball measures need a full shift".into(),
                    ));
                };
                measure.validate(Some(a))?;
                Walker::Ball {
                    orbit: Orbit::new(system, x)?,
                    cylinder: CylinderLog::new(measure)?,
                }
            }
        };
        Ok(Self { walker, n: 0 })
    }

    pub fn next_value(&mut self) -> Result<(u64, f64)> {
        self.n += 1;
        let v = match &mut self.walker {
            Walker::Cocycle(w) => w.next_log_norm()?.1,
            Walker::Additive {
                orbit,
                observable,
                sum,
            } => {
                sum.add(observable.eval_state(orbit.state())?);
                orbit.advance()?;
                sum.value()
            }
            Walker::Ball { orbit, cylinder } => {
                let s = orbit
                    .state()
                    .symbol(0)
                    .ok_or_else(|| LabError::InvalidPoint("expected a symbolic point".into()))??;
                orbit.advance()?;
                -cylinder.push(s)
            }
        };
        Ok((self.n, v))
    }
}

/// φ_n(x).
pub fn subadditive_value(
    spec: &SubadditiveSpec,
    system: &SystemSpec,
    x: &Point,
    n: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(LabError::InvalidArgument("n must be at least 1".into()));
    }
    let mut w = SubadditiveWalk::new(spec, system, x)?;
    let mut v = 0.0;
    for _ in 0..n {
        v = w.next_value()?.1;
    }
    Ok(v)
}

/// The values φ_n(x) / n for n = 1..=n_max.
pub fn normalized_values(
    spec: &SubadditiveSpec,
    system: &SystemSpec,
    x: &Point,
    n_max: u64,
) -> Result<Vec<f64>> {
    let mut w = SubadditiveWalk::new(spec, system, x)?;
    (0..n_max)
        .map(|_| w.next_value().map(|(n, v)| v / n as f64))
        .collect()
}

/// min_{1 ≤ n ≤ N} φ_n(x) / n.
pub fn m_phi_estimate(
    spec: &SubadditiveSpec,
    system: &SystemSpec,
    x: &Point,
    n: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(LabError::InvalidArgument("N must be at least 1".into()));
    }
    Ok(normalized_values(spec, system, x, n)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovGap {
    pub cocycle: CocycleSpec,
    pub point: Point,
    pub horizon: u64,
    pub n_tail: u64,
    /// min of (1/n) log ‖A^n(x)‖ over n ∈ [n_tail, horizon]
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub lower_at: u64,
    pub upper_at: u64,
    /// (n, (1/n) log ‖A^n(x)‖) at dyadic n below the tail and evenly spaced
    /// n inside it.
    pub series: Vec<(u64, f64)>,
}

/// Tail extremes of the running top exponent in one renormalized pass.
pub fn lyapunov_gap(
    cocycle: &CocycleSpec,
    system: &SystemSpec,
    x: &Point,
    n_tail: u64,
    horizon: u64,
) -> Result<LyapunovGap> {
    if n_tail == 0 || horizon < n_tail {
        return Err(LabError::InvalidArgument(format!(
            "need H ≥ N_tail ≥ 1, got N_tail = {n_tail}, H = {horizon}"
        )));
    }
    let stride = ((horizon - n_tail) / GAP_SERIES_TAIL_POINTS).max(1);
    let mut walk = CocycleWalk::new(cocycle, system, x)?;
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lower_at, mut upper_at) = (0, 0);
    let mut series = Vec::new();
    for _ in 0..horizon {
        let (n, log_norm) = walk.next_log_norm()?;
        let v = log_norm / n as f64;
        if n < n_tail {
            if n.is_power_of_two() {
                series.push((n, v));
            }
            continue;
        }
        if (n - n_tail).is_multiple_of(stride) || n == horizon {
            series.push((n, v));
        }
        if v < lower {
            lower = v;
            lower_at = n;
        }
        if v > upper {
            upper = v;
            upper_at = n;
        }
    }
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(LabError::InvalidArgument(
            "non-finite exponent estimate".into(),
        ));
    }
    Ok(LyapunovGap {
        cocycle: cocycle.clone(),
        point: x.clone(),
        horizon,
        n_tail,
        lower,
        upper,
        gap: upper - lower,
        lower_at,
        upper_at,
        series,
    })
}

/// Gap of the running bottom exponent, read off the inverse-transpose
/// cocycle: λ⁻ estimates are −(1/n) log ‖((A^n)^{−1})ᵀ‖.
pub fn smallest_exponent_gap(
    cocycle: &CocycleSpec,
    system: &SystemSpec,
    x: &Point,
    n_tail: u64,
    horizon: u64,
) -> Result<LyapunovGap> {
    let dual = cocycle.clone().inverse_transpose();
    let g = lyapunov_gap(&dual, system, x, n_tail, horizon)?;
    Ok(LyapunovGap {
        cocycle: cocycle.clone(),
        lower: -g.upper,
        upper: -g.lower,
        lower_at: g.upper_at,
        upper_at: g.lower_at,
        series: g.series.into_iter().map(|(n, v)| (n, -v)).collect(),
        ..g
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegral {
    /// m(x, N) − m(f(x), N − 1)
    pub deviation: f64,
    /// (sup log‖A‖ + |log min conorm|) / N
    pub envelope: f64,
    pub holds: bool,
}

/// Compares the truncated M_Φ at x and at f(x) for φ_n = log ‖A^n‖.
pub fn first_integral_deviation(
    cocycle: &CocycleSpec,
    system: &SystemSpec,
    x: &Point,
    n: u64,
) -> Result<FirstIntegral> {
    if n < 2 {
        return Err(LabError::InvalidArgument("N must be at least 2".into()));
    }
    let spec = SubadditiveSpec::CocycleLogNorm {
        cocycle: cocycle.clone(),
    };
    let fx = iterate(system, x, 1)?;
    let deviation =
        m_phi_estimate(&spec, system, x, n)? - m_phi_estimate(&spec, system, &fx, n - 1)?;
    let envelope = cocycle.bounds(system)?.slack_constant() / n as f64;
    Ok(FirstIntegral {
        deviation,
        envelope,
        holds: deviation <= envelope,
    })
}
