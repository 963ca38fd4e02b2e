//! Bounded continuous observables φ: X → ℝ.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::point::Point;
use crate::system::{Orbit, State, SystemKind, SystemSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Observable {
    /// x ↦ x_0 on shift spaces.
    Coordinate0,
    /// x ↦ x_k on shift spaces (x_0 ∘ σ^k).
    ShiftedCoordinate {
        k: usize,
    },
    /// x ↦ cos 2πx on the first circle coordinate.
    CosCircle,
    /// (x, y) ↦ y on Viana and skew-product systems.
    FiberHeight,
    Constant {
        value: f64,
    },
    /// Periodic piecewise-linear interpolation of `(x, value)` knots on [0,1).
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
    /// x ↦ values[x_0] on shift spaces.
    SymbolTable {
        values: Vec<f64>,
    },
}

impl Observable {
    pub fn id(&self) -> String {
        match self {
            Observable::Coordinate0 => "coordinate0".into(),
            Observable::ShiftedCoordinate { k } => format!("coordinate{k}"),
            Observable::CosCircle => "cos-circle".into(),
            Observable::FiberHeight => "fiber-height".into(),
            Observable::Constant { value } => format!("constant({value})"),
            Observable::PiecewiseLinear { knots } => {
                format!("piecewise-linear({} knots)", knots.len())
            }
            Observable::SymbolTable { values } => format!("symbol-table{values:?}"),
        }
    }

    /// Checks that the observable is defined and bounded on the system.
    pub fn validate_for(&self, system: &SystemSpec) -> Result<()> {
        let symbolic = matches!(system.kind(), SystemKind::FullShift { .. });
        let fibered = matches!(
            system.kind(),
            SystemKind::Viana { .. } | SystemKind::SkewProduct { .. }
        );
        let fail = |m: &str| {
            Err(LabError::InvalidArgument(format!(
                "{} on {}: {m}",
                self.id(),
                system.id()
            )))
        };
        match self {
            Observable::Coordinate0 | Observable::ShiftedCoordinate { .. } if !symbolic => {
                fail("needs a shift space")
            }
            Observable::SymbolTable { values } => {
                if !symbolic {
                    return fail("needs a shift space");
                }
                let a = system.alphabet().unwrap_or(0) as usize;
                if values.len() < a {
                    return fail("table shorter than the alphabet");
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return fail("table values must be finite");
                }
                Ok(())
            }
            Observable::CosCircle | Observable::PiecewiseLinear { .. } if symbolic => {
                fail("needs a circle coordinate")
            }
            Observable::FiberHeight if !fibered => fail("needs a fibered system"),
            Observable::Constant { value } if !value.is_finite() => fail("value must be finite"),
            Observable::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return fail("no knots");
                }
                if knots
                    .iter()
                    .any(|(x, v)| !(0.0..1.0).contains(x) || !v.is_finite())
                {
                    return fail("knots must lie in [0,1) with finite values");
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return fail("knot abscissae must increase");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Supremum of |φ| over the state space.
    pub fn bound(&self, system: &SystemSpec) -> f64 {
        match self {
            Observable::Coordinate0 | Observable::ShiftedCoordinate { .. } => {
                system.alphabet().map_or(1.0, |a| (a - 1) as f64)
            }
            Observable::CosCircle => 1.0,
            Observable::FiberHeight => match system.kind() {
                SystemKind::Viana { y_min, y_max, .. } => y_min.abs().max(y_max.abs()),
                _ => 1.0,
            },
            Observable::Constant { value } => value.abs(),
            Observable::PiecewiseLinear { knots } => {
                knots.iter().map(|k| k.1.abs()).fold(0.0, f64::max)
            }
            Observable::SymbolTable { values } => {
                let a = system.alphabet().map_or(values.len(), |a| a as usize);
                values[..a].iter().map(|v| v.abs()).fold(0.0, f64::max)
            }
        }
    }

    /// φ at the orbit's current state. Assumes `validate_for` passed.
    #[inline]
    pub fn eval_state(&self, state: &State) -> Result<f64> {
        let mismatch =
            || LabError::InvalidArgument(format!("{} undefined at {state:?}", self.id()));
        match self {
            Observable::Constant { value } => Ok(*value),
            Observable::Coordinate0 => Ok(state.symbol(0).ok_or_else(mismatch)?? as f64),
            Observable::ShiftedCoordinate { k } => {
                Ok(state.symbol(*k).ok_or_else(mismatch)?? as f64)
            }
            Observable::SymbolTable { values } => {
                Ok(values[state.symbol(0).ok_or_else(mismatch)?? as usize])
            }
            Observable::CosCircle => match state {
                State::Rational { num, den } => Ok(cos_two_pi_rational(*num, *den)),
                _ => Ok((TAU * state.circle_coordinate().ok_or_else(mismatch)?).cos()),
            },
            Observable::FiberHeight => state.fiber().ok_or_else(mismatch),
            Observable::PiecewiseLinear { knots } => Ok(piecewise_linear(
                knots,
                state.circle_coordinate().ok_or_else(mismatch)?,
            )),
        }
    }

    pub fn evaluate(&self, system: &SystemSpec, x: &Point) -> Result<f64> {
        self.validate_for(system)?;
        self.eval_state(Orbit::new(system, x)?.state())
    }
}

/// cos(2π·p/q), exact where the value is rational (q ∈ {1, 2, 3, 4, 6}).
pub fn cos_two_pi_rational(p: u64, q: u64) -> f64 {
    let p = p % q;
    match q {
        1 => 1.0,
        2 => [1.0, -1.0][p as usize],
        3 => [1.0, -0.5, -0.5][p as usize],
        4 => [1.0, 0.0, -1.0, 0.0][p as usize],
        6 => [1.0, 0.5, -0.5, -1.0, -0.5, 0.5][p as usize],
        _ => (TAU * (p as f64 / q as f64)).cos(),
    }
}

fn piecewise_linear(knots: &[(f64, f64)], x: f64) -> f64 {
    if knots.len() == 1 {
        return knots[0].1;
    }
    let idx = knots.partition_point(|k| k.0 <= x);
    let (left, right) = if idx == 0 {
        let last = knots[knots.len() - 1];
        ((last.0 - 1.0, last.1), knots[0])
    } else if idx == knots.len() {
        let first = knots[0];
        (knots[idx - 1], (first.0 + 1.0, first.1))
    } else {
        (knots[idx - 1], knots[idx])
    };
    let t = (x - left.0) / (right.0 - left.0);
    left.1 + t * (right.1 - left.1)
}
