//! Linear cocycles A: X → GL(k, ℝ) and overflow-safe products along orbits.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::point::Point;
use crate::sum::CompensatedSum;
use crate::system::{Orbit, State, SystemSpec};

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 1000;

/// Default renormalization window [2^−512, 2^512] for running products.
pub const RENORM_LOW: f64 = 7.458340731200207e-155;
pub const RENORM_HIGH: f64 = 1.3407807929942597e154;

pub const CERTIFICATE_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CocycleSpec {
    /// The same diagonal matrix at every point.
    ConstantDiag { values: Vec<f64> },
    /// diag(diagonals[x_0]) on shift spaces.
    SymbolDiag { diagonals: Vec<Vec<f64>> },
    /// Planar rotation by 2π(winding·x + phase) on the circle coordinate.
    RotationMatrix { winding: i32, phase: f64 },
    /// [[E − 2v cos 2πx, −1], [1, 0]] on the circle coordinate.
    QuasiPeriodicSchrodinger { energy: f64, coupling: f64 },
    /// z ↦ (A(z)^{−1})^T; its top exponent is minus the bottom exponent of A.
    InverseTranspose { of: Box<CocycleSpec> },
}

/// Exact catalog constants for a cocycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleBounds {
    /// sup_z log ‖A(z)‖
    pub sup_log_norm: f64,
    /// sup_z log ‖A(z)^{−1}‖
    pub sup_log_inverse_norm: f64,
    /// min_z ‖A(z)^{−1}‖^{−1}
    pub min_conorm: f64,
}

impl CocycleBounds {
    /// sup log‖A‖ + |log min conorm|, the slack constant of the finite
    /// first-integral inequality.
    pub fn slack_constant(&self) -> f64 {
        self.sup_log_norm + self.min_conorm.ln().abs()
    }

    /// 2·sup|log‖A‖| + 2·sup|log‖A^{−1}‖|.
    pub fn gap_stability_constant(&self) -> f64 {
        2.0 * self.sup_log_norm.abs() + 2.0 * self.sup_log_inverse_norm.abs()
    }
}

impl CocycleSpec {
    pub fn identity(dim: usize) -> Self {
        CocycleSpec::ConstantDiag {
            values: vec![1.0; dim],
        }
    }

    pub fn inverse_transpose(self) -> Self {
        match self {
            CocycleSpec::InverseTranspose { of } => *of,
            other => CocycleSpec::InverseTranspose {
                of: Box::new(other),
            },
        }
    }

    pub fn id(&self) -> String {
        match self {
            CocycleSpec::ConstantDiag { values } => format!("constant-diag{values:?}"),
            CocycleSpec::SymbolDiag { diagonals } => format!("symbol-diag{diagonals:?}"),
            CocycleSpec::RotationMatrix { winding, phase } => {
                format!("rotation-matrix({winding},{phase})")
            }
            CocycleSpec::QuasiPeriodicSchrodinger { energy, coupling } => {
                format!("schrodinger(E={energy},v={coupling})")
            }
            CocycleSpec::InverseTranspose { of } => format!("inverse-transpose({})", of.id()),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            CocycleSpec::ConstantDiag { values } => values.len(),
            CocycleSpec::SymbolDiag { diagonals } => diagonals.first().map_or(0, Vec::len),
            CocycleSpec::RotationMatrix { .. } | CocycleSpec::QuasiPeriodicSchrodinger { .. } => 2,
            CocycleSpec::InverseTranspose { of } => of.dimension(),
        }
    }

    pub fn validate_for(&self, system: &SystemSpec) -> Result<()> {
        let fail = |m: String| {
            Err(LabError::InvalidArgument(format!(
                "cocycle {}: {m}",
                self.id()
            )))
        };
        match self {
            CocycleSpec::ConstantDiag { values } => {
                if values.len() < 2 {
                    return fail("dimension must be at least 2".into());
                }
                if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
                    return fail("diagonal entries must be finite and nonzero".into());
                }
                Ok(())
            }
            CocycleSpec::SymbolDiag { diagonals } => {
                let Some(a) = system.alphabet() else {
                    return fail(format!("needs a shift space, got {}", system.id()));
                };
                if diagonals.len() < a as usize {
                    return fail(format!(
                        "{} diagonals for alphabet size {a}",
                        diagonals.len()
                    ));
                }
                let k = self.dimension();
                if k < 2 || diagonals.iter().any(|d| d.len() != k) {
                    return fail("diagonals must share a dimension of at least 2".into());
                }
                if diagonals
                    .iter()
                    .flatten()
                    .any(|v| *v == 0.0 || !v.is_finite())
                {
                    return fail("diagonal entries must be finite and nonzero".into());
                }
                Ok(())
            }
            CocycleSpec::RotationMatrix { phase, .. } => {
                if system.alphabet().is_some() {
                    return fail("needs a circle coordinate".into());
                }
                if !phase.is_finite() {
                    return fail("phase must be finite".into());
                }
                Ok(())
            }
            CocycleSpec::QuasiPeriodicSchrodinger { energy, coupling } => {
                if system.alphabet().is_some() {
                    return fail("needs a circle coordinate".into());
                }
                if !energy.is_finite() || !coupling.is_finite() {
                    return fail("parameters must be finite".into());
                }
                Ok(())
            }
            CocycleSpec::InverseTranspose { of } => of.validate_for(system),
        }
    }

    /// A(z) at the orbit's current state. Assumes `validate_for` passed.
    pub fn matrix(&self, state: &State) -> Result<DMatrix<f64>> {
        let circle = || {
            state.circle_coordinate().ok_or_else(|| {
                LabError::InvalidArgument(format!("{} needs a circle coordinate", self.id()))
            })
        };
        match self {
            CocycleSpec::ConstantDiag { values } => {
                Ok(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
            }
            CocycleSpec::SymbolDiag { diagonals } => {
                let s = state.symbol(0).ok_or_else(|| {
                    LabError::InvalidArgument("symbol-diag needs a symbolic point".into())
                })??;
                Ok(DMatrix::from_diagonal(&DVector::from_column_slice(
                    &diagonals[s as usize],
                )))
            }
            CocycleSpec::RotationMatrix { winding, phase } => {
                let (s, c) = (TAU * (*winding as f64 * circle()? + phase)).sin_cos();
                Ok(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
            }
            CocycleSpec::QuasiPeriodicSchrodinger { energy, coupling } => {
                let x = circle()?;
                let c = energy - 2.0 * coupling * (TAU * x).cos();
                Ok(DMatrix::from_row_slice(2, 2, &[c, -1.0, 1.0, 0.0]))
            }
            CocycleSpec::InverseTranspose { of } => {
                let m = of.matrix(state)?;
                m.try_inverse()
                    .map(|inv| inv.transpose())
                    .ok_or(LabError::SingularMatrix { step: 0 })
            }
        }
    }

    /// Closed-form constants over the whole state space.
    pub fn bounds(&self, system: &SystemSpec) -> Result<CocycleBounds> {
        self.validate_for(system)?;
        let diag = |vals: &mut dyn Iterator<Item = &Vec<f64>>| {
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for d in vals {
                for v in d {
                    hi = hi.max(v.abs());
                    lo = lo.min(v.abs());
                }
            }
            CocycleBounds {
                sup_log_norm: hi.ln(),
                sup_log_inverse_norm: -lo.ln(),
                min_conorm: lo,
            }
        };
        Ok(match self {
            CocycleSpec::ConstantDiag { values } => diag(&mut std::iter::once(values)),
            CocycleSpec::SymbolDiag { diagonals } => {
                let a = system.alphabet().expect("validated") as usize;
                diag(&mut diagonals[..a].iter())
            }
            CocycleSpec::RotationMatrix { .. } => CocycleBounds {
                sup_log_norm: 0.0,
                sup_log_inverse_norm: 0.0,
                min_conorm: 1.0,
            },
            CocycleSpec::QuasiPeriodicSchrodinger { energy, coupling } => {
                // det = 1, so ‖A^{-1}‖ = ‖A‖, and ‖A‖ grows with |c| = |E − 2v cos 2πx|
                let c = energy.abs() + 2.0 * coupling.abs();
                let norm = (c + (c * c + 4.0).sqrt()) / 2.0;
                CocycleBounds {
                    sup_log_norm: norm.ln(),
                    sup_log_inverse_norm: norm.ln(),
                    min_conorm: 1.0 / norm,
                }
            }
            CocycleSpec::InverseTranspose { of } => {
                let b = of.bounds(system)?;
                CocycleBounds {
                    sup_log_norm: b.sup_log_inverse_norm,
                    sup_log_inverse_norm: b.sup_log_norm,
                    min_conorm: (-b.sup_log_norm).exp(),
                }
            }
        })
    }

    /// Minimum of ‖A(z)^{−1}‖^{−1} over seeded random points; an error if any
    /// sampled matrix is singular.
    pub fn sampled_min_conorm(
        &self,
        system: &SystemSpec,
        samples: usize,
        seed: u64,
    ) -> Result<f64> {
        self.validate_for(system)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min = f64::INFINITY;
        for i in 0..samples {
            let z = system.random_point(&mut rng)?;
            let m = self.matrix(Orbit::new(system, &z)?.state())?;
            let inv = m
                .try_inverse()
                .ok_or(LabError::SingularMatrix { step: i as u64 })?;
            min = min.min(1.0 / spectral_norm(&inv));
        }
        if min.is_nan() || min <= 0.0 {
            return Err(LabError::SingularMatrix { step: 0 });
        }
        Ok(min)
    }
}

/// Largest singular value. Closed form for 2×2, power iteration on MᵀM above.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 2 && m.ncols() == 2 {
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        // σ_max = (|(a+d, c−b)| + |(a−d, b+c)|) / 2, free of the cancellation
        // in the trace/determinant form
        return ((a + d).hypot(c - b) + (a - d).hypot(b + c)) / 2.0;
    }
    let gram = m.transpose() * m;
    let k = gram.ncols();
    let mut v = DVector::from_fn(k, |i, _| 1.0 + i as f64 / k as f64);
    v.normalize_mut();
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = &gram * &v;
        let next = w.norm();
        if next == 0.0 {
            return 0.0;
        }
        v = w / next;
        let done = (next - lambda).abs() <= POWER_TOL * next;
        lambda = next;
        if done {
            break;
        }
    }
    lambda.sqrt()
}

/// Running product A(f^{n−1}x)···A(x) stored as scale · P with log(scale)
/// accumulated separately, so that ‖P‖ stays inside a safe window.
#[derive(Clone, Debug)]
pub struct ProductAccumulator {
    product: DMatrix<f64>,
    log_scale: CompensatedSum,
    norm: f64,
    low: f64,
    high: f64,
    steps: u64,
}

impl ProductAccumulator {
    pub fn new(dim: usize) -> Self {
        Self::with_window(dim, RENORM_LOW, RENORM_HIGH)
    }

    pub fn with_window(dim: usize, low: f64, high: f64) -> Self {
        Self {
            product: DMatrix::identity(dim, dim),
            log_scale: CompensatedSum::new(),
            norm: 1.0,
            low,
            high,
            steps: 0,
        }
    }

    /// Left-multiplies by `a`.
    pub fn push(&mut self, a: &DMatrix<f64>) -> Result<()> {
        self.steps += 1;
        let singular = || LabError::SingularMatrix { step: self.steps };
        if a.iter().any(|v| !v.is_finite()) || a.determinant() == 0.0 {
            return Err(singular());
        }
        self.product = a * &self.product;
        self.norm = spectral_norm(&self.product);
        if !(self.norm > 0.0 && self.norm.is_finite()) {
            return Err(singular());
        }
        if self.norm < self.low || self.norm > self.high {
            self.product /= self.norm;
            self.log_scale.add(self.norm.ln());
            self.norm = spectral_norm(&self.product);
        }
        Ok(())
    }

    /// log ‖A^n(x)‖
    pub fn log_norm(&self) -> f64 {
        self.log_scale.value() + self.norm.ln()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Streams log‖A^n(x)‖ for n = 1, 2, ….
pub struct CocycleWalk<'a> {
    cocycle: &'a CocycleSpec,
    orbit: Orbit<'a>,
    acc: ProductAccumulator,
}

impl<'a> CocycleWalk<'a> {
    pub fn new(cocycle: &'a CocycleSpec, system: &'a SystemSpec, x: &Point) -> Result<Self> {
        cocycle.validate_for(system)?;
        Ok(Self {
            cocycle,
            orbit: Orbit::new(system, x)?,
            acc: ProductAccumulator::new(cocycle.dimension()),
        })
    }

    pub fn with_window(mut self, low: f64, high: f64) -> Self {
        self.acc = ProductAccumulator::with_window(self.cocycle.dimension(), low, high);
        self
    }

    pub fn next_log_norm(&mut self) -> Result<(u64, f64)> {
        let m = self
            .cocycle
            .matrix(self.orbit.state())
            .map_err(|e| match e {
                LabError::SingularMatrix { .. } => LabError::SingularMatrix {
                    step: self.acc.steps() + 1,
                },
                e => e,
            })?;
        self.acc.push(&m)?;
        self.orbit.advance()?;
        Ok((self.acc.steps(), self.acc.log_norm()))
    }
}

/// log ‖A^n(x)‖ with the renormalized product engine.
pub fn log_norm(cocycle: &CocycleSpec, system: &SystemSpec, x: &Point, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(LabError::InvalidArgument("n must be at least 1".into()));
    }
    let mut walk = CocycleWalk::new(cocycle, system, x)?;
    let mut last = 0.0;
    for _ in 0..n {
        last = walk.next_log_norm()?.1;
    }
    Ok(last)
}
