//! Catalog of concrete dynamical systems and exact/IEEE orbit stepping.

use std::f64::consts::TAU;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::point::{Coord, Point, Topology};
use crate::word::{PeriodicWord, Word, MAX_ALPHABET};

/// Orbits × steps of the constructor-time Viana trapping check.
pub const VIANA_CHECK_ORBITS: usize = 1_000;
pub const VIANA_CHECK_STEPS: u64 = 1_000;
const VIANA_CHECK_SEED: u64 = 0x5eed_f1a4;

/// Continued-fraction depth used to reject rational-looking rotation numbers.
pub const ROTATION_CF_DEPTH: usize = 20;
const CF_TERMINATION: f64 = 1e-9;

/// Fiber map g of the skew product (x, y) ↦ (x + θ, y + g(x)).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FiberMap {
    /// g(x) = amplitude · cos 2πx
    Cos { amplitude: f64 },
    /// g(x) = amplitude · sin 2πx
    Sin { amplitude: f64 },
    /// g(x) = k·x, continuous on the torus for integer k
    Winding { k: i32 },
}

impl FiberMap {
    fn eval(&self, x: f64) -> f64 {
        match self {
            FiberMap::Cos { amplitude } => amplitude * (TAU * x).cos(),
            FiberMap::Sin { amplitude } => amplitude * (TAU * x).sin(),
            FiberMap::Winding { k } => *k as f64 * x,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SystemKind {
    /// x ↦ d·x mod 1
    Doubling { d: u32 },
    /// x ↦ x + θ mod 1
    Rotation { theta: f64 },
    /// (x, y) ↦ (x + θ, y + g(x)) on the 2-torus
    SkewProduct { theta: f64, fiber: FiberMap },
    /// One-sided full shift on {0, …, alphabet − 1}
    FullShift { alphabet: u8 },
    /// (x, y) ↦ (d·x mod 1, a0 + α sin 2πx − y²) on S¹ × [y_min, y_max]
    Viana {
        d: u32,
        a0: f64,
        alpha: f64,
        #[serde(default = "default_y_min")]
        y_min: f64,
        #[serde(default = "default_y_max")]
        y_max: f64,
    },
}

fn default_y_min() -> f64 {
    -2.2
}

fn default_y_max() -> f64 {
    2.2
}

/// Metric attached to a system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Arc distance on ℝ/ℤ.
    Circle,
    /// Max over coordinates of circle (or absolute) distances.
    ProductMax,
    /// A^{−k}, k the first disagreement index.
    Symbolic,
}

/// A validated system from the catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemKind", into = "SystemKind")]
pub struct SystemSpec {
    kind: SystemKind,
}

impl TryFrom<SystemKind> for SystemSpec {
    type Error = LabError;

    fn try_from(kind: SystemKind) -> Result<Self> {
        SystemSpec::new(kind)
    }
}

impl From<SystemSpec> for SystemKind {
    fn from(s: SystemSpec) -> Self {
        s.kind
    }
}

/// Rejects θ whose continued fraction terminates within `ROTATION_CF_DEPTH`
/// partial quotients, i.e. low-denominator rationals.
pub fn rotation_number_is_irrational_like(theta: f64) -> bool {
    if !(theta > 0.0 && theta < 1.0) {
        return false;
    }
    let mut r = theta;
    for _ in 0..ROTATION_CF_DEPTH {
        if r < CF_TERMINATION {
            return false;
        }
        let inv = 1.0 / r;
        r = inv - inv.floor();
    }
    true
}

impl SystemSpec {
    pub fn new(kind: SystemKind) -> Result<Self> {
        let bad = |m: String| Err(LabError::InvalidSystem(m));
        match &kind {
            SystemKind::Doubling { d } if *d < 2 => return bad(format!("doubling degree {d} < 2")),
            SystemKind::Rotation { theta } | SystemKind::SkewProduct { theta, .. }
                if !rotation_number_is_irrational_like(*theta) =>
            {
                return bad(format!(
                    "rotation number {theta} is not in (0,1) or is a low-denominator rational"
                ))
            }
            SystemKind::SkewProduct { fiber, .. } => match fiber {
                FiberMap::Cos { amplitude } | FiberMap::Sin { amplitude }
                    if !amplitude.is_finite() =>
                {
                    return bad("fiber amplitude must be finite".into())
                }
                _ => {}
            },
            SystemKind::FullShift { alphabet } if !(2..=MAX_ALPHABET).contains(alphabet) => {
                return bad(format!(
                    "alphabet size {alphabet} outside [2, {MAX_ALPHABET}]"
                ))
            }
            SystemKind::Viana {
                d,
                a0,
                alpha,
                y_min,
                y_max,
            } => {
                if *d < 2 {
                    return bad(format!("Viana degree {d} < 2"));
                }
                if !(*a0 > 1.0 && *a0 < 2.0) {
                    return bad(format!("a0 = {a0} violates a0 ∈ (1,2)"));
                }
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return bad(format!("alpha = {alpha} must be positive"));
                }
                if !(y_min.is_finite() && y_max.is_finite() && y_min < y_max) {
                    return bad(format!("invalid y domain [{y_min}, {y_max}]"));
                }
            }
            _ => {}
        }
        let spec = Self { kind };
        if matches!(spec.kind, SystemKind::Viana { .. }) {
            spec.viana_trapping_check(VIANA_CHECK_ORBITS, VIANA_CHECK_STEPS, VIANA_CHECK_SEED)?;
        }
        Ok(spec)
    }

    pub fn doubling(d: u32) -> Result<Self> {
        Self::new(SystemKind::Doubling { d })
    }

    pub fn rotation(theta: f64) -> Result<Self> {
        Self::new(SystemKind::Rotation { theta })
    }

    pub fn full_shift(alphabet: u8) -> Result<Self> {
        Self::new(SystemKind::FullShift { alphabet })
    }

    pub fn viana(d: u32, a0: f64, alpha: f64) -> Result<Self> {
        Self::new(SystemKind::Viana {
            d,
            a0,
            alpha,
            y_min: default_y_min(),
            y_max: default_y_max(),
        })
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn metric(&self) -> Metric {
        match self.kind {
            SystemKind::Doubling { .. } | SystemKind::Rotation { .. } => Metric::Circle,
            SystemKind::SkewProduct { .. } | SystemKind::Viana { .. } => Metric::ProductMax,
            SystemKind::FullShift { .. } => Metric::Symbolic,
        }
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match &self.kind {
            SystemKind::Doubling { d } => format!("doubling(d={d})"),
            SystemKind::Rotation { theta } => format!("rotation(theta={theta})"),
            SystemKind::SkewProduct { theta, fiber } => {
                format!("skew-product(theta={theta},{fiber:?})")
            }
            SystemKind::FullShift { alphabet } => format!("full-shift(A={alphabet})"),
            SystemKind::Viana { d, a0, alpha, .. } => format!("viana(d={d},a0={a0},alpha={alpha})"),
        }
    }

    pub fn alphabet(&self) -> Option<u8> {
        match self.kind {
            SystemKind::FullShift { alphabet } => Some(alphabet),
            _ => None,
        }
    }

    /// Fiber interval [a_min − a_max², a_max] ∩ y-domain that the Viana
    /// fiber map sends into itself whenever |a_min − a_max²| ≤ a_max.
    pub fn viana_core(&self) -> Option<(f64, f64)> {
        match self.kind {
            SystemKind::Viana {
                a0,
                alpha,
                y_min,
                y_max,
                ..
            } => {
                let (a_min, a_max) = (a0 - alpha, a0 + alpha);
                Some(((a_min - a_max * a_max).max(y_min), a_max.min(y_max)))
            }
            _ => None,
        }
    }

    /// Monte-Carlo check that orbits started in the core stay inside the
    /// y-domain for `steps` iterates.
    pub fn viana_trapping_check(&self, orbits: usize, steps: u64, seed: u64) -> Result<()> {
        let (lo, hi) = self
            .viana_core()
            .ok_or_else(|| LabError::InvalidSystem("not a Viana map".into()))?;
        if lo > hi {
            return Err(LabError::InvalidSystem(
                "Viana core interval is empty inside the y domain".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..orbits {
            let x = rng.random::<f64>();
            let y = lo + (hi - lo) * rng.random::<f64>();
            let mut orbit = Orbit::new(self, &Point::cylinder(x, y)?)?;
            for _ in 0..steps {
                orbit
                    .advance()
                    .map_err(|e| LabError::InvalidSystem(format!("trapping check failed: {e}")))?;
            }
        }
        Ok(())
    }

    /// Checks that `x` belongs to the state space.
    pub fn validate_point(&self, x: &Point) -> Result<()> {
        let bad = |m: &str| Err(LabError::InvalidPoint(format!("{m} for {}", self.id())));
        match (&self.kind, x) {
            (SystemKind::Doubling { .. } | SystemKind::Rotation { .. }, Point::Rational(_)) => {
                Ok(())
            }
            (SystemKind::Doubling { .. } | SystemKind::Rotation { .. }, Point::Euclidean(c)) => {
                if c.len() == 1 && c[0].topology == Topology::Circle {
                    Ok(())
                } else {
                    bad("expected one circle coordinate")
                }
            }
            (SystemKind::SkewProduct { .. }, Point::Euclidean(c)) => {
                if c.len() == 2 && c.iter().all(|c| c.topology == Topology::Circle) {
                    Ok(())
                } else {
                    bad("expected two circle coordinates")
                }
            }
            (SystemKind::Viana { y_min, y_max, .. }, Point::Euclidean(c)) => {
                if c.len() == 2
                    && c[0].topology == Topology::Circle
                    && c[1].topology == Topology::Line
                {
                    if (*y_min..=*y_max).contains(&c[1].value) {
                        Ok(())
                    } else {
                        bad("fiber coordinate outside the y domain")
                    }
                } else {
                    bad("expected (circle, line) coordinates")
                }
            }
            (SystemKind::FullShift { alphabet }, Point::Symbolic(w)) => match w {
                Word::Periodic(p) if p.max_symbol() >= *alphabet => {
                    bad("symbol outside the alphabet")
                }
                Word::Generated(g)
                    if g.schedule().alpha.max_symbol() >= *alphabet
                        || g.schedule().beta.max_symbol() >= *alphabet =>
                {
                    bad("symbol outside the alphabet")
                }
                _ => Ok(()),
            },
            _ => bad("point kind does not match the system"),
        }
    }

    /// Distance in the system's metric.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.validate_point(a)?;
        self.validate_point(b)?;
        match &self.kind {
            SystemKind::FullShift { alphabet } => {
                let (wa, wb) = (
                    a.as_word().expect("validated"),
                    b.as_word().expect("validated"),
                );
                // A^{-k} underflows to 0 long before this many symbols
                let limit = (1100.0 / (*alphabet as f64).log2()).ceil() as usize;
                Ok(match wa.first_disagreement(wb, limit)? {
                    Some(k) => (*alphabet as f64).powi(-(k as i32)),
                    None => 0.0,
                })
            }
            _ => {
                let (ca, cb) = (coordinates(a), coordinates(b));
                Ok(ca
                    .iter()
                    .zip(&cb)
                    .map(|(u, v)| match u.topology {
                        Topology::Circle => {
                            let d = (u.value - v.value).abs();
                            d.min(1.0 - d)
                        }
                        Topology::Line => (u.value - v.value).abs(),
                    })
                    .fold(0.0, f64::max))
            }
        }
    }

    /// A pseudo-random point of the state space.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        match &self.kind {
            SystemKind::Doubling { .. } | SystemKind::Rotation { .. } => {
                Point::circle(rng.random())
            }
            SystemKind::SkewProduct { .. } => Point::torus(rng.random(), rng.random()),
            SystemKind::Viana { .. } => {
                let (lo, hi) = self.viana_core().expect("viana");
                Point::cylinder(rng.random(), lo + (hi - lo) * rng.random::<f64>())
            }
            SystemKind::FullShift { alphabet } => Ok(Point::Symbolic(Word::Periodic(random_word(
                *alphabet,
                Vec::new(),
                rng,
            )?))),
        }
    }
}

/// Random eventually periodic word extending `prefix`: 32 free symbols, then
/// a random block of length 16 repeated.
pub(crate) fn random_word<R: Rng + ?Sized>(
    alphabet: u8,
    mut prefix: Vec<u8>,
    rng: &mut R,
) -> Result<PeriodicWord> {
    prefix.extend((0..32).map(|_| rng.random_range(0..alphabet)));
    let period = (0..16).map(|_| rng.random_range(0..alphabet)).collect();
    PeriodicWord::new(prefix, period)
}

fn coordinates(p: &Point) -> Vec<Coord> {
    match p {
        Point::Euclidean(c) => c.clone(),
        Point::Rational(r) => vec![Coord::circle(ratio_to_f64(r))],
        Point::Symbolic(_) => Vec::new(),
    }
}

pub(crate) fn ratio_to_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Reduces v to [0, 1), guarding against `1 - tiny` rounding up to 1.
#[inline]
pub(crate) fn wrap_unit(v: f64) -> f64 {
    let r = v - v.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Mutable orbit cursor over a compact state representation.
#[derive(Clone, Debug)]
pub enum State {
    Circle(f64),
    /// Torus or cylinder coordinates.
    Pair(f64, f64),
    Rational {
        num: u64,
        den: u64,
    },
    Word {
        word: Word,
        offset: usize,
    },
}

impl State {
    /// First circle coordinate, when there is one.
    #[inline]
    pub fn circle_coordinate(&self) -> Option<f64> {
        match self {
            State::Circle(x) | State::Pair(x, _) => Some(*x),
            State::Rational { num, den } => Some(*num as f64 / *den as f64),
            State::Word { .. } => None,
        }
    }

    #[inline]
    pub fn fiber(&self) -> Option<f64> {
        match self {
            State::Pair(_, y) => Some(*y),
            _ => None,
        }
    }

    /// Symbol i positions ahead of the current one.
    #[inline]
    pub fn symbol(&self, i: usize) -> Option<Result<u8>> {
        match self {
            State::Word { word, offset } => Some(word.symbol(offset + i)),
            _ => None,
        }
    }
}

/// Orbit of a point, advanced one step at a time without reallocating.
#[derive(Clone, Debug)]
pub struct Orbit<'a> {
    system: &'a SystemSpec,
    state: State,
    steps: u64,
}

impl<'a> Orbit<'a> {
    pub fn new(system: &'a SystemSpec, x: &Point) -> Result<Self> {
        system.validate_point(x)?;
        let state = match (x, &system.kind) {
            (Point::Rational(r), SystemKind::Doubling { .. }) => State::Rational {
                num: *r.numer(),
                den: *r.denom(),
            },
            // rotation by an IEEE double cannot stay exact
            (Point::Rational(r), _) => State::Circle(ratio_to_f64(r)),
            (Point::Euclidean(c), _) if c.len() == 1 => State::Circle(c[0].value),
            (Point::Euclidean(c), _) => State::Pair(c[0].value, c[1].value),
            (Point::Symbolic(w), _) => State::Word {
                word: w.clone(),
                offset: 0,
            },
        };
        Ok(Self {
            system,
            state,
            steps: 0,
        })
    }

    #[inline]
    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn system(&self) -> &SystemSpec {
        self.system
    }

    /// Applies f once.
    #[inline]
    pub fn advance(&mut self) -> Result<()> {
        self.steps += 1;
        match (&mut self.state, &self.system.kind) {
            (State::Rational { num, den }, SystemKind::Doubling { d }) => {
                *num = ((*num as u128 * *d as u128) % *den as u128) as u64;
            }
            (State::Circle(x), SystemKind::Doubling { d }) => {
                *x = (*d as f64 * *x).fract();
            }
            (State::Circle(x), SystemKind::Rotation { theta }) => {
                let v = *x + theta;
                *x = if v >= 1.0 { v - 1.0 } else { v };
            }
            (State::Pair(x, y), SystemKind::SkewProduct { theta, fiber }) => {
                let g = fiber.eval(*x);
                *y = wrap_unit(*y + g);
                let v = *x + theta;
                *x = if v >= 1.0 { v - 1.0 } else { v };
            }
            (
                State::Pair(x, y),
                SystemKind::Viana {
                    d,
                    a0,
                    alpha,
                    y_min,
                    y_max,
                },
            ) => {
                let ny = a0 + alpha * (TAU * *x).sin() - *y * *y;
                if !(ny >= *y_min && ny <= *y_max) {
                    return Err(LabError::DomainEscape {
                        step: self.steps,
                        value: ny,
                    });
                }
                *y = ny;
                *x = (*d as f64 * *x).fract();
            }
            (State::Word { offset, .. }, SystemKind::FullShift { .. }) => {
                *offset += 1;
            }
            _ => unreachable!("state/system pairing validated in Orbit::new"),
        }
        Ok(())
    }

    /// Current point f^steps(x).
    pub fn point(&self) -> Point {
        match (&self.state, &self.system.kind) {
            (State::Circle(x), _) => Point::Euclidean(vec![Coord::circle(*x)]),
            (State::Rational { num, den }, _) => Point::Rational(Ratio::new(*num, *den)),
            (State::Pair(x, y), SystemKind::Viana { .. }) => {
                Point::Euclidean(vec![Coord::circle(*x), Coord::line(*y)])
            }
            (State::Pair(x, y), _) => Point::Euclidean(vec![Coord::circle(*x), Coord::circle(*y)]),
            (State::Word { word, offset }, _) => Point::Symbolic(word.shift(*offset)),
        }
    }
}

/// f^n(x). Exact for rational and symbolic points.
pub fn iterate(system: &SystemSpec, x: &Point, n: u64) -> Result<Point> {
    if let (Point::Symbolic(w), SystemKind::FullShift { .. }) = (x, &system.kind) {
        system.validate_point(x)?;
        return Ok(Point::Symbolic(w.shift(n as usize)));
    }
    let mut orbit = Orbit::new(system, x)?;
    for _ in 0..n {
        orbit.advance()?;
    }
    Ok(orbit.point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn doubling_rational_exact() {
        let s = SystemSpec::doubling(2).unwrap();
        let y = iterate(&s, &Point::rational(1, 3).unwrap(), 1).unwrap();
        assert_eq!(y, Point::rational(2, 3).unwrap());
        let y = iterate(&s, &Point::rational(1, 3).unwrap(), 2).unwrap();
        assert_eq!(y, Point::rational(1, 3).unwrap());
    }

    #[test]
    fn shift_drops_symbols() {
        let s = SystemSpec::full_shift(2).unwrap();
        let y = iterate(&s, &Point::word("011", "0").unwrap(), 2).unwrap();
        assert_eq!(y, Point::word("1", "0").unwrap());
    }

    #[test]
    fn viana_single_step() {
        let s = SystemSpec::viana(16, 1.9, 0.01).unwrap();
        let y = iterate(&s, &Point::cylinder(0.0, 0.0).unwrap(), 1).unwrap();
        // a(0) = a0 + α·sin 0 = a0
        assert_eq!(y, Point::cylinder(0.0, 1.9).unwrap());
    }

    #[test]
    fn viana_escape_reports_step() {
        let s = SystemSpec::viana(2, 1.9, 0.01).unwrap();
        // 1.9 − 2.2² = −2.94 leaves [−2.2, 2.2] on the first step
        let err = iterate(&s, &Point::cylinder(0.0, 2.2).unwrap(), 3).unwrap_err();
        assert!(matches!(err, LabError::DomainEscape { step: 1, .. }));
    }

    #[test]
    fn viana_parameter_ranges() {
        assert!(SystemSpec::viana(2, 2.5, 0.01).is_err());
        assert!(SystemSpec::viana(1, 1.5, 0.01).is_err());
        assert!(SystemSpec::viana(2, 1.5, 0.0).is_err());
        // large α pushes the fiber out of the domain: trapping check fails
        assert!(SystemSpec::viana(2, 1.99, 0.9).is_err());
    }

    #[test]
    fn rotation_rejects_rationals() {
        for theta in [0.5, 0.25, 1.0 / 3.0, 0.4, 3.0 / 7.0, 0.0, 1.0, 0.5 + 1e-13] {
            assert!(SystemSpec::rotation(theta).is_err(), "{theta}");
        }
        for theta in [
            0.4142135623,
            (5f64.sqrt() - 1.0) / 2.0,
            std::f64::consts::PI - 3.0,
        ] {
            assert!(SystemSpec::rotation(theta).is_ok(), "{theta}");
        }
    }

    #[test]
    fn symbolic_metric_first_disagreement() {
        let s = SystemSpec::full_shift(2).unwrap();
        let a = Point::word("0110", "0").unwrap();
        let b = Point::word("0111", "0").unwrap();
        assert_eq!(s.distance(&a, &b).unwrap(), 0.125);
        assert_eq!(s.distance(&a, &a).unwrap(), 0.0);
        let c = Point::word("1", "0").unwrap();
        assert_eq!(s.distance(&a, &c).unwrap(), 1.0);
    }

    #[test]
    fn circle_metric_wraps() {
        let s = SystemSpec::doubling(2).unwrap();
        let d = s
            .distance(&Point::circle(0.95).unwrap(), &Point::circle(0.05).unwrap())
            .unwrap();
        assert!((d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn point_kind_mismatch_rejected() {
        let s = SystemSpec::doubling(2).unwrap();
        assert!(iterate(&s, &Point::word("", "0").unwrap(), 1).is_err());
        let sh = SystemSpec::full_shift(2).unwrap();
        assert!(iterate(&sh, &Point::word("", "2").unwrap(), 1).is_err());
    }

    #[test]
    fn viana_orbits_stay_trapped() {
        // 10^4 orbits of length 10^4
        let s = SystemSpec::viana(16, 1.9, 0.01).unwrap();
        s.viana_trapping_check(10_000, 10_000, 42).unwrap();
    }

    proptest! {
        #[test]
        fn doubling_denominator_divides(p in 0u64..1000, q in 1u64..1000, d in 2u32..6, n in 0u64..12) {
            let s = SystemSpec::doubling(d).unwrap();
            let x = Point::rational(p, q).unwrap();
            let y = iterate(&s, &x, n).unwrap();
            let r = y.as_rational().unwrap();
            let q0 = *x.as_rational().unwrap().denom() as u128;
            prop_assert_eq!((q0 * (d as u128).pow(n as u32)) % *r.denom() as u128, 0);
            // agrees with the closed form d^n·p/q mod 1
            let num = (p % q) as u128 * (d as u128).pow(n as u32) % q as u128;
            prop_assert_eq!(r, Ratio::new(num as u64, q));
        }

        #[test]
        fn symbolic_ball_of_radius_one_fixes_first_symbol(
            a in prop::collection::vec(0u8..3, 1..8),
            b in prop::collection::vec(0u8..3, 1..8),
        ) {
            let s = SystemSpec::full_shift(3).unwrap();
            let pa = Point::Symbolic(Word::Periodic(PeriodicWord::new(a.clone(), vec![0]).unwrap()));
            let pb = Point::Symbolic(Word::Periodic(PeriodicWord::new(b.clone(), vec![0]).unwrap()));
            if s.distance(&pa, &pb).unwrap() < 1.0 {
                prop_assert_eq!(a[0], b[0]);
            }
        }
    }
}
