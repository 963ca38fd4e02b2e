use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::word::{PeriodicWord, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Coordinate on ℝ/ℤ, stored in [0, 1).
    Circle,
    /// Finite real coordinate.
    Line,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    pub value: f64,
    pub topology: Topology,
}

impl Coord {
    pub fn circle(value: f64) -> Self {
        Self {
            value,
            topology: Topology::Circle,
        }
    }

    pub fn line(value: f64) -> Self {
        Self {
            value,
            topology: Topology::Line,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.topology {
            Topology::Circle if !(0.0..1.0).contains(&self.value) => Err(LabError::InvalidPoint(
                format!("circle coordinate {} outside [0, 1)", self.value),
            )),
            Topology::Line if !self.value.is_finite() => Err(LabError::InvalidPoint(format!(
                "line coordinate {} is not finite",
                self.value
            ))),
            _ => Ok(()),
        }
    }
}

/// A state of one of the catalog systems.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    /// Real coordinates with per-coordinate topology.
    Euclidean(Vec<Coord>),
    /// Exact rational point of the circle, in [0, 1).
    Rational(Ratio<u64>),
    Symbolic(Word),
}

impl Point {
    pub fn circle(x: f64) -> Result<Self> {
        let c = Coord::circle(x);
        c.validate()?;
        Ok(Point::Euclidean(vec![c]))
    }

    pub fn torus(x: f64, y: f64) -> Result<Self> {
        Self::euclidean(vec![Coord::circle(x), Coord::circle(y)])
    }

    /// A point of S¹ × ℝ.
    pub fn cylinder(x: f64, y: f64) -> Result<Self> {
        Self::euclidean(vec![Coord::circle(x), Coord::line(y)])
    }

    pub fn euclidean(coords: Vec<Coord>) -> Result<Self> {
        if coords.is_empty() {
            return Err(LabError::InvalidPoint("no coordinates".into()));
        }
        coords.iter().try_for_each(Coord::validate)?;
        Ok(Point::Euclidean(coords))
    }

    /// The rational p/q reduced mod 1.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(LabError::InvalidPoint("zero denominator".into()));
        }
        Ok(Point::Rational(Ratio::new(p % q, q)))
    }

    /// Eventually periodic symbolic point from symbol strings.
    pub fn word(preperiod: &str, period: &str) -> Result<Self> {
        Ok(Point::Symbolic(Word::Periodic(PeriodicWord::parse(
            preperiod, period,
        )?)))
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Point::Symbolic(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Ratio<u64>> {
        match self {
            Point::Rational(r) => Some(*r),
            _ => None,
        }
    }

    pub fn coords(&self) -> Option<&[Coord]> {
        match self {
            Point::Euclidean(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Euclidean(c) => {
                let vals: Vec<f64> = c.iter().map(|c| c.value).collect();
                write!(f, "{vals:?}")
            }
            Point::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Point::Symbolic(Word::Periodic(w)) => write!(f, "{w:?}"),
            Point::Symbolic(Word::Generated(g)) => {
                write!(f, "generated(offset {})", g.offset())
            }
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_coordinates_validated() {
        assert!(Point::circle(0.999).is_ok());
        assert!(Point::circle(1.0).is_err());
        assert!(Point::circle(-0.1).is_err());
        assert!(Point::cylinder(0.2, f64::NAN).is_err());
        assert!(Point::cylinder(0.2, -7.5).is_ok());
    }

    #[test]
    fn rationals_are_reduced_mod_one() {
        let p = Point::rational(7, 3).unwrap();
        assert_eq!(p.as_rational(), Some(Ratio::new(1, 3)));
        assert!(Point::rational(1, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        for p in [
            Point::rational(5, 12).unwrap(),
            Point::cylinder(0.25, 1.5).unwrap(),
            Point::word("011", "0").unwrap(),
        ] {
            let s = serde_json::to_string(&p).unwrap();
            let back: Point = serde_json::from_str(&s).unwrap();
            assert_eq!(back, p);
        }
    }
}
