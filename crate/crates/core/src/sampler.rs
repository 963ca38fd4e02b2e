//! Finite samples of dense sets: backward orbits, stable sets and jittered grids.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::point::Point;
use crate::system::{random_word, SystemKind, SystemSpec};
use crate::word::{PeriodicWord, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum SamplerStrategy {
    /// Points y with f^depth(y) = target.
    PreimageTree { target: Point, depth: u32 },
    /// Points that agree with the periodic word from `prefix_len` onward.
    StableTail { word: PeriodicWord, prefix_len: u32 },
    /// One seeded uniform point per grid cell.
    GridJitter { resolution: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseSampler {
    pub system: SystemSpec,
    pub strategy: SamplerStrategy,
}

impl DenseSampler {
    pub fn new(system: SystemSpec, strategy: SamplerStrategy) -> Self {
        Self { system, strategy }
    }

    pub fn sample(&self, count: u64) -> Result<Vec<Point>> {
        make_dense_sample(self, count)
    }
}

/// Indices `floor(i · stock / count)`, evenly spread over `0..stock`.
fn spread(stock: u128, count: u64) -> impl Iterator<Item = u128> {
    (0..count as u128).map(move |i| i * stock / count as u128)
}

fn check_stock(stock: Option<u128>, count: u64) -> Result<u128> {
    let stock = stock.unwrap_or(u128::MAX);
    if (count as u128) > stock {
        return Err(LabError::StockExhausted {
            requested: count,
            available: stock.min(u64::MAX as u128) as u64,
        });
    }
    Ok(stock)
}

fn digits(mut index: u128, base: u8, len: u32) -> Vec<u8> {
    let mut out = vec![0u8; len as usize];
    for slot in out.iter_mut().rev() {
        *slot = (index % base as u128) as u8;
        index /= base as u128;
    }
    out
}

/// Returns `count` distinct points of the sampler's dense set.
pub fn make_dense_sample(sampler: &DenseSampler, count: u64) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(LabError::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let system = &sampler.system;
    match (&sampler.strategy, system.kind()) {
        (SamplerStrategy::PreimageTree { target, depth }, SystemKind::Doubling { d }) => {
            let t = target.as_rational().ok_or_else(|| {
                LabError::SamplerMismatch(
                    "preimage trees on the circle need an exact rational target".into(),
                )
            })?;
            let fan = (*d as u128).checked_pow(*depth);
            let stock = check_stock(fan, count)?;
            let (p, q) = (*t.numer() as u128, *t.denom() as u128);
            // y_k = (t + k) / d^depth = (p + k q) / (q d^depth)
            let den = q
                .checked_mul(stock)
                .filter(|v| *v <= u64::MAX as u128)
                .ok_or_else(|| {
                    LabError::InvalidArgument("preimage denominators overflow 64 bits".into())
                })?;
            spread(stock, count)
                .map(|k| Ok(Point::Rational(Ratio::new((p + k * q) as u64, den as u64))))
                .collect()
        }
        (SamplerStrategy::PreimageTree { target, depth }, SystemKind::FullShift { alphabet }) => {
            let w = match target.as_word() {
                Some(Word::Periodic(w)) => w,
                _ => {
                    return Err(LabError::SamplerMismatch(
                        "preimage trees on the shift need an eventually periodic target".into(),
                    ))
                }
            };
            system.validate_point(target)?;
            let stock = check_stock((*alphabet as u128).checked_pow(*depth), count)?;
            spread(stock, count)
                .map(|k| {
                    let mut pre = digits(k, *alphabet, *depth);
                    pre.extend_from_slice(w.preperiod());
                    Ok(Point::Symbolic(Word::Periodic(PeriodicWord::new(
                        pre,
                        w.period().to_vec(),
                    )?)))
                })
                .collect()
        }
        (SamplerStrategy::PreimageTree { .. }, _) => Err(LabError::SamplerMismatch(format!(
            "preimage trees need doubling or full-shift, got {}",
            system.id()
        ))),
        (SamplerStrategy::StableTail { word, prefix_len }, SystemKind::FullShift { alphabet }) => {
            if !word.is_purely_periodic() || word.max_symbol() >= *alphabet {
                return Err(LabError::SamplerMismatch(
                    "stable tails need a purely periodic word over the alphabet".into(),
                ));
            }
            let stock = check_stock((*alphabet as u128).checked_pow(*prefix_len), count)?;
            spread(stock, count)
                .map(|k| {
                    let pre = digits(k, *alphabet, *prefix_len);
                    Ok(Point::Symbolic(Word::Periodic(PeriodicWord::new(
                        pre,
                        word.period().to_vec(),
                    )?)))
                })
                .collect()
        }
        (SamplerStrategy::StableTail { word, prefix_len }, SystemKind::Doubling { d }) => {
            // base-d expansion w · p^∞ as an exact rational
            if !word.is_purely_periodic() || word.max_symbol() as u32 >= *d {
                return Err(LabError::SamplerMismatch(
                    "stable tails need a purely periodic digit word below d".into(),
                ));
            }
            let stock = check_stock((*d as u128).checked_pow(*prefix_len), count)?;
            let plen = word.period().len() as u32;
            let period_value = word
                .period()
                .iter()
                .fold(0u128, |acc, &s| acc * *d as u128 + s as u128);
            let repunit = (*d as u128).pow(plen) - 1;
            let den = stock
                .checked_mul(repunit)
                .filter(|v| *v <= u64::MAX as u128)
                .ok_or_else(|| {
                    LabError::InvalidArgument("stable-tail denominators overflow 64 bits".into())
                })?;
            spread(stock, count)
                .map(|k| {
                    // (k + P/(d^L − 1)) / d^m
                    let num = k * repunit + period_value;
                    Point::rational(num as u64, den as u64)
                })
                .collect()
        }
        (SamplerStrategy::StableTail { .. }, _) => Err(LabError::SamplerMismatch(format!(
            "stable tails need doubling or full-shift, got {}",
            system.id()
        ))),
        (SamplerStrategy::GridJitter { resolution, seed }, kind) => {
            if *resolution == 0 {
                return Err(LabError::InvalidArgument(
                    "grid resolution must be positive".into(),
                ));
            }
            let r = *resolution as u128;
            let dims: u32 = match kind {
                SystemKind::SkewProduct { .. } | SystemKind::Viana { .. } => 2,
                _ => 1,
            };
            let stock = match kind {
                SystemKind::FullShift { alphabet } => {
                    (*alphabet as u128).checked_pow(*resolution as u32)
                }
                _ => r.checked_pow(dims),
            };
            let stock = check_stock(stock, count)?;
            spread(stock, count)
                .map(|cell| {
                    let mut rng = cell_rng(*seed, cell as u64);
                    jitter_in_grid_cell(system, *resolution, cell, &mut rng)
                })
                .collect()
        }
    }
}

/// Counter-based stream keyed by (seed, cell).
pub fn cell_rng(seed: u64, cell: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    rng
}

fn jitter_in_grid_cell(
    system: &SystemSpec,
    resolution: u64,
    cell: u128,
    rng: &mut ChaCha8Rng,
) -> Result<Point> {
    let r = resolution as f64;
    match system.kind() {
        SystemKind::FullShift { alphabet } => {
            let prefix = digits(cell, *alphabet, resolution as u32);
            Ok(Point::Symbolic(Word::Periodic(random_word(
                *alphabet, prefix, rng,
            )?)))
        }
        SystemKind::SkewProduct { .. } => {
            let (i, j) = (
                (cell / resolution as u128) as f64,
                (cell % resolution as u128) as f64,
            );
            Point::torus(
                ((i + rng.random::<f64>()) / r).min(1.0 - f64::EPSILON),
                ((j + rng.random::<f64>()) / r).min(1.0 - f64::EPSILON),
            )
        }
        SystemKind::Viana { .. } => {
            let (lo, hi) = system.viana_core().expect("viana");
            let (i, j) = (
                (cell / resolution as u128) as f64,
                (cell % resolution as u128) as f64,
            );
            Point::cylinder(
                ((i + rng.random::<f64>()) / r).min(1.0 - f64::EPSILON),
                lo + (hi - lo) * (j + rng.random::<f64>()) / r,
            )
        }
        _ => Point::circle(((cell as f64 + rng.random::<f64>()) / r).min(1.0 - f64::EPSILON)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::iterate;

    fn doubling() -> SystemSpec {
        SystemSpec::doubling(2).unwrap()
    }

    #[test]
    fn preimages_of_zero_are_dyadics() {
        let s = DenseSampler::new(
            doubling(),
            SamplerStrategy::PreimageTree {
                target: Point::rational(0, 1).unwrap(),
                depth: 3,
            },
        );
        let pts = s.sample(8).unwrap();
        let expected: Vec<Point> = (0..8).map(|k| Point::rational(k, 8).unwrap()).collect();
        assert_eq!(pts, expected);
    }

    #[test]
    fn preimages_of_one_third_by_enumeration() {
        // brute-force: search k/(3·2) for 2y ≡ 1/3 (mod 1)
        let mut oracle = Vec::new();
        for num in 0..6u64 {
            let y = Ratio::new(num, 6);
            let image = (y * 2) - (y * 2).trunc();
            if image == Ratio::new(1, 3) {
                oracle.push(Point::Rational(y));
            }
        }
        let s = DenseSampler::new(
            doubling(),
            SamplerStrategy::PreimageTree {
                target: Point::rational(1, 3).unwrap(),
                depth: 1,
            },
        );
        assert_eq!(s.sample(2).unwrap(), oracle);
        assert_eq!(
            oracle,
            vec![
                Point::rational(1, 6).unwrap(),
                Point::rational(2, 3).unwrap()
            ]
        );
    }

    #[test]
    fn preimage_soundness_and_coverage() {
        let target = Point::rational(1, 3).unwrap();
        let s = DenseSampler::new(
            doubling(),
            SamplerStrategy::PreimageTree {
                target: target.clone(),
                depth: 6,
            },
        );
        let pts = s.sample(64).unwrap();
        let mut hit = [false; 64];
        for p in &pts {
            assert_eq!(iterate(&doubling(), p, 6).unwrap(), target);
            let r = p.as_rational().unwrap();
            hit[(*r.numer() * 64 / *r.denom()) as usize] = true;
        }
        assert!(hit.iter().all(|&h| h));
        assert!(matches!(s.sample(65), Err(LabError::StockExhausted { .. })));
    }

    #[test]
    fn shift_preimages_map_onto_target() {
        let shift = SystemSpec::full_shift(3).unwrap();
        let target = Point::word("2", "01").unwrap();
        let s = DenseSampler::new(
            shift.clone(),
            SamplerStrategy::PreimageTree {
                target: target.clone(),
                depth: 4,
            },
        );
        let pts = s.sample(81).unwrap();
        for p in &pts {
            assert_eq!(iterate(&shift, p, 4).unwrap(), target);
        }
        let mut uniq = pts.clone();
        uniq.dedup();
        assert_eq!(uniq.len(), 81);
    }

    #[test]
    fn stable_tail_words() {
        let shift = SystemSpec::full_shift(2).unwrap();
        let s = DenseSampler::new(
            shift,
            SamplerStrategy::StableTail {
                word: PeriodicWord::parse("", "1").unwrap(),
                prefix_len: 4,
            },
        );
        let pts = s.sample(3).unwrap();
        assert_eq!(pts.len(), 3);
        for (i, p) in pts.iter().enumerate() {
            let w = p.as_word().unwrap();
            for j in 4..40 {
                assert_eq!(w.symbol(j).unwrap(), 1);
            }
            for q in &pts[..i] {
                assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn stable_tail_on_circle_is_exact() {
        // prefix 2 digits, tail (01)^∞ in base 2: x = (k + 1/3)/4
        let s = DenseSampler::new(
            doubling(),
            SamplerStrategy::StableTail {
                word: PeriodicWord::parse("", "01").unwrap(),
                prefix_len: 2,
            },
        );
        let pts = s.sample(4).unwrap();
        for (k, p) in pts.iter().enumerate() {
            assert_eq!(
                p.as_rational().unwrap(),
                (Ratio::new(k as u64, 1) + Ratio::new(1, 3)) / 4
            );
            // lands on the 2-cycle {1/3, 2/3}
            assert_eq!(
                iterate(&doubling(), p, 2).unwrap(),
                Point::rational(1, 3).unwrap()
            );
        }
    }

    #[test]
    fn strategy_system_mismatch() {
        let rot = SystemSpec::rotation(0.4142135623).unwrap();
        let s = DenseSampler::new(
            rot,
            SamplerStrategy::PreimageTree {
                target: Point::rational(0, 1).unwrap(),
                depth: 2,
            },
        );
        assert!(matches!(s.sample(1), Err(LabError::SamplerMismatch(_))));
    }

    #[test]
    fn grid_jitter_is_seeded_and_in_cell() {
        let s = DenseSampler::new(
            doubling(),
            SamplerStrategy::GridJitter {
                resolution: 16,
                seed: 9,
            },
        );
        let a = s.sample(16).unwrap();
        assert_eq!(a, s.sample(16).unwrap());
        for (i, p) in a.iter().enumerate() {
            let x = p.coords().unwrap()[0].value;
            assert!(x >= i as f64 / 16.0 && x < (i + 1) as f64 / 16.0);
        }
        let other = DenseSampler::new(
            doubling(),
            SamplerStrategy::GridJitter {
                resolution: 16,
                seed: 10,
            },
        );
        assert_ne!(a, other.sample(16).unwrap());
    }
}
