//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use histlab_core::system::Orbit;
use histlab_core::{CocycleSpec, Point, SystemSpec, Word};
use nalgebra::DMatrix;

/// ones[n] = number of 1s among the first n symbols, by plain integer counting.
pub fn ones_prefix(word: &Word, len: usize) -> Vec<u64> {
    let mut ones = Vec::with_capacity(len + 1);
    ones.push(0);
    let mut acc = 0u64;
    for i in 0..len {
        acc += word.symbol(i).unwrap() as u64;
        ones.push(acc);
    }
    ones
}

/// (min, argmin, max, argmax) of f(n) over n in [from, to].
pub fn extremes(from: usize, to: usize, f: impl Fn(usize) -> f64) -> (f64, usize, f64, usize) {
    let mut out = (f64::INFINITY, 0, f64::NEG_INFINITY, 0);
    for n in from..=to {
        let v = f(n);
        if v < out.0 {
            out.0 = v;
            out.1 = n;
        }
        if v > out.2 {
            out.2 = v;
            out.3 = n;
        }
    }
    out
}

/// log ‖A^n(x)‖ from the unnormalized product and the SVD norm.
pub fn direct_log_norm(cocycle: &CocycleSpec, system: &SystemSpec, x: &Point, n: u64) -> f64 {
    let mut orbit = Orbit::new(system, x).unwrap();
    let k = cocycle.dimension();
    let mut p = DMatrix::<f64>::identity(k, k);
    for _ in 0..n {
        p = cocycle.matrix(orbit.state()).unwrap() * p;
        orbit.advance().unwrap();
    }
    p.svd(false, false).singular_values.max().ln()
}

pub fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

pub fn symbol_diag() -> CocycleSpec {
    CocycleSpec::SymbolDiag {
        diagonals: vec![vec![2.0, 0.5], vec![3.0, 1.0 / 3.0]],
    }
}

/// The cocycle catalog, each over the base system it is defined on.
pub fn catalog() -> Vec<(&'static str, CocycleSpec, SystemSpec)> {
    vec![
        (
            "constant-diag(2,1/2) / doubling",
            CocycleSpec::ConstantDiag {
                values: vec![2.0, 0.5],
            },
            SystemSpec::doubling(2).unwrap(),
        ),
        (
            "symbol-diag(2|3) / full shift",
            symbol_diag(),
            SystemSpec::full_shift(2).unwrap(),
        ),
        (
            "rotation-matrix / golden rotation",
            CocycleSpec::RotationMatrix {
                winding: 1,
                phase: 0.0,
            },
            SystemSpec::rotation(golden()).unwrap(),
        ),
        (
            "schrodinger(E=0,v=1.5) / golden rotation",
            CocycleSpec::QuasiPeriodicSchrodinger {
                energy: 0.0,
                coupling: 1.5,
            },
            SystemSpec::rotation(golden()).unwrap(),
        ),
    ]
}
