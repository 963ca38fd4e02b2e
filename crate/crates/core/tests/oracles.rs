//! Worked examples checked against independent oracles: enumeration, integer
//! rescans of words, closed-form orbit averages and explicit matrix products.

mod common;

use histlab_core::baire::CellVerdict;
use histlab_core::subadditive::normalized_values;
use histlab_core::*;
use num_rational::Ratio;

use common::{direct_log_norm, extremes, golden, ones_prefix, symbol_diag};

fn shift2() -> SystemSpec {
    SystemSpec::full_shift(2).unwrap()
}

fn dense(start: u64) -> CheckpointPolicy {
    CheckpointPolicy::DenseTail { start: Some(start) }
}

fn harmonic_word(scale: f64, cap: usize) -> IrregularWord {
    let schedule = BlockSchedule::new(
        PeriodicWord::parse("", "0").unwrap(),
        PeriodicWord::parse("", "1").unwrap(),
        Tolerance::Harmonic { scale },
        cap,
    );
    build_irregular_word(&shift2(), schedule).unwrap()
}

#[test]
fn preimages_of_one_third_by_enumeration() {
    let d = SystemSpec::doubling(2).unwrap();
    let sampler = DenseSampler::new(
        d,
        SamplerStrategy::PreimageTree {
            target: Point::rational(1, 3).unwrap(),
            depth: 1,
        },
    );
    let got: Vec<Ratio<u64>> = sampler
        .sample(2)
        .unwrap()
        .iter()
        .map(|p| p.as_rational().unwrap())
        .collect();
    // every p/6 with 2p/6 ≡ 1/3 (mod 1)
    let expected: Vec<Ratio<u64>> = (0..6u64)
        .filter(|p| (2 * p) % 6 == 2)
        .map(|p| Ratio::new(p, 6))
        .collect();
    assert_eq!(got, expected);
    assert_eq!(expected, vec![Ratio::new(1, 6), Ratio::new(2, 3)]);
}

#[test]
fn two_cycle_average_of_doubling() {
    let d = SystemSpec::doubling(2).unwrap();
    let x = Point::rational(1, 3).unwrap();
    assert_eq!(
        birkhoff_average(&d, &Observable::CosCircle, &x, 2).unwrap(),
        -0.5
    );
    let t = trace(&d, &Observable::CosCircle, &x, 1000, &dense(2)).unwrap();
    assert_eq!(oscillation(&t, 2).unwrap(), 0.0);
    assert!(t.values.iter().all(|v| *v == -0.5));
}

#[test]
fn rotation_average_against_direct_summation() {
    let theta = 0.4142135623;
    let r = SystemSpec::rotation(theta).unwrap();
    let t = trace(
        &r,
        &Observable::CosCircle,
        &Point::circle(0.0).unwrap(),
        100_000,
        &CheckpointPolicy::Dyadic,
    )
    .unwrap();
    // direct oracle: x_j = jθ mod 1 from the integer j, naive summation
    let direct: f64 = (0..100_000u64)
        .map(|j| (std::f64::consts::TAU * (j as f64 * theta).fract()).cos())
        .sum::<f64>()
        / 100_000.0;
    assert!((t.final_value() - direct).abs() < 1e-9);
    assert!(t.final_value().abs() < 0.01);
}

#[test]
fn harmonic_irregular_word_rescan() {
    let cap = 1 << 14;
    let built = harmonic_word(1.0, cap);
    let ones = ones_prefix(built.point.as_word().unwrap(), cap);
    let t = trace(
        &shift2(),
        &Observable::Coordinate0,
        &built.point,
        cap as u64,
        &dense(1),
    )
    .unwrap();
    for (n, psi) in t.rows() {
        assert_eq!(psi, ones[n as usize] as f64 / n as f64);
    }
    let (lo, _, hi, hi_at) = extremes(1, cap, |n| ones[n] as f64 / n as f64);
    let b = tail_bounds(&t, 1).unwrap();
    assert_eq!((b.lower, b.upper), (lo, hi));
    // the greedy construction with δ_k = 1/(k+1) peaks at 4/5 within 2^14 symbols
    assert_eq!(lo, 0.0);
    assert_eq!(hi, 0.8);
    assert_eq!(hi_at, 1620);
    assert!(oscillation(&t, 1).unwrap() >= 0.8);
    assert!(!lambda_membership(&t, &LambdaQuery::new(1, 0.1, cap as u64).unwrap()).unwrap());
}

#[test]
fn switch_signatures_follow_the_tolerances() {
    let cap = 1 << 14;
    let built = harmonic_word(1.0, cap);
    let ones = ones_prefix(built.point.as_word().unwrap(), cap);
    let family = [Observable::Coordinate0];
    let sw = &built.switches;
    for (i, pair) in sw.windows(2).enumerate() {
        let a = empirical_signature(&shift2(), &built.point, pair[0] as u64, &family).unwrap();
        let b = empirical_signature(&shift2(), &built.point, pair[1] as u64, &family).unwrap();
        assert_eq!(a[0], ones[pair[0]] as f64 / pair[0] as f64);
        assert_eq!(b[0], ones[pair[1]] as f64 / pair[1] as f64);
        // switch i happens once the frequency is within δ of its target;
        // α-blocks and β-blocks of cycle k share δ_k
        let delta = |j: usize| 1.0 / (j / 2 + 1) as f64;
        let gap = signature_distance(&a, &b);
        assert!(
            gap >= 1.0 - delta(i) - delta(i + 1) - 1e-15,
            "switches {pair:?}: {gap}"
        );
    }
}

#[test]
fn e_sets_at_an_irregular_word() {
    // δ_k = 0.09/(k+1): the first switch lands at frequency 0.95 under
    // δ = 0.1, which is not strictly within 1/20 of 1
    let cap = 1 << 14;
    let built = harmonic_word(0.09, cap);
    let t = trace(
        &shift2(),
        &Observable::Coordinate0,
        &built.point,
        cap as u64,
        &dense(21),
    )
    .unwrap();
    assert!(e_set_membership(&t, 0.0, 20).unwrap());
    assert!(e_set_membership(&t, 1.0, 20).unwrap());
    let ones = ones_prefix(built.point.as_word().unwrap(), cap);
    let near = |target: f64| (21..=cap).any(|n| (ones[n] as f64 / n as f64 - target).abs() < 0.05);
    assert!(near(0.0) && near(1.0));
}

#[test]
fn stable_tail_criterion_on_the_shift() {
    let s = shift2();
    let sampler = |w: &str| {
        DenseSampler::new(
            s.clone(),
            SamplerStrategy::StableTail {
                word: PeriodicWord::parse("", w).unwrap(),
                prefix_len: 5,
            },
        )
    };
    let v = criterion_check(
        &s,
        &Observable::Coordinate0,
        &sampler("0"),
        &sampler("1"),
        32,
        10_000,
        None,
    )
    .unwrap();
    // all 32 prefixes of length 5: Σ ones = 80; tail maxima are ones/5000
    // for the 0-tail and (ones + 9995)/10^4 for the 1-tail
    let alpha: f64 = (0..32u32)
        .map(|p| p.count_ones() as f64 / 5000.0)
        .sum::<f64>()
        / 32.0;
    let beta: f64 = (0..32u32)
        .map(|p| (p.count_ones() as f64 + 9995.0) / 10_000.0)
        .sum::<f64>()
        / 32.0;
    assert!((v.alpha_hat - alpha).abs() < 1e-15);
    assert!((v.beta_hat - beta).abs() < 1e-15);
    assert!((v.alpha_hat - 5e-4).abs() < 1e-15);
    assert!((v.epsilon - (beta - alpha) / 6.0).abs() < 1e-15);
    assert!((v.epsilon - 1.0 / 6.0).abs() < 2e-4);
    assert_eq!(v.verdict, Verdict::HypothesesSupported);
}

#[test]
fn doubling_criterion_matches_closed_forms() {
    let d = SystemSpec::doubling(2).unwrap();
    let sampler = |t| {
        DenseSampler::new(
            d.clone(),
            SamplerStrategy::PreimageTree {
                target: t,
                depth: 10,
            },
        )
    };
    let h = 20_000u64;
    let a = sampler(Point::rational(0, 1).unwrap());
    let b = sampler(Point::rational(1, 3).unwrap());
    let v = criterion_check(&d, &Observable::CosCircle, &a, &b, 16, h, None).unwrap();
    // after 10 transient steps the orbit sits on 0 (cos = 1) or on the
    // 2-cycle {1/3, 2/3} (cos = −1/2)
    for row in &v.samples {
        let r = row.point.as_rational().unwrap();
        let (mut p, q) = (*r.numer(), *r.denom());
        let mut transient = 0.0;
        for _ in 0..10 {
            transient += (std::f64::consts::TAU * p as f64 / q as f64).cos();
            p = (2 * p) % q;
        }
        let tail = if row.class == 'A' { 1.0 } else { -0.5 };
        let best = (h / 2..=h)
            .map(|n| (transient + tail * (n - 10) as f64) / n as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((row.value - best).abs() < 1e-12, "{row:?} vs {best}");
    }
    assert_eq!(v.verdict, Verdict::HypothesesSupported);
}

#[test]
fn doubling_probe_escapers_replay() {
    let d = SystemSpec::doubling(2).unwrap();
    let q = LambdaQuery::new(50, 0.25, 20_000).unwrap();
    let r = escaper_probe(&d, &Observable::CosCircle, &Cover::dyadic(8), &q, 64, 3).unwrap();
    assert_eq!(r.fraction, 1.0);
    for e in &r.escapers {
        assert!(baire::replay_escaper(&r, e).unwrap());
        let t = trace(&d, &Observable::CosCircle, &e.point, q.horizon, &dense(q.n)).unwrap();
        assert!(oscillation(&t, q.n).unwrap() > q.epsilon);
        let cell = &r.cells[e.cell as usize];
        assert_eq!(cell.verdict, CellVerdict::Escaper { sample: e.sample });
        assert!(d.distance(&cell.center, &e.point).unwrap() <= cell.radius);
    }
}

#[test]
fn rotation_control_probe_scans_clean() {
    let r = SystemSpec::rotation(golden()).unwrap();
    let q = LambdaQuery::new(1000, 0.2, 20_000).unwrap();
    let report = escaper_probe(&r, &Observable::CosCircle, &Cover::dyadic(5), &q, 4, 11).unwrap();
    assert_eq!(report.fraction, 0.0);
    assert!(report
        .cells
        .iter()
        .all(|c| c.verdict == CellVerdict::Exhausted));
}

#[test]
fn symbol_diag_products_explicitly() {
    let s = shift2();
    let x = Point::word("", "0").unwrap();
    let spec = SubadditiveSpec::CocycleLogNorm {
        cocycle: symbol_diag(),
    };
    let v = subadditive_value(&spec, &s, &x, 8).unwrap();
    // diag(2,1/2)^8 = diag(256, 1/256)
    assert!((v - 256f64.ln()).abs() < 1e-13);
    assert!((v - direct_log_norm(&symbol_diag(), &s, &x, 8)).abs() < 1e-13);
}

#[test]
fn symbol_diag_first_integral_by_diagonal_arithmetic() {
    let s = shift2();
    let x = Point::word("", "01").unwrap();
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    // φ_n at (01)^∞ and at (10)^∞ from symbol counts
    let m = |first_one: bool, n_max: u64| {
        (1..=n_max)
            .map(|n| {
                let ones = if first_one { n.div_ceil(2) } else { n / 2 };
                ((n - ones) as f64 * l2 + ones as f64 * l3) / n as f64
            })
            .fold(f64::INFINITY, f64::min)
    };
    let fi = first_integral_deviation(&symbol_diag(), &s, &x, 50).unwrap();
    assert!((fi.deviation - (m(false, 50) - m(true, 49))).abs() < 1e-14);
    assert!((fi.envelope - (l3 + l3) / 50.0).abs() < 1e-15);
    assert!(fi.holds);
}

#[test]
fn schrodinger_regression_baseline() {
    let s = SystemSpec::rotation(golden()).unwrap();
    let c = CocycleSpec::QuasiPeriodicSchrodinger {
        energy: 0.0,
        coupling: 1.5,
    };
    let spec = SubadditiveSpec::CocycleLogNorm { cocycle: c.clone() };
    let x = Point::circle(0.0).unwrap();
    let m = m_phi_estimate(&spec, &s, &x, 1000).unwrap();
    assert!(m > 0.0);
    assert!(
        (m - 0.368_999_337_624_798_75).abs() < 1e-12,
        "baseline moved: {m:?}"
    );
    // second implementation: unnormalized products with SVD norms
    let renorm = normalized_values(&spec, &s, &x, 60).unwrap();
    for n in 1..=60u64 {
        let direct = direct_log_norm(&c, &s, &x, n) / n as f64;
        assert!((renorm[n as usize - 1] - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }
    let m30 = m_phi_estimate(&spec, &s, &x, 30).unwrap();
    let d30 = (1..=30u64)
        .map(|n| direct_log_norm(&c, &s, &x, n) / n as f64)
        .fold(f64::INFINITY, f64::min);
    assert!((m30 - d30).abs() < 1e-12);
}

#[test]
fn lyapunov_gap_block_arithmetic() {
    let built = harmonic_word(0.1, 1 << 16);
    let s = shift2();
    let g = lyapunov_gap(&symbol_diag(), &s, &built.point, 1 << 10, 1 << 16).unwrap();
    let ones = ones_prefix(built.point.as_word().unwrap(), 1 << 16);
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    let (lo, lo_at, hi, hi_at) = extremes(1 << 10, 1 << 16, |n| {
        ((n as u64 - ones[n]) as f64 * l2 + ones[n] as f64 * l3) / n as f64
    });
    assert!((g.lower - lo).abs() < 1e-12 && (g.upper - hi).abs() < 1e-12);
    assert_eq!((g.lower_at, g.upper_at), (lo_at as u64, hi_at as u64));
    assert!(g.lower <= l2 + 0.05 && g.upper >= l3 - 0.05);
    // the bottom exponent mirrors the top one for reciprocal diagonals
    let dual = smallest_exponent_gap(&symbol_diag(), &s, &built.point, 1 << 10, 1 << 16).unwrap();
    assert!((dual.lower + g.upper).abs() < 1e-12 && (dual.upper + g.lower).abs() < 1e-12);
}

#[test]
fn brin_katok_block_arithmetic() {
    let built = harmonic_word(0.1, 1 << 16);
    let s = shift2();
    let m = Measure::bernoulli(vec![0.3, 0.7]).unwrap();
    let t = brin_katok_trace(&s, &m, &built.point, 1 << 14).unwrap();
    let ones = ones_prefix(built.point.as_word().unwrap(), 1 << 14);
    let (a, b) = (-(0.3f64.ln()), -(0.7f64.ln()));
    for (n, v) in t.rows() {
        let n = n as usize;
        let block = ((n as u64 - ones[n]) as f64 * a + ones[n] as f64 * b) / n as f64;
        assert!((v - block).abs() < 1e-14);
    }
    // over all n ≤ 2^14 both neighborhoods are visited; the 1-block that
    // reaches −log 0.3 − 0.05 from n ≥ 2^10 only closes after 2^14
    let (lo, hi) = t.tail_bounds(1).unwrap();
    assert!(lo <= b + 0.05 && hi >= a - 0.05);
    let (_, late_hi) = t.tail_bounds(1 << 10).unwrap();
    assert!(late_hi < a - 0.05);
    let fixed = brin_katok_trace(&s, &m, &Point::word("", "0").unwrap(), 100).unwrap();
    assert!((fixed.values[99] - 1.20397).abs() < 1e-5);
}

#[test]
fn viana_first_step() {
    let v = SystemSpec::viana(2, 1.9, 0.01).unwrap();
    let y = iterate(&v, &Point::cylinder(0.0, 0.0).unwrap(), 1).unwrap();
    let c = y.coords().unwrap();
    // a0 + α sin 0 − 0² = a0
    assert_eq!((c[0].value, c[1].value), (0.0, 1.9));
}
