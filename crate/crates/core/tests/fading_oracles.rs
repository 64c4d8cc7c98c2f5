//! Samplers against independently computed distribution functions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Gamma};

use pdcsim::fading::{nakagami_power_gain, shadowed_rician_power_gain, ShadowedRicianParams};

/// Kummer's confluent hypergeometric 1F1(a; 1; z) by its power series.
fn hyp1f1_b1(a: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 0..2000 {
        let k = k as f64;
        term *= (a + k) * z / ((k + 1.0) * (k + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Power-gain density of the shadowed-Rician model.
fn sr_pdf(p: &ShadowedRicianParams, x: f64) -> f64 {
    let (b0, m, om) = (p.b0, p.m, p.omega);
    let scale = (2.0 * b0 * m / (2.0 * b0 * m + om)).powf(m) / (2.0 * b0);
    let delta = om / (2.0 * b0 * (2.0 * b0 * m + om));
    scale * (-x / (2.0 * b0)).exp() * hyp1f1_b1(m, delta * x)
}

/// Composite Simpson rule on [a, b].
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + inner + f(b)) * h / 3.0
}

fn empirical_cdf(samples: &[f64], x: f64) -> f64 {
    samples.iter().filter(|&&s| s <= x).count() as f64 / samples.len() as f64
}

#[test]
fn shadowed_rician_density_is_normalized() {
    let p = ShadowedRicianParams::AVERAGE_SHADOWING;
    let total = simpson(|x| sr_pdf(&p, x), 0.0, 40.0, 40_000);
    let mean = simpson(|x| x * sr_pdf(&p, x), 0.0, 40.0, 40_000);
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    assert!((mean - (2.0 * p.b0 + p.omega)).abs() < 1e-5, "{mean}");
}

#[test]
fn shadowed_rician_sampler_matches_density() {
    let p = ShadowedRicianParams::AVERAGE_SHADOWING;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 200_000;
    let samples: Vec<f64> = (0..n).map(|_| shadowed_rician_power_gain(&p, &mut rng).unwrap()).collect();
    // Two-sided KS band at 99.9% is 1.95 / sqrt(n).
    let band = 1.95 / (n as f64).sqrt();
    for x in [0.05, 0.2, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0] {
        let exact = simpson(|t| sr_pdf(&p, t), 0.0, x, 4000);
        let emp = empirical_cdf(&samples, x);
        assert!((emp - exact).abs() < band, "x={x}: empirical {emp} exact {exact}");
    }
}

#[test]
fn heavy_shadowing_also_matches() {
    let p = ShadowedRicianParams { b0: 0.063, m: 0.739, omega: 8.97e-4 };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let samples: Vec<f64> = (0..n).map(|_| shadowed_rician_power_gain(&p, &mut rng).unwrap()).collect();
    let band = 1.95 / (n as f64).sqrt();
    for x in [0.01, 0.05, 0.126, 0.3] {
        let exact = simpson(|t| sr_pdf(&p, t), 0.0, x, 4000);
        assert!((empirical_cdf(&samples, x) - exact).abs() < band, "x={x}");
    }
}

#[test]
fn nakagami_sampler_matches_gamma_cdf() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200_000;
    let band = 1.95 / (n as f64).sqrt();
    for m in [0.5, 1.0, 2.0, 3.0, 7.5] {
        let samples: Vec<f64> = (0..n).map(|_| nakagami_power_gain(m, &mut rng).unwrap()).collect();
        let law = Gamma::new(m, m).unwrap();
        for x in [0.1, 0.5, 1.0, 1.5, 3.0] {
            assert!((empirical_cdf(&samples, x) - law.cdf(x)).abs() < band, "m={m} x={x}");
        }
    }
}
