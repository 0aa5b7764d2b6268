//! Test-side reference computations, written independently of the library's
//! solvers. Only data generation and featurization are borrowed from it.

#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use srht::features::{build_feature_map, FeatureMapSpec};
use srht::saa::{build_instance, SaaInstance};
use srht::sinkhorn::SinkhornBall;

/// `ln(1 − p + p·e^a)` for `a ≥ 0`, without overflow.
fn log_mix(p: f64, a: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if p == 1.0 {
        a
    } else {
        a + (p + (1.0 - p) * (-a).exp()).ln()
    }
}

/// `λρ̄ + (λε/n) Σ_i ln(1 − p_i + p_i e^{1/(λε)})`.
pub fn dual_at(epsilon: f64, rho_bar: f64, fractions: &[f64], lambda: f64) -> f64 {
    let le = lambda * epsilon;
    let n = fractions.len() as f64;
    lambda * rho_bar + le * fractions.iter().map(|&p| log_mix(p, 1.0 / le)).sum::<f64>() / n
}

/// Infimum of the dual over `λ > 0`, by a log-spaced scan followed by
/// ternary search (the dual is convex in `λ`), compared with both limits.
pub fn dual_inf(epsilon: f64, rho_bar: f64, fractions: &[f64]) -> f64 {
    let n = fractions.len() as f64;
    let zero_limit = fractions.iter().filter(|&&p| p > 0.0).count() as f64 / n;
    let mean = fractions.iter().sum::<f64>() / n;
    let mut best = zero_limit;
    if rho_bar == 0.0 {
        best = best.min(mean);
    }
    let grid = 400;
    let (lo, hi) = (-20.0f64, 20.0f64);
    let at = |i: usize| (lo + (hi - lo) * i as f64 / grid as f64).exp();
    let mut arg = 0;
    let mut min = f64::INFINITY;
    for i in 0..=grid {
        let v = dual_at(epsilon, rho_bar, fractions, at(i));
        if v < min {
            min = v;
            arg = i;
        }
    }
    let (mut a, mut b) = (at(arg.saturating_sub(1)), at((arg + 1).min(grid)));
    for _ in 0..200 {
        let c = a + (b - a) / 3.0;
        let d = b - (b - a) / 3.0;
        if dual_at(epsilon, rho_bar, fractions, c) <= dual_at(epsilon, rho_bar, fractions, d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.min(min).min(dual_at(epsilon, rho_bar, fractions, 0.5 * (a + b)))
}

/// Per-center error fractions of one hypothesis. The detector decides H1
/// when `⟨θ, F⟩ ≥ 0`, so H1 draws err below zero and H2 draws at or above it.
pub fn error_fractions(inst: &SaaInstance, k: usize, theta: &[f64]) -> Vec<f64> {
    let b = &inst.blocks[k];
    b.features
        .chunks(b.m)
        .map(|row| {
            let errs = row
                .iter()
                .filter(|f| {
                    let score: f64 = f.iter().zip(theta).map(|(a, b)| a * b).sum();
                    if k == 0 {
                        score < 0.0
                    } else {
                        score >= 0.0
                    }
                })
                .count();
            errs as f64 / b.m as f64
        })
        .collect()
}

/// Worst-case SAA error of the detector `theta`, maximized over hypotheses.
pub fn objective(inst: &SaaInstance, theta: &[f64]) -> f64 {
    (0..2)
        .map(|k| {
            let ball = inst.balls[k];
            dual_inf(ball.epsilon, ball.rho_bar, &error_fractions(inst, k, theta))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Brute-force optimum over `count` uniformly spaced unit directions in a
/// two-dimensional feature space.
pub fn angular_optimum(inst: &SaaInstance, count: usize) -> f64 {
    assert_eq!(inst.blocks[0].features[0].len(), 2);
    (0..count)
        .map(|i| {
            let phi = std::f64::consts::TAU * i as f64 / count as f64;
            objective(inst, &[phi.cos(), phi.sin()])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Isotropic Gaussian blobs at `(∓separation, 0)`.
pub fn blobs(seed: u64, separation: f64, sd: f64, n: usize) -> [Vec<Vec<f64>>; 2] {
    let mut r = srht::rng::rng(seed);
    let mut blob = |cx: f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                let a: f64 = r.sample(StandardNormal);
                let b: f64 = r.sample(StandardNormal);
                vec![cx + sd * a, sd * b]
            })
            .collect()
    };
    let first = blob(-separation);
    let second = blob(separation);
    [first, second]
}

/// The small two-dimensional benchmark family: three blob points per
/// hypothesis, a fixed two-feature Gaussian random-feature map and two
/// kernel draws per center.
pub struct SmallFamily {
    pub separation: f64,
    pub sd: f64,
    pub n: usize,
    pub m: usize,
    pub bandwidth: f64,
    pub map_seed: u64,
    pub epsilon: f64,
    pub rho_bar: f64,
}

impl Default for SmallFamily {
    fn default() -> Self {
        SmallFamily {
            separation: 1.0,
            sd: 0.6,
            n: 3,
            m: 2,
            bandwidth: 2.0,
            map_seed: 1,
            epsilon: 0.1,
            rho_bar: 0.1,
        }
    }
}

impl SmallFamily {
    pub fn instance(&self, seed: u64) -> SaaInstance {
        let data = blobs(100 + seed, self.separation, self.sd, self.n);
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(2, 2, self.bandwidth, self.map_seed)).unwrap();
        let ball = SinkhornBall::new(self.epsilon, self.rho_bar, 2).unwrap();
        build_instance([&data[0], &data[1]], &map, [ball, ball], self.m, seed).unwrap()
    }
}

/// An instance given directly by Gaussian feature vectors.
pub fn random_feature_instance(seed: u64, n: usize, m: usize, dim: usize, epsilon: f64, rho_bar: f64) -> SaaInstance {
    let mut r = srht::rng::rng(seed);
    let shift: f64 = r.gen_range(0.0..1.5);
    let features = [0.0, shift].map(|c| {
        (0..n * m)
            .map(|_| {
                (0..dim)
                    .map(|l| {
                        let g: f64 = r.sample(StandardNormal);
                        if l == 0 {
                            c + g
                        } else {
                            0.3 + g
                        }
                    })
                    .collect()
            })
            .collect()
    });
    let ball = SinkhornBall::new(epsilon, rho_bar, dim).unwrap();
    SaaInstance::from_features(features, m, [ball, ball]).unwrap()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}
