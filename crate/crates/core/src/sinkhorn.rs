//! Sinkhorn uncertainty sets with quadratic cost `c(x, z) = ½‖x − z‖²`.
//!
//! The worst-case probability of an event `E` over a Sinkhorn ball around an
//! empirical distribution `P̂ = (1/n) Σ δ_{x_i}` has the one-dimensional dual
//!
//! ```text
//! inf_{λ ≥ 0}  λ ρ̄ + (λ ε / n) Σ_i log E_{z ~ Q_{x_i,ε}} exp(1_E(z) / (λ ε))
//! ```
//!
//! where `Q_{x,ε} = N(x, ε I_d)` and `ρ̄` is the dual radius. Since `1_E` is
//! binary the inner expectation only depends on `q_i = Q_{x_i,ε}(E)`, and the
//! summand reduces to `log(1 + q_i (e^{1/(λε)} − 1))`. The objective is
//! convex in `λ`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::features::{Detector, Hypothesis};
use crate::numeric::{golden_section, log_bernoulli_mgf, log_bernoulli_mgf_ln, log_mean_exp, log_normal_mass, log_sum_exp};
use crate::rng;

/// Lower end of the multiplier search box.
pub const LAMBDA_MIN: f64 = 1e-6;
/// Upper end of the multiplier search box.
pub const LAMBDA_MAX: f64 = 1e4;

/// Per-hypothesis uncertainty-set parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinkhornBall {
    /// Entropic regularization, also the kernel variance.
    pub epsilon: f64,
    /// Dual radius.
    pub rho_bar: f64,
    /// Data dimension.
    pub dim: usize,
}

impl SinkhornBall {
    pub fn new(epsilon: f64, rho_bar: f64, dim: usize) -> Result<Self> {
        let ball = SinkhornBall { epsilon, rho_bar, dim };
        ball.validate()?;
        Ok(ball)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.rho_bar >= 0.0 && self.rho_bar.is_finite()) {
            return Err(Error::Config(format!("rho_bar must be nonnegative, got {}", self.rho_bar)));
        }
        if self.dim == 0 {
            return Err(Error::Config("ball dimension must be at least 1".into()));
        }
        Ok(())
    }

    pub fn kernel_std(&self) -> f64 {
        self.epsilon.sqrt()
    }
}

/// Converts a primal Sinkhorn radius into the dual radius,
/// `ρ̄ = ρ + ε (d/2) log(2πε)`, using `∫ e^{−‖x−z‖²/(2ε)} dz = (2πε)^{d/2}`.
pub fn rho_bar_from_rho(rho: f64, epsilon: f64, dim: usize) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::Argument(format!("rho must be nonnegative, got {rho}")));
    }
    if !(epsilon > 0.0) || dim == 0 {
        return Err(Error::Argument("epsilon must be positive and dim at least 1".into()));
    }
    Ok(rho + epsilon * (dim as f64 / 2.0) * (2.0 * std::f64::consts::PI * epsilon).ln())
}

/// Draws from the kernel distribution `Q_{x,ε} = N(x, ε I_d)`.
#[derive(Debug, Clone)]
pub struct KernelSampler {
    center: Vec<f64>,
    std: f64,
}

impl KernelSampler {
    pub fn new(ball: &SinkhornBall, center: &[f64]) -> Result<Self> {
        check_dim(ball.dim, center.len())?;
        Ok(KernelSampler {
            center: center.to_vec(),
            std: ball.kernel_std(),
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.center
            .iter()
            .map(|c| {
                let g: f64 = rng.sample(StandardNormal);
                c + self.std * g
            })
            .collect()
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::Argument("sample count must be at least 1".into()));
        }
        let mut r = rng::rng(seed);
        Ok((0..count).map(|_| self.draw(&mut r)).collect())
    }
}

/// Row error fractions `q_i = (1/m) Σ_j bits_ij`.
pub fn row_fractions(bits: &[Vec<bool>]) -> Vec<f64> {
    bits.iter()
        .map(|row| row.iter().filter(|&&b| b).count() as f64 / row.len().max(1) as f64)
        .collect()
}

/// `λρ̄ + (λε/n) Σ_i log((1/m) Σ_j exp(bits_ij / (λε)))`, evaluated with a
/// max-shifted log-sum-exp.
pub fn dual_objective_bits(ball: &SinkhornBall, lambda: f64, bits: &[Vec<bool>]) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Argument(format!("lambda must be positive, got {lambda}")));
    }
    if bits.is_empty() {
        return Err(Error::Argument("bit matrix has no rows".into()));
    }
    let le = lambda * ball.epsilon;
    let mut buf = Vec::new();
    let total: f64 = bits
        .iter()
        .map(|row| {
            buf.clear();
            buf.extend(row.iter().map(|&b| if b { 1.0 / le } else { 0.0 }));
            log_mean_exp(&buf)
        })
        .sum();
    Ok(lambda * ball.rho_bar + le * total / bits.len() as f64)
}

/// The same dual objective written through the row fractions,
/// `λρ̄ + (λε/n) Σ_i log(1 + q_i (e^{1/(λε)} − 1))`.
pub fn dual_objective_fractions(ball: &SinkhornBall, lambda: f64, fractions: &[f64]) -> f64 {
    let le = lambda * ball.epsilon;
    let a = 1.0 / le;
    let total: f64 = fractions.iter().map(|&q| log_bernoulli_mgf(q, a)).sum();
    lambda * ball.rho_bar + le * total / fractions.len() as f64
}

fn dual_objective_logs(ball: &SinkhornBall, lambda: f64, fractions: &[f64], log_fractions: &[f64]) -> f64 {
    let le = lambda * ball.epsilon;
    let a = 1.0 / le;
    let total: f64 = fractions
        .iter()
        .zip(log_fractions)
        .map(|(&q, &lq)| log_bernoulli_mgf_ln(q, lq, a))
        .sum();
    lambda * ball.rho_bar + le * total / fractions.len() as f64
}

/// Where the dual infimum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Multiplier {
    /// Approached as `λ → 0⁺`; the value is the fraction of rows with any error.
    ZeroLimit,
    Finite(f64),
    /// Approached as `λ → ∞`, only reachable when `ρ̄ = 0`; the value is the mean error.
    InfiniteLimit,
}

impl Multiplier {
    pub fn lambda(self) -> f64 {
        match self {
            Multiplier::ZeroLimit => 0.0,
            Multiplier::Finite(l) => l,
            Multiplier::InfiniteLimit => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualOptimum {
    pub multiplier: Multiplier,
    pub value: f64,
}

/// Golden-section grid size used to bracket the minimizer in `ln λ`.
const LAMBDA_SCAN: usize = 161;

/// Minimizes the dual over `λ ∈ [LAMBDA_MIN, LAMBDA_MAX]` and compares the
/// result with the analytic limits at both ends of the half-line.
pub fn minimize_dual(ball: &SinkhornBall, fractions: &[f64]) -> DualOptimum {
    let logs: Vec<f64> = fractions.iter().map(|q| q.ln()).collect();
    minimize_dual_logs(ball, fractions, &logs)
}

/// [`minimize_dual`] with accurate `ln q_i` supplied alongside, for
/// probabilities that underflow.
fn minimize_dual_logs(ball: &SinkhornBall, fractions: &[f64], log_fractions: &[f64]) -> DualOptimum {
    let n = fractions.len().max(1) as f64;
    let zero_limit = log_fractions.iter().filter(|&&l| l > f64::NEG_INFINITY).count() as f64 / n;
    let mean = fractions.iter().sum::<f64>() / n;

    let mut best = DualOptimum {
        multiplier: Multiplier::ZeroLimit,
        value: zero_limit,
    };
    // Rows are all-or-nothing: F(λ) = λρ̄ + mean, minimized in the limit.
    if zero_limit != mean {
        let f = |u: f64| dual_objective_logs(ball, u.exp(), fractions, log_fractions);
        let (lo, hi) = (LAMBDA_MIN.ln(), LAMBDA_MAX.ln());
        let step = (hi - lo) / (LAMBDA_SCAN - 1) as f64;
        let mut arg = 0;
        let mut min = f64::INFINITY;
        for idx in 0..LAMBDA_SCAN {
            let v = f(lo + step * idx as f64);
            if v < min {
                min = v;
                arg = idx;
            }
        }
        let a = lo + step * arg.saturating_sub(1) as f64;
        let b = (lo + step * (arg + 1) as f64).min(hi);
        let (mut u, mut v) = golden_section(f, a, b, 200);
        let scanned = lo + step * arg as f64;
        if min < v {
            u = scanned;
            v = min;
        }
        if v <= best.value {
            best = DualOptimum {
                multiplier: Multiplier::Finite(u.exp()),
                value: v,
            };
        }
    }
    if ball.rho_bar == 0.0 && mean < best.value {
        best = DualOptimum {
            multiplier: Multiplier::InfiniteLimit,
            value: mean,
        };
    }
    best
}

/// Minimizes `λ ↦ dual_objective_bits` over `λ ≥ 0`.
pub fn optimize_lambda(ball: &SinkhornBall, bits: &[Vec<bool>]) -> Result<DualOptimum> {
    if bits.is_empty() || bits.iter().any(|row| row.is_empty()) {
        return Err(Error::Argument("bit matrix must be nonempty".into()));
    }
    Ok(minimize_dual(ball, &row_fractions(bits)))
}

/// One importance-weighted draw of a worst-case distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub center_index: usize,
    pub z: Vec<f64>,
    pub weight: f64,
    /// Whether the detector errs on `z` under the cloud's hypothesis.
    pub error: bool,
}

/// Self-normalized importance sample of the worst-case distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseCloud {
    pub points: Vec<CloudPoint>,
    pub lambda_star: f64,
    pub num_centers: usize,
}

impl WorstCaseCloud {
    /// Total weight per center; each entry is 1 up to rounding.
    pub fn group_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.num_centers];
        for p in &self.points {
            sums[p.center_index] += p.weight;
        }
        sums
    }

    /// Misclassification probability under the worst-case mixture.
    pub fn weighted_error(&self) -> f64 {
        let total: f64 = self.points.iter().filter(|p| p.error).map(|p| p.weight).sum();
        total / self.num_centers as f64
    }

    /// Misclassification frequency of the same draws with uniform weights.
    pub fn unweighted_error(&self) -> f64 {
        self.points.iter().filter(|p| p.error).count() as f64 / self.points.len() as f64
    }

    /// Writes `center_index, z_1..z_d, weight` rows with a header.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let dim = self.points.first().map_or(0, |p| p.z.len());
        let mut header = vec!["center_index".to_string()];
        header.extend((1..=dim).map(|l| format!("z{l}")));
        header.push("weight".into());
        w.write_record(&header).map_err(csv_err)?;
        for p in &self.points {
            let mut row = vec![p.center_index.to_string()];
            row.extend(p.z.iter().map(|v| v.to_string()));
            row.push(p.weight.to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<cloud csv>", e))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        msg: e.to_string(),
    }
}

/// Recovers the worst-case distribution for `hypothesis` around `centers`.
///
/// Each center gets `samples_per_center` kernel draws weighted by
/// `exp(error / (λ* ε))` and normalized within the center's group.
pub fn worst_case_cloud(
    ball: &SinkhornBall,
    centers: &[Vec<f64>],
    det: &Detector,
    hypothesis: Hypothesis,
    lambda_star: f64,
    samples_per_center: usize,
    seed: u64,
) -> Result<WorstCaseCloud> {
    if !(lambda_star > 0.0) || !lambda_star.is_finite() {
        return Err(Error::Precondition(format!(
            "worst-case distribution needs a positive finite multiplier, got {lambda_star}"
        )));
    }
    if centers.is_empty() || samples_per_center == 0 {
        return Err(Error::Argument("need at least one center and one sample per center".into()));
    }
    let inv_le = 1.0 / (lambda_star * ball.epsilon);
    let groups: Vec<Vec<CloudPoint>> = centers
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let sampler = KernelSampler::new(ball, x)?;
            let mut r = rng::stream(seed, rng::center_tag(hypothesis.index(), i));
            let mut pts = Vec::with_capacity(samples_per_center);
            for _ in 0..samples_per_center {
                let z = sampler.draw(&mut r);
                let error = hypothesis.is_error(det.score(&z)?);
                pts.push(CloudPoint {
                    center_index: i,
                    z,
                    weight: 0.0,
                    error,
                });
            }
            let any_error = pts.iter().any(|p| p.error);
            // Shift by the largest exponent so that exp never overflows.
            let shift = if any_error { inv_le } else { 0.0 };
            let raw: Vec<f64> = pts
                .iter()
                .map(|p| ((if p.error { inv_le } else { 0.0 }) - shift).max(-crate::numeric::EXP_CLIP).exp())
                .collect();
            let total: f64 = raw.iter().sum();
            for (p, w) in pts.iter_mut().zip(raw) {
                p.weight = w / total;
            }
            Ok(pts)
        })
        .collect::<Result<_>>()?;
    Ok(WorstCaseCloud {
        points: groups.into_iter().flatten().collect(),
        lambda_star,
        num_centers: centers.len(),
    })
}

/// A finite union of open intervals on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Sorts and merges the given `(lo, hi)` pairs; endpoints may be infinite.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::Argument(format!("invalid interval ({lo}, {hi})")));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo < last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn whole_line() -> Self {
        IntervalSet {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    /// The half-line `(threshold, ∞)`.
    pub fn above(threshold: f64) -> Self {
        IntervalSet {
            intervals: vec![(threshold, f64::INFINITY)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo < x && x < hi)
    }

    /// `P(E)` for `N(center, std²)`.
    pub fn normal_prob(&self, center: f64, std: f64) -> f64 {
        self.log_normal_prob(center, std).exp().clamp(0.0, 1.0)
    }

    /// `ln P(E)` for `N(center, std²)`, finite even when `P(E)` underflows.
    pub fn log_normal_prob(&self, center: f64, std: f64) -> f64 {
        let logs: Vec<f64> = self
            .intervals
            .iter()
            .map(|&(lo, hi)| log_normal_mass((lo - center) / std, (hi - center) / std))
            .collect();
        log_sum_exp(&logs).min(0.0)
    }

    /// Euclidean distance from `x` to the set; zero inside and on the closure.
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Exact kernel probabilities `q_i = Q_{x_i,ε}(E)` for 1-D centers.
pub fn kernel_probs_1d(ball: &SinkhornBall, centers: &[f64], event: &IntervalSet) -> Vec<f64> {
    let std = ball.kernel_std();
    centers.iter().map(|&x| event.normal_prob(x, std)).collect()
}

/// `ln q_i`, accurate when the kernel mass of the event underflows.
pub fn kernel_log_probs_1d(ball: &SinkhornBall, centers: &[f64], event: &IntervalSet) -> Vec<f64> {
    let std = ball.kernel_std();
    centers.iter().map(|&x| event.log_normal_prob(x, std)).collect()
}

/// `E_{x∼P̂} Var_{Q_{x,ε}}[1_E]` with exact normal probabilities.
pub fn variance_regularizer_1d(ball: &SinkhornBall, centers: &[f64], event: &IntervalSet) -> Result<f64> {
    check_dim(1, ball.dim)?;
    if centers.is_empty() {
        return Err(Error::Argument("no centers".into()));
    }
    let q = kernel_probs_1d(ball, centers, event);
    Ok(q.iter().map(|q| q * (1.0 - q)).sum::<f64>() / q.len() as f64)
}

/// Monte Carlo kernel probabilities for a general event, one seed stream per center.
pub fn kernel_probs_mc<E>(ball: &SinkhornBall, centers: &[Vec<f64>], event: E, mc_count: usize, seed: u64) -> Result<Vec<f64>>
where
    E: Fn(&[f64]) -> bool + Sync,
{
    if centers.is_empty() {
        return Err(Error::Argument("no centers".into()));
    }
    centers
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let sampler = KernelSampler::new(ball, x)?;
            let mut r = rng::stream(seed, rng::center_tag(0, i));
            let hits = (0..mc_count).filter(|_| event(&sampler.draw(&mut r))).count();
            Ok(hits as f64 / mc_count as f64)
        })
        .collect()
}

/// Monte Carlo estimate of `E_{x∼P̂} Var_{Q_{x,ε}}[1_E]`.
///
/// The per-center Bernoulli variance uses the unbiased `q̂(1−q̂)·N/(N−1)`.
pub fn variance_regularizer<E>(ball: &SinkhornBall, centers: &[Vec<f64>], event: E, mc_count: usize, seed: u64) -> Result<f64>
where
    E: Fn(&[f64]) -> bool + Sync,
{
    if mc_count < 2 {
        return Err(Error::Argument("mc_count must be at least 2".into()));
    }
    let q = kernel_probs_mc(ball, centers, event, mc_count, seed)?;
    let correction = mc_count as f64 / (mc_count - 1) as f64;
    Ok(q.iter().map(|q| q * (1.0 - q) * correction).sum::<f64>() / q.len() as f64)
}

/// Worst-case probability of an interval event over the 1-D Sinkhorn ball,
/// with exact kernel probabilities.
pub fn sinkhorn_worst_prob_1d(ball: &SinkhornBall, centers: &[f64], event: &IntervalSet) -> Result<DualOptimum> {
    check_dim(1, ball.dim)?;
    if centers.is_empty() {
        return Err(Error::Argument("no centers".into()));
    }
    let logs = kernel_log_probs_1d(ball, centers, event);
    let probs: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    Ok(minimize_dual_logs(ball, &probs, &logs))
}

/// Worst-case probability of a general event with Monte Carlo kernel probabilities.
pub fn sinkhorn_worst_prob_mc<E>(
    ball: &SinkhornBall,
    centers: &[Vec<f64>],
    event: E,
    mc_count: usize,
    seed: u64,
) -> Result<DualOptimum>
where
    E: Fn(&[f64]) -> bool + Sync,
{
    if mc_count == 0 {
        return Err(Error::Argument("mc_count must be positive".into()));
    }
    Ok(minimize_dual(ball, &kernel_probs_mc(ball, centers, event, mc_count, seed)?))
}

/// Worst-case probability of `E` over the 2-Wasserstein-type ball
/// `{P : inf_γ E_γ[½|x − z|²] ≤ ρ̄}` around the empirical samples.
///
/// The dual `inf_{λ≥0} λρ̄ + (1/n) Σ_i max(1_E(x_i), 1 − λ d(x_i, E)²/2)` is
/// convex and piecewise linear in `λ`, so it is minimized exactly over its
/// breakpoints `λ_i = 2 / d(x_i, E)²` and the two ends of the half-line.
pub fn wasserstein_worst_prob_1d(rho_bar: f64, samples: &[f64], event: &IntervalSet) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Argument("no samples".into()));
    }
    if !(rho_bar >= 0.0) {
        return Err(Error::Argument(format!("rho_bar must be nonnegative, got {rho_bar}")));
    }
    if event.intervals().is_empty() {
        return Ok(0.0);
    }
    let n = samples.len() as f64;
    let dist_sq: Vec<f64> = samples.iter().map(|&x| event.distance(x).powi(2)).collect();
    let empirical = samples.iter().filter(|&&x| event.contains(x)).count() as f64 / n;
    let dual = |lambda: f64| -> f64 {
        let inner: f64 = samples
            .iter()
            .zip(&dist_sq)
            .map(|(&x, &d2)| {
                let inside = if event.contains(x) { 1.0 } else { 0.0 };
                f64::max(inside, 1.0 - lambda * d2 / 2.0)
            })
            .sum();
        lambda * rho_bar + inner / n
    };
    let mut best = dual(0.0);
    for &d2 in &dist_sq {
        if d2 > 0.0 {
            best = best.min(dual(2.0 / d2));
        }
    }
    if rho_bar == 0.0 {
        best = best.min(empirical);
    }
    Ok(best.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(epsilon: f64, rho_bar: f64) -> SinkhornBall {
        SinkhornBall::new(epsilon, rho_bar, 1).unwrap()
    }

    #[test]
    fn rho_bar_conversion_examples() {
        let e = 1.0 / (2.0 * std::f64::consts::PI);
        assert!(rho_bar_from_rho(0.0, e, 2).unwrap().abs() < 1e-15);
        assert!((rho_bar_from_rho(1.0, e, 10).unwrap() - 1.0).abs() < 1e-15);
        // ln(0.2π) = -0.46470802658470014...
        let v = rho_bar_from_rho(0.5, 0.1, 2).unwrap();
        assert!((v - (0.5 + 0.1 * -0.464_708_026_584_700_1)).abs() < 1e-14);
    }

    #[test]
    fn invalid_ball_rejected() {
        assert!(SinkhornBall::new(0.0, 0.1, 1).is_err());
        assert!(SinkhornBall::new(0.1, -0.1, 1).is_err());
        assert!(SinkhornBall::new(0.1, 0.1, 0).is_err());
    }

    #[test]
    fn sampler_is_seeded() {
        let b = SinkhornBall::new(0.3, 0.0, 2).unwrap();
        let s = KernelSampler::new(&b, &[1.0, -1.0]).unwrap();
        assert_eq!(s.sample(5, 9).unwrap(), s.sample(5, 9).unwrap());
        assert_ne!(s.sample(5, 9).unwrap(), s.sample(5, 10).unwrap());
    }

    #[test]
    fn dual_bits_examples() {
        let b = ball(1.0, 0.5);
        let zeros = vec![vec![false; 3]; 2];
        let ones = vec![vec![true; 3]; 2];
        assert!((dual_objective_bits(&b, 0.7, &zeros).unwrap() - 0.35).abs() < 1e-15);
        assert!((dual_objective_bits(&b, 0.7, &ones).unwrap() - 1.35).abs() < 1e-14);
        let one = vec![vec![true, false]];
        let e = std::f64::consts::E;
        let expected = 0.5 + ((1.0 + e) / 2.0).ln();
        assert!((dual_objective_bits(&b, 1.0, &one).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 1.12011).abs() < 1e-5);
        assert!(dual_objective_bits(&b, 0.0, &one).is_err());
    }

    #[test]
    fn fraction_form_matches_bits_form() {
        let b = ball(0.3, 0.2);
        let bits = vec![vec![true, false, false, true], vec![false; 4], vec![true; 4]];
        let q = row_fractions(&bits);
        for &l in &[1e-3, 0.1, 1.0, 30.0] {
            let x = dual_objective_bits(&b, l, &bits).unwrap();
            let y = dual_objective_fractions(&b, l, &q);
            assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()), "lambda {l}: {x} vs {y}");
        }
    }

    #[test]
    fn optimize_lambda_trivial_patterns() {
        let b = ball(0.1, 0.3);
        let zeros = optimize_lambda(&b, &[vec![false, false]]).unwrap();
        assert_eq!(zeros.value, 0.0);
        let ones = optimize_lambda(&b, &[vec![true, true]]).unwrap();
        assert_eq!(ones.value, 1.0);
        assert_eq!(ones.multiplier, Multiplier::ZeroLimit);
    }

    #[test]
    fn zero_radius_reaches_infinite_limit() {
        let b = ball(0.1, 0.0);
        let opt = optimize_lambda(&b, &[vec![true, false, false, false]]).unwrap();
        assert_eq!(opt.multiplier, Multiplier::InfiniteLimit);
        assert!((opt.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cloud_rejects_nonpositive_multiplier() {
        use crate::features::{build_feature_map, FeatureMapSpec};
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(1, 2, 1.0, 0)).unwrap();
        let det = Detector::new(vec![0.0, 0.0], map).unwrap();
        let b = ball(0.1, 0.1);
        let r = worst_case_cloud(&b, &[vec![0.0]], &det, Hypothesis::H1, 0.0, 4, 1);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn interval_set_merges_and_measures() {
        let e = IntervalSet::new(vec![(2.0, 3.0), (0.0, 1.0), (0.5, 1.5)]).unwrap();
        assert_eq!(e.intervals(), &[(0.0, 1.5), (2.0, 3.0)]);
        assert!(e.contains(1.2) && !e.contains(1.7) && !e.contains(0.0));
        assert!((e.distance(-1.0) - 1.0).abs() < 1e-15);
        assert!((e.distance(1.6) - 0.1).abs() < 1e-12);
        assert_eq!(e.distance(2.5), 0.0);
        assert!((IntervalSet::above(0.0).normal_prob(0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((IntervalSet::whole_line().normal_prob(3.0, 0.1) - 1.0).abs() < 1e-15);
        assert!(IntervalSet::new(vec![(1.0, 1.0)]).is_err());
    }

    #[test]
    fn worst_prob_edge_cases() {
        let b = ball(0.2, 0.0);
        let centers = [0.0, 0.7];
        let q = kernel_probs_1d(&b, &centers, &IntervalSet::above(0.0));
        let mean = (q[0] + q[1]) / 2.0;
        let r = sinkhorn_worst_prob_1d(&b, &centers, &IntervalSet::above(0.0)).unwrap();
        assert!((r.value - mean).abs() < 1e-12);
        let b = ball(0.2, 0.4);
        let r = sinkhorn_worst_prob_1d(&b, &centers, &IntervalSet::whole_line()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_edge_cases() {
        let samples = [-1.0, 0.5, 2.0];
        let e = IntervalSet::above(0.0);
        assert!((wasserstein_worst_prob_1d(0.0, &samples, &e).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(wasserstein_worst_prob_1d(0.3, &samples, &IntervalSet::empty()).unwrap(), 0.0);
        // Moving the mass at -1 into E costs ½ per unit, ½ unit available: exactly enough.
        let v = wasserstein_worst_prob_1d(0.25, &[-1.0, 2.0], &e).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let v = wasserstein_worst_prob_1d(0.125, &[-1.0, 2.0], &e).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn exact_variance_regularizer() {
        let b = ball(1.0, 0.0);
        let e = IntervalSet::above(0.0);
        assert!((variance_regularizer_1d(&b, &[0.0], &e).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(variance_regularizer_1d(&b, &[0.0, 5.0], &IntervalSet::whole_line()).unwrap(), 0.0);
    }
}
