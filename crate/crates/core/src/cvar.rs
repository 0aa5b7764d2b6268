//! Convex CVaR approximation solved by bisection on the risk level `s`.
//!
//! For a level `s` and hypothesis `k`, with `Z = (−1)^k ⟨θ, Φ(y)⟩` positive on
//! errors, the surrogate constraint is `G_k ≤ 0` where
//!
//! ```text
//! G_k(s, θ, β, λ) = s β + λ ρ̄_k + (λ ε_k / n) Σ_i log (1/m) Σ_j exp([Z_ij − β]_+ / (λ ε_k))
//! ```
//!
//! and `T(s) = min_θ max_k min_{β ≤ 0, λ > 0} G_k`. Whenever `T(s) ≤ 0` the
//! detector that attains it has SAA worst-case error at most `s` for both
//! hypotheses, so the level found by bisection upper-bounds the exact optimum.
//!
//! The CVaR variant optimizes `θ` over the unit sphere and `β` over `[−B, 0]`;
//! the detector `θ = 0` would otherwise certify every level. The
//! generating-function variant fixes `β = −1` (the hinge `(Z + 1)_+`) and
//! optimizes `θ` over the unit ball.
//!
//! `θ` is found by projected stochastic subgradient on the `τ`-weighted
//! saddle form `Σ_k τ_k G_k`, descending in `(θ, β, ln λ)` and ascending in
//! `τ` on the 2-simplex. Decisions use the deterministic objective: for each
//! candidate `θ` the inner minimum over `(β, λ)` is computed by nested
//! golden-section search, which is exact up to tolerance since `G_k` is
//! jointly convex in `(β, λ)`.

use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Hypothesis;
use crate::numeric::{dot, golden_section, norm2};
use crate::rng;
use crate::saa::SaaInstance;

/// Which surrogate the solver targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Surrogate {
    /// `β_k` optimized, `θ` on the unit sphere.
    Cvar,
    /// `β_k = −1` frozen, `θ` in the unit ball.
    Genfun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgdParams {
    pub iterations: usize,
    /// Centers sampled per hypothesis per step; 0 uses every center.
    pub batch: usize,
    /// Global step constant `c` in `c / √t`.
    pub step: f64,
    /// Independent starting points per evaluation of `T(s)`.
    pub restarts: usize,
}

impl Default for SgdParams {
    fn default() -> Self {
        SgdParams {
            iterations: 300,
            batch: 0,
            step: 0.5,
            restarts: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvarParams {
    pub s_lb: f64,
    pub s_ub: f64,
    /// Bisection stops once `s_ub − s_lb ≤ precision`.
    pub precision: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `β ≥ −beta_bound`; defaults to ten times the largest feature norm.
    pub beta_bound: Option<f64>,
    pub sgd: SgdParams,
    pub seed: u64,
}

impl Default for CvarParams {
    fn default() -> Self {
        CvarParams {
            s_lb: 0.0,
            s_ub: 1.0,
            precision: 1e-2,
            lambda_min: 1e-6,
            lambda_max: 1e4,
            beta_bound: None,
            sgd: SgdParams::default(),
            seed: 0,
        }
    }
}

impl CvarParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.s_lb && self.s_lb < self.s_ub && self.s_ub <= 1.0) {
            return Err(Error::Config(format!(
                "bisection interval must satisfy 0 ≤ s_lb < s_ub ≤ 1, got [{}, {}]",
                self.s_lb, self.s_ub
            )));
        }
        if !(self.precision > 0.0) {
            return Err(Error::Config("bisection precision must be positive".into()));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min < self.lambda_max) {
            return Err(Error::Config("lambda bounds must satisfy 0 < min < max".into()));
        }
        if self.beta_bound.is_some_and(|b| !(b > 0.0)) {
            return Err(Error::Config("beta_bound must be positive".into()));
        }
        if self.sgd.iterations == 0 || self.sgd.restarts == 0 || !(self.sgd.step > 0.0) {
            return Err(Error::Config("sgd needs positive iterations, restarts and step".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvarIterate {
    pub theta: Vec<f64>,
    pub beta: [f64; 2],
    pub lambda: [f64; 2],
    pub tau: [f64; 2],
}

/// One bisection step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub s: f64,
    pub t_value: f64,
    pub s_lb: f64,
    pub s_ub: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvarSolution {
    pub s: f64,
    /// `T(s)` at the returned level.
    pub t_value: f64,
    pub iterate: CvarIterate,
    pub trace: Vec<TraceRecord>,
}

/// Euclidean projection onto the unit ball.
pub fn project_ball(v: &mut [f64]) {
    let n = norm2(v);
    if n > 1.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Radial projection onto the unit sphere; the zero vector maps to the first axis.
pub fn project_sphere(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    } else if let Some(first) = v.first_mut() {
        *first = 1.0;
    }
}

/// Projection onto `[−bound, 0]`.
pub fn project_beta(beta: f64, bound: f64) -> f64 {
    beta.clamp(-bound, 0.0)
}

/// Projection onto `[lo, hi]`.
pub fn project_lambda(lambda: f64, lo: f64, hi: f64) -> f64 {
    lambda.clamp(lo, hi)
}

/// Euclidean projection onto `{τ ≥ 0, τ_1 + τ_2 = 1}`.
pub fn project_simplex2(tau: [f64; 2]) -> [f64; 2] {
    let first = ((tau[0] - tau[1] + 1.0) / 2.0).clamp(0.0, 1.0);
    [first, 1.0 - first]
}

/// Per-hypothesis scores `Z_ij = (−1)^k ⟨θ, F_ij⟩`, positive on errors.
fn error_scores(inst: &SaaInstance, k: Hypothesis, theta: &[f64]) -> Vec<f64> {
    let sign = k.error_sign();
    inst.block(k).features.iter().map(|f| sign * dot(theta, f)).collect()
}

/// `G_k` for precomputed scores.
fn g_value(s: f64, beta: f64, lambda: f64, rho_bar: f64, epsilon: f64, scores: &[f64], m: usize) -> f64 {
    let le = lambda * epsilon;
    let n = scores.len() / m;
    let mut total = 0.0;
    for row in scores.chunks(m) {
        let vmax = row.iter().map(|z| (z - beta).max(0.0)).fold(0.0, f64::max);
        let mean: f64 = row.iter().map(|z| (((z - beta).max(0.0) - vmax) / le).exp()).sum::<f64>() / m as f64;
        total += vmax / le + mean.ln();
    }
    s * beta + lambda * rho_bar + le * total / n as f64
}

/// Golden-section iteration counts for the inner `(β, λ)` search.
#[derive(Clone, Copy)]
struct Accuracy {
    beta: usize,
    lambda: usize,
}

/// Used for every reported value.
const FINE: Accuracy = Accuracy { beta: 60, lambda: 64 };
/// Used to compare trial moves while polishing.
const COARSE: Accuracy = Accuracy { beta: 24, lambda: 24 };

/// `min_λ G_k` for fixed `β`, including the limits at both ends of the half-line.
#[allow(clippy::too_many_arguments)]
fn min_over_lambda(
    s: f64,
    beta: f64,
    params: &CvarParams,
    rho_bar: f64,
    epsilon: f64,
    scores: &[f64],
    m: usize,
    iters: usize,
) -> (f64, f64) {
    let n = scores.len() / m;
    let hinge = |z: f64| (z - beta).max(0.0);
    let zero_limit = s * beta
        + scores
            .chunks(m)
            .map(|row| row.iter().map(|&z| hinge(z)).fold(0.0, f64::max))
            .sum::<f64>()
            / n as f64;
    let (u, v) = golden_section(
        |u| g_value(s, beta, u.exp(), rho_bar, epsilon, scores, m),
        params.lambda_min.ln(),
        params.lambda_max.ln(),
        iters,
    );
    let mut best = (v, u.exp());
    if zero_limit <= best.0 {
        best = (zero_limit, 0.0);
    }
    if rho_bar == 0.0 {
        let mean = s * beta + scores.iter().map(|&z| hinge(z)).sum::<f64>() / scores.len() as f64;
        if mean < best.0 {
            best = (mean, f64::INFINITY);
        }
    }
    best
}

/// `min_{β, λ} G_k(s, θ, β, λ)`; returns `(value, β, λ)` with `λ ∈ {0, ∞}` for the limits.
#[allow(clippy::too_many_arguments)]
fn inner_min(
    s: f64,
    inst: &SaaInstance,
    k: Hypothesis,
    theta: &[f64],
    surrogate: Surrogate,
    params: &CvarParams,
    beta_bound: f64,
    acc: Accuracy,
) -> (f64, f64, f64) {
    let ball = inst.balls[k.index()];
    let m = inst.block(k).m;
    let scores = error_scores(inst, k, theta);
    match surrogate {
        Surrogate::Genfun => {
            let (v, l) = min_over_lambda(s, -1.0, params, ball.rho_bar, ball.epsilon, &scores, m, acc.lambda);
            (v, -1.0, l)
        }
        Surrogate::Cvar => {
            let (b, v) = golden_section(
                |b| min_over_lambda(s, b, params, ball.rho_bar, ball.epsilon, &scores, m, acc.lambda).0,
                -beta_bound,
                0.0,
                acc.beta,
            );
            // The endpoint β = 0 is common (separable draws) and golden never samples it exactly.
            let at_zero = min_over_lambda(s, 0.0, params, ball.rho_bar, ball.epsilon, &scores, m, acc.lambda);
            let (beta, (value, lambda)) = if at_zero.0 <= v {
                (0.0, at_zero)
            } else {
                (b, min_over_lambda(s, b, params, ball.rho_bar, ball.epsilon, &scores, m, acc.lambda))
            };
            (value, beta, lambda)
        }
    }
}

/// `max_k min_{β, λ} G_k` at a fixed detector, with the minimizing `(β, λ)`.
pub fn surrogate_value(s: f64, inst: &SaaInstance, theta: &[f64], surrogate: Surrogate, params: &CvarParams) -> (f64, CvarIterate) {
    surrogate_value_at(s, inst, theta, surrogate, params, FINE)
}

fn surrogate_value_at(
    s: f64,
    inst: &SaaInstance,
    theta: &[f64],
    surrogate: Surrogate,
    params: &CvarParams,
    acc: Accuracy,
) -> (f64, CvarIterate) {
    let bb = beta_bound(inst, params);
    let r = Hypothesis::BOTH.map(|k| inner_min(s, inst, k, theta, surrogate, params, bb, acc));
    let tau = if r[0].0 >= r[1].0 { [1.0, 0.0] } else { [0.0, 1.0] };
    (
        r[0].0.max(r[1].0),
        CvarIterate {
            theta: theta.to_vec(),
            beta: [r[0].1, r[1].1],
            lambda: [r[0].2, r[1].2],
            tau,
        },
    )
}

fn beta_bound(inst: &SaaInstance, params: &CvarParams) -> f64 {
    params.beta_bound.unwrap_or_else(|| {
        let max_m = inst
            .blocks
            .iter()
            .flat_map(|b| b.big_m.iter().copied())
            .fold(0.0, f64::max);
        10.0 * max_m.max(1e-12)
    })
}

struct SgdState {
    theta: Vec<f64>,
    beta: [f64; 2],
    log_lambda: [f64; 2],
    tau: [f64; 2],
}

/// Value and subgradients of `G_k` over the sampled centers.
struct Gradient {
    value: f64,
    theta: Vec<f64>,
    beta: f64,
    log_lambda: f64,
}

fn gradient(s: f64, inst: &SaaInstance, k: Hypothesis, st: &SgdState, rows: &[usize]) -> Gradient {
    let block = inst.block(k);
    let ball = inst.balls[k.index()];
    let kk = k.index();
    let sign = k.error_sign();
    let lambda = st.log_lambda[kk].exp();
    let beta = st.beta[kk];
    let le = lambda * ball.epsilon;
    let m = block.m;
    let mut g_theta = vec![0.0; st.theta.len()];
    let mut active_mass = 0.0;
    let mut dlambda = 0.0;
    let mut total = 0.0;
    let mut v = vec![0.0; m];
    let mut w = vec![0.0; m];
    for &i in rows {
        for j in 0..m {
            v[j] = (sign * dot(&st.theta, block.feature(i, j)) - beta).max(0.0);
        }
        let vmax = v.iter().copied().fold(0.0, f64::max);
        let mut sum = 0.0;
        for j in 0..m {
            w[j] = ((v[j] - vmax) / le).exp();
            sum += w[j];
        }
        let log_mean = vmax / le + (sum / m as f64).ln();
        total += log_mean;
        let mut weighted_v = 0.0;
        for j in 0..m {
            w[j] /= sum;
            weighted_v += w[j] * v[j];
            // Subgradient 0 at the hinge kink v = 0.
            if v[j] > 0.0 {
                active_mass += w[j];
                for (g, f) in g_theta.iter_mut().zip(block.feature(i, j)) {
                    *g += w[j] * sign * f;
                }
            }
        }
        dlambda += log_mean - weighted_v / le;
    }
    let nb = rows.len() as f64;
    g_theta.iter_mut().for_each(|g| *g /= nb);
    Gradient {
        value: s * beta + lambda * ball.rho_bar + le * total / nb,
        theta: g_theta,
        beta: s - active_mass / nb,
        log_lambda: lambda * (ball.rho_bar + ball.epsilon * dlambda / nb),
    }
}

/// One projected stochastic subgradient run; returns the averaged and last `θ`.
fn sgd_run(s: f64, inst: &SaaInstance, surrogate: Surrogate, params: &CvarParams, start: Vec<f64>, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let bb = beta_bound(inst, params);
    let max_m = inst
        .blocks
        .iter()
        .flat_map(|b| b.big_m.iter().copied())
        .fold(0.0, f64::max)
        .max(1e-12);
    let (ll_lo, ll_hi) = (params.lambda_min.ln(), params.lambda_max.ln());
    let mut st = SgdState {
        theta: start,
        beta: if surrogate == Surrogate::Genfun { [-1.0; 2] } else { [-0.5 * max_m; 2] },
        log_lambda: [0.0; 2],
        tau: [0.5; 2],
    };
    let mut r = rng::rng(seed);
    let iters = params.sgd.iterations;
    let avg_from = iters / 2;
    let mut avg = vec![0.0; st.theta.len()];
    let mut count = 0.0;
    let c = params.sgd.step;
    for t in 1..=iters {
        let eta = c / (t as f64).sqrt();
        let grads = Hypothesis::BOTH.map(|k| {
            let n = inst.block(k).n();
            let rows: Vec<usize> = if params.sgd.batch == 0 || params.sgd.batch >= n {
                (0..n).collect()
            } else {
                sample(&mut r, n, params.sgd.batch).into_vec()
            };
            gradient(s, inst, k, &st, &rows)
        });
        if grads.iter().any(|g| !g.value.is_finite() || g.theta.iter().any(|x| !x.is_finite())) {
            return Err(Error::Divergence(format!(
                "subgradient step {t} at s = {s} produced a non-finite value; reduce the step constant"
            )));
        }
        // θ: diameter 2, gradient scale max ‖F‖.
        let eta_theta = eta * 2.0 / max_m;
        for l in 0..st.theta.len() {
            st.theta[l] -= eta_theta * (st.tau[0] * grads[0].theta[l] + st.tau[1] * grads[1].theta[l]);
        }
        match surrogate {
            Surrogate::Cvar => project_sphere(&mut st.theta),
            Surrogate::Genfun => project_ball(&mut st.theta),
        }
        for k in 0..2 {
            if surrogate == Surrogate::Cvar {
                // β moves on the scale of the scores it competes with.
                st.beta[k] = project_beta(st.beta[k] - eta * max_m * st.tau[k] * grads[k].beta, bb);
            }
            let step = (st.tau[k] * grads[k].log_lambda).clamp(-1.0, 1.0);
            st.log_lambda[k] = project_lambda(st.log_lambda[k] - eta * 2.0 * step, ll_lo, ll_hi);
        }
        st.tau = project_simplex2([st.tau[0] + eta * grads[0].value, st.tau[1] + eta * grads[1].value]);
        if t > avg_from {
            for (a, x) in avg.iter_mut().zip(&st.theta) {
                *a += x;
            }
            count += 1.0;
        }
    }
    avg.iter_mut().for_each(|a| *a /= count);
    match surrogate {
        Surrogate::Cvar => project_sphere(&mut avg),
        Surrogate::Genfun => project_ball(&mut avg),
    }
    Ok((avg, st.theta))
}

/// Starting points: the mean-difference direction, then seeded random directions.
fn starts(inst: &SaaInstance, surrogate: Surrogate, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = inst.feature_dim();
    let mut dir = vec![0.0; dim];
    for k in Hypothesis::BOTH {
        let block = inst.block(k);
        let w = -k.error_sign() / block.len() as f64;
        for f in &block.features {
            for (d, v) in dir.iter_mut().zip(f) {
                *d += w * v;
            }
        }
    }
    let mut out = Vec::with_capacity(restarts);
    if norm2(&dir) > 0.0 {
        project_sphere(&mut dir);
        out.push(dir);
    }
    let mut r = rng::stream(seed, 0xc0de);
    while out.len() < restarts {
        let mut v: Vec<f64> = (0..dim).map(|_| r.sample(StandardNormal)).collect();
        project_sphere(&mut v);
        if surrogate == Surrogate::Genfun {
            let radius: f64 = r.gen_range(0.2..1.0);
            v.iter_mut().for_each(|x| *x *= radius);
        }
        out.push(v);
    }
    out
}

/// Number of best candidates refined by [`polish`].
const POLISHED: usize = 3;

/// Derivative-free local refinement of `θ` on the surrogate: tries `±δ`
/// moves along each axis, halving `δ` whenever none improves. Moves are
/// compared at coarse accuracy; the result is re-scored at full accuracy and
/// the starting point is kept if it remains better.
fn polish(s: f64, inst: &SaaInstance, surrogate: Surrogate, params: &CvarParams, start_value: f64, start: CvarIterate) -> (f64, CvarIterate) {
    let dim = start.theta.len();
    let mut it = start.clone();
    let mut value = surrogate_value_at(s, inst, &it.theta, surrogate, params, COARSE).0;
    let mut delta = 0.25;
    while delta > 1e-4 {
        let mut improved = false;
        for l in 0..dim {
            for sign in [1.0, -1.0] {
                let mut theta = it.theta.clone();
                theta[l] += sign * delta;
                match surrogate {
                    Surrogate::Cvar => project_sphere(&mut theta),
                    Surrogate::Genfun => project_ball(&mut theta),
                }
                let (v, cand) = surrogate_value_at(s, inst, &theta, surrogate, params, COARSE);
                if v < value {
                    value = v;
                    it = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    let polished = surrogate_value(s, inst, &it.theta, surrogate, params);
    if polished.0 < start_value {
        polished
    } else {
        (start_value, start)
    }
}

fn evaluate_t(
    s: f64,
    inst: &SaaInstance,
    surrogate: Surrogate,
    params: &CvarParams,
    pool: &mut Vec<Vec<f64>>,
) -> Result<(f64, CvarIterate)> {
    let mut candidates: Vec<Vec<f64>> = pool.clone();
    if surrogate == Surrogate::Genfun {
        candidates.push(vec![0.0; inst.feature_dim()]);
    }
    for (r, start) in starts(inst, surrogate, params.sgd.restarts, params.seed).into_iter().enumerate() {
        let seed = params.seed ^ ((r as u64 + 1) << 32);
        let (avg, last) = sgd_run(s, inst, surrogate, params, start, seed)?;
        candidates.push(avg);
        candidates.push(last);
    }
    let mut scored = Vec::with_capacity(candidates.len());
    for theta in candidates {
        let (v, it) = surrogate_value(s, inst, &theta, surrogate, params);
        if !v.is_finite() {
            return Err(Error::Divergence(format!("surrogate value at s = {s} is not finite")));
        }
        scored.push((v, it));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.truncate(POLISHED);
    let best = scored
        .into_iter()
        .map(|(v, it)| polish(s, inst, surrogate, params, v, it))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one candidate");
    if !pool.iter().any(|p| p == &best.1.theta) {
        pool.push(best.1.theta.clone());
    }
    Ok(best)
}

/// `T(s)` for the CVaR surrogate and the iterate that attains it.
pub fn subproblem_value_t(s: f64, inst: &SaaInstance, params: &CvarParams) -> Result<(f64, CvarIterate)> {
    subproblem_value(s, inst, Surrogate::Cvar, params)
}

/// `T(s)` for either surrogate.
pub fn subproblem_value(s: f64, inst: &SaaInstance, surrogate: Surrogate, params: &CvarParams) -> Result<(f64, CvarIterate)> {
    params.validate()?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Argument(format!("s must lie in [0, 1], got {s}")));
    }
    evaluate_t(s, inst, surrogate, params, &mut Vec::new())
}

/// Bisection on `s` for the CVaR surrogate.
pub fn bisection_solve(inst: &SaaInstance, params: &CvarParams) -> Result<CvarSolution> {
    bisect(inst, Surrogate::Cvar, params)
}

/// Bisection on `s` with `β` frozen at `−1`.
pub fn genfun_solve(inst: &SaaInstance, params: &CvarParams) -> Result<CvarSolution> {
    bisect(inst, Surrogate::Genfun, params)
}

/// Bisection for the given surrogate.
///
/// Every evaluation of `T` also re-scores the detectors that certified earlier
/// levels, so accepted upper bounds are never undone by an unlucky restart.
pub fn bisect(inst: &SaaInstance, surrogate: Surrogate, params: &CvarParams) -> Result<CvarSolution> {
    params.validate()?;
    let start = Instant::now();
    let mut pool = Vec::new();
    let (mut s_lb, mut s_ub) = (params.s_lb, params.s_ub);
    let (t_ub, mut iterate) = evaluate_t(s_ub, inst, surrogate, params, &mut pool)?;
    if t_ub > 0.0 {
        return Err(Error::InvalidInterval { s_ub, value: t_ub });
    }
    let mut t_value = t_ub;
    let mut trace = vec![TraceRecord {
        iteration: 0,
        s: s_ub,
        t_value: t_ub,
        s_lb,
        s_ub,
        wall_time: start.elapsed().as_secs_f64(),
    }];
    let mut iteration = 0;
    while s_ub - s_lb > params.precision {
        iteration += 1;
        let s = 0.5 * (s_lb + s_ub);
        let (t, it) = evaluate_t(s, inst, surrogate, params, &mut pool)?;
        if t <= 0.0 {
            s_ub = s;
            iterate = it;
            t_value = t;
        } else {
            s_lb = s;
        }
        trace.push(TraceRecord {
            iteration,
            s,
            t_value: t,
            s_lb,
            s_ub,
            wall_time: start.elapsed().as_secs_f64(),
        });
    }
    Ok(CvarSolution {
        s: s_ub,
        t_value,
        iterate,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections() {
        let mut v = vec![2.0, 0.0];
        project_ball(&mut v);
        assert_eq!(v, vec![1.0, 0.0]);
        let mut v = vec![0.3, 0.4];
        project_ball(&mut v);
        assert_eq!(v, vec![0.3, 0.4]);
        project_sphere(&mut v);
        assert!((norm2(&v) - 1.0).abs() < 1e-15);
        assert_eq!(project_beta(0.5, 3.0), 0.0);
        assert_eq!(project_beta(-5.0, 3.0), -3.0);
        assert_eq!(project_simplex2([1.4, -0.4]), [1.0, 0.0]);
        assert_eq!(project_simplex2([0.5, 0.5]), [0.5, 0.5]);
        assert_eq!(project_lambda(0.0, 1e-6, 1e4), 1e-6);
    }

    #[test]
    fn invalid_params_rejected() {
        let p = CvarParams {
            s_lb: 0.5,
            s_ub: 0.5,
            ..CvarParams::default()
        };
        assert!(p.validate().is_err());
        let p = CvarParams {
            precision: 0.0,
            ..CvarParams::default()
        };
        assert!(p.validate().is_err());
    }
}
