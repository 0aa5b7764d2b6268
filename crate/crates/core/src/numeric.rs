//! Small numerically-stable helpers shared by the dual evaluations and solvers.

use libm::erfc;

/// Exponent arguments are clipped here before `exp` to avoid overflow.
pub const EXP_CLIP: f64 = 700.0;

/// Stable `log((1/n) Σ exp(v_i))`, max-shifted.
///
/// Returns `-inf` for an empty slice.
pub fn log_mean_exp(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NEG_INFINITY;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values
        .iter()
        .map(|v| (v - max).max(-EXP_CLIP).exp())
        .sum();
    max + (sum / values.len() as f64).ln()
}

/// `log(1 + q (e^a - 1))` for `q ∈ [0, 1]`, `a ≥ 0`, without overflow.
///
/// This is `log E[e^{a·B}]` for a Bernoulli(q) variable `B`.
pub fn log_bernoulli_mgf(q: f64, a: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return a;
    }
    if a > 1.0 {
        a + (q + (1.0 - q) * (-a).exp()).ln()
    } else {
        (q * a.exp_m1()).ln_1p()
    }
}

/// `log(1 − q + q e^a)` given both `q` and an accurate `ln q`, so that
/// probabilities below the `f64` range still contribute.
pub fn log_bernoulli_mgf_ln(q: f64, ln_q: f64, a: f64) -> f64 {
    if ln_q == f64::NEG_INFINITY {
        return 0.0;
    }
    if q >= 1.0 {
        return a;
    }
    log_add_exp((-q).ln_1p(), ln_q + a)
}

/// Stable `log Σ exp(v_i)`; `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    log_mean_exp(values) + (values.len() as f64).ln()
}

/// `log(e^x + e^y)`.
pub fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `ln Φ(x)`, accurate deep into the lower tail where `Φ(x)` underflows.
pub fn log_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return normal_cdf(x).ln();
    }
    // Asymptotic Mills-ratio series; the truncation error is below 1e-12 here.
    let z = -x;
    let r = 1.0 / (z * z);
    let series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    -0.5 * z * z - z.ln() - 0.5 * std::f64::consts::TAU.ln() + series.ln()
}

/// `ln(Φ(hi) − Φ(lo))` for `lo < hi`, accurate in both tails.
pub fn log_normal_mass(lo: f64, hi: f64) -> f64 {
    if hi <= 0.0 {
        let (l_hi, l_lo) = (log_normal_cdf(hi), log_normal_cdf(lo));
        l_hi + (-(l_lo - l_hi).exp_m1()).ln()
    } else if lo >= 0.0 {
        log_normal_mass(-hi, -lo)
    } else {
        (1.0 - normal_cdf(lo) - normal_cdf(-hi)).ln()
    }
}

/// Minimizes a unimodal function on `[lo, hi]` by golden-section search.
///
/// Returns `(argmin, min)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo <= 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes a unimodal function on `[lo, hi]`: a uniform scan of `grid`
/// points locates the basin, then golden-section refines the bracketing cell.
pub fn scan_then_golden<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let grid = grid.max(3);
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f(lo));
    let mut best_idx = 0;
    for idx in 1..grid {
        let x = lo + step * idx as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_idx = idx;
        }
    }
    let a = lo + step * best_idx.saturating_sub(1) as f64;
    let b = (lo + step * (best_idx + 1) as f64).min(hi);
    let refined = golden_section(&mut f, a, b, 200);
    if refined.1 < best.1 {
        refined
    } else {
        best
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
