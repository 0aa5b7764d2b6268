//! Sample-average approximation shared by the exact and CVaR solvers.
//!
//! For each hypothesis `k` and each center `x_i` the instance holds `m`
//! kernel draws `y_ij ~ N(x_i, ε_k I)`, their features `Φ(y_ij)` and the
//! big-M constants `‖Φ(y_ij)‖₂`. Everything downstream only touches these
//! precomputed arrays.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::features::{Detector, FeatureMap, Hypothesis};
use crate::numeric::{dot, norm2};
use crate::rng;
use crate::sinkhorn::{minimize_dual, DualOptimum, KernelSampler, SinkhornBall};

/// The SAA data of one hypothesis. Draw-level arrays are row-major in `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBlock {
    pub centers: Vec<Vec<f64>>,
    /// Kernel draws `y_ij`; empty when the block was built from features directly.
    pub draws: Vec<Vec<f64>>,
    pub features: Vec<Vec<f64>>,
    pub big_m: Vec<f64>,
    pub m: usize,
}

impl SampleBlock {
    pub fn n(&self) -> usize {
        self.features.len() / self.m
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature(&self, i: usize, j: usize) -> &[f64] {
        &self.features[i * self.m + j]
    }

    fn from_features(features: Vec<Vec<f64>>, m: usize) -> Result<Self> {
        if m == 0 || features.is_empty() || features.len() % m != 0 {
            return Err(Error::Argument(format!(
                "{} feature vectors do not form whole rows of m = {m}",
                features.len()
            )));
        }
        let dim = features[0].len();
        for f in &features {
            check_dim(dim, f.len())?;
        }
        let big_m = features.iter().map(|f| norm2(f)).collect();
        Ok(SampleBlock {
            centers: Vec::new(),
            draws: Vec::new(),
            features,
            big_m,
            m,
        })
    }
}

/// Both hypotheses' SAA data plus their uncertainty sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaaInstance {
    pub blocks: [SampleBlock; 2],
    pub balls: [SinkhornBall; 2],
    pub feature_map: Option<FeatureMap>,
    pub seed: u64,
}

/// Draws the kernel samples for both hypotheses and featurizes them.
///
/// Center `i` of hypothesis `k` uses its own random stream, so adding centers
/// never changes the draws of existing ones.
pub fn build_instance(
    data: [&[Vec<f64>]; 2],
    map: &FeatureMap,
    balls: [SinkhornBall; 2],
    m: usize,
    seed: u64,
) -> Result<SaaInstance> {
    if m == 0 {
        return Err(Error::Argument("m must be at least 1".into()));
    }
    let mut blocks = Vec::with_capacity(2);
    for (k, (centers, ball)) in data.iter().zip(&balls).enumerate() {
        ball.validate()?;
        if centers.is_empty() {
            return Err(Error::Argument(format!("no samples for hypothesis {}", k + 1)));
        }
        check_dim(map.input_dim(), ball.dim)?;
        let rows: Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = centers
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                let sampler = KernelSampler::new(ball, x)?;
                let mut r = rng::stream(seed, rng::center_tag(k, i));
                let ys: Vec<Vec<f64>> = (0..m).map(|_| sampler.draw(&mut r)).collect();
                let fs = map.featurize_batch(&ys)?;
                Ok((ys, fs))
            })
            .collect::<Result<_>>()?;
        let mut draws = Vec::with_capacity(centers.len() * m);
        let mut features = Vec::with_capacity(centers.len() * m);
        for (ys, fs) in rows {
            draws.extend(ys);
            features.extend(fs);
        }
        let big_m = features.iter().map(|f| norm2(f)).collect();
        blocks.push(SampleBlock {
            centers: centers.to_vec(),
            draws,
            features,
            big_m,
            m,
        });
    }
    let [b1, b2]: [SampleBlock; 2] = blocks.try_into().expect("two hypotheses");
    Ok(SaaInstance {
        blocks: [b1, b2],
        balls,
        feature_map: Some(map.clone()),
        seed,
    })
}

impl SaaInstance {
    /// An instance given directly in feature space, `n_k · m` vectors per hypothesis.
    pub fn from_features(features: [Vec<Vec<f64>>; 2], m: usize, balls: [SinkhornBall; 2]) -> Result<Self> {
        let [f1, f2] = features;
        let b1 = SampleBlock::from_features(f1, m)?;
        let b2 = SampleBlock::from_features(f2, m)?;
        check_dim(b1.features[0].len(), b2.features[0].len())?;
        Ok(SaaInstance {
            blocks: [b1, b2],
            balls,
            feature_map: None,
            seed: 0,
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.blocks[0].features[0].len()
    }

    pub fn block(&self, k: Hypothesis) -> &SampleBlock {
        &self.blocks[k.index()]
    }

    /// The same instance with every feature vector multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            for f in &mut b.features {
                f.iter_mut().for_each(|v| *v *= c);
            }
            b.big_m.iter_mut().for_each(|v| *v *= c);
        }
        out
    }

    /// The same draws under different uncertainty-set radii or regularization.
    pub fn with_balls(&self, balls: [SinkhornBall; 2]) -> Self {
        SaaInstance {
            balls,
            ..self.clone()
        }
    }
}

/// Per-hypothesis error bits, `n × m` each.
pub type Pattern = [Vec<Vec<bool>>; 2];

/// Marks draw `(i, j)` of hypothesis `k` as an error when the detector with
/// weights `theta` misclassifies it.
pub fn indicator_pattern(inst: &SaaInstance, theta: &[f64]) -> Result<Pattern> {
    check_dim(inst.feature_dim(), theta.len())?;
    let per = |k: Hypothesis| -> Vec<Vec<bool>> {
        let b = inst.block(k);
        b.features
            .chunks(b.m)
            .map(|row| row.iter().map(|f| k.is_error(dot(theta, f))).collect())
            .collect()
    };
    Ok([per(Hypothesis::H1), per(Hypothesis::H2)])
}

/// The SAA objective at a fixed detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaaValue {
    pub s_hat: f64,
    pub duals: [DualOptimum; 2],
}

/// Worst-case error of each hypothesis for a given error pattern, maximized over `k`.
pub fn pattern_value(inst: &SaaInstance, pattern: &Pattern) -> SaaValue {
    let duals = [0, 1].map(|k| {
        let fractions: Vec<f64> = pattern[k]
            .iter()
            .map(|row| row.iter().filter(|&&b| b).count() as f64 / row.len() as f64)
            .collect();
        minimize_dual(&inst.balls[k], &fractions)
    });
    SaaValue {
        s_hat: duals[0].value.max(duals[1].value),
        duals,
    }
}

/// Evaluates the SAA objective `max_k inf_λ F̃_k(θ, λ)` at `theta`.
pub fn saa_objective(inst: &SaaInstance, theta: &[f64]) -> Result<SaaValue> {
    let norm = norm2(theta);
    if !(norm <= 1.0 + 1e-9) {
        return Err(Error::Argument(format!("‖θ‖₂ must be at most 1, got {norm}")));
    }
    Ok(pattern_value(inst, &indicator_pattern(inst, theta)?))
}

/// Empirical (non-robust) error rates of a detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRisk {
    pub type1: f64,
    pub type2: f64,
    pub max_err: f64,
}

pub fn empirical_risk(det: &Detector, test_1: &[Vec<f64>], test_2: &[Vec<f64>]) -> Result<EmpiricalRisk> {
    if test_1.is_empty() || test_2.is_empty() {
        return Err(Error::Argument("test sets must be nonempty".into()));
    }
    let rate = |k: Hypothesis, xs: &[Vec<f64>]| -> Result<f64> {
        let errors = xs
            .par_iter()
            .map(|x| det.score(x).map(|s| k.is_error(s) as usize))
            .collect::<Result<Vec<_>>>()?;
        Ok(errors.iter().sum::<usize>() as f64 / xs.len() as f64)
    };
    let type1 = rate(Hypothesis::H1, test_1)?;
    let type2 = rate(Hypothesis::H2, test_2)?;
    Ok(EmpiricalRisk {
        type1,
        type2,
        max_err: type1.max(type2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{build_feature_map, FeatureMapSpec};

    fn toy() -> SaaInstance {
        let ball = SinkhornBall::new(0.1, 0.0, 1).unwrap();
        SaaInstance::from_features(
            [
                vec![vec![1.0, 0.2], vec![0.8, -0.1]],
                vec![vec![-1.0, 0.3], vec![-0.5, -0.5]],
            ],
            1,
            [ball, ball],
        )
        .unwrap()
    }

    #[test]
    fn zero_theta_pattern() {
        let inst = toy();
        let p = indicator_pattern(&inst, &[0.0, 0.0]).unwrap();
        assert!(p[0].iter().flatten().all(|b| !b));
        assert!(p[1].iter().flatten().all(|&b| b));
        let v = saa_objective(&inst, &[0.0, 0.0]).unwrap();
        assert_eq!(v.s_hat, 1.0);
    }

    #[test]
    fn separating_theta_scores_zero() {
        let inst = toy();
        let v = saa_objective(&inst, &[1.0, 0.0]).unwrap();
        assert_eq!(v.s_hat, 0.0);
    }

    #[test]
    fn rejects_large_theta() {
        assert!(saa_objective(&toy(), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn tiny_kernel_keeps_draws_at_centers() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(3, 4, 1.0, 2)).unwrap();
        let ball = SinkhornBall::new(1e-12, 0.1, 3).unwrap();
        let xs = vec![vec![0.5, -1.0, 2.0]];
        let inst = build_instance([&xs, &xs], &map, [ball, ball], 1, 4).unwrap();
        assert_eq!(inst.blocks[0].features.len(), 1);
        assert_eq!(inst.blocks[1].features.len(), 1);
        for (y, x) in inst.blocks[0].draws[0].iter().zip(&xs[0]) {
            assert!((y - x).abs() < 1e-4);
        }
    }

    #[test]
    fn empty_data_rejected() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(1, 2, 1.0, 2)).unwrap();
        let ball = SinkhornBall::new(0.1, 0.1, 1).unwrap();
        let xs = vec![vec![0.0]];
        assert!(build_instance([&xs, &[]], &map, [ball, ball], 2, 0).is_err());
    }

    #[test]
    fn zero_detector_risk() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(1, 2, 1.0, 2)).unwrap();
        let det = Detector::new(vec![0.0, 0.0], map).unwrap();
        let r = empirical_risk(&det, &[vec![0.0], vec![1.0]], &[vec![2.0]]).unwrap();
        assert_eq!((r.type1, r.type2, r.max_err), (0.0, 1.0, 1.0));
    }
}
