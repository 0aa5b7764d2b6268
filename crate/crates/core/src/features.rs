//! Random feature maps `Φ: R^d → R^{D'}` and linear detectors `T(x) = ⟨θ, Φ(x)⟩`.
//!
//! Two constructions are provided:
//!
//! * `gaussian-rff`: random Fourier features `cos(zᵀx + b)` with
//!   `z ~ N(0, bandwidth⁻² I_d)` and `b ~ U[0, 2π)`. These approximate the
//!   Gaussian kernel `exp(-‖x - y‖² / (2 bandwidth²))` up to the factor ½.
//! * `ntk2-softplus`: the two-term tangent features of a width-`D` two-layer
//!   softplus network evaluated at random first-layer weights. For each
//!   neuron `w ~ N(0, I_{d+1})` acting on the augmented input `x̃ = (x, 1)` the
//!   map emits `softplus(wᵀx̃)` followed by `sigmoid(wᵀx̃)·x̃_l` for every
//!   coordinate of `x̃`, giving `D·(d+2)` outputs.
//!
//! Every output coordinate is multiplied by `1/D` or `1/√D` depending on
//! [`Scaling`]. The decision `sign⟨θ, Φ(x)⟩` does not depend on that factor.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numeric::{dot, norm2};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    GaussianRff,
    Ntk2Softplus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// Multiply each feature by `1/D`.
    InvD,
    /// Multiply each feature by `1/√D`.
    #[default]
    InvSqrtD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureMapSpec {
    pub kind: FeatureKind,
    pub input_dim: usize,
    pub num_features: usize,
    /// Length scale of the Gaussian kernel. Ignored by `ntk2-softplus`.
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
    #[serde(default)]
    pub scaling: Scaling,
    pub seed: u64,
}

fn default_bandwidth() -> f64 {
    1.0
}

impl FeatureMapSpec {
    pub fn gaussian_rff(input_dim: usize, num_features: usize, bandwidth: f64, seed: u64) -> Self {
        FeatureMapSpec {
            kind: FeatureKind::GaussianRff,
            input_dim,
            num_features,
            bandwidth,
            scaling: Scaling::default(),
            seed,
        }
    }

    pub fn ntk2_softplus(input_dim: usize, num_features: usize, seed: u64) -> Self {
        FeatureMapSpec {
            kind: FeatureKind::Ntk2Softplus,
            input_dim,
            num_features,
            bandwidth: 1.0,
            scaling: Scaling::default(),
            seed,
        }
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Config("feature map input_dim must be at least 1".into()));
        }
        if self.num_features == 0 {
            return Err(Error::Config("feature map num_features must be at least 1".into()));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::Config(format!(
                "feature map bandwidth must be positive and finite, got {}",
                self.bandwidth
            )));
        }
        Ok(())
    }

    pub fn output_dim(&self) -> usize {
        match self.kind {
            FeatureKind::GaussianRff => self.num_features,
            FeatureKind::Ntk2Softplus => self.num_features * (self.input_dim + 2),
        }
    }

    pub fn scale(&self) -> f64 {
        let d = self.num_features as f64;
        match self.scaling {
            Scaling::InvD => 1.0 / d,
            Scaling::InvSqrtD => 1.0 / d.sqrt(),
        }
    }
}

/// Per-coordinate affine standardization `(x - mean) / scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Fits mean and (population) standard deviation per coordinate.
    /// Constant coordinates get scale 1.
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::Argument("cannot standardize an empty sample".into()))?;
        let d = first.len();
        let n = samples.len() as f64;
        let mut mean = vec![0.0; d];
        for x in samples {
            check_dim(d, x.len())?;
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        let mut var = vec![0.0; d];
        for x in samples {
            for ((s, v), m) in var.iter_mut().zip(x).zip(&mean) {
                *s += (v - m).powi(2) / n;
            }
        }
        let scale = var
            .into_iter()
            .map(|v| if v > 1e-24 { v.sqrt() } else { 1.0 })
            .collect();
        Ok(Standardizer { mean, scale })
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            x.iter()
                .zip(&self.mean)
                .zip(&self.scale)
                .map(|((v, m), s)| (v - m) / s),
        );
    }
}

/// Frozen random parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FeatureParams {
    GaussianRff {
        /// `D` rows of length `d`.
        directions: Vec<Vec<f64>>,
        phases: Vec<f64>,
    },
    Ntk2Softplus {
        /// `D` rows of length `d + 1`; the last entry multiplies the constant 1.
        weights: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    spec: FeatureMapSpec,
    standardizer: Option<Standardizer>,
    params: FeatureParams,
}

/// Builds the map determined by `spec`; identical specs give bit-identical maps.
pub fn build_feature_map(spec: &FeatureMapSpec) -> Result<FeatureMap> {
    spec.validate()?;
    let mut r = rng::rng(spec.seed);
    let d = spec.input_dim;
    let params = match spec.kind {
        FeatureKind::GaussianRff => {
            let phase = Uniform::new(0.0, 2.0 * PI);
            let mut directions = Vec::with_capacity(spec.num_features);
            let mut phases = Vec::with_capacity(spec.num_features);
            for _ in 0..spec.num_features {
                let z: Vec<f64> = (0..d)
                    .map(|_| {
                        let g: f64 = StandardNormal.sample(&mut r);
                        g / spec.bandwidth
                    })
                    .collect();
                directions.push(z);
                phases.push(phase.sample(&mut r));
            }
            FeatureParams::GaussianRff { directions, phases }
        }
        FeatureKind::Ntk2Softplus => {
            let weights = (0..spec.num_features)
                .map(|_| (0..=d).map(|_| StandardNormal.sample(&mut r)).collect())
                .collect();
            FeatureParams::Ntk2Softplus { weights }
        }
    };
    Ok(FeatureMap {
        spec: spec.clone(),
        standardizer: None,
        params,
    })
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    if x >= 0.0 {
        1.0 / (1.0 + e)
    } else {
        e / (1.0 + e)
    }
}

impl FeatureMap {
    /// Assembles a map from explicit parameters, checking shapes against `spec`.
    pub fn from_parts(spec: FeatureMapSpec, params: FeatureParams) -> Result<Self> {
        spec.validate()?;
        let d = spec.input_dim;
        let ok = match (&params, spec.kind) {
            (FeatureParams::GaussianRff { directions, phases }, FeatureKind::GaussianRff) => {
                directions.len() == spec.num_features
                    && phases.len() == spec.num_features
                    && directions.iter().all(|z| z.len() == d)
            }
            (FeatureParams::Ntk2Softplus { weights }, FeatureKind::Ntk2Softplus) => {
                weights.len() == spec.num_features && weights.iter().all(|w| w.len() == d + 1)
            }
            _ => false,
        };
        if !ok {
            return Err(Error::Config("feature parameters do not match the spec".into()));
        }
        Ok(FeatureMap {
            spec,
            standardizer: None,
            params,
        })
    }

    pub fn with_standardizer(mut self, standardizer: Standardizer) -> Result<Self> {
        check_dim(self.spec.input_dim, standardizer.mean.len())?;
        check_dim(self.spec.input_dim, standardizer.scale.len())?;
        self.standardizer = Some(standardizer);
        Ok(self)
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    pub fn params(&self) -> &FeatureParams {
        &self.params
    }

    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.spec.output_dim()
    }

    /// A constant `M_Φ` with `‖Φ(x)‖₂ ≤ M_Φ` for every `x`, when one exists.
    /// Only the cosine features are bounded independently of the input.
    pub fn norm_bound(&self) -> Option<f64> {
        match self.spec.kind {
            FeatureKind::GaussianRff => Some(self.spec.scale() * (self.spec.num_features as f64).sqrt()),
            FeatureKind::Ntk2Softplus => None,
        }
    }

    /// Raw (unscaled) cosine feature `cos(z_iᵀx + b_i)` on an already
    /// standardized input. Only meaningful for `gaussian-rff`.
    pub fn raw_rff(&self, index: usize, x: &[f64]) -> Option<f64> {
        match &self.params {
            FeatureParams::GaussianRff { directions, phases } => {
                Some((dot(&directions[index], x) + phases[index]).cos())
            }
            FeatureParams::Ntk2Softplus { .. } => None,
        }
    }

    pub fn featurize(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.output_dim());
        self.featurize_into(x, &mut out)?;
        Ok(out)
    }

    pub fn featurize_into(&self, x: &[f64], out: &mut Vec<f64>) -> Result<()> {
        check_dim(self.spec.input_dim, x.len())?;
        let mut buf = Vec::new();
        let x = match &self.standardizer {
            Some(s) => {
                s.apply(x, &mut buf);
                &buf[..]
            }
            None => x,
        };
        let scale = self.spec.scale();
        out.clear();
        match &self.params {
            FeatureParams::GaussianRff { directions, phases } => {
                out.extend(
                    directions
                        .iter()
                        .zip(phases)
                        .map(|(z, b)| scale * (dot(z, x) + b).cos()),
                );
            }
            FeatureParams::Ntk2Softplus { weights } => {
                for w in weights {
                    let (head, bias) = w.split_at(x.len());
                    let pre = dot(head, x) + bias[0];
                    out.push(scale * softplus(pre));
                    let g = scale * sigmoid(pre);
                    out.extend(x.iter().map(|v| g * v));
                    out.push(g);
                }
            }
        }
        Ok(())
    }

    pub fn featurize_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.iter().map(|x| self.featurize(x)).collect()
    }
}

/// Which hypothesis a sample is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    H1,
    H2,
}

impl Hypothesis {
    pub const BOTH: [Hypothesis; 2] = [Hypothesis::H1, Hypothesis::H2];

    /// 0 for `H1`, 1 for `H2`.
    pub fn index(self) -> usize {
        match self {
            Hypothesis::H1 => 0,
            Hypothesis::H2 => 1,
        }
    }

    pub fn from_index(k: usize) -> Self {
        if k == 0 {
            Hypothesis::H1
        } else {
            Hypothesis::H2
        }
    }

    /// `(-1)^k` with `k ∈ {1, 2}`: `-1` for `H1`, `+1` for `H2`. Multiplying a
    /// score by this sign gives a quantity that is positive on errors.
    pub fn error_sign(self) -> f64 {
        match self {
            Hypothesis::H1 => -1.0,
            Hypothesis::H2 => 1.0,
        }
    }

    /// The detector accepts `H1` iff its score is `≥ 0`, so a score of exactly
    /// zero is correct under `H1` and an error under `H2`.
    pub fn is_error(self, score: f64) -> bool {
        match self {
            Hypothesis::H1 => score < 0.0,
            Hypothesis::H2 => score >= 0.0,
        }
    }
}

/// A linear detector over a fixed feature map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    theta: Vec<f64>,
    feature_map: FeatureMap,
}

impl Detector {
    pub fn new(theta: Vec<f64>, feature_map: FeatureMap) -> Result<Self> {
        check_dim(feature_map.output_dim(), theta.len())?;
        let norm = norm2(&theta);
        if !(norm <= 1.0 + 1e-9) {
            return Err(Error::Argument(format!("detector weights must satisfy ‖θ‖₂ ≤ 1, got {norm}")));
        }
        Ok(Detector { theta, feature_map })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.feature_map
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        let phi = self.feature_map.featurize(x)?;
        Ok(dot(&self.theta, &phi))
    }

    pub fn decide(&self, x: &[f64]) -> Result<Hypothesis> {
        Ok(if self.score(x)? >= 0.0 {
            Hypothesis::H1
        } else {
            Hypothesis::H2
        })
    }
}

/// Subsampling harness for the random-feature approximation rate.
///
/// The target is an explicit function in the span of a large bank of cosine
/// features, `T*(x) = (1/B) Σ_b w_b φ_b(x)`, evaluated on a fixed 1-D grid.
/// A `D`-feature estimate keeps a random subset of `D` bank features (drawn
/// without replacement) and averages `w φ` over it.
#[derive(Debug, Clone)]
pub struct RffTarget {
    /// `bank_size` rows of grid evaluations of `φ_b`.
    bank_values: Vec<Vec<f64>>,
    weights: Vec<f64>,
    target: Vec<f64>,
    grid_step: f64,
}

impl RffTarget {
    /// `weight(z, b)` gives the coefficient of the feature `cos(z x + b)`.
    pub fn new(
        bank_size: usize,
        bandwidth: f64,
        grid: &[f64],
        seed: u64,
        weight: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::Argument("grid needs at least two points".into()));
        }
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(1, bank_size, bandwidth, seed))?;
        let FeatureParams::GaussianRff { directions, phases } = map.params() else {
            unreachable!()
        };
        let weights: Vec<f64> = directions.iter().zip(phases).map(|(z, &b)| weight(z[0], b)).collect();
        let bank_values: Vec<Vec<f64>> = (0..bank_size)
            .map(|i| grid.iter().map(|&x| map.raw_rff(i, &[x]).unwrap()).collect())
            .collect();
        let mut target = vec![0.0; grid.len()];
        for (w, row) in weights.iter().zip(&bank_values) {
            for (t, v) in target.iter_mut().zip(row) {
                *t += w * v / bank_size as f64;
            }
        }
        let grid_step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        Ok(RffTarget {
            bank_values,
            weights,
            target,
            grid_step,
        })
    }

    pub fn bank_size(&self) -> usize {
        self.weights.len()
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Grid L2 distance between the target and the estimate built from `subset`.
    pub fn l2_error(&self, subset: &[usize]) -> f64 {
        let mut est = vec![0.0; self.target.len()];
        for &i in subset {
            for (e, v) in est.iter_mut().zip(&self.bank_values[i]) {
                *e += self.weights[i] * v;
            }
        }
        let d = subset.len() as f64;
        let sq: f64 = est
            .iter()
            .zip(&self.target)
            .map(|(e, t)| (e / d - t).powi(2))
            .sum();
        (sq * self.grid_step).sqrt()
    }
}

/// Mean grid-L2 approximation error of `D`-feature subsamples, for each `D`
/// in `d_list`, averaged over `seeds` independent subsamples.
pub fn rff_l2_error(target: &RffTarget, d_list: &[usize], seeds: usize) -> Result<Vec<(usize, f64)>> {
    if d_list.is_empty() {
        return Err(Error::Argument("D list is empty".into()));
    }
    if seeds == 0 {
        return Err(Error::Argument("seed count must be positive".into()));
    }
    let bank = target.bank_size();
    d_list
        .iter()
        .map(|&d| {
            if d == 0 || d > bank {
                return Err(Error::Argument(format!("D = {d} outside 1..={bank}")));
            }
            let total: f64 = (0..seeds)
                .map(|s| {
                    let subset = sample_without_replacement(bank, d, s as u64);
                    target.l2_error(&subset)
                })
                .sum();
            Ok((d, total / seeds as f64))
        })
        .collect()
}

/// Partial Fisher-Yates draw of `k` distinct indices below `n`.
fn sample_without_replacement(n: usize, k: usize, seed: u64) -> Vec<usize> {
    use rand::Rng;
    let mut r = rng::stream(seed, 0x5eed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = r.gen_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_feature_map(z: f64, b: f64, scaling: Scaling) -> FeatureMap {
        let spec = FeatureMapSpec::gaussian_rff(1, 1, 1.0, 0).with_scaling(scaling);
        FeatureMap::from_parts(
            spec,
            FeatureParams::GaussianRff {
                directions: vec![vec![z]],
                phases: vec![b],
            },
        )
        .unwrap()
    }

    #[test]
    fn identical_specs_give_identical_params() {
        let spec = FeatureMapSpec::gaussian_rff(2, 4, 1.0, 7);
        let a = build_feature_map(&spec).unwrap();
        let b = build_feature_map(&spec).unwrap();
        assert_eq!(a.params(), b.params());
        let x = [0.3, -1.1];
        assert_eq!(a.featurize(&x).unwrap(), b.featurize(&x).unwrap());
    }

    #[test]
    fn ntk_output_dimension() {
        let map = build_feature_map(&FeatureMapSpec::ntk2_softplus(3, 5, 1)).unwrap();
        assert_eq!(map.output_dim(), 25);
        assert_eq!(map.featurize(&[0.1, 0.2, 0.3]).unwrap().len(), 25);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(build_feature_map(&FeatureMapSpec::gaussian_rff(0, 4, 1.0, 0)).is_err());
        assert!(build_feature_map(&FeatureMapSpec::gaussian_rff(2, 0, 1.0, 0)).is_err());
        assert!(build_feature_map(&FeatureMapSpec::gaussian_rff(2, 4, 0.0, 0)).is_err());
        assert!(build_feature_map(&FeatureMapSpec::gaussian_rff(2, 4, -1.0, 0)).is_err());
    }

    #[test]
    fn quarter_phase_at_origin_is_zero() {
        let spec = FeatureMapSpec::gaussian_rff(2, 3, 1.0, 0);
        let map = FeatureMap::from_parts(
            spec,
            FeatureParams::GaussianRff {
                directions: vec![vec![1.0, 2.0], vec![-0.5, 0.1], vec![3.0, 3.0]],
                phases: vec![PI / 2.0; 3],
            },
        )
        .unwrap();
        for v in map.featurize(&[0.0, 0.0]).unwrap() {
            assert!(v.abs() < 1e-16);
        }
    }

    #[test]
    fn cos_pi_gives_negative_scale() {
        let map = single_feature_map(1.0, 0.0, Scaling::InvSqrtD);
        let v = map.featurize(&[PI]).unwrap();
        assert!((v[0] + map.spec().scale()).abs() < 1e-15);
    }

    #[test]
    fn scalings_differ_by_sqrt_d() {
        let base = FeatureMapSpec::gaussian_rff(2, 16, 0.7, 3);
        let a = build_feature_map(&base.clone().with_scaling(Scaling::InvD)).unwrap();
        let b = build_feature_map(&base.with_scaling(Scaling::InvSqrtD)).unwrap();
        let x = [0.4, -0.9];
        let fa = a.featurize(&x).unwrap();
        let fb = b.featurize(&x).unwrap();
        for (u, v) in fa.iter().zip(&fb) {
            assert!((v - u * 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn featurize_rejects_wrong_dimension() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(2, 4, 1.0, 0)).unwrap();
        assert!(matches!(
            map.featurize(&[1.0]),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn rff_norm_bound_holds() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(3, 50, 0.5, 11)).unwrap();
        let bound = map.norm_bound().unwrap();
        for i in 0..20 {
            let x = [i as f64 * 0.37 - 3.0, (i as f64).sin(), 1.5];
            let phi = map.featurize(&x).unwrap();
            assert!(norm2(&phi) <= bound + 1e-12);
        }
    }

    #[test]
    fn zero_theta_scores_zero_and_accepts_h1() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(2, 4, 1.0, 0)).unwrap();
        let det = Detector::new(vec![0.0; 4], map).unwrap();
        assert_eq!(det.score(&[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(det.decide(&[1.0, 2.0]).unwrap(), Hypothesis::H1);
    }

    #[test]
    fn aligned_theta_scores_feature_norm() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(2, 6, 1.0, 5)).unwrap();
        let x = [0.2, 0.9];
        let phi = map.featurize(&x).unwrap();
        let n = norm2(&phi);
        let theta: Vec<f64> = phi.iter().map(|v| v / n).collect();
        let det = Detector::new(theta, map).unwrap();
        assert!((det.score(&x).unwrap() - n).abs() < 1e-12);
    }

    #[test]
    fn detector_rejects_large_theta() {
        let map = build_feature_map(&FeatureMapSpec::gaussian_rff(2, 2, 1.0, 0)).unwrap();
        assert!(Detector::new(vec![1.0, 1.0], map).is_err());
    }

    #[test]
    fn standardizer_centers_and_scales() {
        let xs = vec![vec![1.0, 10.0], vec![3.0, 10.0], vec![5.0, 10.0]];
        let s = Standardizer::fit(&xs).unwrap();
        assert_eq!(s.mean, vec![3.0, 10.0]);
        assert!((s.scale[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.scale[1], 1.0);
    }

    #[test]
    fn full_bank_has_zero_error() {
        let grid: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
        let target = RffTarget::new(64, 1.0, &grid, 1, |_, b| b.cos()).unwrap();
        let all: Vec<usize> = (0..64).collect();
        assert!(target.l2_error(&all) < 1e-14);
        let errs = rff_l2_error(&target, &[64], 3).unwrap();
        assert!(errs[0].1 < 1e-14);
    }

    #[test]
    fn rff_error_rejects_empty_list() {
        let grid = [0.0, 1.0];
        let target = RffTarget::new(8, 1.0, &grid, 1, |_, _| 1.0).unwrap();
        assert!(rff_l2_error(&target, &[], 3).is_err());
    }
}
