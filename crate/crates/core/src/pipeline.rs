//! End-to-end training: feature-map fitting, SAA construction, the three
//! solvers behind one interface, grid cross-validation over the uncertainty
//! set parameters, and the on-disk detector record.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cvar::{bisect, CvarParams, Surrogate, TraceRecord};
use crate::error::{Error, Result};
use crate::exact::{solve_bnb_logged, BnbOptions, ProgressRecord};
use crate::features::{build_feature_map, Detector, FeatureKind, FeatureMap, FeatureMapSpec, Scaling, Standardizer};
use crate::rng;
use crate::saa::{build_instance, empirical_risk, saa_objective, SaaInstance};
use crate::sinkhorn::{Multiplier, SinkhornBall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Cvar,
    Genfun,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "cvar" => Ok(Method::Cvar),
            "genfun" => Ok(Method::Genfun),
            other => Err(Error::Config(format!(
                "unknown method {other:?}; expected exact, cvar or genfun"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Cvar => "cvar",
            Method::Genfun => "genfun",
        })
    }
}

/// Feature-map settings; the input dimension comes from the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureSettings {
    pub kind: FeatureKind,
    pub num_features: usize,
    pub bandwidth: f64,
    pub scaling: Scaling,
    pub seed: u64,
    /// Standardize inputs with statistics of the pooled training samples.
    pub standardize: bool,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        FeatureSettings {
            kind: FeatureKind::GaussianRff,
            num_features: 16,
            bandwidth: 1.0,
            scaling: Scaling::default(),
            seed: 0,
            standardize: true,
        }
    }
}

/// The cross-validation grid; every `(ε, ρ̄)` pair is shared by both hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvGrid {
    pub epsilon: Vec<f64>,
    pub rho_bar: Vec<f64>,
}

impl Default for CvGrid {
    fn default() -> Self {
        CvGrid {
            epsilon: vec![1e-2, 5e-2, 1e-1],
            rho_bar: vec![1e-1, 5e-1, 1.0],
        }
    }
}

impl CvGrid {
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.epsilon
            .iter()
            .flat_map(|&e| self.rho_bar.iter().map(move |&r| (e, r)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSettings {
    pub method: Method,
    pub features: FeatureSettings,
    /// Per-hypothesis entropic regularization.
    pub epsilon: [f64; 2],
    /// Per-hypothesis dual radius.
    pub rho_bar: [f64; 2],
    /// Kernel draws per center.
    pub m: usize,
    pub seed: u64,
    pub bnb: BnbOptions,
    pub cvar: CvarParams,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            method: Method::Exact,
            features: FeatureSettings::default(),
            epsilon: [0.1, 0.1],
            rho_bar: [0.1, 0.1],
            m: 2,
            seed: 0,
            bnb: BnbOptions::default(),
            cvar: CvarParams::default(),
        }
    }
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        for k in 0..2 {
            SinkhornBall::new(self.epsilon[k], self.rho_bar[k], 1)
                .map_err(|e| Error::Config(format!("hypothesis {} ball: {e}", k + 1)))?;
        }
        if self.features.num_features == 0 {
            return Err(Error::Config("features.num_features must be at least 1".into()));
        }
        if !(self.features.bandwidth > 0.0) {
            return Err(Error::Config("features.bandwidth must be positive".into()));
        }
        if !(self.bnb.tol > 0.0) {
            return Err(Error::Config("bnb.tol must be positive".into()));
        }
        self.cvar.validate()
    }

    /// A copy with both hypotheses sharing `(epsilon, rho_bar)` and the given seed.
    pub fn with_ball(&self, epsilon: f64, rho_bar: f64, seed: u64) -> Self {
        TrainSettings {
            epsilon: [epsilon; 2],
            rho_bar: [rho_bar; 2],
            seed,
            ..self.clone()
        }
    }
}

/// Builds the feature map for `settings`, fitting the standardizer on the
/// pooled training samples when enabled.
pub fn fit_feature_map(settings: &FeatureSettings, train: [&[Vec<f64>]; 2]) -> Result<FeatureMap> {
    let dim = train
        .iter()
        .flat_map(|s| s.first())
        .map(Vec::len)
        .next()
        .ok_or_else(|| Error::Argument("training data is empty".into()))?;
    let spec = FeatureMapSpec {
        kind: settings.kind,
        input_dim: dim,
        num_features: settings.num_features,
        bandwidth: settings.bandwidth,
        scaling: settings.scaling,
        seed: settings.seed,
    };
    let map = build_feature_map(&spec)?;
    if !settings.standardize {
        return Ok(map);
    }
    let pooled: Vec<Vec<f64>> = train.iter().flat_map(|s| s.iter().cloned()).collect();
    map.with_standardizer(Standardizer::fit(&pooled)?)
}

/// Summary of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub method: Method,
    /// Optimal value reported by the solver (`s*` or the bisection level).
    pub s: f64,
    /// Exact SAA objective at the returned detector.
    pub s_saa: f64,
    /// Certified optimality gap (exact method only).
    pub gap: Option<f64>,
    pub node_count: Option<usize>,
    pub partial: bool,
    pub wall_time: f64,
    pub epsilon: [f64; 2],
    pub rho_bar: [f64; 2],
    /// Dual multipliers of the SAA objective at the detector.
    pub multipliers: [Multiplier; 2],
    pub m: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub detector: Detector,
    pub record: TrainRecord,
    /// Bisection trace of the surrogate methods.
    pub trace: Vec<TraceRecord>,
}

pub fn balls(settings: &TrainSettings, dim: usize) -> Result<[SinkhornBall; 2]> {
    Ok([
        SinkhornBall::new(settings.epsilon[0], settings.rho_bar[0], dim)?,
        SinkhornBall::new(settings.epsilon[1], settings.rho_bar[1], dim)?,
    ])
}

/// Builds the SAA instance for `settings` over the given samples.
pub fn instance(settings: &TrainSettings, map: &FeatureMap, data: [&[Vec<f64>]; 2]) -> Result<SaaInstance> {
    build_instance(data, map, balls(settings, map.input_dim())?, settings.m, settings.seed)
}

/// Trains a detector on `train` with the configured method.
pub fn train(train: [&[Vec<f64>]; 2], settings: &TrainSettings) -> Result<Trained> {
    train_logged(train, settings, |_| {})
}

/// As [`train`], forwarding branch-and-bound progress records to `log`.
pub fn train_logged<L: FnMut(&ProgressRecord)>(
    train: [&[Vec<f64>]; 2],
    settings: &TrainSettings,
    log: L,
) -> Result<Trained> {
    settings.validate()?;
    let start = Instant::now();
    let map = fit_feature_map(&settings.features, train)?;
    let inst = instance(settings, &map, train)?;
    let (theta, s, gap, node_count, partial, trace) = match settings.method {
        Method::Exact => {
            let sol = solve_bnb_logged(&inst, &settings.bnb, log)?;
            (sol.theta, sol.s_star, Some(sol.gap), Some(sol.node_count), sol.partial, Vec::new())
        }
        Method::Cvar | Method::Genfun => {
            let surrogate = if settings.method == Method::Cvar {
                Surrogate::Cvar
            } else {
                Surrogate::Genfun
            };
            let sol = bisect(&inst, surrogate, &settings.cvar)?;
            (sol.iterate.theta, sol.s, None, None, false, sol.trace)
        }
    };
    let value = saa_objective(&inst, &theta)?;
    let record = TrainRecord {
        method: settings.method,
        s,
        s_saa: value.s_hat,
        gap,
        node_count,
        partial,
        wall_time: start.elapsed().as_secs_f64(),
        epsilon: settings.epsilon,
        rho_bar: settings.rho_bar,
        multipliers: [value.duals[0].multiplier, value.duals[1].multiplier],
        m: settings.m,
        seed: settings.seed,
    };
    Ok(Trained {
        detector: Detector::new(theta, map)?,
        record,
        trace,
    })
}

/// Validation result of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvCell {
    pub epsilon: f64,
    pub rho_bar: f64,
    pub max_err: f64,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub cells: Vec<CvCell>,
    /// The cell with the lowest validation error; ties go to the earlier cell.
    pub best: CvCell,
}

/// Random 50/50 split of each hypothesis' samples; the fitting half gets the extra sample.
pub fn split_half(data: [&[Vec<f64>]; 2], seed: u64) -> ([Vec<Vec<f64>>; 2], [Vec<Vec<f64>>; 2]) {
    let mut fit = [Vec::new(), Vec::new()];
    let mut held = [Vec::new(), Vec::new()];
    for k in 0..2 {
        let mut idx: Vec<usize> = (0..data[k].len()).collect();
        idx.shuffle(&mut rng::stream(seed, 0xc5_0000 | k as u64));
        let cut = data[k].len().div_ceil(2);
        fit[k] = idx[..cut].iter().map(|&i| data[k][i].clone()).collect();
        held[k] = idx[cut..].iter().map(|&i| data[k][i].clone()).collect();
    }
    (fit, held)
}

/// Picks `(ε, ρ̄)` from `grid` by training on one half of the data and
/// measuring the maximum empirical error on the other. Cells run in
/// parallel, each with its own seed.
pub fn cross_validate(train_data: [&[Vec<f64>]; 2], settings: &TrainSettings, grid: &CvGrid) -> Result<CvResult> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::Config("cross-validation grid is empty".into()));
    }
    if train_data.iter().any(|s| s.len() < 2) {
        return Err(Error::Argument("cross-validation needs two samples per hypothesis".into()));
    }
    let (fit, held) = split_half(train_data, settings.seed);
    let results: Vec<CvCell> = cells
        .par_iter()
        .enumerate()
        .map(|(c, &(epsilon, rho_bar))| {
            let cell_seed = settings.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(c as u64 + 1));
            let cell = settings.with_ball(epsilon, rho_bar, cell_seed);
            let trained = train([&fit[0], &fit[1]], &cell)?;
            let risk = empirical_risk(&trained.detector, &held[0], &held[1])?;
            Ok(CvCell {
                epsilon,
                rho_bar,
                max_err: risk.max_err,
                partial: trained.record.partial,
            })
        })
        .collect::<Result<_>>()?;
    let best = *results
        .iter()
        .reduce(|a, b| if b.max_err < a.max_err { b } else { a })
        .expect("nonempty grid");
    Ok(CvResult { cells: results, best })
}

/// Cross-validates `(ε, ρ̄)` and retrains on all of `train` with the winner.
pub fn train_with_cv(train_data: [&[Vec<f64>]; 2], settings: &TrainSettings, grid: &CvGrid) -> Result<(Trained, CvResult)> {
    let cv = cross_validate(train_data, settings, grid)?;
    let chosen = settings.with_ball(cv.best.epsilon, cv.best.rho_bar, settings.seed);
    Ok((train(train_data, &chosen)?, cv))
}

pub const DETECTOR_FORMAT: &str = "srht-detector";
pub const DETECTOR_VERSION: u32 = 1;

/// On-disk detector: a JSON object holding the feature map (spec, frozen
/// random parameters, standardizer), the weights and the training summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorRecord {
    pub format: String,
    pub version: u32,
    pub feature_map: FeatureMap,
    pub theta: Vec<f64>,
    pub training: Option<TrainRecord>,
}

impl DetectorRecord {
    pub fn new(detector: &Detector, training: Option<TrainRecord>) -> Self {
        DetectorRecord {
            format: DETECTOR_FORMAT.into(),
            version: DETECTOR_VERSION,
            feature_map: detector.feature_map().clone(),
            theta: detector.theta().to_vec(),
            training,
        }
    }

    /// Rebuilds the detector, re-checking every shape and the norm bound.
    pub fn detector(&self) -> Result<Detector> {
        if self.format != DETECTOR_FORMAT || self.version != DETECTOR_VERSION {
            return Err(Error::Config(format!(
                "unsupported detector record {:?} version {} (expected {DETECTOR_FORMAT:?} version {DETECTOR_VERSION})",
                self.format, self.version
            )));
        }
        let fm = &self.feature_map;
        let mut map = FeatureMap::from_parts(fm.spec().clone(), fm.params().clone())?;
        if let Some(st) = fm.standardizer() {
            map = map.with_standardizer(st.clone())?;
        }
        Detector::new(self.theta.clone(), map)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_two_moons, DatasetSpec};

    #[test]
    fn grid_order_and_default() {
        let cells = CvGrid::default().cells();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[0], (1e-2, 1e-1));
        assert_eq!(cells[1], (1e-2, 5e-1));
    }

    #[test]
    fn split_is_a_partition() {
        let data: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64]).collect();
        let (fit, held) = split_half([&data, &data[..4]], 3);
        assert_eq!((fit[0].len(), held[0].len()), (4, 3));
        assert_eq!((fit[1].len(), held[1].len()), (2, 2));
        let mut all: Vec<f64> = fit[0].iter().chain(&held[0]).map(|v| v[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..7).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn record_round_trip() {
        let d = gen_two_moons(&DatasetSpec::two_moons(6, 1, 0.1, 1)).unwrap();
        let settings = TrainSettings {
            features: FeatureSettings {
                num_features: 4,
                ..FeatureSettings::default()
            },
            ..TrainSettings::default()
        };
        let t = train([&d.train[0], &d.train[1]], &settings).unwrap();
        let rec = DetectorRecord::new(&t.detector, Some(t.record.clone()));
        let back = DetectorRecord::from_json(&rec.to_json().unwrap()).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.detector().unwrap(), t.detector);
        let mut bad = rec;
        bad.version = 99;
        assert!(bad.detector().is_err());
    }

    #[test]
    fn unknown_method_rejected() {
        assert!("gurobi".parse::<Method>().is_err());
        assert_eq!("genfun".parse::<Method>().unwrap(), Method::Genfun);
    }
}
