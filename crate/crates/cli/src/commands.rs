//! Subcommand implementations.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use srht::datagen::{load_dataset, save_csv, Dataset, DatasetSpec};
use srht::diagnostics::{self, DiagKind, DiagReport};
use srht::features::Hypothesis;
use srht::pipeline::{self, cross_validate, CvCell, DetectorRecord, TrainRecord};
use srht::saa::{build_instance, empirical_risk, saa_objective, EmpiricalRisk};
use srht::sinkhorn::{worst_case_cloud, Multiplier, SinkhornBall};

use crate::config::RunConfig;
use crate::output::{io_err, Sink};
use crate::CliError;

#[derive(Serialize)]
struct FileEntry {
    path: String,
    rows: Option<usize>,
}

fn entry(path: &str, rows: Option<usize>) -> FileEntry {
    FileEntry {
        path: path.into(),
        rows,
    }
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    seed: Option<u64>,
    files: Vec<FileEntry>,
    #[serde(flatten)]
    extra: &'a T,
}

fn data(cfg: &RunConfig) -> Result<Dataset, CliError> {
    Ok(load_dataset(&cfg.dataset)?)
}

fn sizes(sets: &[Vec<Vec<f64>>; 2]) -> [usize; 2] {
    [sets[0].len(), sets[1].len()]
}

pub fn gen(cfg: &RunConfig) -> Result<(), CliError> {
    let d = data(cfg)?;
    let sink = Sink::new(&cfg.out, "gen", cfg.hash())?;
    save_csv(&sink.path("train.csv"), [&d.train[0], &d.train[1]])?;
    save_csv(&sink.path("test.csv"), [&d.test[0], &d.test[1]])?;

    #[derive(Serialize)]
    struct GenInfo<'a> {
        dataset: &'a DatasetSpec,
        n_train: [usize; 2],
        n_test: [usize; 2],
    }
    let info = GenInfo {
        dataset: &cfg.dataset,
        n_train: sizes(&d.train),
        n_test: sizes(&d.test),
    };
    sink.manifest(&Manifest {
        seed: Some(cfg.dataset.seed),
        files: vec![
            entry("train.csv", Some(d.train[0].len() + d.train[1].len())),
            entry("test.csv", Some(d.test[0].len() + d.test[1].len())),
        ],
        extra: &info,
    })?;
    sink.emit(&info)
}

pub fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let d = data(cfg)?;
    let train_data = [d.train[0].as_slice(), d.train[1].as_slice()];
    let sink = Sink::new(&cfg.out, "train", cfg.hash())?;
    let mut files = vec![entry("detector.json", None)];

    let mut settings = cfg.train.clone();
    let mut cv_best = None;
    if let Some(grid) = &cfg.cross_validation {
        let cv = cross_validate(train_data, &settings, grid)?;
        sink.create("cv.jsonl")?;
        for cell in &cv.cells {
            sink.append("cv.jsonl", cell)?;
        }
        files.push(entry("cv.jsonl", Some(cv.cells.len())));
        settings = settings.with_ball(cv.best.epsilon, cv.best.rho_bar, settings.seed);
        cv_best = Some(cv.best);
    }

    sink.create("progress.jsonl")?;
    let mut progress_rows = 0;
    let mut log_err = None;
    let trained = pipeline::train_logged(train_data, &settings, |rec| {
        progress_rows += 1;
        if let Err(e) = sink.append("progress.jsonl", rec) {
            log_err.get_or_insert(e);
        }
    })?;
    if let Some(e) = log_err {
        return Err(e);
    }
    files.push(entry("progress.jsonl", Some(progress_rows)));
    if !trained.trace.is_empty() {
        sink.create("trace.jsonl")?;
        for rec in &trained.trace {
            sink.append("trace.jsonl", rec)?;
        }
        files.push(entry("trace.jsonl", Some(trained.trace.len())));
    }
    DetectorRecord::new(&trained.detector, Some(trained.record.clone())).save(&sink.path("detector.json"))?;

    #[derive(Serialize)]
    struct TrainInfo<'a> {
        #[serde(flatten)]
        record: &'a TrainRecord,
        cv_best: Option<CvCell>,
    }
    let info = TrainInfo {
        record: &trained.record,
        cv_best,
    };
    sink.manifest(&Manifest {
        seed: Some(settings.seed),
        files,
        extra: &info,
    })?;
    sink.emit(&info)?;
    if trained.record.partial {
        return Err(CliError::Budget(format!(
            "gap {:.3e} remains after {} nodes; the incumbent detector was written",
            trained.record.gap.unwrap_or(f64::NAN),
            trained.record.node_count.unwrap_or(0)
        )));
    }
    Ok(())
}

fn load_detector(path: &Path) -> Result<(DetectorRecord, srht::features::Detector), CliError> {
    let rec = DetectorRecord::load(path)?;
    let det = rec.detector()?;
    Ok((rec, det))
}

pub fn eval(cfg: &RunConfig) -> Result<(), CliError> {
    let d = data(cfg)?;
    let path = cfg.detector_path();
    let (rec, det) = load_detector(&path)?;
    let risk = empirical_risk(&det, &d.test[0], &d.test[1])?;
    let robust_bound = if cfg.eval.robust_m > 0 {
        let (eps, rho) = rec
            .training
            .as_ref()
            .map_or((cfg.train.epsilon, cfg.train.rho_bar), |t| (t.epsilon, t.rho_bar));
        let dim = det.feature_map().input_dim();
        let balls = [
            SinkhornBall::new(eps[0], rho[0], dim)?,
            SinkhornBall::new(eps[1], rho[1], dim)?,
        ];
        let inst = build_instance(
            [&d.test[0], &d.test[1]],
            det.feature_map(),
            balls,
            cfg.eval.robust_m,
            cfg.train.seed,
        )?;
        Some(saa_objective(&inst, det.theta())?.s_hat)
    } else {
        None
    };

    #[derive(Serialize)]
    struct EvalInfo {
        detector: PathBuf,
        #[serde(flatten)]
        risk: EmpiricalRisk,
        robust_bound: Option<f64>,
        n_test: [usize; 2],
    }
    let sink = Sink::new(&cfg.out, "eval", cfg.hash())?;
    sink.emit(&EvalInfo {
        detector: path,
        risk,
        robust_bound,
        n_test: sizes(&d.test),
    })
}

pub fn worst_case(cfg: &RunConfig) -> Result<(), CliError> {
    let d = data(cfg)?;
    let path = cfg.detector_path();
    let (rec, det) = load_detector(&path)?;
    let training = rec.training.ok_or_else(|| {
        CliError::Config(format!(
            "{}: no training record, so the optimal multipliers are unknown",
            path.display()
        ))
    })?;
    let mut lambdas = [0.0; 2];
    for k in Hypothesis::BOTH {
        lambdas[k.index()] = match training.multipliers[k.index()] {
            Multiplier::Finite(l) => l,
            Multiplier::ZeroLimit => {
                return Err(CliError::Failed(format!(
                    "hypothesis {}: the optimal multiplier is the λ → 0 limit, where the worst case \
                     concentrates all mass on each center's misclassified region and has no \
                     kernel-reweighting form; decrease rho_bar or increase epsilon",
                    k.index() + 1
                )))
            }
            Multiplier::InfiniteLimit => {
                return Err(CliError::Failed(format!(
                    "hypothesis {}: the optimal multiplier is the λ → ∞ limit (zero radius); \
                     the worst case is the kernel-smoothed empirical distribution itself",
                    k.index() + 1
                )))
            }
        };
    }

    #[derive(Serialize)]
    struct CloudInfo {
        hypothesis: usize,
        file: String,
        lambda_star: f64,
        points: usize,
        max_weight_sum_deviation: f64,
        weighted_error: f64,
        unweighted_error: f64,
    }
    let sink = Sink::new(&cfg.out, "worst-case", cfg.hash())?;
    let dim = det.feature_map().input_dim();
    let mut clouds = Vec::new();
    let mut files = Vec::new();
    for k in Hypothesis::BOTH {
        let i = k.index();
        let ball = SinkhornBall::new(training.epsilon[i], training.rho_bar[i], dim)?;
        let cloud = worst_case_cloud(
            &ball,
            &d.train[i],
            &det,
            k,
            lambdas[i],
            cfg.worst_case.samples_per_center,
            cfg.train.seed,
        )?;
        let name = format!("cloud_h{}.csv", i + 1);
        let file_path = sink.path(&name);
        let file = File::create(&file_path).map_err(|e| io_err(&file_path, e))?;
        cloud.write_csv(file)?;
        files.push(entry(&name, Some(cloud.points.len())));
        clouds.push(CloudInfo {
            hypothesis: i + 1,
            file: name,
            lambda_star: lambdas[i],
            points: cloud.points.len(),
            max_weight_sum_deviation: cloud.group_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max),
            weighted_error: cloud.weighted_error(),
            unweighted_error: cloud.unweighted_error(),
        });
    }

    #[derive(Serialize)]
    struct WorstCaseInfo {
        detector: PathBuf,
        clouds: Vec<CloudInfo>,
    }
    let info = WorstCaseInfo { detector: path, clouds };
    sink.manifest(&Manifest {
        seed: Some(cfg.train.seed),
        files,
        extra: &info,
    })?;
    sink.emit(&info)
}

pub fn diag(kind: DiagKind, cfg: Option<&RunConfig>, out: Option<&Path>) -> Result<(), CliError> {
    let report: DiagReport = diagnostics::run(kind)?;
    let hash = match cfg {
        Some(c) => c.hash(),
        None => {
            let key = serde_json::to_string(&kind).expect("kind serializes");
            format!("{:x}", Sha256::digest(key.as_bytes()))
        }
    };
    match out {
        Some(dir) => Sink::new(dir, "diag", hash)?.emit(&report),
        None => {
            let tmp = Sink::detached("diag", hash);
            println!("{}", serde_json::to_string(&tmp.envelope(&report)).expect("report serializes"));
            Ok(())
        }
    }
}
