//! Synthetic datasets and CSV ingestion.
//!
//! CSV layout: a header row, one row per sample, feature columns `x1..xd`
//! (any names) and a `label` column holding `1` or `2`. Files without a label
//! column can be read per hypothesis with [`load_samples_csv`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    Hdgm,
    TwoMoons,
    Csv,
}

/// Gaussian-mixture parameters: `H1 = Σ_c w_c N(μ_c, σ² I)` with
/// `μ_c = ±separation · e_1`, and `H2` the same mixture shifted by `shift · 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HdgmParams {
    pub separation: f64,
    pub shift: f64,
    pub weights: [f64; 2],
}

impl Default for HdgmParams {
    fn default() -> Self {
        HdgmParams {
            separation: 1.0,
            shift: 0.5,
            weights: [0.5, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    /// Training samples per hypothesis; unused for `csv`.
    #[serde(default)]
    pub n_train: usize,
    /// Test samples per hypothesis; unused for `csv`.
    #[serde(default)]
    pub n_test: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Gaussian noise standard deviation (σ for the mixture).
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default)]
    pub hdgm: HdgmParams,
    #[serde(default)]
    pub seed: u64,
    /// Training file for `csv`; the test file goes in `test_path`.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub test_path: Option<PathBuf>,
}

fn default_dim() -> usize {
    10
}

fn default_noise() -> f64 {
    1.0
}

impl DatasetSpec {
    pub fn hdgm(n_train: usize, n_test: usize, dim: usize, seed: u64) -> Self {
        DatasetSpec {
            kind: DatasetKind::Hdgm,
            n_train,
            n_test,
            dim,
            noise: 1.0,
            hdgm: HdgmParams::default(),
            seed,
            path: None,
            test_path: None,
        }
    }

    pub fn two_moons(n_train: usize, n_test: usize, noise: f64, seed: u64) -> Self {
        DatasetSpec {
            kind: DatasetKind::TwoMoons,
            n_train,
            n_test,
            dim: 2,
            noise,
            hdgm: HdgmParams::default(),
            seed,
            path: None,
            test_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == DatasetKind::Csv {
            if self.path.is_none() {
                return Err(Error::Config("csv dataset needs `path`".into()));
            }
            return Ok(());
        }
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::Config("n_train and n_test must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(Error::Config("dim must be at least 1".into()));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::Config(format!("noise must be nonnegative, got {}", self.noise)));
        }
        if self.kind == DatasetKind::TwoMoons && self.dim != 2 {
            return Err(Error::Config(format!("two-moons data is 2-dimensional, got dim = {}", self.dim)));
        }
        if self.kind == DatasetKind::Hdgm {
            let w = self.hdgm.weights;
            if w.iter().any(|&v| !(v >= 0.0)) || ((w[0] + w[1]) - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("hdgm weights must lie on the simplex, got {w:?}")));
            }
        }
        Ok(())
    }
}

/// Samples per hypothesis, split into training and test sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub train: [Vec<Vec<f64>>; 2],
    pub test: [Vec<Vec<f64>>; 2],
}

/// Stream tags keep every (split, hypothesis) pair independent of the others' sizes.
fn split_stream(seed: u64, split: u64, k: u64) -> rand_chacha::ChaCha8Rng {
    rng::stream(seed, 0xda7a_0000 | (split << 4) | k)
}

pub fn gen_hdgm(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let p = &spec.hdgm;
    let draw = |r: &mut rand_chacha::ChaCha8Rng, k: usize| -> Vec<f64> {
        let first = r.gen::<f64>() < p.weights[0];
        let center = if first { p.separation } else { -p.separation };
        (0..spec.dim)
            .map(|l| {
                let g: f64 = r.sample(StandardNormal);
                let mean = if l == 0 { center } else { 0.0 } + if k == 1 { p.shift } else { 0.0 };
                mean + spec.noise * g
            })
            .collect()
    };
    Ok(generate(spec, draw))
}

/// Point on the upper (`k = 0`) or lower (`k = 1`) moon at parameter `t ∈ [0, π]`.
pub fn moon_point(k: usize, t: f64) -> [f64; 2] {
    if k == 0 {
        [t.cos(), t.sin()]
    } else {
        [1.0 - t.cos(), 0.5 - t.sin()]
    }
}

pub fn gen_two_moons(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let arc = Uniform::new_inclusive(0.0, PI);
    let draw = |r: &mut rand_chacha::ChaCha8Rng, k: usize| -> Vec<f64> {
        let t = arc.sample(r);
        moon_point(k, t)
            .iter()
            .map(|c| {
                let g: f64 = r.sample(StandardNormal);
                c + spec.noise * g
            })
            .collect()
    };
    Ok(generate(spec, draw))
}

fn generate<F>(spec: &DatasetSpec, draw: F) -> Dataset
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, usize) -> Vec<f64>,
{
    let split = |which: u64, count: usize| -> [Vec<Vec<f64>>; 2] {
        [0, 1].map(|k| {
            let mut r = split_stream(spec.seed, which, k as u64);
            (0..count).map(|_| draw(&mut r, k)).collect()
        })
    };
    Dataset {
        train: split(0, spec.n_train),
        test: split(1, spec.n_test),
    }
}

/// Generates or loads the dataset described by `spec`.
pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    match spec.kind {
        DatasetKind::Hdgm => gen_hdgm(spec),
        DatasetKind::TwoMoons => gen_two_moons(spec),
        DatasetKind::Csv => {
            spec.validate()?;
            let train = load_csv(spec.path.as_ref().expect("validated"))?;
            let test = match &spec.test_path {
                Some(p) => load_csv(p)?,
                None => train.clone(),
            };
            Ok(Dataset { train, test })
        }
    }
}

/// Writes both hypotheses' samples with a trailing `label` column.
pub fn save_csv(path: &Path, samples: [&[Vec<f64>]; 2]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(file, samples).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn write_csv<W: std::io::Write>(writer: W, samples: [&[Vec<f64>]; 2]) -> Result<()> {
    let dim = samples.iter().flat_map(|s| s.first()).map(Vec::len).next().unwrap_or(0);
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=dim).map(|l| format!("x{l}")).collect();
    header.push("label".into());
    w.write_record(&header).map_err(csv_error)?;
    for (k, set) in samples.iter().enumerate() {
        for x in set.iter() {
            let mut row: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
            row.push((k + 1).to_string());
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            msg: format!("ragged row: expected {expected_len} fields, found {len}"),
        },
        other => Error::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<(usize, csv::StringRecord)>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec));
    }
    Ok((header, rows))
}

fn parse_cell(cell: &str, line: usize, column: &str) -> Result<f64> {
    cell.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("column {column:?}: non-numeric value {cell:?}"),
    })
}

/// Reads a labeled file into per-hypothesis sample sets.
pub fn load_csv(path: &Path) -> Result<[Vec<Vec<f64>>; 2]> {
    let (header, rows) = read_rows(path)?;
    let label_col = header.iter().position(|h| h == "label").ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("{}: no `label` column in header", path.display()),
    })?;
    let mut out = [Vec::new(), Vec::new()];
    for (line, rec) in rows {
        let mut x = Vec::with_capacity(header.len() - 1);
        let mut label = None;
        for (c, cell) in rec.iter().enumerate() {
            if c == label_col {
                label = Some(match cell {
                    "1" => 0,
                    "2" => 1,
                    other => {
                        return Err(Error::Parse {
                            line,
                            msg: format!("label must be 1 or 2, got {other:?}"),
                        })
                    }
                });
            } else {
                x.push(parse_cell(cell, line, &header[c])?);
            }
        }
        out[label.expect("label column present")].push(x);
    }
    Ok(out)
}

/// Reads an unlabeled file; every column is a feature.
pub fn load_samples_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let (header, rows) = read_rows(path)?;
    rows.into_iter()
        .map(|(line, rec)| {
            rec.iter()
                .enumerate()
                .map(|(c, cell)| parse_cell(cell, line, &header[c]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_determinism() {
        let spec = DatasetSpec::two_moons(20, 7, 0.1, 3);
        let a = gen_two_moons(&spec).unwrap();
        assert_eq!(a.train[0].len(), 20);
        assert_eq!(a.train[1].len(), 20);
        assert_eq!(a.test[0].len(), 7);
        assert_eq!(a, gen_two_moons(&spec).unwrap());
    }

    #[test]
    fn noiseless_moons_lie_on_arcs() {
        let d = gen_two_moons(&DatasetSpec::two_moons(50, 1, 0.0, 1)).unwrap();
        for x in &d.train[0] {
            assert!((x[0].hypot(x[1]) - 1.0).abs() < 1e-12 && x[1] >= 0.0);
        }
        for x in &d.train[1] {
            assert!(((1.0 - x[0]).hypot(0.5 - x[1]) - 1.0).abs() < 1e-12 && x[1] <= 0.5);
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = DatasetSpec::hdgm(0, 1, 2, 0);
        assert!(s.validate().is_err());
        s.n_train = 3;
        s.hdgm.weights = [0.7, 0.7];
        assert!(s.validate().is_err());
        let mut m = DatasetSpec::two_moons(3, 3, 0.1, 0);
        m.dim = 3;
        assert!(m.validate().is_err());
        m.dim = 2;
        m.noise = -1.0;
        assert!(m.validate().is_err());
    }
}
