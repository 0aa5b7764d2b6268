mod common;

use std::io::Write;

use srht::datagen::{
    gen_hdgm, gen_two_moons, load_csv, load_dataset, load_samples_csv, moon_point, save_csv, DatasetKind, DatasetSpec,
};
use srht::Error;

#[test]
fn mixture_has_the_stated_moments() {
    let d = gen_hdgm(&DatasetSpec::hdgm(40_000, 10, 3, 1)).unwrap();
    for (k, shift) in [(0, 0.0), (1, 0.5)] {
        for l in 0..3 {
            let xs: Vec<f64> = d.train[k].iter().map(|x| x[l]).collect();
            let (mean, std) = common::mean_std(&xs);
            // The first coordinate mixes ±1 with equal weights on top of unit noise.
            let var = if l == 0 { 2.0 } else { 1.0 };
            assert!((mean - shift).abs() < 0.03, "k {k} l {l}: mean {mean}");
            assert!((std * std - var).abs() < 0.05, "k {k} l {l}: var {}", std * std);
        }
    }
}

#[test]
fn moons_lie_near_their_arcs() {
    let d = gen_two_moons(&DatasetSpec::two_moons(2000, 10, 0.05, 3)).unwrap();
    for k in 0..2 {
        let arc: Vec<[f64; 2]> = (0..=2000).map(|i| moon_point(k, std::f64::consts::PI * i as f64 / 2000.0)).collect();
        let mut dists: Vec<f64> = d.train[k]
            .iter()
            .map(|x| arc.iter().map(|p| ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt()).fold(f64::INFINITY, f64::min))
            .collect();
        dists.sort_by(f64::total_cmp);
        // Distance to the curve is at most the 2-D noise norm, whose median is 0.05·√(2 ln 2).
        assert!(dists[1000] < 0.06, "median distance {}", dists[1000]);
    }
    assert_eq!(moon_point(0, 0.0), [1.0, 0.0]);
    assert_eq!(moon_point(1, 0.0), [0.0, 0.5]);
}

#[test]
fn splits_are_independent_of_each_other_and_deterministic() {
    let a = gen_hdgm(&DatasetSpec::hdgm(20, 5, 2, 7)).unwrap();
    let b = gen_hdgm(&DatasetSpec::hdgm(20, 50, 2, 7)).unwrap();
    assert_eq!(a.train, b.train);
    assert_eq!(a.test[0][..], b.test[0][..5]);
    assert_eq!(a, gen_hdgm(&DatasetSpec::hdgm(20, 5, 2, 7)).unwrap());
    assert_ne!(a.train, gen_hdgm(&DatasetSpec::hdgm(20, 5, 2, 8)).unwrap().train);
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen_two_moons(&DatasetSpec::two_moons(15, 7, 0.2, 0)).unwrap();
    let (train, test) = (dir.path().join("train.csv"), dir.path().join("test.csv"));
    save_csv(&train, [&d.train[0], &d.train[1]]).unwrap();
    save_csv(&test, [&d.test[0], &d.test[1]]).unwrap();
    assert_eq!(load_csv(&train).unwrap(), d.train);

    let spec = DatasetSpec {
        kind: DatasetKind::Csv,
        path: Some(train.clone()),
        test_path: Some(test),
        ..DatasetSpec::two_moons(0, 0, 0.0, 0)
    };
    assert_eq!(load_dataset(&spec).unwrap(), d);
    let unlabeled = load_samples_csv(&train).unwrap();
    assert_eq!(unlabeled.len(), 30);
    assert_eq!(unlabeled[0][2], 1.0);
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn malformed_files_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("x1,label\n0.5,1\nabc,2\n", 3),
        ("x1,label\n0.5,1\n0.2,2\n0.1,3\n", 4),
        ("x1,x2,label\n0.5,0.1,1\n0.2,2\n", 3),
    ];
    for (i, (text, expected)) in cases.iter().enumerate() {
        let path = write(&dir, &format!("bad{i}.csv"), text);
        match load_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, *expected, "{text:?}"),
            other => panic!("{text:?}: expected a parse error, got {other:?}"),
        }
    }
    let no_label = write(&dir, "nolabel.csv", "x1,x2\n1,2\n");
    assert!(matches!(load_csv(&no_label), Err(Error::Parse { line: 1, .. })));
    assert!(load_csv(&dir.path().join("missing.csv")).is_err());
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = [
        DatasetSpec::hdgm(0, 5, 2, 0),
        DatasetSpec::hdgm(5, 5, 0, 0),
        DatasetSpec { dim: 3, ..DatasetSpec::two_moons(5, 5, 0.1, 0) },
        DatasetSpec { noise: -1.0, ..DatasetSpec::two_moons(5, 5, 0.1, 0) },
        DatasetSpec { kind: DatasetKind::Csv, ..DatasetSpec::hdgm(5, 5, 2, 0) },
    ];
    for spec in bad {
        assert!(load_dataset(&spec).is_err(), "{spec:?}");
    }
    let mut weights = DatasetSpec::hdgm(5, 5, 2, 0);
    weights.hdgm.weights = [0.7, 0.7];
    assert!(gen_hdgm(&weights).is_err());
}
