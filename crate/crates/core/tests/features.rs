use srht::features::{
    build_feature_map, Detector, FeatureMap, FeatureMapSpec, FeatureParams, Hypothesis, Scaling, Standardizer,
};

#[test]
fn cosine_features_recompute_from_their_parameters() {
    let map = build_feature_map(&FeatureMapSpec::gaussian_rff(3, 7, 0.8, 4)).unwrap();
    let FeatureParams::GaussianRff { directions, phases } = map.params() else {
        panic!("wrong parameter kind");
    };
    let x = [0.3, -1.1, 2.0];
    let phi = map.featurize(&x).unwrap();
    assert_eq!(phi.len(), 7);
    for ((z, b), p) in directions.iter().zip(phases).zip(&phi) {
        let arg: f64 = z.iter().zip(&x).map(|(a, c)| a * c).sum::<f64>() + b;
        assert!((p - arg.cos() / 7f64.sqrt()).abs() < 1e-15);
        assert!((0.0..std::f64::consts::TAU).contains(b));
    }
    assert_eq!(map.norm_bound(), Some(1.0));
}

#[test]
fn cosine_features_approximate_the_halved_gaussian_kernel() {
    let bw = 1.5;
    let map = build_feature_map(&FeatureMapSpec::gaussian_rff(2, 40_000, bw, 9)).unwrap();
    let pairs = [([0.0, 0.0], [0.0, 0.0]), ([0.0, 0.0], [1.0, 0.5]), ([1.0, -1.0], [-0.5, 2.0])];
    for (x, y) in pairs {
        let (fx, fy) = (map.featurize(&x).unwrap(), map.featurize(&y).unwrap());
        let inner: f64 = fx.iter().zip(&fy).map(|(a, b)| a * b).sum();
        let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        let kernel = 0.5 * (-d2 / (2.0 * bw * bw)).exp();
        assert!((inner - kernel).abs() < 0.01, "{inner} vs {kernel}");
    }
}

#[test]
fn cosine_directions_have_inverse_bandwidth_spread() {
    let map = build_feature_map(&FeatureMapSpec::gaussian_rff(1, 50_000, 0.5, 2)).unwrap();
    let FeatureParams::GaussianRff { directions, .. } = map.params() else {
        panic!("wrong parameter kind");
    };
    let n = directions.len() as f64;
    let var = directions.iter().map(|z| z[0] * z[0]).sum::<f64>() / n;
    assert!((var.sqrt() - 2.0).abs() < 0.03, "{}", var.sqrt());
}

#[test]
fn tangent_features_have_the_documented_layout() {
    let spec = FeatureMapSpec::ntk2_softplus(2, 3, 5).with_scaling(Scaling::InvD);
    let map = build_feature_map(&spec).unwrap();
    assert_eq!(map.output_dim(), 3 * 4);
    assert_eq!(map.norm_bound(), None);
    let FeatureParams::Ntk2Softplus { weights } = map.params() else {
        panic!("wrong parameter kind");
    };
    let x = [0.7, -0.2];
    let phi = map.featurize(&x).unwrap();
    let aug = [x[0], x[1], 1.0];
    for (w, chunk) in weights.iter().zip(phi.chunks(4)) {
        let pre: f64 = w.iter().zip(&aug).map(|(a, b)| a * b).sum();
        let softplus = (1.0 + pre.exp()).ln();
        let sigmoid = 1.0 / (1.0 + (-pre).exp());
        assert!((chunk[0] - softplus / 3.0).abs() < 1e-14);
        for l in 0..3 {
            assert!((chunk[1 + l] - sigmoid * aug[l] / 3.0).abs() < 1e-14);
        }
    }
}

#[test]
fn standardizer_centres_and_scales_the_fit_sample() {
    let samples = vec![vec![1.0, 5.0, 2.0], vec![3.0, 5.0, -2.0], vec![8.0, 5.0, 0.0]];
    let st = Standardizer::fit(&samples).unwrap();
    assert_eq!(st.scale[1], 1.0);
    let spec = FeatureMapSpec::gaussian_rff(3, 4, 1.0, 0);
    let map = build_feature_map(&spec).unwrap();
    let with = map.clone().with_standardizer(st.clone()).unwrap();
    for x in &samples {
        let z: Vec<f64> = x.iter().zip(&st.mean).zip(&st.scale).map(|((v, m), s)| (v - m) / s).collect();
        assert_eq!(with.featurize(x).unwrap(), map.featurize(&z).unwrap());
    }
    let zs: Vec<Vec<f64>> = samples
        .iter()
        .map(|x| x.iter().zip(&st.mean).zip(&st.scale).map(|((v, m), s)| (v - m) / s).collect())
        .collect();
    for l in [0, 2] {
        let mean = zs.iter().map(|z| z[l]).sum::<f64>() / 3.0;
        let var = zs.iter().map(|z| z[l] * z[l]).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
    }
    assert!(Standardizer::fit(&[]).is_err());
    assert!(map.with_standardizer(Standardizer { mean: vec![0.0], scale: vec![1.0] }).is_err());
}

#[test]
fn zero_score_is_attributed_to_the_first_hypothesis() {
    let map = build_feature_map(&FeatureMapSpec::gaussian_rff(1, 2, 1.0, 0)).unwrap();
    let det = Detector::new(vec![0.0, 0.0], map.clone()).unwrap();
    assert_eq!(det.decide(&[0.4]).unwrap(), Hypothesis::H1);
    assert!(!Hypothesis::H1.is_error(0.0));
    assert!(Hypothesis::H2.is_error(0.0));
    assert_eq!(Hypothesis::H1.error_sign(), -Hypothesis::H2.error_sign());
    assert!(Detector::new(vec![1.0, 1.0], map.clone()).is_err());
    assert!(Detector::new(vec![1.0], map).is_err());
}

#[test]
fn maps_are_deterministic_and_serializable() {
    let spec = FeatureMapSpec::ntk2_softplus(3, 5, 11);
    let a = build_feature_map(&spec).unwrap();
    assert_eq!(a, build_feature_map(&spec).unwrap());
    assert_ne!(a, build_feature_map(&FeatureMapSpec { seed: 12, ..spec.clone() }).unwrap());
    let text = serde_json::to_string(&a).unwrap();
    let back: FeatureMap = serde_json::from_str(&text).unwrap();
    assert_eq!(back, a);
    let x = [0.1, 0.2, 0.3];
    assert_eq!(back.featurize(&x).unwrap(), a.featurize(&x).unwrap());
}

#[test]
fn invalid_specs_and_parts_are_rejected() {
    let base = FeatureMapSpec::gaussian_rff(2, 3, 1.0, 0);
    for bad in [
        FeatureMapSpec { input_dim: 0, ..base.clone() },
        FeatureMapSpec { num_features: 0, ..base.clone() },
        FeatureMapSpec { bandwidth: 0.0, ..base.clone() },
        FeatureMapSpec { bandwidth: f64::INFINITY, ..base.clone() },
    ] {
        assert!(build_feature_map(&bad).is_err());
    }
    let wrong = FeatureParams::Ntk2Softplus { weights: vec![vec![0.0; 3]; 3] };
    assert!(FeatureMap::from_parts(base.clone(), wrong).is_err());
    let short = FeatureParams::GaussianRff { directions: vec![vec![0.0; 2]; 2], phases: vec![0.0; 3] };
    assert!(FeatureMap::from_parts(base.clone(), short).is_err());
    assert!(build_feature_map(&base).unwrap().featurize(&[1.0]).is_err());
}
