use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tam_core::features::FeatureVector;
use tam_core::svm::{polynomial_kernel, solve_dual, BinarySvmModel, SvmParams};

fn fv(ids: &[u32]) -> FeatureVector {
    FeatureVector::from_ids(ids.iter().copied())
}

/// Random problems separable by construction: feature 0 marks the positive
/// class and feature 1 the negative one, plus noise features.
fn separable(rng: &mut ChaCha8Rng, l: usize) -> (Vec<FeatureVector>, Vec<i8>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..l {
        let y: i8 = if i % 2 == 0 { 1 } else { -1 };
        let mut ids = vec![if y == 1 { 0 } else { 1 }];
        ids.extend((2..8).filter(|_| rng.gen_bool(0.4)));
        xs.push(FeatureVector::from_ids(ids));
        ys.push(y);
    }
    (xs, ys)
}

#[test]
fn separable_toy_sets_are_learned_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let l = rng.gen_range(2..=20);
        let (xs, ys) = separable(&mut rng, l);
        let refs: Vec<&FeatureVector> = xs.iter().collect();
        let model = BinarySvmModel::train(&refs, &ys, &SvmParams::with_degree(1)).unwrap();
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(model.decide(x).1, y);
        }
    }
}

#[test]
fn linear_kernel_matches_weight_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let l = rng.gen_range(2..=15);
        let xs: Vec<FeatureVector> = (0..l)
            .map(|_| FeatureVector::from_ids((0..6).filter(|_| rng.gen_bool(0.5))))
            .collect();
        let mut ys: Vec<i8> = (0..l).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        ys[0] = 1;
        ys[1] = -1;
        let refs: Vec<&FeatureVector> = xs.iter().collect();
        let model = BinarySvmModel::train(&refs, &ys, &SvmParams::with_degree(1)).unwrap();

        // (x·z + 1) = x·z + 1, so f(z) = w·z + Σ α_i y_i + b.
        let mut w = [0.0f64; 6];
        let mut offset = model.bias;
        for sv in &model.support_vectors {
            let coef = sv.alpha * sv.y as f64;
            offset += coef;
            for &f in sv.x.ids() {
                w[f as usize] += coef;
            }
        }
        for mask in 0u32..64 {
            let z = FeatureVector::from_ids((0..6).filter(|b| mask & (1 << b) != 0));
            let explicit = offset + z.ids().iter().map(|&f| w[f as usize]).sum::<f64>();
            assert!((model.decide(&z).0 - explicit).abs() < 1e-8);
        }
    }
}

#[test]
fn duplicated_pair_keeps_sign_pattern() {
    let x1 = fv(&[0]);
    let x2 = fv(&[1]);
    let once = BinarySvmModel::train(&[&x1, &x2], &[1, -1], &SvmParams::default()).unwrap();
    let twice =
        BinarySvmModel::train(&[&x1, &x2, &x1, &x2], &[1, -1, 1, -1], &SvmParams::default()).unwrap();
    for z in [fv(&[0]), fv(&[1]), fv(&[]), fv(&[0, 1]), fv(&[0, 2]), fv(&[3])] {
        assert_eq!(once.decide(&z).1, twice.decide(&z).1, "{z:?}");
    }
}

#[test]
fn stored_vectors_have_positive_bounded_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in [1, 2] {
        for _ in 0..20 {
            let l = rng.gen_range(4..=40);
            let xs: Vec<FeatureVector> = (0..l)
                .map(|_| FeatureVector::from_ids((0..10).filter(|_| rng.gen_bool(0.3))))
                .collect();
            let ys: Vec<i8> = (0..l).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
            let refs: Vec<&FeatureVector> = xs.iter().collect();
            let params = SvmParams { c: 0.5, ..SvmParams::with_degree(d) };
            let model = BinarySvmModel::train(&refs, &ys, &params).unwrap();
            let sum: f64 = model.support_vectors.iter().map(|sv| sv.alpha * sv.y as f64).sum();
            assert!(sum.abs() < 1e-8);
            assert!(model.support_vectors.iter().all(|sv| sv.alpha > 0.0 && sv.alpha <= 0.5));
            assert!(model.kkt_gap < 1e-3);
        }
    }
}

#[test]
fn solution_is_independent_of_cache_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let xs: Vec<FeatureVector> = (0..60)
        .map(|_| FeatureVector::from_ids((0..12).filter(|_| rng.gen_bool(0.3))))
        .collect();
    let ys: Vec<i8> = (0..60).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    let refs: Vec<&FeatureVector> = xs.iter().collect();
    let big = solve_dual(&refs, &ys, &SvmParams::with_degree(2)).unwrap();
    let tiny = solve_dual(
        &refs,
        &ys,
        &SvmParams { cache_bytes: 1, ..SvmParams::with_degree(2) },
    )
    .unwrap();
    assert_eq!(big, tiny);
}

#[test]
fn model_text_round_trip_is_exact() {
    let x1 = fv(&[0, 2]);
    let x2 = fv(&[1, 2]);
    let x3 = fv(&[0, 1]);
    let model = BinarySvmModel::train(&[&x1, &x2, &x3], &[1, -1, -1], &SvmParams::with_degree(2)).unwrap();
    let text = serde_json::to_string(&model).unwrap();
    let back: BinarySvmModel = serde_json::from_str(&text).unwrap();
    assert_eq!(model, back);
    assert_eq!(polynomial_kernel(&x1, &x2, 2), 4.0);
}
