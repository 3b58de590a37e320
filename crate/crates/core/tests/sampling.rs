use clpp::model::{
    sample_heavy_tail_field, sample_poisson_strip, sample_uniform_box, sample_uniform_disk, scale_entropy,
    scale_holder,
};
use clpp::rng::derive_seed;

const REPLICAS: u64 = 600;

fn within_4_sigma(got: f64, want: f64, sigma: f64) -> bool {
    (got - want).abs() <= 4.0 * sigma
}

#[test]
fn same_seed_same_cloud() {
    for seed in [0, 1, u64::MAX] {
        assert_eq!(sample_poisson_strip(2.0, 30.0, 5.0, seed).unwrap(), sample_poisson_strip(2.0, 30.0, 5.0, seed).unwrap());
        assert_eq!(sample_uniform_disk(50, 1.0, seed).unwrap(), sample_uniform_disk(50, 1.0, seed).unwrap());
        assert_eq!(
            sample_heavy_tail_field(1.5, 2.0, 0.3, seed).unwrap(),
            sample_heavy_tail_field(1.5, 2.0, 0.3, seed).unwrap()
        );
    }
    assert_ne!(sample_uniform_box(50, 1.0, 1.0, 1).unwrap(), sample_uniform_box(50, 1.0, 1.0, 2).unwrap());
}

#[test]
fn directed_clouds_stay_sorted() {
    for r in 0..50 {
        let c = sample_poisson_strip(1.0, 40.0, 10.0, derive_seed(3, r)).unwrap();
        for cloud in [c.clone(), scale_holder(&c, 3.0, 0.7).unwrap(), scale_entropy(&c, 0.2, 2.0, 1.0).unwrap()] {
            assert_eq!(cloud.len(), c.len());
            assert!(cloud.as_directed().unwrap().windows(2).all(|w| w[0].t < w[1].t));
        }
    }
}

#[test]
fn poisson_counts_have_poisson_moments() {
    let (lambda, t, w) = (1.5, 10.0, 2.0);
    let mu = lambda * t * 2.0 * w;
    let n: Vec<f64> = (0..REPLICAS)
        .map(|r| sample_poisson_strip(lambda, t, w, derive_seed(11, r)).unwrap().len() as f64)
        .collect();
    let k = n.len() as f64;
    let mean = n.iter().sum::<f64>() / k;
    let var = n.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    assert!(within_4_sigma(mean, mu, (mu / k).sqrt()), "mean {mean} vs {mu}");
    assert!(within_4_sigma(var, mu, ((mu + 2.0 * mu * mu) / k).sqrt()), "variance {var} vs {mu}");
}

#[test]
fn uniform_coordinates_have_uniform_moments() {
    let (t, x) = (3.0, 2.0);
    let mut ts = Vec::new();
    let mut xs = Vec::new();
    for r in 0..REPLICAS {
        for p in sample_uniform_box(20, t, x, derive_seed(12, r)).unwrap().as_directed().unwrap() {
            ts.push(p.t);
            xs.push(p.x);
        }
    }
    let n = ts.len() as f64;
    let m1 = |v: &[f64]| v.iter().sum::<f64>() / n;
    let m2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>() / n;
    assert!(within_4_sigma(m1(&ts), t / 2.0, (t * t / 12.0 / n).sqrt()));
    assert!(within_4_sigma(m2(&ts), t * t / 3.0, (4.0 * t.powi(4) / 45.0 / n).sqrt()));
    assert!(within_4_sigma(m1(&xs), 0.0, (x * x / 3.0 / n).sqrt()));
    assert!(within_4_sigma(m2(&xs), x * x / 3.0, (4.0 * x.powi(4) / 45.0 / n).sqrt()));
}

#[test]
fn pareto_weights_follow_the_survival_function() {
    let (alpha, wmin) = (1.5, 0.5);
    let mut ws = Vec::new();
    for r in 0..REPLICAS {
        let c = sample_heavy_tail_field(alpha, 1.0, wmin, derive_seed(13, r)).unwrap();
        ws.extend(c.as_weighted().unwrap().iter().map(|p| p.w));
    }
    let n = ws.len() as f64;
    for mult in [2.0, 5.0] {
        let p = (1.0 / mult as f64).powf(alpha);
        let got = ws.iter().filter(|&&w| w > wmin * mult).count() as f64 / n;
        assert!(within_4_sigma(got, p, (p * (1.0 - p) / n).sqrt()), "survival at {mult} wmin: {got} vs {p}");
    }
}
