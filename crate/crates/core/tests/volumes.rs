use clpp::analytics::{
    induction_entropy, induction_holder, induction_nondir, mc_volume, vol_entropy, vol_holder, vol_nondir, Region,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn induction_recursion_matches_closed_forms() {
    for k in 2..=3 {
        for (a, b) in [(2.0, 1.0), (1.0, 0.0), (2.0, 0.0), (3.0, 2.0)] {
            let want = vol_entropy(k, 1.3, 0.8, a, b).unwrap().exp();
            let got = induction_entropy(k, 1.3, 0.8, a, b).unwrap();
            assert!(rel(got, want) < 1e-6, "entropy k={k} a={a} b={b}: {got} vs {want}");
        }
        for g in [0.0, 0.5, 1.0, 2.0] {
            let want = vol_holder(k, 1.1, 0.9, g).unwrap().exp();
            let got = induction_holder(k, 1.1, 0.9, g).unwrap();
            assert!(rel(got, want) < 1e-6, "holder k={k} g={g}: {got} vs {want}");
        }
        for (a, b) in [(2.0, 1.0), (2.0, 0.0), (1.0, 1.0)] {
            let want = vol_nondir(k, 0.7, a, b).unwrap().exp();
            let got = induction_nondir(k, 0.7, a, b).unwrap();
            assert!(rel(got, want) < 1e-6, "nondir k={k} a={a} b={b}: {got} vs {want}");
        }
    }
}

#[test]
fn monte_carlo_matches_closed_forms() {
    let regions = [
        Region::Entropy { k: 2, t: 1.0, budget: 1.0, a: 2.0, b: 1.0 },
        Region::Entropy { k: 3, t: 1.0, budget: 1.0, a: 2.0, b: 1.0 },
        Region::Holder { k: 3, t: 1.0, a_max: 1.0, gamma: 0.5 },
        Region::NonDir { k: 2, d: 1.0, a: 2.0, b: 1.0 },
    ];
    for (i, r) in regions.iter().enumerate() {
        let e = mc_volume(r, 1_000_000, 100 + i as u64).unwrap();
        let want = r.exact().unwrap();
        assert!((e.estimate - want).abs() < 3.0 * e.stderr, "{r:?}: {e:?} vs {want}");
    }
}

#[test]
fn stderr_follows_root_n() {
    let r = Region::Holder { k: 2, t: 1.0, a_max: 1.0, gamma: 1.0 };
    let a = mc_volume(&r, 400_000, 5).unwrap();
    let b = mc_volume(&r, 1_600_000, 6).unwrap();
    let ratio = a.stderr / b.stderr;
    assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
}
