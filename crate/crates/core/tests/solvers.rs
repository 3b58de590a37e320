use clpp::constraints::{entropy_cost, holder_ratio, is_compatible, ConstraintSpec, BUDGET_SLACK};
use clpp::model::{sample_poisson_strip, sample_uniform_box, sample_uniform_disk, DirectedPoint};
use clpp::solvers::{
    greedy_box_lower_bound, solve_entropy_exact, solve_holder_exact, solve_nondir_anneal, solve_nondir_heldkarp,
    AnnealConfig,
};

// Cardinality-indexed DP: least entropy of a k-chain ending at each point.
fn naive_entropy(pts: &[DirectedPoint], a: f64, b: f64, budget: f64, end: Option<f64>) -> usize {
    let pts: Vec<DirectedPoint> = pts.iter().copied().filter(|p| end.is_none_or(|t| p.t < t)).collect();
    let n = pts.len();
    let close = |i: usize, e: f64| match end {
        Some(t) => e + entropy_cost(t - pts[i].t, -pts[i].x, a, b),
        None => e,
    };
    let mut best = if end.is_some_and(|t| entropy_cost(t, 0.0, a, b) > budget + BUDGET_SLACK) {
        return 0;
    } else {
        0
    };
    let mut layer: Vec<f64> = pts.iter().map(|p| entropy_cost(p.t, p.x, a, b)).collect();
    for k in 1..=n {
        if (0..n).any(|i| close(i, layer[i]) <= budget + BUDGET_SLACK) {
            best = k;
        }
        let mut next = vec![f64::INFINITY; n];
        for i in 0..n {
            for j in 0..n {
                if pts[j].t < pts[i].t && layer[j].is_finite() {
                    let c = layer[j] + entropy_cost(pts[i].t - pts[j].t, pts[i].x - pts[j].x, a, b);
                    next[i] = next[i].min(c);
                }
            }
        }
        layer = next;
    }
    best
}

fn naive_holder(pts: &[DirectedPoint], gamma: f64, a_max: f64, end: Option<f64>) -> usize {
    let lim = a_max + BUDGET_SLACK;
    let n = pts.len();
    let mut f = vec![0usize; n];
    let mut best = if end.is_some_and(|t| holder_ratio(t, 0.0, gamma) > lim) { usize::MAX } else { 0 };
    for i in 0..n {
        let p = pts[i];
        if end.is_some_and(|t| p.t >= t) {
            continue;
        }
        if p.t > 0.0 && holder_ratio(p.t, p.x, gamma) <= lim {
            f[i] = 1;
        }
        for j in 0..i {
            let q = pts[j];
            if f[j] > 0 && q.t < p.t && holder_ratio(p.t - q.t, p.x - q.x, gamma) <= lim {
                f[i] = f[i].max(f[j] + 1);
            }
        }
        let closes = end.is_none_or(|t| holder_ratio(t - p.t, p.x, gamma) <= lim);
        if f[i] > 0 && closes && best != usize::MAX {
            best = best.max(f[i]);
        }
    }
    if best == usize::MAX { 0 } else { best }
}

#[test]
fn entropy_dp_matches_naive_dp_at_medium_scale() {
    for (seed, (a, b)) in [(2.0, 1.0), (1.0, 0.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)].into_iter().enumerate() {
        let c = sample_poisson_strip(1.0, 20.0, 5.0, seed as u64).unwrap();
        let pts = c.as_directed().unwrap();
        for end in [None, Some(20.0)] {
            let fast = solve_entropy_exact(&c, a, b, 20.0, end).unwrap();
            assert_eq!(fast.cardinality, naive_entropy(pts, a, b, 20.0, end), "a={a} b={b} end={end:?}");
            assert!(is_compatible(&c, &fast.chain, &ConstraintSpec::Entropy { a, b, budget: 20.0 }).unwrap().compatible);
        }
    }
}

#[test]
fn holder_dp_matches_naive_dp_at_medium_scale() {
    for (seed, g) in [0.0, 0.5, 1.0, 1.5, 2.0].into_iter().enumerate() {
        let c = sample_poisson_strip(2.0, 30.0, 6.0, 50 + seed as u64).unwrap();
        let pts = c.as_directed().unwrap();
        for end in [None, Some(30.0)] {
            let fast = solve_holder_exact(&c, g, 1.0, end).unwrap();
            assert_eq!(fast.cardinality, naive_holder(pts, g, 1.0, end), "gamma={g} end={end:?}");
        }
    }
}

#[test]
fn greedy_boxes_are_compatible_lower_bounds() {
    let c = sample_uniform_box(400, 1.0, 1.0, 3).unwrap();
    for spec in [
        ConstraintSpec::Entropy { a: 2.0, b: 1.0, budget: 1.0 },
        ConstraintSpec::Holder { gamma: 1.0, a_max: 1.0 },
        ConstraintSpec::Holder { gamma: 0.0, a_max: 1.0 },
    ] {
        let exact = match spec {
            ConstraintSpec::Entropy { a, b, budget } => solve_entropy_exact(&c, a, b, budget, None).unwrap(),
            ConstraintSpec::Holder { gamma, a_max } => solve_holder_exact(&c, gamma, a_max, None).unwrap(),
            _ => unreachable!(),
        };
        for k in [1, 3, 6] {
            let g = greedy_box_lower_bound(&c, &spec, k).unwrap();
            assert!(g.cardinality <= k && g.cardinality <= exact.cardinality);
            assert!(is_compatible(&c, &g.chain, &spec).unwrap().compatible);
        }
    }
    let d = sample_uniform_disk(300, 1.0, 4).unwrap();
    let spec = ConstraintSpec::NonDirEntropy { a: 2.0, b: 1.0, budget: 1.0, t: 1.0 };
    let g = greedy_box_lower_bound(&d, &spec, 10).unwrap();
    assert!(is_compatible(&d, &g.chain, &spec).unwrap().compatible);
}

#[test]
fn annealing_is_a_certified_lower_bound() {
    let cfg = AnnealConfig { restarts: 4, ..AnnealConfig::with_seed(11) };
    for seed in 0..4 {
        let d = sample_uniform_disk(16, 1.0, seed).unwrap();
        let spec = ConstraintSpec::NonDirEntropy { a: 2.0, b: 1.0, budget: 0.6, t: 1.0 };
        let hk = solve_nondir_heldkarp(&d, &spec).unwrap();
        let an = solve_nondir_anneal(&d, &spec, &cfg).unwrap();
        assert!(an.cardinality <= hk.cardinality);
        assert!(an.cardinality + 1 >= hk.cardinality, "anneal {} vs exact {}", an.cardinality, hk.cardinality);
        assert!(is_compatible(&d, &an.chain, &spec).unwrap().compatible);
        assert!(!an.method.is_exact());
    }
}
