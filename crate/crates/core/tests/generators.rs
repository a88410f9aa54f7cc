//! Replicate studies of the network generators and the threshold/seed
//! samplers, checked against analytic moments.

use cascade_core::cascade::{draw_thresholds, select_seeds};
use cascade_core::graph::{gen_random, gen_scale_free, gen_small_world, scale_free_counted};
use cascade_core::rng::stream;
use cascade_core::stats::describe::{mean, median};

const REPLICATES: u64 = 1000;

fn replicate_means(mut f: impl FnMut(u64) -> f64) -> (f64, usize) {
    let xs: Vec<f64> = (0..REPLICATES).map(&mut f).collect();
    (mean(&xs), xs.len())
}

#[test]
fn random_graph_mean_degree() {
    let (n, p) = (1000usize, 0.01);
    // edge count ~ Binomial(n(n-1)/2, p); mean degree = 2E/n
    let pairs = (n * (n - 1) / 2) as f64;
    let expected = 2.0 * pairs * p / n as f64;
    let sd = 2.0 * (pairs * p * (1.0 - p)).sqrt() / n as f64;
    let (got, reps) = replicate_means(|r| {
        let g = gen_random(n, p, &mut stream(100, r)).unwrap();
        g.check_invariants().unwrap();
        g.mean_degree()
    });
    let se = sd / (reps as f64).sqrt();
    assert!((expected - 9.99).abs() < 1e-12);
    assert!(
        (got - expected).abs() < 3.0 * se,
        "mean {got}, expected {expected} ± {se}"
    );
}

#[test]
fn random_graph_vanishing_p() {
    for r in 0..50 {
        let g = gen_random(5, 1e-12, &mut stream(101, r)).unwrap();
        assert_eq!(g.degrees().sum::<usize>(), 0);
    }
}

#[test]
fn small_world_mean_degree_with_shortcuts() {
    let (n, k, beta) = (1000usize, 10usize, 0.1);
    // one Bernoulli(beta) shortcut per lattice edge, each adding 2 to the degree sum
    let lattice_edges = (n * k / 2) as f64;
    let expected = k as f64 + 2.0 * lattice_edges * beta / n as f64;
    let sd = 2.0 * (lattice_edges * beta * (1.0 - beta)).sqrt() / n as f64;
    let (got, reps) = replicate_means(|r| {
        let g = gen_small_world(n, k, beta, &mut stream(102, r)).unwrap();
        g.mean_degree()
    });
    let se = sd / (reps as f64).sqrt();
    assert!((expected - 11.0).abs() < 1e-12);
    assert!(
        (got - expected).abs() < 3.0 * se,
        "mean {got}, expected {expected} ± {se}"
    );
}

#[test]
fn small_world_without_rewiring_is_regular() {
    let g = gen_small_world(1000, 10, 0.0, &mut stream(103, 0)).unwrap();
    assert!(g.degrees().all(|d| d == 10));
    let c = gen_small_world(10, 2, 0.0, &mut stream(103, 1)).unwrap();
    assert!(c.degrees().all(|d| d == 2));
    assert_eq!(c.edge_count(), 10);
}

#[test]
fn scale_free_edge_count_is_exact() {
    for r in 0..20 {
        let (g, ring, arrivals) = scale_free_counted(1000, 4, 2.0, &mut stream(104, r)).unwrap();
        assert_eq!(ring, 4);
        assert_eq!(arrivals, 2 * 996);
        assert_eq!(g.edge_count(), 1996);
        assert_eq!(g.degrees().sum::<usize>(), 2 * 1996);
        g.check_invariants().unwrap();
    }
}

#[test]
fn scale_free_fractional_links_average_out() {
    let (n, m0, m) = (1000usize, 4usize, 2.5);
    let arrivals = (n - m0) as f64;
    let expected = 4.0 + arrivals * m;
    let sd = (arrivals * 0.25).sqrt();
    let (got, reps) = replicate_means(|r| {
        gen_scale_free(n, m0, m, &mut stream(105, r))
            .unwrap()
            .edge_count() as f64
    });
    let se = sd / (reps as f64).sqrt();
    assert!(
        (got - expected).abs() < 3.0 * se,
        "edges {got}, expected {expected} ± {se}"
    );
}

#[test]
fn scale_free_degrees_are_right_skewed() {
    let hits = (0..100)
        .filter(|&r| {
            let g = gen_scale_free(1000, 4, 2.0, &mut stream(106, r)).unwrap();
            let degrees: Vec<f64> = g.degrees().map(|d| d as f64).collect();
            let max = degrees.iter().copied().fold(0.0, f64::max);
            max > 5.0 * median(&degrees)
        })
        .count();
    assert!(hits >= 95, "{hits} of 100 replicates");
}

#[test]
fn threshold_mean_is_near_one_half() {
    for r in 0..200 {
        let t = draw_thresholds(1000, &mut stream(107, r));
        let m = mean(t.as_slice());
        assert!((0.45..=0.55).contains(&m), "replicate {r}: mean {m}");
    }
    let single = draw_thresholds(1, &mut stream(107, 999));
    assert!((0.0..=1.0).contains(&single[0]));
    assert_eq!(
        draw_thresholds(50, &mut stream(108, 3)),
        draw_thresholds(50, &mut stream(108, 3))
    );
}

#[test]
fn single_seed_is_uniform() {
    let mut counts = [0usize; 10];
    let mut rng = stream(109, 0);
    for _ in 0..10_000 {
        let s = select_seeds(10, 1, &mut rng).unwrap();
        counts[s.as_slice()[0]] += 1;
    }
    for (agent, &c) in counts.iter().enumerate() {
        let f = c as f64 / 10_000.0;
        assert!((f - 0.1).abs() <= 0.03, "agent {agent}: frequency {f}");
    }
}

#[test]
fn seed_sets_are_distinct_and_exhaustive() {
    let s = select_seeds(1000, 5, &mut stream(110, 0)).unwrap();
    assert_eq!(s.len(), 5);
    let mut v = s.as_slice().to_vec();
    v.dedup();
    assert_eq!(v.len(), 5);
    let all = select_seeds(5, 5, &mut stream(110, 1)).unwrap();
    assert_eq!(all.as_slice(), &[0, 1, 2, 3, 4]);
}
