//! Douglas-Rachford against an exhaustive KKT oracle, and the proximal maps
//! against their closed forms.

mod common;

use common::{gaussian_matrix, kkt_oracle, oracle_instance, seeded};
use cyclic_sparse::solver::{
    douglas_rachford, project_ball, prox_f1, prox_f2, soft_threshold, BasisPursuitProblem, GraphProjector,
    SolverConfig,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

#[test]
fn douglas_rachford_matches_exhaustive_oracle_on_50_instances() {
    let start = std::time::Instant::now();
    let mut rng = seeded(20);
    let config = SolverConfig { tol: 1e-13, max_iters: 1_000_000, ..SolverConfig::default() };
    let mut worst: f64 = 0.0;
    for instance in 0..50 {
        let (a, v, sigma) = oracle_instance(&mut rng);
        let (m, n) = a.shape();
        let oracle = kkt_oracle(&a, &v, sigma).unwrap_or_else(|| panic!("instance {instance}: oracle found no KKT point"));
        let problem = BasisPursuitProblem::new(a.clone(), v.clone(), sigma).unwrap();
        let sol = douglas_rachford(&problem, &config).unwrap();
        let err = sol.c.iter().zip(&oracle).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
        assert!(
            err <= 1e-5,
            "instance {instance} ({m}x{n}): max deviation {err:.3e} after {} iterations\nDR     {:?}\noracle {:?}",
            sol.iterations,
            sol.c,
            oracle
        );
        let l1_dr: f64 = sol.c.iter().map(|x| x.abs()).sum();
        let l1_or: f64 = oracle.iter().map(|x| x.abs()).sum();
        assert!(l1_dr <= l1_or + 1e-6, "instance {instance}: ℓ1 {l1_dr} above the optimum {l1_or}");
    }
    println!("worst deviation from the oracle: {worst:.3e} in {:.2?}", start.elapsed());
}

#[test]
fn oracle_recovers_a_noiseless_planted_vector() {
    // sanity check on the oracle itself: orthonormal columns, tiny σ
    let a = DMatrix::<f64>::identity(4, 4);
    let v = DVector::from_vec(vec![1.0, 0.0, -2.0, 0.0]);
    let c = kkt_oracle(&a, &v, 1e-3).unwrap();
    // both entries shrink by the same λ, and 2λ² = σ²
    let lambda = 1e-3 / 2f64.sqrt();
    let want = [1.0 - lambda, 0.0, -2.0 + lambda, 0.0];
    for (x, y) in c.iter().zip(want) {
        assert!((x - y).abs() < 1e-12, "{c:?}");
    }
}

fn random_vec(rng: &mut ChaCha20Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-scale..scale)).collect()
}

#[test]
fn soft_threshold_matches_closed_form_on_10k_inputs() {
    let mut rng = seeded(1);
    for _ in 0..10_000 {
        let x = random_vec(&mut rng, 7, 5.0);
        let gamma = rng.random_range(0.0..3.0);
        let got = soft_threshold(&x, gamma);
        for (g, &xi) in got.iter().zip(&x) {
            let want = xi.signum() * (xi.abs() - gamma).max(0.0);
            assert!((g - want).abs() <= 1e-12, "S_{gamma}({xi}) = {g}, expected {want}");
        }
    }
}

#[test]
fn ball_projection_matches_closed_form_on_10k_inputs() {
    let mut rng = seeded(2);
    for _ in 0..10_000 {
        let len = rng.random_range(1..10);
        let w = random_vec(&mut rng, len, 4.0);
        let v = random_vec(&mut rng, len, 4.0);
        let sigma = rng.random_range(0.0..6.0);
        let got = project_ball(&w, &v, sigma);
        let d: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let t = if d <= sigma { 1.0 } else { sigma / d };
        for i in 0..len {
            let want = v[i] + t * (w[i] - v[i]);
            assert!((got[i] - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn graph_projection_lands_on_the_graph() {
    let mut rng = seeded(3);
    for trial in 0..400 {
        let m = rng.random_range(1..15);
        let n = rng.random_range(1..15);
        let a = gaussian_matrix(&mut rng, m, n) * rng.random_range(0.1..10.0);
        let w = random_vec(&mut rng, m, 3.0);
        let c = random_vec(&mut rng, n, 3.0);
        let (w2, c2) = prox_f2(&w, &c, &a).unwrap();
        let ac = &a * DVector::from_vec(c2.clone());
        for i in 0..m {
            assert!((w2[i] - ac[i]).abs() <= 1e-10, "trial {trial} ({m}x{n}): w' - Ac' = {}", w2[i] - ac[i]);
        }
        // the cached factorization gives the same answer
        let proj = GraphProjector::new(a.clone()).unwrap();
        let (w3, c3) = proj.apply(&DVector::from_vec(w.clone()), &DVector::from_vec(c.clone()));
        for (x, y) in w3.iter().zip(&w2).chain(c3.iter().zip(&c2)) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn soft_threshold_is_the_l1_prox(x in prop::collection::vec(-10.0..10.0f64, 1..8), gamma in 0.0..4.0f64,
                                      dx in prop::collection::vec(-1.0..1.0f64, 8)) {
        // x* minimises γ‖z‖₁ + ½‖z − x‖²; compare with a perturbed point
        let z = soft_threshold(&x, gamma);
        let obj = |z: &[f64]| gamma * z.iter().map(|v| v.abs()).sum::<f64>()
            + 0.5 * z.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let pert: Vec<f64> = z.iter().zip(&dx).map(|(a, d)| a + d).collect();
        prop_assert!(obj(&z) <= obj(&pert) + 1e-12);
    }

    #[test]
    fn prox_f1_is_nonexpansive(w1 in prop::collection::vec(-5.0..5.0f64, 6), w2 in prop::collection::vec(-5.0..5.0f64, 6),
                               c1 in prop::collection::vec(-5.0..5.0f64, 4), c2 in prop::collection::vec(-5.0..5.0f64, 4),
                               v in prop::collection::vec(-2.0..2.0f64, 6), gamma in 0.0..2.0f64, sigma in 0.0..3.0f64) {
        let (a1, b1) = prox_f1(&w1, &c1, gamma, &v, sigma);
        let (a2, b2) = prox_f1(&w2, &c2, gamma, &v, sigma);
        let before = (dist(&w1, &w2).powi(2) + dist(&c1, &c2).powi(2)).sqrt();
        let after = (dist(&a1, &a2).powi(2) + dist(&b1, &b2).powi(2)).sqrt();
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn prox_f2_is_nonexpansive_and_idempotent(seed in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        let mut rng = seeded(seed);
        let a = gaussian_matrix(&mut rng, m, n);
        let (w1, c1) = (random_vec(&mut rng, m, 3.0), random_vec(&mut rng, n, 3.0));
        let (w2, c2) = (random_vec(&mut rng, m, 3.0), random_vec(&mut rng, n, 3.0));
        let (p1, q1) = prox_f2(&w1, &c1, &a).unwrap();
        let (p2, q2) = prox_f2(&w2, &c2, &a).unwrap();
        let before = (dist(&w1, &w2).powi(2) + dist(&c1, &c2).powi(2)).sqrt();
        let after = (dist(&p1, &p2).powi(2) + dist(&q1, &q2).powi(2)).sqrt();
        prop_assert!(after <= before + 1e-10);
        let (p3, q3) = prox_f2(&p1, &q1, &a).unwrap();
        prop_assert!(dist(&p1, &p3) + dist(&q1, &q3) <= 1e-10 * (1.0 + before));
    }
}
