//! Helpers shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// For a fixed support `S` and sign pattern `s`, the constrained minimiser of
/// `‖c‖₁` subject to `‖Ac − v‖ ≤ σ` (with the constraint active) solves
/// `A_Sᵀ(v − A_S c_S) = λ s`, so `c_S = G⁻¹(A_Sᵀv − λs)` and
/// `‖v − A_S c_S‖² = ‖(I − P_S)v‖² + λ² sᵀG⁻¹s`; `λ` follows in closed form.
/// The candidate is optimal when its signs agree with `s` and every column off
/// `S` satisfies `|A_jᵀr| ≤ λ`. Supports are tried by increasing size.
pub fn kkt_oracle(a: &DMatrix<f64>, v: &DVector<f64>, sigma: f64) -> Option<Vec<f64>> {
    let (m, n) = a.shape();
    if v.norm() <= sigma {
        return Some(vec![0.0; n]);
    }
    for k in 1..=m.min(n) {
        for support in combinations(n, k) {
            let a_s = a.select_columns(&support);
            let Some(g_inv) = (a_s.transpose() * &a_s).try_inverse() else { continue };
            let ls = &g_inv * (a_s.transpose() * v);
            let perp = (v - &a_s * &ls).norm_squared();
            if perp > sigma * sigma {
                continue;
            }
            for mask in 0..(1u32 << k) {
                let s = DVector::from_fn(k, |i, _| if mask >> i & 1 == 1 { -1.0 } else { 1.0 });
                let q = &g_inv * &s;
                let curvature = s.dot(&q);
                if curvature <= 0.0 || curvature.is_nan() {
                    continue;
                }
                let lambda = ((sigma * sigma - perp) / curvature).sqrt();
                let c_s = &ls - &q * lambda;
                if c_s.iter().zip(s.iter()).any(|(c, s)| c * s <= 0.0) {
                    continue;
                }
                let r = v - &a_s * &c_s;
                let dual = a.transpose() * &r;
                let feasible = (0..n).filter(|j| !support.contains(j)).all(|j| dual[j].abs() <= lambda * (1.0 + 1e-9));
                if feasible {
                    let mut c = vec![0.0; n];
                    for (i, &j) in support.iter().enumerate() {
                        c[j] = c_s[i];
                    }
                    return Some(c);
                }
            }
        }
    }
    None
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn gaussian_matrix(rng: &mut ChaCha20Rng, m: usize, n: usize) -> DMatrix<f64> {
    let scale = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale)
}

/// A random `m × n` Gaussian system (`m ≤ 8`, `n ≤ 12`) with a planted
/// vector of 1–3 nonzeros and noise of norm `η`; returns `(A, V, σ)`.
pub fn oracle_instance(rng: &mut ChaCha20Rng) -> (DMatrix<f64>, DVector<f64>, f64) {
    let m = rng.random_range(5..=8);
    let n = rng.random_range(m + 1..=12);
    let a = gaussian_matrix(rng, m, n);
    let s = rng.random_range(1..=3.min(m - 1));
    let mut planted = vec![0.0; n];
    for j in rand::seq::index::sample(rng, n, s) {
        let mag: f64 = rng.random_range(0.5..2.0);
        planted[j] = if rng.random_bool(0.5) { mag } else { -mag };
    }
    let noise = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let eta: f64 = rng.random_range(1e-3..0.2);
    let v = &a * DVector::from_vec(planted) + noise.normalize() * eta;
    let sigma = eta * rng.random_range(0.8..1.5);
    (a, v, sigma)
}

pub fn seeded(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
