//! Univariate polynomial helpers for the Legendre basis and the change of
//! variables `x = a·u + b`.

use crate::scalar::Real;

/// Coefficients (constant first) of the `L²(dx/2)`-normalized Legendre
/// polynomials `√(2k+1)·P_k` for `k = 0..=p`.
pub fn normalized_legendre_coeffs<T: Real>(p: usize) -> Vec<Vec<T>> {
    // Bonnet recursion on the classical P_k, normalized at the end
    let mut classical: Vec<Vec<T>> = vec![vec![T::one()]];
    if p >= 1 {
        classical.push(vec![T::zero(), T::one()]);
    }
    for k in 1..p {
        let kf = T::lit(k as f64);
        let mut next = vec![T::zero(); k + 2];
        for (i, &c) in classical[k].iter().enumerate() {
            next[i + 1] += (T::lit(2.0) * kf + T::one()) * c;
        }
        for (i, &c) in classical[k - 1].iter().enumerate() {
            next[i] -= kf * c;
        }
        let inv = T::one() / (kf + T::one());
        next.iter_mut().for_each(|c| *c *= inv);
        classical.push(next);
    }
    classical
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let s = T::lit((2 * k + 1) as f64).sqrt();
            c.into_iter().map(|x| x * s).collect()
        })
        .collect()
}

/// Evaluates all normalized Legendre polynomials of degree `≤ p` at `x`.
pub fn legendre_values<T: Real>(x: T, p: usize, out: &mut [T]) {
    debug_assert!(out.len() > p);
    let mut prev = T::one();
    out[0] = T::one();
    if p == 0 {
        return;
    }
    let mut cur = x;
    out[1] = cur * T::lit(3.0).sqrt();
    for k in 1..p {
        let kf = T::lit(k as f64);
        let next = ((T::lit(2.0) * kf + T::one()) * x * cur - kf * prev) / (kf + T::one());
        prev = cur;
        cur = next;
        out[k + 1] = cur * T::lit((2 * k + 3) as f64).sqrt();
    }
}

/// Evaluates `Σ c_i x^i` by Horner's rule.
pub fn horner<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

/// Rewrites `Σ c_i x^i` with `x = a·u + b` as a polynomial in `u`.
pub fn compose_affine<T: Real>(coeffs: &[T], a: T, b: T) -> Vec<T> {
    let deg = coeffs.len().saturating_sub(1);
    let mut out = vec![T::zero(); coeffs.len()];
    // (a u + b)^i expanded with the binomial theorem
    let mut power = vec![T::one()];
    for (i, &c) in coeffs.iter().enumerate() {
        if i > 0 {
            let mut next = vec![T::zero(); i + 1];
            for (m, &p) in power.iter().enumerate() {
                next[m] += p * b;
                next[m + 1] += p * a;
            }
            power = next;
        }
        for (m, &p) in power.iter().enumerate() {
            out[m] += c * p;
        }
    }
    debug_assert_eq!(out.len(), deg + 1);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_coefficients_match_closed_forms() {
        let l = normalized_legendre_coeffs::<f64>(3);
        let s3 = 3f64.sqrt();
        let s5 = 5f64.sqrt();
        let s7 = 7f64.sqrt();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-14);
        assert!(close(&l[0], &[1.0]));
        assert!(close(&l[1], &[0.0, s3]));
        assert!(close(&l[2], &[-s5 / 2.0, 0.0, 1.5 * s5]));
        assert!(close(&l[3], &[0.0, -1.5 * s7, 0.0, 2.5 * s7]));
    }

    #[test]
    fn recurrence_values_agree_with_coefficients() {
        let l = normalized_legendre_coeffs::<f64>(6);
        let mut vals = [0.0; 7];
        for &x in &[-1.0, -0.3, 0.0, 0.45, 1.0] {
            legendre_values(x, 6, &mut vals);
            for k in 0..=6 {
                assert!((vals[k] - horner(&l[k], x)).abs() < 1e-12);
            }
        }
        legendre_values(1.0, 6, &mut vals);
        for (k, v) in vals.iter().enumerate() {
            assert!((v - ((2 * k + 1) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_composition_is_pointwise_exact() {
        let c = [0.5f64, -2.0, 1.25, 3.0];
        let (a, b) = (0.2, -2.0);
        let comp = compose_affine(&c, a, b);
        for &u in &[5.0, 7.5, 15.0, -3.0] {
            assert!((horner(&comp, u) - horner(&c, a * u + b)).abs() < 1e-10);
        }
    }
}
