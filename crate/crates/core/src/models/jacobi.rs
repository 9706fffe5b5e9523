//! Jacobi polynomials `P_n^{(α,β)}(z)` for real parameters.

/// `P_n^{(α,β)}(z)` by forward three-term recurrence in `n`.
///
/// The recurrence divides by `2k(k+α+β)(2k+α+β−2)`, which vanishes for some
/// negative integer `α+β`; those cases fall back to the explicit finite sum.
pub fn jacobi(n: usize, alpha: f64, beta: f64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (a, b) = (alpha, beta);
    let p1 = (a + 1.0) + (a + b + 2.0) * (z - 1.0) / 2.0;
    if n == 1 {
        return p1;
    }
    let (mut prev, mut cur) = (1.0, p1);
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let denom = 2.0 * k * (k + a + b) * (s - 2.0);
        if denom.abs() < 1e-300 || !denom.is_finite() {
            return jacobi_sum(n, alpha, beta, z);
        }
        let next = ((s - 1.0) * (s * (s - 2.0) * z + a * a - b * b) * cur
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// Explicit sum `Σ_m (α+m+1)_{n−m} (n+α+β+1)_m / (m! (n−m)!) ((z−1)/2)^m`.
///
/// Negative `z` goes through `P_n^{(α,β)}(z) = (−1)^n P_n^{(β,α)}(−z)`,
/// which keeps `|(z−1)/2| ≤ 1/2` and avoids cancellation near `z = −1`.
pub(crate) fn jacobi_sum(n: usize, alpha: f64, beta: f64, z: f64) -> f64 {
    if z < 0.0 {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * jacobi_sum(n, beta, alpha, -z);
    }
    let w = (z - 1.0) / 2.0;
    (0..=n)
        .map(|m| {
            let mut term = 1.0;
            for j in 0..(n - m) {
                term *= (alpha + (m + 1 + j) as f64) / (j + 1) as f64;
            }
            for j in 0..m {
                term *= (n as f64 + alpha + beta + 1.0 + j as f64) / (j + 1) as f64;
            }
            term * w.powi(m as i32)
        })
        .sum()
}

/// `d^k/dz^k P_n^{(α,β)}(z) = Π_{j=1..k} (n+α+β+j)/2 · P_{n−k}^{(α+k,β+k)}(z)`.
pub fn jacobi_derivative(k: usize, n: usize, alpha: f64, beta: f64, z: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let factor: f64 = (1..=k).map(|j| (n as f64 + alpha + beta + j as f64) / 2.0).product();
    factor * jacobi(n - k, alpha + k as f64, beta + k as f64, z)
}
