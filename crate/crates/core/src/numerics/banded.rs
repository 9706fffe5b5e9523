//! Square band matrices with equal lower and upper bandwidth, plus the
//! kernels needed for Hermitian eigenpairs in a window: inertia counts by
//! `LDL^H`, Sturm bisection and inverse iteration with banded LU.

use nalgebra::DMatrix;

use crate::algebra::C64;
use crate::error::{Error, Result};

/// `n x n` matrix with `a[i][j] = 0` for `|i − j| > kd`. Row `i` stores
/// columns `i − kd ..= i + kd`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kd: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kd: usize) -> Self {
        Self {
            n,
            kd,
            data: vec![C64::new(0.0, 0.0); n * (2 * kd + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.kd
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || i.abs_diff(j) > self.kd {
            None
        } else {
            Some(i * (2 * self.kd + 1) + (j + self.kd - i))
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.slot(i, j).map_or(C64::new(0.0, 0.0), |s| self.data[s])
    }

    /// Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        let s = self.slot(i, j).expect("entry outside the band");
        self.data[s] += v;
    }

    /// Add `v` at `(i, j)` and `conj(v)` at `(j, i)`; diagonal gets `Re v`.
    pub fn add_hermitian(&mut self, i: usize, j: usize, v: C64) {
        if i == j {
            self.add(i, i, C64::new(v.re, 0.0));
        } else {
            self.add(i, j, v);
            self.add(j, i, v.conj());
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in i..(i + self.kd + 1).min(self.n) {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest absolute row sum; an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kd);
                let hi = (i + self.kd).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kd);
                let hi = (i + self.kd).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Number of eigenvalues strictly below `sigma`, from the signs of the
    /// `LDL^H` pivots of `A − σ I` (lower triangle read, no pivoting).
    pub fn count_below(&self, sigma: f64) -> usize {
        let (n, kd) = (self.n, self.kd);
        let pivmin = f64::MIN_POSITIVE.sqrt() * self.norm_inf().max(1.0);
        // Active trailing window of the Schur complement, (kd+1) x (kd+1).
        let w = kd + 1;
        let mut win = vec![C64::new(0.0, 0.0); w * w];
        let mut next = win.clone();
        let mut count = 0;
        for r in 0..w.min(n) {
            for c in 0..w.min(n) {
                win[r * w + c] = self.get(r, c) - if r == c { sigma } else { 0.0 };
            }
        }
        for k in 0..n {
            let mut d = win[0].re;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
            // Schur update of the remaining kd x kd block, then shift in the
            // next row/column of A.
            next.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for r in 1..w {
                for c in 1..w {
                    next[(r - 1) * w + (c - 1)] = win[r * w + c] - win[r * w] * win[c] / d;
                }
            }
            let m = k + w;
            for r in 0..w {
                let i = k + 1 + r;
                let v = if m < n && i < n && i.abs_diff(m) <= kd {
                    self.get(i, m)
                        - if i == m {
                            C64::new(sigma, 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                } else {
                    C64::new(0.0, 0.0)
                };
                next[r * w + (w - 1)] = v;
                next[(w - 1) * w + r] = v.conj();
            }
            if m < n {
                next[(w - 1) * w + (w - 1)] = self.get(m, m) - sigma;
            }
            std::mem::swap(&mut win, &mut next);
        }
        count
    }
}

/// Eigenvalues in `[lo, hi)` by bisection on [`BandMatrix::count_below`].
pub fn bisect_window(a: &BandMatrix, lo: f64, hi: f64, rel_tol: f64) -> Vec<f64> {
    let c_lo = a.count_below(lo);
    let c_hi = a.count_below(hi);
    let scale = a.norm_inf().max(1.0);
    (c_lo..c_hi)
        .map(|k| {
            // Smallest σ with count_below(σ) > k lies in (left, right].
            let (mut left, mut right) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (left + right);
                if right - left <= rel_tol * scale || mid == left || mid == right {
                    break;
                }
                if a.count_below(mid) > k {
                    right = mid;
                } else {
                    left = mid;
                }
            }
            0.5 * (left + right)
        })
        .collect()
}

/// LU with partial pivoting of `A − σ I` for a band matrix. Fill-in from
/// row swaps extends the upper bandwidth to `2 kd`.
struct BandLu {
    n: usize,
    kd: usize,
    // Row i holds columns i − kd ..= i + 2kd, width 3kd + 1.
    rows: Vec<C64>,
    // Row exchanged with row k at elimination step k.
    pivots: Vec<usize>,
}

impl BandLu {
    fn width(kd: usize) -> usize {
        3 * kd + 1
    }

    fn new(a: &BandMatrix, sigma: f64) -> Self {
        let (n, kd) = (a.n, a.kd);
        let w = Self::width(kd);
        let mut rows = vec![C64::new(0.0, 0.0); n * w];
        for i in 0..n {
            let lo = i.saturating_sub(kd);
            for j in lo..(i + kd + 1).min(n) {
                let mut v = a.get(i, j);
                if i == j {
                    v -= sigma;
                }
                rows[i * w + (j + kd - i)] = v;
            }
        }
        let tiny = f64::EPSILON * a.norm_inf().max(1.0);
        let mut lu = Self {
            n,
            kd,
            rows,
            pivots: vec![0; n],
        };
        lu.factor(tiny);
        lu
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> C64 {
        // Columns outside the row window are structurally zero.
        if j + self.kd < i || j > i + 2 * self.kd {
            C64::new(0.0, 0.0)
        } else {
            self.rows[i * Self::width(self.kd) + (j + self.kd - i)]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: C64) {
        let w = Self::width(self.kd);
        self.rows[i * w + (j + self.kd - i)] = v;
    }

    fn factor(&mut self, tiny: f64) {
        let (n, kd) = (self.n, self.kd);
        for k in 0..n {
            let last = (k + kd).min(n - 1);
            let p = (k..=last)
                .max_by(|&a, &b| self.at(a, k).norm().total_cmp(&self.at(b, k).norm()))
                .unwrap_or(k);
            let cmax = (k + 2 * kd).min(n - 1);
            if p != k {
                for j in k..=cmax {
                    let (a, b) = (self.at(k, j), self.at(p, j));
                    self.set(k, j, b);
                    self.set(p, j, a);
                }
            }
            self.pivots[k] = p;
            if self.at(k, k).norm() < tiny {
                self.set(k, k, C64::new(tiny, 0.0));
            }
            let piv = self.at(k, k);
            for i in (k + 1)..=last {
                let l = self.at(i, k) / piv;
                self.set(i, k, l);
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..=cmax {
                    let v = self.at(i, j) - l * self.at(k, j);
                    self.set(i, j, v);
                }
            }
        }
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let (n, kd) = (self.n, self.kd);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let last = (k + kd).min(n - 1);
            for i in (k + 1)..=last {
                let l = self.at(i, k);
                x[i] = x[i] - l * x[k];
            }
        }
        for k in (0..n).rev() {
            let cmax = (k + 2 * kd).min(n - 1);
            let mut s = x[k];
            for j in (k + 1)..=cmax {
                s -= self.at(k, j) * x[j];
            }
            x[k] = s / self.at(k, k);
        }
        x
    }
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

/// Eigenvector for an accurately known eigenvalue `lambda` by inverse
/// iteration; `against` holds already-accepted vectors of nearby
/// eigenvalues to orthogonalize against.
pub fn inverse_iteration(a: &BandMatrix, lambda: f64, against: &[&[C64]]) -> Result<Vec<C64>> {
    let n = a.n;
    let lu = BandLu::new(a, lambda);
    // Deterministic, non-symmetric start vector.
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + ((i * 7919) % 97) as f64 / 97.0, 0.0))
        .collect();
    normalize(&mut v);
    for _ in 0..6 {
        for u in against {
            let ip: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u.iter()).for_each(|(x, y)| *x -= ip * y);
        }
        v = lu.solve(&v);
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Eigensolver(format!(
                "inverse iteration diverged at λ = {lambda}"
            )));
        }
        normalize(&mut v);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kd: usize, seed: u64) -> BandMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandMatrix::zeros(n, kd);
        for i in 0..n {
            a.add_hermitian(i, i, C64::new(rng.random_range(-2.0..2.0), 0.0));
            for j in (i + 1)..(i + kd + 1).min(n) {
                a.add_hermitian(i, j, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        a
    }

    fn dense_eigenvalues(a: &BandMatrix) -> Vec<f64> {
        let mut e: Vec<f64> = a.to_dense().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn inertia_matches_dense() {
        for kd in [1, 2, 3] {
            let a = random_band(40, kd, kd as u64);
            let e = dense_eigenvalues(&a);
            for sigma in [-3.0, -0.5, 0.0, 0.3, 2.5] {
                let want = e.iter().filter(|&&x| x < sigma).count();
                assert_eq!(a.count_below(sigma), want, "kd={kd} sigma={sigma}");
            }
        }
    }

    #[test]
    fn bisection_matches_dense() {
        let a = random_band(60, 3, 5);
        let e = dense_eigenvalues(&a);
        let got = bisect_window(&a, -1.0, 1.0, 1e-15);
        let want: Vec<f64> = e.into_iter().filter(|&x| (-1.0..1.0).contains(&x)).collect();
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn inverse_iteration_residual() {
        for kd in [1, 3] {
            let a = random_band(80, kd, 11 + kd as u64);
            let lams = bisect_window(&a, -0.5, 0.5, 1e-15);
            assert!(!lams.is_empty());
            for &l in &lams {
                let v = inverse_iteration(&a, l, &[]).unwrap();
                let av = a.matvec(&v);
                let r: f64 = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (x - y * l).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(r < 1e-9, "kd={kd} λ={l} r={r}");
            }
        }
    }
}
