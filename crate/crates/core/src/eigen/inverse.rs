//! Inverse iteration on the original matrix, with a banded LU so that the
//! tridiagonal/pentadiagonal operators of this crate stay cheap.

use num_complex::Complex64;

use crate::linalg::{vec_norm, CMatrix};

/// LU factors of a band matrix with partial pivoting, row-window storage:
/// row `i` keeps columns `i - kl ..= i + kl + ku`.
struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<Complex64>,
    piv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn hi(&self, i: usize) -> usize {
        (i + self.width - self.kl - 1).min(self.n - 1)
    }

    fn factor(a: &CMatrix, shift: Complex64, kl: usize, ku: usize, tiny: f64) -> Self {
        let n = a.rows();
        let width = 2 * kl + ku + 1;
        let zero = Complex64::new(0.0, 0.0);
        let mut lu = BandLu {
            n,
            kl,
            width,
            data: vec![zero; n * width],
            piv: vec![0; n],
        };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                let k = lu.idx(i, j);
                lu.data[k] = a[(i, j)];
            }
            let k = lu.idx(i, i);
            lu.data[k] -= shift;
        }
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.idx(k, k)].norm();
            for r in k + 1..=last_row {
                let v = lu.data[lu.idx(r, k)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            lu.piv[k] = p;
            let hi = lu.hi(k);
            if p != k {
                for j in k..=hi {
                    let (ik, ip) = (lu.idx(k, j), lu.idx(p, j));
                    lu.data.swap(ik, ip);
                }
            }
            let kk = lu.idx(k, k);
            if lu.data[kk].norm() < tiny {
                lu.data[kk] = Complex64::new(tiny, 0.0);
            }
            let pivot = lu.data[kk];
            for r in k + 1..=last_row {
                let rk = lu.idx(r, k);
                let m = lu.data[rk] / pivot;
                lu.data[rk] = m;
                if m == zero {
                    continue;
                }
                for j in k + 1..=hi {
                    let (rj, kj) = (lu.idx(r, j), lu.idx(k, j));
                    let u = lu.data[kj];
                    lu.data[rj] -= m * u;
                }
            }
        }
        lu
    }

    fn solve(&self, b: &mut [Complex64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + self.kl).min(n - 1) {
                b[r] -= self.data[self.idx(r, k)] * bk;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=self.hi(i) {
                s -= self.data[self.idx(i, j)] * b[j];
            }
            b[i] = s / self.data[self.idx(i, i)];
        }
    }
}

/// Eigenvector estimate for `lambda` by three steps of inverse iteration,
/// normalized to unit 2-norm, with its residual `||Av - lambda v|| / ||A||_F`.
pub(crate) fn inverse_iteration(
    a: &CMatrix,
    bands: (usize, usize),
    norm_a: f64,
    lambda: Complex64,
) -> (Vec<Complex64>, f64) {
    let n = a.rows();
    let scale = norm_a.max(f64::MIN_POSITIVE);
    let shift = lambda + Complex64::new(1e-13 * scale, 0.0);
    let lu = BandLu::factor(a, shift, bands.0, bands.1, f64::EPSILON * scale);
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new(1.0, (j % 7) as f64 / 7.0))
        .collect();
    normalize(&mut v);
    for _ in 0..3 {
        lu.solve(&mut v);
        normalize(&mut v);
    }
    let av = a.matvec(&v);
    let r: f64 = av
        .iter()
        .zip(&v)
        .map(|(x, y)| (x - lambda * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (v, r / scale)
}

fn normalize(v: &mut [Complex64]) {
    let nrm = vec_norm(v);
    if nrm > 0.0 && nrm.is_finite() {
        let inv = 1.0 / nrm;
        for z in v.iter_mut() {
            *z *= inv;
        }
    }
}
