//! Independent eigenvalue oracle for small matrices: characteristic
//! polynomial by Faddeev-LeVerrier, roots by Durand-Kerner.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub const ORACLE_MAX_N: usize = 8;

/// Coefficients `c[0..=n]` of `det(zI - A) = sum c[k] z^k`, `c[n] = 1`.
pub fn characteristic_polynomial(a: &CMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.matmul(&m);
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        m = next;
        let tr = a.matmul(&m).trace();
        c[n - k] = -tr / k as f64;
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// All roots of the monic polynomial `c` (ascending coefficients).
pub fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..20_000 {
        let mut delta = 0.0f64;
        for j in 0..n {
            let (p, _) = horner(c, z[j]);
            let mut den = Complex64::new(1.0, 0.0);
            for k in 0..n {
                if k != j {
                    den *= z[j] - z[k];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = p / den;
            z[j] -= step;
            delta = delta.max(step.norm() / (1.0 + z[j].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    // Newton polish; skipped where the derivative vanishes (multiple roots)
    for zj in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zj);
            if dp.norm() <= 1e-8 * (1.0 + zj.norm()) || p.norm() == 0.0 {
                break;
            }
            let next = *zj - p / dp;
            if !(next.re.is_finite() && next.im.is_finite()) {
                break;
            }
            *zj = next;
        }
    }
    z
}

/// Eigenvalues of a matrix with `N <= 8` via the characteristic polynomial.
pub fn brute_oracle_small(a: &CMatrix) -> Result<Vec<Complex64>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    if n > ORACLE_MAX_N {
        return Err(Error::TooLarge(n));
    }
    Ok(durand_kerner(&characteristic_polynomial(a)))
}
