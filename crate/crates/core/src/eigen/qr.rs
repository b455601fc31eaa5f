//! Implicitly shifted single-shift complex QR on an upper Hessenberg matrix,
//! eigenvalues only.

use num_complex::Complex64;

use super::reduce::cabs1;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
#[inline]
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    if b == zero {
        return (1.0, zero, a);
    }
    if a == zero {
        let nb = b.norm();
        return (0.0, b.conj() / nb, Complex64::new(nb, 0.0));
    }
    let na = a.norm();
    let nr = na.hypot(b.norm());
    let phase = a / na;
    (na / nr, phase * b.conj() / nr, phase * nr)
}

fn negligible_subdiagonal(h: &CMatrix, k: usize, hi: usize, ulp: f64, smlnum: f64) -> bool {
    let sub = cabs1(h[(k, k - 1)]);
    if sub <= smlnum {
        return true;
    }
    let mut tst = cabs1(h[(k - 1, k - 1)]) + cabs1(h[(k, k)]);
    if tst == 0.0 {
        if k >= 2 {
            tst += cabs1(h[(k - 1, k - 2)]);
        }
        if k < hi {
            tst += cabs1(h[(k + 1, k)]);
        }
    }
    if sub > ulp * tst {
        return false;
    }
    // Ahues & Tisseur refinement
    let up = cabs1(h[(k - 1, k)]);
    let ab = sub.max(up);
    let ba = sub.min(up);
    let d = cabs1(h[(k - 1, k - 1)] - h[(k, k)]);
    let hkk = cabs1(h[(k, k)]);
    let aa = hkk.max(d);
    let bb = hkk.min(d);
    let s = aa + ab;
    ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s)))
}

fn wilkinson_shift(h: &CMatrix, i: usize) -> Complex64 {
    let mut t = h[(i, i)];
    let u = h[(i - 1, i)].sqrt() * h[(i, i - 1)].sqrt();
    let s = cabs1(u);
    if s != 0.0 {
        let x = (h[(i - 1, i - 1)] - t) * 0.5;
        let sx = cabs1(x);
        let s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}

/// Eigenvalues of the upper Hessenberg matrix `h`, which is destroyed.
/// Gives up after `30 * n` sweeps in total.
pub(crate) fn hessenberg_eigenvalues(h: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let zero = Complex64::new(0.0, 0.0);
    let mut w = vec![zero; n];
    if n == 0 {
        return Ok(w);
    }
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let itmax = 30 * n.max(1);
    let mut total = 0usize;

    let mut i = n - 1;
    loop {
        let mut its = 0usize;
        loop {
            let mut l = i;
            while l > 0 && !negligible_subdiagonal(h, l, i, ulp, smlnum) {
                l -= 1;
            }
            if l > 0 {
                h[(l, l - 1)] = zero;
            }
            if l == i {
                break;
            }

            let shift = match its {
                10 => h[(l, l)] + 0.75 * h[(l + 1, l)].norm(),
                20 => h[(i, i)] + 0.75 * h[(i, i - 1)].norm(),
                _ => wilkinson_shift(h, i),
            };

            let mut v0 = h[(l, l)] - shift;
            let mut v1 = h[(l + 1, l)];
            for k in l..i {
                if k > l {
                    v0 = h[(k, k - 1)];
                    v1 = h[(k + 1, k - 1)];
                }
                let (c, s, r) = givens(v0, v1);
                if k > l {
                    h[(k, k - 1)] = r;
                    h[(k + 1, k - 1)] = zero;
                }
                let sc = s.conj();
                {
                    let (top, bottom) = h.adjacent_rows_mut(k);
                    for j in k..=i {
                        let x = top[j];
                        let y = bottom[j];
                        top[j] = x * c + s * y;
                        bottom[j] = y * c - sc * x;
                    }
                }
                let last = (k + 2).min(i);
                for j in l..=last {
                    let x = h[(j, k)];
                    let y = h[(j, k + 1)];
                    h[(j, k)] = x * c + sc * y;
                    h[(j, k + 1)] = y * c - s * x;
                }
            }

            its += 1;
            total += 1;
            if total > itmax {
                return Err(Error::NoConvergence {
                    index: i,
                    converged: w[i + 1..].to_vec(),
                });
            }
        }
        w[i] = h[(i, i)];
        if i == 0 {
            break;
        }
        i -= 1;
    }
    Ok(w)
}
