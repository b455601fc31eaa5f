use num_complex::Complex64;

use crate::linalg::CMatrix;

#[inline]
pub(crate) fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity `D^-1 A D` with power-of-two entries that
/// equilibrates off-diagonal row and column 1-norms. Returns the scaling.
pub(crate) fn balance(a: &mut CMatrix) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    const RADIX2: f64 = RADIX * RADIX;
    let n = a.rows();
    let mut scale = vec![1.0; n];
    let mut noconv = true;
    let mut sweeps = 0;
    while noconv && sweeps < 100 {
        noconv = false;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[(j, i)]);
                    r += cabs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX2;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX2;
            }
            if (c + r) / f < 0.95 * s {
                noconv = true;
                scale[i] *= f;
                let inv = 1.0 / f;
                for z in a.row_mut(i) {
                    *z *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    scale
}

/// In-place Householder reduction to upper Hessenberg form. Columns whose
/// part below the subdiagonal is already zero are skipped, so banded
/// Hessenberg inputs pass through untouched.
pub(crate) fn hessenberg(a: &mut CMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut dots = vec![zero; n];
    for k in 0..n - 2 {
        if (k + 2..n).all(|r| a[(r, k)] == zero) {
            continue;
        }
        let m = n - k - 1;
        let x = &mut v[..m];
        for (r, xr) in x.iter_mut().enumerate() {
            *xr = a[(k + 1 + r, k)];
        }
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let x0 = x[0];
        let phase = if x0 == zero {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let beta = -phase * norm;
        x[0] -= beta;
        let vnorm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // left: rows k+1.., columns k..
        let d = &mut dots[..n];
        d.iter_mut().for_each(|z| *z = zero);
        for r in 0..m {
            let vr = x[r].conj();
            let row = a.row(k + 1 + r);
            for j in k..n {
                d[j] += vr * row[j];
            }
        }
        for r in 0..m {
            let f = x[r] * tau;
            let row = a.row_mut(k + 1 + r);
            for j in k..n {
                row[j] -= f * d[j];
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let row = a.row_mut(i);
            let s: Complex64 = (0..m).map(|r| row[k + 1 + r] * x[r]).sum::<Complex64>() * tau;
            for r in 0..m {
                row[k + 1 + r] -= s * x[r].conj();
            }
        }
        a[(k + 1, k)] = beta;
        for r in k + 2..n {
            a[(r, k)] = zero;
        }
    }
}
