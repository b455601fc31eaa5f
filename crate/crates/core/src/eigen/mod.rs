//! Dense complex non-Hermitian eigensolver and bound-state classification.
//!
//! Pipeline: power-of-two balancing, Householder reduction to upper
//! Hessenberg form, single-shift complex QR with Wilkinson shifts and
//! Ahues-Tisseur deflation. Eigenvectors are computed on request by inverse
//! iteration against the original (unbalanced) matrix.

mod inverse;
mod oracle;
mod qr;
mod reduce;

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretize::Grid;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub use oracle::{brute_oracle_small, characteristic_polynomial, durand_kerner, ORACLE_MAX_N};

/// Which eigenvectors [`eig`] should compute.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum VectorSelection {
    #[default]
    None,
    All,
    /// At most `limit` vectors, lowest real part first, among eigenvalues
    /// with `|Im| <= im_tol` and (if given) `Re < max_re`.
    Filter {
        im_tol: f64,
        max_re: Option<f64>,
        limit: usize,
    },
}

impl VectorSelection {
    fn wants(&self, lambda: Complex64) -> bool {
        match *self {
            VectorSelection::None => false,
            VectorSelection::All => true,
            VectorSelection::Filter { im_tol, max_re, .. } => {
                lambda.im.abs() <= im_tol && max_re.map_or(true, |m| lambda.re < m)
            }
        }
    }

    fn limit(&self) -> usize {
        match *self {
            VectorSelection::None => 0,
            VectorSelection::All => usize::MAX,
            VectorSelection::Filter { limit, .. } => limit,
        }
    }
}

/// Eigenvalues sorted by `(Re, Im)`, optional eigenvectors with residuals
/// `||Av - lambda v|| / ||A||_F` (unit `v`), and bound-state flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: Vec<Option<Vec<Complex64>>>,
    pub residuals: Vec<Option<f64>>,
    pub bound: Vec<bool>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn bound_eigenvalues(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .zip(&self.bound)
            .filter(|(_, &b)| b)
            .map(|(e, _)| *e)
            .collect()
    }

    /// `|sum(lambda) - tr(A)| / max(|tr A|, ||A||_F)`.
    pub fn trace_error(&self, a: &CMatrix) -> f64 {
        let sum: Complex64 = self.eigenvalues.iter().sum();
        let tr = a.trace();
        let scale = tr.norm().max(a.frobenius_norm()).max(f64::MIN_POSITIVE);
        (sum - tr).norm() / scale
    }
}

pub fn lex_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All eigenvalues of a square complex matrix.
pub fn eig(a: &CMatrix, vectors: VectorSelection) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!(
            "matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if let Some((row, col)) = a.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let mut h = a.clone();
    reduce::balance(&mut h);
    reduce::hessenberg(&mut h);
    let mut values = qr::hessenberg_eigenvalues(&mut h)?;
    values.sort_by(lex_cmp);

    let n = values.len();
    let mut vecs = vec![None; n];
    let mut residuals = vec![None; n];
    let limit = vectors.limit();
    if limit > 0 {
        let bands = a.bandwidths();
        let norm_a = a.frobenius_norm();
        let mut done = 0;
        for (k, &lambda) in values.iter().enumerate() {
            if done >= limit {
                break;
            }
            if !vectors.wants(lambda) {
                continue;
            }
            let (v, r) = inverse::inverse_iteration(a, bands, norm_a, lambda);
            vecs[k] = Some(v);
            residuals[k] = Some(r);
            done += 1;
        }
    }
    Ok(Spectrum {
        eigenvalues: values,
        vectors: vecs,
        residuals,
        bound: vec![false; n],
    })
}

/// Thresholds for [`classify_spectrum`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub im_tol: f64,
    /// Fraction of the grid (by node index) at each end treated as "edge";
    /// weight there is measured with cell-width quadrature, `sum |v|^2 dx`.
    pub edge_frac: f64,
    /// Continuum threshold; when set, bound states must lie below it and
    /// keep at most 1% of their weight in the edge regions.
    pub continuum_threshold: Option<f64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            im_tol: 1e-6,
            edge_frac: 0.05,
            continuum_threshold: None,
        }
    }
}

const EDGE_MASS_LIMIT: f64 = 0.01;

pub fn classify_spectrum(spec: &Spectrum, grid: &Grid, opts: &ClassifyOptions) -> Result<Spectrum> {
    let mut out = spec.clone();
    let n = grid.len();
    let edge_nodes = ((opts.edge_frac * n as f64).ceil() as usize).min(n / 2);
    let widths = grid.cell_widths();
    for (k, lambda) in spec.eigenvalues.iter().enumerate() {
        let mut bound = lambda.im.abs() <= opts.im_tol;
        if bound {
            if let Some(threshold) = opts.continuum_threshold {
                bound = lambda.re < threshold;
                if bound {
                    let v = spec.vectors[k].as_ref().ok_or(Error::MissingVectors(k))?;
                    let dens: Vec<f64> = v.iter().zip(&widths).map(|(z, w)| z.norm_sqr() * w).collect();
                    let total: f64 = dens.iter().sum();
                    let edge: f64 = dens[..edge_nodes].iter().chain(&dens[n - edge_nodes..]).sum();
                    bound = total > 0.0 && edge <= EDGE_MASS_LIMIT * total;
                }
            }
        }
        out.bound[k] = bound;
    }
    Ok(out)
}

/// Greedy minimal-distance pairing of two eigenvalue lists; returns the
/// pairs `(index_a, index_b, distance)` in the order they were chosen.
/// Ties are broken by the lexicographic `(Re, Im)` order of the inputs.
pub fn greedy_pairs(a: &[Complex64], b: &[Complex64]) -> Vec<(usize, usize, f64)> {
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ia.sort_by(|&x, &y| lex_cmp(&a[x], &a[y]));
    ib.sort_by(|&x, &y| lex_cmp(&b[x], &b[y]));
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (ra, &i) in ia.iter().enumerate() {
        for (rb, &j) in ib.iter().enumerate() {
            cand.push(((a[i] - b[j]).norm(), ra, rb));
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (d, ra, rb) in cand {
        if used_a[ra] || used_b[rb] {
            continue;
        }
        used_a[ra] = true;
        used_b[rb] = true;
        pairs.push((ia[ra], ib[rb], d));
        if pairs.len() == a.len().min(b.len()) {
            break;
        }
    }
    pairs
}

/// Largest pairing distance when `a` and `b` are matched as multisets, or
/// `None` if their sizes differ.
pub fn match_multisets(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    Some(greedy_pairs(a, b).iter().map(|p| p.2).fold(0.0, f64::max))
}
