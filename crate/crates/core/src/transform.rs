//! Liouville-type change of variables `q'(x) = 1/mu(x)`, `psi = phi/sqrt(mu)`,
//! and the potentials it links: reference `V_eff(q)`, target `V_eff(x)`, the
//! decomposition of the complexified von Roos potential, and the `F = mu'`
//! branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AmbiguityOrdering, Generator, MassPoint, MassProfile, ModelSpec};

/// `x <-> q` for a mass profile. `q(x)` is the printed antiderivative of
/// `1/mu` plus `offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiouvilleMap {
    pub profile: MassProfile,
    pub offset: f64,
}

impl LiouvilleMap {
    pub fn new(profile: MassProfile) -> Self {
        Self::with_offset(profile, 0.0)
    }

    pub fn with_offset(profile: MassProfile, offset: f64) -> Self {
        Self { profile, offset }
    }

    pub fn q_of_x(&self, x: f64) -> Result<f64> {
        let q = match self.profile {
            MassProfile::Constant => x,
            MassProfile::PowerLaw { c1, delta, .. } => {
                let s = self.profile.argument(x);
                if !(s > 0.0) {
                    return Err(Error::OutOfDomain { x, arg: s });
                }
                if delta == 0.0 {
                    s.ln() / c1
                } else {
                    (delta + 1.0) / (delta * c1) * s.powf(delta / (delta + 1.0))
                }
            }
        };
        Ok(q + self.offset)
    }

    pub fn x_of_q(&self, q: f64) -> Result<f64> {
        let u = q - self.offset;
        match self.profile {
            MassProfile::Constant => Ok(u),
            MassProfile::PowerLaw { c1, c2, delta } => {
                let s = if delta == 0.0 {
                    (c1 * u).exp()
                } else {
                    let base = u * delta * c1 / (delta + 1.0);
                    if !(base > 0.0) {
                        return Err(Error::OutOfRange { q });
                    }
                    base.powf((delta + 1.0) / delta)
                };
                if !(s > 0.0) || !s.is_finite() {
                    return Err(Error::OutOfRange { q });
                }
                Ok((s - c2) / c1)
            }
        }
    }

    /// `dq/dx = 1/mu(x)`.
    pub fn q_prime(&self, x: f64) -> Result<f64> {
        Ok(1.0 / self.profile.eval(x)?.mu)
    }

    /// Open image of the profile domain under `q_of_x`.
    pub fn image(&self) -> (f64, f64) {
        let (lo, hi) = match self.profile {
            MassProfile::Constant => (f64::NEG_INFINITY, f64::INFINITY),
            MassProfile::PowerLaw { c1, delta, .. } => {
                if delta == 0.0 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if (delta + 1.0) / (delta * c1) > 0.0 {
                    (0.0, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, 0.0)
                }
            }
        };
        (lo + self.offset, hi + self.offset)
    }
}

pub fn q_of_x(map: &LiouvilleMap, x: f64) -> Result<f64> {
    map.q_of_x(x)
}

pub fn x_of_q(map: &LiouvilleMap, q: f64) -> Result<f64> {
    map.x_of_q(q)
}

/// `V_eff(q) = alpha0 - F(q)^2 - i F'(q)`.
pub fn reference_potential(gen: &Generator, alpha0: f64, q: f64) -> Complex64 {
    let (f, fp) = gen.eval(q);
    Complex64::new(alpha0 - f * f, -fp)
}

/// Printed closed forms of the Scarf-II and Samsonov-Roy reference
/// potentials (with `alpha0 = 0`), independent of [`reference_potential`].
pub fn closed_form_reference(gen: &Generator, q: f64) -> Result<Complex64> {
    match gen {
        Generator::ScarfII { v2, .. } => {
            let sech = 1.0 / q.cosh();
            Ok(Complex64::new(-v2 * v2 * sech * sech, -v2 * sech * q.tanh()))
        }
        Generator::SamsonovRoy => {
            let z = Complex64::new(q.cos(), 2.0 * q.sin());
            Ok(-6.0 / (z * z) - 25.0 / 16.0)
        }
        other => Err(Error::UnsupportedGenerator(other.kind_name().to_string())),
    }
}

/// `V_eff(x) = alpha0 - F(q(x))^2 - i mu(x) dF/dx`, with `dF/dx = F'(q)/mu`.
pub fn target_potential(spec: &ModelSpec, x: f64) -> Result<Complex64> {
    let map = spec.map();
    let pt = spec.profile.eval(x)?;
    let q = map.q_of_x(x)?;
    let (f, fp) = spec.generator.eval(q);
    let df_dx = fp / pt.mu;
    Ok(Complex64::new(spec.alpha0 - f * f, -pt.mu * df_dx))
}

/// Target potential written through `f(x) = +-exp(q(x))` (Scarf-II) or
/// `g(x) = cos q(x)` (Samsonov-Roy).
pub fn target_closed_form(spec: &ModelSpec, x: f64) -> Result<Complex64> {
    let map = spec.map();
    let pt = spec.profile.eval(x)?;
    let q = map.q_of_x(x)?;
    let v = match &spec.generator {
        Generator::ScarfII { v2, branch } => {
            let sign = branch.sign();
            let f = sign * q.exp();
            let den = (f * f + 1.0) * (f * f + 1.0);
            Complex64::new(
                -4.0 * v2 * v2 * f * f / den,
                -sign * 2.0 * v2 * f * (f * f - 1.0) / den,
            )
        }
        Generator::SamsonovRoy => {
            let g = q.cos();
            let g_prime = -q.sin() * map.q_prime(x)?;
            let z = Complex64::new(g, -2.0 * pt.mu * g_prime);
            -6.0 / (z * z) - 25.0 / 16.0
        }
        other => return Err(Error::UnsupportedGenerator(other.kind_name().to_string())),
    };
    Ok(v + spec.alpha0)
}

/// Real potential `V~`, imaginary part `W` and the bare potential `V` of the
/// complexified von Roos Hamiltonian at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialDecomposition {
    pub vtilde: f64,
    pub w: f64,
    pub v: f64,
}

impl PotentialDecomposition {
    pub fn complexified(&self) -> Complex64 {
        Complex64::new(self.vtilde, self.w)
    }
}

pub fn potential_decomposition(spec: &ModelSpec, x: f64) -> Result<PotentialDecomposition> {
    let map = spec.map();
    let MassPoint { mu, mu1, mu2, .. } = spec.profile.eval(x)?;
    let q = map.q_of_x(x)?;
    let (f, fp) = spec.generator.eval(q);
    let df_dx = fp / mu;
    let a = spec.ordering.alpha_f64();
    let b = spec.ordering.beta_f64();

    let w = -mu * df_dx;
    let vtilde = -f * f - 0.5 * mu * mu2 - 0.25 * mu1 * mu1 + spec.alpha0;
    let v = spec.alpha0 - f * f
        + (0.5 + b) * mu * mu2
        + (4.0 * a * (a + b + 1.0) + b + 0.75) * mu1 * mu1;
    Ok(PotentialDecomposition { vtilde, w, v })
}

/// Ordering-dependent part of the von Roos potential, `V~ - V`, written in
/// terms of `M`, `M'`, `M''`.
pub fn ordering_potential(ordering: &AmbiguityOrdering, pt: &MassPoint) -> f64 {
    let a = ordering.alpha_f64();
    let b = ordering.beta_f64();
    let (m, m1, m2) = pt.mass_derivatives();
    0.5 * (1.0 + b) * m2 / (m * m) - (a * (a + b + 1.0) + b + 1.0) * m1 * m1 / (m * m * m)
}

/// `psi(x) = phi(q(x)) / sqrt(mu(x))` for sampled `phi`.
pub fn wavefunction_pullback(
    map: &LiouvilleMap,
    phi_samples: &[(f64, Complex64)],
) -> Result<Vec<(f64, Complex64)>> {
    phi_samples
        .iter()
        .map(|&(q, phi)| {
            let x = map.x_of_q(q)?;
            let mu = map.profile.eval(x)?.mu;
            Ok((x, phi / mu.sqrt()))
        })
        .collect()
}

/// Effective potential of the `F = mu'` branch:
/// `-iF' + (b+1)F' + [4a(a+b+1) + b]F^2 + alpha0`.
///
/// No solvable instance is known; this is an evaluator only.
pub fn alt_branch_potential(
    gen: &Generator,
    ordering: &AmbiguityOrdering,
    alpha0: f64,
    q: f64,
) -> Complex64 {
    let a = ordering.alpha_f64();
    let b = ordering.beta_f64();
    let (f, fp) = gen.eval(q);
    let re = (b + 1.0) * fp + (4.0 * a * (a + b + 1.0) + b) * f * f + alpha0;
    Complex64::new(re, -fp)
}
