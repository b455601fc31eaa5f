//! Ambiguity orderings, the strictly determined mass class and the
//! pseudo-Hermiticity generators `F(q)`.
//!
//! Units: hbar = 1 and the mass scale is 1, so the kinetic operator is
//! `-d/dx (1/M) d/dx` and all energies are dimensionless.

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named von Roos orderings found in the literature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderingPreset {
    GoraWilliams,
    BenDanielDuke,
    ZhuKroemer,
    LiKuhn,
    MustafaMazharimousavi,
}

impl OrderingPreset {
    pub const ALL: [OrderingPreset; 5] = [
        OrderingPreset::GoraWilliams,
        OrderingPreset::BenDanielDuke,
        OrderingPreset::ZhuKroemer,
        OrderingPreset::LiKuhn,
        OrderingPreset::MustafaMazharimousavi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingPreset::GoraWilliams => "GoraWilliams",
            OrderingPreset::BenDanielDuke => "BenDanielDuke",
            OrderingPreset::ZhuKroemer => "ZhuKroemer",
            OrderingPreset::LiKuhn => "LiKuhn",
            OrderingPreset::MustafaMazharimousavi => "MustafaMazharimousavi",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for OrderingPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// von Roos ambiguity parameters, stored exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityOrdering {
    alpha: Rational64,
    beta: Rational64,
    gamma: Rational64,
    name: Option<String>,
}

impl AmbiguityOrdering {
    pub fn new(alpha: Rational64, beta: Rational64, gamma: Rational64) -> Result<Self> {
        let sum = alpha + beta + gamma;
        if sum != Rational64::from_integer(-1) {
            return Err(Error::OrderingConstraint {
                sum: ratio_to_f64(sum),
            });
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            name: None,
        })
    }

    /// Builds an ordering from floating-point parameters by recovering the
    /// nearest small rational for each; the constraint is then checked exactly.
    pub fn from_f64(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let conv = |v: f64| {
            Rational64::approximate_float(v)
                .ok_or_else(|| Error::InvalidArgument(format!("cannot represent {v} as a ratio")))
        };
        Self::new(conv(alpha)?, conv(beta)?, conv(gamma)?)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn alpha(&self) -> Rational64 {
        self.alpha
    }

    pub fn beta(&self) -> Rational64 {
        self.beta
    }

    pub fn gamma(&self) -> Rational64 {
        self.gamma
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn alpha_f64(&self) -> f64 {
        ratio_to_f64(self.alpha)
    }

    pub fn beta_f64(&self) -> f64 {
        ratio_to_f64(self.beta)
    }

    pub fn gamma_f64(&self) -> f64 {
        ratio_to_f64(self.gamma)
    }

    /// Mass-class exponent `delta = 4a + 1 + 4a^2/(b + 1)`.
    pub fn delta(&self) -> Result<Rational64> {
        delta_of(self)
    }
}

impl fmt::Display for AmbiguityOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "{n}({}, {}, {})", self.alpha, self.beta, self.gamma),
            None => write!(f, "({}, {}, {})", self.alpha, self.beta, self.gamma),
        }
    }
}

pub fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn frac(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

pub fn ordering_preset(preset: OrderingPreset) -> AmbiguityOrdering {
    let (a, b, g) = match preset {
        OrderingPreset::GoraWilliams => (frac(-1, 1), frac(0, 1), frac(0, 1)),
        OrderingPreset::BenDanielDuke => (frac(0, 1), frac(-1, 1), frac(0, 1)),
        OrderingPreset::ZhuKroemer => (frac(-1, 2), frac(0, 1), frac(-1, 2)),
        OrderingPreset::LiKuhn => (frac(0, 1), frac(-1, 2), frac(-1, 2)),
        OrderingPreset::MustafaMazharimousavi => (frac(-1, 4), frac(-1, 2), frac(-1, 4)),
    };
    AmbiguityOrdering::new(a, b, g)
        .expect("preset satisfies the von Roos constraint")
        .with_name(preset.name())
}

pub fn delta_of(ordering: &AmbiguityOrdering) -> Result<Rational64> {
    let one = Rational64::from_integer(1);
    let four = Rational64::from_integer(4);
    let b1 = ordering.beta + one;
    if b1 == Rational64::from_integer(0) {
        return Err(Error::BetaMinusOne);
    }
    let a = ordering.alpha;
    Ok(four * a + one + four * a * a / b1)
}

/// `mu`, its first two derivatives and `M = mu^-2` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassPoint {
    pub mu: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mass: f64,
}

impl MassPoint {
    /// `(M, M', M'')` recovered from `mu` analytically.
    pub fn mass_derivatives(&self) -> (f64, f64, f64) {
        let MassPoint { mu, mu1, mu2, .. } = *self;
        let m = mu.powi(-2);
        let m1 = -2.0 * mu1 / (mu * mu * mu);
        let m2 = 6.0 * mu1 * mu1 / mu.powi(4) - 2.0 * mu2 / (mu * mu * mu);
        (m, m1, m2)
    }
}

/// Position-dependent mass of the strict class `mu(x) = (c1 x + c2)^(1/(delta+1))`,
/// or the constant-mass limit used for validation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassProfile {
    Constant,
    PowerLaw { c1: f64, c2: f64, delta: f64 },
}

impl MassProfile {
    pub fn power_law(c1: f64, c2: f64, delta: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && delta.is_finite()) {
            return Err(Error::InvalidProfile("non-finite parameter".into()));
        }
        if c1 == 0.0 {
            return Err(Error::InvalidProfile("c1 must be nonzero".into()));
        }
        if delta == -1.0 {
            return Err(Error::InvalidProfile("delta = -1 has no power-law profile".into()));
        }
        Ok(MassProfile::PowerLaw { c1, c2, delta })
    }

    /// The profile forced by an ordering through its `delta`.
    pub fn from_ordering(ordering: &AmbiguityOrdering, c1: f64, c2: f64) -> Result<Self> {
        let delta = ratio_to_f64(delta_of(ordering)?);
        Self::power_law(c1, c2, delta)
    }

    pub fn delta(&self) -> Option<f64> {
        match *self {
            MassProfile::Constant => None,
            MassProfile::PowerLaw { delta, .. } => Some(delta),
        }
    }

    /// Open interval on which `c1 x + c2 > 0`.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            MassProfile::Constant => (f64::NEG_INFINITY, f64::INFINITY),
            MassProfile::PowerLaw { c1, c2, .. } => {
                let root = -c2 / c1;
                if c1 > 0.0 {
                    (root, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, root)
                }
            }
        }
    }

    /// `c1 x + c2`, or 1 for constant mass.
    pub fn argument(&self, x: f64) -> f64 {
        match *self {
            MassProfile::Constant => 1.0,
            MassProfile::PowerLaw { c1, c2, .. } => c1 * x + c2,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && self.argument(x) > 0.0
    }

    pub fn eval(&self, x: f64) -> Result<MassPoint> {
        match *self {
            MassProfile::Constant => Ok(MassPoint {
                mu: 1.0,
                mu1: 0.0,
                mu2: 0.0,
                mass: 1.0,
            }),
            MassProfile::PowerLaw { c1, delta, .. } => {
                let s = self.argument(x);
                if !(s > 0.0) {
                    return Err(Error::OutOfDomain { x, arg: s });
                }
                let p = 1.0 / (delta + 1.0);
                let mu = s.powf(p);
                let mu1 = p * c1 * mu / s;
                let mu2 = p * (p - 1.0) * c1 * c1 * mu / (s * s);
                Ok(MassPoint {
                    mu,
                    mu1,
                    mu2,
                    mass: 1.0 / (mu * mu),
                })
            }
        }
    }
}

pub fn profile_eval(profile: &MassProfile, x: f64) -> Result<MassPoint> {
    profile.eval(x)
}

/// Sign of the auxiliary function `f(x) = +-exp(q(x))` in the Scarf-II
/// target closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Caller-supplied generator with a declared derivative.
#[derive(Clone)]
pub struct CustomGenerator {
    label: String,
    f: RealFn,
    fprime: RealFn,
}

impl CustomGenerator {
    /// Checks the declared derivative against centered differences (step
    /// 1e-5) at `samples` points of `[-5, 5]`.
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fprime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        samples: usize,
        tol: f64,
    ) -> Result<Self> {
        let gen = Self {
            label: label.into(),
            f: Arc::new(f),
            fprime: Arc::new(fprime),
        };
        let h = 1e-5;
        let n = samples.max(2);
        for i in 0..n {
            let q = -5.0 + 10.0 * i as f64 / (n - 1) as f64;
            let fd = ((gen.f)(q + h) - (gen.f)(q - h)) / (2.0 * h);
            let diff = (fd - (gen.fprime)(q)).abs();
            if !(diff <= tol) {
                return Err(Error::GeneratorMismatch { q, diff });
            }
        }
        Ok(gen)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for CustomGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGenerator")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// The eta-weak-pseudo-Hermiticity generator `F(q)`.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `F = -v2 sech q`.
    ScarfII { v2: f64, branch: Branch },
    /// `F = -4/(3 cos^2 q - 4) - 5/4`.
    SamsonovRoy,
    /// `F = a exp(-q)`.
    Morse { a: f64 },
    Custom(CustomGenerator),
}

impl Generator {
    pub fn scarf2(v2: f64) -> Result<Self> {
        if v2 == 0.0 || !v2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Scarf-II strength must be finite and nonzero, got {v2}"
            )));
        }
        Ok(Generator::ScarfII {
            v2,
            branch: Branch::Plus,
        })
    }

    pub fn kind_name(&self) -> &str {
        match self {
            Generator::ScarfII { .. } => "ScarfII",
            Generator::SamsonovRoy => "SamsonovRoy",
            Generator::Morse { .. } => "Morse",
            Generator::Custom(c) => c.label(),
        }
    }

    /// Kind with parameters, e.g. `ScarfII(v2=2.5)`.
    pub fn describe(&self) -> String {
        match self {
            Generator::ScarfII { v2, branch } => match branch {
                Branch::Plus => format!("ScarfII(v2={v2})"),
                Branch::Minus => format!("ScarfII(v2={v2}, branch=-)"),
            },
            Generator::SamsonovRoy => "SamsonovRoy".into(),
            Generator::Morse { a } => format!("Morse(a={a})"),
            Generator::Custom(c) => format!("Custom({})", c.label()),
        }
    }

    /// `(F(q), F'(q))`.
    pub fn eval(&self, q: f64) -> (f64, f64) {
        match self {
            Generator::ScarfII { v2, .. } => {
                let sech = 1.0 / q.cosh();
                (-v2 * sech, v2 * sech * q.tanh())
            }
            Generator::SamsonovRoy => {
                let (s, c) = q.sin_cos();
                // 3cos^2 q - 4 <= -1, never singular
                let d = 3.0 * c * c - 4.0;
                (-4.0 / d - 1.25, -24.0 * c * s / (d * d))
            }
            Generator::Morse { a } => {
                let e = (-q).exp();
                (a * e, -a * e)
            }
            Generator::Custom(c) => ((c.f)(q), (c.fprime)(q)),
        }
    }

    /// Real part of the reference potential far from the centre, when the
    /// reference problem has a continuum there.
    pub fn continuum_threshold(&self, alpha0: f64) -> Option<f64> {
        match self {
            Generator::ScarfII { .. } => Some(alpha0),
            _ => None,
        }
    }

    /// True when `F` vanishes identically.
    pub fn is_zero(&self) -> bool {
        matches!(self, Generator::Morse { a } if *a == 0.0)
    }
}

pub fn generator_eval(gen: &Generator, q: f64) -> (f64, f64) {
    gen.eval(q)
}

/// Boundary condition at both ends of a truncated interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Boundary {
    #[default]
    Dirichlet,
}

/// Everything needed to build a reference/target pair.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub generator: Generator,
    pub ordering: AmbiguityOrdering,
    pub profile: MassProfile,
    /// Integration constant of the real potential.
    pub alpha0: f64,
    /// Reference-coordinate interval `(q_a, q_b)`.
    pub q_interval: (f64, f64),
    /// Additive integration constant of `q(x)`; zero reproduces the printed
    /// antiderivatives.
    pub q_offset: f64,
    pub boundary: Boundary,
}

impl ModelSpec {
    pub fn new(
        generator: Generator,
        ordering: AmbiguityOrdering,
        profile: MassProfile,
        alpha0: f64,
        q_interval: (f64, f64),
    ) -> Result<Self> {
        Self::with_offset(generator, ordering, profile, alpha0, q_interval, 0.0)
    }

    pub fn with_offset(
        generator: Generator,
        ordering: AmbiguityOrdering,
        profile: MassProfile,
        alpha0: f64,
        q_interval: (f64, f64),
        q_offset: f64,
    ) -> Result<Self> {
        let spec = Self {
            generator,
            ordering,
            profile,
            alpha0,
            q_interval,
            q_offset,
            boundary: Boundary::Dirichlet,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Like [`ModelSpec::new`] but picks `q_offset` so the interval fits the
    /// image of `q(x)`: zero when it already does, otherwise the interval is
    /// placed 0.5 inside the finite end of the image.
    pub fn with_auto_offset(
        generator: Generator,
        ordering: AmbiguityOrdering,
        profile: MassProfile,
        alpha0: f64,
        q_interval: (f64, f64),
    ) -> Result<Self> {
        let map = crate::transform::LiouvilleMap::new(profile);
        let (lo, hi) = map.image();
        let (qa, qb) = q_interval;
        let offset = if qa > lo && qb < hi {
            0.0
        } else if lo.is_finite() && hi.is_infinite() {
            qa - (lo + 0.5)
        } else if hi.is_finite() && lo.is_infinite() {
            qb - (hi - 0.5)
        } else {
            return Err(Error::OutOfRange { q: qa });
        };
        Self::with_offset(generator, ordering, profile, alpha0, q_interval, offset)
    }

    /// Rebuilds the spec with its profile forced by the ordering.
    pub fn derived(
        generator: Generator,
        ordering: AmbiguityOrdering,
        c1: f64,
        c2: f64,
        alpha0: f64,
        q_interval: (f64, f64),
    ) -> Result<Self> {
        let profile = MassProfile::from_ordering(&ordering, c1, c2)?;
        Self::with_auto_offset(generator, ordering, profile, alpha0, q_interval)
    }

    pub fn map(&self) -> crate::transform::LiouvilleMap {
        crate::transform::LiouvilleMap::with_offset(self.profile, self.q_offset)
    }

    /// `[x(q_a), x(q_b)]`.
    pub fn x_interval(&self) -> Result<(f64, f64)> {
        let map = self.map();
        Ok((
            map.x_of_q(self.q_interval.0)?,
            map.x_of_q(self.q_interval.1)?,
        ))
    }

    fn validate(&self) -> Result<()> {
        let (qa, qb) = self.q_interval;
        if !(qa < qb) || !qa.is_finite() || !qb.is_finite() {
            return Err(Error::BadInterval { a: qa, b: qb });
        }
        if !self.alpha0.is_finite() || !self.q_offset.is_finite() {
            return Err(Error::InvalidArgument("alpha0 and q_offset must be finite".into()));
        }
        let (xa, xb) = self.x_interval()?;
        for x in [xa, xb] {
            if !self.profile.contains(x) {
                return Err(Error::OutOfDomain {
                    x,
                    arg: self.profile.argument(x),
                });
            }
        }
        Ok(())
    }
}
