//! Grids and dense matrices for the reference Hamiltonian `H_q`, the target
//! Hamiltonian `H_x`, the intertwiner `eta` and the ordered kinetic operator.
//! All operators use homogeneous Dirichlet conditions at the grid ends.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{ratio_to_f64, AmbiguityOrdering, MassProfile, ModelSpec};
use crate::transform::{reference_potential, target_potential, LiouvilleMap};

/// Fewest interior nodes a three-point stencil can act on.
pub const MIN_NODES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    UniformQ,
    UniformX,
    QInducedX,
}

impl GridKind {
    fn name(self) -> &'static str {
        match self {
            GridKind::UniformQ => "UniformQ",
            GridKind::UniformX => "UniformX",
            GridKind::QInducedX => "QInducedX",
        }
    }
}

/// Interior nodes of a truncated interval `(a, b)`; the Dirichlet values
/// sit at `a` and `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
}

impl Grid {
    /// `n` interior nodes `a + i h`, `h = (b - a)/(n + 1)`.
    pub fn uniform(kind: GridKind, a: f64, b: f64, n: usize) -> Result<Self> {
        if kind == GridKind::QInducedX {
            return Err(Error::WrongGrid {
                expected: "UniformQ or UniformX",
                found: kind.name(),
            });
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::BadInterval { a, b });
        }
        if n < MIN_NODES {
            return Err(Error::TooFewNodes { n, min: MIN_NODES });
        }
        let h = (b - a) / (n + 1) as f64;
        let nodes = (1..=n).map(|i| a + i as f64 * h).collect();
        Ok(Self { kind, a, b, nodes })
    }

    /// Images under `x(q)` of a uniform grid on `(qa, qb)`.
    pub fn q_induced(map: &LiouvilleMap, qa: f64, qb: f64, n: usize) -> Result<Self> {
        let q = Self::uniform(GridKind::UniformQ, qa, qb, n)?;
        let nodes = q
            .nodes
            .iter()
            .map(|&qi| map.x_of_q(qi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind: GridKind::QInducedX,
            a: map.x_of_q(qa)?,
            b: map.x_of_q(qb)?,
            nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform spacing; `None` for q-induced grids.
    pub fn spacing(&self) -> Option<f64> {
        match self.kind {
            GridKind::QInducedX => None,
            _ => Some((self.b - self.a) / (self.len() + 1) as f64),
        }
    }

    /// Nodes with both Dirichlet endpoints attached.
    pub fn with_endpoints(&self) -> Vec<f64> {
        let mut xs = Vec::with_capacity(self.len() + 2);
        xs.push(self.a);
        xs.extend_from_slice(&self.nodes);
        xs.push(self.b);
        xs
    }

    /// Width `(x_{i+1} - x_{i-1})/2` of the cell around each node, the
    /// quadrature weight of the discrete L2 norm.
    pub fn cell_widths(&self) -> Vec<f64> {
        let xs = self.with_endpoints();
        xs.windows(3).map(|w| 0.5 * (w[2] - w[0])).collect()
    }

    fn require(&self, allowed: &[GridKind], expected: &'static str) -> Result<()> {
        if allowed.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::WrongGrid {
                expected,
                found: self.kind.name(),
            })
        }
    }
}

pub fn uniform_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::uniform(GridKind::UniformQ, a, b, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorRole {
    ReferenceH,
    TargetH,
    Eta,
    OrderedKinetic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub role: OperatorRole,
    pub grid: Grid,
}

impl OperatorMatrix {
    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    /// Header `c0_re,c0_im,...` then one row per matrix row, 17 significant
    /// digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.entries.cols();
        let header: Vec<String> = (0..n).map(|j| format!("c{j}_re,c{j}_im")).collect();
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.entries.rows() {
            let row: Vec<String> = self
                .entries
                .row(i)
                .iter()
                .map(|z| format!("{:.16e},{:.16e}", z.re, z.im))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// `b"PDMM"`, rows and cols as little-endian u64, then row-major
    /// `(re, im)` little-endian f64 pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(b"PDMM")?;
        w.write_all(&(self.entries.rows() as u64).to_le_bytes())?;
        w.write_all(&(self.entries.cols() as u64).to_le_bytes())?;
        for z in self.entries.as_slice() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(bytes: &[u8]) -> io::Result<CMatrix> {
        let bad = || io::Error::new(io::ErrorKind::InvalidData, "not a PDMM matrix dump");
        if bytes.len() < 20 || &bytes[..4] != b"PDMM" {
            return Err(bad());
        }
        let rd = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let (rows, cols) = (rd(4) as usize, rd(12) as usize);
        if bytes.len() != 20 + rows * cols * 16 {
            return Err(bad());
        }
        let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let o = 20 + (i * cols + j) * 16;
            Complex64::new(f(o), f(o + 8))
        }))
    }
}

/// `-d^2/dq^2 + V_eff(q)` with the (-1, 2, -1)/h^2 stencil.
pub fn build_reference_matrix(spec: &ModelSpec, grid: &Grid) -> Result<OperatorMatrix> {
    grid.require(&[GridKind::UniformQ], "UniformQ")?;
    let (qa, qb) = spec.q_interval;
    let slack = 1e-12 * (qb - qa);
    if grid.a < qa - slack {
        return Err(Error::OutOfRange { q: grid.a });
    }
    if grid.b > qb + slack {
        return Err(Error::OutOfRange { q: grid.b });
    }
    let n = grid.len();
    let h = grid.spacing().expect("uniform grid");
    let inv_h2 = 1.0 / (h * h);
    let mut m = CMatrix::zeros(n, n);
    for (i, &q) in grid.nodes.iter().enumerate() {
        let v = reference_potential(&spec.generator, spec.alpha0, q);
        m[(i, i)] = Complex64::new(2.0 * inv_h2, 0.0) + v;
        if i + 1 < n {
            m[(i, i + 1)] = Complex64::new(-inv_h2, 0.0);
            m[(i + 1, i)] = Complex64::new(-inv_h2, 0.0);
        }
    }
    Ok(OperatorMatrix {
        entries: m,
        role: OperatorRole::ReferenceH,
        grid: grid.clone(),
    })
}

/// Nodes must lie in the mass domain. On uniform x grids they must also
/// keep `c1 x + c2 > 1e-8 (b - a)`; q-induced grids approach the singular
/// point geometrically and span many decades, so only positivity applies.
fn check_edge(profile: &MassProfile, grid: &Grid) -> Result<()> {
    let eps = match grid.kind {
        GridKind::QInducedX => 0.0,
        _ => 1e-8 * (grid.b - grid.a).abs(),
    };
    for &x in &grid.nodes {
        let s = profile.argument(x);
        if !(s > 0.0) {
            return Err(Error::OutOfDomain { x, arg: s });
        }
        if matches!(profile, MassProfile::PowerLaw { .. }) && s <= eps {
            return Err(Error::SingularEdge { x });
        }
    }
    Ok(())
}

/// `H_x = -d/dx mu^2 d/dx - mu'^2/4 - mu mu''/2 + V_eff(x)`.
///
/// On uniform grids the kinetic part is `D^T diag(mu^2 at midpoints) D`,
/// exactly symmetric. On q-induced grids it uses three-point unequal-spacing
/// stencils for `-mu^2 d^2 - 2 mu mu' d`.
pub fn build_target_matrix(spec: &ModelSpec, grid: &Grid) -> Result<OperatorMatrix> {
    grid.require(&[GridKind::UniformX, GridKind::QInducedX], "UniformX or QInducedX")?;
    check_edge(&spec.profile, grid)?;
    let n = grid.len();
    let mut m = CMatrix::zeros(n, n);
    let mut diag_potential = Vec::with_capacity(n);
    for &x in &grid.nodes {
        let pt = spec.profile.eval(x)?;
        let extra = -0.25 * pt.mu1 * pt.mu1 - 0.5 * pt.mu * pt.mu2;
        diag_potential.push((pt, extra + target_potential(spec, x)?));
    }
    match grid.kind {
        GridKind::UniformX => {
            let h = grid.spacing().expect("uniform grid");
            let inv_h2 = 1.0 / (h * h);
            let mid_mu2 = (0..=n)
                .map(|i| {
                    let x = grid.a + (i as f64 + 0.5) * h;
                    spec.profile.eval(x).map(|p| p.mu * p.mu)
                })
                .collect::<Result<Vec<_>>>()?;
            for i in 0..n {
                let kin = (mid_mu2[i] + mid_mu2[i + 1]) * inv_h2;
                m[(i, i)] = Complex64::new(kin, 0.0) + diag_potential[i].1;
                if i + 1 < n {
                    let off = Complex64::new(-mid_mu2[i + 1] * inv_h2, 0.0);
                    m[(i, i + 1)] = off;
                    m[(i + 1, i)] = off;
                }
            }
        }
        GridKind::QInducedX => {
            let xs = grid.with_endpoints();
            for i in 0..n {
                let (pt, v) = diag_potential[i];
                let hm = xs[i + 1] - xs[i];
                let hp = xs[i + 2] - xs[i + 1];
                let s = hm + hp;
                let a2 = -pt.mu * pt.mu;
                let b1 = -2.0 * pt.mu * pt.mu1;
                let left = a2 * 2.0 / (hm * s) - b1 * hp / (hm * s);
                let centre = -a2 * 2.0 / (hm * hp) + b1 * (hp - hm) / (hm * hp);
                let right = a2 * 2.0 / (hp * s) + b1 * hm / (hp * s);
                m[(i, i)] = Complex64::new(centre, 0.0) + v;
                if i > 0 {
                    m[(i, i - 1)] = Complex64::new(left, 0.0);
                }
                if i + 1 < n {
                    m[(i, i + 1)] = Complex64::new(right, 0.0);
                }
            }
        }
        GridKind::UniformQ => unreachable!(),
    }
    Ok(OperatorMatrix {
        entries: m,
        role: OperatorRole::TargetH,
        grid: grid.clone(),
    })
}

/// `eta = -i (mu D_c + D_c mu)/2 + F(q(x))`, the symmetrized form of
/// `-i(mu d/dx + mu'/2) + F`; Hermitian entry by entry.
pub fn build_eta_matrix(spec: &ModelSpec, grid: &Grid) -> Result<OperatorMatrix> {
    grid.require(&[GridKind::UniformX], "UniformX")?;
    check_edge(&spec.profile, grid)?;
    let map = spec.map();
    let n = grid.len();
    let h = grid.spacing().expect("uniform grid");
    let mu = grid
        .nodes
        .iter()
        .map(|&x| spec.profile.eval(x).map(|p| p.mu))
        .collect::<Result<Vec<_>>>()?;
    let mut m = CMatrix::zeros(n, n);
    for (i, &x) in grid.nodes.iter().enumerate() {
        let (f, _) = spec.generator.eval(map.q_of_x(x)?);
        m[(i, i)] = Complex64::new(f, 0.0);
        if i + 1 < n {
            let c = (mu[i] + mu[i + 1]) / (4.0 * h);
            m[(i, i + 1)] = Complex64::new(0.0, -c);
            m[(i + 1, i)] = Complex64::new(0.0, c);
        }
    }
    Ok(OperatorMatrix {
        entries: m,
        role: OperatorRole::Eta,
        grid: grid.clone(),
    })
}

/// `T = -(1/2)[M^a d M^b d M^g + M^g d M^b d M^a]`, with each inner
/// `d M^b d` discretized as `-D^T diag(M^b at midpoints) D`.
pub fn build_ordered_kinetic(
    ordering: &AmbiguityOrdering,
    profile: &MassProfile,
    grid: &Grid,
) -> Result<OperatorMatrix> {
    grid.require(&[GridKind::UniformX], "UniformX")?;
    check_edge(profile, grid)?;
    let a = ratio_to_f64(ordering.alpha());
    let b = ratio_to_f64(ordering.beta());
    let g = ratio_to_f64(ordering.gamma());
    let n = grid.len();
    let h = grid.spacing().expect("uniform grid");
    let inv_h2 = 1.0 / (h * h);
    let mass = grid
        .nodes
        .iter()
        .map(|&x| profile.eval(x).map(|p| p.mass))
        .collect::<Result<Vec<_>>>()?;
    let mid_b = (0..=n)
        .map(|i| {
            let x = grid.a + (i as f64 + 0.5) * h;
            profile.eval(x).map(|p| p.mass.powf(b))
        })
        .collect::<Result<Vec<_>>>()?;
    let ma: Vec<f64> = mass.iter().map(|m| m.powf(a)).collect();
    let mg: Vec<f64> = mass.iter().map(|m| m.powf(g)).collect();
    let kin = |i: usize, j: usize| -> f64 {
        if i == j {
            (mid_b[i] + mid_b[i + 1]) * inv_h2
        } else {
            -mid_b[i.max(j)] * inv_h2
        }
    };
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i.saturating_sub(1)..=(i + 1).min(n - 1) {
            let k = kin(i, j);
            let t = 0.5 * (ma[i] * k * mg[j] + mg[i] * k * ma[j]);
            m[(i, j)] = Complex64::new(t, 0.0);
        }
    }
    Ok(OperatorMatrix {
        entries: m,
        role: OperatorRole::OrderedKinetic,
        grid: grid.clone(),
    })
}

/// Grids for `H_x` and `H_q` with corresponding nodes: uniform in `q`, and
/// its image under `x(q)`. Constant mass yields a uniform x grid.
pub fn matched_domains(spec: &ModelSpec, n: usize) -> Result<(Grid, Grid)> {
    let (qa, qb) = spec.q_interval;
    let grid_q = Grid::uniform(GridKind::UniformQ, qa, qb, n)?;
    let map = spec.map();
    let grid_x = match spec.profile {
        MassProfile::Constant => {
            Grid::uniform(GridKind::UniformX, map.x_of_q(qa)?, map.x_of_q(qb)?, n)?
        }
        MassProfile::PowerLaw { .. } => Grid::q_induced(&map, qa, qb, n)?,
    };
    Ok((grid_x, grid_q))
}

/// Uniform x grid spanning the image of the spec's q-interval.
pub fn uniform_x_grid(spec: &ModelSpec, n: usize) -> Result<Grid> {
    let (xa, xb) = spec.x_interval()?;
    Grid::uniform(GridKind::UniformX, xa.min(xb), xa.max(xb), n)
}
