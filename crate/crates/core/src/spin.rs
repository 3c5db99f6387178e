//! Spin-`j` operators, site embedding and local rotations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, unitary_exp, ComplexMatrix, C64, I, ONE};

/// A spin quantum number stored as `2j` so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinQuantum {
    two_j: u32,
}

impl SpinQuantum {
    pub const HALF: SpinQuantum = SpinQuantum { two_j: 1 };
    pub const ONE: SpinQuantum = SpinQuantum { two_j: 2 };

    pub const fn from_two_j(two_j: u32) -> Self {
        Self { two_j }
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    pub fn is_qubit(self) -> bool {
        self.two_j == 1
    }

    /// `2m` for each basis vector, in basis order (descending m).
    pub fn two_m_values(self) -> impl Iterator<Item = i64> {
        let tj = self.two_j as i64;
        (0..=tj).map(move |k| tj - 2 * k)
    }
}

impl fmt::Display for SpinQuantum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j % 2 == 0 {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

/// Ordered list of sites; site 0 is the leftmost Kronecker factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteList {
    sites: Vec<SpinQuantum>,
}

impl SiteList {
    pub fn new(sites: Vec<SpinQuantum>) -> Self {
        Self { sites }
    }

    pub fn uniform(n: usize, spin: SpinQuantum) -> Self {
        Self { sites: vec![spin; n] }
    }

    pub fn qubits(n: usize) -> Self {
        Self::uniform(n, SpinQuantum::HALF)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[SpinQuantum] {
        &self.sites
    }

    pub fn site(&self, k: usize) -> SpinQuantum {
        self.sites[k]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.dim()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.sites.iter().map(|s| s.dim()).product()
    }

    pub fn all_qubits(&self) -> bool {
        self.sites.iter().all(|s| s.is_qubit())
    }

    /// Twice the total magnetization of every basis vector.
    pub fn two_m_total(&self) -> Vec<i64> {
        let mut labels = vec![0_i64];
        for s in &self.sites {
            labels = labels
                .iter()
                .flat_map(|&l| s.two_m_values().map(move |m| l + m))
                .collect();
        }
        labels
    }

    /// Per-site digits of a basis index (site 0 most significant).
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut out = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            out[k] = index % dims[k];
            index /= dims[k];
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        self.sites.iter().zip(digits).fold(0, |acc, (s, &d)| acc * s.dim() + d)
    }

    /// Product of `j_k` over all sites.
    pub fn j_product(&self) -> f64 {
        self.sites.iter().map(|s| s.j()).product()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Self::ALL[i]
    }
}

/// Levi-Civita symbol over axis indices.
pub fn levi_civita(u: usize, v: usize, w: usize) -> f64 {
    match (u, v, w) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Ordered triple `(O_x, O_y, O_z)` of equal-dimension operators.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorOperator {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
}

impl VectorOperator {
    pub fn new(x: ComplexMatrix, y: ComplexMatrix, z: ComplexMatrix) -> Result<Self> {
        let d = x.dim();
        for m in [&y, &z] {
            if m.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: m.dim() });
            }
        }
        Ok(Self { x, y, z })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn component(&self, axis: Axis) -> &ComplexMatrix {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn components(&self) -> [&ComplexMatrix; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self { x: f(&self.x), y: f(&self.y), z: f(&self.z) }
    }

    pub fn is_hermitian(&self) -> bool {
        self.components().iter().all(|m| m.is_hermitian())
    }

    /// `n . O` for a real 3-vector `n`.
    pub fn project(&self, n: [f64; 3]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (m, c) in self.components().into_iter().zip(n) {
            out.add_scaled(m, C64::new(c, 0.0));
        }
        out
    }
}

/// Rotation vector: direction is the axis, length the angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle(pub [f64; 3]);

impl AxisAngle {
    pub const ZERO: AxisAngle = AxisAngle([0.0; 3]);

    pub fn new(alpha: [f64; 3]) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("rotation vector must be finite".into()));
        }
        Ok(Self(alpha))
    }

    pub fn angle(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Spin matrices in the descending-m basis `m = j, j-1, ..., -j`.
pub fn spin_matrices(spin: SpinQuantum) -> VectorOperator {
    let d = spin.dim();
    let j = spin.j();
    let ms: Vec<f64> = spin.two_m_values().map(|m| m as f64 / 2.0).collect();
    let jz = ComplexMatrix::from_real_diagonal(&ms);
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; |m+1> sits one index earlier.
    let mut jp = ComplexMatrix::zeros(d);
    for k in 1..d {
        let m = ms[k];
        jp[(k - 1, k)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale_real(0.5);
    let jy = (&jp - &jm).scale(C64::new(0.0, -0.5));
    VectorOperator { x: jx, y: jy, z: jz }
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` on `site_index`.
pub fn embed_site(op: &ComplexMatrix, site_index: usize, sites: &SiteList) -> Result<ComplexMatrix> {
    if site_index >= sites.len() {
        return Err(Error::SiteIndex { index: site_index, len: sites.len() });
    }
    let site_dim = sites.site(site_index).dim();
    if op.dim() != site_dim {
        return Err(Error::DimensionMismatch { expected: site_dim, actual: op.dim() });
    }
    let left: usize = sites.dims()[..site_index].iter().product();
    let right: usize = sites.dims()[site_index + 1..].iter().product();
    Ok(kron(&kron(&ComplexMatrix::identity(left), op), &ComplexMatrix::identity(right)))
}

/// The spin vector of one site embedded in the full space.
pub fn site_spin(site_index: usize, sites: &SiteList) -> Result<VectorOperator> {
    if site_index >= sites.len() {
        return Err(Error::SiteIndex { index: site_index, len: sites.len() });
    }
    let local = spin_matrices(sites.site(site_index));
    Ok(VectorOperator {
        x: embed_site(&local.x, site_index, sites)?,
        y: embed_site(&local.y, site_index, sites)?,
        z: embed_site(&local.z, site_index, sites)?,
    })
}

/// Sum of all embedded site spins.
pub fn total_spin(sites: &SiteList) -> VectorOperator {
    let d = sites.total_dim();
    let mut total = VectorOperator {
        x: ComplexMatrix::zeros(d),
        y: ComplexMatrix::zeros(d),
        z: ComplexMatrix::zeros(d),
    };
    for k in 0..sites.len() {
        let s = site_spin(k, sites).expect("site index in range");
        total.x.add_scaled(&s.x, ONE);
        total.y.add_scaled(&s.y, ONE);
        total.z.add_scaled(&s.z, ONE);
    }
    total
}

/// `U(alpha) = exp(i alpha . J)` for one site.
pub fn local_unitary(alpha: AxisAngle, spin: SpinQuantum) -> ComplexMatrix {
    if alpha.angle() == 0.0 {
        return ComplexMatrix::identity(spin.dim());
    }
    let generator = spin_matrices(spin).project(alpha.0);
    unitary_exp(&generator).expect("alpha . J is Hermitian")
}

/// Closed form of `local_unitary` for spin 1/2:
/// `cos(a/2) I + i sin(a/2) n . sigma`.
pub fn qubit_unitary(alpha: AxisAngle) -> ComplexMatrix {
    let a = alpha.angle();
    if a == 0.0 {
        return ComplexMatrix::identity(2);
    }
    let [nx, ny, nz] = alpha.0.map(|c| c / a);
    let (s, c) = (a / 2.0).sin_cos();
    let mut u = ComplexMatrix::zeros(2);
    u[(0, 0)] = C64::new(c, s * nz);
    u[(1, 1)] = C64::new(c, -s * nz);
    u[(0, 1)] = I * s * C64::new(nx, -ny);
    u[(1, 0)] = I * s * C64::new(nx, ny);
    u
}

/// Local unitary for any spin, using the closed form for qubits.
pub fn site_unitary(alpha: AxisAngle, spin: SpinQuantum) -> ComplexMatrix {
    if spin.is_qubit() {
        qubit_unitary(alpha)
    } else {
        local_unitary(alpha, spin)
    }
}

/// The SO(3) matrix `R` with `<J>' = R <J>` when the state transforms as
/// `|psi'> = U(alpha)|psi>`, i.e. `U^dagger J_u U = sum_v R_uv J_v`.
///
/// With `U = exp(+i alpha . J)` this is a right-handed rotation about
/// `alpha / |alpha|` by the angle `-|alpha|`.
pub fn so3_rotation(alpha: AxisAngle) -> [[f64; 3]; 3] {
    let a = alpha.angle();
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if a == 0.0 {
        return r;
    }
    let n = alpha.0.map(|c| c / a);
    let (s, c) = (-a).sin_cos();
    for (i, row) in r.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let cross = match (i, j) {
                (0, 1) => -n[2],
                (0, 2) => n[1],
                (1, 0) => n[2],
                (1, 2) => -n[0],
                (2, 0) => -n[1],
                (2, 1) => n[0],
                _ => 0.0,
            };
            let delta = if i == j { 1.0 } else { 0.0 };
            *entry = c * delta + s * cross + (1.0 - c) * n[i] * n[j];
        }
    }
    r
}

pub fn mat3_vec(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
}

/// Expectation triple `<J>` of a single-site pure state.
pub fn spin_expectation(spin: SpinQuantum, psi: &[C64]) -> [f64; 3] {
    let ops = spin_matrices(spin);
    ops.components().map(|m| {
        let mv = m.matvec(psi);
        psi.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<C64>().re
    })
}
