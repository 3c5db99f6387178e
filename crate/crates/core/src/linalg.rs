//! Dense complex linear algebra.
//!
//! Everything here works on square, row-major [`ComplexMatrix`] values. The
//! eigensolver is a cyclic Jacobi method for Hermitian matrices; it needs no
//! tridiagonal reduction and stays accurate to working precision for the
//! dimensions this crate handles (up to a few thousand).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::QuantumState;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance used when a matrix must be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Square dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a
    /// perfect square.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: entries.len() });
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Outer product `|v><w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        debug_assert_eq!(v.len(), w.len());
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.data[i * self.dim + j]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in matvec");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A[i][j] - conj(A[j][i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > HERMITIAN_TOL * self.max_abs() {
            return Err(Error::NotHermitian { defect });
        }
        Ok(())
    }

    /// `(A + A^dagger) / 2` together with the largest entry it changed.
    pub fn symmetrized(&self) -> (Self, f64) {
        let n = self.dim;
        let mut out = self.clone();
        let mut correction = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let a = self.data[i * n + j];
                let b = self.data[j * n + i];
                let avg = (a + b.conj()) * 0.5;
                correction = correction.max((avg - a).norm());
                out.data[i * n + j] = avg;
                out.data[j * n + i] = avg.conj();
            }
        }
        (out, correction)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.adjoint().matmul(self);
        (&prod - &Self::identity(self.dim)).frobenius_norm() <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        if self.dim <= 8 {
            for i in 0..self.dim {
                let row: Vec<String> = self
                    .row(i)
                    .iter()
                    .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                    .collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        Ok(())
    }
}

/// Kronecker product: `(a ⊗ b)[i*db + k][j*db + l] = a[i][j] * b[k][l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a.data[i * da + j];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                let row = (i * db + k) * n + j * db;
                for l in 0..db {
                    out.data[row + l] = aij * b.data[k * db + l];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        max_abs(&self.eigenvalues)
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum()
        })
    }
}

pub(crate) fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Spectrum> {
    h.ensure_hermitian()?;
    let (values, vectors_t) = jacobi(h, true)?;
    let n = h.dim();
    let vectors_t = vectors_t.expect("eigenvectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    // Rows of `vectors_t` are eigenvectors.
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| vectors_t[(order[j], i)]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Eigenvalues only (ascending); skips the eigenvector accumulation.
pub fn eigvals_hermitian(h: &ComplexMatrix) -> Result<Vec<f64>> {
    h.ensure_hermitian()?;
    let (mut values, _) = jacobi(h, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues of a Hermitian matrix that is block diagonal with respect to
/// the integer `labels` attached to each basis vector (for example total
/// magnetization). Each block is diagonalized separately. Returns an error if
/// the matrix couples two different labels.
pub fn eigvals_hermitian_blocked(h: &ComplexMatrix, labels: &[i64]) -> Result<Vec<f64>> {
    let n = h.dim();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: labels.len() });
    }
    h.ensure_hermitian()?;
    let scale = h.max_abs();
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] && h[(i, j)].norm() > HERMITIAN_TOL * scale {
                return Err(Error::InvalidParameter(format!(
                    "matrix couples blocks {} and {} (entry {:e})",
                    labels[i],
                    labels[j],
                    h[(i, j)].norm()
                )));
            }
        }
    }
    let mut blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        blocks.entry(l).or_default().push(i);
    }
    let mut values = Vec::with_capacity(n);
    for idx in blocks.values() {
        let sub = ComplexMatrix::from_fn(idx.len(), |a, b| h[(idx[a], idx[b])]);
        let (v, _) = jacobi(&sub, false)?;
        values.extend(v);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Cyclic Jacobi on a Hermitian matrix. Returns the (unsorted) eigenvalues
/// and, if requested, a matrix whose rows are the matching eigenvectors.
fn jacobi(h: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = h.dim();
    let (mut a, _) = h.symmetrized();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut vt = want_vectors.then(|| ComplexMatrix::identity(n));
    let total = a.frobenius_norm();
    if n <= 1 || total == 0.0 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok((values, vt));
    }
    let target = JACOBI_TOL * total;

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a.data[i * n + j].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut row_p = vec![ZERO; n];
    let mut row_q = vec![ZERO; n];
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.data[p * n + q];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE || mag < 1e-3 * target / n as f64 {
                    continue;
                }
                let app = a.data[p * n + p].re;
                let aqq = a.data[q * n + q].re;
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q); A <- G^H A G.
                let sp = phase * s;
                row_p.copy_from_slice(&a.data[p * n..(p + 1) * n]);
                row_q.copy_from_slice(&a.data[q * n..(q + 1) * n]);
                for k in 0..n {
                    let (xp, xq) = (row_p[k], row_q[k]);
                    a.data[p * n + k] = xp * c - sp * xq;
                    a.data[q * n + k] = sp.conj() * xp + xq * c;
                }
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    a.data[k * n + p] = a.data[p * n + k].conj();
                    a.data[k * n + q] = a.data[q * n + k].conj();
                }
                a.data[p * n + p] = C64::new(app - t * mag, 0.0);
                a.data[q * n + q] = C64::new(aqq + t * mag, 0.0);
                a.data[p * n + q] = ZERO;
                a.data[q * n + p] = ZERO;

                if let Some(v) = vt.as_mut() {
                    // Rows of v are eigenvectors: v_p <- c v_p - s e^{-i phi} v_q, etc.
                    row_p.copy_from_slice(&v.data[p * n..(p + 1) * n]);
                    row_q.copy_from_slice(&v.data[q * n..(q + 1) * n]);
                    for k in 0..n {
                        let (xp, xq) = (row_p[k], row_q[k]);
                        v.data[p * n + k] = xp * c - sp.conj() * xq;
                        v.data[q * n + k] = sp * xp + xq * c;
                    }
                }
            }
        }
    }
    let values = (0..n).map(|i| a.data[i * n + i].re).collect();
    Ok((values, vt))
}

/// `exp(i h)` for Hermitian `h`, via `V diag(exp(i lambda)) V^dagger`.
pub fn unitary_exp(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(h)?;
    let v = &spec.eigenvectors;
    let n = h.dim();
    let phases: Vec<C64> = spec.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()
    }))
}

/// Imaginary residue tolerated in an expectation value of a Hermitian operator.
const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// `<psi|op|psi>` for pure states, `Tr(rho op)` for mixed ones.
pub fn expectation(state: &QuantumState, op: &ComplexMatrix) -> Result<f64> {
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), actual: op.dim() });
    }
    op.ensure_hermitian()?;
    let z = expectation_complex(state, op);
    let scale = op.max_abs().max(1.0);
    if z.im.abs() > EXPECTATION_IMAG_TOL * scale {
        return Err(Error::NotHermitian { defect: z.im.abs() });
    }
    Ok(z.re)
}

/// Unchecked complex expectation value; callers guarantee dimensions.
pub(crate) fn expectation_complex(state: &QuantumState, op: &ComplexMatrix) -> C64 {
    match state {
        QuantumState::Pure { amplitudes, .. } => inner(amplitudes, &op.matvec(amplitudes)),
        QuantumState::Mixed { rho, .. } => trace_product(rho, op),
    }
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.dim();
    let mut s = ZERO;
    for i in 0..n {
        for j in 0..n {
            s += a.data[i * n + j] * b.data[j * n + i];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let m = random_matrix(n, rng);
        (&m + &m.adjoint()).scale_real(0.5)
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        let zz = kron(&pauli_z(), &pauli_z());
        assert_eq!(zz, ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_is_associative_elementwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random_matrix(2, &mut rng);
            let b = random_matrix(2, &mut rng);
            let c = random_matrix(2, &mut rng);
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            assert_eq!(left.dim(), 8);
            assert!((&left - &right).max_abs() < 1e-15);
        }
    }

    #[test]
    fn kron_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(3, &mut rng);
        let b = random_matrix(2, &mut rng);
        let k = kron(&a, &b);
        for i in 0..3 {
            for j in 0..3 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn eig_pauli_z() {
        let s = eig_hermitian(&pauli_z()).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = ONE;
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(8, &mut rng);
        let s = eig_hermitian(&h).unwrap();
        assert!((&s.reconstruct() - &h).frobenius_norm() < 1e-10);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_residuals_and_unitarity_up_to_dim_64() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..50 {
            let n = 1 + (trial * 13) % 64;
            let h = random_hermitian(n, &mut rng);
            let s = eig_hermitian(&h).unwrap();
            let hf = h.frobenius_norm();
            for k in 0..n {
                let v = s.eigenvector(k);
                let hv = h.matvec(&v);
                let res: f64 = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * s.eigenvalues[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-10 * hf, "n={n} k={k} residual {res}");
            }
            assert!(s.eigenvectors.is_unitary(1e-10), "n={n}");
        }
    }

    #[test]
    fn eigvals_only_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = random_hermitian(20, &mut rng);
        let a = eigvals_hermitian(&h).unwrap();
        let b = eig_hermitian(&h).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn blocked_eigvals_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let labels = [0, 1, 0, 2, 1, 0];
        let mut h = random_hermitian(6, &mut rng);
        for i in 0..6 {
            for j in 0..6 {
                if labels[i] != labels[j] {
                    h[(i, j)] = ZERO;
                }
            }
        }
        let a = eigvals_hermitian_blocked(&h, &labels).unwrap();
        let b = eigvals_hermitian(&h).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        h[(0, 1)] = ONE;
        h[(1, 0)] = ONE;
        assert!(eigvals_hermitian_blocked(&h, &labels).is_err());
    }

    #[test]
    fn unitary_exp_of_zero_is_identity() {
        let u = unitary_exp(&ComplexMatrix::zeros(3)).unwrap();
        assert!((&u - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn unitary_exp_of_half_pi_sigma_z() {
        // pi * J_z for j = 1/2 is diag(pi/2, -pi/2).
        let h = ComplexMatrix::from_real_diagonal(&[std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2]);
        let u = unitary_exp(&h).unwrap();
        assert!((u[(0, 0)] - I).norm() < 1e-15);
        assert!((u[(1, 1)] + I).norm() < 1e-15);
        assert!(u[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn unitary_exp_inverse_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for n in [2, 3, 5, 8] {
            let h = random_hermitian(n, &mut rng);
            let u = unitary_exp(&h).unwrap();
            let v = unitary_exp(&h.scale_real(-1.0)).unwrap();
            assert!((&u.matmul(&v) - &ComplexMatrix::identity(n)).frobenius_norm() < 1e-10);
            assert!(u.is_unitary(1e-10));
        }
    }

    #[test]
    fn trace_product_matches_matmul() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let a = random_matrix(5, &mut rng);
        let b = random_matrix(5, &mut rng);
        assert!((trace_product(&a, &b) - a.matmul(&b).trace()).norm() < 1e-13);
    }
}
