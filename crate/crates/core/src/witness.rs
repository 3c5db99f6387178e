//! Dot and cross product witnesses and the Mermin-Klyshko operator.
//!
//! The directed products nest innermost-first: with the ordering listing the
//! sites that play roles (1), (2), ..., (N),
//!
//! ```text
//! T2 = J(2) x J(1),   Tk = J(k) x T(k-1),
//! C(N) = J(N) x T(N-1) / (j1 ... jN),   D(N) = J(N) . T(N-1) / (j1 ... jN).
//! ```
//!
//! Because every site enters a chain exactly once, each component expands
//! into a sum of tensor products of single-site spin matrices. The chain
//! builders work on that expansion and only assemble dense matrices at the
//! end, which keeps 11-qubit operators cheap to build. [`cross_op`] and
//! [`dot_op`] are the dense, general-purpose counterparts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian_blocked, kron, max_abs, ComplexMatrix, C64, ONE, ZERO};
use crate::spin::{levi_civita, spin_matrices, SiteList, VectorOperator};

/// Largest Hilbert space dimension the spectral routines accept by default.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Commutator norm above which two operators are treated as overlapping.
const COMMUTE_TOL: f64 = 1e-10;

/// Allowed Hermiticity correction when symmetrizing a built witness.
const SYMMETRIZE_TOL: f64 = 1e-12;

/// Nesting order of a directed product: `perm[r]` is the site playing role
/// `(r + 1)`. Sites are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderingSpec {
    perm: Vec<usize>,
}

impl OrderingSpec {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidOrdering(format!("{perm:?} is not a permutation of 0..{}", perm.len())));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    /// Parses 1-based labels such as `"1,2,3,4"` or `"3421"`.
    pub fn parse_one_based(text: &str) -> Result<Self> {
        let text = text.trim();
        let labels: Vec<usize> = if text.contains(',') {
            text.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidOrdering(format!("{text}: {e}")))?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::InvalidOrdering(text.to_string()))?
        };
        if labels.contains(&0) {
            return Err(Error::InvalidOrdering(format!("{text}: labels start at 1")));
        }
        Self::new(labels.into_iter().map(|l| l - 1).collect())
    }

    pub fn to_one_based_string(&self) -> String {
        self.perm.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// Exchanges roles (1) and (2).
    pub fn swap_innermost(&self) -> Self {
        let mut perm = self.perm.clone();
        if perm.len() >= 2 {
            perm.swap(0, 1);
        }
        Self { perm }
    }

    /// All `n!` orderings in lexicographic order.
    pub fn all(n: usize) -> Vec<OrderingSpec> {
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self { perm: perm.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).expect("successor exists");
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        out
    }
}

/// Normalized scalar witness `D(N)`.
#[derive(Clone, Debug)]
pub struct WitnessScalar {
    pub matrix: ComplexMatrix,
    pub sites: SiteList,
    pub ordering: OrderingSpec,
    pub normalization: f64,
}

/// Normalized vector witness `C(N)`.
#[derive(Clone, Debug)]
pub struct WitnessVector {
    pub components: VectorOperator,
    pub sites: SiteList,
    pub ordering: OrderingSpec,
    pub normalization: f64,
}

/// Real-coefficient sum of tensor products of single-site spin components.
/// `axes[k]` is `None` for the identity on site `k`.
#[derive(Clone, Debug)]
struct Term {
    coef: f64,
    axes: Vec<Option<usize>>,
}

type SymbolicVector = [Vec<Term>; 3];

fn symbolic_site_spin(site: usize, n: usize) -> SymbolicVector {
    [0, 1, 2].map(|u| {
        let mut axes = vec![None; n];
        axes[site] = Some(u);
        vec![Term { coef: 1.0, axes }]
    })
}

fn symbolic_product(a: &[Term], b: &[Term], scale: f64, out: &mut Vec<Term>) {
    for ta in a {
        for tb in b {
            let axes = ta
                .axes
                .iter()
                .zip(&tb.axes)
                .map(|(x, y)| match (x, y) {
                    (Some(_), Some(_)) => unreachable!("chain sites are disjoint"),
                    (Some(u), None) | (None, Some(u)) => Some(*u),
                    (None, None) => None,
                })
                .collect();
            out.push(Term { coef: scale * ta.coef * tb.coef, axes });
        }
    }
}

fn symbolic_cross(a: &SymbolicVector, b: &SymbolicVector) -> SymbolicVector {
    [0, 1, 2].map(|u| {
        let mut out = Vec::new();
        for v in 0..3 {
            for w in 0..3 {
                let e = levi_civita(u, v, w);
                if e != 0.0 {
                    symbolic_product(&a[v], &b[w], e, &mut out);
                }
            }
        }
        out
    })
}

fn symbolic_dot(a: &SymbolicVector, b: &SymbolicVector) -> Vec<Term> {
    let mut out = Vec::new();
    for u in 0..3 {
        symbolic_product(&a[u], &b[u], 1.0, &mut out);
    }
    out
}

/// Sparse entries `(row, col, value)` of each spin component, per site.
struct LocalTables {
    identity: Vec<Vec<(usize, usize, C64)>>,
    components: Vec<[Vec<(usize, usize, C64)>; 3]>,
}

impl LocalTables {
    fn new(sites: &SiteList) -> Self {
        let nonzeros = |m: &ComplexMatrix| {
            let mut out = Vec::new();
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    if m[(i, j)] != ZERO {
                        out.push((i, j, m[(i, j)]));
                    }
                }
            }
            out
        };
        let mut identity = Vec::new();
        let mut components = Vec::new();
        for s in sites.sites() {
            let ops = spin_matrices(*s);
            identity.push((0..s.dim()).map(|i| (i, i, ONE)).collect());
            components.push(ops.components().map(nonzeros));
        }
        Self { identity, components }
    }
}

fn assemble(terms: &[Term], sites: &SiteList, scale: f64) -> ComplexMatrix {
    let tables = LocalTables::new(sites);
    let dims = sites.dims();
    let d = sites.total_dim();
    let mut out = ComplexMatrix::zeros(d);

    fn recurse(
        k: usize,
        row: usize,
        col: usize,
        val: C64,
        locals: &[&Vec<(usize, usize, C64)>],
        dims: &[usize],
        d: usize,
        out: &mut [C64],
    ) {
        if k == locals.len() {
            out[row * d + col] += val;
            return;
        }
        for &(i, j, v) in locals[k] {
            recurse(k + 1, row * dims[k] + i, col * dims[k] + j, val * v, locals, dims, d, out);
        }
    }

    let data = out.as_mut_slice();
    for term in terms {
        let locals: Vec<&Vec<(usize, usize, C64)>> = term
            .axes
            .iter()
            .enumerate()
            .map(|(k, a)| match a {
                Some(u) => &tables.components[k][*u],
                None => &tables.identity[k],
            })
            .collect();
        recurse(0, 0, 0, C64::new(term.coef * scale, 0.0), &locals, &dims, d, data);
    }
    out
}

fn finish_hermitian(m: ComplexMatrix) -> Result<ComplexMatrix> {
    let (sym, correction) = m.symmetrized();
    if correction > SYMMETRIZE_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { defect: correction });
    }
    Ok(sym)
}

fn check_ordering(sites: &SiteList, ordering: &OrderingSpec) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::InvalidParameter("at least one site is required".into()));
    }
    if ordering.len() != sites.len() {
        return Err(Error::InvalidOrdering(format!(
            "ordering has {} entries for {} sites",
            ordering.len(),
            sites.len()
        )));
    }
    if sites.sites().iter().any(|s| s.two_j() == 0) {
        return Err(Error::InvalidParameter("spin-0 sites cannot be normalized".into()));
    }
    Ok(())
}

fn check_cap(sites: &SiteList, cap: usize) -> Result<()> {
    let dim = sites.total_dim();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(())
}

/// The un-normalized nested cross product `T(N-1)` over roles (1)..(N-1),
/// or `J(1)` when only one role is involved.
fn symbolic_inner_chain(ordering: &OrderingSpec, upto: usize, n: usize) -> SymbolicVector {
    let perm = ordering.as_slice();
    let mut t = symbolic_site_spin(perm[0], n);
    for &site in &perm[1..upto] {
        t = symbolic_cross(&symbolic_site_spin(site, n), &t);
    }
    t
}

/// Builds `C(N)`; for a single site this is `J / j`.
pub fn build_cross_chain(sites: &SiteList, ordering: &OrderingSpec) -> Result<WitnessVector> {
    check_ordering(sites, ordering)?;
    let n = sites.len();
    let normalization = 1.0 / sites.j_product();
    let chain = symbolic_inner_chain(ordering, n, n);
    let [x, y, z] = chain.map(|terms| assemble(&terms, sites, normalization));
    let components = VectorOperator { x: finish_hermitian(x)?, y: finish_hermitian(y)?, z: finish_hermitian(z)? };
    Ok(WitnessVector { components, sites: sites.clone(), ordering: ordering.clone(), normalization })
}

/// Builds `D(N)`; for a single site `D(1)` is the identity.
pub fn build_dot_chain(sites: &SiteList, ordering: &OrderingSpec) -> Result<WitnessScalar> {
    check_ordering(sites, ordering)?;
    let n = sites.len();
    let normalization = 1.0 / sites.j_product();
    let matrix = if n == 1 {
        ComplexMatrix::identity(sites.total_dim())
    } else {
        let inner = symbolic_inner_chain(ordering, n - 1, n);
        let last = symbolic_site_spin(ordering.as_slice()[n - 1], n);
        finish_hermitian(assemble(&symbolic_dot(&last, &inner), sites, normalization))?
    };
    Ok(WitnessScalar { matrix, sites: sites.clone(), ordering: ordering.clone(), normalization })
}

fn check_commuting(a: &VectorOperator, b: &VectorOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    let mut worst = 0.0_f64;
    for x in a.components() {
        for y in b.components() {
            worst = worst.max(x.commutator(y).max_abs());
        }
    }
    if worst > COMMUTE_TOL {
        return Err(Error::NonCommuting { norm: worst });
    }
    Ok(())
}

/// Operator cross product `C_u = sum_{v,w} eps_uvw a_v b_w` of two commuting
/// vector operators.
pub fn cross_op(a: &VectorOperator, b: &VectorOperator) -> Result<VectorOperator> {
    check_commuting(a, b)?;
    let (ac, bc) = (a.components(), b.components());
    let comp = |u: usize| {
        let mut out = ComplexMatrix::zeros(a.dim());
        for v in 0..3 {
            for w in 0..3 {
                let e = levi_civita(u, v, w);
                if e != 0.0 {
                    out.add_scaled(&ac[v].matmul(bc[w]), C64::new(e, 0.0));
                }
            }
        }
        out
    };
    Ok(VectorOperator { x: comp(0), y: comp(1), z: comp(2) })
}

/// Operator dot product `sum_u a_u b_u` of two commuting vector operators.
pub fn dot_op(a: &VectorOperator, b: &VectorOperator) -> Result<ComplexMatrix> {
    check_commuting(a, b)?;
    let mut out = ComplexMatrix::zeros(a.dim());
    for (x, y) in a.components().into_iter().zip(b.components()) {
        out.add_scaled(&x.matmul(y), ONE);
    }
    Ok(out)
}

/// Sorted spectrum of `D(N)`, computed per total-magnetization block.
pub fn dot_spectrum(sites: &SiteList, ordering: &OrderingSpec, dim_cap: usize) -> Result<Vec<f64>> {
    check_cap(sites, dim_cap)?;
    let w = build_dot_chain(sites, ordering)?;
    eigvals_hermitian_blocked(&w.matrix, &sites.two_m_total())
}

/// Sorted spectrum of `C_z(N)`, computed per total-magnetization block.
pub fn cross_z_spectrum(sites: &SiteList, ordering: &OrderingSpec, dim_cap: usize) -> Result<Vec<f64>> {
    check_cap(sites, dim_cap)?;
    let w = build_cross_chain(sites, ordering)?;
    eigvals_hermitian_blocked(&w.components.z, &sites.two_m_total())
}

/// `max |lambda|` over the spectrum of `D(N)`.
pub fn max_violation_dot(sites: &SiteList, ordering: &OrderingSpec, dim_cap: usize) -> Result<f64> {
    Ok(max_abs(&dot_spectrum(sites, ordering, dim_cap)?))
}

/// Largest eigenvalue of `C_z(N)`, which equals the maximum of `||<C(N)>||`
/// over all states.
pub fn max_violation_cross(sites: &SiteList, ordering: &OrderingSpec, dim_cap: usize) -> Result<f64> {
    let spec = cross_z_spectrum(sites, ordering, dim_cap)?;
    Ok(spec.last().copied().unwrap_or(0.0))
}

/// Measurement directions for the Mermin-Klyshko operator: site `k` measures
/// `A = a[k] . sigma` and `A~ = a_tilde[k] . sigma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MkSettings {
    pub a: Vec<[f64; 3]>,
    pub a_tilde: Vec<[f64; 3]>,
}

const UNIT_TOL: f64 = 1e-12;

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

impl MkSettings {
    pub fn new(a: Vec<[f64; 3]>, a_tilde: Vec<[f64; 3]>) -> Result<Self> {
        if a.len() != a_tilde.len() || a.is_empty() {
            return Err(Error::InvalidParameter("need one (a, a~) pair per site".into()));
        }
        for v in a.iter().chain(&a_tilde) {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidParameter(format!("setting {v:?} is not a unit vector")));
            }
        }
        Ok(Self { a, a_tilde })
    }

    /// Unit vectors from polar/azimuthal angles laid out as
    /// `[theta_a0, phi_a0, theta_a~0, phi_a~0, theta_a1, ...]`.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        if angles.len() % 4 != 0 || angles.is_empty() {
            return Err(Error::InvalidParameter("need four angles per site".into()));
        }
        let dir = |t: f64, p: f64| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        let mut a = Vec::new();
        let mut a_tilde = Vec::new();
        for c in angles.chunks(4) {
            a.push(dir(c[0], c[1]));
            a_tilde.push(dir(c[2], c[3]));
        }
        Ok(Self { a, a_tilde })
    }

    /// `a = x, a~ = y` on the first qubit and `b = (x+y)/sqrt2, b~ = (x-y)/sqrt2`
    /// on the second.
    pub fn chsh_default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { a: vec![[1.0, 0.0, 0.0], [s, s, 0.0]], a_tilde: vec![[0.0, 1.0, 0.0], [s, -s, 0.0]] }
    }

    pub fn normalized(a: Vec<[f64; 3]>, a_tilde: Vec<[f64; 3]>) -> Result<Self> {
        Self::new(a.into_iter().map(unit).collect(), a_tilde.into_iter().map(unit).collect())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// `n . sigma` for a qubit.
pub fn pauli_projection(n: [f64; 3]) -> ComplexMatrix {
    spin_matrices(crate::spin::SpinQuantum::HALF).project(n).scale_real(2.0)
}

/// Returns `(F(N), F~(N))` from the recursion
/// `2F(N) = F(N-1) ⊗ (A + A~) + F~(N-1) ⊗ (A - A~)`, `F(1) = A`.
pub fn build_mk_pair(settings: &MkSettings, sites: &SiteList) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !sites.all_qubits() {
        return Err(Error::NonQubit);
    }
    if settings.len() != sites.len() {
        return Err(Error::DimensionMismatch { expected: sites.len(), actual: settings.len() });
    }
    let settings = MkSettings::new(settings.a.clone(), settings.a_tilde.clone())?;
    let mut f = pauli_projection(settings.a[0]);
    let mut ft = pauli_projection(settings.a_tilde[0]);
    for k in 1..settings.len() {
        let a = pauli_projection(settings.a[k]);
        let at = pauli_projection(settings.a_tilde[k]);
        let plus = &a + &at;
        let minus = &a - &at;
        let next = (&kron(&f, &plus) + &kron(&ft, &minus)).scale_real(0.5);
        // Exchanging A and A~ everywhere turns (A - A~) into (A~ - A).
        let next_t = (&kron(&ft, &plus) - &kron(&f, &minus)).scale_real(0.5);
        f = next;
        ft = next_t;
    }
    Ok((finish_hermitian(f)?, finish_hermitian(ft)?))
}

pub fn build_mk(settings: &MkSettings, sites: &SiteList) -> Result<ComplexMatrix> {
    Ok(build_mk_pair(settings, sites)?.0)
}

/// Expansion coefficients of `F(N)` over setting choices: bit `k` of the
/// index set means site `k` measures `A~` (bit order: site 0 is the most
/// significant bit).
pub fn mk_coefficients(n: usize) -> Vec<f64> {
    let mut f = vec![1.0, 0.0];
    let mut ft = vec![0.0, 1.0];
    for _ in 1..n {
        let mut nf = Vec::with_capacity(f.len() * 2);
        let mut nft = Vec::with_capacity(f.len() * 2);
        for (&x, &y) in f.iter().zip(&ft) {
            nf.push(0.5 * (x + y));
            nf.push(0.5 * (x - y));
            nft.push(0.5 * (y - x));
            nft.push(0.5 * (y + x));
        }
        f = nf;
        ft = nft;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, eigvals_hermitian, I};
    use crate::spin::{site_spin, total_spin, SpinQuantum};

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn dense_cross_chain(sites: &SiteList, ordering: &OrderingSpec) -> VectorOperator {
        let perm = ordering.as_slice();
        let mut t = site_spin(perm[0], sites).unwrap();
        for &s in &perm[1..] {
            t = cross_op(&site_spin(s, sites).unwrap(), &t).unwrap();
        }
        t.map(|m| m.scale_real(1.0 / sites.j_product()))
    }

    fn dense_dot_chain(sites: &SiteList, ordering: &OrderingSpec) -> ComplexMatrix {
        let perm = ordering.as_slice();
        let n = perm.len();
        let mut t = site_spin(perm[0], sites).unwrap();
        for &s in &perm[1..n - 1] {
            t = cross_op(&site_spin(s, sites).unwrap(), &t).unwrap();
        }
        dot_op(&site_spin(perm[n - 1], sites).unwrap(), &t).unwrap().scale_real(1.0 / sites.j_product())
    }

    #[test]
    fn symbolic_chain_matches_dense_route() {
        let cases = [
            SiteList::qubits(3),
            SiteList::new(vec![SpinQuantum::HALF, SpinQuantum::ONE, SpinQuantum::HALF]),
            SiteList::qubits(4),
        ];
        for sites in cases {
            for ordering in OrderingSpec::all(sites.len()).into_iter().step_by(5) {
                let c = build_cross_chain(&sites, &ordering).unwrap();
                let cd = dense_cross_chain(&sites, &ordering);
                for (x, y) in c.components.components().into_iter().zip(cd.components()) {
                    assert!((x - y).max_abs() < 1e-12);
                }
                let d = build_dot_chain(&sites, &ordering).unwrap();
                assert!((&d.matrix - &dense_dot_chain(&sites, &ordering)).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ordering_validation_and_parsing() {
        assert!(OrderingSpec::new(vec![0, 0]).is_err());
        assert!(OrderingSpec::new(vec![0, 2]).is_err());
        assert_eq!(OrderingSpec::parse_one_based("3,4,2,1").unwrap().as_slice(), &[2, 3, 1, 0]);
        assert_eq!(OrderingSpec::parse_one_based("3421").unwrap().as_slice(), &[2, 3, 1, 0]);
        assert!(OrderingSpec::parse_one_based("0123").is_err());
        assert_eq!(OrderingSpec::all(4).len(), 24);
        assert_eq!(OrderingSpec::all(1).len(), 1);
    }

    #[test]
    fn cross_op_product_state_is_classical_cross() {
        // |up> on site 0 (<J> = z/2), |+x> on site 1 (<J> = x/2).
        let sites = SiteList::qubits(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = crate::linalg::kron_vec(&[ONE, ZERO], &[C64::new(s, 0.0), C64::new(s, 0.0)]);
        let j1 = site_spin(0, &sites).unwrap();
        let j2 = site_spin(1, &sites).unwrap();
        let c = cross_op(&j2, &j1).unwrap();
        let ev: Vec<f64> = c
            .components()
            .iter()
            .map(|m| crate::linalg::inner(&psi, &m.matvec(&psi)).re)
            .collect();
        // (x/2) x (z/2) = -y/4
        assert!((ev[0]).abs() < 1e-15 && (ev[1] + 0.25).abs() < 1e-15 && ev[2].abs() < 1e-15);
    }

    #[test]
    fn cross_op_antisymmetric_and_hermitian() {
        let sites = SiteList::new(vec![SpinQuantum::HALF, SpinQuantum::ONE]);
        let j1 = site_spin(0, &sites).unwrap();
        let j2 = site_spin(1, &sites).unwrap();
        let ab = cross_op(&j1, &j2).unwrap();
        let ba = cross_op(&j2, &j1).unwrap();
        for (x, y) in ab.components().into_iter().zip(ba.components()) {
            assert!((x + y).max_abs() < 1e-15);
            assert!(x.is_hermitian());
        }
    }

    #[test]
    fn cross_of_parallel_aligned_spins_vanishes() {
        let sites = SiteList::qubits(2);
        let c = cross_op(&site_spin(1, &sites).unwrap(), &site_spin(0, &sites).unwrap()).unwrap();
        let mut up_up = vec![ZERO; 4];
        up_up[0] = ONE;
        for m in c.components() {
            assert!(crate::linalg::inner(&up_up, &m.matvec(&up_up)).norm() < 1e-15);
        }
    }

    #[test]
    fn overlapping_supports_are_rejected() {
        let sites = SiteList::qubits(2);
        let j1 = site_spin(0, &sites).unwrap();
        assert!(matches!(cross_op(&j1, &j1), Err(Error::NonCommuting { .. })));
        assert!(matches!(dot_op(&j1, &j1), Err(Error::NonCommuting { .. })));
    }

    #[test]
    fn two_qubit_dot_spectrum() {
        let sites = SiteList::qubits(2);
        let d = build_dot_chain(&sites, &OrderingSpec::identity(2)).unwrap();
        let ev = eig_hermitian(&d.matrix).unwrap().eigenvalues;
        let expected = [-3.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        assert!((d.matrix[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_qutrit_dot_minimum() {
        // -(1 + 1/j2) with j1 = 1/2, j2 = 1.
        let sites = SiteList::new(vec![SpinQuantum::HALF, SpinQuantum::ONE]);
        let d = build_dot_chain(&sites, &OrderingSpec::identity(2)).unwrap();
        let ev = eigvals_hermitian(&d.matrix).unwrap();
        assert!((ev[0] + 2.0).abs() < 1e-12);
        assert!((ev.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_site_chains() {
        let sites = SiteList::uniform(1, SpinQuantum::ONE);
        let c = build_cross_chain(&sites, &OrderingSpec::identity(1)).unwrap();
        assert_eq!(c.components.z, ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]));
        let d = build_dot_chain(&sites, &OrderingSpec::identity(1)).unwrap();
        assert_eq!(d.matrix, ComplexMatrix::identity(3));
    }

    #[test]
    fn small_table_entries() {
        let cap = DEFAULT_DIM_CAP;
        let id = OrderingSpec::identity;
        assert!((max_violation_cross(&SiteList::qubits(2), &id(2), cap).unwrap() - 2.0).abs() < 1e-10);
        assert!((max_violation_cross(&SiteList::qubits(4), &id(4), cap).unwrap() - 2.0 * 6f64.sqrt()).abs() < 1e-10);
        let qutrits = |n| SiteList::uniform(n, SpinQuantum::ONE);
        assert!((max_violation_cross(&qutrits(2), &id(2), cap).unwrap() - SQRT2).abs() < 1e-10);
        assert!((max_violation_dot(&SiteList::qubits(3), &id(3), cap).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-10);
        assert!((max_violation_dot(&qutrits(3), &id(3), cap).unwrap() - 3f64.sqrt()).abs() < 1e-10);
        assert!((max_violation_dot(&qutrits(2), &id(2), cap).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let sites = SiteList::qubits(5);
        let err = max_violation_dot(&sites, &OrderingSpec::identity(5), 16).unwrap_err();
        assert!(matches!(err, Error::DimensionCap { dim: 32, cap: 16 }));
    }

    #[test]
    fn scalar_and_vector_covariance() {
        for n in 2..=4 {
            let sites = SiteList::qubits(n);
            let ordering = OrderingSpec::identity(n);
            let total = total_spin(&sites);
            let tc = total.components();
            let d = build_dot_chain(&sites, &ordering).unwrap();
            let c = build_cross_chain(&sites, &ordering).unwrap();
            let cc = c.components.components();
            for v in 0..3 {
                assert!(d.matrix.commutator(tc[v]).max_abs() < 1e-10);
                for u in 0..3 {
                    let mut rhs = ComplexMatrix::zeros(sites.total_dim());
                    for w in 0..3 {
                        rhs.add_scaled(cc[w], I * levi_civita(u, v, w));
                    }
                    assert!((&cc[u].commutator(tc[v]) - &rhs).max_abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn innermost_swap_negates_dot() {
        let sites = SiteList::new(vec![SpinQuantum::HALF, SpinQuantum::ONE, SpinQuantum::HALF]);
        let o = OrderingSpec::new(vec![1, 2, 0]).unwrap();
        let d = build_dot_chain(&sites, &o).unwrap();
        let ds = build_dot_chain(&sites, &o.swap_innermost()).unwrap();
        assert!((&d.matrix + &ds.matrix).max_abs() == 0.0);
    }

    #[test]
    fn witnesses_are_traceless() {
        let sites = SiteList::qubits(3);
        let d = build_dot_chain(&sites, &OrderingSpec::identity(3)).unwrap();
        assert!(d.matrix.trace().norm() <= 1e-8 * d.matrix.frobenius_norm());
        let c = build_cross_chain(&sites, &OrderingSpec::identity(3)).unwrap();
        for m in c.components.components() {
            assert!(m.trace().norm() <= 1e-8 * m.frobenius_norm());
        }
    }

    #[test]
    fn mk_base_case_and_chsh() {
        let one = SiteList::qubits(1);
        let s = MkSettings::new(vec![[0.0, 0.0, 1.0]], vec![[1.0, 0.0, 0.0]]).unwrap();
        let f = build_mk(&s, &one).unwrap();
        let ev = eigvals_hermitian(&f).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);

        let f2 = build_mk(&MkSettings::chsh_default(), &SiteList::qubits(2)).unwrap();
        let ev = eigvals_hermitian(&f2).unwrap();
        assert!((ev.last().unwrap() - SQRT2).abs() < 1e-12);
    }

    #[test]
    fn mk_rejects_non_qubits_and_bad_settings() {
        let sites = SiteList::new(vec![SpinQuantum::HALF, SpinQuantum::ONE]);
        assert!(matches!(build_mk(&MkSettings::chsh_default(), &sites), Err(Error::NonQubit)));
        assert!(MkSettings::new(vec![[1.0, 1.0, 0.0]], vec![[1.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn mk_coefficients_reproduce_dense_operator() {
        // F(N) = sum over setting choices of coef * (⊗ chosen observables).
        let settings = MkSettings::normalized(
            vec![[1.0, 0.2, 0.1], [0.3, 1.0, -0.2], [0.0, 0.4, 1.0]],
            vec![[-0.5, 1.0, 0.0], [1.0, 0.0, 0.7], [0.2, -1.0, 0.3]],
        )
        .unwrap();
        let sites = SiteList::qubits(3);
        let f = build_mk(&settings, &sites).unwrap();
        let coef = mk_coefficients(3);
        let mut g = ComplexMatrix::zeros(8);
        for (choice, &c) in coef.iter().enumerate() {
            let mut op = ComplexMatrix::identity(1);
            for k in 0..3 {
                let tilde = (choice >> (2 - k)) & 1 == 1;
                let v = if tilde { settings.a_tilde[k] } else { settings.a[k] };
                op = kron(&op, &pauli_projection(v));
            }
            g.add_scaled(&op, C64::new(c, 0.0));
        }
        assert!((&f - &g).max_abs() < 1e-14);
    }
}
