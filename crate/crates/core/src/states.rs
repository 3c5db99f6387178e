//! Pure and mixed states over a [`SiteList`], plus the named states used to
//! probe the witnesses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::spin::SiteList;

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure { amplitudes: Vec<C64>, sites: SiteList },
    Mixed { rho: ComplexMatrix, sites: SiteList },
}

impl QuantumState {
    /// A pure state; the amplitudes must already be normalized.
    pub fn pure(sites: SiteList, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != sites.total_dim() {
            return Err(Error::DimensionMismatch { expected: sites.total_dim(), actual: amplitudes.len() });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
        }
        Ok(Self::Pure { amplitudes, sites })
    }

    /// A pure state from unnormalized amplitudes.
    pub fn pure_normalized(sites: SiteList, amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Self::pure(sites, amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// A density matrix: Hermitian, unit trace and positive semidefinite.
    pub fn mixed(sites: SiteList, rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != sites.total_dim() {
            return Err(Error::DimensionMismatch { expected: sites.total_dim(), actual: rho.dim() });
        }
        rho.ensure_hermitian()?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eigvals_hermitian(&rho)?.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(Self::Mixed { rho, sites })
    }

    pub fn sites(&self) -> &SiteList {
        match self {
            Self::Pure { sites, .. } | Self::Mixed { sites, .. } => sites,
        }
    }

    pub fn dim(&self) -> usize {
        self.sites().total_dim()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure { .. })
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match self {
            Self::Pure { amplitudes, .. } => Some(amplitudes),
            Self::Mixed { .. } => None,
        }
    }

    /// The density matrix, forming `|psi><psi|` for pure states.
    pub fn density(&self) -> ComplexMatrix {
        match self {
            Self::Pure { amplitudes, .. } => ComplexMatrix::outer(amplitudes, amplitudes),
            Self::Mixed { rho, .. } => rho.clone(),
        }
    }

    /// Explicit promotion to a density matrix.
    pub fn to_mixed(&self) -> Self {
        Self::Mixed { rho: self.density(), sites: self.sites().clone() }
    }
}

/// Disjoint blocks of site indices covering all sites. Sites in different
/// blocks are never entangled with each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    blocks: Vec<Vec<usize>>,
}

impl PartitionSpec {
    pub fn new(mut blocks: Vec<Vec<usize>>, n_sites: usize) -> Result<Self> {
        let mut seen = vec![false; n_sites];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &s in block.iter() {
                if s >= n_sites || seen[s] {
                    return Err(Error::InvalidPartition(format!("site {s} repeated or out of range")));
                }
                seen[s] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("site {missing} not covered")));
        }
        Ok(Self { blocks })
    }

    /// Parses 1-based notation such as `"12|34"` or `"1|2|3,4"`.
    pub fn parse(text: &str, n_sites: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in text.split('|') {
            let part = part.trim();
            let labels: Option<Vec<usize>> = if part.contains(',') {
                part.split(',').map(|t| t.trim().parse().ok()).collect()
            } else {
                part.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
            };
            let labels = labels.ok_or_else(|| Error::InvalidPartition(text.to_string()))?;
            if labels.contains(&0) {
                return Err(Error::InvalidPartition(format!("{text}: labels start at 1")));
            }
            blocks.push(labels.into_iter().map(|l| l - 1).collect());
        }
        Self::new(blocks, n_sites)
    }

    pub fn singletons(n: usize) -> Self {
        Self { blocks: (0..n).map(|k| vec![k]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        Self { blocks: vec![(0..n).collect()] }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n_sites(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn block_dim(&self, b: usize, sites: &SiteList) -> usize {
        self.blocks[b].iter().map(|&s| sites.site(s).dim()).product()
    }

    /// Number of real parameters `product_state` expects.
    pub fn param_len(&self, sites: &SiteList) -> usize {
        (0..self.blocks.len()).map(|b| 2 * self.block_dim(b, sites)).sum()
    }

    /// For every basis index of the full space, the index inside each block.
    pub(crate) fn block_indices(&self, sites: &SiteList) -> Vec<Vec<usize>> {
        let dims = sites.dims();
        (0..sites.total_dim())
            .map(|i| {
                let digits = sites.digits(i);
                self.blocks
                    .iter()
                    .map(|block| block.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]))
                    .collect()
            })
            .collect()
    }
}

impl std::fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let wide = self.n_sites() > 9;
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let labels: Vec<String> = b.iter().map(|s| (s + 1).to_string()).collect();
                labels.join(if wide { "," } else { "" })
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

fn basis_vector(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[k] = ONE;
    v
}

/// `(|up...up> + |down...down>) / sqrt2`.
pub fn ghz(n: usize) -> Result<QuantumState> {
    if n < 2 {
        return Err(Error::InvalidParameter("GHZ needs at least two qubits".into()));
    }
    let sites = SiteList::qubits(n);
    let d = sites.total_dim();
    let mut amps = vec![ZERO; d];
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = s;
    amps[d - 1] = s;
    QuantumState::pure(sites, amps)
}

/// `(|uud> + e^{i alpha}|udu> + e^{i beta}|duu>) / sqrt3`.
pub fn w3(alpha: f64, beta: f64) -> QuantumState {
    let sites = SiteList::qubits(3);
    let r = 1.0 / 3f64.sqrt();
    let mut amps = vec![ZERO; 8];
    // up = 0, down = 1, site 0 most significant
    amps[0b001] = C64::new(r, 0.0);
    amps[0b010] = C64::from_polar(r, alpha);
    amps[0b100] = C64::from_polar(r, beta);
    QuantumState::pure(sites, amps).expect("normalized by construction")
}

fn ket(pattern: &str) -> usize {
    pattern.chars().fold(0, |acc, c| acc * 2 + usize::from(c == 'd'))
}

fn from_pattern_terms(n: usize, terms: &[(f64, &str)], prefactor: f64) -> QuantumState {
    let sites = SiteList::qubits(n);
    let mut amps = vec![ZERO; sites.total_dim()];
    for &(c, p) in terms {
        amps[ket(p)] += C64::new(c * prefactor, 0.0);
    }
    QuantumState::pure(sites, amps).expect("coefficients are normalized")
}

/// Four-qubit total-spin-zero state maximizing `|<D(4)>|`.
pub fn psi4() -> QuantumState {
    let r3 = 3f64.sqrt();
    let terms = [
        (1.0 + r3, "uudd"),
        (1.0 + r3, "dduu"),
        (1.0 - r3, "dudu"),
        (1.0 - r3, "udud"),
        (-2.0, "duud"),
        (-2.0, "uddu"),
    ];
    from_pattern_terms(4, &terms, 1.0 / (2.0 * 6f64.sqrt()))
}

/// Four-qubit state maximizing `||<C(4)>||`.
pub fn phi4() -> QuantumState {
    let r6 = 6f64.sqrt();
    let terms = [
        (3.0, "uduu"),
        (-3.0, "dudd"),
        (r6, "uddu"),
        (r6, "duud"),
        (-r6, "udud"),
        (-r6, "dudu"),
        (1.0, "dddu"),
        (-1.0, "uuud"),
        (1.0, "ddud"),
        (-1.0, "uudu"),
        (1.0, "uddd"),
        (-1.0, "duuu"),
    ];
    from_pattern_terms(4, &terms, 1.0 / (4.0 * 3f64.sqrt()))
}

/// `rho_N = (|GHZ><GHZ| + 1/2 sum_n (P_n + P_n~)) / (N + 1)`, where `P_n`
/// projects onto the basis state with only qubit `n` down and `P_n~` onto its
/// global spin flip.
pub fn dur_state(n: usize) -> Result<QuantumState> {
    if n < 3 {
        return Err(Error::InvalidParameter("the bound-entangled family needs n >= 3".into()));
    }
    let sites = SiteList::qubits(n);
    let d = sites.total_dim();
    let g = ghz(n)?.density();
    let mut rho = g.scale_real(1.0 / (n as f64 + 1.0));
    let w = 0.5 / (n as f64 + 1.0);
    for k in 0..n {
        let flipped = 1usize << (n - 1 - k);
        for idx in [flipped, (d - 1) ^ flipped] {
            rho[(idx, idx)] += C64::new(w, 0.0);
        }
    }
    QuantumState::mixed(sites, rho)
}

/// `(1 - nu) rho + nu I / d`.
pub fn mix_white_noise(state: &QuantumState, nu: f64) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!("noise fraction {nu} outside [0, 1]")));
    }
    let d = state.dim();
    let mut rho = state.density().scale_real(1.0 - nu);
    rho.add_scaled(&ComplexMatrix::identity(d), C64::new(nu / d as f64, 0.0));
    Ok(QuantumState::Mixed { rho, sites: state.sites().clone() })
}

/// Normalized block vectors with the first non-zero amplitude made real and
/// non-negative.
pub(crate) fn block_vectors(partition: &PartitionSpec, sites: &SiteList, params: &[f64]) -> Result<Vec<Vec<C64>>> {
    if partition.n_sites() != sites.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} sites, state has {}",
            partition.n_sites(),
            sites.len()
        )));
    }
    let expected = partition.param_len(sites);
    if params.len() != expected {
        return Err(Error::DimensionMismatch { expected, actual: params.len() });
    }
    let mut out = Vec::with_capacity(partition.blocks().len());
    let mut offset = 0;
    for b in 0..partition.blocks().len() {
        let db = partition.block_dim(b, sites);
        let mut v: Vec<C64> = params[offset..offset + 2 * db].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        offset += 2 * db;
        let norm = vec_norm(&v);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(format!("block {b} has a zero vector")));
        }
        let lead = v.iter().copied().find(|z| *z != ZERO).expect("non-zero vector");
        let phase = lead.conj() / lead.norm();
        for z in &mut v {
            *z = *z * phase / norm;
        }
        out.push(v);
    }
    Ok(out)
}

/// Amplitudes of `⊗_b |v_b>` laid out in site order.
pub(crate) fn tensor_blocks(block_idx: &[Vec<usize>], vectors: &[Vec<C64>]) -> Vec<C64> {
    block_idx
        .iter()
        .map(|idx| idx.iter().zip(vectors).map(|(&i, v)| v[i]).product())
        .collect()
}

/// Tensor product of one pure state per block. `params` holds the real and
/// imaginary parts of each block vector, block after block.
pub fn product_state(partition: &PartitionSpec, sites: &SiteList, params: &[f64]) -> Result<QuantumState> {
    let vectors = block_vectors(partition, sites, params)?;
    let amps = tensor_blocks(&partition.block_indices(sites), &vectors);
    QuantumState::pure_normalized(sites.clone(), amps)
}

/// Transposes the indices of the sites in `block`.
pub fn partial_transpose(state: &QuantumState, block: &[usize]) -> Result<ComplexMatrix> {
    let QuantumState::Mixed { rho, sites } = state else {
        return Err(Error::InvalidState("partial transpose needs a density matrix; promote the pure state first".into()));
    };
    let n = sites.len();
    if block.is_empty() || block.len() >= n || block.iter().any(|&s| s >= n) {
        return Err(Error::InvalidPartition(format!("{block:?} is not a non-empty proper subset of the sites")));
    }
    let mut in_block = vec![false; n];
    for &s in block {
        in_block[s] = true;
    }
    let d = sites.total_dim();
    let digits: Vec<Vec<usize>> = (0..d).map(|i| sites.digits(i)).collect();
    Ok(ComplexMatrix::from_fn(d, |i, j| {
        let (di, dj) = (&digits[i], &digits[j]);
        let row: Vec<usize> = (0..n).map(|k| if in_block[k] { dj[k] } else { di[k] }).collect();
        let col: Vec<usize> = (0..n).map(|k| if in_block[k] { di[k] } else { dj[k] }).collect();
        rho[(sites.index_of(&row), sites.index_of(&col))]
    }))
}

/// Haar-random pure state from independent complex normal amplitudes.
pub fn random_pure(sites: &SiteList, seed: u64) -> QuantumState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<C64> = (0..sites.total_dim())
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    QuantumState::pure_normalized(sites.clone(), amps).expect("non-zero almost surely")
}

/// A random full product state (one random pure state per site).
pub fn random_product(sites: &SiteList, seed: u64) -> QuantumState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let partition = PartitionSpec::singletons(sites.len());
    let params: Vec<f64> = (0..partition.param_len(sites)).map(|_| StandardNormal.sample(&mut rng)).collect();
    product_state(&partition, sites, &params).expect("non-zero almost surely")
}

/// `|up>^N`.
pub fn all_up(sites: &SiteList) -> QuantumState {
    QuantumState::pure(sites.clone(), basis_vector(sites.total_dim(), 0)).expect("basis vector")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvals_hermitian, expectation, inner};
    use crate::spin::{total_spin, SpinQuantum};
    use crate::witness::{build_dot_chain, OrderingSpec};

    fn min_eig(m: &ComplexMatrix) -> f64 {
        eigvals_hermitian(m).unwrap()[0]
    }

    #[test]
    fn ghz_two_is_bell_state() {
        let g = ghz(2).unwrap();
        let a = g.amplitudes().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(a, &[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]);
        assert!(ghz(1).is_err());
    }

    #[test]
    fn w3_is_normalized_and_differs_from_ghz() {
        let g = ghz(3).unwrap();
        for k in 0..16 {
            let (a, b) = (0.4 * k as f64, 1.3 * k as f64);
            let w = w3(a, b);
            assert!((vec_norm(w.amplitudes().unwrap()) - 1.0).abs() < 1e-14);
            assert!(inner(w.amplitudes().unwrap(), g.amplitudes().unwrap()).norm() < 1.0 - 1e-6);
        }
    }

    #[test]
    fn explicit_states_are_normalized() {
        for s in [psi4(), phi4()] {
            assert!((vec_norm(s.amplitudes().unwrap()) - 1.0).abs() < 1e-14);
        }
        let p = psi4();
        let r3 = 3f64.sqrt();
        let pref = 1.0 / (2.0 * 6f64.sqrt());
        assert!((p.amplitudes().unwrap()[0b0011].re - (1.0 + r3) * pref).abs() < 1e-15);
        assert!((p.amplitudes().unwrap()[0b0110].re + 2.0 * pref).abs() < 1e-15);
    }

    #[test]
    fn psi4_is_a_singlet() {
        let p = psi4();
        let j = total_spin(p.sites());
        for m in j.components() {
            assert!(expectation(&p, m).unwrap().abs() < 1e-12);
        }
        let j2 = &(&j.x.matmul(&j.x) + &j.y.matmul(&j.y)) + &j.z.matmul(&j.z);
        assert!(expectation(&p, &j2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dur_state_weights_and_trace() {
        for n in 3..=6 {
            let rho = dur_state(n).unwrap().density();
            let d = 1 << n;
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            let w = 1.0 / (n as f64 + 1.0);
            assert!((rho[(0, 0)].re - 0.5 * w).abs() < 1e-15);
            assert!((rho[(0, d - 1)].re - 0.5 * w).abs() < 1e-15);
            assert!((rho[(1, 1)].re - 0.5 * w).abs() < 1e-15);
            assert!((rho[(d - 2, d - 2)].re - 0.5 * w).abs() < 1e-15);
            if n >= 4 {
                assert_eq!(rho[(3, 3)], ZERO);
            }
        }
        assert!(dur_state(2).is_err());
    }

    #[test]
    fn white_noise_limits() {
        let g = ghz(3).unwrap();
        let same = mix_white_noise(&g, 0.0).unwrap();
        assert!((&same.density() - &g.density()).max_abs() < 1e-15);
        let full = mix_white_noise(&g, 1.0).unwrap();
        assert!((&full.density() - &ComplexMatrix::identity(8).scale_real(0.125)).max_abs() < 1e-15);
        let d3 = build_dot_chain(g.sites(), &OrderingSpec::identity(3)).unwrap();
        assert!(expectation(&full, &d3.matrix).unwrap().abs() < 1e-12);
        assert!(mix_white_noise(&g, 1.5).is_err());
        assert!(mix_white_noise(&g, -0.1).is_err());
    }

    #[test]
    fn mixed_state_validation() {
        let sites = SiteList::qubits(1);
        assert!(QuantumState::mixed(sites.clone(), ComplexMatrix::identity(2)).is_err());
        let neg = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(QuantumState::mixed(sites.clone(), neg).is_err());
        assert!(QuantumState::mixed(sites, ComplexMatrix::identity(2).scale_real(0.5)).is_ok());
    }

    #[test]
    fn partition_parsing() {
        let p = PartitionSpec::parse("12|34", 4).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(p.to_string(), "12|34");
        assert!(PartitionSpec::parse("12|3", 4).is_err());
        assert!(PartitionSpec::parse("12|23|4", 4).is_err());
        assert_eq!(PartitionSpec::parse("1|2|3,4", 4).unwrap().blocks().len(), 3);
    }

    #[test]
    fn single_block_product_state_is_arbitrary_pure_state() {
        let sites = SiteList::qubits(2);
        let params = [0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0];
        let s = product_state(&PartitionSpec::whole(2), &sites, &params).unwrap();
        let a = s.amplitudes().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // leading non-zero amplitude made real and non-negative
        assert!((a[1].re - r).abs() < 1e-15 && (a[2].re + r).abs() < 1e-15);
    }

    #[test]
    fn product_state_errors() {
        let sites = SiteList::qubits(2);
        let p = PartitionSpec::singletons(2);
        assert!(product_state(&p, &sites, &[0.0; 8]).is_err());
        assert!(product_state(&p, &sites, &[1.0; 6]).is_err());
    }

    #[test]
    fn saturating_product_states() {
        // Spins chosen so each nested cross product stays maximal.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus_x = [r, 0.0, r, 0.0];
        let plus_y = [r, 0.0, 0.0, r];
        let up = [1.0, 0.0, 0.0, 0.0];
        let down = [0.0, 0.0, 1.0, 0.0];
        let cases: [&[[f64; 4]]; 3] = [&[up, up], &[plus_x, plus_y, down], &[plus_x, plus_y, plus_x, plus_y]];
        for spins in cases {
            let n = spins.len();
            let sites = SiteList::qubits(n);
            let params: Vec<f64> = spins.iter().flatten().copied().collect();
            let s = product_state(&PartitionSpec::singletons(n), &sites, &params).unwrap();
            let d = build_dot_chain(&sites, &OrderingSpec::identity(n)).unwrap();
            assert!((expectation(&s, &d.matrix).unwrap() - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn non_contiguous_blocks_place_sites_correctly() {
        let sites = SiteList::qubits(3);
        let p = PartitionSpec::parse("13|2", 3).unwrap();
        // block {1,3} in |ud>, site 2 in |d>  ->  |u d d>
        let params = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let s = product_state(&p, &sites, &params).unwrap();
        assert!((s.amplitudes().unwrap()[0b011].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_transpose_checks() {
        let sites = SiteList::qubits(2);
        let mut singlet = vec![ZERO; 4];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        singlet[1] = C64::new(r, 0.0);
        singlet[2] = C64::new(-r, 0.0);
        let s = QuantumState::pure(sites.clone(), singlet).unwrap();
        assert!(partial_transpose(&s, &[0]).is_err());
        let pt = partial_transpose(&s.to_mixed(), &[0]).unwrap();
        assert!(pt.is_hermitian());
        assert!((min_eig(&pt) + 0.5).abs() < 1e-12);
        assert!(partial_transpose(&s.to_mixed(), &[0, 1]).is_err());
        assert!(partial_transpose(&s.to_mixed(), &[]).is_err());

        let prod = random_product(&SiteList::new(vec![SpinQuantum::HALF, SpinQuantum::ONE]), 3).to_mixed();
        assert!(min_eig(&partial_transpose(&prod, &[1]).unwrap()) > -1e-12);
    }

    #[test]
    fn dur_state_is_ppt_on_single_site_cuts_but_not_two_two() {
        let rho = dur_state(4).unwrap();
        for k in 0..4 {
            assert!(min_eig(&partial_transpose(&rho, &[k]).unwrap()) >= -1e-10);
        }
        let neg = [[0, 1], [0, 2], [0, 3]]
            .iter()
            .map(|b| min_eig(&partial_transpose(&rho, b).unwrap()))
            .fold(f64::INFINITY, f64::min);
        assert!(neg < -1e-6);
    }

    #[test]
    fn random_pure_reproducible() {
        let sites = SiteList::qubits(3);
        let a = random_pure(&sites, 42);
        assert_eq!(a, random_pure(&sites, 42));
        assert!((vec_norm(a.amplitudes().unwrap()) - 1.0).abs() < 1e-12);
        for seed in 0..100u64 {
            let x = random_pure(&sites, seed);
            let y = random_pure(&sites, seed + 1000);
            assert!(inner(x.amplitudes().unwrap(), y.amplitudes().unwrap()).norm() < 1.0 - 1e-9);
        }
    }
}
