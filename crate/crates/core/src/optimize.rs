//! Numerical maximization of witness violations.
//!
//! Three searches live here:
//!
//! - local frames: restarted Nelder-Mead over one rotation vector per site,
//!   for a fixed state ([`optimize_frames`]);
//! - Mermin-Klyshko settings: restarted Nelder-Mead over the polar angles of
//!   the `2N` measurement directions ([`optimize_mk_settings`]);
//! - partition bounds: restarted alternating ascent over block states of a
//!   partition-constrained product state ([`partition_bound`]). With every
//!   block but one fixed the objective is a quadratic form in the remaining
//!   block, maximized exactly by its top eigenvector.
//!
//! Every restart `i` draws its starting point from a generator seeded with
//! `seed + i`, so results are reproducible and adding restarts never lowers
//! the returned value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, inner, kron, trace_product, ComplexMatrix, C64, ZERO};
use crate::spin::{site_unitary, AxisAngle, SiteList, SpinQuantum};
use crate::states::{mix_white_noise, product_state, tensor_blocks, w3, PartitionSpec, QuantumState};
use crate::witness::{
    build_cross_chain, build_dot_chain, build_mk, max_violation_cross, max_violation_dot, mk_coefficients,
    pauli_projection, MkSettings, OrderingSpec, WitnessScalar, WitnessVector,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self { restarts: 64, max_iterations: 2000, tolerance: 1e-9, seed: 0 }
    }
}

impl OptConfig {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("at least one restart is required".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }

    fn rng(&self, restart: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(restart as u64))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    /// Best objective over all restarts.
    pub value: f64,
    /// Parameters that reproduce `value`.
    pub argument: Vec<f64>,
    pub restarts_used: usize,
    pub converged: bool,
    pub seed: u64,
}

/// A built witness of either kind.
#[derive(Clone, Copy, Debug)]
pub enum Witness<'a> {
    Scalar(&'a WitnessScalar),
    Vector(&'a WitnessVector),
}

impl Witness<'_> {
    pub fn sites(&self) -> &SiteList {
        match self {
            Witness::Scalar(w) => &w.sites,
            Witness::Vector(w) => &w.sites,
        }
    }

    fn dim(&self) -> usize {
        self.sites().total_dim()
    }

    /// `|<D>|` or `||<C>||` of a state given as weighted pure components.
    fn value(&self, parts: &[(f64, Vec<C64>)]) -> f64 {
        match self {
            Witness::Scalar(w) => weighted_expectation(&w.matrix, parts).abs(),
            Witness::Vector(w) => w
                .components
                .components()
                .iter()
                .map(|m| weighted_expectation(m, parts).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Which directed product a search uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Dot,
    Cross,
}

fn weighted_expectation(op: &ComplexMatrix, parts: &[(f64, Vec<C64>)]) -> f64 {
    parts.iter().map(|(p, v)| p * inner(v, &op.matvec(v)).re).sum()
}

/// Pure components `(weight, vector)` of a state. Mixed states are split into
/// their eigenvectors.
fn pure_components(state: &QuantumState) -> Result<Vec<(f64, Vec<C64>)>> {
    match state {
        QuantumState::Pure { amplitudes, .. } => Ok(vec![(1.0, amplitudes.clone())]),
        QuantumState::Mixed { rho, .. } => {
            let spec = eig_hermitian(rho)?;
            Ok(spec
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 1e-15)
                .map(|(k, &p)| (p, spec.eigenvector(k)))
                .collect())
        }
    }
}

/// Applies `u` to tensor factor `site` of `v` in place.
fn apply_local(v: &mut [C64], dims: &[usize], site: usize, u: &ComplexMatrix, scratch: &mut Vec<C64>) {
    let d = dims[site];
    let right: usize = dims[site + 1..].iter().product();
    let left = v.len() / (d * right);
    scratch.resize(d, ZERO);
    for l in 0..left {
        for r in 0..right {
            let base = l * d * right + r;
            for a in 0..d {
                scratch[a] = v[base + a * right];
            }
            for a in 0..d {
                let mut acc = ZERO;
                for b in 0..d {
                    acc += u[(a, b)] * scratch[b];
                }
                v[base + a * right] = acc;
            }
        }
    }
}

fn frames_from_params(params: &[f64], sites: &SiteList) -> Vec<ComplexMatrix> {
    sites
        .sites()
        .iter()
        .zip(params.chunks(3))
        .map(|(&s, a)| site_unitary(AxisAngle([a[0], a[1], a[2]]), s))
        .collect()
}

/// `(⊗_k U(alpha_k)) |v>` for every component.
fn rotate_components(parts: &[(f64, Vec<C64>)], frames: &[ComplexMatrix], dims: &[usize]) -> Vec<(f64, Vec<C64>)> {
    let mut scratch = Vec::new();
    parts
        .iter()
        .map(|(p, v)| {
            let mut w = v.clone();
            for (k, u) in frames.iter().enumerate() {
                apply_local(&mut w, dims, k, u, &mut scratch);
            }
            (*p, w)
        })
        .collect()
}

/// Witness value of `state` after the local rotations encoded in `params`
/// (three rotation-vector components per site).
pub fn frame_objective(state: &QuantumState, witness: Witness<'_>, params: &[f64]) -> Result<f64> {
    check_dims(state, witness.dim())?;
    let sites = state.sites();
    if params.len() != 3 * sites.len() {
        return Err(Error::DimensionMismatch { expected: 3 * sites.len(), actual: params.len() });
    }
    let parts = pure_components(state)?;
    let rotated = rotate_components(&parts, &frames_from_params(params, sites), &sites.dims());
    Ok(witness.value(&rotated))
}

fn check_dims(state: &QuantumState, dim: usize) -> Result<()> {
    if state.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: state.dim() });
    }
    Ok(())
}

/// Result of a single Nelder-Mead run (minimization).
#[derive(Clone, Debug)]
pub struct NmOutcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Nelder-Mead simplex minimization with standard coefficients. Converges
/// when the spread of function values across the simplex is below `tol`.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, max_iter: usize, tol: f64) -> NmOutcome {
    let n = x0.len();
    if n == 0 {
        return NmOutcome { x: vec![], fx: f(&[]), converged: true, iterations: 0 };
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut converged = false;
    let mut iterations = 0;
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    while iterations < max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if (values[worst] - values[best]).abs() <= tol {
            converged = true;
            break;
        }
        iterations += 1;
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64, simplex: &Vec<Vec<f64>>| -> Vec<f64> {
            centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (w - c)).collect()
        };
        let xr = along(-1.0, &simplex);
        let fr = f(&xr);
        if fr < values[best] {
            let xe = along(-2.0, &simplex);
            let fe = f(&xe);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
        } else if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
        } else {
            let (xc, fc) = if fr < values[worst] {
                let xc = along(-0.5, &simplex);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5, &simplex);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < values[worst].min(fr) {
                simplex[worst] = xc;
                values[worst] = fc;
            } else {
                let xb = simplex[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    for (x, b) in simplex[i].iter_mut().zip(&xb) {
                        *x = b + 0.5 * (*x - b);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    NmOutcome { x: simplex[best].clone(), fx: values[best], converged, iterations }
}

/// Nelder-Mead followed by fresh-simplex restarts from the best point until
/// a restart no longer improves the value; guards against simplex collapse.
fn polished_max(f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, cfg: &OptConfig) -> NmOutcome {
    let mut out = nelder_mead(|x| -f(x), x0, step, cfg.max_iterations, cfg.tolerance);
    for _ in 0..3 {
        let again = nelder_mead(|x| -f(x), &out.x, step * 0.1, cfg.max_iterations, cfg.tolerance);
        let improved = again.fx < out.fx - cfg.tolerance;
        if again.fx <= out.fx {
            out = NmOutcome { iterations: out.iterations + again.iterations, ..again };
        }
        if !improved {
            break;
        }
    }
    out.fx = -out.fx;
    out
}

/// Restarted maximization: `sample` draws each starting point.
fn multistart_max(
    cfg: &OptConfig,
    mut objective: impl FnMut(&[f64]) -> f64,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> Vec<f64>,
    step: f64,
) -> Result<OptResult> {
    cfg.validate()?;
    let mut best: Option<NmOutcome> = None;
    for r in 0..cfg.restarts {
        let mut rng = cfg.rng(r);
        let x0 = sample(&mut rng);
        let out = polished_max(&mut objective, &x0, step, cfg);
        if best.as_ref().is_none_or(|b| out.fx > b.fx) {
            best = Some(out);
        }
    }
    let best = best.expect("at least one restart");
    Ok(OptResult {
        value: objective(&best.x),
        argument: best.x,
        restarts_used: cfg.restarts,
        converged: best.converged,
        seed: cfg.seed,
    })
}

fn uniform_angles(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

/// Maximizes `|Tr(rho U^dagger D U)|` (scalar witness) or
/// `||Tr(rho U^dagger C U)||` (vector witness) over product rotations
/// `U = ⊗_k U(alpha_k)`. The returned argument holds the `alpha_k`.
pub fn optimize_frames(state: &QuantumState, witness: Witness<'_>, cfg: &OptConfig) -> Result<OptResult> {
    check_dims(state, witness.dim())?;
    let sites = state.sites().clone();
    let dims = sites.dims();
    let parts = pure_components(state)?;
    let n_params = 3 * sites.len();
    multistart_max(
        cfg,
        |p| witness.value(&rotate_components(&parts, &frames_from_params(p, &sites), &dims)),
        |rng| uniform_angles(rng, n_params),
        0.5,
    )
}

/// Correlation tensor `T[i_1..i_N] = <sigma_{i_1} ⊗ ... ⊗ sigma_{i_N}>` of an
/// N-qubit state, flattened with site 0 as the most significant index.
pub fn correlation_tensor(state: &QuantumState) -> Result<Vec<f64>> {
    let sites = state.sites();
    if !sites.all_qubits() {
        return Err(Error::NonQubit);
    }
    let n = sites.len();
    let paulis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].map(pauli_projection);
    let rho = state.density();
    let mut out = Vec::with_capacity(3usize.pow(n as u32));
    for idx in 0..3usize.pow(n as u32) {
        let mut op = ComplexMatrix::identity(1);
        let mut rest = idx;
        let mut axes = vec![0; n];
        for k in (0..n).rev() {
            axes[k] = rest % 3;
            rest /= 3;
        }
        for &a in &axes {
            op = kron(&op, &paulis[a]);
        }
        out.push(trace_product(&rho, &op).re);
    }
    Ok(out)
}

fn contract(tensor: &[f64], vectors: &[[f64; 3]]) -> f64 {
    let mut current = tensor.to_vec();
    for v in vectors.iter().rev() {
        current = current.chunks(3).map(|c| c[0] * v[0] + c[1] * v[1] + c[2] * v[2]).collect();
    }
    current[0]
}

/// `<F(N)>` from a correlation tensor, without building the operator.
pub fn mk_expectation(tensor: &[f64], settings: &MkSettings) -> f64 {
    let n = settings.len();
    let coef = mk_coefficients(n);
    let mut vectors = vec![[0.0; 3]; n];
    let mut total = 0.0;
    for (choice, &c) in coef.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (k, v) in vectors.iter_mut().enumerate() {
            let tilde = (choice >> (n - 1 - k)) & 1 == 1;
            *v = if tilde { settings.a_tilde[k] } else { settings.a[k] };
        }
        total += c * contract(tensor, &vectors);
    }
    total
}

/// Maximizes `<F(N)>` over measurement directions. The argument holds the
/// polar and azimuthal angles in the layout of [`MkSettings::from_angles`].
pub fn optimize_mk_settings(state: &QuantumState, cfg: &OptConfig) -> Result<OptResult> {
    let tensor = correlation_tensor(state)?;
    let n = state.sites().len();
    multistart_max(
        cfg,
        |p| mk_expectation(&tensor, &MkSettings::from_angles(p).expect("4N angles")),
        |rng| {
            (0..2 * n)
                .flat_map(|_| [rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)])
                .collect()
        },
        0.5,
    )
}

/// Alternating block ascent for `max <psi|M|psi>` over product states of a
/// partition. Returns the block vectors and the final value.
struct BlockAscent<'a> {
    partition: &'a PartitionSpec,
    sites: &'a SiteList,
    block_idx: Vec<Vec<usize>>,
    block_dims: Vec<usize>,
}

impl<'a> BlockAscent<'a> {
    fn new(partition: &'a PartitionSpec, sites: &'a SiteList) -> Result<Self> {
        if partition.n_sites() != sites.len() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} sites, witness has {}",
                partition.n_sites(),
                sites.len()
            )));
        }
        let block_dims = (0..partition.blocks().len()).map(|b| partition.block_dim(b, sites)).collect();
        Ok(Self { partition, sites, block_idx: partition.block_indices(sites), block_dims })
    }

    fn random_blocks(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
        self.block_dims
            .iter()
            .map(|&d| {
                let v: Vec<C64> =
                    (0..d).map(|_| C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))).collect();
                let n = crate::linalg::vec_norm(&v);
                v.into_iter().map(|z| z / n).collect()
            })
            .collect()
    }

    fn state(&self, blocks: &[Vec<C64>]) -> Vec<C64> {
        tensor_blocks(&self.block_idx, blocks)
    }

    /// Effective operator on block `b` with all other blocks contracted.
    fn effective(&self, op: &ComplexMatrix, blocks: &[Vec<C64>], b: usize) -> ComplexMatrix {
        let d = op.dim();
        let rest: Vec<C64> = self
            .block_idx
            .iter()
            .map(|idx| idx.iter().zip(blocks).enumerate().filter(|(c, _)| *c != b).map(|(_, (&i, v))| v[i]).product())
            .collect();
        let db = self.block_dims[b];
        let mut m = ComplexMatrix::zeros(db);
        for i in 0..d {
            if rest[i] == ZERO {
                continue;
            }
            let xi = self.block_idx[i][b];
            let wi = rest[i].conj();
            for j in 0..d {
                let mij = op[(i, j)];
                if mij == ZERO || rest[j] == ZERO {
                    continue;
                }
                m[(xi, self.block_idx[j][b])] += wi * mij * rest[j];
            }
        }
        m.symmetrized().0
    }

    /// One sweep of top-eigenvector updates over all blocks.
    fn sweep(&self, op: &ComplexMatrix, blocks: &mut [Vec<C64>]) -> Result<()> {
        for b in 0..blocks.len() {
            let m = self.effective(op, blocks, b);
            let spec = eig_hermitian(&m)?;
            blocks[b] = spec.eigenvector(m.dim() - 1);
        }
        Ok(())
    }

    fn params(&self, blocks: &[Vec<C64>]) -> Vec<f64> {
        blocks.iter().flat_map(|v| v.iter().flat_map(|z| [z.re, z.im])).collect()
    }

    fn n_params(&self) -> usize {
        self.partition.param_len(self.sites)
    }
}

fn expect_pure(op: &ComplexMatrix, psi: &[C64]) -> f64 {
    inner(psi, &op.matvec(psi)).re
}

/// Best value of `|<D>|` (scalar) or `||<C>||` (vector) found over product
/// states of `partition`. The argument holds `product_state` parameters.
///
/// The result is a lower bound on the true partition maximum.
pub fn partition_bound(witness: Witness<'_>, partition: &PartitionSpec, cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    let sites = witness.sites().clone();
    let ascent = BlockAscent::new(partition, &sites)?;
    // For the vector witness a common rotation of all sites keeps the product
    // structure and turns <C> towards +z, so maximizing <C_z> is enough.
    let signed_ops: Vec<ComplexMatrix> = match witness {
        Witness::Scalar(w) => vec![w.matrix.clone(), w.matrix.scale_real(-1.0)],
        Witness::Vector(w) => vec![w.components.z.clone()],
    };
    let evaluate = |params: &[f64]| -> Result<f64> {
        let s = product_state(partition, &sites, params)?;
        let amps = s.amplitudes().expect("pure");
        Ok(witness.value(&[(1.0, amps.to_vec())]))
    };

    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for r in 0..cfg.restarts {
        let mut rng = cfg.rng(r);
        let op = &signed_ops[r % signed_ops.len()];
        let mut blocks = ascent.random_blocks(&mut rng);
        let mut value = expect_pure(op, &ascent.state(&blocks));
        let mut converged = false;
        for _ in 0..cfg.max_iterations {
            ascent.sweep(op, &mut blocks)?;
            let next = expect_pure(op, &ascent.state(&blocks));
            let gain = next - value;
            value = next;
            if gain.abs() <= cfg.tolerance {
                converged = true;
                break;
            }
        }
        let params = ascent.params(&blocks);
        let v = evaluate(&params)?;
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, params, converged));
        }
    }
    let (value, argument, converged) = best.expect("at least one restart");
    debug_assert_eq!(argument.len(), ascent.n_params());
    Ok(OptResult { value, argument, restarts_used: cfg.restarts, converged, seed: cfg.seed })
}

/// `<F>` together with its gradient with respect to each setting vector.
fn mk_gradients(tensor: &[f64], settings: &MkSettings) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let n = settings.len();
    let mut ga = vec![[0.0; 3]; n];
    let mut gt = vec![[0.0; 3]; n];
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for k in 0..n {
        for (i, e) in basis.iter().enumerate() {
            let mut s = settings.clone();
            s.a[k] = *e;
            // <F> is linear in a[k]; subtracting the a[k] = 0 part isolates it.
            let mut zero = settings.clone();
            zero.a[k] = [0.0; 3];
            ga[k][i] = mk_expectation(tensor, &s) - mk_expectation(tensor, &zero);
            let mut s = settings.clone();
            s.a_tilde[k] = *e;
            let mut zero = settings.clone();
            zero.a_tilde[k] = [0.0; 3];
            gt[k][i] = mk_expectation(tensor, &s) - mk_expectation(tensor, &zero);
        }
    }
    (ga, gt)
}

fn normalize3(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 1e-300).then(|| v.map(|c| c / n))
}

/// Best `<F(N)>` found jointly over measurement settings and product states
/// of `partition`. The argument holds the `product_state` parameters followed
/// by the `a` and `a~` unit vectors of every site (six numbers per site).
pub fn partition_bound_mk(sites: &SiteList, partition: &PartitionSpec, cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    if !sites.all_qubits() {
        return Err(Error::NonQubit);
    }
    let ascent = BlockAscent::new(partition, sites)?;
    let n = sites.len();
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for r in 0..cfg.restarts {
        let mut rng = cfg.rng(r);
        let mut blocks = ascent.random_blocks(&mut rng);
        let random_dir = |rng: &mut ChaCha8Rng| {
            normalize3([0; 3].map(|_| StandardNormal.sample(&mut *rng))).unwrap_or([0.0, 0.0, 1.0])
        };
        let mut settings = MkSettings {
            a: (0..n).map(|_| random_dir(&mut rng)).collect(),
            a_tilde: (0..n).map(|_| random_dir(&mut rng)).collect(),
        };
        let mut value = f64::NEG_INFINITY;
        let mut converged = false;
        for _ in 0..cfg.max_iterations {
            let f = build_mk(&settings, sites)?;
            ascent.sweep(&f, &mut blocks)?;
            let state = QuantumState::pure_normalized(sites.clone(), ascent.state(&blocks))?;
            let tensor = correlation_tensor(&state)?;
            for k in 0..n {
                let (ga, _) = mk_gradients(&tensor, &settings);
                if let Some(v) = normalize3(ga[k]) {
                    settings.a[k] = v;
                }
                let (_, gt) = mk_gradients(&tensor, &settings);
                if let Some(v) = normalize3(gt[k]) {
                    settings.a_tilde[k] = v;
                }
            }
            let next = mk_expectation(&tensor, &settings);
            let gain = next - value;
            value = next;
            if gain.abs() <= cfg.tolerance {
                converged = true;
                break;
            }
        }
        let mut argument = ascent.params(&blocks);
        for k in 0..n {
            argument.extend(settings.a[k]);
        }
        for k in 0..n {
            argument.extend(settings.a_tilde[k]);
        }
        let v = mk_partition_objective(sites, partition, &argument)?;
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, argument, converged));
        }
    }
    let (value, argument, converged) = best.expect("at least one restart");
    Ok(OptResult { value, argument, restarts_used: cfg.restarts, converged, seed: cfg.seed })
}

/// Re-evaluates a [`partition_bound_mk`] argument.
pub fn mk_partition_objective(sites: &SiteList, partition: &PartitionSpec, argument: &[f64]) -> Result<f64> {
    let n = sites.len();
    let n_state = partition.param_len(sites);
    if argument.len() != n_state + 6 * n {
        return Err(Error::DimensionMismatch { expected: n_state + 6 * n, actual: argument.len() });
    }
    let state = product_state(partition, sites, &argument[..n_state])?;
    let vecs: Vec<[f64; 3]> = argument[n_state..].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    let settings = MkSettings::normalized(vecs[..n].to_vec(), vecs[n..].to_vec())?;
    Ok(mk_expectation(&correlation_tensor(&state)?, &settings))
}

/// Per-ordering partition bounds and their maximum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderingSweep {
    pub per_ordering: Vec<(Vec<usize>, OptResult)>,
    pub best_ordering: Vec<usize>,
    pub best: OptResult,
}

/// Runs [`partition_bound`] for each ordering (all `N!` when `orderings` is
/// `None`) and reports every result plus the overall maximum.
pub fn partition_bound_sweep(
    kind: WitnessKind,
    sites: &SiteList,
    partition: &PartitionSpec,
    orderings: Option<Vec<OrderingSpec>>,
    cfg: &OptConfig,
) -> Result<OrderingSweep> {
    let orderings = orderings.unwrap_or_else(|| OrderingSpec::all(sites.len()));
    let mut per_ordering = Vec::with_capacity(orderings.len());
    for ordering in orderings {
        let result = match kind {
            WitnessKind::Dot => partition_bound(Witness::Scalar(&build_dot_chain(sites, &ordering)?), partition, cfg)?,
            WitnessKind::Cross => {
                partition_bound(Witness::Vector(&build_cross_chain(sites, &ordering)?), partition, cfg)?
            }
        };
        per_ordering.push((ordering.as_slice().to_vec(), result));
    }
    let (best_ordering, best) = per_ordering
        .iter()
        .fold(None::<&(Vec<usize>, OptResult)>, |acc, item| match acc {
            Some(a) if a.1.value >= item.1.value => Some(a),
            _ => Some(item),
        })
        .cloned()
        .ok_or_else(|| Error::InvalidOrdering("no orderings supplied".into()))?;
    Ok(OrderingSweep { per_ordering, best_ordering, best })
}

/// What a noise threshold is measured against.
#[derive(Clone, Copy, Debug)]
pub enum ThresholdWitness<'a> {
    Frames(Witness<'a>),
    Mk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseThreshold {
    /// Largest white-noise fraction that still violates the separable bound.
    pub nu: f64,
    /// `1 - 1/V` for the optimized noiseless violation `V`.
    pub analytic: f64,
    pub pure_violation: f64,
    /// `true` when the noiseless state never exceeds the bound.
    pub never_violates: bool,
    /// Bisection and analytic values agree within [`THRESHOLD_AGREEMENT`].
    pub consistent: bool,
}

pub const THRESHOLD_AGREEMENT: f64 = 5e-3;
const BISECTION_STEPS: usize = 20;

fn optimized_violation(state: &QuantumState, witness: ThresholdWitness<'_>, cfg: &OptConfig) -> Result<f64> {
    Ok(match witness {
        ThresholdWitness::Frames(w) => optimize_frames(state, w, cfg)?.value,
        ThresholdWitness::Mk => optimize_mk_settings(state, cfg)?.value,
    })
}

/// Bisects on `nu` for the point where the optimized violation of
/// `(1 - nu)|psi><psi| + nu I/d` drops to the separable bound 1.
pub fn noise_threshold(state: &QuantumState, witness: ThresholdWitness<'_>, cfg: &OptConfig) -> Result<NoiseThreshold> {
    if !state.is_pure() {
        return Err(Error::InvalidState("noise threshold expects a pure input state".into()));
    }
    let pure_violation = optimized_violation(state, witness, cfg)?;
    if pure_violation <= 1.0 {
        return Ok(NoiseThreshold {
            nu: 0.0,
            analytic: 0.0,
            pure_violation,
            never_violates: true,
            consistent: true,
        });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let v = optimized_violation(&mix_white_noise(state, mid)?, witness, cfg)?;
        if v > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu = 0.5 * (lo + hi);
    let analytic = 1.0 - 1.0 / pure_violation;
    Ok(NoiseThreshold {
        nu,
        analytic,
        pure_violation,
        never_violates: false,
        consistent: (nu - analytic).abs() <= THRESHOLD_AGREEMENT,
    })
}

/// Ratios `R(N) = Max(N) / Max(N-1)` of successive maximal violations for
/// `N = 2..=max_n`, taking `Max(1) = 1` for both witnesses.
pub fn ratio_curve(max_n: usize, spin: SpinQuantum, kind: WitnessKind, dim_cap: usize) -> Result<Vec<(usize, f64)>> {
    if max_n < 2 {
        return Err(Error::InvalidParameter("ratio curve needs max_n >= 2".into()));
    }
    let mut prev = 1.0;
    let mut out = Vec::new();
    for n in 2..=max_n {
        let sites = SiteList::uniform(n, spin);
        let ordering = OrderingSpec::identity(n);
        let max = match kind {
            WitnessKind::Dot => max_violation_dot(&sites, &ordering, dim_cap)?,
            WitnessKind::Cross => max_violation_cross(&sites, &ordering, dim_cap)?,
        };
        out.push((n, max / prev));
        prev = max;
    }
    Ok(out)
}

/// Ratio of successive maximal Mermin-Klyshko violations.
pub const MK_RATIO: f64 = std::f64::consts::SQRT_2;

/// Optimized cross and dot values for one state with a shared ordering.
pub fn verify_cross_le_dot(state: &QuantumState, ordering: &OrderingSpec, cfg: &OptConfig) -> Result<(f64, f64)> {
    let sites = state.sites();
    let c = build_cross_chain(sites, ordering)?;
    let d = build_dot_chain(sites, ordering)?;
    let c_max = optimize_frames(state, Witness::Vector(&c), cfg)?.value;
    let d_max = optimize_frames(state, Witness::Scalar(&d), cfg)?.value;
    Ok((c_max, d_max))
}

/// Phases `(alpha, beta)` making the W state an extremal eigenvector of
/// `D(3)` in the fixed frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct W3Phases {
    pub alpha: f64,
    pub beta: f64,
    pub value: f64,
}

const W3_GRID: usize = 64;

/// Grid scan over `(alpha, beta)` followed by Nelder-Mead refinement of
/// `|<W3(alpha, beta)|D(3)|W3(alpha, beta)>|` with the identity ordering.
pub fn find_w3_eigen_phases(cfg: &OptConfig) -> Result<W3Phases> {
    let d3 = build_dot_chain(&SiteList::qubits(3), &OrderingSpec::identity(3))?;
    let value = |a: f64, b: f64| {
        let w = w3(a, b);
        expect_pure(&d3.matrix, w.amplitudes().expect("pure")).abs()
    };
    let tau = std::f64::consts::TAU;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..W3_GRID {
        for j in 0..W3_GRID {
            let (a, b) = (tau * i as f64 / W3_GRID as f64, tau * j as f64 / W3_GRID as f64);
            let v = value(a, b);
            if v > best.2 {
                best = (a, b, v);
            }
        }
    }
    let refined = polished_max(&mut |p: &[f64]| value(p[0], p[1]), &[best.0, best.1], tau / W3_GRID as f64, cfg);
    let (alpha, beta) = (refined.x[0].rem_euclid(tau), refined.x[1].rem_euclid(tau));
    Ok(W3Phases { alpha, beta, value: value(alpha, beta) })
}

/// The best W state found by [`find_w3_eigen_phases`].
pub fn w3_eigen_state(cfg: &OptConfig) -> Result<QuantumState> {
    let p = find_w3_eigen_phases(cfg)?;
    Ok(w3(p.alpha, p.beta))
}
