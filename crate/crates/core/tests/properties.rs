use proptest::prelude::*;

use spinwitness::linalg::{eig_hermitian, expectation, kron, ComplexMatrix, C64, I};
use spinwitness::optimize::{optimize_frames, OptConfig, Witness};
use spinwitness::spin::{local_unitary, so3_rotation, spin_matrices, AxisAngle};
use spinwitness::states::{mix_white_noise, random_product, random_pure};
use spinwitness::witness::{
    build_cross_chain, build_dot_chain, cross_op, dot_op, cross_z_spectrum, dot_spectrum, DEFAULT_DIM_CAP,
};
use spinwitness::{OrderingSpec, PartitionSpec, SiteList, SpinQuantum, VectorOperator};

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim)
        .prop_map(|v| ComplexMatrix::from_row_major(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

fn sites(max_n: usize, max_two_j: u32, max_dim: usize) -> impl Strategy<Value = SiteList> {
    prop::collection::vec(1..=max_two_j, 2..=max_n)
        .prop_map(|v| SiteList::new(v.into_iter().map(SpinQuantum::from_two_j).collect()))
        .prop_filter("dimension", move |s| s.total_dim() <= max_dim)
}

fn with_ordering(s: SiteList) -> impl Strategy<Value = (SiteList, OrderingSpec)> {
    let n = s.len();
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(move |p| (s.clone(), OrderingSpec::new(p).unwrap()))
}

fn chain_sites(max_n: usize) -> impl Strategy<Value = (SiteList, OrderingSpec)> {
    sites(max_n, 3, 256).prop_flat_map(with_ordering)
}

fn angles() -> impl Strategy<Value = [f64; 3]> {
    [-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn kron_mixed_product(a in matrix(2), b in matrix(3), c in matrix(2), d in matrix(3)) {
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(h in (1usize..10).prop_flat_map(hermitian)) {
        let spec = eig_hermitian(&h).unwrap();
        prop_assert!((&spec.reconstruct() - &h).max_abs() < 1e-10);
        prop_assert!(spec.eigenvectors.is_unitary(1e-10));
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spin_algebra(two_j in 1u32..7) {
        let s = SpinQuantum::from_two_j(two_j);
        let m = spin_matrices(s);
        let comps = m.components();
        for (u, v, w) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let defect = (&comps[u].commutator(comps[v]) - &comps[w].scale(I)).max_abs();
            prop_assert!(defect < 1e-12);
        }
        let casimir = &(&m.x.matmul(&m.x) + &m.y.matmul(&m.y)) + &m.z.matmul(&m.z);
        let j = s.j();
        let expected = ComplexMatrix::identity(s.dim()).scale_real(j * (j + 1.0));
        prop_assert!((&casimir - &expected).max_abs() < 1e-12);
    }

    #[test]
    fn rotations_are_covariant(two_j in 1u32..5, alpha in angles()) {
        let s = SpinQuantum::from_two_j(two_j);
        let u = local_unitary(AxisAngle(alpha), s);
        prop_assert!(u.is_unitary(1e-10));
        let m = spin_matrices(s);
        let r = so3_rotation(AxisAngle(alpha));
        let comps = m.components();
        for a in 0..3 {
            let lhs = u.adjoint().matmul(comps[a]).matmul(&u);
            let mut rhs = ComplexMatrix::zeros(s.dim());
            for b in 0..3 {
                rhs.add_scaled(comps[b], C64::new(r[a][b], 0.0));
            }
            prop_assert!((&lhs - &rhs).max_abs() < 1e-9);
        }
    }

    #[test]
    fn product_states_respect_separable_bound((s, o) in chain_sites(4), seed in any::<u64>()) {
        let state = random_product(&s, seed);
        let d = build_dot_chain(&s, &o).unwrap();
        let c = build_cross_chain(&s, &o).unwrap();
        prop_assert!(expectation(&state, &d.matrix).unwrap().abs() <= 1.0 + 1e-10);
        let norm: f64 = c.components.components().iter()
            .map(|m| expectation(&state, m).unwrap().powi(2)).sum::<f64>().sqrt();
        prop_assert!(norm <= 1.0 + 1e-10);
    }

    #[test]
    fn symbolic_chain_matches_dense_products((s, o) in chain_sites(4)) {
        let n = s.len();
        let embedded: Vec<VectorOperator> =
            (0..n).map(|k| spinwitness::spin::site_spin(k, &s).unwrap()).collect();
        let perm = o.as_slice();
        let mut t = embedded[perm[0]].clone();
        for &k in &perm[1..n - 1] {
            t = cross_op(&embedded[k], &t).unwrap();
        }
        let last = &embedded[perm[n - 1]];
        let norm = 1.0 / s.j_product();
        let c = cross_op(last, &t).unwrap().map(|m| m.scale_real(norm));
        let d = dot_op(last, &t).unwrap().scale_real(norm);
        let built_c = build_cross_chain(&s, &o).unwrap();
        let built_d = build_dot_chain(&s, &o).unwrap();
        prop_assert!((&built_d.matrix - &d).max_abs() < 1e-12);
        for (a, b) in built_c.components.components().iter().zip(c.components()) {
            prop_assert!((*a - b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn innermost_swap_negates((s, o) in sites(4, 2, 81).prop_filter("three or more", |s| s.len() >= 3).prop_flat_map(with_ordering)) {
        let d = build_dot_chain(&s, &o).unwrap();
        let d_swapped = build_dot_chain(&s, &o.swap_innermost()).unwrap();
        prop_assert!((&d.matrix + &d_swapped.matrix).max_abs() < 1e-12);
        let c = build_cross_chain(&s, &o).unwrap();
        let c_swapped = build_cross_chain(&s, &o.swap_innermost()).unwrap();
        prop_assert!((&c.components.z + &c_swapped.components.z).max_abs() < 1e-12);
    }

    #[test]
    fn spectra_are_traceless_and_paired((s, o) in sites(4, 2, 81).prop_filter("three or more", |s| s.len() >= 3).prop_flat_map(with_ordering)) {
        for spec in [dot_spectrum(&s, &o, DEFAULT_DIM_CAP).unwrap(), cross_z_spectrum(&s, &o, DEFAULT_DIM_CAP).unwrap()] {
            prop_assert!(spinwitness::experiments::traceless_and_paired(&spec, 1e-8));
        }
    }

    #[test]
    fn white_noise_scales_witness((s, o) in chain_sites(3), seed in any::<u64>(), nu in 0.0..=1.0f64) {
        let psi = random_pure(&s, seed);
        let d = build_dot_chain(&s, &o).unwrap();
        let mixed = mix_white_noise(&psi, nu).unwrap();
        let rho = mixed.density();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let lhs = expectation(&mixed, &d.matrix).unwrap();
        let rhs = (1.0 - nu) * expectation(&psi, &d.matrix).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn ordering_text_round_trip(p in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let o = OrderingSpec::new(p).unwrap();
        prop_assert_eq!(OrderingSpec::parse_one_based(&o.to_one_based_string()).unwrap(), o);
    }

    #[test]
    fn partition_text_round_trip(labels in prop::collection::vec(0usize..3, 5)) {
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); 3];
        for (site, &b) in labels.iter().enumerate() {
            blocks[b].push(site);
        }
        blocks.retain(|b| !b.is_empty());
        let p = PartitionSpec::new(blocks, 5).unwrap();
        prop_assert_eq!(PartitionSpec::parse(&p.to_string(), 5).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn optimized_values_never_exceed_top_eigenvalue(seed in any::<u64>()) {
        let s = SiteList::qubits(3);
        let o = OrderingSpec::identity(3);
        let d = build_dot_chain(&s, &o).unwrap();
        let c = build_cross_chain(&s, &o).unwrap();
        let cfg = OptConfig { restarts: 4, seed, ..OptConfig::default() };
        let state = random_pure(&s, seed);
        let dv = optimize_frames(&state, Witness::Scalar(&d), &cfg).unwrap().value;
        let cv = optimize_frames(&state, Witness::Vector(&c), &cfg).unwrap().value;
        prop_assert!(dv <= 2.0 * 3f64.sqrt() + 1e-8);
        prop_assert!(cv <= 2.0 * 2f64.sqrt() + 1e-8);
    }
}
