use multires::dynamics::{characteristic_flow, FlowParams, Gaussian};
use multires::periodized::{apply_with, build_with, AntiderivativeForm, BlochWeights, BuildOptions, Truncation};
use multires::spectra::{
    dense_eig_oracle, eig_recurrence_theta, eigenpair_residual, recurrence_d_theta, spectrum_closed_form,
};
use multires::*;
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn vector(max_n: u32) -> impl Strategy<Value = DyadicVector<f64>> {
    (0..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1usize << n)
            .prop_map(move |v| DyadicVector::new(n, v.into_iter().map(|(a, b)| C::new(a, b)).collect()).unwrap())
    })
}

fn vector_at(n: u32) -> impl Strategy<Value = DyadicVector<f64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1usize << n)
        .prop_map(move |v| DyadicVector::new(n, v.into_iter().map(|(a, b)| C::new(a, b)).collect()).unwrap())
}

fn tag() -> impl Strategy<Value = GateTag> {
    prop::sample::select(GateTag::ALL.to_vec())
}

fn kind() -> impl Strategy<Value = PeriodizedKind<f64>> {
    let plain = prop::sample::select(vec![
        PeriodizedKind::Cx,
        PeriodizedKind::Cy,
        PeriodizedKind::Cz,
        PeriodizedKind::CPlus,
        PeriodizedKind::CMinus,
        PeriodizedKind::L,
        PeriodizedKind::LT,
        PeriodizedKind::K,
        PeriodizedKind::PMinus,
        PeriodizedKind::PPlus,
        PeriodizedKind::V,
    ]);
    prop_oneof![
        plain,
        (-4.0..4.0f64).prop_map(PeriodizedKind::CTheta),
        (-4.0..4.0f64).prop_map(PeriodizedKind::CThetaCorrected),
        (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(a, b)| {
            PeriodizedKind::Bloch(BlochWeights::new(a.sin() * b.cos(), a.sin() * b.sin(), a.cos()).unwrap())
        }),
    ]
}

fn hermitian_kind(k: &PeriodizedKind<f64>) -> bool {
    !matches!(
        k,
        PeriodizedKind::CPlus
            | PeriodizedKind::CMinus
            | PeriodizedKind::L
            | PeriodizedKind::LT
            | PeriodizedKind::PMinus
            | PeriodizedKind::PPlus
    )
}

fn options() -> impl Strategy<Value = BuildOptions> {
    (any::<bool>(), any::<bool>()).prop_map(|(t, a)| BuildOptions {
        truncation: if t { Truncation::Projected } else { Truncation::Naive },
        antiderivative: if a { AntiderivativeForm::Galerkin } else { AntiderivativeForm::Appendix },
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_is_unitary(v in vector(10)) {
        let h = haar_forward(&v);
        prop_assert!((h.norm() - v.norm()).abs() < 1e-12);
        prop_assert!(haar_inverse(&h).max_abs_diff(&v).unwrap() < 1e-12);
    }

    #[test]
    fn coarse_haar_coefficient_is_mean(v in vector(8)) {
        let h = haar_forward(&v);
        let want = v.cell_values().iter().sum::<C>() / v.len() as f64;
        prop_assert!((h.coarse() - want).norm() < 1e-12);
    }

    #[test]
    fn embed_is_isometric_and_project_inverts_it(v in vector(6), extra in 0u32..4) {
        let m = v.resolution() + extra;
        let e = v.embed(m).unwrap();
        prop_assert!((e.norm() - v.norm()).abs() < 1e-12);
        prop_assert!(e.project(v.resolution()).unwrap().max_abs_diff(&v).unwrap() < 1e-12);
        let cells = e.cell_values();
        let coarse = v.cell_values();
        for (j, z) in cells.iter().enumerate() {
            prop_assert!((z - coarse[j >> extra]).norm() < 1e-12);
        }
    }

    #[test]
    fn haar_commutes_with_embedding(v in vector(6)) {
        let n = v.resolution();
        let fine = haar_forward(&v.embed(n + 1).unwrap());
        let coarse = haar_forward(&v);
        prop_assert!(multires::scalar::max_abs_diff(&fine.coeffs()[..1 << n], coarse.coeffs()) < 1e-12);
        prop_assert!(fine.coeffs()[1 << n..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn index_bits_round_trip(n in 0u32..20, seed in any::<u64>()) {
        let k = if n == 0 { 0 } else { (seed as usize) & ((1usize << n) - 1) };
        let b = index_to_bits(k, n).unwrap();
        prop_assert_eq!(b.len(), n as usize);
        prop_assert_eq!(bits_to_index(&b), k);
        let iv = DyadicInterval::new(n, k).unwrap();
        let (a, z): (f64, f64) = iv.endpoints();
        prop_assert!((z - a - iv.measure::<f64>()).abs() < 1e-15);
    }

    #[test]
    fn gate_action_equals_kronecker(v in vector_at(5), t in tag(), k in 1u32..=5) {
        let g = GateKind::new(t, k).unwrap();
        let fast = apply_gate(g, &v).unwrap();
        let dense = gate_matrix::<f64>(g, 5).unwrap().apply(&v).unwrap();
        prop_assert!(fast.max_abs_diff(&dense).unwrap() < 1e-13);
    }

    #[test]
    fn pauli_gates_are_unitary(v in vector_at(6), k in 1u32..=6) {
        for t in [GateTag::X, GateTag::Y, GateTag::Z] {
            let w = apply_gate(GateKind::new(t, k).unwrap(), &v).unwrap();
            prop_assert!((w.norm() - v.norm()).abs() < 1e-12);
            let back = apply_gate(GateKind::new(t, k).unwrap(), &w).unwrap();
            prop_assert!(back.max_abs_diff(&v).unwrap() < 1e-12);
        }
    }

    #[test]
    fn qft_equals_dft(v in vector(8)) {
        prop_assert!(qft_borel(&v).max_abs_diff(&dft_oracle(&v)).unwrap() < 1e-12);
    }

    #[test]
    fn antiderivative_is_skew_on_mean_zero(f in vector_at(7), g in vector_at(7)) {
        let center = |v: &DyadicVector<f64>| {
            let m = v.coeffs().iter().sum::<C>() / v.len() as f64;
            DyadicVector::new(v.resolution(), v.coeffs().iter().map(|z| z - m).collect()).unwrap()
        };
        let (f, g) = (center(&f), center(&g));
        let lf = apply_periodized(PeriodizedKind::L, &f).unwrap();
        let lg = apply_periodized(PeriodizedKind::L, &g).unwrap();
        prop_assert!((g.inner(&lf).unwrap() + lg.inner(&f).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn fast_apply_matches_matrix(k in kind(), opts in options(), v in vector_at(5)) {
        let m = build_with(k, 5, opts).unwrap();
        let want = m.apply(&v).unwrap();
        let got = apply_with(k, &v, opts).unwrap();
        prop_assert!(got.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn hermitian_kinds_are_hermitian(k in kind()) {
        let m = build_projected(k, 5).unwrap();
        if hermitian_kind(&k) {
            prop_assert!(m.is_hermitian(1e-14));
        }
    }

    #[test]
    fn projection_is_consistent_across_resolutions(k in kind(), n in 1u32..=4, extra in 1u32..=3) {
        // compressing the finer projection onto V_n gives the coarser one
        let m = n + extra;
        let fine = build_projected(k, m).unwrap();
        let coarse = build_projected(k, n).unwrap();
        for j in 0..1usize << n {
            let e = DyadicVector::basis(n, j).unwrap();
            let img = fine.apply(&e.embed(m).unwrap()).unwrap().project(n).unwrap();
            let want = coarse.apply(&e).unwrap();
            prop_assert!(img.max_abs_diff(&want).unwrap() < 1e-12, "{} n={} m={}", k, n, m);
        }
    }

    #[test]
    fn haar_conjugation_round_trip(k in kind()) {
        let m = build_projected(k, 4).unwrap();
        let back = conjugate_from_haar(&conjugate_to_haar(&m).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&m).unwrap() < 1e-13);
    }

    #[test]
    fn equator_spectrum_is_theta_independent(theta in -7.0..7.0f64, n in 1u32..=6) {
        let pairs = eig_recurrence_theta(n, theta, PhaseConvention::Derived).unwrap();
        let want = spectrum_closed_form::<f64>(n).unwrap();
        let d = recurrence_d_theta(n, theta, PhaseConvention::Derived);
        for (p, w) in pairs.iter().zip(&want) {
            prop_assert!((p.value.re - w).abs() < 1e-14);
            prop_assert!(eigenpair_residual(&d, p) < 1e-10);
        }
        let swapped = dense_eig_oracle(&recurrence_d_theta(n, theta, PhaseConvention::Conjugate)).unwrap();
        for (a, w) in swapped.values.iter().zip(&want) {
            prop_assert!((a.re - w).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_oracle_on_random_hermitian(entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)) {
        let a = CMatrix::<f64>::from_fn(8, 8, |i, j| C::new(entries[i * 8 + j].0, entries[i * 8 + j].1));
        let h = &a + a.adjoint();
        let e = dense_eig_oracle(&h).unwrap();
        prop_assert!(e.hermitian);
        let vecs = e.vectors.as_ref().unwrap();
        let gram = vecs.adjoint() * vecs;
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - C::new(want, 0.0)).norm() < 1e-9);
            }
        }
        let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(multires::spectra::max_residual(&h, &e).unwrap() < 1e-9 * scale);
        prop_assert!(e.values.windows(2).all(|w| w[0].re <= w[1].re));
    }

    #[test]
    fn tail_changes_cx_by_a_multiple_of_identity(n in 1u32..=6) {
        let naive = build_with(PeriodizedKind::<f64>::Cx, n, BuildOptions { truncation: Truncation::Naive, ..Default::default() }).unwrap();
        let full = build_projected(PeriodizedKind::<f64>::Cx, n).unwrap();
        let d = full.sub(&naive).unwrap();
        let h = 0.5f64.powi(n as i32);
        prop_assert!(d.max_abs_diff(&OperatorMatrix::identity(n, Basis::Scaling).scale(C::new(h, 0.0))).unwrap() < 1e-15);
    }

    #[test]
    fn flow_is_area_preserving_group(q in -3.0..3.0f64, p in -3.0..3.0f64, s in -5.0..5.0f64, t in -5.0..5.0f64, e in -1.0..1.0f64) {
        let fp = FlowParams::new(1.3, e).unwrap();
        let h = 1e-6;
        let (a, b) = characteristic_flow(q + h, p, t, &fp);
        let (c, d) = characteristic_flow(q - h, p, t, &fp);
        let (a2, b2) = characteristic_flow(q, p + h, t, &fp);
        let (c2, d2) = characteristic_flow(q, p - h, t, &fp);
        let det = ((a - c) * (b2 - d2) - (a2 - c2) * (b - d)) / (4.0 * h * h);
        prop_assert!((det - 1.0).abs() < 1e-8);
        let (x, y) = characteristic_flow(q, p, s, &fp);
        let (x1, y1) = characteristic_flow(x, y, t, &fp);
        let (x2, y2) = characteristic_flow(q, p, s + t, &fp);
        prop_assert!((x1 - x2).abs() < 1e-12 && (y1 - y2).abs() < 1e-12);
    }

    #[test]
    fn gaussian_moments_rotate_rigidly(t in -6.0..6.0f64, e in -1.0..1.0f64) {
        let fp = FlowParams::new(0.9, e).unwrap();
        let g = Gaussian::new((0.3, -0.7), [[0.6, 0.2], [0.2, 0.4]]).unwrap();
        let gt = g.evolve(t, &fp);
        let tr = |c: [[f64; 2]; 2]| c[0][0] + c[1][1];
        let det = |c: [[f64; 2]; 2]| c[0][0] * c[1][1] - c[0][1] * c[1][0];
        prop_assert!((tr(gt.cov) - tr(g.cov)).abs() < 1e-12);
        prop_assert!((det(gt.cov) - det(g.cov)).abs() < 1e-12);
        let (cq, _) = fp.center();
        let r0 = ((g.mean.0 - cq).powi(2) + g.mean.1.powi(2)).sqrt();
        let r1 = ((gt.mean.0 - cq).powi(2) + gt.mean.1.powi(2)).sqrt();
        prop_assert!((r0 - r1).abs() < 1e-12);
    }
}

#[test]
fn single_precision_pipeline() {
    let v = DyadicVectorF32::constant(6);
    let h = haar_forward(&v);
    assert!((h.coarse().re - 1.0).abs() < 1e-6);
    let m = build_projected(PeriodizedKind::<f32>::PMinus, 6).unwrap();
    assert!(m.apply(&v).unwrap().max_abs_diff(&v).unwrap() < 1e-5);
    let blocks = spectra::extract_blocks(&conjugate_to_haar(&m).unwrap()).unwrap();
    assert!(blocks.off_block_residual < 1e-5);
}
