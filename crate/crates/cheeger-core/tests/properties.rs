//! Cross-module property tests: algebraic invariants, oracle equivalences and
//! the qualitative behavior of the deformation (non-negativity, dichotomy,
//! flat-torus persistence).

use cheeger_core::algebra::{chain_blocks, LieAlgebra, MetricOperator, Subspace};
use cheeger_core::analysis::{
    classify_record, fd_curvature, find_zero_planes, milnor_curvature, random_invariant_metric,
    SearchConfig,
};
use cheeger_core::engine::{
    apply_ct_inv, chain_metric, kappa_c, DeformationContext, PlaneClassTag,
};
use cheeger_core::geometry::{
    Backend, GeometryBackend, GroupBackend, Point, SphereBackend,
};
use nalgebra::{DMatrix, DVector, Vector3};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn e(dim: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 })
}

fn rand_vec(rng: &mut StdRng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| 2.0 * rng.random::<f64>() - 1.0)
}

fn rand_unit_sphere_point(rng: &mut StdRng) -> Point {
    loop {
        let p1 = Vector3::new(
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        );
        let p2 = Vector3::new(
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        );
        if p1.norm() < 0.1 || p2.norm() < 0.1 {
            continue;
        }
        let p1 = p1.normalize();
        let p2 = p2.normalize();
        if (p1 - p2).norm() < 1e-3 || (p1 + p2).norm() < 1e-3 {
            continue;
        }
        return Point::sphere([p1.x, p1.y, p1.z], [p2.x, p2.y, p2.z]).unwrap();
    }
}

fn rand_sphere_tangent(rng: &mut StdRng, p: &Point) -> DVector<f64> {
    let b = SphereBackend::new();
    let raw = DVector::from_fn(6, |_, _| 2.0 * rng.random::<f64>() - 1.0);
    match p {
        Point::Sphere(sp) => SphereBackend::project_tangent(sp, &raw),
        _ => b.action_field(p, &raw.rows(0, 3).clone_owned()),
    }
}

/// Subalgebra menu per builtin, as spanning sets.
fn subalgebra_menu(name: &str) -> Vec<DMatrix<f64>> {
    match name {
        "so3" => vec![DMatrix::identity(3, 3), DMatrix::from_columns(&[e(3, 2)])],
        "su3" => vec![
            DMatrix::identity(8, 8),
            DMatrix::from_columns(&[e(8, 0), e(8, 1), e(8, 2)]),
            DMatrix::from_columns(&[e(8, 2), e(8, 7)]),
            DMatrix::from_columns(&[e(8, 2)]),
        ],
        "so4" => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let ideal = DMatrix::from_columns(&[
                (e(6, 0) + e(6, 5)) * s,
                (e(6, 4) - e(6, 1)) * s,
                (e(6, 3) + e(6, 2)) * s,
            ]);
            vec![
                DMatrix::identity(6, 6),
                ideal,
                DMatrix::from_columns(&[e(6, 0), e(6, 5)]),
            ]
        }
        other => panic!("no menu for {other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_antisymmetry_and_jacobi(seed in 0u64..1000) {
        let mut rng = StdRng::seed_from_u64(seed);
        for name in ["so3", "su3", "so4"] {
            let alg = LieAlgebra::builtin(name).unwrap();
            let n = alg.dim();
            let x = rand_vec(&mut rng, n);
            let y = rand_vec(&mut rng, n);
            let z = rand_vec(&mut rng, n);
            let xy = alg.bracket(&x, &y).unwrap();
            let yx = alg.bracket(&y, &x).unwrap();
            prop_assert!((xy.clone() + yx).amax() < 1e-12);
            let j = alg.bracket(&xy, &z).unwrap()
                + alg.bracket(&alg.bracket(&y, &z).unwrap(), &x).unwrap()
                + alg.bracket(&alg.bracket(&z, &x).unwrap(), &y).unwrap();
            let scale = alg.q_norm(&x) * alg.q_norm(&y) * alg.q_norm(&z);
            prop_assert!(alg.q_norm(&j) <= 1e-10 * scale.max(1e-30));
        }
    }

    #[test]
    fn group_dw_antisymmetric_and_linear(seed in 0u64..1000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let alg = LieAlgebra::builtin("su3").unwrap();
        let k = Subspace::span(&alg, &DMatrix::from_columns(&[e(8, 0), e(8, 1), e(8, 2)])).unwrap();
        let phi = random_invariant_metric(&alg, &k, &mut rng).unwrap();
        let b = GroupBackend::new(&alg, k.basis(), &phi).unwrap();
        let v = rand_vec(&mut rng, 8);
        let w = rand_vec(&mut rng, 8);
        let z1 = rand_vec(&mut rng, 3);
        let z2 = rand_vec(&mut rng, 3);
        let p = Point::Group;
        prop_assert!((b.dw(&p, &z1, &v, &w) + b.dw(&p, &z1, &w, &v)).abs() < 1e-12);
        let lin = b.dw(&p, &(z1.clone() * 2.5 + &z2), &v, &w)
            - 2.5 * b.dw(&p, &z1, &v, &w)
            - b.dw(&p, &z2, &v, &w);
        prop_assert!(lin.abs() < 1e-12);
    }
}

#[test]
fn frame_p_matrix_reproduces_action_inner_products() {
    // 100 random pairs on both backends
    let mut rng = StdRng::seed_from_u64(100);
    let sphere = SphereBackend::new();
    for _ in 0..50 {
        let p = rand_unit_sphere_point(&mut rng);
        let frame = sphere.frame(&p).unwrap();
        for _ in 0..2 {
            let x = rand_vec(&mut rng, 3);
            let y = rand_vec(&mut rng, 3);
            let xm = frame.m_basis.transpose() * &x;
            let ym = frame.m_basis.transpose() * &y;
            let lhs = (xm.transpose() * &frame.p_matrix * ym)[0];
            let rhs = sphere
                .action_field(&p, &x)
                .dot(&sphere.action_field(&p, &y));
            assert!((lhs - rhs).abs() < 1e-10, "sphere frame P mismatch: {lhs} vs {rhs}");
        }
    }
    let alg = LieAlgebra::builtin("su3").unwrap();
    let k = Subspace::span(&alg, &DMatrix::from_columns(&[e(8, 0), e(8, 1), e(8, 2)])).unwrap();
    let phi = random_invariant_metric(&alg, &k, &mut rng).unwrap();
    let group = GroupBackend::new(&alg, k.basis(), &phi).unwrap();
    let frame = group.frame(&Point::Group).unwrap();
    for _ in 0..100 {
        let x = rand_vec(&mut rng, 3);
        let y = rand_vec(&mut rng, 3);
        let lhs = (x.transpose() * &frame.p_matrix * &y)[0];
        let xs = group.action_field(&Point::Group, &x);
        let ys = group.action_field(&Point::Group, &y);
        let rhs = group.metric0(&Point::Group, &xs, &ys);
        assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn group_dw_matches_trivialization_formula_on_all_slots() {
    // dw restricted per vertical/horizontal slots always equals
    // ½ Q(ΦZ, [x, y]) for an admissible metric
    let mut rng = StdRng::seed_from_u64(7);
    let alg = LieAlgebra::builtin("su3").unwrap();
    let kspan = DMatrix::from_columns(&[e(8, 0), e(8, 1), e(8, 2)]);
    let k = Subspace::span(&alg, &kspan).unwrap();
    let phi = random_invariant_metric(&alg, &k, &mut rng).unwrap();
    let b = GroupBackend::new(&alg, &kspan, &phi).unwrap();
    assert!(b.invariance_residual() < 1e-9);
    let frame = b.frame(&Point::Group).unwrap();
    let p = Point::Group;
    let triv = |z: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>| {
        let vw = alg.bracket(v, w).unwrap();
        0.5 * (b.phi() * b.subalgebra_basis() * z).dot(&vw)
    };
    for _ in 0..30 {
        let z = rand_vec(&mut rng, 3);
        // vertical-vertical: Prop 1.5(a) shape
        let xv = rand_vec(&mut rng, 3);
        let yv = rand_vec(&mut rng, 3);
        let xs = b.action_field(&p, &xv);
        let ys = b.action_field(&p, &yv);
        let lhs = b.dw(&p, &z, &xs, &ys);
        assert!((lhs - triv(&z, &xs, &ys)).abs() < 1e-12);
        // the P-dressed form of the vertical slot
        let pm = &frame.p_matrix;
        let m = frame.m_basis.clone();
        let px = b.subalgebra_basis() * (pm * (m.transpose() * &xv));
        let py = b.subalgebra_basis() * (pm * (m.transpose() * &yv));
        let xk = b.subalgebra_basis() * &xv;
        let yk = b.subalgebra_basis() * &yv;
        let rhs = alg.bracket(&px, &yk).unwrap() + alg.bracket(&xk, &py).unwrap()
            - b.subalgebra_basis() * (pm * (b.subalgebra_basis().transpose() * alg.bracket(&xk, &yk).unwrap()));
        let zk = b.subalgebra_basis() * &z;
        assert!((2.0 * lhs - alg.q_inner(&rhs, &zk)).abs() < 1e-11);
        // vertical-horizontal: vanishes (P is constant on the group)
        let h = frame.horizontal.column(0).clone_owned();
        let lhs = b.dw(&p, &z, &xs, &h);
        assert!(lhs.abs() < 1e-12);
        assert!((lhs - triv(&z, &xs, &h)).abs() < 1e-12);
        // horizontal-horizontal
        let h2 = frame.horizontal.column(1).clone_owned();
        let lhs = b.dw(&p, &z, &h, &h2);
        assert!((lhs - triv(&z, &h, &h2)).abs() < 1e-12);
    }
}

#[test]
fn moving_plane_nonnegativity() {
    // κ_c(t) ≥ -1e-10 across random points, planes and t ∈ (0, 10]
    let mut rng = StdRng::seed_from_u64(11);
    let sphere = SphereBackend::new();
    let mut checked = 0usize;
    while checked < 5000 {
        let p = rand_unit_sphere_point(&mut rng);
        let t = 10.0 * rng.random::<f64>().max(1e-3);
        let ctx = DeformationContext::new(&sphere, &p, t).unwrap();
        for _ in 0..5 {
            let v = rand_sphere_tangent(&mut rng, &p);
            let w = rand_sphere_tangent(&mut rng, &p);
            if let Ok(bd) = ctx.kappa(&v, &w) {
                assert!(bd.total >= -1e-10, "negative κ_c: {}", bd.total);
                checked += 1;
            }
        }
    }
    // group backend with a non-negatively curved chain metric
    let su3 = LieAlgebra::builtin("su3").unwrap();
    let chain = chain_blocks(
        &su3,
        &[
            DMatrix::from_columns(&[e(8, 2)]),
            DMatrix::from_columns(&[e(8, 0), e(8, 1), e(8, 2)]),
        ],
    )
    .unwrap();
    let op = chain_metric(&su3, &chain, &[0.7, 1.3]).unwrap();
    let b = GroupBackend::new(&su3, &DMatrix::from_columns(&[e(8, 2), e(8, 7)]), &op).unwrap();
    let mut checked = 0usize;
    while checked < 5000 {
        let t = 10.0 * rng.random::<f64>().max(1e-3);
        let ctx = DeformationContext::new(&b, &Point::Group, t).unwrap();
        for _ in 0..10 {
            let v = rand_vec(&mut rng, 8);
            let w = rand_vec(&mut rng, 8);
            if let Ok(bd) = ctx.kappa(&v, &w) {
                assert!(bd.total >= -1e-10, "negative κ_c: {}", bd.total);
                checked += 1;
            }
        }
    }
}

#[test]
fn group_oracle_equivalence_samples() {
    // κ_c at the moving plane equals the Koszul-frame curvature of Φ_t at
    // (C_t^{-1}V, C_t^{-1}W) for admissible random metrics
    let mut rng = StdRng::seed_from_u64(23);
    for name in ["so3", "su3", "so4"] {
        let alg = LieAlgebra::builtin(name).unwrap();
        let n = alg.dim();
        for kspan in subalgebra_menu(name) {
            let k = Subspace::span(&alg, &kspan).unwrap();
            let phi = random_invariant_metric(&alg, &k, &mut rng).unwrap();
            let b = GroupBackend::new(&alg, &kspan, &phi).unwrap();
            let frame = b.frame(&Point::Group).unwrap();
            for _ in 0..4 {
                let t = -0.2 + 3.0 * rng.random::<f64>();
                if t <= frame.t_min() + 0.05 {
                    continue;
                }
                let v = rand_vec(&mut rng, n);
                let w = rand_vec(&mut rng, n);
                let bd = match kappa_c(&b, &Point::Group, &v, &w, t) {
                    Ok(bd) => bd,
                    Err(_) => continue,
                };
                let ctx = DeformationContext::new(&b, &Point::Group, t).unwrap();
                let (vo, wo) =
                    cheeger_core::engine::orthonormalize_pair(&b, &Point::Group, &v, &w).unwrap();
                let a = apply_ct_inv(ctx.frame(), &vo, t).unwrap();
                let c = apply_ct_inv(ctx.frame(), &wo, t).unwrap();
                let phit = MetricOperator::new(&alg, b.phi_t(t).unwrap()).unwrap();
                let mk = milnor_curvature(&alg, &phit, &a, &c).unwrap();
                let rel = (bd.total - mk).abs() / mk.abs().max(1.0);
                assert!(rel <= 1e-9, "{name}: rel error {rel:.3e} at t={t}");
            }
        }
    }
}

#[test]
fn sphere_oracle_equivalence_samples() {
    let sphere = SphereBackend::new();
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..6 {
        let p = rand_unit_sphere_point(&mut rng);
        let frame = sphere.frame(&p).unwrap();
        let t = 0.2 + 2.0 * rng.random::<f64>();
        let v = rand_sphere_tangent(&mut rng, &p);
        let w = rand_sphere_tangent(&mut rng, &p);
        let bd = match kappa_c(&sphere, &p, &v, &w, t) {
            Ok(bd) => bd,
            Err(_) => continue,
        };
        let (vo, wo) =
            cheeger_core::engine::orthonormalize_pair(&sphere, &p, &v, &w).unwrap();
        let a = apply_ct_inv(&frame, &vo, t).unwrap();
        let c = apply_ct_inv(&frame, &wo, t).unwrap();
        let s = fd_curvature(&sphere, t, &p, &a, &c, 1e-3).unwrap();
        assert!(
            (bd.sec - s).abs() <= 5e-5,
            "sec {} vs fd {} (t = {t})",
            bd.sec,
            s
        );
    }
}

#[test]
fn dichotomy_never_mixed() {
    // planes with κ_0 = 0 and vanishing dw functional: either positive for
    // every sampled t > 0 or zero for every sampled t > 0
    let sphere = SphereBackend::new();
    let mut rng = StdRng::seed_from_u64(37);
    let ts = [0.1, 0.5, 1.0, 3.0, 10.0];
    for _ in 0..200 {
        let p = rand_unit_sphere_point(&mut rng);
        // mixed planes have κ_0 = 0 and dw ≡ 0 structurally
        let v1 = rand_sphere_tangent(&mut rng, &p);
        let mut v = DVector::zeros(6);
        v.rows_mut(0, 3).copy_from(&v1.rows(0, 3));
        let w2 = rand_sphere_tangent(&mut rng, &p);
        let mut w = DVector::zeros(6);
        w.rows_mut(3, 3).copy_from(&w2.rows(3, 3));
        if v.norm() < 1e-6 || w.norm() < 1e-6 {
            continue;
        }
        let mut signs = Vec::new();
        for &t in &ts {
            let bd = kappa_c(&sphere, &p, &v, &w, t).unwrap();
            signs.push(if bd.total > 1e-12 { 1 } else { 0 });
        }
        let all_pos = signs.iter().all(|&s| s == 1);
        let all_zero = signs.iter().all(|&s| s == 0);
        assert!(all_pos || all_zero, "mixed dichotomy signature: {signs:?}");
    }
}

#[test]
fn flat_torus_persistence() {
    // torus planes in su(3) with K = maximal torus stay flat up to t = 100
    let alg = LieAlgebra::builtin("su3").unwrap();
    let id = MetricOperator::identity(&alg);
    let kb = DMatrix::from_columns(&[e(8, 2), e(8, 7)]);
    let b = GroupBackend::new(&alg, &kb, &id).unwrap();
    let mut rng = StdRng::seed_from_u64(41);
    for _ in 0..20 {
        let c1 = rand_vec(&mut rng, 2);
        let c2 = rand_vec(&mut rng, 2);
        let v = e(8, 2) * c1[0] + e(8, 7) * c1[1];
        let w = e(8, 2) * c2[0] + e(8, 7) * c2[1];
        if (c1[0] * c2[1] - c1[1] * c2[0]).abs() < 1e-3 {
            continue;
        }
        for t in [0.1, 1.0, 10.0, 100.0] {
            let bd = kappa_c(&b, &Point::Group, &v, &w, t).unwrap();
            assert!(bd.total.abs() <= 1e-12, "t={t}: κ_c = {}", bd.total);
        }
    }
}

#[test]
fn inverse_linear_path_converges_to_biinvariant() {
    // single level k = g: the rescaled metric t·g_t has block coefficient
    // t/(1+t), approaching 1 at rate 1/(1+t)
    let alg = LieAlgebra::builtin("su3").unwrap();
    let chain = chain_blocks(&alg, &[DMatrix::identity(8, 8)]).unwrap();
    for t in [1e2, 1e4] {
        let op = chain_metric(&alg, &chain, &[t]).unwrap();
        let c = op.block_coeffs().unwrap()[0];
        let rescaled = t * c;
        assert!(((rescaled - 1.0).abs() - 1.0 / (1.0 + t)).abs() < 1e-12);
    }
}

#[test]
fn two_dimensional_orbit_projection_becomes_positive() {
    // any plane projecting 2-dimensionally onto the orbit directions is
    // positively curved for t ≥ 1
    let sphere = SphereBackend::new();
    let mut rng = StdRng::seed_from_u64(43);
    let mut checked = 0usize;
    while checked < 1000 {
        let p = rand_unit_sphere_point(&mut rng);
        let frame = sphere.frame(&p).unwrap();
        let v = rand_sphere_tangent(&mut rng, &p);
        let w = rand_sphere_tangent(&mut rng, &p);
        let (vo, wo) = match cheeger_core::engine::orthonormalize_pair(&sphere, &p, &v, &w) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let vm = frame.m_vector(&vo);
        let wm = frame.m_vector(&wo);
        let wedge = vm.dot(&vm) * wm.dot(&wm) - vm.dot(&wm).powi(2);
        if wedge < 1e-4 {
            continue; // projection not robustly 2-dimensional
        }
        for t in [1.0, 4.0, 10.0] {
            let bd = kappa_c(&sphere, &p, &vo, &wo, t).unwrap();
            assert!(bd.total > 0.0, "κ_c = {} at t = {t}", bd.total);
        }
        checked += 1;
    }
}

#[test]
fn zero_search_stability_across_seeds() {
    // doubling the multistarts never finds strictly more deduplicated planes
    let sphere = SphereBackend::new();
    let p = Point::sphere([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
    for seed in 0..10 {
        let base = SearchConfig { multistarts: 24, seed, ..Default::default() };
        let doubled = SearchConfig { multistarts: 48, seed, ..Default::default() };
        let a = find_zero_planes(&sphere, &p, 1.0, &base).unwrap();
        let b = find_zero_planes(&sphere, &p, 1.0, &doubled).unwrap();
        assert!(b.len() <= a.len().max(1), "seed {seed}: {} -> {}", a.len(), b.len());
        assert_eq!(b.len(), 1);
    }
}

#[test]
fn classifier_emits_no_contradictions() {
    let sphere = SphereBackend::new();
    let mut rng = StdRng::seed_from_u64(47);
    let backend = Backend::Sphere(sphere);
    for _ in 0..4 {
        let p = rand_unit_sphere_point(&mut rng);
        let cfg = SearchConfig { multistarts: 32, ..Default::default() };
        for rec in find_zero_planes(&backend, &p, 1.0, &cfg).unwrap() {
            let enriched = classify_record(&backend, &rec, 1.0).unwrap();
            let tags = enriched.subtags.unwrap();
            assert!(!tags.contradiction, "contradiction at {:?}", enriched.point);
        }
    }
    // the diagonal family as well
    let p = Point::sphere([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).unwrap();
    let cfg = SearchConfig { multistarts: 64, ..Default::default() };
    let records = find_zero_planes(&backend, &p, 1.0, &cfg).unwrap();
    assert!(records.len() >= 3, "diagonal family should yield several records");
    for rec in &records {
        assert_eq!(rec.class.tag, PlaneClassTag::FlatAllT);
        let enriched = classify_record(&backend, rec, 1.0).unwrap();
        assert!(!enriched.subtags.unwrap().contradiction);
    }
}
