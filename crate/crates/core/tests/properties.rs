use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pdm_spectra::discretize::{
    build_eta_matrix, build_ordered_kinetic, build_reference_matrix, build_target_matrix,
    matched_domains, uniform_x_grid, Grid, GridKind,
};
use pdm_spectra::eigen::{brute_oracle_small, eig, match_multisets, VectorSelection};
use pdm_spectra::linalg::CMatrix;
use pdm_spectra::model::{
    delta_of, ordering_preset, CustomGenerator, Generator, MassProfile, ModelSpec, OrderingPreset,
};
use pdm_spectra::transform::{
    closed_form_reference, ordering_potential, potential_decomposition, reference_potential,
    target_closed_form, target_potential, LiouvilleMap,
};
use pdm_spectra::verify::{
    random_matrix, samsonov_roy_levels, scarf2_levels, solve_picture, Picture, BOUND_IM_TOL,
};

const SOLVABLE: [OrderingPreset; 4] = [
    OrderingPreset::GoraWilliams,
    OrderingPreset::ZhuKroemer,
    OrderingPreset::LiKuhn,
    OrderingPreset::MustafaMazharimousavi,
];

fn solvable() -> impl Strategy<Value = OrderingPreset> {
    prop::sample::select(SOLVABLE.to_vec())
}

fn builtin_generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (0.3f64..6.0).prop_map(|v2| Generator::scarf2(v2).unwrap()),
        Just(Generator::SamsonovRoy),
        (-3.0f64..3.0).prop_map(|a| Generator::Morse { a }),
    ]
}

fn frob(m: &CMatrix) -> f64 {
    m.frobenius_norm()
}

/// Points with `c1 x + c2` spread over `[0.2, 8]`.
fn domain_points(profile: &MassProfile, count: usize) -> Vec<f64> {
    let (c1, c2) = match *profile {
        MassProfile::PowerLaw { c1, c2, .. } => (c1, c2),
        MassProfile::Constant => (1.0, 0.0),
    };
    (0..count)
        .map(|i| {
            let s = 0.2 + 7.8 * i as f64 / (count - 1) as f64;
            (s - c2) / c1
        })
        .collect()
}

#[test]
fn presets_satisfy_constraint_and_delta_table() {
    let minus_one = Rational64::from_integer(-1);
    for p in OrderingPreset::ALL {
        let o = ordering_preset(p);
        assert_eq!(o.alpha() + o.beta() + o.gamma(), minus_one, "{p}");
    }
    let expect = [
        (OrderingPreset::GoraWilliams, Rational64::from_integer(1)),
        (OrderingPreset::ZhuKroemer, Rational64::from_integer(0)),
        (OrderingPreset::LiKuhn, Rational64::from_integer(1)),
        (OrderingPreset::MustafaMazharimousavi, Rational64::new(1, 2)),
    ];
    for (p, d) in expect {
        assert_eq!(delta_of(&ordering_preset(p)).unwrap(), d, "{p}");
    }
    assert!(delta_of(&ordering_preset(OrderingPreset::BenDanielDuke)).is_err());
}

proptest! {
    #[test]
    fn mass_relation_is_constant(
        c1 in prop_oneof![0.2f64..4.0, -4.0f64..-0.2],
        c2 in -3.0f64..3.0,
        delta in prop_oneof![Just(0.0), Just(0.5), Just(1.0), -0.9f64..3.0],
    ) {
        let profile = MassProfile::power_law(c1, c2, delta).unwrap();
        let values: Vec<f64> = domain_points(&profile, 100)
            .into_iter()
            .map(|x| {
                let p = profile.eval(x).unwrap();
                p.mu1 * p.mu.powf(delta)
            })
            .collect();
        let first = values[0];
        for v in values {
            prop_assert!(((v - first) / first).abs() <= 1e-12, "{v} vs {first}");
        }
    }

    #[test]
    fn generator_derivative_is_second_order(gen in builtin_generator(), q0 in -3.0f64..3.0) {
        let err = |h: f64| -> f64 {
            (0..20)
                .map(|i| {
                    let q = q0 + 0.1 * i as f64;
                    let fd = (gen.eval(q + h).0 - gen.eval(q - h).0) / (2.0 * h);
                    (fd - gen.eval(q).1).abs()
                })
                .sum()
        };
        let (coarse, fine) = (err(2e-2), err(1e-2));
        prop_assume!(coarse > 1e-9);
        prop_assert!(coarse / fine >= 3.5, "ratio {}", coarse / fine);
    }

    #[test]
    fn map_round_trip(
        c1 in 0.3f64..3.0,
        c2 in 0.0f64..3.0,
        delta in prop_oneof![Just(0.0), Just(0.5), Just(1.0), 0.1f64..2.0],
    ) {
        let map = LiouvilleMap::new(MassProfile::power_law(c1, c2, delta).unwrap());
        for x in domain_points(&map.profile, 100) {
            let back = map.x_of_q(map.q_of_x(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * (1.0 + x.abs()), "{x} -> {back}");
        }
    }

    #[test]
    fn map_derivative_is_inverse_mu(
        c1 in 0.3f64..3.0,
        c2 in 0.0f64..3.0,
        delta in prop_oneof![Just(0.0), Just(0.5), Just(1.0)],
    ) {
        let map = LiouvilleMap::new(MassProfile::power_law(c1, c2, delta).unwrap());
        let err = |h: f64| -> f64 {
            domain_points(&map.profile, 100)[1..99]
                .iter()
                .map(|&x| {
                    let fd = (map.q_of_x(x + h).unwrap() - map.q_of_x(x - h).unwrap()) / (2.0 * h);
                    (fd - 1.0 / map.profile.eval(x).unwrap().mu).abs()
                })
                .fold(0.0, f64::max)
        };
        let h = 1e-3 / c1;
        let (coarse, fine) = (err(h), err(h / 2.0));
        prop_assert!(coarse < 1e-4);
        prop_assert!(coarse / fine >= 3.5, "ratio {}", coarse / fine);
    }

    #[test]
    fn scarf_reference_closed_form(v2 in 0.1f64..8.0, q in -5.0f64..5.0) {
        let g = Generator::scarf2(v2).unwrap();
        let d = reference_potential(&g, 0.0, q) - closed_form_reference(&g, q).unwrap();
        prop_assert!(d.norm() <= 1e-12 * (1.0 + v2 * v2));
    }

    #[test]
    fn samsonov_roy_reference_closed_form(q in -PI..PI) {
        let g = Generator::SamsonovRoy;
        let d = reference_potential(&g, 0.0, q) - closed_form_reference(&g, q).unwrap();
        prop_assert!(d.norm() <= 1e-12);
    }

    #[test]
    fn target_is_pulled_back_reference(
        gen in builtin_generator(),
        preset in solvable(),
        c1 in 0.5f64..2.0,
        c2 in 0.0f64..3.0,
        alpha0 in -1.0f64..1.0,
        t in 0.05f64..0.95,
    ) {
        let ordering = ordering_preset(preset);
        let profile = MassProfile::from_ordering(&ordering, c1, c2).unwrap();
        let spec = ModelSpec::with_auto_offset(gen, ordering, profile, alpha0, (-2.0, 2.0)).unwrap();
        let (xa, xb) = spec.x_interval().unwrap();
        let x = xa + t * (xb - xa);
        let q = spec.map().q_of_x(x).unwrap();
        let expected = reference_potential(&spec.generator, alpha0, q);
        prop_assert!((target_potential(&spec, x).unwrap() - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        let d = potential_decomposition(&spec, x).unwrap();
        let pt = spec.profile.eval(x).unwrap();
        let triangle = d.v + ordering_potential(&spec.ordering, &pt) - d.vtilde;
        prop_assert!(triangle.abs() <= 1e-10 * (1.0 + d.v.abs() + d.vtilde.abs()), "{triangle}");
        if !matches!(spec.generator, Generator::Morse { .. }) {
            let closed = target_closed_form(&spec, x).unwrap();
            prop_assert!((closed - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        }
    }

    #[test]
    fn constant_mass_target_equals_reference(gen in builtin_generator(), x in -2.0f64..2.0) {
        let spec = ModelSpec::new(gen, ordering_preset(OrderingPreset::ZhuKroemer), MassProfile::Constant, 0.0, (-3.0, 3.0)).unwrap();
        prop_assert_eq!(target_potential(&spec, x).unwrap(), reference_potential(&spec.generator, 0.0, x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_oracle(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(n, &mut rng);
        let s = eig(&a, VectorSelection::None).unwrap();
        let oracle = brute_oracle_small(&a).unwrap();
        let d = match_multisets(&s.eigenvalues, &oracle).unwrap();
        prop_assert!(d <= 1e-8, "distance {d}");
        let trace: Complex64 = s.eigenvalues.iter().sum();
        prop_assert!((trace - a.trace()).norm() <= 1e-10 * a.trace().norm().max(frob(&a)));
    }

    #[test]
    fn similarity_invariance(seed in any::<u64>(), n in 2usize..=20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(n, &mut rng);
        let scale: Vec<f64> = (0..n).map(|i| 0.5 + (seed.rotate_left(i as u32) % 1000) as f64 / 666.0).collect();
        let b = CMatrix::from_fn(n, n, |i, j| a[(i, j)] * (scale[j] / scale[i]));
        let ea = eig(&a, VectorSelection::None).unwrap().eigenvalues;
        let eb = eig(&b, VectorSelection::None).unwrap().eigenvalues;
        let d = match_multisets(&ea, &eb).unwrap();
        prop_assert!(d <= 1e-8, "distance {d}");
    }

    #[test]
    fn eigenpair_residuals(seed in any::<u64>(), n in 2usize..=40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(n, &mut rng);
        let s = eig(&a, VectorSelection::All).unwrap();
        for (k, r) in s.residuals.iter().enumerate() {
            let v = s.vectors[k].as_ref().unwrap();
            let av = a.matvec(v);
            let res: f64 = av
                .iter()
                .zip(v)
                .map(|(x, y)| (x - s.eigenvalues[k] * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-10 * frob(&a) * vn, "pair {k}: {res}");
            prop_assert!(r.unwrap() <= 1e-10);
        }
    }

    #[test]
    fn constant_generator_target_is_hermitian(
        preset in solvable(),
        c1 in 0.5f64..2.0,
        c2 in 0.5f64..3.0,
        value in -2.0f64..2.0,
        n in 8usize..80,
    ) {
        let gen = Generator::Custom(CustomGenerator::new("const", move |_| value, |_| 0.0, 5, 1e-8).unwrap());
        let ordering = ordering_preset(preset);
        let profile = MassProfile::from_ordering(&ordering, c1, c2).unwrap();
        let spec = ModelSpec::with_auto_offset(gen, ordering, profile, 0.0, (0.0, 1.0)).unwrap();
        let grid = uniform_x_grid(&spec, n).unwrap();
        let h = build_target_matrix(&spec, &grid).unwrap().entries;
        prop_assert_eq!(frob(&h.sub(&h.conj_transpose())), 0.0);
    }

    #[test]
    fn eta_is_hermitian(
        gen in builtin_generator(),
        preset in solvable(),
        c1 in 0.5f64..2.0,
        c2 in 0.5f64..3.0,
        n in 8usize..80,
    ) {
        let ordering = ordering_preset(preset);
        let profile = MassProfile::from_ordering(&ordering, c1, c2).unwrap();
        let spec = ModelSpec::with_auto_offset(gen, ordering, profile, 0.0, (0.0, 1.0)).unwrap();
        let grid = uniform_x_grid(&spec, n).unwrap();
        let eta = build_eta_matrix(&spec, &grid).unwrap().entries;
        prop_assert_eq!(frob(&eta.sub(&eta.conj_transpose())), 0.0);
    }

    #[test]
    fn constant_mass_matrices_coincide(gen in builtin_generator(), n in 8usize..80) {
        let spec = ModelSpec::new(gen, ordering_preset(OrderingPreset::GoraWilliams), MassProfile::Constant, 0.0, (0.0, PI)).unwrap();
        let (gx, gq) = matched_domains(&spec, n).unwrap();
        prop_assert_eq!(gx.nodes.clone(), gq.nodes.clone());
        let hx = build_target_matrix(&spec, &gx).unwrap().entries;
        let hq = build_reference_matrix(&spec, &gq).unwrap().entries;
        prop_assert_eq!(hx, hq);
    }

    #[test]
    fn scarf_oracle_closed_form(v2 in -12.0f64..12.0) {
        prop_assume!(v2 != 0.0);
        let levels = scarf2_levels(v2);
        let count = (v2.abs() - 0.5).ceil().max(0.0) as usize;
        prop_assert_eq!(levels.len(), count);
        for (n, e) in levels.iter().enumerate() {
            let k = v2.abs() - n as f64 - 0.5;
            prop_assert_eq!(*e, -k * k);
        }
    }

    #[test]
    fn samsonov_roy_skips_second_level(n_upper in 0u32..200) {
        let levels = samsonov_roy_levels(n_upper);
        prop_assert!(levels.iter().all(|&(n, _)| n != 2));
        prop_assert!(levels.iter().all(|&(n, _)| n <= n_upper));
    }
}

fn free_box_levels(n: usize) -> Vec<f64> {
    let spec = ModelSpec::new(
        Generator::Morse { a: 0.0 },
        ordering_preset(OrderingPreset::ZhuKroemer),
        MassProfile::Constant,
        0.0,
        (0.0, PI),
    )
    .unwrap();
    let grid = Grid::uniform(GridKind::UniformQ, 0.0, PI, n).unwrap();
    let m = build_reference_matrix(&spec, &grid).unwrap();
    let mut re: Vec<f64> = eig(&m.entries, VectorSelection::None)
        .unwrap()
        .eigenvalues
        .iter()
        .map(|z| z.re)
        .collect();
    re.sort_by(f64::total_cmp);
    re.truncate(3);
    re
}

#[test]
fn free_laplacian_converges_quadratically() {
    let (coarse, fine) = (free_box_levels(50), free_box_levels(100));
    for (k, exact) in [1.0, 4.0, 9.0].into_iter().enumerate() {
        let (e1, e2) = ((coarse[k] - exact).abs(), (fine[k] - exact).abs());
        assert!(e2 < 5e-3 * exact, "level {k}: {}", fine[k]);
        let rate = (e1 / e2).log2();
        assert!((rate - 2.0).abs() < 0.3, "level {k}: rate {rate}");
    }
}

/// Max interior-row difference between the discrete ordered kinetic operator
/// and `-(v'/M)' + U v` on a smooth test function.
fn kinetic_defect(preset: OrderingPreset, profile: &MassProfile, n: usize) -> f64 {
    let ordering = ordering_preset(preset);
    let grid = Grid::uniform(GridKind::UniformX, 1.0, 2.0, n).unwrap();
    let t = build_ordered_kinetic(&ordering, profile, &grid).unwrap();
    let v = |x: f64| (PI * (x - 1.0)).sin() * x.exp();
    let v1 = |x: f64| PI * (PI * (x - 1.0)).cos() * x.exp() + v(x);
    let v2 = |x: f64| 2.0 * v1(x) - v(x) - PI * PI * v(x);
    let values: Vec<Complex64> = grid.nodes.iter().map(|&x| Complex64::new(v(x), 0.0)).collect();
    let tv = t.entries.matvec(&values);
    (2..n - 2)
        .map(|i| {
            let x = grid.nodes[i];
            let pt = profile.eval(x).unwrap();
            let (m, m1, _) = pt.mass_derivatives();
            let exact = -(v2(x) / m - v1(x) * m1 / (m * m)) + ordering_potential(&ordering, &pt) * v(x);
            (tv[i].re - exact).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn ordered_kinetic_is_consistent() {
    let profile = MassProfile::power_law(1.0, 0.5, 0.5).unwrap();
    for preset in OrderingPreset::ALL {
        let (coarse, fine) = (kinetic_defect(preset, &profile, 100), kinetic_defect(preset, &profile, 200));
        let rate = (coarse / fine).log2();
        assert!(fine < 1e-2, "{preset}: defect {fine}");
        assert!(rate >= 1.0, "{preset}: rate {rate}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn spectrum_depends_only_on_reference_data(c1 in 0.5f64..2.0, c2 in 0.0f64..3.0) {
        let gen = Generator::scarf2(2.5).unwrap();
        let ordering = ordering_preset(OrderingPreset::ZhuKroemer);
        let base = ModelSpec::derived(gen.clone(), ordering.clone(), 1.0, 0.0, 0.0, (-12.0, 12.0)).unwrap();
        let moved = ModelSpec::derived(gen, ordering, c1, c2, 0.0, (-12.0, 12.0)).unwrap();
        let n = 300;
        let hq_base = solve_picture(&base, Picture::Reference, n, BOUND_IM_TOL, false).unwrap();
        let hq_moved = solve_picture(&moved, Picture::Reference, n, BOUND_IM_TOL, false).unwrap();
        prop_assert_eq!(&hq_base.spectrum.eigenvalues, &hq_moved.spectrum.eigenvalues);
        let hx = solve_picture(&moved, Picture::Target, n, BOUND_IM_TOL, false).unwrap();
        let (bq, bx) = (hq_base.bound(), hx.bound());
        prop_assert_eq!(bq.len(), 2);
        prop_assert_eq!(bx.len(), 2);
        for (a, b) in bq.iter().zip(&bx) {
            prop_assert!((a - b).norm() <= 5e-2, "{a} vs {b}");
        }
    }
}
