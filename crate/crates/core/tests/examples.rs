use std::f64::consts::{E, FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pdm_spectra::discretize::{matched_domains, uniform_grid, Grid, GridKind};
use pdm_spectra::eigen::{
    brute_oracle_small, classify_spectrum, eig, match_multisets, ClassifyOptions, VectorSelection,
};
use pdm_spectra::linalg::CMatrix;
use pdm_spectra::model::{
    ordering_preset, profile_eval, Generator, MassProfile, ModelSpec, OrderingPreset,
};
use pdm_spectra::transform::{
    alt_branch_potential, closed_form_reference, potential_decomposition, q_of_x,
    reference_potential, target_potential, wavefunction_pullback, x_of_q, LiouvilleMap,
};
use pdm_spectra::verify::{
    check_analytic, check_intertwining, check_isospectral, convergence_sweep, random_matrix,
    samsonov_roy_levels, scarf2_levels, solve_picture, Picture, BOUND_IM_TOL,
};
use pdm_spectra::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + b.abs())
}

fn zk() -> pdm_spectra::model::AmbiguityOrdering {
    ordering_preset(OrderingPreset::ZhuKroemer)
}

fn scarf(v2: f64) -> Generator {
    Generator::scarf2(v2).unwrap()
}

#[test]
fn profile_values() {
    let p = profile_eval(&MassProfile::power_law(1.0, 0.0, 0.0).unwrap(), 2.0).unwrap();
    assert_eq!((p.mu, p.mu1, p.mu2, p.mass), (2.0, 1.0, 0.0, 0.25));
    let p = profile_eval(&MassProfile::Constant, 17.0).unwrap();
    assert_eq!((p.mu, p.mu1, p.mu2, p.mass), (1.0, 0.0, 0.0, 1.0));
    let p = profile_eval(&MassProfile::power_law(1.0, 0.0, 1.0).unwrap(), 4.0).unwrap();
    assert!(close(p.mu, 2.0) && close(p.mu1, 0.25) && close(p.mass, 0.25));
}

#[test]
fn generator_values() {
    assert_eq!(scarf(2.0).eval(0.0), (-2.0, 0.0));
    let (f, fp) = Generator::SamsonovRoy.eval(0.0);
    assert!(close(f, 11.0 / 4.0) && fp == 0.0);
    assert_eq!(Generator::Morse { a: 1.0 }.eval(0.0), (1.0, -1.0));
}

#[test]
fn map_values() {
    let log = LiouvilleMap::new(MassProfile::power_law(1.0, 0.0, 0.0).unwrap());
    let sqrt = LiouvilleMap::new(MassProfile::power_law(1.0, 0.0, 1.0).unwrap());
    let shifted = LiouvilleMap::new(MassProfile::power_law(1.0, 2.0, 0.0).unwrap());
    assert_eq!(q_of_x(&log, 1.0).unwrap(), 0.0);
    assert!(close(q_of_x(&log, E).unwrap(), 1.0));
    assert!(close(q_of_x(&sqrt, 4.0).unwrap(), 4.0));
    assert_eq!(x_of_q(&log, 0.0).unwrap(), 1.0);
    assert!(close(x_of_q(&sqrt, 4.0).unwrap(), 4.0));
    assert!(close(x_of_q(&shifted, PI).unwrap(), PI.exp() - 2.0));
}

#[test]
fn reference_values() {
    assert_eq!(reference_potential(&scarf(2.0), 0.0, 0.0), c(-4.0, 0.0));
    assert!((reference_potential(&Generator::SamsonovRoy, 0.0, 0.0) - c(-121.0 / 16.0, 0.0)).norm() < 1e-12);
    assert_eq!(closed_form_reference(&scarf(2.0), 0.0).unwrap(), c(-4.0, 0.0));
    assert!((closed_form_reference(&Generator::SamsonovRoy, 0.0).unwrap() - c(-121.0 / 16.0, 0.0)).norm() < 1e-12);
    assert!((closed_form_reference(&Generator::SamsonovRoy, FRAC_PI_2).unwrap() - c(-1.0 / 16.0, 0.0)).norm() < 1e-12);
    assert!(matches!(
        closed_form_reference(&Generator::Morse { a: 1.0 }, 0.0),
        Err(Error::UnsupportedGenerator(_))
    ));
}

#[test]
fn target_values() {
    let spec = ModelSpec::new(scarf(2.0), zk(), MassProfile::power_law(1.0, 0.0, 0.0).unwrap(), 0.0, (-5.0, 5.0)).unwrap();
    assert_eq!(target_potential(&spec, 1.0).unwrap(), c(-4.0, 0.0));
    let spec = ModelSpec::new(
        Generator::SamsonovRoy,
        zk(),
        MassProfile::power_law(1.0, 2.0, 0.0).unwrap(),
        0.0,
        (-PI, PI),
    )
    .unwrap();
    assert!((target_potential(&spec, -1.0).unwrap() - c(-121.0 / 16.0, 0.0)).norm() < 1e-12);
}

#[test]
fn decomposition_values() {
    let spec = ModelSpec::new(scarf(2.0), zk(), MassProfile::Constant, 0.0, (-5.0, 5.0)).unwrap();
    assert_eq!(potential_decomposition(&spec, 0.0).unwrap().vtilde, -4.0);
    let spec = ModelSpec::new(scarf(2.0), zk(), MassProfile::power_law(1.0, 0.0, 0.0).unwrap(), 0.0, (-5.0, 5.0)).unwrap();
    let d = potential_decomposition(&spec, 1.0).unwrap();
    assert!(close(d.v, -4.25), "{}", d.v);
    assert_eq!(d.w, 0.0);
}

#[test]
fn pullback_values() {
    let constant = LiouvilleMap::new(MassProfile::Constant);
    let out = wavefunction_pullback(&constant, &[(FRAC_PI_2, c(FRAC_PI_2.sin(), 0.0))]).unwrap();
    assert_eq!(out, [(FRAC_PI_2, c(1.0, 0.0))]);
    let log = LiouvilleMap::new(MassProfile::power_law(1.0, 0.0, 0.0).unwrap());
    let out = wavefunction_pullback(&log, &[(1.0, c(1.0, 0.0)), (0.3, c(0.0, 0.0))]).unwrap();
    assert!(close(out[0].0, E) && close(out[0].1.re, (-0.5f64).exp()));
    assert_eq!(out[1].1, c(0.0, 0.0));
}

#[test]
fn alt_branch_values() {
    let zero = Generator::Morse { a: 0.0 };
    assert_eq!(alt_branch_potential(&zero, &zk(), 0.7, 1.3), c(0.7, 0.0));
    let morse = Generator::Morse { a: 1.0 };
    let gw = ordering_preset(OrderingPreset::GoraWilliams);
    assert!((alt_branch_potential(&morse, &gw, 0.0, 0.0) - c(-1.0, 1.0)).norm() < 1e-12);
    assert!((alt_branch_potential(&morse, &zk(), 0.0, 0.0) - c(-2.0, 1.0)).norm() < 1e-12);
}

#[test]
fn grid_values() {
    let g = uniform_grid(0.0, 1.0, 3).unwrap();
    assert_eq!(g.nodes, [0.25, 0.5, 0.75]);
    assert_eq!(g.spacing(), Some(0.25));
    let g = uniform_grid(-PI, PI, 799).unwrap();
    assert!(close(g.spacing().unwrap(), 2.0 * PI / 800.0));
    assert!(matches!(uniform_grid(1.0, 0.0, 2), Err(Error::BadInterval { .. })));
}

#[test]
fn matched_domain_values() {
    let spec = ModelSpec::new(scarf(1.0), zk(), MassProfile::Constant, 0.0, (0.0, PI)).unwrap();
    let (gx, gq) = matched_domains(&spec, 40).unwrap();
    assert_eq!(gx.nodes, gq.nodes);
    let spec = ModelSpec::new(Generator::SamsonovRoy, zk(), MassProfile::power_law(1.0, 2.0, 0.0).unwrap(), 0.0, (-PI, PI)).unwrap();
    let (gx, _) = matched_domains(&spec, 40).unwrap();
    let ends = gx.with_endpoints();
    assert!(close(ends[0], (-PI).exp() - 2.0) && close(ends[41], PI.exp() - 2.0));
    let gw = ordering_preset(OrderingPreset::GoraWilliams);
    let spec = ModelSpec::new(scarf(1.0), gw, MassProfile::power_law(1.0, 0.0, 1.0).unwrap(), 0.0, (0.5, 12.0)).unwrap();
    let (gx, _) = matched_domains(&spec, 40).unwrap();
    let ends = gx.with_endpoints();
    assert!(close(ends[0], 0.0625) && close(ends[41], 36.0));
}

#[test]
fn eig_values() {
    let s = eig(&CMatrix::identity(3), VectorSelection::None).unwrap();
    assert_eq!(s.eigenvalues, [c(1.0, 0.0); 3]);
    let swap = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
    let s = eig(&swap, VectorSelection::None).unwrap();
    assert!(match_multisets(&s.eigenvalues, &[c(-1.0, 0.0), c(1.0, 0.0)]).unwrap() < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = random_matrix(6, &mut rng);
    let d = match_multisets(&eig(&a, VectorSelection::None).unwrap().eigenvalues, &brute_oracle_small(&a).unwrap()).unwrap();
    assert!(d <= 1e-8, "{d}");
}

#[test]
fn oracle_values() {
    let diag = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 3.0)]]);
    let roots = brute_oracle_small(&diag).unwrap();
    assert!(match_multisets(&roots, &[c(2.0, 0.0), c(0.0, 3.0)]).unwrap() < 1e-12);
    let jordan = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
    let roots = brute_oracle_small(&jordan).unwrap();
    assert!(match_multisets(&roots, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap() < 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_matrix(5, &mut rng);
    let d = match_multisets(&eig(&a, VectorSelection::None).unwrap().eigenvalues, &brute_oracle_small(&a).unwrap()).unwrap();
    assert!(d <= 1e-8, "{d}");
}

#[test]
fn complex_eigenvalue_not_bound() {
    let m = CMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => c(0.5, 0.2),
        (1, 1) => c(1.0, 0.0),
        (2, 2) => c(2.0, 0.0),
        _ => c(0.0, 0.0),
    });
    let grid = Grid::uniform(GridKind::UniformQ, 0.0, 1.0, 3).unwrap();
    let opts = ClassifyOptions { im_tol: 1e-3, ..Default::default() };
    let s = classify_spectrum(&eig(&m, VectorSelection::None).unwrap(), &grid, &opts).unwrap();
    assert_eq!(s.bound, [false, true, true]);
}

#[test]
fn oracle_lists() {
    assert_eq!(scarf2_levels(2.5), [-4.0, -1.0]);
    assert_eq!(scarf2_levels(-2.5), [-4.0, -1.0]);
    assert!(scarf2_levels(0.5).is_empty());
    assert_eq!(samsonov_roy_levels(4), [(1, -21.0 / 16.0), (3, 11.0 / 16.0), (4, 39.0 / 16.0)]);
    assert_eq!(samsonov_roy_levels(1), [(1, -21.0 / 16.0)]);
}

#[test]
fn scarf_reference_bound_levels() {
    let spec = ModelSpec::new(scarf(2.5), zk(), MassProfile::power_law(1.0, 0.0, 0.0).unwrap(), 0.0, (-12.0, 12.0)).unwrap();
    let solved = solve_picture(&spec, Picture::Reference, 800, BOUND_IM_TOL, false).unwrap();
    let bound = solved.bound();
    assert_eq!(bound.len(), 2);
    assert!((bound[0].re + 4.0).abs() < 1e-2 && (bound[1].re + 1.0).abs() < 1e-2);
    let solved = solve_picture(&spec, Picture::Target, 800, BOUND_IM_TOL, false).unwrap();
    let bound = solved.bound();
    assert_eq!(bound.len(), 2);
    assert!((bound[0].re + 4.0).abs() < 5e-2 && (bound[1].re + 1.0).abs() < 5e-2);
}

#[test]
fn constant_mass_isospectral_exactly() {
    let spec = ModelSpec::new(scarf(2.5), zk(), MassProfile::Constant, 0.0, (-12.0, 12.0)).unwrap();
    let r = check_isospectral(&spec, 200, 2, 5e-2).unwrap();
    assert!(r.pass);
    assert!(r.levels.iter().all(|l| l.error == Some(0.0)));
}

#[test]
fn intertwining_square_root_mass() {
    let gw = ordering_preset(OrderingPreset::GoraWilliams);
    let spec = ModelSpec::derived(scarf(2.0), gw, 1.0, 0.0, 0.0, (0.5, 12.0)).unwrap();
    let r = check_intertwining(&spec, &[200, 400, 800]).unwrap();
    assert!(r.pass, "{:?}", r.sweep);
    assert!(r.rate.unwrap() >= 0.9);
}

#[test]
fn analytic_target_matches_oracle() {
    let spec = ModelSpec::derived(scarf(2.5), zk(), 1.0, 0.0, 0.0, (-12.0, 12.0)).unwrap();
    let r = check_analytic(&spec, Picture::Target, 800, 5e-2).unwrap();
    assert!(r.pass, "{:?}", r.levels);
    assert_eq!(r.levels.len(), 2);
}

#[test]
fn sweep_reference_scarf_is_second_order() {
    let spec = ModelSpec::derived(scarf(2.5), zk(), 1.0, 0.0, 0.0, (-12.0, 12.0)).unwrap();
    let r = convergence_sweep(&spec, Picture::Reference, &[200, 400, 800, 1600], 0).unwrap();
    assert!(r.pass);
    assert!((r.rate.unwrap() - 2.0).abs() <= 0.5, "{:?}", r.rate);
}

#[test]
fn sweep_free_box_is_second_order() {
    let spec = ModelSpec::new(Generator::Morse { a: 0.0 }, zk(), MassProfile::Constant, 0.0, (0.0, PI)).unwrap();
    let r = convergence_sweep(&spec, Picture::Reference, &[50, 100, 200], 0).unwrap();
    assert!(r.pass);
    assert!((r.rate.unwrap() - 2.0).abs() <= 0.5, "{:?}", r.rate);
}

#[test]
fn sweep_target_is_at_least_first_order() {
    let spec = ModelSpec::derived(scarf(2.5), zk(), 1.0, 0.0, 0.0, (-12.0, 12.0)).unwrap();
    let r = convergence_sweep(&spec, Picture::Target, &[200, 400, 800], 0).unwrap();
    assert!(r.pass);
    assert!(r.rate.unwrap() >= 1.0, "{:?}", r.rate);
}
