mod common;

use annuli::banded::{BandedMatrix, BorderedSystem};
use annuli::experiments::ExperimentConfig;
use annuli::semiclassical::{Hierarchy, Strategy};
use annuli::solvers::{ChebFourierSolver, Coefficient, Mesh, ZernikeAnnularSolver};
use annuli::Error;
use common::*;
use nalgebra::DVector;
use proptest::prelude::*;

fn bordered(n: usize, p: usize, lower: usize, upper: usize, seed: u64) -> BorderedSystem {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut core = BandedMatrix::zeros(n - p, n, lower, upper + p);
    for i in 0..n - p {
        for j in core.row_range(i) {
            core.set(i, j, rng.gen_range(-1.0..1.0));
        }
        // diagonally dominant on the block left after the border columns
        core.add_to(i, i + p, 4.0 * (upper + lower + p) as f64);
    }
    let top = (0..p).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    BorderedSystem::new(top, core)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bordered_solve_matches_dense(n in 5usize..120, p in 1usize..4, lower in 0usize..3, upper in 0usize..4, seed in any::<u64>()) {
        let sys = bordered(n, p, lower, upper, seed);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = sys.solve(&b).unwrap();
        let dense = sys.to_dense();
        let r = &dense * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
        let scale = dense.abs().max() * x.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + 1.0;
        prop_assert!(r.amax() < 1e-10 * scale, "residual {}", r.amax());
        let ax = sys.matvec(&x);
        let direct = &dense * DVector::from_column_slice(&x);
        prop_assert!(ax.iter().zip(direct.iter()).all(|(a, b)| (a - b).abs() < 1e-12 * scale));
    }

    #[test]
    fn round_trip_annulus(rho in 0.05f64..0.95, ab in 0usize..3, half in 1usize..10, weighted in any::<bool>(), seed in any::<u64>()) {
        let d = round_trip_defect(rho, ab as f64, ab as f64, 2 * half, weighted, seed);
        prop_assert!(d < 1e-10, "defect {d}");
    }

    #[test]
    fn round_trip_disk(a in 0usize..3, half in 1usize..10, weighted in any::<bool>(), seed in any::<u64>()) {
        let d = round_trip_defect(0.0, a as f64, 0.0, 2 * half, weighted, seed);
        prop_assert!(d < 1e-10, "defect {d}");
    }

    #[test]
    fn semiclassical_orthonormal(t in 1.05f64..4.0, a in 0usize..3, b in 0usize..3, c in 0usize..5) {
        let d = semiclassical_gram_defect(t, a as f64, b as f64, c, 14, Strategy::QrQ);
        prop_assert!(d < 1e-10, "defect {d}");
    }

    #[test]
    fn jacobi_symmetric_with_spectrum_in_unit_interval(t in 1.05f64..4.0, a in 0.0f64..3.0, b in 0.0f64..3.0, c in 0usize..6) {
        let h = Hierarchy::semiclassical(t, a, b, c, 30, Strategy::QrQ).unwrap();
        let x = h.jacobi(c, 30).unwrap();
        prop_assert!(x.is_symmetric(1e-13));
        let eig = nalgebra::SymmetricEigen::new(x.to_dense()).eigenvalues;
        prop_assert!(eig.iter().all(|v| *v > 0.0 && *v < 1.0));
    }

    #[test]
    fn mode_decoupling(rho in 0.2f64..0.8, m in 0usize..6) {
        let d = decoupling_defect(rho, m, 12);
        prop_assert!(d < 1e-13, "leakage {d}");
    }

    #[test]
    fn mesh_rejects_bad_radii(mut radii in proptest::collection::vec(0.0f64..1.0, 1..5)) {
        radii.push(1.0);
        let valid = radii.windows(2).all(|w| w[0] < w[1]);
        prop_assert_eq!(Mesh::new(&radii).is_ok(), valid);
        if valid {
            let mesh = Mesh::new(&radii).unwrap();
            prop_assert_eq!(mesh.cells().len(), radii.len() - 1);
            prop_assert_eq!(mesh.cell_of(1.0), Some(radii.len() - 2));
        }
    }

    #[test]
    fn sweeps_must_increase(a in 1usize..50, b in 1usize..50) {
        let text = format!(r#"{{"experiment":"x","rhs":"zero","solvers":["zernike-annular"],"n":[{a},{b}]}}"#);
        let parsed = ExperimentConfig::from_json(&text);
        prop_assert_eq!(parsed.is_ok(), a < b);
    }
}

#[test]
fn manufactured_solution_is_exact() {
    let rho = 0.5;
    let f = |x: f64, y: f64| 4.0 * (1.0 + rho * rho) - 16.0 * (x * x + y * y);
    let u = |x: f64, y: f64| {
        let r2 = x * x + y * y;
        (1.0 - r2) * (r2 - rho * rho)
    };
    let za = ZernikeAnnularSolver::new(rho, 8, &Coefficient::Constant(0.0)).unwrap().solve(&f).unwrap();
    let cf = ChebFourierSolver::new(rho, 8, &Coefficient::Constant(0.0)).unwrap().solve(&f).unwrap();
    for (x, y) in random_points(rho, 40, 1) {
        assert!((za.eval(x, y).unwrap() - u(x, y)).abs() < 1e-13);
        assert!((cf.eval(x, y) - u(x, y)).abs() < 1e-13);
    }
}

#[test]
fn unknown_rhs_is_named() {
    let text = r#"{"experiment":"x","rhs":"no-such-thing","solvers":["zernike-annular"],"n":[4]}"#;
    match ExperimentConfig::from_json(text) {
        Err(Error::UnknownRhs(id)) => assert_eq!(id, "no-such-thing"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn dense_bordered_system_singular() {
    let core = BandedMatrix::zeros(2, 3, 0, 1);
    let sys = BorderedSystem::new(vec![vec![0.0; 3]], core);
    assert!(sys.solve(&[1.0, 0.0, 0.0]).is_err());
}
