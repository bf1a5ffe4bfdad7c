//! Independent oracles: the dense linear operator and its spectrum, and
//! central differences of the energy.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vexfrac::nonlocal::{apply_operator, dot, EnergyFunctional};
use vexfrac::solvers::{solve_eigenproblem, SolverConfig};
use vexfrac::{build_domain, presets, DiscreteDomain, GridFunction, SignMode};

const S: f64 = 0.4;

/// `A` for `p ≡ 2`, `n = 1`, assembled from node positions alone.
fn dense_operator(d: &DiscreteDomain) -> DMatrix<f64> {
    let n = d.len();
    let h = d.cell_measure;
    let kernel = |a: f64, b: f64| h / (a - b).abs().powf(1.0 + 2.0 * S);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = d.interior[i][0];
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let k = kernel(xi, d.interior[j][0]);
                m[(i, j)] = -k;
                diag += k;
            }
        }
        for y in &d.collar {
            diag += kernel(xi, y[0]);
        }
        let rx = d.collar_radius + xi.min(1.0 - xi);
        diag += 2.0 * rx.powf(-2.0 * S) / (2.0 * S);
        m[(i, i)] = diag;
    }
    m
}

#[test]
fn linear_operator_matches_dense_matrix() {
    let spec = presets::reference(SignMode::OddPower);
    let d = build_domain(&spec, 32, 2.0).unwrap();
    let m = dense_operator(&d);
    assert_eq!(m, m.transpose());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let u: Vec<f64> = (0..32).map(|_| rng.random_range(-2.0..2.0)).collect();
        let a = apply_operator(&GridFunction::new(u.clone()).unwrap(), &d);
        let b = &m * nalgebra::DVector::from_vec(u);
        let err = a.values().iter().zip(b.iter()).fold(0.0f64, |e, (x, y)| e.max((x - y).abs()));
        let scale = b.iter().fold(0.0f64, |e, y| e.max(y.abs()));
        assert!(err <= 1e-12 * scale, "{err} vs {scale}");
    }
}

#[test]
fn eigensolver_matches_dense_ground_state() {
    let spec = presets::reference(SignMode::OddPower);
    let d = build_domain(&spec, 32, 2.0).unwrap();
    let eig = SymmetricEigen::new(dense_operator(&d));
    let k = eig.eigenvalues.imin();
    let mu = eig.eigenvalues[k];
    let v = eig.eigenvectors.column(k).into_owned();

    let sol = solve_eigenproblem(&spec, &d, &SolverConfig::default()).unwrap();
    assert!(sol.solution.converged);
    assert!((sol.lambda_estimate - mu).abs() <= 1e-8 * mu, "{} vs {mu}", sol.lambda_estimate);

    let u = sol.solution.u.values();
    let un = dot(u, u).sqrt();
    let sign = if dot(u, v.as_slice()) < 0.0 { -1.0 } else { 1.0 };
    let err = u.iter().zip(v.iter()).fold(0.0f64, |e, (a, b)| e.max((sign * a / un - b).abs()));
    let scale = v.iter().fold(0.0f64, |e, b| e.max(b.abs()));
    assert!(err <= 1e-8 * scale, "{err}");
    // Constraint: ∫ |u|²/2 = 1.
    assert!((d.cell_measure * dot(u, u) / 2.0 - 1.0).abs() < 1e-12);
}

fn fd_check(d: &DiscreteDomain, lambda: f64, pairs: usize, seed: u64) -> f64 {
    let f = EnergyFunctional::new(d, lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let u: Vec<f64> = (0..d.len()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let w: Vec<f64> = (0..d.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let exact = dot(&f.gradient(&u).unwrap(), &w);
        let h = 1e-6 * (1.0 + u.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        let up: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + h * b).collect();
        let um: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - h * b).collect();
        let fd = (f.value(&up).unwrap() - f.value(&um).unwrap()) / (2.0 * h);
        worst = worst.max((exact - fd).abs() / (1.0 + exact.abs()));
    }
    worst
}

#[test]
fn gradient_matches_central_differences() {
    let spec = presets::reference(SignMode::OddPower);
    for cells in [8, 16, 32] {
        let d = build_domain(&spec, cells, 2.0).unwrap();
        assert!(fd_check(&d, 0.05, 20, cells as u64) <= 1e-5);
    }
    let spec2 = presets::reference_2d(SignMode::OddPower);
    let d2 = build_domain(&spec2, 8, 1.0).unwrap();
    assert!(fd_check(&d2, 0.05, 10, 3) <= 1e-5);
    let var = presets::variable_1d();
    let dv = build_domain(&var, 16, 1.0).unwrap();
    assert!(fd_check(&dv, 0.05, 10, 4) <= 1e-5);
}
