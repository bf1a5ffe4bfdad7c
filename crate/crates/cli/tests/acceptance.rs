//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are printed even when
//! every criterion passes. Exits nonzero when any criterion fails.

use std::fs;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vexfrac::analysis::{
    bootstrap_linf, check_norm_modular_interplay, estimate_embedding_constant, power_comparison_suite, simon_suite, truncation_suite,
    BootstrapConfig,
};
use vexfrac::nonlocal::{apply_operator, dot, x0_norm, EnergyFunctional};
use vexfrac::problem::PointField;
use vexfrac::solvers::{find_local_min, mountain_pass, solve_eigenproblem, solve_nonnegative, weak_form_recheck, SolverConfig};
use vexfrac::{build_domain, presets, DiscreteDomain, GridFunction, SignMode};
use vexfrac_cli::{run, Command, RunOptions};

const LAMBDA: f64 = 0.05;
const CELLS: usize = 32;
const COLLAR: f64 = 2.0;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn criterion(name: &str, budget: Option<Duration>, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = f();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let ok = v.passed && in_time;
    let limit = budget.map(|b| format!(" (limit {:.0}s)", b.as_secs_f64())).unwrap_or_default();
    println!("{} {name}: {} [{:.2}s{limit}]", if ok { "PASS" } else { "FAIL" }, v.detail, elapsed.as_secs_f64());
    ok
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn gradient_consistency() -> Verdict {
    let worst_on = |d: &DiscreteDomain, seed: u64| {
        let f = EnergyFunctional::new(d, LAMBDA);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let u: Vec<f64> = (0..d.len()).map(|_| rng.random_range(-1.5..1.5)).collect();
            let w: Vec<f64> = (0..d.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let exact = dot(&f.gradient(&u).unwrap(), &w);
            let h = 1e-6 * (1.0 + linf(&u));
            let up: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + h * b).collect();
            let um: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - h * b).collect();
            let fd = (f.value(&up).unwrap() - f.value(&um).unwrap()) / (2.0 * h);
            worst = worst.max((exact - fd).abs() / (1.0 + exact.abs()));
        }
        worst
    };
    let spec = presets::reference(SignMode::OddPower);
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for cells in [8, 16, 32] {
        let d = build_domain(&spec, cells, COLLAR).unwrap();
        let w = worst_on(&d, cells as u64);
        parts.push(format!("n=1/{cells}: {w:.2e}"));
        worst = worst.max(w);
    }
    let spec2 = presets::reference_2d(SignMode::OddPower);
    let d2 = build_domain(&spec2, 8, COLLAR).unwrap();
    let w = worst_on(&d2, 88);
    parts.push(format!("n=2/8x8: {w:.2e}"));
    worst = worst.max(w);
    verdict(worst <= 1e-5, format!("worst relative error {worst:.2e} ≤ 1e-5 ({})", parts.join(", ")))
}

/// `A` for `p ≡ 2`, `s ≡ 0.4`, `n = 1`, assembled from node positions.
fn dense_operator(d: &DiscreteDomain) -> DMatrix<f64> {
    let s = 0.4;
    let n = d.len();
    let h = d.cell_measure;
    let kernel = |a: f64, b: f64| h / (a - b).abs().powf(1.0 + 2.0 * s);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = d.interior[i][0];
        let mut diag = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let k = kernel(xi, d.interior[j][0]);
            m[(i, j)] = -k;
            diag += k;
        }
        diag += d.collar.iter().map(|y| kernel(xi, y[0])).sum::<f64>();
        let rx = d.collar_radius + xi.min(1.0 - xi);
        diag += 2.0 * rx.powf(-2.0 * s) / (2.0 * s);
        m[(i, i)] = diag;
    }
    m
}

fn linear_oracle() -> Verdict {
    let spec = presets::reference(SignMode::OddPower);
    let d = build_domain(&spec, CELLS, COLLAR).unwrap();
    let m = dense_operator(&d);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut op_err: f64 = 0.0;
    for _ in 0..20 {
        let u: Vec<f64> = (0..d.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let a = apply_operator(&GridFunction::new(u.clone()).unwrap(), &d);
        let b = &m * DVector::from_vec(u);
        let err = linf(&a.values().iter().zip(b.iter()).map(|(x, y)| x - y).collect::<Vec<_>>());
        op_err = op_err.max(err / linf(b.as_slice()));
    }
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imin();
    let mu = eig.eigenvalues[k];
    let v = eig.eigenvectors.column(k).into_owned();
    let sol = solve_eigenproblem(&spec, &d, &SolverConfig::default()).unwrap();
    let val_err = (sol.lambda_estimate - mu).abs() / mu;
    let u = sol.solution.u.values();
    let un = dot(u, u).sqrt();
    let sign = dot(u, v.as_slice()).signum();
    let vec_err = linf(&u.iter().zip(v.iter()).map(|(a, b)| sign * a / un - b).collect::<Vec<_>>()) / linf(v.as_slice());
    verdict(
        op_err <= 1e-12 && val_err <= 1e-8 && vec_err <= 1e-8,
        format!("operator {op_err:.1e} ≤ 1e-12, eigenvalue {val_err:.1e} ≤ 1e-8, eigenvector {vec_err:.1e} ≤ 1e-8 (λ₁ = {mu:.10})"),
    )
}

fn inequality_suites() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for rep in [simon_suite(10_000, 1), truncation_suite(10_000, 2), power_comparison_suite(10_000, 3)] {
        ok &= rep.samples >= 10_000 && rep.violations == 0;
        parts.push(format!("{} {}/{}", rep.name, rep.violations, rep.samples));
    }
    // Variable exponents so that the two branches of the sandwich differ.
    let spec = presets::variable_1d();
    let d = build_domain(&spec, CELLS, COLLAR).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut below, mut above, mut violations) = (0, 0, 0);
    for k in 0..100 {
        let raw: Vec<f64> = (0..d.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = GridFunction::new(raw).unwrap();
        let n = x0_norm(&v, &d, 1e-13).unwrap().norm;
        let e = rng.random_range(0.05..1.5);
        let target = if k % 2 == 0 { 10f64.powf(-e) } else { 10f64.powf(e) };
        let u = v.scaled(target / n);
        if x0_norm(&u, &d, 1e-13).unwrap().norm < 1.0 {
            below += 1;
        } else {
            above += 1;
        }
        violations += check_norm_modular_interplay(&u, &spec, &d).unwrap().violations;
    }
    ok &= violations == 0 && below > 0 && above > 0;
    parts.push(format!("norm-modular {violations} violations over 100 functions ({below} with norm<1, {above} with norm>1)"));
    verdict(ok, format!("zero violations required: {}", parts.join(", ")))
}

fn two_solutions() -> Verdict {
    let spec = presets::reference(SignMode::OddPower);
    let d = build_domain(&spec, CELLS, COLLAR).unwrap();
    let cfg = SolverConfig::default();
    let (u1, u2) = match (mountain_pass(&spec, &d, LAMBDA, &cfg), find_local_min(&spec, &d, LAMBDA, &cfg)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return verdict(false, format!("solver error: {:?} / {:?}", a.err(), b.err())),
    };
    let sep = linf(&u1.u.values().iter().zip(u2.u.values()).map(|(a, b)| a - b).collect::<Vec<_>>());
    let f = EnergyFunctional::new(&d, LAMBDA);
    let w1 = weak_form_recheck(&f, &u1.u, 20, 101, 1e-8);
    let w2 = weak_form_recheck(&f, &u2.u, 20, 102, 1e-8);
    let ok = u1.grad_norm <= 1e-8 && u2.grad_norm <= 1e-8 && u1.energy > 0.0 && 0.0 > u2.energy && sep > 1e-3 && w1.passed && w2.passed;
    verdict(
        ok,
        format!(
            "|∇J| = {:.1e}, {:.1e} ≤ 1e-8; J(u₁) = {:.6} > 0 > J(u₂) = {:.3e}; ‖u₁−u₂‖∞ = {sep:.4} > 1e-3; weak form {} / {} (worst {:.1e}, {:.1e})",
            u1.grad_norm, u2.grad_norm, u1.energy, u2.energy, w1.passed, w2.passed, w1.worst_ratio, w2.worst_ratio
        ),
    )
}

fn nonnegative() -> Verdict {
    let spec = presets::reference(SignMode::PositivePart);
    let d = build_domain(&spec, CELLS, COLLAR).unwrap();
    match solve_nonnegative(&spec, &d, LAMBDA, &SolverConfig::default()) {
        Ok((u1, u2)) => {
            let ok = u1.converged && u2.converged && u1.u.min() >= -1e-7 && u2.u.min() >= -1e-7 && u1.energy > 0.0 && u2.energy < 0.0;
            verdict(
                ok,
                format!("min u₁ = {:.3e}, min u₂ = {:.3e} ≥ -1e-7; J = {:.6}, {:.3e}", u1.u.min(), u2.u.min(), u1.energy, u2.energy),
            )
        }
        Err(e) => verdict(false, format!("solver error: {e}")),
    }
}

fn bootstrap() -> Verdict {
    let spec = presets::reference(SignMode::OddPower);
    let d = build_domain(&spec, CELLS, COLLAR).unwrap();
    let u1 = match mountain_pass(&spec, &d, LAMBDA, &SolverConfig::default()) {
        Ok(s) => s.u,
        Err(e) => return verdict(false, format!("solver error: {e}")),
    };
    let r = bootstrap_linf(&u1, &spec, &d, &BootstrapConfig::default_for(&spec, &d)).unwrap();
    let increasing = r.gammas.windows(2).all(|w| w[1] > w[0]);
    let chain = r.steps_ok.iter().all(|&b| b) && !r.steps_ok.is_empty();
    let max = u1.linf();
    let high: Vec<(f64, f64)> =
        r.exponents.iter().zip(&r.norms).filter(|(q, _)| **q >= 200.0).map(|(q, n)| (*q, (max - n).abs() / max)).collect();
    let close = !high.is_empty() && high.iter().all(|(_, gap)| *gap <= 0.01);
    let worst = high.iter().fold(0.0f64, |m, (_, g)| m.max(*g));
    verdict(
        increasing && chain && close,
        format!(
            "{} rungs, γ increasing {increasing}, chain holds {chain}, max|u| = {max:.6}, worst gap for γθ⁻ ≥ 200 is {:.2}% over {} rungs (≤ 1%)",
            r.gammas.len(),
            worst * 100.0,
            high.len()
        ),
    )
}

fn embedding() -> Verdict {
    let spec = presets::reference(SignMode::OddPower);
    let beta = PointField::constant("beta", 3.5);
    let est = |cells| {
        let d = build_domain(&spec, cells, COLLAR).unwrap();
        estimate_embedding_constant(&spec, &d, &beta, 1000, 7).unwrap().sup_ratio
    };
    let (a, b) = (est(16), est(32));
    let rel = (a - b).abs() / a.max(b);
    verdict(
        rel <= 0.25 && a.is_finite() && b.is_finite(),
        format!("sup ratio {a:.6} (16) vs {b:.6} (32), relative difference {rel:.3} ≤ 0.25"),
    )
}

fn reproducibility() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let opts = |dir: &str| RunOptions { out: tmp.path().join(dir), ..RunOptions::default() };
    let (a, b) = (opts("first"), opts("second"));
    let (ra, rb) = match (run(Command::Paper, &a), run(Command::Paper, &b)) {
        (Ok(x), Ok(y)) => (x, y),
        (x, y) => return verdict(false, format!("pipeline error: {:?} / {:?}", x.err(), y.err())),
    };
    let names: Vec<&String> = ra.manifest.artifacts.keys().collect();
    let mut differing = Vec::new();
    for name in &names {
        let x = fs::read(a.out.join(name)).unwrap();
        let y = fs::read(b.out.join(name)).unwrap();
        if x != y {
            differing.push(name.to_string());
        }
    }
    let same_map = ra.manifest.artifacts == rb.manifest.artifacts;
    verdict(
        differing.is_empty() && same_map && !names.is_empty(),
        format!(
            "{} artifacts compared byte for byte, {} differ {:?}; checksum maps equal {same_map}",
            names.len(),
            differing.len(),
            differing
        ),
    )
}

fn main() {
    // `cargo test -- --list` and filters from the harness are accepted and ignored.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let secs = Duration::from_secs;
    let results = [
        criterion("gradient consistency", Some(secs(60)), gradient_consistency),
        criterion("linear-case oracle", Some(secs(10)), linear_oracle),
        criterion("inequality suites", Some(secs(30)), inequality_suites),
        criterion("two-solution multiplicity", Some(secs(300)), two_solutions),
        criterion("nonnegative variant", None, nonnegative),
        criterion("bootstrap chain", Some(secs(30)), bootstrap),
        criterion("embedding finiteness", None, embedding),
        criterion("reproducibility", None, reproducibility),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
