//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

mod common;

use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{c, expm, from_psi, inner, kron, matvec, to_psi};
use kahlerq::composite::{
    entangled_pair, tensor_dim_complex, tensor_dim_real, tensor_operator_complex, tensor_state_complex, EntangledKind,
};
use kahlerq::continuum::{
    commutator_check, gaussian_profile, schrodinger_hamiltonian, Grid1D, GridKahlerState, Potential, Stencil,
};
use kahlerq::dynamics::{
    conservation_report, evolve_exact, evolve_midpoint, evolve_midpoint_strided, split_hamiltonian,
};
use kahlerq::ergodic::{ergodicity_experiment, normal_modes, time_average, ErgodicityOptions, Polynomial};
use kahlerq::kahler::{metric_g, symplectic_omega};
use kahlerq::linalg::{CMatrix, RMatrix};
use kahlerq::operator::{
    compose, expectation, gamma_lift, gamma_lower, unitarity_residuals, ComplexOperator, KahlerOperator,
};
use kahlerq::sampling::{random_hermitian, random_operator, random_unit_state, random_unitary, task_rng};
use kahlerq::{KahlerError, KahlerState};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn c1_equivalence() -> Verdict {
    let mut worst = 0.0_f64;
    for i in 0..200u64 {
        let n = [2, 4, 8, 16][(i % 4) as usize];
        let mut rng = task_rng(101, i);
        let h = random_hermitian(&mut rng, n);
        let u0 = random_unit_state(&mut rng, n);
        let t = rng.gen_range(0.0..10.0);
        let got = evolve_exact(&h, &u0, t).unwrap();
        let propagator = expm(&h.to_complex().map(|z| z * c(0.0, -t)));
        let want = from_psi(&matvec(&propagator, &to_psi(&u0)));
        worst = worst.max(common::state_diff(&got, &want));
    }
    verdict(worst <= 1e-10, format!("max |Kähler − exp(−iHt)ψ| = {worst:.2e} (tol 1e-10, 200 instances)"))
}

fn c2_isomorphism() -> Verdict {
    let mut worst = 0.0_f64;
    for i in 0..100u64 {
        let mut rng = task_rng(102, i);
        let n = rng.gen_range(2..=8);
        let k = rng.gen_range(1..=4);
        let ops: Vec<ComplexOperator> = (0..k).map(|_| random_operator(&mut rng, n)).collect();
        let u = random_unit_state(&mut rng, n);
        let v = random_unit_state(&mut rng, n);
        let mut m = KahlerOperator::identity(n);
        let mut psi = to_psi(&u);
        for op in ops.iter().rev() {
            m = compose(&gamma_lift(op), &m).unwrap();
            psi = matvec(&op.to_complex(), &psi);
        }
        let mu = m.apply(&u).unwrap();
        let want = inner(&psi, &to_psi(&v));
        let g = metric_g(&mu, &v).unwrap();
        let w = symplectic_omega(&mu, &v).unwrap();
        worst = worst.max((g - want.re).abs().max((w - want.im).abs()));
    }
    verdict(worst <= 1e-11, format!("max |g + iω − ⟨L₁⋯L_k ψ, φ⟩| = {worst:.2e} (tol 1e-11, 100 instances)"))
}

fn c3_group_membership() -> Verdict {
    let mut worst = 0.0_f64;
    for i in 0..200u64 {
        let mut rng = task_rng(103, i);
        let n = rng.gen_range(1..=8);
        let r = unitarity_residuals(&gamma_lift(&random_unitary(&mut rng, n)));
        worst = worst.max(r.symplectic).max(r.orthogonal);
    }
    let mut rejected = 0;
    for i in 0..20u64 {
        let mut rng = task_rng(203, i);
        let n = rng.gen_range(1..=4);
        // diag(A, A⁻ᵀ) with A symmetric positive, A ≠ I: symplectic, not orthogonal.
        let b = RMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
        let a = RMatrix::identity(n, n) + &b * b.transpose() + RMatrix::identity(n, n) * rng.gen_range(0.5..2.0);
        let a_inv_t = a.clone().try_inverse().unwrap().transpose();
        let mut block = RMatrix::zeros(2 * n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&a);
        block.view_mut((n, n), (n, n)).copy_from(&a_inv_t);
        let s = KahlerOperator::from_block(block).unwrap();
        let r = unitarity_residuals(&s);
        let structure_rejects = matches!(gamma_lower(&s), Err(KahlerError::StructureViolation { .. }));
        if r.symplectic <= 1e-10 && (structure_rejects || r.orthogonal > 1e-12) {
            rejected += 1;
        }
    }
    verdict(
        worst <= 1e-12 && rejected == 20,
        format!("unitary lift residual {worst:.2e} (tol 1e-12, 200 instances); squeezes rejected {rejected}/20"),
    )
}

fn c4_real_expectations() -> Verdict {
    let mut worst = 0.0_f64;
    for i in 0..100u64 {
        let mut rng = task_rng(104, i);
        let n = rng.gen_range(1..=16);
        let m = gamma_lift(&random_hermitian(&mut rng, n));
        let u = random_unit_state(&mut rng, n);
        worst = worst.max(expectation(&m, &u).unwrap().omega_part.abs());
    }
    verdict(worst <= 1e-12, format!("max |ω(u, 𝓛u)| = {worst:.2e} (tol 1e-12, 100 instances)"))
}

fn c5_conservation() -> Verdict {
    let mut rng = task_rng(105, 0);
    let h = random_hermitian(&mut rng, 4);
    let u0 = random_unit_state(&mut rng, 4);
    let hs = split_hamiltonian(&h, 1e-12).unwrap();
    let traj = evolve_midpoint_strided(&hs, &u0, 100.0, 10_000, 10).unwrap();
    let r = conservation_report(&hs, &traj).unwrap();
    let exact = evolve_exact(&h, &u0, 100.0).unwrap();
    let e1 = common::state_diff(traj.last(), &exact);
    let fine = evolve_midpoint(&hs, &u0, 100.0, 20_000).unwrap();
    let e2 = common::state_diff(fine.last(), &exact);
    let ratio = e1 / e2;
    let pass = r.hsym_drift <= 1e-9
        && r.gnorm_drift <= 1e-10
        && r.symplectic_residual <= 1e-10
        && r.orthogonal_residual <= 1e-10
        && (3.2..=4.8).contains(&ratio);
    verdict(
        pass,
        format!(
            "H_sym drift {:.1e}, g-norm drift {:.1e}, symplectic {:.1e}, orthogonal {:.1e}, error ratio {ratio:.3}",
            r.hsym_drift, r.gnorm_drift, r.symplectic_residual, r.orthogonal_residual
        ),
    )
}

fn c6_ergodicity() -> Verdict {
    let f = Polynomial::q_squared_product(&[0, 1]);
    let opts = ErgodicityOptions { bound: 50, ..ErgodicityOptions::default() };
    let equal = KahlerState::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();

    let irr = ComplexOperator::diagonal(&[1.0, SQRT_2]);
    let a = ergodicity_experiment(&irr, &equal, &f, 1e4, &opts).unwrap();
    let ok_a = (a.time_average - 0.25).abs() <= 1e-2 && a.verdict.independent;

    let hs = split_hamiltonian(&irr, 1e-12).unwrap();
    let short = (time_average(&hs, &equal, &f, 1e2, 10_000).unwrap() - 0.25).abs();
    let ok_trend = a.gap < short;

    let res = ComplexOperator::diagonal(&[1.0, 1.0]);
    let b = ergodicity_experiment(&res, &equal, &f, 1e4, &opts).unwrap();
    let ok_b = (b.time_average - 0.375).abs() <= 5e-3
        && (b.gap - 0.125).abs() <= 1e-2
        && !b.verdict.independent
        && b.verdict.relation == Some(vec![1, -1]);
    verdict(
        ok_a && ok_b && ok_trend,
        format!(
            "λ=(1,√2): avg {:.5}, gap {:.1e} (T=1e2: {short:.1e}), independent={}; λ=(1,1): avg {:.5}, gap {:.4}, witness {:?}",
            a.time_average, a.gap, a.verdict.independent, b.time_average, b.gap, b.verdict.relation
        ),
    )
}

fn c7_commutator() -> Verdict {
    let grid = Grid1D::unit(-10.0, 10.0, 256).unwrap();
    let r = commutator_check(&grid, |x| gaussian_profile(x, 0.0, 1.0, 0.0), Stencil::Central2).unwrap();
    let ratio = r.ratio.unwrap_or(f64::NAN);
    verdict(
        r.residual_refined < 1e-3 && (3.2..=4.8).contains(&ratio),
        format!("residual at n=512 {:.2e} (tol 1e-3), ratio 256/512 = {ratio:.3}", r.residual_refined),
    )
}

fn c8_grid_oscillator() -> Verdict {
    let grid = Grid1D::unit(-10.0, 10.0, 512).unwrap();
    let v = Potential::Harmonic { omega: 1.0 }.sample(&grid).unwrap();
    let h = schrodinger_hamiltonian(&grid, &v).unwrap();
    let frame = normal_modes(&h).unwrap();
    let levels = max_dev(frame.lambdas.iter().take(5).enumerate().map(|(k, l)| l - (k as f64 + 0.5)));

    let hs = split_hamiltonian(&h, 1e-12).unwrap();
    let hc: CMatrix = h.to_complex();
    let mut worst = 0.0_f64;
    for i in 0..50u64 {
        let mut rng = task_rng(108, i);
        let (x0, sigma, k) = (rng.gen_range(-3.0..3.0), rng.gen_range(0.5..1.5), rng.gen_range(-2.0..2.0));
        let packet = GridKahlerState::gaussian(&grid, x0, sigma, k);
        let psi = to_psi(&packet.state);
        let oracle = 0.5 * grid.spacing() * inner(&psi, &matvec(&hc, &psi)).re;
        worst = worst.max((packet.hsym(&hs).unwrap() - oracle).abs());
    }
    verdict(
        levels <= 1e-2 && worst <= 1e-12,
        format!("max |λ_k − (k+½)| = {levels:.2e} (tol 1e-2); max |H_sym − ½⟨ψ|H|ψ⟩| = {worst:.2e} (tol 1e-12)"),
    )
}

fn max_dev(xs: impl Iterator<Item = f64>) -> f64 {
    xs.map(f64::abs).fold(0.0, f64::max)
}

fn c9_composite() -> Verdict {
    let dims_ok = [(2, 2), (2, 3)].iter().all(|&(m, n)| {
        tensor_dim_complex(m, n).unwrap().result_dim == 2 * m * n && tensor_dim_real(m, n).unwrap().result_dim == 4 * m * n
    });
    let sz = gamma_lift(&ComplexOperator::pauli_z());
    let bell = entangled_pair(EntangledKind::BellPhiPlus);
    let zz = expectation(&tensor_operator_complex(&sz, &sz).unwrap(), &bell).unwrap().g_part;
    let mut worst = 0.0_f64;
    for i in 0..50u64 {
        let mut rng = task_rng(109, i);
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a = random_hermitian(&mut rng, m);
        let b = random_hermitian(&mut rng, n);
        let u = random_unit_state(&mut rng, m);
        let v = random_unit_state(&mut rng, n);
        let joint = expectation(
            &tensor_operator_complex(&gamma_lift(&a), &gamma_lift(&b)).unwrap(),
            &tensor_state_complex(&u, &v),
        )
        .unwrap()
        .g_part;
        // Oracle: ⟨ψ⊗φ, (A⊗B)(ψ⊗φ)⟩ in ℂ^{mn}.
        let psi = kron(&to_psi(&u), &to_psi(&v));
        let ab = common::kron_mat(&a.to_complex(), &b.to_complex());
        let oracle = inner(&psi, &matvec(&ab, &psi)).re;
        let factored = expectation(&gamma_lift(&a), &u).unwrap().g_part * expectation(&gamma_lift(&b), &v).unwrap().g_part;
        worst = worst.max((joint - factored).abs()).max((joint - oracle).abs());
    }
    verdict(
        dims_ok && (zz - 1.0).abs() <= 1e-12 && worst <= 1e-12,
        format!("dims ok={dims_ok}; Bell ⟨σz⊗σz⟩ = {zz}; factorization residual {worst:.2e} (tol 1e-12, 50 instances)"),
    )
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run_cli(config: &Path, out: &Path, threads: usize) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_kahlerq"))
        .arg("run")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .expect("spawn kahlerq")
        .status
        .code()
        .unwrap_or(-1)
}

/// Every file in `dir`, with `wall_time_ms` removed from report.json.
/// File name and contents of every artifact, sorted by name.
type Snapshot = Vec<(String, Vec<u8>)>;

fn snapshot(dir: &Path) -> Snapshot {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let bytes = std::fs::read(&p).unwrap();
            let bytes = if name == "report.json" {
                String::from_utf8(bytes)
                    .unwrap()
                    .lines()
                    .filter(|l| !l.trim_start().starts_with("\"wall_time_ms\""))
                    .collect::<Vec<_>>()
                    .join("\n")
                    .into_bytes()
            } else {
                bytes
            };
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn c10_cli_determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut configs: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    configs.sort();
    let mut mismatched = Vec::new();
    for cfg in &configs {
        let stem = cfg.file_stem().unwrap().to_string_lossy().into_owned();
        let runs: Vec<(i32, Snapshot)> = [(1, "a"), (1, "b"), (4, "c")]
            .iter()
            .map(|(threads, tag)| {
                let out = tmp.path().join(format!("{stem}-{tag}"));
                let code = run_cli(cfg, &out, *threads);
                (code, snapshot(&out))
            })
            .collect();
        let same = runs.iter().all(|r| r.0 == 0 && r.1 == runs[0].1);
        if !same {
            mismatched.push(stem);
        }
    }
    verdict(
        mismatched.is_empty(),
        format!("{} configs, 2 runs at 1 thread + 1 run at 4 threads; mismatched: {mismatched:?}", configs.len()),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict, Option<Duration>);
    let criteria: [Criterion; 10] = [
        ("equivalence with exp(-iHt)", c1_equivalence, Some(Duration::from_secs(30))),
        ("lift isomorphism (sandwich identity)", c2_isomorphism, None),
        ("U(N) = Sp(2N) ∩ O(2N)", c3_group_membership, None),
        ("reality of expectations", c4_real_expectations, None),
        ("conservation under implicit midpoint", c5_conservation, None),
        ("ergodicity at desk scale", c6_ergodicity, Some(Duration::from_secs(60))),
        ("commutator law [P,Q] = -J", c7_commutator, None),
        ("grid harmonic oscillator", c8_grid_oscillator, None),
        ("composite systems", c9_composite, None),
        ("CLI determinism", c10_cli_determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut v = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > *limit {
                v.pass = false;
                v.detail.push_str(&format!("; over time limit {limit:?}"));
            }
        }
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("{status} [{:>2}] {name}: {} ({:.2}s)", i + 1, v.detail, elapsed.as_secs_f64());
        if !v.pass {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
