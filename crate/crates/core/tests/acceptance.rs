//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{dmatrix, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dmd_sysid::dmd::{dmd_matrix, TrajectoryData};
use dmd_sysid::experiments::{
    build_block_system, run_convergence_study, run_reachable_experiment, run_recovery_study,
    ExperimentConfig,
};
use dmd_sysid::linalg::{numerical_rank, trimmed_svd, Matrix, Vector};
use dmd_sysid::rk::{builtin_tableau, discretization_matrix, BUILTIN_TABLEAUS, DEFAULT_LADDER};
use dmd_sysid::sysident::demonstrate_heun_ambiguity;
use dmd_sysid::transform::{
    conjugated_dmd, transform_trajectory, verify_pseudoinverse_identity, Transformation,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    random_matrix(rng, n, n).qr().q()
}

fn trajectory(a: &Matrix, x0: &Vector, steps: usize) -> TrajectoryData {
    let mut xs = vec![x0.clone()];
    for i in 0..steps {
        let next = a * &xs[i];
        xs.push(next);
    }
    TrajectoryData::new(xs, 1.0, "acceptance").unwrap()
}

fn max_entry(m: &Matrix) -> f64 {
    m.abs().max()
}

fn worked_example() -> Outcome {
    let data = TrajectoryData::new(
        (0..3)
            .map(|i| Vector::from_vec(vec![i as f64 + 1.0, 0.0]))
            .collect(),
        1.0,
        "worked",
    )
    .map_err(|e| e.to_string())?;
    let t = Transformation::new(dmatrix![1.0, 0.0; 1.0, 1.0]).map_err(|e| e.to_string())?;

    let a = dmd_matrix(&data, None).map_err(|e| e.to_string())?.a_dmd;
    let transformed = transform_trajectory(&t, &data).map_err(|e| e.to_string())?;
    let a_t = dmd_matrix(&transformed, None)
        .map_err(|e| e.to_string())?
        .a_dmd;
    let back = conjugated_dmd(&t, &data, None).map_err(|e| e.to_string())?;

    let errs = [
        max_entry(&(a - dmatrix![8.0, 0.0; 0.0, 0.0] / 5.0)),
        max_entry(&(a_t - dmatrix![4.0, 4.0; 4.0, 4.0] / 5.0)),
        max_entry(&(back - dmatrix![8.0, 4.0; 0.0, 0.0] / 5.0)),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 1e-12, format!("max entry error {worst:.2e}"))
}

fn pseudoinverse_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=20);
        let m = rng.random_range(1..=20);
        let r = rng.random_range(1..=n.min(m));
        let x = random_matrix(&mut rng, n, r) * random_matrix(&mut rng, r, m);
        let t = loop {
            let cand =
                Matrix::identity(n, n) + random_matrix(&mut rng, n, n) * (0.5 / (n as f64).sqrt());
            if let Ok(t) = Transformation::new(cand) {
                break t;
            }
        };
        let residual =
            verify_pseudoinverse_identity(&x, &t, Some(1e-10)).map_err(|e| e.to_string())?;
        worst_ratio = worst_ratio.max(residual / (1e-10 * m as f64));
    }
    ensure(
        worst_ratio <= 1.0,
        format!("worst residual / (1e-10 m) = {worst_ratio:.2e}"),
    )
}

fn discrete_identification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(2..=15);
        let a = random_orthogonal(&mut rng, n) * rng.random_range(0.9..1.1);
        let x0 = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let data = trajectory(&a, &x0, 3 * n);
        let (x, _) = dmd_sysid::dmd::build_data_matrices(&data).map_err(|e| e.to_string())?;
        if numerical_rank(&x, None).map_err(|e| e.to_string())? < n {
            return Err("sampled pair is not controllable".into());
        }
        let model = dmd_matrix(&data, None).map_err(|e| e.to_string())?;
        worst = worst.max((&model.a_dmd - &a).norm() / a.norm());
    }

    let mut worst_deficient: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(3..=15);
        let r = rng.random_range(1..n);
        // Invariant r-dimensional subspace spanned by the first columns of q;
        // the contractive complement block keeps round-off from leaving it.
        let q = random_orthogonal(&mut rng, n);
        let mut block = DMatrix::zeros(n, n);
        block
            .view_mut((0, 0), (r, r))
            .copy_from(&random_orthogonal(&mut rng, r));
        block
            .view_mut((0, r), (r, n - r))
            .copy_from(&random_matrix(&mut rng, r, n - r));
        block
            .view_mut((r, r), (n - r, n - r))
            .copy_from(&(random_orthogonal(&mut rng, n - r) * 0.5));
        let a = &q * block * q.transpose();
        let x0 = q.columns(0, r) * Vector::from_fn(r, |_, _| rng.random_range(-1.0..1.0));
        let data = trajectory(&a, &x0, 3 * n);
        let model = dmd_matrix(&data, Some(1e-10)).map_err(|e| e.to_string())?;
        if model.rank != r {
            return Err(format!("expected rank {r}, got {}", model.rank));
        }
        let (x, _) = dmd_sysid::dmd::build_data_matrices(&data).map_err(|e| e.to_string())?;
        let u = trimmed_svd(&x, Some(1e-10)).map_err(|e| e.to_string())?.u;
        let target = &a * &u * u.transpose();
        worst_deficient = worst_deficient.max((&model.a_dmd - target).norm() / a.norm());
    }
    ensure(
        worst <= 1e-9 && worst_deficient <= 1e-9,
        format!("full rank {worst:.2e}, rank deficient {worst_deficient:.2e}"),
    )
}

fn reachable_space_experiment() -> Outcome {
    let config = ExperimentConfig::default();
    let report = run_reachable_experiment(&config).map_err(|e| e.to_string())?;
    let s = &report.summary;
    let mut failures = Vec::new();
    if s.snapshot_rank != 5 {
        failures.push(format!("snapshot rank {}", s.snapshot_rank));
    }

    // Independent check: closed-form flow and explicit conjugation.
    let system = build_block_system(config.blocks).map_err(|e| e.to_string())?;
    let data = TrajectoryData::new(
        (0..=config.steps)
            .map(|i| system.flow(i as f64 * config.h) * system.default_initial_value())
            .collect(),
        config.h,
        "reference",
    )
    .map_err(|e| e.to_string())?;
    let model = dmd_matrix(&data, None).map_err(|e| e.to_string())?;
    let t = Transformation::upper_bidiagonal_ones(system.dim());
    let conj = conjugated_dmd(&t, &data, None).map_err(|e| e.to_string())?;
    let reachable_start = &report.u1 * Vector::from_element(report.u1.ncols(), 1.0);
    let complement_start = &report.u2 * Vector::from_element(report.u2.ncols(), 1.0);

    let (mut inside, mut outside, mut same, mut gap, mut peak) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let (mut p, mut q, mut pc, mut qc) = (
        reachable_start.clone(),
        complement_start.clone(),
        reachable_start.clone(),
        complement_start.clone(),
    );
    for i in 1..=config.steps {
        p = &model.a_dmd * p;
        q = &model.a_dmd * q;
        pc = &conj * pc;
        qc = &conj * qc;
        let exact = system.flow(i as f64 * config.h) * &reachable_start;
        peak = peak.max(exact.norm());
        inside = inside.max((&p - &exact).norm());
        outside = outside.max(q.norm());
        same = same.max((&p - &pc).norm());
        gap = gap.max((&q - &qc).norm());
    }
    let scale = peak.max(reachable_start.norm()).max(1.0);
    if inside / scale > 1e-8 {
        failures.push(format!("inside error {:.2e}", inside / scale));
    }
    if outside > 1e-10 {
        failures.push(format!("complement not annihilated {outside:.2e}"));
    }
    if same / scale > 1e-8 {
        failures.push(format!("transformed mismatch {:.2e}", same / scale));
    }
    if gap <= 1e-3 {
        failures.push(format!("gap {gap:.2e}"));
    }
    if !s.passed() {
        failures.push(format!(
            "experiment check failed: {:?}",
            s.first_failure().map(|c| &c.name)
        ));
    }
    let detail = format!(
        "rank {}, inside {:.1e}, complement {:.1e}, transformed {:.1e}, gap {:.3}",
        s.snapshot_rank,
        inside / scale,
        outside,
        same / scale,
        gap
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join(", ")))
    }
}

fn convergence_slopes() -> Outcome {
    let config = ExperimentConfig::default();
    let bands = [
        ("explicit-euler", 0.85, 1.15),
        ("heun", 1.8, 2.2),
        ("implicit-midpoint", 1.8, 2.2),
        ("rk4", 3.7, 4.3),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, lo, hi) in bands {
        let table =
            run_convergence_study(&config, name, &DEFAULT_LADDER).map_err(|e| e.to_string())?;
        match table.slope {
            Some(s) => {
                ok &= (lo..=hi).contains(&s);
                parts.push(format!("{name} {s:.3}"));
            }
            None => {
                ok = false;
                parts.push(format!("{name} no slope"));
            }
        }
    }
    ensure(ok, parts.join(", "))
}

fn continuous_recovery() -> Outcome {
    let rows = run_recovery_study(&ExperimentConfig::default());
    let mut parts = Vec::new();
    let mut ok = true;
    for (method, bound) in [
        ("explicit-euler", 1e-8),
        ("implicit-euler", 1e-8),
        ("implicit-midpoint", 1e-8),
        ("exact-sampling", 1e-7),
    ] {
        match rows
            .iter()
            .find(|r| r.method == method)
            .and_then(|r| r.relative_error)
        {
            Some(e) => {
                ok &= e <= bound;
                parts.push(format!("{method} {e:.1e}"));
            }
            None => {
                ok = false;
                parts.push(format!("{method} missing"));
            }
        }
    }
    ensure(ok, parts.join(", "))
}

fn heun_ambiguity() -> Outcome {
    let mut worst: f64 = 0.0;
    for h in [0.1, 0.5, 1.0] {
        let w = demonstrate_heun_ambiguity(h).map_err(|e| e.to_string())?;
        // Oracle: the Heun polynomial 1 + hF + (hF)^2 / 2 at both points.
        let poly = |f: f64| 1.0 + h * f + (h * f).powi(2) / 2.0;
        worst = worst
            .max(w.discrepancy)
            .max((w.a_h1 - poly(w.f1)).abs())
            .max((w.a_h2 - poly(w.f2)).abs());
    }
    ensure(worst <= 1e-14, format!("max discrepancy {worst:.1e}"))
}

fn closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let explicit = builtin_tableau("explicit-euler").map_err(|e| e.to_string())?;
    let implicit = builtin_tableau("implicit-euler").map_err(|e| e.to_string())?;
    let (mut worst_closed, mut worst_comm) = (0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let n = rng.random_range(1..=8);
        let f = random_matrix(&mut rng, n, n);
        let h = rng.random_range(0.01..0.5);
        let id = Matrix::identity(n, n);

        let fwd = discretization_matrix(&explicit, &f, h)
            .map_err(|e| e.to_string())?
            .a_h;
        let fwd_ref = &id + &f * h;
        worst_closed = worst_closed.max((fwd - &fwd_ref).norm() / fwd_ref.norm());

        let bwd = discretization_matrix(&implicit, &f, h)
            .map_err(|e| e.to_string())?
            .a_h;
        let bwd_ref = (&id - &f * h).try_inverse().ok_or("I - hF singular")?;
        worst_closed = worst_closed.max((bwd - &bwd_ref).norm() / bwd_ref.norm());

        for name in BUILTIN_TABLEAUS {
            let tab = builtin_tableau(name).map_err(|e| e.to_string())?;
            let a_h = discretization_matrix(&tab, &f, h)
                .map_err(|e| e.to_string())?
                .a_h;
            let comm = (&a_h * &f - &f * &a_h).norm() / (a_h.norm() * f.norm()).max(1.0);
            worst_comm = worst_comm.max(comm);
        }
    }
    ensure(
        worst_closed <= 1e-12 && worst_comm <= 1e-10,
        format!("closed forms {worst_closed:.1e}, commutator {worst_comm:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: "AC1",
            title: "2x2 worked example",
            budget: Duration::from_millis(100),
            run: worked_example,
        },
        Criterion {
            id: "AC2",
            title: "pseudoinverse projector identity",
            budget: Duration::from_secs(5),
            run: pseudoinverse_identity,
        },
        Criterion {
            id: "AC3",
            title: "discrete identification",
            budget: Duration::from_secs(10),
            run: discrete_identification,
        },
        Criterion {
            id: "AC4",
            title: "reachable-space experiment",
            budget: Duration::from_secs(1),
            run: reachable_space_experiment,
        },
        Criterion {
            id: "AC5",
            title: "convergence slopes",
            budget: Duration::from_secs(10),
            run: convergence_slopes,
        },
        Criterion {
            id: "AC6",
            title: "continuous recovery",
            budget: Duration::from_secs(5),
            run: continuous_recovery,
        },
        Criterion {
            id: "AC7",
            title: "Heun ambiguity witness",
            budget: Duration::from_millis(100),
            run: heun_ambiguity,
        },
        Criterion {
            id: "AC8",
            title: "Runge-Kutta closed forms",
            budget: Duration::from_secs(5),
            run: closed_forms,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {:?}", c.budget)),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {} {}: {} [{:.3} s]",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.title,
            detail,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
