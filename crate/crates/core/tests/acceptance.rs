// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! The process exits with status 0 after reporting; set
//! `GLTAU_ACCEPTANCE_STRICT=1` to turn any failure into a non-zero exit.
//! `GLTAU_ACCEPTANCE_ONLY=3,7` runs a subset.

use std::time::{Duration, Instant};

use gltau::linalg::CMat;
use gltau::model::validate_params;
use gltau::rng::replica_rng;
use gltau::scalar::{c, C};
use gltau::sim::{
    estimate_all_brackets, evaluate_word, simulate_replica, simulate_with_inverse_tracking,
    DetMatrix, Orientation, Scheme, TrajectoryConfig,
};
use gltau::spectral::{
    hs_trace, spectrum_inclusion_check, variance_scan, weak_convergence_scan, InclusionConfig,
    McSettings, SelfAdjointPoly, SmoothFunction,
};
use gltau::trace::{
    basis_moments, build_generator, build_generator_for, expectation_trace, necklaces,
    parse_trace_polynomial, Letter, Size, TraceProduct, Variant,
};
use gltau::{Params, Result};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn params(lambda: f64, tau: C<f64>) -> Params {
    validate_params(lambda, tau, &[1.0]).expect("admissible")
}

/// Complex sample mean and its standard error `sqrt(E|X - μ|² / n)`.
fn mean_se(values: &[C<f64>]) -> (C<f64>, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<C<f64>>() / n;
    let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn second_moment_closed_form(n: f64, t: f64) -> f64 {
    (-t).exp() * (t / n).cosh() - (-t).exp() * n * (t / n).sinh()
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let p = parse_trace_polynomial("tr(g1 g1)")?;
    let prm = params(1.0, c(0.0, 0.0));
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 4, 8] {
        let op = build_generator_for(&p, &prm, Size::Finite(n))?;
        for t in [0.5, 1.0, 2.0] {
            let v = expectation_trace(&p, t, &op)?;
            worst = worst.max((v - c(second_moment_closed_form(n as f64, t), 0.0)).norm());
        }
    }
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: worst <= 1e-9 && elapsed < Duration::from_secs(5),
        detail: format!("max |error| = {worst:.2e} (tol 1e-9), {elapsed:.2?} (limit 5 s)"),
    })
}

fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let p = parse_trace_polynomial("tr(g1 g1)")?;
    let op = build_generator_for(&p, &params(1.0, c(0.0, 0.0)), Size::Infinite)?;
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        let v = expectation_trace(&p, t, &op)?;
        worst = worst.max((v - c((-t).exp() * (1.0 - t), 0.0)).norm());
    }
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: worst <= 1e-9 && elapsed < Duration::from_secs(1),
        detail: format!("max |error| = {worst:.2e} (tol 1e-9), {elapsed:.2?} (limit 1 s)"),
    })
}

fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let ns = [8usize, 16, 32, 64];
    let mut pass = true;
    let mut parts = Vec::new();
    for (text, d) in [("tr(g1 g1)", 2), ("tr(g1 g1* g1 g1*)", 4)] {
        let p = parse_trace_polynomial(text)?;
        for (name, prm) in [
            ("(1,0)", params(1.0, c(0.0, 0.0))),
            ("(1,1)", params(1.0, c(1.0, 0.0))),
        ] {
            let scan = weak_convergence_scan(&p, 1.0, &prm, &ns, Some(d))?;
            match &scan.fit {
                Some(fit) => {
                    let ok = (fit.slope + 2.0).abs() <= 0.05;
                    pass &= ok;
                    parts.push(format!("{text} {name}: slope {:.4}", fit.slope));
                    println!(
                        "    [{}] {text} at {name}: slope {:.4} (gaps {})",
                        if ok { "PASS" } else { "FAIL" },
                        fit.slope,
                        scan.points
                            .iter()
                            .map(|p| format!("{:.3e}", p.2))
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                }
                None => {
                    let max_gap = scan.points.iter().map(|p| p.2).fold(0.0, f64::max);
                    parts.push(format!("{text} {name}: gap identically 0"));
                    println!(
                        "    [SKIP] {text} at {name}: gap identically zero (max {max_gap:.1e}), no slope to fit"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    Ok(Outcome {
        pass,
        detail: format!("{}; {elapsed:.2?} (limit 60 s)", parts.join("; ")),
    })
}

fn criterion_4() -> Result<Outcome> {
    let start = Instant::now();
    let poly = SelfAdjointPoly::parse("g1 + g1*")?;
    let f = SmoothFunction::mollified_indicator(&[(-1.0, 9.0)], 0.5)?;
    let settings = McSettings {
        scheme: Scheme::Geometric,
        dt: Some(0.1),
    };
    let no_det = |_: usize| -> Result<Vec<DetMatrix<f64>>> { Ok(Vec::new()) };
    let scan = variance_scan(
        &poly,
        &f,
        &params(1.0, c(1.0, 0.0)),
        1.0,
        &[16, 32, 64, 128],
        4000,
        404,
        settings,
        &no_det,
    )?;
    for p in &scan.points {
        println!(
            "    N = {:>3}: mean {:.5}, variance {:.4e} (ln-se {:.3})",
            p.n, p.mean, p.variance, p.log_se
        );
    }
    let elapsed = start.elapsed();
    Ok(match scan.fit {
        Some(fit) => Outcome {
            pass: (fit.slope + 2.0).abs() <= 0.3,
            detail: format!(
                "slope {:.3} (95% CI [{:.3}, {:.3}]), target -2.0 +- 0.3, {elapsed:.1?}",
                fit.slope, fit.ci.0, fit.ci.1
            ),
        },
        None => Outcome {
            pass: false,
            detail: "variance vanished, no slope".into(),
        },
    })
}

fn criterion_5() -> Result<Outcome> {
    let start = Instant::now();
    let n = 16;
    let reps = 20_000u64;
    let words: Vec<_> = (1..=3).flat_map(|len| necklaces(1, len)).collect();
    let mut pass = true;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut details = Vec::new();
    for (name, prm, seed) in [
        ("(1,0)", params(1.0, c(0.0, 0.0)), 501u64),
        ("(1,1)", params(1.0, c(1.0, 0.0)), 502u64),
    ] {
        let op = build_generator(1, 3, &prm, Size::Finite(n))?;
        let exact = basis_moments(1.0, &op)?;
        let config = TrajectoryConfig::new(n, prm.clone(), 1.0, seed)
            .with_dt(1e-3)
            .with_scheme(Scheme::ItoEuler);
        let per_replica: Vec<Vec<C<f64>>> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let s = simulate_replica(&config, r)?.pop().expect("snapshot");
                words
                    .iter()
                    .map(|w| Ok(evaluate_word(w.letters(), &s)?.trace_normalized()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut failures = 0;
        let mut worst = (0.0, String::new());
        for (k, w) in words.iter().enumerate() {
            let values: Vec<C<f64>> = per_replica.iter().map(|v| v[k]).collect();
            let (mean, se) = mean_se(&values);
            let pos = op
                .basis
                .position(&TraceProduct::single(w.letters()))
                .expect("word in basis");
            let gap = (mean - exact[pos]).norm();
            let bound = 3.0 * se + 0.02;
            worst_excess = worst_excess.max(gap - bound);
            if gap > bound {
                failures += 1;
                println!("    [FAIL] {name} tr({w}): MC {mean:.4} vs exact {:.4}, gap {gap:.4} > {bound:.4}", exact[pos]);
            }
            if gap / bound > worst.0 {
                worst = (gap / bound, format!("tr({w})"));
            }
        }
        pass &= failures == 0;
        details.push(format!(
            "{name}: {}/{} words within bound, worst gap/bound {:.2} at {}",
            words.len() - failures,
            words.len(),
            worst.0,
            worst.1
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(20 * 60);
    Ok(Outcome {
        pass,
        detail: format!("{}; {elapsed:.1?} (limit 20 min)", details.join("; ")),
    })
}

fn criterion_6() -> Result<Outcome> {
    let prm = params(1.0, c(0.0, 0.0));
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 4, 8, 16, 32, 64, 128] {
        let config = TrajectoryConfig::new(n, prm.clone(), 1.0, 600 + n as u64)
            .with_track_inverse(false)
            .with_snapshots(vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        for s in simulate_replica(&config, 0)? {
            let g = &s.processes[0].g;
            worst = worst.max(g.matmul(&g.adjoint()).distance_to_identity());
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-10,
        detail: format!(
            "max ||G G* - I||_F over N <= 128 and 5 snapshots = {worst:.2e} (tol 1e-10)"
        ),
    })
}

fn criterion_7() -> Result<Outcome> {
    let n = 16;
    let replicas = 8u64;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, prm) in [
        ("(1,0)", params(1.0, c(0.0, 0.0))),
        ("(1,1)", params(1.0, c(1.0, 0.0))),
    ] {
        let mut errors = Vec::new();
        for dt in [1e-2, 1e-3, 1e-4] {
            let config = TrajectoryConfig::new(n, prm.clone(), 1.0, 707)
                .with_dt(dt)
                .with_scheme(Scheme::ItoEuler);
            let mut sum = 0.0;
            for r in 0..replicas {
                let (_, report) =
                    simulate_with_inverse_tracking(&config, &mut replica_rng(707, r))?;
                sum += report.max_defect;
            }
            errors.push(sum / replicas as f64);
        }
        let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
        let ok = ratios.iter().all(|r| (5.0..=20.0).contains(r));
        pass &= ok;
        parts.push(format!(
            "{name}: errors {:.3e}, {:.3e}, {:.3e}; ratios {:.2}, {:.2}",
            errors[0], errors[1], errors[2], ratios[0], ratios[1]
        ));
    }
    Ok(Outcome {
        pass,
        detail: format!("{} (target ratios in [5, 20])", parts.join("; ")),
    })
}

fn criterion_8() -> Result<Outcome> {
    let start = Instant::now();
    let prm = params(1.0, c(0.5, 0.3));
    let estimates = estimate_all_brackets(&prm, 32, 1e-3, 10_000, &mut replica_rng(808, 0))?;
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for e in &estimates {
        let z = e.z_score();
        worst = worst.max(z);
        if z > 4.0 {
            bad += 1;
            println!(
                "    [FAIL] ({:?}, {:?}): fitted {:.4} vs {:.4}, z = {z:.2}",
                e.eps1, e.eps2, e.coefficient, e.expected
            );
        }
    }
    Ok(Outcome {
        pass: bad == 0,
        detail: format!(
            "{}/16 cells within 4 SE, max z = {worst:.2}, {:.1?}",
            16 - bad,
            start.elapsed()
        ),
    })
}

fn criterion_9() -> Result<Outcome> {
    let start = Instant::now();
    use Variant::*;
    let g = |v| Letter::process(0, v);
    let words: Vec<Vec<Letter>> = vec![
        vec![g(Id)],
        vec![g(Inv)],
        vec![g(Id), g(Id)],
        vec![g(Id), g(Star)],
        vec![g(Id), g(InvStar)],
        vec![g(Id), g(Id), g(Star)],
        vec![g(Inv), g(Id), g(Id)],
        vec![g(Id), g(Star), g(Id), g(Star)],
        vec![g(Id), g(Id), g(Star), g(Star)],
        vec![g(Id), g(Inv), g(Star), g(Id)],
    ];
    let n = 32;
    let reps = 10_000u64;
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for (name, prm) in [
        ("(1,0)", params(1.0, c(0.0, 0.0))),
        ("(1,1)", params(1.0, c(1.0, 0.0))),
    ] {
        let run = |orientation: Orientation, seed: u64| -> Result<Vec<Vec<C<f64>>>> {
            let config = TrajectoryConfig::new(n, prm.clone(), 1.0, seed)
                .with_dt(0.05)
                .with_orientation(orientation)
                .with_track_inverse(false);
            (0..reps)
                .into_par_iter()
                .map(|r| {
                    let s = simulate_replica(&config, r)?.pop().expect("snapshot");
                    words
                        .iter()
                        .map(|w| Ok(evaluate_word(w, &s)?.trace_normalized()))
                        .collect::<Result<Vec<_>>>()
                })
                .collect()
        };
        let left = run(Orientation::LeftInvariant, 901)?;
        let right = run(Orientation::RightInvariant, 902)?;
        for (k, w) in words.iter().enumerate() {
            let (ml, sl) = mean_se(&left.iter().map(|v| v[k]).collect::<Vec<_>>());
            let (mr, sr) = mean_se(&right.iter().map(|v| v[k]).collect::<Vec<_>>());
            let z = (ml - mr).norm() / sl.hypot(sr);
            worst = worst.max(z);
            if z > 4.0 {
                bad += 1;
                let text: Vec<String> = w.iter().map(|l| l.to_string()).collect();
                println!(
                    "    [FAIL] {name} tr({}): left {ml:.4} right {mr:.4}, z = {z:.2}",
                    text.join(" ")
                );
            }
        }
    }
    Ok(Outcome {
        pass: bad == 0,
        detail: format!(
            "{}/20 (word, parameter) pairs within 4 combined SE, max z = {worst:.2}, {:.1?}",
            20 - bad,
            start.elapsed()
        ),
    })
}

fn criterion_10() -> Result<Outcome> {
    let bumps = [
        SmoothFunction::bump(0.0, 3.0, 1.0)?,
        SmoothFunction::bump(0.5, 1.0, 1.0)?,
        SmoothFunction::bump(-1.0, 0.7, 2.0)?,
    ];
    let mut rng = replica_rng(1010, 0);
    let gue = |n: usize, rng: &mut _| -> CMat<f64> {
        gltau::model::sample_hermitian_increment::<f64, _>(n, 1.0, rng)
            .expect("valid")
            .matrix
    };
    let mats = vec![
        (
            "diag N=8",
            CMat::from_diag(
                &(0..8)
                    .map(|i| c(-2.0 + 0.5 * i as f64, 0.0))
                    .collect::<Vec<_>>(),
            ),
        ),
        ("GUE N=32", gue(32, &mut rng)),
        ("GUE N=64", gue(64, &mut rng)),
    ];
    let mut worst: f64 = 0.0;
    for f in &bumps {
        for (name, h) in &mats {
            let r = hs_trace(f, 3, h)?;
            let err = (r.value - r.eigen_sum).abs();
            worst = worst.max(err);
            if err > 1e-4 {
                println!(
                    "    [FAIL] {f:?} on {name}: {:.6} vs {:.6}",
                    r.value, r.eigen_sum
                );
            }
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-4,
        detail: format!(
            "max |HS - eigenvalue sum| over 3 bumps x 3 matrices = {worst:.2e} (tol 1e-4)"
        ),
    })
}

fn criterion_11() -> Result<Outcome> {
    let start = Instant::now();
    let poly = SelfAdjointPoly::parse("g1 + g1* + a1")?;
    let det = |n: usize| -> Result<Vec<DetMatrix<f64>>> {
        let d: Vec<C<f64>> = (0..n)
            .map(|i| c(if i < n / 2 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        Ok(vec![DetMatrix::new(CMat::from_diag(&d))])
    };
    let config = InclusionConfig {
        n_small: 64,
        n_ref: 256,
        delta: 0.1,
        trials: 20,
        ref_trials: 20,
        seed: 1111,
    };
    let settings = McSettings {
        scheme: Scheme::Geometric,
        dt: Some(0.05),
    };
    let r = spectrum_inclusion_check(
        &poly,
        &params(1.0, c(1.0, 0.0)),
        1.0,
        config,
        settings,
        &det,
    )?;
    Ok(Outcome {
        pass: r.outliers == 0,
        detail: format!(
            "{} of {} eigenvalues outside the reference (max excess {:.3}); N=64 range [{:.3}, {:.3}], N=256 range [{:.3}, {:.3}]; {:.1?}",
            r.outliers,
            r.eigenvalues_checked,
            r.max_excess,
            r.small_range.0,
            r.small_range.1,
            r.reference_range.0,
            r.reference_range.1,
            start.elapsed()
        ),
    })
}

fn criterion_12() -> Result<Outcome> {
    let p = parse_trace_polynomial("tr(g1 g1^-1)")?;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for tau in [
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.5, 0.3),
        c(1.0, 0.5),
        c(2.0, 0.0),
    ] {
        let prm = params(1.0, tau);
        for size in [
            Size::Finite(1),
            Size::Finite(2),
            Size::Finite(16),
            Size::Infinite,
        ] {
            let closure = build_generator_for(&p, &prm, size)?;
            let full = build_generator(1, 2, &prm, size)?;
            for t in [0.5, 1.0, 2.0] {
                for op in [&closure, &full] {
                    let v = expectation_trace(&p, t, op)?;
                    worst = worst.max((v - c(1.0, 0.0)).norm());
                    cases += 1;
                }
            }
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-9,
        detail: format!("max |E tr(X X^-1) - 1| = {worst:.2e} over {cases} cases (tol 1e-9)"),
    })
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "exact finite-N second moment vs closed form",
            criterion_1,
        ),
        (2, "free-limit second moment", criterion_2),
        (3, "noise-free weak convergence rate", criterion_3),
        (4, "variance scaling of tr f(PP*)", criterion_4),
        (5, "simulator vs exact generator", criterion_5),
        (6, "unitarity of the geometric scheme", criterion_6),
        (7, "inverse tracking of the Ito-Euler pair", criterion_7),
        (8, "bracket oracle vs covariation table", criterion_8),
        (9, "left/right equality in law", criterion_9),
        (10, "Helffer-Sjostrand identity", criterion_10),
        (11, "spectrum inclusion proxy", criterion_11),
        (12, "inversion relation under the flow", criterion_12),
    ];
    let only: Option<Vec<u32>> = std::env::var("GLTAU_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let strict = std::env::var("GLTAU_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let (mut passed, mut failed) = (0, 0);
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        if outcome.pass {
            passed += 1;
        } else {
            failed += 1;
        }
        println!(
            "[{tag}] criterion {id:>2}: {name}: {} [{:.1?}]",
            outcome.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
