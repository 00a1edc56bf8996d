// SPDX-License-Identifier: Apache-2.0

//! Dispatch of each experiment kind to the library pipelines.

use std::path::Path;

use gltau::rng::{derive_seed, replica_rng};
use gltau::sim::{
    default_dt, estimate_all_brackets, simulate_replica, DetMatrix, GlSample, TrajectoryConfig,
};
use gltau::spectral::{
    hs_trace, replica_spectrum, spectrum_inclusion_check, variance_scan, weak_convergence_scan,
    InclusionConfig, McSettings, SelfAdjointPoly,
};
use gltau::trace::{
    basis_dimension, build_generator, build_generator_for, closure_basis, evaluate_on_sample,
    expectation_trace, parse_trace_polynomial, Size, TracePolynomial, BASIS_CAP,
};
use gltau::{Error, Params, Result};
use num_complex::Complex;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Kind};
use crate::output::{num, Table};

/// Everything a run produces apart from the files' digests.
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub seeds: Value,
    pub summary: Value,
}

/// Resolved inputs shared by every kind.
pub struct Context<'a> {
    pub kind: Kind,
    pub config: &'a ExperimentConfig,
    pub seed: u64,
    /// Directory against which relative paths in the config resolve.
    pub base: &'a Path,
}

fn size_seed(seed: u64, n: usize) -> u64 {
    derive_seed(seed, n as u64)
}

fn size_label(size: Size) -> String {
    match size {
        Size::Finite(n) => n.to_string(),
        Size::Infinite => "inf".into(),
    }
}

impl Context<'_> {
    fn trace_poly(&self) -> Result<TracePolynomial<f64>> {
        parse_trace_polynomial(self.config.polynomial()?)
    }

    fn matrix_poly(&self) -> Result<SelfAdjointPoly<f64>> {
        SelfAdjointPoly::parse(self.config.polynomial()?)
    }

    fn arity(&self, poly_arity: usize) -> usize {
        poly_arity.max(self.config.p.unwrap_or(1)).max(1)
    }

    fn settings(&self) -> Result<McSettings> {
        Ok(McSettings {
            scheme: self.config.scheme()?,
            dt: self.config.dt,
        })
    }

    fn trajectory(
        &self,
        params: &Params,
        n: usize,
        t_final: f64,
        snapshots: Vec<f64>,
        track: bool,
    ) -> Result<TrajectoryConfig<f64>> {
        let dt = self.config.dt.unwrap_or_else(|| default_dt(t_final));
        let dt = if t_final > 0.0 { dt.min(t_final) } else { dt };
        let cfg = TrajectoryConfig::new(n, params.clone(), t_final, size_seed(self.seed, n))
            .with_dt(dt)
            .with_scheme(self.config.scheme()?)
            .with_orientation(self.config.orientation()?)
            .with_snapshots(snapshots)
            .with_track_inverse(track);
        cfg.validate()?;
        Ok(cfg)
    }

    fn det(&self, n: usize) -> Result<Vec<DetMatrix<f64>>> {
        self.config.deterministic(self.base, n)
    }

    fn sorted_times(&self) -> Result<Vec<f64>> {
        let mut t = self.config.times()?;
        t.sort_by(f64::total_cmp);
        t.dedup();
        Ok(t)
    }

    fn size_seeds(&self, sizes: &[usize]) -> Value {
        let per: serde_json::Map<String, Value> = sizes
            .iter()
            .map(|&n| (n.to_string(), json!(size_seed(self.seed, n))))
            .collect();
        json!({ "base": self.seed, "per_size": per })
    }
}

/// Validates the configuration and predicts the work without computing.
pub fn plan(ctx: &Context) -> Result<Value> {
    let cfg = ctx.config;
    cfg.check_deterministic(ctx.base)?;
    let sizes = cfg.sizes();
    let times = cfg.times()?;
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let steps = |t: f64| -> u64 {
        if t <= 0.0 {
            0
        } else {
            (t / cfg.dt.unwrap_or_else(|| default_dt(t))).ceil() as u64
        }
    };
    let mut out = json!({ "kind": ctx.kind.name(), "seed": ctx.seed });
    match ctx.kind {
        Kind::Moments | Kind::Compare | Kind::ConvergenceScan => {
            let p = ctx.trace_poly()?;
            let params = cfg.params(ctx.arity(p.arity()))?;
            let dim = match cfg.d {
                Some(d) => {
                    let dim = basis_dimension(ctx.arity(p.arity()), d);
                    if dim > BASIS_CAP as u128 {
                        return Err(Error::Resource(format!(
                            "E_{d} has dimension {dim}, above the cap {BASIS_CAP}"
                        )));
                    }
                    dim as usize
                }
                None => closure_basis(&p, &params)?.len(),
            };
            out["basis_dimension"] = json!(dim);
            out["sizes"] = json!(sizes?);
            out["times"] = json!(times);
            if ctx.kind == Kind::Compare {
                let reps = cfg.replicas(1000)?;
                out["replicas"] = json!(reps);
                out["steps_per_replica"] = json!(steps(t_max));
            }
        }
        Kind::Simulate | Kind::VarianceScan | Kind::HsCheck => {
            let sizes = sizes?;
            let default_reps = match ctx.kind {
                Kind::VarianceScan => 1000,
                Kind::HsCheck => 3,
                _ => 10,
            };
            let reps = cfg.replicas(default_reps)?;
            match ctx.kind {
                Kind::Simulate => {
                    let p = ctx.trace_poly_or_default()?;
                    cfg.params(ctx.arity(p.arity()))?;
                }
                _ => {
                    let p = ctx.matrix_poly()?;
                    cfg.params(ctx.arity(p.arity()))?;
                    cfg.function(ctx.base)?;
                }
            }
            out["sizes"] = json!(sizes);
            out["replicas"] = json!(reps);
            out["trajectories"] = json!(reps * sizes.len());
            out["steps_per_replica"] = json!(steps(t_max));
        }
        Kind::SpectrumCheck => {
            let sizes = sizes?;
            let p = ctx.matrix_poly()?;
            cfg.params(ctx.arity(p.arity()))?;
            let inc = inclusion_config(ctx, sizes[0])?;
            out["n_small"] = json!(inc.n_small);
            out["n_ref"] = json!(inc.n_ref);
            out["trials"] = json!(inc.trials);
            out["ref_trials"] = json!(inc.ref_trials);
            out["steps_per_replica"] = json!(steps(t_max));
        }
        Kind::BracketCheck => {
            let sizes = sizes?;
            cfg.params(1)?;
            out["n"] = json!(sizes[0]);
            out["replicas"] = json!(cfg.replicas(10_000)?);
        }
    }
    Ok(out)
}

impl Context<'_> {
    fn trace_poly_or_default(&self) -> Result<TracePolynomial<f64>> {
        parse_trace_polynomial(self.config.polynomial.as_deref().unwrap_or("tr(g1)"))
    }
}

fn inclusion_config(ctx: &Context, n_small: usize) -> Result<InclusionConfig> {
    let cfg = ctx.config;
    let trials = cfg.trials.unwrap_or(20);
    let delta = cfg.delta.unwrap_or(0.1);
    if !delta.is_finite() || delta <= 0.0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "delta must be positive and trials at least 1".into(),
        ));
    }
    Ok(InclusionConfig {
        n_small,
        n_ref: cfg.n_ref.unwrap_or(4 * n_small),
        delta,
        trials,
        ref_trials: cfg.ref_trials.unwrap_or(trials),
        seed: ctx.seed,
    })
}

pub fn run(ctx: &Context) -> Result<RunOutput> {
    ctx.config.check_deterministic(ctx.base)?;
    match ctx.kind {
        Kind::Simulate => simulate(ctx),
        Kind::Moments => moments(ctx),
        Kind::Compare => compare(ctx),
        Kind::VarianceScan => variance(ctx),
        Kind::ConvergenceScan => convergence(ctx),
        Kind::SpectrumCheck => spectrum(ctx),
        Kind::HsCheck => hs_check(ctx),
        Kind::BracketCheck => brackets(ctx),
    }
}

fn simulate(ctx: &Context) -> Result<RunOutput> {
    let p = ctx.trace_poly_or_default()?;
    let params = ctx.config.params(ctx.arity(p.arity()))?;
    let sizes = ctx.config.sizes()?;
    let times = ctx.sorted_times()?;
    let reps = ctx.config.replicas(10)?;
    let t_final = *times.last().expect("non-empty");
    let mut table = Table::new(
        "simulate",
        &[
            "N",
            "replica",
            "t",
            "re_value",
            "im_value",
            "inverse_defect",
        ],
    );
    for &n in &sizes {
        let cfg = ctx.trajectory(&params, n, t_final, times.clone(), true)?;
        let det = ctx.det(n)?;
        let rows: Vec<Vec<Vec<String>>> = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                simulate_replica(&cfg, r)?
                    .into_iter()
                    .map(|s| {
                        let s = s.with_deterministic(det.clone())?;
                        let v = evaluate_on_sample(&p, &s)?;
                        let defect = s
                            .processes
                            .iter()
                            .map(|q| q.inverse_defect())
                            .fold(0.0, f64::max);
                        Ok(vec![
                            n.to_string(),
                            r.to_string(),
                            num(s.time),
                            num(v.re),
                            num(v.im),
                            num(defect),
                        ])
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for r in rows.into_iter().flatten() {
            table.push(r);
        }
    }
    Ok(RunOutput {
        tables: vec![table],
        seeds: ctx.size_seeds(&sizes),
        summary: json!({ "trajectories": reps * sizes.len() }),
    })
}

fn generator_sizes(ctx: &Context) -> Result<Vec<Size>> {
    let mut sizes: Vec<Size> = ctx.config.sizes()?.into_iter().map(Size::Finite).collect();
    if ctx.config.free {
        sizes.push(Size::Infinite);
    }
    Ok(sizes)
}

fn exact_operator(
    ctx: &Context,
    p: &TracePolynomial<f64>,
    params: &Params,
    size: Size,
) -> Result<gltau::Generator> {
    match ctx.config.d {
        Some(d) => {
            if p.degree() > d {
                return Err(Error::InvalidArgument(format!(
                    "polynomial degree {} exceeds d = {d}",
                    p.degree()
                )));
            }
            build_generator(ctx.arity(p.arity()), d, params, size)
        }
        None => build_generator_for(p, params, size),
    }
}

fn moments(ctx: &Context) -> Result<RunOutput> {
    let p = ctx.trace_poly()?;
    let params = ctx.config.params(ctx.arity(p.arity()))?;
    let times = ctx.sorted_times()?;
    let mut table = Table::new("moments", &["N", "t", "re_value", "im_value", "method"]);
    let sizes = if ctx.config.sizes.is_empty() && ctx.config.free {
        vec![Size::Infinite]
    } else {
        generator_sizes(ctx)?
    };
    let mut dim = 0;
    for size in sizes {
        let op = exact_operator(ctx, &p, &params, size)?;
        dim = op.dim();
        let method = match size {
            Size::Finite(_) => "exact-finite",
            Size::Infinite => "exact-free",
        };
        for &t in &times {
            let v = expectation_trace(&p, t, &op)?;
            table.push(vec![
                size_label(size),
                num(t),
                num(v.re),
                num(v.im),
                method.into(),
            ]);
        }
    }
    Ok(RunOutput {
        tables: vec![table],
        seeds: json!({ "base": ctx.seed }),
        summary: json!({ "basis_dimension": dim }),
    })
}

fn mean_and_se(values: &[Complex<f64>]) -> (Complex<f64>, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<Complex<f64>>() / m;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn compare(ctx: &Context) -> Result<RunOutput> {
    let p = ctx.trace_poly()?;
    let params = ctx.config.params(ctx.arity(p.arity()))?;
    let sizes = ctx.config.sizes()?;
    let times = ctx.sorted_times()?;
    let reps = ctx.config.replicas(1000)?;
    let t_final = *times.last().expect("non-empty");
    let mut table = Table::new(
        "compare",
        &[
            "N", "t", "re_mc", "im_mc", "se", "re_exact", "im_exact", "gap", "z",
        ],
    );
    let mut worst_z: f64 = 0.0;
    for &n in &sizes {
        let op = exact_operator(ctx, &p, &params, Size::Finite(n))?;
        let cfg = ctx.trajectory(&params, n, t_final, times.clone(), false)?;
        let per: Vec<Vec<Complex<f64>>> = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                simulate_replica(&cfg, r)?
                    .iter()
                    .map(|s: &GlSample<f64>| evaluate_on_sample(&p, s))
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (k, &t) in times.iter().enumerate() {
            let vals: Vec<Complex<f64>> = per.iter().map(|v| v[k]).collect();
            let (mean, se) = mean_and_se(&vals);
            let exact = expectation_trace(&p, t, &op)?;
            let gap = (mean - exact).norm();
            let z = if se > 0.0 {
                gap / se
            } else if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_z = worst_z.max(z);
            table.push(vec![
                n.to_string(),
                num(t),
                num(mean.re),
                num(mean.im),
                num(se),
                num(exact.re),
                num(exact.im),
                num(gap),
                num(z),
            ]);
        }
    }
    Ok(RunOutput {
        tables: vec![table],
        seeds: ctx.size_seeds(&sizes),
        summary: json!({ "replicas": reps, "max_z": worst_z }),
    })
}

fn fit_row(prefix: Vec<String>, fit: Option<&gltau::spectral::LogLogFit>) -> Vec<String> {
    let mut row = prefix;
    match fit {
        Some(f) => row.extend([
            num(f.slope),
            num(f.intercept),
            num(f.slope_se),
            num(f.ci.0),
            num(f.ci.1),
            "false".into(),
        ]),
        None => row.extend([
            "".into(),
            "".into(),
            "".into(),
            "".into(),
            "".into(),
            "true".into(),
        ]),
    }
    row
}

const FIT_HEADER: [&str; 7] = [
    "t",
    "slope",
    "intercept",
    "slope_se",
    "ci_lo",
    "ci_hi",
    "degenerate",
];

fn variance(ctx: &Context) -> Result<RunOutput> {
    let poly = ctx.matrix_poly()?;
    let params = ctx.config.params(ctx.arity(poly.arity()))?;
    let f = ctx.config.function(ctx.base)?;
    let sizes = ctx.config.sizes()?;
    let reps = ctx.config.replicas(1000)?;
    let settings = ctx.settings()?;
    let det = |n: usize| ctx.det(n);
    let mut points = Table::new(
        "variance",
        &["t", "N", "replicas", "mean", "variance", "log_se"],
    );
    let mut fits = Table::new("fit", &FIT_HEADER);
    let mut slopes = Vec::new();
    for t in ctx.sorted_times()? {
        let scan = variance_scan(
            &poly, &f, &params, t, &sizes, reps, ctx.seed, settings, &det,
        )?;
        for p in &scan.points {
            points.push(vec![
                num(t),
                p.n.to_string(),
                p.replicas.to_string(),
                num(p.mean),
                num(p.variance),
                num(p.log_se),
            ]);
        }
        fits.push(fit_row(vec![num(t)], scan.fit.as_ref()));
        slopes.push(scan.fit.map(|f| f.slope));
    }
    Ok(RunOutput {
        tables: vec![points, fits],
        seeds: ctx.size_seeds(&sizes),
        summary: json!({ "slopes": slopes }),
    })
}

fn convergence(ctx: &Context) -> Result<RunOutput> {
    let p = ctx.trace_poly()?;
    let params = ctx.config.params(ctx.arity(p.arity()))?;
    let sizes = ctx.config.sizes()?;
    let mut gaps = Table::new(
        "convergence",
        &[
            "N",
            "t",
            "re_finite",
            "im_finite",
            "re_free",
            "im_free",
            "gap",
        ],
    );
    let mut fits = Table::new("fit", &FIT_HEADER);
    let mut slopes = Vec::new();
    for t in ctx.sorted_times()? {
        let scan = weak_convergence_scan(&p, t, &params, &sizes, ctx.config.d)?;
        for (n, v, gap) in &scan.points {
            gaps.push(vec![
                n.to_string(),
                num(t),
                num(v.re),
                num(v.im),
                num(scan.free_value.re),
                num(scan.free_value.im),
                num(*gap),
            ]);
        }
        fits.push(fit_row(vec![num(t)], scan.fit.as_ref()));
        slopes.push(scan.fit.map(|f| f.slope));
    }
    Ok(RunOutput {
        tables: vec![gaps, fits],
        seeds: json!({ "base": ctx.seed }),
        summary: json!({ "slopes": slopes }),
    })
}

fn spectrum(ctx: &Context) -> Result<RunOutput> {
    let poly = ctx.matrix_poly()?;
    let params = ctx.config.params(ctx.arity(poly.arity()))?;
    let sizes = ctx.config.sizes()?;
    let inc = inclusion_config(ctx, sizes[0])?;
    let settings = ctx.settings()?;
    let det = |n: usize| ctx.det(n);
    let mut report = Table::new(
        "inclusion",
        &[
            "t",
            "n_small",
            "n_ref",
            "delta",
            "trials",
            "ref_trials",
            "eigenvalues_checked",
            "outliers",
            "outlier_fraction",
            "max_excess",
            "small_min",
            "small_max",
            "ref_min",
            "ref_max",
        ],
    );
    let mut reference = Table::new("reference", &["t", "lo", "hi"]);
    let mut outliers = 0;
    for t in ctx.sorted_times()? {
        let r = spectrum_inclusion_check(&poly, &params, t, inc, settings, &det)?;
        outliers += r.outliers;
        report.push(vec![
            num(t),
            inc.n_small.to_string(),
            inc.n_ref.to_string(),
            num(inc.delta),
            inc.trials.to_string(),
            inc.ref_trials.to_string(),
            r.eigenvalues_checked.to_string(),
            r.outliers.to_string(),
            num(r.outlier_fraction),
            num(r.max_excess),
            num(r.small_range.0),
            num(r.small_range.1),
            num(r.reference_range.0),
            num(r.reference_range.1),
        ]);
        for (lo, hi) in r.reference {
            reference.push(vec![num(t), num(lo), num(hi)]);
        }
    }
    Ok(RunOutput {
        tables: vec![report, reference],
        seeds: json!({
            "base": ctx.seed,
            "reference": derive_seed(ctx.seed, 1),
            "small": derive_seed(ctx.seed, 2),
        }),
        summary: json!({ "outliers": outliers }),
    })
}

fn hs_check(ctx: &Context) -> Result<RunOutput> {
    let poly = ctx.matrix_poly()?;
    let params = ctx.config.params(ctx.arity(poly.arity()))?;
    let f = ctx.config.function(ctx.base)?;
    let order = ctx.config.order.unwrap_or(3);
    let sizes = ctx.config.sizes()?;
    let reps = ctx.config.replicas(3)?;
    let settings = ctx.settings()?;
    let det = |n: usize| ctx.det(n);
    let mut table = Table::new(
        "hs",
        &[
            "N",
            "replica",
            "t",
            "hs_value",
            "eigen_sum",
            "abs_error",
            "error_estimate",
        ],
    );
    let mut worst: f64 = 0.0;
    for t in ctx.sorted_times()? {
        for &n in &sizes {
            let seed = size_seed(ctx.seed, n);
            let rows: Vec<(u64, gltau::spectral::HsResult)> = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let s = replica_spectrum(&poly, &params, t, n, seed, r, settings, &det)?;
                    let h = gltau::linalg::CMat::from_diag(
                        &s.eigenvalues
                            .iter()
                            .map(|&x| Complex::new(x, 0.0))
                            .collect::<Vec<_>>(),
                    );
                    Ok((r, hs_trace(&f, order, &h)?))
                })
                .collect::<Result<_>>()?;
            for (r, res) in rows {
                let err = (res.value - res.eigen_sum).abs();
                worst = worst.max(err);
                table.push(vec![
                    n.to_string(),
                    r.to_string(),
                    num(t),
                    num(res.value),
                    num(res.eigen_sum),
                    num(err),
                    num(res.error_estimate),
                ]);
            }
        }
    }
    Ok(RunOutput {
        tables: vec![table],
        seeds: ctx.size_seeds(&sizes),
        summary: json!({ "max_abs_error": worst }),
    })
}

fn brackets(ctx: &Context) -> Result<RunOutput> {
    let params = ctx.config.params(1)?;
    let sizes = ctx.config.sizes()?;
    let n = sizes[0];
    let dt = ctx.config.dt.unwrap_or(1e-3);
    let reps = ctx.config.replicas(10_000)?;
    let estimates = estimate_all_brackets(&params, n, dt, reps, &mut replica_rng(ctx.seed, 0))?;
    let mut table = Table::new(
        "brackets",
        &[
            "eps1",
            "eps2",
            "re_fit",
            "im_fit",
            "se_re",
            "se_im",
            "re_expected",
            "im_expected",
            "z",
        ],
    );
    let mut worst: f64 = 0.0;
    for e in &estimates {
        worst = worst.max(e.z_score());
        table.push(vec![
            format!("{:?}", e.eps1),
            format!("{:?}", e.eps2),
            num(e.coefficient.re),
            num(e.coefficient.im),
            num(e.std_error.0),
            num(e.std_error.1),
            num(e.expected.re),
            num(e.expected.im),
            num(e.z_score()),
        ]);
    }
    Ok(RunOutput {
        tables: vec![table],
        seeds: json!({ "base": ctx.seed }),
        summary: json!({ "max_z": worst, "n": n, "dt": dt, "replicas": reps }),
    })
}
