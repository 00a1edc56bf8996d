// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;

use super::fit::{fit_loglog, LogLogFit};
use super::poly::SelfAdjointPoly;
use super::smooth::{fatten, SmoothFunction};
use super::spectrum::{empirical_spectrum, SpectralSample};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rng::derive_seed;
use crate::sim::{default_dt, simulate_replica, DetMatrix, GlSample, Scheme, TrajectoryConfig};
use crate::trace::{
    build_generator, build_generator_for, expectation_trace, Size, TracePolynomial,
};

/// Deterministic companions `A^N` as a function of `N`.
pub type DetBuilder<'a> = dyn Fn(usize) -> Result<Vec<DetMatrix<f64>>> + Sync + 'a;

/// Integration settings shared by the Monte-Carlo scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub scheme: Scheme,
    /// `None` selects [`default_dt`].
    pub dt: Option<f64>,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            scheme: Scheme::Geometric,
            dt: None,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_at(
    poly: &SelfAdjointPoly<f64>,
    params: &ModelParams<f64>,
    t: f64,
    n: usize,
    seed: u64,
    replica: u64,
    settings: McSettings,
    det: &DetBuilder,
) -> Result<GlSample<f64>> {
    let p = poly.arity().max(1);
    let params = if params.arity() < p {
        params.with_sigmas(&vec![params.sigma(0); p])?
    } else {
        params.clone()
    };
    let dt = settings.dt.unwrap_or_else(|| default_dt(t));
    let config = TrajectoryConfig::new(n, params, t, seed)
        .with_dt(if t > 0.0 { dt.min(t) } else { dt })
        .with_scheme(settings.scheme)
        .with_track_inverse(poly.uses_inverse());
    let sample = simulate_replica(&config, replica)?
        .pop()
        .expect("one snapshot");
    let mats = det(n)?;
    if mats.len() < poly.det_arity() {
        return Err(Error::Index(format!(
            "polynomial {} needs {} deterministic matrices, {} supplied",
            poly.id,
            poly.det_arity(),
            mats.len()
        )));
    }
    sample.with_deterministic(mats)
}

/// Spectrum of `PP*` for one replica.
#[allow(clippy::too_many_arguments)]
pub fn replica_spectrum(
    poly: &SelfAdjointPoly<f64>,
    params: &ModelParams<f64>,
    t: f64,
    n: usize,
    seed: u64,
    replica: u64,
    settings: McSettings,
    det: &DetBuilder,
) -> Result<SpectralSample> {
    let sample = sample_at(poly, params, t, n, seed, replica, settings, det)?;
    Ok(empirical_spectrum(&poly.eval_pp_star(&sample)?)?.with_metadata(t, seed, poly.id.clone()))
}

/// Relative variance treated as exact zero (round-off of a constant statistic).
pub const VARIANCE_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, PartialEq)]
pub struct VariancePoint {
    pub n: usize,
    pub replicas: usize,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of `ln variance`.
    pub log_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceScan {
    pub points: Vec<VariancePoint>,
    /// `None` when some variance vanishes and no slope exists.
    pub fit: Option<LogLogFit>,
}

fn moments(values: &[f64]) -> (f64, f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / m;
    let var_of_var = (m4 - var * var * (m - 3.0) / (m - 1.0)) / m;
    let log_se = if var > 0.0 {
        var_of_var.max(0.0).sqrt() / var
    } else {
        0.0
    };
    (mean, var, log_se)
}

/// Monte-Carlo variance of `tr_N f(PP*)` for each `N` and the log-log slope.
#[allow(clippy::too_many_arguments)]
pub fn variance_scan(
    poly: &SelfAdjointPoly<f64>,
    f: &SmoothFunction,
    params: &ModelParams<f64>,
    t: f64,
    n_list: &[usize],
    reps: usize,
    seed: u64,
    settings: McSettings,
    det: &DetBuilder,
) -> Result<VarianceScan> {
    if n_list.len() < 3 || reps < 1000 {
        return Err(Error::InvalidArgument(format!(
            "variance scan needs at least 3 sizes and 1000 replicas, got {} and {reps}",
            n_list.len()
        )));
    }
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let stream_seed = derive_seed(seed, n as u64);
        let values: Vec<f64> = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                let s = replica_spectrum(poly, params, t, n, stream_seed, r, settings, det)?;
                Ok(s.trace_of(|x| f.value(x)))
            })
            .collect::<Result<_>>()?;
        let (mean, variance, log_se) = moments(&values);
        points.push(VariancePoint {
            n,
            replicas: reps,
            mean,
            variance,
            log_se,
        });
    }
    let degenerate = points
        .iter()
        .any(|p| !(p.variance > VARIANCE_FLOOR * (1.0 + p.mean * p.mean)) || !(p.log_se > 0.0));
    let fit = if degenerate {
        None
    } else {
        let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.variance)).collect();
        let se: Vec<f64> = points.iter().map(|p| p.log_se).collect();
        Some(fit_loglog(&xy, Some(&se))?)
    };
    Ok(VarianceScan { points, fit })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakConvergenceScan {
    pub free_value: num_complex::Complex<f64>,
    /// `(N, finite-N value, gap)`.
    pub points: Vec<(usize, num_complex::Complex<f64>, f64)>,
    /// `None` when every gap is below [`Self::ZERO_GAP`].
    pub fit: Option<LogLogFit>,
    pub basis_dim: usize,
}

impl WeakConvergenceScan {
    /// Gaps below this are treated as exact zeros.
    pub const ZERO_GAP: f64 = 1e-13;

    pub fn is_degenerate(&self) -> bool {
        self.fit.is_none()
    }
}

/// Noise-free gap `|E tr P(G_t) - φ(P(g_t))|` over `N` from the exact engines.
///
/// With `d = Some(d)` the generator acts on the full space `E_d`, otherwise
/// on the smallest invariant subspace containing `P`.
pub fn weak_convergence_scan(
    p: &TracePolynomial<f64>,
    t: f64,
    params: &ModelParams<f64>,
    n_list: &[usize],
    d: Option<usize>,
) -> Result<WeakConvergenceScan> {
    let free = match d {
        Some(d) => {
            if p.degree() > d {
                return Err(Error::InvalidArgument(format!(
                    "polynomial of degree {} is not in E_{d}",
                    p.degree()
                )));
            }
            build_generator(p.arity().max(1), d, params, Size::Infinite)?
        }
        None => build_generator_for(p, params, Size::Infinite)?,
    };
    let free_value = expectation_trace(p, t, &free)?;
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let op = free.with_size(Size::Finite(n))?;
        let v = expectation_trace(p, t, &op)?;
        points.push((n, v, (v - free_value).norm()));
    }
    let fit = if points.iter().all(|p| p.2 <= WeakConvergenceScan::ZERO_GAP) {
        None
    } else {
        let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.0 as f64, p.2)).collect();
        Some(fit_loglog(&xy, None)?)
    };
    Ok(WeakConvergenceScan {
        free_value,
        points,
        fit,
        basis_dim: free.dim(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclusionConfig {
    pub n_small: usize,
    pub n_ref: usize,
    pub delta: f64,
    pub trials: usize,
    pub ref_trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionReport {
    /// Reference support: `δ/2`-fattening of the pooled reference spectra.
    pub reference: Vec<(f64, f64)>,
    pub eigenvalues_checked: usize,
    /// Eigenvalues farther than `δ` from every reference eigenvalue.
    pub outliers: usize,
    pub outlier_fraction: f64,
    /// Largest distance from a small-`N` eigenvalue to the reference support.
    pub max_excess: f64,
    pub small_range: (f64, f64),
    pub reference_range: (f64, f64),
}

fn distance_to(set: &[(f64, f64)], x: f64) -> f64 {
    set.iter()
        .map(|&(a, b)| {
            if x < a {
                a - x
            } else if x > b {
                x - b
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Empirical proxy for spectrum inclusion: spectra at `n_small` against the
/// pooled spectra at `n_ref`.
pub fn spectrum_inclusion_check(
    poly: &SelfAdjointPoly<f64>,
    params: &ModelParams<f64>,
    t: f64,
    config: InclusionConfig,
    settings: McSettings,
    det: &DetBuilder,
) -> Result<InclusionReport> {
    if !(config.delta > 0.0) || config.trials == 0 || config.ref_trials == 0 {
        return Err(Error::InvalidArgument(
            "inclusion check needs delta > 0 and at least one trial at each size".into(),
        ));
    }
    let spectra = |n: usize, count: usize, salt: u64| -> Result<Vec<SpectralSample>> {
        let s = derive_seed(config.seed, salt);
        (0..count as u64)
            .into_par_iter()
            .map(|r| replica_spectrum(poly, params, t, n, s, r, settings, det))
            .collect()
    };
    let reference_spectra = spectra(config.n_ref, config.ref_trials, 1)?;
    let small_spectra = spectra(config.n_small, config.trials, 2)?;
    let points: Vec<(f64, f64)> = reference_spectra
        .iter()
        .flat_map(|s| s.eigenvalues.iter().map(|&x| (x, x)))
        .collect();
    let half = 0.5 * config.delta;
    let reference = if config.delta.is_finite() {
        fatten(&points, half)
    } else {
        vec![(f64::NEG_INFINITY, f64::INFINITY)]
    };
    let range = |ss: &[SpectralSample]| {
        ss.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.min()), hi.max(s.max()))
            })
    };
    let mut outliers = 0;
    let mut checked = 0;
    let mut max_excess: f64 = 0.0;
    for s in &small_spectra {
        for &x in &s.eigenvalues {
            let d = distance_to(&reference, x);
            checked += 1;
            max_excess = max_excess.max(d);
            if d > half {
                outliers += 1;
            }
        }
    }
    Ok(InclusionReport {
        reference,
        eigenvalues_checked: checked,
        outliers,
        outlier_fraction: outliers as f64 / checked.max(1) as f64,
        max_excess,
        small_range: range(&small_spectra),
        reference_range: range(&reference_spectra),
    })
}
