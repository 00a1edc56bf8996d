// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::config::{Orientation, Scheme, TrajectoryConfig, COND_MAX};
use super::sample::{GlSample, ProcessState};
use crate::error::{Error, Result};
use crate::linalg::{expm, expm_with_inverse, inverse_with_condition, CMat};
use crate::model::{fill_elliptic, ModelParams};
use crate::rng::{replica_rng, ReplicaRng};
use crate::scalar::{c, Real};

/// Splits `[0, t_final]` at the snapshot times into runs of equal steps no
/// longer than `dt`. Each entry is `(steps, h)`.
fn segments<T: Real>(config: &TrajectoryConfig<T>) -> Vec<(usize, T)> {
    let mut out = Vec::with_capacity(config.snapshot_times.len());
    let mut t = T::zero();
    for &s in &config.snapshot_times {
        let len = s - t;
        if len <= T::zero() {
            out.push((0, T::zero()));
            continue;
        }
        let ratio = (len / config.dt).to_f64_lossy();
        let steps = ((ratio - 1e-9).ceil() as usize).max(1);
        out.push((steps, len / T::from_usize_lossy(steps)));
        t = s;
    }
    out
}

/// Reusable buffers for one trajectory.
struct Workspace<T> {
    dz: CMat<T>,
    scratch: CMat<T>,
    tmp: CMat<T>,
}

impl<T: Real> Workspace<T> {
    fn new(n: usize) -> Self {
        Self {
            dz: CMat::zeros(n),
            scratch: CMat::zeros(n),
            tmp: CMat::zeros(n),
        }
    }

    /// `i σ ΔZ` for one step of length `h`.
    fn noise<R: Rng + ?Sized>(&mut self, params: &ModelParams<T>, sigma: T, h: T, rng: &mut R) {
        let n = self.dz.n();
        fill_elliptic(params, n, h, rng, &mut self.dz, &mut self.scratch);
        self.dz.scale_mut(c(T::zero(), sigma));
    }
}

fn multiply<T: Real>(
    orientation: Orientation,
    g: &mut CMat<T>,
    factor: &CMat<T>,
    tmp: &mut CMat<T>,
    on_right_when_left: bool,
) {
    // `on_right_when_left`: the factor multiplies on the right in the left
    // orientation (true for G, false for the inverse).
    let right = (orientation == Orientation::LeftInvariant) == on_right_when_left;
    if right {
        g.matmul_into(factor, tmp);
    } else {
        factor.matmul_into(g, tmp);
    }
    std::mem::swap(g, tmp);
}

/// `(1 - ½σ²(λ-τ)h) I + sign·X` where `X = iσΔZ`.
fn euler_factor<T: Real>(x: &CMat<T>, drift: crate::scalar::C<T>, sign: T, out: &mut CMat<T>) {
    let n = x.n();
    let (ore, oim) = out.parts_mut();
    for (k, (r, i)) in x.re().iter().zip(x.im()).enumerate() {
        ore[k] = sign * *r;
        oim[k] = sign * *i;
    }
    out.add_scaled_identity(c(T::one(), T::zero()) - drift);
    debug_assert_eq!(out.n(), n);
}

fn check_finite<T: Real>(g: &CMat<T>) -> Result<()> {
    if g.is_finite() {
        Ok(())
    } else {
        Err(Error::Singularity {
            cond: f64::INFINITY,
        })
    }
}

fn solve_inverse<T: Real>(g: &CMat<T>) -> Result<CMat<T>> {
    check_finite(g)?;
    let (inv, cond) = inverse_with_condition(g)?;
    if cond > COND_MAX {
        return Err(Error::Singularity { cond });
    }
    Ok(inv)
}

/// Integrates one trajectory and returns a sample at every snapshot time.
pub fn simulate<T: Real, R: Rng + ?Sized>(
    config: &TrajectoryConfig<T>,
    rng: &mut R,
) -> Result<Vec<GlSample<T>>> {
    simulate_tagged(config, rng, 0)
}

/// [`simulate`] on the stream `(config.seed, replica)`.
pub fn simulate_replica<T: Real>(
    config: &TrajectoryConfig<T>,
    replica: u64,
) -> Result<Vec<GlSample<T>>> {
    let mut rng: ReplicaRng = replica_rng(config.seed, replica);
    simulate_tagged(config, &mut rng, replica)
}

fn simulate_tagged<T: Real, R: Rng + ?Sized>(
    config: &TrajectoryConfig<T>,
    rng: &mut R,
    stream: u64,
) -> Result<Vec<GlSample<T>>> {
    config.validate()?;
    let n = config.n;
    let p = config.p;
    let params = &config.params;
    let tracked = config.scheme == Scheme::Geometric && config.track_inverse;
    let mut gs: Vec<CMat<T>> = (0..p).map(|_| CMat::identity(n)).collect();
    let mut invs: Vec<CMat<T>> = if tracked {
        (0..p).map(|_| CMat::identity(n)).collect()
    } else {
        Vec::new()
    };
    let mut ws = Workspace::new(n);
    let mut factor = CMat::zeros(n);
    let mut out = Vec::with_capacity(config.snapshot_times.len());
    for (&(steps, h), &time) in segments(config).iter().zip(&config.snapshot_times) {
        for _ in 0..steps {
            for l in 0..p {
                let sigma = params.sigma(l);
                ws.noise(params, sigma, h, rng);
                match config.scheme {
                    Scheme::Geometric => {
                        if tracked {
                            let (e, e_inv) = expm_with_inverse(&ws.dz)?;
                            multiply(config.orientation, &mut gs[l], &e, &mut ws.tmp, true);
                            multiply(config.orientation, &mut invs[l], &e_inv, &mut ws.tmp, false);
                        } else {
                            let e = expm(&ws.dz)?;
                            multiply(config.orientation, &mut gs[l], &e, &mut ws.tmp, true);
                        }
                    }
                    Scheme::ItoEuler => {
                        let drift = params.lambda_minus_tau() * (sigma * sigma * h * T::lit(0.5));
                        euler_factor(&ws.dz, drift, T::one(), &mut factor);
                        multiply(config.orientation, &mut gs[l], &factor, &mut ws.tmp, true);
                    }
                }
            }
        }
        let mut processes = Vec::with_capacity(p);
        for l in 0..p {
            let inv = if tracked {
                invs[l].clone()
            } else {
                solve_inverse(&gs[l])?
            };
            processes.push(ProcessState::from_pair(gs[l].clone(), inv));
        }
        out.push(GlSample {
            time,
            processes,
            deterministic: Vec::new(),
            seed: config.seed,
            stream,
        });
    }
    Ok(out)
}

/// Largest `‖G K - I‖` (normalised Frobenius) over the snapshots.
#[derive(Debug, Clone)]
pub struct DriftReport<T> {
    pub max_defect: T,
    /// `(time, defect)` per snapshot, maximised over processes.
    pub per_snapshot: Vec<(T, T)>,
}

/// Itô–Euler integration of `G` together with the independently integrated
/// inverse candidate `K`, driven by the same noise.
///
/// The returned sample stores `K` in place of `G⁻¹`.
pub fn simulate_with_inverse_tracking<T: Real, R: Rng + ?Sized>(
    config: &TrajectoryConfig<T>,
    rng: &mut R,
) -> Result<(GlSample<T>, DriftReport<T>)> {
    config.validate()?;
    if config.scheme != Scheme::ItoEuler {
        return Err(Error::InvalidArgument(
            "inverse tracking requires the ItoEuler scheme".into(),
        ));
    }
    let n = config.n;
    let p = config.p;
    let params = &config.params;
    let mut gs: Vec<CMat<T>> = (0..p).map(|_| CMat::identity(n)).collect();
    let mut ks: Vec<CMat<T>> = (0..p).map(|_| CMat::identity(n)).collect();
    let mut ws = Workspace::new(n);
    let mut fwd = CMat::zeros(n);
    let mut bwd = CMat::zeros(n);
    let mut per_snapshot = Vec::with_capacity(config.snapshot_times.len());
    let mut max_defect = T::zero();
    for (&(steps, h), &time) in segments(config).iter().zip(&config.snapshot_times) {
        for _ in 0..steps {
            for l in 0..p {
                let sigma = params.sigma(l);
                ws.noise(params, sigma, h, rng);
                let drift = params.lambda_minus_tau() * (sigma * sigma * h * T::lit(0.5));
                euler_factor(&ws.dz, drift, T::one(), &mut fwd);
                euler_factor(&ws.dz, drift, -T::one(), &mut bwd);
                multiply(config.orientation, &mut gs[l], &fwd, &mut ws.tmp, true);
                multiply(config.orientation, &mut ks[l], &bwd, &mut ws.tmp, false);
            }
        }
        let mut worst = T::zero();
        for l in 0..p {
            check_finite(&gs[l])?;
            worst = worst
                .max(gs[l].matmul(&ks[l]).distance_to_identity() / T::from_usize_lossy(n).sqrt());
        }
        max_defect = max_defect.max(worst);
        per_snapshot.push((time, worst));
    }
    let processes = gs
        .into_iter()
        .zip(ks)
        .map(|(g, k)| ProcessState::from_pair(g, k))
        .collect();
    let sample = GlSample {
        time: *config.snapshot_times.last().expect("validated"),
        processes,
        deterministic: Vec::new(),
        seed: config.seed,
        stream: 0,
    };
    Ok((
        sample,
        DriftReport {
            max_defect,
            per_snapshot,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;
    use crate::scalar::C;

    fn unitary_params() -> ModelParams<f64> {
        validate_params(1.0, C::new(0.0, 0.0), &[1.0]).unwrap()
    }

    #[test]
    fn segments_hit_snapshots_exactly() {
        let cfg = TrajectoryConfig::new(2, unitary_params(), 1.0, 0)
            .with_dt(0.3)
            .with_snapshots(vec![0.0, 0.5, 1.0]);
        let segs = segments(&cfg);
        assert_eq!(segs[0].0, 0);
        assert_eq!(segs[1].0, 2);
        assert!((segs[1].1 - 0.25).abs() < 1e-15);
        assert_eq!(segs[2].0, 2);
    }

    #[test]
    fn zero_time_gives_identity() {
        let cfg = TrajectoryConfig::new(3, unitary_params(), 0.0, 9).with_snapshots(vec![0.0]);
        let s = simulate_replica(&cfg, 0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].processes[0].g.distance_to_identity(), 0.0);
        assert_eq!(s[0].processes[0].g_inv.distance_to_identity(), 0.0);
    }

    #[test]
    fn geometric_unitary_case_stays_unitary() {
        let cfg = TrajectoryConfig::new(8, unitary_params(), 1.0, 3)
            .with_dt(0.05)
            .with_snapshots(vec![0.5, 1.0]);
        for s in simulate_replica(&cfg, 1).unwrap() {
            let g = &s.processes[0];
            assert!(g.g.matmul(&g.g_adj).distance_to_identity() < 1e-12);
            assert!(g.inverse_defect() < 1e-12);
        }
    }

    #[test]
    fn same_stream_is_bit_identical() {
        let params = validate_params(1.0, C::new(0.5, 0.3), &[1.0, 0.5]).unwrap();
        let cfg = TrajectoryConfig::new(5, params, 0.2, 11).with_dt(0.05);
        let a = simulate_replica(&cfg, 4).unwrap();
        let b = simulate_replica(&cfg, 4).unwrap();
        for (x, y) in a[0].processes.iter().zip(&b[0].processes) {
            assert_eq!(x.g.re(), y.g.re());
            assert_eq!(x.g.im(), y.g.im());
        }
    }

    #[test]
    fn euler_inverse_solved_at_snapshot() {
        let params = validate_params(1.0, C::new(0.5, 0.3), &[1.0]).unwrap();
        let cfg = TrajectoryConfig::new(6, params, 0.5, 2)
            .with_dt(0.01)
            .with_scheme(Scheme::ItoEuler)
            .with_orientation(Orientation::RightInvariant);
        let s = &simulate_replica(&cfg, 0).unwrap()[0];
        assert!(s.processes[0].inverse_defect() < s.processes[0].inverse_tolerance());
    }

    #[test]
    fn inverse_tracking_rejects_geometric_and_is_zero_at_time_zero() {
        let cfg = TrajectoryConfig::new(4, unitary_params(), 1.0, 0);
        let mut rng = replica_rng(0, 0);
        assert!(simulate_with_inverse_tracking(&cfg, &mut rng).is_err());
        let cfg = TrajectoryConfig::new(4, unitary_params(), 0.0, 0)
            .with_scheme(Scheme::ItoEuler)
            .with_snapshots(vec![0.0]);
        let (_, rep) = simulate_with_inverse_tracking(&cfg, &mut rng).unwrap();
        assert_eq!(rep.max_defect, 0.0);
    }
}
