// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Product of exact exponential increments.
    Geometric,
    /// Explicit Euler step of the Itô equation.
    ItoEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `G ← G·E`.
    LeftInvariant,
    /// `G ← E·G`.
    RightInvariant,
}

/// Largest condition number accepted for an Itô–Euler iterate.
pub const COND_MAX: f64 = 1e12;

/// Relative factor in the condition-scaled inverse tolerance.
pub const INVERSE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TrajectoryConfig<T> {
    pub n: usize,
    pub p: usize,
    pub params: ModelParams<T>,
    pub t_final: T,
    pub dt: T,
    pub scheme: Scheme,
    pub orientation: Orientation,
    pub seed: u64,
    pub snapshot_times: Vec<T>,
    /// Geometric scheme only: carry `G⁻¹` along the path instead of solving
    /// for it at each snapshot.
    pub track_inverse: bool,
}

/// `min(1e-2, t_final / 100)`, or `1e-2` when `t_final = 0`.
pub fn default_dt<T: Real>(t_final: T) -> T {
    let cap = T::lit(1e-2);
    if t_final > T::zero() {
        cap.min(t_final / T::lit(100.0))
    } else {
        cap
    }
}

impl<T: Real> TrajectoryConfig<T> {
    /// Geometric, left-invariant run with a single snapshot at `t_final`.
    pub fn new(n: usize, params: ModelParams<T>, t_final: T, seed: u64) -> Self {
        Self {
            n,
            p: params.arity(),
            params,
            t_final,
            dt: default_dt(t_final),
            scheme: Scheme::Geometric,
            orientation: Orientation::LeftInvariant,
            seed,
            snapshot_times: vec![t_final],
            track_inverse: true,
        }
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<T>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn with_track_inverse(mut self, track: bool) -> Self {
        self.track_inverse = track;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if self.p != self.params.arity() {
            return Err(Error::Arity(format!(
                "p = {} but {} time scales were given",
                self.p,
                self.params.arity()
            )));
        }
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "t_final = {} must be finite and nonnegative",
                self.t_final
            )));
        }
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if self.t_final > T::zero() && self.dt > self.t_final {
            return Err(Error::InvalidArgument(format!(
                "dt = {} exceeds t_final = {}",
                self.dt, self.t_final
            )));
        }
        if self.snapshot_times.is_empty() {
            return Err(Error::InvalidArgument("no snapshot times".into()));
        }
        let mut prev = T::zero();
        for &s in &self.snapshot_times {
            if s < prev || s > self.t_final {
                return Err(Error::InvalidArgument(format!(
                    "snapshot times must be sorted within [0, {}], got {s}",
                    self.t_final
                )));
            }
            prev = s;
        }
        Ok(())
    }
}
