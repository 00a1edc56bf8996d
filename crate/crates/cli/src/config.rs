// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration file and its validation.

use std::path::{Path, PathBuf};

use gltau::linalg::CMat;
use gltau::model::{params_from_abtheta, validate_params};
use gltau::scalar::c;
use gltau::sim::{load_matrix, DetMatrix, Orientation, Scheme};
use gltau::spectral::SmoothFunction;
use gltau::{Error, Params, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Simulate,
    Moments,
    Compare,
    VarianceScan,
    ConvergenceScan,
    SpectrumCheck,
    HsCheck,
    BracketCheck,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Moments => "moments",
            Kind::Compare => "compare",
            Kind::VarianceScan => "variance-scan",
            Kind::ConvergenceScan => "convergence-scan",
            Kind::SpectrumCheck => "spectrum-check",
            Kind::HsCheck => "hs-check",
            Kind::BracketCheck => "bracket-check",
        }
    }
}

/// Either `(λ, τ)` or `(a, b, θ)`, plus the time scales.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub lambda: Option<f64>,
    /// `[re, im]`
    pub tau: Option<[f64; 2]>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub theta: Option<f64>,
    pub sigmas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    Bump {
        center: f64,
        radius: f64,
        #[serde(default = "one")]
        height: f64,
    },
    MollifiedIndicator {
        support: Vec<[f64; 2]>,
        delta: f64,
    },
    /// Text table: one row per abscissa, `x f f' f'' ...`.
    Table {
        file: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DetSpec {
    /// Built-in family: `identity` or `diag-pm1`.
    Builtin {
        builtin: String,
    },
    File {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<Kind>,
    #[serde(default)]
    pub model: ModelSpec,
    /// Matrix sizes `N`.
    #[serde(default)]
    pub sizes: Vec<usize>,
    /// Also report the `N = ∞` limit where it applies.
    #[serde(default)]
    pub free: bool,
    pub p: Option<usize>,
    pub d: Option<usize>,
    pub dt: Option<f64>,
    #[serde(default)]
    pub times: Vec<f64>,
    pub polynomial: Option<String>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub scheme: Option<String>,
    pub orientation: Option<String>,
    #[serde(default)]
    pub deterministic: Vec<DetSpec>,
    pub function: Option<FunctionSpec>,
    pub order: Option<usize>,
    pub delta: Option<f64>,
    pub n_ref: Option<usize>,
    pub trials: Option<usize>,
    pub ref_trials: Option<usize>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: format!("config: {e}"),
        })
    }

    /// Model parameters with at least `p` time scales (missing ones default to 1).
    pub fn params(&self, p: usize) -> Result<Params> {
        let m = &self.model;
        let sigmas = match &m.sigmas {
            Some(s) if s.len() >= p => s.clone(),
            Some(s) if s.len() == 1 => vec![s[0]; p.max(1)],
            Some(s) => {
                return Err(config_error(format!(
                    "model.sigmas has {} entries but {p} processes are used",
                    s.len()
                )))
            }
            None => vec![1.0; p.max(1)],
        };
        let lt = m.lambda.is_some() || m.tau.is_some();
        let abt = m.a.is_some() || m.b.is_some() || m.theta.is_some();
        match (lt, abt) {
            (true, false) => {
                let lambda = m
                    .lambda
                    .ok_or_else(|| config_error("model.lambda is missing"))?;
                let tau = m.tau.ok_or_else(|| config_error("model.tau is missing"))?;
                validate_params(lambda, c(tau[0], tau[1]), &sigmas)
            }
            (false, true) => params_from_abtheta(
                m.a.unwrap_or(0.0),
                m.b.unwrap_or(0.0),
                m.theta.unwrap_or(0.0),
                &sigmas,
            ),
            (true, true) => Err(config_error(
                "give either (lambda, tau) or (a, b, theta), not both",
            )),
            (false, false) => Err(config_error("model needs (lambda, tau) or (a, b, theta)")),
        }
    }

    pub fn scheme(&self) -> Result<Scheme> {
        match self.scheme.as_deref() {
            None | Some("geometric") => Ok(Scheme::Geometric),
            Some("ito-euler") | Some("ito") => Ok(Scheme::ItoEuler),
            Some(s) => Err(config_error(format!(
                "unknown scheme {s:?} (geometric, ito-euler)"
            ))),
        }
    }

    pub fn orientation(&self) -> Result<Orientation> {
        match self.orientation.as_deref() {
            None | Some("left") => Ok(Orientation::LeftInvariant),
            Some("right") => Ok(Orientation::RightInvariant),
            Some(s) => Err(config_error(format!(
                "unknown orientation {s:?} (left, right)"
            ))),
        }
    }

    pub fn sizes(&self) -> Result<Vec<usize>> {
        if self.sizes.is_empty() {
            return Err(config_error("sizes must list at least one matrix size"));
        }
        if self.sizes.contains(&0) {
            return Err(config_error("matrix sizes must be positive"));
        }
        Ok(self.sizes.clone())
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        let t = if self.times.is_empty() {
            vec![1.0]
        } else {
            self.times.clone()
        };
        if t.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(config_error("times must be finite and non-negative"));
        }
        Ok(t)
    }

    pub fn polynomial(&self) -> Result<&str> {
        self.polynomial
            .as_deref()
            .ok_or_else(|| config_error("polynomial is required for this kind"))
    }

    pub fn replicas(&self, default: usize) -> Result<usize> {
        match self.replicas {
            Some(0) => Err(config_error("replicas must be positive")),
            Some(r) => Ok(r),
            None => Ok(default),
        }
    }

    pub fn function(&self, base: &Path) -> Result<SmoothFunction> {
        match self
            .function
            .as_ref()
            .ok_or_else(|| config_error("function is required for this kind"))?
        {
            FunctionSpec::Bump {
                center,
                radius,
                height,
            } => SmoothFunction::bump(*center, *radius, *height),
            FunctionSpec::MollifiedIndicator { support, delta } => {
                let s: Vec<(f64, f64)> = support.iter().map(|&[a, b]| (a, b)).collect();
                SmoothFunction::mollified_indicator(&s, *delta)
            }
            FunctionSpec::Table { file } => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let mut x = Vec::new();
                let mut columns: Vec<Vec<f64>> = Vec::new();
                for (i, line) in text.lines().enumerate() {
                    let line = line.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    let vals: Vec<f64> = line
                        .split_whitespace()
                        .map(|v| {
                            v.parse().map_err(|_| Error::Syntax {
                                line: i + 1,
                                column: 1,
                                message: format!("bad number {v:?} in function table"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    if vals.len() < 2 {
                        return Err(Error::Syntax {
                            line: i + 1,
                            column: 1,
                            message: "function table rows need x and at least f(x)".into(),
                        });
                    }
                    if columns.is_empty() {
                        columns = vec![Vec::new(); vals.len() - 1];
                    } else if columns.len() != vals.len() - 1 {
                        return Err(Error::Syntax {
                            line: i + 1,
                            column: 1,
                            message: "function table rows differ in length".into(),
                        });
                    }
                    x.push(vals[0]);
                    for (col, v) in columns.iter_mut().zip(&vals[1..]) {
                        col.push(*v);
                    }
                }
                SmoothFunction::table(x, columns)
            }
        }
    }

    /// Validates deterministic-matrix specifications without loading them
    /// for any particular size.
    pub fn check_deterministic(&self, base: &Path) -> Result<()> {
        for spec in &self.deterministic {
            match spec {
                DetSpec::Builtin { builtin } => {
                    if !matches!(builtin.as_str(), "identity" | "diag-pm1") {
                        return Err(config_error(format!(
                            "unknown built-in matrix {builtin:?} (identity, diag-pm1)"
                        )));
                    }
                }
                DetSpec::File { file } => {
                    let path = base.join(file);
                    if !path.is_file() {
                        return Err(Error::Io(format!(
                            "deterministic matrix {} not found",
                            path.display()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Deterministic matrices at size `n`.
    pub fn deterministic(&self, base: &Path, n: usize) -> Result<Vec<DetMatrix<f64>>> {
        self.deterministic
            .iter()
            .map(|spec| {
                let m = match spec {
                    DetSpec::Builtin { builtin } => match builtin.as_str() {
                        "identity" => CMat::identity(n),
                        "diag-pm1" => {
                            let d: Vec<_> = (0..n)
                                .map(|i| c(if i < n / 2 { 1.0 } else { -1.0 }, 0.0))
                                .collect();
                            CMat::from_diag(&d)
                        }
                        other => {
                            return Err(config_error(format!("unknown built-in matrix {other:?}")))
                        }
                    },
                    DetSpec::File { file } => {
                        let m: CMat<f64> = load_matrix(&base.join(file))?;
                        if m.n() != n {
                            return Err(config_error(format!(
                                "{} is {}x{} but N = {n}",
                                file.display(),
                                m.n(),
                                m.n()
                            )));
                        }
                        m
                    }
                };
                Ok(DetMatrix::new(m))
            })
            .collect()
    }
}
