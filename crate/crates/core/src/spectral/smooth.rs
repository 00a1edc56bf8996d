// SPDX-License-Identifier: Apache-2.0

//! Compactly supported test functions with exact derivatives.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Highest derivative order available from every variant.
pub const MAX_ORDER: usize = 6;

/// Taylor coefficients of `exp(-1 / (1 - u²))` at `u`, orders `0..=MAX_ORDER`.
fn bump_jet(u: f64) -> [f64; MAX_ORDER + 1] {
    let mut out = [0.0; MAX_ORDER + 1];
    if u.abs() >= 1.0 {
        return out;
    }
    const M: usize = MAX_ORDER + 1;
    // q(u + h) = 1 - (u + h)²
    let mut q = [0.0; M];
    q[0] = 1.0 - u * u;
    q[1] = -2.0 * u;
    q[2] = -1.0;
    // g = -1 / q
    let mut r = [0.0; M];
    r[0] = 1.0 / q[0];
    for k in 1..M {
        let s: f64 = (1..=k.min(2)).map(|j| q[j] * r[k - j]).sum();
        r[k] = -s / q[0];
    }
    let g: Vec<f64> = r.iter().map(|x| -x).collect();
    // e = exp(g): k e_k = Σ j g_j e_{k-j}
    out[0] = g[0].exp();
    for k in 1..M {
        let s: f64 = (1..=k).map(|j| j as f64 * g[j] * out[k - j]).sum();
        out[k] = s / k as f64;
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `d^l/du^l exp(-1 / (1 - u²))`.
fn bump_derivative(l: usize, u: f64) -> f64 {
    bump_jet(u)[l] * factorial(l)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

const CDF_CELLS: usize = 4096;

/// Cumulative integrals of `exp(-1/(1-s²))` at `-1 + 2i/CDF_CELLS`.
fn cumulative_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let rule = gauss_legendre(12);
        let h = 2.0 / CDF_CELLS as f64;
        let mut out = Vec::with_capacity(CDF_CELLS + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for i in 0..CDF_CELLS {
            let mid = -1.0 + (i as f64 + 0.5) * h;
            let cell: f64 = rule
                .iter()
                .map(|&(x, w)| w * bump_derivative(0, mid + 0.5 * h * x))
                .sum();
            acc += 0.5 * h * cell;
            out.push(acc);
        }
        out
    })
}

/// `∫_{-1}^{u} exp(-1/(1-s²)) ds` by cubic Hermite interpolation of the
/// cumulative table, whose derivative is known exactly.
fn bump_integral(u: f64) -> f64 {
    let table = cumulative_table();
    if u <= -1.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return table[CDF_CELLS];
    }
    let h = 2.0 / CDF_CELLS as f64;
    let pos = (u + 1.0) / h;
    let i = (pos.floor() as usize).min(CDF_CELLS - 1);
    let s = pos - i as f64;
    let x0 = -1.0 + i as f64 * h;
    let (y0, y1) = (table[i], table[i + 1]);
    let (d0, d1) = (bump_derivative(0, x0) * h, bump_derivative(0, x0 + h) * h);
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * d1
}

/// `∫ exp(-1/(1-s²)) ds` over `[-1, 1]` and the normalised cumulative
/// distribution `Φ(u)` of the mollifier `ρ`.
pub fn bump_moments() -> (f64, fn(f64) -> f64) {
    fn cdf(u: f64) -> f64 {
        if u <= -1.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else if u <= 0.0 {
            bump_integral(u) / bump_integral(1.0)
        } else {
            1.0 - bump_integral(-u) / bump_integral(1.0)
        }
    }
    (bump_integral(1.0), cdf)
}

/// Merged `δ`-fattening `{x : dist(x, ∪ intervals) ≤ δ}`.
pub fn fatten(intervals: &[(f64, f64)], delta: f64) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = intervals
        .iter()
        .map(|&(a, b)| (a.min(b) - delta, a.max(b) + delta))
        .collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmoothFunction {
    /// `height · exp(-1 / (1 - ((x - center)/radius)²))`.
    Bump {
        center: f64,
        radius: f64,
        height: f64,
    },
    /// Indicator of `K(δ)` convolved with `ρ_{δ/2}`.
    MollifiedIndicator {
        /// Merged components of `K(δ)`.
        fattened: Vec<(f64, f64)>,
        delta: f64,
    },
    /// Tabulated values `columns[l][i] = f^{(l)}(x[i])`, linearly
    /// interpolated and zero outside `[x[0], x[last]]`.
    Table { x: Vec<f64>, columns: Vec<Vec<f64>> },
}

impl SmoothFunction {
    pub fn bump(center: f64, radius: f64, height: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.is_finite() || !height.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bump needs a positive radius, got {radius}"
            )));
        }
        Ok(Self::Bump {
            center,
            radius,
            height,
        })
    }

    /// `f = 1_{K(δ)} * ρ_{δ/2}` with `K(δ)` the `δ`-fattening of `support`.
    pub fn mollified_indicator(support: &[(f64, f64)], delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if support.is_empty()
            || support
                .iter()
                .any(|&(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidArgument(
                "support must be a non-empty bounded union".into(),
            ));
        }
        Ok(Self::MollifiedIndicator {
            fattened: fatten(support, delta),
            delta,
        })
    }

    pub fn table(x: Vec<f64>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if x.len() < 2 || x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "table abscissae must be strictly increasing with at least two points".into(),
            ));
        }
        if columns.is_empty() || columns.iter().any(|c| c.len() != x.len()) {
            return Err(Error::InvalidArgument(
                "table columns must match the abscissae".into(),
            ));
        }
        Ok(Self::Table { x, columns })
    }

    /// Highest derivative order that can be evaluated.
    pub fn max_order(&self) -> usize {
        match self {
            Self::Table { columns, .. } => columns.len() - 1,
            _ => MAX_ORDER,
        }
    }

    /// Closed interval outside of which `f` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Bump { center, radius, .. } => (center - radius, center + radius),
            Self::MollifiedIndicator { fattened, delta } => (
                fattened[0].0 - 0.5 * delta,
                fattened[fattened.len() - 1].1 + 0.5 * delta,
            ),
            Self::Table { x, .. } => (x[0], x[x.len() - 1]),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `f^{(l)}(x)`; panics if `l > max_order()`.
    pub fn derivative(&self, l: usize, x: f64) -> f64 {
        assert!(l <= self.max_order(), "derivative order {l} not available");
        match self {
            Self::Bump {
                center,
                radius,
                height,
            } => height * bump_derivative(l, (x - center) / radius) / radius.powi(l as i32),
            Self::MollifiedIndicator { fattened, delta } => {
                let s = 0.5 * delta;
                if l == 0 {
                    let (_, cdf) = bump_moments();
                    fattened
                        .iter()
                        .map(|&(a, b)| cdf((x - a) / s) - cdf((x - b) / s))
                        .sum()
                } else {
                    let (z, _) = bump_moments();
                    let scale = 1.0 / (z * s.powi(l as i32));
                    fattened
                        .iter()
                        .map(|&(a, b)| {
                            bump_derivative(l - 1, (x - a) / s)
                                - bump_derivative(l - 1, (x - b) / s)
                        })
                        .sum::<f64>()
                        * scale
                }
            }
            Self::Table { x: xs, columns } => {
                let col = &columns[l];
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                col[i - 1] * (1.0 - w) + col[i] * w
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_interpolation_is_accurate() {
        let rule = gauss_legendre(40);
        for &u in &[-0.9, -0.31, 0.0, 0.123, 0.77] {
            let direct: f64 = (0..64)
                .map(|p| {
                    let h = (u + 1.0) / 64.0;
                    let mid = -1.0 + (p as f64 + 0.5) * h;
                    rule.iter()
                        .map(|&(x, w)| w * bump_derivative(0, mid + 0.5 * h * x))
                        .sum::<f64>()
                        * 0.5
                        * h
                })
                .sum();
            assert!((direct - bump_integral(u)).abs() < 1e-13, "{u}");
        }
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let f = SmoothFunction::bump(0.3, 0.8, 2.0).unwrap();
        let h = 1e-5;
        for &x in &[-0.2, 0.1, 0.5, 0.9] {
            for l in 0..4 {
                let fd = (f.derivative(l, x + h) - f.derivative(l, x - h)) / (2.0 * h);
                let exact = f.derivative(l + 1, x);
                assert!(
                    (fd - exact).abs() < 1e-5 * (1.0 + exact.abs()),
                    "l={l} x={x} {fd} {exact}"
                );
            }
        }
        assert!(
            (SmoothFunction::bump(0.0, 1.0, 1.0).unwrap().value(0.0) - (-1.0f64).exp()).abs()
                < 1e-15
        );
    }

    #[test]
    fn mollifier_mass_is_one() {
        let (z, cdf) = bump_moments();
        assert!((z - 0.443_993_816_168_079_4).abs() < 1e-12, "{z}");
        assert!((cdf(0.0) - 0.5).abs() < 1e-14);
        assert_eq!(cdf(1.0), 1.0);
    }

    #[test]
    fn mollified_indicator_plateau_and_support() {
        let f = SmoothFunction::mollified_indicator(&[(0.0, 1.0)], 0.2).unwrap();
        assert_eq!(f.value(0.5), 1.0);
        assert_eq!(f.value(1.5), 0.0);
        for i in 0..=4000 {
            let x = -1.0 + 3.0 * i as f64 / 4000.0;
            let v = f.value(x);
            assert!((-1e-15..=1.0 + 1e-15).contains(&v));
            if (-0.1..=1.1).contains(&x) {
                assert_eq!(v, 1.0, "x={x}");
            }
            if !(-0.4..=1.4).contains(&x) {
                assert_eq!(v, 0.0, "x={x}");
            }
        }
        let h = 1e-5;
        let fd = (f.value(1.25 + h) - f.value(1.25 - h)) / (2.0 * h);
        assert!((fd - f.derivative(1, 1.25)).abs() < 1e-5);
    }

    #[test]
    fn fatten_merges() {
        assert_eq!(
            fatten(&[(0.0, 1.0), (1.1, 2.0), (5.0, 6.0)], 0.1),
            vec![(-0.1, 2.1), (4.9, 6.1)]
        );
    }
}
