//! Cumulative distribution functions backing every test in the crate.
//!
//! Normal, Student t, F and chi-square come from `statrs`. The studentized
//! range distribution is integrated here with nested Gauss–Legendre rules.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};
use statrs::function::gamma::ln_gamma;

use super::quadrature::gl64;
use super::StatError;

/// A distribution accepted by [`dist_cdf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Normal { mean: f64, sd: f64 },
    StudentT { df: f64 },
    F { df1: f64, df2: f64 },
    ChiSquare { df: f64 },
    /// Range of `k` standard normals divided by an independent
    /// `sqrt(chi2(df) / df)`.
    StudentizedRange { k: usize, df: f64 },
}

/// CDF of `dist` at `x`.
pub fn dist_cdf(dist: Distribution, x: f64) -> Result<f64, StatError> {
    if x.is_nan() {
        return Err(StatError::InvalidParameter("x is NaN".into()));
    }
    let p = match dist {
        Distribution::Normal { mean, sd } => {
            if !(sd > 0.0 && sd.is_finite() && mean.is_finite()) {
                return Err(StatError::InvalidParameter(format!(
                    "normal requires finite mean and sd > 0 (mean={mean}, sd={sd})"
                )));
            }
            normal_cdf((x - mean) / sd)
        }
        Distribution::StudentT { df } => {
            check_df("df", df)?;
            t_cdf(x, df)
        }
        Distribution::F { df1, df2 } => {
            check_df("df1", df1)?;
            check_df("df2", df2)?;
            f_cdf(x, df1, df2)
        }
        Distribution::ChiSquare { df } => {
            check_df("df", df)?;
            chi2_cdf(x, df)
        }
        Distribution::StudentizedRange { k, df } => {
            if k < 2 {
                return Err(StatError::InvalidParameter(format!(
                    "studentized range requires k >= 2, got {k}"
                )));
            }
            if df.is_nan() || df < 1.0 {
                return Err(StatError::InvalidParameter(format!(
                    "studentized range requires df >= 1, got {df}"
                )));
            }
            studentized_range_cdf(x, k, df)
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

fn check_df(name: &str, df: f64) -> Result<(), StatError> {
    if df > 0.0 && !df.is_nan() {
        Ok(())
    } else {
        Err(StatError::InvalidParameter(format!(
            "{name} must be positive, got {df}"
        )))
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

pub fn normal_cdf(z: f64) -> f64 {
    std_normal().cdf(z)
}

/// Upper tail `P(Z > z)`.
pub fn normal_sf(z: f64) -> f64 {
    std_normal().sf(z)
}

pub fn normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

pub fn t_cdf(t: f64, df: f64) -> f64 {
    if df.is_infinite() {
        return normal_cdf(t);
    }
    StudentsT::new(0.0, 1.0, df).expect("valid parameters").cdf(t)
}

/// Two-sided p-value `P(|T| >= |t|)`.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return 1.0;
    }
    let tail = if df.is_infinite() {
        normal_sf(t.abs())
    } else {
        StudentsT::new(0.0, 1.0, df)
            .expect("valid parameters")
            .sf(t.abs())
    };
    (2.0 * tail).min(1.0)
}

pub fn f_cdf(x: f64, df1: f64, df2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    FisherSnedecor::new(df1, df2)
        .expect("valid parameters")
        .cdf(x)
}

pub fn f_sf(x: f64, df1: f64, df2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    FisherSnedecor::new(df1, df2)
        .expect("valid parameters")
        .sf(x)
}

pub fn chi2_cdf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ChiSquared::new(df).expect("valid parameters").cdf(x)
}

pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).expect("valid parameters").sf(x)
}

/// Above this many degrees of freedom the studentizing factor is treated as 1.
const RANGE_LARGE_DF: f64 = 25_000.0;
/// Half-width of the integration window for the standard normal variable.
const Z_LIMIT: f64 = 8.5;

/// `P(R <= w)` for the range `R` of `k` independent standard normals.
fn normal_range_cdf(w: f64, k: usize, inner: &InnerGrid) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let e = (k - 1) as i32;
    let total: f64 = inner
        .points
        .iter()
        .map(|pt| {
            let zw = pt.z - w;
            // Difference of normal CDFs computed on the side that avoids cancellation.
            let diff = if zw > 0.0 {
                normal_sf(zw) - pt.sf
            } else {
                pt.cdf - normal_cdf(zw)
            };
            pt.weighted_pdf * diff.max(0.0).powi(e)
        })
        .sum();
    (k as f64 * total).min(1.0)
}

struct InnerPoint {
    z: f64,
    weighted_pdf: f64,
    cdf: f64,
    sf: f64,
}

struct InnerGrid {
    points: Vec<InnerPoint>,
}

impl InnerGrid {
    fn new() -> Self {
        let rule = gl64();
        let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let points = [(-Z_LIMIT, 0.0), (0.0, Z_LIMIT)]
            .into_iter()
            .flat_map(|(a, b)| rule.mapped(a, b).collect::<Vec<_>>())
            .map(|(z, w)| InnerPoint {
                z,
                weighted_pdf: w * inv_sqrt_2pi * (-0.5 * z * z).exp(),
                cdf: normal_cdf(z),
                sf: normal_sf(z),
            })
            .collect();
        Self { points }
    }
}

/// CDF of the studentized range distribution with `k` groups and `df`
/// error degrees of freedom.
///
/// Outer integral over the studentizing factor `s = sqrt(chi2(df)/df)`,
/// inner integral over the standard normal; both use 64-node
/// Gauss–Legendre panels. The outer density is renormalized over the
/// same nodes so quadrature error in the density cancels.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return 1.0;
    }
    let inner = InnerGrid::new();
    if df > RANGE_LARGE_DF {
        return normal_range_cdf(q, k, &inner);
    }

    let spread = 12.0 / (2.0 * df).sqrt();
    let lo = (1.0 - spread).max(0.0);
    let hi = 1.0 + spread;
    let half_df = 0.5 * df;
    let log_norm = std::f64::consts::LN_2 + half_df * half_df.ln() - ln_gamma(half_df);

    const PANELS: usize = 4;
    let width = (hi - lo) / PANELS as f64;
    let rule = gl64();
    let mut mass = 0.0;
    let mut acc = 0.0;
    for p in 0..PANELS {
        let a = lo + p as f64 * width;
        for (s, w) in rule.mapped(a, a + width) {
            let log_density = log_norm + (df - 1.0) * s.ln() - half_df * s * s;
            let density = w * log_density.exp();
            if density < 1e-300 {
                continue;
            }
            mass += density;
            acc += density * normal_range_cdf(q * s, k, &inner);
        }
    }
    if mass > 0.0 {
        (acc / mass).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Upper tail of the studentized range distribution.
pub fn studentized_range_sf(q: f64, k: usize, df: f64) -> f64 {
    (1.0 - studentized_range_cdf(q, k, df)).clamp(0.0, 1.0)
}

/// Inverse of [`studentized_range_cdf`] by bisection.
pub fn studentized_range_quantile(p: f64, k: usize, df: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability must be in (0, 1)");
    let mut lo = 0.0;
    let mut hi = 8.0;
    while studentized_range_cdf(hi, k, df) < p {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if studentized_range_cdf(mid, k, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    0.5 * (lo + hi)
}
