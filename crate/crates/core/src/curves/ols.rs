//! Ordinary least squares for the linear and quadratic families.

use nalgebra::{DMatrix, DVector};

use super::{check_inputs, coefficient_p_value, Coefficients, Family, FitError, FitResult};
use crate::stats::{max_abs, mean, negligible_ss};

/// `y = a x + b` by least squares, with the t-test of `a` on `n - 2` df.
pub fn fit_linear(x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    check_inputs(Family::Linear, x, y)?;
    let n = x.len();
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - my - a * (xi - mx)).powi(2))
        .sum();
    let df = (n - 2) as f64;
    let se = (sse / df / sxx).sqrt();
    let scale = max_abs(y);
    let zero_residual = negligible_ss(sse, n, scale);
    let zero_effect = zero_residual && negligible_ss(a * a * sxx, n, scale);
    let (p, degenerate) = coefficient_p_value(a, se, df, zero_residual, zero_effect);
    let (a, b) = if zero_effect { (0.0, my) } else { (a, b) };
    Ok(FitResult {
        family: Family::Linear,
        coefficients: Coefficients::Linear { a, b },
        p_value_a: Some(p),
        std_error_a: Some(se),
        rmse: (sse / n as f64).sqrt(),
        converged: true,
        n_points: n,
        degenerate,
    })
}

/// `y = a x^2 + b x + c` by least squares, with the t-test of `a` on `n - 3` df.
///
/// Solved by QR on the centered and scaled design `[1, u, u^2]`,
/// `u = (x - mean) / sd`, then mapped back to raw coefficients.
pub fn fit_quadratic(x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    check_inputs(Family::Quadratic, x, y)?;
    let n = x.len();
    if distinct_at_least(x, 3) < 3 {
        return Err(FitError::RankDeficient(3));
    }
    let m = mean(x);
    let s = (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64).sqrt();
    let u: Vec<f64> = x.iter().map(|v| (v - m) / s).collect();
    let design = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => u[i],
        _ => u[i] * u[i],
    });
    let yv = DVector::from_column_slice(y);
    let qr = design.clone().qr();
    let r = qr.r();
    let r_max = (0..3).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..3).any(|i| r[(i, i)].abs() <= 1e-10 * r_max) {
        return Err(FitError::RankDeficient(3));
    }
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(FitError::RankDeficient(3))?;
    let (gamma, bu, alpha) = (beta[0], beta[1], beta[2]);
    let residuals = &yv - &design * &beta;
    let sse = residuals.norm_squared();
    let df = (n - 3) as f64;
    let r22 = r[(2, 2)].abs();
    let se_alpha = (sse / df).sqrt() / r22;

    let s2 = s * s;
    let a = alpha / s2;
    let b = bu / s - 2.0 * alpha * m / s2;
    let c = alpha * m * m / s2 - bu * m / s + gamma;

    let scale = max_abs(y);
    let zero_residual = negligible_ss(sse, n, scale);
    let zero_effect = zero_residual && negligible_ss((alpha * r22).powi(2), n, scale);
    let (p, degenerate) = coefficient_p_value(alpha, se_alpha, df, zero_residual, zero_effect);
    let (a, se_a) = if zero_effect { (0.0, 0.0) } else { (a, se_alpha / s2) };
    Ok(FitResult {
        family: Family::Quadratic,
        coefficients: Coefficients::Quadratic { a, b, c },
        p_value_a: Some(p),
        std_error_a: Some(se_a),
        rmse: (sse / n as f64).sqrt(),
        converged: true,
        n_points: n,
        degenerate,
    })
}

/// Counts distinct values, stopping once `cap` is reached.
fn distinct_at_least(x: &[f64], cap: usize) -> usize {
    let mut seen: Vec<f64> = Vec::with_capacity(cap);
    for &v in x {
        if !seen.contains(&v) {
            seen.push(v);
            if seen.len() >= cap {
                break;
            }
        }
    }
    seen.len()
}
