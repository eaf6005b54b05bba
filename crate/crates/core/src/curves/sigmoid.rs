//! Four-parameter logistic fit by Levenberg–Marquardt.

use nalgebra::{Matrix4, Vector4};

use super::{check_inputs, coefficient_p_value, Coefficients, Family, FitError, FitResult};
use crate::stats::{max_abs, mean, negligible_ss};

const MAX_ITER: usize = 200;
const REL_TOL: f64 = 1e-10;
const LAMBDA_MAX: f64 = 1e16;

/// Numerically stable `1 / (1 + exp(-z))`.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Partial derivatives of `L s(a (x - x0)) + b` with respect to `(L, a, x0, b)`.
pub fn sigmoid_jacobian_row(params: [f64; 4], x: f64) -> [f64; 4] {
    let [l, a, x0, _] = params;
    let s = logistic(a * (x - x0));
    let ds = s * (1.0 - s);
    [s, l * ds * (x - x0), -l * ds * a, 1.0]
}

fn model(p: &Vector4<f64>, x: f64) -> f64 {
    p[0] * logistic(p[1] * (x - p[2])) + p[3]
}

fn sse(p: &Vector4<f64>, x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&xi, &yi)| (yi - model(p, xi)).powi(2)).sum()
}

fn normal_equations(p: &Vector4<f64>, x: &[f64], y: &[f64]) -> (Matrix4<f64>, Vector4<f64>) {
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let j = Vector4::from(sigmoid_jacobian_row([p[0], p[1], p[2], p[3]], xi));
        let r = yi - model(p, xi);
        jtj += j * j.transpose();
        jtr += j * r;
    }
    (jtj, jtr)
}

struct Attempt {
    params: Vector4<f64>,
    sse: f64,
    converged: bool,
}

fn levenberg_marquardt(x: &[f64], y: &[f64], start: Vector4<f64>) -> Attempt {
    let mut p = start;
    let mut cost = sse(&p, x, y);
    let mut lambda = 1e-3;
    let floor = 1e-28 * x.len() as f64;
    if !cost.is_finite() {
        return Attempt { params: p, sse: cost, converged: false };
    }
    for _ in 0..MAX_ITER {
        if cost <= floor {
            return Attempt { params: p, sse: cost, converged: true };
        }
        let (jtj, jtr) = normal_equations(&p, x, y);
        let d_max = jtj.diagonal().max();
        let mut accepted = None;
        while lambda <= LAMBDA_MAX {
            let mut a = jtj;
            for i in 0..4 {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-12 * d_max.max(f64::MIN_POSITIVE));
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + chol.solve(&jtr);
            let trial_cost = sse(&trial, x, y);
            if trial_cost.is_finite() && trial_cost < cost {
                accepted = Some((trial, trial_cost));
                lambda = (lambda / 10.0).max(1e-12);
                break;
            }
            lambda *= 10.0;
        }
        let Some((trial, trial_cost)) = accepted else {
            // No descent at any damping: a stationary point.
            return Attempt { params: p, sse: cost, converged: true };
        };
        let rel = (cost - trial_cost) / cost;
        p = trial;
        cost = trial_cost;
        if rel < REL_TOL {
            return Attempt { params: p, sse: cost, converged: true };
        }
    }
    Attempt { params: p, sse: cost, converged: false }
}

fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// `y = L / (1 + exp(-a (x - x0))) + b` by Levenberg–Marquardt.
///
/// Two starts are tried (`a0 = +-4 / range(x)`) and the lower SSE is kept.
/// The reported coefficients are normalized to `a >= 0` using
/// `(L, a, x0, b) ~ (-L, -a, x0, b + L)`. The p-value of `a` uses the
/// asymptotic covariance `s^2 (J'J)^-1` with `n - 4` df.
pub fn fit_sigmoid(x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    check_inputs(Family::Sigmoid, x, y)?;
    let n = x.len();
    let (mx, my) = (mean(x), mean(y));
    let sd = |v: &[f64], m: f64| (v.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / n as f64).sqrt();
    let (sx, sy) = (sd(x, mx), sd(y, my));

    if sy == 0.0 {
        return Ok(FitResult {
            family: Family::Sigmoid,
            coefficients: Coefficients::Sigmoid { l: 0.0, a: 0.0, x0: median(x), b: y[0] },
            p_value_a: None,
            std_error_a: None,
            rmse: 0.0,
            converged: false,
            n_points: n,
            degenerate: true,
        });
    }

    // Work on standardized data; the transform is undone at the end.
    let xs: Vec<f64> = x.iter().map(|v| (v - mx) / sx).collect();
    let ys: Vec<f64> = y.iter().map(|v| (v - my) / sy).collect();
    let (x_lo, x_hi) = min_max(&xs);
    let (y_lo, y_hi) = min_max(&ys);
    let a0 = 4.0 / (x_hi - x_lo);
    let x00 = median(&xs);
    let starts = [
        Vector4::new(y_hi - y_lo, a0, x00, y_lo),
        Vector4::new(y_hi - y_lo, -a0, x00, y_lo),
    ];
    let best = starts
        .into_iter()
        .map(|s| levenberg_marquardt(&xs, &ys, s))
        .reduce(|a, b| {
            let better = match (a.converged, b.converged) {
                (true, false) => false,
                (false, true) => true,
                _ => b.sse < a.sse,
            };
            if better { b } else { a }
        })
        .expect("two attempts");

    let mut p = best.params;
    let mut converged = best.converged && p.iter().all(|v| v.is_finite());
    if p[1] < 0.0 {
        p = Vector4::new(-p[0], -p[1], p[2], p[3] + p[0]);
    }

    let (jtj, _) = normal_equations(&p, &xs, &ys);
    let var_a_unscaled = jtj
        .try_inverse()
        .map(|inv| inv[(1, 1)])
        .filter(|v| v.is_finite() && *v > 0.0);
    if var_a_unscaled.is_none() {
        converged = false;
    }

    let l = sy * p[0];
    let a = p[1] / sx;
    let x0 = mx + sx * p[2];
    let b = sy * p[3] + my;
    let coefficients = Coefficients::Sigmoid { l, a, x0, b };
    let raw_sse = best.sse * sy * sy;
    let rmse = (raw_sse / n as f64).sqrt();

    let (p_value_a, std_error_a, degenerate) = match (converged, var_a_unscaled) {
        (true, Some(v)) => {
            let df = (n - 4) as f64;
            let se_std = (best.sse / df * v).sqrt();
            let zero_residual = negligible_ss(raw_sse, n, max_abs(y));
            let (pv, deg) = coefficient_p_value(p[1], se_std, df, zero_residual, p[1] == 0.0);
            (Some(pv), Some(se_std / sx), deg)
        }
        _ => (None, None, false),
    };

    Ok(FitResult {
        family: Family::Sigmoid,
        coefficients,
        p_value_a,
        std_error_a,
        rmse,
        converged,
        n_points: n,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn generate(x: &[f64], l: f64, a: f64, x0: f64, b: f64) -> Vec<f64> {
        x.iter().map(|&v| l * logistic(a * (v - x0)) + b).collect()
    }

    #[test]
    fn logistic_is_stable() {
        assert_eq!(logistic(0.0), 0.5);
        assert_eq!(logistic(800.0), 1.0);
        assert_eq!(logistic(-800.0), 0.0);
        assert!((logistic(2.0) + logistic(-2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noiseless_recovery() {
        let x = grid(-3.0, 3.0, 61);
        let y = generate(&x, 2.0, 3.0, 0.0, -1.0);
        let f = fit_sigmoid(&x, &y).unwrap();
        assert!(f.converged);
        let Coefficients::Sigmoid { l, a, x0, b } = f.coefficients else { panic!() };
        for (got, want) in [(l, 2.0), (a, 3.0), (x0, 0.0), (b, -1.0)] {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
        assert!(f.rmse < 1e-8);
        assert_eq!(f.p_value_a, Some(0.0));
    }

    #[test]
    fn decreasing_sigmoid_is_normalized() {
        let x = grid(0.0, 10.0, 41);
        let y = generate(&x, 1.5, -2.0, 4.0, 0.5);
        let f = fit_sigmoid(&x, &y).unwrap();
        let Coefficients::Sigmoid { l, a, x0, b } = f.coefficients else { panic!() };
        // Equivalent form with a > 0: (-1.5, 2, 4, 2).
        assert!(a > 0.0);
        assert!((l + 1.5).abs() < 1e-6 && (a - 2.0).abs() < 1e-6);
        assert!((x0 - 4.0).abs() < 1e-6 && (b - 2.0).abs() < 1e-6);
    }

    #[test]
    fn flat_data_does_not_converge() {
        let x = grid(0.0, 1.0, 10);
        let f = fit_sigmoid(&x, &[0.3; 10]).unwrap();
        assert!(!f.converged);
        assert!(f.p_value_a.is_none());
    }

    #[test]
    fn negated_response_has_same_rmse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..200).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| 2.0 * logistic(3.0 * v) - 1.0 + 0.05 * (rng.random::<f64>() - 0.5))
            .collect();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let f = fit_sigmoid(&x, &y).unwrap();
        let g = fit_sigmoid(&x, &neg).unwrap();
        assert!(f.converged && g.converged);
        assert!((f.rmse - g.rmse).abs() < 1e-8, "{} vs {}", f.rmse, g.rmse);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..200 {
            let p = [
                rng.random_range(-3.0..3.0),
                rng.random_range(-4.0..4.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-1.0..1.0),
            ];
            let x = rng.random_range(-3.0..3.0);
            let f = |q: [f64; 4]| q[0] * logistic(q[1] * (x - q[2])) + q[3];
            let analytic = sigmoid_jacobian_row(p, x);
            for k in 0..4 {
                let (mut up, mut dn) = (p, p);
                up[k] += h;
                dn[k] -= h;
                let numeric = (f(up) - f(dn)) / (2.0 * h);
                let err = (numeric - analytic[k]).abs() / analytic[k].abs().max(1e-3);
                assert!(err < 1e-4, "param {k}: {numeric} vs {}", analytic[k]);
            }
        }
    }
}
