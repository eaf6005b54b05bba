//! Shapiro–Wilk normality test (Royston's AS R94 algorithm).

use super::dist::{normal_quantile, normal_sf};
use super::{all_finite, NormalityGate, StatError};

const MAX_N: usize = 5000;

// Polynomial coefficients of the AS R94 approximations.
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

/// Shapiro–Wilk W and its p-value; `is_normal` compares against `alpha`.
///
/// Valid for `3 <= n <= 5000`. Constant samples are rejected with
/// [`StatError::ZeroVariance`].
pub fn shapiro_wilk(sample: &[f64], alpha: f64) -> Result<NormalityGate, StatError> {
    let n = sample.len();
    if n < 3 {
        return Err(StatError::TooFewObservations { needed: 3, got: n });
    }
    if n > MAX_N {
        return Err(StatError::InvalidParameter(format!(
            "Shapiro-Wilk supports at most {MAX_N} observations, got {n}"
        )));
    }
    if !all_finite(sample) {
        return Err(StatError::NonFinite);
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range <= 0.0 {
        return Err(StatError::ZeroVariance);
    }

    let w = if n == 3 {
        // a = (-sqrt(1/2), 0, sqrt(1/2)) gives W = (x3 - x1)^2 / (2 SS).
        let m = (x[0] + x[1] + x[2]) / 3.0;
        let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
        ((x[2] - x[0]).powi(2) / (2.0 * ss)).min(1.0)
    } else {
        let half = coefficients(n);
        statistic(&x, &half, range)
    };
    let p = p_value(w, n);
    Ok(NormalityGate::from_w(w, p, alpha))
}

/// Upper-half coefficients `a_1 >= a_2 >= ... > 0` for `n >= 4`.
fn coefficients(n: usize) -> Vec<f64> {
    let nn2 = n / 2;
    let an = n as f64;
    let an25 = an + 0.25;
    let m: Vec<f64> = (1..=nn2)
        .map(|i| normal_quantile((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; nn2];
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    a[0] = a1;
    for i in first..nn2 {
        a[i] = -m[i] / fac;
    }
    a
}

/// W as the squared correlation between the sorted sample and the full
/// antisymmetric coefficient vector, computed as `1 - (1 - W)` for accuracy.
fn statistic(sorted: &[f64], half: &[f64], range: f64) -> f64 {
    let n = sorted.len();
    let coef = |i: usize| -> f64 {
        let j = n - 1 - i;
        if i < j {
            -half[i]
        } else if i > j {
            half[j]
        } else {
            0.0
        }
    };
    let sa = (0..n).map(coef).sum::<f64>() / n as f64;
    let sx = sorted.iter().map(|v| v / range).sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, v) in sorted.iter().enumerate() {
        let asa = coef(i) - sa;
        let xsx = v / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    (1.0 - w1).clamp(0.0, 1.0)
}

fn p_value(w: f64, n: usize) -> f64 {
    if n == 3 {
        const SIX_OVER_PI: f64 = 6.0 / std::f64::consts::PI;
        const PI_OVER_3: f64 = std::f64::consts::PI / 3.0;
        return (SIX_OVER_PI * (w.sqrt().asin() - PI_OVER_3)).clamp(0.0, 1.0);
    }
    let w1 = 1.0 - w;
    if w1 <= 0.0 {
        return 1.0;
    }
    let an = n as f64;
    let mut y = w1.ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let xx = an.ln();
        (poly(&C5, xx), poly(&C6, xx).exp())
    };
    normal_sf((y - m) / s).clamp(0.0, 1.0)
}

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_closed_form() {
        let g = shapiro_wilk(&[1.0, 2.0, 3.0], 0.05).unwrap();
        assert_eq!(g.w_statistic, 1.0);
        assert!((g.p_value - 1.0).abs() < 1e-12);
        assert!(g.is_normal);

        let g = shapiro_wilk(&[1.0, 2.0, 5.0], 0.05).unwrap();
        assert!((g.w_statistic - 0.923_076_923_076_923).abs() < 1e-12);
        assert!((g.p_value - 0.463_262_874_933_799).abs() < 1e-9);
    }

    #[test]
    fn reference_vectors() {
        // Frozen outputs of the reference AS R94 Fortran routine.
        let cases: [(&[f64], f64, f64); 4] = [
            (
                &[148., 154., 158., 160., 161., 162., 166., 170., 182., 195., 236., 250.],
                0.784_658_174_762_983_9,
                0.006_302_912_968_676_248,
            ),
            (
                &[
                    2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 7.9, 3.1, 2.2, 4.8, 3.9, 2.5, 6.1, 3.0,
                    2.7, 4.1, 3.6, 2.9, 3.8,
                ],
                0.891_528_572_268_799_8,
                0.028_692_409_842_002_907,
            ),
            (&[1., 2., 4., 7., 11.], 0.934_433_859_101_854_8, 0.626_901_641_608_314_6),
            (
                &[0.1, 0.3, 0.2, 0.9, 0.4, 0.35, 0.5, 0.25],
                0.880_239_826_337_562_1,
                0.189_325_719_147_069_42,
            ),
        ];
        for (x, w, p) in cases {
            let g = shapiro_wilk(x, 0.05).unwrap();
            assert!((g.w_statistic - w).abs() < 1e-6, "n={}: W {} vs {w}", x.len(), g.w_statistic);
            assert!((g.p_value - p).abs() < 1e-6, "n={}: p {} vs {p}", x.len(), g.p_value);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(shapiro_wilk(&[5.0; 4], 0.05), Err(StatError::ZeroVariance));
        assert!(matches!(
            shapiro_wilk(&[1.0, 2.0], 0.05),
            Err(StatError::TooFewObservations { needed: 3, got: 2 })
        ));
        assert!(shapiro_wilk(&vec![0.5; 5001], 0.05).is_err());
        assert!(!super::super::passes_normality(&[5.0; 4], 0.05));
    }

    #[test]
    fn invariant_to_location_scale_and_order() {
        let x = [3.1, 0.2, 5.5, 2.2, 9.0, 4.4, 1.0, 2.8, 3.3];
        let base = shapiro_wilk(&x, 0.05).unwrap();
        let moved: Vec<f64> = x.iter().rev().map(|v| 2.5 * v - 7.0).collect();
        let other = shapiro_wilk(&moved, 0.05).unwrap();
        assert!((base.w_statistic - other.w_statistic).abs() < 1e-12);
        assert!((base.p_value - other.p_value).abs() < 1e-10);
    }
}
