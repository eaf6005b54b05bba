//! Linear, quadratic and sigmoid fits of SHAP value against feature value.
//!
//! A family counts as a significant pattern when the p-value of its
//! leading coefficient `a` is below the chosen level. Among significant
//! families the one with the smallest RMSE wins.

mod ols;
mod sigmoid;

use serde::Serialize;
use thiserror::Error;

pub use ols::{fit_linear, fit_quadratic};
pub use sigmoid::{fit_sigmoid, logistic, sigmoid_jacobian_row};

use crate::stats::dist::t_two_sided;
use crate::stats::is_constant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    Quadratic,
    Sigmoid,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Linear, Family::Quadratic, Family::Sigmoid];

    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Quadratic => "quadratic",
            Family::Sigmoid => "sigmoid",
        }
    }

    /// Number of free coefficients.
    pub fn n_params(self) -> usize {
        match self {
            Family::Linear => 2,
            Family::Quadratic => 3,
            Family::Sigmoid => 4,
        }
    }

    /// Smallest sample size the fit accepts.
    pub fn min_points(self) -> usize {
        match self {
            Family::Linear => 3,
            Family::Quadratic => 4,
            Family::Sigmoid => 5,
        }
    }

    /// Fits this family to `(x, y)`.
    pub fn fit(self, x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
        match self {
            Family::Linear => fit_linear(x, y),
            Family::Quadratic => fit_quadratic(x, y),
            Family::Sigmoid => fit_sigmoid(x, y),
        }
    }
}

/// Fitted coefficients.
///
/// * linear: `a x + b`
/// * quadratic: `a x^2 + b x + c`
/// * sigmoid: `L / (1 + exp(-a (x - x0))) + b`, normalized so that `a >= 0`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Coefficients {
    Linear { a: f64, b: f64 },
    Quadratic { a: f64, b: f64, c: f64 },
    Sigmoid { l: f64, a: f64, x0: f64, b: f64 },
}

impl Coefficients {
    pub fn family(&self) -> Family {
        match self {
            Coefficients::Linear { .. } => Family::Linear,
            Coefficients::Quadratic { .. } => Family::Quadratic,
            Coefficients::Sigmoid { .. } => Family::Sigmoid,
        }
    }

    /// The leading coefficient `a`.
    pub fn a(&self) -> f64 {
        match *self {
            Coefficients::Linear { a, .. }
            | Coefficients::Quadratic { a, .. }
            | Coefficients::Sigmoid { a, .. } => a,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Coefficients::Linear { a, b } => a * x + b,
            Coefficients::Quadratic { a, b, c } => (a * x + b) * x + c,
            Coefficients::Sigmoid { l, a, x0, b } => l * logistic(a * (x - x0)) + b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub family: Family,
    pub coefficients: Coefficients,
    /// Two-sided p-value of the coefficient `a`; present whenever converged.
    pub p_value_a: Option<f64>,
    pub std_error_a: Option<f64>,
    pub rmse: f64,
    pub converged: bool,
    pub n_points: usize,
    /// Zero residuals; `p_value_a` is a boundary value.
    pub degenerate: bool,
}

impl FitResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.converged && self.p_value_a.is_some_and(|p| p < alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("{family} fit needs at least {needed} points, got {got}")]
    TooFewPoints {
        family: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("x and y lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("x is constant")]
    ConstantX,
    #[error("design matrix is rank deficient (fewer than {0} distinct x values)")]
    RankDeficient(usize),
    #[error("input contains non-finite values")]
    NonFinite,
}

pub(crate) fn check_inputs(family: Family, x: &[f64], y: &[f64]) -> Result<(), FitError> {
    if x.len() != y.len() {
        return Err(FitError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < family.min_points() {
        return Err(FitError::TooFewPoints {
            family: family.name(),
            needed: family.min_points(),
            got: x.len(),
        });
    }
    if !x.iter().chain(y).all(|v| v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    if is_constant(x) {
        return Err(FitError::ConstantX);
    }
    Ok(())
}

/// p-value of `a` with the zero-residual conventions: an exact fit with a
/// nonzero `a` is maximally significant, a zero `a` is not significant.
pub(crate) fn coefficient_p_value(
    estimate: f64,
    std_error: f64,
    df: f64,
    zero_residual: bool,
    zero_effect: bool,
) -> (f64, bool) {
    if zero_effect {
        return (1.0, true);
    }
    if zero_residual || std_error == 0.0 {
        return (0.0, true);
    }
    (t_two_sided(estimate / std_error, df), false)
}

/// Outcome of fitting every family to one scatter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSelection {
    /// Every fit that could be attempted, in family order.
    pub attempted: Vec<FitResult>,
    pub significant_fits: Vec<FitResult>,
    pub best: Option<FitResult>,
    pub none_significant: bool,
}

/// RMSE differences below this are ties, resolved toward the simpler family.
const RMSE_TIE: f64 = 1e-12;

/// Fits all three families and keeps the significant one with the lowest RMSE.
pub fn select_best_fit(x: &[f64], y: &[f64], alpha: f64) -> FitSelection {
    let attempted: Vec<FitResult> = Family::ALL
        .iter()
        .filter_map(|f| f.fit(x, y).ok())
        .collect();
    let significant_fits: Vec<FitResult> = attempted
        .iter()
        .filter(|f| f.is_significant(alpha))
        .cloned()
        .collect();
    let mut best: Option<&FitResult> = None;
    for fit in &significant_fits {
        match best {
            Some(current) if fit.rmse >= current.rmse - RMSE_TIE => {}
            _ => best = Some(fit),
        }
    }
    let best = best.cloned();
    FitSelection {
        none_significant: best.is_none(),
        attempted,
        significant_fits,
        best,
    }
}

/// Evaluates a fitted curve at each `x`.
pub fn evaluate_fit(fit: &FitResult, x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| fit.coefficients.eval(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit_with(coefficients: Coefficients) -> FitResult {
        FitResult {
            family: coefficients.family(),
            coefficients,
            p_value_a: Some(0.0),
            std_error_a: Some(0.0),
            rmse: 0.0,
            converged: true,
            n_points: 0,
            degenerate: false,
        }
    }

    #[test]
    fn evaluate_examples() {
        let lin = fit_with(Coefficients::Linear { a: 2.0, b: 1.0 });
        assert_eq!(evaluate_fit(&lin, &[0.0, 1.0]), vec![1.0, 3.0]);
        let sig = fit_with(Coefficients::Sigmoid { l: 1.0, a: 1.0, x0: 0.0, b: 0.0 });
        assert_eq!(evaluate_fit(&sig, &[0.0]), vec![0.5]);
        let quad = fit_with(Coefficients::Quadratic { a: 1.0, b: 0.0, c: 0.0 });
        assert_eq!(evaluate_fit(&quad, &[-1.0, 0.0, 1.0]), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn exact_line_selects_linear() {
        let x: Vec<f64> = (0..12).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 2.0).collect();
        let sel = select_best_fit(&x, &y, 0.05);
        let best = sel.best.unwrap();
        assert_eq!(best.family, Family::Linear);
        assert_eq!(best.rmse, 0.0);
        assert!(!sel.significant_fits.iter().any(|f| f.family == Family::Quadratic));
    }

    #[test]
    fn symmetric_parabola_selects_quadratic() {
        let x: Vec<f64> = (-10..=10).map(|v| v as f64 / 2.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let sel = select_best_fit(&x, &y, 0.05);
        assert_eq!(sel.best.unwrap().family, Family::Quadratic);
        assert!(!sel.significant_fits.iter().any(|f| f.family == Family::Linear));
    }

    #[test]
    fn flat_data_has_no_pattern() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let sel = select_best_fit(&x, &[0.25; 20], 0.05);
        assert!(sel.none_significant);
        assert!(sel.best.is_none());
    }

    #[test]
    fn tiny_inputs_are_excluded_not_fatal() {
        let sel = select_best_fit(&[1.0, 2.0], &[1.0, 2.0], 0.05);
        assert!(sel.attempted.is_empty());
        assert!(sel.none_significant);
    }
}
