use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not unimodular: det = {det}")]
    Unimodularity { det: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("asymptotic fit failed at lambda = {lambda}: residual {residual:e}")]
    Fit { lambda: f64, residual: f64 },
    #[error("witness ratios disagree: spread {spread:e} exceeds {tolerance:e}")]
    Inconsistency { spread: f64, tolerance: f64 },
    #[error("invalid sample grid: {0}")]
    Grid(String),
    #[error("calibration residual {residual:e} exceeds {tolerance:e}")]
    Calibration { residual: f64, tolerance: f64 },
    #[error("lower bound violated at t = {t}: Xi(a_t) e^t = {value}")]
    LowerBoundViolation { t: f64, value: f64 },
}

/// Non-fatal numerical diagnostics. Operations that can degrade silently
/// report these alongside their value instead of failing.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Integrand is not negligible at the truncation point.
    Truncation { at: f64, magnitude: f64 },
    /// A refinement check disagreed by more than the requested tolerance.
    Accuracy { estimate: f64, tolerance: f64 },
    /// Division by a spherical function value close to zero.
    SmallDivisor {
        lambda_re: f64,
        lambda_im: f64,
        divisor: f64,
    },
    /// Finite-difference derivative is dominated by rounding noise.
    NumericalNoise { order: usize, estimate: f64 },
    /// Two evaluation strategies disagree.
    StrategyDisagreement { difference: f64 },
    /// Tangent direction is outside the radius where Taylor data is trusted.
    LargeTangent { norm: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Truncation { at, magnitude } => {
                write!(f, "truncation: |integrand({at})| = {magnitude:.3e}")
            }
            Warning::Accuracy { estimate, tolerance } => {
                write!(f, "accuracy: estimate {estimate:.3e} > tol {tolerance:.3e}")
            }
            Warning::SmallDivisor {
                lambda_re,
                lambda_im,
                divisor,
            } => write!(
                f,
                "small divisor: |phi| = {divisor:.3e} at lambda = {lambda_re}{lambda_im:+}i"
            ),
            Warning::NumericalNoise { order, estimate } => {
                write!(f, "noise: order-{order} derivative error ~{estimate:.3e}")
            }
            Warning::StrategyDisagreement { difference } => {
                write!(f, "strategies disagree by {difference:.3e}")
            }
            Warning::LargeTangent { norm } => write!(f, "tangent norm {norm:.3} > 2"),
        }
    }
}

/// A computed value together with the diagnostics raised while producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Checked<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn with_warnings(value: T, warnings: Vec<Warning>) -> Self {
        Self { value, warnings }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Checked<U> {
        Checked {
            value: f(self.value),
            warnings: self.warnings,
        }
    }
}
