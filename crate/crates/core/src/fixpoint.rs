//! Fixed-point iteration for contractions on [`ValueFn`].
//!
//! [`iterate_to_fixpoint`] applies a map until successive iterates are
//! closer than `theta` in the sup norm. When the contraction modulus is known
//! the result carries the posterior bound
//! `||x_k - x*|| <= (gamma * residual + delta) / (1 - gamma)`, where `delta`
//! is an allowance for rounding in the evaluation of the map,
//! [`ROUNDING_ULPS`] ulps of `||x_k||`.
//!
//! The `check_*` functions are numeric certificates: they never fail, they
//! report what was observed on the inputs they were given.

use crate::error::{Error, Result};
use crate::fnspace::ValueFn;

/// Rounding allowance per map evaluation, in units of `f64::EPSILON * ||x||`.
pub const ROUNDING_ULPS: f64 = 16.0;

/// Slack allowed on contraction ratios.
pub const CONTRACTION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixpointConfig {
    /// Stop once `||x_{k+1} - x_k|| < theta`.
    pub theta: f64,
    pub max_iter: usize,
    /// Known contraction modulus, used for the error bound.
    pub gamma_hint: Option<f64>,
}

impl Default for FixpointConfig {
    fn default() -> Self {
        Self {
            theta: 1e-10,
            max_iter: 10_000,
            gamma_hint: None,
        }
    }
}

impl FixpointConfig {
    pub fn new(theta: f64, max_iter: usize, gamma_hint: Option<f64>) -> Result<Self> {
        let cfg = Self {
            theta,
            max_iter,
            gamma_hint,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self {
            gamma_hint: Some(gamma),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidConfig(format!("theta must be > 0, got {}", self.theta)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        if let Some(g) = self.gamma_hint {
            if !(0.0..1.0).contains(&g) {
                return Err(Error::InvalidConfig(format!("gamma_hint must lie in [0, 1), got {g}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixpointResult {
    pub point: ValueFn,
    /// Number of applications of the map.
    pub iterations: usize,
    /// `||x_k - x_{k-1}||` for the returned iterate.
    pub residual: f64,
    /// `||x_1 - x_0||`, for a priori bounds.
    pub initial_step: f64,
    /// Distance bound to the exact fixed point when the modulus is known;
    /// see [`posterior_bound`].
    pub error_bound: Option<f64>,
}

/// Posterior distance bound for a contraction with modulus `gamma` whose
/// last step moved by `residual` and landed on a point of norm `norm`.
pub fn posterior_bound(gamma: f64, residual: f64, norm: f64) -> f64 {
    (gamma * residual + ROUNDING_ULPS * f64::EPSILON * norm) / (1.0 - gamma)
}

/// A priori bound `gamma^n / (1 - gamma) * ||x_1 - x_0||`.
pub fn a_priori_bound(gamma: f64, n: usize, initial_step: f64) -> f64 {
    gamma.powi(n as i32) / (1.0 - gamma) * initial_step
}

/// Iterates `map` from `x0` until the successive residual drops below
/// `cfg.theta`, returning that iterate.
pub fn iterate_to_fixpoint<F>(mut map: F, x0: ValueFn, cfg: &FixpointConfig) -> Result<FixpointResult>
where
    F: FnMut(&ValueFn) -> ValueFn,
{
    cfg.validate()?;
    let mut x = x0;
    let mut residual = f64::INFINITY;
    let mut initial_step = 0.0;
    for k in 1..=cfg.max_iter {
        let next = map(&x);
        if let Some(index) = next.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        residual = next.dist(&x)?;
        if k == 1 {
            initial_step = residual;
        }
        x = next;
        if residual < cfg.theta {
            let norm = x.sup_norm();
            return Ok(FixpointResult {
                point: x,
                iterations: k,
                residual,
                initial_step,
                error_bound: cfg.gamma_hint.map(|g| posterior_bound(g, residual, norm)),
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub pairs: usize,
    /// Largest `d(F u, F v) / d(u, v)` over pairs with `u != v`.
    pub max_ratio: f64,
    /// Largest `d(F u, F v) - modulus * d(u, v)`.
    pub max_excess: f64,
    /// Every pair satisfied `d(F u, F v) <= modulus * d(u, v) + CONTRACTION_SLACK`.
    pub holds: bool,
}

/// Samples the contraction inequality on the given pairs.
pub fn check_contraction<F>(map: F, modulus: f64, samples: &[(ValueFn, ValueFn)]) -> ContractionReport
where
    F: Fn(&ValueFn) -> ValueFn,
{
    let mut max_ratio: f64 = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    for (u, v) in samples {
        let d = u.dist(v).expect("sample pair lengths differ");
        let df = map(u).dist(&map(v)).expect("map changed the length");
        if d > 0.0 {
            max_ratio = max_ratio.max(df / d);
        }
        max_excess = max_excess.max(df - modulus * d);
    }
    ContractionReport {
        pairs: samples.len(),
        max_ratio,
        max_excess,
        holds: max_excess <= CONTRACTION_SLACK,
    }
}

/// Outcome of checking an implication numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Implication {
    /// The hypothesis did not hold.
    NotApplicable,
    Holds,
    Violated,
}

impl Implication {
    pub fn evaluate(hypothesis: bool, conclusion: bool) -> Self {
        match (hypothesis, conclusion) {
            (false, _) => Self::NotApplicable,
            (true, true) => Self::Holds,
            (true, false) => Self::Violated,
        }
    }

    pub fn is_violated(self) -> bool {
        self == Self::Violated
    }
}

/// Tolerances for [`check_order_coinduction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinductionTolerance {
    pub modulus: f64,
    /// Slack on the hypothesis `F(x) <= x`.
    pub eps: f64,
    /// How far `fix` may be from the true fixed point.
    pub fix_error_bound: f64,
}

impl CoinductionTolerance {
    /// Slack on the conclusion: `eps / (1 - modulus) + fix_error_bound`.
    pub fn conclusion_slack(&self) -> f64 {
        self.eps / (1.0 - self.modulus) + self.fix_error_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinductionReport {
    /// `F(x) <= x  =>  fix <= x`.
    pub upper: Implication,
    /// `x <= F(x)  =>  x <= fix`.
    pub lower: Implication,
}

/// Checks both order consequences of a monotone contraction at `x`.
pub fn check_order_coinduction<F>(map: F, x: &ValueFn, fix: &ValueFn, tol: &CoinductionTolerance) -> CoinductionReport
where
    F: Fn(&ValueFn) -> ValueFn,
{
    let fx = map(x);
    let slack = tol.conclusion_slack();
    let upper = Implication::evaluate(
        fx.le_within(x, tol.eps).expect("map changed the length"),
        fix.le_within(x, slack).expect("fixed point length differs"),
    );
    let lower = Implication::evaluate(
        x.le_within(&fx, tol.eps).expect("map changed the length"),
        x.le_within(fix, slack).expect("fixed point length differs"),
    );
    CoinductionReport { upper, lower }
}
