//! Quadratic aggregative game model.
//!
//! Player i's cost depends on its own scalar strategy y_i and on the
//! aggregate sigma = sum_j y_j through a linear price term:
//!
//! ```text
//! J_i(y_i, sigma) = xi_i y_i^2 + beta_i y_i + alpha_i - (p0 - a sigma) y_i
//! ```
//!
//! with xi_i > 0 and a shared price law (p0, a >= 0). This family is closed
//! under everything the strategy-updating rules need: gradients are affine,
//! the pseudo-gradient is phi(y) = M y + (beta - p0 1) with
//! M = diag(2 xi + a) + a 1 1^T, strong monotonicity holds with
//! mu = lambda_min(M), and the unique Nash equilibrium solves the linear
//! system M y* = p0 1 - beta exactly.

use crate::linalg::{LinalgError, Matrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("player index {0} out of range for {1} players")]
    IndexOutOfRange(usize, usize),
    #[error("game needs at least one player")]
    Empty,
    #[error("player {0} has nonpositive quadratic coefficient xi = {1}")]
    NonConvex(usize, f64),
    #[error("price slope a must be nonnegative, got {0}")]
    NegativeSlope(f64),
    #[error("players disagree on the shared price parameters (p0, a)")]
    InconsistentPrice,
    #[error("pseudo-gradient is not strongly monotone (mu = {mu:.3e})")]
    NotMonotone { mu: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One player's cost parameters; (p0, a) are shared across the game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregativeCost {
    pub xi: f64,
    pub beta: f64,
    pub alpha: f64,
    pub p0: f64,
    pub a: f64,
}

impl AggregativeCost {
    /// Cost as a function of own strategy and the aggregate.
    pub fn eval(&self, y_i: f64, sigma: f64) -> f64 {
        self.xi * y_i * y_i + self.beta * y_i + self.alpha - (self.p0 - self.a * sigma) * y_i
    }
}

/// Strong-monotonicity certificate: mu bounds the pseudo-gradient from
/// below, theta is its Lipschitz constant in the aggregate estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityCertificate {
    pub mu: f64,
    pub theta: f64,
}

impl MonotonicityCertificate {
    pub fn passes(&self) -> bool {
        self.mu > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameModel {
    costs: Vec<AggregativeCost>,
}

impl GameModel {
    pub fn new(costs: Vec<AggregativeCost>) -> Result<Self, GameError> {
        if costs.is_empty() {
            return Err(GameError::Empty);
        }
        let (p0, a) = (costs[0].p0, costs[0].a);
        if a < 0.0 {
            return Err(GameError::NegativeSlope(a));
        }
        for (i, c) in costs.iter().enumerate() {
            if c.xi <= 0.0 {
                return Err(GameError::NonConvex(i + 1, c.xi));
            }
            if c.p0 != p0 || c.a != a {
                return Err(GameError::InconsistentPrice);
            }
        }
        Ok(GameModel { costs })
    }

    /// Build from the displaced-quadratic form
    /// `J_i = a_i (y_i - b_i)^2 - (c0 - c sigma) y_i`.
    pub fn from_vertex_form(a: &[f64], b: &[f64], c0: f64, c: f64) -> Result<Self, GameError> {
        assert_eq!(a.len(), b.len(), "vertex-form parameter lists must match");
        let costs = a
            .iter()
            .zip(b)
            .map(|(&ai, &bi)| AggregativeCost {
                xi: ai,
                beta: -2.0 * ai * bi,
                alpha: ai * bi * bi,
                p0: c0,
                a: c,
            })
            .collect();
        GameModel::new(costs)
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[AggregativeCost] {
        &self.costs
    }

    pub fn price_intercept(&self) -> f64 {
        self.costs[0].p0
    }

    pub fn price_slope(&self) -> f64 {
        self.costs[0].a
    }

    /// J_i evaluated on a full strategy profile (1-based player index).
    pub fn cost(&self, i: usize, y: &[f64]) -> Result<f64, GameError> {
        let c = self.player(i)?;
        let sigma: f64 = y.iter().sum();
        Ok(c.eval(y[i - 1], sigma))
    }

    fn player(&self, i: usize) -> Result<&AggregativeCost, GameError> {
        if i < 1 || i > self.costs.len() {
            return Err(GameError::IndexOutOfRange(i, self.costs.len()));
        }
        Ok(&self.costs[i - 1])
    }

    /// Own-strategy cost gradient of player i at the profile y, with the
    /// true aggregate: `2 xi_i y_i + beta_i - p0 + a sigma(y) + a y_i`.
    pub fn gradient(&self, i: usize, y: &[f64]) -> Result<f64, GameError> {
        let c = self.player(i)?;
        let sigma: f64 = y.iter().sum();
        Ok(2.0 * c.xi * y[i - 1] + c.beta - c.p0 + c.a * sigma + c.a * y[i - 1])
    }

    /// Gradient with the aggregate replaced by the local estimate eta_i.
    /// Coincides with [`Self::gradient`] when eta_i = sigma(y).
    pub fn partial_map(&self, i: usize, y_i: f64, eta_i: f64) -> Result<f64, GameError> {
        let c = self.player(i)?;
        Ok(2.0 * c.xi * y_i + c.beta - c.p0 + c.a * eta_i + c.a * y_i)
    }

    /// Stacked vector of all own-strategy gradients.
    pub fn pseudo_gradient(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n(), "profile length mismatch");
        let sigma: f64 = y.iter().sum();
        self.costs
            .iter()
            .zip(y)
            .map(|(c, &yi)| 2.0 * c.xi * yi + c.beta - c.p0 + c.a * sigma + c.a * yi)
            .collect()
    }

    /// The matrix M with phi(y) = M y + (beta - p0 1).
    pub fn pseudo_gradient_matrix(&self) -> Matrix {
        let n = self.n();
        let a = self.price_slope();
        Matrix::from_fn(n, n, |i, j| {
            let diag = if i == j { 2.0 * self.costs[i].xi + a } else { 0.0 };
            diag + a
        })
    }

    /// mu = lambda_min(M) (M is symmetric) and theta = a.
    pub fn monotonicity_certificate(&self) -> Result<MonotonicityCertificate, GameError> {
        let m = self.pseudo_gradient_matrix();
        let eigs = m.eigenvalues()?;
        let mu = eigs.iter().fold(f64::INFINITY, |acc, l| acc.min(l.re));
        Ok(MonotonicityCertificate {
            mu,
            theta: self.price_slope(),
        })
    }

    /// Closed-form Nash equilibrium: the unique solution of
    /// M y* = p0 1 - beta. Requires a strongly monotone pseudo-gradient.
    pub fn nash_equilibrium(&self) -> Result<Vec<f64>, GameError> {
        let cert = self.monotonicity_certificate()?;
        if !cert.passes() {
            return Err(GameError::NotMonotone { mu: cert.mu });
        }
        let m = self.pseudo_gradient_matrix();
        let rhs: Vec<f64> = self.costs.iter().map(|c| c.p0 - c.beta).collect();
        Ok(m.solve(&rhs)?)
    }
}
