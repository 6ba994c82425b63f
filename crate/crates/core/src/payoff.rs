//! Finite-state payoff space: payoffs, probability vectors and polyhedral cones.
//!
//! Payoffs live in `R^N` with the pointwise order and the sup-norm. The
//! all-ones vector is the order unit; cones are kept in half-space form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for cone membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Default tolerance for strict cone interior checks.
pub const INTERIOR_TOL: f64 = 1e-7;
/// Allowed deviation of a probability vector's total mass from one.
pub const PROBABILITY_SUM_TOL: f64 = 1e-9;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_finite(field: &str, values: &[f64]) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(
            format!("{field}[{i}]"),
            format!("non-finite value {}", values[i]),
        ));
    }
    Ok(())
}

/// A state-contingent payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Payoff(Vec<f64>);

impl Payoff {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("payoff", "at least one state is required"));
        }
        check_finite("payoff", &values)?;
        Ok(Payoff(values))
    }

    /// The constant payoff `t * 1`.
    pub fn constant(n: usize, t: f64) -> Self {
        assert!(n >= 1 && t.is_finite());
        Payoff(vec![t; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(self)
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&v| v == self.0[0])
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `self + t * 1`.
    pub fn shift(&self, t: f64) -> Payoff {
        Payoff(self.0.iter().map(|v| v + t).collect())
    }

    pub fn scale(&self, lambda: f64) -> Payoff {
        Payoff(self.0.iter().map(|v| lambda * v).collect())
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Payoff, alpha: f64) -> Payoff {
        Payoff(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| alpha * x + (1.0 - alpha) * y)
                .collect(),
        )
    }

    pub fn add(&self, other: &Payoff) -> Payoff {
        Payoff(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &Payoff) -> Payoff {
        Payoff(self.0.iter().zip(&other.0).map(|(x, y)| x - y).collect())
    }
}

impl TryFrom<Vec<f64>> for Payoff {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Payoff::new(values)
    }
}

impl From<Payoff> for Vec<f64> {
    fn from(p: Payoff) -> Self {
        p.0
    }
}

/// A probability vector over the `N` states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("probability vector", "empty"));
        }
        check_finite("probability vector", &weights)?;
        if let Some(i) = weights.iter().position(|&w| w < 0.0) {
            return Err(Error::invalid(
                format!("probability vector[{i}]"),
                format!("negative weight {}", weights[i]),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::invalid(
                "probability vector",
                format!("weights sum to {total}, not 1"),
            ));
        }
        Ok(ProbabilityVector(weights))
    }

    /// Unit mass on state `index`.
    pub fn unit(n: usize, index: usize) -> Self {
        assert!(index < n);
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        ProbabilityVector(w)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        ProbabilityVector(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// Expectation of `x` under this measure.
    pub fn expectation(&self, x: &Payoff) -> Result<f64> {
        if x.len() != self.len() {
            return Err(Error::dims("expectation", self.len(), x.len()));
        }
        Ok(dot(&self.0, x.values()))
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        ProbabilityVector::new(weights)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

/// Polyhedral cone `{x : a . x >= 0 for every normal a}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    normals: Vec<Vec<f64>>,
}

impl Cone {
    pub fn new(normals: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = normals.first() else {
            return Err(Error::invalid("cone", "at least one normal is required"));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::invalid("cone", "normals must have positive length"));
        }
        for (k, a) in normals.iter().enumerate() {
            if a.len() != n {
                return Err(Error::dims(format!("cone normal {k}"), n, a.len()));
            }
            check_finite(&format!("cone normal {k}"), a)?;
            if a.iter().all(|&v| v == 0.0) {
                return Err(Error::invalid(format!("cone normal {k}"), "zero normal"));
            }
        }
        Ok(Cone { normals })
    }

    /// The positive orthant, with the standard basis as normals.
    pub fn positive(n: usize) -> Self {
        let normals = (0..n)
            .map(|i| ProbabilityVector::unit(n, i).into())
            .collect();
        Cone { normals }
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    fn check_dim(&self, x: &Payoff) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::dims("cone membership", self.dim(), x.len()));
        }
        Ok(())
    }

    /// Errors with the first normal `a` for which `a . 1 <= 0`.
    pub fn check_order_unit(&self) -> Result<()> {
        for (index, a) in self.normals.iter().enumerate() {
            let value: f64 = a.iter().sum();
            if value <= 0.0 {
                return Err(Error::OrderUnit { index, value });
            }
        }
        Ok(())
    }
}

/// `max_n |x_n|`.
pub fn sup_norm(x: &Payoff) -> f64 {
    x.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Pointwise order: `x_n >= y_n` for every state.
pub fn dominates(x: &Payoff, y: &Payoff) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::dims("dominates", x.len(), y.len()));
    }
    Ok(x.values().iter().zip(y.values()).all(|(a, b)| a >= b))
}

pub fn cone_contains(cone: &Cone, x: &Payoff, tol: f64) -> Result<bool> {
    cone.check_dim(x)?;
    Ok(cone.normals.iter().all(|a| dot(a, x.values()) >= -tol))
}

/// Strict interior test; assumes `a . 1 > 0` for every normal.
pub fn cone_interior_contains(cone: &Cone, x: &Payoff, tol: f64) -> Result<bool> {
    cone.check_dim(x)?;
    Ok(cone.normals.iter().all(|a| dot(a, x.values()) > tol))
}
