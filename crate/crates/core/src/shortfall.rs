//! Utility-based shortfall risk and its distributionally robust variant.
//!
//! `SR(x) = inf{t : max_{pi in D} E_pi[l(-x - t)] <= lambda}`. The inner
//! objective is non-increasing in `t`, so the infimum is found by bracketing
//! followed by bisection on the predicate `g(t) <= lambda`. With the identity
//! loss the infimum has the closed form `max_pi E_pi[-x] - lambda`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::{sup_norm, Payoff};
use crate::risk::{acceptance_cone, rho_crm, AmbiguitySet};

pub const DEFAULT_BISECTION_TOL: f64 = 1e-9;
const MAX_EXPANSIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossFunction {
    Identity,
    /// `z -> slope * z + intercept`
    Linear { slope: f64, intercept: f64 },
    /// `z -> exp(rate * z) - 1`
    Exponential { rate: f64 },
    /// `z -> max(z, 0)`
    PositivePart,
}

impl LossFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LossFunction::Linear { slope, intercept } => {
                if !(slope.is_finite() && slope > 0.0) || !intercept.is_finite() {
                    return Err(Error::invalid(
                        "loss",
                        "linear loss needs a finite positive slope and finite intercept",
                    ));
                }
            }
            LossFunction::Exponential { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::invalid("loss", "exponential loss needs a finite positive rate"));
                }
            }
            LossFunction::Identity | LossFunction::PositivePart => {}
        }
        Ok(())
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            LossFunction::Identity => z,
            LossFunction::Linear { slope, intercept } => slope * z + intercept,
            LossFunction::Exponential { rate } => (rate * z).exp_m1(),
            LossFunction::PositivePart => z.max(0.0),
        }
    }

    /// False for losses that are only non-decreasing (flat somewhere).
    pub fn is_strictly_increasing(&self) -> bool {
        !matches!(self, LossFunction::PositivePart)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrSpec {
    pub loss: LossFunction,
    pub threshold: f64,
    pub ambiguity: AmbiguitySet,
}

impl SrSpec {
    pub fn new(loss: LossFunction, threshold: f64, ambiguity: AmbiguitySet) -> Result<Self> {
        loss.validate()?;
        if !threshold.is_finite() {
            return Err(Error::invalid("lambda", "must be finite"));
        }
        Ok(SrSpec {
            loss,
            threshold,
            ambiguity,
        })
    }

    /// `g(t) = max_pi E_pi[l(-x - t)]`.
    pub fn worst_expected_loss(&self, x: &Payoff, t: f64) -> f64 {
        self.ambiguity
            .vertices()
            .iter()
            .map(|pi| {
                pi.weights()
                    .iter()
                    .zip(x.values())
                    .map(|(w, v)| w * self.loss.eval(-v - t))
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn check(&self, x: &Payoff, tol: f64) -> Result<()> {
        if x.len() != self.ambiguity.dim() {
            return Err(Error::dims("shortfall position", self.ambiguity.dim(), x.len()));
        }
        if !(tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        Ok(())
    }
}

/// Shortfall risk; closed form for the identity loss, bisection otherwise.
pub fn shortfall_risk(spec: &SrSpec, x: &Payoff, tol: f64) -> Result<f64> {
    spec.check(x, tol)?;
    if spec.loss == LossFunction::Identity {
        return Ok(spec.worst_expected_loss(x, 0.0) - spec.threshold);
    }
    bisect(spec, x, tol)
}

/// Shortfall risk by bracketing and bisection for every loss, including the
/// identity.
pub fn shortfall_risk_by_bisection(spec: &SrSpec, x: &Payoff, tol: f64) -> Result<f64> {
    spec.check(x, tol)?;
    bisect(spec, x, tol)
}

fn bisect(spec: &SrSpec, x: &Payoff, tol: f64) -> Result<f64> {
    let lambda = spec.threshold;
    // Losses are unbounded above; below they approach (or reach) this floor.
    let reachable = match spec.loss {
        LossFunction::Identity | LossFunction::Linear { .. } => true,
        LossFunction::Exponential { .. } => lambda > -1.0,
        LossFunction::PositivePart => lambda >= 0.0,
    };
    if !reachable {
        return Err(Error::NoFiniteRoot(format!(
            "lambda = {lambda} lies below the range of the loss"
        )));
    }
    let accepted = |t: f64| spec.worst_expected_loss(x, t) <= lambda;

    let radius = sup_norm(x) + 1.0;
    let mut lo = -radius;
    let mut hi = radius;
    let mut width = radius;
    let mut expansions = 0;
    while !accepted(hi) {
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !hi.is_finite() {
            return Err(Error::NoFiniteRoot(format!(
                "lambda = {lambda} is never reached: the expected loss stays above it"
            )));
        }
        width *= 2.0;
        lo = hi;
        hi += width;
    }
    let mut width = radius;
    expansions = 0;
    while accepted(lo) {
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !lo.is_finite() {
            return Err(Error::NoFiniteRoot(format!(
                "lambda = {lambda} is met for every cash amount: the infimum is -infinity"
            )));
        }
        width *= 2.0;
        hi = lo;
        lo -= width;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if accepted(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Compares identity-loss shortfall risk at `lambda = 0` with the coherent
/// risk of the acceptance cone of `d`.
pub fn sr_equals_rho_check(d: &AmbiguitySet, x: &Payoff) -> Result<bool> {
    let spec = SrSpec::new(LossFunction::Identity, 0.0, d.clone())?;
    let sr = shortfall_risk(&spec, x, DEFAULT_BISECTION_TOL)?;
    let rho = rho_crm(&acceptance_cone(d), x)?;
    Ok((sr - rho).abs() <= 1e-7)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::ProbabilityVector;

    fn p(v: &[f64]) -> Payoff {
        Payoff::new(v.to_vec()).unwrap()
    }

    fn d(vs: &[&[f64]]) -> AmbiguitySet {
        AmbiguitySet::new(
            vs.iter()
                .map(|v| ProbabilityVector::new(v.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_loss_examples() {
        let spec = SrSpec::new(LossFunction::Identity, 0.0, d(&[&[0.5, 0.5]])).unwrap();
        assert_eq!(shortfall_risk(&spec, &p(&[1.0, -1.0]), 1e-9).unwrap(), 0.0);

        let spec = SrSpec::new(LossFunction::Identity, 0.5, d(&[&[0.5, 0.5]])).unwrap();
        let x = p(&[0.0, 0.0]);
        assert_eq!(shortfall_risk(&spec, &x, 1e-9).unwrap(), -0.5);
        let by_bisection = shortfall_risk_by_bisection(&spec, &x, 1e-9).unwrap();
        assert!((by_bisection + 0.5).abs() <= 1e-9);
    }

    #[test]
    fn positive_part_returns_left_endpoint() {
        let spec = SrSpec::new(LossFunction::PositivePart, 0.0, d(&[&[1.0, 0.0]])).unwrap();
        let sr = shortfall_risk(&spec, &p(&[1.0, 1.0]), 1e-9).unwrap();
        assert!((sr + 1.0).abs() <= 1e-9, "{sr}");
        assert!(sr >= -1.0);
        assert!(!spec.loss.is_strictly_increasing());
    }

    #[test]
    fn exponential_loss_matches_closed_form_for_singletons() {
        // E[exp(k(-x - t))] - 1 <= lambda  <=>  t >= ln(E[exp(-k x)] / (1 + lambda)) / k
        let k = 0.7;
        let lambda = 0.3;
        let pi = [0.2, 0.5, 0.3];
        let x = p(&[1.0, -2.0, 0.5]);
        let spec = SrSpec::new(LossFunction::Exponential { rate: k }, lambda, d(&[&pi])).unwrap();
        let m: f64 = pi.iter().zip(x.values()).map(|(w, v)| w * (-k * v).exp()).sum();
        let expected = (m / (1.0 + lambda)).ln() / k;
        let sr = shortfall_risk(&spec, &x, 1e-10).unwrap();
        assert!((sr - expected).abs() <= 1e-9, "{sr} vs {expected}");
    }

    #[test]
    fn unreachable_thresholds_error() {
        let spec = SrSpec::new(LossFunction::PositivePart, -0.1, d(&[&[0.5, 0.5]])).unwrap();
        assert!(matches!(
            shortfall_risk(&spec, &p(&[1.0, 2.0]), 1e-9),
            Err(Error::NoFiniteRoot(_))
        ));
        let spec = SrSpec::new(LossFunction::Exponential { rate: 1.0 }, -1.0, d(&[&[0.5, 0.5]])).unwrap();
        assert!(shortfall_risk(&spec, &p(&[1.0, 2.0]), 1e-9).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SrSpec::new(LossFunction::Linear { slope: 0.0, intercept: 0.0 }, 0.0, d(&[&[1.0]])).is_err());
        assert!(SrSpec::new(LossFunction::Exponential { rate: -1.0 }, 0.0, d(&[&[1.0]])).is_err());
        let spec = SrSpec::new(LossFunction::Identity, 0.0, d(&[&[0.5, 0.5]])).unwrap();
        assert!(shortfall_risk(&spec, &p(&[1.0]), 1e-9).is_err());
        assert!(shortfall_risk(&spec, &p(&[1.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn sr_rho_examples() {
        assert!(sr_equals_rho_check(&d(&[&[0.5, 0.5]]), &p(&[1.0, -1.0])).unwrap());
        let full = AmbiguitySet::full_simplex(3);
        assert!(sr_equals_rho_check(&full, &p(&[3.0, 1.0, 2.0])).unwrap());
        let spec = SrSpec::new(LossFunction::Identity, 0.0, full).unwrap();
        assert_eq!(shortfall_risk(&spec, &p(&[3.0, 1.0, 2.0]), 1e-9).unwrap(), -1.0);
        assert!(sr_equals_rho_check(&d(&[&[0.3, 0.7], &[0.6, 0.4]]), &p(&[2.0, -1.0])).unwrap());
    }

    #[test]
    fn exponential_loss_is_not_positively_homogeneous() {
        let spec = SrSpec::new(LossFunction::Exponential { rate: 1.0 }, 0.5, d(&[&[0.5, 0.5]])).unwrap();
        let x = p(&[1.0, -1.0]);
        let one = shortfall_risk(&spec, &x, 1e-10).unwrap();
        let two = shortfall_risk(&spec, &x.scale(2.0), 1e-10).unwrap();
        assert!((two - 2.0 * one).abs() > 1e-3, "SR(2x) = {two}, 2 SR(x) = {}", 2.0 * one);
    }
}
