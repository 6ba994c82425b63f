//! Scenario files: one JSON document describing a market, an ambiguity set
//! and optional shortfall parameters.
//!
//! ```json
//! {
//!   "states": 2,
//!   "payoff_matrix": [[1.0, 0.0], [0.0, 1.0]],
//!   "prices": [0.5, 0.5],
//!   "endowment": [0.0, 0.0],
//!   "wealth": 1.0,
//!   "ambiguity": [[1.0, 0.0], [0.0, 1.0]]
//! }
//! ```
//!
//! `payoff_matrix` is row-major: row `n` lists every asset's payoff in state
//! `n`. Optional keys are `bond_column`, `sr` (`{"loss": {"kind": ...},
//! "lambda": ...}`), `seed` and `tol`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::market::Market;
use crate::payoff::{Payoff, ProbabilityVector, PROBABILITY_SUM_TOL};
use crate::portfolio::Scenario;
use crate::risk::AmbiguitySet;
use crate::shortfall::{LossFunction, SrSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrSection {
    pub loss: LossFunction,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub states: usize,
    pub payoff_matrix: Vec<Vec<f64>>,
    pub prices: Vec<f64>,
    pub endowment: Vec<f64>,
    pub wealth: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bond_column: Option<usize>,
    pub ambiguity: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr: Option<SrSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

fn finite(field: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::invalid(format!("{field}[{i}]"), "non-finite value")),
        None => Ok(()),
    }
}

fn canonical(v: f64) -> f64 {
    // -0.0 and 0.0 are the same quantity.
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::invalid("scenario", e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Shape and finiteness checks. Market-level conditions (nonnegative
    /// endowment, a riskless asset) are checked when the market is built.
    pub fn validate(&self) -> Result<()> {
        let n = self.states;
        if n == 0 {
            return Err(Error::invalid("states", "must be at least 1"));
        }
        if self.payoff_matrix.len() != n {
            return Err(Error::dims("payoff_matrix", n, self.payoff_matrix.len()));
        }
        let j = self.prices.len();
        for (row, r) in self.payoff_matrix.iter().enumerate() {
            if r.len() != j {
                return Err(Error::dims(format!("payoff_matrix[{row}]"), j, r.len()));
            }
            finite(&format!("payoff_matrix[{row}]"), r)?;
        }
        finite("prices", &self.prices)?;
        if self.endowment.len() != n {
            return Err(Error::dims("endowment", n, self.endowment.len()));
        }
        finite("endowment", &self.endowment)?;
        if !self.wealth.is_finite() {
            return Err(Error::invalid("wealth", "non-finite value"));
        }
        if self.ambiguity.is_empty() {
            return Err(Error::invalid("ambiguity", "at least one probability vector is required"));
        }
        for (k, pi) in self.ambiguity.iter().enumerate() {
            let field = format!("ambiguity[{k}]");
            if pi.len() != n {
                return Err(Error::dims(field, n, pi.len()));
            }
            finite(&field, pi)?;
            if let Some(s) = pi.iter().position(|&w| w < 0.0) {
                return Err(Error::invalid(format!("{field}[{s}]"), "negative probability"));
            }
            let sum: f64 = pi.iter().sum();
            if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
                return Err(Error::invalid(field, format!("weights sum to {sum}, not 1")));
            }
        }
        if let Some(sr) = &self.sr {
            if !sr.lambda.is_finite() {
                return Err(Error::invalid("sr.lambda", "non-finite value"));
            }
            sr.loss
                .validate()
                .map_err(|e| Error::invalid("sr.loss", e.to_string()))?;
        }
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::invalid("tol", "must be finite and positive"));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the compact serialization with `-0.0` folded to `0.0`.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        let fold = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x = canonical(*x));
        c.payoff_matrix.iter_mut().for_each(fold);
        c.ambiguity.iter_mut().for_each(fold);
        fold(&mut c.prices);
        fold(&mut c.endowment);
        c.wealth = canonical(c.wealth);
        if let Some(sr) = c.sr.as_mut() {
            sr.lambda = canonical(sr.lambda);
        }
        let bytes = serde_json::to_vec(&c).expect("scenario serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn market(&self) -> Result<Market> {
        Market::new(
            self.payoff_matrix.clone(),
            self.prices.clone(),
            Payoff::new(self.endowment.clone())?,
            self.wealth,
            self.bond_column,
        )
    }

    pub fn ambiguity_set(&self) -> Result<AmbiguitySet> {
        let vertices = self
            .ambiguity
            .iter()
            .map(|pi| ProbabilityVector::new(pi.clone()))
            .collect::<Result<Vec<_>>>()?;
        AmbiguitySet::new(vertices)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.market()?, self.ambiguity_set()?)
    }

    pub fn sr_spec(&self) -> Result<Option<SrSpec>> {
        match &self.sr {
            None => Ok(None),
            Some(sr) => Ok(Some(SrSpec::new(sr.loss, sr.lambda, self.ambiguity_set()?)?)),
        }
    }
}
