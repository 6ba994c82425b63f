//! One-period asset market over `N` states and `J` assets.
//!
//! Arbitrage is detected through strictly positive state prices, portfolios
//! are unconstrained (short sales allowed), and super-replication is priced
//! by linear programming together with its dual, the largest value any
//! valuation functional assigns to the target net of the endowment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, LpStatus, Relation, Sense};
use crate::payoff::{dot, Payoff};

/// Minimum state price required to certify absence of arbitrage.
pub const STRICTNESS_TOL: f64 = 1e-8;
/// Maximum `|R^T f - q|` accepted on a state-price certificate.
pub const CERTIFICATE_RESIDUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    /// `N x J`, row `n` holds the payoff of every asset in state `n`.
    payoff_matrix: Vec<Vec<f64>>,
    prices: Vec<f64>,
    endowment: Payoff,
    wealth: f64,
    bond_column: Option<usize>,
}

impl Market {
    /// Validates the market. Without a declared bond column, some portfolio
    /// must replicate the constant payoff `1` exactly.
    pub fn new(
        payoff_matrix: Vec<Vec<f64>>,
        prices: Vec<f64>,
        endowment: Payoff,
        wealth: f64,
        bond_column: Option<usize>,
    ) -> Result<Self> {
        let n = payoff_matrix.len();
        if n == 0 {
            return Err(Error::invalid("payoff_matrix", "at least one state is required"));
        }
        let j = payoff_matrix[0].len();
        if j == 0 {
            return Err(Error::invalid("payoff_matrix", "at least one asset is required"));
        }
        for (row, r) in payoff_matrix.iter().enumerate() {
            if r.len() != j {
                return Err(Error::dims(format!("payoff_matrix[{row}]"), j, r.len()));
            }
            if let Some(col) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::invalid(
                    format!("payoff_matrix[{row}][{col}]"),
                    "non-finite value",
                ));
            }
        }
        if prices.len() != j {
            return Err(Error::dims("prices", j, prices.len()));
        }
        if let Some(i) = prices.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("prices[{i}]"), "non-finite value"));
        }
        if endowment.len() != n {
            return Err(Error::dims("endowment", n, endowment.len()));
        }
        if let Some(i) = endowment.values().iter().position(|&v| v < 0.0) {
            return Err(Error::invalid(format!("endowment[{i}]"), "must be nonnegative"));
        }
        if !wealth.is_finite() || wealth < 0.0 {
            return Err(Error::invalid("wealth", format!("must be finite and nonnegative, got {wealth}")));
        }
        if let Some(b) = bond_column {
            if b >= j {
                return Err(Error::invalid("bond_column", format!("{b} out of range for {j} assets")));
            }
            if let Some(row) = payoff_matrix.iter().position(|r| r[b] != 1.0) {
                return Err(Error::invalid(
                    format!("payoff_matrix[{row}][{b}]"),
                    "bond column must equal 1 in every state",
                ));
            }
        }
        let market = Market {
            payoff_matrix,
            prices,
            endowment,
            wealth,
            bond_column,
        };
        if bond_column.is_none() && market.order_unit_portfolio()?.is_none() {
            return Err(Error::Model(
                "no bond column and no portfolio replicates the constant payoff 1".into(),
            ));
        }
        Ok(market)
    }

    /// Same market with a different endowment and initial wealth.
    pub fn with_budget(&self, endowment: Payoff, wealth: f64) -> Result<Self> {
        Market::new(
            self.payoff_matrix.clone(),
            self.prices.clone(),
            endowment,
            wealth,
            self.bond_column,
        )
    }

    pub fn states(&self) -> usize {
        self.payoff_matrix.len()
    }

    pub fn assets(&self) -> usize {
        self.prices.len()
    }

    pub fn payoff_matrix(&self) -> &[Vec<f64>] {
        &self.payoff_matrix
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn endowment(&self) -> &Payoff {
        &self.endowment
    }

    pub fn wealth(&self) -> f64 {
        self.wealth
    }

    pub fn bond_column(&self) -> Option<usize> {
        self.bond_column
    }

    /// `R h`.
    pub fn payoff_of(&self, h: &[f64]) -> Vec<f64> {
        self.payoff_matrix.iter().map(|row| dot(row, h)).collect()
    }

    /// `q . h`.
    pub fn cost_of(&self, h: &[f64]) -> f64 {
        dot(&self.prices, h)
    }

    fn order_unit_portfolio(&self) -> Result<Option<Vec<f64>>> {
        let j = self.assets();
        let mut p = LpProblem::new(Sense::Minimize, vec![0.0; j]);
        for k in 0..j {
            p.set_free(k);
        }
        for row in &self.payoff_matrix {
            p.add_row(row.clone(), Relation::Eq, 1.0);
        }
        let s = lp::solve(&p)?;
        Ok(s.is_optimal().then_some(s.x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePriceCertificate {
    pub state_prices: Vec<f64>,
    pub strictness: f64,
    pub residual: f64,
}

impl StatePriceCertificate {
    pub fn certifies_no_arbitrage(&self) -> bool {
        self.residual <= CERTIFICATE_RESIDUAL_TOL && self.strictness > 0.0
    }
}

/// A portfolio that costs nothing (or less) and pays something nonnegative,
/// with a strictly positive payoff somewhere or a strictly negative cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArbitrageWitness {
    pub portfolio: Vec<f64>,
    pub cost: f64,
    pub payoff: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ArbitrageVerdict {
    NoArbitrage(StatePriceCertificate),
    Arbitrage { witness: Option<ArbitrageWitness> },
}

impl ArbitrageVerdict {
    pub fn is_arbitrage_free(&self) -> bool {
        matches!(self, ArbitrageVerdict::NoArbitrage(_))
    }
}

/// Finite-state FTAP: maximize the smallest state price `delta` subject to
/// `R^T f = q`, `f_n >= delta`, `delta <= 1`.
pub fn check_arbitrage(m: &Market) -> Result<ArbitrageVerdict> {
    let n = m.states();
    let j = m.assets();
    // variables: f_0..f_{n-1}, delta
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut p = LpProblem::new(Sense::Maximize, obj);
    for k in 0..n {
        p.set_free(k);
    }
    p.set_bounds(n, f64::NEG_INFINITY, 1.0);
    for a in 0..j {
        let mut row: Vec<f64> = m.payoff_matrix.iter().map(|r| r[a]).collect();
        row.push(0.0);
        p.add_row(row, Relation::Eq, m.prices[a]);
    }
    for k in 0..n {
        let mut row = vec![0.0; n + 1];
        row[k] = 1.0;
        row[n] = -1.0;
        p.add_row(row, Relation::Ge, 0.0);
    }
    let s = lp::solve(&p)?;
    if s.status == LpStatus::Optimal && s.objective > STRICTNESS_TOL {
        let f = s.x[..n].to_vec();
        let strictness = f.iter().copied().fold(f64::INFINITY, f64::min);
        let residual = (0..j)
            .map(|a| {
                let v: f64 = (0..n).map(|k| m.payoff_matrix[k][a] * f[k]).sum();
                (v - m.prices[a]).abs()
            })
            .fold(0.0, f64::max);
        let cert = StatePriceCertificate {
            state_prices: f,
            strictness,
            residual,
        };
        if cert.certifies_no_arbitrage() {
            return Ok(ArbitrageVerdict::NoArbitrage(cert));
        }
    }
    Ok(ArbitrageVerdict::Arbitrage {
        witness: arbitrage_witness(m)?,
    })
}

/// Maximizes `1 . Rh - q . h` over `Rh >= 0`, `q . h <= 0`, capped at 1.
/// A positive optimum is an arbitrage; the portfolio is rescaled to unit
/// sup-norm.
fn arbitrage_witness(m: &Market) -> Result<Option<ArbitrageWitness>> {
    let j = m.assets();
    let gain: Vec<f64> = (0..j)
        .map(|a| m.payoff_matrix.iter().map(|r| r[a]).sum::<f64>() - m.prices[a])
        .collect();
    let mut p = LpProblem::new(Sense::Maximize, gain.clone());
    for a in 0..j {
        p.set_free(a);
    }
    for row in &m.payoff_matrix {
        p.add_row(row.clone(), Relation::Ge, 0.0);
    }
    p.add_row(m.prices.clone(), Relation::Le, 0.0);
    p.add_row(gain, Relation::Le, 1.0);
    let s = lp::solve(&p)?;
    if s.status != LpStatus::Optimal || s.objective <= 1e-9 {
        return Ok(None);
    }
    let scale = s.x.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
    let h: Vec<f64> = s.x.iter().map(|v| v / scale).collect();
    Ok(Some(ArbitrageWitness {
        cost: m.cost_of(&h),
        payoff: m.payoff_of(&h),
        portfolio: h,
    }))
}

fn check_target(m: &Market, target: &Payoff) -> Result<()> {
    if target.len() != m.states() {
        return Err(Error::dims("target", m.states(), target.len()));
    }
    Ok(())
}

/// `sup{f . (target - endowment) : f >= 0, R^T f = q}`.
pub fn valuation_bound(m: &Market, target: &Payoff) -> Result<f64> {
    check_target(m, target)?;
    let net = target.sub(&m.endowment);
    let mut p = LpProblem::new(Sense::Maximize, net.into_inner());
    for a in 0..m.assets() {
        let row: Vec<f64> = m.payoff_matrix.iter().map(|r| r[a]).collect();
        p.add_row(row, Relation::Eq, m.prices[a]);
    }
    let s = lp::solve(&p)?;
    match s.status {
        LpStatus::Optimal => Ok(s.objective),
        LpStatus::Infeasible => Err(Error::Precondition(
            "no valuation functional exists for these prices".into(),
        )),
        LpStatus::Unbounded => Err(Error::Model("valuation bound is unbounded".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperReplication {
    pub price: f64,
    pub portfolio: Vec<f64>,
}

/// Cheapest portfolio `h` with `endowment + R h >= target`.
pub fn superreplication_price(m: &Market, target: &Payoff) -> Result<SuperReplication> {
    check_target(m, target)?;
    if let Some(i) = target.values().iter().position(|&v| v < 0.0) {
        return Err(Error::invalid(format!("target[{i}]"), "must be nonnegative"));
    }
    let j = m.assets();
    let mut p = LpProblem::new(Sense::Minimize, m.prices.clone());
    for a in 0..j {
        p.set_free(a);
    }
    for (row, (c, w)) in m
        .payoff_matrix
        .iter()
        .zip(target.values().iter().zip(m.endowment.values()))
    {
        p.add_row(row.clone(), Relation::Ge, c - w);
    }
    let s = lp::solve(&p)?;
    match s.status {
        LpStatus::Optimal => Ok(SuperReplication {
            price: s.objective,
            portfolio: s.x,
        }),
        LpStatus::Infeasible => Err(Error::Model(
            "target cannot be super-replicated: no order unit in the asset span".into(),
        )),
        LpStatus::Unbounded => Err(Error::Arbitrage),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow2(q: [f64; 2], endowment: [f64; 2]) -> Market {
        Market::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            q.to_vec(),
            Payoff::new(endowment.to_vec()).unwrap(),
            1.0,
            None,
        )
        .unwrap()
    }

    fn bond_only(n: usize, q: f64) -> Market {
        Market::new(
            vec![vec![1.0]; n],
            vec![q],
            Payoff::constant(n, 1.0),
            1.0,
            Some(0),
        )
        .unwrap()
    }

    fn p(v: &[f64]) -> Payoff {
        Payoff::new(v.to_vec()).unwrap()
    }

    #[test]
    fn arrow_market_state_prices() {
        let m = arrow2([0.5, 0.5], [1.0, 1.0]);
        match check_arbitrage(&m).unwrap() {
            ArbitrageVerdict::NoArbitrage(c) => {
                assert!((c.state_prices[0] - 0.5).abs() < 1e-12);
                assert!((c.state_prices[1] - 0.5).abs() < 1e-12);
                assert!(c.residual <= CERTIFICATE_RESIDUAL_TOL);
                assert!(c.strictness > 0.0);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn redundant_asset_keeps_certificate() {
        // Asset 1 is 1.2 bonds minus 0.2 units of asset 2.
        let m = Market::new(
            vec![vec![1.0, 1.2, 0.0], vec![1.0, 1.0, 1.0], vec![1.0, 0.8, 2.0]],
            vec![0.95; 3],
            Payoff::constant(3, 0.5),
            1.0,
            Some(0),
        )
        .unwrap();
        match check_arbitrage(&m).unwrap() {
            ArbitrageVerdict::NoArbitrage(cert) => assert!(cert.certifies_no_arbitrage()),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn negatively_priced_bond_is_arbitrage() {
        let m = bond_only(1, -1.0);
        match check_arbitrage(&m).unwrap() {
            ArbitrageVerdict::Arbitrage { witness: Some(w) } => {
                assert_eq!(w.portfolio, vec![1.0]);
                assert_eq!(w.cost, -1.0);
                assert_eq!(w.payoff, vec![1.0]);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn mispriced_redundant_asset() {
        let m = Market::new(
            vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]],
            vec![0.5, 0.5, 1.2],
            p(&[1.0, 1.0]),
            1.0,
            Some(2),
        )
        .unwrap();
        match check_arbitrage(&m).unwrap() {
            ArbitrageVerdict::Arbitrage { witness: Some(w) } => {
                assert!(w.cost <= 1e-12);
                assert!(w.payoff.iter().all(|&v| v >= -1e-9));
                assert!(w.cost < -1e-9 || w.payoff.iter().any(|&v| v > 1e-9));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn zero_priced_positive_payoff_is_arbitrage() {
        let m = Market::new(
            vec![vec![1.0, 1.0], vec![1.0, 0.0]],
            vec![1.0, 0.0],
            p(&[1.0, 1.0]),
            1.0,
            Some(0),
        )
        .unwrap();
        assert!(!check_arbitrage(&m).unwrap().is_arbitrage_free());
    }

    #[test]
    fn market_validation() {
        let ok = || vec![vec![1.0], vec![1.0]];
        assert!(Market::new(ok(), vec![1.0], p(&[-1.0, 1.0]), 1.0, Some(0)).is_err());
        assert!(Market::new(ok(), vec![1.0], p(&[1.0, 1.0]), -1.0, Some(0)).is_err());
        assert!(Market::new(ok(), vec![1.0, 2.0], p(&[1.0, 1.0]), 1.0, Some(0)).is_err());
        assert!(Market::new(vec![vec![1.0], vec![2.0]], vec![1.0], p(&[1.0, 1.0]), 1.0, Some(0)).is_err());
        // No bond column and the span misses 1.
        let err = Market::new(vec![vec![1.0], vec![0.0]], vec![1.0], p(&[1.0, 1.0]), 1.0, None);
        assert!(matches!(err, Err(Error::Model(_))));
        // Zero wealth is allowed.
        assert!(Market::new(ok(), vec![1.0], p(&[1.0, 1.0]), 0.0, Some(0)).is_ok());
    }

    #[test]
    fn valuation_bound_examples() {
        let m = arrow2([0.5, 0.5], [1.0, 2.0]);
        assert!(valuation_bound(&m, m.endowment()).unwrap().abs() < 1e-12);

        let m = arrow2([0.5, 0.5], [1.0, 1.0]).with_budget(p(&[0.0, 0.0]), 1.0).unwrap();
        assert!((valuation_bound(&m, &p(&[1.0, 1.0])).unwrap() - 1.0).abs() < 1e-9);

        let m = bond_only(3, 1.0).with_budget(p(&[0.0, 0.0, 0.0]), 1.0).unwrap();
        assert!((valuation_bound(&m, &p(&[1.0, 0.0, 0.0])).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn superreplication_examples() {
        let m = arrow2([0.5, 0.5], [2.0, 1.0]);
        let s = superreplication_price(&m, &p(&[1.0, 0.5])).unwrap();
        assert!(s.price <= 1e-12);

        let m = arrow2([0.5, 0.5], [1.0, 1.0]).with_budget(p(&[0.0, 0.0]), 1.0).unwrap();
        let s = superreplication_price(&m, &p(&[1.0, 1.0])).unwrap();
        assert!((s.price - 1.0).abs() < 1e-9);
        assert!((s.portfolio[0] - 1.0).abs() < 1e-9 && (s.portfolio[1] - 1.0).abs() < 1e-9);

        let m = bond_only(3, 1.0).with_budget(p(&[0.0, 0.0, 0.0]), 1.0).unwrap();
        let s = superreplication_price(&m, &p(&[1.0, 0.0, 0.0])).unwrap();
        assert!((s.price - 1.0).abs() < 1e-9);
        assert!((s.portfolio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn superreplication_rejects_negative_targets() {
        let m = arrow2([0.5, 0.5], [1.0, 1.0]);
        assert!(superreplication_price(&m, &p(&[-1.0, 1.0])).is_err());
        assert!(superreplication_price(&m, &p(&[1.0])).is_err());
    }

    #[test]
    fn arbitrage_makes_superreplication_unbounded() {
        let m = bond_only(2, -1.0);
        assert_eq!(
            superreplication_price(&m, &p(&[1.0, 1.0])),
            Err(Error::Arbitrage)
        );
    }
}
