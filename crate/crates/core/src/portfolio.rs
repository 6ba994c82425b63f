//! Maxmin portfolio selection under a super-replication budget.
//!
//! The budget `inf{q.h : c <= endowment + R h} <= wealth` is written jointly
//! over `(c, h)`: at finite `N` the infimum is attained, so a position is
//! affordable exactly when some portfolio funds it. With the epigraph
//! variable `u <= pi_k . c` the whole problem is one linear program.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, LpStatus, Relation, Sense};
use crate::market::{check_arbitrage, superreplication_price, Market};
use crate::payoff::Payoff;
use crate::risk::{utility, AmbiguitySet};

pub const BUDGET_TOL: f64 = 1e-7;
pub const VALUE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    market: Market,
    ambiguity: AmbiguitySet,
}

impl Scenario {
    pub fn new(market: Market, ambiguity: AmbiguitySet) -> Result<Self> {
        if market.states() != ambiguity.dim() {
            return Err(Error::dims("ambiguity", market.states(), ambiguity.dim()));
        }
        Ok(Scenario { market, ambiguity })
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn ambiguity(&self) -> &AmbiguitySet {
        &self.ambiguity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub position: Payoff,
    pub portfolio: Vec<f64>,
    pub utility: f64,
    pub risk: f64,
    pub autarky_utility: f64,
    pub lowered_exposure: bool,
}

#[derive(Clone, Copy)]
enum Form {
    /// maximize u, u <= pi_k . c
    Utility,
    /// minimize r, r >= -pi_k . c
    Risk,
}

struct RawOptimum {
    objective: f64,
    position: Vec<f64>,
    portfolio: Vec<f64>,
}

fn solve_lp(s: &Scenario, form: Form) -> Result<RawOptimum> {
    let m = &s.market;
    let n = m.states();
    let j = m.assets();
    let nv = n + j + 1;
    let epi = n + j;

    let mut obj = vec![0.0; nv];
    obj[epi] = 1.0;
    let sense = match form {
        Form::Utility => Sense::Maximize,
        Form::Risk => Sense::Minimize,
    };
    let mut p = LpProblem::new(sense, obj);
    for k in n..nv {
        p.set_free(k);
    }
    for pi in s.ambiguity.vertices() {
        let mut row = vec![0.0; nv];
        match form {
            Form::Utility => {
                // u - pi.c <= 0
                for (r, w) in row.iter_mut().zip(pi.weights()) {
                    *r = -w;
                }
                row[epi] = 1.0;
                p.add_row(row, Relation::Le, 0.0);
            }
            Form::Risk => {
                // r + pi.c >= 0
                row[..n].copy_from_slice(pi.weights());
                row[epi] = 1.0;
                p.add_row(row, Relation::Ge, 0.0);
            }
        }
    }
    // R h - c >= -endowment
    for (state, payoffs) in m.payoff_matrix().iter().enumerate() {
        let mut row = vec![0.0; nv];
        row[state] = -1.0;
        row[n..n + j].copy_from_slice(payoffs);
        p.add_row(row, Relation::Ge, -m.endowment().values()[state]);
    }
    // q . h <= wealth
    let mut row = vec![0.0; nv];
    row[n..n + j].copy_from_slice(m.prices());
    p.add_row(row, Relation::Le, m.wealth());

    let sol = lp::solve(&p)?;
    match sol.status {
        LpStatus::Optimal => Ok(RawOptimum {
            objective: sol.objective,
            position: sol.x[..n].iter().map(|v| v.max(0.0)).collect(),
            portfolio: sol.x[n..n + j].to_vec(),
        }),
        LpStatus::Unbounded => Err(Error::Model(
            "portfolio problem is unbounded: prices are inconsistent with the order unit".into(),
        )),
        LpStatus::Infeasible => Err(Error::Model(
            "portfolio problem is infeasible although the endowment should be affordable".into(),
        )),
    }
}

fn require_no_arbitrage(m: &Market) -> Result<()> {
    if check_arbitrage(m)?.is_arbitrage_free() {
        Ok(())
    } else {
        Err(Error::Arbitrage)
    }
}

/// Maximizes the maxmin utility of a nonnegative position whose shortfall
/// against the endowment can be funded with the initial wealth.
pub fn solve_program1(s: &Scenario) -> Result<OptimizationResult> {
    require_no_arbitrage(&s.market)?;
    let raw = solve_lp(s, Form::Utility)?;
    let position = Payoff::new(raw.position)?;
    let u = utility(&s.ambiguity, &position)?;
    let autarky_utility = utility(&s.ambiguity, s.market.endowment())?;
    let risk = -u;
    Ok(OptimizationResult {
        position,
        portfolio: raw.portfolio,
        utility: u,
        risk,
        autarky_utility,
        lowered_exposure: risk <= -autarky_utility + VALUE_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub max_utility: f64,
    pub min_risk: f64,
    /// `|max_utility + min_risk|`
    pub negation_gap: f64,
    /// Risk of the utility-form optimum, `-U(c*)`.
    pub risk_at_utility_optimum: f64,
    pub passed: bool,
}

/// Solves the problem in utility form and in risk form and checks that the
/// optimal values negate each other and that the utility-form optimum also
/// attains the minimal risk.
pub fn equivalence_report(s: &Scenario) -> Result<EquivalenceReport> {
    require_no_arbitrage(&s.market)?;
    let up = solve_lp(s, Form::Utility)?;
    let rp = solve_lp(s, Form::Risk)?;
    let c = Payoff::new(up.position)?;
    let risk_at_utility_optimum = -utility(&s.ambiguity, &c)?;
    let negation_gap = (up.objective + rp.objective).abs();
    let passed =
        negation_gap <= VALUE_TOL && (risk_at_utility_optimum - rp.objective).abs() <= VALUE_TOL;
    Ok(EquivalenceReport {
        max_utility: up.objective,
        min_risk: rp.objective,
        negation_gap,
        risk_at_utility_optimum,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrudenceReport {
    pub alpha: f64,
    pub optimal_position: Payoff,
    pub optimal_utility: f64,
    /// Super-replication price of `alpha * 1`.
    pub constant_cost: f64,
    pub constant_feasible: bool,
    pub constant_optimal: bool,
    pub passed: bool,
}

/// Under the full simplex, the constant position `min_n c*_n * 1` is
/// affordable and as good as the optimum.
pub fn prudence_check(s: &Scenario) -> Result<PrudenceReport> {
    if !s.ambiguity.is_full_simplex() {
        return Err(Error::Precondition(
            "prudence check needs the full simplex as ambiguity set".into(),
        ));
    }
    let opt = solve_program1(s)?;
    let n = s.market.states();
    let alpha = opt.position.min();
    let constant = Payoff::constant(n, alpha);
    let constant_cost = superreplication_price(&s.market, &constant)?.price;
    let constant_feasible = constant_cost <= s.market.wealth() + BUDGET_TOL;
    let constant_optimal = (utility(&s.ambiguity, &constant)? - opt.utility).abs() <= VALUE_TOL;
    Ok(PrudenceReport {
        alpha,
        optimal_position: opt.position,
        optimal_utility: opt.utility,
        constant_cost,
        constant_feasible,
        constant_optimal,
        passed: constant_feasible && constant_optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::ProbabilityVector;

    fn p(v: &[f64]) -> Payoff {
        Payoff::new(v.to_vec()).unwrap()
    }

    fn arrow2(endowment: [f64; 2], wealth: f64) -> Market {
        Market::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.5, 0.5],
            p(&endowment),
            wealth,
            None,
        )
        .unwrap()
    }

    #[test]
    fn rawlsian_arrow_example() {
        let s = Scenario::new(arrow2([0.0, 0.0], 1.0), AmbiguitySet::full_simplex(2)).unwrap();
        let r = solve_program1(&s).unwrap();
        assert!((r.utility - 1.0).abs() < 1e-9);
        assert!((r.position.values()[0] - 1.0).abs() < 1e-9);
        assert!((r.position.values()[1] - 1.0).abs() < 1e-9);
        assert_eq!(r.risk, -r.utility);
    }

    #[test]
    fn exchange_lowers_exposure() {
        let s = Scenario::new(arrow2([2.0, 0.0], 0.0), AmbiguitySet::full_simplex(2)).unwrap();
        let r = solve_program1(&s).unwrap();
        assert!((r.utility - 1.0).abs() < 1e-9);
        assert_eq!(r.autarky_utility, 0.0);
        assert!(r.lowered_exposure);
        let m = s.market();
        assert!(m.cost_of(&r.portfolio) <= m.wealth() + BUDGET_TOL);
        let funded = m.payoff_of(&r.portfolio);
        for n in 0..2 {
            assert!(funded[n] + m.endowment().values()[n] - r.position.values()[n] >= -BUDGET_TOL);
        }
    }

    #[test]
    fn linear_utility_spends_the_budget() {
        let pi = ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let eye = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let endowment = p(&[1.0, 0.0, 2.0]);
        let m = Market::new(eye, pi.weights().to_vec(), endowment.clone(), 0.7, None).unwrap();
        let s = Scenario::new(m, AmbiguitySet::singleton(pi.clone())).unwrap();
        let r = solve_program1(&s).unwrap();
        let expected = pi.expectation(&endowment).unwrap() + 0.7;
        assert!((r.utility - expected).abs() < 1e-9);
    }

    #[test]
    fn arbitrage_is_rejected() {
        let m = Market::new(vec![vec![1.0], vec![1.0]], vec![-1.0], p(&[1.0, 1.0]), 1.0, Some(0)).unwrap();
        let s = Scenario::new(m, AmbiguitySet::full_simplex(2)).unwrap();
        assert_eq!(solve_program1(&s), Err(Error::Arbitrage));
    }

    #[test]
    fn scenario_dimensions_checked() {
        assert!(Scenario::new(arrow2([1.0, 1.0], 1.0), AmbiguitySet::full_simplex(3)).is_err());
    }

    #[test]
    fn prudence_examples() {
        let s = Scenario::new(arrow2([0.0, 0.0], 1.0), AmbiguitySet::full_simplex(2)).unwrap();
        let r = prudence_check(&s).unwrap();
        assert!(r.passed);
        assert!((r.alpha - 1.0).abs() < 1e-9);

        let bond = Market::new(vec![vec![1.0]; 3], vec![1.0], p(&[0.0, 0.0, 0.0]), 2.0, Some(0)).unwrap();
        let s = Scenario::new(bond, AmbiguitySet::full_simplex(3)).unwrap();
        let r = prudence_check(&s).unwrap();
        assert!(r.passed);
        assert!((r.alpha - 2.0).abs() < 1e-9);
        for v in r.optimal_position.values() {
            assert!((v - 2.0).abs() < 1e-9);
        }

        let s = Scenario::new(arrow2([5.0, 5.0], 1e-3), AmbiguitySet::full_simplex(2)).unwrap();
        let r = prudence_check(&s).unwrap();
        assert!(r.passed && r.alpha >= 5.0);
    }

    #[test]
    fn prudence_requires_full_simplex() {
        let d = AmbiguitySet::singleton(ProbabilityVector::uniform(2));
        let s = Scenario::new(arrow2([1.0, 1.0], 1.0), d).unwrap();
        assert!(matches!(prudence_check(&s), Err(Error::Precondition(_))));
    }

    #[test]
    fn equivalence_examples() {
        let s = Scenario::new(arrow2([2.0, 0.0], 0.0), AmbiguitySet::full_simplex(2)).unwrap();
        let r = equivalence_report(&s).unwrap();
        assert!(r.passed);
        assert!((r.max_utility - 1.0).abs() < 1e-9);
        assert!((r.min_risk + 1.0).abs() < 1e-9);
    }
}
