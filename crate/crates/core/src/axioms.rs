//! Randomized axiom battery for preferences represented by a utility
//! functional, and the witness showing that the risk-perception axiom does
//! not follow from the others.
//!
//! Completeness and transitivity hold for any real-valued representation and
//! are reported as structural. Continuity is tested through 1-Lipschitz
//! continuity in the sup-norm, which implies closed upper and lower contour
//! sets. Everything else is sampled from a seeded ChaCha8 stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, LpStatus, Relation, Sense};
use crate::payoff::{cone_contains, dot, sup_norm, Cone, Payoff, ProbabilityVector, MEMBERSHIP_TOL};
use crate::risk::{acceptance_cone, random_payoff, utility, AmbiguitySet};

pub const AXIOM_TOL: f64 = 1e-7;
const SAMPLE_BOUND: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    #[serde(rename = "A.1")]
    CompletenessTransitivity,
    #[serde(rename = "A.2")]
    CertaintyIndependence,
    #[serde(rename = "A.3")]
    Continuity,
    #[serde(rename = "A.4a")]
    Monotonicity,
    #[serde(rename = "A.4b")]
    UniformMonotonicity,
    #[serde(rename = "A.5")]
    UncertaintyAversion,
    #[serde(rename = "A.6")]
    RiskPerception,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::CompletenessTransitivity,
        Axiom::CertaintyIndependence,
        Axiom::Continuity,
        Axiom::Monotonicity,
        Axiom::UniformMonotonicity,
        Axiom::UncertaintyAversion,
        Axiom::RiskPerception,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Axiom::CompletenessTransitivity => "A.1",
            Axiom::CertaintyIndependence => "A.2",
            Axiom::Continuity => "A.3",
            Axiom::Monotonicity => "A.4a",
            Axiom::UniformMonotonicity => "A.4b",
            Axiom::UncertaintyAversion => "A.5",
            Axiom::RiskPerception => "A.6",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomStatus {
    Pass,
    Fail,
    Structural,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCounterexample {
    pub trial: usize,
    pub payoffs: Vec<Payoff>,
    /// Named scalars of the instance (`alpha`, `h`, `epsilon`, ...).
    pub parameters: Vec<(String, f64)>,
    /// Utilities of the payoffs involved, in the order the check used them.
    pub utilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub status: AxiomStatus,
    /// Instances actually checked (A.5 skips pairs that cannot be made
    /// indifferent by a cash adjustment).
    pub checked: usize,
    pub counterexample: Option<AxiomCounterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub states: usize,
    pub trials: usize,
    pub seed: u64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != AxiomStatus::Fail)
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes
            .iter()
            .find(|o| o.axiom == axiom)
            .expect("every axiom is reported")
    }

    pub fn failed(&self) -> Vec<Axiom> {
        self.outcomes
            .iter()
            .filter(|o| o.status == AxiomStatus::Fail)
            .map(|o| o.axiom)
            .collect()
    }
}

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Strictly greater, beyond tolerance.
fn gt(a: f64, b: f64) -> bool {
    a - b > AXIOM_TOL * scale(&[a, b])
}

fn ge(a: f64, b: f64) -> bool {
    a - b >= -AXIOM_TOL * scale(&[a, b])
}

fn pointwise_below(x: &Payoff, noise: &Payoff, epsilon: f64) -> Payoff {
    Payoff::new(
        x.values()
            .iter()
            .zip(noise.values())
            .map(|(a, e)| a - epsilon - e.abs())
            .collect(),
    )
    .expect("finite")
}

/// Runs the battery for `U(x) = min_{pi in D} E_pi[x]` with `P` the
/// acceptance cone of `D`.
pub fn run_axiom_battery(d: &AmbiguitySet, n: usize, trials: usize, seed: u64) -> Result<AxiomReport> {
    if n != d.dim() {
        return Err(Error::dims("axiom battery states", d.dim(), n));
    }
    let cone = acceptance_cone(d);
    Ok(run_axiom_battery_with(
        |x| utility(d, x).expect("dimension checked"),
        &cone,
        trials,
        seed,
    ))
}

/// Runs the battery for an arbitrary utility functional on `R^n`, where `n`
/// is the dimension of `acceptance` and `acceptance` plays the role of the
/// set fixed by the risk-perception axiom.
pub fn run_axiom_battery_with<F>(u: F, acceptance: &Cone, trials: usize, seed: u64) -> AxiomReport
where
    F: Fn(&Payoff) -> f64,
{
    assert!(trials >= 1);
    let n = acceptance.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Index order follows Axiom::ALL.
    let mut first: [Option<AxiomCounterexample>; 7] = Default::default();
    let mut checked = [0usize; 7];

    for trial in 0..trials {
        let x = random_payoff(&mut rng, n, SAMPLE_BOUND);
        let y = random_payoff(&mut rng, n, SAMPLE_BOUND);
        let z = random_payoff(&mut rng, n, SAMPLE_BOUND);
        let noise = random_payoff(&mut rng, n, SAMPLE_BOUND);
        let alpha: f64 = rng.gen_range(1e-3..1.0 - 1e-3);
        let h: f64 = rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
        let epsilon: f64 = rng.gen_range(0.01..=1.0);

        let ux = u(&x);
        let uy = u(&y);

        // A.2: x >= y  iff  a x + (1-a) h1 >= a y + (1-a) h1
        {
            checked[1] += 1;
            let hc = Payoff::constant(n, h);
            let tx = x.mix(&hc, alpha);
            let ty = y.mix(&hc, alpha);
            let (utx, uty) = (u(&tx), u(&ty));
            let flipped = (gt(ux, uy) && gt(uty, utx)) || (gt(uy, ux) && gt(utx, uty));
            if flipped && first[1].is_none() {
                first[1] = Some(AxiomCounterexample {
                    trial,
                    payoffs: vec![x.clone(), y.clone()],
                    parameters: vec![("alpha".into(), alpha), ("h".into(), h)],
                    utilities: vec![ux, uy, utx, uty],
                });
            }
        }

        // A.3 via |U(x) - U(z)| <= ||x - z||
        {
            checked[2] += 1;
            let uz = u(&z);
            let dist = sup_norm(&x.sub(&z));
            if !ge(dist, (ux - uz).abs()) && first[2].is_none() {
                first[2] = Some(AxiomCounterexample {
                    trial,
                    payoffs: vec![x.clone(), z.clone()],
                    parameters: vec![("distance".into(), dist)],
                    utilities: vec![ux, uz],
                });
            }
        }

        // A.4(a): x >= x - |noise|
        {
            checked[3] += 1;
            let below = pointwise_below(&x, &noise, 0.0);
            let ub = u(&below);
            if !ge(ux, ub) && first[3].is_none() {
                first[3] = Some(AxiomCounterexample {
                    trial,
                    payoffs: vec![x.clone(), below],
                    parameters: vec![],
                    utilities: vec![ux, ub],
                });
            }
        }

        // A.4(b): x >= x - eps - |noise| + eps uniformly, so strict preference.
        {
            checked[4] += 1;
            let below = pointwise_below(&x, &noise, epsilon);
            let ub = u(&below);
            if !gt(ux, ub) && first[4].is_none() {
                first[4] = Some(AxiomCounterexample {
                    trial,
                    payoffs: vec![x.clone(), below],
                    parameters: vec![("epsilon".into(), epsilon)],
                    utilities: vec![ux, ub],
                });
            }
        }

        // A.5: make y indifferent to x by a cash adjustment, then mix.
        {
            let adjusted = y.shift(ux - uy);
            let ua = u(&adjusted);
            if (ua - ux).abs() <= AXIOM_TOL * scale(&[ua, ux]) {
                checked[5] += 1;
                let mixed = x.mix(&adjusted, alpha);
                let um = u(&mixed);
                if !ge(um, ux) && first[5].is_none() {
                    first[5] = Some(AxiomCounterexample {
                        trial,
                        payoffs: vec![x.clone(), adjusted],
                        parameters: vec![("alpha".into(), alpha)],
                        utilities: vec![ux, ua, um],
                    });
                }
            }
        }

        // A.6: {U >= 0} = P, on a random point and on x moved onto {U = 0}.
        for v in [x.clone(), x.shift(-ux)] {
            checked[6] += 1;
            let uv = u(&v);
            let preferred = uv >= -MEMBERSHIP_TOL;
            let inside = cone_contains(acceptance, &v, MEMBERSHIP_TOL).expect("dimension matches");
            if preferred != inside && first[6].is_none() {
                first[6] = Some(AxiomCounterexample {
                    trial,
                    payoffs: vec![v],
                    parameters: vec![("in_acceptance_set".into(), if inside { 1.0 } else { 0.0 })],
                    utilities: vec![uv],
                });
            }
        }
    }

    let outcomes = Axiom::ALL
        .iter()
        .enumerate()
        .zip(first)
        .map(|((i, &axiom), counterexample)| {
            let status = if axiom == Axiom::CompletenessTransitivity {
                AxiomStatus::Structural
            } else if counterexample.is_some() {
                AxiomStatus::Fail
            } else {
                AxiomStatus::Pass
            };
            AxiomOutcome {
                axiom,
                status,
                checked: checked[i],
                counterexample,
            }
        })
        .collect();

    AxiomReport {
        states: n,
        trials,
        seed,
        outcomes,
    }
}

/// A position outside the acceptance set that the expected-value preference
/// under `pi_hat` still weakly prefers to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim1Witness {
    pub witness: Payoff,
    /// `E_{pi_hat}[witness]`, nonnegative.
    pub pi_hat_expectation: f64,
    /// `min_{pi in D} E_pi[witness]`, at most -1.
    pub worst_expectation: f64,
    /// Vertex of `D` attaining the worst expectation.
    pub vertex: usize,
}

/// True when `pi` is a convex combination of the vertices of `d`.
pub fn hull_contains(d: &AmbiguitySet, pi: &ProbabilityVector) -> Result<bool> {
    if pi.len() != d.dim() {
        return Err(Error::dims("pi_hat", d.dim(), pi.len()));
    }
    let k = d.vertices().len();
    let mut p = LpProblem::new(Sense::Minimize, vec![0.0; k]);
    for s in 0..d.dim() {
        let row = d.vertices().iter().map(|v| v.weights()[s]).collect();
        p.add_row(row, Relation::Eq, pi.weights()[s]);
    }
    p.add_row(vec![1.0; k], Relation::Eq, 1.0);
    Ok(lp::solve(&p)?.status == LpStatus::Optimal)
}

const WITNESS_BOX: f64 = 10.0;
// Slack on pi_hat . x >= 0 so the post-hoc check survives LP rounding.
const WITNESS_MARGIN: f64 = 1e-6;

pub fn claim1_witness(d: &AmbiguitySet, pi_hat: &ProbabilityVector) -> Result<Claim1Witness> {
    if hull_contains(d, pi_hat)? {
        return Err(Error::Precondition(
            "pi_hat lies in the convex hull of the ambiguity set".into(),
        ));
    }
    let n = d.dim();
    for bound in [WITNESS_BOX, 2.0 * WITNESS_BOX] {
        // For each vertex, push its expectation as low as possible while
        // pi_hat still accepts the position.
        let mut best: Option<(f64, Vec<f64>)> = None;
        for pi in d.vertices() {
            let mut p = LpProblem::new(Sense::Minimize, pi.weights().to_vec());
            for s in 0..n {
                p.set_bounds(s, -bound, bound);
            }
            p.add_row(pi_hat.weights().to_vec(), Relation::Ge, WITNESS_MARGIN);
            let sol = lp::solve(&p)?;
            if sol.status == LpStatus::Optimal && best.as_ref().is_none_or(|(v, _)| sol.objective < *v) {
                best = Some((sol.objective, sol.x));
            }
        }
        if let Some((_, x)) = best {
            let witness = Payoff::new(x)?;
            let pi_hat_expectation = dot(pi_hat.weights(), witness.values());
            let report = crate::risk::maxmin_utility(d, &witness)?;
            if pi_hat_expectation >= 0.0 && report.utility <= -1.0 {
                return Ok(Claim1Witness {
                    witness,
                    pi_hat_expectation,
                    worst_expectation: report.utility,
                    vertex: report.argmin_vertex,
                });
            }
        }
    }
    Err(Error::Model(format!(
        "no witness found within the box of radius {}",
        2.0 * WITNESS_BOX
    )))
}
