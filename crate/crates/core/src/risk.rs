//! Maxmin expected utility and the coherent risk measure it induces.
//!
//! For an ambiguity set `D` given by its vertices, `U(x) = min_{pi in D} E_pi[x]`
//! is attained at a vertex, and `-U` coincides with the translation risk
//! measure `inf{t : x + t1 in P}` of the acceptance cone
//! `P = {x : E_pi[x] >= 0 for all pi in D}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::{dot, Cone, Payoff, ProbabilityVector, MEMBERSHIP_TOL};

/// Tolerance used by the coherence battery.
pub const COHERENCE_TOL: f64 = 1e-7;

/// Convex hull of finitely many probability vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProbabilityVector>", into = "Vec<ProbabilityVector>")]
pub struct AmbiguitySet {
    vertices: Vec<ProbabilityVector>,
}

impl AmbiguitySet {
    pub fn new(vertices: Vec<ProbabilityVector>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::invalid("ambiguity", "at least one vertex is required"));
        };
        let n = first.len();
        for (k, v) in vertices.iter().enumerate() {
            if v.len() != n {
                return Err(Error::dims(format!("ambiguity[{k}]"), n, v.len()));
            }
        }
        Ok(AmbiguitySet { vertices })
    }

    /// Every unit mass: the whole probability simplex.
    pub fn full_simplex(n: usize) -> Self {
        AmbiguitySet {
            vertices: (0..n).map(|i| ProbabilityVector::unit(n, i)).collect(),
        }
    }

    pub fn singleton(pi: ProbabilityVector) -> Self {
        AmbiguitySet { vertices: vec![pi] }
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[ProbabilityVector] {
        &self.vertices
    }

    /// True when every unit mass is a vertex, i.e. the hull is the whole simplex.
    pub fn is_full_simplex(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            self.vertices.iter().any(|v| {
                v.weights()
                    .iter()
                    .enumerate()
                    .all(|(j, &w)| if j == i { w == 1.0 } else { w == 0.0 })
            })
        })
    }

    /// The sub-hull spanned by the selected vertices.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let vertices = indices
            .iter()
            .map(|&k| {
                self.vertices
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::invalid("vertex index", format!("{k} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        AmbiguitySet::new(vertices)
    }
}

impl TryFrom<Vec<ProbabilityVector>> for AmbiguitySet {
    type Error = Error;

    fn try_from(v: Vec<ProbabilityVector>) -> Result<Self> {
        AmbiguitySet::new(v)
    }
}

impl From<AmbiguitySet> for Vec<ProbabilityVector> {
    fn from(d: AmbiguitySet) -> Self {
        d.vertices
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub value: f64,
    pub utility: f64,
    pub argmin_vertex: usize,
    pub acceptable: bool,
}

/// `U(x) = min_k pi_k . x`, with ties resolved to the smallest vertex index.
pub fn maxmin_utility(d: &AmbiguitySet, x: &Payoff) -> Result<RiskReport> {
    if x.len() != d.dim() {
        return Err(Error::dims("maxmin utility", d.dim(), x.len()));
    }
    let mut utility = f64::INFINITY;
    let mut argmin_vertex = 0;
    for (k, v) in d.vertices.iter().enumerate() {
        let e = dot(v.weights(), x.values());
        if e < utility {
            utility = e;
            argmin_vertex = k;
        }
    }
    let value = -utility;
    Ok(RiskReport {
        value,
        utility,
        argmin_vertex,
        acceptable: value <= MEMBERSHIP_TOL,
    })
}

/// Shorthand for `maxmin_utility(d, x)?.utility`.
pub fn utility(d: &AmbiguitySet, x: &Payoff) -> Result<f64> {
    maxmin_utility(d, x).map(|r| r.utility)
}

/// `P = {x : pi . x >= 0 for every vertex pi}`.
pub fn acceptance_cone(d: &AmbiguitySet) -> Cone {
    Cone::new(d.vertices.iter().map(|v| v.weights().to_vec()).collect())
        .expect("probability vectors are nonzero and share one dimension")
}

/// `inf{t : x + t1 in P} = max_a (-a . x) / (a . 1)`.
pub fn rho_crm(cone: &Cone, x: &Payoff) -> Result<f64> {
    cone.check_order_unit()?;
    if x.len() != cone.dim() {
        return Err(Error::dims("rho_crm", cone.dim(), x.len()));
    }
    let mut rho = f64::NEG_INFINITY;
    for a in cone.normals() {
        let unit: f64 = a.iter().sum();
        let bound = -dot(a, x.values()) / unit;
        if bound > rho {
            rho = bound;
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceProperty {
    Monotonicity,
    CashInvariance,
    Subadditivity,
    PositiveHomogeneity,
}

impl CoherenceProperty {
    pub const ALL: [CoherenceProperty; 4] = [
        CoherenceProperty::Monotonicity,
        CoherenceProperty::CashInvariance,
        CoherenceProperty::Subadditivity,
        CoherenceProperty::PositiveHomogeneity,
    ];
}

/// A failing instance: the payoffs involved and the scalar parameter
/// (`t` or `lambda`) when the property has one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceCounterexample {
    pub trial: usize,
    pub payoffs: Vec<Payoff>,
    pub parameter: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub property: CoherenceProperty,
    pub passed: bool,
    pub counterexample: Option<CoherenceCounterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub states: usize,
    pub trials: usize,
    pub seed: u64,
    pub outcomes: Vec<PropertyOutcome>,
}

impl CoherenceReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, property: CoherenceProperty) -> &PropertyOutcome {
        self.outcomes
            .iter()
            .find(|o| o.property == property)
            .expect("all properties are reported")
    }
}

pub(crate) fn random_payoff(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> Payoff {
    Payoff::new((0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
        .expect("uniform samples are finite")
}

// Scale-aware "a <= b".
fn le_tol(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * 1f64.max(a.abs()).max(b.abs())
}

fn eq_tol(a: f64, b: f64, tol: f64) -> bool {
    le_tol(a, b, tol) && le_tol(b, a, tol)
}

/// Randomized check of the four coherence properties for a black-box risk
/// functional on `R^n`. Payoff components are uniform in `[-10, 10]`; every
/// draw comes from a ChaCha8 stream seeded with `seed`, so reports replay
/// exactly.
pub fn check_coherence<F>(rho: F, n: usize, trials: usize, seed: u64) -> CoherenceReport
where
    F: Fn(&Payoff) -> f64,
{
    assert!(n >= 1 && trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first: [Option<CoherenceCounterexample>; 4] = Default::default();

    for trial in 0..trials {
        let x = random_payoff(&mut rng, n, 10.0);
        let y = random_payoff(&mut rng, n, 10.0);
        let noise = random_payoff(&mut rng, n, 10.0);
        let t: f64 = rng.gen_range(-10.0..=10.0);
        let lambda: f64 = rng.gen_range(0.0..=10.0);

        let rx = rho(&x);

        // x >= x - |noise|
        let below = Payoff::new(
            x.values()
                .iter()
                .zip(noise.values())
                .map(|(a, e)| a - e.abs())
                .collect(),
        )
        .expect("finite");
        let r_below = rho(&below);
        if first[0].is_none() && !le_tol(rx, r_below, COHERENCE_TOL) {
            first[0] = Some(CoherenceCounterexample {
                trial,
                payoffs: vec![x.clone(), below],
                parameter: None,
                lhs: rx,
                rhs: r_below,
            });
        }

        let r_shift = rho(&x.shift(t));
        if first[1].is_none() && !eq_tol(r_shift, rx - t, COHERENCE_TOL) {
            first[1] = Some(CoherenceCounterexample {
                trial,
                payoffs: vec![x.clone()],
                parameter: Some(t),
                lhs: r_shift,
                rhs: rx - t,
            });
        }

        let ry = rho(&y);
        let r_sum = rho(&x.add(&y));
        if first[2].is_none() && !le_tol(r_sum, rx + ry, COHERENCE_TOL) {
            first[2] = Some(CoherenceCounterexample {
                trial,
                payoffs: vec![x.clone(), y.clone()],
                parameter: None,
                lhs: r_sum,
                rhs: rx + ry,
            });
        }

        let r_scaled = rho(&x.scale(lambda));
        if first[3].is_none() && !eq_tol(r_scaled, lambda * rx, COHERENCE_TOL) {
            first[3] = Some(CoherenceCounterexample {
                trial,
                payoffs: vec![x.clone()],
                parameter: Some(lambda),
                lhs: r_scaled,
                rhs: lambda * rx,
            });
        }
    }

    let outcomes = CoherenceProperty::ALL
        .iter()
        .zip(first)
        .map(|(&property, counterexample)| PropertyOutcome {
            property,
            passed: counterexample.is_none(),
            counterexample,
        })
        .collect();
    CoherenceReport {
        states: n,
        trials,
        seed,
        outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::{cone_contains, cone_interior_contains, INTERIOR_TOL};

    fn p(v: &[f64]) -> Payoff {
        Payoff::new(v.to_vec()).unwrap()
    }

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn maxmin_examples() {
        let d = AmbiguitySet::singleton(pv(&[0.5, 0.5]));
        let r = maxmin_utility(&d, &p(&[1.0, -1.0])).unwrap();
        assert_eq!(r.utility, 0.0);
        assert_eq!(r.value, 0.0);
        assert!(r.acceptable);

        let d = AmbiguitySet::full_simplex(2);
        let r = maxmin_utility(&d, &p(&[3.0, 1.0])).unwrap();
        assert_eq!(r.utility, 1.0);
        assert_eq!(r.argmin_vertex, 1);
        assert!(r.acceptable);
    }

    #[test]
    fn maxmin_matches_grid_over_hull() {
        // Brute force over a fine grid of the segment between e1 and e2.
        let d = AmbiguitySet::full_simplex(2);
        let x = p(&[3.0, 1.0]);
        let grid_min = (0..=10_000)
            .map(|i| {
                let w = i as f64 / 10_000.0;
                w * 3.0 + (1.0 - w) * 1.0
            })
            .fold(f64::INFINITY, f64::min);
        let u = utility(&d, &x).unwrap();
        assert!((u - grid_min).abs() < 1e-6);
    }

    #[test]
    fn ties_resolve_to_smallest_index() {
        let d = AmbiguitySet::new(vec![pv(&[0.5, 0.5]), pv(&[0.25, 0.75]), pv(&[1.0, 0.0])]).unwrap();
        let r = maxmin_utility(&d, &p(&[2.0, 2.0])).unwrap();
        assert_eq!(r.argmin_vertex, 0);
    }

    #[test]
    fn constants_have_their_own_utility() {
        let d = AmbiguitySet::new(vec![pv(&[0.2, 0.3, 0.5]), pv(&[0.6, 0.2, 0.2])]).unwrap();
        for t in [-3.0, 0.0, 4.5] {
            assert_eq!(utility(&d, &Payoff::constant(3, t)).unwrap(), t);
        }
    }

    #[test]
    fn acceptance_cone_examples() {
        assert_eq!(acceptance_cone(&AmbiguitySet::full_simplex(3)), Cone::positive(3));
        let half = acceptance_cone(&AmbiguitySet::singleton(pv(&[0.5, 0.5])));
        assert_eq!(half.normals(), &[vec![0.5, 0.5]]);
        assert!(cone_contains(&half, &p(&[-1.0, 2.0]), MEMBERSHIP_TOL).unwrap());
    }

    #[test]
    fn rho_crm_examples() {
        assert_eq!(rho_crm(&Cone::positive(3), &p(&[3.0, 1.0, 2.0])).unwrap(), -1.0);
        let half = acceptance_cone(&AmbiguitySet::singleton(pv(&[0.5, 0.5])));
        assert_eq!(rho_crm(&half, &p(&[1.0, -1.0])).unwrap(), 0.0);
        let cone = Cone::new(vec![vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(rho_crm(&cone, &Payoff::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn rho_crm_rejects_non_order_unit_cones() {
        let cone = Cone::new(vec![vec![1.0, -1.0]]).unwrap();
        assert!(matches!(
            rho_crm(&cone, &p(&[1.0, 1.0])),
            Err(Error::OrderUnit { index: 0, .. })
        ));
        let pos = Cone::positive(2);
        assert!(rho_crm(&pos, &p(&[1.0])).is_err());
    }

    #[test]
    fn rho_crm_translation_lands_on_the_boundary() {
        // Non-probability normals: x + rho * 1 sits on the cone's boundary.
        let cone = Cone::new(vec![vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = p(&[-1.0, 2.5]);
        let rho = rho_crm(&cone, &x).unwrap();
        let moved = x.shift(rho);
        assert!(cone_contains(&cone, &moved, 1e-12).unwrap());
        assert!(!cone_interior_contains(&cone, &moved, 0.0).unwrap());
        assert!(!cone_contains(&cone, &x.shift(rho - 1e-6), 0.0).unwrap());
    }

    #[test]
    fn coherence_battery_accepts_positive_cone() {
        let cone = Cone::positive(4);
        let report = check_coherence(|x| rho_crm(&cone, x).unwrap(), 4, 1000, 11);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn coherence_battery_flags_unnormalized_sum() {
        let report = check_coherence(|x| -x.values().iter().sum::<f64>(), 3, 200, 1);
        let cash = report.outcome(CoherenceProperty::CashInvariance);
        assert!(!cash.passed);
        assert!(cash.counterexample.as_ref().unwrap().parameter.is_some());
        assert!(report.outcome(CoherenceProperty::Subadditivity).passed);
    }

    #[test]
    fn coherence_battery_flags_quadratic_penalty() {
        let rho = |x: &Payoff| {
            let spread = x.max() - x.min();
            -x.min() + 0.1 * spread * spread
        };
        let report = check_coherence(rho, 3, 200, 2);
        assert!(!report.outcome(CoherenceProperty::PositiveHomogeneity).passed);
        assert!(report.outcome(CoherenceProperty::CashInvariance).passed);
    }

    #[test]
    fn coherence_battery_is_deterministic() {
        let cone = Cone::positive(3);
        let a = check_coherence(|x| rho_crm(&cone, x).unwrap() + x.values()[0].powi(2), 3, 50, 5);
        let b = check_coherence(|x| rho_crm(&cone, x).unwrap() + x.values()[0].powi(2), 3, 50, 5);
        assert_eq!(a, b);
    }

    #[test]
    fn interior_sign_on_simple_points() {
        let d = AmbiguitySet::new(vec![pv(&[0.5, 0.5]), pv(&[0.25, 0.75])]).unwrap();
        let cone = acceptance_cone(&d);
        for x in [p(&[1.0, 1.0]), p(&[0.0, 0.0]), p(&[-1.0, 1.0]), p(&[3.0, -1.0])] {
            let rho = rho_crm(&cone, &x).unwrap();
            assert_eq!(
                rho < -INTERIOR_TOL,
                cone_interior_contains(&cone, &x, INTERIOR_TOL).unwrap(),
                "{x:?}"
            );
        }
    }
}
