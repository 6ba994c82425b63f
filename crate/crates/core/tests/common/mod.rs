//! Seeded corpora shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_risk::lp::{self, LpProblem, LpStatus, Relation, Sense};
use robust_risk::market::Market;
use robust_risk::{AmbiguitySet, Payoff, ProbabilityVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const DYADIC_UNIT: u32 = 1 << 20;

/// Probability vector whose weights are multiples of `2^-20`; they sum to
/// exactly `1.0` in floating point.
pub fn dyadic_probability(rng: &mut ChaCha8Rng, n: usize) -> ProbabilityVector {
    let mut cuts: Vec<u32> = (0..n - 1).map(|_| rng.gen_range(0..=DYADIC_UNIT)).collect();
    cuts.push(0);
    cuts.push(DYADIC_UNIT);
    cuts.sort_unstable();
    let weights = cuts
        .windows(2)
        .map(|w| f64::from(w[1] - w[0]) / f64::from(DYADIC_UNIT))
        .collect();
    ProbabilityVector::new(weights).expect("dyadic weights sum to one")
}

pub fn dyadic_ambiguity(rng: &mut ChaCha8Rng, n: usize, k: usize) -> AmbiguitySet {
    AmbiguitySet::new((0..k).map(|_| dyadic_probability(rng, n)).collect()).unwrap()
}

/// `count` ambiguity sets with `N <= max_states` states and `K <= 6` vertices.
pub fn ambiguity_corpus(seed: u64, count: usize, max_states: usize) -> Vec<AmbiguitySet> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(1..=max_states);
            let k = r.gen_range(1..=6);
            dyadic_ambiguity(&mut r, n, k)
        })
        .collect()
}

pub fn random_payoff(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> Payoff {
    Payoff::new((0..n).map(|_| rng.gen_range(-bound..=bound)).collect()).unwrap()
}

pub fn nonneg_payoff(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> Payoff {
    Payoff::new((0..n).map(|_| rng.gen_range(0.0..=bound)).collect()).unwrap()
}

/// Market with a bond in column 0 and prices `q = R^T f` for strictly
/// positive state prices `f`, hence free of arbitrage.
pub fn arbitrage_free_market(rng: &mut ChaCha8Rng, n: usize, j: usize) -> Market {
    let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0) / n as f64).collect();
    let r: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row = vec![1.0];
            row.extend((1..j).map(|_| rng.gen_range(0.0..3.0)));
            row
        })
        .collect();
    let q = (0..j).map(|a| (0..n).map(|s| r[s][a] * f[s]).sum()).collect();
    let endowment = nonneg_payoff(rng, n, 2.0);
    let wealth = rng.gen_range(0.1..2.0);
    Market::new(r, q, endowment, wealth, Some(0)).unwrap()
}

/// Market with a bond in column 0 and a planted arbitrage: either a
/// redundant asset priced off its replicating cost, or an asset that
/// dominates another at no higher price.
pub fn market_with_arbitrage(rng: &mut ChaCha8Rng, n: usize, j: usize) -> Market {
    assert!(j >= 2);
    let base = arbitrage_free_market(rng, n, j);
    let mut r = base.payoff_matrix().to_vec();
    let mut q = base.prices().to_vec();
    let last = j - 1;
    if j >= 3 && rng.gen_bool(0.5) {
        // asset last = asset 0 + asset 1, mispriced
        for row in r.iter_mut() {
            row[last] = row[0] + row[1];
        }
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        q[last] = q[0] + q[1] + sign * rng.gen_range(0.05..0.5);
    } else {
        // asset last pays asset `other` plus a nonnegative bonus, costs no more
        let other = rng.gen_range(0..last);
        let bump = rng.gen_range(0..n);
        for (s, row) in r.iter_mut().enumerate() {
            let bonus = if s == bump { rng.gen_range(0.1..1.0) } else { 0.0 };
            row[last] = row[other] + bonus;
        }
        q[last] = q[other] - rng.gen_range(0.0..0.2);
    }
    Market::new(r, q, base.endowment().clone(), base.wealth(), Some(0)).unwrap()
}

/// Integer portfolios in `[-radius, radius]^J` that cost nothing or less and
/// pay a nonnegative, nonzero amount (or cost strictly less than zero).
pub fn grid_arbitrage(m: &Market, radius: i32) -> Option<Vec<f64>> {
    let j = m.assets();
    let mut h = vec![-radius; j];
    loop {
        let hf: Vec<f64> = h.iter().map(|&v| f64::from(v)).collect();
        let payoff = m.payoff_of(&hf);
        let cost = m.cost_of(&hf);
        let nonneg = payoff.iter().all(|&v| v >= -1e-9);
        let positive = payoff.iter().any(|&v| v > 1e-9);
        if nonneg && cost <= 1e-9 && (positive || cost < -1e-9) {
            return Some(hf);
        }
        let mut i = 0;
        loop {
            if i == j {
                return None;
            }
            h[i] += 1;
            if h[i] <= radius {
                break;
            }
            h[i] = -radius;
            i += 1;
        }
    }
}

/// Random bounded LP: every variable boxed, rows built around a random point
/// so most instances are feasible.
pub fn random_bounded_lp(rng: &mut ChaCha8Rng) -> LpProblem {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=6);
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let objective = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let mut p = LpProblem::new(sense, objective);
    let mut x0 = Vec::with_capacity(n);
    for i in 0..n {
        let lo: f64 = rng.gen_range(-5.0..=0.0);
        let hi = lo + rng.gen_range(0.5..10.0);
        p.set_bounds(i, lo, hi);
        x0.push(rng.gen_range(lo..=hi));
    }
    for _ in 0..m {
        let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let at: f64 = row.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let feasible_side = rng.gen_bool(0.85);
        let slack = rng.gen_range(0.0..3.0);
        let (relation, rhs) = match rng.gen_range(0..10) {
            0 => (Relation::Eq, at),
            1..=5 => (Relation::Le, if feasible_side { at + slack } else { at - slack }),
            _ => (Relation::Ge, if feasible_side { at - slack } else { at + slack }),
        };
        p.add_row(row, relation, rhs);
    }
    p
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for c in k..n {
                a[i][c] -= f * a[k][c];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|c| a[i][c] * x[c]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Optimal value of a bounded LP by enumerating vertices; `None` when no
/// vertex is feasible.
pub fn vertex_enumeration(p: &LpProblem) -> Option<f64> {
    let n = p.objective.len();
    let mut cons: Vec<(Vec<f64>, f64, Relation)> = Vec::new();
    for i in 0..p.rows.len() {
        cons.push((p.rows[i].clone(), p.rhs[i], p.relations[i]));
    }
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        cons.push((e.clone(), p.lower[i], Relation::Ge));
        cons.push((e, p.upper[i], Relation::Le));
    }
    let eqs: Vec<usize> = (0..cons.len()).filter(|&i| cons[i].2 == Relation::Eq).collect();
    let ineqs: Vec<usize> = (0..cons.len()).filter(|&i| cons[i].2 != Relation::Eq).collect();
    if eqs.len() > n {
        // Overdetermined: enumerate square subsets of all constraints.
        return enumerate(p, &cons, &(0..cons.len()).collect::<Vec<_>>(), &[], n);
    }
    enumerate(p, &cons, &ineqs, &eqs, n - eqs.len())
}

fn enumerate(
    p: &LpProblem,
    cons: &[(Vec<f64>, f64, Relation)],
    pool: &[usize],
    fixed: &[usize],
    k: usize,
) -> Option<f64> {
    let maximize = p.sense == Sense::Maximize;
    let mut best: Option<f64> = None;
    combinations(pool.len(), k, &mut |idx| {
        let active: Vec<usize> = fixed.iter().copied().chain(idx.iter().map(|&i| pool[i])).collect();
        let a = active.iter().map(|&i| cons[i].0.clone()).collect();
        let b = active.iter().map(|&i| cons[i].1).collect();
        let Some(x) = solve_square(a, b) else { return };
        let feasible = cons.iter().all(|(row, rhs, rel)| {
            let v: f64 = row.iter().zip(&x).map(|(a, x)| a * x).sum();
            let tol = 1e-7 * (1.0 + rhs.abs());
            match rel {
                Relation::Le => v <= rhs + tol,
                Relation::Ge => v >= rhs - tol,
                Relation::Eq => (v - rhs).abs() <= tol,
            }
        });
        if !feasible {
            return;
        }
        let obj: f64 = p.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        best = Some(match best {
            None => obj,
            Some(b) if maximize => b.max(obj),
            Some(b) => b.min(obj),
        });
    });
    best
}

/// Outcome of comparing the simplex with the oracle on one LP.
pub enum LpComparison {
    Agree,
    Disagree(String),
}

pub fn compare_with_oracle(p: &LpProblem) -> LpComparison {
    let oracle = vertex_enumeration(p);
    let sol = match lp::solve(p) {
        Ok(s) => s,
        Err(e) => return LpComparison::Disagree(format!("solver error {e}")),
    };
    match (oracle, sol.status) {
        (None, LpStatus::Infeasible) => LpComparison::Agree,
        (Some(v), LpStatus::Optimal) => {
            if (v - sol.objective).abs() <= 1e-7 * (1.0 + v.abs()) {
                LpComparison::Agree
            } else {
                LpComparison::Disagree(format!("oracle {v}, simplex {}", sol.objective))
            }
        }
        (o, s) => LpComparison::Disagree(format!("oracle {o:?}, simplex {s:?}")),
    }
}
