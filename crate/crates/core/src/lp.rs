//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are stated in general form (any objective sense, `<=`/`=`/`>=`
//! rows, possibly infinite variable bounds) and reduced internally to
//! `min c.x, Ax = b, x >= 0, b >= 0`. The final basis is refactorized with
//! partial-pivoting LU plus one refinement pass, and every `Optimal` result
//! is returned together with a primal/dual certificate computed against the
//! original problem. A solution that fails its certificate is reported as
//! [`LpError::NumericalBreakdown`] rather than as `Optimal`.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Certificate thresholds for an `Optimal` outcome.
pub const PRIMAL_RESIDUAL_TOL: f64 = 1e-8;
pub const DUAL_RESIDUAL_TOL: f64 = 1e-8;
pub const DUALITY_GAP_TOL: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("lp dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("lp has non-finite data: {0}")]
    NonFinite(String),
    #[error("lp numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// New problem with every variable bounded below by zero.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.rows.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.rows.len() != self.relations.len() || self.rows.len() != self.rhs.len() {
            return Err(LpError::DimensionMismatch(format!(
                "{} rows, {} relations, {} right-hand sides",
                self.rows.len(),
                self.relations.len(),
                self.rhs.len()
            )));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{n} variables but {} lower and {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::DimensionMismatch(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) || !self.rhs[i].is_finite() {
                return Err(LpError::NonFinite(format!("row {i}")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        for j in 0..n {
            if self.lower[j].is_nan()
                || self.upper[j].is_nan()
                || self.lower[j] == f64::INFINITY
                || self.upper[j] == f64::NEG_INFINITY
            {
                return Err(LpError::NonFinite(format!("bounds of variable {j}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of [`solve`]. For non-optimal statuses `x` and `duals` are empty
/// and the numeric fields are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row, in the sign convention of the problem's sense:
    /// `d objective / d rhs`.
    pub duals: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub duality_gap: f64,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            duals: Vec::new(),
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
            duality_gap: f64::NAN,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Running statistics over every certified `Optimal` solve in this process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateStats {
    pub optimal_solves: u64,
    pub max_primal_residual: f64,
    pub max_dual_residual: f64,
    pub max_duality_gap: f64,
    /// Solves that ended in `NumericalBreakdown`.
    pub breakdowns: u64,
}

static OPTIMAL_SOLVES: AtomicU64 = AtomicU64::new(0);
static MAX_PRIMAL: AtomicU64 = AtomicU64::new(0);
static MAX_DUAL: AtomicU64 = AtomicU64::new(0);
static MAX_GAP: AtomicU64 = AtomicU64::new(0);
static BREAKDOWNS: AtomicU64 = AtomicU64::new(0);

// Bit patterns of non-negative floats order like the floats themselves.
fn record_max(slot: &AtomicU64, value: f64) {
    slot.fetch_max(value.max(0.0).to_bits(), Ordering::Relaxed);
}

pub fn certificate_stats() -> CertificateStats {
    CertificateStats {
        optimal_solves: OPTIMAL_SOLVES.load(Ordering::Relaxed),
        max_primal_residual: f64::from_bits(MAX_PRIMAL.load(Ordering::Relaxed)),
        max_dual_residual: f64::from_bits(MAX_DUAL.load(Ordering::Relaxed)),
        max_duality_gap: f64::from_bits(MAX_GAP.load(Ordering::Relaxed)),
        breakdowns: BREAKDOWNS.load(Ordering::Relaxed),
    }
}

/// How an original variable is expressed through standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + col`
    Shift { col: usize, offset: f64 },
    /// `x = offset - col`
    Mirror { col: usize, offset: f64 },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// Column with a `+1` entry usable as a starting basic variable, per row.
    start: Vec<Option<usize>>,
    /// `+1` or `-1`: the factor applied to original row `i` (rows beyond the
    /// original ones are bound rows).
    row_sign: Vec<f64>,
    map: Vec<VarMap>,
}

fn standardize(p: &LpProblem) -> StandardForm {
    let n = p.num_vars();
    let sense_sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    let mut map = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows = Vec::new();
    for j in 0..n {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        if lo.is_finite() {
            map.push(VarMap::Shift { col: ncols, offset: lo });
            if hi.is_finite() {
                bound_rows.push((ncols, hi - lo));
            }
            ncols += 1;
        } else if hi.is_finite() {
            map.push(VarMap::Mirror { col: ncols, offset: hi });
            ncols += 1;
        } else {
            map.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }

    let m_orig = p.rows.len();
    let m = m_orig + bound_rows.len();
    let n_slack = p.relations.iter().filter(|r| **r != Relation::Eq).count() + bound_rows.len();
    let total = ncols + n_slack;

    let mut c = vec![0.0; total];
    for (j, vm) in map.iter().enumerate() {
        let cj = sense_sign * p.objective[j];
        match *vm {
            VarMap::Shift { col, .. } => c[col] = cj,
            VarMap::Mirror { col, .. } => c[col] = -cj,
            VarMap::Split { pos, neg } => {
                c[pos] = cj;
                c[neg] = -cj;
            }
        }
    }

    let mut a = vec![vec![0.0; total]; m];
    let mut b = vec![0.0; m];
    let mut start = vec![None; m];
    let mut row_sign = vec![1.0; m];
    let mut next_slack = ncols;

    for i in 0..m_orig {
        let row = &mut a[i];
        let mut rhs = p.rhs[i];
        for (j, vm) in map.iter().enumerate() {
            let aij = p.rows[i][j];
            if aij == 0.0 {
                continue;
            }
            match *vm {
                VarMap::Shift { col, offset } => {
                    row[col] = aij;
                    rhs -= aij * offset;
                }
                VarMap::Mirror { col, offset } => {
                    row[col] = -aij;
                    rhs -= aij * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] = aij;
                    row[neg] = -aij;
                }
            }
        }
        let slack = match p.relations[i] {
            Relation::Le => Some((next_slack, 1.0)),
            Relation::Ge => Some((next_slack, -1.0)),
            Relation::Eq => None,
        };
        if let Some((col, coef)) = slack {
            row[col] = coef;
            next_slack += 1;
        }
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        if sign < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        if let Some((col, coef)) = slack {
            if coef * sign > 0.0 {
                start[i] = Some(col);
            }
        }
        b[i] = rhs;
        row_sign[i] = sign;
    }

    for (k, &(col, width)) in bound_rows.iter().enumerate() {
        let i = m_orig + k;
        a[i][col] = 1.0;
        let slack = next_slack;
        next_slack += 1;
        a[i][slack] = 1.0;
        if width >= 0.0 {
            b[i] = width;
            start[i] = Some(slack);
        } else {
            // Crossed bounds: keep the row, phase one will report infeasibility.
            a[i].iter_mut().for_each(|v| *v = -*v);
            b[i] = -width;
            row_sign[i] = -1.0;
        }
    }

    StandardForm { a, b, c, start, row_sign, map }
}

enum SimplexEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries; the last entry is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let piv = self.t[r][col];
        for v in self.t[r].iter_mut() {
            *v /= piv;
        }
        self.t[r][col] = 1.0;
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f == 0.0 {
                continue;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[col] = 0.0;
        }
        self.basis[r] = col;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb == 0.0 {
                continue;
            }
            for (dj, tij) in d.iter_mut().zip(&self.t[i][..self.ncols]) {
                *dj -= cb * tij;
            }
        }
        d
    }

    /// Primal simplex with Bland's rule over columns where `allowed` holds.
    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> Result<SimplexEnd, LpError> {
        for _ in 0..MAX_PIVOTS {
            let d = self.reduced_costs(cost);
            let scale = 1.0 + cost.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let entering = (0..self.ncols).find(|&j| allowed[j] && d[j] < -COST_TOL * scale);
            let Some(col) = entering else {
                return Ok(SimplexEnd::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let aij = self.t[i][col];
                if aij <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie {
                            Some((i, ratio))
                        } else if tie && self.basis[i] < self.basis[r] {
                            Some((i, best.min(ratio)))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(SimplexEnd::Unbounded),
                Some((r, _)) => self.pivot(r, col),
            }
        }
        Err(LpError::NumericalBreakdown(format!(
            "pivot limit of {MAX_PIVOTS} reached"
        )))
    }
}

/// LU factorization with partial pivoting of a square matrix.
struct Lu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<Vec<f64>>) -> Option<Lu> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
            if a[p][k].abs() <= 1e-13 * scale {
                return None;
            }
            a.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                a[i][k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i][j] -= f * a[k][j];
                    }
                }
            }
        }
        Some(Lu { lu: a, perm })
    }

    /// Solves `A x = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.lu[i][k] * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.lu[i][k] * y[k];
            }
            y[i] /= self.lu[i][i];
        }
        y
    }

    /// Solves `A^T x = b`.
    fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.len();
        // A = P^T L U  =>  A^T = U^T L^T P
        let mut z = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                z[i] -= self.lu[k][i] * z[k];
            }
            z[i] /= self.lu[i][i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                z[i] -= self.lu[k][i] * z[k];
            }
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }
}

/// `basis.len()` rows of `a` whose restriction to `basis` is nonsingular,
/// picked by partial-pivot elimination, in increasing order.
fn independent_rows(a: &[Vec<f64>], basis: &[usize]) -> Option<Vec<usize>> {
    let mut rows: Vec<(usize, Vec<f64>)> = a
        .iter()
        .enumerate()
        .map(|(i, r)| (i, basis.iter().map(|&j| r[j]).collect()))
        .collect();
    let scale = rows
        .iter()
        .flat_map(|(_, r)| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    for k in 0..basis.len() {
        let p = (k..rows.len()).max_by(|&i, &j| rows[i].1[k].abs().total_cmp(&rows[j].1[k].abs()))?;
        if rows[p].1[k].abs() <= 1e-11 * scale {
            return None;
        }
        rows.swap(k, p);
        let pivot = rows[k].1.clone();
        for (_, r) in rows.iter_mut().skip(k + 1) {
            let f = r[k] / pivot[k];
            if f != 0.0 {
                for (v, q) in r.iter_mut().zip(&pivot).skip(k) {
                    *v -= f * q;
                }
            }
        }
    }
    let mut kept: Vec<usize> = rows[..basis.len()].iter().map(|(i, _)| *i).collect();
    kept.sort_unstable();
    Some(kept)
}

fn mat_vec(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn mat_t_vec(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; n];
    for (r, yi) in rows.iter().zip(y) {
        for (o, a) in out.iter_mut().zip(r) {
            *o += a * yi;
        }
    }
    out
}

/// Solves `p`. Deterministic: identical inputs give identical outputs.
pub fn solve(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.validate()?;
    let result = solve_validated(p);
    if let Err(LpError::NumericalBreakdown(_)) = result {
        BREAKDOWNS.fetch_add(1, Ordering::Relaxed);
    }
    result
}

fn solve_validated(p: &LpProblem) -> Result<LpSolution, LpError> {
    let sf = standardize(p);
    let m = sf.a.len();
    let nstd = sf.c.len();

    // Artificial columns for rows without a usable starting slack.
    let needs_art: Vec<usize> = (0..m).filter(|&i| sf.start[i].is_none()).collect();
    let ncols = nstd + needs_art.len();
    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_iter = 0;
    for i in 0..m {
        let mut row = sf.a[i].clone();
        row.resize(ncols + 1, 0.0);
        row[ncols] = sf.b[i];
        match sf.start[i] {
            Some(col) => basis.push(col),
            None => {
                let col = nstd + art_iter;
                art_iter += 1;
                row[col] = 1.0;
                basis.push(col);
            }
        }
        t.push(row);
    }
    let mut tab = Tableau { t, basis, ncols };

    // Phase one.
    if !needs_art.is_empty() {
        let mut cost1 = vec![0.0; ncols];
        cost1[nstd..].iter_mut().for_each(|v| *v = 1.0);
        let allowed = vec![true; ncols];
        tab.run(&cost1, &allowed)?;
        let infeas: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= nstd)
            .map(|i| tab.rhs(i))
            .sum();
        let bscale = 1.0 + sf.b.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
        if infeas > 1e-9 * bscale {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
        }
        // Drive remaining artificials out; drop rows that are redundant.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= nstd {
                let col = (0..nstd).find(|&j| tab.t[i][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase two.
    let mut cost2 = sf.c.clone();
    cost2.resize(ncols, 0.0);
    let allowed: Vec<bool> = (0..ncols).map(|j| j < nstd).collect();
    if let SimplexEnd::Unbounded = tab.run(&cost2, &allowed)? {
        return Ok(LpSolution::non_optimal(LpStatus::Unbounded));
    }

    // Refactorize the final basis against the original standard-form data.
    // A dropped tableau row is a combination of original rows, so the rows to
    // keep are chosen afresh from the basis columns.
    let basis = tab.basis.clone();
    let kept_rows = independent_rows(&sf.a, &basis)
        .ok_or_else(|| LpError::NumericalBreakdown("singular final basis".into()))?;
    let bmat: Vec<Vec<f64>> = kept_rows
        .iter()
        .map(|&i| basis.iter().map(|&j| sf.a[i][j]).collect())
        .collect();
    let lu = Lu::factor(bmat.clone())
        .ok_or_else(|| LpError::NumericalBreakdown("singular final basis".into()))?;
    let b_kept: Vec<f64> = kept_rows.iter().map(|&i| sf.b[i]).collect();
    let mut xb = lu.solve(&b_kept);
    let r = mat_vec(&bmat, &xb);
    let corr = lu.solve(&r.iter().zip(&b_kept).map(|(ax, b)| b - ax).collect::<Vec<_>>());
    xb.iter_mut().zip(&corr).for_each(|(x, d)| *x += d);

    let cb: Vec<f64> = basis.iter().map(|&j| sf.c[j]).collect();
    let bt: Vec<Vec<f64>> = (0..basis.len())
        .map(|k| bmat.iter().map(|row| row[k]).collect())
        .collect();
    let mut ykept = lu.solve_transpose(&cb);
    let ry = mat_vec(&bt, &ykept);
    let ycorr = lu.solve_transpose(&ry.iter().zip(&cb).map(|(a, c)| c - a).collect::<Vec<_>>());
    ykept.iter_mut().zip(&ycorr).for_each(|(y, d)| *y += d);

    let mut xstd = vec![0.0; nstd];
    for (k, &j) in basis.iter().enumerate() {
        xstd[j] = xb[k].max(0.0);
    }
    let mut ystd = vec![0.0; m];
    for (k, &i) in kept_rows.iter().enumerate() {
        ystd[i] = ykept[k];
    }

    let x: Vec<f64> = sf
        .map
        .iter()
        .map(|vm| match *vm {
            VarMap::Shift { col, offset } => offset + xstd[col],
            VarMap::Mirror { col, offset } => offset - xstd[col],
            VarMap::Split { pos, neg } => xstd[pos] - xstd[neg],
        })
        .collect();

    let m_orig = p.rows.len();
    let y_min: Vec<f64> = (0..m_orig).map(|i| sf.row_sign[i] * ystd[i]).collect();
    let cert = certify(p, &x, &y_min);
    if cert.primal > PRIMAL_RESIDUAL_TOL || cert.dual > DUAL_RESIDUAL_TOL || cert.gap > DUALITY_GAP_TOL
    {
        return Err(LpError::NumericalBreakdown(format!(
            "certificate failed: primal residual {:e}, dual residual {:e}, gap {:e}",
            cert.primal, cert.dual, cert.gap
        )));
    }

    OPTIMAL_SOLVES.fetch_add(1, Ordering::Relaxed);
    record_max(&MAX_PRIMAL, cert.primal);
    record_max(&MAX_DUAL, cert.dual);
    record_max(&MAX_GAP, cert.gap);

    let sense_sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let objective: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        duals: y_min.iter().map(|y| sense_sign * y).collect(),
        primal_residual: cert.primal,
        dual_residual: cert.dual,
        duality_gap: cert.gap,
    })
}

struct Certificate {
    primal: f64,
    dual: f64,
    gap: f64,
}

/// Residuals of `(x, y)` for `p` written as a minimization; `y` uses the
/// minimization sign convention (`<=` rows nonpositive, `>=` rows
/// nonnegative).
fn certify(p: &LpProblem, x: &[f64], y: &[f64]) -> Certificate {
    let sense_sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let c: Vec<f64> = p.objective.iter().map(|v| sense_sign * v).collect();

    let ax = mat_vec(&p.rows, x);
    let mut primal = 0.0f64;
    for i in 0..p.rows.len() {
        let viol = match p.relations[i] {
            Relation::Le => (ax[i] - p.rhs[i]).max(0.0),
            Relation::Ge => (p.rhs[i] - ax[i]).max(0.0),
            Relation::Eq => (ax[i] - p.rhs[i]).abs(),
        };
        primal = primal.max(viol);
    }
    for j in 0..x.len() {
        primal = primal
            .max((p.lower[j] - x[j]).max(0.0))
            .max((x[j] - p.upper[j]).max(0.0));
    }

    let mut dual = 0.0f64;
    for (i, rel) in p.relations.iter().enumerate() {
        let viol = match rel {
            Relation::Le => y[i].max(0.0),
            Relation::Ge => (-y[i]).max(0.0),
            Relation::Eq => 0.0,
        };
        dual = dual.max(viol);
    }
    let aty = mat_t_vec(&p.rows, y);
    let mut dual_obj: f64 = p.rhs.iter().zip(y).map(|(b, v)| b * v).sum();
    for j in 0..x.len() {
        let d = c[j] - aty.get(j).copied().unwrap_or(0.0);
        if d > 0.0 {
            if p.lower[j].is_finite() {
                dual_obj += p.lower[j] * d;
            } else {
                dual = dual.max(d);
            }
        } else if d < 0.0 {
            if p.upper[j].is_finite() {
                dual_obj += p.upper[j] * d;
            } else {
                dual = dual.max(-d);
            }
        }
    }
    let primal_obj: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
    Certificate {
        primal,
        dual,
        gap: (primal_obj - dual_obj).abs(),
    }
}
