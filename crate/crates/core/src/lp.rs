//! Dense two-phase simplex with dual extraction.
//!
//! Programs are stated as `maximize c·x` subject to `Ax ≤ b`, `Ex = g` and `x_j ≥ 0` for
//! the variables flagged in `nonneg`. Free variables are split as `x⁺ − x⁻`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_FEAS_TOL: f64 = 1e-9;
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;
const PERTURBATION: f64 = 1e-7;
const RESTORE_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ineq_matrix: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub nonneg: Vec<bool>,
}

impl LinearProgram {
    /// A program over `n` nonnegative variables with a zero objective and no rows.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            ineq_matrix: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            nonneg: vec![true; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_ineq(&mut self, row: Vec<f64>, rhs: f64) -> usize {
        self.ineq_matrix.push(row);
        self.ineq_rhs.push(rhs);
        self.ineq_rhs.len() - 1
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> usize {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
        self.eq_rhs.len() - 1
    }

    pub fn set_free(&mut self, var: usize) {
        self.nonneg[var] = false;
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |m: String| Err(Error::MalformedProgram(m));
        if self.nonneg.len() != n {
            return bad(format!("nonneg mask has {} entries, expected {n}", self.nonneg.len()));
        }
        if self.ineq_matrix.len() != self.ineq_rhs.len() || self.eq_matrix.len() != self.eq_rhs.len() {
            return bad("row count differs from right-hand side length".into());
        }
        if !self.objective.iter().all(|v| v.is_finite()) {
            return bad("non-finite objective coefficient".into());
        }
        for (kind, rows, rhs) in [
            ("inequality", &self.ineq_matrix, &self.ineq_rhs),
            ("equality", &self.eq_matrix, &self.eq_rhs),
        ] {
            for (k, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return bad(format!("{kind} row {k} has {} columns, expected {n}", row.len()));
                }
                if !row.iter().all(|v| v.is_finite()) || !rhs[k].is_finite() {
                    return bad(format!("{kind} row {k} has a non-finite entry"));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint at `x`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, b) in self.ineq_matrix.iter().zip(&self.ineq_rhs) {
            worst = worst.max(dot(row, x) - b);
        }
        for (row, g) in self.eq_matrix.iter().zip(&self.eq_rhs) {
            worst = worst.max((dot(row, x) - g).abs());
        }
        for (v, &nn) in x.iter().zip(&self.nonneg) {
            if nn {
                worst = worst.max(-v);
            }
        }
        worst
    }

    /// Largest violation of the dual constraints `Aᵀy + Eᵀw ≥ c` (with equality on free
    /// columns) and of `y ≥ 0`.
    pub fn dual_residual(&self, y: &[f64], w: &[f64]) -> f64 {
        let mut worst: f64 = y.iter().fold(0.0, |m, v| m.max(-v));
        for j in 0..self.num_vars() {
            let mut s = -self.objective[j];
            for (row, yk) in self.ineq_matrix.iter().zip(y) {
                s += row[j] * yk;
            }
            for (row, wk) in self.eq_matrix.iter().zip(w) {
                s += row[j] * wk;
            }
            worst = worst.max(if self.nonneg[j] { -s } else { s.abs() });
        }
        worst
    }

    pub fn dual_objective(&self, y: &[f64], w: &[f64]) -> f64 {
        dot(&self.ineq_rhs, y) + dot(&self.eq_rhs, w)
    }

    /// Plain-text dump, one row per line.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |f: &mut fmt::Formatter<'_>, r: &[f64]| -> fmt::Result {
            for v in r {
                write!(f, " {v:>10.6}")?;
            }
            Ok(())
        };
        write!(f, "max ")?;
        row(f, &self.objective)?;
        writeln!(f)?;
        for (k, (r, b)) in self.ineq_matrix.iter().zip(&self.ineq_rhs).enumerate() {
            write!(f, "le{k:<3}")?;
            row(f, r)?;
            writeln!(f, " <= {b}")?;
        }
        for (k, (r, g)) in self.eq_matrix.iter().zip(&self.eq_rhs).enumerate() {
            write!(f, "eq{k:<3}")?;
            row(f, r)?;
            writeln!(f, " == {g}")?;
        }
        write!(f, "free")?;
        for (j, nn) in self.nonneg.iter().enumerate() {
            if !nn {
                write!(f, " x{j}")?;
            }
        }
        writeln!(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective_value: f64,
    pub duals_ineq: Vec<f64>,
    pub duals_eq: Vec<f64>,
}

impl LpSolution {
    fn without_optimum(status: LpStatus, lp: &LinearProgram) -> Self {
        Self {
            status,
            primal: vec![0.0; lp.num_vars()],
            objective_value: match status {
                LpStatus::Unbounded => f64::INFINITY,
                _ => f64::NEG_INFINITY,
            },
            duals_ineq: vec![0.0; lp.ineq_rhs.len()],
            duals_eq: vec![0.0; lp.eq_rhs.len()],
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variables. Never cycles.
    #[default]
    Bland,
    /// Most positive reduced cost, switching to Bland after a run of degenerate pivots.
    Dantzig,
}

/// Solves with Bland's rule.
pub fn solve(lp: &LinearProgram, feas_tol: f64, gap_tol: f64) -> Result<LpSolution> {
    solve_with_rule(lp, feas_tol, gap_tol, PivotRule::Dantzig)
}

pub fn solve_with_rule(lp: &LinearProgram, feas_tol: f64, gap_tol: f64, rule: PivotRule) -> Result<LpSolution> {
    lp.validate()?;
    let keep = independent_rows(&lp.eq_matrix, &lp.eq_rhs);
    let reduced;
    let work = if keep.len() == lp.eq_rhs.len() {
        lp
    } else {
        let mut r = lp.clone();
        r.eq_matrix = keep.iter().map(|&k| lp.eq_matrix[k].clone()).collect();
        r.eq_rhs = keep.iter().map(|&k| lp.eq_rhs[k]).collect();
        reduced = r;
        &reduced
    };
    let mut sol = match run_simplex(work, feas_tol, gap_tol, rule, true) {
        Ok(sol) => sol,
        Err(_) => run_simplex(work, feas_tol, gap_tol, rule, false)?,
    };
    if keep.len() != lp.eq_rhs.len() {
        let mut duals = vec![0.0; lp.eq_rhs.len()];
        for (&k, &w) in keep.iter().zip(&sol.duals_eq) {
            duals[k] = w;
        }
        sol.duals_eq = duals;
        if !sol.is_optimal() {
            return Ok(LpSolution::without_optimum(sol.status, lp));
        }
        if lp.primal_residual(&sol.primal) > feas_tol {
            return Err(Error::Solver("numerically inaccurate (primal residual)"));
        }
    }
    Ok(sol)
}

/// Indices of a maximal set of linearly independent equality rows. A dependent row whose
/// right-hand side disagrees with the combination is kept, so that phase 1 reports infeasibility.
fn independent_rows(rows: &[Vec<f64>], rhs: &[f64]) -> Vec<usize> {
    const RANK_TOL: f64 = 1e-9;
    let n = rows.first().map_or(0, Vec::len);
    // Reduced copies of the kept rows, each with its pivot column.
    let mut basis: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut keep = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let mut v: Vec<f64> = row.iter().copied().chain([rhs[k]]).collect();
        for (pc, b) in &basis {
            let f = v[*pc];
            if f != 0.0 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= f * y;
                }
            }
        }
        let scale = row.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        let pivot = (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()));
        match pivot {
            Some(pc) if v[pc].abs() > RANK_TOL * scale => {
                let p = v[pc];
                v.iter_mut().for_each(|x| *x /= p);
                basis.push((pc, v));
                keep.push(k);
            }
            _ if v[n].abs() > RANK_TOL * (1.0 + rhs[k].abs()) => keep.push(k),
            _ => {}
        }
    }
    keep
}

/// With `perturb`, every non-artificial column is shifted by a small positive amount, which moves
/// the right-hand side to `b + Aδ`. The shifted program stays feasible whenever the original is,
/// has far fewer degenerate vertices, and its optimal basis is repaired for `b` by dual simplex.
fn run_simplex(lp: &LinearProgram, feas_tol: f64, gap_tol: f64, rule: PivotRule, perturb: bool) -> Result<LpSolution> {
    let mut tab = Tableau::build(lp, perturb);
    if !tab.phase_one(feas_tol, rule)? {
        return Ok(LpSolution::without_optimum(LpStatus::Infeasible, lp));
    }
    if !tab.phase_two(&lp.objective, rule)? {
        return Ok(LpSolution::without_optimum(LpStatus::Unbounded, lp));
    }
    if perturb && !tab.restore_rhs() {
        return Err(Error::Solver("could not restore the unperturbed right-hand side"));
    }
    let sol = tab.extract(lp);
    let residual = lp.primal_residual(&sol.primal);
    if residual > feas_tol {
        return Err(Error::Solver("numerically inaccurate (primal residual)"));
    }
    let dual_gap = (lp.dual_objective(&sol.duals_ineq, &sol.duals_eq) - sol.objective_value).abs();
    if dual_gap > gap_tol {
        return Err(Error::Solver("numerically inaccurate (duality gap)"));
    }
    Ok(sol)
}

/// Solves `lp`, then re-optimizes `secondary` over the face `c·x ≥ opt − gap_tol`.
///
/// The returned primal point and objective value come from the second stage; the duals are
/// those of the first stage and certify the primary optimum.
pub fn solve_with_secondary(
    lp: &LinearProgram,
    secondary: &[f64],
    sense: Sense,
    feas_tol: f64,
    gap_tol: f64,
) -> Result<LpSolution> {
    if secondary.len() != lp.num_vars() {
        return Err(Error::MalformedProgram(format!(
            "secondary objective has {} entries, expected {}",
            secondary.len(),
            lp.num_vars()
        )));
    }
    let first = solve(lp, feas_tol, gap_tol)?;
    if !first.is_optimal() {
        return Ok(first);
    }
    let mut stage = lp.clone();
    stage.add_ineq(
        lp.objective.iter().map(|c| -c).collect(),
        -(first.objective_value - gap_tol),
    );
    stage.objective = match sense {
        Sense::Maximize => secondary.to_vec(),
        Sense::Minimize => secondary.iter().map(|c| -c).collect(),
    };
    let second = solve(&stage, feas_tol, gap_tol)?;
    if !second.is_optimal() {
        return Err(Error::Solver("secondary stage failed on the optimal face"));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: dot(&lp.objective, &second.primal),
        primal: second.primal,
        duals_ineq: first.duals_ineq,
        duals_eq: first.duals_eq,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column roles in the standard-form tableau.
struct Tableau {
    m: usize,
    /// Columns excluding the right-hand side.
    cols: usize,
    /// Row-major `m × (cols + 2)`; column `cols` is the working right-hand side and column
    /// `cols + 1` the unperturbed one.
    t: Vec<f64>,
    /// Reduced costs `c_j − c_B B⁻¹ A_j` (entry `cols` is `−objective`).
    d: Vec<f64>,
    basis: Vec<usize>,
    /// For each structural column: (original variable, sign).
    structural: Vec<(usize, f64)>,
    /// First artificial column; columns at or beyond are never allowed to enter in phase 2.
    art_start: usize,
    /// Column whose original coefficient vector is `e_k` for row `k`.
    unit_col: Vec<usize>,
    /// `±1`: whether row `k` was negated to make its right-hand side nonnegative.
    row_sign: Vec<f64>,
    n_ineq: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram, perturb: bool) -> Self {
        let n_ineq = lp.ineq_rhs.len();
        let m = n_ineq + lp.eq_rhs.len();
        let mut structural = Vec::new();
        for (j, &nn) in lp.nonneg.iter().enumerate() {
            structural.push((j, 1.0));
            if !nn {
                structural.push((j, -1.0));
            }
        }
        let ns = structural.len();
        let rhs = |k: usize| if k < n_ineq { lp.ineq_rhs[k] } else { lp.eq_rhs[k - n_ineq] };
        // Deterministic spread in [0.5, 1) so that no two columns tie.
        let shift = |c: usize| {
            if perturb {
                PERTURBATION * (0.5 + ((c as u64).wrapping_mul(2_654_435_761) % 1000) as f64 / 2000.0)
            } else {
                0.0
            }
        };
        let working = |k: usize| {
            let row = if k < n_ineq { &lp.ineq_matrix[k] } else { &lp.eq_matrix[k - n_ineq] };
            let moved: f64 = structural.iter().enumerate().map(|(c, &(j, sign))| sign * row[j] * shift(c)).sum();
            let slack = if k < n_ineq { shift(ns + k) } else { 0.0 };
            rhs(k) + moved + slack
        };
        let row_sign: Vec<f64> = (0..m).map(|k| if working(k) < 0.0 { -1.0 } else { 1.0 }).collect();
        // Rows needing an artificial: equalities and negated inequalities.
        let needs_art: Vec<bool> = (0..m).map(|k| k >= n_ineq || row_sign[k] < 0.0).collect();
        let art_start = ns + n_ineq;
        let mut art_col = vec![usize::MAX; m];
        let mut next = art_start;
        for k in 0..m {
            if needs_art[k] {
                art_col[k] = next;
                next += 1;
            }
        }
        let cols = next;
        let w = cols + 2;
        let mut t = vec![0.0; m * w];
        let mut basis = vec![0; m];
        let mut unit_col = vec![0; m];
        for k in 0..m {
            let row = if k < n_ineq { &lp.ineq_matrix[k] } else { &lp.eq_matrix[k - n_ineq] };
            let s = row_sign[k];
            let r = &mut t[k * w..(k + 1) * w];
            for (c, &(j, sign)) in structural.iter().enumerate() {
                r[c] = s * sign * row[j];
            }
            if k < n_ineq {
                r[ns + k] = s;
            }
            r[cols] = s * working(k);
            r[cols + 1] = s * rhs(k);
            if needs_art[k] {
                r[art_col[k]] = 1.0;
                basis[k] = art_col[k];
                unit_col[k] = art_col[k];
            } else {
                basis[k] = ns + k;
                unit_col[k] = ns + k;
            }
        }
        Self {
            m,
            cols,
            t,
            d: vec![0.0; w],
            basis,
            structural,
            art_start,
            unit_col,
            row_sign,
            n_ineq,
        }
    }

    fn width(&self) -> usize {
        self.cols + 2
    }

    /// Sets reduced costs for the column costs `cost` given the current basis.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width();
        self.d[..self.cols].copy_from_slice(cost);
        self.d[self.cols..].fill(0.0);
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r * w..(r + 1) * w];
                for (dj, tj) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tj;
                }
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let piv = self.t[pr * w + pc];
        {
            let row = &mut self.t[pr * w..(pr + 1) * w];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[pc] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[pc] = 0.0;
            }
        }
        let f = self.d[pc];
        if f != 0.0 {
            for (v, p) in self.d.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            self.d[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Minimum-ratio test. Near-ties go to the lowest basis index under Bland's rule and to the
    /// largest pivot element otherwise.
    fn ratio_test(&self, pc: usize, bland: bool) -> Option<(usize, f64)> {
        let w = self.width();
        let col = |r: usize| self.t[r * w + pc];
        let rhs = |r: usize| self.t[r * w + self.cols].max(0.0);
        let min = (0..self.m)
            .filter(|&r| col(r) > PIVOT_TOL)
            .map(|r| rhs(r) / col(r))
            .fold(f64::INFINITY, f64::min);
        if min.is_infinite() {
            return None;
        }
        let bound = min + TIE_TOL * (1.0 + min);
        let mut best: Option<usize> = None;
        for r in 0..self.m {
            let a = col(r);
            if a > PIVOT_TOL && rhs(r) / a <= bound {
                best = match best {
                    Some(b) if bland && self.basis[b] < self.basis[r] => Some(b),
                    Some(b) if !bland && (col(b) > a || col(b) == a && self.basis[b] < self.basis[r]) => Some(b),
                    _ => Some(r),
                };
            }
        }
        best.map(|r| (r, rhs(r) / col(r)))
    }

    /// Runs simplex iterations on the current reduced costs. Returns `false` if unbounded.
    fn iterate(&mut self, enter_limit: usize, rule: PivotRule) -> Result<bool> {
        let max_iter = 50_000 + 50 * (self.m + self.cols);
        let mut degenerate_run = 0usize;
        for _ in 0..max_iter {
            let use_bland = rule == PivotRule::Bland || degenerate_run > 50;
            let entering = if use_bland {
                (0..enter_limit).find(|&j| self.d[j] > COST_TOL)
            } else {
                let mut best = None;
                let mut best_d = COST_TOL;
                for j in 0..enter_limit {
                    if self.d[j] > best_d {
                        best_d = self.d[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(pc) = entering else {
                return Ok(true);
            };
            let Some((pr, ratio)) = self.ratio_test(pc, use_bland) else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(pr, pc);
        }
        Err(Error::Solver("iteration limit reached"))
    }

    /// Returns `false` if the program is infeasible.
    fn phase_one(&mut self, feas_tol: f64, rule: PivotRule) -> Result<bool> {
        if self.art_start == self.cols {
            return Ok(true);
        }
        let mut cost = vec![0.0; self.cols];
        for c in cost.iter_mut().skip(self.art_start) {
            *c = -1.0;
        }
        self.price(&cost);
        self.iterate(self.cols, rule)?;
        let w = self.width();
        let infeasibility: f64 = (0..self.m)
            .filter(|&r| self.basis[r] >= self.art_start)
            .map(|r| self.t[r * w + self.cols])
            .sum();
        if infeasibility > feas_tol {
            return Ok(false);
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..self.m {
            if self.basis[r] < self.art_start {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.art_start {
                let a = self.t[r * w + j].abs();
                if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(r, j);
            }
        }
        Ok(true)
    }

    fn phase_two(&mut self, objective: &[f64], rule: PivotRule) -> Result<bool> {
        let cost: Vec<f64> = (0..self.cols)
            .map(|c| match self.structural.get(c) {
                Some(&(j, s)) => s * objective[j],
                None => 0.0,
            })
            .collect();
        self.price(&cost);
        self.iterate(self.art_start, rule)
    }

    /// Dual simplex on the unperturbed right-hand side. Reduced costs stay optimal throughout.
    fn restore_rhs(&mut self) -> bool {
        let w = self.width();
        let b = self.cols + 1;
        let is_basic = {
            let mut v = vec![false; self.cols];
            for &j in &self.basis {
                v[j] = true;
            }
            v
        };
        let mut is_basic = is_basic;
        for _ in 0..10 * (self.m + self.cols) {
            let leaving = (0..self.m)
                .filter(|&r| self.basis[r] < self.art_start && self.t[r * w + b] < -RESTORE_TOL)
                .min_by(|&x, &y| self.t[x * w + b].total_cmp(&self.t[y * w + b]));
            let Some(pr) = leaving else {
                for r in 0..self.m {
                    let v = self.t[r * w + b];
                    self.t[r * w + self.cols] = v.max(0.0);
                }
                return true;
            };
            let mut best: Option<(usize, f64, f64)> = None;
            for j in 0..self.art_start {
                let a = self.t[pr * w + j];
                if is_basic[j] || a >= -PIVOT_TOL {
                    continue;
                }
                let ratio = (-self.d[j]).max(0.0) / -a;
                best = match best {
                    Some((_, br, ba)) if br < ratio || br == ratio && ba >= -a => best,
                    _ => Some((j, ratio, -a)),
                };
            }
            let Some((pc, _, _)) = best else {
                return false;
            };
            is_basic[self.basis[pr]] = false;
            is_basic[pc] = true;
            self.pivot(pr, pc);
        }
        false
    }

    fn extract(&self, lp: &LinearProgram) -> LpSolution {
        let w = self.width();
        let mut primal = vec![0.0; lp.num_vars()];
        for r in 0..self.m {
            if let Some(&(j, s)) = self.structural.get(self.basis[r]) {
                primal[j] += s * self.t[r * w + self.cols + 1];
            }
        }
        let dual = |k: usize| -self.d[self.unit_col[k]] * self.row_sign[k];
        LpSolution {
            status: LpStatus::Optimal,
            objective_value: dot(&lp.objective, &primal),
            primal,
            duals_ineq: (0..self.n_ineq).map(dual).collect(),
            duals_eq: (self.n_ineq..self.m).map(dual).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(lp: &LinearProgram) -> LpSolution {
        solve(lp, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL).unwrap()
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.add_ineq(vec![1.0], 1.0);
        let s = run(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-12);
        assert!((s.duals_ineq[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_variable_vertex() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_ineq(vec![1.0, 1.0], 1.0);
        lp.add_ineq(vec![1.0, 0.0], 0.3);
        let s = run(&lp);
        assert!((s.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.add_ineq(vec![1.0], -1.0);
        assert_eq!(run(&lp).status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.add_ineq(vec![-1.0], 0.0);
        assert_eq!(run(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_and_equalities() {
        // max -z s.t. z ≥ x - 2, x = 5, z free  →  z = 3.
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![0.0, -1.0];
        lp.set_free(1);
        lp.add_ineq(vec![1.0, -1.0], 2.0);
        lp.add_eq(vec![1.0, 0.0], 5.0);
        let s = run(&lp);
        assert!((s.primal[1] - 3.0).abs() < 1e-12);
        assert!((s.objective_value + 3.0).abs() < 1e-12);
        assert!(lp.dual_residual(&s.duals_ineq, &s.duals_eq) < 1e-12);
    }

    #[test]
    fn negative_right_hand_side() {
        // max -x s.t. -x ≤ -2  →  x = 2, dual 1.
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![-1.0];
        lp.add_ineq(vec![-1.0], -2.0);
        let s = run(&lp);
        assert!((s.primal[0] - 2.0).abs() < 1e-12);
        assert!((s.duals_ineq[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 2.0];
        lp.add_eq(vec![1.0, 1.0], 1.0);
        lp.add_eq(vec![2.0, 2.0], 2.0);
        let s = run(&lp);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
        assert!(lp.dual_residual(&s.duals_ineq, &s.duals_eq) < 1e-12);

        lp.add_eq(vec![3.0, 3.0], 4.0);
        assert_eq!(run(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_vertex_both_rules() {
        // Simplex over x ≥ 0, Σx ≤ 1 with many zero-right-hand-side rows through the optimum.
        let n = 12;
        let mut lp = LinearProgram::new(n);
        lp.objective = (0..n).map(|j| 1.0 + j as f64 / n as f64).collect();
        lp.add_ineq(vec![1.0; n], 1.0);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                if i != j {
                    let mut row = vec![0.0; n];
                    row[i] = 1.0;
                    row[j] = -1.0;
                    lp.add_ineq(row, 0.0);
                }
            }
        }
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            let s = solve_with_rule(&lp, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL, rule).unwrap();
            assert!((s.objective_value - (2.0 - 1.0 / n as f64)).abs() < 1e-10, "{rule:?}");
        }
    }

    #[test]
    fn secondary_objective_selects_on_face() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(vec![1.0, 1.0], 1.0);
        let s = solve_with_secondary(&lp, &[1.0, 0.0], Sense::Minimize, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL)
            .unwrap();
        assert!(s.primal[0].abs() < 1e-12);
        assert!((s.primal[1] - 1.0).abs() < 1e-12);
        let s = solve_with_secondary(&lp, &[1.0, 0.0], Sense::Maximize, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL)
            .unwrap();
        assert!((s.primal[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_input_is_rejected() {
        let mut lp = LinearProgram::new(2);
        lp.add_ineq(vec![1.0], 1.0);
        assert!(matches!(
            solve(&lp, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL),
            Err(Error::MalformedProgram(_))
        ));
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![f64::NAN];
        assert!(solve(&lp, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL).is_err());
    }

    #[test]
    fn text_dump_lists_rows() {
        let mut lp = LinearProgram::new(2);
        lp.set_free(1);
        lp.add_ineq(vec![1.0, 1.0], 1.0);
        lp.add_eq(vec![1.0, -1.0], 0.0);
        let text = lp.to_text();
        assert!(text.contains("le0"));
        assert!(text.contains("eq0"));
        assert!(text.contains("free x1"));
    }
}
