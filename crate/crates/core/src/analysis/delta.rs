//! Brute-force `Δ = max |(B⁻¹)_{jk}|` over nonsingular square submatrices `B` of the primal
//! constraint matrix, and the resulting a-priori bound on `κ`.

use super::program::NsProgram;
use crate::error::{Error, Result};
use crate::game::Game;

/// Largest primal variable count accepted by [`dual_solution_bound`].
pub const MAX_COLUMNS: usize = 12;
/// Largest number of square submatrices enumerated.
pub const MAX_SUBMATRICES: u64 = 3_000_000;

const SINGULAR_TOL: f64 = 1e-12;

/// Inverse by Gauss-Jordan with partial pivoting, or `None` when singular.
fn invert(mut a: Vec<f64>, k: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs()))?;
        if a[piv * k + col].abs() < SINGULAR_TOL {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        let p = a[col * k + col];
        for j in 0..k {
            a[col * k + j] /= p;
            inv[col * k + j] /= p;
        }
        for r in 0..k {
            if r != col {
                let f = a[r * k + col];
                if f != 0.0 {
                    for j in 0..k {
                        a[r * k + j] -= f * a[col * k + j];
                        inv[r * k + j] -= f * inv[col * k + j];
                    }
                }
            }
        }
    }
    Some(inv)
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u64) / (i + 1) as u64;
    }
    r
}

/// Advances `idx` to the next `k`-combination of `0..n`; false when exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `Δ` over all nonsingular square submatrices of `rows` (each of length `cols`).
pub fn max_inverse_entry(rows: &[Vec<f64>], cols: usize) -> Result<f64> {
    let r1 = rows.len();
    let total: u64 = (1..=r1.min(cols))
        .map(|k| binomial(r1, k).saturating_mul(binomial(cols, k)))
        .fold(0u64, |a, b| a.saturating_add(b));
    if total > MAX_SUBMATRICES {
        return Err(Error::SizeLimit(format!(
            "{total} square submatrices of a {r1}×{cols} matrix exceed the limit {MAX_SUBMATRICES}"
        )));
    }
    let mut best: f64 = 0.0;
    for k in 1..=r1.min(cols) {
        let mut ri: Vec<usize> = (0..k).collect();
        loop {
            let mut ci: Vec<usize> = (0..k).collect();
            loop {
                let mut sub = Vec::with_capacity(k * k);
                for &r in &ri {
                    for &c in &ci {
                        sub.push(rows[r][c]);
                    }
                }
                if let Some(inv) = invert(sub, k) {
                    best = inv.iter().fold(best, |m, v| m.max(v.abs()));
                }
                if !next_combination(&mut ci, cols) {
                    break;
                }
            }
            if !next_combination(&mut ri, r1) {
                break;
            }
        }
    }
    Ok(best)
}

/// Rows of the relaxed primal as `Ax ≤ b`: signalling rows, normalization as two opposite
/// inequalities, and `−O ≤ 0`. Zero rows and rows equal up to sign are dropped; neither
/// changes the set of `|B⁻¹|` values.
fn constraint_rows(program: &NsProgram) -> Vec<Vec<f64>> {
    let lp = program.primal(true);
    let n = lp.num_vars();
    let mut rows: Vec<Vec<f64>> = lp.ineq_matrix.clone();
    rows.extend(lp.eq_matrix.iter().cloned());
    for j in 0..n {
        let mut r = vec![0.0; n];
        r[j] = -1.0;
        rows.push(r);
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        if r.iter().all(|&v| v == 0.0) {
            continue;
        }
        let dup = out.iter().any(|o| {
            o.iter().zip(&r).all(|(x, y)| (x - y).abs() < 1e-15)
                || o.iter().zip(&r).all(|(x, y)| (x + y).abs() < 1e-15)
        });
        if !dup {
            out.push(r);
        }
    }
    out
}

/// `r₂ · Δ · Σ_j |c_j|`, an upper bound on `κ` for a basic optimal dual.
pub fn dual_solution_bound(game: &Game) -> Result<f64> {
    let program = NsProgram::standard(game);
    let lp = program.primal(true);
    let r2 = lp.num_vars();
    if r2 > MAX_COLUMNS {
        return Err(Error::SizeLimit(format!(
            "primal has {r2} variables, brute force is limited to {MAX_COLUMNS}"
        )));
    }
    let delta = max_inverse_entry(&constraint_rows(&program), r2)?;
    let c1: f64 = lp.objective.iter().map(|c| c.abs()).sum();
    Ok(r2 as f64 * delta * c1)
}
