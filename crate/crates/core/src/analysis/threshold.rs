//! Constants of the threshold theorem and the parameter feasibility check.
//!
//! Anything that can overflow is carried as a natural logarithm. Linear values are exposed
//! only below [`LINEAR_LIMIT`].

use serde::{Deserialize, Serialize};

use super::program::{kappa, ns_value, test_count_d};
use crate::error::{Error, Result};
use crate::game::Game;

pub const LINEAR_LIMIT: f64 = 1e300;

/// `exp(ln)` when it is below [`LINEAR_LIMIT`].
pub fn linear(ln: f64) -> Option<f64> {
    let v = ln.exp();
    (v < LINEAR_LIMIT).then_some(v)
}

/// `ln δ(l, ε) = (P − 1) ln(l + 1) − l ε² / 2` with `P = alphabet_product`.
pub fn ln_sanov_delta(l: u64, epsilon: f64, alphabet_product: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let l = l as f64;
    Ok((alphabet_product as f64 - 1.0) * (l + 1.0).ln() - l * epsilon * epsilon / 2.0)
}

/// `δ(l, ε)`, or `None` when it exceeds [`LINEAR_LIMIT`].
pub fn sanov_delta(l: u64, epsilon: f64, alphabet_product: usize) -> Result<Option<f64>> {
    Ok(linear(ln_sanov_delta(l, epsilon, alphabet_product)?))
}

/// `ln c = |Q| (|A| − 1) ln(n + 1)`.
pub fn ln_definetti_c(n: u64, q_count: usize, a_count: usize) -> f64 {
    if a_count <= 1 {
        return 0.0;
    }
    (q_count * (a_count - 1)) as f64 * (n as f64 + 1.0).ln()
}

/// `c`, or `None` when it exceeds [`LINEAR_LIMIT`]. Exact when the power is representable.
pub fn definetti_c(n: u64, q_count: usize, a_count: usize) -> Option<f64> {
    linear(ln_definetti_c(n, q_count, a_count))?;
    let exp = q_count * a_count.saturating_sub(1);
    Some((n as f64 + 1.0).powi(exp as i32))
}

/// The test's `δ = δ(n/2, ε)` for a game with `|Q||A| = product`.
pub fn ln_test_delta(n: u64, epsilon: f64, product: usize) -> Result<f64> {
    ln_sanov_delta((n / 2).max(1), epsilon, product)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParameters {
    pub epsilon: f64,
    pub zeta: f64,
    pub nu: f64,
    pub beta: f64,
    pub n: u64,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub ln_delta: f64,
    pub ln_c: f64,
    pub d: usize,
    pub kappa: f64,
    #[serde(rename = "W_ns")]
    pub w_ns: f64,
}

impl ThresholdParameters {
    /// Fills in `δ`, `c`, `d` and `W_ns` from the game.
    pub fn new(game: &Game, epsilon: f64, zeta: f64, nu: f64, beta: f64, n: u64, kappa: f64) -> Result<Self> {
        let product = game.question_count() * game.answer_count();
        let ln_delta = ln_test_delta(n, epsilon, product)?;
        let ln_c = ln_definetti_c(n, game.question_count(), game.answer_count());
        Ok(Self {
            epsilon,
            zeta,
            nu,
            beta,
            n,
            delta: linear(ln_delta),
            c: linear(ln_c),
            ln_delta,
            ln_c,
            d: test_count_d(game)?,
            kappa,
            w_ns: game.max_conditional(),
        })
    }

    /// `ε = β/(10κ)`, `ζ = 8ε`, `ν = ε`.
    pub fn default_choice(game: &Game, beta: f64, n: u64, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidParameter("default choice needs kappa > 0".into()));
        }
        let eps = beta / (10.0 * kappa);
        Self::new(game, eps, 8.0 * eps, eps, beta, n, kappa)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterCheck {
    pub name: String,
    pub passed: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed slack; negative when violated.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterReport {
    pub all_passed: bool,
    pub checks: Vec<ParameterCheck>,
}

impl ParameterReport {
    pub fn get(&self, name: &str) -> Option<&ParameterCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

pub mod names {
    pub const BETA_POSITIVE: &str = "beta > 0";
    pub const EPSILON_POSITIVE: &str = "epsilon > 0";
    pub const EPSILON_MIN_Q: &str = "epsilon <= min_q Q(q)";
    pub const ZETA_LOWER: &str = "7 epsilon <= zeta";
    pub const ZETA_UPPER: &str = "zeta <= 1";
    pub const ZETA_KAPPA: &str = "zeta + 2 epsilon <= beta / kappa";
    pub const NU_LOWER: &str = "nu > 2 c delta / (1 - 2 c delta) * W_ns";
    pub const NU_UPPER: &str = "nu < zeta - 6 epsilon";
    pub const DELTA_FORMULA: &str = "delta = (n/2 + 1)^(|A||Q| - 1) exp(-n epsilon^2 / 4)";
    pub const C_FORMULA: &str = "c = (n + 1)^(|Q|(|A| - 1))";
    pub const N_EVEN: &str = "n even";
    pub const D_BOUND: &str = "d < m |Q| |A|";
    pub const REPETITIONS_EPSILON: &str = "n / ln n > 20 |Q||A| ln(2/epsilon) / epsilon^2";
    pub const REPETITIONS_BETA: &str = "n / ln n > 20 |Q||A| ln(20 kappa/beta) / (beta/(10 kappa))^2";
}

/// Non-strict, with a few ulps of slack so boundary choices such as `ζ + 2ε = β/κ` pass.
fn le(name: &str, lhs: f64, rhs: f64) -> ParameterCheck {
    ParameterCheck {
        name: name.into(),
        passed: lhs <= rhs + 4.0 * f64::EPSILON * lhs.abs().max(rhs.abs()),
        lhs,
        rhs,
        margin: rhs - lhs,
    }
}

fn lt(name: &str, lhs: f64, rhs: f64) -> ParameterCheck {
    ParameterCheck {
        passed: lhs < rhs,
        ..le(name, lhs, rhs)
    }
}

fn close(name: &str, lhs: f64, rhs: f64) -> ParameterCheck {
    let diff = (lhs - rhs).abs();
    let tol = 1e-9 * (1.0 + rhs.abs());
    ParameterCheck {
        name: name.into(),
        passed: diff <= tol,
        lhs,
        rhs,
        margin: tol - diff,
    }
}

/// `n / ln n`, or 0 when `n ≤ 1`.
fn n_over_ln_n(n: u64) -> f64 {
    if n <= 1 {
        0.0
    } else {
        n as f64 / (n as f64).ln()
    }
}

/// Right-hand side of the repetition-count condition driven by `ε`.
pub fn repetitions_epsilon_rhs(q_count: usize, a_count: usize, epsilon: f64) -> f64 {
    20.0 * (q_count * a_count) as f64 * (2.0 / epsilon).ln() / (epsilon * epsilon)
}

/// Right-hand side of the repetition-count condition driven by `β` and `κ`; zero when `κ = 0`.
pub fn repetitions_beta_rhs(q_count: usize, a_count: usize, kappa: f64, beta: f64) -> f64 {
    if kappa == 0.0 {
        return 0.0;
    }
    let t = beta / (10.0 * kappa);
    20.0 * (q_count * a_count) as f64 * (20.0 * kappa / beta).ln() / (t * t)
}

/// Smallest even `n ≥ 2` with `n / ln n > rhs`.
pub fn smallest_n_with_ratio(rhs: f64) -> u64 {
    if rhs < n_over_ln_n(2) {
        return 2;
    }
    // n / ln n is increasing for n ≥ 3.
    let mut hi: u64 = 4;
    while n_over_ln_n(hi) <= rhs {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if n_over_ln_n(mid) > rhs {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi + hi % 2
}

/// Evaluates every parameter relation. `|Q|` and `|A|` are full product sizes.
pub fn check_parameters(game: &Game, p: &ThresholdParameters) -> ParameterReport {
    use names::*;
    let nq = game.question_count();
    let na = game.answer_count();
    let m = game.players();
    let mut checks = vec![
        lt(BETA_POSITIVE, 0.0, p.beta),
        lt(EPSILON_POSITIVE, 0.0, p.epsilon),
        le(EPSILON_MIN_Q, p.epsilon, game.min_positive_prob()),
        le(ZETA_LOWER, 7.0 * p.epsilon, p.zeta),
        le(ZETA_UPPER, p.zeta, 1.0),
        le(
            ZETA_KAPPA,
            p.zeta + 2.0 * p.epsilon,
            if p.kappa == 0.0 { f64::INFINITY } else { p.beta / p.kappa },
        ),
    ];
    let ln_2cd = std::f64::consts::LN_2 + p.ln_c + p.ln_delta;
    let nu_floor = if ln_2cd >= 0.0 {
        f64::INFINITY
    } else {
        let x = ln_2cd.exp();
        x / (1.0 - x) * p.w_ns
    };
    checks.push(lt(NU_LOWER, nu_floor, p.nu));
    checks.push(lt(NU_UPPER, p.nu, p.zeta - 6.0 * p.epsilon));
    let expected_delta = if p.epsilon > 0.0 {
        ln_test_delta(p.n, p.epsilon, nq * na).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    checks.push(close(DELTA_FORMULA, p.ln_delta, expected_delta));
    checks.push(close(C_FORMULA, p.ln_c, ln_definetti_c(p.n, nq, na)));
    checks.push(ParameterCheck {
        name: N_EVEN.into(),
        passed: p.n.is_multiple_of(2) && p.n > 0,
        lhs: p.n as f64,
        rhs: 0.0,
        margin: if p.n.is_multiple_of(2) { 0.0 } else { -1.0 },
    });
    checks.push(lt(D_BOUND, p.d as f64, (m * nq * na) as f64));
    let ratio = n_over_ln_n(p.n);
    checks.push(lt(
        REPETITIONS_EPSILON,
        repetitions_epsilon_rhs(nq, na, p.epsilon),
        ratio,
    ));
    checks.push(lt(
        REPETITIONS_BETA,
        repetitions_beta_rhs(nq, na, p.kappa, p.beta),
        ratio,
    ));
    ParameterReport {
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdBound {
    pub n: u64,
    pub beta: f64,
    pub alpha: f64,
    pub kappa: f64,
    /// Un-clamped `ln(C1 · e^{−(n/4)(β/10κ)²})`.
    pub ln_bound: f64,
    /// `min(1, exp(ln_bound))`.
    pub bound: f64,
    /// Smallest even `n` with `ln_bound < 0`; `None` when astronomically large.
    pub smallest_n: Option<u64>,
}

/// `ln(10 m |Q||A|) + 2(|Q||A| − 1) ln(n + 1) − (n/4)(β/(10κ))²`; `−∞` when `κ = 0`.
pub fn ln_threshold_bound(m: usize, q_count: usize, a_count: usize, kappa: f64, n: u64, beta: f64) -> f64 {
    if kappa == 0.0 {
        return f64::NEG_INFINITY;
    }
    let p = (q_count * a_count) as f64;
    let t = beta / (10.0 * kappa);
    let n = n as f64;
    (10.0 * m as f64 * p).ln() + 2.0 * (p - 1.0) * (n + 1.0).ln() - n / 4.0 * t * t
}

/// Largest repetition count handled by the searches.
pub const MAX_N: u64 = 1 << 62;

/// Smallest even `n ≥ 2` for which the log-bound is negative, or `None` beyond [`MAX_N`].
pub fn smallest_n_for_bound(m: usize, q_count: usize, a_count: usize, kappa: f64, beta: f64) -> Option<u64> {
    let f = |n: u64| ln_threshold_bound(m, q_count, a_count, kappa, n, beta);
    if f(2) < 0.0 {
        return Some(2);
    }
    // f is concave; past its maximum it decreases, so search from there.
    let p = (q_count * a_count) as f64;
    let t = beta / (10.0 * kappa);
    let peak = 8.0 * (p - 1.0) / (t * t) - 1.0;
    if !(peak < MAX_N as f64 / 4.0) {
        return None;
    }
    let mut lo = (peak.max(2.0)) as u64;
    let mut hi = lo.max(4) * 2;
    while f(hi) >= 0.0 {
        if hi >= MAX_N {
            return None;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi + hi % 2)
}

/// Evaluates the bound from precomputed `α` and `κ`.
pub fn threshold_bound_from(
    m: usize,
    q_count: usize,
    a_count: usize,
    alpha: f64,
    kappa: f64,
    n: u64,
    beta: f64,
) -> Result<ThresholdBound> {
    if !(beta > 0.0 && beta <= alpha + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (0, alpha] with alpha = {alpha}, got {beta}"
        )));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n must be even, got {n}")));
    }
    let ln_bound = ln_threshold_bound(m, q_count, a_count, kappa, n, beta);
    Ok(ThresholdBound {
        n,
        beta,
        alpha,
        kappa,
        ln_bound,
        bound: ln_bound.exp().min(1.0),
        smallest_n: if kappa == 0.0 {
            Some(2)
        } else {
            smallest_n_for_bound(m, q_count, a_count, kappa, beta)
        },
    })
}

/// Threshold bound with `κ` minimized over the optimal dual face.
pub fn threshold_bound(game: &Game, n: u64, beta: f64) -> Result<ThresholdBound> {
    let alpha = 1.0 - ns_value(game)?;
    let k = kappa(game, true)?;
    threshold_bound_from(
        game.players(),
        game.question_count(),
        game.answer_count(),
        alpha,
        k,
        n,
        beta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builtin_game;

    #[test]
    fn sanov_log_value() {
        // (l+1)^(P-1) e^{-l eps^2/2} at l=200, eps=0.3, P=16.
        let ln = ln_sanov_delta(200, 0.3, 16).unwrap();
        assert!((ln - (15.0 * 201f64.ln() - 9.0)).abs() < 1e-12);
        assert!(ln_sanov_delta(0, 0.3, 16).is_err());
        assert!(ln_sanov_delta(10, 0.0, 16).is_err());
    }

    #[test]
    fn definetti_examples() {
        assert!((definetti_c(1, 4, 4).unwrap() - 4096.0).abs() < 1e-9);
        assert_eq!(definetti_c(1000, 7, 1), Some(1.0));
        assert_eq!(definetti_c(0, 7, 5), Some(1.0));
        assert_eq!(definetti_c(1_000_000, 64, 64), None);
    }

    #[test]
    fn ratio_search() {
        for rhs in [0.5, 3.0, 10.0, 1234.5, 1e7] {
            let n = smallest_n_with_ratio(rhs);
            assert!(n % 2 == 0);
            assert!(n_over_ln_n(n) > rhs);
            if n > 4 {
                assert!(n_over_ln_n(n - 2) <= rhs);
            }
        }
    }

    #[test]
    fn smallest_bound_n_is_tight() {
        let (m, nq, na, k, b) = (2, 4, 4, 2.0, 0.1);
        let n = smallest_n_for_bound(m, nq, na, k, b).unwrap();
        assert!(ln_threshold_bound(m, nq, na, k, n, b) < 0.0);
        assert!(ln_threshold_bound(m, nq, na, k, n - 2, b) >= 0.0);
    }

    #[test]
    fn chsh_has_no_admissible_beta() {
        let g = builtin_game("chsh").unwrap();
        assert!(threshold_bound(&g, 100, 0.01).is_err());
    }

    #[test]
    fn tiny_beta_clamps_to_one() {
        let b = threshold_bound_from(2, 4, 4, 0.5, 1.0, 1000, 1e-9).unwrap();
        assert_eq!(b.bound, 1.0);
        assert!(b.ln_bound > 0.0);
        assert_eq!(b.smallest_n, None);
    }
}
