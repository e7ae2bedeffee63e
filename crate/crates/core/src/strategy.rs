//! One-game strategies `O(a|q)` and their empirical estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, NORMALIZATION_TOL};
use crate::tuples::TupleSpace;

/// Dense conditional table over the full question and answer products.
///
/// Entries are laid out as `values[q * |A| + a]`. Rows need not be normalized; see
/// [`Strategy`] for the normalized wrapper.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    questions: TupleSpace,
    answers: TupleSpace,
    values: Vec<f64>,
}

impl ConditionalTable {
    pub fn new(questions: TupleSpace, answers: TupleSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != questions.len() * answers.len() {
            return Err(Error::DimensionMismatch(format!(
                "table has {} entries, expected {}",
                values.len(),
                questions.len() * answers.len()
            )));
        }
        Ok(Self {
            questions,
            answers,
            values,
        })
    }

    pub fn zeros(questions: TupleSpace, answers: TupleSpace) -> Self {
        let n = questions.len() * answers.len();
        Self {
            questions,
            answers,
            values: vec![0.0; n],
        }
    }

    pub fn questions(&self) -> &TupleSpace {
        &self.questions
    }

    pub fn answers(&self) -> &TupleSpace {
        &self.answers
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, q: usize, a: usize) -> f64 {
        self.values[q * self.answers.len() + a]
    }

    pub fn row(&self, q: usize) -> &[f64] {
        let na = self.answers.len();
        &self.values[q * na..(q + 1) * na]
    }

    /// `O(∘, a^ī | q)`: sums out player `player`'s answer. Indexed `[q * |A^ī| + a^ī]`.
    pub fn marginal_without(&self, player: usize) -> Vec<f64> {
        let rest = self.answers.radices().len();
        debug_assert!(player < rest);
        let rest_len = self.answers.len() / self.answers.radix(player);
        let mut out = vec![0.0; self.questions.len() * rest_len];
        for q in 0..self.questions.len() {
            let row = self.row(q);
            let dst = &mut out[q * rest_len..(q + 1) * rest_len];
            for (a, &p) in row.iter().enumerate() {
                dst[self.answers.drop_digit(a, player)] += p;
            }
        }
        out
    }

    /// `O(∘, b^ī | q)` for a single question tuple and sub-answer index.
    pub fn marginal_entry(&self, player: usize, q: usize, rest_answer: usize) -> f64 {
        (0..self.answers.radix(player))
            .map(|x| self.get(q, self.answers.insert_digit(rest_answer, player, x)))
            .sum()
    }

    fn same_shape(&self, other: &ConditionalTable) -> Result<()> {
        if self.questions != other.questions || self.answers != other.answers {
            return Err(Error::DimensionMismatch("tables have different alphabets".into()));
        }
        Ok(())
    }
}

impl AsRef<ConditionalTable> for ConditionalTable {
    fn as_ref(&self) -> &ConditionalTable {
        self
    }
}

/// A normalized strategy: every row of the table is a probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy(ConditionalTable);

impl AsRef<ConditionalTable> for Strategy {
    fn as_ref(&self) -> &ConditionalTable {
        &self.0
    }
}

impl Strategy {
    /// Validates nonnegativity and row normalization within `1e-12`.
    pub fn new(table: ConditionalTable) -> Result<Self> {
        let na = table.answers.len();
        for q in 0..table.questions.len() {
            let row = table.row(q);
            if let Some(p) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
                return Err(Error::InvalidStrategy(format!(
                    "entry {p} for question {:?}",
                    table.questions.decode(q)
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidStrategy(format!(
                    "row for question {:?} sums to {sum}",
                    table.questions.decode(q)
                )));
            }
        }
        debug_assert_eq!(table.values.len(), table.questions.len() * na);
        Ok(Strategy(table))
    }

    pub fn from_fn<F>(question_alphabets: &[usize], answer_alphabets: &[usize], mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> f64,
    {
        let qs = TupleSpace::new(question_alphabets.to_vec());
        let ans = TupleSpace::new(answer_alphabets.to_vec());
        let mut values = Vec::with_capacity(qs.len() * ans.len());
        for q in 0..qs.len() {
            let qt = qs.decode(q);
            for a in 0..ans.len() {
                values.push(f(&qt, &ans.decode(a)));
            }
        }
        Strategy::new(ConditionalTable::new(qs, ans, values)?)
    }

    /// Deterministic strategy answering `f(q)` to every question tuple.
    pub fn deterministic<F>(question_alphabets: &[usize], answer_alphabets: &[usize], mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<usize>,
    {
        Self::from_fn(question_alphabets, answer_alphabets, |q, a| {
            if f(q) == a {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Uniformly random answers, independent of the questions.
    pub fn uniform(question_alphabets: &[usize], answer_alphabets: &[usize]) -> Result<Self> {
        let n: usize = answer_alphabets.iter().product();
        Self::from_fn(question_alphabets, answer_alphabets, |_, _| 1.0 / n as f64)
    }

    /// Product of local strategies, `locals[i][x][b]` = probability that player `i`
    /// answers `b` to question `x`.
    pub fn product(
        question_alphabets: &[usize],
        answer_alphabets: &[usize],
        locals: &[Vec<Vec<f64>>],
    ) -> Result<Self> {
        if locals.len() != question_alphabets.len() {
            return Err(Error::DimensionMismatch("one local strategy per player".into()));
        }
        Self::from_fn(question_alphabets, answer_alphabets, |q, a| {
            locals
                .iter()
                .enumerate()
                .map(|(i, local)| local[q[i]][a[i]])
                .product()
        })
    }

    /// Convex combination `Σ_k w_k O_k` of one-game strategies.
    pub fn mixture(weights: &[f64], components: &[Strategy]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidStrategy("empty mixture".into()))?;
        if weights.len() != components.len() {
            return Err(Error::DimensionMismatch("one weight per component".into()));
        }
        let mut values = vec![0.0; first.0.values.len()];
        for (w, s) in weights.iter().zip(components) {
            first.0.same_shape(&s.0)?;
            for (v, x) in values.iter_mut().zip(&s.0.values) {
                *v += w * x;
            }
        }
        Strategy::new(ConditionalTable::new(
            first.0.questions.clone(),
            first.0.answers.clone(),
            values,
        )?)
    }

    /// Builds a strategy from raw solver output: clamps tiny negatives and renormalizes rows.
    pub fn from_solver_values(questions: TupleSpace, answers: TupleSpace, mut values: Vec<f64>) -> Result<Self> {
        let na = answers.len();
        for row in values.chunks_mut(na) {
            for v in row.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            let s: f64 = row.iter().sum();
            if s <= 0.0 {
                return Err(Error::InvalidStrategy("solver returned an empty row".into()));
            }
            for v in row.iter_mut() {
                *v /= s;
            }
        }
        Strategy::new(ConditionalTable::new(questions, answers, values)?)
    }

    pub fn table(&self) -> &ConditionalTable {
        &self.0
    }

    pub fn into_table(self) -> ConditionalTable {
        self.0
    }

    pub fn questions(&self) -> &TupleSpace {
        &self.0.questions
    }

    pub fn answers(&self) -> &TupleSpace {
        &self.0.answers
    }

    #[inline]
    pub fn prob(&self, q: usize, a: usize) -> f64 {
        self.0.get(q, a)
    }

    /// True iff every player's complementary marginal is independent of that player's
    /// question, to within `tol`.
    pub fn is_non_signalling(&self, tol: f64) -> bool {
        let qs = &self.0.questions;
        for i in 0..qs.arity() {
            let marg = self.0.marginal_without(i);
            let rest_a = self.0.answers.len() / self.0.answers.radix(i);
            let rest_q = qs.len() / qs.radix(i);
            for qr in 0..rest_q {
                for b in 0..rest_a {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for x in 0..qs.radix(i) {
                        let q = qs.insert_digit(qr, i, x);
                        let v = marg[q * rest_a + b];
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                    if hi - lo > tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Relabels every player's answers through `perms[i]`.
    pub fn relabel_answers(&self, perms: &[Vec<usize>]) -> Result<Self> {
        let ans = &self.0.answers;
        let mut values = vec![0.0; self.0.values.len()];
        let na = ans.len();
        for q in 0..self.0.questions.len() {
            for a in 0..na {
                let t = ans.decode(a);
                let mapped: Vec<usize> = t.iter().enumerate().map(|(i, &x)| perms[i][x]).collect();
                values[q * na + ans.encode(&mapped)] = self.0.get(q, a);
            }
        }
        Strategy::new(ConditionalTable::new(
            self.0.questions.clone(),
            ans.clone(),
            values,
        )?)
    }

    /// Cumulative row sums, used for sampling answers.
    pub(crate) fn cumulative(&self) -> Vec<f64> {
        let na = self.0.answers.len();
        let mut cdf = self.0.values.clone();
        for row in cdf.chunks_mut(na) {
            let mut acc = 0.0;
            for v in row.iter_mut() {
                acc += *v;
                *v = acc;
            }
        }
        cdf
    }

    pub fn to_file(&self) -> StrategyFile {
        let qs = &self.0.questions;
        let ans = &self.0.answers;
        let mut table = Vec::new();
        for q in 0..qs.len() {
            for a in 0..ans.len() {
                let p = self.0.get(q, a);
                if p != 0.0 {
                    table.push(StrategyEntry {
                        q: qs.decode(q),
                        a: ans.decode(a),
                        p,
                    });
                }
            }
        }
        StrategyFile {
            question_alphabets: qs.radices().to_vec(),
            answer_alphabets: ans.radices().to_vec(),
            table,
        }
    }

    pub fn from_file(file: &StrategyFile) -> Result<Self> {
        let qs = TupleSpace::new(file.question_alphabets.clone());
        let ans = TupleSpace::new(file.answer_alphabets.clone());
        let mut table = ConditionalTable::zeros(qs.clone(), ans.clone());
        let na = ans.len();
        let mut seen = std::collections::HashSet::new();
        for e in &file.table {
            if !qs.contains(&e.q) || !ans.contains(&e.a) {
                return Err(Error::InvalidStrategy(format!(
                    "entry ({:?}, {:?}) out of range",
                    e.q, e.a
                )));
            }
            if !seen.insert((e.q.clone(), e.a.clone())) {
                return Err(Error::InvalidStrategy(format!(
                    "duplicate entry ({:?}, {:?})",
                    e.q, e.a
                )));
            }
            table.values[qs.encode(&e.q) * na + ans.encode(&e.a)] = e.p;
        }
        Strategy::new(table)
    }
}

/// An empirical estimate `f^q_a`. Rows of questions that never occurred are all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedStrategy {
    pub(crate) table: ConditionalTable,
    pub(crate) counts: Vec<usize>,
}

impl AsRef<ConditionalTable> for EstimatedStrategy {
    fn as_ref(&self) -> &ConditionalTable {
        &self.table
    }
}

impl EstimatedStrategy {
    pub fn table(&self) -> &ConditionalTable {
        &self.table
    }

    /// Number of occurrences of each question tuple.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// True iff every question tuple occurred at least once.
    pub fn is_normalized(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }
}

/// JSON strategy table, keyed by question tuple. Omitted entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub question_alphabets: Vec<usize>,
    pub answer_alphabets: Vec<usize>,
    pub table: Vec<StrategyEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub q: Vec<usize>,
    pub a: Vec<usize>,
    pub p: f64,
}

/// `E_{q∼Q} Σ_a |K(a|q) − R(a|q)|`.
pub fn strategy_distance<K, R>(game: &Game, k: &K, r: &R) -> Result<f64>
where
    K: AsRef<ConditionalTable> + ?Sized,
    R: AsRef<ConditionalTable> + ?Sized,
{
    let (k, r) = (k.as_ref(), r.as_ref());
    game.check_dims(&k.questions, &k.answers)?;
    k.same_shape(r)?;
    let mut total = 0.0;
    for q in 0..k.questions.len() {
        let pq = game.prob(q);
        if pq == 0.0 {
            continue;
        }
        let l1: f64 = k.row(q).iter().zip(r.row(q)).map(|(x, y)| (x - y).abs()).sum();
        total += pq * l1;
    }
    Ok(total)
}

/// The PR box on `{0,1}²`: uniform marginals, `a ⊕ b = x ∧ y`.
pub fn pr_box() -> Strategy {
    Strategy::from_fn(&[2, 2], &[2, 2], |q, a| {
        if (a[0] ^ a[1]) == (q[0] & q[1]) {
            0.5
        } else {
            0.0
        }
    })
    .expect("PR box is normalized")
}

/// Two-player strategy where `target` answers the question of `source` (reduced modulo its
/// answer alphabet) and every other player answers 0.
pub fn echo_strategy(
    question_alphabets: &[usize],
    answer_alphabets: &[usize],
    source: usize,
    target: usize,
) -> Result<Strategy> {
    if source == target || source >= question_alphabets.len() || target >= question_alphabets.len() {
        return Err(Error::InvalidParameter(format!(
            "echo needs distinct players, got source {source}, target {target}"
        )));
    }
    Strategy::deterministic(question_alphabets, answer_alphabets, |q| {
        let mut a = vec![0; answer_alphabets.len()];
        a[target] = q[source] % answer_alphabets[target];
        a
    })
}
