//! The signalling measure, empirical strategy estimates and the threshold signalling test.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::conditional;
use crate::strategy::{ConditionalTable, EstimatedStrategy};
use crate::tuples::TupleSpace;

/// A direction `(i, b^ī, s^i, s^ī)`. Players are numbered from 0.
///
/// Written as `(i|b^ī|s^i|s^ī)` with sub-tuples as comma lists, e.g. `(1|1|1|0)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignallingDirection {
    pub player: usize,
    pub others_answers: Vec<usize>,
    pub own_question: usize,
    pub others_questions: Vec<usize>,
}

impl SignallingDirection {
    pub fn new(player: usize, others_answers: Vec<usize>, own_question: usize, others_questions: Vec<usize>) -> Self {
        Self {
            player,
            others_answers,
            own_question,
            others_questions,
        }
    }

    fn check(&self, questions: &TupleSpace, answers: &TupleSpace) -> Result<()> {
        let m = questions.arity();
        let ok = self.player < m
            && self.own_question < questions.radix(self.player)
            && questions.without(self.player).contains(&self.others_questions)
            && answers.without(self.player).contains(&self.others_answers);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "direction {self} outside alphabets {:?}/{:?}",
                questions.radices(),
                answers.radices()
            )))
        }
    }

    /// `(s = (s^i, s^ī), b^ī)` as indices into the full question space and `A^ī`.
    pub fn indices(&self, questions: &TupleSpace, answers: &TupleSpace) -> Result<(usize, usize)> {
        self.check(questions, answers)?;
        let rest_q = questions.without(self.player).encode(&self.others_questions);
        let s = questions.insert_digit(rest_q, self.player, self.own_question);
        let b = answers.without(self.player).encode(&self.others_answers);
        Ok((s, b))
    }

    pub fn from_indices(
        questions: &TupleSpace,
        answers: &TupleSpace,
        player: usize,
        question: usize,
        rest_answer: usize,
    ) -> Self {
        let mut others_questions = questions.decode(question);
        let own_question = others_questions.remove(player);
        Self {
            player,
            others_answers: answers.without(player).decode(rest_answer),
            own_question,
            others_questions,
        }
    }

    /// Every direction in canonical order `i → s → b^ī`.
    pub fn all(questions: &TupleSpace, answers: &TupleSpace) -> Vec<Self> {
        if questions.arity() < 2 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for i in 0..questions.arity() {
            let rest = answers.len() / answers.radix(i);
            for s in 0..questions.len() {
                for b in 0..rest {
                    out.push(Self::from_indices(questions, answers, i, s, b));
                }
            }
        }
        out
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SignallingDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}|{}|{}|{})",
            self.player,
            join(&self.others_answers),
            self.own_question,
            join(&self.others_questions)
        )
    }
}

impl FromStr for SignallingDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("malformed direction `{s}`, expected (i|b,..|s_i|s,..)"));
        let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let parts: Vec<&str> = inner.split('|').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let list = |t: &str| -> Result<Vec<usize>> {
            if t.trim().is_empty() {
                Ok(Vec::new())
            } else {
                t.split(',').map(num).collect()
            }
        };
        Ok(Self {
            player: num(parts[0])?,
            others_answers: list(parts[1])?,
            own_question: num(parts[2])?,
            others_questions: list(parts[3])?,
        })
    }
}

impl Serialize for SignallingDirection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignallingDirection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigForm {
    /// `Q(s)[O(∘,b^ī|s) − Σ_r Q(r|s^ī) O(∘,b^ī|r,s^ī)]`.
    Conditional,
    /// `O(∘,b^ī,∘,s^ī)[O(∘,s^i|b^ī,s^ī) − Q(s^i|s^ī)]` on the joint `Q × O`.
    Joint,
}

fn check_dist(dist: &[f64], table: &ConditionalTable) -> Result<()> {
    if dist.len() != table.questions().len() {
        return Err(Error::DimensionMismatch(format!(
            "distribution has {} entries, table has {} question tuples",
            dist.len(),
            table.questions().len()
        )));
    }
    Ok(())
}

/// `Sig` in one direction. `None` when `Σ_r Q(r, s^ī) = 0`, where the conditional is undefined.
pub fn sig_value<T: AsRef<ConditionalTable> + ?Sized>(
    dist: &[f64],
    table: &T,
    direction: &SignallingDirection,
    form: SigForm,
) -> Result<Option<f64>> {
    let table = table.as_ref();
    check_dist(dist, table)?;
    let qs = table.questions();
    let (s, b) = direction.indices(qs, table.answers())?;
    Ok(sig_at(dist, table, direction.player, s, b, form))
}

fn sig_at(dist: &[f64], table: &ConditionalTable, i: usize, s: usize, b: usize, form: SigForm) -> Option<f64> {
    let qs = table.questions();
    let cond_s = conditional(qs, dist, i, s)?;
    let own = table.marginal_entry(i, s, b);
    match form {
        SigForm::Conditional => {
            let avg: f64 = (0..qs.radix(i))
                .map(|r| {
                    let qr = qs.with_digit(s, i, r);
                    conditional(qs, dist, i, qr).unwrap_or(0.0) * table.marginal_entry(i, qr, b)
                })
                .sum();
            Some(dist[s] * (own - avg))
        }
        SigForm::Joint => {
            let mass: f64 = (0..qs.radix(i))
                .map(|r| {
                    let qr = qs.with_digit(s, i, r);
                    dist[qr] * table.marginal_entry(i, qr, b)
                })
                .sum();
            if mass == 0.0 {
                return Some(0.0);
            }
            let posterior = dist[s] * own / mass;
            Some(mass * (posterior - cond_s))
        }
    }
}

/// Frequencies `f^q_a` from paired question and answer indices.
pub fn estimate_strategy(
    questions: &[usize],
    answers: &[usize],
    question_space: &TupleSpace,
    answer_space: &TupleSpace,
) -> Result<EstimatedStrategy> {
    if questions.len() != answers.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} question tuples but {} answer tuples",
            questions.len(),
            answers.len()
        )));
    }
    let na = answer_space.len();
    let mut table = ConditionalTable::zeros(question_space.clone(), answer_space.clone());
    let mut counts = vec![0usize; question_space.len()];
    {
        let values = table.values_mut();
        for (&q, &a) in questions.iter().zip(answers) {
            if q >= question_space.len() || a >= na {
                return Err(Error::DimensionMismatch(format!("index ({q}, {a}) out of range")));
            }
            counts[q] += 1;
            values[q * na + a] += 1.0;
        }
        for (q, &c) in counts.iter().enumerate() {
            if c > 0 {
                for v in &mut values[q * na..(q + 1) * na] {
                    *v /= c as f64;
                }
            }
        }
    }
    Ok(EstimatedStrategy { table, counts })
}

/// The indicator `T`: true iff `Sig(O^EST1) ≥ ζ − 2ε` in `direction`, false whenever the
/// direction's question tuple is absent from the test data or the direction is undefined.
pub fn signalling_test(
    direction: &SignallingDirection,
    test_questions: &[usize],
    test_answers: &[usize],
    zeta: f64,
    epsilon: f64,
    dist: &[f64],
    question_space: &TupleSpace,
    answer_space: &TupleSpace,
) -> Result<bool> {
    check_test_parameters(zeta, epsilon)?;
    let est = estimate_strategy(test_questions, test_answers, question_space, answer_space)?;
    test_estimate(direction, &est, zeta, epsilon, dist)
}

pub(crate) fn check_test_parameters(zeta: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !(7.0 * epsilon <= zeta + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "test needs epsilon > 0 and zeta >= 7 epsilon, got zeta {zeta}, epsilon {epsilon}"
        )));
    }
    Ok(())
}

/// [`signalling_test`] on an already computed estimate.
pub fn test_estimate(
    direction: &SignallingDirection,
    est: &EstimatedStrategy,
    zeta: f64,
    epsilon: f64,
    dist: &[f64],
) -> Result<bool> {
    let (s, _) = direction.indices(est.table().questions(), est.table().answers())?;
    if est.counts()[s] == 0 {
        return Ok(false);
    }
    Ok(match sig_value(dist, est, direction, SigForm::Conditional)? {
        Some(v) => v >= zeta - 2.0 * epsilon,
        None => false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigReport {
    /// `null` marks an undefined direction.
    pub values: BTreeMap<String, Option<f64>>,
    pub max_direction: Option<SignallingDirection>,
    pub max_value: f64,
}

/// Conditional-form `Sig` over every direction.
pub fn max_sig<T: AsRef<ConditionalTable> + ?Sized + Sync>(dist: &[f64], table: &T) -> Result<SigReport> {
    let table = table.as_ref();
    check_dist(dist, table)?;
    let dirs = SignallingDirection::all(table.questions(), table.answers());
    let values: Vec<Option<f64>> = dirs
        .par_iter()
        .map(|d| {
            let (s, b) = d.indices(table.questions(), table.answers()).expect("canonical direction");
            sig_at(dist, table, d.player, s, b, SigForm::Conditional)
        })
        .collect();
    let mut max_direction = None;
    let mut max_value = f64::NEG_INFINITY;
    for (d, v) in dirs.iter().zip(&values) {
        if let Some(v) = v {
            if *v > max_value {
                max_value = *v;
                max_direction = Some(d.clone());
            }
        }
    }
    if max_direction.is_none() {
        max_value = 0.0;
    }
    Ok(SigReport {
        values: dirs.iter().map(|d| d.to_string()).zip(values).collect(),
        max_direction,
        max_value,
    })
}
