//! Strategies for the repeated game: a rule mapping `n` question tuples to `n` answer tuples.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::rng::sample_cdf;
use crate::strategy::Strategy;
use crate::tuples::TupleSpace;

pub trait RepeatedStrategy: Send + Sync {
    /// Answer tuple indices, one per question tuple index.
    fn respond(&self, questions: &[usize], rng: &mut dyn RngCore) -> Vec<usize>;

    fn describe(&self) -> String;
}

/// `O^{⊗n}`: every round answered independently from `O`.
#[derive(Debug, Clone)]
pub struct IidStrategy {
    strategy: Strategy,
    cdf: Vec<f64>,
}

impl IidStrategy {
    pub fn new(strategy: Strategy) -> Self {
        let cdf = strategy.cumulative();
        Self { strategy, cdf }
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    fn answer(&self, q: usize, rng: &mut dyn RngCore) -> usize {
        let na = self.strategy.answers().len();
        sample_cdf(&self.cdf[q * na..(q + 1) * na], rng.random::<f64>())
    }
}

impl RepeatedStrategy for IidStrategy {
    fn respond(&self, questions: &[usize], rng: &mut dyn RngCore) -> Vec<usize> {
        questions.iter().map(|&q| self.answer(q, rng)).collect()
    }

    fn describe(&self) -> String {
        "iid".into()
    }
}

/// Finite de Finetti strategy: one component drawn per run, then played i.i.d.
#[derive(Debug, Clone)]
pub struct MixtureStrategy {
    cdf: Vec<f64>,
    components: Vec<IidStrategy>,
}

impl MixtureStrategy {
    pub fn new(weights: Vec<f64>, components: Vec<Strategy>) -> Result<Self> {
        if weights.len() != components.len() || components.is_empty() {
            return Err(Error::InvalidStrategy("mixture needs one weight per component".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidStrategy("mixture weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidStrategy(format!("mixture weights sum to {total}")));
        }
        let first = &components[0];
        if components
            .iter()
            .any(|c| c.questions() != first.questions() || c.answers() != first.answers())
        {
            return Err(Error::DimensionMismatch("mixture components differ in shape".into()));
        }
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self {
            cdf,
            components: components.into_iter().map(IidStrategy::new).collect(),
        })
    }
}

impl RepeatedStrategy for MixtureStrategy {
    fn respond(&self, questions: &[usize], rng: &mut dyn RngCore) -> Vec<usize> {
        let k = sample_cdf(&self.cdf, rng.random::<f64>());
        self.components[k].respond(questions, rng)
    }

    fn describe(&self) -> String {
        format!("mixture of {}", self.components.len())
    }
}

/// Applies one uniformly random permutation `π` per run: the inner strategy sees the questions
/// in permuted order and its answers are mapped back.
pub struct PermutedWrapper<S> {
    inner: S,
}

impl<S: RepeatedStrategy> PermutedWrapper<S> {
    pub fn new(inner: S) -> Self {
        Self { inner }
    }
}

impl<S: RepeatedStrategy> RepeatedStrategy for PermutedWrapper<S> {
    fn respond(&self, questions: &[usize], rng: &mut dyn RngCore) -> Vec<usize> {
        let n = questions.len();
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(rng);
        let permuted: Vec<usize> = pi.iter().map(|&j| questions[j]).collect();
        let inner = self.inner.respond(&permuted, rng);
        let mut answers = vec![0; n];
        for (k, &j) in pi.iter().enumerate() {
            answers[j] = inner[k];
        }
        answers
    }

    fn describe(&self) -> String {
        format!("permuted {}", self.inner.describe())
    }
}

/// In every round, `target` answers `source`'s question (modulo its answer alphabet) and every
/// other player answers 0.
#[derive(Debug, Clone)]
pub struct EchoStrategy {
    questions: TupleSpace,
    answers: TupleSpace,
    source: usize,
    target: usize,
}

impl EchoStrategy {
    pub fn new(questions: TupleSpace, answers: TupleSpace, source: usize, target: usize) -> Result<Self> {
        let m = questions.arity();
        if source == target || source >= m || target >= m || answers.arity() != m {
            return Err(Error::InvalidParameter(format!(
                "echo needs distinct players below {m}, got source {source}, target {target}"
            )));
        }
        Ok(Self {
            questions,
            answers,
            source,
            target,
        })
    }

    fn answer(&self, q: usize) -> usize {
        let x = self.questions.digit(q, self.source) % self.answers.radix(self.target);
        self.answers.with_digit(0, self.target, x)
    }
}

impl RepeatedStrategy for EchoStrategy {
    fn respond(&self, questions: &[usize], _rng: &mut dyn RngCore) -> Vec<usize> {
        questions.iter().map(|&q| self.answer(q)).collect()
    }

    fn describe(&self) -> String {
        format!("echo {} -> {}", self.source, self.target)
    }
}

/// Plays `inner` i.i.d., except that `target` answers `source`'s question from `lag` rounds
/// later (cyclically). Signals across rounds but not within one.
#[derive(Debug, Clone)]
pub struct RoundPeekStrategy {
    inner: IidStrategy,
    source: usize,
    target: usize,
    lag: usize,
}

impl RoundPeekStrategy {
    pub fn new(inner: Strategy, source: usize, target: usize, lag: usize) -> Result<Self> {
        let m = inner.questions().arity();
        if source == target || source >= m || target >= m {
            return Err(Error::InvalidParameter(format!(
                "peek needs distinct players below {m}, got source {source}, target {target}"
            )));
        }
        Ok(Self {
            inner: IidStrategy::new(inner),
            source,
            target,
            lag,
        })
    }
}

impl RepeatedStrategy for RoundPeekStrategy {
    fn respond(&self, questions: &[usize], rng: &mut dyn RngCore) -> Vec<usize> {
        let qs = self.inner.strategy().questions();
        let ans = self.inner.strategy().answers();
        let n = questions.len();
        let mut out = self.inner.respond(questions, rng);
        for j in 0..n {
            let peek = questions[(j + self.lag) % n];
            let x = qs.digit(peek, self.source) % ans.radix(self.target);
            out[j] = ans.with_digit(out[j], self.target, x);
        }
        out
    }

    fn describe(&self) -> String {
        format!("peek {} -> {} lag {}", self.source, self.target, self.lag)
    }
}
