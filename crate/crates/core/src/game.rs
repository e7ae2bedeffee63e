//! Finite multiplayer games: question distribution, answer alphabets and winning predicate.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::Strategy;
use crate::tuples::TupleSpace;

/// Normalization tolerance for probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// One entry of the question distribution in the JSON game format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionEntry {
    pub q: Vec<usize>,
    pub p: f64,
}

/// One accepted (questions, answers) pair in the JSON game format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptEntry {
    pub q: Vec<usize>,
    pub a: Vec<usize>,
}

/// Serialized form of a game, exactly as read from or written to JSON.
///
/// Question tuples absent from `questions` have probability zero; pairs absent from
/// `accept` lose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameDefinition {
    pub players: usize,
    pub question_alphabets: Vec<usize>,
    pub answer_alphabets: Vec<usize>,
    pub questions: Vec<QuestionEntry>,
    pub accept: Vec<AcceptEntry>,
}

/// A problem found by [`validate_game`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoPlayers,
    AlphabetCount { field: &'static str, expected: usize, found: usize },
    EmptyAlphabet { field: &'static str, player: usize },
    QuestionIndex { q: Vec<usize> },
    AnswerIndex { q: Vec<usize>, a: Vec<usize> },
    NegativeProbability { q: Vec<usize>, p: f64 },
    NonFiniteProbability { q: Vec<usize> },
    Normalization { sum: f64 },
    DuplicateQuestion { q: Vec<usize> },
    DuplicateAccept { q: Vec<usize>, a: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPlayers => write!(f, "game has no players"),
            Violation::AlphabetCount { field, expected, found } => {
                write!(f, "{field} has {found} entries, expected {expected}")
            }
            Violation::EmptyAlphabet { field, player } => {
                write!(f, "{field}[{player}] must be positive")
            }
            Violation::QuestionIndex { q } => write!(f, "question tuple {q:?} out of range"),
            Violation::AnswerIndex { q, a } => {
                write!(f, "accepted pair ({q:?}, {a:?}) out of range")
            }
            Violation::NegativeProbability { q, p } => {
                write!(f, "negative probability {p} for {q:?}")
            }
            Violation::NonFiniteProbability { q } => write!(f, "non-finite probability for {q:?}"),
            Violation::Normalization { sum } => {
                write!(f, "question probabilities sum to {sum}, expected 1")
            }
            Violation::DuplicateQuestion { q } => write!(f, "duplicate question tuple {q:?}"),
            Violation::DuplicateAccept { q, a } => {
                write!(f, "duplicate accepted pair ({q:?}, {a:?})")
            }
        }
    }
}

/// Checks a game definition. An empty report means the definition is well-formed.
pub fn validate_game(def: &GameDefinition) -> Vec<Violation> {
    let mut report = Vec::new();
    if def.players == 0 {
        report.push(Violation::NoPlayers);
    }
    for (field, alphabets) in [
        ("question_alphabets", &def.question_alphabets),
        ("answer_alphabets", &def.answer_alphabets),
    ] {
        if alphabets.len() != def.players {
            report.push(Violation::AlphabetCount {
                field,
                expected: def.players,
                found: alphabets.len(),
            });
        }
        for (player, &k) in alphabets.iter().enumerate() {
            if k == 0 {
                report.push(Violation::EmptyAlphabet { field, player });
            }
        }
    }
    let qs = TupleSpace::new(def.question_alphabets.clone());
    let ans = TupleSpace::new(def.answer_alphabets.clone());

    let mut seen = HashSet::new();
    let mut sum = 0.0;
    for entry in &def.questions {
        if !qs.contains(&entry.q) {
            report.push(Violation::QuestionIndex { q: entry.q.clone() });
        }
        if !seen.insert(entry.q.clone()) {
            report.push(Violation::DuplicateQuestion { q: entry.q.clone() });
        }
        if !entry.p.is_finite() {
            report.push(Violation::NonFiniteProbability { q: entry.q.clone() });
            continue;
        }
        if entry.p < 0.0 {
            report.push(Violation::NegativeProbability {
                q: entry.q.clone(),
                p: entry.p,
            });
        }
        sum += entry.p;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        report.push(Violation::Normalization { sum });
    }

    let mut seen = HashSet::new();
    for entry in &def.accept {
        if !qs.contains(&entry.q) || !ans.contains(&entry.a) {
            report.push(Violation::AnswerIndex {
                q: entry.q.clone(),
                a: entry.a.clone(),
            });
        }
        if !seen.insert((entry.q.clone(), entry.a.clone())) {
            report.push(Violation::DuplicateAccept {
                q: entry.q.clone(),
                a: entry.a.clone(),
            });
        }
    }
    report
}

/// A finite m-player game `(Q, A, Q(q), R)` stored densely over the full Cartesian
/// products of question and answer alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    questions: TupleSpace,
    answers: TupleSpace,
    dist: Vec<f64>,
    accept: Vec<bool>,
}

impl Game {
    /// Builds a game from a dense question distribution and a predicate closure.
    pub fn new<F>(
        question_alphabets: Vec<usize>,
        answer_alphabets: Vec<usize>,
        dist: Vec<f64>,
        mut predicate: F,
    ) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> bool,
    {
        let questions = TupleSpace::new(question_alphabets);
        let answers = TupleSpace::new(answer_alphabets);
        if dist.len() != questions.len() {
            return Err(Error::DimensionMismatch(format!(
                "distribution has {} entries for {} question tuples",
                dist.len(),
                questions.len()
            )));
        }
        let mut accept = vec![false; questions.len() * answers.len()];
        for q in 0..questions.len() {
            let qt = questions.decode(q);
            for a in 0..answers.len() {
                accept[q * answers.len() + a] = predicate(&qt, &answers.decode(a));
            }
        }
        let game = Game {
            questions,
            answers,
            dist,
            accept,
        };
        let report = validate_game(&game.to_definition());
        if let Some(v) = report.first() {
            return Err(Error::InvalidGame(v.to_string()));
        }
        Ok(game)
    }

    /// Uniform question distribution over the full product.
    pub fn uniform<F>(question_alphabets: Vec<usize>, answer_alphabets: Vec<usize>, predicate: F) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> bool,
    {
        let len: usize = question_alphabets.iter().product();
        Self::new(
            question_alphabets,
            answer_alphabets,
            vec![1.0 / len as f64; len],
            predicate,
        )
    }

    pub fn from_definition(def: &GameDefinition) -> Result<Self> {
        let report = validate_game(def);
        if !report.is_empty() {
            let msgs: Vec<String> = report.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidGame(msgs.join("; ")));
        }
        let questions = TupleSpace::new(def.question_alphabets.clone());
        let answers = TupleSpace::new(def.answer_alphabets.clone());
        let mut dist = vec![0.0; questions.len()];
        for e in &def.questions {
            dist[questions.encode(&e.q)] = e.p;
        }
        let mut accept = vec![false; questions.len() * answers.len()];
        for e in &def.accept {
            accept[questions.encode(&e.q) * answers.len() + answers.encode(&e.a)] = true;
        }
        Ok(Game {
            questions,
            answers,
            dist,
            accept,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let def: GameDefinition = serde_json::from_str(text)?;
        Self::from_definition(&def)
    }

    /// Serialized form; zero-probability tuples are omitted from `questions`.
    pub fn to_definition(&self) -> GameDefinition {
        let questions = (0..self.questions.len())
            .filter(|&q| self.dist[q] != 0.0)
            .map(|q| QuestionEntry {
                q: self.questions.decode(q),
                p: self.dist[q],
            })
            .collect();
        let mut accept = Vec::new();
        for q in 0..self.questions.len() {
            for a in 0..self.answers.len() {
                if self.accepts(q, a) {
                    accept.push(AcceptEntry {
                        q: self.questions.decode(q),
                        a: self.answers.decode(a),
                    });
                }
            }
        }
        GameDefinition {
            players: self.players(),
            question_alphabets: self.questions.radices().to_vec(),
            answer_alphabets: self.answers.radices().to_vec(),
            questions,
            accept,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_definition()).expect("game serializes")
    }

    /// Same alphabets and predicate with a different question distribution.
    pub fn with_distribution(&self, dist: Vec<f64>) -> Result<Self> {
        let game = Game {
            questions: self.questions.clone(),
            answers: self.answers.clone(),
            dist,
            accept: self.accept.clone(),
        };
        if game.dist.len() != game.questions.len() {
            return Err(Error::DimensionMismatch("distribution length".into()));
        }
        if let Some(v) = validate_game(&game.to_definition()).first() {
            return Err(Error::InvalidGame(v.to_string()));
        }
        Ok(game)
    }

    pub fn players(&self) -> usize {
        self.questions.arity()
    }

    pub fn question_space(&self) -> &TupleSpace {
        &self.questions
    }

    pub fn answer_space(&self) -> &TupleSpace {
        &self.answers
    }

    /// `|Q|` over the full product of question alphabets.
    pub fn question_count(&self) -> usize {
        self.questions.len()
    }

    /// `|A|` over the full product of answer alphabets.
    pub fn answer_count(&self) -> usize {
        self.answers.len()
    }

    pub fn distribution(&self) -> &[f64] {
        &self.dist
    }

    #[inline]
    pub fn prob(&self, q: usize) -> f64 {
        self.dist[q]
    }

    #[inline]
    pub fn accepts(&self, q: usize, a: usize) -> bool {
        self.accept[q * self.answers.len() + a]
    }

    /// Smallest positive question probability.
    pub fn min_positive_prob(&self) -> f64 {
        self.dist
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn support_size(&self) -> usize {
        self.dist.iter().filter(|&&p| p > 0.0).count()
    }

    /// True iff every combination of individually-occurring questions has positive probability.
    pub fn is_complete_support(&self) -> bool {
        let m = self.players();
        let mut occurs: Vec<Vec<bool>> = (0..m)
            .map(|i| vec![false; self.questions.radix(i)])
            .collect();
        for q in 0..self.questions.len() {
            if self.dist[q] > 0.0 {
                for (i, row) in occurs.iter_mut().enumerate() {
                    row[self.questions.digit(q, i)] = true;
                }
            }
        }
        (0..self.questions.len()).all(|q| {
            let feasible = (0..m).all(|i| occurs[i][self.questions.digit(q, i)]);
            !feasible || self.dist[q] > 0.0
        })
    }

    /// Conditional `Q(q^i | q^ī)`, or `None` when `Σ_r Q(r, q^ī) = 0`.
    pub fn conditional(&self, player: usize, q: usize) -> Option<f64> {
        conditional(&self.questions, &self.dist, player, q)
    }

    /// `w(O) = Σ Q(q) R(q,a) O(a|q)`.
    pub fn winning_probability(&self, strategy: &Strategy) -> Result<f64> {
        self.check_dims(strategy.questions(), strategy.answers())?;
        let na = self.answers.len();
        let values = strategy.table().values();
        let mut total = 0.0;
        for q in 0..self.questions.len() {
            let pq = self.dist[q];
            if pq == 0.0 {
                continue;
            }
            let row = &values[q * na..(q + 1) * na];
            let acc = &self.accept[q * na..(q + 1) * na];
            let won: f64 = row.iter().zip(acc).filter(|(_, &ok)| ok).map(|(p, _)| p).sum();
            total += pq * won;
        }
        Ok(total)
    }

    pub(crate) fn check_dims(&self, questions: &TupleSpace, answers: &TupleSpace) -> Result<()> {
        if questions != &self.questions || answers != &self.answers {
            return Err(Error::DimensionMismatch(format!(
                "game has alphabets {:?}/{:?}, strategy has {:?}/{:?}",
                self.questions.radices(),
                self.answers.radices(),
                questions.radices(),
                answers.radices()
            )));
        }
        Ok(())
    }

    /// `max_{q,i} Q(q^i | q^ī)` over defined conditionals.
    pub fn max_conditional(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.players() {
            for q in 0..self.questions.len() {
                if let Some(c) = self.conditional(i, q) {
                    best = best.max(c);
                }
            }
        }
        best
    }
}

/// `Q(q^i | q^ī)` for an arbitrary distribution over `space`.
pub(crate) fn conditional(space: &TupleSpace, dist: &[f64], player: usize, q: usize) -> Option<f64> {
    let mass: f64 = (0..space.radix(player))
        .map(|r| dist[space.with_digit(q, player, r)])
        .sum();
    (mass > 0.0).then(|| dist[q] / mass)
}

/// Names accepted by [`builtin_game`].
pub const BUILTIN_NAMES: [&str; 3] = ["chsh", "gyni2", "anticorr3"];

/// Built-in example games.
///
/// * `chsh`: two players, uniform questions in `{0,1}²`, win iff `a ⊕ b = x ∧ y`.
/// * `gyni2`: two players, uniform questions in `{0,1}²`, win iff `a = y` and `b = x`.
/// * `anticorr3`: three players, questions uniform on `{(0,0,1), (0,1,0), (1,0,0)}`;
///   win iff `a¹ = a²` on `(0,0,1)`, `a¹ = a³` on `(0,1,0)`, `a² ≠ a³` on `(1,0,0)`.
pub fn builtin_game(name: &str) -> Result<Game> {
    match name {
        "chsh" => Game::uniform(vec![2, 2], vec![2, 2], |q, a| (a[0] ^ a[1]) == (q[0] & q[1])),
        "gyni2" => Game::uniform(vec![2, 2], vec![2, 2], |q, a| a[0] == q[1] && a[1] == q[0]),
        "anticorr3" => {
            let space = TupleSpace::new(vec![2, 2, 2]);
            let mut dist = vec![0.0; space.len()];
            for t in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
                dist[space.encode(&t)] = 1.0 / 3.0;
            }
            Game::new(vec![2, 2, 2], vec![2, 2, 2], dist, |q, a| match q {
                [0, 0, 1] => a[0] == a[1],
                [0, 1, 0] => a[0] == a[2],
                [1, 0, 0] => a[1] != a[2],
                _ => false,
            })
        }
        other => Err(Error::UnknownGame(other.to_string())),
    }
}
