//! Mixed-radix indexing of question and answer tuples.
//!
//! A tuple `(x_0, .., x_{m-1})` with per-player alphabet sizes `(k_0, .., k_{m-1})`
//! is stored as the integer `x_0 * k_1 * .. * k_{m-1} + .. + x_{m-1}`, so player 0 is
//! the most significant digit and the natural order is lexicographic.

use serde::{Deserialize, Serialize};

/// The Cartesian product of per-player alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct TupleSpace {
    radices: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl From<Vec<usize>> for TupleSpace {
    fn from(radices: Vec<usize>) -> Self {
        Self::new(radices)
    }
}

impl From<TupleSpace> for Vec<usize> {
    fn from(space: TupleSpace) -> Self {
        space.radices
    }
}

impl TupleSpace {
    pub fn new(radices: Vec<usize>) -> Self {
        let mut strides = vec![1; radices.len()];
        let mut len = 1usize;
        for i in (0..radices.len()).rev() {
            strides[i] = len;
            len *= radices[i];
        }
        Self {
            radices,
            strides,
            len,
        }
    }

    /// Number of tuples in the product.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of players (digits).
    pub fn arity(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn radix(&self, player: usize) -> usize {
        self.radices[player]
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.radices.len() && tuple.iter().zip(&self.radices).all(|(x, k)| x < k)
    }

    /// Index of a tuple. Panics in debug builds if out of range.
    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert!(self.contains(tuple), "tuple {tuple:?} outside {:?}", self.radices);
        tuple.iter().zip(&self.strides).map(|(x, s)| x * s).sum()
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        (0..self.arity()).map(|i| self.digit(index, i)).collect()
    }

    /// The `player`-th entry of the tuple with the given index.
    #[inline]
    pub fn digit(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.radices[player]
    }

    /// Replaces the `player`-th entry of a tuple index.
    #[inline]
    pub fn with_digit(&self, index: usize, player: usize, value: usize) -> usize {
        let old = self.digit(index, player);
        index - old * self.strides[player] + value * self.strides[player]
    }

    /// The space of tuples with `player` removed.
    pub fn without(&self, player: usize) -> TupleSpace {
        let mut radices = self.radices.clone();
        radices.remove(player);
        TupleSpace::new(radices)
    }

    /// Index of the sub-tuple obtained by dropping `player`, inside `self.without(player)`.
    #[inline]
    pub fn drop_digit(&self, index: usize, player: usize) -> usize {
        let stride = self.strides[player];
        let high = index / (stride * self.radices[player]);
        let low = index % stride;
        high * stride + low
    }

    /// Inverse of [`drop_digit`](Self::drop_digit): re-inserts `value` for `player`.
    #[inline]
    pub fn insert_digit(&self, rest: usize, player: usize, value: usize) -> usize {
        let stride = self.strides[player];
        let high = rest / stride;
        let low = rest % stride;
        (high * self.radices[player] + value) * stride + low
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len).map(move |i| self.decode(i))
    }
}
