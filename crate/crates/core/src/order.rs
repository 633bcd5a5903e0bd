//! Words over a generator alphabet and the weighted lexicographic order.

use std::cmp::Ordering;
use std::fmt;

use crate::{Letter, Rational};

/// A finite sequence of generator indices. The empty word denotes `e`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// The formal inverse when every generator is an involution.
    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Whether `pattern` occurs as a contiguous factor.
    pub fn contains_factor(&self, pattern: &[Letter]) -> bool {
        contains_factor(&self.0, pattern)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub(crate) fn contains_factor(hay: &[Letter], pattern: &[Letter]) -> bool {
    if pattern.is_empty() {
        return true;
    }
    if pattern.len() > hay.len() {
        return false;
    }
    hay.windows(pattern.len()).any(|w| w == pattern)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("generator {0} has non-positive weight")]
    NonpositiveWeight(usize),
    #[error("precedence is not a permutation of the {0} generators")]
    BadPrecedence(usize),
}

/// Weighted lexicographic order: compare total weight, then the letters at
/// the first differing position by precedence.
///
/// Weights are kept exactly; comparisons use integer weights scaled by the
/// least common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOrder {
    weights: Vec<Rational>,
    /// `rank[g]` is the precedence of generator `g`; larger is ≻-greater.
    rank: Vec<u32>,
    scaled: Vec<u64>,
    scale: i64,
}

impl ReductionOrder {
    /// `precedence` lists generator indices from ≺-least to ≻-greatest.
    pub fn new(weights: Vec<Rational>, precedence: &[usize]) -> Result<Self, OrderError> {
        let k = weights.len();
        if let Some(g) = weights.iter().position(|w| *w <= Rational::from_integer(0)) {
            return Err(OrderError::NonpositiveWeight(g));
        }
        let mut rank = vec![u32::MAX; k];
        if precedence.len() != k {
            return Err(OrderError::BadPrecedence(k));
        }
        for (r, &g) in precedence.iter().enumerate() {
            if g >= k || rank[g] != u32::MAX {
                return Err(OrderError::BadPrecedence(k));
            }
            rank[g] = r as u32;
        }
        let scale = weights
            .iter()
            .fold(1i64, |acc, w| num::integer::lcm(acc, *w.denom()));
        let scaled = weights
            .iter()
            .map(|w| (w.numer() * (scale / w.denom())) as u64)
            .collect();
        Ok(ReductionOrder {
            weights,
            rank,
            scaled,
            scale,
        })
    }

    /// Precedence equal to generator index order.
    pub fn with_index_precedence(weights: Vec<Rational>) -> Result<Self, OrderError> {
        let prec: Vec<usize> = (0..weights.len()).collect();
        Self::new(weights, &prec)
    }

    pub fn generator_count(&self) -> usize {
        self.weights.len()
    }

    pub fn generator_weight(&self, g: Letter) -> Rational {
        self.weights[g as usize]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Generator indices from ≺-least to ≻-greatest.
    pub fn precedence(&self) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.rank.len()).collect();
        p.sort_by_key(|&g| self.rank[g]);
        p
    }

    pub fn weight(&self, w: &Word) -> Rational {
        Rational::new(self.scaled_weight(&w.0) as i64, self.scale)
    }

    pub(crate) fn scaled_weight(&self, letters: &[Letter]) -> u64 {
        letters.iter().map(|&g| self.scaled[g as usize]).sum()
    }

    pub fn compare(&self, u: &Word, v: &Word) -> Ordering {
        self.compare_letters(&u.0, &v.0)
    }

    pub(crate) fn compare_letters(&self, u: &[Letter], v: &[Letter]) -> Ordering {
        let by_weight = self.scaled_weight(u).cmp(&self.scaled_weight(v));
        if by_weight != Ordering::Equal {
            return by_weight;
        }
        for (a, b) in u.iter().zip(v) {
            if a != b {
                return self.rank[*a as usize].cmp(&self.rank[*b as usize]);
            }
        }
        // equal weight and one word is a prefix of the other
        u.len().cmp(&v.len())
    }

    pub fn greater(&self, u: &Word, v: &Word) -> bool {
        self.compare(u, v) == Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn w(v: &[Letter]) -> Word {
        Word(v.to_vec())
    }

    #[test]
    fn weights_of_words() {
        // t12, t23, t13 with weight j - i
        let ord = ReductionOrder::with_index_precedence(vec![r(1), r(1), r(2)]).unwrap();
        assert_eq!(ord.weight(&Word::empty()), r(0));
        assert_eq!(ord.weight(&w(&[2])), r(2));
        let unit = ReductionOrder::with_index_precedence(vec![r(1); 3]).unwrap();
        assert_eq!(unit.weight(&w(&[1, 2, 1, 0, 2, 0, 1, 2])), r(8));
    }

    #[test]
    fn weight_of_long_inversion() {
        // t_{1,4} has weight 3
        let ord = ReductionOrder::with_index_precedence(vec![r(1), r(3)]).unwrap();
        assert_eq!(ord.weight(&w(&[1])), r(3));
    }

    #[test]
    fn comparisons() {
        let ord = ReductionOrder::with_index_precedence(vec![r(1), r(1), r(2)]).unwrap();
        assert_eq!(ord.compare(&Word::empty(), &w(&[0])), Ordering::Less);
        // [t13] vs [t12, t23]: equal weight, t13 ≻ t12
        assert_eq!(ord.compare(&w(&[2]), &w(&[0, 1])), Ordering::Greater);
        let unit = ReductionOrder::with_index_precedence(vec![r(1); 2]).unwrap();
        assert_eq!(unit.compare(&w(&[1, 0, 1]), &w(&[0, 1, 0])), Ordering::Greater);
        assert_eq!(unit.compare(&w(&[1, 0, 1]), &w(&[1, 0, 1])), Ordering::Equal);
    }

    #[test]
    fn custom_precedence() {
        let ord = ReductionOrder::new(vec![r(1), r(1)], &[1, 0]).unwrap();
        assert_eq!(ord.compare(&w(&[0]), &w(&[1])), Ordering::Greater);
        assert_eq!(ord.precedence(), vec![1, 0]);
    }

    #[test]
    fn rational_weights_scale_exactly() {
        let ord = ReductionOrder::with_index_precedence(vec![Rational::new(1, 2), Rational::new(1, 3)])
            .unwrap();
        assert_eq!(ord.weight(&w(&[0, 1, 1])), Rational::new(7, 6));
        // 1/2 + 1/2 + 1/2 = 3/2 > 1/3 * 4 = 4/3
        assert_eq!(ord.compare(&w(&[0, 0, 0]), &w(&[1, 1, 1, 1])), Ordering::Greater);
    }

    #[test]
    fn invalid_orders() {
        assert_eq!(
            ReductionOrder::with_index_precedence(vec![r(1), r(0)]),
            Err(OrderError::NonpositiveWeight(1))
        );
        assert_eq!(
            ReductionOrder::new(vec![r(1), r(1)], &[0, 0]),
            Err(OrderError::BadPrecedence(2))
        );
    }
}
