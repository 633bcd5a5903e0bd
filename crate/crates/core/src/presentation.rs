//! Generator systems and group presentations for rearrangement models.
//!
//! Every generator is a non-identity involution, so the alphabet is closed
//! under inverses with `s⁻¹ = s`, and `s s = e` encodes inversion.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{OrderError, ReductionOrder, Word};
use crate::perm::{product_order, PermError, Permutation};
use crate::rational::{self, parse_rational};
use crate::rewrite::Rule;
use crate::{Letter, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("model size {0} is too small")]
    BadSize(usize),
    #[error("generator {0:?} has non-positive weight")]
    NonpositiveWeight(String),
    #[error("duplicate generator label {0:?}")]
    DuplicateLabel(String),
    #[error("generator {0:?} is not a non-identity involution")]
    NotInvolution(String),
    #[error("unknown generator label {0:?}")]
    UnknownLabel(String),
    #[error("relation {index} is unbalanced: sides evaluate to {lhs} and {rhs}")]
    Unbalanced {
        index: usize,
        lhs: Permutation,
        rhs: Permutation,
    },
    #[error("relation sides are identical")]
    EqualSides,
    #[error("invalid weight {0:?}")]
    BadWeight(String),
    #[error("too many generators ({0})")]
    TooManyGenerators(usize),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub perm: Permutation,
    pub weight: Rational,
}

/// An ordered generator list; list order is the default precedence, later
/// entries ≻-greater.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSystem {
    n: usize,
    generators: Vec<Generator>,
    by_label: HashMap<String, Letter>,
}

impl GeneratorSystem {
    pub fn new(n: usize, generators: Vec<Generator>) -> Result<Self, PresentationError> {
        if n < 1 {
            return Err(PresentationError::BadSize(n));
        }
        if generators.len() > Letter::MAX as usize {
            return Err(PresentationError::TooManyGenerators(generators.len()));
        }
        let mut by_label = HashMap::new();
        for (k, g) in generators.iter().enumerate() {
            if g.perm.n() != n {
                return Err(PermError::SizeMismatch(n, g.perm.n()).into());
            }
            if g.weight <= Rational::from_integer(0) {
                return Err(PresentationError::NonpositiveWeight(g.label.clone()));
            }
            if g.perm.is_identity() || !g.perm.is_involution() {
                return Err(PresentationError::NotInvolution(g.label.clone()));
            }
            if by_label.insert(g.label.clone(), k as Letter).is_some() {
                return Err(PresentationError::DuplicateLabel(g.label.clone()));
            }
        }
        Ok(GeneratorSystem {
            n,
            generators,
            by_label,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, g: Letter) -> &Generator {
        &self.generators[g as usize]
    }

    pub fn letter(&self, label: &str) -> Option<Letter> {
        self.by_label.get(label).copied()
    }

    /// Index of the generator equal to `perm`, if any.
    pub fn find(&self, perm: &Permutation) -> Option<Letter> {
        self.generators
            .iter()
            .position(|g| g.perm == *perm)
            .map(|k| k as Letter)
    }

    pub fn weights(&self) -> Vec<Rational> {
        self.generators.iter().map(|g| g.weight).collect()
    }

    /// Weighted lexicographic order with precedence equal to list order.
    pub fn default_order(&self) -> ReductionOrder {
        ReductionOrder::with_index_precedence(self.weights())
            .expect("weights validated at construction")
    }

    /// The group element `s1 s2 ... sk`, read left to right.
    pub fn evaluate(&self, w: &Word) -> Permutation {
        w.letters()
            .iter()
            .fold(Permutation::identity(self.n), |acc, &g| {
                acc.then(&self.generators[g as usize].perm)
            })
    }

    pub fn word_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Word, PresentationError> {
        labels
            .iter()
            .map(|l| {
                self.letter(l.as_ref())
                    .ok_or_else(|| PresentationError::UnknownLabel(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn labels(&self, w: &Word) -> Vec<String> {
        w.letters()
            .iter()
            .map(|&g| self.generators[g as usize].label.clone())
            .collect()
    }

    /// Space-separated labels; `e` for the empty word.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            "e".to_string()
        } else {
            self.labels(w).join(" ")
        }
    }
}

/// An equation `lhs = rhs`; a relator has an empty `rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn new(lhs: Word, rhs: Word) -> Self {
        Relation { lhs, rhs }
    }

    pub fn relator(w: Word) -> Self {
        Relation {
            lhs: w,
            rhs: Word::empty(),
        }
    }
}

/// Orients `rel` so the ≻-greater side becomes the left-hand side.
pub fn orient(rel: &Relation, ord: &ReductionOrder) -> Result<Rule, PresentationError> {
    match ord.compare(&rel.lhs, &rel.rhs) {
        std::cmp::Ordering::Greater => Ok(Rule::new(rel.lhs.clone(), rel.rhs.clone())),
        std::cmp::Ordering::Less => Ok(Rule::new(rel.rhs.clone(), rel.lhs.clone())),
        std::cmp::Ordering::Equal => Err(PresentationError::EqualSides),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    gens: GeneratorSystem,
    relations: Vec<Relation>,
}

impl Presentation {
    /// Checks that every relation is balanced.
    pub fn new(gens: GeneratorSystem, relations: Vec<Relation>) -> Result<Self, PresentationError> {
        for (index, rel) in relations.iter().enumerate() {
            for w in [&rel.lhs, &rel.rhs] {
                if let Some(&bad) = w.letters().iter().find(|&&g| g as usize >= gens.len()) {
                    return Err(PresentationError::UnknownLabel(format!("#{bad}")));
                }
            }
            let lhs = gens.evaluate(&rel.lhs);
            let rhs = gens.evaluate(&rel.rhs);
            if lhs != rhs {
                return Err(PresentationError::Unbalanced { index, lhs, rhs });
            }
        }
        Ok(Presentation { gens, relations })
    }

    /// Squares of every generator plus `(ab)^m` for each pair `a ≺ b`, with
    /// `m` the order of `ab`, followed by [`definition_relations`].
    ///
    /// Pair relators alone need not present the permutation group: for the
    /// three transpositions of `S_3` they define an infinite group.
    pub fn with_pair_relators(gens: GeneratorSystem) -> Result<Self, PresentationError> {
        let mut relations = pair_relators(&gens)?;
        relations.extend(definition_relations(&gens));
        Presentation::new(gens, relations)
    }

    /// Only the squares and pairwise-order relators.
    pub fn pair_relators_only(gens: GeneratorSystem) -> Result<Self, PresentationError> {
        let relations = pair_relators(&gens)?;
        Presentation::new(gens, relations)
    }

    pub fn generators(&self) -> &GeneratorSystem {
        &self.gens
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn from_model_file(model: &ModelFile) -> Result<Self, PresentationError> {
        let mut gens = Vec::with_capacity(model.generators.len());
        for g in &model.generators {
            let weight = parse_rational(&g.weight)
                .ok_or_else(|| PresentationError::BadWeight(g.weight.to_string()))?;
            gens.push(Generator {
                label: g.label.clone(),
                perm: Permutation::parse(&g.cycles, model.n)?,
                weight,
            });
        }
        let gens = GeneratorSystem::new(model.n, gens)?;
        match &model.relations {
            None => Presentation::with_pair_relators(gens),
            Some(rels) => {
                let relations = rels
                    .iter()
                    .map(|r| {
                        Ok(Relation::new(
                            gens.word_from_labels(&r.lhs)?,
                            gens.word_from_labels(&r.rhs)?,
                        ))
                    })
                    .collect::<Result<Vec<_>, PresentationError>>()?;
                Presentation::new(gens, relations)
            }
        }
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile {
            n: self.gens.n(),
            generators: self
                .gens
                .generators()
                .iter()
                .map(|g| GeneratorSpec {
                    label: g.label.clone(),
                    cycles: g.perm.to_string(),
                    weight: rational::to_json(&g.weight),
                })
                .collect(),
            relations: Some(
                self.relations
                    .iter()
                    .map(|r| RelationSpec {
                        lhs: self.gens.labels(&r.lhs),
                        rhs: self.gens.labels(&r.rhs),
                    })
                    .collect(),
            ),
        }
    }
}

/// When every adjacent transposition `(k,k+1)` is a generator, one relation
/// `g = h·s_{k1}·…·s_{km}` per remaining generator `g`, where `h` is a
/// generator defined before `g` (or absent) and the tail is the shortest
/// adjacent factorization found. Together with the Coxeter relations among
/// the adjacent transpositions, which the pair relators contain, these make
/// the presentation faithful for `S_n`. Empty otherwise.
pub fn definition_relations(gens: &GeneratorSystem) -> Vec<Relation> {
    let n = gens.n();
    let mut adjacent = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        match Permutation::transposition(k, k + 1, n).ok().and_then(|t| gens.find(&t)) {
            Some(g) => adjacent.push(g),
            None => return Vec::new(),
        }
    }
    let mut rest: Vec<Letter> = (0..gens.len() as Letter)
        .filter(|g| !adjacent.contains(g))
        .collect();
    rest.sort_by_key(|&g| (gens.generator(g).perm.inversion_count(), g));
    let mut defined: Vec<Letter> = Vec::new();
    let mut out = Vec::new();
    for g in rest {
        let target = &gens.generator(g).perm;
        let mut best: Vec<Letter> = target
            .adjacent_factorization()
            .into_iter()
            .map(|k| adjacent[k - 1])
            .collect();
        for &h in &defined {
            let tail = gens.generator(h).perm.inverse().then(target).adjacent_factorization();
            if tail.len() + 1 < best.len() {
                best = std::iter::once(h)
                    .chain(tail.into_iter().map(|k| adjacent[k - 1]))
                    .collect();
            }
        }
        out.push(Relation::new(Word(vec![g]), Word(best)));
        defined.push(g);
    }
    out
}

fn pair_relators(gens: &GeneratorSystem) -> Result<Vec<Relation>, PresentationError> {
    let k = gens.len();
    let mut out = Vec::new();
    for a in 0..k {
        out.push(Relation::relator(Word(vec![a as Letter, a as Letter])));
    }
    for a in 0..k {
        for b in a + 1..k {
            let m = product_order(&gens.generators[a].perm, &gens.generators[b].perm)?;
            let mut w = Vec::with_capacity(2 * m);
            for _ in 0..m {
                w.push(a as Letter);
                w.push(b as Letter);
            }
            out.push(Relation::relator(Word(w)));
        }
    }
    Ok(out)
}

/// Coxeter presentation of `S_n` on the adjacent transpositions, unit weights.
pub fn coxeter_presentation(n: usize) -> Result<Presentation, PresentationError> {
    if n < 2 {
        return Err(PresentationError::BadSize(n));
    }
    let gens = adjacent_generators(n)?;
    let k = n - 1;
    let s = |i: usize| (i - 1) as Letter;
    let mut rels = Vec::new();
    for i in 1..=k {
        rels.push(Relation::relator(Word(vec![s(i), s(i)])));
    }
    for i in 1..=k {
        for j in i + 2..=k {
            rels.push(Relation::new(Word(vec![s(i), s(j)]), Word(vec![s(j), s(i)])));
        }
    }
    for i in 1..k {
        rels.push(Relation::new(
            Word(vec![s(i), s(i + 1), s(i)]),
            Word(vec![s(i + 1), s(i), s(i + 1)]),
        ));
    }
    Presentation::new(GeneratorSystem::new(n, gens)?, rels)
}

fn adjacent_generators(n: usize) -> Result<Vec<Generator>, PresentationError> {
    (1..n)
        .map(|i| {
            Ok(Generator {
                label: format!("s{i}"),
                perm: Permutation::inversion(i, i + 1, n)?,
                weight: Rational::from_integer(1),
            })
        })
        .collect()
}

/// Generator precedence for the all-inversions model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precedence {
    /// Sort by weight, then `i`, then `j`.
    #[default]
    WeightIJ,
    /// Sort by `i`, then `j`.
    IJ,
}

/// All inversions `t_{i,j}`, `1 <= i < j <= n`, weighted by `weight(i, j)`,
/// with the pairwise-order relators and the definition relations.
pub fn linear_inversions_presentation<F>(
    n: usize,
    weight: F,
    precedence: Precedence,
) -> Result<Presentation, PresentationError>
where
    F: Fn(usize, usize) -> Rational,
{
    if n < 2 {
        return Err(PresentationError::BadSize(n));
    }
    let mut entries = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let w = weight(i, j);
            if w <= Rational::from_integer(0) {
                return Err(PresentationError::NonpositiveWeight(inversion_label(i, j)));
            }
            entries.push((w, i, j));
        }
    }
    match precedence {
        Precedence::WeightIJ => entries.sort(),
        Precedence::IJ => entries.sort_by_key(|&(_, i, j)| (i, j)),
    }
    let gens = entries
        .into_iter()
        .map(|(w, i, j)| {
            Ok(Generator {
                label: inversion_label(i, j),
                perm: Permutation::inversion(i, j, n)?,
                weight: w,
            })
        })
        .collect::<Result<Vec<_>, PresentationError>>()?;
    Presentation::with_pair_relators(GeneratorSystem::new(n, gens)?)
}

/// Linear model with `ω(t_{i,j}) = j - i`.
pub fn length_weighted_presentation(
    n: usize,
    precedence: Precedence,
) -> Result<Presentation, PresentationError> {
    linear_inversions_presentation(n, |i, j| Rational::from_integer((j - i) as i64), precedence)
}

/// Linear model with every inversion at unit weight.
pub fn unit_weighted_presentation(
    n: usize,
    precedence: Precedence,
) -> Result<Presentation, PresentationError> {
    linear_inversions_presentation(n, |_, _| Rational::from_integer(1), precedence)
}

pub fn inversion_label(i: usize, j: usize) -> String {
    format!("t{i}_{j}")
}

/// Circular model: `s_i = (i, i+1)` for `i < n` and `s_n = (1, n)`, unit
/// weights.
pub fn circular_presentation(n: usize) -> Result<Presentation, PresentationError> {
    if n < 3 {
        return Err(PresentationError::BadSize(n));
    }
    let mut gens = adjacent_generators(n)?;
    gens.push(Generator {
        label: format!("s{n}"),
        perm: Permutation::transposition(1, n, n)?,
        weight: Rational::from_integer(1),
    });
    let s = |i: usize| (i - 1) as Letter;
    let mut rels = Vec::new();
    for i in 1..=n {
        rels.push(Relation::relator(Word(vec![s(i), s(i)])));
    }
    // commute unless adjacent on the circle
    for i in 1..=n {
        for j in i + 1..=n {
            let d = j - i;
            if d != 1 && d != n - 1 {
                rels.push(Relation::new(Word(vec![s(i), s(j)]), Word(vec![s(j), s(i)])));
            }
        }
    }
    for i in 1..n {
        rels.push(Relation::new(
            Word(vec![s(i), s(i + 1), s(i)]),
            Word(vec![s(i + 1), s(i), s(i + 1)]),
        ));
    }
    // s_n = s_{n-1} ... s_2 s_1 s_2 ... s_{n-1}
    let mut long: Vec<Letter> = (1..n).rev().map(s).collect();
    long.extend((2..n).map(s));
    rels.push(Relation::new(Word(vec![s(n)]), Word(long)));
    Presentation::new(GeneratorSystem::new(n, gens)?, rels)
}

/// JSON model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<RelationSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub label: String,
    pub cycles: String,
    /// A JSON number or a `"p/q"` string.
    pub weight: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}
