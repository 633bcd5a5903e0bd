//! Weighted distances between genomes by normal-form reduction.

use rayon::prelude::*;
use thiserror::Error;

use crate::order::Word;
use crate::perm::{dihedral_symmetries, Permutation, Symmetry};
use crate::phylo::{DistanceMatrix, PhyloError};
use crate::presentation::GeneratorSystem;
use crate::rewrite::{RewritingSystem, Status};
use crate::Rational;

#[derive(Debug, Error)]
pub enum DistanceError {
    #[error("model has no generator for the adjacent inversion at position {0}")]
    NoAdjacentGenerators(usize),
    #[error("genome size {got} does not match model size {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("rewriting system is not confluent; distances would not be minimal")]
    NotConfluent,
    #[error("witness does not evaluate to the target element")]
    WitnessMismatch,
    #[error(transparent)]
    Matrix(#[from] PhyloError),
}

/// A distance with the normal-form word that realizes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distance {
    pub value: Rational,
    pub witness: Word,
    /// The dihedral symmetry used, for circular distances.
    pub symmetry: Option<Symmetry>,
}

/// The element `π′π⁻¹` taking `source` to `target`: `compose(g, source) = target`.
pub fn group_element(source: &Permutation, target: &Permutation) -> Result<Permutation, DistanceError> {
    if source.n() != target.n() {
        return Err(DistanceError::SizeMismatch {
            expected: source.n(),
            got: target.n(),
        });
    }
    Ok(target.then(&source.inverse()))
}

/// A word for `g` over the adjacent inversions, by bubble sort.
pub fn initial_word(g: &Permutation, gens: &GeneratorSystem) -> Result<Word, DistanceError> {
    let n = gens.n();
    if g.n() != n {
        return Err(DistanceError::SizeMismatch { expected: n, got: g.n() });
    }
    let mut adjacent = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let t = Permutation::transposition(k, k + 1, n).expect("valid adjacent pair");
        adjacent.push(gens.find(&t).ok_or(DistanceError::NoAdjacentGenerators(k))?);
    }
    Ok(Word(
        g.adjacent_factorization()
            .into_iter()
            .map(|k| adjacent[k - 1])
            .collect(),
    ))
}

fn check(sys: &RewritingSystem, p: &Permutation) -> Result<(), DistanceError> {
    if sys.status() != Status::Confluent {
        return Err(DistanceError::NotConfluent);
    }
    let n = sys.generators().n();
    if p.n() != n {
        return Err(DistanceError::SizeMismatch { expected: n, got: p.n() });
    }
    Ok(())
}

/// Weighted length of the group element `g`.
pub fn element_distance(g: &Permutation, sys: &RewritingSystem) -> Result<Distance, DistanceError> {
    check(sys, g)?;
    let witness = sys.reduce(&initial_word(g, sys.generators())?);
    if sys.generators().evaluate(&witness) != *g {
        return Err(DistanceError::WitnessMismatch);
    }
    Ok(Distance {
        value: sys.order().weight(&witness),
        witness,
        symmetry: None,
    })
}

pub fn weighted_distance(
    source: &Permutation,
    target: &Permutation,
    sys: &RewritingSystem,
) -> Result<Distance, DistanceError> {
    check(sys, source)?;
    let g = group_element(source, target)?;
    let d = element_distance(&g, sys)?;
    debug_assert_eq!(sys.generators().evaluate(&d.witness).then(source), *target);
    Ok(d)
}

/// Minimum of the weighted length of `compose(d, g)` over the dihedral
/// symmetries `d` of the position circle. Ties keep the first symmetry,
/// rotations before reflections.
pub fn circular_element_distance(g: &Permutation, sys: &RewritingSystem) -> Result<Distance, DistanceError> {
    check(sys, g)?;
    let mut best: Option<Distance> = None;
    for (sym, d) in dihedral_symmetries(g.n()) {
        let mut cand = element_distance(&d.then(g), sys)?;
        if best.as_ref().is_none_or(|b| cand.value < b.value) {
            cand.symmetry = Some(sym);
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one symmetry"))
}

pub fn circular_distance(
    source: &Permutation,
    target: &Permutation,
    sys: &RewritingSystem,
) -> Result<Distance, DistanceError> {
    check(sys, source)?;
    circular_element_distance(&group_element(source, target)?, sys)
}

/// Pairwise distances, computed in parallel.
pub fn distance_matrix(
    genomes: &[(String, Permutation)],
    sys: &RewritingSystem,
    circular: bool,
) -> Result<DistanceMatrix, DistanceError> {
    let k = genomes.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&genomes[i].1, &genomes[j].1);
            let d = if circular {
                circular_distance(a, b, sys)?
            } else {
                weighted_distance(a, b, sys)?
            };
            Ok(d.value)
        })
        .collect::<Result<Vec<Rational>, DistanceError>>()?;
    let mut entries = vec![vec![Rational::from_integer(0); k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        entries[i][j] = v;
        entries[j][i] = v;
    }
    let labels = genomes.iter().map(|(l, _)| l.clone()).collect();
    Ok(DistanceMatrix::new(labels, entries)?)
}
