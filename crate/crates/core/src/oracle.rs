//! Cayley-graph shortest paths over all of `S_n`, used as ground truth for
//! the rewriting path.
//!
//! States are permutations ranked by their Lehmer code into `0..n!`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::perm::{dihedral_symmetries, Permutation};
use crate::presentation::GeneratorSystem;
use crate::Rational;

pub const DEFAULT_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the exhaustive search limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("element is not generated by the model's generators")]
    NotGenerated,
    #[error("permutation size {got} does not match search size {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lehmer-code rank of a permutation in `0..n!`.
pub fn lehmer_rank(p: &Permutation) -> usize {
    let v = p.one_line();
    let n = v.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = v[i + 1..].iter().filter(|&&x| x < v[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// Inverse of [`lehmer_rank`].
pub fn lehmer_unrank(mut rank: usize, n: usize) -> Permutation {
    let mut digits = vec![0; n];
    for i in (0..n).rev() {
        let base = n - i;
        digits[i] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<usize> = (1..=n).collect();
    let images: Vec<usize> = digits.into_iter().map(|d| pool.remove(d)).collect();
    Permutation::from_images(&images).expect("unranked images are a permutation")
}

/// The Cayley graph of `S_n` with one weighted edge per generator.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    n: usize,
    gens: Vec<(Permutation, Rational)>,
}

impl CayleyGraph {
    pub fn new(gens: &GeneratorSystem) -> Result<Self, OracleError> {
        Self::with_limit(gens, DEFAULT_MAX_N)
    }

    pub fn with_limit(gens: &GeneratorSystem, max_n: usize) -> Result<Self, OracleError> {
        let edges = gens.generators().iter().map(|g| (g.perm.clone(), g.weight)).collect();
        Self::from_edges(gens.n(), edges, max_n)
    }

    /// All inversions `t_{i,j}` at unit weight.
    pub fn all_inversions(n: usize, max_n: usize) -> Result<Self, OracleError> {
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let t = Permutation::inversion(i, j, n).expect("valid inversion");
                edges.push((t, Rational::from_integer(1)));
            }
        }
        Self::from_edges(n, edges, max_n)
    }

    fn from_edges(n: usize, gens: Vec<(Permutation, Rational)>, max_n: usize) -> Result<Self, OracleError> {
        if n > max_n {
            return Err(OracleError::TooLarge { n, limit: max_n });
        }
        Ok(CayleyGraph { n, gens })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        factorial(self.n)
    }

    fn neighbours(&self, state: &Permutation) -> impl Iterator<Item = (Permutation, Rational)> + '_ {
        let state = state.clone();
        self.gens.iter().map(move |(g, w)| (state.then(g), *w))
    }

    /// Uniform-cost search from the identity to `g`.
    pub fn dijkstra_distance(&self, g: &Permutation) -> Result<Rational, OracleError> {
        if g.n() != self.n {
            return Err(OracleError::SizeMismatch { expected: self.n, got: g.n() });
        }
        let target = lehmer_rank(g);
        self.search(Some(target))[target].ok_or(OracleError::NotGenerated)
    }

    /// Weighted distance from the identity to every element, by rank.
    pub fn dijkstra_all(&self) -> Vec<Option<Rational>> {
        self.search(None)
    }

    fn search(&self, stop_at: Option<usize>) -> Vec<Option<Rational>> {
        let size = self.order();
        let mut dist: Vec<Option<Rational>> = vec![None; size];
        let mut done = vec![false; size];
        let mut heap = BinaryHeap::new();
        let start = lehmer_rank(&Permutation::identity(self.n));
        dist[start] = Some(Rational::from_integer(0));
        heap.push(Reverse((Rational::from_integer(0), start)));
        while let Some(Reverse((d, rank))) = heap.pop() {
            if done[rank] {
                continue;
            }
            done[rank] = true;
            if stop_at == Some(rank) {
                break;
            }
            let state = lehmer_unrank(rank, self.n);
            for (next, w) in self.neighbours(&state) {
                let r = lehmer_rank(&next);
                let nd = d + w;
                if !done[r] && dist[r].is_none_or(|old| nd < old) {
                    dist[r] = Some(nd);
                    heap.push(Reverse((nd, r)));
                }
            }
        }
        dist
    }

    /// Edge count from the identity to every element, ignoring weights.
    pub fn bfs_all(&self) -> Vec<Option<u32>> {
        let size = self.order();
        let mut dist: Vec<Option<u32>> = vec![None; size];
        let start = lehmer_rank(&Permutation::identity(self.n));
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(rank) = queue.pop_front() {
            let d = dist[rank].expect("queued states are labelled");
            let state = lehmer_unrank(rank, self.n);
            for (next, _) in self.neighbours(&state) {
                let r = lehmer_rank(&next);
                if dist[r].is_none() {
                    dist[r] = Some(d + 1);
                    queue.push_back(r);
                }
            }
        }
        dist
    }
}

/// Number of unsigned inversions needed to produce `g`, by breadth-first
/// search over all `t_{i,j}`.
pub fn bfs_unit_distance(g: &Permutation, max_n: usize) -> Result<u32, OracleError> {
    let graph = CayleyGraph::all_inversions(g.n(), max_n)?;
    graph.bfs_all()[lehmer_rank(g)].ok_or(OracleError::NotGenerated)
}

/// Adjacent-transposition distance: the number of discordant pairs.
pub fn coxeter_distance(g: &Permutation) -> usize {
    g.inversion_count()
}

/// Minimum of `f(compose(d, g))` over the dihedral symmetries `d`.
pub fn dihedral_min_distance<T, E, F>(g: &Permutation, mut f: F) -> Result<T, E>
where
    T: Ord,
    F: FnMut(&Permutation) -> Result<T, E>,
{
    let mut best: Option<T> = None;
    for (_, d) in dihedral_symmetries(g.n()) {
        let v = f(&d.then(g))?;
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("at least one symmetry"))
}

/// Precomputed distances for every element of `S_n`.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<Option<Rational>>,
}

impl DistanceTable {
    pub fn weighted(graph: &CayleyGraph) -> Self {
        DistanceTable {
            n: graph.n(),
            dist: graph.dijkstra_all(),
        }
    }

    pub fn unit(graph: &CayleyGraph) -> Self {
        DistanceTable {
            n: graph.n(),
            dist: graph
                .bfs_all()
                .into_iter()
                .map(|d| d.map(|d| Rational::from_integer(d as i64)))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, g: &Permutation) -> Result<Rational, OracleError> {
        if g.n() != self.n {
            return Err(OracleError::SizeMismatch { expected: self.n, got: g.n() });
        }
        self.dist[lehmer_rank(g)].ok_or(OracleError::NotGenerated)
    }

    pub fn dihedral_min(&self, g: &Permutation) -> Result<Rational, OracleError> {
        dihedral_min_distance(g, |h| self.get(h))
    }

    /// Distance between two genomes, `π′π⁻¹` as in the rewriting path.
    pub fn between(&self, source: &Permutation, target: &Permutation, circular: bool) -> Result<Rational, OracleError> {
        if source.n() != target.n() {
            return Err(OracleError::SizeMismatch { expected: source.n(), got: target.n() });
        }
        let g = target.then(&source.inverse());
        if circular {
            self.dihedral_min(&g)
        } else {
            self.get(&g)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{circular_presentation, coxeter_presentation, length_weighted_presentation, Precedence};

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, n).unwrap()
    }

    fn int(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn lehmer_is_a_bijection() {
        for n in 1..=6 {
            let mut seen = vec![false; factorial(n)];
            for r in 0..factorial(n) {
                let q = lehmer_unrank(r, n);
                assert_eq!(lehmer_rank(&q), r);
                assert!(!seen[r]);
                seen[r] = true;
            }
        }
        assert_eq!(lehmer_rank(&Permutation::identity(5)), 0);
    }

    #[test]
    fn dijkstra_examples() {
        let pres = length_weighted_presentation(3, Precedence::WeightIJ).unwrap();
        let g = CayleyGraph::new(pres.generators()).unwrap();
        assert_eq!(g.dijkstra_distance(&Permutation::identity(3)).unwrap(), int(0));
        assert_eq!(g.dijkstra_distance(&p("(1,3)", 3)).unwrap(), int(2));
        assert_eq!(g.dijkstra_distance(&p("(1,2)", 3)).unwrap(), int(1));
        assert!(matches!(
            g.dijkstra_distance(&Permutation::identity(4)),
            Err(OracleError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn not_generated() {
        let gens = GeneratorSystem::new(
            3,
            vec![crate::presentation::Generator {
                label: "a".into(),
                perm: p("(1,2)", 3),
                weight: int(1),
            }],
        )
        .unwrap();
        let g = CayleyGraph::new(&gens).unwrap();
        assert_eq!(g.dijkstra_distance(&p("(2,3)", 3)), Err(OracleError::NotGenerated));
    }

    #[test]
    fn size_limit() {
        let pres = coxeter_presentation(9).unwrap();
        assert_eq!(
            CayleyGraph::new(pres.generators()).unwrap_err(),
            OracleError::TooLarge { n: 9, limit: 8 }
        );
        assert!(CayleyGraph::with_limit(pres.generators(), 9).is_ok());
    }

    #[test]
    fn unit_and_coxeter() {
        assert_eq!(bfs_unit_distance(&Permutation::identity(5), 8).unwrap(), 0);
        for i in 1..=5 {
            for j in i + 1..=5 {
                let t = Permutation::inversion(i, j, 5).unwrap();
                assert_eq!(bfs_unit_distance(&t, 8).unwrap(), 1);
            }
        }
        assert_eq!(coxeter_distance(&Permutation::identity(4)), 0);
        assert_eq!(coxeter_distance(&p("(2,3)", 4)), 1);
        assert_eq!(coxeter_distance(&Permutation::from_images(&[4, 3, 2, 1]).unwrap()), 6);
    }

    #[test]
    fn coxeter_oracle_matches_inversion_count() {
        let pres = coxeter_presentation(5).unwrap();
        let table = DistanceTable::weighted(&CayleyGraph::new(pres.generators()).unwrap());
        for r in 0..120 {
            let g = lehmer_unrank(r, 5);
            assert_eq!(table.get(&g).unwrap(), int(coxeter_distance(&g) as i64));
        }
    }

    #[test]
    fn dihedral_minimum() {
        let pres = circular_presentation(6).unwrap();
        let table = DistanceTable::weighted(&CayleyGraph::new(pres.generators()).unwrap());
        assert_eq!(table.dihedral_min(&Permutation::identity(6)).unwrap(), int(0));
        assert_eq!(table.dihedral_min(&p("(1,2,3,4,5,6)", 6)).unwrap(), int(0));
        assert_eq!(table.dihedral_min(&p("(3,4)", 6)).unwrap(), int(1));
        // invariant under conjugation by a symmetry
        let g = p("(1,3)(2,5,4)", 6);
        let base = table.dihedral_min(&g).unwrap();
        for (_, d) in dihedral_symmetries(6) {
            let conj = d.inverse().then(&g).then(&d);
            assert_eq!(table.dihedral_min(&conj).unwrap(), base);
        }
    }
}
