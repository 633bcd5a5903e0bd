//! Permutations of the positions `1..=n`.
//!
//! Products are read left to right: `a.then(&b)` is the map `x ↦ b(a(x))`,
//! so a word `[s1, s2, ..., sk]` evaluates as a left fold. Every public
//! interface speaks 1-based positions; storage is 0-based.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("bad inversion indices ({i}, {j}) for n = {n}")]
    BadIndices { i: usize, j: usize, n: usize },
    #[error("cannot parse permutation {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("symbol {symbol} out of range 1..={n}")]
    OutOfRange { symbol: usize, n: usize },
    #[error("symbol {0} appears more than once")]
    Duplicate(usize),
}

/// A bijection on `{1, ..., n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u16>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u16).collect(),
        }
    }

    /// Builds a permutation from its one-line form, `images[x - 1] = p(x)`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &v in images {
            if v == 0 || v > n {
                return Err(PermError::OutOfRange { symbol: v, n });
            }
            if seen[v - 1] {
                return Err(PermError::Duplicate(v));
            }
            seen[v - 1] = true;
            out.push((v - 1) as u16);
        }
        Ok(Permutation { images: out })
    }

    /// Builds a permutation on `n` points from disjoint or overlapping
    /// cycles, multiplied left to right.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut p = Permutation::identity(n);
        for cycle in cycles {
            let mut seen = Vec::with_capacity(cycle.len());
            for &x in cycle {
                if x == 0 || x > n {
                    return Err(PermError::OutOfRange { symbol: x, n });
                }
                if seen.contains(&x) {
                    return Err(PermError::Duplicate(x));
                }
                seen.push(x);
            }
            let mut c = Permutation::identity(n);
            for (k, &x) in cycle.iter().enumerate() {
                let y = cycle[(k + 1) % cycle.len()];
                c.images[x - 1] = (y - 1) as u16;
            }
            p = p.then(&c);
        }
        Ok(p)
    }

    /// The inversion flipping the segment of positions `i..=j`:
    /// `(i, j)(i+1, j-1)...`.
    pub fn inversion(i: usize, j: usize, n: usize) -> Result<Self, PermError> {
        if i == 0 || i >= j || j > n {
            return Err(PermError::BadIndices { i, j, n });
        }
        let mut p = Permutation::identity(n);
        for k in 0..=(j - i) {
            p.images[i - 1 + k] = (j - 1 - k) as u16;
        }
        Ok(p)
    }

    /// The transposition `(a, b)`.
    pub fn transposition(a: usize, b: usize, n: usize) -> Result<Self, PermError> {
        for s in [a, b] {
            if s == 0 || s > n {
                return Err(PermError::OutOfRange { symbol: s, n });
            }
        }
        if a == b {
            return Err(PermError::Duplicate(a));
        }
        let mut p = Permutation::identity(n);
        p.images.swap(a - 1, b - 1);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based position `x`.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1] as usize + 1
    }

    /// One-line form, 1-based.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn is_involution(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &v)| self.images[v as usize] as usize == i)
    }

    /// The product "self, then other": `x ↦ other(self(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.n() != other.n() {
            return Err(PermError::SizeMismatch(self.n(), other.n()));
        }
        Ok(self.then(other))
    }

    /// Same as [`compose`](Self::compose) for operands already known to agree in size.
    ///
    /// Panics if the sizes differ.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n(), "permutation size mismatch");
        Permutation {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    /// Indices `k` of adjacent transpositions `(k,k+1)` whose product in
    /// order is `self`, found by bubble sort. Length equals the inversion count.
    pub fn adjacent_factorization(&self) -> Vec<usize> {
        let mut h = self.images.clone();
        let mut word = Vec::new();
        while let Some(k) = (0..h.len().saturating_sub(1)).find(|&k| h[k] > h[k + 1]) {
            h.swap(k, k + 1);
            word.push(k + 1);
        }
        word
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u16; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u16;
        }
        Permutation { images }
    }

    /// Least `m >= 1` with `self^m = e`.
    pub fn order(&self) -> usize {
        let mut lcm = 1usize;
        for cycle in self.cycles() {
            lcm = num::integer::lcm(lcm, cycle.len());
        }
        lcm
    }

    /// Nontrivial cycles, each starting at its minimum, sorted by minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Number of discordant pairs in the one-line form.
    pub fn inversion_count(&self) -> usize {
        let v = &self.images;
        let mut count = 0;
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                if v[a] > v[b] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Parses cycle notation (`"(1,4)(3,7,6)"`, `"()"`) or one-line
    /// notation (`"4 2 7 1 5 3 6"`) on `n` points.
    pub fn parse(text: &str, n: usize) -> Result<Permutation, PermError> {
        let trimmed = text.trim();
        let err = |reason: &str| PermError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        if trimmed.is_empty() {
            return Err(err("empty input"));
        }
        if trimmed.starts_with('(') {
            let mut cycles = Vec::new();
            let mut rest = trimmed;
            while !rest.is_empty() {
                let body_start = rest.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
                let close = body_start.find(')').ok_or_else(|| err("unclosed cycle"))?;
                let body = body_start[..close].trim();
                rest = body_start[close + 1..].trim_start();
                if body.is_empty() {
                    continue;
                }
                let cycle = body
                    .split([',', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.trim().parse::<usize>().map_err(|_| err("non-numeric symbol")))
                    .collect::<Result<Vec<_>, _>>()?;
                cycles.push(cycle);
            }
            let mut used = vec![false; n + 1];
            for &x in cycles.iter().flatten() {
                if x == 0 || x > n {
                    return Err(PermError::OutOfRange { symbol: x, n });
                }
                if used[x] {
                    return Err(PermError::Duplicate(x));
                }
                used[x] = true;
            }
            Permutation::from_cycles(n, &cycles)
        } else {
            let images = trimmed
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| err("non-numeric symbol")))
                .collect::<Result<Vec<_>, _>>()?;
            if images.len() != n {
                if let Some(&big) = images.iter().find(|&&v| v > n) {
                    return Err(PermError::OutOfRange { symbol: big, n });
                }
                return Err(err(&format!("expected {n} images, found {}", images.len())));
            }
            Permutation::from_images(&images)
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[n={}]{}", self.n(), self)
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Cycle notation only, with `n` taken from the largest symbol.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        Permutation::parse(s, n)
    }
}

/// Least `m >= 1` with `(ab)^m = e`.
pub fn product_order(a: &Permutation, b: &Permutation) -> Result<usize, PermError> {
    Ok(a.compose(b)?.order())
}

/// A position symmetry of a circular genome on `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    /// `x ↦ x + k (mod n)`.
    Rotation(usize),
    /// `x ↦ k - x (mod n)`.
    Reflection(usize),
}

impl Symmetry {
    pub fn permutation(self, n: usize) -> Permutation {
        let images: Vec<usize> = (0..n)
            .map(|x| match self {
                Symmetry::Rotation(k) => (x + k) % n + 1,
                Symmetry::Reflection(k) => (k + n - x) % n + 1,
            })
            .collect();
        Permutation::from_images(&images).expect("dihedral map is a bijection")
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symmetry::Rotation(k) => write!(f, "rotation {k}"),
            Symmetry::Reflection(k) => write!(f, "reflection {k}"),
        }
    }
}

/// The `2n` elements of the dihedral group acting on positions `1..=n`,
/// rotations first. For `n <= 2` duplicates are dropped.
pub fn dihedral_symmetries(n: usize) -> Vec<(Symmetry, Permutation)> {
    let mut out: Vec<(Symmetry, Permutation)> = Vec::with_capacity(2 * n);
    let all = (0..n)
        .map(Symmetry::Rotation)
        .chain((0..n).map(Symmetry::Reflection));
    for s in all {
        let p = s.permutation(n);
        if !out.iter().any(|(_, q)| *q == p) {
            out.push((s, p));
        }
    }
    out
}
