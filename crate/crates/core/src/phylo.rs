//! Distance matrices, PHYLIP text, neighbor joining and Newick output.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num::{BigInt, BigRational, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_big_trimmed, format_decimal, parse_rational_str};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhyloError {
    #[error("matrix is {rows}x? but has {labels} labels")]
    Dimension { rows: usize, labels: usize },
    #[error("entries ({0},{1}) and ({1},{0}) differ")]
    NotSymmetric(usize, usize),
    #[error("diagonal entry {0} is not zero")]
    NonzeroDiagonal(usize),
    #[error("entry ({0},{1}) is negative")]
    Negative(usize, usize),
    #[error("labels collide after truncation to 10 characters: {0}")]
    DuplicateLabelAfterTruncation(String),
    #[error("need at least 3 taxa, got {0}")]
    TooFew(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A symmetric matrix of nonnegative exact distances with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    entries: Vec<Vec<Rational>>,
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, entries: Vec<Vec<Rational>>) -> Result<Self, PhyloError> {
        let k = labels.len();
        if entries.len() != k || entries.iter().any(|row| row.len() != k) {
            return Err(PhyloError::Dimension {
                rows: entries.len(),
                labels: k,
            });
        }
        for i in 0..k {
            if entries[i][i] != Rational::zero() {
                return Err(PhyloError::NonzeroDiagonal(i));
            }
            for j in 0..k {
                if entries[i][j] != entries[j][i] {
                    return Err(PhyloError::NotSymmetric(i, j));
                }
                if entries[i][j] < Rational::zero() {
                    return Err(PhyloError::Negative(i, j));
                }
            }
        }
        Ok(DistanceMatrix { labels, entries })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// The same matrix with taxa listed in `order`.
    pub fn reordered(&self, order: &[usize]) -> DistanceMatrix {
        DistanceMatrix {
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            entries: order
                .iter()
                .map(|&i| order.iter().map(|&j| self.entries[i][j]).collect())
                .collect(),
        }
    }
}

fn phylip_label(label: &str) -> String {
    let truncated: String = label.chars().take(10).collect();
    format!("{truncated:<10}")
}

/// Square PHYLIP layout: taxon count, then per row a 10-character label
/// and the distances to 6 decimals. No trailing newline.
pub fn write_phylip(m: &DistanceMatrix) -> Result<String, PhyloError> {
    let mut seen = HashSet::new();
    for l in &m.labels {
        let padded = phylip_label(l);
        if !seen.insert(padded.clone()) {
            return Err(PhyloError::DuplicateLabelAfterTruncation(padded.trim_end().to_string()));
        }
    }
    let mut lines = vec![m.len().to_string()];
    for (label, row) in m.labels.iter().zip(&m.entries) {
        let values: Vec<String> = row.iter().map(|v| format_decimal(v, 6)).collect();
        lines.push(format!("{}{}", phylip_label(label), values.join(" ")));
    }
    Ok(lines.join("\n"))
}

/// Reads the square layout written by [`write_phylip`]. Entries become
/// exact decimal rationals.
pub fn parse_phylip(text: &str) -> Result<DistanceMatrix, PhyloError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| PhyloError::Parse("empty input".into()))?;
    let k: usize = header
        .trim()
        .parse()
        .map_err(|_| PhyloError::Parse(format!("bad taxon count {header:?}")))?;
    let mut labels = Vec::with_capacity(k);
    let mut entries = Vec::with_capacity(k);
    for _ in 0..k {
        let line = lines.next().ok_or_else(|| PhyloError::Parse("missing row".into()))?;
        let split = line.char_indices().nth(10).map_or(line.len(), |(i, _)| i);
        let (label, rest) = line.split_at(split);
        let row = rest
            .split_whitespace()
            .map(|t| parse_rational_str(t).ok_or_else(|| PhyloError::Parse(format!("bad entry {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        labels.push(label.trim_end().to_string());
        entries.push(row);
    }
    DistanceMatrix::new(labels, entries)
}

/// A tree node; internal nodes list children with branch lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf(String),
    Node(Vec<(Tree, BigRational)>),
}

impl Tree {
    fn leaves(&self, out: &mut BTreeSet<String>) {
        match self {
            Tree::Leaf(l) => {
                out.insert(l.clone());
            }
            Tree::Node(children) => children.iter().for_each(|(c, _)| c.leaves(out)),
        }
    }

    fn smallest_label(&self) -> String {
        let mut s = BTreeSet::new();
        self.leaves(&mut s);
        s.into_iter().next().unwrap_or_default()
    }
}

/// An unrooted tree drawn from an arbitrary internal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhyloTree {
    pub root: Tree,
    /// Set when neighbor joining clamped a negative branch length to zero.
    pub clamped: bool,
}

impl PhyloTree {
    pub fn new(root: Tree) -> Self {
        PhyloTree { root, clamped: false }
    }

    pub fn leaf_labels(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.root.leaves(&mut s);
        s
    }
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Neighbor joining with exact arithmetic. The pair minimizing the
/// Q-criterion is joined at each step, ties going to the lowest index pair.
pub fn neighbor_joining(m: &DistanceMatrix) -> Result<PhyloTree, PhyloError> {
    let k = m.len();
    if k < 3 {
        return Err(PhyloError::TooFew(k));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut d: Vec<Vec<BigRational>> = m.entries.iter().map(|row| row.iter().map(big).collect()).collect();
    let mut nodes: Vec<Tree> = m.labels.iter().map(|l| Tree::Leaf(l.clone())).collect();
    let mut clamped = false;
    let mut clamp = |v: BigRational| {
        if v.is_negative() {
            clamped = true;
            BigRational::zero()
        } else {
            v
        }
    };

    while nodes.len() > 3 {
        let r = nodes.len();
        let sums: Vec<BigRational> = d.iter().map(|row| row.iter().sum()).collect();
        let factor = BigRational::from_integer(BigInt::from(r as i64 - 2));
        let mut best: Option<(BigRational, usize, usize)> = None;
        for i in 0..r {
            for j in i + 1..r {
                let q = &factor * &d[i][j] - &sums[i] - &sums[j];
                if best.as_ref().is_none_or(|(b, _, _)| q < *b) {
                    best = Some((q, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("at least one pair");
        let dij = d[i][j].clone();
        let li = &dij / &two + (&sums[i] - &sums[j]) / (&two * &factor);
        let lj = &dij - &li;
        let new_row: Vec<BigRational> = (0..r)
            .map(|x| {
                if x == i || x == j {
                    BigRational::zero()
                } else {
                    (&d[i][x] + &d[j][x] - &dij) / &two
                }
            })
            .collect();
        let nj = nodes.remove(j);
        let ni = std::mem::replace(&mut nodes[i], Tree::Leaf(String::new()));
        nodes[i] = Tree::Node(vec![(ni, clamp(li)), (nj, clamp(lj))]);
        for x in 0..r {
            d[i][x] = new_row[x].clone();
            d[x][i] = new_row[x].clone();
        }
        d.remove(j);
        for row in d.iter_mut() {
            row.remove(j);
        }
    }

    let (a, b, c) = (&d[0][1], &d[0][2], &d[1][2]);
    let la = (a + b - c) / &two;
    let lb = (a + c - b) / &two;
    let lc = (b + c - a) / &two;
    let mut it = nodes.into_iter();
    let root = Tree::Node(vec![
        (it.next().expect("three nodes"), clamp(la)),
        (it.next().expect("three nodes"), clamp(lb)),
        (it.next().expect("three nodes"), clamp(lc)),
    ]);
    Ok(PhyloTree { root, clamped })
}

fn newick_label(label: &str) -> String {
    if label.chars().any(|c| "()[]':;,".contains(c) || c.is_whitespace()) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

fn write_node(t: &Tree, out: &mut String) {
    match t {
        Tree::Leaf(l) => out.push_str(&newick_label(l)),
        Tree::Node(children) => {
            let mut sorted: Vec<&(Tree, BigRational)> = children.iter().collect();
            sorted.sort_by_cached_key(|(c, _)| c.smallest_label());
            out.push('(');
            for (k, (c, len)) in sorted.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_node(c, out);
                out.push(':');
                out.push_str(&format_big_trimmed(len, 6));
            }
            out.push(')');
        }
    }
}

/// Newick text with children ordered by their smallest leaf label and
/// branch lengths rounded to 6 decimals, trailing zeros dropped.
pub fn write_newick(t: &PhyloTree) -> String {
    let mut out = String::new();
    write_node(&t.root, &mut out);
    out.push(';');
    out
}

/// Parses Newick text with optional branch lengths (missing lengths are 0).
pub fn parse_newick(text: &str) -> Result<PhyloTree, PhyloError> {
    let chars: Vec<char> = text.trim().chars().collect();
    let mut pos = 0;
    let root = parse_subtree(&chars, &mut pos)?;
    if chars.get(pos) != Some(&';') {
        return Err(PhyloError::Parse(format!("expected ';' at {pos}")));
    }
    Ok(PhyloTree::new(root))
}

fn parse_subtree(c: &[char], pos: &mut usize) -> Result<Tree, PhyloError> {
    if c.get(*pos) == Some(&'(') {
        *pos += 1;
        let mut children = Vec::new();
        loop {
            let child = parse_subtree(c, pos)?;
            let len = parse_length(c, pos)?;
            children.push((child, len));
            match c.get(*pos) {
                Some(',') => *pos += 1,
                Some(')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(PhyloError::Parse(format!("expected ',' or ')' at {pos}"))),
            }
        }
        Ok(Tree::Node(children))
    } else {
        parse_label(c, pos).map(Tree::Leaf)
    }
}

fn parse_label(c: &[char], pos: &mut usize) -> Result<String, PhyloError> {
    let mut s = String::new();
    if c.get(*pos) == Some(&'\'') {
        *pos += 1;
        loop {
            match c.get(*pos) {
                Some('\'') if c.get(*pos + 1) == Some(&'\'') => {
                    s.push('\'');
                    *pos += 2;
                }
                Some('\'') => {
                    *pos += 1;
                    return Ok(s);
                }
                Some(&ch) => {
                    s.push(ch);
                    *pos += 1;
                }
                None => return Err(PhyloError::Parse("unterminated quoted label".into())),
            }
        }
    }
    while let Some(&ch) = c.get(*pos) {
        if "(),:;".contains(ch) {
            break;
        }
        s.push(ch);
        *pos += 1;
    }
    if s.is_empty() {
        return Err(PhyloError::Parse(format!("empty label at {pos}")));
    }
    Ok(s)
}

fn parse_length(c: &[char], pos: &mut usize) -> Result<BigRational, PhyloError> {
    if c.get(*pos) != Some(&':') {
        return Ok(BigRational::zero());
    }
    *pos += 1;
    let start = *pos;
    while let Some(&ch) = c.get(*pos) {
        if ch.is_ascii_digit() || ch == '.' || ch == '-' {
            *pos += 1;
        } else {
            break;
        }
    }
    let text: String = c[start..*pos].iter().collect();
    parse_rational_str(&text)
        .map(|r| big(&r))
        .ok_or_else(|| PhyloError::Parse(format!("bad branch length {text:?}")))
}

/// A bipartition of the leaf set; `left` holds the smallest label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Split {
    pub left: BTreeSet<String>,
    pub right: BTreeSet<String>,
}

impl Split {
    pub fn new<S: AsRef<str>>(a: &[S], b: &[S]) -> Self {
        let a: BTreeSet<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
        let b: BTreeSet<String> = b.iter().map(|s| s.as_ref().to_string()).collect();
        if a.iter().next() <= b.iter().next() || b.is_empty() {
            Split { left: a, right: b }
        } else {
            Split { left: b, right: a }
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: Vec<&str> = self.left.iter().map(String::as_str).collect();
        let r: Vec<&str> = self.right.iter().map(String::as_str).collect();
        write!(f, "{}|{}", l.join(","), r.join(","))
    }
}

/// Nontrivial bipartitions induced by internal edges.
pub fn topology_split(t: &PhyloTree) -> BTreeSet<Split> {
    let all = t.leaf_labels();
    let mut out = BTreeSet::new();
    collect_splits(&t.root, &all, true, &mut out);
    out
}

fn collect_splits(t: &Tree, all: &BTreeSet<String>, is_root: bool, out: &mut BTreeSet<Split>) {
    if let Tree::Node(children) = t {
        if !is_root {
            let mut below = BTreeSet::new();
            t.leaves(&mut below);
            let above: Vec<&String> = all.difference(&below).collect();
            if below.len() >= 2 && above.len() >= 2 {
                let below: Vec<&String> = below.iter().collect();
                out.insert(Split::new(&below, &above));
            }
        }
        for (c, _) in children {
            collect_splits(c, all, false, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    fn matrix(labels: &[&str], rows: &[&[i64]]) -> DistanceMatrix {
        DistanceMatrix::new(
            labels.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
        )
        .unwrap()
    }

    fn bigint(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn phylip_zero_matrix() {
        let m = matrix(&["A", "B"], &[&[0, 0], &[0, 0]]);
        assert_eq!(
            write_phylip(&m).unwrap(),
            "2\nA         0.000000 0.000000\nB         0.000000 0.000000"
        );
    }

    #[test]
    fn phylip_round_trip() {
        let m = DistanceMatrix::new(
            vec!["alpha".into(), "beta".into(), "gamma".into()],
            vec![
                vec![int(0), Rational::new(3, 2), int(7)],
                vec![Rational::new(3, 2), int(0), Rational::new(1, 4)],
                vec![int(7), Rational::new(1, 4), int(0)],
            ],
        )
        .unwrap();
        let text = write_phylip(&m).unwrap();
        assert_eq!(parse_phylip(&text).unwrap(), m);
    }

    #[test]
    fn phylip_truncation_collision() {
        let m = matrix(&["abcdefghijX", "abcdefghijY"], &[&[0, 1], &[1, 0]]);
        assert!(matches!(
            write_phylip(&m),
            Err(PhyloError::DuplicateLabelAfterTruncation(_))
        ));
    }

    #[test]
    fn matrix_validation() {
        let labels = vec!["A".to_string(), "B".to_string()];
        assert_eq!(
            DistanceMatrix::new(labels.clone(), vec![vec![int(0), int(1)], vec![int(2), int(0)]]),
            Err(PhyloError::NotSymmetric(0, 1))
        );
        assert_eq!(
            DistanceMatrix::new(labels, vec![vec![int(1), int(0)], vec![int(0), int(0)]]),
            Err(PhyloError::NonzeroDiagonal(0))
        );
    }

    #[test]
    fn nj_recovers_additive_quartet() {
        // leaf edges 1,2,3,4, internal edge 5 separating AB from CD
        let m = matrix(
            &["A", "B", "C", "D"],
            &[&[0, 3, 9, 10], &[3, 0, 10, 11], &[9, 10, 0, 7], &[10, 11, 7, 0]],
        );
        let t = neighbor_joining(&m).unwrap();
        assert!(!t.clamped);
        assert_eq!(write_newick(&t), "((A:1,B:2):5,C:3,D:4);");
        assert_eq!(topology_split(&t), BTreeSet::from([Split::new(&["A", "B"], &["C", "D"])]));
    }

    #[test]
    fn nj_needs_three() {
        let m = matrix(&["A", "B"], &[&[0, 2], &[2, 0]]);
        assert_eq!(neighbor_joining(&m), Err(PhyloError::TooFew(2)));
    }

    #[test]
    fn star_has_no_split() {
        let m = matrix(&["A", "B", "C"], &[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]]);
        let t = neighbor_joining(&m).unwrap();
        assert!(topology_split(&t).is_empty());
        assert_eq!(write_newick(&t), "(A:1,B:1,C:1);");
    }

    #[test]
    fn cherry_newick() {
        let t = PhyloTree::new(Tree::Node(vec![
            (Tree::Leaf("B".into()), bigint(1)),
            (Tree::Leaf("A".into()), bigint(1)),
        ]));
        assert_eq!(write_newick(&t), "(A:1,B:1);");
    }

    #[test]
    fn newick_round_trip() {
        let m = matrix(
            &["A", "B", "C", "D", "E"],
            &[
                &[0, 5, 9, 9, 8],
                &[5, 0, 10, 10, 9],
                &[9, 10, 0, 8, 7],
                &[9, 10, 8, 0, 3],
                &[8, 9, 7, 3, 0],
            ],
        );
        let t = neighbor_joining(&m).unwrap();
        let text = write_newick(&t);
        let back = parse_newick(&text).unwrap();
        assert_eq!(topology_split(&back), topology_split(&t));
        assert_eq!(write_newick(&back), text);
        assert!(parse_newick("(A,B").is_err());
        let quoted = parse_newick("('x y':1,'it''s':2);").unwrap();
        assert_eq!(write_newick(&quoted), "('it''s':2,'x y':1);");
    }

    #[test]
    fn negative_lengths_are_clamped() {
        let m = matrix(
            &["A", "B", "C", "D"],
            &[&[0, 1, 9, 9], &[1, 0, 9, 1], &[9, 9, 0, 9], &[9, 1, 9, 0]],
        );
        let t = neighbor_joining(&m).unwrap();
        assert!(t.clamped);
        assert!(!write_newick(&t).contains('-'));
    }

    #[test]
    fn split_display() {
        let s = Split::new(&["D", "B"], &["C", "A"]);
        assert_eq!(s.to_string(), "A,C|B,D");
    }
}
