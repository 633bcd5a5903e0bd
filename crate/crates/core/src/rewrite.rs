//! String rewriting over a generator alphabet: rule application, critical
//! pairs, Knuth-Bendix completion and interreduction.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::order::{contains_factor, ReductionOrder, Word};
use crate::presentation::{GeneratorSystem, Presentation};
use crate::Letter;

pub type RuleId = usize;

/// An oriented rule `lhs → rhs` with `lhs > rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

impl Rule {
    pub fn new(lhs: Word, rhs: Word) -> Self {
        Rule { lhs, rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Raw,
    Confluent,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Raw => "raw",
            Status::Confluent => "confluent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_rules: usize,
    pub max_word_length: usize,
    pub max_iterations: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_rules: 100_000,
            max_word_length: 64,
            max_iterations: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Rules,
    WordLength,
    Iterations,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Rules => "max_rules",
            LimitKind::WordLength => "max_word_length",
            LimitKind::Iterations => "max_iterations",
        })
    }
}

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("{limit} exceeded after {iterations} critical pairs with {rules} live rules (longest lhs {longest})")]
    LimitExceeded {
        limit: LimitKind,
        rules: usize,
        iterations: u64,
        longest: usize,
        /// The system at the point of failure, marked [`Status::Raw`].
        partial: Box<RewritingSystem>,
    },
    #[error("rule {index} is not decreasing: lhs must be greater than rhs")]
    NotDecreasing { index: usize },
    #[error("rule {index} has an empty left-hand side")]
    EmptyLhs { index: usize },
    #[error("generator {0} is out of range")]
    BadLetter(Letter),
    #[error("generator count does not match the reduction order")]
    OrderMismatch,
}

const NONE: u32 = u32::MAX;

/// Prefix tree over left-hand sides.
#[derive(Debug, Clone)]
struct Trie {
    alphabet: usize,
    children: Vec<u32>,
    terminal: Vec<u32>,
    live: Vec<u32>,
    free: Vec<u32>,
    /// Extra rule ids sharing a terminal node, only in non-reduced systems.
    shared: HashMap<u32, Vec<RuleId>>,
}

impl Trie {
    fn new(alphabet: usize) -> Self {
        let mut t = Trie {
            alphabet,
            children: Vec::new(),
            terminal: Vec::new(),
            live: Vec::new(),
            free: Vec::new(),
            shared: HashMap::new(),
        };
        t.alloc();
        t
    }

    fn alloc(&mut self) -> u32 {
        if let Some(node) = self.free.pop() {
            let base = node as usize * self.alphabet;
            self.children[base..base + self.alphabet].fill(NONE);
            self.terminal[node as usize] = NONE;
            self.live[node as usize] = 0;
            return node;
        }
        let node = self.terminal.len() as u32;
        self.children.extend(std::iter::repeat_n(NONE, self.alphabet));
        self.terminal.push(NONE);
        self.live.push(0);
        node
    }

    #[inline]
    fn child(&self, node: u32, letter: Letter) -> u32 {
        self.children[node as usize * self.alphabet + letter as usize]
    }

    fn insert(&mut self, word: &[Letter], id: RuleId) {
        let mut node = 0u32;
        self.live[0] += 1;
        for &a in word {
            let mut next = self.child(node, a);
            if next == NONE {
                next = self.alloc();
                self.children[node as usize * self.alphabet + a as usize] = next;
            }
            node = next;
            self.live[node as usize] += 1;
        }
        let slot = &mut self.terminal[node as usize];
        if *slot == NONE {
            *slot = id as u32;
        } else {
            let mut ids = vec![*slot as RuleId, id];
            if let Some(extra) = self.shared.remove(&node) {
                ids.extend(extra);
            }
            ids.sort_unstable();
            *slot = ids[0] as u32;
            self.shared.insert(node, ids[1..].to_vec());
        }
    }

    fn remove(&mut self, word: &[Letter], id: RuleId) {
        let mut path = Vec::with_capacity(word.len() + 1);
        let mut node = 0u32;
        path.push(node);
        for &a in word {
            node = self.child(node, a);
            debug_assert_ne!(node, NONE);
            path.push(node);
        }
        if let Some(extra) = self.shared.get_mut(&node) {
            if self.terminal[node as usize] as RuleId == id {
                self.terminal[node as usize] = extra.remove(0) as u32;
            } else {
                extra.retain(|&x| x != id);
            }
            if extra.is_empty() {
                self.shared.remove(&node);
            }
        } else {
            debug_assert_eq!(self.terminal[node as usize] as RuleId, id);
            self.terminal[node as usize] = NONE;
        }
        self.live[0] -= 1;
        for (depth, &a) in word.iter().enumerate() {
            let parent = path[depth];
            let child = path[depth + 1];
            self.live[child as usize] -= 1;
            if self.live[child as usize] == 0 {
                self.children[parent as usize * self.alphabet + a as usize] = NONE;
                for &dead in &path[depth + 1..] {
                    self.free.push(dead);
                }
                break;
            }
        }
    }

    /// The lowest-id rule whose lhs is a prefix of `word`, with its length.
    #[inline]
    fn match_prefix(&self, word: &[Letter]) -> Option<(RuleId, usize)> {
        let mut node = 0u32;
        let mut best: Option<(RuleId, usize)> = None;
        for (k, &a) in word.iter().enumerate() {
            node = self.child(node, a);
            if node == NONE {
                break;
            }
            let t = self.terminal[node as usize];
            if t != NONE && best.is_none_or(|(b, _)| (t as RuleId) < b) {
                best = Some((t as RuleId, k + 1));
            }
        }
        best
    }

    /// Every rule id whose lhs is a prefix of `word`.
    fn all_prefix_matches(&self, word: &[Letter], out: &mut Vec<(RuleId, usize)>) {
        let mut node = 0u32;
        for (k, &a) in word.iter().enumerate() {
            node = self.child(node, a);
            if node == NONE {
                break;
            }
            let t = self.terminal[node as usize];
            if t != NONE {
                out.push((t as RuleId, k + 1));
                if let Some(extra) = self.shared.get(&node) {
                    out.extend(extra.iter().map(|&id| (id, k + 1)));
                }
            }
        }
    }
}

/// An indexed collection of rules together with the order that oriented them.
#[derive(Debug, Clone)]
pub struct RewritingSystem {
    gens: GeneratorSystem,
    order: ReductionOrder,
    rules: Vec<Option<Rule>>,
    live: usize,
    trie: Trie,
    max_lhs: usize,
    status: Status,
}

impl RewritingSystem {
    pub fn new(gens: GeneratorSystem, order: ReductionOrder) -> Result<Self, RewriteError> {
        if gens.len() != order.generator_count() {
            return Err(RewriteError::OrderMismatch);
        }
        let alphabet = gens.len().max(1);
        Ok(RewritingSystem {
            gens,
            order,
            rules: Vec::new(),
            live: 0,
            trie: Trie::new(alphabet),
            max_lhs: 0,
            status: Status::Raw,
        })
    }

    /// Builds a system from explicit rules, checking `lhs > rhs` for each.
    pub fn from_rules(
        gens: GeneratorSystem,
        order: ReductionOrder,
        rules: Vec<Rule>,
        status: Status,
    ) -> Result<Self, RewriteError> {
        let mut sys = RewritingSystem::new(gens, order)?;
        for (index, rule) in rules.into_iter().enumerate() {
            if rule.lhs.is_empty() {
                return Err(RewriteError::EmptyLhs { index });
            }
            for &g in rule.lhs.letters().iter().chain(rule.rhs.letters()) {
                if g as usize >= sys.gens.len() {
                    return Err(RewriteError::BadLetter(g));
                }
            }
            if sys.order.compare(&rule.lhs, &rule.rhs) != Ordering::Greater {
                return Err(RewriteError::NotDecreasing { index });
            }
            sys.push_rule(rule);
        }
        sys.status = status;
        Ok(sys)
    }

    pub fn generators(&self) -> &GeneratorSystem {
        &self.gens
    }

    pub fn order(&self) -> &ReductionOrder {
        &self.order
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_confluent_status(&self) -> bool {
        self.status == Status::Confluent
    }

    /// Number of live rules.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn rule(&self, id: RuleId) -> Option<&Rule> {
        self.rules.get(id).and_then(|r| r.as_ref())
    }

    /// Live rules in id order.
    pub fn rules(&self) -> impl Iterator<Item = (RuleId, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .filter_map(|(id, r)| r.as_ref().map(|r| (id, r)))
    }

    pub fn max_lhs_len(&self) -> usize {
        self.max_lhs
    }

    /// Appends a rule without any checks; the system becomes raw.
    pub fn push_rule(&mut self, rule: Rule) -> RuleId {
        let id = self.rules.len();
        self.trie.insert(rule.lhs.letters(), id);
        self.max_lhs = self.max_lhs.max(rule.lhs.len());
        self.rules.push(Some(rule));
        self.live += 1;
        self.status = Status::Raw;
        id
    }

    pub fn remove_rule(&mut self, id: RuleId) -> Option<Rule> {
        let rule = self.rules.get_mut(id)?.take()?;
        self.trie.remove(rule.lhs.letters(), id);
        self.live -= 1;
        self.status = Status::Raw;
        Some(rule)
    }

    fn set_rhs(&mut self, id: RuleId, rhs: Word) {
        if let Some(Some(rule)) = self.rules.get_mut(id) {
            rule.rhs = rhs;
        }
    }

    /// Leftmost match: the smallest start position at which some lhs
    /// occurs, and the lowest rule id among the rules matching there.
    pub fn find_leftmost(&self, word: &[Letter]) -> Option<(usize, RuleId)> {
        (0..word.len()).find_map(|i| self.trie.match_prefix(&word[i..]).map(|(id, _)| (i, id)))
    }

    /// Every `(position, rule)` at which a rule applies.
    pub fn matches(&self, word: &Word) -> Vec<(usize, RuleId)> {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        for i in 0..word.len() {
            buf.clear();
            self.trie.all_prefix_matches(&word.letters()[i..], &mut buf);
            out.extend(buf.iter().map(|&(id, _)| (i, id)));
        }
        out
    }

    /// Applies rule `id` at position `pos`. Panics if it does not match there.
    pub fn rewrite_at(&self, word: &Word, pos: usize, id: RuleId) -> Word {
        let rule = self.rule(id).expect("live rule");
        let end = pos + rule.lhs.len();
        assert_eq!(&word.letters()[pos..end], rule.lhs.letters(), "rule does not match");
        let mut v = Vec::with_capacity(word.len() - rule.lhs.len() + rule.rhs.len());
        v.extend_from_slice(&word.letters()[..pos]);
        v.extend_from_slice(rule.rhs.letters());
        v.extend_from_slice(&word.letters()[end..]);
        Word(v)
    }

    pub fn is_irreducible(&self, word: &Word) -> bool {
        self.find_leftmost(word.letters()).is_none()
    }

    /// Rewrites at the leftmost match until no left-hand side occurs.
    pub fn reduce(&self, word: &Word) -> Word {
        let mut v = word.0.clone();
        self.reduce_in_place(&mut v);
        Word(v)
    }

    pub(crate) fn reduce_in_place(&self, w: &mut Vec<Letter>) {
        let back = self.max_lhs.saturating_sub(1);
        let mut i = 0;
        while i < w.len() {
            match self.trie.match_prefix(&w[i..]) {
                Some((id, len)) => {
                    let rhs = &self.rules[id].as_ref().expect("indexed rule is live").rhs;
                    w.splice(i..i + len, rhs.letters().iter().copied());
                    i = i.saturating_sub(back);
                }
                None => i += 1,
            }
        }
    }

    /// Enumerates irreducible words breadth-first, giving up once more than
    /// `limit` have been found. For a confluent system of a finite group
    /// these are the normal forms, one per group element.
    pub fn normal_forms(&self, limit: usize) -> Option<Vec<Word>> {
        let mut all = vec![Word::empty()];
        let mut frontier = vec![Word::empty()];
        let k = self.gens.len() as Letter;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for w in &frontier {
                for a in 0..k {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.extend_from_slice(w.letters());
                    v.push(a);
                    let start = v.len().saturating_sub(self.max_lhs);
                    let reducible = (start..v.len()).any(|i| self.trie.match_prefix(&v[i..]).is_some());
                    if !reducible {
                        next.push(Word(v));
                    }
                }
            }
            all.extend(next.iter().cloned());
            if all.len() > limit {
                return None;
            }
            frontier = next;
        }
        Some(all)
    }

    /// Resolves a critical pair: `None` if both sides reduce to the same
    /// word, otherwise the rule orienting the two irreducibles.
    pub fn resolve(&self, pair: &(Word, Word)) -> Option<Rule> {
        let x = self.reduce(&pair.0);
        let y = self.reduce(&pair.1);
        match self.order.compare(&x, &y) {
            Ordering::Equal => None,
            Ordering::Greater => Some(Rule::new(x, y)),
            Ordering::Less => Some(Rule::new(y, x)),
        }
    }
}

/// Critical pairs of `r1` against `r2`: every nonempty proper suffix of
/// `r1.lhs` that is a proper prefix of `r2.lhs`, and every occurrence of
/// `r2.lhs` inside `r1.lhs`.
pub fn critical_pairs(r1: &Rule, r2: &Rule) -> Vec<(Word, Word)> {
    let mut out = Vec::new();
    overlap_pairs(r1, r2, &mut out);
    containment_pairs(r1, r2, &mut out);
    out
}

fn overlap_pairs(r1: &Rule, r2: &Rule, out: &mut Vec<(Word, Word)>) {
    let l1 = r1.lhs.letters();
    let l2 = r2.lhs.letters();
    for k in 1..l1.len() {
        let suffix = &l1[k..];
        if suffix.len() < l2.len() && l2.starts_with(suffix) {
            // u1 = l1[..k], a = suffix, u2 = l2[suffix.len()..]
            let u2 = &l2[suffix.len()..];
            let mut left = r1.rhs.0.clone();
            left.extend_from_slice(u2);
            let mut right = l1[..k].to_vec();
            right.extend_from_slice(r2.rhs.letters());
            out.push((Word(left), Word(right)));
        }
    }
}

fn containment_pairs(r1: &Rule, r2: &Rule, out: &mut Vec<(Word, Word)>) {
    if r1 == r2 {
        return;
    }
    let l1 = r1.lhs.letters();
    let l2 = r2.lhs.letters();
    if l2.is_empty() || l2.len() > l1.len() {
        return;
    }
    for start in 0..=(l1.len() - l2.len()) {
        if &l1[start..start + l2.len()] == l2 {
            let mut right = l1[..start].to_vec();
            right.extend_from_slice(r2.rhs.letters());
            right.extend_from_slice(&l1[start + l2.len()..]);
            out.push((r1.rhs.clone(), Word(right)));
        }
    }
}

/// Outcome of [`is_confluent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluenceReport {
    pub confluent: bool,
    /// Unresolved pairs as their two distinct irreducible forms.
    pub unresolved: Vec<(Word, Word)>,
}

/// Checks every critical pair among all ordered pairs of live rules.
pub fn is_confluent(sys: &RewritingSystem) -> ConfluenceReport {
    let rules: Vec<&Rule> = sys.rules().map(|(_, r)| r).collect();
    let mut by_first: HashMap<Letter, Vec<usize>> = HashMap::new();
    for (k, r) in rules.iter().enumerate() {
        by_first.entry(r.lhs.letters()[0]).or_default().push(k);
    }
    let mut unresolved: Vec<(Word, Word)> = rules
        .par_iter()
        .flat_map_iter(|r1| {
            let mut pairs = Vec::new();
            let l1 = r1.lhs.letters();
            let mut seen = vec![false; rules.len()];
            for &a in &l1[1..] {
                if let Some(cands) = by_first.get(&a) {
                    for &k in cands {
                        if !seen[k] {
                            seen[k] = true;
                            overlap_pairs(r1, rules[k], &mut pairs);
                        }
                    }
                }
            }
            for &a in l1 {
                if let Some(cands) = by_first.get(&a) {
                    for &k in cands {
                        containment_pairs(r1, rules[k], &mut pairs);
                    }
                }
            }
            pairs
                .into_iter()
                .filter_map(|p| {
                    let x = sys.reduce(&p.0);
                    let y = sys.reduce(&p.1);
                    (x != y).then_some((x, y))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    unresolved.sort();
    unresolved.dedup();
    ConfluenceReport {
        confluent: unresolved.is_empty(),
        unresolved,
    }
}

/// Returns an equivalent reduced system: no lhs contains another lhs as a
/// factor and every rhs is irreducible. Status is preserved.
pub fn interreduce(sys: &RewritingSystem) -> RewritingSystem {
    let mut out = sys.clone();
    let status = sys.status;
    loop {
        let mut equations = Vec::new();
        let ids: Vec<RuleId> = out.rules().map(|(id, _)| id).collect();
        for id in ids {
            let lhs = out.rule(id).expect("live").lhs.clone();
            let rule = out.remove_rule(id).expect("live");
            if out.is_irreducible(&lhs) {
                out.trie.insert(lhs.letters(), id);
                out.rules[id] = Some(rule);
                out.live += 1;
            } else {
                equations.push((rule.lhs, rule.rhs));
            }
        }
        let changed = !equations.is_empty();
        for (u, v) in equations {
            if let Some(rule) = out.resolve(&(u, v)) {
                out.push_rule(rule);
            }
        }
        let ids: Vec<RuleId> = out.rules().map(|(id, _)| id).collect();
        for id in ids {
            let rhs = out.rule(id).expect("live").rhs.clone();
            let reduced = out.reduce(&rhs);
            if reduced != rhs {
                out.set_rhs(id, reduced);
            }
        }
        if !changed {
            break;
        }
    }
    out.status = status;
    out
}

/// Progress counters from a completion run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompletionStats {
    pub critical_pairs: u64,
    pub rules_added: u64,
    pub rules_removed: u64,
}

struct Completion {
    sys: RewritingSystem,
    limits: Limits,
    pending: BinaryHeap<Reverse<(u64, RuleId)>>,
    selected: Vec<bool>,
    by_first: Vec<Vec<RuleId>>,
    by_last: Vec<Vec<RuleId>>,
    equations: Vec<(Vec<Letter>, Vec<Letter>)>,
    stats: CompletionStats,
}

impl Completion {
    fn limit_error(&mut self, limit: LimitKind) -> RewriteError {
        let mut partial = self.sys.clone();
        partial.status = Status::Raw;
        RewriteError::LimitExceeded {
            limit,
            rules: self.sys.len(),
            iterations: self.stats.critical_pairs,
            longest: self.sys.max_lhs,
            partial: Box::new(partial),
        }
    }

    /// Reduces and orients every queued equation, inserting new rules.
    fn drain(&mut self) -> Result<(), RewriteError> {
        while let Some((mut u, mut v)) = self.equations.pop() {
            self.sys.reduce_in_place(&mut u);
            self.sys.reduce_in_place(&mut v);
            let (lhs, rhs) = match self.sys.order.compare_letters(&u, &v) {
                Ordering::Equal => continue,
                Ordering::Greater => (u, v),
                Ordering::Less => (v, u),
            };
            self.insert(lhs, rhs)?;
        }
        Ok(())
    }

    fn insert(&mut self, lhs: Vec<Letter>, rhs: Vec<Letter>) -> Result<(), RewriteError> {
        if lhs.len() > self.limits.max_word_length {
            return Err(self.limit_error(LimitKind::WordLength));
        }
        if self.sys.len() >= self.limits.max_rules {
            return Err(self.limit_error(LimitKind::Rules));
        }
        let weight = self.sys.order.scaled_weight(&lhs);
        let id = self.sys.push_rule(Rule::new(Word(lhs), Word(rhs)));
        self.selected.push(false);
        self.pending.push(Reverse((weight, id)));
        self.stats.rules_added += 1;

        let new_lhs = self.sys.rules[id].as_ref().expect("just inserted").lhs.0.clone();
        let mut stale_rhs = Vec::new();
        let mut collapsed = Vec::new();
        for (other, rule) in self.sys.rules.iter().enumerate() {
            let Some(rule) = rule else { continue };
            if other == id {
                continue;
            }
            if contains_factor(rule.lhs.letters(), &new_lhs) {
                collapsed.push(other);
            } else if contains_factor(rule.rhs.letters(), &new_lhs) {
                stale_rhs.push(other);
            }
        }
        for other in collapsed {
            let rule = self.sys.remove_rule(other).expect("live");
            self.selected[other] = false;
            self.stats.rules_removed += 1;
            self.equations.push((rule.lhs.0, rule.rhs.0));
        }
        for other in stale_rhs {
            let mut rhs = self.sys.rules[other].as_ref().expect("live").rhs.0.clone();
            self.sys.reduce_in_place(&mut rhs);
            self.sys.set_rhs(other, Word(rhs));
        }
        Ok(())
    }

    fn select(&mut self, id: RuleId) -> Result<(), RewriteError> {
        self.selected[id] = true;
        let rule = self.sys.rules[id].clone().expect("selected rule is live");
        let l = rule.lhs.letters();
        self.by_first[l[0] as usize].push(id);
        self.by_last[l[l.len() - 1] as usize].push(id);

        let mut pairs = Vec::new();
        // suffix of this lhs against prefixes of selected lhs (self included)
        for k in 1..l.len() {
            let bucket = &self.by_first[l[k] as usize];
            for &other in bucket {
                if !self.selected[other] {
                    continue;
                }
                let o = self.sys.rules[other].as_ref().expect("selected rule is live");
                let suffix = &l[k..];
                if suffix.len() < o.lhs.len() && o.lhs.letters().starts_with(suffix) {
                    let mut left = rule.rhs.0.clone();
                    left.extend_from_slice(&o.lhs.letters()[suffix.len()..]);
                    let mut right = l[..k].to_vec();
                    right.extend_from_slice(o.rhs.letters());
                    pairs.push((left, right));
                }
            }
        }
        // suffixes of selected lhs against prefixes of this lhs
        for k in 1..l.len() {
            let bucket = &self.by_last[l[k - 1] as usize];
            for &other in bucket {
                if other == id || !self.selected[other] {
                    continue;
                }
                let o = self.sys.rules[other].as_ref().expect("selected rule is live");
                let prefix = &l[..k];
                let ol = o.lhs.letters();
                if prefix.len() < ol.len() && ol.ends_with(prefix) {
                    let mut left = o.rhs.0.clone();
                    left.extend_from_slice(&l[k..]);
                    let mut right = ol[..ol.len() - k].to_vec();
                    right.extend_from_slice(rule.rhs.letters());
                    pairs.push((left, right));
                }
            }
        }

        for (u, v) in pairs {
            if !self.selected[id] {
                // collapsed by a newer rule; its equation has been requeued
                break;
            }
            self.stats.critical_pairs += 1;
            if self.stats.critical_pairs > self.limits.max_iterations {
                return Err(self.limit_error(LimitKind::Iterations));
            }
            self.equations.push((u, v));
            self.drain()?;
        }
        Ok(())
    }

    fn compact_buckets(&mut self) {
        let selected = &self.selected;
        let rules = &self.sys.rules;
        for b in self.by_first.iter_mut().chain(self.by_last.iter_mut()) {
            b.retain(|&id| selected[id] && rules[id].is_some());
        }
    }
}

/// Knuth-Bendix completion of `pres` under `ord`.
///
/// Rules are selected lightest-lhs first; a selected rule is overlapped with
/// every previously selected rule and itself. Each new rule immediately
/// collapses rules whose lhs it divides and rewrites affected right-hand
/// sides, so the result is the reduced confluent system for `ord`.
pub fn knuth_bendix(
    pres: &Presentation,
    ord: &ReductionOrder,
    limits: Limits,
) -> Result<(RewritingSystem, CompletionStats), RewriteError> {
    let gens = pres.generators().clone();
    let k = gens.len();
    let sys = RewritingSystem::new(gens, ord.clone())?;
    let mut c = Completion {
        sys,
        limits,
        pending: BinaryHeap::new(),
        selected: Vec::new(),
        by_first: vec![Vec::new(); k],
        by_last: vec![Vec::new(); k],
        equations: Vec::new(),
        stats: CompletionStats::default(),
    };

    // involution rules first, then the relations, split into balanced halves
    let mut initial: Vec<(Vec<Letter>, Vec<Letter>)> =
        (0..k as Letter).map(|g| (vec![g, g], Vec::new())).collect();
    for rel in pres.relations() {
        if rel.rhs.is_empty() && rel.lhs.len() > 2 {
            let half = rel.lhs.len().div_ceil(2);
            let lhs = rel.lhs.letters()[..half].to_vec();
            let rhs: Vec<Letter> = rel.lhs.letters()[half..].iter().rev().copied().collect();
            initial.push((lhs, rhs));
        } else {
            initial.push((rel.lhs.0.clone(), rel.rhs.0.clone()));
        }
    }
    for eq in initial {
        c.equations.push(eq);
        c.drain()?;
    }

    let mut since_compact = 0usize;
    while let Some(Reverse((_, id))) = c.pending.pop() {
        if c.sys.rules[id].is_none() {
            continue;
        }
        c.select(id)?;
        since_compact += 1;
        if since_compact >= 256 {
            c.compact_buckets();
            since_compact = 0;
        }
    }

    c.sys.status = Status::Confluent;
    Ok((c.sys, c.stats))
}
