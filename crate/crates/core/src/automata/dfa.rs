use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::AutomataError;
use crate::numeration::Word;

/// A complete deterministic automaton over `{0, …, base−1}`.
///
/// Every state has exactly one successor per digit; a rejecting sink is an
/// ordinary state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    base: u32,
    trans: Vec<Vec<usize>>,
    start: usize,
    accepting: Vec<bool>,
}

/// The language `V0·V1*·V2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordFamily {
    pub prefix: Word,
    pub pump: Word,
    pub suffix: Word,
}

/// Outcome of a language-equality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// A shortest word accepted by exactly one side (length-lexicographically
    /// least among the shortest).
    pub witness: Option<Vec<u32>>,
}

/// Plain state table, states numbered in breadth-first order from `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaTable {
    pub base: u32,
    pub start: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<Vec<usize>>,
}

fn check_digits(base: u32, digits: &[u32]) -> Result<(), AutomataError> {
    match digits.iter().find(|&&d| d >= base) {
        Some(&digit) => Err(AutomataError::DigitOutOfRange { digit, base }),
        None => Ok(()),
    }
}

/// ε-NFA used only while building pattern automata.
struct Nfa {
    base: u32,
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(u32, usize)>>,
    accept: Vec<bool>,
}

impl Nfa {
    fn new(base: u32) -> Self {
        let mut nfa = Nfa {
            base,
            eps: Vec::new(),
            edges: Vec::new(),
            accept: Vec::new(),
        };
        nfa.add_state();
        nfa
    }

    fn add_state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.accept.push(false);
        self.eps.len() - 1
    }

    /// Reads `digits` from `from`, ending in `to` (a fresh state when `None`).
    fn chain(&mut self, from: usize, digits: &[u32], to: Option<usize>) -> usize {
        let Some((&last, init)) = digits.split_last() else {
            return match to {
                Some(t) => {
                    self.eps[from].push(t);
                    t
                }
                None => from,
            };
        };
        let mut cur = from;
        for &d in init {
            let next = self.add_state();
            self.edges[cur].push((d, next));
            cur = next;
        }
        let end = to.unwrap_or_else(|| self.add_state());
        self.edges[cur].push((last, end));
        end
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    fn determinize(&self) -> Dfa {
        let mut first = BTreeSet::from([0]);
        self.closure(&mut first);
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::from([(first.clone(), 0)]);
        let mut sets = vec![first];
        let mut trans: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = Vec::with_capacity(self.base as usize);
            for d in 0..self.base {
                let mut next: BTreeSet<usize> = sets[i]
                    .iter()
                    .flat_map(|&s| self.edges[s].iter().filter(|e| e.0 == d).map(|e| e.1))
                    .collect();
                self.closure(&mut next);
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    sets.push(next);
                    sets.len() - 1
                });
                row.push(id);
            }
            trans.push(row);
            i += 1;
        }
        let accepting = sets
            .iter()
            .map(|set| set.iter().any(|&s| self.accept[s]))
            .collect();
        Dfa {
            base: self.base,
            trans,
            start: 0,
            accepting,
        }
    }
}

impl Dfa {
    pub fn new(
        base: u32,
        trans: Vec<Vec<usize>>,
        start: usize,
        accepting: Vec<bool>,
    ) -> Result<Self, AutomataError> {
        let n = trans.len();
        if n == 0 || start >= n || accepting.len() != n {
            return Err(AutomataError::Malformed("state count mismatch".into()));
        }
        for (s, row) in trans.iter().enumerate() {
            if row.len() != base as usize || row.iter().any(|&t| t >= n) {
                return Err(AutomataError::Malformed(format!("state {s} is not total")));
            }
        }
        Ok(Dfa {
            base,
            trans,
            start,
            accepting,
        })
    }

    /// The empty language.
    pub fn empty(base: u32) -> Self {
        Dfa {
            base,
            trans: vec![vec![0; base as usize]],
            start: 0,
            accepting: vec![false],
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn step(&self, state: usize, digit: u32) -> usize {
        self.trans[state][digit as usize]
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepts(&self, digits: &[u32]) -> bool {
        let end = digits
            .iter()
            .try_fold(self.start, |s, &d| (d < self.base).then(|| self.step(s, d)));
        end.is_some_and(|s| self.accepting[s])
    }

    /// Minimal automaton of a finite word set.
    pub fn from_words<'a, I>(base: u32, words: I) -> Result<Self, AutomataError>
    where
        I: IntoIterator<Item = &'a [u32]>,
    {
        // trie with state 0 as root and state 1 as sink
        let b = base as usize;
        let mut trans = vec![vec![1; b], vec![1; b]];
        let mut accepting = vec![false, false];
        for word in words {
            check_digits(base, word)?;
            let mut s = 0;
            for &d in word {
                if trans[s][d as usize] == 1 {
                    trans.push(vec![1; b]);
                    accepting.push(false);
                    let fresh = trans.len() - 1;
                    trans[s][d as usize] = fresh;
                }
                s = trans[s][d as usize];
            }
            accepting[s] = true;
        }
        let trie = Dfa {
            base,
            trans,
            start: 0,
            accepting,
        };
        trie.minimize_checked()
    }

    /// Minimal automaton of `exceptions ∪ ⋃ V0·V1*·V2`.
    pub fn from_patterns(
        base: u32,
        families: &[WordFamily],
        exceptions: &[Word],
    ) -> Result<Self, AutomataError> {
        let mut nfa = Nfa::new(base);
        for fam in families {
            for w in [&fam.prefix, &fam.pump, &fam.suffix] {
                if w.base() != base {
                    return Err(AutomataError::AlphabetMismatch(base, w.base()));
                }
            }
            // a private entry keeps the V1 loop off the shared start state
            let entry = nfa.add_state();
            nfa.eps[0].push(entry);
            let anchor = nfa.chain(entry, fam.prefix.digits(), None);
            if !fam.pump.is_empty() {
                nfa.chain(anchor, fam.pump.digits(), Some(anchor));
            }
            let fin = nfa.add_state();
            nfa.chain(anchor, fam.suffix.digits(), Some(fin));
            nfa.accept[fin] = true;
        }
        for w in exceptions {
            if w.base() != base {
                return Err(AutomataError::AlphabetMismatch(base, w.base()));
            }
            let fin = nfa.add_state();
            nfa.chain(0, w.digits(), Some(fin));
            nfa.accept[fin] = true;
        }
        nfa.determinize().minimize_checked()
    }

    /// Minimizes and confirms the result recognizes the same language.
    fn minimize_checked(&self) -> Result<Self, AutomataError> {
        let min = self.minimize();
        match self.equivalent(&min)?.witness {
            None => Ok(min),
            Some(w) => Err(AutomataError::MinimizationUnsound(w)),
        }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.trans.len()];
        seen[self.start] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(s) = queue.pop_front() {
            for &t in &self.trans[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Minimal equivalent automaton: unreachable states dropped, Moore
    /// partition refinement, then breadth-first renumbering from the start.
    pub fn minimize(&self) -> Dfa {
        let reach = self.reachable();
        let states: Vec<usize> = (0..self.trans.len()).filter(|&s| reach[s]).collect();
        let mut class = vec![usize::MAX; self.trans.len()];
        for &s in &states {
            class[s] = usize::from(self.accepting[s]);
        }
        let mut count = states
            .iter()
            .map(|&s| class[s])
            .collect::<BTreeSet<_>>()
            .len();
        loop {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = class.clone();
            for &s in &states {
                let mut sig = Vec::with_capacity(self.base as usize + 1);
                sig.push(class[s]);
                sig.extend(self.trans[s].iter().map(|&t| class[t]));
                let fresh = ids.len();
                next[s] = *ids.entry(sig).or_insert(fresh);
            }
            let refined = ids.len();
            class = next;
            if refined == count {
                break;
            }
            count = refined;
        }
        let mut trans = vec![Vec::new(); count];
        let mut accepting = vec![false; count];
        for &s in &states {
            let c = class[s];
            if trans[c].is_empty() {
                trans[c] = self.trans[s].iter().map(|&t| class[t]).collect();
                accepting[c] = self.accepting[s];
            }
        }
        Dfa {
            base: self.base,
            trans,
            start: class[self.start],
            accepting,
        }
        .renumbered()
    }

    /// Breadth-first renumbering from the start state, dropping unreachable
    /// states.
    fn renumbered(&self) -> Dfa {
        let mut order = vec![usize::MAX; self.trans.len()];
        let mut seq = vec![self.start];
        order[self.start] = 0;
        let mut i = 0;
        while i < seq.len() {
            for &t in &self.trans[seq[i]] {
                if order[t] == usize::MAX {
                    order[t] = seq.len();
                    seq.push(t);
                }
            }
            i += 1;
        }
        Dfa {
            base: self.base,
            trans: seq
                .iter()
                .map(|&s| self.trans[s].iter().map(|&t| order[t]).collect())
                .collect(),
            start: 0,
            accepting: seq.iter().map(|&s| self.accepting[s]).collect(),
        }
    }

    /// Product automaton accepting where `keep(a, b)` holds.
    fn product(&self, other: &Dfa, keep: impl Fn(bool, bool) -> bool) -> Result<Dfa, AutomataError> {
        if self.base != other.base {
            return Err(AutomataError::AlphabetMismatch(self.base, other.base));
        }
        let mut ids = HashMap::from([((self.start, other.start), 0usize)]);
        let mut pairs = vec![(self.start, other.start)];
        let mut trans = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let row = (0..self.base as usize)
                .map(|d| {
                    let key = (self.trans[p][d], other.trans[q][d]);
                    *ids.entry(key).or_insert_with(|| {
                        pairs.push(key);
                        pairs.len() - 1
                    })
                })
                .collect();
            trans.push(row);
            i += 1;
        }
        let accepting = pairs
            .iter()
            .map(|&(p, q)| keep(self.accepting[p], other.accepting[q]))
            .collect();
        Ok(Dfa {
            base: self.base,
            trans,
            start: 0,
            accepting,
        }
        .minimize())
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa, AutomataError> {
        self.product(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa, AutomataError> {
        self.product(other, |a, b| a || b)
    }

    pub fn complement(&self) -> Dfa {
        Dfa {
            accepting: self.accepting.iter().map(|a| !a).collect(),
            ..self.clone()
        }
    }

    /// All words of length at most `max_len`.
    pub fn length_bounded(base: u32, max_len: usize) -> Dfa {
        let sink = max_len + 1;
        let trans = (0..=sink)
            .map(|i| vec![(i + 1).min(sink); base as usize])
            .collect();
        let accepting = (0..=sink).map(|i| i <= max_len).collect();
        Dfa {
            base,
            trans,
            start: 0,
            accepting,
        }
    }

    /// Language equality by breadth-first search of the product; the first
    /// disagreeing pair found yields a shortest witness.
    pub fn equivalent(&self, other: &Dfa) -> Result<Equivalence, AutomataError> {
        if self.base != other.base {
            return Err(AutomataError::AlphabetMismatch(self.base, other.base));
        }
        let root = (self.start, other.start);
        let mut parent: HashMap<(usize, usize), Option<((usize, usize), u32)>> =
            HashMap::from([(root, None)]);
        let mut queue = VecDeque::from([root]);
        while let Some(pair @ (p, q)) = queue.pop_front() {
            if self.accepting[p] != other.accepting[q] {
                let mut word = Vec::new();
                let mut cur = pair;
                while let Some(Some((prev, d))) = parent.get(&cur) {
                    word.push(*d);
                    cur = *prev;
                }
                word.reverse();
                return Ok(Equivalence {
                    equivalent: false,
                    witness: Some(word),
                });
            }
            for d in 0..self.base {
                let next = (self.step(p, d), other.step(q, d));
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, d)));
                    queue.push_back(next);
                }
            }
        }
        Ok(Equivalence {
            equivalent: true,
            witness: None,
        })
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.trans.len();
        let mut rev = vec![Vec::new(); n];
        for (s, row) in self.trans.iter().enumerate() {
            for &t in row {
                rev[t].push(s);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&s| live[s]).collect();
        while let Some(t) = stack.pop() {
            for &s in &rev[t] {
                if !live[s] {
                    live[s] = true;
                    stack.push(s);
                }
            }
        }
        live
    }

    /// States that are not dead sinks.
    pub fn live_state_count(&self) -> usize {
        self.live_states().iter().filter(|&&l| l).count()
    }

    /// Accepted words of length at most `max_len`, shortest first and
    /// lexicographic within a length, stopping after `limit` words.
    pub fn enumerate(&self, max_len: usize, limit: usize) -> Vec<Vec<u32>> {
        let live = self.live_states();
        let mut out = Vec::new();
        if !live[self.start] {
            return out;
        }
        let mut frontier = vec![(self.start, Vec::new())];
        for len in 0..=max_len {
            for (s, w) in &frontier {
                if self.accepting[*s] {
                    if out.len() == limit {
                        return out;
                    }
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (s, w) in frontier {
                for d in 0..self.base {
                    let t = self.step(s, d);
                    if live[t] {
                        let mut w2 = w.clone();
                        w2.push(d);
                        next.push((t, w2));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    pub fn table(&self) -> DfaTable {
        DfaTable {
            base: self.base,
            start: self.start,
            accepting: (0..self.trans.len()).filter(|&s| self.accepting[s]).collect(),
            transitions: self.trans.clone(),
        }
    }

    pub fn from_table(table: &DfaTable) -> Result<Self, AutomataError> {
        let mut accepting = vec![false; table.transitions.len()];
        for &s in &table.accepting {
            *accepting
                .get_mut(s)
                .ok_or_else(|| AutomataError::Malformed(format!("accepting state {s}")))? = true;
        }
        Dfa::new(table.base, table.transitions.clone(), table.start, accepting)
    }

    /// Graphviz rendering; dead states are drawn dashed, parallel edges are
    /// merged into one labelled edge.
    pub fn to_dot(&self) -> String {
        self.dot_with(|s| format!("q{s}"), |s| self.accepting[s])
    }

    pub(super) fn dot_with(
        &self,
        label: impl Fn(usize) -> String,
        double: impl Fn(usize) -> bool,
    ) -> String {
        let live = self.live_states();
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
        for s in 0..self.trans.len() {
            let shape = if double(s) { "doublecircle" } else { "circle" };
            let style = if live[s] { "" } else { ", style=dashed" };
            let _ = writeln!(out, "  q{s} [label=\"{}\", shape={shape}{style}];", label(s));
        }
        let _ = writeln!(out, "  init -> q{};", self.start);
        for (s, row) in self.trans.iter().enumerate() {
            let mut grouped: Vec<(usize, Vec<String>)> = Vec::new();
            for (d, &t) in row.iter().enumerate() {
                match grouped.iter_mut().find(|(target, _)| *target == t) {
                    Some((_, ds)) => ds.push(d.to_string()),
                    None => grouped.push((t, vec![d.to_string()])),
                }
            }
            for (t, ds) in grouped {
                let _ = writeln!(out, "  q{s} -> q{t} [label=\"{}\"];", ds.join(","));
            }
        }
        out.push_str("}\n");
        out
    }
}
