//! Word separation for finite automata and parity automata.
//!
//! Finite words are learned over the logic `eps | u.a` whose value on an
//! automaton is the set of states reachable by `u`. Infinite words `u·v^ω`
//! combine that with the logic `a | v.a` whose value records, for every pair
//! of states, the maxima of priorities seen on runs over `v`.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::dag::{FormulaDag, FormulaId};
use crate::engine::{closure, learn, EngineError, Logic, Outcome, Sample};
use crate::ml::is_identifier;
use crate::signature::{op, LogicSignature, Notation, TypeId, TypeSet};

pub type StateSet = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("automaton has no states")]
    NoStates,
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("`{0}` is not a usable letter")]
    InvalidLetter(String),
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("automata do not share one alphabet")]
    AlphabetMismatch,
    #[error("no automata given")]
    NoAutomata,
    #[error("the period of a lasso must be nonempty")]
    EmptyPeriod,
    #[error("search exceeded its budget")]
    BudgetExceeded,
}

/// `(Q, Σ, I, δ, F)` with `δ` total (missing transitions are empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    names: Vec<String>,
    alphabet: Vec<String>,
    initial: Vec<usize>,
    // delta[letter][state], sorted
    delta: Vec<Vec<Vec<usize>>>,
    finals: StateSet,
}

impl Nfa {
    pub fn new<S: AsRef<str>>(
        states: usize,
        alphabet: &[S],
        initial: &[usize],
        edges: &[(usize, &str, usize)],
        finals: &[usize],
    ) -> Result<Nfa, AutomatonError> {
        let names = (0..states).map(|i| format!("q{}", i)).collect();
        Self::with_names(names, alphabet, initial, edges, finals)
    }

    pub fn with_names<S: AsRef<str>>(
        names: Vec<String>,
        alphabet: &[S],
        initial: &[usize],
        edges: &[(usize, &str, usize)],
        finals: &[usize],
    ) -> Result<Nfa, AutomatonError> {
        let n = names.len();
        if n == 0 {
            return Err(AutomatonError::NoStates);
        }
        if alphabet.is_empty() {
            return Err(AutomatonError::EmptyAlphabet);
        }
        let alphabet: Vec<String> = alphabet.iter().map(|a| a.as_ref().to_string()).collect();
        if let Some(a) = alphabet.iter().find(|a| !is_identifier(a) || *a == "eps") {
            return Err(AutomatonError::InvalidLetter(a.clone()));
        }
        let check = |q: usize| if q < n { Ok(q) } else { Err(AutomatonError::StateOutOfRange(q)) };
        let mut init: Vec<usize> = initial.iter().map(|q| check(*q)).collect::<Result<_, _>>()?;
        init.sort_unstable();
        init.dedup();
        let mut delta = vec![vec![Vec::new(); n]; alphabet.len()];
        for (from, a, to) in edges {
            let ai = alphabet
                .iter()
                .position(|x| x == a)
                .ok_or_else(|| AutomatonError::UnknownLetter(a.to_string()))?;
            delta[ai][check(*from)?].push(check(*to)?);
        }
        for row in delta.iter_mut().flatten() {
            row.sort_unstable();
            row.dedup();
        }
        let mut f = FixedBitSet::with_capacity(n);
        for q in finals {
            f.insert(check(*q)?);
        }
        Ok(Nfa {
            names,
            alphabet,
            initial: init,
            delta,
            finals: f,
        })
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    pub fn letter_index(&self, a: &str) -> Option<usize> {
        self.alphabet.iter().position(|x| x == a)
    }

    pub fn successors(&self, q: usize, ai: usize) -> &[usize] {
        &self.delta[ai][q]
    }

    /// All transitions as `(from, letter index, to)`.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (ai, rows) in self.delta.iter().enumerate() {
            for (q, succ) in rows.iter().enumerate() {
                out.extend(succ.iter().map(|r| (q, ai, *r)));
            }
        }
        out
    }

    pub fn empty_set(&self) -> StateSet {
        FixedBitSet::with_capacity(self.state_count())
    }

    pub fn initial_set(&self) -> StateSet {
        let mut s = self.empty_set();
        self.initial.iter().for_each(|q| s.insert(*q));
        s
    }

    /// Direct run: the set of states reached by `word` from the initial states.
    pub fn run(&self, word: &[String]) -> Result<BTreeSet<usize>, AutomatonError> {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for a in word {
            let ai = self
                .letter_index(a)
                .ok_or_else(|| AutomatonError::UnknownLetter(a.clone()))?;
            cur = cur.iter().flat_map(|q| self.delta[ai][*q].iter().copied()).collect();
        }
        Ok(cur)
    }

    pub fn accepts(&self, word: &[String]) -> Result<bool, AutomatonError> {
        Ok(self.run(word)?.iter().any(|q| self.finals.contains(*q)))
    }
}

/// `⋃_{q ∈ s} δ(q, a)`.
pub fn nfa_extend(a_: &Nfa, s: &StateSet, a: &str) -> Result<StateSet, AutomatonError> {
    let ai = a_
        .letter_index(a)
        .ok_or_else(|| AutomatonError::UnknownLetter(a.to_string()))?;
    Ok(extend_by_index(a_, s, ai))
}

fn extend_by_index(a: &Nfa, s: &StateSet, ai: usize) -> StateSet {
    let mut out = a.empty_set();
    for q in s.ones() {
        a.delta[ai][q].iter().for_each(|r| out.insert(*r));
    }
    out
}

/// `(Q, Σ, I, δ, π)` with acceptance by even maximal priority seen infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityAutomaton {
    base: Nfa,
    priority: Vec<u32>,
    // distinct priorities, ascending
    levels: Vec<u32>,
}

impl ParityAutomaton {
    pub fn new(base: Nfa, priority: Vec<u32>) -> Result<Self, AutomatonError> {
        if priority.len() != base.state_count() {
            return Err(AutomatonError::StateOutOfRange(priority.len()));
        }
        let mut levels = priority.clone();
        levels.sort_unstable();
        levels.dedup();
        Ok(ParityAutomaton {
            base,
            priority,
            levels,
        })
    }

    pub fn base(&self) -> &Nfa {
        &self.base
    }

    pub fn priority(&self, q: usize) -> u32 {
        self.priority[q]
    }

    pub fn priorities(&self) -> &[u32] {
        &self.priority
    }

    /// `π(Q)`, ascending.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn state_count(&self) -> usize {
        self.base.state_count()
    }

    fn level_of(&self, p: u32) -> usize {
        self.levels.binary_search(&p).expect("priority of this automaton")
    }

    fn bit(&self, q: usize, r: usize, level: usize) -> usize {
        let n = self.state_count();
        (q * n + r) * self.levels.len() + level
    }

    pub fn empty_summary(&self) -> PrioritySummary {
        let n = self.state_count();
        FixedBitSet::with_capacity(n * n * self.levels.len())
    }

    /// `(q', n) ∈ h(q)` pairs of a summary, ascending.
    pub fn summary_pairs(&self, h: &PrioritySummary, q: usize) -> Vec<(usize, u32)> {
        let n = self.state_count();
        let l = self.levels.len();
        let base = q * n * l;
        (base..base + n * l)
            .filter(|b| h.contains(*b))
            .map(|b| ((b - base) / l, self.levels[(b - base) % l]))
            .collect()
    }

    pub fn summary_insert(&self, h: &mut PrioritySummary, q: usize, r: usize, p: u32) {
        let b = self.bit(q, r, self.level_of(p));
        h.insert(b);
    }

    pub fn summary_contains(&self, h: &PrioritySummary, q: usize, r: usize, p: u32) -> bool {
        match self.levels.binary_search(&p) {
            Ok(l) => h.contains(self.bit(q, r, l)),
            Err(_) => false,
        }
    }
}

/// For each state `q`, a set of `(q', n)`; stored as a bit set over `Q × Q × π(Q)`.
pub type PrioritySummary = FixedBitSet;

pub fn pw_seed(a: &ParityAutomaton, letter: &str) -> Result<PrioritySummary, AutomatonError> {
    let ai = a
        .base
        .letter_index(letter)
        .ok_or_else(|| AutomatonError::UnknownLetter(letter.to_string()))?;
    Ok(seed_by_index(a, ai))
}

fn seed_by_index(a: &ParityAutomaton, ai: usize) -> PrioritySummary {
    let mut h = a.empty_summary();
    for q in 0..a.state_count() {
        for &r in a.base.successors(q, ai) {
            a.summary_insert(&mut h, q, r, a.priority(q).max(a.priority(r)));
        }
    }
    h
}

/// `h'(q) = {(q', max(π(q'), n'')) : (q'', n'') ∈ h(q), q' ∈ δ(q'', a)}`.
pub fn pw_extend(a: &ParityAutomaton, h: &PrioritySummary, letter: &str) -> Result<PrioritySummary, AutomatonError> {
    let ai = a
        .base
        .letter_index(letter)
        .ok_or_else(|| AutomatonError::UnknownLetter(letter.to_string()))?;
    Ok(extend_summary(a, h, ai))
}

fn extend_summary(a: &ParityAutomaton, h: &PrioritySummary, ai: usize) -> PrioritySummary {
    let mut out = a.empty_summary();
    for q in 0..a.state_count() {
        for (mid, p) in a.summary_pairs(h, q) {
            for &r in a.base.successors(mid, ai) {
                a.summary_insert(&mut out, q, r, p.max(a.priority(r)));
            }
        }
    }
    out
}

/// Labels `n` for which some path from `start` reaches a cycle whose largest edge label is `n`.
pub fn achievable_limsups(a: &ParityAutomaton, start: &StateSet, h: &PrioritySummary) -> BTreeSet<u32> {
    let n = a.state_count();
    let mut edges = Vec::new();
    for q in 0..n {
        for (r, p) in a.summary_pairs(h, q) {
            edges.push((q, r, p));
        }
    }
    // states reachable from start in the full graph
    let mut reach = FixedBitSet::with_capacity(n);
    let mut stack: Vec<usize> = start.ones().collect();
    stack.iter().for_each(|q| reach.insert(*q));
    while let Some(q) = stack.pop() {
        for &(x, y, _) in &edges {
            if x == q && !reach.put(y) {
                stack.push(y);
            }
        }
    }
    let labels: BTreeSet<u32> = edges.iter().map(|e| e.2).collect();
    let mut out = BTreeSet::new();
    for &level in &labels {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for &(x, y, p) in &edges {
            if p <= level {
                g.add_edge(nodes[x], nodes[y], ());
            }
        }
        let mut comp = vec![usize::MAX; n];
        for (ci, scc) in tarjan_scc(&g).into_iter().enumerate() {
            for v in scc {
                comp[v.index()] = ci;
            }
        }
        let hit = edges.iter().any(|&(x, y, p)| p == level && comp[x] == comp[y] && reach.contains(x));
        if hit {
            out.insert(level);
        }
    }
    out
}

pub fn parity_accepts_summary(a: &ParityAutomaton, start: &StateSet, h: &PrioritySummary) -> bool {
    achievable_limsups(a, start, h).iter().any(|p| p % 2 == 0)
}

/// States from which `v^ω` is accepted, `v` having summary `h`.
pub fn even_states(a: &ParityAutomaton, h: &PrioritySummary) -> StateSet {
    let mut out = a.base.empty_set();
    for q in 0..a.state_count() {
        let mut s = a.base.empty_set();
        s.insert(q);
        out.set(q, parity_accepts_summary(a, &s, h));
    }
    out
}

/// Acceptance of `u·v^ω` via the product of the automaton with the lasso's positions.
pub fn accepts_lasso(a: &ParityAutomaton, u: &[String], v: &[String]) -> Result<bool, AutomatonError> {
    if v.is_empty() {
        return Err(AutomatonError::EmptyPeriod);
    }
    let n = a.state_count();
    let len = u.len() + v.len();
    let letters: Vec<usize> = u
        .iter()
        .chain(v)
        .map(|x| a.base.letter_index(x).ok_or_else(|| AutomatonError::UnknownLetter(x.clone())))
        .collect::<Result<_, _>>()?;
    let next_pos = |i: usize| if i + 1 < len { i + 1 } else { u.len() };
    let id = |q: usize, i: usize| i * n + q;
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n * len];
    for i in 0..len {
        for q in 0..n {
            for &r in a.base.successors(q, letters[i]) {
                succ[id(q, i)].push(id(r, next_pos(i)));
            }
        }
    }
    let prio = |node: usize| a.priority(node % n);
    let mut reach = vec![false; n * len];
    let mut stack: Vec<usize> = a.base.initial().iter().map(|q| id(*q, 0)).collect();
    stack.iter().for_each(|s| reach[*s] = true);
    while let Some(x) = stack.pop() {
        for &y in &succ[x] {
            if !reach[y] {
                reach[y] = true;
                stack.push(y);
            }
        }
    }
    for &e in a.levels().iter().filter(|p| *p % 2 == 0) {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<_> = (0..n * len).map(|_| g.add_node(())).collect();
        for x in 0..n * len {
            if prio(x) > e {
                continue;
            }
            for &y in &succ[x] {
                if prio(y) <= e {
                    g.add_edge(nodes[x], nodes[y], ());
                }
            }
        }
        for scc in tarjan_scc(&g) {
            let cyclic = scc.len() > 1 || succ[scc[0].index()].contains(&scc[0].index());
            if cyclic && scc.iter().any(|v| prio(v.index()) == e) && reach[scc[0].index()] {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// All `(q, q', n)` such that some run on `v` goes from `q` to `q'` with maximal priority `n`,
/// by enumerating runs.
pub fn pw_brute_summary(a: &ParityAutomaton, v: &[String]) -> Result<BTreeSet<(usize, usize, u32)>, AutomatonError> {
    let letters: Vec<usize> = v
        .iter()
        .map(|x| a.base.letter_index(x).ok_or_else(|| AutomatonError::UnknownLetter(x.clone())))
        .collect::<Result<_, _>>()?;
    let mut out = BTreeSet::new();
    for q in 0..a.state_count() {
        let mut runs: Vec<Vec<usize>> = vec![vec![q]];
        for &ai in &letters {
            runs = runs
                .into_iter()
                .flat_map(|r| {
                    let last = *r.last().expect("nonempty run");
                    a.base.successors(last, ai).iter().map(move |s| {
                        let mut r2 = r.clone();
                        r2.push(*s);
                        r2
                    }).collect::<Vec<_>>()
                })
                .collect();
        }
        for r in runs {
            let m = r.iter().map(|s| a.priority(*s)).max().expect("nonempty run");
            out.insert((q, *r.last().expect("nonempty run"), m));
        }
    }
    Ok(out)
}

/// The finite-word logic `eps | u.a`.
#[derive(Debug, Clone)]
pub struct FwLogic {
    signature: LogicSignature,
}

/// The nonempty-word logic `a | v.a`.
#[derive(Debug, Clone)]
pub struct PwLogic {
    signature: LogicSignature,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordOp {
    Empty,
    Letter(usize),
    Append(usize),
}

fn word_signature(alphabet: &[String], with_empty: bool) -> LogicSignature {
    let t = TypeId(0);
    let s = TypeSet::single(t);
    let mut ops = Vec::new();
    if with_empty {
        ops.push(op("eps", Notation::Atom("eps".into()), t, &[]));
    } else {
        for a in alphabet {
            ops.push(op(a, Notation::Atom(a.clone()), t, &[]));
        }
    }
    for a in alphabet {
        ops.push(op(&format!(".{}", a), Notation::Postfix(a.clone()), t, &[s]));
    }
    LogicSignature::new(vec!["word".into()], &[t], ops).expect("well-formed word signature")
}

fn decode_word(alphabet: &[String], name: &str) -> Option<WordOp> {
    if name == "eps" {
        return Some(WordOp::Empty);
    }
    if let Some(a) = name.strip_prefix('.') {
        return alphabet.iter().position(|x| x == a).map(WordOp::Append);
    }
    alphabet.iter().position(|x| x == name).map(WordOp::Letter)
}

/// Letters spelled by a word formula, first letter first.
pub fn word_of(dag: &FormulaDag, id: FormulaId) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = id;
    loop {
        let name = dag.op_name(cur);
        match dag.children(cur) {
            [c] => {
                out.push(name.trim_start_matches('.').to_string());
                cur = *c;
            }
            _ => {
                if name != "eps" {
                    out.push(name.to_string());
                }
                break;
            }
        }
    }
    out.reverse();
    out
}

impl FwLogic {
    pub fn new(alphabet: &[String]) -> Self {
        FwLogic {
            signature: word_signature(alphabet, true),
        }
    }
}

impl PwLogic {
    pub fn new(alphabet: &[String]) -> Self {
        PwLogic {
            signature: word_signature(alphabet, false),
        }
    }
}

fn alphabet_of_sig(sig: &LogicSignature) -> Vec<String> {
    sig.operators()
        .iter()
        .filter_map(|o| match &o.notation {
            Notation::Postfix(a) => Some(a.clone()),
            _ => None,
        })
        .collect()
}

impl Logic for FwLogic {
    type Model = Nfa;
    type Value = StateSet;
    type Op = WordOp;

    fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    fn decode(&self, name: &str) -> Option<WordOp> {
        decode_word(&alphabet_of_sig(&self.signature), name)
    }

    fn atom(&self, a: &Nfa, _op: &WordOp) -> StateSet {
        a.initial_set()
    }

    fn apply(&self, a: &Nfa, op: &WordOp, args: &[&StateSet]) -> StateSet {
        match op {
            WordOp::Append(ai) => extend_by_index(a, args[0], *ai),
            _ => a.initial_set(),
        }
    }

    fn sat(&self, a: &Nfa, value: &StateSet) -> bool {
        value.intersection(a.finals()).next().is_some()
    }

    fn value_space_size(&self, a: &Nfa, _ty: TypeId) -> BigUint {
        BigUint::from(1u8) << a.state_count()
    }

    fn reference_value(&self, a: &Nfa, dag: &FormulaDag, id: FormulaId) -> StateSet {
        let mut s = a.empty_set();
        for q in a.run(&word_of(dag, id)).expect("letters of the alphabet") {
            s.insert(q);
        }
        s
    }

    fn model_check(&self, a: &Nfa, dag: &FormulaDag, id: FormulaId) -> bool {
        a.accepts(&word_of(dag, id)).expect("letters of the alphabet")
    }
}

impl Logic for PwLogic {
    type Model = ParityAutomaton;
    type Value = PrioritySummary;
    type Op = WordOp;

    fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    fn decode(&self, name: &str) -> Option<WordOp> {
        decode_word(&alphabet_of_sig(&self.signature), name)
    }

    fn atom(&self, a: &ParityAutomaton, op: &WordOp) -> PrioritySummary {
        match op {
            WordOp::Letter(ai) => seed_by_index(a, *ai),
            _ => a.empty_summary(),
        }
    }

    fn apply(&self, a: &ParityAutomaton, op: &WordOp, args: &[&PrioritySummary]) -> PrioritySummary {
        match op {
            WordOp::Append(ai) => extend_summary(a, args[0], *ai),
            WordOp::Letter(ai) => seed_by_index(a, *ai),
            WordOp::Empty => a.empty_summary(),
        }
    }

    /// `v^ω` accepted from the initial states.
    fn sat(&self, a: &ParityAutomaton, h: &PrioritySummary) -> bool {
        parity_accepts_summary(a, &a.base.initial_set(), h)
    }

    fn value_space_size(&self, a: &ParityAutomaton, _ty: TypeId) -> BigUint {
        let n = a.state_count();
        BigUint::from(1u8) << (n * n * a.levels().len())
    }

    fn reference_value(&self, a: &ParityAutomaton, dag: &FormulaDag, id: FormulaId) -> PrioritySummary {
        let mut h = a.empty_summary();
        for (q, r, p) in pw_brute_summary(a, &word_of(dag, id)).expect("letters of the alphabet") {
            a.summary_insert(&mut h, q, r, p);
        }
        h
    }

    fn model_check(&self, a: &ParityAutomaton, dag: &FormulaDag, id: FormulaId) -> bool {
        accepts_lasso(a, &[], &word_of(dag, id)).expect("letters of the alphabet")
    }
}

fn shared_alphabet<'a>(alphabets: impl Iterator<Item = &'a [String]>) -> Result<Vec<String>, AutomatonError> {
    let mut first: Option<BTreeSet<&String>> = None;
    let mut order: Vec<String> = Vec::new();
    for al in alphabets {
        let set: BTreeSet<&String> = al.iter().collect();
        match &first {
            None => {
                first = Some(set);
                order = al.to_vec();
            }
            Some(f) if *f != set => return Err(AutomatonError::AlphabetMismatch),
            _ => {}
        }
    }
    if first.is_none() {
        return Err(AutomatonError::NoAutomata);
    }
    Ok(order)
}

/// Result of a finite-word separation run.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSeparation {
    pub word: Option<Vec<String>>,
    /// `2^n` with `n` the total number of states.
    pub bound: BigUint,
    pub entries: usize,
}

/// A word accepted by every positive and rejected by every negative automaton, if one exists.
pub fn nfa_separate(positives: &[Nfa], negatives: &[Nfa], budget: Option<usize>) -> Result<WordSeparation, AutomatonError> {
    let alphabet = shared_alphabet(positives.iter().chain(negatives).map(|a| a.alphabet()))?;
    let logic = FwLogic::new(&alphabet);
    let sample = Sample::new(positives.to_vec(), negatives.to_vec());
    let report = learn(&logic, logic.signature(), &sample, budget).map_err(|e| match e {
        EngineError::BudgetExceeded { .. } => AutomatonError::BudgetExceeded,
        other => panic!("word logic failure: {}", other),
    })?;
    let word = match report.outcome {
        Outcome::Separable { formula, .. } => Some(word_of(&report.dag, formula)),
        Outcome::NotSeparable => None,
        Outcome::Inconclusive => return Err(AutomatonError::BudgetExceeded),
    };
    Ok(WordSeparation {
        word,
        bound: report.bound,
        entries: report.entries,
    })
}

/// Result of a lasso separation run.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoSeparation {
    pub lasso: Option<(Vec<String>, Vec<String>)>,
    /// `Σ|Q_A|`.
    pub n: usize,
    /// `Σ|Q_A|²·|π(Q_A)|`.
    pub k: usize,
    pub prefix_entries: usize,
    pub period_entries: usize,
}

/// An ultimately periodic word `u·v^ω` accepted by every positive and rejected by every negative.
///
/// Both closures are computed in full; pairs (prefix value, period value)
/// are tried with prefix values in table order as the outer loop.
pub fn parity_separate(
    positives: &[ParityAutomaton],
    negatives: &[ParityAutomaton],
    budget: Option<usize>,
) -> Result<LassoSeparation, AutomatonError> {
    let all: Vec<&ParityAutomaton> = positives.iter().chain(negatives).collect();
    let alphabet = shared_alphabet(all.iter().map(|a| a.base.alphabet()))?;
    let n: usize = all.iter().map(|a| a.state_count()).sum();
    let k: usize = all
        .iter()
        .map(|a| a.state_count() * a.state_count() * a.levels().len())
        .sum();

    let fw = FwLogic::new(&alphabet);
    let fw_sample = Sample::new(
        positives.iter().map(|a| a.base.clone()).collect(),
        negatives.iter().map(|a| a.base.clone()).collect(),
    );
    let prefixes = closure(&fw, fw.signature(), &fw_sample, budget).map_err(|_| AutomatonError::BudgetExceeded)?;
    let pw = PwLogic::new(&alphabet);
    let pw_sample = Sample::new(positives.to_vec(), negatives.to_vec());
    let periods = closure(&pw, pw.signature(), &pw_sample, budget).map_err(|_| AutomatonError::BudgetExceeded)?;

    let even: Vec<Vec<StateSet>> = (0..periods.len())
        .map(|i| {
            let t = periods.tuple(i);
            all.iter().zip(&t.values).map(|(a, h)| even_states(a, h)).collect()
        })
        .collect();
    let mut found = None;
    'outer: for x in 0..prefixes.len() {
        let reach = &prefixes.tuple(x).values;
        for (h, ev) in even.iter().enumerate() {
            let ok = (0..all.len()).all(|m| {
                let hits = reach[m].intersection(&ev[m]).next().is_some();
                hits == (m < positives.len())
            });
            if ok {
                found = Some((x, h));
                break 'outer;
            }
        }
    }
    let lasso = match found {
        None => None,
        Some((x, h)) => {
            let mut fdag = FormulaDag::new(fw.signature().clone());
            let u = crate::engine::witness(&prefixes, x, &mut fdag).expect("fw witness");
            let mut pdag = FormulaDag::new(pw.signature().clone());
            let v = crate::engine::witness(&periods, h, &mut pdag).expect("pw witness");
            Some((word_of(&fdag, u), word_of(&pdag, v)))
        }
    };
    Ok(LassoSeparation {
        lasso,
        n,
        k,
        prefix_entries: prefixes.len(),
        period_entries: periods.len(),
    })
}

/// Maps letter names to indices for building automata from string edges.
pub fn letters_map(alphabet: &[String]) -> HashMap<&str, usize> {
    alphabet.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect()
}
