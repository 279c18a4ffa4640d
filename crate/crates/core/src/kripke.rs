//! Kripke structures with action-labelled transitions.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Action used for structures given without action labels.
pub const DEFAULT_ACTION: &str = "_";

pub type StateSet = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("structure has no states")]
    NoStates,
    #[error("structure has no initial state")]
    NoInitialState,
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("state `{0}` has no successor")]
    BlockingState(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    names: Vec<String>,
    initial: Vec<usize>,
    actions: Vec<String>,
    props: Vec<String>,
    labels: Vec<FixedBitSet>,
    // delta[action][state], sorted and deduplicated
    delta: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Default)]
pub struct KripkeBuilder {
    names: Vec<String>,
    initial: Vec<usize>,
    props: BTreeSet<String>,
    labels: Vec<BTreeSet<String>>,
    edges: Vec<(usize, String, usize)>,
    actions: Vec<String>,
}

impl KripkeBuilder {
    pub fn new(states: usize) -> Self {
        KripkeBuilder {
            names: (0..states).map(|i| format!("q{}", i)).collect(),
            labels: vec![BTreeSet::new(); states],
            ..Default::default()
        }
    }

    pub fn names<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.names = names.into_iter().map(Into::into).collect();
        self.labels.resize(self.names.len(), BTreeSet::new());
        self
    }

    pub fn initial(mut self, states: &[usize]) -> Self {
        self.initial.extend_from_slice(states);
        self
    }

    pub fn label(mut self, state: usize, props: &[&str]) -> Self {
        if state >= self.labels.len() {
            self.labels.resize(state + 1, BTreeSet::new());
        }
        for p in props {
            self.labels[state].insert(p.to_string());
            self.props.insert(p.to_string());
        }
        self
    }

    /// Declares a proposition even if no state carries it.
    pub fn prop(mut self, p: &str) -> Self {
        self.props.insert(p.to_string());
        self
    }

    /// Declares an action even if no transition uses it.
    pub fn action(mut self, a: &str) -> Self {
        if !self.actions.iter().any(|x| x == a) {
            self.actions.push(a.to_string());
        }
        self
    }

    pub fn edge(mut self, from: usize, action: &str, to: usize) -> Self {
        self = self.action(action);
        self.edges.push((from, action.to_string(), to));
        self
    }

    /// Transition under [`DEFAULT_ACTION`].
    pub fn succ(self, from: usize, to: usize) -> Self {
        self.edge(from, DEFAULT_ACTION, to)
    }

    pub fn build(self) -> Result<KripkeStructure, KripkeError> {
        let n = self.names.len();
        if n == 0 {
            return Err(KripkeError::NoStates);
        }
        if self.labels.len() > n {
            return Err(KripkeError::StateOutOfRange(self.labels.len() - 1));
        }
        let mut initial = self.initial;
        initial.sort_unstable();
        initial.dedup();
        if initial.is_empty() {
            return Err(KripkeError::NoInitialState);
        }
        if let Some(&q) = initial.iter().find(|q| **q >= n) {
            return Err(KripkeError::StateOutOfRange(q));
        }
        let mut actions = self.actions;
        if actions.is_empty() {
            actions.push(DEFAULT_ACTION.to_string());
        }
        let mut delta = vec![vec![Vec::new(); n]; actions.len()];
        for (from, a, to) in self.edges {
            if from >= n || to >= n {
                return Err(KripkeError::StateOutOfRange(from.max(to)));
            }
            let ai = actions.iter().position(|x| *x == a).expect("declared action");
            delta[ai][from].push(to);
        }
        for row in delta.iter_mut().flatten() {
            row.sort_unstable();
            row.dedup();
        }
        let props: Vec<String> = self.props.into_iter().collect();
        let labels = self
            .labels
            .iter()
            .map(|l| {
                let mut s = FixedBitSet::with_capacity(props.len());
                for p in l {
                    s.insert(props.iter().position(|x| x == p).expect("declared prop"));
                }
                s
            })
            .collect();
        Ok(KripkeStructure {
            names: self.names,
            initial,
            actions,
            props,
            labels,
            delta,
        })
    }
}

impl KripkeStructure {
    pub fn builder(states: usize) -> KripkeBuilder {
        KripkeBuilder::new(states)
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn initial_set(&self) -> StateSet {
        let mut s = self.empty_set();
        self.initial.iter().for_each(|q| s.insert(*q));
        s
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn action_index(&self, a: &str) -> Option<usize> {
        self.actions.iter().position(|x| x == a)
    }

    pub fn prop_index(&self, p: &str) -> Option<usize> {
        self.props.iter().position(|x| x == p)
    }

    pub fn has_label(&self, q: usize, p: &str) -> bool {
        self.prop_index(p).map(|i| self.labels[q].contains(i)).unwrap_or(false)
    }

    pub fn label(&self, q: usize) -> Vec<&str> {
        self.labels[q].ones().map(|i| self.props[i].as_str()).collect()
    }

    /// `δ(q, a)`; empty for actions the structure does not know.
    pub fn successors(&self, q: usize, a: &str) -> &[usize] {
        match self.action_index(a) {
            Some(ai) => &self.delta[ai][q],
            None => &[],
        }
    }

    pub fn successors_by_index(&self, q: usize, ai: usize) -> &[usize] {
        &self.delta[ai][q]
    }

    /// Union of `δ(q, a)` over all actions, ascending.
    pub fn post(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.delta.iter().flat_map(|d| d[q].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn empty_set(&self) -> StateSet {
        FixedBitSet::with_capacity(self.state_count())
    }

    pub fn full_set(&self) -> StateSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// States labelled with `p`; empty if `p` is not a proposition of this structure.
    pub fn states_with(&self, p: &str) -> StateSet {
        let mut s = self.empty_set();
        if let Some(i) = self.prop_index(p) {
            for q in 0..self.state_count() {
                if self.labels[q].contains(i) {
                    s.insert(q);
                }
            }
        }
        s
    }

    pub fn validate_nonblocking(self) -> Result<NonBlockingKripke, KripkeError> {
        if let Some(q) = (0..self.state_count()).find(|q| self.post(*q).is_empty()) {
            return Err(KripkeError::BlockingState(self.names[q].clone()));
        }
        Ok(NonBlockingKripke(self))
    }

    /// States reachable from `q` (including `q`) through states of `within`.
    /// `q` itself need not lie in `within`.
    pub fn reach_within(&self, q: usize, within: &StateSet) -> StateSet {
        let mut seen = self.empty_set();
        seen.insert(q);
        let mut stack = vec![q];
        while let Some(s) = stack.pop() {
            if s != q && !within.contains(s) {
                continue;
            }
            for t in self.post(s) {
                if !seen.put(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Whether some infinite path from `q` stays inside `within` forever.
    pub fn has_infinite_path_within(&self, q: usize, within: &StateSet) -> bool {
        if !within.contains(q) {
            return false;
        }
        // A state of `within` reachable inside `within` that lies on a cycle inside `within`.
        let reach = self.reach_within(q, within);
        reach.ones().filter(|s| within.contains(*s)).any(|s| {
            self.post(s)
                .into_iter()
                .filter(|t| within.contains(*t))
                .any(|t| self.reach_within(t, within).contains(s) && within.contains(t))
        })
    }
}

/// A structure in which every state has at least one successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonBlockingKripke(KripkeStructure);

impl NonBlockingKripke {
    pub fn inner(&self) -> &KripkeStructure {
        &self.0
    }

    pub fn into_inner(self) -> KripkeStructure {
        self.0
    }
}

impl std::ops::Deref for NonBlockingKripke {
    type Target = KripkeStructure;
    fn deref(&self) -> &KripkeStructure {
        &self.0
    }
}

pub fn validate_nonblocking(k: KripkeStructure) -> Result<NonBlockingKripke, KripkeError> {
    k.validate_nonblocking()
}
