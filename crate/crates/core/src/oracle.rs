//! Independent oracles: syntactic enumeration by tree size and a subset-product search for words.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::automata::{AutomatonError, Nfa};
use crate::dag::{FormulaDag, FormulaId};
use crate::engine::{Logic, Sample, SemanticTuple};
use crate::signature::{LogicSignature, OpId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// First separating formula of minimal tree size.
    Separable {
        formula: FormulaId,
        tree_size: u64,
        dag_size: usize,
    },
    /// Every value tuple the fragment can produce was seen and none separates.
    Exhausted { tuples: usize, max_size: u64 },
    /// Sizes up to the cap hold no separating formula.
    CapExceeded { cap: u64, tuples: usize },
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub outcome: OracleOutcome,
    pub dag: FormulaDag,
}

impl OracleReport {
    pub fn is_separable(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Separable { .. })
    }
}

/// Enumerates formulas of `fragment` by increasing tree size.
///
/// Values come from `reference_value`, satisfaction from `model_check`.
/// Formulas whose value tuple was already produced by a smaller or earlier
/// formula are dropped: swapping a subformula for one with the same values
/// keeps the values of the whole and does not grow it.
pub fn enumerate_min_formula<L: Logic>(
    logic: &L,
    fragment: &LogicSignature,
    sample: &Sample<L::Model>,
    cap: u64,
) -> OracleReport {
    assert!(cap >= 1, "cap must be positive");
    let models = sample.models();
    let mut dag = FormulaDag::new(fragment.clone());
    let mut seen: HashSet<SemanticTuple<L::Value>> = HashSet::new();
    // kept[s] = formulas of tree size s + 1 with a new tuple
    let mut kept: Vec<Vec<FormulaId>> = Vec::new();
    let mut last_new: u64 = 0;

    let ops: Vec<OpId> = fragment.op_ids().collect();
    let mut size: u64 = 1;
    loop {
        if size > cap {
            return OracleReport {
                outcome: OracleOutcome::CapExceeded {
                    cap,
                    tuples: seen.len(),
                },
                dag,
            };
        }
        if last_new > 0 && size > 2 * last_new + 1 || last_new == 0 && size > 1 {
            return OracleReport {
                outcome: OracleOutcome::Exhausted {
                    tuples: seen.len(),
                    max_size: last_new,
                },
                dag,
            };
        }
        let mut layer = Vec::new();
        for &o in &ops {
            let decl = fragment.op(o).clone();
            let mut candidates: Vec<Vec<FormulaId>> = Vec::new();
            match decl.arity() {
                0 if size == 1 => candidates.push(vec![]),
                1 if size >= 2 => {
                    if let Some(prev) = kept.get((size - 2) as usize) {
                        candidates.extend(prev.iter().map(|c| vec![*c]));
                    }
                }
                2 if size >= 3 => {
                    for left in 1..=size - 2 {
                        let right = size - 1 - left;
                        let (Some(ls), Some(rs)) = (kept.get((left - 1) as usize), kept.get((right - 1) as usize)) else {
                            continue;
                        };
                        for a in ls {
                            for b in rs {
                                candidates.push(vec![*a, *b]);
                            }
                        }
                    }
                }
                _ => {}
            }
            for children in candidates {
                let Ok(id) = dag.intern_op(o, &children) else {
                    continue;
                };
                let ty = dag.type_of(id).expect("interned formula");
                let tuple = SemanticTuple {
                    ty,
                    values: models.iter().map(|m| logic.reference_value(m, &dag, id)).collect(),
                };
                if !seen.insert(tuple) {
                    continue;
                }
                layer.push(id);
                if fragment.is_final(ty)
                    && models
                        .iter()
                        .enumerate()
                        .all(|(k, m)| logic.model_check(m, &dag, id) == sample.is_positive(k))
                {
                    let dag_size = dag.dag_size(id).expect("interned formula");
                    return OracleReport {
                        outcome: OracleOutcome::Separable {
                            formula: id,
                            tree_size: size,
                            dag_size,
                        },
                        dag,
                    };
                }
            }
        }
        if !layer.is_empty() {
            last_new = size;
        }
        kept.push(layer);
        size += 1;
    }
}

/// Shortest word accepted by all positives and rejected by all negatives,
/// by breadth-first search over tuples of reachable state sets.
pub fn shortest_separating_word(positives: &[Nfa], negatives: &[Nfa]) -> Result<Option<Vec<String>>, AutomatonError> {
    let all: Vec<&Nfa> = positives.iter().chain(negatives).collect();
    let first = all.first().ok_or(AutomatonError::NoAutomata)?;
    let alphabet: Vec<String> = first.alphabet().to_vec();
    let mut sorted = alphabet.clone();
    sorted.sort();
    for a in &all {
        let mut s = a.alphabet().to_vec();
        s.sort();
        if s != sorted {
            return Err(AutomatonError::AlphabetMismatch);
        }
    }
    type Node = Vec<Vec<usize>>;
    let start: Node = all.iter().map(|a| a.initial().to_vec()).collect();
    let good = |n: &Node| {
        n.iter()
            .zip(&all)
            .enumerate()
            .all(|(k, (s, a))| s.iter().any(|q| a.finals().contains(*q)) == (k < positives.len()))
    };
    let mut parent: HashMap<Node, Option<(Node, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if good(&node) {
            let mut word = Vec::new();
            let mut cur = node;
            while let Some(Some((prev, l))) = parent.get(&cur).cloned() {
                word.push(alphabet[l].clone());
                cur = prev;
            }
            word.reverse();
            return Ok(Some(word));
        }
        for (l, letter) in alphabet.iter().enumerate() {
            let next: Node = node
                .iter()
                .zip(&all)
                .map(|(s, a)| {
                    let ai = a.letter_index(letter).expect("shared alphabet");
                    let mut out: Vec<usize> = s.iter().flat_map(|q| a.successors(*q, ai).iter().copied()).collect();
                    out.sort_unstable();
                    out.dedup();
                    out
                })
                .collect();
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((node.clone(), l)));
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}
