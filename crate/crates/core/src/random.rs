//! Seeded generators for models, automata and formulas.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{Nfa, ParityAutomaton};
use crate::dag::{FormulaDag, FormulaId};
use crate::kripke::{KripkeStructure, NonBlockingKripke};
use crate::ltl::{LassoWord, Letter};
use crate::signature::{OpId, TypeSet};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_letter<R: Rng>(rng: &mut R, props: &[&str]) -> Letter {
    props.iter().filter(|_| rng.gen_bool(0.5)).map(|p| p.to_string()).collect()
}

/// A structure over `props` and `actions`; each state gets each transition with probability `density`.
/// With `nonblocking`, states left without successors get one random successor.
pub fn random_kripke<R: Rng>(
    rng: &mut R,
    states: usize,
    props: &[&str],
    actions: &[&str],
    density: f64,
    nonblocking: bool,
) -> KripkeStructure {
    assert!(states >= 1 && !actions.is_empty());
    let mut b = KripkeStructure::builder(states).initial(&[0]);
    for p in props {
        b = b.prop(p);
    }
    for a in actions {
        b = b.action(a);
    }
    for q in 0..states {
        let l: Vec<&str> = props.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        b = b.label(q, &l);
        let mut any = false;
        for a in actions {
            for r in 0..states {
                if rng.gen_bool(density) {
                    b = b.edge(q, a, r);
                    any = true;
                }
            }
        }
        if nonblocking && !any {
            let a = actions.choose(rng).expect("actions");
            b = b.edge(q, a, rng.gen_range(0..states));
        }
    }
    b.build().expect("generated structure")
}

pub fn random_nonblocking<R: Rng>(rng: &mut R, states: usize, props: &[&str], density: f64) -> NonBlockingKripke {
    random_kripke(rng, states, props, &[crate::kripke::DEFAULT_ACTION], density, true)
        .validate_nonblocking()
        .expect("every state has a successor")
}

/// A lasso with `1 ≤ |u| + |v| ≤ max_len` and a nonempty period.
pub fn random_lasso<R: Rng>(rng: &mut R, props: &[&str], max_len: usize) -> LassoWord {
    assert!(max_len >= 1);
    let total = rng.gen_range(1..=max_len);
    let period = rng.gen_range(1..=total);
    let prefix = (0..total - period).map(|_| random_letter(rng, props)).collect();
    let per = (0..period).map(|_| random_letter(rng, props)).collect();
    LassoWord::new(prefix, per).expect("nonempty word")
}

/// A formula of tree size exactly `size` over `ops`, of a type in `types`; `None` if impossible.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    dag: &mut FormulaDag,
    ops: &[OpId],
    types: TypeSet,
    size: usize,
) -> Option<FormulaId> {
    let mut attempts = 64;
    gen(rng, dag, ops, types, size, &mut attempts)
}

fn gen<R: Rng>(
    rng: &mut R,
    dag: &mut FormulaDag,
    ops: &[OpId],
    types: TypeSet,
    size: usize,
    attempts: &mut usize,
) -> Option<FormulaId> {
    if size == 0 || *attempts == 0 {
        return None;
    }
    let sig = dag.shared_signature();
    let mut cands: Vec<OpId> = ops
        .iter()
        .copied()
        .filter(|o| {
            let d = sig.op(*o);
            types.contains(d.result_type)
                && match d.arity() {
                    0 => size == 1,
                    1 => size >= 2,
                    _ => size >= 3,
                }
        })
        .collect();
    cands.shuffle(rng);
    for o in cands {
        *attempts = attempts.saturating_sub(1);
        let d = sig.op(o);
        let kids = match d.arity() {
            0 => Some(vec![]),
            1 => gen(rng, dag, ops, d.arg_types[0], size - 1, attempts).map(|c| vec![c]),
            _ => {
                let left = rng.gen_range(1..=size - 2);
                gen(rng, dag, ops, d.arg_types[0], left, attempts).and_then(|a| {
                    gen(rng, dag, ops, d.arg_types[1], size - 1 - left, attempts).map(|b| vec![a, b])
                })
            }
        };
        if let Some(k) = kids {
            if let Ok(id) = dag.intern_op(o, &k) {
                return Some(id);
            }
        }
        if *attempts == 0 {
            return None;
        }
    }
    None
}

/// A formula of some tree size in `1..=max_size`.
pub fn random_formula_upto<R: Rng>(
    rng: &mut R,
    dag: &mut FormulaDag,
    ops: &[OpId],
    types: TypeSet,
    max_size: usize,
) -> FormulaId {
    loop {
        let size = rng.gen_range(1..=max_size);
        if let Some(f) = random_formula(rng, dag, ops, types, size) {
            return f;
        }
    }
}

pub fn random_nfa<R: Rng>(rng: &mut R, states: usize, alphabet: &[&str], density: f64) -> Nfa {
    let mut edges = Vec::new();
    for q in 0..states {
        for a in alphabet {
            for r in 0..states {
                if rng.gen_bool(density) {
                    edges.push((q, *a, r));
                }
            }
        }
    }
    let initial: Vec<usize> = (0..states).filter(|q| *q == 0 || rng.gen_bool(0.2)).collect();
    let finals: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.4)).collect();
    Nfa::new(states, alphabet, &initial, &edges, &finals).expect("generated automaton")
}

/// Priorities drawn from `priorities`.
pub fn random_parity<R: Rng>(rng: &mut R, states: usize, alphabet: &[&str], density: f64, priorities: &[u32]) -> ParityAutomaton {
    let base = random_nfa(rng, states, alphabet, density);
    let prio = (0..states).map(|_| *priorities.choose(rng).expect("priorities")).collect();
    ParityAutomaton::new(base, prio).expect("one priority per state")
}
