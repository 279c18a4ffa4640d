//! Semantic closure, separability check and witness reconstruction.
//!
//! A [`Logic`] supplies per-model semantic values for nullary operators and a
//! way to combine values for the others. The engine saturates the set of value
//! tuples (one value per sample model) reachable from the nullary seeds, then
//! looks for a tuple of final type accepted by every positive model and
//! rejected by every negative one.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::dag::{DagError, FormulaDag, FormulaId};
use crate::signature::{LogicSignature, OpId, TypeId};

/// Default ceiling on the number of table entries.
pub const DEFAULT_BUDGET: usize = 1 << 24;

/// A logic together with its semantic value spaces.
pub trait Logic {
    type Model;
    type Value: Clone + Eq + Hash + Debug;
    type Op: Clone + Debug;

    /// The full signature; fragments are restrictions of it.
    fn signature(&self) -> &LogicSignature;

    /// Resolves an operator name of the signature.
    fn decode(&self, name: &str) -> Option<Self::Op>;

    fn atom(&self, model: &Self::Model, op: &Self::Op) -> Self::Value;

    fn apply(&self, model: &Self::Model, op: &Self::Op, args: &[&Self::Value]) -> Self::Value;

    fn sat(&self, model: &Self::Model, value: &Self::Value) -> bool;

    /// `|SEM_M(ty)|`.
    fn value_space_size(&self, model: &Self::Model, ty: TypeId) -> BigUint;

    /// Operators of `fragment` worth applying for these models, in declaration order.
    fn relevant_operators(&self, fragment: &LogicSignature, _models: &[&Self::Model]) -> Vec<OpId> {
        fragment.op_ids().collect()
    }

    /// Value of a formula computed directly from the semantics, without `apply`.
    fn reference_value(&self, model: &Self::Model, dag: &FormulaDag, id: FormulaId) -> Self::Value;

    /// Satisfaction computed directly from the semantics.
    fn model_check(&self, model: &Self::Model, dag: &FormulaDag, id: FormulaId) -> bool;
}

/// Positive and negative models; positives come first in every tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<M> {
    pub positives: Vec<M>,
    pub negatives: Vec<M>,
}

impl<M> Sample<M> {
    pub fn new(positives: Vec<M>, negatives: Vec<M>) -> Self {
        Sample {
            positives,
            negatives,
        }
    }

    pub fn models(&self) -> Vec<&M> {
        self.positives.iter().chain(self.negatives.iter()).collect()
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_positive(&self, index: usize) -> bool {
        index < self.positives.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Atom(OpId),
    Unary(OpId, usize),
    Binary(OpId, usize, usize),
}

/// One value per sample model, tagged with its type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemanticTuple<V> {
    pub ty: TypeId,
    pub values: Vec<V>,
}

/// Insertion-ordered table of tuples with their first producer.
#[derive(Debug, Clone)]
pub struct SemanticTable<V> {
    entries: IndexMap<SemanticTuple<V>, Provenance>,
    round_count: usize,
    complete: bool,
}

impl<V: Clone + Eq + Hash> SemanticTable<V> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn round_count(&self) -> usize {
        self.round_count
    }

    /// False when the closure stopped at its budget.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn tuple(&self, index: usize) -> &SemanticTuple<V> {
        self.entries.get_index(index).expect("entry index").0
    }

    pub fn provenance(&self, index: usize) -> Provenance {
        *self.entries.get_index(index).expect("entry index").1
    }

    pub fn index_of(&self, tuple: &SemanticTuple<V>) -> Option<usize> {
        self.entries.get_index_of(tuple)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SemanticTuple<V>, Provenance)> {
        self.entries.iter().map(|(t, p)| (t, *p))
    }
}

#[derive(Debug, Error)]
pub enum EngineError<V: Debug> {
    #[error("closure exceeded its budget of {budget} entries")]
    BudgetExceeded {
        budget: usize,
        partial: Box<SemanticTable<V>>,
    },
    #[error("table is partial and holds no separating tuple")]
    PartialTableInconclusive,
    #[error("tuple is not in the table")]
    TupleNotInTable,
    #[error("operator `{0}` has no semantics in this logic")]
    UnknownOperator(String),
    #[error("fragment is not a restriction of the logic's signature")]
    ForeignFragment,
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error("witness `{0}` failed independent verification")]
    WitnessRejected(String),
}

/// `Σ_τ Π_M |SEM_M(τ)|`.
pub fn size_bound<L: Logic>(logic: &L, sample: &Sample<L::Model>) -> BigUint {
    let models = sample.models();
    logic
        .signature()
        .types()
        .map(|ty| {
            models
                .iter()
                .fold(BigUint::one(), |acc, m| acc * logic.value_space_size(m, ty))
        })
        .fold(BigUint::zero(), |a, b| a + b)
}

/// Default budget: the bound itself when it is at most 2^24, else 2^24.
pub fn default_budget(bound: &BigUint) -> usize {
    bound
        .to_usize()
        .map(|b| b.min(DEFAULT_BUDGET))
        .unwrap_or(DEFAULT_BUDGET)
}

fn decode_ops<L: Logic>(
    logic: &L,
    fragment: &LogicSignature,
) -> Result<Vec<L::Op>, EngineError<L::Value>> {
    if !fragment.is_fragment_of(logic.signature()) {
        return Err(EngineError::ForeignFragment);
    }
    fragment
        .operators()
        .iter()
        .map(|d| logic.decode(&d.name).ok_or_else(|| EngineError::UnknownOperator(d.name.clone())))
        .collect()
}

/// Saturates the tuple set reachable from the nullary seeds of `fragment`.
///
/// Each round applies unary operators to the entries added by the previous
/// round and binary operators to every index pair touching such an entry;
/// operators go in declaration order and pairs in lexicographic order.
pub fn closure<L: Logic>(
    logic: &L,
    fragment: &LogicSignature,
    sample: &Sample<L::Model>,
    budget: Option<usize>,
) -> Result<SemanticTable<L::Value>, EngineError<L::Value>> {
    let decoded = decode_ops(logic, fragment)?;
    let models = sample.models();
    let budget = budget.unwrap_or_else(|| default_budget(&size_bound(logic, sample)));
    let mut relevant = logic.relevant_operators(fragment, &models);
    relevant.sort();
    relevant.dedup();
    let by_arity = |k: usize| -> Vec<OpId> {
        relevant
            .iter()
            .copied()
            .filter(|o| fragment.op(*o).arity() == k)
            .collect()
    };
    let (nullary, unary, binary) = (by_arity(0), by_arity(1), by_arity(2));

    let mut table = SemanticTable {
        entries: IndexMap::new(),
        round_count: 0,
        complete: false,
    };

    fn push<V: Clone + Eq + Hash + Debug>(
        table: &mut SemanticTable<V>,
        tuple: SemanticTuple<V>,
        origin: Provenance,
        budget: usize,
    ) -> Result<(), EngineError<V>> {
        if table.entries.contains_key(&tuple) {
            return Ok(());
        }
        if table.entries.len() >= budget {
            let partial = std::mem::replace(
                table,
                SemanticTable {
                    entries: IndexMap::new(),
                    round_count: 0,
                    complete: false,
                },
            );
            return Err(EngineError::BudgetExceeded {
                budget,
                partial: Box::new(partial),
            });
        }
        table.entries.insert(tuple, origin);
        Ok(())
    }

    for &op in &nullary {
        let sem = &decoded[op.index()];
        let values = models.iter().map(|m| logic.atom(m, sem)).collect();
        let tuple = SemanticTuple {
            ty: fragment.op(op).result_type,
            values,
        };
        push(&mut table, tuple, Provenance::Atom(op), budget)?;
    }
    if table.entries.is_empty() {
        table.complete = true;
        return Ok(table);
    }

    let mut fresh_from = 0;
    loop {
        table.round_count += 1;
        let old_len = table.entries.len();
        for &op in &unary {
            let decl = fragment.op(op);
            let sem = &decoded[op.index()];
            for i in fresh_from..old_len {
                let arg = table.tuple(i);
                if !decl.arg_types[0].contains(arg.ty) {
                    continue;
                }
                let values = models
                    .iter()
                    .zip(&arg.values)
                    .map(|(m, v)| logic.apply(m, sem, &[v]))
                    .collect();
                let tuple = SemanticTuple {
                    ty: decl.result_type,
                    values,
                };
                push(&mut table, tuple, Provenance::Unary(op, i), budget)?;
            }
        }
        for &op in &binary {
            let decl = fragment.op(op);
            let sem = &decoded[op.index()];
            for i in 0..old_len {
                if !decl.arg_types[0].contains(table.tuple(i).ty) {
                    continue;
                }
                let j_start = if i >= fresh_from { 0 } else { fresh_from };
                for j in j_start..old_len {
                    let (a, b) = (table.tuple(i), table.tuple(j));
                    if !decl.arg_types[1].contains(b.ty) {
                        continue;
                    }
                    let values = models
                        .iter()
                        .zip(a.values.iter().zip(&b.values))
                        .map(|(m, (x, y))| logic.apply(m, sem, &[x, y]))
                        .collect();
                    let tuple = SemanticTuple {
                        ty: decl.result_type,
                        values,
                    };
                    push(&mut table, tuple, Provenance::Binary(op, i, j), budget)?;
                }
            }
        }
        if table.entries.len() == old_len {
            break;
        }
        fresh_from = old_len;
    }
    table.complete = true;
    Ok(table)
}

/// Index of the first final-type entry accepted by all positives and rejected by all negatives.
pub fn check_separable<L: Logic>(
    logic: &L,
    fragment: &LogicSignature,
    sample: &Sample<L::Model>,
    table: &SemanticTable<L::Value>,
) -> Result<Option<usize>, EngineError<L::Value>> {
    let models = sample.models();
    let found = table.entries.keys().position(|t| {
        fragment.is_final(t.ty)
            && models
                .iter()
                .zip(&t.values)
                .enumerate()
                .all(|(k, (m, v))| logic.sat(m, v) == sample.is_positive(k))
    });
    match found {
        None if !table.complete => Err(EngineError::PartialTableInconclusive),
        r => Ok(r),
    }
}

/// Rebuilds a formula for entry `index` by following first producers.
pub fn witness<V: Clone + Eq + Hash>(
    table: &SemanticTable<V>,
    index: usize,
    dag: &mut FormulaDag,
) -> Result<FormulaId, DagError> {
    let mut built: HashMap<usize, FormulaId> = HashMap::new();
    let mut stack = vec![index];
    while let Some(&i) = stack.last() {
        if built.contains_key(&i) {
            stack.pop();
            continue;
        }
        let (op, args): (OpId, Vec<usize>) = match table.provenance(i) {
            Provenance::Atom(o) => (o, vec![]),
            Provenance::Unary(o, a) => (o, vec![a]),
            Provenance::Binary(o, a, b) => (o, vec![a, b]),
        };
        let missing: Vec<usize> = args.iter().copied().filter(|a| !built.contains_key(a)).collect();
        if !missing.is_empty() {
            stack.extend(missing);
            continue;
        }
        let children: Vec<FormulaId> = args.iter().map(|a| built[a]).collect();
        let id = dag.intern_op(op, &children)?;
        built.insert(i, id);
        stack.pop();
    }
    Ok(built[&index])
}

/// Witness for a tuple given by value.
pub fn witness_of<V: Clone + Eq + Hash + Debug>(
    table: &SemanticTable<V>,
    tuple: &SemanticTuple<V>,
    dag: &mut FormulaDag,
) -> Result<FormulaId, EngineError<V>> {
    let i = table.index_of(tuple).ok_or(EngineError::TupleNotInTable)?;
    Ok(witness(table, i, dag)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Separable {
        formula: FormulaId,
        dag_size: usize,
        tree_size: u64,
    },
    NotSeparable,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct LearnReport {
    pub outcome: Outcome,
    /// Holds the witness when separable; built over the fragment.
    pub dag: FormulaDag,
    pub bound: BigUint,
    pub entries: usize,
    pub rounds: usize,
    pub elapsed: Duration,
}

impl LearnReport {
    pub fn formula(&self) -> Option<FormulaId> {
        match self.outcome {
            Outcome::Separable { formula, .. } => Some(formula),
            _ => None,
        }
    }
}

/// Decides separability and, when possible, returns a verified witness.
///
/// Panics if the entry count or the witness size ever exceeds the size bound.
pub fn learn<L: Logic>(
    logic: &L,
    fragment: &LogicSignature,
    sample: &Sample<L::Model>,
    budget: Option<usize>,
) -> Result<LearnReport, EngineError<L::Value>> {
    let start = Instant::now();
    let bound = size_bound(logic, sample);
    let mut dag = FormulaDag::new(fragment.clone());
    let table = match closure(logic, fragment, sample, budget) {
        Ok(t) => t,
        Err(EngineError::BudgetExceeded { partial, .. }) => {
            assert!(BigUint::from(partial.len()) <= bound, "entry count exceeds size bound");
            return Ok(LearnReport {
                outcome: Outcome::Inconclusive,
                dag,
                bound,
                entries: partial.len(),
                rounds: partial.round_count(),
                elapsed: start.elapsed(),
            });
        }
        Err(e) => return Err(e),
    };
    assert!(BigUint::from(table.len()) <= bound, "entry count exceeds size bound");
    let outcome = match check_separable(logic, fragment, sample, &table)? {
        None => Outcome::NotSeparable,
        Some(i) => {
            let f = witness(&table, i, &mut dag)?;
            let dag_size = dag.dag_size(f)?;
            assert!(BigUint::from(dag_size) <= bound, "witness exceeds size bound");
            let models = sample.models();
            for (k, m) in models.iter().enumerate() {
                if logic.model_check(m, &dag, f) != sample.is_positive(k) {
                    return Err(EngineError::WitnessRejected(crate::syntax::render(&dag, f)));
                }
            }
            Outcome::Separable {
                formula: f,
                dag_size,
                tree_size: dag.tree_size(f)?,
            }
        }
    };
    Ok(LearnReport {
        outcome,
        dag,
        bound,
        entries: table.len(),
        rounds: table.round_count(),
        elapsed: start.elapsed(),
    })
}
