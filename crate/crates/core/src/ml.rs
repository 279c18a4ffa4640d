//! Modal logic with graded diamonds over action-labelled Kripke structures.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::dag::{FormulaDag, FormulaId};
use crate::engine::Logic;
use crate::kripke::{KripkeStructure, StateSet};
use crate::signature::{op, LogicSignature, Notation, OpId, TypeId, TypeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MlError {
    #[error("propositions and actions must be nonempty")]
    EmptyAlphabet,
    #[error("diamond thresholds start at 1")]
    InvalidK,
    #[error("`{0}` is not a usable name")]
    InvalidName(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MlOp {
    Prop(String),
    Not,
    And,
    Or,
    Box(String),
    Diamond(String, usize),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Modal logic over fixed propositions and actions, diamonds up to `max_k`.
#[derive(Debug, Clone)]
pub struct ModalLogic {
    signature: LogicSignature,
}

pub fn ml_signature<P: AsRef<str>, A: AsRef<str>>(
    props: &[P],
    actions: &[A],
    max_k: usize,
) -> Result<ModalLogic, MlError> {
    if props.is_empty() || actions.is_empty() {
        return Err(MlError::EmptyAlphabet);
    }
    if max_k == 0 {
        return Err(MlError::InvalidK);
    }
    let t = TypeId(0);
    let s = TypeSet::single(t);
    let mut ops = Vec::new();
    for p in props {
        let p = p.as_ref();
        if !is_identifier(p) {
            return Err(MlError::InvalidName(p.to_string()));
        }
        ops.push(op(p, Notation::Atom(p.into()), t, &[]));
    }
    ops.push(op("!", Notation::Prefix("!".into()), t, &[s]));
    for a in actions {
        let a = a.as_ref();
        if !is_identifier(a) {
            return Err(MlError::InvalidName(a.to_string()));
        }
        let name = format!("[{}]", a);
        ops.push(op(&name, Notation::Prefix(name.clone()), t, &[s]));
    }
    for a in actions {
        for k in 1..=max_k {
            let name = format!("<{}>>={}", a.as_ref(), k);
            ops.push(op(&name, Notation::Prefix(name.clone()), t, &[s]));
        }
    }
    ops.push(op("&", Notation::Infix("&".into()), t, &[s, s]));
    ops.push(op("|", Notation::Infix("|".into()), t, &[s, s]));
    let signature = LogicSignature::new(vec!["tau".into()], &[t], ops)
        .map_err(|e| MlError::InvalidName(e.to_string()))?;
    Ok(ModalLogic { signature })
}

pub(crate) fn decode_ml_name(name: &str) -> MlOp {
    match name {
        "!" => MlOp::Not,
        "&" => MlOp::And,
        "|" => MlOp::Or,
        _ => {
            if let Some(a) = name.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                return MlOp::Box(a.to_string());
            }
            if let Some(rest) = name.strip_prefix('<') {
                if let Some((a, k)) = rest.split_once(">>=") {
                    if let Ok(k) = k.parse() {
                        return MlOp::Diamond(a.to_string(), k);
                    }
                }
            }
            MlOp::Prop(name.to_string())
        }
    }
}

pub fn ml_sem_atom(k: &KripkeStructure, p: &str) -> StateSet {
    k.states_with(p)
}

pub fn ml_apply(k: &KripkeStructure, op: &MlOp, args: &[&StateSet]) -> StateSet {
    let n = k.state_count();
    match op {
        MlOp::Prop(p) => ml_sem_atom(k, p),
        MlOp::Not => {
            let mut s = args[0].clone();
            s.toggle_range(..);
            s
        }
        MlOp::And => args[0] & args[1],
        MlOp::Or => args[0] | args[1],
        MlOp::Box(a) => {
            let mut out = k.empty_set();
            for q in 0..n {
                if k.successors(q, a).iter().all(|r| args[0].contains(*r)) {
                    out.insert(q);
                }
            }
            out
        }
        MlOp::Diamond(a, min) => {
            let mut out = k.empty_set();
            for q in 0..n {
                let c = k.successors(q, a).iter().filter(|r| args[0].contains(**r)).count();
                if c >= *min {
                    out.insert(q);
                }
            }
            out
        }
    }
}

pub fn ml_sat(k: &KripkeStructure, s: &StateSet) -> bool {
    k.initial().iter().all(|q| s.contains(*q))
}

/// Direct satisfaction `q ⊨ φ`, memoised per (subformula, state).
fn holds(
    k: &KripkeStructure,
    dag: &FormulaDag,
    id: FormulaId,
    q: usize,
    memo: &mut HashMap<(FormulaId, usize), bool>,
) -> bool {
    if let Some(v) = memo.get(&(id, q)) {
        return *v;
    }
    let ch = dag.children(id);
    let v = match decode_ml_name(dag.op_name(id)) {
        MlOp::Prop(p) => k.has_label(q, &p),
        MlOp::Not => !holds(k, dag, ch[0], q, memo),
        MlOp::And => holds(k, dag, ch[0], q, memo) && holds(k, dag, ch[1], q, memo),
        MlOp::Or => holds(k, dag, ch[0], q, memo) || holds(k, dag, ch[1], q, memo),
        MlOp::Box(a) => k
            .successors(q, &a)
            .to_vec()
            .into_iter()
            .all(|r| holds(k, dag, ch[0], r, memo)),
        MlOp::Diamond(a, min) => {
            let mut count = 0;
            for r in k.successors(q, &a).to_vec() {
                if holds(k, dag, ch[0], r, memo) {
                    count += 1;
                }
            }
            count >= min
        }
    };
    memo.insert((id, q), v);
    v
}

pub fn ml_modelcheck(k: &KripkeStructure, dag: &FormulaDag, id: FormulaId) -> bool {
    let mut memo = HashMap::new();
    k.initial().iter().all(|q| holds(k, dag, id, *q, &mut memo))
}

/// Operators of `fragment` that matter for a sample whose largest structure has `max_states` states.
///
/// Diamonds with a threshold above `max_states` all denote the empty set, so
/// only the smallest such threshold per action is kept.
pub fn ml_relevant_operators(fragment: &LogicSignature, max_states: usize) -> Vec<OpId> {
    let mut above: HashMap<String, usize> = HashMap::new();
    for o in fragment.operators() {
        if let MlOp::Diamond(a, k) = decode_ml_name(&o.name) {
            if k > max_states {
                let e = above.entry(a).or_insert(k);
                *e = (*e).min(k);
            }
        }
    }
    fragment
        .op_ids()
        .filter(|id| match decode_ml_name(&fragment.op(*id).name) {
            MlOp::Diamond(a, k) => k <= max_states || above.get(&a) == Some(&k),
            _ => true,
        })
        .collect()
}

impl ModalLogic {
    /// Signature over the propositions and actions of `models`, `max_k` defaulting to the largest state count.
    pub fn for_models(models: &[&KripkeStructure], max_k: Option<usize>) -> Result<Self, MlError> {
        let mut props: Vec<String> = models.iter().flat_map(|m| m.props().to_vec()).collect();
        let mut actions: Vec<String> = models.iter().flat_map(|m| m.actions().to_vec()).collect();
        props.sort();
        props.dedup();
        actions.sort();
        actions.dedup();
        let max_k = max_k.unwrap_or_else(|| models.iter().map(|m| m.state_count()).max().unwrap_or(1));
        ml_signature(&props, &actions, max_k)
    }
}

impl Logic for ModalLogic {
    type Model = KripkeStructure;
    type Value = StateSet;
    type Op = MlOp;

    fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    fn decode(&self, name: &str) -> Option<MlOp> {
        self.signature.op_by_name(name).map(|_| decode_ml_name(name))
    }

    fn atom(&self, model: &KripkeStructure, op: &MlOp) -> StateSet {
        ml_apply(model, op, &[])
    }

    fn apply(&self, model: &KripkeStructure, op: &MlOp, args: &[&StateSet]) -> StateSet {
        ml_apply(model, op, args)
    }

    fn sat(&self, model: &KripkeStructure, value: &StateSet) -> bool {
        ml_sat(model, value)
    }

    fn value_space_size(&self, model: &KripkeStructure, _ty: TypeId) -> BigUint {
        BigUint::from(1u8) << model.state_count()
    }

    fn relevant_operators(&self, fragment: &LogicSignature, models: &[&KripkeStructure]) -> Vec<OpId> {
        let max_states = models.iter().map(|m| m.state_count()).max().unwrap_or(0);
        ml_relevant_operators(fragment, max_states)
    }

    fn reference_value(&self, model: &KripkeStructure, dag: &FormulaDag, id: FormulaId) -> StateSet {
        let mut memo = HashMap::new();
        let mut s = model.empty_set();
        for q in 0..model.state_count() {
            if holds(model, dag, id, q, &mut memo) {
                s.insert(q);
            }
        }
        s
    }

    fn model_check(&self, model: &KripkeStructure, dag: &FormulaDag, id: FormulaId) -> bool {
        ml_modelcheck(model, dag, id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{check_separable, closure, learn, witness, Outcome, Sample};
    use crate::syntax::{parse, render};

    fn two_state() -> KripkeStructure {
        KripkeStructure::builder(2)
            .initial(&[0])
            .label(1, &["p"])
            .edge(0, "a", 1)
            .edge(1, "a", 1)
            .build()
            .unwrap()
    }

    fn set(k: &KripkeStructure, qs: &[usize]) -> StateSet {
        let mut s = k.empty_set();
        qs.iter().for_each(|q| s.insert(*q));
        s
    }

    #[test]
    fn signature_shape() {
        let l = ml_signature(&["p"], &["a"], 1).unwrap();
        assert_eq!(l.signature().operators().len(), 6);
        let l2 = ml_signature(&["p"], &["a"], 2).unwrap();
        assert!(l2.signature().op_by_name("<a>>=2").is_some());
        assert_eq!(ml_signature(&["p"], &["a"], 0).unwrap_err(), MlError::InvalidK);
        let none: [&str; 0] = [];
        assert_eq!(ml_signature(&none, &["a"], 1).unwrap_err(), MlError::EmptyAlphabet);
    }

    #[test]
    fn apply_cases() {
        let k = KripkeStructure::builder(3)
            .initial(&[0])
            .edge(0, "a", 1)
            .edge(1, "a", 2)
            .edge(1, "a", 0)
            .build()
            .unwrap();
        let empty = k.empty_set();
        assert_eq!(ml_apply(&k, &MlOp::Not, &[&empty]), k.full_set());
        // state 2 has no a-successor: [a] holds there for any argument
        assert!(ml_apply(&k, &MlOp::Box("a".into()), &[&empty]).contains(2));
        let d2 = ml_apply(&k, &MlOp::Diamond("a".into(), 2), &[&k.full_set()]);
        assert_eq!(d2, set(&k, &[1]));
        assert!(ml_sem_atom(&k, "p").is_clear());
        // unknown action behaves as an empty transition relation
        assert_eq!(ml_apply(&k, &MlOp::Box("b".into()), &[&empty]), k.full_set());
    }

    #[test]
    fn sat_is_inclusion() {
        let k = two_state();
        assert!(ml_sat(&k, &k.full_set()));
        assert!(!ml_sat(&k, &k.empty_set()));
        assert!(ml_sat(&k, &set(&k, &[0, 1])));
    }

    #[test]
    fn closure_single_state() {
        let k = KripkeStructure::builder(1).initial(&[0]).label(0, &["p"]).build().unwrap();
        let l = ml_signature(&["p"], &["a"], 1).unwrap();
        let frag = l.signature().restrict_fragment(&["p", "!"]).unwrap();
        let t = closure(&l, &frag, &Sample::new(vec![k.clone()], vec![]), None).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.tuple(0).values[0], set(&k, &[0]));
        assert_eq!(t.tuple(1).values[0], k.empty_set());
    }

    #[test]
    fn closure_two_state_and_witness() {
        let k = two_state();
        let l = ml_signature(&["p"], &["a"], 1).unwrap();
        let frag = l.signature().restrict_fragment(&["p", "<a>>=1"]).unwrap();
        let sample = Sample::new(vec![k.clone()], vec![]);
        let t = closure(&l, &frag, &sample, None).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.tuple(0).values[0], set(&k, &[1]));
        assert_eq!(t.tuple(1).values[0], set(&k, &[0, 1]));
        assert!(t.round_count() <= t.len());
        let i = check_separable(&l, &frag, &sample, &t).unwrap().unwrap();
        assert_eq!(i, 1);
        let mut dag = FormulaDag::new(frag.clone());
        let f = witness(&t, i, &mut dag).unwrap();
        assert_eq!(render(&dag, f), "<a>>=1 p");
        assert_eq!(dag.dag_size(f).unwrap(), 2);
        let g = witness(&t, 0, &mut dag).unwrap();
        assert_eq!(render(&dag, g), "p");
    }

    #[test]
    fn separability_edge_cases() {
        let k = two_state();
        let l = ml_signature(&["p"], &["a"], 1).unwrap();
        let frag = l.signature().clone();
        let empty: Sample<KripkeStructure> = Sample::new(vec![], vec![]);
        let t = closure(&l, &frag, &empty, None).unwrap();
        assert_eq!(check_separable(&l, &frag, &empty, &t).unwrap(), Some(0));
        let both = Sample::new(vec![k.clone()], vec![k]);
        let r = learn(&l, &frag, &both, None).unwrap();
        assert_eq!(r.outcome, Outcome::NotSeparable);
    }

    #[test]
    fn modelcheck_examples() {
        let k = two_state();
        let l = ml_signature(&["p"], &["a"], 2).unwrap();
        let mut dag = FormulaDag::new(l.signature().clone());
        let f = parse(&mut dag, "<a>>=1 p").unwrap();
        assert!(ml_modelcheck(&k, &dag, f));
        let p = parse(&mut dag, "p").unwrap();
        assert!(!ml_modelcheck(&k, &dag, p));
    }

    #[test]
    fn relevance_keeps_one_empty_diamond() {
        let l = ml_signature(&["p"], &["a"], 10).unwrap();
        let sig = l.signature();
        let names: Vec<&str> = ml_relevant_operators(sig, 3)
            .into_iter()
            .map(|o| sig.op(o).name.as_str())
            .collect();
        assert_eq!(
            names,
            vec!["p", "!", "[a]", "<a>>=1", "<a>>=2", "<a>>=3", "<a>>=4", "&", "|"]
        );
        let one: Vec<&str> = ml_relevant_operators(sig, 1)
            .into_iter()
            .map(|o| sig.op(o).name.as_str())
            .collect();
        assert!(one.contains(&"<a>>=1") && one.contains(&"<a>>=2") && !one.contains(&"<a>>=3"));
    }

    #[test]
    fn dropping_large_diamonds_would_change_the_verdict() {
        // {p, <a>>=2}: only <a>>=2 p is false on a one-state p-model.
        let n = KripkeStructure::builder(1).initial(&[0]).label(0, &["p"]).edge(0, "a", 0).build().unwrap();
        let l = ml_signature(&["p"], &["a"], 2).unwrap();
        let frag = l.signature().restrict_fragment(&["p", "<a>>=2"]).unwrap();
        let r = learn(&l, &frag, &Sample::new(vec![], vec![n]), None).unwrap();
        assert!(matches!(r.outcome, Outcome::Separable { .. }));
    }
}
