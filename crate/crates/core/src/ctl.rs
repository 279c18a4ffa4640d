//! CTL on non-blocking Kripke structures, transitions read without actions.

use num_bigint::BigUint;
use thiserror::Error;

use crate::dag::{FormulaDag, FormulaId};
use crate::engine::Logic;
use crate::kripke::{KripkeStructure, NonBlockingKripke, StateSet};
use crate::ml::is_identifier;
use crate::signature::{op, LogicSignature, Notation, TypeId, TypeSet};

const KEYWORDS: [&str; 8] = ["EX", "AX", "EF", "AF", "EG", "AG", "E", "A"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtlError {
    #[error("proposition list is empty")]
    EmptyAlphabet,
    #[error("`{0}` is not a usable proposition name")]
    InvalidName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOp {
    Next,
    Finally,
    Globally,
    Until,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CtlOp {
    Prop(String),
    Not,
    And,
    Or,
    /// `true` for the existential quantifier.
    Quantified(bool, PathOp),
}

#[derive(Debug, Clone)]
pub struct CtlLogic {
    signature: LogicSignature,
}

pub fn ctl_signature<S: AsRef<str>>(props: &[S]) -> Result<CtlLogic, CtlError> {
    if props.is_empty() {
        return Err(CtlError::EmptyAlphabet);
    }
    let t = TypeId(0);
    let s = TypeSet::single(t);
    let mut ops = Vec::new();
    for p in props {
        let p = p.as_ref();
        if !is_identifier(p) || KEYWORDS.contains(&p) {
            return Err(CtlError::InvalidName(p.to_string()));
        }
        ops.push(op(p, Notation::Atom(p.into()), t, &[]));
    }
    ops.push(op("!", Notation::Prefix("!".into()), t, &[s]));
    for u in ["EX", "AX", "EF", "AF", "EG", "AG"] {
        ops.push(op(u, Notation::Prefix(u.into()), t, &[s]));
    }
    ops.push(op("&", Notation::Infix("&".into()), t, &[s, s]));
    ops.push(op("|", Notation::Infix("|".into()), t, &[s, s]));
    ops.push(op("EU", Notation::QuantifiedUntil("E".into()), t, &[s, s]));
    ops.push(op("AU", Notation::QuantifiedUntil("A".into()), t, &[s, s]));
    let signature = LogicSignature::new(vec!["tau".into()], &[t], ops)
        .map_err(|e| CtlError::InvalidName(e.to_string()))?;
    Ok(CtlLogic { signature })
}

pub(crate) fn decode_ctl_name(name: &str) -> CtlOp {
    use PathOp::*;
    match name {
        "!" => CtlOp::Not,
        "&" => CtlOp::And,
        "|" => CtlOp::Or,
        "EX" => CtlOp::Quantified(true, Next),
        "AX" => CtlOp::Quantified(false, Next),
        "EF" => CtlOp::Quantified(true, Finally),
        "AF" => CtlOp::Quantified(false, Finally),
        "EG" => CtlOp::Quantified(true, Globally),
        "AG" => CtlOp::Quantified(false, Globally),
        "EU" => CtlOp::Quantified(true, Until),
        "AU" => CtlOp::Quantified(false, Until),
        p => CtlOp::Prop(p.to_string()),
    }
}

/// `{q : δ(q) ∩ s ≠ ∅}`.
pub fn pre_exists(k: &KripkeStructure, s: &StateSet) -> StateSet {
    let mut out = k.empty_set();
    for q in 0..k.state_count() {
        if k.post(q).iter().any(|r| s.contains(*r)) {
            out.insert(q);
        }
    }
    out
}

/// `{q : δ(q) ⊆ s}`.
pub fn pre_forall(k: &KripkeStructure, s: &StateSet) -> StateSet {
    let mut out = k.empty_set();
    for q in 0..k.state_count() {
        if k.post(q).iter().all(|r| s.contains(*r)) {
            out.insert(q);
        }
    }
    out
}

/// Greatest `Z ⊆ s` with `Z ⊆ pre(Z)`.
pub(crate) fn greatest(k: &KripkeStructure, s: &StateSet, exists: bool) -> StateSet {
    let mut z = s.clone();
    loop {
        let pre = if exists { pre_exists(k, &z) } else { pre_forall(k, &z) };
        let next = s & &pre;
        if next == z {
            return z;
        }
        z = next;
    }
}

/// Least `Z ⊇ goal` with `hold ∩ pre(Z) ⊆ Z`.
pub(crate) fn least(k: &KripkeStructure, hold: &StateSet, goal: &StateSet, exists: bool) -> StateSet {
    let mut z = goal.clone();
    loop {
        let pre = if exists { pre_exists(k, &z) } else { pre_forall(k, &z) };
        let mut next = hold & &pre;
        next.union_with(goal);
        if next == z {
            return z;
        }
        z = next;
    }
}

pub fn ctl_apply(k: &NonBlockingKripke, op: &CtlOp, args: &[&StateSet]) -> StateSet {
    use PathOp::*;
    match op {
        CtlOp::Prop(p) => k.states_with(p),
        CtlOp::Not => {
            let mut s = args[0].clone();
            s.toggle_range(..);
            s
        }
        CtlOp::And => args[0] & args[1],
        CtlOp::Or => args[0] | args[1],
        CtlOp::Quantified(e, Next) => {
            if *e {
                pre_exists(k, args[0])
            } else {
                pre_forall(k, args[0])
            }
        }
        CtlOp::Quantified(e, Globally) => greatest(k, args[0], *e),
        CtlOp::Quantified(e, Finally) => least(k, &k.full_set(), args[0], *e),
        CtlOp::Quantified(e, Until) => least(k, args[0], args[1], *e),
    }
}

pub fn ctl_sat(k: &NonBlockingKripke, s: &StateSet) -> bool {
    k.initial().iter().all(|q| s.contains(*q))
}

/// Per-state path-quantifier checks by graph search.
pub(crate) fn search_quantified(k: &KripkeStructure, e: bool, p: PathOp, args: &[&StateSet]) -> StateSet {
    let n = k.state_count();
    let mut out = k.empty_set();
    let full = k.full_set();
    for q in 0..n {
        let v = match (e, p) {
            (true, PathOp::Next) => k.post(q).iter().any(|r| args[0].contains(*r)),
            (false, PathOp::Next) => k.post(q).iter().all(|r| args[0].contains(*r)),
            (true, PathOp::Finally) => k.reach_within(q, &full).intersection(args[0]).next().is_some(),
            (false, PathOp::Globally) => k.reach_within(q, &full).ones().all(|r| args[0].contains(r)),
            (true, PathOp::Globally) => k.has_infinite_path_within(q, args[0]),
            (false, PathOp::Finally) => {
                let mut avoid = args[0].clone();
                avoid.toggle_range(..);
                !k.has_infinite_path_within(q, &avoid)
            }
            (true, PathOp::Until) => {
                args[1].contains(q)
                    || (args[0].contains(q)
                        && k.reach_within(q, args[0]).intersection(args[1]).next().is_some())
            }
            (false, PathOp::Until) => {
                let (s1, s2) = (args[0], args[1]);
                if s2.contains(q) {
                    true
                } else if !s1.contains(q) {
                    false
                } else {
                    let mut waiting = s1.clone();
                    waiting.difference_with(s2);
                    let escapes = k
                        .reach_within(q, &waiting)
                        .ones()
                        .any(|r| !s1.contains(r) && !s2.contains(r));
                    !escapes && !k.has_infinite_path_within(q, &waiting)
                }
            }
        };
        out.set(q, v);
    }
    out
}

/// Values of every subformula computed by graph search, root last.
pub fn ctl_reference_value(k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> StateSet {
    let mut vals = std::collections::HashMap::new();
    for sub in dag.sub_formulas(id).expect("valid id") {
        let args: Vec<&StateSet> = dag.children(sub).iter().map(|c| &vals[c]).collect();
        let v = match decode_ctl_name(dag.op_name(sub)) {
            CtlOp::Prop(p) => {
                let mut s = k.empty_set();
                for q in 0..k.state_count() {
                    s.set(q, k.has_label(q, &p));
                }
                s
            }
            CtlOp::Not => {
                let mut s = k.empty_set();
                for q in 0..k.state_count() {
                    s.set(q, !args[0].contains(q));
                }
                s
            }
            CtlOp::And => {
                let mut s = k.empty_set();
                for q in 0..k.state_count() {
                    s.set(q, args[0].contains(q) && args[1].contains(q));
                }
                s
            }
            CtlOp::Or => {
                let mut s = k.empty_set();
                for q in 0..k.state_count() {
                    s.set(q, args[0].contains(q) || args[1].contains(q));
                }
                s
            }
            CtlOp::Quantified(e, p) => search_quantified(k, e, p, &args),
        };
        vals.insert(sub, v);
    }
    vals.remove(&id).expect("root evaluated")
}

impl Logic for CtlLogic {
    type Model = NonBlockingKripke;
    type Value = StateSet;
    type Op = CtlOp;

    fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    fn decode(&self, name: &str) -> Option<CtlOp> {
        self.signature.op_by_name(name).map(|_| decode_ctl_name(name))
    }

    fn atom(&self, k: &NonBlockingKripke, op: &CtlOp) -> StateSet {
        ctl_apply(k, op, &[])
    }

    fn apply(&self, k: &NonBlockingKripke, op: &CtlOp, args: &[&StateSet]) -> StateSet {
        ctl_apply(k, op, args)
    }

    fn sat(&self, k: &NonBlockingKripke, value: &StateSet) -> bool {
        ctl_sat(k, value)
    }

    fn value_space_size(&self, k: &NonBlockingKripke, _ty: TypeId) -> BigUint {
        BigUint::from(1u8) << k.state_count()
    }

    fn reference_value(&self, k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> StateSet {
        ctl_reference_value(k, dag, id)
    }

    fn model_check(&self, k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> bool {
        let v = ctl_reference_value(k, dag, id);
        k.initial().iter().all(|q| v.contains(*q))
    }
}
