//! LTL over finite and ultimately periodic words `u·v^ω`.
//!
//! Values are sets of canonical positions `0..|u|+|v|`; positions in the loop
//! stand for all their unrolled copies.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use thiserror::Error;

use crate::dag::{FormulaDag, FormulaId};
use crate::engine::Logic;
use crate::ml::is_identifier;
use crate::signature::{op, LogicSignature, Notation, TypeId, TypeSet};

pub type Letter = BTreeSet<String>;
pub type PositionSet = FixedBitSet;

const KEYWORDS: [&str; 4] = ["X", "F", "G", "U"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("proposition list is empty")]
    EmptyAlphabet,
    #[error("`{0}` is not a usable proposition name")]
    InvalidName(String),
    #[error("a lasso needs at least one letter")]
    EmptyWord,
}

/// `u·v^ω`, or the finite word `u` when `v` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    prefix: Vec<Letter>,
    period: Vec<Letter>,
}

pub fn letter(props: &[&str]) -> Letter {
    props.iter().map(|p| p.to_string()).collect()
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, period: Vec<Letter>) -> Result<Self, LtlError> {
        if prefix.is_empty() && period.is_empty() {
            return Err(LtlError::EmptyWord);
        }
        Ok(LassoWord { prefix, period })
    }

    /// Shorthand taking letters as proposition lists.
    pub fn from_props(prefix: &[&[&str]], period: &[&[&str]]) -> Result<Self, LtlError> {
        Self::new(
            prefix.iter().map(|l| letter(l)).collect(),
            period.iter().map(|l| letter(l)).collect(),
        )
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    /// `‖w‖ = |u| + |v|`.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn letter(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[i - self.prefix.len()]
        }
    }

    /// Letter at an arbitrary (unrolled) position; `None` past the end of a finite word.
    pub fn letter_at(&self, i: usize) -> Option<&Letter> {
        self.canonical(i).map(|c| self.letter(c))
    }

    /// Canonical position of an unrolled position.
    pub fn canonical(&self, i: usize) -> Option<usize> {
        let u = self.prefix.len();
        if i < self.len() {
            Some(i)
        } else if self.is_finite() {
            None
        } else {
            Some(u + (i - u) % self.period.len())
        }
    }

    /// `w[j:]`; `None` when `j` runs past a finite word.
    pub fn suffix(&self, j: usize) -> Option<LassoWord> {
        let u = self.prefix.len();
        if j < u {
            return Some(LassoWord {
                prefix: self.prefix[j..].to_vec(),
                period: self.period.clone(),
            });
        }
        if self.is_finite() {
            return None;
        }
        let off = (j - u) % self.period.len();
        let mut period = self.period[off..].to_vec();
        period.extend_from_slice(&self.period[..off]);
        Some(LassoWord {
            prefix: vec![],
            period,
        })
    }

    /// The same word written as `(u·v)·v^ω`.
    pub fn unroll(&self) -> LassoWord {
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.period);
        LassoWord {
            prefix,
            period: self.period.clone(),
        }
    }

    /// Swaps proposition names according to `map`; names not in `map` are kept.
    pub fn rename(&self, map: &HashMap<String, String>) -> LassoWord {
        let f = |l: &Letter| -> Letter {
            l.iter().map(|p| map.get(p).cloned().unwrap_or_else(|| p.clone())).collect()
        };
        LassoWord {
            prefix: self.prefix.iter().map(f).collect(),
            period: self.period.iter().map(f).collect(),
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        self.prefix.iter().chain(&self.period).flatten().cloned().collect()
    }

    pub fn succ(&self, i: usize) -> Option<usize> {
        if i + 1 < self.len() {
            Some(i + 1)
        } else if self.is_finite() {
            None
        } else {
            Some(self.prefix.len())
        }
    }

    pub fn after(&self, i: usize) -> Range<usize> {
        i.min(self.prefix.len())..self.len()
    }

    /// Positions strictly between `i` and `k ∈ after(i)` on the way from `i` to `k`.
    pub fn between(&self, i: usize, k: usize) -> Vec<usize> {
        if i <= k {
            (i..k).collect()
        } else {
            (i..self.len()).chain(self.prefix.len()..k).collect()
        }
    }

    pub fn empty_set(&self) -> PositionSet {
        FixedBitSet::with_capacity(self.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LtlOp {
    Prop(String),
    /// Holds where the proposition does not.
    Dual(String),
    Not,
    And,
    Or,
    Next,
    Finally,
    Globally,
    Until,
}

#[derive(Debug, Clone)]
pub struct LtlLogic {
    signature: LogicSignature,
    duals: HashMap<String, String>,
}

/// Name of the dual atom of `p`.
pub fn dual_name(p: &str) -> String {
    format!("{}_bar", p)
}

/// LTL over `props`; with `duals`, each `p` also gets an atom `p_bar`.
pub fn ltl_signature<S: AsRef<str>>(props: &[S], duals: bool) -> Result<LtlLogic, LtlError> {
    if props.is_empty() {
        return Err(LtlError::EmptyAlphabet);
    }
    let t = TypeId(0);
    let s = TypeSet::single(t);
    let mut ops = Vec::new();
    let mut dual_map = HashMap::new();
    for p in props {
        let p = p.as_ref();
        if !is_identifier(p) || KEYWORDS.contains(&p) {
            return Err(LtlError::InvalidName(p.to_string()));
        }
        ops.push(op(p, Notation::Atom(p.into()), t, &[]));
    }
    if duals {
        for p in props {
            let d = dual_name(p.as_ref());
            ops.push(op(&d, Notation::Atom(d.clone()), t, &[]));
            dual_map.insert(d, p.as_ref().to_string());
        }
    }
    ops.push(op("!", Notation::Prefix("!".into()), t, &[s]));
    ops.push(op("&", Notation::Infix("&".into()), t, &[s, s]));
    ops.push(op("|", Notation::Infix("|".into()), t, &[s, s]));
    for u in ["X", "F", "G"] {
        ops.push(op(u, Notation::Prefix(u.into()), t, &[s]));
    }
    ops.push(op("U", Notation::Infix("U".into()), t, &[s, s]));
    let signature = LogicSignature::new(vec!["tau".into()], &[t], ops)
        .map_err(|e| LtlError::InvalidName(e.to_string()))?;
    Ok(LtlLogic {
        signature,
        duals: dual_map,
    })
}

impl LtlLogic {
    pub fn decode_name(&self, name: &str) -> LtlOp {
        if let Some(p) = self.duals.get(name) {
            return LtlOp::Dual(p.clone());
        }
        match name {
            "!" => LtlOp::Not,
            "&" => LtlOp::And,
            "|" => LtlOp::Or,
            "X" => LtlOp::Next,
            "F" => LtlOp::Finally,
            "G" => LtlOp::Globally,
            "U" => LtlOp::Until,
            p => LtlOp::Prop(p.to_string()),
        }
    }
}

fn atom_set(w: &LassoWord, p: &str, dual: bool) -> PositionSet {
    let mut s = w.empty_set();
    for i in 0..w.len() {
        if w.letter(i).contains(p) != dual {
            s.insert(i);
        }
    }
    s
}

/// One operator application on position sets.
pub fn ltl_apply(w: &LassoWord, op: &LtlOp, args: &[&PositionSet]) -> PositionSet {
    let n = w.len();
    let u = w.prefix.len();
    let mut out = w.empty_set();
    match op {
        LtlOp::Prop(p) => return atom_set(w, p, false),
        LtlOp::Dual(p) => return atom_set(w, p, true),
        LtlOp::Not => {
            let mut s = args[0].clone();
            s.toggle_range(..);
            return s;
        }
        LtlOp::And => return args[0] & args[1],
        LtlOp::Or => return args[0] | args[1],
        LtlOp::Next => {
            for i in 0..n {
                if let Some(j) = w.succ(i) {
                    out.set(i, args[0].contains(j));
                }
            }
        }
        LtlOp::Finally | LtlOp::Globally => {
            let s = args[0];
            let eventually = matches!(op, LtlOp::Finally);
            let mut carry = !eventually;
            if !w.is_finite() {
                carry = if eventually {
                    (u..n).any(|i| s.contains(i))
                } else {
                    (u..n).all(|i| s.contains(i))
                };
                out.set_range(u..n, carry);
            }
            for i in (0..u).rev() {
                carry = if eventually {
                    s.contains(i) || carry
                } else {
                    s.contains(i) && carry
                };
                out.set(i, carry);
            }
        }
        LtlOp::Until => {
            let (s1, s2) = (args[0], args[1]);
            let mut carry = false;
            if !w.is_finite() {
                for _ in 0..2 {
                    for i in (u..n).rev() {
                        carry = s2.contains(i) || (s1.contains(i) && carry);
                        out.set(i, carry);
                    }
                }
                carry = out.contains(u);
            }
            for i in (0..u).rev() {
                carry = s2.contains(i) || (s1.contains(i) && carry);
                out.set(i, carry);
            }
        }
    }
    out
}

pub fn ltl_sat(_w: &LassoWord, s: &PositionSet) -> bool {
    s.contains(0)
}

struct Naive<'a> {
    logic: &'a LtlLogic,
    w: &'a LassoWord,
    dag: &'a FormulaDag,
    memo: HashMap<(FormulaId, usize), bool>,
}

impl Naive<'_> {
    fn at(&mut self, id: FormulaId, i: usize) -> bool {
        if let Some(v) = self.memo.get(&(id, i)) {
            return *v;
        }
        let w = self.w;
        let ch = self.dag.children(id).to_vec();
        let v = match self.logic.decode_name(self.dag.op_name(id)) {
            LtlOp::Prop(p) => w.letter(i).contains(&p),
            LtlOp::Dual(p) => !w.letter(i).contains(&p),
            LtlOp::Not => !self.at(ch[0], i),
            LtlOp::And => self.at(ch[0], i) && self.at(ch[1], i),
            LtlOp::Or => self.at(ch[0], i) || self.at(ch[1], i),
            LtlOp::Next => match w.succ(i) {
                Some(j) => self.at(ch[0], j),
                None => false,
            },
            LtlOp::Finally => w.after(i).any(|k| self.at(ch[0], k)),
            LtlOp::Globally => w.after(i).all(|k| self.at(ch[0], k)),
            LtlOp::Until => w
                .after(i)
                .any(|k| self.at(ch[1], k) && w.between(i, k).into_iter().all(|m| self.at(ch[0], m))),
        };
        self.memo.insert((id, i), v);
        v
    }
}

/// Positions satisfying `id`, evaluated straight from the position tables.
pub fn ltl_positions_naive(logic: &LtlLogic, w: &LassoWord, dag: &FormulaDag, id: FormulaId) -> PositionSet {
    let mut ev = Naive {
        logic,
        w,
        dag,
        memo: HashMap::new(),
    };
    let mut s = w.empty_set();
    for i in 0..w.len() {
        if ev.at(id, i) {
            s.insert(i);
        }
    }
    s
}

pub fn ltl_eval_naive(logic: &LtlLogic, w: &LassoWord, dag: &FormulaDag, id: FormulaId) -> bool {
    let mut ev = Naive {
        logic,
        w,
        dag,
        memo: HashMap::new(),
    };
    ev.at(id, 0)
}

/// Bottom-up composition of [`ltl_apply`] over the DAG.
pub fn ltl_positions(logic: &LtlLogic, w: &LassoWord, dag: &FormulaDag, id: FormulaId) -> PositionSet {
    let mut vals: HashMap<FormulaId, PositionSet> = HashMap::new();
    for sub in dag.sub_formulas(id).expect("valid id") {
        let op = logic.decode_name(dag.op_name(sub));
        let args: Vec<&PositionSet> = dag.children(sub).iter().map(|c| &vals[c]).collect();
        let v = ltl_apply(w, &op, &args);
        vals.insert(sub, v);
    }
    vals.remove(&id).expect("root evaluated")
}

impl Logic for LtlLogic {
    type Model = LassoWord;
    type Value = PositionSet;
    type Op = LtlOp;

    fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    fn decode(&self, name: &str) -> Option<LtlOp> {
        self.signature.op_by_name(name).map(|_| self.decode_name(name))
    }

    fn atom(&self, w: &LassoWord, op: &LtlOp) -> PositionSet {
        ltl_apply(w, op, &[])
    }

    fn apply(&self, w: &LassoWord, op: &LtlOp, args: &[&PositionSet]) -> PositionSet {
        ltl_apply(w, op, args)
    }

    fn sat(&self, w: &LassoWord, value: &PositionSet) -> bool {
        ltl_sat(w, value)
    }

    fn value_space_size(&self, w: &LassoWord, _ty: TypeId) -> BigUint {
        BigUint::from(1u8) << w.len()
    }

    fn reference_value(&self, w: &LassoWord, dag: &FormulaDag, id: FormulaId) -> PositionSet {
        ltl_positions_naive(self, w, dag, id)
    }

    fn model_check(&self, w: &LassoWord, dag: &FormulaDag, id: FormulaId) -> bool {
        ltl_eval_naive(self, w, dag, id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn yx() -> LassoWord {
        LassoWord::from_props(&[], &[&["y"], &["x"]]).unwrap()
    }

    fn logic() -> LtlLogic {
        ltl_signature(&["x", "y", "p", "q"], false).unwrap()
    }

    fn ones(s: &PositionSet) -> Vec<usize> {
        s.ones().collect()
    }

    #[test]
    fn signature_counts() {
        assert_eq!(ltl_signature(&["p"], false).unwrap().signature().operators().len(), 8);
        let m = ltl_signature(&["p"], true).unwrap();
        assert!(m.signature().restrict_fragment(&["p", "p_bar", "&", "X", "F", "G"]).is_ok());
        assert_eq!(ltl_signature(&["X"], false).unwrap_err(), LtlError::InvalidName("X".into()));
        let none: [&str; 0] = [];
        assert_eq!(ltl_signature(&none, false).unwrap_err(), LtlError::EmptyAlphabet);
    }

    #[test]
    fn tables() {
        let w = LassoWord::from_props(&[&["p"], &[]], &[&["q"], &[], &["p"]]).unwrap();
        assert_eq!(w.succ(1), Some(2));
        assert_eq!(w.succ(4), Some(2));
        assert_eq!(w.after(0), 0..5);
        assert_eq!(w.after(3), 2..5);
        assert_eq!(w.between(3, 2), vec![3, 4]);
        assert_eq!(w.between(4, 3), vec![4, 2]);
        assert_eq!(w.between(1, 4), vec![1, 2, 3]);
        let f = LassoWord::from_props(&[&["p"], &[]], &[]).unwrap();
        assert_eq!(f.succ(1), None);
        assert_eq!(f.after(1), 1..2);
    }

    #[test]
    fn hand_values() {
        let w = yx();
        let l = logic();
        let x = ltl_apply(&w, &LtlOp::Prop("x".into()), &[]);
        assert_eq!(ones(&x), vec![1]);
        let xx = ltl_apply(&w, &LtlOp::Next, &[&x]);
        assert_eq!(ones(&xx), vec![0]);
        let fx = ltl_apply(&w, &LtlOp::Finally, &[&x]);
        assert_eq!(ones(&fx), vec![0, 1]);
        assert!(ltl_sat(&w, &fx));
        let full = {
            let mut s = w.empty_set();
            s.insert_range(..);
            s
        };
        assert_eq!(ltl_apply(&w, &LtlOp::Globally, &[&full]), full);
        let mut d = FormulaDag::new(l.signature().clone());
        let f = parse(&mut d, "X X X X X x").unwrap();
        assert!(ltl_eval_naive(&l, &w, &d, f));
        let w4 = LassoWord::from_props(&[], &[&["y"], &["y"], &["y"], &["x"]]).unwrap();
        assert!(!ltl_eval_naive(&l, &w4, &d, f));
    }

    #[test]
    fn finite_words() {
        let l = logic();
        let w = LassoWord::from_props(&[&["p"]], &[]).unwrap();
        let mut d = FormulaDag::new(l.signature().clone());
        let p = parse(&mut d, "p").unwrap();
        let xp = parse(&mut d, "X p").unwrap();
        assert!(ltl_eval_naive(&l, &w, &d, p));
        assert!(!ltl_eval_naive(&l, &w, &d, xp));
        let s = ltl_apply(&w, &LtlOp::Next, &[&ltl_apply(&w, &LtlOp::Prop("p".into()), &[])]);
        assert!(s.is_clear());
        let g = parse(&mut d, "G p").unwrap();
        assert!(ltl_eval_naive(&l, &w, &d, g));
        assert!(ltl_positions(&l, &w, &d, g).contains(0));
    }

    #[test]
    fn until_wraps_around_the_loop() {
        let l = logic();
        // prefix {p}, loop {q}{p}{p}
        let w = LassoWord::from_props(&[&["p"]], &[&["q"], &["p"], &["p"]]).unwrap();
        let mut d = FormulaDag::new(l.signature().clone());
        let f = parse(&mut d, "(p U q)").unwrap();
        assert_eq!(ones(&ltl_positions(&l, &w, &d, f)), vec![0, 1, 2, 3]);
        assert_eq!(ltl_positions(&l, &w, &d, f), ltl_positions_naive(&l, &w, &d, f));
        let g = parse(&mut d, "(q U p)").unwrap();
        assert_eq!(ltl_positions(&l, &w, &d, g), ltl_positions_naive(&l, &w, &d, g));
    }

    #[test]
    fn between_reads_the_right_letters() {
        let w = LassoWord::from_props(&[&["p"], &[]], &[&["q"], &[], &["p", "q"]]).unwrap();
        for i in 0..w.len() {
            for k in w.after(i) {
                // w[i:] = w[between] · w[k:], compared on three periods' worth of letters
                let mut spelled: Vec<&Letter> = w.between(i, k).iter().map(|m| w.letter(*m)).collect();
                let tail = w.suffix(k).unwrap();
                let horizon = 3 * w.len();
                for t in 0..horizon {
                    spelled.push(tail.letter_at(t).unwrap());
                }
                let direct = w.suffix(i).unwrap();
                for (t, l) in spelled.iter().take(horizon).enumerate() {
                    assert_eq!(direct.letter_at(t).unwrap(), *l, "i={} k={} t={}", i, k, t);
                }
            }
        }
    }

    #[test]
    fn suffix_and_unroll() {
        let w = LassoWord::from_props(&[&["y"], &["x"]], &[&["y"], &["y"], &["y"], &["x"]]).unwrap();
        assert_eq!(w.len(), 6);
        let s = w.suffix(3).unwrap();
        assert_eq!(s.prefix().len(), 0);
        assert_eq!(s.period()[0], letter(&["y"]));
        assert_eq!(s.period()[2], letter(&["x"]));
        assert_eq!(w.unroll().len(), 10);
        assert!(LassoWord::from_props(&[&["p"]], &[]).unwrap().suffix(1).is_none());
        assert_eq!(LassoWord::new(vec![], vec![]), Err(LtlError::EmptyWord));
    }
}
