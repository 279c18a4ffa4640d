//! LTL_P: the LTL fragment whose universal-path semantics on Kripke
//! structures is computable state by state.
//!
//! Two types: propositional formulas (`tau_P`) and temporal ones (`tau`).
//! A propositional formula is used where a temporal one is expected through
//! the invisible `inject` coercion.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::ctl::{greatest, least, pre_forall, search_quantified, PathOp};
use crate::dag::{DagError, FormulaDag, FormulaId};
use crate::engine::Logic;
use crate::kripke::{KripkeStructure, NonBlockingKripke, StateSet};
use crate::ltl::{LassoWord, LtlLogic, LtlOp};
use crate::ml::is_identifier;
use crate::signature::{op, LogicSignature, Notation, TypeId, TypeSet};

pub const PROP_TYPE: TypeId = TypeId(0);
pub const TEMPORAL_TYPE: TypeId = TypeId(1);

/// Largest L_X input accepted by [`translate_lx`].
pub const LX_MAX_DAG_SIZE: usize = 20;

const KEYWORDS: [&str; 5] = ["X", "F", "G", "U", "inject"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlpError {
    #[error("proposition list is empty")]
    EmptyAlphabet,
    #[error("`{0}` is not a usable proposition name")]
    InvalidName(String),
    #[error("operator `{0}` is outside the X-only fragment")]
    NotInLxFragment(String),
    #[error("input has DAG size {0}, above the limit of {LX_MAX_DAG_SIZE}")]
    TooLarge(usize),
    #[error(transparent)]
    Dag(#[from] DagError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LtlpOp {
    Prop(String),
    PNot,
    PAnd,
    POr,
    Inject,
    And,
    /// Propositional left operand, temporal right operand.
    Or,
    Next,
    Globally,
    Finally,
    Until,
}

#[derive(Debug, Clone)]
pub struct LtlpLogic {
    signature: LogicSignature,
}

pub fn ltlp_signature<S: AsRef<str>>(props: &[S]) -> Result<LtlpLogic, LtlpError> {
    if props.is_empty() {
        return Err(LtlpError::EmptyAlphabet);
    }
    let (tp, t) = (PROP_TYPE, TEMPORAL_TYPE);
    let (sp, st) = (TypeSet::single(tp), TypeSet::single(t));
    let mut ops = Vec::new();
    for p in props {
        let p = p.as_ref();
        if !is_identifier(p) || KEYWORDS.contains(&p) {
            return Err(LtlpError::InvalidName(p.to_string()));
        }
        ops.push(op(p, Notation::Atom(p.into()), tp, &[]));
    }
    ops.push(op("!", Notation::Prefix("!".into()), tp, &[sp]));
    ops.push(op("&", Notation::Infix("&".into()), tp, &[sp, sp]));
    ops.push(op("|", Notation::Infix("|".into()), tp, &[sp, sp]));
    ops.push(op("inject", Notation::Coercion, t, &[sp]));
    ops.push(op("&T", Notation::Infix("&".into()), t, &[st, st]));
    ops.push(op("|T", Notation::Infix("|".into()), t, &[sp, st]));
    ops.push(op("X", Notation::Prefix("X".into()), t, &[st]));
    ops.push(op("G", Notation::Prefix("G".into()), t, &[st]));
    ops.push(op("F", Notation::Prefix("F".into()), t, &[sp]));
    ops.push(op("U", Notation::Infix("U".into()), t, &[st, sp]));
    let signature = LogicSignature::new(vec!["tau_P".into(), "tau".into()], &[tp, t], ops)
        .map_err(|e| LtlpError::InvalidName(e.to_string()))?;
    Ok(LtlpLogic { signature })
}

pub(crate) fn decode_ltlp_name(name: &str) -> LtlpOp {
    match name {
        "!" => LtlpOp::PNot,
        "&" => LtlpOp::PAnd,
        "|" => LtlpOp::POr,
        "inject" => LtlpOp::Inject,
        "&T" => LtlpOp::And,
        "|T" => LtlpOp::Or,
        "X" => LtlpOp::Next,
        "G" => LtlpOp::Globally,
        "F" => LtlpOp::Finally,
        "U" => LtlpOp::Until,
        p => LtlpOp::Prop(p.to_string()),
    }
}

pub fn ltlp_apply(k: &NonBlockingKripke, op: &LtlpOp, args: &[&StateSet]) -> StateSet {
    match op {
        LtlpOp::Prop(p) => k.states_with(p),
        LtlpOp::PNot => {
            let mut s = args[0].clone();
            s.toggle_range(..);
            s
        }
        LtlpOp::PAnd | LtlpOp::And => args[0] & args[1],
        LtlpOp::POr | LtlpOp::Or => args[0] | args[1],
        LtlpOp::Inject => args[0].clone(),
        LtlpOp::Next => pre_forall(k, args[0]),
        LtlpOp::Globally => greatest(k, args[0], false),
        LtlpOp::Finally => least(k, &k.full_set(), args[0], false),
        LtlpOp::Until => least(k, args[0], args[1], false),
    }
}

/// Bottom-up evaluation with [`ltlp_apply`], shared through the DAG.
pub fn ltlp_positions(k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> StateSet {
    let mut vals: HashMap<FormulaId, StateSet> = HashMap::new();
    for sub in dag.sub_formulas(id).expect("valid id") {
        let args: Vec<&StateSet> = dag.children(sub).iter().map(|c| &vals[c]).collect();
        let v = ltlp_apply(k, &decode_ltlp_name(dag.op_name(sub)), &args);
        vals.insert(sub, v);
    }
    vals.remove(&id).expect("root evaluated")
}

pub fn ltlp_modelcheck(k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> bool {
    let s = ltlp_positions(k, dag, id);
    k.initial().iter().all(|q| s.contains(*q))
}

/// States all of whose paths satisfy the formula, by graph search per state.
pub fn ltlp_reference_value(k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> StateSet {
    let mut vals: HashMap<FormulaId, StateSet> = HashMap::new();
    for sub in dag.sub_formulas(id).expect("valid id") {
        let args: Vec<&StateSet> = dag.children(sub).iter().map(|c| &vals[c]).collect();
        let n = k.state_count();
        let pointwise = |f: &dyn Fn(usize) -> bool| {
            let mut s = k.empty_set();
            (0..n).for_each(|q| s.set(q, f(q)));
            s
        };
        let v = match decode_ltlp_name(dag.op_name(sub)) {
            LtlpOp::Prop(p) => pointwise(&|q| k.has_label(q, &p)),
            LtlpOp::PNot => pointwise(&|q| !args[0].contains(q)),
            LtlpOp::PAnd | LtlpOp::And => pointwise(&|q| args[0].contains(q) && args[1].contains(q)),
            LtlpOp::POr | LtlpOp::Or => pointwise(&|q| args[0].contains(q) || args[1].contains(q)),
            LtlpOp::Inject => pointwise(&|q| args[0].contains(q)),
            LtlpOp::Next => search_quantified(k, false, PathOp::Next, &args),
            LtlpOp::Globally => search_quantified(k, false, PathOp::Globally, &args),
            LtlpOp::Finally => search_quantified(k, false, PathOp::Finally, &args),
            LtlpOp::Until => search_quantified(k, false, PathOp::Until, &args),
        };
        vals.insert(sub, v);
    }
    vals.remove(&id).expect("root evaluated")
}

impl Logic for LtlpLogic {
    type Model = NonBlockingKripke;
    type Value = StateSet;
    type Op = LtlpOp;

    fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    fn decode(&self, name: &str) -> Option<LtlpOp> {
        self.signature.op_by_name(name).map(|_| decode_ltlp_name(name))
    }

    fn atom(&self, k: &NonBlockingKripke, op: &LtlpOp) -> StateSet {
        ltlp_apply(k, op, &[])
    }

    fn apply(&self, k: &NonBlockingKripke, op: &LtlpOp, args: &[&StateSet]) -> StateSet {
        ltlp_apply(k, op, args)
    }

    fn sat(&self, k: &NonBlockingKripke, value: &StateSet) -> bool {
        k.initial().iter().all(|q| value.contains(*q))
    }

    fn value_space_size(&self, k: &NonBlockingKripke, _ty: TypeId) -> BigUint {
        BigUint::from(1u8) << k.state_count()
    }

    fn reference_value(&self, k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> StateSet {
        ltlp_reference_value(k, dag, id)
    }

    fn model_check(&self, k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> bool {
        let v = ltlp_reference_value(k, dag, id);
        k.initial().iter().all(|q| v.contains(*q))
    }
}

/// The single-path structure tracing an infinite lasso word.
pub fn kripke_from_lasso(w: &LassoWord) -> Option<NonBlockingKripke> {
    if w.is_finite() {
        return None;
    }
    let n = w.len();
    let mut b = KripkeStructure::builder(n).initial(&[0]);
    for i in 0..n {
        let l: Vec<&str> = w.letter(i).iter().map(String::as_str).collect();
        b = b.label(i, &l).succ(i, w.succ(i).expect("infinite word"));
    }
    for p in w.props() {
        b = b.prop(&p);
    }
    b.build().ok()?.validate_nonblocking().ok()
}

/// Reads an LTL_P formula as a plain LTL formula (dropping coercions).
pub fn ltlp_to_ltl(
    src: &FormulaDag,
    id: FormulaId,
    dst: &mut FormulaDag,
) -> Result<FormulaId, DagError> {
    let mut map: HashMap<FormulaId, FormulaId> = HashMap::new();
    for sub in src.sub_formulas(id)? {
        let ch: Vec<FormulaId> = src.children(sub).iter().map(|c| map[c]).collect();
        let new = match decode_ltlp_name(src.op_name(sub)) {
            LtlpOp::Inject => ch[0],
            LtlpOp::Prop(p) => dst.intern(&p, &[])?,
            LtlpOp::PNot => dst.intern("!", &ch)?,
            LtlpOp::PAnd | LtlpOp::And => dst.intern("&", &ch)?,
            LtlpOp::POr | LtlpOp::Or => dst.intern("|", &ch)?,
            LtlpOp::Next => dst.intern("X", &ch)?,
            LtlpOp::Globally => dst.intern("G", &ch)?,
            LtlpOp::Finally => dst.intern("F", &ch)?,
            LtlpOp::Until => dst.intern("U", &ch)?,
        };
        map.insert(sub, new);
    }
    Ok(map[&id])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Literal<'a> {
    depth: usize,
    prop: &'a str,
    positive: bool,
}

enum Nnf<'a> {
    Lit(Literal<'a>),
    And(Box<Nnf<'a>>, Box<Nnf<'a>>),
    Or(Box<Nnf<'a>>, Box<Nnf<'a>>),
}

fn to_nnf<'a>(
    logic: &LtlLogic,
    dag: &'a FormulaDag,
    id: FormulaId,
    negated: bool,
    depth: usize,
) -> Result<Nnf<'a>, LtlpError> {
    let ch = dag.children(id);
    let name = dag.op_name(id);
    Ok(match logic.decode_name(name) {
        LtlOp::Prop(_) => Nnf::Lit(Literal {
            depth,
            prop: name,
            positive: !negated,
        }),
        LtlOp::Dual(_) => {
            let base = &dag.signature().operators()[..];
            let p = base
                .iter()
                .find(|o| crate::ltl::dual_name(&o.name) == name)
                .map(|o| o.name.as_str())
                .ok_or_else(|| LtlpError::NotInLxFragment(name.to_string()))?;
            Nnf::Lit(Literal {
                depth,
                prop: p,
                positive: negated,
            })
        }
        LtlOp::Not => to_nnf(logic, dag, ch[0], !negated, depth)?,
        LtlOp::Next => to_nnf(logic, dag, ch[0], negated, depth + 1)?,
        LtlOp::And | LtlOp::Or => {
            let a = Box::new(to_nnf(logic, dag, ch[0], negated, depth)?);
            let b = Box::new(to_nnf(logic, dag, ch[1], negated, depth)?);
            if matches!(logic.decode_name(name), LtlOp::And) != negated {
                Nnf::And(a, b)
            } else {
                Nnf::Or(a, b)
            }
        }
        _ => return Err(LtlpError::NotInLxFragment(name.to_string())),
    })
}

fn to_cnf<'a>(f: &Nnf<'a>) -> Vec<Vec<Literal<'a>>> {
    match f {
        Nnf::Lit(l) => vec![vec![*l]],
        Nnf::And(a, b) => {
            let mut c = to_cnf(a);
            for cl in to_cnf(b) {
                if !c.contains(&cl) {
                    c.push(cl);
                }
            }
            c
        }
        Nnf::Or(a, b) => {
            let (ca, cb) = (to_cnf(a), to_cnf(b));
            let mut out: Vec<Vec<Literal>> = Vec::new();
            for x in &ca {
                for y in &cb {
                    let mut cl = x.clone();
                    cl.extend(y.iter().copied());
                    cl.sort();
                    cl.dedup();
                    if !out.contains(&cl) {
                        out.push(cl);
                    }
                }
            }
            out
        }
    }
}

fn lift(dst: &mut FormulaDag, f: FormulaId) -> Result<FormulaId, DagError> {
    if dst.type_of(f)? == PROP_TYPE {
        dst.intern("inject", &[f])
    } else {
        Ok(f)
    }
}

fn next_pow(dst: &mut FormulaDag, mut f: FormulaId, k: usize) -> Result<FormulaId, DagError> {
    if k == 0 {
        return Ok(f);
    }
    f = lift(dst, f)?;
    for _ in 0..k {
        f = dst.intern("X", &[f])?;
    }
    Ok(f)
}

/// Translates an X-only LTL formula into an equivalent LTL_P formula.
///
/// Negations are pushed to the atoms and X through the Boolean connectives;
/// the resulting CNF over literals `X^k ℓ` is rebuilt clause by clause as
/// `X^{k1}(ℓ1 | X^{k2-k1}(ℓ2 | ...))` with the literals sorted by depth.
pub fn translate_lx(
    src_logic: &LtlLogic,
    src: &FormulaDag,
    id: FormulaId,
    dst: &mut FormulaDag,
) -> Result<FormulaId, LtlpError> {
    let size = src.dag_size(id)?;
    if size > LX_MAX_DAG_SIZE {
        return Err(LtlpError::TooLarge(size));
    }
    let nnf = to_nnf(src_logic, src, id, false, 0)?;
    let cnf = to_cnf(&nnf);
    let mut conjuncts = Vec::new();
    for clause in cnf {
        // sorted by depth, then proposition, then polarity
        let mut rest: Option<(FormulaId, usize)> = None;
        for lit in clause.iter().rev() {
            let mut atom = dst.intern(lit.prop, &[])?;
            if !lit.positive {
                atom = dst.intern("!", &[atom])?;
            }
            let f = match rest {
                None => atom,
                Some((r, d)) => {
                    let inner = next_pow(dst, r, d - lit.depth)?;
                    if dst.type_of(inner)? == PROP_TYPE {
                        dst.intern("|", &[atom, inner])?
                    } else {
                        dst.intern("|T", &[atom, inner])?
                    }
                }
            };
            rest = Some((f, lit.depth));
        }
        let (f, d) = rest.expect("clauses are nonempty");
        conjuncts.push(next_pow(dst, f, d)?);
    }
    let mut acc = conjuncts[0];
    for &c in &conjuncts[1..] {
        let both_prop = dst.type_of(acc)? == PROP_TYPE && dst.type_of(c)? == PROP_TYPE;
        acc = if both_prop {
            dst.intern("&", &[acc, c])?
        } else {
            let a = lift(dst, acc)?;
            let b = lift(dst, c)?;
            dst.intern("&T", &[a, b])?
        };
    }
    Ok(acc)
}

/// Largest X-nesting depth of a formula.
pub fn next_depth(logic: &LtlLogic, dag: &FormulaDag, id: FormulaId) -> usize {
    let mut depth: HashMap<FormulaId, usize> = HashMap::new();
    for sub in dag.sub_formulas(id).expect("valid id") {
        let m = dag.children(sub).iter().map(|c| depth[c]).max().unwrap_or(0);
        let d = if logic.decode_name(dag.op_name(sub)) == LtlOp::Next { m + 1 } else { m };
        depth.insert(sub, d);
    }
    depth[&id]
}

fn lx_on_path(logic: &LtlLogic, k: &KripkeStructure, dag: &FormulaDag, id: FormulaId, path: &[usize], i: usize) -> bool {
    let ch = dag.children(id);
    let name = dag.op_name(id);
    match logic.decode_name(name) {
        LtlOp::Prop(p) => k.has_label(path[i], &p),
        LtlOp::Dual(p) => !k.has_label(path[i], &p),
        LtlOp::Not => !lx_on_path(logic, k, dag, ch[0], path, i),
        LtlOp::And => lx_on_path(logic, k, dag, ch[0], path, i) && lx_on_path(logic, k, dag, ch[1], path, i),
        LtlOp::Or => lx_on_path(logic, k, dag, ch[0], path, i) || lx_on_path(logic, k, dag, ch[1], path, i),
        LtlOp::Next => lx_on_path(logic, k, dag, ch[0], path, i + 1),
        _ => panic!("`{}` is outside the X-only fragment", name),
    }
}

/// `K ⊨ φ` for X-only φ: every path prefix of length `depth + 1` from every initial state.
pub fn lx_universal_check(logic: &LtlLogic, k: &NonBlockingKripke, dag: &FormulaDag, id: FormulaId) -> bool {
    let depth = next_depth(logic, dag, id);
    let mut stack: Vec<Vec<usize>> = k.initial().iter().map(|q| vec![*q]).collect();
    while let Some(path) = stack.pop() {
        if path.len() == depth + 1 {
            if !lx_on_path(logic, k, dag, id, &path, 0) {
                return false;
            }
            continue;
        }
        for r in k.post(*path.last().expect("nonempty")) {
            let mut p = path.clone();
            p.push(r);
            stack.push(p);
        }
    }
    true
}

/// States from which every lasso-shaped path of at most `max_len` states satisfies `id`.
///
/// Bounded brute force over the universal-path semantics; used as a test oracle.
pub fn universal_lasso_positions(
    logic: &LtlLogic,
    k: &NonBlockingKripke,
    dag: &FormulaDag,
    id: FormulaId,
    max_len: usize,
) -> StateSet {
    let mut out = k.full_set();
    for q in 0..k.state_count() {
        let mut stack = vec![vec![q]];
        'search: while let Some(path) = stack.pop() {
            let last = *path.last().expect("nonempty");
            let post = k.post(last);
            for (l, s) in path.iter().enumerate() {
                if post.contains(s) {
                    let label = |i: &usize| -> crate::ltl::Letter {
                        k.label(*i).into_iter().map(String::from).collect()
                    };
                    let w = LassoWord::new(
                        path[..l].iter().map(label).collect(),
                        path[l..].iter().map(label).collect(),
                    )
                    .expect("nonempty loop");
                    if !crate::ltl::ltl_eval_naive(logic, &w, dag, id) {
                        out.set(q, false);
                        break 'search;
                    }
                }
            }
            if path.len() < max_len {
                for r in post {
                    let mut p = path.clone();
                    p.push(r);
                    stack.push(p);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::ltl_signature;
    use crate::syntax::{parse, render};

    fn chain() -> NonBlockingKripke {
        KripkeStructure::builder(2)
            .initial(&[0])
            .label(1, &["p"])
            .succ(0, 1)
            .succ(1, 1)
            .build()
            .unwrap()
            .validate_nonblocking()
            .unwrap()
    }

    fn ones(s: &StateSet) -> Vec<usize> {
        s.ones().collect()
    }

    #[test]
    fn typing() {
        let l = ltlp_signature(&["p", "q"]).unwrap();
        let mut d = FormulaDag::new(l.signature().clone());
        let f = parse(&mut d, "(p | q)").unwrap();
        assert_eq!(d.type_of(f).unwrap(), PROP_TYPE);
        let g = parse(&mut d, "G p").unwrap();
        assert_eq!(d.type_of(g).unwrap(), TEMPORAL_TYPE);
        let h = parse(&mut d, "(G p & q)").unwrap();
        assert_eq!(d.op_name(h), "&T");
        assert_eq!(render(&d, h), "(G p & q)");
        assert!(parse(&mut d, "F X p").is_err());
        assert!(parse(&mut d, "(X p | q)").is_err());
        assert!(parse(&mut d, "!X p").is_err());
        assert!(parse(&mut d, "(p U q)").is_ok());
        assert!(parse(&mut d, "(p U X q)").is_err());
    }

    #[test]
    fn apply_examples() {
        let k = chain();
        let p = k.states_with("p");
        assert_eq!(ones(&ltlp_apply(&k, &LtlpOp::Next, &[&p])), vec![0, 1]);
        assert_eq!(ones(&ltlp_apply(&k, &LtlpOp::Finally, &[&p])), vec![0, 1]);
        let full = k.full_set();
        assert_eq!(ltlp_apply(&k, &LtlpOp::Globally, &[&full]), full);
        let l = ltlp_signature(&["p"]).unwrap();
        let mut d = FormulaDag::new(l.signature().clone());
        let f = parse(&mut d, "X p").unwrap();
        assert!(ltlp_modelcheck(&k, &d, f));
        let g = parse(&mut d, "p").unwrap();
        assert!(!ltlp_modelcheck(&k, &d, g));
        assert!(l.model_check(&k, &d, f));
    }

    #[test]
    fn translation_examples() {
        let src_logic = ltl_signature(&["p", "q"], false).unwrap();
        let dst_logic = ltlp_signature(&["p", "q"]).unwrap();
        let mut src = FormulaDag::new(src_logic.signature().clone());
        let mut dst = FormulaDag::new(dst_logic.signature().clone());
        let cases = [
            ("p", "p"),
            ("!X p", "X !p"),
            ("(X p | X X q)", "X (p | X q)"),
            ("X (p & q)", "(X p & X q)"),
        ];
        for (input, expected) in cases {
            let f = parse(&mut src, input).unwrap();
            let t = translate_lx(&src_logic, &src, f, &mut dst).unwrap();
            assert_eq!(render(&dst, t), expected);
        }
        let g = parse(&mut src, "F p").unwrap();
        assert!(matches!(
            translate_lx(&src_logic, &src, g, &mut dst),
            Err(LtlpError::NotInLxFragment(_))
        ));
    }

    #[test]
    fn lasso_structure_matches_word() {
        let w = LassoWord::from_props(&[&["p"]], &[&[], &["q"]]).unwrap();
        let k = kripke_from_lasso(&w).unwrap();
        assert_eq!(k.state_count(), 3);
        assert_eq!(k.post(2), vec![1]);
        assert!(kripke_from_lasso(&LassoWord::from_props(&[&["p"]], &[]).unwrap()).is_none());
    }
}
