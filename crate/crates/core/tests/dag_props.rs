use std::collections::HashSet;

use proptest::prelude::*;

use semlearn::ctl::ctl_signature;
use semlearn::dag::{FormulaDag, FormulaId};
use semlearn::engine::Logic;
use semlearn::ltl::ltl_signature;
use semlearn::ltlp::{ltlp_signature, PROP_TYPE, TEMPORAL_TYPE};
use semlearn::ml::ml_signature;
use semlearn::random::{random_formula_upto, rng};
use semlearn::signature::{LogicSignature, OpId, TypeId, TypeSet};
use semlearn::syntax::{parse, render};

fn key(dag: &FormulaDag, id: FormulaId) -> String {
    let kids: Vec<String> = dag.children(id).iter().map(|c| key(dag, *c)).collect();
    format!("{}({})", dag.op_name(id), kids.join(","))
}

fn collect(dag: &FormulaDag, id: FormulaId, out: &mut HashSet<String>) {
    out.insert(key(dag, id));
    for c in dag.children(id) {
        collect(dag, *c, out);
    }
}

fn signatures() -> Vec<(LogicSignature, TypeSet)> {
    let t0 = TypeSet::single(TypeId(0));
    vec![
        (ml_signature(&["p", "q"], &["a", "b"], 2).unwrap().signature().clone(), t0),
        (ltl_signature(&["p", "q"], true).unwrap().signature().clone(), t0),
        (ctl_signature(&["p", "q"]).unwrap().signature().clone(), t0),
        (
            ltlp_signature(&["p", "q"]).unwrap().signature().clone(),
            TypeSet::of(&[PROP_TYPE, TEMPORAL_TYPE]),
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dag_size_counts_distinct_subterms(seed in any::<u64>(), which in 0usize..4, size in 1usize..14) {
        let (sig, types) = signatures().swap_remove(which);
        let mut dag = FormulaDag::new(sig.clone());
        let ops: Vec<OpId> = sig.op_ids().collect();
        let f = random_formula_upto(&mut rng(seed), &mut dag, &ops, types, size);
        let mut subs = HashSet::new();
        collect(&dag, f, &mut subs);
        prop_assert_eq!(dag.dag_size(f).unwrap(), subs.len());
        prop_assert_eq!(dag.sub_formulas(f).unwrap().len(), subs.len());
        prop_assert!(dag.dag_size(f).unwrap() as u64 <= dag.tree_size(f).unwrap());
    }

    #[test]
    fn binary_size_bounds(seed in any::<u64>(), size in 3usize..14) {
        let logic = ltl_signature(&["p", "q"], false).unwrap();
        let sig = logic.signature().clone();
        let mut dag = FormulaDag::new(sig.clone());
        let ops: Vec<OpId> = sig.op_ids().collect();
        let mut r = rng(seed);
        let t = TypeSet::single(TypeId(0));
        let a = random_formula_upto(&mut r, &mut dag, &ops, t, size);
        let b = random_formula_upto(&mut r, &mut dag, &ops, t, size);
        let f = dag.intern("&", &[a, b]).unwrap();
        let (sa, sb, sf) = (dag.dag_size(a).unwrap(), dag.dag_size(b).unwrap(), dag.dag_size(f).unwrap());
        prop_assert!(sf <= sa + sb + 1);
        prop_assert!(sf > sa.max(sb));
        prop_assert_eq!(dag.tree_size(f).unwrap(), dag.tree_size(a).unwrap() + dag.tree_size(b).unwrap() + 1);
    }

    #[test]
    fn render_parse_roundtrip(seed in any::<u64>(), which in 0usize..4, size in 1usize..14) {
        let (sig, types) = signatures().swap_remove(which);
        let mut dag = FormulaDag::new(sig.clone());
        let ops: Vec<OpId> = sig.op_ids().collect();
        let f = random_formula_upto(&mut rng(seed), &mut dag, &ops, types, size);
        let text = render(&dag, f);
        let mut fresh = FormulaDag::new(sig);
        let g = parse(&mut fresh, &text).unwrap();
        prop_assert_eq!(render(&fresh, g), text);
        // typing may pick a different coercion placement but never a larger formula
        prop_assert!(fresh.tree_size(g).unwrap() <= dag.tree_size(f).unwrap());
    }
}

#[test]
fn interning_shares() {
    let logic = ltl_signature(&["p"], false).unwrap();
    let mut dag = FormulaDag::new(logic.signature().clone());
    let p = dag.intern("p", &[]).unwrap();
    let x = dag.intern("X", &[p]).unwrap();
    let again = dag.intern("X", &[p]).unwrap();
    assert_eq!(x, again);
    let f = dag.intern("&", &[x, x]).unwrap();
    assert_eq!(dag.dag_size(f).unwrap(), 3);
    assert_eq!(dag.tree_size(f).unwrap(), 5);
}
