#![allow(dead_code)]

use std::collections::HashMap;

use semlearn::dag::{FormulaDag, FormulaId};
use semlearn::engine::Logic;

/// Value of `id` composed bottom-up from `atom` and `apply`.
pub fn composed<L: Logic>(logic: &L, model: &L::Model, dag: &FormulaDag, id: FormulaId) -> L::Value {
    let mut memo: HashMap<FormulaId, L::Value> = HashMap::new();
    for sub in dag.sub_formulas(id).expect("valid id") {
        let op = logic.decode(dag.op_name(sub)).expect("operator of the logic");
        let kids: Vec<&L::Value> = dag.children(sub).iter().map(|c| &memo[c]).collect();
        let v = if kids.is_empty() {
            logic.atom(model, &op)
        } else {
            logic.apply(model, &op, &kids)
        };
        memo.insert(sub, v);
    }
    memo.remove(&id).expect("root value")
}
