//! Lower-bound sample families, monotone dualization and the automaton gadgets.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::automata::Nfa;
use crate::dag::{DagError, FormulaDag, FormulaId};
use crate::engine::Sample;
use crate::kripke::{KripkeError, KripkeStructure};
use crate::ltl::{dual_name, letter, LassoWord, Letter};

/// Largest prime-sample parameter we generate.
pub const MAX_PRIME_SAMPLE: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("n must be at least 1")]
    ZeroSize,
    #[error("n = {0} is larger than {MAX_PRIME_SAMPLE}")]
    TooLarge(usize),
    #[error("formula is not monotone for this dualization")]
    NotMonotone,
    #[error("atom `{0}` has no dual")]
    NoDual(String),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

/// The first `n` primes.
pub fn primes(n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![];
    }
    let mut limit = 16usize;
    loop {
        let mut composite = vec![false; limit + 1];
        let mut out = Vec::new();
        for i in 2..=limit {
            if composite[i] {
                continue;
            }
            out.push(i as u64);
            if out.len() == n {
                return out;
            }
            let mut m = i * i;
            while m <= limit {
                composite[m] = true;
                m += i;
            }
        }
        limit *= 2;
    }
}

/// `∏_{i≤n} p_i − 1`.
pub fn separability_threshold(n: usize) -> BigUint {
    assert!(n >= 1, "threshold needs n >= 1");
    primes(n).into_iter().fold(BigUint::from(1u8), |acc, p| acc * p) - 1u8
}

/// `({y}^{m−1}·{x})^ω`.
pub fn w_m(m: usize, x: &str, y: &str) -> LassoWord {
    assert!(m >= 1, "period must be nonempty");
    let mut period: Vec<Letter> = vec![letter(&[y]); m - 1];
    period.push(letter(&[x]));
    LassoWord::new(vec![], period).expect("nonempty period")
}

/// `{y}·{x}·w_4`.
pub fn w4_prime(x: &str, y: &str) -> LassoWord {
    let w4 = w_m(4, x, y);
    LassoWord::new(vec![letter(&[y]), letter(&[x])], w4.period().to_vec()).expect("nonempty period")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    And,
    Or,
}

impl Lattice {
    pub fn token(self) -> &'static str {
        match self {
            Lattice::And => "&",
            Lattice::Or => "|",
        }
    }

    pub fn other(self) -> Lattice {
        match self {
            Lattice::And => Lattice::Or,
            Lattice::Or => Lattice::And,
        }
    }
}

/// `(𝒫, 𝒩)` over letter `x` for the `&` variant; `(𝒩, 𝒫)` over letter `y` for the `|` variant.
///
/// Every position of every word carries exactly one of `x` and `y`.
pub fn gen_prime_sample(n: usize, variant: Lattice, j: usize) -> Result<Sample<LassoWord>, SampleError> {
    if n == 0 {
        return Err(SampleError::ZeroSize);
    }
    if n > MAX_PRIME_SAMPLE {
        return Err(SampleError::TooLarge(n));
    }
    let (x, y) = match variant {
        Lattice::And => ("x", "y"),
        Lattice::Or => ("y", "x"),
    };
    let shift = |w: LassoWord| w.suffix(j).expect("infinite word");
    let mut p: Vec<LassoWord> = primes(n).into_iter().map(|m| shift(w_m(m as usize, x, y))).collect();
    p.push(shift(w4_prime(x, y)));
    let nn = vec![shift(w_m(4, x, y))];
    Ok(match variant {
        Lattice::And => Sample::new(p, nn),
        Lattice::Or => Sample::new(nn, p),
    })
}

/// `p ↔ p_bar` for each proposition.
pub fn bar_duals<S: AsRef<str>>(props: &[S]) -> HashMap<String, String> {
    let mut m = HashMap::new();
    for p in props {
        let p = p.as_ref();
        m.insert(p.to_string(), dual_name(p));
        m.insert(dual_name(p), p.to_string());
    }
    m
}

/// `x ↔ y`, the pairing used by the prime samples.
pub fn xy_duals() -> HashMap<String, String> {
    HashMap::from([("x".to_string(), "y".to_string()), ("y".to_string(), "x".to_string())])
}

/// Swaps atoms through `atoms`, `from` with the other lattice operator and `F` with `G`; keeps `X`.
///
/// The result lives in the same DAG, whose signature must hold both lattice operators.
pub fn dualize(
    dag: &mut FormulaDag,
    id: FormulaId,
    from: Lattice,
    atoms: &HashMap<String, String>,
) -> Result<FormulaId, SampleError> {
    let subs = dag.sub_formulas(id)?;
    let mut image: HashMap<FormulaId, FormulaId> = HashMap::new();
    for s in subs {
        let name = dag.op_name(s).to_string();
        let kids: Vec<FormulaId> = dag.children(s).iter().map(|c| image[c]).collect();
        let target = match (name.as_str(), kids.len()) {
            ("X", 1) => "X".to_string(),
            ("F", 1) => "G".to_string(),
            ("G", 1) => "F".to_string(),
            (t, 2) if t == from.token() => from.other().token().to_string(),
            (_, 0) => atoms.get(&name).cloned().ok_or_else(|| SampleError::NoDual(name.clone()))?,
            _ => return Err(SampleError::NotMonotone),
        };
        let d = dag.intern(&target, &kids)?;
        image.insert(s, d);
    }
    Ok(image[&id])
}

/// `K^Z(P)`: the automaton's graph with letters as actions, initial states `z`;
/// finals carry `p` when `p_on_finals`, the other states when not.
pub fn automaton_to_kripke(a: &Nfa, z: &[usize], p_on_finals: bool) -> Result<KripkeStructure, SampleError> {
    let mut b = KripkeStructure::builder(a.state_count())
        .names(a.state_names().iter().cloned())
        .initial(z)
        .prop("p");
    for l in a.alphabet() {
        b = b.action(l);
    }
    for q in 0..a.state_count() {
        if a.finals().contains(q) == p_on_finals {
            b = b.label(q, &["p"]);
        }
    }
    for (from, ai, to) in a.edges() {
        b = b.edge(from, &a.alphabet()[ai], to);
    }
    Ok(b.build()?)
}

/// `K(P)`: `idle` loops and moves to `loop` on every action; `loop` loops.
/// `idle` carries `p` when `p_on_idle`, `loop` when not.
pub fn idle_gadget<S: AsRef<str>>(actions: &[S], p_on_idle: bool) -> Result<KripkeStructure, SampleError> {
    let (idle, lp) = (0, 1);
    let mut b = KripkeStructure::builder(2)
        .names(["idle", "loop"])
        .initial(&[idle])
        .prop("p")
        .label(if p_on_idle { idle } else { lp }, &["p"]);
    for a in actions {
        let a = a.as_ref();
        b = b.action(a).edge(idle, a, idle).edge(idle, a, lp).edge(lp, a, lp);
    }
    Ok(b.build()?)
}

/// `({K^Z(∅)}, {K(∅)})`.
pub fn box_gadget_sample(a: &Nfa, z: &[usize]) -> Result<Sample<KripkeStructure>, SampleError> {
    Ok(Sample::new(
        vec![automaton_to_kripke(a, z, false)?],
        vec![idle_gadget(a.alphabet(), false)?],
    ))
}

/// `({K({p})}, {K^{q}({p}) : q ∈ Z})`.
pub fn diamond_gadget_sample(a: &Nfa, z: &[usize]) -> Result<Sample<KripkeStructure>, SampleError> {
    let negatives = z
        .iter()
        .map(|q| automaton_to_kripke(a, &[*q], true))
        .collect::<Result<_, _>>()?;
    Ok(Sample::new(vec![idle_gadget(a.alphabet(), true)?], negatives))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Logic;
    use crate::ltl::ltl_signature;
    use crate::syntax::{parse, render};

    #[test]
    fn prime_list() {
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(separability_threshold(1), BigUint::from(1u8));
        assert_eq!(separability_threshold(2), BigUint::from(5u8));
        assert_eq!(separability_threshold(4), BigUint::from(209u8));
    }

    #[test]
    fn prime_samples() {
        let s = gen_prime_sample(1, Lattice::And, 0).unwrap();
        assert_eq!(s.positives, vec![w_m(2, "x", "y"), w4_prime("x", "y")]);
        assert_eq!(s.negatives, vec![w_m(4, "x", "y")]);
        let s = gen_prime_sample(2, Lattice::And, 0).unwrap();
        let total: usize = s.models().iter().map(|w| w.len()).sum();
        assert_eq!(total, 15);
        let w2 = w_m(2, "x", "y");
        assert_eq!(w2.period(), &[letter(&["y"]), letter(&["x"])]);
        assert_eq!(gen_prime_sample(7, Lattice::And, 0), Err(SampleError::TooLarge(7)));
        let o = gen_prime_sample(1, Lattice::Or, 0).unwrap();
        assert_eq!(o.positives, vec![w_m(4, "y", "x")]);
    }

    #[test]
    fn dual_examples() {
        let logic = ltl_signature(&["x", "y"], true).unwrap();
        let mut dag = FormulaDag::new(logic.signature().clone());
        let m = bar_duals(&["x", "y"]);
        let cases = [("x", "x_bar"), ("X x", "X x_bar"), ("F (x & X x)", "G (x_bar | X x_bar)")];
        for (src, want) in cases {
            let f = parse(&mut dag, src).unwrap();
            let d = dualize(&mut dag, f, Lattice::And, &m).unwrap();
            assert_eq!(render(&dag, d), want);
            assert_eq!(dag.tree_size(d).unwrap(), dag.tree_size(f).unwrap());
        }
        let f = parse(&mut dag, "(x | y)").unwrap();
        assert_eq!(dualize(&mut dag, f, Lattice::And, &m), Err(SampleError::NotMonotone));
        let f = parse(&mut dag, "!x").unwrap();
        assert_eq!(dualize(&mut dag, f, Lattice::And, &m), Err(SampleError::NotMonotone));
    }

    #[test]
    fn gadgets() {
        let a = Nfa::new(2, &["a"], &[0], &[(0, "a", 1), (1, "a", 1)], &[1]).unwrap();
        let k = automaton_to_kripke(&a, &[0], false).unwrap();
        assert!(k.has_label(0, "p"));
        assert!(!k.has_label(1, "p"));
        let g = idle_gadget(&["a"], false).unwrap();
        assert!(g.label(0).is_empty());
        assert_eq!(g.label(1), vec!["p"]);
        assert_eq!(g.successors(0, "a"), &[0, 1]);
        assert_eq!(g.successors(1, "a"), &[1]);
        let s = box_gadget_sample(&a, &[0]).unwrap();
        assert_eq!((s.positives.len(), s.negatives.len()), (1, 1));
        let d = diamond_gadget_sample(&a, &[0, 1]).unwrap();
        assert_eq!(d.negatives.len(), 2);
        assert!(d.negatives[1].has_label(1, "p"));
    }
}
