//! JSON file formats for models, automata and samples.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{AutomatonError, Nfa, ParityAutomaton};
use crate::kripke::{KripkeError, KripkeStructure};
use crate::ltl::{LassoWord, Letter, LtlError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: line {line}, column {column}: {msg}")]
    Json {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{0}: {1}")]
    Read(String, String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Word(#[from] LtlError),
}

/// A state written either by name or by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateRef {
    Index(usize),
    Name(String),
}

impl fmt::Display for StateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateRef::Index(i) => write!(f, "{}", i),
            StateRef::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KripkeStateJson {
    pub id: StateRef,
    #[serde(default)]
    pub label: Vec<String>,
    #[serde(default)]
    pub succ: BTreeMap<String, Vec<StateRef>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KripkeJson {
    pub states: Vec<KripkeStateJson>,
    pub initial: Vec<StateRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub props: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoJson {
    #[serde(default)]
    pub prefix: Vec<Vec<String>>,
    #[serde(rename = "loop", default)]
    pub period: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonStateJson {
    pub id: StateRef,
    #[serde(default)]
    pub succ: BTreeMap<String, Vec<StateRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<u32>,
}

/// NFA when `finals` is used, parity automaton when every state has a `priority`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonJson {
    pub alphabet: Vec<String>,
    pub states: Vec<AutomatonStateJson>,
    pub initial: Vec<StateRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub finals: Vec<StateRef>,
}

struct Resolver {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Resolver {
    fn new(ids: impl Iterator<Item = StateRef>) -> Result<Self, IoError> {
        let names: Vec<String> = ids.map(|r| r.to_string()).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(IoError::DuplicateState(n.clone()));
            }
        }
        Ok(Resolver { names, index })
    }

    fn get(&self, r: &StateRef) -> Result<usize, IoError> {
        self.index
            .get(&r.to_string())
            .copied()
            .ok_or_else(|| IoError::UnknownState(r.to_string()))
    }
}

impl KripkeJson {
    pub fn to_model(&self) -> Result<KripkeStructure, IoError> {
        let res = Resolver::new(self.states.iter().map(|s| s.id.clone()))?;
        let mut b = KripkeStructure::builder(self.states.len()).names(res.names.clone());
        for p in &self.props {
            b = b.prop(p);
        }
        for a in &self.actions {
            b = b.action(a);
        }
        let init: Vec<usize> = self.initial.iter().map(|r| res.get(r)).collect::<Result<_, _>>()?;
        b = b.initial(&init);
        for (i, s) in self.states.iter().enumerate() {
            let label: Vec<&str> = s.label.iter().map(String::as_str).collect();
            b = b.label(i, &label);
            for (a, succ) in &s.succ {
                for t in succ {
                    b = b.edge(i, a, res.get(t)?);
                }
            }
        }
        Ok(b.build()?)
    }

    pub fn from_model(k: &KripkeStructure) -> Self {
        let id = |q: usize| StateRef::Name(k.state_name(q).to_string());
        let states = (0..k.state_count())
            .map(|q| KripkeStateJson {
                id: id(q),
                label: k.label(q).into_iter().map(String::from).collect(),
                succ: k
                    .actions()
                    .iter()
                    .filter(|a| !k.successors(q, a).is_empty())
                    .map(|a| (a.clone(), k.successors(q, a).iter().map(|r| id(*r)).collect()))
                    .collect(),
            })
            .collect();
        KripkeJson {
            states,
            initial: k.initial().iter().map(|q| id(*q)).collect(),
            props: k.props().to_vec(),
            actions: k.actions().to_vec(),
        }
    }
}

impl LassoJson {
    pub fn to_model(&self) -> Result<LassoWord, IoError> {
        let conv = |v: &Vec<Vec<String>>| -> Vec<Letter> { v.iter().map(|l| l.iter().cloned().collect()).collect() };
        Ok(LassoWord::new(conv(&self.prefix), conv(&self.period))?)
    }

    pub fn from_model(w: &LassoWord) -> Self {
        let conv = |v: &[Letter]| v.iter().map(|l| l.iter().cloned().collect()).collect();
        LassoJson {
            prefix: conv(w.prefix()),
            period: conv(w.period()),
        }
    }
}

impl AutomatonJson {
    fn parts(&self) -> Result<(Vec<String>, Vec<usize>, Vec<(usize, String, usize)>), IoError> {
        let res = Resolver::new(self.states.iter().map(|s| s.id.clone()))?;
        let init = self.initial.iter().map(|r| res.get(r)).collect::<Result<_, _>>()?;
        let mut edges = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            for (a, succ) in &s.succ {
                for t in succ {
                    edges.push((i, a.clone(), res.get(t)?));
                }
            }
        }
        Ok((res.names, init, edges))
    }

    pub fn to_nfa(&self) -> Result<Nfa, IoError> {
        let (names, init, edges) = self.parts()?;
        let res = Resolver::new(self.states.iter().map(|s| s.id.clone()))?;
        let finals: Vec<usize> = self.finals.iter().map(|r| res.get(r)).collect::<Result<_, _>>()?;
        let edges: Vec<(usize, &str, usize)> = edges.iter().map(|(a, l, b)| (*a, l.as_str(), *b)).collect();
        Ok(Nfa::with_names(names, &self.alphabet, &init, &edges, &finals)?)
    }

    pub fn to_parity(&self) -> Result<ParityAutomaton, IoError> {
        if !self.finals.is_empty() {
            return Err(IoError::Invalid("parity automata use priorities, not finals".into()));
        }
        let prio: Vec<u32> = self
            .states
            .iter()
            .map(|s| s.priority.ok_or_else(|| IoError::Invalid(format!("state `{}` has no priority", s.id))))
            .collect::<Result<_, _>>()?;
        let base = self.to_nfa()?;
        Ok(ParityAutomaton::new(base, prio)?)
    }

    pub fn from_nfa(a: &Nfa) -> Self {
        Self::build(a, None)
    }

    pub fn from_parity(a: &ParityAutomaton) -> Self {
        Self::build(a.base(), Some(a.priorities()))
    }

    fn build(a: &Nfa, prio: Option<&[u32]>) -> Self {
        let id = |q: usize| StateRef::Name(a.state_names()[q].clone());
        let states = (0..a.state_count())
            .map(|q| AutomatonStateJson {
                id: id(q),
                succ: a
                    .alphabet()
                    .iter()
                    .enumerate()
                    .filter(|(ai, _)| !a.successors(q, *ai).is_empty())
                    .map(|(ai, l)| (l.clone(), a.successors(q, ai).iter().map(|r| id(*r)).collect()))
                    .collect(),
                priority: prio.map(|p| p[q]),
            })
            .collect();
        AutomatonJson {
            alphabet: a.alphabet().to_vec(),
            states,
            initial: a.initial().iter().map(|q| id(*q)).collect(),
            finals: if prio.is_some() { vec![] } else { a.finals().ones().map(id).collect() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicKind {
    #[serde(rename = "ml")]
    Ml,
    #[serde(rename = "ltl-words")]
    LtlWords,
    #[serde(rename = "ctl")]
    Ctl,
    #[serde(rename = "ltlp")]
    Ltlp,
}

impl LogicKind {
    pub fn parse(s: &str) -> Option<LogicKind> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicKind::Ml => "ml",
            LogicKind::LtlWords => "ltl-words",
            LogicKind::Ctl => "ctl",
            LogicKind::Ltlp => "ltlp",
        }
    }

    /// Models are lasso words rather than Kripke structures.
    pub fn uses_words(self) -> bool {
        self == LogicKind::LtlWords
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fragment {
    Ops(Vec<String>),
    Named(String),
}

impl Fragment {
    pub fn full() -> Self {
        Fragment::Named("full".into())
    }

    /// Operator names, or `None` for the full logic.
    pub fn ops(&self) -> Result<Option<&[String]>, IoError> {
        match self {
            Fragment::Ops(v) => Ok(Some(v)),
            Fragment::Named(s) if s == "full" => Ok(None),
            Fragment::Named(s) => Err(IoError::Invalid(format!("unknown fragment `{}`", s))),
        }
    }
}

impl Default for Fragment {
    fn default() -> Self {
        Self::full()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelEntry {
    File { file: PathBuf },
    Inline(serde_json::Value),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Extra propositions beyond those in the models.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub props: Vec<String>,
    /// Adds `p_bar` atoms (LTL only).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub duals: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    pub logic: LogicKind,
    #[serde(default)]
    pub fragment: Fragment,
    pub positives: Vec<ModelEntry>,
    pub negatives: Vec<ModelEntry>,
    #[serde(default)]
    pub options: SampleOptions,
}

/// Models of a sample file with file references resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedModels {
    Kripke(Vec<KripkeStructure>, Vec<KripkeStructure>),
    Words(Vec<LassoWord>, Vec<LassoWord>),
}

fn json_error(path: &str, e: serde_json::Error) -> IoError {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    IoError::Json {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        msg: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| json_error(origin, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::Read(path.display().to_string(), e.to_string()))?;
    parse_json(&text, &path.display().to_string())
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

fn entry_value(entry: &ModelEntry, base: &Path) -> Result<(serde_json::Value, String), IoError> {
    match entry {
        ModelEntry::File { file } => {
            let path = if file.is_absolute() { file.clone() } else { base.join(file) };
            Ok((read_json(&path)?, path.display().to_string()))
        }
        ModelEntry::Inline(v) => Ok((v.clone(), "<inline>".into())),
    }
}

fn from_value<T: for<'de> Deserialize<'de>>(v: serde_json::Value, origin: &str) -> Result<T, IoError> {
    serde_json::from_value(v).map_err(|e| IoError::Invalid(format!("{}: {}", origin, e)))
}

impl SampleFile {
    /// Resolves file references relative to `base`.
    pub fn load_models(&self, base: &Path) -> Result<LoadedModels, IoError> {
        if self.logic.uses_words() {
            let load = |es: &[ModelEntry]| -> Result<Vec<LassoWord>, IoError> {
                es.iter()
                    .map(|e| {
                        let (v, o) = entry_value(e, base)?;
                        from_value::<LassoJson>(v, &o)?.to_model()
                    })
                    .collect()
            };
            Ok(LoadedModels::Words(load(&self.positives)?, load(&self.negatives)?))
        } else {
            let load = |es: &[ModelEntry]| -> Result<Vec<KripkeStructure>, IoError> {
                es.iter()
                    .map(|e| {
                        let (v, o) = entry_value(e, base)?;
                        from_value::<KripkeJson>(v, &o)?.to_model()
                    })
                    .collect()
            };
            Ok(LoadedModels::Kripke(load(&self.positives)?, load(&self.negatives)?))
        }
    }

    pub fn from_kripke(logic: LogicKind, fragment: Fragment, pos: &[KripkeStructure], neg: &[KripkeStructure]) -> Self {
        let inline = |k: &KripkeStructure| ModelEntry::Inline(serde_json::to_value(KripkeJson::from_model(k)).expect("json"));
        SampleFile {
            logic,
            fragment,
            positives: pos.iter().map(inline).collect(),
            negatives: neg.iter().map(inline).collect(),
            options: SampleOptions::default(),
        }
    }

    pub fn from_words(fragment: Fragment, pos: &[LassoWord], neg: &[LassoWord]) -> Self {
        let inline = |w: &LassoWord| ModelEntry::Inline(serde_json::to_value(LassoJson::from_model(w)).expect("json"));
        SampleFile {
            logic: LogicKind::LtlWords,
            fragment,
            positives: pos.iter().map(inline).collect(),
            negatives: neg.iter().map(inline).collect(),
            options: SampleOptions::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kripke_roundtrip() {
        let text = r#"{"states":[{"id":"s","label":["p"],"succ":{"a":["t"]}},{"id":"t","succ":{"a":["t","s"]}}],"initial":["s"]}"#;
        let k = parse_json::<KripkeJson>(text, "t").unwrap().to_model().unwrap();
        assert_eq!(k.successors(1, "a"), &[0, 1]);
        let back = KripkeJson::from_model(&k).to_model().unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn numeric_ids() {
        let text = r#"{"states":[{"id":0,"succ":{"_":[1]}},{"id":1,"label":["q"],"succ":{"_":[1]}}],"initial":[0]}"#;
        let k = parse_json::<KripkeJson>(text, "t").unwrap().to_model().unwrap();
        assert!(k.has_label(1, "q"));
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_json::<KripkeJson>("{\n  \"states\": [,]}", "f.json").unwrap_err();
        match err {
            IoError::Json { line, column, .. } => assert_eq!((line, column), (2, 14)),
            other => panic!("{:?}", other),
        }
        let bad = r#"{"states":[{"id":"s","succ":{"a":["u"]}}],"initial":["s"]}"#;
        assert!(matches!(
            parse_json::<KripkeJson>(bad, "t").unwrap().to_model(),
            Err(IoError::UnknownState(_))
        ));
    }

    #[test]
    fn lasso_and_automata() {
        let w = parse_json::<LassoJson>(r#"{"prefix":[["p"]],"loop":[[],["p","q"]]}"#, "t").unwrap().to_model().unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(LassoJson::from_model(&w).to_model().unwrap(), w);
        let a = r#"{"alphabet":["a","b"],"states":[{"id":"0","succ":{"a":["1"]}},{"id":"1"}],"initial":["0"],"finals":["1"]}"#;
        let n = parse_json::<AutomatonJson>(a, "t").unwrap().to_nfa().unwrap();
        assert!(n.accepts(&["a".to_string()]).unwrap());
        assert_eq!(AutomatonJson::from_nfa(&n).to_nfa().unwrap(), n);
        let p = r#"{"alphabet":["a"],"states":[{"id":"0","succ":{"a":["0"]},"priority":2}],"initial":["0"]}"#;
        let pa = parse_json::<AutomatonJson>(p, "t").unwrap().to_parity().unwrap();
        assert_eq!(AutomatonJson::from_parity(&pa).to_parity().unwrap(), pa);
    }

    #[test]
    fn sample_file() {
        let text = r#"{"logic":"ltl-words","fragment":["p","X"],"positives":[{"prefix":[["p"]],"loop":[[]]}],"negatives":[{"loop":[[]]}]}"#;
        let s: SampleFile = parse_json(text, "t").unwrap();
        assert_eq!(s.fragment.ops().unwrap().unwrap().len(), 2);
        match s.load_models(Path::new(".")).unwrap() {
            LoadedModels::Words(p, n) => assert_eq!((p.len(), n.len()), (1, 1)),
            other => panic!("{:?}", other),
        }
        let again: SampleFile = parse_json(&to_json_string(&s), "t").unwrap();
        assert_eq!(again, s);
        assert_eq!(LogicKind::parse("ctl"), Some(LogicKind::Ctl));
        assert!(Fragment::Named("some".into()).ops().is_err());
    }
}
