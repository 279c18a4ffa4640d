//! Typed operator signatures and syntactic fragments.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a formula type inside a [`LogicSignature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub u8);

/// Index of an operator inside a [`LogicSignature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpId(pub u16);

impl OpId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of types, stored as a bit mask (at most 32 types per signature).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TypeSet(u32);

impl TypeSet {
    pub fn empty() -> Self {
        TypeSet(0)
    }

    pub fn single(ty: TypeId) -> Self {
        TypeSet(1 << ty.0)
    }

    pub fn of(types: &[TypeId]) -> Self {
        types.iter().fold(TypeSet(0), |acc, t| acc.with(*t))
    }

    pub fn with(self, ty: TypeId) -> Self {
        TypeSet(self.0 | (1 << ty.0))
    }

    pub fn contains(self, ty: TypeId) -> bool {
        self.0 & (1 << ty.0) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = TypeId> {
        (0..32u8).filter(move |i| self.0 & (1 << i) != 0).map(TypeId)
    }
}

/// How an operator is written in formula text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Notation {
    /// An identifier such as `p`.
    Atom(String),
    /// A prefix token: `!e`, `X e`, `[a] e`, `<a>>=2 e`, `EX e`.
    Prefix(String),
    /// A parenthesised infix token: `(e & e)`, `(e U e)`.
    Infix(String),
    /// A path-quantified until: `E(e U e)` / `A(e U e)`; the string is the quantifier.
    QuantifiedUntil(String),
    /// A postfix letter used by the word logics: `e.a`.
    Postfix(String),
    /// An invisible type coercion (renders as its argument).
    Coercion,
}

impl Notation {
    pub fn token(&self) -> &str {
        match self {
            Notation::Atom(s)
            | Notation::Prefix(s)
            | Notation::Infix(s)
            | Notation::QuantifiedUntil(s)
            | Notation::Postfix(s) => s,
            Notation::Coercion => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorDecl {
    /// Unique name inside the signature; fragments are selected by name.
    pub name: String,
    pub notation: Notation,
    pub result_type: TypeId,
    /// One allowed-type set per argument; its length is the arity.
    pub arg_types: Vec<TypeSet>,
}

impl OperatorDecl {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("signature has no types")]
    NoTypes,
    #[error("signature has no final types")]
    NoFinalTypes,
    #[error("type {0} is not declared")]
    UnknownType(u8),
    #[error("no arity-0 operator")]
    EmptyNullaryLayer,
    #[error("operator `{0}` declared twice")]
    DuplicateOperator(String),
    #[error("operator `{0}` has arity {1}; only 0, 1 and 2 are supported")]
    BadArity(String, usize),
    #[error("operator `{0}` has an empty argument-type set")]
    EmptyArgumentTypes(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
}

/// Types, final types and typed operators of a logic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicSignature {
    types: Vec<String>,
    final_types: TypeSet,
    operators: Vec<OperatorDecl>,
    by_name: HashMap<String, OpId>,
}

impl LogicSignature {
    pub fn new(
        types: Vec<String>,
        final_types: &[TypeId],
        operators: Vec<OperatorDecl>,
    ) -> Result<Self, SignatureError> {
        if types.is_empty() {
            return Err(SignatureError::NoTypes);
        }
        if final_types.is_empty() {
            return Err(SignatureError::NoFinalTypes);
        }
        let known = |t: TypeId| (t.0 as usize) < types.len();
        for t in final_types {
            if !known(*t) {
                return Err(SignatureError::UnknownType(t.0));
            }
        }
        let mut by_name = HashMap::new();
        for (i, op) in operators.iter().enumerate() {
            if op.arity() > 2 {
                return Err(SignatureError::BadArity(op.name.clone(), op.arity()));
            }
            if !known(op.result_type) {
                return Err(SignatureError::UnknownType(op.result_type.0));
            }
            for set in &op.arg_types {
                if set.is_empty() {
                    return Err(SignatureError::EmptyArgumentTypes(op.name.clone()));
                }
                if let Some(t) = set.iter().find(|t| !known(*t)) {
                    return Err(SignatureError::UnknownType(t.0));
                }
            }
            if by_name.insert(op.name.clone(), OpId(i as u16)).is_some() {
                return Err(SignatureError::DuplicateOperator(op.name.clone()));
            }
        }
        if !operators.iter().any(|o| o.arity() == 0) {
            return Err(SignatureError::EmptyNullaryLayer);
        }
        Ok(LogicSignature {
            types,
            final_types: TypeSet::of(final_types),
            operators,
            by_name,
        })
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> impl Iterator<Item = TypeId> + '_ {
        (0..self.types.len()).map(|i| TypeId(i as u8))
    }

    pub fn type_name(&self, ty: TypeId) -> &str {
        &self.types[ty.0 as usize]
    }

    pub fn type_by_name(&self, name: &str) -> Option<TypeId> {
        self.types
            .iter()
            .position(|t| t == name)
            .map(|i| TypeId(i as u8))
    }

    pub fn is_final(&self, ty: TypeId) -> bool {
        self.final_types.contains(ty)
    }

    pub fn final_types(&self) -> TypeSet {
        self.final_types
    }

    pub fn operators(&self) -> &[OperatorDecl] {
        &self.operators
    }

    pub fn op_ids(&self) -> impl Iterator<Item = OpId> {
        (0..self.operators.len()).map(|i| OpId(i as u16))
    }

    pub fn op(&self, id: OpId) -> &OperatorDecl {
        &self.operators[id.index()]
    }

    pub fn op_by_name(&self, name: &str) -> Option<OpId> {
        self.by_name.get(name).copied()
    }

    /// The fragment keeping only the operators named in `allowed`, in
    /// declaration order. Types and final types are unchanged.
    pub fn restrict_fragment<S: AsRef<str>>(
        &self,
        allowed: &[S],
    ) -> Result<LogicSignature, SignatureError> {
        for name in allowed {
            if !self.by_name.contains_key(name.as_ref()) {
                return Err(SignatureError::UnknownOperator(name.as_ref().to_string()));
            }
        }
        let keep: Vec<OperatorDecl> = self
            .operators
            .iter()
            .filter(|op| allowed.iter().any(|a| a.as_ref() == op.name))
            .cloned()
            .collect();
        let finals: Vec<TypeId> = self.final_types.iter().collect();
        LogicSignature::new(self.types.clone(), &finals, keep)
    }

    /// Whether every operator of `self` also exists, with the same typing, in `parent`.
    pub fn is_fragment_of(&self, parent: &LogicSignature) -> bool {
        self.types == parent.types
            && self.final_types == parent.final_types
            && self.operators.iter().all(|op| {
                parent
                    .op_by_name(&op.name)
                    .map(|id| parent.op(id) == op)
                    .unwrap_or(false)
            })
    }
}

impl fmt::Display for LogicSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.operators.iter().map(|o| o.name.as_str()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Shorthand for building single-type operators.
pub(crate) fn op(name: &str, notation: Notation, result: TypeId, args: &[TypeSet]) -> OperatorDecl {
    OperatorDecl {
        name: name.to_string(),
        notation,
        result_type: result,
        arg_types: args.to_vec(),
    }
}
