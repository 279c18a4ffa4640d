//! Hash-consed formula DAGs.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::signature::{LogicSignature, OpId, TypeId};

/// Node identifier inside a [`FormulaDag`]. Children always have smaller ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaId(pub u32);

impl FormulaId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{op}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("argument {arg} of `{op}` has type `{found}`, which the operator does not accept")]
    TypeMismatch {
        op: String,
        arg: usize,
        found: String,
    },
    #[error("formula id {0} is not in this DAG")]
    InvalidId(u32),
}

#[derive(Debug, Clone)]
struct Node {
    op: OpId,
    children: Vec<FormulaId>,
    ty: TypeId,
    dag_size: usize,
    tree_size: u64,
}

/// Append-only table of formula nodes over one signature.
#[derive(Debug, Clone)]
pub struct FormulaDag {
    signature: Arc<LogicSignature>,
    nodes: Vec<Node>,
    index: HashMap<(OpId, Vec<FormulaId>), FormulaId>,
}

impl FormulaDag {
    pub fn new(signature: LogicSignature) -> Self {
        Self::with_shared(Arc::new(signature))
    }

    pub fn with_shared(signature: Arc<LogicSignature>) -> Self {
        FormulaDag {
            signature,
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    pub fn shared_signature(&self) -> Arc<LogicSignature> {
        Arc::clone(&self.signature)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interns `name(children...)`, returning the existing id on a structural match.
    pub fn intern(&mut self, name: &str, children: &[FormulaId]) -> Result<FormulaId, DagError> {
        let op = self
            .signature
            .op_by_name(name)
            .ok_or_else(|| DagError::UnknownOperator(name.to_string()))?;
        self.intern_op(op, children)
    }

    pub fn intern_op(&mut self, op: OpId, children: &[FormulaId]) -> Result<FormulaId, DagError> {
        if op.index() >= self.signature.operators().len() {
            return Err(DagError::UnknownOperator(format!("{:?}", op)));
        }
        let decl = self.signature.op(op);
        if decl.arity() != children.len() {
            return Err(DagError::ArityMismatch {
                op: decl.name.clone(),
                expected: decl.arity(),
                found: children.len(),
            });
        }
        for (i, c) in children.iter().enumerate() {
            let node = self.nodes.get(c.index()).ok_or(DagError::InvalidId(c.0))?;
            if !decl.arg_types[i].contains(node.ty) {
                return Err(DagError::TypeMismatch {
                    op: decl.name.clone(),
                    arg: i,
                    found: self.signature.type_name(node.ty).to_string(),
                });
            }
        }
        let key = (op, children.to_vec());
        if let Some(id) = self.index.get(&key) {
            return Ok(*id);
        }
        let ty = decl.result_type;
        let tree_size = children
            .iter()
            .fold(1u64, |acc, c| acc.saturating_add(self.nodes[c.index()].tree_size));
        let dag_size = match children {
            [] => 1,
            [c] => 1 + self.nodes[c.index()].dag_size,
            [a, b] if a == b => 1 + self.nodes[a.index()].dag_size,
            _ => 1 + self.count_reachable(children),
        };
        let id = FormulaId(self.nodes.len() as u32);
        self.nodes.push(Node {
            op,
            children: key.1.clone(),
            ty,
            dag_size,
            tree_size,
        });
        self.index.insert(key, id);
        Ok(id)
    }

    fn count_reachable(&self, roots: &[FormulaId]) -> usize {
        let mut seen = FixedBitSet::with_capacity(self.nodes.len());
        let mut stack: Vec<FormulaId> = roots.to_vec();
        let mut count = 0;
        while let Some(n) = stack.pop() {
            if seen.put(n.index()) {
                continue;
            }
            count += 1;
            stack.extend(self.nodes[n.index()].children.iter().copied());
        }
        count
    }

    fn node(&self, id: FormulaId) -> Result<&Node, DagError> {
        self.nodes.get(id.index()).ok_or(DagError::InvalidId(id.0))
    }

    pub fn contains(&self, id: FormulaId) -> bool {
        id.index() < self.nodes.len()
    }

    /// Number of distinct subformulas, including the formula itself.
    pub fn dag_size(&self, id: FormulaId) -> Result<usize, DagError> {
        self.node(id).map(|n| n.dag_size)
    }

    /// Size of the formula read as a tree (saturates at `u64::MAX`).
    pub fn tree_size(&self, id: FormulaId) -> Result<u64, DagError> {
        self.node(id).map(|n| n.tree_size)
    }

    pub fn type_of(&self, id: FormulaId) -> Result<TypeId, DagError> {
        self.node(id).map(|n| n.ty)
    }

    pub fn op(&self, id: FormulaId) -> OpId {
        self.nodes[id.index()].op
    }

    pub fn op_name(&self, id: FormulaId) -> &str {
        &self.signature.op(self.op(id)).name
    }

    pub fn children(&self, id: FormulaId) -> &[FormulaId] {
        &self.nodes[id.index()].children
    }

    /// The ids of `Sub(id)`, ascending (children before parents).
    pub fn sub_formulas(&self, id: FormulaId) -> Result<Vec<FormulaId>, DagError> {
        self.node(id)?;
        let mut seen = FixedBitSet::with_capacity(id.index() + 1);
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if !seen.put(n.index()) {
                stack.extend(self.nodes[n.index()].children.iter().copied());
            }
        }
        Ok(seen.ones().map(|i| FormulaId(i as u32)).collect())
    }

    /// Copies `id` of `other` into this DAG, matching operators by name.
    pub fn import(&mut self, other: &FormulaDag, id: FormulaId) -> Result<FormulaId, DagError> {
        let mut map: HashMap<FormulaId, FormulaId> = HashMap::new();
        for sub in other.sub_formulas(id)? {
            let children: Vec<FormulaId> = other.children(sub).iter().map(|c| map[c]).collect();
            let new = self.intern(other.op_name(sub), &children)?;
            map.insert(sub, new);
        }
        Ok(map[&id])
    }
}
