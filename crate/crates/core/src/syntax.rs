//! Formula text: fully parenthesised binaries, fixed prefix forms.
//!
//! Parsing builds an untyped tree first and then picks, bottom-up, the first
//! operator (in declaration order) whose notation and argument types fit,
//! inserting a coercion operator where the signature provides one.

use std::collections::HashMap;

use thiserror::Error;

use crate::dag::{DagError, FormulaDag, FormulaId};
use crate::signature::{Notation, OpId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("type error at column {col}: {error}")]
    Type { col: usize, error: DagError },
}

impl ParseError {
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { col, .. } | ParseError::Type { col, .. } => *col,
        }
    }
}

/// Renders a formula in the fixed text grammar.
pub fn render(dag: &FormulaDag, id: FormulaId) -> String {
    let sig = dag.signature();
    let mut out: HashMap<FormulaId, String> = HashMap::new();
    for sub in dag.sub_formulas(id).expect("valid formula id") {
        let ch: Vec<&str> = dag.children(sub).iter().map(|c| out[c].as_str()).collect();
        let text = match &sig.op(dag.op(sub)).notation {
            Notation::Atom(s) => s.clone(),
            Notation::Prefix(t) if t == "!" => format!("!{}", ch[0]),
            Notation::Prefix(t) => format!("{} {}", t, ch[0]),
            Notation::Infix(t) => format!("({} {} {})", ch[0], t, ch[1]),
            Notation::QuantifiedUntil(q) => format!("{}({} U {})", q, ch[0], ch[1]),
            Notation::Postfix(a) => format!("{}.{}", ch[0], a),
            Notation::Coercion => ch[0].to_string(),
        };
        out.insert(sub, text);
    }
    out.remove(&id).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Bang,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Ge,
    Dot,
    Sym(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| ParseError::Syntax {
                col,
                msg: format!("number `{}` out of range", s),
            })?;
            toks.push((Tok::Num(n), col));
            continue;
        }
        let tok = match c {
            '!' => Tok::Bang,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '<' => Tok::Lt,
            '.' => Tok::Dot,
            '>' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                Tok::Ge
            }
            '>' => Tok::Gt,
            '&' | '|' => Tok::Sym(c.to_string()),
            _ => {
                return Err(ParseError::Syntax {
                    col,
                    msg: format!("unexpected character `{}`", c),
                })
            }
        };
        toks.push((tok, col));
        i += 1;
    }
    Ok(toks)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Form {
    Atom,
    Prefix,
    Infix,
    Quantified,
    Postfix,
}

#[derive(Debug)]
struct Ast {
    form: Form,
    token: String,
    children: Vec<Ast>,
    col: usize,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    dag: &'a FormulaDag,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {}", what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {}", what)),
        }
    }

    fn has_notation(&self, pred: impl Fn(&Notation) -> bool) -> bool {
        self.dag.signature().operators().iter().any(|o| pred(&o.notation))
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut e = self.primary()?;
        while self.peek() == Some(&Tok::Dot) {
            let col = self.col();
            self.pos += 1;
            let a = self.ident("a letter after `.`")?;
            e = Ast {
                form: Form::Postfix,
                token: a,
                children: vec![e],
                col,
            };
        }
        Ok(e)
    }

    fn prefix(&mut self, token: String, col: usize) -> Result<Ast, ParseError> {
        let arg = self.expr()?;
        Ok(Ast {
            form: Form::Prefix,
            token,
            children: vec![arg],
            col,
        })
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Bang) => self.prefix("!".into(), col),
            Some(Tok::LBrack) => {
                let a = self.ident("an action name")?;
                self.expect(Tok::RBrack, "`]`")?;
                self.prefix(format!("[{}]", a), col)
            }
            Some(Tok::Lt) => {
                let a = self.ident("an action name")?;
                self.expect(Tok::Gt, "`>`")?;
                self.expect(Tok::Ge, "`>=`")?;
                let k = match self.next() {
                    Some(Tok::Num(k)) => k,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected a threshold");
                    }
                };
                self.prefix(format!("<{}>>={}", a, k), col)
            }
            Some(Tok::LParen) => {
                let lhs = self.expr()?;
                let op_col = self.col();
                let token = match self.next() {
                    Some(Tok::Sym(s)) | Some(Tok::Ident(s)) => s,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected a binary operator");
                    }
                };
                let rhs = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Ast {
                    form: Form::Infix,
                    token,
                    children: vec![lhs, rhs],
                    col: op_col,
                })
            }
            Some(Tok::Ident(name)) => {
                let quantifier = self.peek() == Some(&Tok::LParen)
                    && self.has_notation(|n| matches!(n, Notation::QuantifiedUntil(q) if *q == name));
                if quantifier {
                    self.pos += 1;
                    let lhs = self.expr()?;
                    match self.next() {
                        Some(Tok::Ident(u)) if u == "U" => {}
                        _ => {
                            self.pos -= 1;
                            return self.err("expected `U`");
                        }
                    }
                    let rhs = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Ast {
                        form: Form::Quantified,
                        token: name,
                        children: vec![lhs, rhs],
                        col,
                    });
                }
                if self.has_notation(|n| matches!(n, Notation::Prefix(t) if *t == name)) {
                    return self.prefix(name, col);
                }
                Ok(Ast {
                    form: Form::Atom,
                    token: name,
                    children: vec![],
                    col,
                })
            }
            Some(_) => {
                self.pos -= 1;
                self.err("unexpected token")
            }
            None => self.err("unexpected end of formula"),
        }
    }
}

fn matches_form(n: &Notation, form: &Form, token: &str) -> bool {
    match (n, form) {
        (Notation::Atom(t), Form::Atom)
        | (Notation::Prefix(t), Form::Prefix)
        | (Notation::Infix(t), Form::Infix)
        | (Notation::QuantifiedUntil(t), Form::Quantified)
        | (Notation::Postfix(t), Form::Postfix) => t == token,
        _ => false,
    }
}

fn elaborate(dag: &mut FormulaDag, ast: &Ast) -> Result<FormulaId, ParseError> {
    let mut kids = Vec::with_capacity(ast.children.len());
    for c in &ast.children {
        kids.push(elaborate(dag, c)?);
    }
    let sig = dag.shared_signature();
    let candidates: Vec<OpId> = sig
        .op_ids()
        .filter(|o| {
            let d = sig.op(*o);
            d.arity() == kids.len() && matches_form(&d.notation, &ast.form, &ast.token)
        })
        .collect();
    if candidates.is_empty() {
        let msg = match ast.form {
            Form::Atom => format!("unknown atom `{}`", ast.token),
            _ => format!("unknown operator `{}`", ast.token),
        };
        return Err(ParseError::Syntax { col: ast.col, msg });
    }
    let coercions: Vec<OpId> = sig
        .op_ids()
        .filter(|o| sig.op(*o).notation == Notation::Coercion && sig.op(*o).arity() == 1)
        .collect();
    let types: Vec<_> = kids.iter().map(|k| dag.type_of(*k).expect("fresh id")).collect();

    // Exact typing first, then with one coercion per argument.
    for &op in &candidates {
        let d = sig.op(op);
        if types.iter().zip(&d.arg_types).all(|(t, set)| set.contains(*t)) {
            return dag
                .intern_op(op, &kids)
                .map_err(|error| ParseError::Type { col: ast.col, error });
        }
    }
    for &op in &candidates {
        let d = sig.op(op);
        let mut args = Vec::with_capacity(kids.len());
        for (k, (t, set)) in kids.iter().zip(types.iter().zip(&d.arg_types)) {
            if set.contains(*t) {
                args.push(Some(*k));
            } else {
                let c = coercions.iter().find(|c| {
                    let cd = sig.op(**c);
                    cd.arg_types[0].contains(*t) && set.contains(cd.result_type)
                });
                args.push(c.map(|c| dag.intern_op(*c, &[*k]).expect("coercion typed")));
            }
        }
        if args.iter().all(Option::is_some) {
            let args: Vec<FormulaId> = args.into_iter().flatten().collect();
            return dag
                .intern_op(op, &args)
                .map_err(|error| ParseError::Type { col: ast.col, error });
        }
    }
    let d = sig.op(candidates[0]);
    let bad = types
        .iter()
        .zip(&d.arg_types)
        .position(|(t, set)| !set.contains(*t))
        .unwrap_or(0);
    Err(ParseError::Type {
        col: ast.col,
        error: DagError::TypeMismatch {
            op: d.name.clone(),
            arg: bad,
            found: sig.type_name(types[bad]).to_string(),
        },
    })
}

/// Parses `text` against the DAG's signature and interns the result.
pub fn parse(dag: &mut FormulaDag, text: &str) -> Result<FormulaId, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        end_col: text.chars().count() + 1,
        toks,
        pos: 0,
        dag,
    };
    let ast = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    elaborate(dag, &ast)
}
