//! Resolved, name-free program form.
//!
//! Variables become slot numbers assigned in binding order, so any two
//! programs that differ only in identifier names, whitespace or comments
//! normalize to the same tree. The interpreter runs this form directly.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::ast::{self, BinOp, UnOp};
use crate::{Builtin, CompileError, Pos};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Float(f64),
    Bool(bool),
    Var(usize),
    List(Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Builtin, Vec<Expr>),
    /// `push(place, value)`; the first argument is written in place.
    Push(Place, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Place {
    pub slot: usize,
    pub indices: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Let(usize, Expr),
    Assign(Place, Expr),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    For(usize, Expr, Expr, Vec<Stmt>),
    Break,
    Continue,
    Return,
    Expr(Expr),
}

pub(crate) struct Resolved {
    pub body: Vec<Stmt>,
    pub num_slots: usize,
}

pub(crate) fn resolve(body: &[ast::Stmt]) -> Result<Resolved, CompileError> {
    let mut r = Resolver {
        scopes: vec![HashMap::new()],
        next_slot: 0,
        loop_depth: 0,
    };
    let body = r.block(body)?;
    Ok(Resolved {
        body,
        num_slots: r.next_slot,
    })
}

struct Resolver {
    scopes: Vec<HashMap<String, usize>>,
    next_slot: usize,
    loop_depth: usize,
}

fn static_error(pos: Pos, message: String) -> CompileError {
    CompileError::StaticCheck {
        line: pos.line,
        col: pos.col,
        message,
    }
}

impl Resolver {
    fn bind(&mut self, name: &str) -> usize {
        let slot = self.next_slot;
        self.next_slot += 1;
        self.scopes
            .last_mut()
            .expect("global scope")
            .insert(name.to_owned(), slot);
        slot
    }

    fn lookup(&self, name: &str, pos: Pos) -> Result<usize, CompileError> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name).copied())
            .ok_or_else(|| static_error(pos, format!("undefined name `{name}`")))
    }

    fn block(&mut self, body: &[ast::Stmt]) -> Result<Vec<Stmt>, CompileError> {
        self.scopes.push(HashMap::new());
        let out = body.iter().map(|s| self.stmt(s)).collect();
        self.scopes.pop();
        out
    }

    fn loop_body(&mut self, body: &[ast::Stmt]) -> Result<Vec<Stmt>, CompileError> {
        self.loop_depth += 1;
        let out = self.block(body);
        self.loop_depth -= 1;
        out
    }

    fn stmt(&mut self, s: &ast::Stmt) -> Result<Stmt, CompileError> {
        Ok(match s {
            ast::Stmt::Let(name, _, value) => {
                // the initializer cannot see the name it defines
                let value = self.expr(value)?;
                Stmt::Let(self.bind(name), value)
            }
            ast::Stmt::Assign(place, value) => {
                let value = self.expr(value)?;
                Stmt::Assign(self.place(place)?, value)
            }
            ast::Stmt::If(cond, then, otherwise) => {
                Stmt::If(self.expr(cond)?, self.block(then)?, self.block(otherwise)?)
            }
            ast::Stmt::While(cond, body) => Stmt::While(self.expr(cond)?, self.loop_body(body)?),
            ast::Stmt::For(name, _, lo, hi, body) => {
                let lo = self.expr(lo)?;
                let hi = self.expr(hi)?;
                self.scopes.push(HashMap::new());
                let slot = self.bind(name);
                let body = self.loop_body(body);
                self.scopes.pop();
                Stmt::For(slot, lo, hi, body?)
            }
            ast::Stmt::Break(pos) | ast::Stmt::Continue(pos) if self.loop_depth == 0 => {
                return Err(static_error(*pos, "`break` or `continue` outside a loop".into()));
            }
            ast::Stmt::Break(_) => Stmt::Break,
            ast::Stmt::Continue(_) => Stmt::Continue,
            ast::Stmt::Return => Stmt::Return,
            ast::Stmt::Expr(e) => Stmt::Expr(self.expr(e)?),
        })
    }

    fn place(&mut self, place: &ast::Place) -> Result<Place, CompileError> {
        Ok(Place {
            slot: self.lookup(&place.name, place.pos)?,
            indices: place
                .indices
                .iter()
                .map(|e| self.expr(e))
                .collect::<Result<_, _>>()?,
        })
    }

    fn expr(&mut self, e: &ast::Expr) -> Result<Expr, CompileError> {
        Ok(match e {
            ast::Expr::Int(v) => Expr::Int(*v),
            ast::Expr::Float(v) => Expr::Float(*v),
            ast::Expr::Bool(v) => Expr::Bool(*v),
            ast::Expr::Var(name, pos) => Expr::Var(self.lookup(name, *pos)?),
            ast::Expr::List(items) => Expr::List(
                items
                    .iter()
                    .map(|e| self.expr(e))
                    .collect::<Result<_, _>>()?,
            ),
            ast::Expr::Index(base, idx) => {
                Expr::Index(Box::new(self.expr(base)?), Box::new(self.expr(idx)?))
            }
            ast::Expr::Unary(op, operand) => Expr::Unary(*op, Box::new(self.expr(operand)?)),
            ast::Expr::Binary(op, lhs, rhs) => {
                Expr::Binary(*op, Box::new(self.expr(lhs)?), Box::new(self.expr(rhs)?))
            }
            ast::Expr::Call(name, args, pos) => {
                let (builtin, arity) = Builtin::lookup(name)
                    .ok_or_else(|| static_error(*pos, format!("unknown builtin `{name}`")))?;
                if args.len() != arity {
                    return Err(static_error(
                        *pos,
                        format!("`{name}` takes {arity} argument(s), got {}", args.len()),
                    ));
                }
                if builtin == Builtin::Push {
                    let Some(place) = args[0].clone().into_place() else {
                        return Err(static_error(
                            *pos,
                            "first argument of `push` must be a variable or an indexed variable"
                                .into(),
                        ));
                    };
                    let value = self.expr(&args[1])?;
                    Expr::Push(self.place(&place)?, Box::new(value))
                } else {
                    Expr::Call(
                        builtin,
                        args.iter()
                            .map(|e| self.expr(e))
                            .collect::<Result<_, _>>()?,
                    )
                }
            }
        })
    }
}

/// Truncated subtree digest used for fingerprints and shingles.
pub type NodeHash = [u8; 16];

/// Merkle hashing: a node's digest covers its tag, its payload and the
/// digests of its children. Every node's digest is collected into `shingles`.
pub(crate) struct Hasher<'s> {
    pub shingles: &'s mut Vec<NodeHash>,
}

impl Hasher<'_> {
    fn finish(&mut self, h: Sha256) -> NodeHash {
        let digest = h.finalize();
        let mut out = [0u8; 16];
        out.copy_from_slice(&digest[..16]);
        self.shingles.push(out);
        out
    }

    fn node(tag: &str) -> Sha256 {
        let mut h = Sha256::new();
        h.update((tag.len() as u32).to_le_bytes());
        h.update(tag.as_bytes());
        h
    }

    pub fn block(&mut self, body: &[Stmt]) -> NodeHash {
        let children: Vec<NodeHash> = body.iter().map(|s| self.stmt(s)).collect();
        let mut h = Self::node("block");
        h.update((children.len() as u64).to_le_bytes());
        for c in children {
            h.update(c);
        }
        self.finish(h)
    }

    fn place(&mut self, place: &Place) -> NodeHash {
        let children: Vec<NodeHash> = place.indices.iter().map(|e| self.expr(e)).collect();
        let mut h = Self::node("place");
        h.update((place.slot as u64).to_le_bytes());
        h.update((children.len() as u64).to_le_bytes());
        for c in children {
            h.update(c);
        }
        self.finish(h)
    }

    fn stmt(&mut self, s: &Stmt) -> NodeHash {
        let (tag, children, slot): (&str, Vec<NodeHash>, Option<usize>) = match s {
            Stmt::Let(slot, e) => ("let", vec![self.expr(e)], Some(*slot)),
            Stmt::Assign(p, e) => ("assign", vec![self.place(p), self.expr(e)], None),
            Stmt::If(c, t, o) => ("if", vec![self.expr(c), self.block(t), self.block(o)], None),
            Stmt::While(c, b) => ("while", vec![self.expr(c), self.block(b)], None),
            Stmt::For(slot, lo, hi, b) => (
                "for",
                vec![self.expr(lo), self.expr(hi), self.block(b)],
                Some(*slot),
            ),
            Stmt::Break => ("break", vec![], None),
            Stmt::Continue => ("continue", vec![], None),
            Stmt::Return => ("return", vec![], None),
            Stmt::Expr(e) => ("expr", vec![self.expr(e)], None),
        };
        let mut h = Self::node(tag);
        if let Some(slot) = slot {
            h.update((slot as u64).to_le_bytes());
        }
        for c in children {
            h.update(c);
        }
        self.finish(h)
    }

    fn expr(&mut self, e: &Expr) -> NodeHash {
        let mut h;
        match e {
            Expr::Int(v) => {
                h = Self::node("int");
                h.update(v.to_le_bytes());
            }
            Expr::Float(v) => {
                h = Self::node("float");
                h.update(v.to_bits().to_le_bytes());
            }
            Expr::Bool(v) => {
                h = Self::node("bool");
                h.update([u8::from(*v)]);
            }
            Expr::Var(slot) => {
                h = Self::node("var");
                h.update((*slot as u64).to_le_bytes());
            }
            Expr::List(items) => {
                let children: Vec<NodeHash> = items.iter().map(|e| self.expr(e)).collect();
                h = Self::node("list");
                h.update((children.len() as u64).to_le_bytes());
                for c in children {
                    h.update(c);
                }
            }
            Expr::Index(base, idx) => {
                let (b, i) = (self.expr(base), self.expr(idx));
                h = Self::node("index");
                h.update(b);
                h.update(i);
            }
            Expr::Unary(op, operand) => {
                let c = self.expr(operand);
                h = Self::node(&format!("unary:{op:?}"));
                h.update(c);
            }
            Expr::Binary(op, lhs, rhs) => {
                let (l, r) = (self.expr(lhs), self.expr(rhs));
                h = Self::node(&format!("binary:{op:?}"));
                h.update(l);
                h.update(r);
            }
            Expr::Call(b, args) => {
                let children: Vec<NodeHash> = args.iter().map(|e| self.expr(e)).collect();
                h = Self::node(&format!("call:{}", b.name()));
                for c in children {
                    h.update(c);
                }
            }
            Expr::Push(place, value) => {
                let (p, v) = (self.place(place), self.expr(value));
                h = Self::node("call:push");
                h.update(p);
                h.update(v);
            }
        }
        self.finish(h)
    }
}
