//! Surface syntax tree as written, names and positions included.

use crate::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Float(f64),
    Bool(bool),
    Var(String, Pos),
    List(Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>, Pos),
}

/// Assignment target: a variable followed by zero or more indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Place {
    pub name: String,
    pub pos: Pos,
    pub indices: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Let(String, Pos, Expr),
    Assign(Place, Expr),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    For(String, Pos, Expr, Expr, Vec<Stmt>),
    Break(Pos),
    Continue(Pos),
    Return,
    Expr(Expr),
}

impl Expr {
    /// Reinterprets an expression as an assignment target, if it is one.
    pub fn into_place(self) -> Option<Place> {
        match self {
            Expr::Var(name, pos) => Some(Place {
                name,
                pos,
                indices: Vec::new(),
            }),
            Expr::Index(base, idx) => {
                let mut place = base.into_place()?;
                place.indices.push(*idx);
                Some(place)
            }
            _ => None,
        }
    }
}
