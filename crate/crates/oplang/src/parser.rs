use crate::ast::{BinOp, Expr, Stmt, UnOp};
use crate::lexer::{tokenize, Tok};
use crate::{CompileError, Pos};

pub(crate) fn parse(src: &str) -> Result<Vec<Stmt>, CompileError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0 };
    let mut body = Vec::new();
    while p.peek() != &Tok::Eof {
        body.push(p.stmt()?);
    }
    Ok(body)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, CompileError> {
        let pos = self.pos();
        Err(CompileError::Parse {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), CompileError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), CompileError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok((name, pos))
            }
            t => self.error(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, CompileError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut body = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.error("unclosed block, expected `}`");
            }
            body.push(self.stmt()?);
        }
        self.bump();
        Ok(body)
    }

    fn stmt(&mut self) -> Result<Stmt, CompileError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Let => {
                self.bump();
                let (name, npos) = self.ident()?;
                self.expect(Tok::Assign, "`=`")?;
                let value = self.expr()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Let(name, npos, value))
            }
            Tok::If => self.if_stmt(),
            Tok::While => {
                self.bump();
                let cond = self.expr()?;
                let body = self.block()?;
                Ok(Stmt::While(cond, body))
            }
            Tok::For => {
                self.bump();
                let (name, npos) = self.ident()?;
                self.expect(Tok::In, "`in`")?;
                let lo = self.expr()?;
                self.expect(Tok::DotDot, "`..`")?;
                let hi = self.expr()?;
                let body = self.block()?;
                Ok(Stmt::For(name, npos, lo, hi, body))
            }
            Tok::Break => {
                self.bump();
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Break(pos))
            }
            Tok::Continue => {
                self.bump();
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Continue(pos))
            }
            Tok::Return => {
                self.bump();
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Return)
            }
            _ => {
                let e = self.expr()?;
                if *self.peek() == Tok::Assign {
                    self.bump();
                    let Some(place) = e.into_place() else {
                        return Err(CompileError::Parse {
                            line: pos.line,
                            col: pos.col,
                            message: "invalid assignment target".into(),
                        });
                    };
                    let value = self.expr()?;
                    self.expect(Tok::Semi, "`;`")?;
                    Ok(Stmt::Assign(place, value))
                } else {
                    self.expect(Tok::Semi, "`;`")?;
                    Ok(Stmt::Expr(e))
                }
            }
        }
    }

    fn if_stmt(&mut self) -> Result<Stmt, CompileError> {
        self.expect(Tok::If, "`if`")?;
        let cond = self.expr()?;
        let then = self.block()?;
        let otherwise = if *self.peek() == Tok::Else {
            self.bump();
            if *self.peek() == Tok::If {
                vec![self.if_stmt()?]
            } else {
                self.block()?
            }
        } else {
            Vec::new()
        };
        Ok(Stmt::If(cond, then, otherwise))
    }

    fn expr(&mut self) -> Result<Expr, CompileError> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> Result<Expr, CompileError> {
        const LEVELS: [&[(Tok, BinOp)]; 6] = [
            &[(Tok::OrOr, BinOp::Or)],
            &[(Tok::AndAnd, BinOp::And)],
            &[(Tok::Eq, BinOp::Eq), (Tok::Ne, BinOp::Ne)],
            &[
                (Tok::Lt, BinOp::Lt),
                (Tok::Le, BinOp::Le),
                (Tok::Gt, BinOp::Gt),
                (Tok::Ge, BinOp::Ge),
            ],
            &[(Tok::Plus, BinOp::Add), (Tok::Minus, BinOp::Sub)],
            &[
                (Tok::Star, BinOp::Mul),
                (Tok::Slash, BinOp::Div),
                (Tok::Percent, BinOp::Rem),
            ],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let Some(&(_, op)) = LEVELS[level].iter().find(|(t, _)| t == self.peek()) else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, CompileError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)))
            }
            Tok::Bang => {
                self.bump();
                Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Expr, CompileError> {
        let mut e = self.primary()?;
        while *self.peek() == Tok::LBracket {
            self.bump();
            let idx = self.expr()?;
            self.expect(Tok::RBracket, "`]`")?;
            e = Expr::Index(Box::new(e), Box::new(idx));
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, CompileError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => Ok(Expr::Int(v)),
            Tok::Float(v) => Ok(Expr::Float(v)),
            Tok::True => Ok(Expr::Bool(true)),
            Tok::False => Ok(Expr::Bool(false)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.list_items(Tok::RParen, "`)`")?;
                    Ok(Expr::Call(name, args, pos))
                } else {
                    Ok(Expr::Var(name, pos))
                }
            }
            Tok::LBracket => Ok(Expr::List(self.list_items(Tok::RBracket, "`]`")?)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            t => Err(CompileError::Parse {
                line: pos.line,
                col: pos.col,
                message: format!("expected expression, found {}", describe(&t)),
            }),
        }
    }

    fn list_items(&mut self, close: Tok, what: &str) -> Result<Vec<Expr>, CompileError> {
        let mut items = Vec::new();
        if *self.peek() == close {
            self.bump();
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if *self.peek() == Tok::Comma {
                self.bump();
                if *self.peek() == close {
                    self.bump();
                    return Ok(items);
                }
            } else {
                self.expect(close, what)?;
                return Ok(items);
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("`{v}`"),
        Tok::Float(v) => format!("`{v}`"),
        Tok::Ident(name) => format!("`{name}`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}").to_lowercase(),
    }
}
