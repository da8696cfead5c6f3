//! Small arithmetic expression grammar for coefficient functions.
//!
//! Supports identifiers `x`, `y`, the constant `pi`, numeric literals, the
//! operators `+ - * / ^`, the functions `abs`, `exp`, `sin`, `cos`, `sqrt`,
//! and piecewise definitions via `if(cond, a, b)` where `cond` compares two
//! subexpressions with `< <= > >= == !=`. The full EBNF lives in
//! `docs/expressions.md`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    If {
        lhs: Box<Expr>,
        cmp: Cmp,
        rhs: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Expr {
    /// Parse an expression from source text.
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, src };
        let e = p.expr()?;
        match p.peek() {
            Token::End => Ok(e),
            _ => Err(p.error_here("expected end of expression")),
        }
    }

    /// Evaluate at a point; `y` is ignored by one-dimensional expressions.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Unary(UnaryOp::Neg, e) => -e.eval(x, y),
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(x, y), r.eval(x, y));
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => a / b,
                    BinaryOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(x, y);
                match f {
                    Func::Abs => v.abs(),
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sqrt => v.sqrt(),
                }
            }
            Expr::If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => {
                let (a, b) = (lhs.eval(x, y), rhs.eval(x, y));
                let cond = match cmp {
                    Cmp::Lt => a < b,
                    Cmp::Le => a <= b,
                    Cmp::Gt => a > b,
                    Cmp::Ge => a >= b,
                    Cmp::Eq => a == b,
                    Cmp::Ne => a != b,
                };
                if cond {
                    then.eval(x, y)
                } else {
                    otherwise.eval(x, y)
                }
            }
        }
    }

    /// True if the expression references the second coordinate.
    pub fn uses_y(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => *v == Var::Y,
            Expr::Unary(_, e) | Expr::Call(_, e) => e.uses_y(),
            Expr::Binary(_, l, r) => l.uses_y() || r.uses_y(),
            Expr::If {
                lhs,
                rhs,
                then,
                otherwise,
                ..
            } => lhs.uses_y() || rhs.uses_y() || then.uses_y() || otherwise.uses_y(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Cmp(Cmp),
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("{v}"),
            Token::Ident(s) => s.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::Comma => ",".into(),
            Token::Cmp(c) => match c {
                Cmp::Lt => "<".into(),
                Cmp::Le => "<=".into(),
                Cmp::Gt => ">".into(),
                Cmp::Ge => ">=".into(),
                Cmp::Eq => "==".into(),
                Cmp::Ne => "!=".into(),
            },
            Token::End => "<end>".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Token::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Token::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Token::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Token::Slash, i));
                i += 1;
            }
            '^' => {
                out.push((Token::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            ',' => {
                out.push((Token::Comma, i));
                i += 1;
            }
            '<' | '>' | '=' | '!' => {
                let two = i + 1 < bytes.len() && bytes[i + 1] == b'=';
                let tok = match (c, two) {
                    ('<', true) => Token::Cmp(Cmp::Le),
                    ('<', false) => Token::Cmp(Cmp::Lt),
                    ('>', true) => Token::Cmp(Cmp::Ge),
                    ('>', false) => Token::Cmp(Cmp::Gt),
                    ('=', true) => Token::Cmp(Cmp::Eq),
                    ('!', true) => Token::Cmp(Cmp::Ne),
                    _ => {
                        return Err(Error::ExprParse {
                            token: c.to_string(),
                            offset: i,
                            message: "expected comparison operator".into(),
                        })
                    }
                };
                out.push((tok, i));
                i += if two { 2 } else { 1 };
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'e'
                        || bytes[i] == b'E'
                        || ((bytes[i] == b'+' || bytes[i] == b'-')
                            && i > start
                            && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E')))
                {
                    i += 1;
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::ExprParse {
                    token: text.to_string(),
                    offset: start,
                    message: "invalid numeric literal".into(),
                })?;
                out.push((Token::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Token::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::ExprParse {
                    token: c.to_string(),
                    offset: i,
                    message: "unexpected character".into(),
                })
            }
        }
    }
    out.push((Token::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: &str) -> Error {
        let (tok, offset) = &self.tokens[self.pos];
        Error::ExprParse {
            token: tok.describe(),
            offset: *offset,
            message: format!("{message} in '{}'", self.src),
        }
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error_here(what))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // Exponentiation is right-associative and binds tighter than unary minus
    // on its left operand, as usual: -x^2 parses as -(x^2).
    fn factor(&mut self) -> Result<Expr> {
        if let Token::Minus = self.peek() {
            self.advance();
            let inner = self.factor()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        let base = self.primary()?;
        if let Token::Caret = self.peek() {
            self.advance();
            let exponent = self.factor()?;
            return Ok(Expr::Binary(
                BinaryOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.advance() {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen, "expected ')'")?;
                Ok(e)
            }
            Token::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "y" => Ok(Expr::Var(Var::Y)),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "abs" | "exp" | "sin" | "cos" | "sqrt" => {
                    let f = match name.as_str() {
                        "abs" => Func::Abs,
                        "exp" => Func::Exp,
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        _ => Func::Sqrt,
                    };
                    self.expect(Token::LParen, "expected '(' after function name")?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "expected ')'")?;
                    Ok(Expr::Call(f, Box::new(arg)))
                }
                "if" => {
                    self.expect(Token::LParen, "expected '(' after if")?;
                    let lhs = self.expr()?;
                    let cmp = match self.advance() {
                        Token::Cmp(c) => c,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error_here("expected comparison in if condition"));
                        }
                    };
                    let rhs = self.expr()?;
                    self.expect(Token::Comma, "expected ',' after if condition")?;
                    let then = self.expr()?;
                    self.expect(Token::Comma, "expected ',' after if branch")?;
                    let otherwise = self.expr()?;
                    self.expect(Token::RParen, "expected ')'")?;
                    Ok(Expr::If {
                        lhs: Box::new(lhs),
                        cmp,
                        rhs: Box::new(rhs),
                        then: Box::new(then),
                        otherwise: Box::new(otherwise),
                    })
                }
                _ => {
                    self.pos -= 1;
                    Err(self.error_here("unknown identifier"))
                }
            },
            _ => {
                self.pos -= 1;
                Err(self.error_here("expected number, identifier or '('"))
            }
        }
    }
}
