//! Lexer, recursive-descent parser and canonical printer for expressions.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = [ "-" ] integer | "(" [ "-" ] integer ")" ;
//! atom     = number | name | func "(" expr ")" | "(" expr ")" ;
//! ```
//!
//! A minus sign directly in front of a number literal is folded into the
//! constant, so `-2*u` parses as `Mul(Const(-2), Var(u))`.

use std::collections::BTreeMap;
use std::fmt;

use super::{BinaryOp, Node, ParseError, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "a number".into(),
                    found: format!("`{text}`"),
                })?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: "an operator, number or name".into(),
                    found: format!("`{ch}`"),
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    bindings: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            expected: expected.into(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(expected)
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() != Tok::Minus {
            return self.power();
        }
        self.bump();
        if let Tok::Num(v) = *self.peek() {
            // `-2^2` is still -(2^2)
            if self.toks[self.pos + 1].1 != Tok::Caret {
                self.bump();
                return Ok(Node::Const(-v));
            }
        }
        Ok(Node::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = if *self.peek() == Tok::LParen {
            self.bump();
            let e = self.integer()?;
            self.expect(Tok::RParen, "`)`")?;
            e
        } else {
            self.integer()?
        };
        Ok(Node::Pow(Box::new(base), exp))
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let offset = self.offset();
        match *self.peek() {
            Tok::Num(v) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                self.bump();
                let n = v as i32;
                Ok(if negative { -n } else { n })
            }
            Tok::Num(v) => Err(ParseError::Syntax {
                offset,
                expected: "an integer exponent".into(),
                found: format!("number {v}"),
            }),
            _ => self.fail("an integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Node::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(op) = UnaryOp::from_name(&name) {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Node::Unary(op, Box::new(arg)));
                }
                resolve(&name, self.bindings).ok_or(ParseError::UnknownIdentifier { offset, name })
            }
            _ => self.fail("a number, name or `(`"),
        }
    }
}

fn resolve(name: &str, bindings: &BTreeMap<String, f64>) -> Option<Node> {
    if name == "u" {
        return Some(Node::Var(Var::U));
    }
    if let Some(digits) = name.strip_prefix('x') {
        if !digits.is_empty()
            && !digits.starts_with('0')
            && digits.bytes().all(|b| b.is_ascii_digit())
        {
            return digits.parse().ok().map(|k| Node::Var(Var::X(k)));
        }
    }
    if let Some(&v) = bindings.get(name) {
        return Some(Node::Const(v));
    }
    (name == "pi").then_some(Node::Const(std::f64::consts::PI))
}

pub(super) fn parse(src: &str, bindings: &BTreeMap<String, f64>) -> Result<Node, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        bindings,
    };
    let node = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("an operator or end of input");
    }
    Ok(node)
}

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
        Node::Unary(UnaryOp::Neg, _) => 3,
        Node::Const(c) if c.is_sign_negative() => 3,
        Node::Pow(..) => 4,
        _ => 5,
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    // Display is the shortest representation that reads back to the same bits.
    write!(f, "{c}")
}

fn write_child(f: &mut fmt::Formatter<'_>, node: &Node, parens: bool) -> fmt::Result {
    if parens {
        f.write_str("(")?;
        write_node(f, node)?;
        f.write_str(")")
    } else {
        write_node(f, node)
    }
}

pub(super) fn write_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    match node {
        Node::Const(c) => write_const(f, *c),
        Node::Var(Var::U) => f.write_str("u"),
        Node::Var(Var::X(k)) => write!(f, "x{k}"),
        Node::Unary(UnaryOp::Neg, arg) => {
            f.write_str("-")?;
            let literal = matches!(**arg, Node::Const(c) if !c.is_sign_negative());
            write_child(f, arg, literal || precedence(arg) < 3)
        }
        Node::Unary(op, arg) => {
            write!(f, "{}(", op.name())?;
            write_node(f, arg)?;
            f.write_str(")")
        }
        Node::Binary(op, lhs, rhs) => {
            let p = precedence(node);
            write_child(f, lhs, precedence(lhs) < p)?;
            f.write_str(match op {
                BinaryOp::Add => " + ",
                BinaryOp::Sub => " - ",
                BinaryOp::Mul => "*",
                BinaryOp::Div => "/",
            })?;
            write_child(f, rhs, precedence(rhs) <= p)
        }
        Node::Pow(base, n) => {
            write_child(f, base, precedence(base) < 5)?;
            if *n < 0 {
                write!(f, "^({n})")
            } else {
                write!(f, "^{n}")
            }
        }
    }
}
