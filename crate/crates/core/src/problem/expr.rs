//! A small formula language for exponent and coefficient fields.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := NUMBER | VAR | "pi" | FUNC "(" expr ")" | "(" expr ")"
//! VAR     := "x1" | "x2" | "y1" | "y2"
//! FUNC    := "exp" | "abs" | "sqrt" | "ln" | "sin" | "cos"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x1^2`
//! is `-(x1^2)`.

use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    X(usize),
    Y(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Abs,
    Sqrt,
    Ln,
    Sin,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Abs => v.abs(),
            Func::Sqrt => v.sqrt(),
            Func::Ln => v.ln(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
        }
    }
}

/// A parsed formula over the coordinates `x1..xn` and `y1..yn`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

impl Expr {
    /// Parses `source`; errors carry a 1-based column within the formula.
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser { src: source.as_bytes(), pos: 0 };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr { root, source: source.to_string() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        eval(&self.root, x, y)
    }

    /// Largest coordinate index referenced (1-based), 0 when none.
    pub fn max_coordinate(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::X(k) | Node::Y(k) => k + 1,
                Node::Const(_) => 0,
                Node::Neg(a) | Node::Call(_, a) => walk(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => walk(a).max(walk(b)),
            }
        }
        walk(&self.root)
    }

    /// True when the formula references any `y` coordinate.
    pub fn uses_y(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Y(_) => true,
                Node::X(_) | Node::Const(_) => false,
                Node::Neg(a) | Node::Call(_, a) => walk(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => walk(a) || walk(b),
            }
        }
        walk(&self.root)
    }

    /// The value when the formula has no coordinate dependence.
    pub fn as_constant(&self) -> Option<f64> {
        if self.max_coordinate() == 0 {
            Some(eval(&self.root, &[0.0; 2], &[0.0; 2]))
        } else {
            None
        }
    }
}

fn eval(n: &Node, x: &Point, y: &Point) -> f64 {
    match n {
        Node::Const(c) => *c,
        Node::X(k) => x[*k],
        Node::Y(k) => y[*k],
        Node::Neg(a) => -eval(a, x, y),
        Node::Add(a, b) => eval(a, x, y) + eval(b, x, y),
        Node::Sub(a, b) => eval(a, x, y) - eval(b, x, y),
        Node::Mul(a, b) => eval(a, x, y) * eval(b, x, y),
        Node::Div(a, b) => eval(a, x, y) / eval(b, x, y),
        Node::Pow(a, b) => eval(a, x, y).powf(eval(b, x, y)),
        Node::Call(f, a) => f.apply(eval(a, x, y)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { line: 1, column: self.pos + 1, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error("unexpected end of formula")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>().map(Node::Const).map_err(|_| {
            self.pos = start;
            self.error("malformed number")
        })
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match name {
            "pi" => return Ok(Node::Const(std::f64::consts::PI)),
            "x1" => return Ok(Node::X(0)),
            "x2" => return Ok(Node::X(1)),
            "y1" => return Ok(Node::Y(0)),
            "y2" => return Ok(Node::Y(1)),
            _ => {}
        }
        if let Some(func) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(self.error("expected `(` after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(Node::Call(func, Box::new(arg)));
        }
        self.pos = start;
        Err(self.error(&format!("unknown identifier `{name}`")))
    }
}
