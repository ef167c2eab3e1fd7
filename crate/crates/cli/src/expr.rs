//! Arithmetic expressions over `x1 … xn`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' index | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//! Functions: `min`, `max` (two or more arguments), `sqrt`, `exp`, `log`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Zero-based variable position.
    Var(usize),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Func {
    Min,
    Max,
    Sqrt,
    Exp,
    Log,
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
            Expr::Call(f, args) => match f {
                Func::Min => args.iter().map(|e| e.eval(x)).fold(f64::INFINITY, f64::min),
                Func::Max => args
                    .iter()
                    .map(|e| e.eval(x))
                    .fold(f64::NEG_INFINITY, f64::max),
                Func::Sqrt => args[0].eval(x).sqrt(),
                Func::Exp => args[0].eval(x).exp(),
                Func::Log => args[0].eval(x).ln(),
            },
        }
    }

    /// Bit mask of the variables that occur.
    pub fn variables(&self) -> u64 {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => 1 << i,
            Expr::Neg(e) => e.variables(),
            Expr::Bin(_, a, b) => a.variables() | b.variables(),
            Expr::Call(_, args) => args.iter().fold(0, |acc, e| acc | e.variables()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    n: usize,
}

pub fn parse(src: &str, n: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { src, pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if f(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut text = self
                    .take_while(|c| c.is_ascii_digit() || c == '.')
                    .to_string();
                if matches!(self.peek(), Some('e' | 'E')) {
                    let save = self.pos;
                    self.pos += 1;
                    let sign = if matches!(self.peek(), Some('+' | '-')) {
                        let s = self.peek().unwrap();
                        self.pos += 1;
                        s.to_string()
                    } else {
                        String::new()
                    };
                    let digits = self.take_while(|c| c.is_ascii_digit()).to_string();
                    if digits.is_empty() {
                        self.pos = save;
                    } else {
                        text = format!("{text}e{sign}{digits}");
                    }
                }
                text.parse::<f64>().map(Expr::Num).map_err(|_| ParseError {
                    offset: start,
                    message: format!("malformed number '{text}'"),
                })
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self
                    .take_while(|c| c.is_ascii_alphanumeric() || c == '_')
                    .to_string();
                if let Some(index) = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                {
                    let i: usize = index.parse().map_err(|_| ParseError {
                        offset: start,
                        message: format!("bad variable '{name}'"),
                    })?;
                    if i == 0 || i > self.n {
                        return Err(ParseError {
                            offset: start,
                            message: format!("variable '{name}' is not among x1..x{}", self.n),
                        });
                    }
                    return Ok(Expr::Var(i - 1));
                }
                let func = match name.as_str() {
                    "min" => Func::Min,
                    "max" => Func::Max,
                    "sqrt" => Func::Sqrt,
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            message: format!("unknown name '{name}'"),
                        })
                    }
                };
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                let arity_ok = match func {
                    Func::Min | Func::Max => args.len() >= 2,
                    _ => args.len() == 1,
                };
                if !arity_ok {
                    return Err(ParseError {
                        offset: start,
                        message: format!("'{name}' called with {} argument(s)", args.len()),
                    });
                }
                Ok(Expr::Call(func, args))
            }
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
        }
    }
}
