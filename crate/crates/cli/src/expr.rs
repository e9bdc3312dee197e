//! Arithmetic expressions over the coordinates `x1, ..., xd`, used for
//! `density:<expr>` weights.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numbers, the constants
//! `pi` and `e`, and the functions `exp log sqrt abs sin cos tan`. `^` binds
//! tightest and is right associative, so `-x1^2` is `-(x1^2)`.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Tan,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at character {}: {}", self.position + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { position, message: message.into() })
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when digits follow
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            match text.parse::<f64>() {
                Ok(v) => out.push((start, Token::Num(v))),
                Err(_) => return err(start, format!("bad number {text:?}")),
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return err(i, format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                '+'
            } else if self.eat('-') {
                '-'
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                '*'
            } else if self.eat('/') {
                '/'
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Node::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let at = self.here();
        let Some(tok) = self.peek().cloned() else {
            return err(at, "unexpected end of expression");
        };
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Node::Num(v)),
            Token::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return err(self.here(), "expected ')'");
                }
                Ok(inner)
            }
            Token::Op(c) => err(at, format!("unexpected {c:?}")),
            Token::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if !self.eat('(') {
                        return err(self.here(), format!("expected '(' after {name}"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return err(self.here(), "expected ')'");
                    }
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "e" => return Ok(Node::Num(std::f64::consts::E)),
                    _ => {}
                }
                match name.strip_prefix('x').and_then(|n| n.parse::<usize>().ok()) {
                    Some(i) if (1..=self.dim).contains(&i) => Ok(Node::Var(i - 1)),
                    Some(i) => err(at, format!("x{i} is out of range for dimension {}", self.dim)),
                    None => err(at, format!("unknown name {name:?}")),
                }
            }
        }
    }
}

/// A parsed expression in `dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    dim: usize,
}

impl Expr {
    pub fn parse(src: &str, dim: usize) -> Result<Expr, ParseError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, end: src.chars().count(), dim };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return err(p.here(), "unexpected trailing input");
        }
        Ok(Expr { root, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        fn go(n: &Node, x: &[f64]) -> f64 {
            match n {
                Node::Num(v) => *v,
                Node::Var(i) => x[*i],
                Node::Neg(a) => -go(a, x),
                Node::Call(f, a) => f.apply(go(a, x)),
                Node::Bin(op, a, b) => {
                    let (a, b) = (go(a, x), go(b, x));
                    match op {
                        '+' => a + b,
                        '-' => a - b,
                        '*' => a * b,
                        '/' => a / b,
                        _ => a.powf(b),
                    }
                }
            }
        }
        go(&self.root, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: &[f64]) -> f64 {
        Expr::parse(src, x.len()).unwrap().eval(x)
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1 + 2 * 3", &[0.0]), 7.0);
        assert_eq!(ev("(1 + 2) * 3", &[0.0]), 9.0);
        assert_eq!(ev("2^3^2", &[0.0]), 512.0);
        assert_eq!(ev("-x1^2", &[3.0]), -9.0);
        assert_eq!(ev("8 / 4 / 2", &[0.0]), 1.0);
        assert_eq!(ev("2 - -1", &[0.0]), 3.0);
        assert_eq!(ev("2^-1", &[0.0]), 0.5);
    }

    #[test]
    fn numbers_and_names() {
        assert_eq!(ev("1.5e2 + .5", &[0.0]), 150.5);
        assert_eq!(ev("2*e", &[0.0]), 2.0 * std::f64::consts::E);
        assert!(Expr::parse("2e", 1).is_err());
        assert_eq!(ev("x2 - x1", &[1.0, 4.0]), 3.0);
        assert!((ev("exp(log(2)) + sqrt(abs(-9)) + cos(pi)", &[0.0]) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn concentrated_weight() {
        let src = "exp(-50*((x1-1/3)^2 + (x2-1/3)^2 + (x3-1/3)^2))";
        let third = 1.0 / 3.0;
        assert_eq!(ev(src, &[third, third, third]), 1.0);
        assert!((ev(src, &[1.0, 0.0, 0.0]) - (-50.0f64 * (4.0 / 9.0 + 2.0 / 9.0)).exp()).abs() < 1e-18);
    }

    #[test]
    fn errors() {
        for bad in ["", "1 +", "(1", "x3", "foo", "1 $ 2", "exp 2", "1 2", "x0"] {
            assert!(Expr::parse(bad, 2).is_err(), "{bad:?} parsed");
        }
        let e = Expr::parse("1 + x9", 2).unwrap_err();
        assert_eq!(e.position, 4);
    }
}
