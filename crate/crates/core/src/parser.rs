//! Parser for the expression language the engine renders: Clifford atoms
//! `c(i)`, `ch(i)`, `jet(i)`, scalar atoms `xi(i)`, `xin`, `i`, `hp`, `t`,
//! `tbar`, `pi`, `Omega`, `K`, `SNorm`, `u`, rationals `p/q`, the operators
//! `+ - * ^`, parentheses and `trace(...)`.

use num_bigint::BigInt;

use crate::clifford::{Clifford, Generator};
use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Poly, Rat, Var};

type Cl = Clifford<Poly>;

#[derive(Clone, Debug, PartialEq)]
pub enum Parsed {
    Scalar(Poly),
    Clifford(Cl),
}

impl Parsed {
    fn from_cl(c: Cl) -> Self {
        match c.as_scalar() {
            Some(p) => Parsed::Scalar(p),
            None => Parsed::Clifford(c),
        }
    }
    pub fn into_clifford(self) -> Cl {
        match self {
            Parsed::Scalar(p) => Cl::scalar(p),
            Parsed::Clifford(c) => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 0);
    while let Some(&ch) = chars.peek() {
        col += 1;
        if ch == '\n' {
            chars.next();
            line += 1;
            col = 0;
            continue;
        }
        if ch.is_whitespace() {
            chars.next();
            continue;
        }
        let start = col;
        if ch.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                chars.next();
                col += 1;
            }
            col -= 1;
            let v = s.parse::<BigInt>().map_err(|e| Error::Syntax { line, col: start, msg: e.to_string() })?;
            out.push(Token { tok: Tok::Num(v), line, col: start });
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                chars.next();
                col += 1;
            }
            col -= 1;
            out.push(Token { tok: Tok::Ident(s), line, col: start });
        } else if "+-*/^()".contains(ch) {
            chars.next();
            out.push(Token { tok: Tok::Sym(ch), line, col: start });
        } else {
            return Err(Error::Syntax { line, col: start, msg: format!("unexpected character {ch:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    n: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }
    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Syntax { line, col, msg: msg.into() })
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Cl> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Cl> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?)?;
            } else if self.eat('/') {
                let at = self.here();
                let d = self.unary()?;
                let c = d.as_scalar().and_then(|p| p.constant_value()).and_then(|c| c.inv()).ok_or(Error::Syntax {
                    line: at.0,
                    col: at.1,
                    msg: "divisor must be a nonzero number".into(),
                })?;
                acc = acc.scale(&Poly::constant(c));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Cl> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Cl> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = match self.peek() {
                Some(Tok::Num(v)) => u32::try_from(v.clone()).ok(),
                _ => None,
            };
            let Some(e) = e else { return self.err("exponent must be a non-negative integer") };
            self.pos += 1;
            let mut acc = Cl::one();
            for _ in 0..e {
                acc = acc.mul(&base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn index_arg(&mut self) -> Result<u8> {
        self.expect('(')?;
        let at = self.here();
        let v = match self.peek() {
            Some(Tok::Num(v)) => v.clone(),
            _ => return self.err("expected an index"),
        };
        self.pos += 1;
        self.expect(')')?;
        let i = u8::try_from(v).ok().filter(|i| *i >= 1 && (*i as usize) <= self.n);
        i.ok_or_else(|| {
            Error::IndexOutOfRange(format!("index at line {}, column {} exceeds n = {}", at.0, at.1, self.n))
        })
    }

    fn atom(&mut self) -> Result<Cl> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        let at = self.here();
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Cl::scalar(Poly::constant(GaussRat::real(Rat::from_integer(v))))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => Err(Error::Syntax { line: at.0, col: at.1, msg: format!("unexpected '{c}'") }),
            Tok::Ident(name) => {
                let var = |v| Ok(Cl::scalar(Poly::var(v)));
                match name.as_str() {
                    "c" => Ok(Cl::gen(Generator::c(self.index_arg()?))),
                    "ch" => Ok(Cl::gen(Generator::chat(self.index_arg()?))),
                    "jet" => Ok(Cl::gen(Generator::jet(self.index_arg()?))),
                    "xi" => Ok(Cl::scalar(Poly::xi(self.index_arg()?))),
                    "trace" => {
                        self.expect('(')?;
                        let e = self.expr()?;
                        self.expect(')')?;
                        Ok(Cl::scalar(e.trace(self.n)?))
                    }
                    "i" => Ok(Cl::scalar(Poly::i())),
                    "xin" => var(Var::XiN),
                    "hp" => var(Var::HPrime),
                    "t" => var(Var::T),
                    "tbar" => var(Var::TBar),
                    "pi" => var(Var::Pi),
                    "Omega" => var(Var::Omega),
                    "K" => var(Var::K),
                    "SNorm" => var(Var::SNorm),
                    "u" => var(Var::U),
                    _ => Err(Error::Syntax { line: at.0, col: at.1, msg: format!("unknown identifier {name:?}") }),
                }
            }
        }
    }
}

/// Parses `text` in a session of dimension `n`. A premature end of input is
/// reported at the last character.
pub fn parse_expr(text: &str, n: usize) -> Result<Parsed> {
    let toks = lex(text)?;
    let last = text.lines().count().max(1);
    let end = (last, text.lines().last().map(|l| l.chars().count()).unwrap_or(0).max(1));
    let mut p = Parser { toks, pos: 0, n, end };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(Parsed::from_cl(e))
}

pub fn parse_scalar(text: &str, n: usize) -> Result<Poly> {
    match parse_expr(text, n)? {
        Parsed::Scalar(p) => Ok(p),
        Parsed::Clifford(c) => Err(Error::Malformed(format!("{c} is not a scalar"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_squared_is_minus_one() {
        assert_eq!(parse_expr("c(1)*c(1)", 4).unwrap(), Parsed::Scalar(Poly::int(-1)));
    }

    #[test]
    fn trace_of_cn_squared() {
        assert_eq!(parse_scalar("trace(c(4)*c(4))", 4).unwrap(), Poly::int(-16));
    }

    #[test]
    fn unclosed_paren_position() {
        match parse_expr("c(1)*ch(2", 4) {
            Err(Error::Syntax { line: 1, col: 9, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        match parse_expr("2*foo", 4) {
            Err(Error::Syntax { col: 3, msg, .. }) => assert!(msg.contains("foo")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(parse_expr("c(5)", 4), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn precedence() {
        let p = parse_scalar("1 + 2*3^2 - -3/2*hp", 4).unwrap();
        assert_eq!(p, &Poly::int(19) + &Poly::var(Var::HPrime).scale(&GaussRat::frac(3, 2)));
    }

    #[test]
    fn renders_round_trip() {
        for s in ["65/8 - 41/8*i", "-3/2*hp*pi*Omega", "-3/2*c(4) + c(1)*ch(3)", "(1/2 + i)*c(2)*jet(1)"] {
            let v = parse_expr(s, 4).unwrap();
            let r = match &v {
                Parsed::Scalar(p) => p.to_string(),
                Parsed::Clifford(c) => c.to_string(),
            };
            assert_eq!(parse_expr(&r, 4).unwrap(), v, "{s} -> {r}");
        }
    }
}
