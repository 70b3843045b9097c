use super::{Expr, Func, PI_NAME};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownFunction { offset, .. } => {
                *offset
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(u8),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the next token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start).map(|v| (Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            return Ok((Tok::Ident(name), start));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Sym(c), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", c as char),
        })
    }

    fn number(&mut self, start: usize) -> Result<f64, ParseError> {
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i < s.len() && s[i] == b'.' {
            i += 1;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).unwrap();
        self.pos = i;
        text.parse::<f64>().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

pub(super) fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut lex = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let (tok, at) = lex.next()?;
    let mut p = Parser { lex, tok, at };
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lex.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = match &self.tok {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(n) => format!("`{n}`"),
            Tok::Sym(c) => format!("`{}`", *c as char),
            Tok::End => "end of input".to_string(),
        };
        ParseError::Syntax {
            offset: self.at,
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Sym(c @ (b'+' | b'-')) = self.tok {
            self.bump()?;
            let rhs = self.term()?;
            lhs = if c == b'+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Sym(c @ (b'*' | b'/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            lhs = if c == b'*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Sym(b'-') {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Num(v) => Expr::Num(-v),
                e => Expr::Neg(Box::new(e)),
            });
        }
        if self.tok == Tok::Sym(b'+') {
            self.bump()?;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.tok == Tok::Sym(b'^') {
            self.bump()?;
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parens = self.tok == Tok::Sym(b'(');
        if parens {
            self.bump()?;
        }
        let mut sign = 1;
        match self.tok {
            Tok::Sym(b'-') => {
                sign = -1;
                self.bump()?;
            }
            Tok::Sym(b'+') => self.bump()?,
            _ => {}
        }
        let at = self.at;
        let n = match self.tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            Tok::Num(_) => {
                return Err(ParseError::Syntax {
                    offset: at,
                    message: "exponent must be an integer; use sqrt or exp/log".into(),
                })
            }
            _ => return Err(self.unexpected("integer exponent")),
        };
        self.bump()?;
        if parens {
            if self.tok != Tok::Sym(b')') {
                return Err(self.unexpected("`)`"));
            }
            self.bump()?;
        }
        Ok(sign * n)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if self.tok == Tok::Sym(b'(') {
                    let f = Func::from_name(&name).ok_or(ParseError::UnknownFunction {
                        offset: at,
                        name: name.clone(),
                    })?;
                    self.bump()?;
                    let arg = self.expr()?;
                    if self.tok != Tok::Sym(b')') {
                        return Err(self.unexpected("`)`"));
                    }
                    self.bump()?;
                    Ok(Expr::Call(f, Box::new(arg)))
                } else if name == PI_NAME {
                    Ok(Expr::Num(std::f64::consts::PI))
                } else if Func::from_name(&name).is_some() {
                    Err(ParseError::Syntax {
                        offset: at,
                        message: format!("function `{name}` needs an argument"),
                    })
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Tok::Sym(b'(') => {
                self.bump()?;
                let e = self.expr()?;
                if self.tok != Tok::Sym(b')') {
                    return Err(self.unexpected("`)`"));
                }
                self.bump()?;
                Ok(e)
            }
            other => {
                self.tok = other;
                Err(self.unexpected("operand"))
            }
        }
    }
}
