//! Recursive-descent parser for the branch expression grammar:
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | "+" unary | power ;
//! power    = atom [ "^" unary ] ;          (* exponent must fold to a rational *)
//! atom     = number | "x" | "c" | func "(" expr ")" | "(" expr ")" ;
//! func     = "sqrt" | "abs" | "exp" | "log" ;
//! number   = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ```

use rug::Rational;

use super::{Expr, Func};
use crate::error::{Error, Result};
use crate::precision::parse_rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn next_token(&mut self) -> Result<Token> {
        while let Some(&(_, ch)) = self.chars.peek() {
            if ch.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let (line, column) = (self.line, self.column);
        let Some(&(start, ch)) = self.chars.peek() else {
            return Ok(Token {
                tok: Tok::End,
                line,
                column,
            });
        };
        let tok = if ch.is_ascii_digit() || ch == '.' {
            let mut end = start;
            let mut seen_exp = false;
            while let Some(&(i, c)) = self.chars.peek() {
                let sign_after_exp = (c == '+' || c == '-')
                    && seen_exp
                    && matches!(self.src[..i].chars().last(), Some('e' | 'E'));
                if c.is_ascii_digit() || c == '.' || sign_after_exp {
                    end = i + c.len_utf8();
                    self.bump();
                } else if (c == 'e' || c == 'E') && !seen_exp {
                    seen_exp = true;
                    end = i + 1;
                    self.bump();
                } else {
                    break;
                }
            }
            let text = &self.src[start..end];
            let value = parse_rational(text).map_err(|_| Error::Syntax {
                line,
                column,
                message: format!("malformed number `{text}`"),
            })?;
            Tok::Num(value)
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let mut end = start;
            while let Some(&(i, c)) = self.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = i + 1;
                    self.bump();
                } else {
                    break;
                }
            }
            Tok::Ident(self.src[start..end].to_string())
        } else {
            self.bump();
            match ch {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(ch),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(Error::Syntax {
                        line,
                        column,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        Ok(Token { tok, line, column })
    }

    fn bump(&mut self) {
        if let Some((_, c)) = self.chars.next() {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, tok: &Token, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.advance();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Op('-') => {
                    self.advance();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.advance();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Tok::Op('/') => {
                    let tok = self.advance();
                    let rhs = self.unary()?;
                    if matches!(rhs.as_rational(), Some(r) if *r == 0) {
                        return Err(self.error(&tok, "division by the constant zero"));
                    }
                    lhs = Expr::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Op('-') => {
                self.advance();
                Ok(Expr::neg(self.unary()?))
            }
            Tok::Op('+') => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Op('^') {
            self.advance();
            let at = self.peek().clone();
            let exponent = self.unary()?;
            let Some(r) = exponent.as_rational() else {
                return Err(self.error(&at, "exponent must be a rational constant"));
            };
            if matches!(base.as_rational(), Some(b) if *b == 0) && *r < 0 {
                return Err(self.error(&at, "zero raised to a negative power"));
            }
            return Ok(Expr::pow(base, r.clone()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.advance();
        match &tok.tok {
            Tok::Num(r) => Ok(Expr::Const(r.clone())),
            Tok::Ident(name) if name == "x" => Ok(Expr::X),
            Tok::Ident(name) if name == "c" => Ok(Expr::Param),
            Tok::Ident(name) => {
                if self.peek().tok != Tok::LParen {
                    return Err(self.error(&tok, format!("unknown identifier `{name}`")));
                }
                let func = match Func::from_name(name) {
                    Some(f) if f != Func::Sign => f,
                    _ => {
                        return Err(Error::UnknownFunction {
                            name: name.clone(),
                            line: tok.line,
                            column: tok.column,
                        })
                    }
                };
                self.advance();
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::call(func, arg))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::RParen => Err(self.error(&tok, "unexpected `)`")),
            Tok::Op(op) => Err(self.error(&tok, format!("unexpected operator `{op}`"))),
            Tok::End => Err(self.error(&tok, "unexpected end of expression")),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let tok = self.advance();
        if tok.tok == Tok::RParen {
            Ok(())
        } else {
            Err(self.error(&tok, "expected `)`"))
        }
    }
}

/// Parses an expression; positions in errors are 1-based.
pub fn parse_expr(src: &str) -> Result<Expr> {
    parse_expr_at(src, 1, 1)
}

/// Parses an expression that starts at `line`/`column` of a larger file,
/// so errors point into that file.
pub fn parse_expr_at(src: &str, line: usize, column: usize) -> Result<Expr> {
    let mut lexer = Lexer {
        chars: src.char_indices().peekable(),
        src,
        line,
        column,
    };
    let mut tokens = Vec::new();
    loop {
        let t = lexer.next_token()?;
        let end = t.tok == Tok::End;
        tokens.push(t);
        if end {
            break;
        }
    }
    let mut parser = Parser { tokens, pos: 0 };
    let e = parser.expr()?;
    let tail = parser.peek().clone();
    if tail.tok != Tok::End {
        return Err(parser.error(&tail, "unexpected trailing input"));
    }
    Ok(e)
}
