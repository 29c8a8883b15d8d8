//! Map definition files.
//!
//! ```text
//! # Lanford map
//! name = "lanford"
//! interval = [0, 1]
//! parameter c = 1/2          # optional; binds `c` in the expressions
//! mixing = true              # optional, user-asserted
//! branch { inverse = "(5 - sqrt(25 - 8*x))/2", deriv_abs = "2/sqrt(25 - 8*x)" }
//! branch {
//!     label = "f2"
//!     inverse = "(5 - sqrt(17 - 8*x))/2"
//! }
//! ```

use rug::Rational;

use super::{Branch, MapSpec};
use crate::error::{Error, Result};
use crate::expr::parse_expr_at;
use crate::precision::{parse_rational, Interval};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Sym(char),
    Newline,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(source: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, text) in source.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = i + 1;
            if ch == '#' {
                break;
            } else if ch.is_whitespace() {
                i += 1;
            } else if ch == '"' {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(syntax(line, column, "unterminated string"));
                }
                out.push(Token {
                    tok: Tok::Str(chars[start..j].iter().collect()),
                    line,
                    column,
                });
                i = j + 1;
            } else if "=[]{},".contains(ch) {
                out.push(Token {
                    tok: Tok::Sym(ch),
                    line,
                    column,
                });
                i += 1;
            } else if ch.is_ascii_alphanumeric() || "_.+-/".contains(ch) {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || "_.+-/".contains(chars[i]))
                {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line,
                    column,
                });
            } else {
                return Err(syntax(line, column, format!("unexpected character `{ch}`")));
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line,
            column: chars.len() + 1,
        });
    }
    let line = out.last().map_or(1, |t| t.line + 1);
    out.push(Token {
        tok: Tok::End,
        line,
        column: 1,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

#[derive(Default)]
struct BranchDraft {
    label: Option<String>,
    inverse: Option<(String, usize, usize)>,
    deriv_abs: Option<(String, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.next();
        }
    }

    fn expect_sym(&mut self, sym: char) -> Result<Token> {
        let t = self.next();
        if t.tok == Tok::Sym(sym) {
            Ok(t)
        } else {
            Err(syntax(t.line, t.column, format!("expected `{sym}`")))
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Word(w) => Ok((w.clone(), t.clone())),
            _ => Err(syntax(t.line, t.column, format!("expected {what}"))),
        }
    }

    fn string(&mut self, what: &str) -> Result<(String, usize, usize)> {
        let t = self.next();
        match &t.tok {
            Tok::Str(s) => Ok((s.clone(), t.line, t.column + 1)),
            _ => Err(syntax(
                t.line,
                t.column,
                format!("expected a quoted {what}"),
            )),
        }
    }

    fn number(&mut self) -> Result<Rational> {
        let (w, t) = self.word("a number")?;
        parse_rational(&w).map_err(|_| syntax(t.line, t.column, format!("malformed number `{w}`")))
    }

    fn end_of_statement(&mut self) -> Result<()> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Newline | Tok::End => Ok(()),
            _ => Err(syntax(t.line, t.column, "expected end of line")),
        }
    }

    fn branch_block(&mut self) -> Result<BranchDraft> {
        self.expect_sym('{')?;
        let mut draft = BranchDraft::default();
        loop {
            self.skip_newlines();
            let t = self.peek().clone();
            match &t.tok {
                Tok::Sym('}') => {
                    self.next();
                    return Ok(draft);
                }
                Tok::Sym(',') => {
                    self.next();
                }
                Tok::Word(key) => {
                    let key = key.clone();
                    self.next();
                    self.expect_sym('=')?;
                    let slot = match key.as_str() {
                        "inverse" => &mut draft.inverse,
                        "deriv_abs" => &mut draft.deriv_abs,
                        "label" => {
                            draft.label = Some(self.string("label")?.0);
                            continue;
                        }
                        _ => {
                            return Err(syntax(
                                t.line,
                                t.column,
                                format!("unknown branch field `{key}`"),
                            ))
                        }
                    };
                    if slot.is_some() {
                        return Err(syntax(t.line, t.column, format!("duplicate field `{key}`")));
                    }
                    *slot = Some(self.string("expression")?);
                }
                Tok::End => return Err(syntax(t.line, t.column, "unterminated branch block")),
                _ => return Err(syntax(t.line, t.column, "expected a branch field or `}`")),
            }
        }
    }
}

/// `parse_map_spec`: reads a map definition file.
pub fn parse_map_spec(source: &str) -> Result<MapSpec> {
    let mut p = Parser {
        tokens: lex(source)?,
        pos: 0,
    };
    let mut name: Option<String> = None;
    let mut interval: Option<Interval> = None;
    let mut parameter: Option<Rational> = None;
    let mut mixing = true;
    let mut drafts: Vec<(BranchDraft, Token)> = Vec::new();
    loop {
        p.skip_newlines();
        let t = p.peek().clone();
        let key = match &t.tok {
            Tok::End => break,
            Tok::Word(w) => w.clone(),
            _ => return Err(syntax(t.line, t.column, "expected a field name")),
        };
        p.next();
        match key.as_str() {
            "name" => {
                p.expect_sym('=')?;
                name = Some(p.string("name")?.0);
            }
            "interval" => {
                p.expect_sym('=')?;
                p.expect_sym('[')?;
                let a = p.number()?;
                p.expect_sym(',')?;
                let b = p.number()?;
                p.expect_sym(']')?;
                interval =
                    Some(Interval::new(a, b).map_err(|e| syntax(t.line, t.column, e.to_string()))?);
            }
            "parameter" => {
                let (pname, pt) = p.word("a parameter name")?;
                if pname != "c" {
                    return Err(syntax(pt.line, pt.column, "the only parameter name is `c`"));
                }
                p.expect_sym('=')?;
                parameter = Some(p.number()?);
            }
            "mixing" => {
                p.expect_sym('=')?;
                let (v, vt) = p.word("true or false")?;
                mixing = match v.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(syntax(vt.line, vt.column, "expected true or false")),
                };
            }
            "branch" => {
                let draft = p.branch_block()?;
                drafts.push((draft, t.clone()));
            }
            _ => return Err(syntax(t.line, t.column, format!("unknown field `{key}`"))),
        }
        p.end_of_statement()?;
    }

    let interval = interval.ok_or_else(|| Error::InvalidMap("missing interval".into()))?;
    if drafts.len() < 2 {
        return Err(Error::InvalidMap(format!(
            "a full-branch map needs at least 2 branches, found {}",
            drafts.len()
        )));
    }
    let mut branches = Vec::with_capacity(drafts.len());
    for (i, (draft, at)) in drafts.into_iter().enumerate() {
        let (src, line, column) = draft
            .inverse
            .ok_or_else(|| syntax(at.line, at.column, "branch without `inverse`"))?;
        let inverse = parse_expr_at(&src, line, column)?;
        let deriv = match draft.deriv_abs {
            Some((src, line, column)) => Some(parse_expr_at(&src, line, column)?),
            None => None,
        };
        let label = draft.label.unwrap_or_else(|| format!("f{}", i + 1));
        branches.push(Branch::new(label, inverse, deriv));
    }
    MapSpec::new(
        name.unwrap_or_else(|| "custom".into()),
        interval,
        branches,
        parameter,
        mixing,
    )
}
