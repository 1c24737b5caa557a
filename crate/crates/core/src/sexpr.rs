//! Minimal s-expression reader and printer backing the prefix text format.
//!
//! Atoms are bare tokens (symbols and numbers alike); `;` starts a comment
//! that runs to the end of the line. Every node remembers the line and column
//! it started on so that resolution errors can point back into the source.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl PartialEq for Sexp {
    // Positions are metadata; structural equality ignores them.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Sexp::Atom(a, _), Sexp::Atom(b, _)) => a == b,
            (Sexp::List(a, _), Sexp::List(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into(), Pos::default())
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items, Pos::default())
    }

    /// `(head item...)`
    pub fn tagged(head: &str, mut rest: Vec<Sexp>) -> Sexp {
        rest.insert(0, Sexp::atom(head));
        Sexp::list(rest)
    }

    pub fn num(x: f64) -> Sexp {
        Sexp::atom(format_f64(x))
    }

    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        let p = self.pos();
        Error::Parse {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        }
    }

    pub fn expect_list(&self) -> Result<&[Sexp]> {
        self.as_list().ok_or_else(|| self.err("expected a list"))
    }

    pub fn expect_atom(&self) -> Result<&str> {
        self.as_atom().ok_or_else(|| self.err("expected an atom"))
    }

    pub fn expect_f64(&self) -> Result<f64> {
        let s = self.expect_atom()?;
        parse_f64(s).ok_or_else(|| self.err(format!("expected a number, found `{s}`")))
    }

    pub fn expect_usize(&self) -> Result<usize> {
        let s = self.expect_atom()?;
        s.parse::<usize>()
            .map_err(|_| self.err(format!("expected a non-negative integer, found `{s}`")))
    }

    pub fn expect_i64(&self) -> Result<i64> {
        let s = self.expect_atom()?;
        s.parse::<i64>()
            .map_err(|_| self.err(format!("expected an integer, found `{s}`")))
    }

    /// Checks that `self` is `(head ...)` with exactly `n` arguments and returns them.
    pub fn args(&self, head: &str, n: usize) -> Result<&[Sexp]> {
        let items = self.expect_list()?;
        if items.first().and_then(Sexp::as_atom) != Some(head) {
            return Err(self.err(format!("expected `({head} ...)`")));
        }
        if items.len() != n + 1 {
            return Err(self.err(format!(
                "`{head}` takes {n} argument(s), found {}",
                items.len() - 1
            )));
        }
        Ok(&items[1..])
    }

    /// Pretty printer: short lists stay on one line, long ones break per child.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.pretty_into(&mut out, 0);
        out
    }

    fn pretty_into(&self, out: &mut String, indent: usize) {
        let flat = self.to_string();
        if flat.len() + indent <= 88 || self.as_list().is_none() {
            out.push_str(&flat);
            return;
        }
        let items = self.as_list().unwrap_or(&[]);
        out.push('(');
        for (i, item) in items.iter().enumerate() {
            if i == 0 {
                item.pretty_into(out, indent + 1);
            } else {
                out.push('\n');
                out.push_str(&" ".repeat(indent + 2));
                item.pretty_into(out, indent + 2);
            }
        }
        out.push(')');
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.fract() == 0.0 && x.abs() < 1e16 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => None,
        _ => s.parse::<f64>().ok(),
    }
}

/// Parses every top-level form in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>> {
    let mut reader = Reader::new(src);
    let mut forms = Vec::new();
    loop {
        reader.skip_ws();
        if reader.peek().is_none() {
            return Ok(forms);
        }
        forms.push(reader.read()?);
    }
}

/// Parses exactly one form.
pub fn parse_one(src: &str) -> Result<Sexp> {
    let mut forms = parse_all(src)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "empty input".into(),
        }),
        _ => {
            let p = forms[1].pos();
            Err(Error::Parse {
                line: p.line,
                col: p.col,
                msg: "trailing input after expression".into(),
            })
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader {
            chars: src.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_ws();
        let start = self.pos();
        match self.peek() {
            None => Err(Error::Parse {
                line: start.line,
                col: start.col,
                msg: "unexpected end of input".into(),
            }),
            Some(')') => Err(Error::Parse {
                line: start.line,
                col: start.col,
                msg: "unbalanced `)`".into(),
            }),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => {
                            return Err(Error::Parse {
                                line: start.line,
                                col: start.col,
                                msg: "unclosed `(`".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let forms = parse_all("(sum (const 1)\n  (epspow 1)) ; tail\nfoo").unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0].to_string(), "(sum (const 1) (epspow 1))");
        let inner = &forms[0].as_list().unwrap()[2];
        assert_eq!(inner.pos(), Pos { line: 2, col: 3 });
        assert_eq!(forms[1].as_atom(), Some("foo"));
    }

    #[test]
    fn reports_unbalanced_input() {
        assert!(matches!(parse_one("(a (b)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_one(")"), Err(Error::Parse { .. })));
        assert!(parse_one("a b").is_err());
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -2.5e-300, 1.0 / 3.0, 1e21, 5.0, -0.0] {
            assert_eq!(parse_f64(&format_f64(x)).unwrap().to_bits(), x.to_bits());
        }
    }
}
