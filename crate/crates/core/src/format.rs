//! The `.dga` text format.
//!
//! ```text
//! dga "unknot"        # header, first statement
//! tb -1               # optional metadata
//! gen a 1             # one chord per line: name and degree
//! d a = t + 1         # differentials; omitted ones are zero
//! ```
//!
//! Polynomials are `+`/`-` separated terms `[int*]factor*factor...` over
//! chord names, `t` and `t^-1`; a bare integer is a multiple of the unit.
//! `#` starts a comment, except that `#<digits>` directly after a name is
//! part of it (`a3#2` is the name connected sums give to copies).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::{Gen, Poly};
use crate::dga::Dga;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Str(String),
    Plus,
    Minus,
    Star,
    Caret,
    Eq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Str(_) => "a string".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eq => "`=`".into(),
        }
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokens of one line with their 1-based columns.
fn lex(line_no: usize, line: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' => i += 1,
            '#' => break,
            '+' => {
                out.push((col, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((col, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((col, Tok::Star));
                i += 1;
            }
            '^' => {
                out.push((col, Tok::Caret));
                i += 1;
            }
            '=' => {
                out.push((col, Tok::Eq));
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err(line_no, col, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                i += 2;
                            }
                            _ => return Err(err(line_no, i + 1, "invalid escape in string")),
                        },
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push((col, Tok::Str(s)));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                if chars.get(i).is_some_and(|&c| is_ident_char(c)) {
                    return Err(err(line_no, i + 1, "unexpected character after number"));
                }
                out.push((col, Tok::Int(text.parse().expect("ascii digits"))));
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                while chars.get(i) == Some(&'#') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push((col, Tok::Ident(chars[start..i].iter().collect())));
            }
            other => return Err(err(line_no, col, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    line: usize,
    toks: &'a [(usize, Tok)],
    pos: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(c, _)| *c)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.peek().cloned();
        self.pos += 1;
        t
    }

    fn fail(&self, what: &str) -> Error {
        let found = self.peek().map_or("end of line".to_string(), Tok::describe);
        err(self.line, self.col(), format!("expected {what}, found {found}"))
    }

    fn ident(&mut self) -> Result<(usize, String)> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((col, s))
            }
            _ => Err(self.fail("a name")),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let neg = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.fail("an integer")),
        }
    }

    fn small_int(&mut self) -> Result<i64> {
        let col = self.col();
        let n = self.int()?;
        i64::try_from(&n).map_err(|_| err(self.line, col, format!("{n} is out of range")))
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return Err(self.fail("end of line"));
        }
        Ok(())
    }
}

/// A factor with the column it started at, for unknown-name reporting.
type Term = (BigInt, Vec<(usize, Gen)>);

fn parse_poly(cur: &mut Cursor<'_>) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    let mut sign = BigInt::one();
    match cur.peek() {
        Some(Tok::Minus) => {
            cur.pos += 1;
            sign = -sign;
        }
        Some(Tok::Plus) => cur.pos += 1,
        _ => {}
    }
    loop {
        terms.push(parse_term(cur, sign)?);
        sign = match cur.peek() {
            Some(Tok::Plus) => BigInt::one(),
            Some(Tok::Minus) => -BigInt::one(),
            _ => break,
        };
        cur.pos += 1;
    }
    Ok(terms)
}

fn parse_term(cur: &mut Cursor<'_>, sign: BigInt) -> Result<Term> {
    let mut coeff = sign;
    let mut word = Vec::new();
    if let Some(Tok::Int(n)) = cur.peek() {
        coeff *= n;
        cur.pos += 1;
        if cur.peek() != Some(&Tok::Star) {
            return Ok((coeff, word));
        }
        cur.pos += 1;
    }
    loop {
        let col = cur.col();
        match cur.peek() {
            Some(Tok::Ident(name)) if name == "t" => {
                cur.pos += 1;
                if cur.peek() == Some(&Tok::Caret) {
                    cur.pos += 1;
                    let exp_col = cur.col();
                    match cur.small_int()? {
                        1 => word.push((col, Gen::T)),
                        -1 => word.push((col, Gen::TInv)),
                        e => return Err(err(cur.line, exp_col, format!("unsupported exponent {e}, use t or t^-1"))),
                    }
                } else {
                    word.push((col, Gen::T));
                }
            }
            Some(Tok::Ident(name)) => {
                word.push((col, Gen::Chord(name.clone())));
                cur.pos += 1;
            }
            _ => return Err(cur.fail("a generator")),
        }
        if cur.peek() != Some(&Tok::Star) {
            return Ok((coeff, word));
        }
        cur.pos += 1;
    }
}

/// Parses a `.dga` document. Differentials are checked against the
/// declared chords but grading and `d^2 = 0` are left to validation.
pub fn parse(text: &str) -> Result<Dga> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut dga: Option<Dga> = None;
    let mut diffs: Vec<(usize, usize, String, Vec<Term>)> = Vec::new();
    let mut seen_tb = false;
    let mut seen_basepoint = false;

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let toks = lex(line_no, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor { line: line_no, toks: &toks, pos: 0, end_col: line.chars().count() + 1 };
        let (kw_col, keyword) = cur.ident()?;
        let Some(d) = dga.as_mut() else {
            if keyword != "dga" {
                return Err(err(line_no, kw_col, "document must start with `dga \"<name>\"`"));
            }
            let name = match cur.next() {
                Some(Tok::Str(s)) => s,
                _ => {
                    cur.pos -= 1;
                    return Err(cur.fail("a quoted name"));
                }
            };
            cur.finish()?;
            dga = Some(Dga::new(name));
            continue;
        };
        match keyword.as_str() {
            "dga" => return Err(err(line_no, kw_col, "duplicate `dga` header")),
            "gen" => {
                let (col, name) = cur.ident()?;
                let degree = cur.small_int()?;
                cur.finish()?;
                match d.add_chord(name, degree) {
                    Err(Error::InvalidParameter(msg)) => return Err(err(line_no, col, msg)),
                    other => other?,
                }
            }
            "tb" => {
                if seen_tb {
                    return Err(err(line_no, kw_col, "duplicate `tb` line"));
                }
                seen_tb = true;
                let tb = cur.small_int()?;
                cur.finish()?;
                d.set_tb(Some(tb));
            }
            "basepoint" => {
                if seen_basepoint {
                    return Err(err(line_no, kw_col, "duplicate `basepoint` line"));
                }
                seen_basepoint = true;
                let (col, name) = cur.ident()?;
                if name != "t" {
                    return Err(err(line_no, col, "the basepoint generator is always `t`"));
                }
                cur.finish()?;
            }
            "d" => {
                let (col, name) = cur.ident()?;
                if cur.next() != Some(Tok::Eq) {
                    cur.pos -= 1;
                    return Err(cur.fail("`=`"));
                }
                let terms = parse_poly(&mut cur)?;
                cur.finish()?;
                diffs.push((line_no, col, name, terms));
            }
            other => return Err(err(line_no, kw_col, format!("unknown statement `{other}`"))),
        }
    }

    let mut dga = dga.ok_or_else(|| err(1, 1, "empty document"))?;
    let mut assigned = BTreeSet::new();
    for (line, col, name, terms) in diffs {
        if dga.degree(&name).is_none() {
            return Err(Error::UnknownGenerator(name));
        }
        if !assigned.insert(name.clone()) {
            return Err(err(line, col, format!("second differential for `{name}`")));
        }
        for (_, word) in &terms {
            for (_, g) in word {
                if let Gen::Chord(c) = g {
                    if dga.degree(c).is_none() {
                        return Err(Error::UnknownGenerator(c.clone()));
                    }
                }
            }
        }
        let p = Poly::from_terms(
            terms
                .into_iter()
                .map(|(c, word)| (c, word.into_iter().map(|(_, g)| g).collect())),
        );
        dga.set_diff(&name, p)?;
    }
    Ok(dga)
}

/// Canonical text: header, optional `tb`, chords in declaration order, then
/// nonzero differentials in declaration order. Always LF line endings.
pub fn serialize(dga: &Dga) -> String {
    let mut out = String::new();
    let name = dga.name().replace('\\', "\\\\").replace('"', "\\\"");
    writeln!(out, "dga \"{name}\"").unwrap();
    if let Some(tb) = dga.tb_metadata() {
        writeln!(out, "tb {tb}").unwrap();
    }
    for c in dga.chords() {
        writeln!(out, "gen {} {}", c.name, c.degree).unwrap();
    }
    for c in dga.chords() {
        let p = dga.diff(&c.name);
        if !p.is_zero() {
            writeln!(out, "d {} = {p}", c.name).unwrap();
        }
    }
    out
}
