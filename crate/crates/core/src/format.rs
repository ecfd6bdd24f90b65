//! Text formats.
//!
//! Grammar files hold one rule per line:
//!
//! ```text
//! # L2 = { a1^n a2^m | n >= m }
//! start: S
//! S($1.1) <- A($1.1)
//! A(_) <-
//! A(a1 $1.1) <- A($1.1)
//! A(a1 $1.1 a2) <- A($1.1)
//! ```
//!
//! Pattern tokens are whitespace separated. `$i.j` is the `j`-th component of
//! the `i`-th right-hand side non-terminal (one-based), `_` on its own is the
//! empty component and any other token is a letter, unless it is a name
//! bound by the rule's right-hand side: `A(a x b) <- A(x)` is the same rule
//! as `A(a $1.1 b) <- A($1.1)`. `#` comments run to the end of the line.
//!
//! Optional headers: `start: NAME` (default: the first rule's left-hand
//! side) and `alphabet: a1 a2 …` (default: the letters in order of first
//! appearance).
//!
//! Preorder files start with `m: <size>` followed by lines `i <= j`
//! (one-based); the preorder is the reflexive-transitive closure of the
//! listed pairs.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::derivation::{DerivationTree, TreeError};
use crate::grammar::{Alphabet, Letter, Mcfg, NonTerminal, Pattern, Rule, Symbol, Term, Variable};
use crate::preorder::Preorder;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { file: None, line, column, message: message.into() }
    }

    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Open,
    Close,
    Comma,
    Arrow,
}

/// Tokens with one-based columns.
fn tokenize(line: &str) -> Vec<(Tok, usize)> {
    let mut toks = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    let col = |i: usize| chars.get(i).map_or(line.chars().count() + 1, |_| i + 1);
    while i < chars.len() {
        let c = chars[i].1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push((Tok::Open, col(i)));
                i += 1;
            }
            ')' => {
                toks.push((Tok::Close, col(i)));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col(i)));
                i += 1;
            }
            '<' if chars.get(i + 1).map(|p| p.1) == Some('-') => {
                toks.push((Tok::Arrow, col(i)));
                i += 2;
            }
            _ => {
                let start = i;
                while i < chars.len() {
                    let c = chars[i].1;
                    if c.is_whitespace() || matches!(c, '(' | ')' | ',' | '#') {
                        break;
                    }
                    if c == '<' && chars.get(i + 1).map(|p| p.1) == Some('-') {
                        break;
                    }
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|p| p.1).collect();
                toks.push((Tok::Ident(text), col(start)));
            }
        }
    }
    toks
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some((Tok::Ident(s), c)) => Ok((s, c)),
                _ => unreachable!(),
            },
            _ => Err(self.err(format!("expected {what}"))),
        }
    }
}

/// `$i.j` with one-based `i`, `j`.
fn parse_variable(text: &str) -> Option<Variable> {
    let rest = text.strip_prefix('$')?;
    let (i, j) = rest.split_once('.')?;
    let (i, j): (usize, usize) = (i.parse().ok()?, j.parse().ok()?);
    (i >= 1 && j >= 1).then(|| Variable::new(i - 1, j - 1))
}

/// Raw pattern: tokens with columns, resolved once the right-hand side is known.
type RawPattern = Vec<(String, usize)>;

fn parse_rule(line_no: usize, toks: &[(Tok, usize)], end_col: usize) -> Result<Rule, ParseError> {
    let mut cur = Cursor { toks, pos: 0, line: line_no, end_col };
    let (lhs_name, _) = cur.ident("a non-terminal name")?;
    cur.expect(Tok::Open, "`(`")?;
    let mut raw: Vec<RawPattern> = Vec::new();
    if cur.peek() != Some(&Tok::Close) {
        loop {
            let mut pat = Vec::new();
            while let Some(Tok::Ident(_)) = cur.peek() {
                let (s, c) = cur.ident("a pattern token")?;
                pat.push((s, c));
            }
            if pat.is_empty() {
                return Err(cur.err("empty component; write `_` for the empty string"));
            }
            raw.push(pat);
            match cur.peek() {
                Some(Tok::Comma) => cur.pos += 1,
                Some(Tok::Close) => break,
                _ => return Err(cur.err("expected `,` or `)`")),
            }
        }
    }
    cur.expect(Tok::Close, "`)`")?;
    cur.expect(Tok::Arrow, "`<-`")?;

    let mut rhs = Vec::new();
    let mut bound: HashMap<String, Variable> = HashMap::new();
    if cur.peek().is_some() {
        loop {
            let child = rhs.len();
            let (name, _) = cur.ident("a non-terminal name")?;
            cur.expect(Tok::Open, "`(`")?;
            let mut rank = 0;
            if cur.peek() != Some(&Tok::Close) {
                loop {
                    let (arg, c) = cur.ident("a variable")?;
                    let here = Variable::new(child, rank);
                    match parse_variable(&arg) {
                        Some(v) if v == here => {}
                        Some(_) => {
                            return Err(ParseError::new(line_no, c, format!("`{arg}` in position {here}")));
                        }
                        None => {
                            if arg == "_" || bound.insert(arg.clone(), here).is_some() {
                                return Err(ParseError::new(line_no, c, format!("variable `{arg}` bound twice")));
                            }
                        }
                    }
                    rank += 1;
                    match cur.peek() {
                        Some(Tok::Comma) => cur.pos += 1,
                        _ => break,
                    }
                }
            }
            cur.expect(Tok::Close, "`)`")?;
            rhs.push(NonTerminal::new(name, rank));
            match cur.peek() {
                Some(Tok::Comma) => cur.pos += 1,
                None => break,
                _ => return Err(cur.err("expected `,` or end of line")),
            }
        }
    }

    let mut patterns = Vec::with_capacity(raw.len());
    for pat in raw {
        if pat.len() == 1 && pat[0].0 == "_" {
            patterns.push(Pattern::empty());
            continue;
        }
        let mut syms = Vec::with_capacity(pat.len());
        for (text, c) in pat {
            if text == "_" {
                return Err(ParseError::new(line_no, c, "`_` must stand alone"));
            }
            let sym = if let Some(v) = bound.get(&text) {
                Symbol::Var(*v)
            } else if text.starts_with('$') {
                Symbol::Var(parse_variable(&text).ok_or_else(|| {
                    ParseError::new(line_no, c, format!("malformed variable `{text}`, expected $i.j"))
                })?)
            } else {
                Symbol::Terminal(Letter::new(&text))
            };
            syms.push(sym);
        }
        patterns.push(Pattern::new(syms));
    }
    let lhs = NonTerminal::new(lhs_name, patterns.len());
    Ok(Rule::new(lhs, patterns, rhs))
}

fn header<'l>(line: &'l str, key: &str) -> Option<&'l str> {
    let rest = line.trim_start().strip_prefix(key)?;
    rest.trim_start().strip_prefix(':')
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

pub fn parse_grammar(text: &str) -> Result<Mcfg, ParseError> {
    let mut rules = Vec::new();
    let mut start: Option<(String, usize)> = None;
    let mut alphabet: Option<Vec<Letter>> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = strip_comment(line);
        if content.trim().is_empty() {
            continue;
        }
        if let Some(rest) = header(content, "start") {
            let names: Vec<&str> = rest.split_whitespace().collect();
            if names.len() != 1 {
                return Err(ParseError::new(line_no, 1, "`start:` takes exactly one name"));
            }
            start = Some((names[0].to_string(), line_no));
            continue;
        }
        if let Some(rest) = header(content, "alphabet") {
            alphabet = Some(rest.split_whitespace().map(Letter::new).collect());
            continue;
        }
        let toks = tokenize(line);
        rules.push(parse_rule(line_no, &toks, line.chars().count() + 1)?);
    }

    let alphabet = alphabet.unwrap_or_else(|| {
        let mut letters: Vec<Letter> = Vec::new();
        for l in rules.iter().flat_map(|r| r.patterns.iter().flat_map(|p| p.terminals())) {
            if !letters.contains(l) {
                letters.push(l.clone());
            }
        }
        letters
    });
    let start = match start {
        Some((name, line_no)) => {
            let rank = rules
                .iter()
                .flat_map(|r| std::iter::once(&r.lhs).chain(&r.rhs))
                .find(|nt| nt.name() == name)
                .map(NonTerminal::rank)
                .ok_or_else(|| {
                    ParseError::new(line_no, 1, format!("start symbol `{name}` does not occur in any rule"))
                })?;
            NonTerminal::new(name, rank)
        }
        None => rules
            .first()
            .map(|r| r.lhs.clone())
            .ok_or_else(|| ParseError::new(1, 1, "grammar file contains no rules"))?,
    };
    Ok(Mcfg::from_rules(Alphabet::new(alphabet), rules, start))
}

/// The grammar in file syntax; [`parse_grammar`] reads it back unchanged.
pub fn emit_grammar(g: &Mcfg) -> String {
    let mut out = String::new();
    writeln!(out, "start: {}", g.start).unwrap();
    let letters: Vec<&str> = g.alphabet.letters().iter().map(Letter::as_str).collect();
    writeln!(out, "alphabet: {}", letters.join(" ")).unwrap();
    for rule in &g.rules {
        writeln!(out, "{rule}").unwrap();
    }
    out
}

pub fn parse_preorder(text: &str) -> Result<Preorder, ParseError> {
    let mut size: Option<usize> = None;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = strip_comment(line);
        if content.trim().is_empty() {
            continue;
        }
        let column = content.len() - content.trim_start().len() + 1;
        if let Some(rest) = header(content, "m") {
            if size.is_some() {
                return Err(ParseError::new(line_no, column, "`m:` given twice"));
            }
            let m: usize =
                rest.trim().parse().map_err(|_| ParseError::new(line_no, column, "`m:` needs a positive integer"))?;
            if m == 0 {
                return Err(ParseError::new(line_no, column, "`m:` needs a positive integer"));
            }
            size = Some(m);
            continue;
        }
        let m = size.ok_or_else(|| ParseError::new(line_no, column, "expected `m: <size>` before any pair"))?;
        let (lhs, rhs) =
            content.split_once("<=").ok_or_else(|| ParseError::new(line_no, column, "expected `i <= j`"))?;
        let num = |s: &str, col: usize| -> Result<usize, ParseError> {
            let n: usize = s
                .trim()
                .parse()
                .map_err(|_| ParseError::new(line_no, col, format!("`{}` is not an index", s.trim())))?;
            if n == 0 || n > m {
                return Err(ParseError::new(line_no, col, format!("index {n} is outside 1..={m}")));
            }
            Ok(n - 1)
        };
        let rhs_col = lhs.len() + 3 + (rhs.len() - rhs.trim_start().len());
        pairs.push((num(lhs, column)?, num(rhs, rhs_col)?));
    }
    let m = size.ok_or_else(|| ParseError::new(1, 1, "missing `m: <size>` header"))?;
    Ok(Preorder::closure(m, pairs).expect("indices checked"))
}

/// `m: <size>` and every strict pair of the closed relation.
pub fn emit_preorder(p: &Preorder) -> String {
    let mut out = format!("m: {}\n", p.size());
    for (i, j) in p.strict_pairs() {
        writeln!(out, "{} <= {}", i + 1, j + 1).unwrap();
    }
    out
}

/// One node per line, indented by depth, with the term each node derives.
pub fn render_tree(d: &DerivationTree) -> Result<String, TreeError> {
    let mut out = String::new();
    for (path, node) in d.nodes() {
        let term = d.subtree(&path).expect("path from nodes()").term()?;
        writeln!(out, "{}{}    => {}", "  ".repeat(path.depth()), node.rule, term).unwrap();
    }
    Ok(out)
}

/// Nested JSON shape of a derivation tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeJson {
    pub rule: String,
    pub term: Term,
    pub children: Vec<TreeJson>,
}

impl TreeJson {
    pub fn of(d: &DerivationTree) -> Result<Self, TreeError> {
        Ok(TreeJson {
            rule: d.rule.to_string(),
            term: d.term()?,
            children: d.children.iter().map(TreeJson::of).collect::<Result<_, _>>()?,
        })
    }
}
