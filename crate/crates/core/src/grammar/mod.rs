//! Multiple context-free grammars: letters, words, ranked non-terminals,
//! production rules, terms and rule application.
//!
//! A rule `A(α₁, …, α_r) ← A₁(…), …, A_n(…)` is stored as a left-hand side
//! non-terminal, `r` patterns and the ordered list of right-hand side
//! non-terminals. Variables are positional: `Variable { child, component }`
//! stands for the `component`-th string of the `child`-th right-hand side
//! term. Both indices are zero-based in the API and one-based (`$i.j`) in
//! every textual rendering.

mod apply;
mod check;

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

pub use apply::{apply_rule, ApplyError};
pub use check::{
    dimension, is_non_deleting, is_normal_form, validate_grammar, NormalFormReport, NormalFormViolation,
    ValidationReport, Violation, ViolationKind, Warning,
};

/// An opaque terminal symbol. Names may span several characters (`a1`, `a12`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(name: impl AsRef<str>) -> Self {
        Letter(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Letter {
    fn from(s: &str) -> Self {
        Letter::new(s)
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// A finite sequence of letters.
///
/// Ordering is token-wise lexicographic, with a proper prefix sorting first.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Splits on whitespace: `Word::parse("a1 a2 a2")`.
    pub fn parse(tokens: &str) -> Self {
        tokens.split_whitespace().map(Letter::new).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn count(&self, letter: &Letter) -> usize {
        self.0.iter().filter(|l| *l == letter).count()
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Letters separated by single spaces; the empty word prints as `ε`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(l.as_str())?;
        }
        Ok(())
    }
}

/// Ordered set of letters. Duplicates can be constructed but are reported by
/// [`validate_grammar`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Alphabet {
    letters: Vec<Letter>,
}

impl Alphabet {
    pub fn new<I, L>(letters: I) -> Self
    where
        I: IntoIterator<Item = L>,
        L: Into<Letter>,
    {
        Alphabet { letters: letters.into_iter().map(Into::into).collect() }
    }

    /// `a1, …, am`, the alphabet of the preorder languages.
    pub fn indexed(m: usize) -> Self {
        Alphabet { letters: (0..m).map(indexed_letter).collect() }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn contains(&self, letter: &Letter) -> bool {
        self.letters.contains(letter)
    }

    pub fn position(&self, letter: &Letter) -> Option<usize> {
        self.letters.iter().position(|l| l == letter)
    }
}

/// The letter `a{i+1}` for zero-based index `i`.
pub fn indexed_letter(i: usize) -> Letter {
    Letter::new(format!("a{}", i + 1))
}

/// A ranked non-terminal. Two non-terminals are equal only if both name and
/// rank agree; a grammar using one name at two ranks is rejected by validation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NonTerminal {
    name: Arc<str>,
    rank: usize,
}

impl NonTerminal {
    pub fn new(name: impl AsRef<str>, rank: usize) -> Self {
        NonTerminal { name: Arc::from(name.as_ref()), rank }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl fmt::Debug for NonTerminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.rank)
    }
}

impl fmt::Display for NonTerminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for NonTerminal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

/// `x_{child+1, component+1}`: a component of one right-hand side term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub child: usize,
    pub component: usize,
}

impl Variable {
    pub fn new(child: usize, component: usize) -> Self {
        Variable { child, component }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}.{}", self.child + 1, self.component + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Terminal(Letter),
    Var(Variable),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(l) => write!(f, "{l}"),
            Symbol::Var(v) => write!(f, "{v}"),
        }
    }
}

/// One left-hand side component: a string over letters and variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(Vec<Symbol>);

impl Pattern {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Pattern(symbols)
    }

    pub fn empty() -> Self {
        Pattern(Vec::new())
    }

    /// A pattern made of letters only.
    pub fn word(word: &Word) -> Self {
        Pattern(word.letters().iter().cloned().map(Symbol::Terminal).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.0.iter().filter_map(|s| match s {
            Symbol::Var(v) => Some(*v),
            Symbol::Terminal(_) => None,
        })
    }

    pub fn terminals(&self) -> impl Iterator<Item = &Letter> + '_ {
        self.0.iter().filter_map(|s| match s {
            Symbol::Terminal(l) => Some(l),
            Symbol::Var(_) => None,
        })
    }
}

impl FromIterator<Symbol> for Pattern {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Pattern(iter.into_iter().collect())
    }
}

/// Space-separated symbols, `_` for the empty pattern.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A production rule `lhs(patterns…) ← rhs[0](…), …, rhs[n-1](…)`.
///
/// Construction performs no checks; well-formedness is the business of
/// [`validate_grammar`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: NonTerminal,
    pub patterns: Vec<Pattern>,
    pub rhs: Vec<NonTerminal>,
}

impl Rule {
    pub fn new(lhs: NonTerminal, patterns: Vec<Pattern>, rhs: Vec<NonTerminal>) -> Self {
        Rule { lhs, patterns, rhs }
    }

    /// A rule with no right-hand side whose components are fixed words.
    pub fn terminating(lhs: NonTerminal, components: Vec<Word>) -> Self {
        let patterns = components.iter().map(Pattern::word).collect();
        Rule { lhs, patterns, rhs: Vec::new() }
    }

    pub fn is_terminating(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Every variable the right-hand side makes available, in `(i, j)` order.
    pub fn available_variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.rhs.iter().enumerate().flat_map(|(i, nt)| (0..nt.rank()).map(move |j| Variable::new(i, j)))
    }

    pub fn used_variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.patterns.iter().flat_map(Pattern::variables)
    }

    /// Number of letters written by the rule itself.
    pub fn terminal_count(&self) -> usize {
        self.patterns.iter().map(|p| p.terminals().count()).sum()
    }
}

/// Renders in grammar-file syntax: `A(a1 $1.1 a2) <- A($1.1)`.
impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.lhs)?;
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(") <-")?;
        for (i, nt) in self.rhs.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{nt}(")?;
            for j in 0..nt.rank() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", Variable::new(i, j))?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A grammar `(N, Σ, P, S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mcfg {
    pub nonterminals: Vec<NonTerminal>,
    pub alphabet: Alphabet,
    pub rules: Vec<Rule>,
    pub start: NonTerminal,
}

impl Mcfg {
    pub fn new(nonterminals: Vec<NonTerminal>, alphabet: Alphabet, rules: Vec<Rule>, start: NonTerminal) -> Self {
        Mcfg { nonterminals, alphabet, rules, start }
    }

    /// Collects the non-terminals from `start` and the rules, in order of
    /// first appearance.
    pub fn from_rules(alphabet: Alphabet, rules: Vec<Rule>, start: NonTerminal) -> Self {
        let mut nonterminals = vec![start.clone()];
        for rule in &rules {
            for nt in std::iter::once(&rule.lhs).chain(&rule.rhs) {
                if !nonterminals.contains(nt) {
                    nonterminals.push(nt.clone());
                }
            }
        }
        Mcfg { nonterminals, alphabet, rules, start }
    }

    pub fn rules_for<'a>(&'a self, lhs: &'a NonTerminal) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| &r.lhs == lhs)
    }

    pub fn rule_index(&self, rule: &Rule) -> Option<usize> {
        self.rules.iter().position(|r| r == rule)
    }
}

/// `A(w₁, …, w_r)`: a non-terminal applied to concrete words.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Term {
    pub head: NonTerminal,
    pub components: Vec<Word>,
}

impl Term {
    pub fn new(head: NonTerminal, components: Vec<Word>) -> Self {
        Term { head, components }
    }

    /// Combined length of all components.
    pub fn total_len(&self) -> usize {
        self.components.iter().map(Word::len).sum()
    }

    /// All components concatenated; the word `w` of `S(w)` for the start symbol.
    pub fn concatenation(&self) -> Word {
        let mut w = Word::empty();
        for c in &self.components {
            w.extend_from(c);
        }
        w
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.head)?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}
