use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::{Letter, Mcfg, NonTerminal, Rule, Variable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    RankZero(NonTerminal),
    RankConflict { name: String, ranks: Vec<usize> },
    Undeclared(NonTerminal),
    StartRank(usize),
    StartUndeclared(NonTerminal),
    DuplicateLetter(Letter),
    PatternCount { rank: usize, found: usize },
    ChildIndexOutOfRange(Variable),
    ComponentIndexOutOfRange(Variable),
    VariableUsedTwice(Variable),
    ForeignTerminal(Letter),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ViolationKind::*;
        match self {
            RankZero(nt) => write!(f, "non-terminal {nt} has rank 0"),
            RankConflict { name, ranks } => {
                write!(f, "non-terminal {name} is used with ranks {ranks:?}")
            }
            Undeclared(nt) => write!(f, "non-terminal {nt:?} is not declared"),
            StartRank(r) => write!(f, "start symbol has rank {r}, expected 1"),
            StartUndeclared(nt) => write!(f, "start symbol {nt:?} is not declared"),
            DuplicateLetter(l) => write!(f, "letter {l} appears twice in the alphabet"),
            PatternCount { rank, found } => {
                write!(f, "left-hand side has rank {rank} but {found} patterns")
            }
            ChildIndexOutOfRange(v) => write!(f, "variable child index out of range: {v}"),
            ComponentIndexOutOfRange(v) => {
                write!(f, "variable component index out of range: {v}")
            }
            VariableUsedTwice(v) => write!(f, "variable used twice: {v}"),
            ForeignTerminal(l) => write!(f, "terminal {l} is not in the alphabet"),
        }
    }
}

impl Serialize for ViolationKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One broken invariant; `rule` is the index into `Mcfg::rules` when the
/// problem is local to a rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Option<usize>,
    #[serde(rename = "reason")]
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Some(i) => write!(f, "rule {}: {}", i + 1, self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Warning {
    DuplicateRule { first: usize, duplicate: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DuplicateRule { first, duplicate } => {
                write!(f, "rule {} duplicates rule {}", duplicate + 1, first + 1)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    /// Warnings do not make a grammar invalid.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every well-formedness condition on `g` and lists what fails.
pub fn validate_grammar(g: &Mcfg) -> ValidationReport {
    let mut report = ValidationReport::default();
    let global = |kind| Violation { rule: None, kind };

    let mut seen_letters = HashSet::new();
    for l in g.alphabet.letters() {
        if !seen_letters.insert(l) {
            report.violations.push(global(ViolationKind::DuplicateLetter(l.clone())));
        }
    }

    let mut ranks: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for nt in &g.nonterminals {
        if nt.rank() == 0 {
            report.violations.push(global(ViolationKind::RankZero(nt.clone())));
        }
        let entry = ranks.entry(nt.name()).or_default();
        if !entry.contains(&nt.rank()) {
            entry.push(nt.rank());
        }
    }
    for (name, rs) in &ranks {
        if rs.len() > 1 {
            report.violations.push(global(ViolationKind::RankConflict { name: name.to_string(), ranks: rs.clone() }));
        }
    }

    if g.start.rank() != 1 {
        report.violations.push(global(ViolationKind::StartRank(g.start.rank())));
    }
    if !g.nonterminals.contains(&g.start) {
        report.violations.push(global(ViolationKind::StartUndeclared(g.start.clone())));
    }

    for (index, rule) in g.rules.iter().enumerate() {
        for kind in rule_violations(g, rule) {
            report.violations.push(Violation { rule: Some(index), kind });
        }
    }

    let mut first_seen: HashMap<&Rule, usize> = HashMap::new();
    for (index, rule) in g.rules.iter().enumerate() {
        match first_seen.get(rule) {
            Some(&first) => report.warnings.push(Warning::DuplicateRule { first, duplicate: index }),
            None => {
                first_seen.insert(rule, index);
            }
        }
    }
    report
}

fn rule_violations(g: &Mcfg, rule: &Rule) -> Vec<ViolationKind> {
    let mut out = Vec::new();
    for nt in std::iter::once(&rule.lhs).chain(&rule.rhs) {
        if !g.nonterminals.contains(nt) {
            out.push(ViolationKind::Undeclared(nt.clone()));
        }
    }
    if rule.patterns.len() != rule.lhs.rank() {
        out.push(ViolationKind::PatternCount { rank: rule.lhs.rank(), found: rule.patterns.len() });
    }
    let mut used = HashSet::new();
    for v in rule.used_variables() {
        match rule.rhs.get(v.child) {
            None => out.push(ViolationKind::ChildIndexOutOfRange(v)),
            Some(nt) if v.component >= nt.rank() => out.push(ViolationKind::ComponentIndexOutOfRange(v)),
            Some(_) => {}
        }
        if !used.insert(v) {
            out.push(ViolationKind::VariableUsedTwice(v));
        }
    }
    let mut reported = HashSet::new();
    for l in rule.patterns.iter().flat_map(|p| p.terminals()) {
        if !g.alphabet.contains(l) && reported.insert(l) {
            out.push(ViolationKind::ForeignTerminal(l.clone()));
        }
    }
    out
}

/// Largest rank among the declared non-terminals; `g` is an m-MCFG iff this
/// is at most `m`.
pub fn dimension(g: &Mcfg) -> usize {
    g.nonterminals.iter().map(NonTerminal::rank).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalFormViolation {
    /// A non-terminating rule writes letters.
    TerminalInCombination,
    /// A non-terminating rule does not use this variable.
    UnusedVariable(Variable),
    /// A terminating rule writes this many letters instead of exactly one.
    LetterCount(usize),
}

impl fmt::Display for NormalFormViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalFormViolation::TerminalInCombination => f.write_str("non-terminating rule contains letters"),
            NormalFormViolation::UnusedVariable(v) => {
                write!(f, "non-terminating rule does not use {v}")
            }
            NormalFormViolation::LetterCount(n) => {
                write!(f, "terminating rule has {n} letters, expected exactly one")
            }
        }
    }
}

impl Serialize for NormalFormViolation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalFormReport {
    pub holds: bool,
    /// `(rule index, reason)`.
    pub violations: Vec<(usize, NormalFormViolation)>,
}

/// Normal form: non-terminating rules use every available variable exactly
/// once and no letters; terminating rules write exactly one letter.
///
/// Assumes `g` is valid, so "at most once" is already known.
pub fn is_normal_form(g: &Mcfg) -> NormalFormReport {
    let mut violations = Vec::new();
    for (index, rule) in g.rules.iter().enumerate() {
        if rule.is_terminating() {
            let n = rule.terminal_count();
            if n != 1 {
                violations.push((index, NormalFormViolation::LetterCount(n)));
            }
        } else {
            if rule.terminal_count() > 0 {
                violations.push((index, NormalFormViolation::TerminalInCombination));
            }
            let used: HashSet<Variable> = rule.used_variables().collect();
            for v in rule.available_variables() {
                if !used.contains(&v) {
                    violations.push((index, NormalFormViolation::UnusedVariable(v)));
                }
            }
        }
    }
    NormalFormReport { holds: violations.is_empty(), violations }
}

/// True iff every rule uses every variable its right-hand side makes available.
pub fn is_non_deleting(g: &Mcfg) -> bool {
    g.rules.iter().all(|rule| {
        let used: HashSet<Variable> = rule.used_variables().collect();
        rule.available_variables().all(|v| used.contains(&v))
    })
}
