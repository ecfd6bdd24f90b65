//! Brute-force oracles.
//!
//! [`enumerate_terms`] saturates the set of derivable terms whose combined
//! component length fits a budget, breadth-first by derivation depth. For
//! non-deleting grammars every sub-derivation of an in-budget term is itself
//! in budget, so the result is exact; for deleting grammars it is only a
//! lower bound and is flagged as such.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::derivation::DerivationTree;
use crate::grammar::{
    apply_rule, is_non_deleting, validate_grammar, ApplyError, Mcfg, NonTerminal, Term, Violation, Word,
};
use crate::preorder::{block_word, Preorder};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("grammar is invalid ({} violations)", .0.len())]
    InvalidGrammar(Vec<Violation>),
    #[error("more than {0} terms within budget; raise the cap or lower the budget")]
    TooManyTerms(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    /// Hard limit on the number of stored terms.
    pub max_terms: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { max_terms: 2_000_000 }
    }
}

/// How a term was first obtained: `rule` applied to the terms at `children`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rule: usize,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TermSet {
    terms: Vec<Term>,
    witnesses: Vec<Witness>,
    generation: Vec<usize>,
    index: HashMap<Term, usize>,
    complete: bool,
    grammar: Mcfg,
}

impl TermSet {
    /// Terms in discovery order (by generation, then rule order).
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// False when the grammar is deleting and terms may be missing.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }

    pub fn position(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn witness(&self, id: usize) -> &Witness {
        &self.witnesses[id]
    }

    /// Derivation depth at which the term first appeared.
    pub fn generation(&self, id: usize) -> usize {
        self.generation[id]
    }

    /// Re-applies the stored witness step.
    pub fn replay(&self, id: usize) -> Result<Term, ApplyError> {
        let w = &self.witnesses[id];
        let children: Vec<Term> = w.children.iter().map(|&c| self.terms[c].clone()).collect();
        apply_rule(&self.grammar.rules[w.rule], &children)
    }

    /// The derivation tree spelled out by the witnesses.
    pub fn tree(&self, id: usize) -> DerivationTree {
        let w = &self.witnesses[id];
        DerivationTree::new(
            Arc::new(self.grammar.rules[w.rule].clone()),
            w.children.iter().map(|&c| self.tree(c)).collect(),
        )
    }

    /// Words `w` with `S(w)` in the set.
    pub fn words(&self) -> BTreeSet<Word> {
        self.terms.iter().filter(|t| t.head == self.grammar.start).map(|t| t.components[0].clone()).collect()
    }
}

pub fn enumerate_terms(g: &Mcfg, max_total_len: usize) -> Result<TermSet, EnumerationError> {
    enumerate_terms_with(g, max_total_len, EnumerationOptions::default())
}

pub fn enumerate_terms_with(
    g: &Mcfg,
    max_total_len: usize,
    options: EnumerationOptions,
) -> Result<TermSet, EnumerationError> {
    let report = validate_grammar(g);
    if !report.is_valid() {
        return Err(EnumerationError::InvalidGrammar(report.violations));
    }
    let non_deleting = is_non_deleting(g);
    let mut set = TermSet {
        terms: Vec::new(),
        witnesses: Vec::new(),
        generation: Vec::new(),
        index: HashMap::new(),
        complete: non_deleting,
        grammar: g.clone(),
    };
    // head -> total length -> term ids
    let mut buckets: HashMap<NonTerminal, Vec<Vec<usize>>> = HashMap::new();

    let mut pending: Vec<(Term, Witness)> = Vec::new();
    for (ri, rule) in g.rules.iter().enumerate() {
        if rule.is_terminating() {
            let t = apply_rule(rule, &[]).expect("validated");
            if t.total_len() <= max_total_len {
                pending.push((t, Witness { rule: ri, children: Vec::new() }));
            }
        }
    }

    let mut round = 0;
    loop {
        let mut added = 0;
        for (t, w) in pending.drain(..) {
            if set.index.contains_key(&t) {
                continue;
            }
            let id = set.terms.len();
            let by_len = buckets.entry(t.head.clone()).or_default();
            if by_len.len() <= t.total_len() {
                by_len.resize(t.total_len() + 1, Vec::new());
            }
            by_len[t.total_len()].push(id);
            set.index.insert(t.clone(), id);
            set.terms.push(t);
            set.witnesses.push(w);
            set.generation.push(round);
            added += 1;
            if set.terms.len() > options.max_terms {
                return Err(EnumerationError::TooManyTerms(options.max_terms));
            }
        }
        if added == 0 {
            break;
        }

        // Semi-naive step: every tuple must use at least one term from the
        // latest generation. Positions before the first such use are older.
        for (ri, rule) in g.rules.iter().enumerate() {
            for delta_pos in 0..rule.rhs.len() {
                let mut tuple = Vec::with_capacity(rule.rhs.len());
                let ctx = Ctx {
                    set: &set,
                    buckets: &buckets,
                    rhs: &rule.rhs,
                    delta_pos,
                    round,
                    prune: non_deleting,
                    budget: max_total_len,
                };
                ctx.tuples(&mut tuple, 0, &mut |children| {
                    let terms: Vec<Term> = children.iter().map(|&c| set.terms[c].clone()).collect();
                    let t = apply_rule(rule, &terms).expect("validated");
                    if t.total_len() <= max_total_len && !set.index.contains_key(&t) {
                        pending.push((t, Witness { rule: ri, children: children.to_vec() }));
                    }
                });
            }
        }
        round += 1;
    }
    Ok(set)
}

struct Ctx<'a> {
    set: &'a TermSet,
    buckets: &'a HashMap<NonTerminal, Vec<Vec<usize>>>,
    rhs: &'a [NonTerminal],
    delta_pos: usize,
    round: usize,
    prune: bool,
    budget: usize,
}

impl Ctx<'_> {
    fn admits(&self, pos: usize, id: usize) -> bool {
        let g = self.set.generation[id];
        match pos.cmp(&self.delta_pos) {
            std::cmp::Ordering::Less => g < self.round,
            std::cmp::Ordering::Equal => g == self.round,
            std::cmp::Ordering::Greater => g <= self.round,
        }
    }

    fn tuples(&self, tuple: &mut Vec<usize>, used: usize, emit: &mut dyn FnMut(&[usize])) {
        let pos = tuple.len();
        if pos == self.rhs.len() {
            emit(tuple);
            return;
        }
        let Some(by_len) = self.buckets.get(&self.rhs[pos]) else { return };
        let max_len = if self.prune { self.budget - used } else { usize::MAX };
        for (len, ids) in by_len.iter().enumerate().take(max_len.saturating_add(1)) {
            for &id in ids {
                if self.admits(pos, id) {
                    tuple.push(id);
                    self.tuples(tuple, used + len, emit);
                    tuple.pop();
                }
            }
        }
    }
}

/// Words of the grammar up to a length, with a completeness flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Language {
    pub words: BTreeSet<Word>,
    /// False when the grammar is deleting and words may be missing.
    pub complete: bool,
}

pub fn enumerate_language(g: &Mcfg, max_len: usize) -> Result<Language, EnumerationError> {
    let set = enumerate_terms(g, max_len)?;
    Ok(Language { words: set.words(), complete: set.is_complete() })
}

/// Every exponent vector of length `m` with sum at most `max_sum`.
pub fn exponent_vectors(m: usize, max_sum: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for n in 0..=left {
            cur.push(n);
            go(m, left - n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, max_sum, &mut Vec::with_capacity(m), &mut out);
    out
}

/// The words of the preorder's language up to `max_len`, straight from the
/// definition.
pub fn direct_language(p: &Preorder, max_len: usize) -> BTreeSet<Word> {
    exponent_vectors(p.size(), max_len).into_iter().filter(|n| p.admits(n)).map(|n| block_word(&n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub max_len: usize,
    pub only_in_grammar: BTreeSet<Word>,
    pub only_in_preorder: BTreeSet<Word>,
    pub grammar_complete: bool,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.only_in_grammar.is_empty() && self.only_in_preorder.is_empty()
    }
}

pub fn compare_languages(g: &Mcfg, p: &Preorder, max_len: usize) -> Result<DiffReport, EnumerationError> {
    let generated = enumerate_language(g, max_len)?;
    let direct = direct_language(p, max_len);
    Ok(DiffReport {
        max_len,
        only_in_grammar: generated.words.difference(&direct).cloned().collect(),
        only_in_preorder: direct.difference(&generated.words).cloned().collect(),
        grammar_complete: generated.complete,
    })
}
