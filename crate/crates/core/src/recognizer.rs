//! Bottom-up deductive recognition over span tuples.
//!
//! An item `A[(s₁,e₁), …, (s_r,e_r)]` asserts `⊢ A(w[s₁..e₁], …, w[s_r..e_r])`.
//! Terminating rules seed items wherever their fixed strings occur in `w`
//! (the empty string occurs at every position). A rule fires on a tuple of
//! items when each of its patterns, read left to right, lays its variables'
//! spans and its letters contiguously over `w`. The item set is finite, so
//! the agenda drains to a fixpoint; `w` is accepted iff `S[(0, |w|)]` is in
//! it.
//!
//! Only non-deleting grammars are supported: a component that is dropped by
//! some rule need not occur in `w` at all, so it has no span.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::derivation::DerivationTree;
use crate::grammar::{is_non_deleting, validate_grammar, Letter, Mcfg, Symbol, Variable, Violation, Word};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RecognizeError {
    #[error("grammar is invalid ({} violations)", .0.len())]
    InvalidGrammar(Vec<Violation>),
    #[error("grammar is deleting; span-based recognition is unsound for it, use the enumeration oracle instead")]
    Deleting,
    #[error("letter {letter} at position {position} is not in the alphabet")]
    ForeignLetter { position: usize, letter: Letter },
}

/// Half-open interval `start..end` of input positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Item {
    nt: usize,
    spans: Vec<Span>,
}

/// Letters are compared as alphabet positions.
type Sym = usize;

/// A pattern split at its variables: `lead v₀ gap₀ v₁ gap₁ … v_k gap_k`.
/// Without variables, `lead` is the whole pattern.
#[derive(Debug)]
struct Compiled {
    lead: Vec<Sym>,
    parts: Vec<(Variable, Vec<Sym>)>,
}

/// A constraint between spans that can be checked once the children it
/// mentions are all assigned.
#[derive(Debug)]
enum Check {
    /// `lead` must end exactly where the variable starts.
    Lead(Variable, usize),
    /// The variable's component is followed by gap `(pattern, part)`; when
    /// `next` is set, the next variable starts right after the gap.
    Gap { var: Variable, pattern: usize, part: usize, next: Option<Variable> },
}

#[derive(Debug)]
struct CompiledRule {
    lhs: usize,
    rhs: Vec<usize>,
    patterns: Vec<Compiled>,
    /// `checks[i]` runs once children `0..=i` are assigned.
    checks: Vec<Vec<Check>>,
}

/// A grammar prepared for repeated recognition.
#[derive(Debug)]
pub struct Recognizer<'g> {
    grammar: &'g Mcfg,
    rules: Vec<CompiledRule>,
    /// `(rule, position)` pairs where a non-terminal occurs on a right-hand side.
    uses: Vec<Vec<(usize, usize)>>,
    start: usize,
}

impl<'g> Recognizer<'g> {
    pub fn new(grammar: &'g Mcfg) -> Result<Self, RecognizeError> {
        let report = validate_grammar(grammar);
        if !report.is_valid() {
            return Err(RecognizeError::InvalidGrammar(report.violations));
        }
        if !is_non_deleting(grammar) {
            return Err(RecognizeError::Deleting);
        }
        let mut nt_ids = HashMap::new();
        for (i, nt) in grammar.nonterminals.iter().enumerate() {
            nt_ids.entry(nt.clone()).or_insert(i);
        }
        let letter = |l: &Letter| grammar.alphabet.position(l).expect("validated");
        let mut rules = Vec::with_capacity(grammar.rules.len());
        let mut uses = vec![Vec::new(); grammar.nonterminals.len()];
        for (ri, rule) in grammar.rules.iter().enumerate() {
            let rhs: Vec<usize> = rule.rhs.iter().map(|nt| nt_ids[nt]).collect();
            for (pos, &nt) in rhs.iter().enumerate() {
                uses[nt].push((ri, pos));
            }
            let mut patterns = Vec::new();
            let mut checks: Vec<Vec<Check>> = (0..rhs.len()).map(|_| Vec::new()).collect();
            for (pi, pattern) in rule.patterns.iter().enumerate() {
                let mut lead = Vec::new();
                let mut parts: Vec<(Variable, Vec<Sym>)> = Vec::new();
                for sym in pattern.symbols() {
                    match sym {
                        Symbol::Terminal(l) => match parts.last_mut() {
                            Some((_, gap)) => gap.push(letter(l)),
                            None => lead.push(letter(l)),
                        },
                        Symbol::Var(v) => parts.push((*v, Vec::new())),
                    }
                }
                if let Some((first, _)) = parts.first() {
                    checks[first.child].push(Check::Lead(*first, pi));
                }
                for k in 0..parts.len() {
                    let var = parts[k].0;
                    let next = parts.get(k + 1).map(|p| p.0);
                    let level = next.map_or(var.child, |n| n.child.max(var.child));
                    checks[level].push(Check::Gap { var, pattern: pi, part: k, next });
                }
                patterns.push(Compiled { lead, parts });
            }
            rules.push(CompiledRule { lhs: nt_ids[&rule.lhs], rhs, patterns, checks });
        }
        Ok(Recognizer { grammar, rules, uses, start: nt_ids[&grammar.start] })
    }

    pub fn recognize(&self, w: &Word) -> Result<bool, RecognizeError> {
        let input = self.encode(w)?;
        let chart = self.saturate(&input);
        Ok(chart.goal(self.start, input.len()).is_some())
    }

    /// One derivation tree of `S(w)`, or `None` when `w` is rejected. The tree
    /// is the first derivation found under FIFO agenda order.
    pub fn parse(&self, w: &Word) -> Result<Option<DerivationTree>, RecognizeError> {
        let input = self.encode(w)?;
        let chart = self.saturate(&input);
        Ok(chart.goal(self.start, input.len()).map(|id| self.extract(&chart, id)))
    }

    /// Number of items in the fixpoint for `w`.
    pub fn chart_size(&self, w: &Word) -> Result<usize, RecognizeError> {
        Ok(self.saturate(&self.encode(w)?).items.len())
    }

    fn encode(&self, w: &Word) -> Result<Vec<Sym>, RecognizeError> {
        w.letters()
            .iter()
            .enumerate()
            .map(|(position, l)| {
                self.grammar
                    .alphabet
                    .position(l)
                    .ok_or_else(|| RecognizeError::ForeignLetter { position, letter: l.clone() })
            })
            .collect()
    }

    fn saturate(&self, input: &[Sym]) -> Chart {
        let mut chart = Chart::new(self.grammar.nonterminals.len());
        for (ri, rule) in self.rules.iter().enumerate() {
            if rule.rhs.is_empty() {
                for spans in self.lhs_spans(rule, &[], input) {
                    chart.discover(Item { nt: rule.lhs, spans }, ri, Vec::new());
                }
            }
        }
        while let Some(id) = chart.agenda.pop_front() {
            let nt = chart.items[id].nt;
            chart.done[nt].push(id);
            for &(ri, pos) in &self.uses[nt] {
                let rule = &self.rules[ri];
                let mut assigned = Vec::with_capacity(rule.rhs.len());
                self.combine(ri, pos, id, input, &mut assigned, &mut chart);
            }
        }
        chart
    }

    /// Fills child positions left to right, with position `pos` fixed to the
    /// freshly processed item, pruning as soon as a check fails.
    fn combine(
        &self,
        ri: usize,
        pos: usize,
        fixed: usize,
        input: &[Sym],
        assigned: &mut Vec<usize>,
        chart: &mut Chart,
    ) {
        let rule = &self.rules[ri];
        let i = assigned.len();
        if i == rule.rhs.len() {
            let children: Vec<&[Span]> = assigned.iter().map(|&c| chart.items[c].spans.as_slice()).collect();
            let found = self.lhs_spans(rule, &children, input);
            for spans in found {
                chart.discover(Item { nt: rule.lhs, spans }, ri, assigned.clone());
            }
            return;
        }
        let candidates: Vec<usize> = if i == pos { vec![fixed] } else { chart.done[rule.rhs[i]].clone() };
        for c in candidates {
            assigned.push(c);
            let ok = {
                let children: Vec<&[Span]> = assigned.iter().map(|&c| chart.items[c].spans.as_slice()).collect();
                rule.checks[i].iter().all(|check| check_holds(rule, check, &children, input))
            };
            if ok {
                self.combine(ri, pos, fixed, input, assigned, chart);
            }
            assigned.pop();
        }
    }

    /// Every span tuple the rule's left-hand side can take, given children
    /// whose checks already passed.
    fn lhs_spans(&self, rule: &CompiledRule, children: &[&[Span]], input: &[Sym]) -> Vec<Vec<Span>> {
        let mut tuples: Vec<Vec<Span>> = vec![Vec::with_capacity(rule.patterns.len())];
        for p in &rule.patterns {
            let options: Vec<Span> = match (p.parts.first(), p.parts.last()) {
                (Some((first, _)), Some((last, trail))) => {
                    let s = children[first.child][first.component].start - p.lead.len();
                    let e = children[last.child][last.component].end + trail.len();
                    vec![Span { start: s, end: e }]
                }
                _ => occurrences(input, &p.lead),
            };
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    options.iter().map(move |&s| {
                        let mut t = t.clone();
                        t.push(s);
                        t
                    })
                })
                .collect();
        }
        tuples
    }

    fn extract(&self, chart: &Chart, id: usize) -> DerivationTree {
        let (ri, children) = &chart.back[id];
        DerivationTree::new(
            Arc::new(self.grammar.rules[*ri].clone()),
            children.iter().map(|&c| self.extract(chart, c)).collect(),
        )
    }
}

fn matches_at(input: &[Sym], at: usize, letters: &[Sym]) -> bool {
    input.get(at..at + letters.len()).is_some_and(|s| s == letters)
}

fn occurrences(input: &[Sym], letters: &[Sym]) -> Vec<Span> {
    (0..=input.len())
        .filter(|&s| matches_at(input, s, letters))
        .map(|s| Span { start: s, end: s + letters.len() })
        .collect()
}

fn check_holds(rule: &CompiledRule, check: &Check, children: &[&[Span]], input: &[Sym]) -> bool {
    let span = |v: &Variable| children[v.child][v.component];
    match check {
        Check::Lead(v, pi) => {
            let lead = &rule.patterns[*pi].lead;
            let s = span(v).start;
            s >= lead.len() && matches_at(input, s - lead.len(), lead)
        }
        Check::Gap { var, pattern, part, next } => {
            let gap = &rule.patterns[*pattern].parts[*part].1;
            let e = span(var).end;
            matches_at(input, e, gap) && next.is_none_or(|n| span(&n).start == e + gap.len())
        }
    }
}

struct Chart {
    items: Vec<Item>,
    index: HashMap<Item, usize>,
    /// First derivation found for each item: rule index and child item ids.
    back: Vec<(usize, Vec<usize>)>,
    agenda: VecDeque<usize>,
    /// Processed item ids per non-terminal.
    done: Vec<Vec<usize>>,
}

impl Chart {
    fn new(nonterminals: usize) -> Self {
        Chart {
            items: Vec::new(),
            index: HashMap::new(),
            back: Vec::new(),
            agenda: VecDeque::new(),
            done: vec![Vec::new(); nonterminals],
        }
    }

    fn discover(&mut self, item: Item, rule: usize, children: Vec<usize>) {
        if self.index.contains_key(&item) {
            return;
        }
        let id = self.items.len();
        self.index.insert(item.clone(), id);
        self.items.push(item);
        self.back.push((rule, children));
        self.agenda.push_back(id);
    }

    fn goal(&self, start: usize, len: usize) -> Option<usize> {
        self.index.get(&Item { nt: start, spans: vec![Span { start: 0, end: len }] }).copied()
    }
}

/// `⊢ S(w)` for a non-deleting grammar.
pub fn recognize(g: &Mcfg, w: &Word) -> Result<bool, RecognizeError> {
    Recognizer::new(g)?.recognize(w)
}

/// A derivation tree of `S(w)` if `w` is in the language.
pub fn parse(g: &Mcfg, w: &Word) -> Result<Option<DerivationTree>, RecognizeError> {
    Recognizer::new(g)?.parse(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Alphabet, NonTerminal, Pattern, Rule};
    use crate::preorder::{build_grammar, Preorder};

    fn chain2() -> Mcfg {
        build_grammar(&Preorder::chain(2).unwrap())
    }

    #[test]
    fn chain_words() {
        let g = chain2();
        assert!(recognize(&g, &Word::parse("a1 a1 a2")).unwrap());
        assert!(!recognize(&g, &Word::parse("a1 a2 a2")).unwrap());
        assert!(recognize(&g, &Word::empty()).unwrap());
        assert!(!recognize(&g, &Word::parse("a2 a1")).unwrap());
    }

    #[test]
    fn parse_a1_a2_uses_rho_two() {
        let g = chain2();
        let tree = parse(&g, &Word::parse("a1 a2")).unwrap().unwrap();
        let labels: Vec<String> = tree.nodes().iter().map(|(_, n)| n.rule.to_string()).collect();
        assert_eq!(labels, ["S($1.1) <- A($1.1)", "A(a1 $1.1 a2) <- A($1.1)", "A(_) <-"]);
        assert!(tree.validate(&g).valid);
        assert!(parse(&g, &Word::parse("a2")).unwrap().is_none());
    }

    #[test]
    fn rank_two_grammar() {
        let g = build_grammar(&Preorder::chain(4).unwrap());
        assert!(!recognize(&g, &Word::parse("a1 a1 a2 a3 a3 a4")).unwrap());
        assert!(recognize(&g, &Word::parse("a1 a1 a2 a2 a3 a4")).unwrap());
        let tree = parse(&g, &Word::parse("a1 a1 a2 a2 a3 a4")).unwrap().unwrap();
        assert_eq!(tree.yield_word().unwrap(), Word::parse("a1 a1 a2 a2 a3 a4"));
    }

    #[test]
    fn foreign_letter_is_an_input_error() {
        let err = recognize(&chain2(), &Word::parse("a1 b")).unwrap_err();
        assert_eq!(err, RecognizeError::ForeignLetter { position: 1, letter: Letter::new("b") });
    }

    #[test]
    fn deleting_grammar_is_refused() {
        let s = NonTerminal::new("S", 1);
        let b = NonTerminal::new("B", 2);
        let g = Mcfg::from_rules(
            Alphabet::new(["a"]),
            vec![
                Rule::new(s.clone(), vec![Pattern::new(vec![Symbol::Var(Variable::new(0, 0))])], vec![b.clone()]),
                Rule::terminating(b, vec![Word::parse("a"), Word::parse("a")]),
            ],
            s,
        );
        assert_eq!(recognize(&g, &Word::parse("a")), Err(RecognizeError::Deleting));
    }

    #[test]
    fn variable_free_component_in_combining_rule() {
        // S($1.1 $2.1) <- A(..), B(..) with A(x, a) style free components.
        let s = NonTerminal::new("S", 1);
        let a = NonTerminal::new("A", 2);
        let x = |i, j| Symbol::Var(Variable::new(i, j));
        let b = Symbol::Terminal(Letter::new("b"));
        let g = Mcfg::from_rules(
            Alphabet::new(["a", "b"]),
            vec![
                Rule::new(s.clone(), vec![Pattern::new(vec![x(0, 1), x(0, 0)])], vec![a.clone()]),
                Rule::new(
                    a.clone(),
                    vec![Pattern::new(vec![x(0, 0), x(0, 1)]), Pattern::new(vec![b])],
                    vec![a.clone()],
                ),
                Rule::terminating(a, vec![Word::parse("a"), Word::empty()]),
            ],
            s,
        );
        // A(a, ε) → A(a, b) → A(a b, b) ; S gives "b a b"
        assert!(recognize(&g, &Word::parse("a")).unwrap());
        assert!(recognize(&g, &Word::parse("b a")).unwrap());
        assert!(recognize(&g, &Word::parse("b a b")).unwrap());
        assert!(!recognize(&g, &Word::parse("a b")).unwrap());
    }
}
