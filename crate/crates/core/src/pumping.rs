//! Subtree-swap experiments on derivation trees.
//!
//! A *combiner* is a rule with at least two non-terminals on its right-hand
//! side. When the same combiner labels a node and one of its proper
//! descendants, the two subtrees `D₁ ⊋ D₂` form a [`PumpSite`]. Replacing
//! `D₁` by `D₂` pumps the tree down (`D′`), replacing `D₂` by a copy of `D₁`
//! pumps it up (`D″`). Both results are derivation trees of the same
//! grammar, and for non-deleting grammars their letter counts differ from
//! the original by exactly `∓(|D₁|_a − |D₂|_a)` for every letter `a`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::derivation::{DerivationTree, LetterCounts, NodePath, SubstituteError, TreeError};
use crate::grammar::{indexed_letter, Letter, Mcfg, Rule, Word};
use crate::preorder::{Preorder, PreorderError};
use crate::recognizer::{RecognizeError, Recognizer};

pub fn is_combiner(rule: &Rule) -> bool {
    rule.rhs.len() >= 2
}

pub fn combiners(g: &Mcfg) -> Vec<&Rule> {
    g.rules.iter().filter(|r| is_combiner(r)).collect()
}

/// `K`: the longest right-hand side in the grammar, 0 if every rule terminates.
pub fn branching_bound(g: &Mcfg) -> usize {
    g.rules.iter().map(|r| r.rhs.len()).max().unwrap_or(0)
}

/// `C`: the number of combiners.
pub fn combiner_count(g: &Mcfg) -> usize {
    combiners(g).len()
}

/// `K^(2C)`; a tree over a normal-form grammar with more letters than this
/// has a root path carrying some combiner three times, hence pump sites.
pub fn site_forcing_bound(g: &Mcfg) -> u128 {
    let k = branching_bound(g) as u128;
    let exp = 2 * combiner_count(g) as u32;
    k.checked_pow(exp).unwrap_or(u128::MAX)
}

/// Two nested nodes carrying the same combiner label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PumpSite {
    pub outer: NodePath,
    pub inner: NodePath,
    pub rule: Arc<Rule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PumpError {
    #[error("{0} does not address a node")]
    MissingNode(NodePath),
    #[error("{inner} is not a proper descendant of {outer}")]
    NotNested { outer: NodePath, inner: NodePath },
    #[error("nodes at {outer} and {inner} are not both labelled with the site's rule")]
    LabelMismatch { outer: NodePath, inner: NodePath },
    #[error("site rule `{0}` is not a combiner")]
    NotCombiner(Rule),
    #[error(transparent)]
    Substitute(#[from] SubstituteError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error(transparent)]
    Preorder(#[from] PreorderError),
    #[error("the grammar does not generate {0}")]
    Rejected(Word),
}

/// Every ancestor/descendant pair of nodes sharing a combiner label, outer
/// nodes in pre-order and, for each, inner nodes in pre-order.
pub fn find_pump_sites(d: &DerivationTree) -> Vec<PumpSite> {
    let mut sites = Vec::new();
    for (outer, node) in d.nodes() {
        if !is_combiner(&node.rule) {
            continue;
        }
        for (rel, inner_node) in node.nodes().into_iter().skip(1) {
            if inner_node.rule == node.rule {
                let mut inner = outer.steps().to_vec();
                inner.extend_from_slice(rel.steps());
                sites.push(PumpSite { outer: outer.clone(), inner: inner.into(), rule: node.rule.clone() });
            }
        }
    }
    sites
}

fn check_site<'t>(
    d: &'t DerivationTree,
    site: &PumpSite,
) -> Result<(&'t DerivationTree, &'t DerivationTree), PumpError> {
    if !is_combiner(&site.rule) {
        return Err(PumpError::NotCombiner((*site.rule).clone()));
    }
    if !site.outer.is_strict_prefix_of(&site.inner) {
        return Err(PumpError::NotNested { outer: site.outer.clone(), inner: site.inner.clone() });
    }
    let outer = d.subtree(&site.outer).ok_or_else(|| PumpError::MissingNode(site.outer.clone()))?;
    let inner = d.subtree(&site.inner).ok_or_else(|| PumpError::MissingNode(site.inner.clone()))?;
    if outer.rule != site.rule || inner.rule != site.rule {
        return Err(PumpError::LabelMismatch { outer: site.outer.clone(), inner: site.inner.clone() });
    }
    Ok((outer, inner))
}

/// `D′`: the outer subtree replaced by the inner one.
pub fn pump_down(d: &DerivationTree, site: &PumpSite) -> Result<DerivationTree, PumpError> {
    let (_, inner) = check_site(d, site)?;
    Ok(d.substitute_subtree(&site.outer, inner)?)
}

/// `D″`: the inner subtree replaced by a copy of the outer one.
pub fn pump_up(d: &DerivationTree, site: &PumpSite) -> Result<DerivationTree, PumpError> {
    let (outer, _) = check_site(d, site)?;
    let copy = outer.clone();
    Ok(d.substitute_subtree(&site.inner, &copy)?)
}

/// Whether a comparable pair `i ⪯ j` has `|D₁|_i − |D₂|_i = |D₁|_j − |D₂|_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairDelta {
    pub lower: Letter,
    pub upper: Letter,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    /// `|D₁|_a − |D₂|_a` for every letter of the alphabet.
    pub deltas: BTreeMap<Letter, i64>,
    pub original: LetterCounts,
    pub pumped_down: LetterCounts,
    pub pumped_up: LetterCounts,
    /// `|D′|_a = |D|_a − δ_a` and `|D″|_a = |D|_a + δ_a` for every letter.
    pub arithmetic_holds: bool,
    /// Present when a preorder was supplied.
    pub pairs: Option<Vec<PairDelta>>,
    /// Components of the inner subtree's term, `D₂`.
    pub inner_components: Vec<Word>,
}

pub fn delta_report(
    d: &DerivationTree,
    site: &PumpSite,
    g: &Mcfg,
    p: Option<&Preorder>,
) -> Result<DeltaReport, PumpError> {
    let (outer, inner) = check_site(d, site)?;
    let outer_counts = outer.letter_counts()?;
    let inner_term = inner.term()?;
    let inner_counts = LetterCounts::of_term(&inner_term);
    let original = d.letter_counts()?;
    let pumped_down = pump_down(d, site)?.letter_counts()?;
    let pumped_up = pump_up(d, site)?.letter_counts()?;

    let mut letters: Vec<Letter> = g.alphabet.letters().to_vec();
    for counts in [&original, &pumped_down, &pumped_up, &outer_counts] {
        for (l, _) in counts.iter() {
            if !letters.contains(l) {
                letters.push(l.clone());
            }
        }
    }
    let deltas: BTreeMap<Letter, i64> =
        letters.iter().map(|l| (l.clone(), outer_counts.get(l) as i64 - inner_counts.get(l) as i64)).collect();
    let arithmetic_holds = deltas.iter().all(|(l, &delta)| {
        let base = original.get(l) as i64;
        pumped_down.get(l) as i64 == base - delta && pumped_up.get(l) as i64 == base + delta
    });
    let pairs = p.map(|p| {
        p.strict_pairs()
            .into_iter()
            .map(|(i, j)| {
                let (lower, upper) = (indexed_letter(i), indexed_letter(j));
                let delta = |l: &Letter| deltas.get(l).copied().unwrap_or(0);
                PairDelta { equal: delta(&lower) == delta(&upper), lower, upper }
            })
            .collect()
    });
    Ok(DeltaReport {
        deltas,
        original,
        pumped_down,
        pumped_up,
        arithmetic_holds,
        pairs,
        inner_components: inner_term.components,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PumpedYield {
    pub word: Word,
    pub valid_tree: bool,
    pub in_grammar: bool,
    pub in_preorder_language: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiteOutcome {
    pub site: PumpSite,
    pub down: PumpedYield,
    pub up: PumpedYield,
    pub delta: DeltaReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentReport {
    pub word: Word,
    pub combiner_count: usize,
    pub branching_bound: usize,
    pub tree: String,
    pub sites: Vec<SiteOutcome>,
}

impl ExperimentReport {
    /// True iff some pumped yield falls outside the preorder language.
    pub fn leaves_language(&self) -> bool {
        self.sites.iter().any(|s| !s.down.in_preorder_language || !s.up.in_preorder_language)
    }
}

/// Parses `w`, then pumps every site of the resulting tree down and up and
/// tests the pumped words against both the grammar and `p`.
pub fn pump_experiment(g: &Mcfg, p: &Preorder, w: &Word) -> Result<ExperimentReport, PumpError> {
    let recognizer = Recognizer::new(g)?;
    let tree = recognizer.parse(w)?.ok_or_else(|| PumpError::Rejected(w.clone()))?;
    let mut sites = Vec::new();
    for site in find_pump_sites(&tree) {
        let outcome = |t: DerivationTree| -> Result<PumpedYield, PumpError> {
            let word = t.yield_word()?;
            Ok(PumpedYield {
                valid_tree: t.validate(g).valid,
                in_grammar: recognizer.recognize(&word)?,
                in_preorder_language: p.member(&word)?,
                word,
            })
        };
        let down = outcome(pump_down(&tree, &site)?)?;
        let up = outcome(pump_up(&tree, &site)?)?;
        let delta = delta_report(&tree, &site, g, Some(p))?;
        sites.push(SiteOutcome { site, down, up, delta });
    }
    Ok(ExperimentReport {
        word: w.clone(),
        combiner_count: combiner_count(g),
        branching_bound: branching_bound(g),
        tree: tree.to_string(),
        sites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Alphabet, NonTerminal, Pattern, Symbol, Variable};
    use crate::preorder::build_grammar;

    fn s() -> NonTerminal {
        NonTerminal::new("S", 1)
    }

    fn t() -> NonTerminal {
        NonTerminal::new("T", 1)
    }

    fn combine() -> Rule {
        let x = |i| Symbol::Var(Variable::new(i, 0));
        Rule::new(s(), vec![Pattern::new(vec![x(0), x(1)])], vec![s(), t()])
    }

    /// `S($1.1 $2.1) <- S, T; T(a) <-; S(a) <-`
    fn g_pump() -> Mcfg {
        Mcfg::from_rules(
            Alphabet::new(["a"]),
            vec![
                combine(),
                Rule::terminating(t(), vec![Word::parse("a")]),
                Rule::terminating(s(), vec![Word::parse("a")]),
            ],
            s(),
        )
    }

    /// Left spine of `n - 1` combiners.
    fn spine(n: usize) -> DerivationTree {
        let g = g_pump();
        let mut node = DerivationTree::leaf(g.rules[2].clone());
        for _ in 1..n {
            node = DerivationTree::new(g.rules[0].clone(), vec![node, DerivationTree::leaf(g.rules[1].clone())]);
        }
        node
    }

    #[test]
    fn constants() {
        let g = g_pump();
        assert_eq!((combiner_count(&g), branching_bound(&g)), (1, 2));
        let chain = build_grammar(&Preorder::chain(4).unwrap());
        assert_eq!(combiner_count(&chain), 0);
        let only_leaves = Mcfg::from_rules(Alphabet::new(["a"]), vec![g.rules[2].clone()], s());
        assert_eq!((combiner_count(&only_leaves), branching_bound(&only_leaves)), (0, 0));
    }

    #[test]
    fn sites_on_spines() {
        assert_eq!(spine(3).yield_word().unwrap(), Word::parse("a a a"));
        let sites = find_pump_sites(&spine(3));
        assert_eq!(sites.len(), 1);
        assert_eq!((sites[0].outer.clone(), sites[0].inner.clone()), (NodePath::root(), NodePath::from(vec![0])));
        assert_eq!(find_pump_sites(&spine(4)).len(), 3);
        assert!(find_pump_sites(&spine(2)).is_empty());
    }

    #[test]
    fn pumping_a_cubed() {
        let g = g_pump();
        let d = spine(3);
        let site = &find_pump_sites(&d)[0];
        let down = pump_down(&d, site).unwrap();
        let up = pump_up(&d, site).unwrap();
        assert_eq!(down.yield_word().unwrap().len(), 2);
        assert_eq!(up.yield_word().unwrap().len(), 4);
        assert!(down.validate(&g).valid && up.validate(&g).valid);

        let report = delta_report(&d, site, &g, None).unwrap();
        let a = Letter::new("a");
        assert_eq!(report.deltas[&a], 1);
        assert_eq!(report.pumped_down.get(&a), 2);
        assert_eq!(report.pumped_up.get(&a), 4);
        assert!(report.arithmetic_holds);
    }

    #[test]
    fn invalid_sites_are_rejected() {
        let d = spine(3);
        let mut site = find_pump_sites(&d)[0].clone();
        site.inner = NodePath::from(vec![1]);
        assert!(matches!(pump_down(&d, &site), Err(PumpError::LabelMismatch { .. })));
        site.inner = NodePath::root();
        assert!(matches!(pump_up(&d, &site), Err(PumpError::NotNested { .. })));
        site.inner = NodePath::from(vec![0, 0, 0, 0]);
        assert!(matches!(pump_up(&d, &site), Err(PumpError::MissingNode(_))));
    }

    #[test]
    fn epsilon_sibling_gives_zero_deltas() {
        // S($1.1 $2.1) <- S, E ; E(_) <- ; S(a) <-
        let e = NonTerminal::new("E", 1);
        let x = |i| Symbol::Var(Variable::new(i, 0));
        let comb = Rule::new(s(), vec![Pattern::new(vec![x(0), x(1)])], vec![s(), e.clone()]);
        let eps = Rule::terminating(e, vec![Word::empty()]);
        let leaf = Rule::terminating(s(), vec![Word::parse("a")]);
        let g = Mcfg::from_rules(Alphabet::new(["a"]), vec![comb.clone(), eps.clone(), leaf.clone()], s());
        let inner =
            DerivationTree::new(comb.clone(), vec![DerivationTree::leaf(leaf), DerivationTree::leaf(eps.clone())]);
        let d = DerivationTree::new(comb, vec![inner, DerivationTree::leaf(eps)]);
        let site = &find_pump_sites(&d)[0];
        let report = delta_report(&d, site, &g, None).unwrap();
        assert!(report.deltas.values().all(|&v| v == 0));
        assert_eq!(pump_down(&d, site).unwrap().yield_word(), pump_up(&d, site).unwrap().yield_word());
    }

    #[test]
    fn experiment_without_combiners() {
        let p = Preorder::chain(2).unwrap();
        let g = build_grammar(&p);
        let report = pump_experiment(&g, &p, &Word::parse("a1 a1 a2")).unwrap();
        assert!(report.sites.is_empty());
        assert!(matches!(pump_experiment(&g, &p, &Word::parse("a2")), Err(PumpError::Rejected(_))));
    }
}
