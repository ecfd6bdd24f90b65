//! Grammars for preorder languages.
//!
//! For a total preorder on `m = 2k` elements the grammar has a start symbol
//! `S` of rank 1 and a single non-terminal `A` of rank `k`:
//!
//! ```text
//! S($1.1 … $1.k) <- A($1.1, …, $1.k)
//! A(_, …, _) <-
//! A(y1 $1.1 y2, …, y(2k-1) $1.k y(2k)) <- A($1.1, …, $1.k)     one rule ρ_j per j
//! ```
//!
//! where `y_i = a_i` if `j ⪯ i` and empty otherwise. Rule `ρ_j` adds one copy
//! of every letter in the up-set of `j`, so components stay of the form
//! `a(2l-1)^n a(2l)^n'` and every constraint is preserved.
//!
//! Odd `m` pads the carrier with an isolated element whose letter is then
//! erased from every pattern. The padded `ρ_{m+1}` becomes the identity rule
//! and is left out. Non-total preorders get one disjoint copy per
//! totalisation behind a dispatching start symbol `S0`.

use std::sync::Arc;

use thiserror::Error;

use super::Preorder;
use crate::derivation::DerivationTree;
use crate::grammar::{indexed_letter, Mcfg, NonTerminal, Pattern, Rule, Symbol, Variable, Word};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("witness derivations need a total preorder")]
    NotTotal,
    #[error("expected {expected} exponents, got {found}")]
    Length { expected: usize, found: usize },
    #[error("exponents {0:?} violate the preorder")]
    Violates(Vec<usize>),
}

/// The grammar generating the language of `p`, of dimension `⌈m/2⌉`.
pub fn build_grammar(p: &Preorder) -> Mcfg {
    if p.is_total() {
        let (rules, start) = total_rules(p, "S", "A");
        return Mcfg::from_rules(p.alphabet(), rules, start);
    }
    let start = NonTerminal::new("S0", 1);
    let mut dispatch = Vec::new();
    let mut copies = Vec::new();
    for (i, t) in p.totalisations().iter().enumerate() {
        let (rules, sub_start) = total_rules(t, &format!("S{}", i + 1), &format!("A{}", i + 1));
        let x = Pattern::new(vec![Symbol::Var(Variable::new(0, 0))]);
        dispatch.push(Rule::new(start.clone(), vec![x], vec![sub_start]));
        copies.extend(rules);
    }
    dispatch.extend(copies);
    Mcfg::from_rules(p.alphabet(), dispatch, start)
}

/// `k = ⌈m/2⌉`.
fn half(m: usize) -> usize {
    m.div_ceil(2)
}

fn total_rules(p: &Preorder, s_name: &str, a_name: &str) -> (Vec<Rule>, NonTerminal) {
    let k = half(p.size());
    let s = NonTerminal::new(s_name, 1);
    let a = NonTerminal::new(a_name, k);
    let concat = Pattern::new((0..k).map(|l| Symbol::Var(Variable::new(0, l))).collect());
    let mut rules =
        vec![Rule::new(s.clone(), vec![concat], vec![a.clone()]), Rule::terminating(a.clone(), vec![Word::empty(); k])];
    rules.extend((0..p.size()).map(|j| rho_with(p, j, &a)));
    (rules, s)
}

fn rho_with(p: &Preorder, j: usize, a: &NonTerminal) -> Rule {
    let k = a.rank();
    // The padding element 2k-1 (odd m) is above nothing but itself, so it
    // never contributes a letter to ρ_j for j < m.
    let y = |i: usize| (i < p.size() && p.le(j, i)).then(|| Symbol::Terminal(indexed_letter(i)));
    let patterns = (0..k)
        .map(|l| {
            y(2 * l).into_iter().chain(std::iter::once(Symbol::Var(Variable::new(0, l)))).chain(y(2 * l + 1)).collect()
        })
        .collect();
    Rule::new(a.clone(), patterns, vec![a.clone()])
}

/// `ρ_j` (zero-based `j`) of the grammar [`build_grammar`] produces for a
/// total `p`. It sits at rule index `2 + j` there.
pub fn rho_rule(p: &Preorder, j: usize) -> Rule {
    rho_with(p, j, &NonTerminal::new("A", half(p.size())))
}

/// The sequence of `ρ_j` indices that, applied in order to `A(ε, …, ε)`,
/// derives `A(a1^n1 a2^n2, …)`.
///
/// Built backwards from the target: with `M` the set of positions holding the
/// maximum exponent, pick the smallest-index `⪯`-minimal `j ∈ M`, lower every
/// maximal entry by one and repeat until the vector is zero.
pub fn witness_derivation(p: &Preorder, exponents: &[usize]) -> Result<Vec<usize>, WitnessError> {
    if !p.is_total() {
        return Err(WitnessError::NotTotal);
    }
    if exponents.len() != p.size() {
        return Err(WitnessError::Length { expected: p.size(), found: exponents.len() });
    }
    if !p.admits(exponents) {
        return Err(WitnessError::Violates(exponents.to_vec()));
    }
    let mut n = exponents.to_vec();
    let mut steps = Vec::new();
    while let Some(&max) = n.iter().max().filter(|&&m| m > 0) {
        let at_max: Vec<usize> = (0..n.len()).filter(|&l| n[l] == max).collect();
        let j = p.minimal_elements(&at_max)[0];
        steps.push(j);
        for &l in &at_max {
            n[l] -= 1;
        }
    }
    steps.reverse();
    Ok(steps)
}

/// Full derivation tree of `S(a1^n1 … am^nm)` in `build_grammar(p)`, for total `p`.
pub fn witness_tree(p: &Preorder, exponents: &[usize]) -> Result<DerivationTree, WitnessError> {
    let steps = witness_derivation(p, exponents)?;
    let g = build_grammar(p);
    let mut node = DerivationTree::leaf(g.rules[1].clone());
    for j in steps {
        node = DerivationTree::new(Arc::new(g.rules[2 + j].clone()), vec![node]);
    }
    Ok(DerivationTree::new(g.rules[0].clone(), vec![node]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{apply_rule, dimension, is_non_deleting, validate_grammar, Term};

    #[test]
    fn m2_reverse_order_rules() {
        // 2 ⪯ 1 one-based
        let p = Preorder::chain(2).unwrap();
        let g = build_grammar(&p);
        let shown: Vec<String> = g.rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(shown, ["S($1.1) <- A($1.1)", "A(_) <-", "A(a1 $1.1) <- A($1.1)", "A(a1 $1.1 a2) <- A($1.1)",]);
        assert!(validate_grammar(&g).is_valid());
        assert!(is_non_deleting(&g));
    }

    #[test]
    fn dimensions() {
        for (m, d) in [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3)] {
            assert_eq!(dimension(&build_grammar(&Preorder::chain(m).unwrap())), d, "m = {m}");
        }
    }

    #[test]
    fn odd_case_drops_padding() {
        let g = build_grammar(&Preorder::chain(1).unwrap());
        let shown: Vec<String> = g.rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(shown, ["S($1.1) <- A($1.1)", "A(_) <-", "A(a1 $1.1) <- A($1.1)"]);
    }

    #[test]
    fn discrete_pair_dispatches_three_ways() {
        let g = build_grammar(&Preorder::discrete(2).unwrap());
        assert_eq!(g.start.name(), "S0");
        assert_eq!(g.rules_for(&g.start).count(), 3);
        assert!(validate_grammar(&g).is_valid());
        assert_eq!(dimension(&g), 1);
    }

    fn replay(p: &Preorder, steps: &[usize]) -> Term {
        let g = build_grammar(p);
        let k = half(p.size());
        let mut t = Term::new(NonTerminal::new("A", k), vec![Word::empty(); k]);
        for &j in steps {
            t = apply_rule(&g.rules[2 + j], &[t]).unwrap();
        }
        t
    }

    #[test]
    fn witness_examples() {
        let p = Preorder::chain(2).unwrap();
        let steps = witness_derivation(&p, &[2, 1]).unwrap();
        assert_eq!(steps, vec![1, 0]);
        assert_eq!(replay(&p, &steps).components, vec![Word::parse("a1 a1 a2")]);

        assert_eq!(witness_derivation(&p, &[0, 0]).unwrap(), Vec::<usize>::new());
        assert_eq!(witness_derivation(&p, &[3, 3]).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn witness_errors() {
        let p = Preorder::chain(2).unwrap();
        assert_eq!(witness_derivation(&p, &[1, 2]), Err(WitnessError::Violates(vec![1, 2])));
        assert_eq!(witness_derivation(&p, &[1]), Err(WitnessError::Length { expected: 2, found: 1 }));
        assert_eq!(witness_derivation(&Preorder::discrete(2).unwrap(), &[0, 0]), Err(WitnessError::NotTotal));
    }

    #[test]
    fn witness_tree_yields_block_word() {
        let p = Preorder::closure(5, [(0, 2), (2, 0), (4, 1), (1, 3), (3, 0)]).unwrap();
        assert!(p.is_total());
        let n = [2, 1, 2, 1, 0];
        let tree = witness_tree(&p, &n).unwrap();
        assert_eq!(tree.yield_word().unwrap(), super::super::block_word(&n));
        assert!(tree.validate(&build_grammar(&p)).valid);
    }
}
