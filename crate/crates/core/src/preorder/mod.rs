//! Preorders on `{0, …, m-1}` and the letter-count languages they define.
//!
//! Element `i` stands for the letter `a{i+1}`. The language of a preorder
//! contains the block words `a1^n1 a2^n2 … am^nm` whose exponents satisfy
//! `n_i <= n_j` whenever `i ⪯ j`.

mod construction;

use std::fmt;

use itertools::Itertools;
use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;
use serde::Serialize;
use thiserror::Error;

use crate::grammar::{indexed_letter, Alphabet, Letter, Word};

pub use construction::{build_grammar, rho_rule, witness_derivation, witness_tree, WitnessError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PreorderError {
    #[error("a preorder needs at least one element")]
    Empty,
    #[error("pair ({0}, {1}) is outside 1..={2}")]
    OutOfRange(usize, usize, usize),
    #[error("relation has {found} entries, expected {expected}")]
    MatrixSize { expected: usize, found: usize },
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not transitive: {0} ⪯ {1} ⪯ {2} but not {0} ⪯ {2}")]
    NotTransitive(usize, usize, usize),
    #[error("letter {0} is not one of a1..a{1}")]
    ForeignLetter(Letter, usize),
}

/// A reflexive, transitive relation on `{0, …, size-1}`, stored as a
/// row-major boolean matrix with `relation[i * size + j] == (i ⪯ j)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Preorder {
    size: usize,
    relation: Vec<bool>,
}

impl Preorder {
    /// Reflexive-transitive closure of the zero-based pairs `(i, j)` meaning `i ⪯ j`.
    pub fn closure<I>(size: usize, pairs: I) -> Result<Self, PreorderError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if size == 0 {
            return Err(PreorderError::Empty);
        }
        let mut relation = vec![false; size * size];
        for i in 0..size {
            relation[i * size + i] = true;
        }
        for (i, j) in pairs {
            if i >= size || j >= size {
                return Err(PreorderError::OutOfRange(i + 1, j + 1, size));
            }
            relation[i * size + j] = true;
        }
        // Warshall
        for k in 0..size {
            for i in 0..size {
                if relation[i * size + k] {
                    for j in 0..size {
                        if relation[k * size + j] {
                            relation[i * size + j] = true;
                        }
                    }
                }
            }
        }
        Ok(Preorder { size, relation })
    }

    /// Takes a full matrix and checks that it is a preorder.
    pub fn from_relation(size: usize, relation: Vec<bool>) -> Result<Self, PreorderError> {
        if size == 0 {
            return Err(PreorderError::Empty);
        }
        if relation.len() != size * size {
            return Err(PreorderError::MatrixSize { expected: size * size, found: relation.len() });
        }
        let at = |i: usize, j: usize| relation[i * size + j];
        for i in 0..size {
            if !at(i, i) {
                return Err(PreorderError::NotReflexive(i));
            }
        }
        for (i, j, k) in itertools::iproduct!(0..size, 0..size, 0..size) {
            if at(i, j) && at(j, k) && !at(i, k) {
                return Err(PreorderError::NotTransitive(i, j, k));
            }
        }
        Ok(Preorder { size, relation })
    }

    /// Only the diagonal.
    pub fn discrete(size: usize) -> Result<Self, PreorderError> {
        Self::closure(size, [])
    }

    /// `size-1 ⪯ … ⪯ 1 ⪯ 0`, whose language is `n1 >= n2 >= … >= nk`.
    pub fn chain(size: usize) -> Result<Self, PreorderError> {
        Self::closure(size, (1..size).map(|i| (i, i - 1)))
    }

    /// The total preorder `i ⪯ j ⇔ rank[i] <= rank[j]`.
    pub fn from_ranks(ranks: &[usize]) -> Result<Self, PreorderError> {
        let size = ranks.len();
        if size == 0 {
            return Err(PreorderError::Empty);
        }
        let relation = itertools::iproduct!(0..size, 0..size).map(|(i, j)| ranks[i] <= ranks[j]).collect();
        Ok(Preorder { size, relation })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `i ⪯ j`.
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.relation[i * self.size + j]
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.le(i, j) || self.le(j, i)
    }

    /// All related pairs `(i, j)` with `i != j`, row-major.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        itertools::iproduct!(0..self.size, 0..self.size).filter(|&(i, j)| i != j && self.le(i, j)).collect()
    }

    pub fn is_total(&self) -> bool {
        itertools::iproduct!(0..self.size, 0..self.size).all(|(i, j)| self.comparable(i, j))
    }

    pub fn comparability_graph(&self) -> ComparabilityGraph {
        let mut graph = UnGraph::<usize, ()>::with_capacity(self.size, 0);
        let nodes: Vec<_> = (0..self.size).map(|i| graph.add_node(i)).collect();
        for (i, j) in (0..self.size).tuple_combinations() {
            if self.comparable(i, j) {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
        ComparabilityGraph { graph }
    }

    pub fn is_connected(&self) -> bool {
        self.comparability_graph().is_connected()
    }

    /// True iff every pair related by `other` is related by `self`.
    pub fn extends(&self, other: &Preorder) -> bool {
        self.size == other.size && self.relation.iter().zip(&other.relation).all(|(&mine, &theirs)| mine || !theirs)
    }

    /// Elements of `among` with nothing strictly below them inside `among`.
    pub fn minimal_elements(&self, among: &[usize]) -> Vec<usize> {
        among.iter().copied().filter(|&j| among.iter().all(|&i| !self.le(i, j) || self.le(j, i))).collect()
    }

    /// All total preorders extending `self`.
    ///
    /// Every total preorder is an ordered partition of the carrier into
    /// equivalence blocks; these are generated as set partitions (restricted
    /// growth strings) followed by every ordering of the blocks, then
    /// filtered by extension.
    pub fn totalisations(&self) -> Vec<Preorder> {
        let mut out = Vec::new();
        for blocks in set_partitions(self.size) {
            let block_count = blocks.iter().max().map_or(0, |b| b + 1);
            for order in (0..block_count).permutations(block_count) {
                let ranks: Vec<usize> = blocks.iter().map(|&b| order[b]).collect();
                let candidate = Preorder::from_ranks(&ranks).expect("non-empty carrier");
                if candidate.extends(self) {
                    out.push(candidate);
                }
            }
        }
        out
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::indexed(self.size)
    }

    /// True iff the exponent vector satisfies every constraint `i ⪯ j ⇒ n_i <= n_j`.
    pub fn admits(&self, exponents: &[usize]) -> bool {
        exponents.len() == self.size
            && itertools::iproduct!(0..self.size, 0..self.size)
                .all(|(i, j)| !self.le(i, j) || exponents[i] <= exponents[j])
    }

    /// The exponents of a block word `a1^n1 … am^nm`, or `None` when the
    /// letters are out of order.
    pub fn exponents(&self, w: &Word) -> Result<Option<Vec<usize>>, PreorderError> {
        let alphabet = self.alphabet();
        let mut exps = vec![0; self.size];
        let mut last = 0;
        let mut in_order = true;
        for l in w.letters() {
            let i = alphabet.position(l).ok_or_else(|| PreorderError::ForeignLetter(l.clone(), self.size))?;
            if i < last {
                in_order = false;
            }
            last = i;
            exps[i] += 1;
        }
        Ok(in_order.then_some(exps))
    }

    /// Membership in the letter-count language of `self`.
    pub fn member(&self, w: &Word) -> Result<bool, PreorderError> {
        Ok(self.exponents(w)?.is_some_and(|n| self.admits(&n)))
    }
}

/// The block word with the given exponents.
pub fn block_word(exponents: &[usize]) -> Word {
    exponents.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat_n(indexed_letter(i), n)).collect()
}

/// Restricted growth strings of length `n`: `s[0] = 0`, `s[i] <= 1 + max(s[..i])`.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            extend(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        extend(&mut vec![0], 0, n, &mut out);
    }
    out
}

impl fmt::Debug for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Preorder({}; {self})", self.size)
    }
}

/// Strict pairs as one-based `i<=j`, comma separated.
impl fmt::Display for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self.strict_pairs();
        if pairs.is_empty() {
            return f.write_str("discrete");
        }
        let shown = pairs.iter().map(|(i, j)| format!("{}<={}", i + 1, j + 1)).join(", ");
        f.write_str(&shown)
    }
}

#[derive(Serialize)]
struct PreorderRepr {
    m: usize,
    pairs: Vec<(usize, usize)>,
}

/// `{"m": 3, "pairs": [[2, 1], …]}` with one-based strict pairs.
impl Serialize for Preorder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PreorderRepr { m: self.size, pairs: self.strict_pairs().into_iter().map(|(i, j)| (i + 1, j + 1)).collect() }
            .serialize(s)
    }
}

/// Simple undirected graph joining distinct comparable elements.
#[derive(Clone, Debug)]
pub struct ComparabilityGraph {
    graph: UnGraph<usize, ()>,
}

impl ComparabilityGraph {
    pub fn vertex_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .graph
            .edge_indices()
            .filter_map(|e| self.graph.edge_endpoints(e))
            .map(|(a, b)| {
                let (a, b) = (self.graph[a], self.graph[b]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn is_connected(&self) -> bool {
        connected_components(&self.graph) <= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_adds_transitive_pair() {
        // one-based {(3,2), (2,1)}
        let p = Preorder::closure(3, [(2, 1), (1, 0)]).unwrap();
        assert!(p.le(2, 0));
        assert_eq!(p, Preorder::chain(3).unwrap());
    }

    #[test]
    fn closure_of_nothing_is_discrete() {
        let p = Preorder::closure(2, []).unwrap();
        assert!(p.le(0, 0) && p.le(1, 1) && !p.le(0, 1) && !p.le(1, 0));
    }

    #[test]
    fn symmetric_pair_is_allowed() {
        let p = Preorder::closure(2, [(0, 1), (1, 0)]).unwrap();
        assert!(p.is_total());
        assert!(p.le(0, 1) && p.le(1, 0));
    }

    #[test]
    fn closure_rejects_out_of_range() {
        assert_eq!(Preorder::closure(2, [(0, 2)]), Err(PreorderError::OutOfRange(1, 3, 2)));
        assert_eq!(Preorder::closure(0, []), Err(PreorderError::Empty));
    }

    #[test]
    fn from_relation_checks_axioms() {
        assert_eq!(Preorder::from_relation(2, vec![true, false, false, false]), Err(PreorderError::NotReflexive(1)));
        let r = vec![true, true, false, false, true, true, false, false, true];
        assert!(matches!(Preorder::from_relation(3, r), Err(PreorderError::NotTransitive(0, 1, 2))));
    }

    #[test]
    fn totality_and_connectivity() {
        let chain = Preorder::chain(4).unwrap();
        assert!(chain.is_total() && chain.is_connected());

        let discrete = Preorder::discrete(2).unwrap();
        assert!(!discrete.is_total() && !discrete.is_connected());

        let vee = Preorder::closure(3, [(0, 1), (2, 1)]).unwrap();
        assert!(!vee.is_total());
        assert!(vee.is_connected());
        assert_eq!(vee.comparability_graph().edges(), vec![(0, 1), (1, 2)]);

        assert!(Preorder::discrete(1).unwrap().is_connected());
    }

    #[test]
    fn totalisation_counts() {
        assert_eq!(Preorder::discrete(2).unwrap().totalisations().len(), 3);
        assert_eq!(Preorder::discrete(3).unwrap().totalisations().len(), 13);
        assert_eq!(Preorder::discrete(4).unwrap().totalisations().len(), 75);
        // A total preorder is its own totalisation, and so is every
        // coarsening of it: 2^(m-1) of them for a chain.
        let chain = Preorder::chain(3).unwrap();
        let ts = chain.totalisations();
        assert_eq!(ts.len(), 4);
        assert!(ts.contains(&chain));
        assert!(ts.iter().all(|t| t.is_total() && t.extends(&chain)));
    }

    #[test]
    fn membership() {
        let p = Preorder::chain(3).unwrap();
        assert!(p.member(&Word::parse("a1 a1 a2 a3")).unwrap());
        assert!(!p.member(&Word::parse("a1 a2 a2")).unwrap());
        assert!(!p.member(&Word::parse("a2 a1")).unwrap());
        assert!(p.member(&Word::empty()).unwrap());
        assert!(matches!(p.member(&Word::parse("a4")), Err(PreorderError::ForeignLetter(..))));
    }

    #[test]
    fn minimal_elements_respect_equivalence() {
        let p = Preorder::closure(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        assert_eq!(p.minimal_elements(&[0, 1]), vec![0, 1]);
        assert_eq!(p.minimal_elements(&[0, 1, 2]), vec![2]);
    }

    #[test]
    fn display_lists_one_based_pairs() {
        assert_eq!(Preorder::chain(2).unwrap().to_string(), "2<=1");
        assert_eq!(Preorder::discrete(2).unwrap().to_string(), "discrete");
    }
}
