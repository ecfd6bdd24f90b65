//! Derivation trees: ordered rooted trees labelled with rules.
//!
//! A tree derives the term obtained by applying its root label to the terms
//! derived by its children. Subtrees are addressed by [`NodePath`]s, the
//! sequence of child indices walked from the root.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::grammar::{apply_rule, ApplyError, Letter, Mcfg, NonTerminal, Rule, Term, Word};

/// Zero-based child indices from the root. The empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodePath(Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, index: usize) -> Self {
        let mut steps = self.0.clone();
        steps.push(index);
        NodePath(steps)
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// True iff `other` addresses a proper descendant of `self`.
    pub fn is_strict_prefix_of(&self, other: &NodePath) -> bool {
        other.0.len() > self.0.len() && other.0.starts_with(&self.0)
    }
}

impl From<Vec<usize>> for NodePath {
    fn from(v: Vec<usize>) -> Self {
        NodePath(v)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DerivationTree {
    pub rule: Arc<Rule>,
    pub children: Vec<DerivationTree>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("malformed derivation tree at {path}: {source}")]
pub struct TreeError {
    pub path: NodePath,
    #[source]
    pub source: ApplyError,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstituteError {
    #[error("no node at path {0}")]
    BadPath(NodePath),
    #[error("label mismatch at {path}: node is labelled `{found}`, replacement `{replacement}`")]
    LabelMismatch { path: NodePath, found: Arc<Rule>, replacement: Arc<Rule> },
    #[error("head mismatch at {path}: node derives {found:?}, replacement {replacement:?}")]
    HeadMismatch { path: NodePath, found: NonTerminal, replacement: NonTerminal },
}

/// How strictly a replacement subtree must match the node it replaces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Substitution {
    /// Root labels must be the same rule.
    #[default]
    SameLabel,
    /// Root labels only need the same left-hand side non-terminal. Still
    /// yields a derivation tree, just not the one the label-equality
    /// argument talks about.
    SameHead,
}

impl DerivationTree {
    pub fn new(rule: impl Into<Arc<Rule>>, children: Vec<DerivationTree>) -> Self {
        DerivationTree { rule: rule.into(), children }
    }

    pub fn leaf(rule: impl Into<Arc<Rule>>) -> Self {
        DerivationTree::new(rule, Vec::new())
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(DerivationTree::size).sum::<usize>()
    }

    /// Nodes on the longest root-to-leaf path; a leaf has height 1.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(DerivationTree::height).max().unwrap_or(0)
    }

    pub fn subtree(&self, path: &NodePath) -> Option<&DerivationTree> {
        path.steps().iter().try_fold(self, |node, &i| node.children.get(i))
    }

    /// All nodes in pre-order (document order).
    pub fn nodes(&self) -> Vec<(NodePath, &DerivationTree)> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![(NodePath::root(), self)];
        while let Some((path, node)) = stack.pop() {
            for (i, c) in node.children.iter().enumerate().rev() {
                stack.push((path.child(i), c));
            }
            out.push((path, node));
        }
        out
    }

    /// The term this tree derives, recomputed bottom-up.
    pub fn term(&self) -> Result<Term, TreeError> {
        self.term_at(&NodePath::root())
    }

    fn term_at(&self, path: &NodePath) -> Result<Term, TreeError> {
        let children =
            self.children.iter().enumerate().map(|(i, c)| c.term_at(&path.child(i))).collect::<Result<Vec<_>, _>>()?;
        apply_rule(&self.rule, &children).map_err(|source| TreeError { path: path.clone(), source })
    }

    /// The concatenated components of [`term`](Self::term); for a tree rooted
    /// at the start symbol, the word it generates.
    pub fn yield_word(&self) -> Result<Word, TreeError> {
        Ok(self.term()?.concatenation())
    }

    pub fn letter_counts(&self) -> Result<LetterCounts, TreeError> {
        Ok(LetterCounts::of_term(&self.term()?))
    }

    /// Replaces the subtree at `at` by `replacement`, whose root label must
    /// equal the label found there.
    pub fn substitute_subtree(
        &self,
        at: &NodePath,
        replacement: &DerivationTree,
    ) -> Result<DerivationTree, SubstituteError> {
        self.substitute_subtree_with(at, replacement, Substitution::SameLabel)
    }

    pub fn substitute_subtree_with(
        &self,
        at: &NodePath,
        replacement: &DerivationTree,
        mode: Substitution,
    ) -> Result<DerivationTree, SubstituteError> {
        let target = self.subtree(at).ok_or_else(|| SubstituteError::BadPath(at.clone()))?;
        match mode {
            Substitution::SameLabel if target.rule != replacement.rule => {
                return Err(SubstituteError::LabelMismatch {
                    path: at.clone(),
                    found: target.rule.clone(),
                    replacement: replacement.rule.clone(),
                });
            }
            Substitution::SameHead if target.rule.lhs != replacement.rule.lhs => {
                return Err(SubstituteError::HeadMismatch {
                    path: at.clone(),
                    found: target.rule.lhs.clone(),
                    replacement: replacement.rule.lhs.clone(),
                });
            }
            _ => {}
        }
        let mut out = self.clone();
        let mut node = &mut out;
        for &i in at.steps() {
            node = &mut node.children[i];
        }
        *node = replacement.clone();
        Ok(out)
    }

    /// Checks that every label is a rule of `g` and that child counts and
    /// child heads agree with each label's right-hand side.
    pub fn validate(&self, g: &Mcfg) -> TreeReport {
        let mut violations = Vec::new();
        for (path, node) in self.nodes() {
            if !g.rules.iter().any(|r| r == node.rule.as_ref()) {
                violations.push(TreeViolation { path: path.clone(), kind: TreeViolationKind::UnknownRule });
            }
            let rhs = &node.rule.rhs;
            if node.children.len() != rhs.len() {
                violations.push(TreeViolation {
                    path: path.clone(),
                    kind: TreeViolationKind::ChildCount { expected: rhs.len(), found: node.children.len() },
                });
            }
            for (i, (child, expected)) in node.children.iter().zip(rhs).enumerate() {
                if &child.rule.lhs != expected {
                    violations.push(TreeViolation {
                        path: path.child(i),
                        kind: TreeViolationKind::ChildHead {
                            expected: expected.clone(),
                            found: child.rule.lhs.clone(),
                        },
                    });
                }
            }
        }
        TreeReport { valid: violations.is_empty(), violations }
    }

    /// Nodes where letter counts are not additive over children, or where a
    /// terminating node does not contribute exactly one letter. Empty for
    /// every valid tree over a normal-form grammar.
    pub fn count_identity_violations(&self) -> Result<Vec<NodePath>, TreeError> {
        let mut bad = Vec::new();
        self.check_counts(&NodePath::root(), &mut bad)?;
        Ok(bad)
    }

    fn check_counts(&self, path: &NodePath, bad: &mut Vec<NodePath>) -> Result<Term, TreeError> {
        let mut child_terms = Vec::with_capacity(self.children.len());
        for (i, c) in self.children.iter().enumerate() {
            child_terms.push(c.check_counts(&path.child(i), bad)?);
        }
        let term = apply_rule(&self.rule, &child_terms).map_err(|source| TreeError { path: path.clone(), source })?;
        let counts = LetterCounts::of_term(&term);
        let holds = if self.children.is_empty() {
            counts.total() == 1
        } else {
            let mut sum = LetterCounts::default();
            for t in &child_terms {
                sum.add(&LetterCounts::of_term(t));
            }
            sum == counts
        };
        if !holds {
            bad.push(path.clone());
        }
        Ok(term)
    }
}

/// Single-line bracketed form: `[S($1.1) <- A($1.1) [A(_) <-]]`.
impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.rule)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TreeViolationKind {
    UnknownRule,
    ChildCount { expected: usize, found: usize },
    ChildHead { expected: NonTerminal, found: NonTerminal },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeViolation {
    pub path: NodePath,
    pub kind: TreeViolationKind,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TreeViolationKind::UnknownRule => write!(f, "{}: label is not a rule of the grammar", self.path),
            TreeViolationKind::ChildCount { expected, found } => {
                write!(f, "{}: {found} children, label expects {expected}", self.path)
            }
            TreeViolationKind::ChildHead { expected, found } => {
                write!(f, "{}: child derives {found}, parent expects {expected}", self.path)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeReport {
    pub valid: bool,
    pub violations: Vec<TreeViolation>,
}

/// Occurrences of each letter across all components of a term. Letters that
/// do not occur are absent, so two count vectors compare equal exactly when
/// they agree on every letter.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LetterCounts(BTreeMap<Letter, usize>);

impl LetterCounts {
    pub fn of_term(term: &Term) -> Self {
        let mut counts = LetterCounts::default();
        for w in &term.components {
            for l in w.letters() {
                *counts.0.entry(l.clone()).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn get(&self, letter: &Letter) -> usize {
        self.0.get(letter).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn add(&mut self, other: &LetterCounts) {
        for (l, n) in &other.0 {
            *self.0.entry(l.clone()).or_insert(0) += n;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Letter, usize)> {
        self.0.iter().map(|(l, n)| (l, *n))
    }
}
