use thiserror::Error;

use super::{NonTerminal, Rule, Symbol, Term, Variable, Word};

/// Rule application failed. Every variant is a caller bug.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("rule expects {expected} child terms, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("child {index} has head {found:?}, rule expects {expected:?}")]
    HeadMismatch { index: usize, expected: NonTerminal, found: NonTerminal },
    #[error("child {index} has {found} components, its head has rank {rank}")]
    ComponentCount { index: usize, rank: usize, found: usize },
    #[error("variable {0} has no matching child component")]
    Unbound(Variable),
}

/// Applies `rule` to `children`: component `l` of the result is pattern `l`
/// with every variable `x_{i,j}` replaced by component `j` of child `i`.
pub fn apply_rule(rule: &Rule, children: &[Term]) -> Result<Term, ApplyError> {
    if children.len() != rule.rhs.len() {
        return Err(ApplyError::Arity { expected: rule.rhs.len(), found: children.len() });
    }
    for (index, (child, expected)) in children.iter().zip(&rule.rhs).enumerate() {
        if &child.head != expected {
            return Err(ApplyError::HeadMismatch { index, expected: expected.clone(), found: child.head.clone() });
        }
        if child.components.len() != child.head.rank() {
            return Err(ApplyError::ComponentCount { index, rank: child.head.rank(), found: child.components.len() });
        }
    }

    let mut components = Vec::with_capacity(rule.patterns.len());
    for pattern in &rule.patterns {
        let mut w = Word::empty();
        for sym in pattern.symbols() {
            match sym {
                Symbol::Terminal(l) => w.push(l.clone()),
                Symbol::Var(v) => {
                    let part = children
                        .get(v.child)
                        .and_then(|c| c.components.get(v.component))
                        .ok_or(ApplyError::Unbound(*v))?;
                    w.extend_from(part);
                }
            }
        }
        components.push(w);
    }
    Ok(Term::new(rule.lhs.clone(), components))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Letter, Pattern};

    fn var(i: usize, j: usize) -> Symbol {
        Symbol::Var(Variable::new(i, j))
    }

    fn t(s: &str) -> Symbol {
        Symbol::Terminal(Letter::new(s))
    }

    #[test]
    fn rho_two_on_empty_term() {
        let a = NonTerminal::new("A", 1);
        let rho2 = Rule::new(a.clone(), vec![Pattern::new(vec![t("a1"), var(0, 0), t("a2")])], vec![a.clone()]);
        let out = apply_rule(&rho2, &[Term::new(a.clone(), vec![Word::empty()])]).unwrap();
        assert_eq!(out, Term::new(a, vec![Word::parse("a1 a2")]));
    }

    #[test]
    fn start_rule_concatenates_components() {
        let a = NonTerminal::new("A", 2);
        let s = NonTerminal::new("S", 1);
        let rule = Rule::new(s.clone(), vec![Pattern::new(vec![var(0, 0), var(0, 1)])], vec![a.clone()]);
        let child = Term::new(a, vec![Word::parse("a1"), Word::parse("a3")]);
        assert_eq!(apply_rule(&rule, &[child]).unwrap(), Term::new(s, vec![Word::parse("a1 a3")]));
    }

    #[test]
    fn two_children() {
        let (a, b, c) = (NonTerminal::new("A", 1), NonTerminal::new("B", 1), NonTerminal::new("C", 1));
        let rule = Rule::new(a.clone(), vec![Pattern::new(vec![var(0, 0), var(1, 0)])], vec![b.clone(), c.clone()]);
        let out =
            apply_rule(&rule, &[Term::new(b, vec![Word::parse("a b")]), Term::new(c, vec![Word::parse("c")])]).unwrap();
        assert_eq!(out, Term::new(a, vec![Word::parse("a b c")]));
    }

    #[test]
    fn arity_and_head_errors() {
        let (a, b) = (NonTerminal::new("A", 1), NonTerminal::new("B", 1));
        let rule = Rule::new(a.clone(), vec![Pattern::new(vec![var(0, 0)])], vec![b.clone()]);
        assert_eq!(apply_rule(&rule, &[]), Err(ApplyError::Arity { expected: 1, found: 0 }));
        let wrong = Term::new(a.clone(), vec![Word::empty()]);
        assert!(matches!(apply_rule(&rule, &[wrong]), Err(ApplyError::HeadMismatch { index: 0, .. })));
    }

    #[test]
    fn out_of_range_variable_is_unbound() {
        let (a, b) = (NonTerminal::new("A", 1), NonTerminal::new("B", 1));
        let rule = Rule::new(a, vec![Pattern::new(vec![var(1, 0)])], vec![b.clone()]);
        let err = apply_rule(&rule, &[Term::new(b, vec![Word::empty()])]).unwrap_err();
        assert_eq!(err, ApplyError::Unbound(Variable::new(1, 0)));
    }
}
