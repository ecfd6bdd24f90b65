#![allow(dead_code)]

use std::collections::BTreeSet;

use mcfg::derivation::DerivationTree;
use mcfg::{
    enumerate_language, is_non_deleting, is_normal_form, validate_grammar, Alphabet, Letter, Mcfg, NonTerminal,
    Pattern, Preorder, Rule, Symbol, Variable, Word,
};
use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};

pub fn nt(name: &str, rank: usize) -> NonTerminal {
    NonTerminal::new(name, rank)
}

pub fn var(child: usize, component: usize) -> Symbol {
    Symbol::Var(Variable::new(child, component))
}

pub fn lit(name: &str) -> Symbol {
    Symbol::Terminal(Letter::new(name))
}

/// `S($1.1 $2.1) <- S, T; T(a) <-; S(a) <-` over the given letter.
pub fn g_pump_over(letter: &str) -> Mcfg {
    let (s, t) = (nt("S", 1), nt("T", 1));
    Mcfg::from_rules(
        Alphabet::new([letter]),
        vec![
            Rule::new(s.clone(), vec![Pattern::new(vec![var(0, 0), var(1, 0)])], vec![s.clone(), t.clone()]),
            Rule::terminating(t, vec![Word::parse(letter)]),
            Rule::terminating(s.clone(), vec![Word::parse(letter)]),
        ],
        s,
    )
}

pub fn g_pump() -> Mcfg {
    g_pump_over("a")
}

/// A context-free grammar for `a1^n a2^n a3^k`. Its `P` nests through a
/// binary combiner, and words with `k > n` fall outside the chain language
/// `n1 >= n2 >= n3`.
pub fn over_generating() -> Mcfg {
    let (s, p, e, c) = (nt("S", 1), nt("P", 1), nt("E", 1), nt("C", 1));
    Mcfg::from_rules(
        Alphabet::indexed(3),
        vec![
            Rule::new(s.clone(), vec![Pattern::new(vec![var(0, 0), var(1, 0)])], vec![p.clone(), c.clone()]),
            Rule::new(
                p.clone(),
                vec![Pattern::new(vec![lit("a1"), var(0, 0), lit("a2"), var(1, 0)])],
                vec![p.clone(), e.clone()],
            ),
            Rule::terminating(p, vec![Word::empty()]),
            Rule::terminating(e, vec![Word::empty()]),
            Rule::new(c.clone(), vec![Pattern::new(vec![lit("a3"), var(0, 0)])], vec![c.clone()]),
            Rule::terminating(c, vec![Word::empty()]),
        ],
        s,
    )
}

/// Every word over `alphabet` of length at most `max_len`.
pub fn all_words(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in alphabet.letters() {
                let mut longer = w.clone();
                longer.push(l.clone());
                next.push(longer);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Total preorders extending `p`, found by testing every boolean matrix.
pub fn brute_force_totalisations(p: &Preorder) -> BTreeSet<Preorder> {
    let m = p.size();
    let cells = m * m;
    (0u64..1 << cells)
        .filter_map(|bits| {
            let relation: Vec<bool> = (0..cells).map(|c| bits >> c & 1 == 1).collect();
            Preorder::from_relation(m, relation).ok()
        })
        .filter(|q| q.is_total() && q.extends(p))
        .collect()
}

/// The distinct preorders obtained by closing every subset of the
/// off-diagonal pairs of `[m]`.
pub fn all_preorders(m: usize) -> Vec<Preorder> {
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let set: BTreeSet<Preorder> = (0u64..1 << pairs.len())
        .map(|bits| {
            let chosen = pairs.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &p)| p);
            Preorder::closure(m, chosen).unwrap()
        })
        .collect();
    set.into_iter().collect()
}

/// Shape of the random grammars drawn by [`random_grammar`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavour {
    /// Letters only in terminating rules, one each; combinations use every
    /// variable once.
    NormalForm,
    /// Any non-deleting grammar; letters may appear anywhere.
    Free,
}

/// A valid, non-deleting grammar with at most `max_rules` rules over at most
/// three letters, generating at least three words of length at most 6. `S`
/// has rank 1 and combines `A` and `B`, which have rank 1 or 2.
pub fn random_grammar(rng: &mut StdRng, flavour: Flavour, max_rules: usize) -> Mcfg {
    loop {
        let g = draw(rng, flavour, max_rules);
        let nf = is_normal_form(&g).holds;
        if validate_grammar(&g).is_valid()
            && is_non_deleting(&g)
            && (flavour == Flavour::Free || nf)
            && enumerate_language(&g, 6).is_ok_and(|l| l.words.len() >= 3)
        {
            return g;
        }
    }
}

fn draw(rng: &mut StdRng, flavour: Flavour, max_rules: usize) -> Mcfg {
    let letter_count = rng.random_range(1..=3);
    let letters: Vec<&str> = ["a", "b", "c"][..letter_count].to_vec();
    let inner = [nt("A", rng.random_range(1..=2)), nt("B", rng.random_range(1..=2))];
    let rule_count = rng.random_range(3..=max_rules.max(3));

    let random_word = |rng: &mut StdRng, max: usize| -> Vec<Symbol> {
        let len = rng.random_range(0..=max);
        (0..len).map(|_| lit(letters.choose(rng).unwrap())).collect()
    };
    let terminating = |rng: &mut StdRng, lhs: NonTerminal| -> Rule {
        let mut patterns: Vec<Pattern> = match flavour {
            Flavour::Free => (0..lhs.rank()).map(|_| Pattern::new(random_word(rng, 2))).collect(),
            Flavour::NormalForm => (0..lhs.rank()).map(|_| Pattern::empty()).collect(),
        };
        if flavour == Flavour::NormalForm {
            let slot = rng.random_range(0..lhs.rank());
            patterns[slot] = Pattern::new(vec![lit(letters.choose(rng).unwrap())]);
        }
        Rule::new(lhs, patterns, Vec::new())
    };
    let combining = |rng: &mut StdRng, lhs: NonTerminal| -> Rule {
        let rhs: Vec<NonTerminal> = (0..rng.random_range(1..=2)).map(|_| inner.choose(rng).unwrap().clone()).collect();
        let mut vars: Vec<Symbol> =
            rhs.iter().enumerate().flat_map(|(i, n)| (0..n.rank()).map(move |j| var(i, j))).collect();
        vars.shuffle(rng);
        let mut patterns: Vec<Vec<Symbol>> = vec![Vec::new(); lhs.rank()];
        for v in vars {
            let slot = rng.random_range(0..lhs.rank());
            patterns[slot].push(v);
        }
        if flavour == Flavour::Free {
            for p in &mut patterns {
                for l in random_word(rng, 1) {
                    let at = rng.random_range(0..=p.len());
                    p.insert(at, l);
                }
            }
        }
        Rule::new(lhs, patterns.into_iter().map(Pattern::new).collect(), rhs)
    };

    let mut rules = vec![combining(rng, nt("S", 1)), terminating(rng, inner[0].clone())];
    while rules.len() < rule_count {
        let lhs = inner.choose(rng).unwrap().clone();
        let rule = if rng.random_bool(0.4) { terminating(rng, lhs) } else { combining(rng, lhs) };
        rules.push(rule);
    }
    Mcfg::from_rules(Alphabet::new(letters), rules, nt("S", 1))
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Every node path of `d` whose label equals `rule`.
pub fn nodes_labelled<'t>(d: &'t DerivationTree, rule: &Rule) -> Vec<&'t DerivationTree> {
    d.nodes().into_iter().filter(|(_, n)| n.rule.as_ref() == rule).map(|(_, n)| n).collect()
}
