//! Multiple context-free grammars (MCFGs) and the letter-count languages of
//! preorders.
//!
//! * [`grammar`]: grammars, rules, terms, rule application and
//!   well-formedness checks.
//! * [`derivation`]: derivation trees, their terms and letter counts, and
//!   subtree substitution.
//! * [`recognizer`]: membership and parsing for non-deleting grammars.
//! * [`enumeration`]: brute-force language enumeration and comparison.
//! * [`preorder`]: preorders, totalisations, and the grammar of dimension
//!   `⌈m/2⌉` generating `{ a1^n1 … am^nm | i ⪯ j ⇒ n_i <= n_j }`.
//! * [`pumping`]: pump sites and subtree-swap experiments.
//! * [`format`]: grammar and preorder files, tree rendering.
//!
//! ```
//! use mcfg::{build_grammar, recognize, Preorder, Word};
//!
//! // n1 >= n2 >= n3
//! let p = Preorder::chain(3).unwrap();
//! let g = build_grammar(&p);
//! assert!(recognize(&g, &Word::parse("a1 a1 a2 a3")).unwrap());
//! assert!(!recognize(&g, &Word::parse("a1 a2 a2")).unwrap());
//! ```
//!
//! The guide in `book/` walks through each part; its code listings run as
//! doctests of this crate.

pub mod derivation;
pub mod enumeration;
pub mod format;
pub mod grammar;
pub mod preorder;
pub mod pumping;
pub mod recognizer;

pub use derivation::{DerivationTree, LetterCounts, NodePath};
pub use enumeration::{compare_languages, direct_language, enumerate_language, enumerate_terms, DiffReport};
pub use grammar::{
    apply_rule, dimension, is_non_deleting, is_normal_form, validate_grammar, Alphabet, Letter, Mcfg, NonTerminal,
    Pattern, Rule, Symbol, Term, Variable, Word,
};
pub use preorder::{build_grammar, witness_derivation, Preorder};
pub use pumping::{find_pump_sites, pump_down, pump_experiment, pump_up, PumpSite};
pub use recognizer::{parse, recognize, Recognizer};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        };
    }
    chapter!(introduction, "introduction.md");
    chapter!(grammars, "grammars.md");
    chapter!(derivations, "derivations.md");
    chapter!(recognition, "recognition.md");
    chapter!(enumeration, "enumeration.md");
    chapter!(preorders, "preorders.md");
    chapter!(pumping, "pumping.md");
    chapter!(files_and_cli, "files-and-cli.md");
}
