//! `mcfg`: validate, run and compare multiple context-free grammars from the
//! command line.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcfg::enumeration::{enumerate_terms, DiffReport};
use mcfg::format::{emit_grammar, emit_preorder, parse_grammar, parse_preorder, render_tree, TreeJson};
use mcfg::pumping::ExperimentReport;
use mcfg::recognizer::RecognizeError;
use mcfg::{
    build_grammar, compare_languages, dimension, enumerate_language, is_non_deleting, is_normal_form, pump_experiment,
    validate_grammar, Mcfg, Preorder, Recognizer, Word,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mcfg", version, about = "Multiple context-free grammars and preorder languages")]
struct Cli {
    /// Print a JSON envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled experiment orderings. No command samples yet; the
    /// value is recorded in the JSON inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check well-formedness, normal form and non-deletion. Exit 0 iff valid.
    Validate { grammar: String },
    /// Decide membership. Exit 0 on accept, 1 on reject.
    Recognize {
        grammar: String,
        /// Letters separated by whitespace, in one or several arguments.
        word: Vec<String>,
        /// Print a derivation tree on acceptance.
        #[arg(long)]
        parse: bool,
    },
    /// List the words (or terms) up to a length.
    Enumerate {
        grammar: String,
        #[arg(long)]
        max_len: usize,
        /// List every derivable term instead of words.
        #[arg(long)]
        terms: bool,
    },
    /// Print the grammar generating a preorder's language.
    BuildGrammar { preorder: String },
    /// List the total preorders extending a preorder.
    Totalisations {
        preorder: String,
        #[arg(long)]
        count: bool,
    },
    /// Diff a grammar's language against a preorder's. Exit 0 iff equal.
    Compare {
        grammar: String,
        preorder: String,
        #[arg(long)]
        max_len: usize,
    },
    /// Parse a word and pump every nested pair of equal combiners.
    Pump { grammar: String, preorder: String, word: Vec<String> },
}

/// What a command produced: text for humans, a value for `--json`, and
/// the exit code.
struct Outcome {
    text: String,
    result: Value,
    violations: Vec<Value>,
    code: u8,
}

impl Outcome {
    fn ok(text: String, result: Value) -> Self {
        Outcome { text, result, violations: Vec::new(), code: 0 }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    inputs: Value,
    result: Value,
    violations: Vec<Value>,
}

fn read(path: &str) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn load_grammar(path: &str) -> Result<Mcfg, String> {
    parse_grammar(&read(path)?).map_err(|e| e.in_file(path).to_string())
}

fn load_preorder(path: &str) -> Result<Preorder, String> {
    parse_preorder(&read(path)?).map_err(|e| e.in_file(path).to_string())
}

fn word_of(args: &[String]) -> Word {
    let joined = args.join(" ");
    if joined.trim() == "ε" {
        Word::empty()
    } else {
        Word::parse(&joined)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn validate(path: &str) -> Result<Outcome, String> {
    let g = load_grammar(path)?;
    let report = validate_grammar(&g);
    let nf = is_normal_form(&g);
    let mut text = String::new();
    if report.is_valid() {
        writeln!(text, "valid").unwrap();
        writeln!(text, "dimension: {}", dimension(&g)).unwrap();
        writeln!(text, "non-deleting: {}", if is_non_deleting(&g) { "yes" } else { "no" }).unwrap();
        writeln!(text, "normal form: {}", if nf.holds { "yes" } else { "no" }).unwrap();
        for (rule, v) in &nf.violations {
            writeln!(text, "  rule {}: {v}", rule + 1).unwrap();
        }
    } else {
        writeln!(text, "invalid").unwrap();
        for v in &report.violations {
            match v.rule {
                Some(r) => writeln!(text, "  rule {}: {}", r + 1, v.kind).unwrap(),
                None => writeln!(text, "  {}", v.kind).unwrap(),
            }
        }
    }
    for w in &report.warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    let valid = report.is_valid();
    let result = json!({
        "valid": valid,
        "dimension": dimension(&g),
        "non_deleting": valid && is_non_deleting(&g),
        "normal_form": to_value(&nf),
        "warnings": to_value(&report.warnings),
    });
    Ok(Outcome {
        text,
        result,
        violations: report.violations.iter().map(to_value).collect(),
        code: if valid { 0 } else { 1 },
    })
}

fn recognizer_error(e: RecognizeError) -> String {
    match e {
        RecognizeError::Deleting => {
            format!("{e}; use `mcfg enumerate` to list the language of a deleting grammar")
        }
        other => other.to_string(),
    }
}

fn recognize(path: &str, word: &[String], parse: bool) -> Result<Outcome, String> {
    let g = load_grammar(path)?;
    let w = word_of(word);
    let r = Recognizer::new(&g).map_err(recognizer_error)?;
    let tree = if parse { r.parse(&w).map_err(recognizer_error)? } else { None };
    let accepted = if parse { tree.is_some() } else { r.recognize(&w).map_err(recognizer_error)? };
    let mut text = String::from(if accepted { "accept\n" } else { "reject\n" });
    let mut result = json!({ "word": w.to_string(), "accepted": accepted });
    if let Some(t) = &tree {
        text.push_str(&render_tree(t).map_err(|e| e.to_string())?);
        result["tree"] = to_value(&TreeJson::of(t).map_err(|e| e.to_string())?);
    }
    Ok(Outcome { text, result, violations: Vec::new(), code: if accepted { 0 } else { 1 } })
}

fn enumerate(path: &str, max_len: usize, terms: bool) -> Result<Outcome, String> {
    let g = load_grammar(path)?;
    let mut text = String::new();
    let result = if terms {
        let set = enumerate_terms(&g, max_len).map_err(|e| e.to_string())?;
        for t in set.terms() {
            writeln!(text, "{t}").unwrap();
        }
        let listed: Vec<String> = set.terms().iter().map(ToString::to_string).collect();
        json!({ "max_len": max_len, "complete": set.is_complete(), "terms": listed })
    } else {
        let language = enumerate_language(&g, max_len).map_err(|e| e.to_string())?;
        for w in &language.words {
            writeln!(text, "{w}").unwrap();
        }
        let listed: Vec<String> = language.words.iter().map(ToString::to_string).collect();
        json!({ "max_len": max_len, "complete": language.complete, "words": listed })
    };
    if !result["complete"].as_bool().unwrap_or(true) {
        eprintln!("note: the grammar is deleting; the listing may be incomplete");
    }
    Ok(Outcome::ok(text, result))
}

fn build(path: &str) -> Result<Outcome, String> {
    let p = load_preorder(path)?;
    let g = build_grammar(&p);
    let text = emit_grammar(&g);
    let rules: Vec<String> = g.rules.iter().map(ToString::to_string).collect();
    let result = json!({ "dimension": dimension(&g), "start": g.start.name(), "rules": rules, "file": text });
    Ok(Outcome::ok(text, result))
}

fn totalisations(path: &str, count: bool) -> Result<Outcome, String> {
    let p = load_preorder(path)?;
    let ts = p.totalisations();
    let text =
        if count { format!("{}\n", ts.len()) } else { ts.iter().map(emit_preorder).collect::<Vec<_>>().join("\n") };
    let files: Vec<String> = ts.iter().map(emit_preorder).collect();
    let result = if count {
        json!({ "count": ts.len() })
    } else {
        json!({ "count": ts.len(), "totalisations": to_value(&ts), "files": files })
    };
    Ok(Outcome::ok(text, result))
}

fn diff_text(d: &DiffReport) -> String {
    let mut text = String::new();
    if d.is_empty() {
        writeln!(text, "languages agree up to length {}", d.max_len).unwrap();
    } else {
        writeln!(text, "languages differ up to length {}", d.max_len).unwrap();
    }
    for (label, words) in [("only in grammar", &d.only_in_grammar), ("only in preorder", &d.only_in_preorder)] {
        writeln!(text, "{label}: {}", words.len()).unwrap();
        for w in words {
            writeln!(text, "  {w}").unwrap();
        }
    }
    if !d.grammar_complete {
        writeln!(text, "note: the grammar is deleting; its listing may be incomplete").unwrap();
    }
    text
}

fn compare(grammar: &str, preorder: &str, max_len: usize) -> Result<Outcome, String> {
    let g = load_grammar(grammar)?;
    let p = load_preorder(preorder)?;
    let d = compare_languages(&g, &p, max_len).map_err(|e| e.to_string())?;
    Ok(Outcome {
        text: diff_text(&d),
        result: to_value(&d),
        violations: Vec::new(),
        code: if d.is_empty() { 0 } else { 1 },
    })
}

fn flag(b: bool, yes: &'static str, no: &'static str) -> &'static str {
    if b {
        yes
    } else {
        no
    }
}

fn experiment_text(r: &ExperimentReport) -> String {
    let mut text = String::new();
    writeln!(text, "word: {}", r.word).unwrap();
    writeln!(text, "combiners: {}, branching bound: {}", r.combiner_count, r.branching_bound).unwrap();
    writeln!(text, "tree: {}", r.tree).unwrap();
    if r.sites.is_empty() {
        writeln!(text, "no combiner sites").unwrap();
        return text;
    }
    for (i, s) in r.sites.iter().enumerate() {
        writeln!(text, "site {}: outer {}, inner {}, rule {}", i + 1, s.site.outer, s.site.inner, s.site.rule).unwrap();
        let deltas: Vec<String> = s.delta.deltas.iter().map(|(l, d)| format!("{l} {d:+}")).collect();
        let arithmetic = flag(s.delta.arithmetic_holds, "holds", "FAILS");
        writeln!(text, "  deltas: {}; count arithmetic {arithmetic}", deltas.join(", ")).unwrap();
        let inner: Vec<String> = s.delta.inner_components.iter().map(ToString::to_string).collect();
        writeln!(text, "  inner components: ({})", inner.join(", ")).unwrap();
        for (label, y) in [("down", &s.down), ("up", &s.up)] {
            writeln!(
                text,
                "  {label}: {}  [tree {}, {} grammar, {} preorder language]",
                y.word,
                flag(y.valid_tree, "valid", "INVALID"),
                flag(y.in_grammar, "in", "NOT in"),
                flag(y.in_preorder_language, "in", "NOT in"),
            )
            .unwrap();
        }
        if let Some(pairs) = &s.delta.pairs {
            for pd in pairs {
                writeln!(text, "  {} <= {}: {} deltas", pd.lower, pd.upper, flag(pd.equal, "equal", "unequal"))
                    .unwrap();
            }
        }
    }
    if r.leaves_language() {
        writeln!(text, "some pumped yield leaves the preorder language").unwrap();
    }
    text
}

fn pump(grammar: &str, preorder: &str, word: &[String]) -> Result<Outcome, String> {
    let g = load_grammar(grammar)?;
    let p = load_preorder(preorder)?;
    let w = word_of(word);
    let r = pump_experiment(&g, &p, &w).map_err(|e| e.to_string())?;
    let mut result = to_value(&r);
    result["leaves_language"] = json!(r.leaves_language());
    Ok(Outcome::ok(experiment_text(&r), result))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, inputs, outcome) = match &cli.command {
        Command::Validate { grammar } => ("validate", json!({ "grammar": grammar }), validate(grammar)),
        Command::Recognize { grammar, word, parse } => (
            "recognize",
            json!({ "grammar": grammar, "word": word_of(word).to_string(), "parse": parse }),
            recognize(grammar, word, *parse),
        ),
        Command::Enumerate { grammar, max_len, terms } => (
            "enumerate",
            json!({ "grammar": grammar, "max_len": max_len, "terms": terms }),
            enumerate(grammar, *max_len, *terms),
        ),
        Command::BuildGrammar { preorder } => ("build-grammar", json!({ "preorder": preorder }), build(preorder)),
        Command::Totalisations { preorder, count } => {
            ("totalisations", json!({ "preorder": preorder, "count": count }), totalisations(preorder, *count))
        }
        Command::Compare { grammar, preorder, max_len } => (
            "compare",
            json!({ "grammar": grammar, "preorder": preorder, "max_len": max_len }),
            compare(grammar, preorder, *max_len),
        ),
        Command::Pump { grammar, preorder, word } => (
            "pump",
            json!({ "grammar": grammar, "preorder": preorder, "word": word_of(word).to_string() }),
            pump(grammar, preorder, word),
        ),
    };
    let mut inputs = inputs;
    if let Some(seed) = cli.seed {
        inputs["seed"] = json!(seed);
    }
    match outcome {
        Ok(o) => {
            if cli.json {
                let envelope = Envelope { command: name, inputs, result: o.result, violations: o.violations };
                println!("{}", serde_json::to_string_pretty(&envelope).expect("envelope serializes"));
            } else {
                print!("{}", o.text);
            }
            ExitCode::from(o.code)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
