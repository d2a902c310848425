//! Input documents, run configuration and the JSON reports of each command.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automaton::{
    brute_force_counts, build_degree_d_automaton, build_quadratic_automaton, rational_series, DEFAULT_STATE_BUDGET,
};
use crate::cancel::{cancel_interval, morse_boundary, DEFAULT_PATH_CAP};
use crate::error::{Error, Result};
use crate::facets::{check_crossing_condition, FacetOrder};
use crate::fixtures;
use crate::groebner::{toric_groebner_basis, Binomial, GroebnerBasis, TermOrder};
use crate::homology::{tor_ranks, verify_vanishing, OrderComplex};
use crate::linalg::Field;
use crate::morse::{build_face_matching, direct_interval_system, reduced_euler, unreduced};
use crate::semigroup::{Multidegree, SemigroupPresentation};

pub const GB_CEILING: u32 = 24;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub dimension: usize,
    pub generators: Vec<Vec<u32>>,
    #[serde(default)]
    pub term_order: Option<TermOrder>,
    #[serde(default)]
    pub groebner_basis: Option<Vec<Binomial>>,
    #[serde(default)]
    pub targets: Vec<Vec<u32>>,
}

/// A validated document: the semigroup, its order and a verified basis.
#[derive(Debug)]
pub struct Loaded {
    pub doc: InputDocument,
    pub sg: SemigroupPresentation,
    pub order: TermOrder,
    pub gb: GroebnerBasis,
}

pub fn parse_input(text: &str) -> Result<Loaded> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    load(doc)
}

pub fn load(doc: InputDocument) -> Result<Loaded> {
    let sg = SemigroupPresentation::new(doc.dimension, doc.generators.clone())?;
    let order = match &doc.term_order {
        Some(o) => TermOrder::new(o.kind.clone(), o.priority.clone())?,
        None => TermOrder::default_lex(sg.ngens()),
    };
    if order.nvars() != sg.ngens() {
        return Err(Error::InvalidTermOrder(format!("order has {} variables, expected {}", order.nvars(), sg.ngens())));
    }
    let gb = match &doc.groebner_basis {
        Some(els) => GroebnerBasis::verify_supplied(&sg, order.clone(), els.clone(), GB_CEILING)?,
        None => toric_groebner_basis(&sg, &order, GB_CEILING)?,
    };
    for t in &doc.targets {
        if t.len() != sg.dimension() || !sg.contains(&Multidegree(t.clone())) {
            return Err(Error::Parse { location: "targets".into(), message: format!("{t:?} is not in the semigroup") });
        }
    }
    Ok(Loaded { doc, sg, order, gb })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Gb,
    Interval,
    Chains,
    Morse,
    Cancel,
    Betti,
    Automaton,
    Series,
    VerifyBounds,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "morsegraded", version, about = "Discrete Morse theory on affine semigroup intervals")]
pub struct RunConfig {
    /// JSON input document.
    #[arg(long, conflicts_with = "example")]
    pub input: Option<PathBuf>,
    /// Built-in semigroup instead of an input file: e1, e2, e3, sharp2,
    /// sharp3, quartic, num345 or free<n>.
    #[arg(long)]
    pub example: Option<String>,
    #[arg(long, value_enum, default_value = "full")]
    pub command: Command,
    /// Largest degree of the multidegrees considered.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub degree_window: u32,
    /// Field characteristic, 0 for the rationals; repeatable.
    #[arg(long = "field", default_values_t = vec![0u32])]
    pub fields: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP, value_parser = positive)]
    pub path_cap: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET, value_parser = positive)]
    pub state_budget: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed echoed in reports for reproducible sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include wall-clock timings, which makes output vary between runs.
    #[arg(long)]
    pub timing: bool,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

impl RunConfig {
    pub fn for_example(name: &str, command: Command, degree_window: u32) -> RunConfig {
        RunConfig::parse_from(["morsegraded", "--example", name, "--degree-window", &degree_window.to_string()])
            .with_command(command)
    }

    fn with_command(mut self, command: Command) -> Self {
        self.command = command;
        self
    }
}

fn fields(cfg: &RunConfig) -> Result<Vec<Field>> {
    cfg.fields
        .iter()
        .map(|&p| match p {
            0 => Ok(Field::RATIONALS),
            p if (2..=65521).contains(&p) && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) => Ok(Field::prime(p)),
            p => Err(Error::Parse { location: "--field".into(), message: format!("{p} is not 0 or a prime below 65536") }),
        })
        .collect()
}

fn load_config(cfg: &RunConfig) -> Result<Loaded> {
    match (&cfg.input, &cfg.example) {
        (Some(path), _) => parse_input(&std::fs::read_to_string(path)?),
        (None, Some(name)) => {
            let sg = fixtures::by_name(name)
                .ok_or_else(|| Error::Parse { location: "--example".into(), message: format!("unknown example {name}") })?;
            let doc = InputDocument {
                dimension: sg.dimension(),
                generators: sg.generators().iter().map(|g| g.0.clone()).collect(),
                term_order: None,
                groebner_basis: None,
                targets: vec![],
            };
            load(doc)
        }
        (None, None) => Err(Error::Parse { location: "arguments".into(), message: "pass --input or --example".into() }),
    }
}

fn targets(l: &Loaded, window: u32) -> Vec<Multidegree> {
    if l.doc.targets.is_empty() {
        l.sg.elements_up_to_degree(window).into_iter().filter(|m| !m.is_zero()).collect()
    } else {
        l.doc.targets.iter().map(|t| Multidegree(t.clone())).collect()
    }
}

fn gb_report(l: &Loaded) -> Value {
    json!({
        "order": l.order,
        "degree": l.gb.degree,
        "reduced": l.gb.is_reduced(),
        "elements": l.gb.elements.iter().map(|b| json!({"plus": b.plus, "minus": b.minus})).collect::<Vec<_>>(),
    })
}

fn morse_report(l: &Loaded, fo: &FacetOrder, lambda: &Multidegree) -> Result<Value> {
    let m = build_face_matching(&l.sg, &l.gb, fo, &Multidegree::zero(l.sg.dimension()), lambda)?;
    Ok(json!({
        "multidegree": lambda,
        "facets": m.facets.iter().zip(&m.systems).map(|(f, s)| json!({
            "labels": f.labels, "i_intervals": s.i_intervals, "j_intervals": s.j_intervals,
        })).collect::<Vec<_>>(),
        "critical": m.critical,
        "face_counts": m.table.count_by_dim(),
        "notes": m.notes,
    }))
}

fn cancel_report(l: &Loaded, fo: &FacetOrder, lambda: &Multidegree, cap: usize) -> Result<Value> {
    let (m, r) = cancel_interval(&l.sg, &l.gb, fo, lambda, cap)?;
    let boundary = morse_boundary(&m, &r);
    Ok(json!({
        "multidegree": lambda,
        "morse_numbers": r.morse_numbers(),
        "unreduced_morse_numbers": unreduced(&r.morse_numbers(), m.table.len() > 1),
        "survivors": r.survivors.iter().map(|c| json!({
            "dim": c.dim, "labels": c.labels, "ranks": c.ranks, "word": c.token_word(&m),
        })).collect::<Vec<_>>(),
        "ledger": r.ledger.iter().map(|p| json!({
            "tau": p.tau.labels, "tau_ranks": p.tau.ranks, "sigma": p.sigma.labels, "sigma_ranks": p.sigma.ranks,
            "path_length": p.path.cells.len(), "verdict": p.verdict, "rule": p.rule,
        })).collect::<Vec<_>>(),
        "boundary": boundary,
        "minimal": boundary.is_minimal(),
        "notes": r.notes,
    }))
}

fn automaton_of(l: &Loaded, fo: &FacetOrder, budget: usize) -> Result<crate::automaton::MorseAutomaton> {
    if l.gb.effective_degree() == 2 {
        build_quadratic_automaton(&l.gb, fo, budget)
    } else {
        build_degree_d_automaton(&l.gb, fo, budget)
    }
}

fn series_report(l: &Loaded, fo: &FacetOrder, budget: usize) -> Result<Value> {
    let a = automaton_of(l, fo, budget)?;
    let s = rational_series(&a);
    let counts: Vec<String> = a.count_words(8).iter().map(|c| c.to_string()).collect();
    let expansion: Vec<String> = s.expand(8).iter().map(|c| c.to_string()).collect();
    Ok(json!({
        "series": s.to_string(),
        "numerator": s.numerator.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "denominator": s.denominator.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "expansion": expansion,
        "word_counts": counts,
        "brute_force_counts": brute_force_counts(&l.gb, fo, 8),
    }))
}

/// Cross-module checks over the window: Morse inequalities, Euler
/// characteristic, minimality in the quadratic case, automaton words
/// against survivors, the crossing condition and the two descriptions of
/// skipped intervals.
fn consistency(l: &Loaded, fo: &FacetOrder, window: u32, cap: usize, budget: usize) -> Result<Value> {
    let a = automaton_of(l, fo, budget)?;
    let quadratic = l.gb.effective_degree() == 2;
    let zero = Multidegree::zero(l.sg.dimension());
    let mut checks = 0usize;
    let mut failures: Vec<String> = Vec::new();
    for lambda in targets(l, window) {
        let (m, r) = cancel_interval(&l.sg, &l.gb, fo, &lambda, cap)?;
        let oc = OrderComplex::build(&l.sg, &zero, &lambda);
        let betti = oc.reduced_betti(Field::RATIONALS);
        let mn = r.morse_numbers();
        let mut fail = |what: &str| failures.push(format!("{:?}: {what}", lambda.0));
        checks += 4;
        if (0..betti.len()).any(|k| mn.get(k).copied().unwrap_or(0) < betti[k]) {
            fail("Morse inequality");
        }
        if reduced_euler(&mn) != oc.reduced_euler() {
            fail("Euler characteristic");
        }
        let pad = betti.len().max(mn.len());
        let (mut b2, mut m2) = (betti.clone(), mn.clone());
        b2.resize(pad, 0);
        m2.resize(pad, 0);
        if quadratic && b2 != m2 {
            fail("survivors differ from Betti numbers");
        }
        let survivors: BTreeSet<Vec<Vec<usize>>> = r.survivors.iter().map(|c| c.token_word(&m)).collect();
        let mut words = BTreeSet::new();
        for f in l.sg.fiber_factorizations(&lambda) {
            words.extend(a.words_with_content(&f));
        }
        if survivors != words {
            fail("accepted words differ from survivors");
        }
        if check_crossing_condition(&m.facets).is_err() {
            fail("crossing condition");
        }
        for j in 0..m.facets.len() {
            checks += 1;
            let direct = direct_interval_system(&m.facets, j)?;
            let chars: Vec<(usize, usize)> = m.systems[j].i_intervals.iter().map(|r| (r.lo, r.hi)).collect();
            if direct != chars {
                fail("interval characterization");
            }
        }
    }
    Ok(json!({ "checks": checks, "failures": failures }))
}

/// Runs one command and returns the serialized report.
pub fn run_command(cfg: &RunConfig) -> Result<String> {
    let start = Instant::now();
    let l = load_config(cfg)?;
    let fo = FacetOrder::new(l.order.clone());
    let fields = fields(cfg)?;
    let window = cfg.degree_window;
    if cfg.format == Format::Tsv {
        if cfg.command != Command::Betti {
            return Err(Error::Parse { location: "--format".into(), message: "tsv is only available for betti".into() });
        }
        return Ok(fields.iter().map(|&f| tor_ranks(&l.sg, window, f).to_tsv()).collect::<Vec<_>>().join("\n"));
    }
    let each = |f: &dyn Fn(&Multidegree) -> Result<Value>| -> Result<Value> {
        Ok(Value::Array(targets(&l, window).iter().map(f).collect::<Result<Vec<_>>>()?))
    };
    let result = match cfg.command {
        Command::Gb => gb_report(&l),
        Command::Interval => each(&|lambda| {
            let ivl = l.sg.interval(&Multidegree::zero(l.sg.dimension()), lambda)?;
            Ok(json!({"multidegree": lambda, "elements": ivl.elements, "covers": ivl.covers.len()}))
        })?,
        Command::Chains => each(&|lambda| {
            let m = build_face_matching(&l.sg, &l.gb, &fo, &Multidegree::zero(l.sg.dimension()), lambda)?;
            Ok(json!({"multidegree": lambda, "facets": m.facets.iter().map(|f| &f.labels).collect::<Vec<_>>()}))
        })?,
        Command::Morse => each(&|lambda| morse_report(&l, &fo, lambda))?,
        Command::Cancel => each(&|lambda| cancel_report(&l, &fo, lambda, cfg.path_cap))?,
        Command::Betti => Value::Array(fields.iter().map(|&f| json!(tor_ranks(&l.sg, window, f))).collect()),
        Command::Automaton => json!(automaton_of(&l, &fo, cfg.state_budget)?),
        Command::Series => series_report(&l, &fo, cfg.state_budget)?,
        Command::VerifyBounds => json!(verify_vanishing(&l.sg, l.gb.effective_degree(), window, &fields)),
        Command::Full => json!({
            "gb": gb_report(&l),
            "cancel": each(&|lambda| cancel_report(&l, &fo, lambda, cfg.path_cap))?,
            "betti": tor_ranks(&l.sg, window, fields[0]),
            "series": series_report(&l, &fo, cfg.state_budget)?,
            "bounds": verify_vanishing(&l.sg, l.gb.effective_degree(), window, &fields),
            "consistency": consistency(&l, &fo, window, cfg.path_cap, cfg.state_budget)?,
        }),
    };
    let mut report = json!({
        "config": cfg,
        "version": env!("CARGO_PKG_VERSION"),
        "result": result,
    });
    if cfg.timing {
        report["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    Ok(serde_json::to_string_pretty(&report).expect("reports serialize"))
}

/// Exit status for an error: 1 for bad input or exhausted limits, 2 for a
/// broken internal invariant.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidPresentation(_)
        | Error::NotComparable { .. }
        | Error::InvalidTermOrder(_)
        | Error::InvalidBasis(_)
        | Error::DegreeExplosion { .. }
        | Error::PathCapExceeded { .. }
        | Error::StateBudgetExceeded { .. }
        | Error::Parse { .. }
        | Error::Io(_) => 1,
        _ => 2,
    }
}
