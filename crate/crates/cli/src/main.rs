mod input;
mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hog_core::arena::parse_simple_type;
use hog_core::bisim::{bisimilar, bisimilar_iso, check_partition, clone_classes, forks};
use hog_core::causal::{caus, expansions_of, Augmentation};
use hog_core::inject::{
    characteristic_expansion_bounded, decide_equality, maximal_pview_check, max_tree_search, positionality_witness,
    search_expansions, t1_t2_counterexample, tree_of_expansion, wide_copy_counts, wide_expansion, Limits, Mode,
};
use hog_core::lambda::interpret_text;
use hog_core::play::{deseq_play, pview};
use hog_core::position::{canonicalize, config_iso, positions_of_causal, positions_of_strategy};
use hog_core::Error;

use input::Doc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Parser)]
#[command(name = "hog", version, about = "Innocent strategies, causal strategies and their positions")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a simple type and print its arena.
    ParseType { ty: String },
    /// Normalize a closed term and print its strategy.
    Interp {
        term: String,
        #[arg(long = "type")]
        ty: Option<String>,
    },
    /// P-view of a play.
    Pview { file: PathBuf },
    /// Configuration and position of a play.
    Deseq { file: PathBuf },
    /// Causal strategy of an innocent strategy.
    Caus { file: PathBuf },
    /// Expansions of a causal strategy, up to isomorphism.
    Expand {
        file: PathBuf,
        #[arg(long)]
        max_events: Option<usize>,
        /// Only expansions where every Opponent move is answered.
        #[arg(long)]
        plus_covered: bool,
    },
    /// Positions reached by plays and by expansions.
    Positions {
        file: PathBuf,
        #[arg(long)]
        max_events: Option<usize>,
    },
    /// Bisimilarity of two augmentations.
    Bisim {
        left: PathBuf,
        right: PathBuf,
        /// Relate them across the isomorphism of their configurations.
        #[arg(long)]
        iso: bool,
    },
    /// Clone classes and forks of an augmentation.
    Clones { file: PathBuf },
    /// Characteristic expansion of a finite causal strategy.
    CharExp {
        file: PathBuf,
        #[arg(long, default_value_t = 1 << 16)]
        max_events: usize,
    },
    /// Wide expansion of a maximal P-view.
    WideExp {
        file: PathBuf,
        /// Index into the maximal P-views, longest first.
        #[arg(long, default_value_t = 0)]
        pview: usize,
    },
    /// Decide equality of two finite causal strategies from positions.
    Equal {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 1 << 16)]
        max_events: usize,
    },
    /// Causal strategies explaining a position.
    Explain {
        file: PathBuf,
        /// Allow inconsistent wirings too.
        #[arg(long)]
        raw: bool,
    },
    /// Counterexamples and checks around positional injectivity.
    Counterexample {
        #[command(subcommand)]
        which: Counter,
    },
    /// Reproduce a worked example.
    Repro {
        #[arg(long)]
        figure: String,
    },
}

#[derive(Subcommand)]
enum Counter {
    /// Two regular infinite strategies with the same balanced positions.
    T1t2 {
        #[arg(long, default_value_t = 12)]
        bound: usize,
    },
    /// Plays reaching one position where the strategy answers differently.
    Positional {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Largest tree within the node budget of a given depth.
    Trees { n: usize },
    /// Transfer of a wide position between two strategies.
    Pviews {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 1 << 16)]
        max_events: usize,
    },
}

pub struct Report {
    json: Value,
    text: String,
    dot: Option<String>,
    verdict: Option<bool>,
}

impl Report {
    pub fn new(json: Value, text: String) -> Report {
        Report { json, text, dot: None, verdict: None }
    }

    fn dot(mut self, dot: String) -> Report {
        self.dot = Some(dot);
        self
    }

    fn verdict(mut self, v: bool) -> Report {
        self.verdict = Some(v);
        self
    }
}

fn max_events(given: Option<usize>) -> Result<usize> {
    if let Some(n) = given {
        return Ok(n);
    }
    match std::env::var("HOG_MAX_EVENTS") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!("HOG_MAX_EVENTS must be a number, got {v:?}")),
        Err(_) => Ok(16),
    }
}

fn aug(q: &Augmentation) -> Value {
    json!({ "display": q.displays(), "just_parent": q.to_raw().just_parent, "caus_parent": q.to_raw().caus_parent })
}

fn run(cmd: Command) -> Result<Report> {
    Ok(match cmd {
        Command::ParseType { ty } => {
            let (arena, t) = parse_simple_type(&ty)?;
            let raw = arena.to_raw();
            let text = format!("type {t}\n{} moves, order {}\n", arena.len(), t.order());
            Report::new(json!({ "type": t.to_string(), "arena": raw }), text).dot(arena.to_dot())
        }
        Command::Interp { term, ty } => {
            let (nf, t, sigma) = interpret_text(&term, ty.as_deref())?;
            let views = sigma.pviews();
            let nf_text = nf.to_term(&[]).to_string();
            let mut text = format!("{nf_text} : {t}\n{} P-views\n", views.len());
            for v in sigma.maximal_pviews() {
                text.push_str(&format!("  {:?} / {:?}\n", v.moves, v.just));
            }
            let dot = caus(&sigma)?.to_dot();
            Report::new(json!({ "normal_form": nf_text, "type": t.to_string(), "pviews": views }), text).dot(dot)
        }
        Command::Pview { file } => {
            let doc = Doc::load(&file)?;
            let s = doc.play()?;
            let p = pview(&*doc.arena()?, &s).ok_or_else(|| anyhow!("P-view undefined: a pointer leaves the view"))?;
            Report::new(json!({ "pview": p }), format!("{:?} / {:?}\n", p.moves, p.just))
        }
        Command::Deseq { file } => {
            let doc = Doc::load(&file)?;
            let x = deseq_play(&doc.arena()?, &doc.play()?)?;
            let pos = canonicalize(&x);
            Report::new(json!({ "configuration": x.to_raw(), "position": pos }), format!("{pos}\n")).dot(x.to_dot())
        }
        Command::Caus { file } => {
            let p = caus(&Doc::load(&file)?.strategy()?)?;
            let text = format!("{} events\n{}\n", p.len(), p.canonical_key());
            Report::new(json!({ "augmentation": aug(&p) }), text).dot(p.to_dot())
        }
        Command::Expand { file, max_events: m, plus_covered } => {
            let p = Doc::load(&file)?.causal()?;
            let m = max_events(m)?;
            let qs = expansions_of(&p, m, plus_covered);
            let mut text = format!("{} expansions with at most {m} events\n", qs.len());
            for (q, _) in &qs {
                text.push_str(&format!("  {}\n", canonicalize(&q.config())));
            }
            let list: Vec<Value> = qs.iter().map(|(q, _)| aug(q)).collect();
            Report::new(json!({ "max_events": m, "expansions": list }), text)
        }
        Command::Positions { file, max_events: m } => {
            let sigma = Doc::load(&file)?.strategy()?;
            let m = max_events(m)?;
            let a = positions_of_strategy(&sigma, m);
            let b = positions_of_causal(&caus(&sigma)?, m);
            let mut text = format!("{} positions from plays, {} from expansions, equal: {}\n", a.len(), b.len(), a == b);
            for p in &a {
                text.push_str(&format!("  {p}\n"));
            }
            Report::new(json!({ "max_events": m, "from_plays": a, "from_expansions": b, "equal": a == b }), text)
                .verdict(a == b)
        }
        Command::Bisim { left, right, iso } => {
            let (q, p) = (Doc::load(&left)?.augmentation()?, Doc::load(&right)?.augmentation()?);
            let v = if iso {
                let phi = config_iso(&q.config(), &p.config()).ok_or_else(|| anyhow!("configurations are not isomorphic"))?;
                bisimilar_iso(&q, &p, &phi)
            } else {
                bisimilar(&q, &p)
            };
            Report::new(json!({ "bisimilar": v, "across_iso": iso }), format!("bisimilar: {v}\n")).verdict(v)
        }
        Command::Clones { file } => {
            let q = Doc::load(&file)?.augmentation()?;
            let classes = clone_classes(&q);
            let fs = forks(&q);
            let partition = check_partition(&q);
            let mut text = format!("{} clone classes\n", classes.len());
            for c in classes.iter().filter(|c| c.len() > 1) {
                text.push_str(&format!("  {c:?}\n"));
            }
            text.push_str(&format!("fork sizes {:?}\n", fs.iter().map(|f| f.card()).collect::<Vec<_>>()));
            let ok = partition.is_ok();
            text.push_str(&match &partition {
                Ok(()) => "forks partition the positive clone classes\n".to_string(),
                Err(e) => format!("partition fails: {e}\n"),
            });
            Report::new(
                json!({ "classes": classes, "forks": fs, "partition": partition.err().map(|e| e.to_string()) }),
                text,
            )
            .verdict(ok)
        }
        Command::CharExp { file, max_events } => {
            let p = Doc::load(&file)?.causal()?;
            let q = characteristic_expansion_bounded(&p, max_events)?;
            let cards: Vec<usize> = forks(&q).iter().map(|f| f.card()).collect();
            let text = format!("{} events, fork sizes {cards:?}\nposition {}\n", q.len(), canonicalize(&q.config()));
            Report::new(json!({ "augmentation": aug(&q), "fork_sizes": cards, "position": canonicalize(&q.config()) }), text)
                .dot(q.to_dot())
        }
        Command::WideExp { file, pview: k } => {
            let sigma = Doc::load(&file)?.strategy()?;
            let mut views = sigma.maximal_pviews();
            views.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
            let s = views.get(k).ok_or_else(|| anyhow!("only {} maximal P-views", views.len()))?;
            let q = wide_expansion(&sigma, s)?;
            let counts = wide_copy_counts(&q);
            let tree = tree_of_expansion(&q);
            let text = format!("P-view {:?}\n{} events, Player copies per level {counts:?}\n", s.moves, q.len());
            Report::new(json!({ "pview": s, "augmentation": aug(&q), "copies": counts, "tree": tree }), text).dot(q.to_dot())
        }
        Command::Equal { left, right, max_events } => {
            let (p1, p2) = (Doc::load(&left)?.causal()?, Doc::load(&right)?.causal()?);
            let r = decide_equality(&p1, &p2, max_events)?;
            let mut text = format!("equal: {}\nprobe of {} events\n", r.equal, r.probe_events);
            if let Some(sep) = &r.separating {
                text.push_str(&format!("separating position {sep}\n"));
                if !r.total {
                    text.push_str("strategies are partial: this separates causal positions only\n");
                }
            }
            let v = r.equal;
            Report::new(serde_json::to_value(&r)?, text).verdict(v)
        }
        Command::Explain { file, raw } => {
            let x = Doc::load(&file)?.configuration()?;
            let mode = if raw { Mode::Raw } else { Mode::Consistent };
            let ex = search_expansions(&x, mode, Limits::default())?;
            let mut text = format!("{} explanation(s) of {}\n", ex.len(), canonicalize(&x));
            for q in &ex {
                text.push_str(&format!("  caus parents {:?}\n", q.to_raw().caus_parent));
            }
            let list: Vec<Value> = ex.iter().map(aug).collect();
            Report::new(json!({ "position": canonicalize(&x), "explanations": list }), text)
        }
        Command::Counterexample { which } => match which {
            Counter::T1t2 { bound } => {
                let r = t1_t2_counterexample(bound)?;
                let v = r.equal_positions && !r.unfold_isomorphic;
                let text = format!(
                    "balanced positions up to {bound} events: T1 {}, T2 {}, equal: {}\nunfoldings at depth {} isomorphic: {}\n",
                    r.t1_positions, r.t2_positions, r.equal_positions, r.unfold_depth, r.unfold_isomorphic
                );
                Report::new(serde_json::to_value(&r)?, text).verdict(v)
            }
            Counter::Positional { file, max_len } => {
                let sigma = Doc::load(&file)?.strategy()?;
                let w = positionality_witness(&sigma, max_len);
                let text = match &w {
                    Some(w) => format!("sab {:?}\nta  {:?}\nposition {}\n", w.sab.moves, w.ta.moves, w.position),
                    None => format!("no witness among plays of length at most {max_len}\n"),
                };
                let found = w.is_some();
                Report::new(json!({ "witness": w }), text).verdict(found)
            }
            Counter::Trees { n } => {
                let r = max_tree_search(n)?;
                let text = format!("n = {n}: largest size {}, equals T_n: {}, optimal profiles {}\n", r.size, r.is_t_n, r.optimal_profiles);
                let v = r.is_t_n;
                Report::new(serde_json::to_value(&r)?, text).verdict(v)
            }
            Counter::Pviews { left, right, max_events } => {
                let (s1, s2) = (Doc::load(&left)?.strategy()?, Doc::load(&right)?.strategy()?);
                let r = maximal_pview_check(&s1, &s2, max_events)?;
                let text = format!(
                    "probe {:?} (n = {}), wide position of {} events\ntransfer: {}, shared maximal P-view: {}\n",
                    r.probe.moves, r.n, r.wide_events, r.transfer, r.shared
                );
                let v = r.transfer;
                Report::new(serde_json::to_value(&r)?, text).verdict(v)
            }
        },
        Command::Repro { figure } => repro::run(&figure)?,
    })
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Bound(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let format = cli.format;
    let report = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    let out = match format {
        Format::Json => Ok(serde_json::to_string_pretty(&report.json).expect("reports serialize") + "\n"),
        Format::Text => Ok(report.text.clone()),
        Format::Dot => report.dot.clone().ok_or(()),
    };
    match out {
        Ok(s) => print!("{s}"),
        Err(()) => {
            eprintln!("error: this command has no DOT output");
            return ExitCode::from(2);
        }
    }
    match report.verdict {
        Some(false) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_errors_map_to_three() {
        let e = anyhow::Error::from(Error::Bound("x".into()));
        assert_eq!(exit_code_for(&e), 3);
        assert_eq!(exit_code_for(&anyhow!("bad input")), 2);
    }

    #[test]
    fn default_event_bound() {
        assert_eq!(max_events(Some(5)).unwrap(), 5);
        if std::env::var("HOG_MAX_EVENTS").is_err() {
            assert_eq!(max_events(None).unwrap(), 16);
        }
    }

    #[test]
    fn bail_is_input_error() {
        let r: Result<()> = (|| anyhow::bail!("nope"))();
        assert_eq!(exit_code_for(&r.unwrap_err()), 2);
    }
}
