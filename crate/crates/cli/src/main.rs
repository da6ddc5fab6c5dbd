//! Command-line driver: align a tagged corpus against segmenter analyses,
//! re-summarize an existing alignment, validate a corpus file, or export one
//! sentence's graph as GraphML.

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sandhi_align_core::align::{AlignmentResult, ModKind};
use sandhi_align_core::corpus::{validate_corpus, RawRecord};
use sandhi_align_core::graph::{read_analyses, SegGraph};
use sandhi_align_core::graphml::write_graphml;
use sandhi_align_core::partition::DEFAULT_COMPONENT_CAP;
use sandhi_align_core::pipeline::{process_sentence, run_align, RunConfig};
use sandhi_align_core::report::summarize;
use sandhi_align_core::rules::RuleSet;

const RULES_ENV: &str = "SANDHI_ALIGN_RULES";

#[derive(Parser)]
#[command(name = "sandhi-align", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align a corpus with segmenter analyses and write all outputs
    Align(AlignArgs),
    /// Summarize an existing alignment.jsonl
    Report {
        /// Path to alignment.jsonl
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check a corpus file and list every issue found
    Validate {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Write one sentence's segment graph as GraphML
    Graphml(GraphmlArgs),
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    analyses: PathBuf,
    /// Rule directory; falls back to $SANDHI_ALIGN_RULES, then the built-in
    /// tables
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Skip anunāsika/dvitva normalization
    #[arg(long)]
    no_normalize: bool,
    /// Cap on compound components per chunk
    #[arg(long, default_value_t = DEFAULT_COMPONENT_CAP)]
    max_components: usize,
    /// Worker count; 0 picks the library default, 1 forces sequential
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Modification order, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = vec![
        ModOrderArg::Causative,
        ModOrderArg::PreverbJoin,
        ModOrderArg::CompoundMerge,
    ])]
    mod_order: Vec<ModOrderArg>,
}

#[derive(Args)]
struct GraphmlArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    analyses: PathBuf,
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    sent_id: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModOrderArg {
    Causative,
    PreverbJoin,
    CompoundMerge,
}

impl std::fmt::Display for ModOrderArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModOrderArg::Causative => "causative",
            ModOrderArg::PreverbJoin => "preverb-join",
            ModOrderArg::CompoundMerge => "compound-merge",
        })
    }
}

impl From<ModOrderArg> for ModKind {
    fn from(a: ModOrderArg) -> ModKind {
        match a {
            ModOrderArg::Causative => ModKind::Causative,
            ModOrderArg::PreverbJoin => ModKind::PreverbJoin,
            ModOrderArg::CompoundMerge => ModKind::CompoundMerge,
        }
    }
}

fn rules_dir(explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| std::env::var_os(RULES_ENV).map(PathBuf::from))
}

fn load_rules(explicit: Option<PathBuf>) -> Result<RuleSet> {
    match rules_dir(explicit) {
        Some(dir) => {
            RuleSet::load_dir(&dir).with_context(|| format!("loading rules from {}", dir.display()))
        }
        None => Ok(RuleSet::bundled()),
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Align(args) => cmd_align(args),
        Command::Report { input } => cmd_report(input),
        Command::Validate { corpus } => cmd_validate(corpus),
        Command::Graphml(args) => cmd_graphml(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn cmd_align(args: AlignArgs) -> Result<i32> {
    for (name, path) in [("corpus", &args.corpus), ("analyses", &args.analyses)] {
        if !path.exists() {
            bail!("{name} file {} does not exist", path.display());
        }
    }
    let config = RunConfig {
        corpus: args.corpus,
        analyses: args.analyses,
        rules_dir: rules_dir(args.rules),
        out_dir: args.out,
        normalize: !args.no_normalize,
        max_components: args.max_components,
        jobs: args.jobs,
        mod_order: args.mod_order.into_iter().map(ModKind::from).collect(),
    };
    let report = run_align(&config)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn cmd_report(input: PathBuf) -> Result<i32> {
    let text =
        fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
    let results: Vec<AlignmentResult> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).with_context(|| format!("parsing {}", input.display())))
        .collect::<Result<_>>()?;
    let report = summarize(results.iter());
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn cmd_validate(corpus: PathBuf) -> Result<i32> {
    let text =
        fs::read_to_string(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
    let mut records = Vec::new();
    let mut json_errors = 0usize;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawRecord>(line) {
            Ok(raw) => records.push(raw),
            Err(e) => {
                json_errors += 1;
                println!("line {}: unreadable record: {e}", i + 1);
            }
        }
    }
    let issues = validate_corpus(records);
    for issue in &issues {
        println!(
            "sentence {}: {:?}: {}",
            issue.sent_id, issue.kind, issue.detail
        );
    }
    let problems = issues.len() + json_errors;
    println!("{} issue(s) in {}", problems, corpus.display());
    Ok(if problems == 0 { 0 } else { 1 })
}

fn cmd_graphml(args: GraphmlArgs) -> Result<i32> {
    let rules = load_rules(args.rules)?;
    let corpus_file = fs::File::open(&args.corpus)
        .with_context(|| format!("reading {}", args.corpus.display()))?;
    let records = sandhi_align_core::corpus::read_corpus(BufReader::new(corpus_file))
        .with_context(|| format!("parsing {}", args.corpus.display()))?;
    let analyses_file = fs::File::open(&args.analyses)
        .with_context(|| format!("reading {}", args.analyses.display()))?;
    let analyses = read_analyses(BufReader::new(analyses_file))
        .with_context(|| format!("parsing {}", args.analyses.display()))?;

    let rec = records
        .iter()
        .find(|r| r.sent_id == args.sent_id)
        .with_context(|| format!("sent_id {} not in the corpus", args.sent_id))?;
    let segs = analyses.get(&args.sent_id).cloned().unwrap_or_default();
    let outcome = process_sentence(
        rec,
        &segs,
        &rules,
        !args.no_normalize,
        &sandhi_align_core::align::AlignOptions::default(),
    )?;
    let graph: &SegGraph = &outcome.graph;
    fs::write(&args.out, write_graphml(graph))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} ({} nodes)",
        args.out.display(),
        graph.node_count()
    );
    Ok(0)
}
