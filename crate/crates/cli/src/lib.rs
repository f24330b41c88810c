//! File formats, corpus driver and command-line interface for `semproj-core`.

pub mod config;
pub mod error;
pub mod files;
pub mod manifest;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use semproj_core::evaluation::{correspondence_stats, score, stratified_shuffling, ScoreReport};
use semproj_core::fixtures;
use semproj_core::matcher::{brute_force_optimum, ORACLE_CELL_LIMIT};
use semproj_core::model::{BiSentence, ParseTree, RoleAnnotation, Span};
use semproj_core::projection::{run_pipeline_traced, Model, PipelineConfig, PipelineRun};
use semproj_core::Error;

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::files::{read_corpus, read_roles, read_text, serialize_roles_file, write_text, CorpusPaths};
use crate::manifest::{LinkRecord, OracleSummary, ProvenanceRecord, RoleRecord, RunManifest, Warning};

/// Oracle and solver costs may differ by at most this much.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "semproj",
    version,
    about = "Project semantic role annotations across word-aligned parse trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project source roles onto the target side of a parallel corpus
    Project(Box<ProjectArgs>),
    /// Score predicted roles against gold with exact match
    Evaluate(EvaluateArgs),
    /// Stratified shuffling test between two systems
    Sigtest(SigtestArgs),
    /// Constituent correspondence counts for a treebanked parallel corpus
    Stats(StatsArgs),
    /// Write the bundled example data
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// word, perfect, edgecover or total
    #[arg(long)]
    pub model: Option<String>,
    /// none, na, nc or arg; comma-separated to combine
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub fill_gaps: bool,
    #[arg(long)]
    pub big: Option<f64>,
    /// Comma-separated clause labels bounding the argument filter
    #[arg(long)]
    pub clause_boundary_labels: Option<String>,
    #[arg(long)]
    pub src_trees: Option<PathBuf>,
    #[arg(long)]
    pub tgt_trees: Option<PathBuf>,
    #[arg(long)]
    pub src_tok: Option<PathBuf>,
    #[arg(long)]
    pub tgt_tok: Option<PathBuf>,
    #[arg(long)]
    pub align: Option<PathBuf>,
    /// Target-to-source alignment; intersected with --align
    #[arg(long)]
    pub align_inverse: Option<PathBuf>,
    #[arg(long)]
    pub src_roles: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to <out>.manifest.json
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub provenance: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cross-check every small alignment graph against brute force
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SigtestArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub system_a: PathBuf,
    #[arg(long)]
    pub system_b: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub src_trees: PathBuf,
    #[arg(long)]
    pub tgt_trees: PathBuf,
    #[arg(long)]
    pub align: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Project(a) => cmd_project(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Sigtest(a) => cmd_sigtest(&a),
        Command::Stats(a) => cmd_stats(&a),
        Command::Fixtures(a) => cmd_fixtures(&a),
    }
}

fn settings(a: &ProjectArgs) -> CliResult<Settings> {
    let mut s = match &a.config {
        Some(p) => Settings::parse(&read_text(p)?).map_err(|e| CliError::input(p.display().to_string(), e))?,
        None => Settings::default(),
    };
    if let Some(m) = &a.model {
        s.set("model", m.as_str());
    }
    if let Some(f) = &a.filter {
        s.set("filter", f.as_str());
    }
    if a.fill_gaps {
        s.set("fill_gaps", "true");
    }
    if let Some(b) = a.big {
        s.set("big", b.to_string());
    }
    if let Some(l) = &a.clause_boundary_labels {
        s.set("clause_boundary_labels", l.as_str());
    }
    Ok(s)
}

fn check_inputs(a: &ProjectArgs, cfg: &PipelineConfig) -> CliResult<()> {
    let mut missing = Vec::new();
    if a.align.is_none() {
        missing.push("--align");
    }
    if a.src_roles.is_none() {
        missing.push("--src-roles");
    }
    if cfg.model == Model::Word {
        if a.src_trees.is_none() && a.src_tok.is_none() {
            missing.push("--src-trees or --src-tok");
        }
        if a.tgt_trees.is_none() && a.tgt_tok.is_none() {
            missing.push("--tgt-trees or --tgt-tok");
        }
    } else {
        if a.src_trees.is_none() {
            missing.push("--src-trees");
        }
        if a.tgt_trees.is_none() {
            missing.push("--tgt-trees");
        }
    }
    if missing.is_empty() {
        return Ok(());
    }
    let needs = if cfg.model == Model::Word {
        "a word alignment, source roles and tokens for both sides"
    } else {
        "a word alignment, source roles and parse trees for both sides"
    };
    Err(CliError::Usage(format!(
        "the {} model needs {needs}; missing {}",
        cfg.model.name(),
        missing.join(", ")
    )))
}

struct Outcome {
    sentence: usize,
    annotation: RoleAnnotation,
    record: ProvenanceRecord,
    oracle_checked: Option<bool>,
}

fn span_text(s: Option<Span>) -> String {
    s.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
}

fn provenance(k: usize, b: &BiSentence, run: &PipelineRun, word_model: bool) -> ProvenanceRecord {
    let p = &run.projection;
    let unit = |tree: Option<&ParseTree>, u: usize| {
        if word_model {
            Span::single(u).to_string()
        } else {
            span_text(tree.and_then(|t| t.span_of(u)))
        }
    };
    let (st, tt) = (b.src.tree.as_ref(), b.tgt.tree.as_ref());
    ProvenanceRecord {
        sentence: k,
        frame: p.annotation.frame.clone(),
        predicate: p.annotation.predicate,
        roles: p
            .roles
            .iter()
            .map(|r| RoleRecord {
                label: r.label.clone(),
                projected: r.projected,
                tiled: r.tiled,
                source_units: r.source_units.iter().map(|&u| unit(st, u)).collect(),
                links: r
                    .links
                    .iter()
                    .map(|l| LinkRecord {
                        src: unit(st, l.src),
                        tgt: unit(tt, l.tgt),
                        sim: l.sim,
                    })
                    .collect(),
            })
            .collect(),
        warnings: p.warnings.clone(),
    }
}

fn project_one(k: usize, b: &BiSentence, cfg: &PipelineConfig, oracle: bool) -> CliResult<Outcome> {
    let ctx = |e: Error| CliError::input(format!("sentence {k}"), e);
    let run = run_pipeline_traced(b, cfg).map_err(ctx)?;
    let mut oracle_checked = None;
    if oracle {
        if let (Some(g), Some(a)) = (&run.graph, &run.alignment) {
            let cells = g.n_src_real() * g.n_tgt_real();
            if cells <= ORACLE_CELL_LIMIT {
                let o = brute_force_optimum(g, cfg.model.class()).map_err(ctx)?;
                if !a.cost.approx_eq(&o.cost, ORACLE_TOL) {
                    return Err(ctx(Error::Integrity(format!(
                        "solver cost {:?} differs from brute-force cost {:?}",
                        a.cost, o.cost
                    ))));
                }
                oracle_checked = Some(true);
            } else {
                oracle_checked = Some(false);
            }
        }
    }
    Ok(Outcome {
        sentence: k,
        annotation: run.projection.annotation.clone(),
        record: provenance(k, b, &run, cfg.model == Model::Word),
        oracle_checked,
    })
}

pub fn cmd_project(a: &ProjectArgs) -> CliResult<()> {
    let cfg = settings(a)?.pipeline()?;
    check_inputs(a, &cfg)?;
    if a.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let corpus = read_corpus(&CorpusPaths {
        src_trees: a.src_trees.as_deref(),
        tgt_trees: a.tgt_trees.as_deref(),
        src_tok: a.src_tok.as_deref(),
        tgt_tok: a.tgt_tok.as_deref(),
        align: a.align.as_deref(),
        align_inverse: a.align_inverse.as_deref(),
        src_roles: a.src_roles.as_deref(),
    })?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", a.jobs)))?;
    let outcomes: Vec<CliResult<Outcome>> = pool.install(|| {
        corpus
            .par_iter()
            .enumerate()
            .filter(|(_, b)| b.src.roles.is_some())
            .map(|(k, b)| project_one(k, b, &cfg, a.oracle))
            .collect()
    });
    let outcomes = outcomes.into_iter().collect::<CliResult<Vec<_>>>()?;

    let roles_text = serialize_roles_file(outcomes.iter().map(|o| (o.sentence, &o.annotation)));
    let mut manifest = RunManifest::new("project", &cfg);
    for (name, path) in [
        ("src-trees", &a.src_trees),
        ("tgt-trees", &a.tgt_trees),
        ("src-tok", &a.src_tok),
        ("tgt-tok", &a.tgt_tok),
        ("align", &a.align),
        ("align-inverse", &a.align_inverse),
        ("src-roles", &a.src_roles),
        ("config", &a.config),
    ] {
        if let Some(p) = path {
            manifest.add_input(name, p, read_text(p)?.as_bytes());
        }
    }
    write_text(&a.out, &roles_text)?;
    manifest.add_output("roles", &a.out, roles_text.as_bytes());
    if let Some(p) = &a.provenance {
        let mut text = String::new();
        for o in &outcomes {
            text.push_str(&o.record.to_line());
            text.push('\n');
        }
        write_text(p, &text)?;
        manifest.add_output("provenance", p, text.as_bytes());
    }
    if a.oracle {
        manifest.oracle = Some(OracleSummary {
            checked: outcomes.iter().filter(|o| o.oracle_checked == Some(true)).count(),
            skipped: outcomes.iter().filter(|o| o.oracle_checked == Some(false)).count(),
        });
    }
    manifest.warnings = outcomes
        .iter()
        .flat_map(|o| {
            o.record.warnings.iter().map(move |w| Warning {
                sentence: o.sentence,
                message: w.clone(),
            })
        })
        .collect();
    let manifest_path = a.manifest.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".manifest.json");
        PathBuf::from(p)
    });
    write_text(&manifest_path, &manifest.to_json())?;

    let projected: usize = outcomes.iter().map(|o| o.annotation.roles().len()).sum();
    let total: usize = outcomes.iter().map(|o| o.record.roles.len()).sum();
    eprintln!(
        "{} sentences, {projected}/{total} roles projected, {} warnings",
        outcomes.len(),
        manifest.warnings.len()
    );
    if let Some(o) = &manifest.oracle {
        eprintln!(
            "oracle: {} graphs checked, {} above {ORACLE_CELL_LIMIT} cells skipped",
            o.checked, o.skipped
        );
    }
    Ok(())
}

/// Gold and predicted annotations for the same sentences, in sentence order.
/// A sentence missing from the prediction counts as predicting no roles.
fn parallel(gold_path: &Path, pred_path: &Path) -> CliResult<(Vec<usize>, Vec<RoleAnnotation>, Vec<RoleAnnotation>)> {
    let gold = read_roles(gold_path)?;
    let mut pred = read_roles(pred_path)?;
    if let Some(k) = pred.keys().find(|k| !gold.contains_key(k)) {
        return Err(CliError::Usage(format!(
            "{} has sentence {k}, which is not in {}",
            pred_path.display(),
            gold_path.display()
        )));
    }
    let mut ids = Vec::new();
    let mut gs = Vec::new();
    let mut ps = Vec::new();
    for (k, g) in gold {
        let p = match pred.remove(&k) {
            Some(p) if p.frame != g.frame => {
                return Err(CliError::Usage(format!(
                    "sentence {k}: gold frame {} but predicted frame {}",
                    g.frame, p.frame
                )))
            }
            Some(p) => p,
            None => RoleAnnotation::new(g.frame.clone(), None, Vec::new())?,
        };
        ids.push(k);
        gs.push(g);
        ps.push(p);
    }
    Ok((ids, gs, ps))
}

fn score_tsv(ids: &[usize], r: &ScoreReport) -> String {
    let mut s = String::from("sentence\ttp\tfp\tfn\n");
    for (k, c) in ids.iter().zip(&r.per_sentence) {
        s.push_str(&format!("{k}\t{}\t{}\t{}\n", c.tp, c.fp, c.fn_));
    }
    s.push_str(&format!(
        "total\t{}\t{}\t{}\n\nprecision\t{:.6}\nrecall\t{:.6}\nf1\t{:.6}\n",
        r.true_positives, r.false_positives, r.false_negatives, r.precision, r.recall, r.f1
    ));
    s
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> CliResult<()> {
    let (ids, gold, pred) = parallel(&a.gold, &a.pred)?;
    let r = score(&gold, &pred)?;
    println!("sentences  {}", ids.len());
    println!("tp         {}", r.true_positives);
    println!("fp         {}", r.false_positives);
    println!("fn         {}", r.false_negatives);
    println!("precision  {:.3}", r.precision);
    println!("recall     {:.3}", r.recall);
    println!("F1         {:.3}", r.f1);
    if let Some(out) = &a.out {
        write_text(out, &score_tsv(&ids, &r))?;
    }
    Ok(())
}

pub fn cmd_sigtest(a: &SigtestArgs) -> CliResult<()> {
    let (ids_a, gold, sys_a) = parallel(&a.gold, &a.system_a)?;
    let (ids_b, _, sys_b) = parallel(&a.gold, &a.system_b)?;
    debug_assert_eq!(ids_a, ids_b);
    let r = stratified_shuffling(&gold, &sys_a, &sys_b, a.iterations, a.seed)?;
    println!("observed delta F1  {:+.6}", r.observed_delta_f1);
    println!("p                  {:.6}", r.p_value);
    println!("iterations         {}", r.iterations);
    println!("seed               {}", r.seed);
    if let Some(out) = &a.out {
        write_text(
            out,
            &format!(
                "observed_delta_f1\tp_value\titerations\tseed\n{}\t{}\t{}\t{}\n",
                r.observed_delta_f1, r.p_value, r.iterations, r.seed
            ),
        )?;
    }
    Ok(())
}

pub fn cmd_stats(a: &StatsArgs) -> CliResult<()> {
    let corpus = read_corpus(&CorpusPaths {
        src_trees: Some(&a.src_trees),
        tgt_trees: Some(&a.tgt_trees),
        align: Some(&a.align),
        ..Default::default()
    })?;
    let s = correspondence_stats(&corpus, a.threshold)?;
    println!("threshold {}", s.threshold);
    println!("{:<8}{:>8}{:>8}{:>8}{:>8}", "side", "none", "one", "many", "count");
    let mut tsv = format!("# threshold={}\nside\tnone\tone\tmany\tcount\n", s.threshold);
    for (name, side) in [("source", s.src), ("target", s.tgt)] {
        let (n, o, m) = side.proportions();
        println!("{name:<8}{n:>8.3}{o:>8.3}{m:>8.3}{:>8}", side.total());
        tsv.push_str(&format!("{name}\t{n}\t{o}\t{m}\t{}\n", side.total()));
    }
    if let Some(out) = &a.out {
        write_text(out, &tsv)?;
    }
    Ok(())
}

fn lines_file(lines: &[&str]) -> String {
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

/// File name and contents of every bundled fixture file.
pub fn fixture_files() -> BTreeMap<&'static str, String> {
    let blocks = |b: &[&str]| {
        let mut s = b.join("\n\n");
        s.push('\n');
        s
    };
    let mut m = BTreeMap::new();
    m.insert("kim.src.trees", lines_file(&[fixtures::KIM_SRC_TREE]));
    m.insert("kim.tgt.trees", lines_file(&[fixtures::KIM_TGT_TREE]));
    m.insert("kim.align", lines_file(&[fixtures::KIM_ALIGN]));
    m.insert("kim.src.roles", blocks(&[fixtures::KIM_SRC_ROLES]));
    m.insert("kim.gold.roles", blocks(&[fixtures::KIM_TGT_ROLES]));
    m.insert("toy.src.trees", lines_file(fixtures::TOY_SRC_TREES));
    m.insert("toy.tgt.trees", lines_file(fixtures::TOY_TGT_TREES));
    m.insert("toy.align", lines_file(fixtures::TOY_ALIGN));
    m.insert("toy.src.roles", blocks(fixtures::TOY_SRC_ROLES));
    m.insert("toy.gold.roles", blocks(fixtures::TOY_TGT_GOLD));
    m
}

pub fn cmd_fixtures(a: &FixturesArgs) -> CliResult<()> {
    for (name, text) in fixture_files() {
        write_text(&a.out_dir.join(name), &text)?;
    }
    Ok(())
}
