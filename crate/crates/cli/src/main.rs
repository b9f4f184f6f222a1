use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gview::containment::{by_size, two_level_search_in};
use gview::harness::bench::{build_candidates, select, Algorithm, SEED_ENV};
use gview::harness::{BenchConfig, GraphSpec, Manifest};
use gview::view::evaluate_cover;
use gview::{
    evaluate_query, load_graph, load_workload, materialize_view, save_graph, save_view_graphml, EvalContext,
    ExtendedGraphView, GgaParams, GraphFormat, PropertyGraph,
};

#[derive(Parser)]
#[command(name = "gview", version, about = "Materialized view selection for property graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Social,
    Copurchase,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Dps,
    Greedy,
    Bnb,
    Gga,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Dps => Algorithm::Dps,
            AlgorithmArg::Greedy => Algorithm::Greedy,
            AlgorithmArg::Bnb => Algorithm::Bnb,
            AlgorithmArg::Gga => Algorithm::Gga,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph (.json or .graphml by extension)
    GenGraph {
        #[arg(long, value_enum)]
        generator: Generator,
        #[arg(long, default_value_t = 100)]
        persons: usize,
        #[arg(long, default_value_t = 10)]
        orgs: usize,
        #[arg(long, default_value_t = 20)]
        tags: usize,
        #[arg(long, default_value_t = 200)]
        products: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that a graph and a workload are well formed
    Validate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        workload: Option<PathBuf>,
    },
    /// Select views for a workload and write their manifest
    Select {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        workload: PathBuf,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        /// Budget in bytes
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        p_f: f64,
        #[arg(long, default_value_t = 0.5)]
        p_c: f64,
        #[arg(long, default_value_t = 10)]
        generations: usize,
        /// Skip candidates answered by another candidate
        #[arg(long)]
        skip_contained: bool,
        /// Manifest path; printed to stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialize the views of a manifest as GraphML files
    Materialize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Evaluate one workload query, through views when they cover it
    Query {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        workload: PathBuf,
        /// Query name
        #[arg(long)]
        name: String,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Print at most this many rows
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Run a benchmark config and write its CSV report
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// CSV path; overrides the config's output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_graph(path: &Path) -> Result<PropertyGraph> {
    load_graph(path, GraphFormat::from_path(path)).with_context(|| format!("loading graph {}", path.display()))
}

fn views_from_manifest(graph: &PropertyGraph, path: &Path) -> Result<Vec<ExtendedGraphView>> {
    let manifest = Manifest::load(path).with_context(|| format!("loading manifest {}", path.display()))?;
    Ok(manifest
        .patterns()?
        .into_iter()
        .map(|(id, vp)| {
            let mut v = materialize_view(graph, &vp);
            v.id = id;
            v
        })
        .collect())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenGraph {
            generator,
            persons,
            orgs,
            tags,
            products,
            seed,
            out,
        } => {
            let spec = match generator {
                Generator::Social => GraphSpec::Social {
                    persons,
                    orgs,
                    tags,
                    seed,
                },
                Generator::Copurchase => GraphSpec::Copurchase { products, seed },
            };
            let g = spec.build()?;
            save_graph(&g, &out, GraphFormat::from_path(&out))?;
            println!(
                "{} vertices, {} edges -> {}",
                g.vertex_count(),
                g.edge_count(),
                out.display()
            );
        }
        Command::Validate { graph, workload } => {
            let g = read_graph(&graph)?;
            print!("graph ok: {} vertices, {} edges", g.vertex_count(), g.edge_count());
            if let Some(w) = workload {
                let qs = load_workload(&w).with_context(|| format!("loading workload {}", w.display()))?;
                print!("; workload ok: {} queries", qs.len());
            }
            println!();
        }
        Command::Select {
            graph,
            workload,
            algorithm,
            budget,
            seed,
            p_f,
            p_c,
            generations,
            skip_contained,
            out,
        } => {
            if !(0.0..=1.0).contains(&p_f) || !(0.0..=1.0).contains(&p_c) {
                bail!("probabilities must lie in [0, 1]");
            }
            let seed = match std::env::var(SEED_ENV) {
                Ok(s) => s
                    .trim()
                    .parse()
                    .with_context(|| format!("{SEED_ENV} is not an unsigned integer"))?,
                Err(_) => seed,
            };
            let g = read_graph(&graph)?;
            let qs = load_workload(&workload)?;
            let ctx = EvalContext::new(&g, &qs);
            let candidates = build_candidates(&g, &qs, skip_contained);
            let params = GgaParams {
                p_f,
                p_c,
                seed,
                max_generations: generations,
                ..GgaParams::default()
            };
            let sel = select(&ctx, &candidates, algorithm.into(), budget, &params);
            let views = sel.views();
            let score = ctx.evaluate_selection(&views, true)?;
            let text = Manifest::from_views(&views).to_json();
            match out {
                Some(path) => {
                    fs::write(&path, text + "\n")?;
                    eprintln!(
                        "selected {} views, benefit {:.3}, covered {}/{} -> {}",
                        views.len(),
                        score.total_benefit,
                        score.covered,
                        qs.len(),
                        path.display()
                    );
                }
                None => println!("{text}"),
            }
        }
        Command::Materialize {
            graph,
            manifest,
            out_dir,
        } => {
            let g = read_graph(&graph)?;
            let entries = Manifest::load(&manifest)?;
            let views = views_from_manifest(&g, &manifest)?;
            fs::create_dir_all(&out_dir)?;
            for (v, e) in views.iter().zip(&entries.views) {
                let path = out_dir.join(&e.file);
                save_view_graphml(v, &path)?;
                println!("{} -> {} ({} edges)", v.id, path.display(), v.content.edge_count());
            }
        }
        Command::Query {
            graph,
            workload,
            name,
            manifest,
            limit,
        } => {
            let g = read_graph(&graph)?;
            let qs = load_workload(&workload)?;
            let Some(q) = qs.iter().find(|q| q.name == name) else {
                bail!("no query named {name:?} in {}", workload.display());
            };
            let views = match &manifest {
                Some(m) => views_from_manifest(&g, m)?,
                None => Vec::new(),
            };
            let (source, matches, cost) = match two_level_search_in(q, &by_size(&views)) {
                Some(cover) => {
                    let eval = evaluate_cover(&views, q, &cover.assignment)?;
                    let cost = eval.total();
                    (format!("views {}", cover.views.join(",")), eval.matches, cost)
                }
                None => {
                    let (m, c) = evaluate_query(&g, q);
                    ("base".to_string(), m, c)
                }
            };
            let mut rows = matches.rows.clone();
            rows.sort();
            println!("source: {source}");
            println!("{}", matches.aliases.join("\t"));
            for row in rows.iter().take(limit) {
                println!("{}", row.join("\t"));
            }
            println!("rows: {}", matches.len());
            println!(
                "cost: {} (edges examined {}, rows emitted {})",
                cost.cost, cost.edges_examined, cost.rows_emitted
            );
        }
        Command::Bench { config, out } => {
            let mut cfg = BenchConfig::load(&config)?;
            cfg.apply_env()?;
            if out.is_some() {
                cfg.output_dir = None;
            }
            let report = gview::harness::run_benchmark(&cfg)?;
            let csv = report.to_csv();
            if let Some(path) = out {
                fs::write(&path, &csv)?;
            }
            print!("{csv}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
