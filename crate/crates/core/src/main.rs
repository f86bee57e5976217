use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::json;

use cyltree::dot::{emit_dot, Dot};
use cyltree::fixtures::gen_star;
use cyltree::gen::{gen_random, GenParams};
use cyltree::io::{emit_window, read_window};
use cyltree::rn::{build_rn, DEFAULT_CAP};
use cyltree::tc::TreeOfCylinders;
use cyltree::verify::verify_all;
use cyltree::window::{validate_window, ValidWindow};

#[derive(Parser)]
#[command(
    name = "cyltree",
    about = "Trees of cylinders and regular neighbourhoods on finite windows"
)]
struct Cli {
    /// Largest 2^(infinite atoms) enumerated on one cylinder
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a window file against the structural rules
    Validate { file: PathBuf },
    /// List cylinders with their boundaries and atoms
    Cylinders { file: PathBuf },
    /// Print the tree of cylinders
    Tc {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Print the regular neighbourhood
    Rn {
        file: PathBuf,
        #[arg(long)]
        qh: bool,
        #[arg(long)]
        dot: bool,
    },
    /// Run every check; exits nonzero on any failure
    Verify {
        file: PathBuf,
        #[arg(long)]
        qh: bool,
        /// Also compare betweenness against the brute-force oracle
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Generate a window
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// A star with k boundary leaves, or a QH vertex on k cylinders
    Star {
        k: usize,
        #[arg(long)]
        qh: bool,
    },
    /// A seeded random window with at most N vertices
    Random {
        seed: u64,
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_cylinders: usize,
        #[arg(long)]
        qh: bool,
    },
}

fn load(file: &Path) -> Result<ValidWindow> {
    Ok(ValidWindow::new(read_window(file)?)?)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Validate { file } => {
            let w = read_window(&file)?;
            let violations = validate_window(&w);
            for v in &violations {
                println!("{v}");
            }
            if violations.is_empty() {
                println!("valid");
            }
            Ok(violations.is_empty())
        }
        Cmd::Cylinders { file } => {
            let w = load(&file)?;
            let ids =
                |vs: &[cyltree::window::VertexIx]| vs.iter().map(|&v| w.vertex_id(v).to_owned()).collect::<Vec<_>>();
            let out: Vec<_> = w
                .cylinders()
                .iter()
                .map(|c| {
                    json!({
                        "id": c.id,
                        "complete": c.complete,
                        "vertices": ids(&c.vertices),
                        "boundary": ids(&c.boundary),
                        "atoms": c.atoms.iter().map(|a| json!({
                            "attachment": w.vertex_id(a.attachment),
                            "vertices": w.vertex_set_ids(&a.vertices),
                            "infinite": a.infinite,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Cmd::Tc { file, dot } => {
            let w = load(&file)?;
            let tc = TreeOfCylinders::new(&w);
            if dot {
                print!("{}", emit_dot(Dot::Tc(&w, &tc)));
            } else {
                let nodes: Vec<String> = (0..tc.nodes().len()).map(|i| tc.label(&w, i)).collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "nodes": nodes, "edges": tc.edges() }))?
                );
            }
            Ok(true)
        }
        Cmd::Rn { file, qh, dot } => {
            let w = load(&file)?;
            let rn = build_rn(&w, qh, cli.cap)?;
            if dot {
                print!("{}", emit_dot(Dot::Rn(&w, &rn)));
            } else {
                println!("{}", serde_json::to_string_pretty(&rn.to_json(&w))?);
            }
            if !rn.is_tree() {
                eprintln!("regular neighbourhood is not a tree");
            }
            Ok(rn.is_tree())
        }
        Cmd::Verify { file, qh, oracle, json } => {
            let w = load(&file)?;
            let reports = verify_all(&w, qh, oracle, cli.cap)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    let status = if r.passed() { "ok" } else { "FAIL" };
                    println!("{status:4} {:32} {} instances", r.check, r.instances);
                    for f in &r.failures {
                        println!("     {f}");
                    }
                }
            }
            Ok(reports.iter().all(|r| r.passed()))
        }
        Cmd::Gen { kind } => {
            let w = match kind {
                GenKind::Star { k, qh } => gen_star(k, qh)?,
                GenKind::Random {
                    seed,
                    n,
                    max_cylinders,
                    qh,
                } => gen_random(
                    seed,
                    &GenParams {
                        max_vertices: n,
                        max_cylinders,
                        qh,
                    },
                )?,
            };
            print!("{}", emit_window(&w));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
