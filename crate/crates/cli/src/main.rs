//! Command-line driver: validation, braid words, conjugacy classes, class
//! flags, braid indices, twist-system simulation, forcing reports, SVG
//! rendering, and lattice normalization.
//!
//! Exit codes: 0 success, 1 domain refusal (improper / cylindrical /
//! trivial index), 2 input error.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use braidforce::braid::{is_free, same_class};
use braidforce::colored::{Fiber, FiberOptions};
use braidforce::conley::{braid_index, class_index, Coefficients, ConleyError, IndexOptions};
use braidforce::dynamics::{find_stationary, lift_orbit, FlowOptions, RecurrenceSystem};
use braidforce::forcing::{force, render_report, ForceOptions, ForcingQuery, Realization};
use braidforce::io;
use braidforce::lattice::StateSpace;
use braidforce::word::conjugacy_class;

#[derive(Parser)]
#[command(name = "braidforce", version, about = "Discrete braid invariants and twist-map forcing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Clone)]
struct Global {
    /// Admissible anchor window `lo,hi` for braid inputs.
    #[arg(long, global = true, value_name = "LO,HI")]
    window: Option<String>,
    /// Convergence tolerance for the recurrence flow.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed offset for deterministic jitter.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Homology coefficients: `z` or `z2`.
    #[arg(long, global = true, default_value = "z")]
    coeff: String,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a braid file.
    Validate {
        #[arg(long)]
        input: PathBuf,
        /// Require red strands and validate the coloring split.
        #[arg(long)]
        colored: bool,
    },
    /// Print the positive word of a braid.
    Word {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the positive conjugacy class of a word.
    Conjugacy {
        #[arg(long)]
        word: String,
    },
    /// Print the class flags of a colored braid.
    Flags {
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute the braid index of a colored braid file or colored word.
    Index {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        word: Option<String>,
    },
    /// Trace a twist system and search for stationary strands.
    Simulate {
        #[arg(long)]
        system: PathBuf,
        /// Optional colored braid whose class filters the found strands.
        #[arg(long)]
        class: Option<PathBuf>,
    },
    /// Run the forcing pipeline.
    Force {
        #[arg(long)]
        skeleton: String,
        /// Colored word, e.g. "m=5: 4 1 2 3 2 2 3 2 1 4 red={3}".
        #[arg(long)]
        colored: String,
        #[arg(long)]
        realize: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Render a braid file as an SVG diagram.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the canonical lattice form of a braid.
    Normalize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide positive isotopy of two braid files.
    SameClass {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
    /// Decide freeness of a braid class.
    IsFree {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn coefficients(global: &Global) -> Result<Coefficients> {
    match global.coeff.as_str() {
        "z" => Ok(Coefficients::Integer),
        "z2" => Ok(Coefficients::Mod2),
        other => bail!("unknown coefficients `{other}` (expected z or z2)"),
    }
}

fn check_window(global: &Global, braid: &braidforce::braid::DiscretizedBraid) -> Result<()> {
    if let Some(w) = &global.window {
        let (lo, hi) = w
            .split_once(',')
            .ok_or_else(|| anyhow!("--window expects `lo,hi`"))?;
        let lo: f64 = lo.trim().parse()?;
        let hi: f64 = hi.trim().parse()?;
        for s in braid.strands() {
            for v in s {
                let v = braidforce::rat_to_f64(v);
                if v < lo || v > hi {
                    bail!("anchor {v} outside the window [{lo}, {hi}]");
                }
            }
        }
    }
    Ok(())
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let global = cli.global.clone();
    match cli.command {
        Command::Validate { input, colored } => {
            let text = read(&input)?;
            let (braid, n) = io::parse_braid(&text).map_err(|e| anyhow!("{e}"))?;
            check_window(&global, &braid)?;
            if colored && n.is_none() {
                bail!("no red strands in a colored validation");
            }
            match braid.validate() {
                braidforce::braid::Validity::Ok => {
                    println!("ok: m={} d={} |word|={}", braid.strand_count(), braid.period(), braid.word_metric());
                    Ok(ExitCode::SUCCESS)
                }
                braidforce::braid::Validity::Violation(v) => {
                    println!("violation: {v}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Word { input } => {
            let text = read(&input)?;
            let (braid, _) = io::parse_braid(&text).map_err(|e| anyhow!("{e}"))?;
            check_window(&global, &braid)?;
            let word = braid.braid_word();
            let letters: Vec<String> = word.letters().iter().map(|i| i.to_string()).collect();
            println!("{}", letters.join(" "));
            Ok(ExitCode::SUCCESS)
        }
        Command::Conjugacy { word } => {
            let (w, _) = io::parse_word(&word).map_err(|e| anyhow!("{e}"))?;
            let class = conjugacy_class(&w)?;
            for member in &class.members {
                println!("{}", io::show_word(member));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Flags { input } => {
            let text = read(&input)?;
            let cb = io::parse_colored_braid(&text).map_err(|e| anyhow!("{e}"))?;
            check_window(&global, cb.braid())?;
            let fiber = Fiber::build(&cb, &FiberOptions::default())?;
            let flags = fiber.flags();
            println!(
                "proper={} bounded={} free={} acylindrical={:?} components={} membership={:?}",
                flags.proper,
                flags.bounded,
                flags.free,
                flags.acylindrical,
                fiber.components.len(),
                fiber.membership
            );
            if let Some(w) = flags.collapse_witness {
                println!("collapse witness: {w}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Index { input, word } => {
            let mut opts = IndexOptions::default();
            opts.coefficients = coefficients(&global)?;
            let report = match (input, word) {
                (Some(path), None) => {
                    let cb = io::parse_colored_braid(&read(&path)?).map_err(|e| anyhow!("{e}"))?;
                    check_window(&global, cb.braid())?;
                    braid_index(&cb, &opts)
                }
                (None, Some(text)) => {
                    let (_, colored) = io::parse_word(&text).map_err(|e| anyhow!("{e}"))?;
                    let colored =
                        colored.ok_or_else(|| anyhow!("the word needs a red={{...}} coloring"))?;
                    class_index(&colored, &opts)
                }
                _ => bail!("pass exactly one of --input or --word"),
            };
            match report {
                Ok(report) => {
                    println!("betti: {:?}", report.homology.betti);
                    for (k, t) in report.homology.torsion.iter().enumerate() {
                        if !t.is_empty() {
                            println!("torsion[{k}]: {t:?}");
                        }
                    }
                    println!("P_t = {}", report.homology.poincare());
                    println!("|P_t| = {}", report.homology.monomial_count());
                    println!(
                        "provenance: components={} fiber_states={} membership={:?} period={} augmented={}",
                        report.components.len(),
                        report.fiber_states,
                        report.membership,
                        report.period,
                        report.augmented
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(ConleyError::Improper(w)) => {
                    println!("refused: improper class ({w})");
                    Ok(ExitCode::from(1))
                }
                Err(ConleyError::Unbounded) => {
                    println!("refused: unbounded class");
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Simulate { system, class } => {
            let sys = io::parse_system(&read(&system)?).map_err(|e| anyhow!("{e}"))?;
            if sys.invariant_set.is_empty() {
                bail!("system file lists no invariant points");
            }
            let chain = sys.chain;
            let rs = RecurrenceSystem::new(&chain);
            let traced = chain
                .trace(&sys.invariant_set)
                .map_err(|e| anyhow!("tracing the invariant set: {e}"))?;
            let d = chain.period();
            let fixed: Vec<Vec<f64>> = traced
                .orbits
                .iter()
                .map(|o| o.iter().take(d).map(|&(x, _)| x).collect())
                .collect();
            println!("period {d}, skeleton strands {}", fixed.len());
            for f in &fixed {
                println!("skeleton residual: {:.3e}", rs.residual_norm(f)?);
            }
            let braid = traced.braid();
            let word = braid.braid_word();
            println!("skeleton word length {}", word.len());
            if let Some(path) = class {
                let cb = io::parse_colored_braid(&read(&path)?).map_err(|e| anyhow!("{e}"))?;
                println!("class file: {} red, {} black", cb.red_count(), cb.black_count());
            }
            // Seeds between consecutive skeleton levels.
            let m = fixed.len();
            let mut seeds = Vec::new();
            for g in 0..=m {
                let mut seed = Vec::with_capacity(d);
                for j in 0..d {
                    let mut vals: Vec<f64> = fixed.iter().map(|f| f[j]).collect();
                    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    seed.push(if g == 0 {
                        vals[0] - 1.0
                    } else if g == m {
                        vals[m - 1] + 1.0
                    } else {
                        0.5 * (vals[g - 1] + vals[g])
                    });
                }
                seeds.push(seed);
            }
            let jitter = 1e-3 * (1.0 + global.seed as f64);
            for k in 0..seeds.len() {
                let mut s = seeds[k].clone();
                for (j, v) in s.iter_mut().enumerate() {
                    *v += jitter * (((j + k) % 3) as f64 - 1.0);
                }
                seeds.push(s);
            }
            let mut flow = FlowOptions::default();
            flow.tolerance = global.tol;
            let (found, _) = find_stationary(&rs, &fixed, &seeds, &flow)?;
            println!("stationary strands: {}", found.len());
            for (k, sol) in found.iter().enumerate() {
                let orbit = lift_orbit(&rs, &sol.strand, 1e-6)?;
                println!("orbit {} residual {:.3e}", k + 1, sol.residual);
                for (x, y) in orbit {
                    println!("  {x:.12} {y:.12}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Force { skeleton, colored, realize, report } => {
            let (skel, _) = io::parse_word(&skeleton).map_err(|e| anyhow!("{e}"))?;
            let (_, cw) = io::parse_word(&colored).map_err(|e| anyhow!("{e}"))?;
            let cw = cw.ok_or_else(|| anyhow!("--colored needs a red={{...}} coloring"))?;
            let realization = match realize {
                None => None,
                Some(path) => {
                    let sys = io::parse_system(&read(&path)?).map_err(|e| anyhow!("{e}"))?;
                    if sys.invariant_set.is_empty() {
                        bail!("realization file lists no invariant points");
                    }
                    Some(Realization { chain: sys.chain, invariant_set: sys.invariant_set })
                }
            };
            let query = ForcingQuery { skeleton: skel, colored: cw, realization };
            let mut opts = ForceOptions::default();
            opts.flow.tolerance = global.tol;
            opts.index.coefficients = coefficients(&global)?;
            let result = force(&query, &opts)?;
            let text = render_report(&format!("{skeleton} / {colored}"), &result);
            match report {
                Some(path) => std::fs::write(&path, &text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            if result.refusal.is_some() {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Render { input, out } => {
            let text = read(&input)?;
            let (braid, n) = io::parse_braid(&text).map_err(|e| anyhow!("{e}"))?;
            let svg = render::render_svg(&braid, n.unwrap_or(0));
            std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalize { input } => {
            let text = read(&input)?;
            let (braid, n) = io::parse_braid(&text).map_err(|e| anyhow!("{e}"))?;
            let regular = braid.regularize();
            let (space, state) = StateSpace::from_braid(&regular);
            print!("{}", io::show_braid(&space.to_braid(&state), n.unwrap_or(0)));
            Ok(ExitCode::SUCCESS)
        }
        Command::SameClass { first, second } => {
            let (a, _) = io::parse_braid(&read(&first)?).map_err(|e| anyhow!("{e}"))?;
            let (b, _) = io::parse_braid(&read(&second)?).map_err(|e| anyhow!("{e}"))?;
            let same = same_class(&a, &b)?;
            println!("{same}");
            Ok(ExitCode::SUCCESS)
        }
        Command::IsFree { input } => {
            let (b, _) = io::parse_braid(&read(&input)?).map_err(|e| anyhow!("{e}"))?;
            println!("{}", is_free(&b)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
