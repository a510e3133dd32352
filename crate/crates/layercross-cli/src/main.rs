//! Command-line front end: counting, planarity, kernelization, solving,
//! gadget generation, Disjoint Factors, verification, and rendering.
//!
//! Exit codes: 0 = yes/done, 2 = decided no, 3 = input error,
//! 4 = resource limit.

mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use layercross::brute::{brute_decide, solve3_exact, BruteConfig, BruteError, Solve3Outcome};
use layercross::codec;
use layercross::gadgets::{self, df_solve, DfInstance, GadgetKind, GadgetParams};
use layercross::graph::{count_crossings, count_crossings_pairwise, Drawing, Instance};
use layercross::kernel2::{kernelize2, Kernel2Outcome};
use layercross::kernel3::{kernelize3, Kernel3Outcome, KernelMode};
use layercross::planarity::{crossing_free_with_orders, OrderConstraints};
use layercross::subexp2::{solve2, Solve2Config, Solve2Outcome, Solve2Stats};

const EXIT_NO: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_LIMIT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "layercross",
    version,
    about = "Layered-graph crossing minimization toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count crossings of a drawing.
    Count {
        graph: PathBuf,
        drawing: PathBuf,
        /// Also list the crossing edge pairs.
        #[arg(long)]
        pairs: bool,
    },
    /// Decide crossing-free drawability (h <= 3) under optional constraints.
    Planar {
        graph: PathBuf,
        /// Constraints file: `chain <layer> <id>...` / `pair <layer> <s> <t>`.
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Kernelize a 2- or 3-layer instance.
    Kernel {
        graph: PathBuf,
        #[arg(long)]
        layers: u8,
        #[arg(long, value_enum, default_value_t = ModeArg::Scheduled)]
        mode: ModeArg,
        /// Write one line per rule application.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Budget override (defaults to the instance header).
        #[arg(short)]
        k: Option<u64>,
    },
    /// Decide whether a drawing with at most k crossings exists.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum)]
        alg: Alg,
        /// Budget override (defaults to the instance header).
        #[arg(short)]
        k: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate gadget instances.
    Gen(GenArgs),
    /// Solve Disjoint Factors.
    Df {
        #[arg(long)]
        string: String,
        #[arg(long)]
        k: usize,
    },
    /// Recount a drawing against a claimed budget.
    Verify {
        graph: PathBuf,
        drawing: PathBuf,
        #[arg(short)]
        k: u64,
    },
    /// Render a drawing as SVG.
    Render {
        graph: PathBuf,
        drawing: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Scheduled,
    Fixpoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Brute,
    Subexp2,
    Exact3,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 2)]
    k: u64,
    /// Pendant-bundle size (defaults to 40k^3).
    #[arg(long)]
    p: Option<u64>,
    /// Input string for the string-encoding families.
    #[arg(long)]
    string: Option<String>,
    /// Symbol index for the per-symbol families.
    #[arg(long, default_value_t = 1)]
    symbol: usize,
    /// Seed for random families (required there).
    #[arg(long)]
    seed: Option<u64>,
    /// Random string length for df-random.
    #[arg(long)]
    len: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Companion drawing output.
    #[arg(long)]
    ord: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Limit(String),
}

impl From<codec::CodecError> for Failure {
    fn from(e: codec::CodecError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<BruteError> for Failure {
    fn from(e: BruteError) -> Self {
        match e {
            BruteError::EnumerationLimit(..) | BruteError::SearchNodeLimit(..) => {
                Failure::Limit(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    codec::decode_instance(&std::fs::read_to_string(path)?).map_err(Into::into)
}

fn read_drawing(path: &Path) -> Result<Drawing, Failure> {
    codec::decode_drawing(&std::fs::read_to_string(path)?).map_err(Into::into)
}

fn emit_drawing(d: &Drawing, out: Option<&Path>) -> Result<(), Failure> {
    let text = codec::encode_drawing(d);
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Answers carry the drawing/decision; `No` maps to exit code 2.
enum Answer {
    Done,
    No,
}

fn run() -> Result<Answer, Failure> {
    let cli = Cli::parse();
    match cli.command {
        Command::Count {
            graph,
            drawing,
            pairs,
        } => {
            let inst = read_instance(&graph)?;
            let d = read_drawing(&drawing)?;
            let report = if pairs {
                count_crossings_pairwise(&inst.graph, &d)
            } else {
                count_crossings(&inst.graph, &d)
            }
            .map_err(|e| Failure::Input(e.to_string()))?;
            println!("crossings: {}", report.total);
            for (i, c) in report.per_gap.iter().enumerate() {
                println!("gap {}-{}: {}", i + 1, i + 2, c);
            }
            if let Some(pairs) = report.pairs {
                for (a, b) in pairs {
                    let (ea, eb) = (inst.graph.edge(a), inst.graph.edge(b));
                    println!("pair: {}-{} x {}-{}", ea.u, ea.v, eb.u, eb.v);
                }
            }
            Ok(Answer::Done)
        }
        Command::Planar {
            graph,
            constraints,
            output,
        } => {
            let inst = read_instance(&graph)?;
            let oc = match constraints {
                Some(p) => codec::decode_constraints(&std::fs::read_to_string(p)?, inst.graph.h())?,
                None => OrderConstraints::empty(inst.graph.h()),
            };
            match crossing_free_with_orders(&inst.graph, &oc)
                .map_err(|e| Failure::Input(e.to_string()))?
            {
                Some(d) => {
                    emit_drawing(&d, output.as_deref())?;
                    Ok(Answer::Done)
                }
                None => {
                    eprintln!("no crossing-free drawing");
                    Ok(Answer::No)
                }
            }
        }
        Command::Kernel {
            graph,
            layers,
            mode,
            trace,
            output,
            k,
        } => {
            let mut inst = read_instance(&graph)?;
            if let Some(k) = k {
                inst = Instance::new(inst.graph, k);
            }
            if layers != inst.graph.h() {
                return Err(Failure::Input(format!(
                    "--layers {layers} but the instance has {} layers",
                    inst.graph.h()
                )));
            }
            match layers {
                2 => match kernelize2(&inst).map_err(|e| Failure::Input(e.to_string()))? {
                    Kernel2Outcome::DecidedYes { witness } => {
                        println!("decided: yes");
                        emit_drawing(&witness, output.as_deref())?;
                        Ok(Answer::Done)
                    }
                    Kernel2Outcome::DecidedNo => {
                        println!("decided: no");
                        Ok(Answer::No)
                    }
                    Kernel2Outcome::Kernelized {
                        instance,
                        contracted,
                        flagged,
                    } => {
                        println!(
                            "kernelized: n {} -> {}, contracted {contracted}{}",
                            inst.graph.n(),
                            instance.graph.n(),
                            if flagged {
                                " (some chains flagged)"
                            } else {
                                ""
                            }
                        );
                        let text = codec::encode_instance(&instance);
                        match output {
                            Some(p) => std::fs::write(p, text)?,
                            None => print!("{text}"),
                        }
                        Ok(Answer::Done)
                    }
                },
                3 => {
                    let mode = match mode {
                        ModeArg::Scheduled => KernelMode::Scheduled,
                        ModeArg::Fixpoint => KernelMode::Fixpoint,
                    };
                    match kernelize3(&inst, mode).map_err(|e| Failure::Input(e.to_string()))? {
                        Kernel3Outcome::DecidedYes { witness } => {
                            println!("decided: yes");
                            if let Some(w) = witness {
                                emit_drawing(&w, output.as_deref())?;
                            }
                            Ok(Answer::Done)
                        }
                        Kernel3Outcome::DecidedNo => {
                            println!("decided: no");
                            Ok(Answer::No)
                        }
                        Kernel3Outcome::Kernelized { instance, trace: t } => {
                            println!(
                                "kernelized: n {} -> {}, {} rule applications",
                                inst.graph.n(),
                                instance.graph.n(),
                                t.len()
                            );
                            if let Some(path) = trace {
                                let mut text = String::new();
                                for app in &t {
                                    text.push_str(&format!(
                                        "rule={} deleted={} added={} locus={}\n",
                                        app.rule.name(),
                                        join(&app.deleted),
                                        app.added_edges
                                            .iter()
                                            .map(|(a, b)| format!("{a}-{b}"))
                                            .collect::<Vec<_>>()
                                            .join(","),
                                        join(&app.locus),
                                    ));
                                }
                                std::fs::write(path, text)?;
                            }
                            let text = codec::encode_instance(&instance);
                            match output {
                                Some(p) => std::fs::write(p, text)?,
                                None => print!("{text}"),
                            }
                            Ok(Answer::Done)
                        }
                    }
                }
                other => Err(Failure::Input(format!("unsupported --layers {other}"))),
            }
        }
        Command::Solve {
            graph,
            alg,
            k,
            jobs,
            output,
        } => {
            let mut inst = read_instance(&graph)?;
            if let Some(k) = k {
                inst = Instance::new(inst.graph, k);
            }
            let cfg = BruteConfig {
                jobs,
                ..Default::default()
            };
            match alg {
                Alg::Brute => match brute_decide(&inst, None, &cfg)? {
                    Some(d) => {
                        let total = count_crossings(&inst.graph, &d).unwrap().total;
                        println!("yes: {total} crossings within budget {}", inst.k);
                        emit_drawing(&d, output.as_deref())?;
                        Ok(Answer::Done)
                    }
                    None => {
                        println!("no: more than {} crossings required", inst.k);
                        Ok(Answer::No)
                    }
                },
                Alg::Subexp2 => {
                    let s2cfg = Solve2Config::from_env();
                    let mut stats = Solve2Stats::default();
                    match solve2(&inst, &s2cfg, &mut stats)
                        .map_err(|e| Failure::Input(e.to_string()))?
                    {
                        Solve2Outcome::Yes { min, drawing } => {
                            println!("yes: minimum {min} within budget {}", inst.k);
                            emit_drawing(&drawing, output.as_deref())?;
                            Ok(Answer::Done)
                        }
                        Solve2Outcome::No => {
                            println!("no: more than {} crossings required", inst.k);
                            Ok(Answer::No)
                        }
                    }
                }
                Alg::Exact3 => match solve3_exact(&inst, layercross::brute::DEFAULT_MAX_NODES)? {
                    Solve3Outcome::Yes {
                        min,
                        drawing,
                        searched,
                    } => {
                        println!(
                            "yes: minimum {min} within budget {} (searched instance has {} vertices)",
                            inst.k,
                            searched.graph.n()
                        );
                        emit_drawing(&drawing, output.as_deref())?;
                        Ok(Answer::Done)
                    }
                    Solve3Outcome::No => {
                        println!("no: more than {} crossings required", inst.k);
                        Ok(Answer::No)
                    }
                },
            }
        }
        Command::Gen(args) => run_gen(args),
        Command::Df { string, k } => {
            let inst = DfInstance::parse(&string, k).map_err(|e| Failure::Input(e.to_string()))?;
            match df_solve(&inst).map_err(|e| Failure::Limit(e.to_string()))? {
                Some(factors) => {
                    for f in factors {
                        println!(
                            "factor symbol={} range={}..{} text={}",
                            f.symbol,
                            f.start,
                            f.end,
                            &string[f.start..f.end]
                        );
                    }
                    Ok(Answer::Done)
                }
                None => {
                    println!("no disjoint factor family");
                    Ok(Answer::No)
                }
            }
        }
        Command::Verify { graph, drawing, k } => {
            let inst = read_instance(&graph)?;
            let d = read_drawing(&drawing)?;
            let report =
                count_crossings(&inst.graph, &d).map_err(|e| Failure::Input(e.to_string()))?;
            println!("crossings: {} budget: {k}", report.total);
            if report.total <= k {
                Ok(Answer::Done)
            } else {
                Ok(Answer::No)
            }
        }
        Command::Render {
            graph,
            drawing,
            output,
        } => {
            let inst = read_instance(&graph)?;
            let d = read_drawing(&drawing)?;
            let text = svg::render_svg(&inst.graph, &d).map_err(Failure::Input)?;
            std::fs::write(output, text)?;
            Ok(Answer::Done)
        }
    }
}

fn join(vs: &[layercross::VertexId]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn run_gen(args: GenArgs) -> Result<Answer, Failure> {
    let params = GadgetParams::new(args.k, args.p).map_err(|e| Failure::Input(e.to_string()))?;
    let fail = |e: gadgets::GadgetError| Failure::Input(e.to_string());
    let (instance, drawing, comment): (Instance, Option<Drawing>, String) =
        match args.family.as_str() {
            f if GadgetKind::parse(f).is_some() => {
                let built =
                    gadgets::build_gadget(GadgetKind::parse(f).unwrap(), &params).map_err(fail)?;
                (
                    Instance::new(built.graph, 0),
                    Some(built.drawing),
                    format!("family: {f} k={} p={}", args.k, params.p),
                )
            }
            "s" | "shat" => {
                let built = if args.family == "s" {
                    gadgets::build_s(args.symbol, &params)
                } else {
                    gadgets::build_shat(args.symbol, &params)
                }
                .map_err(fail)?;
                (
                    Instance::new(built.graph, 0),
                    Some(built.drawing),
                    format!(
                        "family: {} symbol={} k={} p={}",
                        args.family, args.symbol, args.k, params.p
                    ),
                )
            }
            "restrictive" => {
                let (built, count) =
                    gadgets::restrictive_drawing(args.symbol, &params).map_err(fail)?;
                (
                    Instance::new(built.graph, count),
                    Some(built.drawing),
                    format!(
                        "family: restrictive symbol={} k={} p={} count={count}",
                        args.symbol, args.k, params.p
                    ),
                )
            }
            "r" | "rhat" | "nokern4" | "eth5" | "df-random" => {
                let (string, df) = resolve_string(&args, &params)?;
                match args.family.as_str() {
                    "rhat" => {
                        let built = gadgets::build_rhat(&params).map_err(fail)?;
                        (
                            Instance::new(built.graph, 0),
                            Some(built.drawing),
                            format!("family: rhat k={} p={}", args.k, params.p),
                        )
                    }
                    "r" => {
                        let built = gadgets::build_r(&df, &params).map_err(fail)?;
                        (
                            Instance::new(built.graph, 0),
                            Some(built.drawing),
                            format!("family: r string={string} k={} p={}", args.k, params.p),
                        )
                    }
                    fam => {
                        let witness = df_solve(&df).map_err(|e| Failure::Limit(e.to_string()))?;
                        let red = if fam == "eth5" {
                            gadgets::build_eth5(&df, &params, witness.as_deref())
                        } else {
                            gadgets::build_nokern4(&df, &params, witness.as_deref())
                        }
                        .map_err(fail)?;
                        (
                            red.instance,
                            red.witness_drawing,
                            format!(
                                "family: {fam} string={string} k={} p={} witness={}",
                                args.k,
                                params.p,
                                if witness.is_some() { "yes" } else { "no" }
                            ),
                        )
                    }
                }
            }
            other => return Err(Failure::Input(format!("unknown family {other:?}"))),
        };
    let mut text = format!("c {comment}\n");
    text.push_str(&codec::encode_instance(&instance));
    match &args.output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(d)) = (&args.ord, &drawing) {
        std::fs::write(path, codec::encode_drawing(d))?;
    }
    Ok(Answer::Done)
}

/// The string for the string-encoding families: explicit, or seeded random
/// for df-random (seed mandatory there).
fn resolve_string(args: &GenArgs, params: &GadgetParams) -> Result<(String, DfInstance), Failure> {
    let k = params.k as usize;
    let letters: Vec<char> = (0..k).map(|i| (b'a' + i as u8) as char).collect();
    if args.family == "df-random" {
        let seed = args
            .seed
            .ok_or_else(|| Failure::Input("--seed is required for random generation".into()))?;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let len = args.len.unwrap_or(4 * k);
        let s: String = (0..len).map(|_| letters[rng.gen_range(0..k)]).collect();
        let df = DfInstance::parse(&s, k).map_err(|e| Failure::Input(e.to_string()))?;
        Ok((s, df))
    } else {
        let s = args
            .string
            .clone()
            .unwrap_or_else(|| letters.iter().flat_map(|&c| [c, c]).collect());
        let df = DfInstance::parse(&s, k).map_err(|e| Failure::Input(e.to_string()))?;
        Ok((s, df))
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(Answer::Done) => ExitCode::SUCCESS,
        Ok(Answer::No) => ExitCode::from(EXIT_NO),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Limit(msg)) => {
            eprintln!("resource limit: {msg}");
            ExitCode::from(EXIT_LIMIT)
        }
    }
}
