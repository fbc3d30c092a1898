//! `munu`: explore finitary set functors from the command line.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use munu_core::{
    chains, check_intersection_preservation, completion_witness, demo, distance, epsilon, gset,
    leq, minimize, BasePoint, Coalgebra, FiniteFunction, FunctorExpr, RationalElement,
    VerificationReport, DEFAULT_SIZE_LIMIT,
};

#[derive(Parser)]
#[command(
    name = "munu",
    about = "Functor chains, initial algebras, terminal coalgebras, and the canonical metric and order on them",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Init,
    Term,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct PointRef {
    /// Coalgebra file
    #[arg(long)]
    coalgebra: String,
    /// State of the coalgebra
    #[arg(long)]
    state: String,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a prefix of the initial- or terminal-coalgebra chain
    Chain {
        #[arg(long)]
        functor: String,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long)]
        depth: usize,
        /// List the elements of every stage
        #[arg(long)]
        list: bool,
        /// Print machine-readable depth,size rows
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = DEFAULT_SIZE_LIMIT)]
        size_limit: u64,
    },
    /// Depth-n behavior of a coalgebra state
    Behavior {
        #[command(flatten)]
        point: PointRef,
        #[arg(long)]
        depth: usize,
    },
    /// Behavioral equality of two states given as file:state
    Equal {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Minimize the reachable part of a pointed coalgebra
    Minimize {
        #[command(flatten)]
        point: PointRef,
    },
    /// Canonical ultrametric distance between two states given as file:state
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// The depth-n approximant of a state as a finite term
    Epsilon {
        #[command(flatten)]
        point: PointRef,
        #[arg(long)]
        n: usize,
        /// Base point in F(∅); defaults to the canonically least element
        #[arg(long)]
        base: Option<String>,
    },
    /// The canonical order: is a below b?
    Leq {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        base: Option<String>,
    },
    /// Approximants of a state up to a depth, with density checks
    Witness {
        #[command(flatten)]
        point: PointRef,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        base: Option<String>,
    },
    /// Check that the functor image of a nonempty intersection square is a pullback
    Trnkova {
        #[arg(long)]
        functor: String,
        /// Function literal, e.g. "b1: {a,b} -> {a,b,c} ; a|->a ; b|->b"
        #[arg(long)]
        b1: String,
        #[arg(long)]
        b2: String,
        #[arg(long, default_value_t = DEFAULT_SIZE_LIMIT)]
        size_limit: u64,
    },
    /// Finite group actions: orbits, connected objects, width bookkeeping
    Gset {
        #[command(subcommand)]
        command: GsetCommand,
    },
    /// Run a reproducible demo
    Demo {
        /// pf-countable, aleph-stream, trees, or prefix-order
        name: String,
        /// Demo parameter as key=value; repeatable
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Seed for demos with a sampled corpus
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum GsetCommand {
    /// Orbit decomposition of an action
    Orbits {
        #[arg(long)]
        group: String,
        #[arg(long)]
        action: String,
    },
    /// Connected objects (quotients by equivariant equivalences) and their classes
    Connected {
        #[arg(long)]
        group: String,
    },
    /// Width bookkeeping: class count vs 2^|G|, hom counts vs |X|
    Width {
        #[arg(long)]
        group: String,
        /// Sample action files; repeatable
        #[arg(long = "action")]
        actions: Vec<String>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_point(spec: &str) -> Result<RationalElement, Box<dyn std::error::Error>> {
    let (path, state) = spec
        .rsplit_once(':')
        .ok_or_else(|| format!("expected file:state, got `{spec}`"))?;
    let coalgebra = Coalgebra::parse(&fs::read_to_string(path)?)?;
    Ok(RationalElement::new(coalgebra, state)?)
}

fn load_ref(point: &PointRef) -> Result<RationalElement, Box<dyn std::error::Error>> {
    let coalgebra = Coalgebra::parse(&fs::read_to_string(&point.coalgebra)?)?;
    Ok(RationalElement::new(coalgebra, &point.state)?)
}

fn base_for(
    functor: &FunctorExpr,
    base: &Option<String>,
) -> Result<BasePoint, Box<dyn std::error::Error>> {
    Ok(match base {
        None => BasePoint::default_for(functor)?,
        Some(text) => BasePoint::parse(functor, text)?,
    })
}

fn print_report(report: &VerificationReport) -> bool {
    for check in &report.checks {
        let mark = if check.passed { "ok" } else { "FAIL" };
        if check.detail.is_empty() {
            println!("[{mark}] {}", check.name);
        } else {
            println!("[{mark}] {} ({})", check.name, check.detail);
        }
    }
    report.passed()
}

fn run() -> Result<ExitCode, Box<dyn std::error::Error>> {
    let cli = Cli::parse();
    match cli.command {
        Command::Chain {
            functor,
            direction,
            depth,
            list,
            csv,
            size_limit,
        } => {
            let functor = FunctorExpr::parse(&functor)?;
            let chain = match direction {
                DirectionArg::Init => chains::initial_chain(&functor, depth, size_limit)?,
                DirectionArg::Term => chains::terminal_chain(&functor, depth, size_limit)?,
            };
            if csv {
                println!("depth,size");
                for (k, size) in chains::size_table(&chain) {
                    println!("{k},{size}");
                }
            } else {
                for (k, stage) in chain.stages.iter().enumerate() {
                    println!("stage {k}: {} element(s)", stage.len());
                    if list {
                        for label in stage.iter() {
                            println!("  {label}");
                        }
                    }
                }
                if let Some(k) = chains::detect_convergence(&chain) {
                    println!("chain converges at stage {k} (link is a bijection)");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Behavior { point, depth } => {
            let x = load_ref(&point)?;
            println!("{}", munu_core::project(&x, depth).render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Equal { a, b } => {
            let x = load_point(&a)?;
            let y = load_point(&b)?;
            println!("{}", munu_core::behaviorally_equal(&x, &y)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Minimize { point } => {
            let x = load_ref(&point)?;
            let m = minimize(&x)?;
            println!("point: {}", m.point());
            print!("{}", m.coalgebra().render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Distance { a, b } => {
            let x = load_point(&a)?;
            let y = load_point(&b)?;
            println!("{}", distance(&x, &y)?.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Epsilon { point, n, base } => {
            let x = load_ref(&point)?;
            let base = base_for(x.functor(), &base)?;
            println!("{}", epsilon(&x, n, &base)?.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Leq { a, b, base } => {
            let x = load_point(&a)?;
            let y = load_point(&b)?;
            let base = base_for(x.functor(), &base)?;
            println!("{}", leq(&x, &y, &base)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness { point, depth, base } => {
            let x = load_ref(&point)?;
            let base = base_for(x.functor(), &base)?;
            let witness = completion_witness(&x, depth, &base)?;
            for (n, term) in witness.approximants.iter().enumerate() {
                println!("eps_{n} = {}", term.render());
            }
            let ok = print_report(&witness.report);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Trnkova {
            functor,
            b1,
            b2,
            size_limit,
        } => {
            let functor = FunctorExpr::parse(&functor)?;
            let b1 = FiniteFunction::parse(&b1)?;
            let b2 = FiniteFunction::parse(&b2)?;
            let report = check_intersection_preservation(&functor, &b1, &b2, size_limit)?;
            let ok = print_report(&report);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Gset { command } => run_gset(command),
        Command::Demo {
            name,
            params,
            format,
            seed,
        } => {
            let mut map = BTreeMap::new();
            for param in params {
                let (key, value) = param
                    .split_once('=')
                    .ok_or_else(|| format!("expected key=value, got `{param}`"))?;
                map.insert(key.to_string(), value.to_string());
            }
            if let Some(seed) = seed {
                map.insert("seed".to_string(), seed.to_string());
            }
            let report = demo::run_demo(&name, &map)?;
            match format {
                FormatArg::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                FormatArg::Text => {
                    println!("demo {}", report.name);
                    for (key, value) in &report.params {
                        println!("  {key} = {value}");
                    }
                    for line in &report.lines {
                        println!("{line}");
                    }
                    for check in &report.checks {
                        let mark = if check.passed { "ok" } else { "FAIL" };
                        if check.detail.is_empty() {
                            println!("[{mark}] {}", check.name);
                        } else {
                            println!("[{mark}] {} ({})", check.name, check.detail);
                        }
                    }
                    println!("{}", if report.passed() { "PASS" } else { "FAIL" });
                }
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn run_gset(command: GsetCommand) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match command {
        GsetCommand::Orbits { group, action } => {
            let group = gset::FiniteGroup::parse(&fs::read_to_string(group)?)?;
            let action = gset::GAction::parse(&group, &fs::read_to_string(action)?)?;
            let orbits = gset::orbits(&action);
            println!("power: {}", orbits.len());
            for orbit in orbits {
                println!("{{{}}}", orbit.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
        GsetCommand::Connected { group } => {
            let group = gset::FiniteGroup::parse(&fs::read_to_string(group)?)?;
            let connected = gset::connected_objects(&group)?;
            println!(
                "{} equivariant equivalences, {} isomorphism class(es)",
                connected.objects.len(),
                connected.classes.len()
            );
            for (c, class) in connected.classes.iter().enumerate() {
                for i in class {
                    let obj = &connected.objects[*i];
                    println!(
                        "class {c}: quotient of size {} by subgroup {{{}}}",
                        obj.action.carrier().len(),
                        obj.subgroup.join(", ")
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        GsetCommand::Width { group, actions } => {
            let group = gset::FiniteGroup::parse(&fs::read_to_string(group)?)?;
            let samples: Vec<gset::GAction> = actions
                .iter()
                .map(|path| -> Result<gset::GAction, Box<dyn std::error::Error>> {
                    Ok(gset::GAction::parse(&group, &fs::read_to_string(path)?)?)
                })
                .collect::<Result<_, _>>()?;
            let width = gset::width_report(&group, &samples)?;
            println!(
                "connected classes: {} (bound {})",
                width.connected_class_count, width.class_bound
            );
            let ok = print_report(&width.report);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
