//! `strandpoly` — compute graph invariants, run verification suites, and
//! convert graph files.
//!
//! Exit codes: 0 success; 1 verification failures; 2 unreadable or malformed
//! input; 3 invariant/family mismatch; 4 internal invariant violation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use strandpoly::invariant::{compute_invariant, InvariantKind};
use strandpoly::json::{load_graph_file, AnyGraph, GraphFile};
use strandpoly::poly::{Basis, Polynomial};
use strandpoly::ribbon::{br_classic, br_flags, br_flags_prime};
use strandpoly::simple::{tutte_classic, tutte_flags_statesum, SimpleFlagGraph};
use strandpoly::stranded::BoundaryGraph;
use strandpoly::verify::{default_spec, run_suite, suite_names, GeneratorFamily, SuiteReport};
use strandpoly::Error;

#[derive(Parser)]
#[command(name = "strandpoly", version, about = "Graph invariants for graphs with flags")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an invariant of the graph in a file.
    Compute(ComputeArgs),
    /// Run verification suites and report failures.
    Verify(VerifyArgs),
    /// Expand a compact colored description into the full stranded schema.
    Expand { input: PathBuf },
    /// Emit a Graphviz DOT rendering of the graph.
    Export(ExportArgs),
    /// Canonicalize a file to its disc-stripped representative.
    Reduce { input: PathBuf },
}

#[derive(Args)]
struct ComputeArgs {
    input: PathBuf,
    /// Which invariant to compute.
    #[arg(long, value_enum)]
    invariant: InvariantName,
    /// Whether x/y slots denote x−1/y−1 (shifted) or plain x/y.
    #[arg(long, value_enum, default_value_t = BasisName::Shifted)]
    basis: BasisName,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run, or "all".
    #[arg(default_value = "all")]
    suite: String,
    /// Suite name via flag; overrides the positional form.
    #[arg(long = "suite", value_name = "SUITE")]
    suite_flag: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    cases: u32,
    /// Generator family; defaults to each suite's native family.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExportArgs {
    input: PathBuf,
    /// collapsed: underlying graph with flags; boundary: the boundary graph.
    #[arg(long, value_enum, default_value_t = Target::Collapsed)]
    target: Target,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InvariantName {
    /// Classic Tutte polynomial of the underlying graph.
    Tutte,
    /// Flag-extended Tutte polynomial 𝒯(x,y,t).
    TutteFlags,
    /// Classic Bollobás–Riordan polynomial (closed ribbon graphs).
    Br,
    /// Flag-extended ribbon polynomial ℛ(x,y,z,s,t).
    BrFlags,
    /// Pinched-limit ribbon polynomial ℛ′.
    BrFlagsPrime,
    /// Seven-variable polynomial 𝔗(x,y,z,s,w,q,t) of w-colored graphs.
    TFrak,
    /// 𝔗 with s → z⁻².
    TPrime,
    /// 𝔗 with s → z⁻²s², w → s⁻¹, q → s, t → s⁻¹.
    TSecond,
    /// 𝔗 with s → 1, w → z⁻¹, q → z, t → z⁻¹.
    TTriple,
    /// Multivariate form with one β variable per edge.
    Multivariate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisName {
    Shifted,
    Standard,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Collapsed,
    Boundary,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => cmd_compute(&args),
        Command::Verify(args) => return cmd_verify(&args),
        Command::Expand { input } => cmd_expand(&input),
        Command::Export(args) => cmd_export(&args),
        Command::Reduce { input } => cmd_reduce(&input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Invalid(_) => 2,
        Error::FamilyMismatch(_) => 3,
        Error::Internal(_) => 4,
    }
}

fn load(path: &Path) -> Result<GraphFile, Error> {
    load_graph_file(path)
}

fn mismatch(invariant: &str, family: &str) -> Error {
    Error::FamilyMismatch(format!(
        "invariant {invariant} is not defined for {family} graphs"
    ))
}

/// Compute the requested invariant in its native basis, returning the
/// polynomial together with that native basis.
fn evaluate(name: InvariantName, graph: &AnyGraph) -> Result<(Polynomial, Basis), Error> {
    let simple_view = |g: &AnyGraph| -> Option<SimpleFlagGraph> {
        match g {
            AnyGraph::Simple(s) => Some(s.clone()),
            AnyGraph::Ribbon(r) => Some(r.underlying_simple()),
            AnyGraph::Stranded(s) => Some(s.collapsed_simple()),
        }
    };
    match name {
        InvariantName::Tutte => {
            let g = simple_view(graph).expect("every family has an underlying graph");
            Ok((tutte_classic(&g), Basis::Standard))
        }
        InvariantName::TutteFlags => {
            let g = simple_view(graph).expect("every family has an underlying graph");
            Ok((tutte_flags_statesum(&g), Basis::Shifted))
        }
        InvariantName::Br => match graph {
            AnyGraph::Ribbon(r) => Ok((br_classic(r)?, Basis::Shifted)),
            _ => Err(mismatch("br", graph.family_name())),
        },
        InvariantName::BrFlags => match graph {
            AnyGraph::Ribbon(r) => Ok((br_flags(r)?, Basis::Shifted)),
            _ => Err(mismatch("br-flags", graph.family_name())),
        },
        InvariantName::BrFlagsPrime => match graph {
            AnyGraph::Ribbon(r) => Ok((br_flags_prime(r)?, Basis::Shifted)),
            _ => Err(mismatch("br-flags-prime", graph.family_name())),
        },
        InvariantName::TFrak
        | InvariantName::TPrime
        | InvariantName::TSecond
        | InvariantName::TTriple
        | InvariantName::Multivariate => match graph {
            AnyGraph::Stranded(s) => {
                let kind = match name {
                    InvariantName::TFrak => InvariantKind::TFrak,
                    InvariantName::TPrime => InvariantKind::TPrime,
                    InvariantName::TSecond => InvariantKind::TSecond,
                    InvariantName::TTriple => InvariantKind::TTriple,
                    _ => InvariantKind::Multivariate,
                };
                Ok((compute_invariant(s, kind)?, Basis::Shifted))
            }
            _ => Err(mismatch("this invariant family", graph.family_name())),
        },
    }
}

fn cmd_compute(args: &ComputeArgs) -> Result<(), Error> {
    let file = load(&args.input)?;
    let graph = file.to_graph()?;
    let (native, native_basis) = evaluate(args.invariant, &graph)?;
    let out_basis = match args.basis {
        BasisName::Shifted => Basis::Shifted,
        BasisName::Standard => Basis::Standard,
    };
    let poly = native.to_basis(native_basis, out_basis);
    match args.format {
        Format::Text => println!("{}", poly.render(out_basis)),
        Format::Json => {
            let doc = serde_json::json!({
                "invariant": invariant_label(args.invariant),
                "basis": match out_basis { Basis::Shifted => "shifted", Basis::Standard => "standard" },
                "terms": poly.to_json(out_basis),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable document"));
        }
    }
    Ok(())
}

fn invariant_label(name: InvariantName) -> &'static str {
    match name {
        InvariantName::Tutte => "tutte",
        InvariantName::TutteFlags => "tutte-flags",
        InvariantName::Br => "br",
        InvariantName::BrFlags => "br-flags",
        InvariantName::BrFlagsPrime => "br-flags-prime",
        InvariantName::TFrak => "t-frak",
        InvariantName::TPrime => "t-prime",
        InvariantName::TSecond => "t-second",
        InvariantName::TTriple => "t-triple",
        InvariantName::Multivariate => "multivariate",
    }
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    match run_verify(args) {
        Ok(reports) => {
            let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
            match args.format {
                Format::Text => {
                    for r in &reports {
                        print!("{}", r.render_text());
                        eprintln!("suite {} took {} ms", r.suite, r.millis);
                    }
                    println!(
                        "total: {} suites, {} failures",
                        reports.len(),
                        failures
                    );
                }
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&reports).expect("serializable reports")
                ),
            }
            if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run_verify(args: &VerifyArgs) -> Result<Vec<SuiteReport>, Error> {
    let family = args
        .family
        .as_deref()
        .map(GeneratorFamily::parse)
        .transpose()?;
    let chosen = args.suite_flag.as_deref().unwrap_or(&args.suite);
    let names: Vec<&str> = if chosen == "all" {
        suite_names()
    } else {
        vec![suite_names()
            .into_iter()
            .find(|n| *n == chosen)
            .ok_or_else(|| {
                Error::Invalid(format!("unknown suite {chosen:?}; known: {:?}", suite_names()))
            })?]
    };
    names
        .into_iter()
        .filter(|name| {
            // Under "all" with an explicit family, skip suites the family
            // does not apply to instead of failing.
            family.is_none()
                || chosen != "all"
                || default_spec(name, family, args.seed).is_ok()
        })
        .map(|name| {
            let spec = default_spec(name, family, args.seed)?;
            run_suite(name, &spec, args.cases)
        })
        .collect()
}

fn cmd_expand(input: &Path) -> Result<(), Error> {
    let file = load(input)?;
    print!("{}", file.expand()?.render());
    Ok(())
}

fn cmd_reduce(input: &Path) -> Result<(), Error> {
    let file = load(input)?;
    print!("{}", file.reduce()?.render());
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> Result<(), Error> {
    let file = load(&args.input)?;
    let graph = file.to_graph()?;
    let dot = match args.target {
        Target::Collapsed => {
            let g = match &graph {
                AnyGraph::Simple(s) => s.clone(),
                AnyGraph::Ribbon(r) => r.underlying_simple(),
                AnyGraph::Stranded(s) => s.collapsed_simple(),
            };
            simple_dot(&g)
        }
        Target::Boundary => match &graph {
            AnyGraph::Stranded(s) => boundary_dot(&s.boundary()),
            AnyGraph::Ribbon(r) => simple_dot(&r.boundary_graph()),
            AnyGraph::Simple(_) => {
                return Err(Error::FamilyMismatch(
                    "abstract graphs carry no boundary; use --target collapsed".into(),
                ))
            }
        },
    };
    print!("{dot}");
    Ok(())
}

fn simple_dot(g: &SimpleFlagGraph) -> String {
    let mut out = String::from("graph g {\n  node [shape=circle];\n");
    for v in g.vertices() {
        out.push_str(&format!("  v{v} [label=\"{v}\"];\n"));
    }
    for (f, v) in g.flags() {
        out.push_str(&format!("  f{f} [shape=point];\n  v{v} -- f{f} [style=dashed];\n"));
    }
    for e in g.edge_ids() {
        let (u, v) = g.edge_ends(e).expect("edge id from the graph's own list");
        out.push_str(&format!("  v{u} -- v{v} [label=\"e{e}\"];\n"));
    }
    out.push_str("}\n");
    out
}

fn boundary_dot(b: &BoundaryGraph) -> String {
    let mut out = String::from("graph boundary {\n  node [shape=circle];\n");
    for (flag, color) in &b.vertices {
        out.push_str(&format!("  f{flag} [label=\"f{flag}/c{color}\"];\n"));
    }
    for (pair, a, c) in &b.edges {
        out.push_str(&format!(
            "  f{a} -- f{c} [label=\"({},{})\"];\n",
            pair.0, pair.1
        ));
    }
    out.push_str("}\n");
    out
}
