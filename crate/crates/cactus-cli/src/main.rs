//! `cactus`: counting, sampling, split decomposition and oracle runs for
//! cactus graphs.
//!
//! Exit codes: 2 invalid flags, 3 grammar validation failure, 4 resource
//! guard, 5 unrealizable sample size, 6 non-cactus input, 7 invalid tree.

use anyhow::{anyhow, Context, Result};
use cactus_core::engine::{evaluate, EngineError};
use cactus_core::grammar::{parse_grammar, GrammarError, Mode, OmegaSpec};
use cactus_core::oracle::{self, OracleError, SymmetryGroup};
use cactus_core::sampler::{
    structure_to_graph, LabeledFreeRootedSampler, PlaneRootedSampler, RandomSource, SampleError,
    RNG_ALGORITHM,
};
use cactus_core::split_tree::{
    cactus_to_split_tree, glt_from_text, glt_to_text, split_tree_to_cactus,
    validate_reduced_cactus_tree, validate_simplified_cactus_tree, TreeError, TreeForm,
};
use cactus_core::templates::{build, Embedding, FamilySpec, Form, Rooting};
use cactus_core::{dot, svg, GrammarSystem, SimpleGraph};
use clap::{Args, Parser, Subcommand, ValueEnum};

use num_traits::Zero;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cactus", version, about = "Exact enumeration, split decomposition and uniform sampling of cactus graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the exact counting sequence of a family or grammar file
    Count(CountArgs),
    /// Draw a uniform random cactus of an exact size
    Sample(SampleArgs),
    /// Split-decomposition tree operations
    #[command(subcommand)]
    Splittree(SplitTreeCmd),
    /// Brute-force ground truth
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbeddingArg {
    Plane,
    Free,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Template,
    Simplified,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TreeFormArg {
    Reduced,
    Simplified,
}

#[derive(Clone, Copy, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Args)]
struct CountArgs {
    /// Family embedding (with --omega); omit when counting --grammar
    #[arg(long, value_enum)]
    embedding: Option<EmbeddingArg>,
    /// Count the vertex-rooted family
    #[arg(long)]
    rooted: bool,
    /// Labeled (EGF) or unlabeled (OGF) counting
    #[arg(long, value_enum, default_value = "no")]
    labeled: YesNo,
    /// Admissible cycle sizes: {5}, {3,5,7} or >=3
    #[arg(long)]
    omega: Option<String>,
    /// Template or simplified family grammar
    #[arg(long, value_enum, default_value = "template")]
    form: FormArg,
    /// Grammar DSL file instead of a built-in family
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// Truncation order N (counts c_0..c_N)
    #[arg(long)]
    terms: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: SeqFormat,
    /// Output path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    embedding: EmbeddingArg,
    #[arg(long)]
    rooted: bool,
    #[arg(long, value_enum, default_value = "no")]
    labeled: YesNo,
    #[arg(long)]
    omega: String,
    /// Exact number of vertices
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "dot")]
    format: GraphFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Edgelist,
    Svg,
}

#[derive(Subcommand)]
enum SplitTreeCmd {
    /// Convert a cactus (edge-list file) to its split tree
    Decompose {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "reduced")]
        form: TreeFormArg,
        #[arg(long, value_enum, default_value = "dot")]
        format: TreeOutFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rebuild the cactus from a split tree (.glt file)
    Compose {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "edgelist")]
        format: ComposeFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a split tree against the reduced or simplified conditions
    Validate {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "reduced")]
        form: TreeFormArg,
    },
    /// Accessibility (original) graph of a graph-labeled tree
    Accessibility {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "edgelist")]
        format: ComposeFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeOutFormat {
    Dot,
    Glt,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComposeFormat {
    Edgelist,
    Dot,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exhaustive labeled + unlabeled cactus census (n <= 7)
    Census {
        #[arg(long)]
        omega: String,
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        rooted: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exhaustively enumerate grammar structures of one size
    Structures {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long)]
        size: usize,
        /// Also print each structure term
        #[arg(long)]
        list: bool,
    },
    /// Orbit count of q^m strings under a symmetry group
    Burnside {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        group: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    error: anyhow::Error,
}

fn fail(code: u8, error: anyhow::Error) -> CliError {
    CliError { code, error }
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        CliError { code: 1, error }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Count(args) => cmd_count(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Splittree(cmd) => cmd_splittree(cmd),
        Command::Oracle(cmd) => cmd_oracle(cmd),
    }
}

fn parse_omega(text: &str) -> Result<OmegaSpec, CliError> {
    OmegaSpec::parse(text).map_err(|e| fail(2, anyhow!("--omega: {e}")))
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(CliError::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::from)
}

fn engine_error(e: EngineError) -> CliError {
    match &e {
        EngineError::Invalid(_) | EngineError::Grammar(_) => fail(3, e.into()),
        _ => fail(1, e.into()),
    }
}

fn cmd_count(args: CountArgs) -> Result<(), CliError> {
    let mode = match args.labeled {
        YesNo::Yes => Mode::Labeled,
        YesNo::No => Mode::Unlabeled,
    };
    let (system, description, omega_text): (GrammarSystem, String, String) = match (&args.grammar, &args.embedding) {
        (Some(path), None) => {
            let text = read_file(path)?;
            let system = parse_grammar(&text).map_err(|e| match e {
                GrammarError::Parse(_) => fail(3, anyhow!("grammar: {e}")),
                other => fail(3, anyhow!("grammar: {other}")),
            })?;
            let omega_text = system.omega.to_string();
            (system, format!("grammar file {}", path.display()), omega_text)
        }
        (None, Some(embedding)) => {
            let omega_raw = args
                .omega
                .as_deref()
                .ok_or_else(|| fail(2, anyhow!("--omega is required with --embedding")))?;
            let omega = parse_omega(omega_raw)?;
            let spec = FamilySpec {
                embedding: match embedding {
                    EmbeddingArg::Plane => Embedding::Plane,
                    EmbeddingArg::Free => Embedding::Free,
                },
                rooting: if args.rooted {
                    Rooting::Rooted
                } else {
                    Rooting::Unrooted
                },
                labeling: mode,
                omega,
                form: match args.form {
                    FormArg::Template => Form::Template,
                    FormArg::Simplified => Form::Simplified,
                },
            };
            let description = spec.to_string();
            let omega_text = spec.omega.to_string();
            (
                build(&spec).map_err(|e| fail(3, anyhow!("family grammar: {e}")))?,
                description,
                omega_text,
            )
        }
        _ => {
            return Err(fail(
                2,
                anyhow!("use either --grammar FILE or --embedding with --omega"),
            ))
        }
    };
    let diagnostics = system.validate();
    if !diagnostics.is_empty() {
        let text: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
        return Err(fail(3, anyhow!("grammar validation: {}", text.join("; "))));
    }
    let env = evaluate(&system, args.terms).map_err(engine_error)?;
    let counts = env.counts().map_err(engine_error)?;
    let min_size = counts.iter().position(|c| !c.is_zero());
    let content = match args.format {
        SeqFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# family: {description}");
            let _ = writeln!(out, "# omega: {omega_text}");
            let _ = writeln!(out, "# mode: {}", system.mode);
            let _ = writeln!(
                out,
                "# min-realizable-size: {}",
                min_size.map_or("none".to_string(), |m| m.to_string())
            );
            let _ = writeln!(
                out,
                "# indexing: counts[n] = number of objects with n vertices; sizes below the minimum are structural zeros"
            );
            let _ = writeln!(out, "n,count");
            for (n, c) in counts.iter().enumerate() {
                let _ = writeln!(out, "{n},{c}");
            }
            out
        }
        SeqFormat::Json => {
            let payload = serde_json::json!({
                "family": description,
                "omega": omega_text,
                "mode": system.mode.to_string(),
                "min_realizable_size": min_size,
                "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&payload).expect("json"))
        }
    };
    write_out(&args.output, &content)
}

fn sample_error(e: SampleError) -> CliError {
    match &e {
        SampleError::Unrealizable { .. } => fail(5, e.into()),
        SampleError::OrderTooSmall { .. } => fail(4, e.into()),
        _ => fail(1, e.into()),
    }
}

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    let omega = parse_omega(&args.omega)?;
    let mut rng = RandomSource::new(args.seed);
    let family = match (args.embedding, args.rooted, args.labeled) {
        (EmbeddingArg::Plane, true, YesNo::No) => "plane rooted unlabeled",
        (EmbeddingArg::Free, true, YesNo::Yes) => "free rooted labeled",
        _ => {
            return Err(fail(
                2,
                anyhow!(
                    "implemented samplers: --embedding plane --rooted (unlabeled), \
                     --embedding free --rooted --labeled yes"
                ),
            ))
        }
    };
    // tables run a little past the requested size so an unrealizable size
    // can report its nearest realizable neighbors
    let margin = match &omega {
        OmegaSpec::Finite(members) => members.iter().max().copied().unwrap_or(2) as usize,
        OmegaSpec::AtLeast(c) => *c as usize,
    };
    let order = args.size + margin;
    let structure = match args.embedding {
        EmbeddingArg::Plane => PlaneRootedSampler::build(omega.clone(), order)
            .map_err(sample_error)?
            .sample(args.size, &mut rng)
            .map_err(sample_error)?,
        EmbeddingArg::Free => LabeledFreeRootedSampler::build(omega.clone(), order)
            .map_err(sample_error)?
            .sample(args.size, &mut rng)
            .map_err(sample_error)?,
    };
    let graph = structure_to_graph(&structure).map_err(sample_error)?;
    let metadata = vec![
        format!("family: {family}"),
        format!("omega: {omega}"),
        format!("size: {}", args.size),
        format!("seed: {}", args.seed),
        format!("rng: {RNG_ALGORITHM}"),
    ];
    let root = graph.vertices().min();
    let content = match args.format {
        GraphFormat::Dot => dot::graph_to_dot(&graph, &metadata),
        GraphFormat::Edgelist => {
            let mut out = String::new();
            for m in &metadata {
                let _ = writeln!(out, "# {m}");
            }
            out.push_str(&graph.to_edge_list());
            out
        }
        GraphFormat::Svg => {
            let mut out = String::new();
            for m in &metadata {
                let _ = writeln!(out, "<!-- {m} -->");
            }
            out.push_str(
                &svg::cactus_to_svg(&graph, root)
                    .map_err(|e| fail(1, anyhow!("svg rendering: {e}")))?,
            );
            out
        }
    };
    write_out(&args.output, &content)
}

fn tree_error(e: TreeError) -> CliError {
    match &e {
        TreeError::NotCactus { .. } | TreeError::NonPlanarRotation { .. } => fail(6, e.into()),
        TreeError::SimplifiedFormUnavailable { .. } => fail(6, e.into()),
        TreeError::SplitSizeGuard(_) => fail(4, e.into()),
        _ => fail(7, e.into()),
    }
}

fn cmd_splittree(cmd: SplitTreeCmd) -> Result<(), CliError> {
    match cmd {
        SplitTreeCmd::Decompose {
            input,
            form,
            format,
            output,
        } => {
            let text = read_file(&input)?;
            let graph = SimpleGraph::from_edge_list(&text)
                .map_err(|e| fail(6, anyhow!("{}: {e}", input.display())))?;
            let tree_form = match form {
                TreeFormArg::Reduced => TreeForm::Reduced,
                TreeFormArg::Simplified => TreeForm::Simplified,
            };
            let tree = cactus_to_split_tree(&graph, tree_form).map_err(tree_error)?;
            let content = match format {
                TreeOutFormat::Dot => dot::glt_to_dot(&tree),
                TreeOutFormat::Glt => glt_to_text(&tree),
            };
            write_out(&output, &content)
        }
        SplitTreeCmd::Compose {
            input,
            format,
            output,
        } => {
            let tree = glt_from_text(&read_file(&input)?).map_err(tree_error)?;
            let graph = split_tree_to_cactus(&tree).map_err(tree_error)?;
            let content = match format {
                ComposeFormat::Edgelist => graph.to_edge_list(),
                ComposeFormat::Dot => dot::graph_to_dot(&graph, &[]),
            };
            write_out(&output, &content)
        }
        SplitTreeCmd::Validate { input, form } => {
            let tree = glt_from_text(&read_file(&input)?).map_err(tree_error)?;
            let report = match form {
                TreeFormArg::Reduced => validate_reduced_cactus_tree(&tree),
                TreeFormArg::Simplified => validate_simplified_cactus_tree(&tree),
            };
            println!("{report}");
            if report.valid {
                Ok(())
            } else {
                Err(fail(7, anyhow!("tree failed {form:?} validation")))
            }
        }
        SplitTreeCmd::Accessibility {
            input,
            format,
            output,
        } => {
            let tree = glt_from_text(&read_file(&input)?).map_err(tree_error)?;
            let graph = tree.accessibility().map_err(tree_error)?;
            let content = match format {
                ComposeFormat::Edgelist => graph.to_edge_list(),
                ComposeFormat::Dot => dot::graph_to_dot(&graph, &[]),
            };
            write_out(&output, &content)
        }
    }
}

fn oracle_error(e: OracleError) -> CliError {
    match &e {
        OracleError::CensusGuard { .. }
        | OracleError::StructureGuard { .. }
        | OracleError::StructureExplosion(_)
        | OracleError::BurnsideGuard { .. } => fail(4, e.into()),
        _ => fail(3, e.into()),
    }
}

fn cmd_oracle(cmd: OracleCmd) -> Result<(), CliError> {
    match cmd {
        OracleCmd::Census {
            omega,
            max_n,
            rooted,
            output,
        } => {
            let omega = parse_omega(&omega)?;
            let result = oracle::census(&omega, max_n, rooted).map_err(oracle_error)?;
            let mut content = format!(
                "# census: omega {}, rooted {}, elapsed {:?}\n",
                result.omega, result.rooted, result.elapsed
            );
            content.push_str(&result.to_csv());
            write_out(&output, &content)
        }
        OracleCmd::Structures {
            grammar,
            size,
            list,
        } => {
            let system = parse_grammar(&read_file(&grammar)?)
                .map_err(|e| fail(3, anyhow!("grammar: {e}")))?;
            let diags = system.validate();
            if !diags.is_empty() {
                let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
                return Err(fail(3, anyhow!("grammar validation: {}", text.join("; "))));
            }
            let structures =
                oracle::enumerate_structures(&system, size).map_err(oracle_error)?;
            println!("n,count");
            println!("{size},{}", structures.len());
            if list {
                for s in &structures {
                    println!("{s}");
                }
            }
            Ok(())
        }
        OracleCmd::Burnside { m, q, group } => {
            let group = SymmetryGroup::parse(&group).ok_or_else(|| {
                fail(
                    2,
                    anyhow!("--group must be trivial, cyclic, reversal, dihedral or symmetric"),
                )
            })?;
            let orbits = oracle::burnside_orbits(m, q, group).map_err(oracle_error)?;
            println!("{orbits}");
            Ok(())
        }
    }
}

