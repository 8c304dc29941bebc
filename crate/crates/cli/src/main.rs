//! `liftkit`: batch front end for composition, verification, lifting,
//! brute-force measures and the entropy-structure checks.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "liftkit", version, about = "Gadget composition and lifting experiments")]
pub struct Cli {
    /// Worker threads for commands that split independent work.
    #[arg(long, global = true, env = "LIFTKIT_JOBS", default_value_t = 1)]
    pub jobs: usize,
    /// Directory for written artifacts; defaults to the input's directory.
    #[arg(long, global = true, env = "LIFTKIT_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the composed formula and its manifest.
    Compose(ComposeArgs),
    /// Verify a Resolution refutation.
    VerifyRes(VerifyResArgs),
    /// Verify a Cutting Planes refutation.
    VerifyCp(VerifyCpArgs),
    /// Verify a conjunction decision-dag against a search problem.
    VerifyDag(VerifyDagArgs),
    /// Every brute-force measure of a formula.
    Measure(MeasureArgs),
    /// One brute-force measure of a formula.
    Oracle(OracleArgs),
    /// Lift a Resolution refutation to a dag for the composed problem.
    LiftDag(LiftDagArgs),
    /// Lift a decision tree to one for the composed problem.
    LiftTree(LiftTreeArgs),
    /// Min-entropy of a distribution, or structure of a product box.
    Entropy(EntropyArgs),
    /// Blockwise min-entropy restoring partition of a selector set.
    Partition(PartitionArgs),
    /// One round of the query-fixing step on a product box.
    Round(RoundArgs),
    /// Empty-or-heavy cleanup of an ordered simplex.
    Cleanup(CleanupArgs),
    /// Simulate a real protocol by a decision tree on the source formula.
    Simulate(SimulateArgs),
    /// Character expectations and the uniform-selector search.
    Fourier(FourierArgs),
}

#[derive(Args, Debug)]
pub struct ComposeArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    /// Gadget size; rounded up to a multiple of the block size.
    #[arg(long)]
    pub m: usize,
    /// JSON block sidecar; singleton blocks when absent.
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    #[arg(long, default_value_t = liftkit::compose::DEFAULT_CLAUSE_BUDGET)]
    pub clause_budget: u64,
}

#[derive(Args, Debug)]
pub struct VerifyResArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long)]
    pub proof: PathBuf,
    /// Block sidecar for reporting block-width.
    #[arg(long)]
    pub blocks: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Syntactic,
    Semantic,
}

#[derive(Args, Debug)]
pub struct VerifyCpArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long)]
    pub proof: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Syntactic)]
    pub mode: Mode,
    /// Largest variable support checked exhaustively.
    #[arg(long, default_value_t = liftkit::proof::dag::DEFAULT_SUPPORT_CAP)]
    pub support_cap: usize,
}

#[derive(Args, Debug)]
pub struct VerifyDagArgs {
    /// Source formula.
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long)]
    pub dag: PathBuf,
    /// Composition manifest; the dag then solves the composed problem.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value_t = liftkit::proof::dag::DEFAULT_SUPPORT_CAP)]
    pub support_cap: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Depth,
    TreeSize,
    Width,
    BlockWidth,
    RelationDepth,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long)]
    pub blocks: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long, value_enum)]
    pub measure: Measure,
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    /// Write the witness tree (depth, tree-size, relation-depth) in preorder form.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Args, Debug)]
pub struct LiftDagArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long)]
    pub proof: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    /// Check the lifted dag against the composed problem exhaustively.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = liftkit::lift::DEFAULT_VERTEX_BUDGET)]
    pub vertex_budget: usize,
}

#[derive(Args, Debug)]
pub struct LiftTreeArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    /// Source tree in preorder form; a minimum-depth tree when absent.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    /// Check the lifted tree against the composed formula exhaustively.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    /// Distribution file (`coord` and `p` lines).
    #[arg(long, conflicts_with = "box_file")]
    pub dist: Option<PathBuf>,
    /// Product box file.
    #[arg(long = "box", id = "box_file")]
    pub box_file: Option<PathBuf>,
    /// Block partial assignment, comma separated: `*` or the block's bits.
    #[arg(long, requires = "box_file")]
    pub rho: Option<String>,
    /// Free-block entropy fraction of log m.
    #[arg(long, default_value = "9/10")]
    pub entropy_frac: String,
    /// Row deficiency bound; `sqrt-m` or a rational.
    #[arg(long, default_value = "sqrt-m")]
    pub defect_bound: String,
    /// Also search for a good selector.
    #[arg(long, requires = "box_file")]
    pub good_x: bool,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    /// Selector set as a distribution file; its support is the set.
    #[arg(long)]
    pub dist: PathBuf,
    /// Threshold in bits; `19/20 · log m` when absent.
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Args, Debug)]
pub struct RoundArgs {
    /// Product box with one row per block.
    #[arg(long = "box")]
    pub box_file: PathBuf,
    /// No entropy precondition and `θ = log m / 2`.
    #[arg(long)]
    pub micro: bool,
    /// Optional bound on the deficiency of Y.
    #[arg(long)]
    pub y_deficiency_bound: Option<String>,
}

#[derive(Args, Debug)]
pub struct CleanupArgs {
    #[arg(long)]
    pub simplex: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Heaviness exponent; `sqrt-m` or a rational.
    #[arg(long, default_value = "sqrt-m")]
    pub beta: String,
    /// Bound on the log density of each error set; `log2(#slices) − β` when absent.
    #[arg(long)]
    pub error_bound: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Micro,
    Standard,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Source formula.
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long)]
    pub m: usize,
    /// Real protocol JSON; built from a minimum-depth tree when absent.
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    /// Query budget; the number of variables when absent.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum, default_value_t = Regime::Micro)]
    pub regime: Regime,
    /// Simulate one source assignment (`0`/`1` per variable) with a transcript.
    #[arg(long)]
    pub z: Option<String>,
}

#[derive(Args, Debug)]
pub struct FourierArgs {
    /// Selector distribution over `[ℓ]^k`.
    #[arg(long)]
    pub lambda: PathBuf,
    /// Row distribution over `({0,1}^ℓ)^k` as masks.
    #[arg(long)]
    pub gamma: PathBuf,
    /// 0-based coordinates of the character.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub subset: Vec<usize>,
    /// Search the selector support for a pointed-uniform selector instead.
    #[arg(long)]
    pub uniform_selector: bool,
    #[arg(long, default_value = "1/2")]
    pub epsilon: String,
    #[arg(long, default_value_t = 1)]
    pub goodness: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(2)
        }
    }
}
