//! Command-line frontend: generate hard block-structured instances, reorder
//! banded matrices, verify instances against the brute-force oracle, and
//! report Graver bases and treedepth.
//!
//! Exit status is 0 on success, 1 when a check or construction fails and 2
//! for usage errors.

mod generate;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use blockstruct::blockmat::{Band, BlockKind, IPInstance, IntMatrix, PermutationPair};
use blockstruct::encoding::encoding_matrix;
use blockstruct::format::{emit_document, emit_mps_named, parse_document, InstanceDocument, Provenance};
use blockstruct::graver::{graver_basis_with, graver_norms, GraverOptions};
use blockstruct::oracle::{feasible_enum_with, subsetsum_dp, EnumOptions, DEFAULT_BUDGET};
use blockstruct::reduce::{project_solution, two_stage_instance, SourceWitness};
use blockstruct::restructure::{required_dims, to_multistage, to_treefold};
use blockstruct::treedepth::{dual_graph, exact_treedepth, primal_graph, td_decomposition_from_profile, validate_td, EXACT_TREEDEPTH_LIMIT};
use blockstruct::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

pub use generate::{parse_block, random_blocks, Recipe};

#[derive(Parser, Debug)]
#[command(name = "blockstruct", version, about = "Block-structured integer programs: generators, reordering and exact checks")]
pub struct Cli {
    /// Worker threads for the enumeration oracle and Graver computations.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an instance from a reduction or a Graver witness.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Reorder a bi- or tri-diagonal instance into block structure.
    Restructure(RestructureArgs),
    /// Check the profile, decide feasibility and cross-check the source.
    Verify(VerifyArgs),
    /// Graver basis of an instance matrix or of an encoding matrix.
    Graver(GraverArgs),
    /// Treedepth decomposition from the instance profile.
    Treedepth(TreedepthArgs),
    /// Write an instance in another format.
    Export(ExportArgs),
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// n-fold instance from subset sum.
    Nfold {
        #[command(flatten)]
        source: SubsetSumArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Tree-fold instance from subset sum with `tau` levels.
    Treefold {
        #[command(flatten)]
        source: SubsetSumArgs,
        #[arg(long)]
        tau: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Multi-stage instance from two-stage blocks.
    Multistage(MultistageArgs),
    /// Matrix with a large Graver basis element.
    Witness {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Stage (level) sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sigma: Vec<usize>,
        #[arg(long)]
        delta: BigInt,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct SubsetSumArgs {
    /// Item sizes, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Vec<BigInt>,
    /// Target sum.
    #[arg(long)]
    b: BigInt,
    /// Number of rows in the top stripe.
    #[arg(long)]
    sigma1: usize,
}

#[derive(Args, Debug)]
struct MultistageArgs {
    /// Block `q:x:y`; repeat for several blocks.
    #[arg(long = "block")]
    blocks: Vec<String>,
    /// Generate this many random blocks instead (needs --seed and --t).
    #[arg(long, conflicts_with = "blocks", requires_all = ["seed", "t"])]
    random: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rows per block; defaults to the smallest value fitting the blocks.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    tau: usize,
    /// Bound on the block variables `z`.
    #[arg(long, default_value = "1")]
    z_bound: BigInt,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file; the document goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RestructureArgs {
    input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    sigma: Vec<usize>,
    #[arg(long, value_enum)]
    band: BandArg,
    #[arg(long, value_enum, default_value_t = KindArg::Multistage)]
    kind: KindArg,
    /// Append zero rows/columns (fixed to zero) up to the required size.
    #[arg(long)]
    pad: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    input: PathBuf,
    /// Search nodes the enumeration oracle may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct GraverArgs {
    /// Instance file whose matrix is used.
    #[arg(required_unless_present = "et", conflicts_with = "et")]
    input: Option<PathBuf>,
    /// Use the encoding matrix E_t(delta) with this t.
    #[arg(long, requires = "delta")]
    et: Option<usize>,
    #[arg(long)]
    delta: Option<BigInt>,
    /// Max-norm cap; defaults to delta^(t-1) for E_t and 16 otherwise.
    #[arg(long)]
    cap: Option<BigInt>,
}

#[derive(Args, Debug)]
struct TreedepthArgs {
    input: PathBuf,
}

#[derive(Args, Debug)]
struct ExportArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Mps)]
    format: FormatArg,
    /// Problem name in the NAME record.
    #[arg(long, default_value = "BLOCKSTRUCT")]
    name: String,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Multistage,
    Treefold,
}

impl From<KindArg> for BlockKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Multistage => BlockKind::MultiStage,
            KindArg::Treefold => BlockKind::TreeFold,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BandArg {
    Bi,
    Tri,
}

impl From<BandArg> for Band {
    fn from(b: BandArg) -> Self {
        match b {
            BandArg::Bi => Band::Bi,
            BandArg::Tri => Band::Tri,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Mps,
    Json,
}

/// Why a command stopped: a check failed (exit 1) or the arguments were
/// unusable (exit 2).
#[derive(Debug)]
enum Failure {
    Check(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Check(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            2
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Generate(g) => cmd_generate(g, out),
        Command::Restructure(a) => cmd_restructure(a, out),
        Command::Verify(a) => cmd_verify(a, cli.workers, out),
        Command::Graver(a) => cmd_graver(a, cli.workers, out),
        Command::Treedepth(a) => cmd_treedepth(a, out),
        Command::Export(a) => cmd_export(a, out),
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> CmdResult {
    writeln!(out, "{text}").map_err(|e| Failure::Check(format!("cannot write output: {e}")))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => { say($out, format_args!($($arg)*)) };
}

fn read_document(path: &Path) -> std::result::Result<InstanceDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| Failure::Check(format!("{}: {e}", path.display())))
}

/// Writes `text` to `--out` (and a one-line note to stdout) or to stdout.
fn deliver(text: &str, target: &OutArg, out: &mut dyn Write) -> CmdResult {
    match &target.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display())))?;
            say!(out, "wrote {}", path.display())
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Check(format!("cannot write output: {e}"))),
    }
}

fn cmd_generate(g: &GenerateCommand, out: &mut dyn Write) -> CmdResult {
    let (recipe, target) = match g {
        GenerateCommand::Nfold { source, out } => (
            Recipe::Nfold { a: source.a.clone(), b: source.b.clone(), sigma1: source.sigma1 },
            out,
        ),
        GenerateCommand::Treefold { source, tau, out } => (
            Recipe::Treefold { a: source.a.clone(), b: source.b.clone(), sigma1: source.sigma1, tau: *tau },
            out,
        ),
        GenerateCommand::Multistage(m) => {
            let blocks = match m.random {
                Some(count) => random_blocks(count, m.t.expect("required by clap"), m.seed.expect("required by clap"))?,
                None if m.blocks.is_empty() => return Err(Failure::Usage("give --block or --random".into())),
                None => {
                    let first = parse_block(&m.blocks[0], m.t)?;
                    let t = Some(first.t());
                    m.blocks.iter().map(|b| parse_block(b, t)).collect::<Result<_>>()?
                }
            };
            (Recipe::Multistage { blocks, tau: m.tau, z_bound: m.z_bound.clone() }, &m.out)
        }
        GenerateCommand::Witness { kind, sigma, delta, out } => (
            Recipe::Witness { kind: (*kind).into(), sigma: sigma.clone(), delta: delta.clone() },
            out,
        ),
    };
    let (instance, cert) = recipe.build()?;
    let certificate = cert.as_ref().map(|c| c.summary()).unwrap_or_default();
    let doc = InstanceDocument::new(instance).with_provenance(Provenance {
        source: recipe.source().to_string(),
        parameters: recipe.parameters(),
        certificate: certificate.clone(),
    });
    deliver(&emit_document(&doc), target, out)?;
    if target.out.is_some() {
        let inst = &doc.instance;
        say!(out, "instance: {} rows, {} columns, {} nonzeros", inst.rows(), inst.cols(), inst.matrix().nnz())?;
        if let Some(p) = inst.profile() {
            say!(out, "profile: {p}")?;
        }
        for (k, v) in &certificate {
            say!(out, "certificate {k}: {v}")?;
        }
    }
    Ok(())
}

fn cmd_restructure(args: &RestructureArgs, out: &mut dyn Write) -> CmdResult {
    let doc = read_document(&args.input)?;
    let band: Band = args.band.into();
    let kind: BlockKind = args.kind.into();
    let mut inst = doc.instance;
    if args.pad {
        inst = pad_instance(&inst, &args.sigma, band, kind)?;
    }
    let r = match kind {
        BlockKind::MultiStage => to_multistage(inst.matrix(), &args.sigma, band)?,
        BlockKind::TreeFold => to_treefold(inst.matrix(), &args.sigma, band)?,
    };
    let permuted = inst.permuted(&r.permutation, Some(r.profile.clone()))?;
    let mut parameters = BTreeMap::new();
    parameters.insert("input".to_string(), args.input.display().to_string());
    parameters.insert("sigma".to_string(), join(&args.sigma));
    parameters.insert("band".to_string(), band.name().to_string());
    parameters.insert("kind".to_string(), kind.to_string());
    let perm = permutation_summary(&r.permutation);
    let doc = InstanceDocument::new(permuted).with_provenance(Provenance {
        source: "restructure".into(),
        parameters,
        certificate: perm.clone(),
    });
    deliver(&emit_document(&doc), &args.out, out)?;
    if args.out.out.is_some() {
        say!(out, "profile: {}", r.profile)?;
        for (k, v) in &perm {
            say!(out, "{k}: {v}")?;
        }
    }
    Ok(())
}

/// 1-based images of both permutations.
fn permutation_summary(p: &PermutationPair) -> BTreeMap<String, String> {
    let images = |v: &[usize]| join(&v.iter().map(|i| i + 1).collect::<Vec<_>>());
    BTreeMap::from([
        ("row_perm".to_string(), images(p.row_perm.images())),
        ("col_perm".to_string(), images(p.col_perm.images())),
    ])
}

/// Zero rows (right-hand side 0) at the bottom and zero columns fixed to 0
/// at the right.
fn pad_instance(inst: &IPInstance, sigma: &[usize], band: Band, kind: BlockKind) -> Result<IPInstance> {
    let (r, c) = required_dims(sigma, band);
    let (rows, cols) = match kind {
        BlockKind::MultiStage => (r, c),
        BlockKind::TreeFold => (c, r),
    };
    if inst.rows() > rows || inst.cols() > cols {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} instance exceeds the required {rows}x{cols}",
            inst.rows(),
            inst.cols()
        )));
    }
    let a = blockstruct::blockmat::pad_zero(inst.matrix(), 0, rows - inst.rows(), 0, cols - inst.cols());
    let zero = BigInt::from(0);
    let extend = |v: &[BigInt], len: usize| {
        let mut v = v.to_vec();
        v.resize(len, zero.clone());
        v
    };
    let extend_bound = |v: &[Option<BigInt>]| {
        let mut v = v.to_vec();
        v.resize(cols, Some(zero.clone()));
        v
    };
    IPInstance::new(
        a,
        extend(inst.rhs(), rows),
        extend_bound(inst.lower()),
        extend_bound(inst.upper()),
        extend(inst.objective(), cols),
        None,
    )
}

fn cmd_verify(args: &VerifyArgs, workers: usize, out: &mut dyn Write) -> CmdResult {
    let doc = read_document(&args.input)?;
    let inst = &doc.instance;
    say!(out, "instance: {} rows, {} columns, {} nonzeros", inst.rows(), inst.cols(), inst.matrix().nnz())?;
    let mut failures = Vec::new();

    match inst.profile() {
        // parsing already re-validated the profile
        Some(p) => say!(out, "profile: {p}: valid")?,
        None => say!(out, "profile: none")?,
    }

    let mut recipe = None;
    if let Some(prov) = &doc.provenance {
        match Recipe::from_parameters(&prov.source, &prov.parameters) {
            Ok(s) => {
                let (rebuilt, _) = s.build()?;
                if &rebuilt == inst {
                    say!(out, "provenance: {} instance matches a fresh build", prov.source)?;
                } else {
                    say!(out, "provenance: {} instance DIFFERS from a fresh build", prov.source)?;
                    failures.push("instance does not match its provenance".to_string());
                }
                recipe = Some(s);
            }
            Err(_) => say!(out, "provenance: {} (not rebuildable)", prov.source)?,
        }
    }

    if !inst.has_finite_bounds() {
        say!(out, "feasibility: not checked (unbounded variables)")?;
    } else {
        let opts = EnumOptions { budget: args.budget, workers };
        match feasible_enum_with(inst, &opts) {
            Ok(res) => {
                say!(out, "feasibility: {}", if res.feasible { "feasible" } else { "infeasible" })?;
                if let Some(s) = &recipe {
                    cross_check(s, &opts, res.feasible, res.witness.as_deref(), &mut failures, out)?;
                }
            }
            Err(Error::BudgetExceeded(n)) => {
                say!(out, "feasibility: undecided (search budget of {n} nodes exhausted)")?
            }
            Err(e) => return Err(e.into()),
        }
    }

    if failures.is_empty() {
        say!(out, "verify: ok")
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}

/// Compares oracle feasibility with the source problem and maps the witness
/// back through the certificate.
fn cross_check(
    recipe: &Recipe,
    opts: &EnumOptions,
    feasible: bool,
    witness: Option<&[BigInt]>,
    failures: &mut Vec<String>,
    out: &mut dyn Write,
) -> CmdResult {
    let (inst, cert) = recipe.build()?;
    if let Some(ss) = recipe.subset_sum() {
        let ss = ss?;
        let dp = subsetsum_dp(ss.a(), ss.b())?;
        let agree = dp.feasible == feasible;
        say!(
            out,
            "source: subset sum is {}; {}",
            if dp.feasible { "feasible" } else { "infeasible" },
            if agree { "agrees" } else { "DISAGREES" }
        )?;
        if !agree {
            failures.push("oracle and subset-sum DP disagree".into());
        }
    }
    if let Recipe::Multistage { blocks, z_bound, .. } = recipe {
        let source = two_stage_instance(blocks, z_bound)?;
        match feasible_enum_with(&source, opts) {
            Ok(res) => {
                let agree = res.feasible == feasible;
                say!(
                    out,
                    "source: two-stage system is {}; {}",
                    if res.feasible { "feasible" } else { "infeasible" },
                    if agree { "agrees" } else { "DISAGREES" }
                )?;
                if !agree {
                    failures.push("target and two-stage source disagree".into());
                }
            }
            Err(Error::BudgetExceeded(n)) => {
                say!(out, "source: two-stage system undecided (search budget of {n} nodes exhausted)")?
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let (Some(cert), Some(w)) = (cert, witness) {
        match project_solution(&inst, &cert, w) {
            Ok(SourceWitness::Selection(x)) => {
                let chosen: Vec<String> = x.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| (i + 1).to_string()).collect();
                say!(out, "source witness: items {{{}}}", chosen.join(", "))?;
            }
            Ok(SourceWitness::TwoStage { r, .. }) => say!(out, "source witness: r = {r}")?,
            Err(e) => {
                say!(out, "source witness: projection failed: {e}")?;
                failures.push("witness does not project to a source solution".into());
            }
        }
    }
    Ok(())
}

fn cmd_graver(args: &GraverArgs, workers: usize, out: &mut dyn Write) -> CmdResult {
    let (a, default_cap) = match (&args.input, args.et) {
        (Some(path), _) => (read_document(path)?.instance.matrix().clone(), BigInt::from(16)),
        (None, Some(t)) => {
            let delta = args.delta.clone().expect("required by clap");
            let m = encoding_matrix(t, &delta).map_err(|e| Failure::Usage(e.to_string()))?;
            let cap = delta.pow(t.saturating_sub(1) as u32);
            (m, cap)
        }
        (None, None) => return Err(Failure::Usage("give an instance file or --et".into())),
    };
    let mut opts = GraverOptions::with_cap(args.cap.clone().unwrap_or(default_cap));
    opts.workers = workers;
    let gs = graver_basis_with(&a, &opts)?;
    say!(out, "graver basis: {} elements ({} up to sign)", gs.len(), gs.elements().len())?;
    for v in gs.elements() {
        let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
        say!(out, "  ±({})", parts.join(", "))?;
    }
    if gs.is_truncated() {
        return Err(Failure::Check(format!(
            "elements above max-norm {} were dropped; raise --cap for exact norms",
            gs.norm_cap()
        )));
    }
    let (g_inf, g_1) = graver_norms(&gs)?;
    say!(out, "g_inf = {g_inf}")?;
    say!(out, "g_1 = {g_1}")
}

fn cmd_treedepth(args: &TreedepthArgs, out: &mut dyn Write) -> CmdResult {
    let doc = read_document(&args.input)?;
    let a: &IntMatrix = doc.instance.matrix();
    let Some(profile) = doc.instance.profile() else {
        return Err(Failure::Check("instance has no block profile".into()));
    };
    let (graph, which) = match profile.kind() {
        BlockKind::MultiStage => (primal_graph(a), "primal"),
        BlockKind::TreeFold => (dual_graph(a), "dual"),
    };
    say!(out, "{which} graph: {} vertices, {} edges", graph.vertex_count(), graph.edge_count())?;
    let td = td_decomposition_from_profile(a, profile)?;
    let bound: usize = profile.sigma().iter().sum();
    let valid = validate_td(&graph, &td)?;
    say!(out, "decomposition height: {} (bound {bound})", td.height())?;
    say!(out, "decomposition valid: {valid}")?;
    if graph.vertex_count() <= EXACT_TREEDEPTH_LIMIT {
        say!(out, "exact treedepth: {}", exact_treedepth(&graph)?)?;
    }
    if !valid || td.height() > bound {
        return Err(Failure::Check("decomposition check failed".into()));
    }
    Ok(())
}

fn cmd_export(args: &ExportArgs, out: &mut dyn Write) -> CmdResult {
    let doc = read_document(&args.input)?;
    let text = match args.format {
        FormatArg::Mps => emit_mps_named(&doc.instance, &args.name)?,
        FormatArg::Json => emit_document(&doc),
    };
    deliver(&text, &args.out, out)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
