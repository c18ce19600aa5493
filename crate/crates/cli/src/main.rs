use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tpl_core::asymptotic::{
    disjoint_rank_bounds, lattice_construction, lattice_obstruction, omega_report, render_report, strassen_rank_bounds,
    BoundOptions, BoundReport,
};
use tpl_core::catalog::{make_named, Catalog, NamedTensor};
use tpl_core::hypergraph::{build_structure, fold_to_fan, make_family, EdgeAssignment, Family};
use tpl_core::io::{read_json, tensor_to_json, write_json, AnyTensor};
use tpl_core::obstructions::{obstruction_report, KoszulSpec, ThetaWeights};
use tpl_core::preorder::{
    classify_222, interpolate, verify_degeneration, verify_restriction, DegenerationCertificate,
    RestrictionCertificate,
};
use tpl_core::{GroupingSpec, QComplex, Tensor};

/// Tensor preorders, certificates and asymptotic bounds.
#[derive(Parser)]
#[command(name = "tpl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named tensor (GHZ, W, EPR, MaMu, CW, Unit).
    Build(BuildArgs),
    /// Tensor operations.
    #[command(subcommand)]
    Op(OpCommand),
    /// Classify a 2×2×2 tensor into its orbit (reads stdin without --tensor).
    Classify {
        #[arg(long)]
        tensor: Option<PathBuf>,
    },
    /// Check a restriction or degeneration certificate exactly.
    CertVerify(CertArgs),
    /// Turn a degeneration certificate into a restriction from a direct sum.
    CertInterpolate {
        #[command(flatten)]
        cert: CertArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gauge points, hyperdeterminant, Koszul ratio and quantum functional.
    Obstruct {
        #[arg(long)]
        tensor: Option<PathBuf>,
        /// Koszul wedge degree; omitted means no Koszul flattening.
        #[arg(long)]
        p: Option<usize>,
        /// Comma-separated probability vector, uniform by default.
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<f64>>,
        #[arg(long, default_value_t = 64)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Asymptotic rank bounds and lattice constructions.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Hypergraph families and structure tensors.
    #[command(subcommand)]
    Hypergraph(HypergraphCommand),
    /// Manage a certificate catalog directory.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Args)]
struct BuildArgs {
    /// GHZ, W, EPR, MaMu, CW, Unit, or a full spec such as `GHZ:3:3`.
    #[arg(long)]
    name: String,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Clone)]
struct CertArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    dst: PathBuf,
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CatalogArgs {
    #[arg(long, env = "TPL_CATALOG")]
    catalog: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ReportArgs {
    /// Print the fixed-width table instead of JSON.
    #[arg(long)]
    table: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Subcommand)]
enum OpCommand {
    /// Direct sum `t ⊕ u`.
    Sum { #[arg(long)] tensor: PathBuf, #[arg(long)] other: PathBuf, #[command(flatten)] out: OutArgs },
    /// Kronecker product `t ⊠ u`.
    Kron { #[arg(long)] tensor: PathBuf, #[arg(long)] other: PathBuf, #[command(flatten)] out: OutArgs },
    /// Kronecker power `t^{⊠n}`.
    KronPower { #[arg(long)] tensor: PathBuf, #[arg(long)] n: usize, #[command(flatten)] out: OutArgs },
    /// Direct power `⊕ⁿ t`.
    DirectPower { #[arg(long)] tensor: PathBuf, #[arg(long)] n: usize, #[command(flatten)] out: OutArgs },
    /// Reorder factors: position `i` of the result is factor `perm[i]`.
    Permute {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_delimiter = ',')]
        perm: Vec<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Group factors, blocks separated by `/`, e.g. `0,1/2`.
    Group {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        blocks: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Bounds on the disjoint asymptotic rank.
    Disjoint {
        #[arg(long)]
        tensor: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Bounds on the Strassen asymptotic rank from Kronecker powers up to `n`.
    Strassen {
        #[arg(long)]
        tensor: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Product Koszul obstruction to a lattice restriction with covering `n`.
    Lattice {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        dst: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Lattice construction from a degeneration on an `n`-edge patch.
    Construct {
        #[command(flatten)]
        cert: CertArgs,
        #[arg(long, default_value = "triangular")]
        family: Family,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// `ω ≤ log₂(α/β)` under caller-asserted premises.
    Omega {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        premise: Vec<String>,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Subcommand)]
enum HypergraphCommand {
    /// The `n`-edge member of a family.
    Make {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Structure tensor with the same tensor on every edge.
    Build {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tensor: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fold a lattice patch onto a fan.
    Fan {
        #[arg(long, default_value = "triangular")]
        family: Family,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Write the builtin entries to the catalog directory.
    Init { #[command(flatten)] catalog: CatalogArgs },
    /// List entry ids.
    List { #[command(flatten)] catalog: CatalogArgs },
    /// Print one entry.
    Show {
        #[arg(long)]
        id: String,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Re-verify every entry.
    Verify { #[command(flatten)] catalog: CatalogArgs },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_value(path: Option<&Path>) -> Result<Value> {
    match path {
        Some(p) if p != Path::new("-") => Ok(read_json(p).with_context(|| format!("reading {}", p.display()))?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
            serde_json::from_str(&s).context("parsing JSON from stdin")
        }
    }
}

fn read_tensor(path: Option<&Path>) -> Result<Tensor<QComplex>> {
    let what = path.map_or("stdin".to_string(), |p| p.display().to_string());
    let v = read_value(path)?;
    AnyTensor::from_json(&v).and_then(AnyTensor::into_rational).with_context(|| format!("tensor in {what}"))
}

fn emit(out: &OutArgs, v: &Value) -> Result<()> {
    match &out.out {
        Some(p) => Ok(write_json(p, v)?),
        None => {
            println!("{}", serde_json::to_string(v)?);
            Ok(())
        }
    }
}

fn emit_report(args: &ReportArgs, r: &BoundReport) -> Result<()> {
    if args.table {
        let text = render_report(r);
        match &args.out.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    } else {
        emit(&args.out, &r.to_json())
    }
}

fn load_catalog(args: &CatalogArgs) -> Result<Catalog> {
    match &args.catalog {
        Some(dir) => Catalog::load(dir).with_context(|| format!("loading catalog {}", dir.display())),
        None => Ok(Catalog::builtin()),
    }
}

fn catalog_dir(args: &CatalogArgs) -> Result<&Path> {
    match &args.catalog {
        Some(dir) => Ok(dir),
        None => bail!("no catalog directory: pass --catalog or set TPL_CATALOG"),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Build(a) => {
            let spec = if a.name.contains(':') {
                a.name.parse::<NamedTensor>()?
            } else {
                NamedTensor::parse(&a.name, a.r, a.k, a.d, a.q)?
            };
            emit(&a.out, &tensor_to_json(&make_named(spec)?))
        }
        Command::Op(op) => run_op(op),
        Command::Classify { tensor } => {
            let t = read_tensor(tensor.as_deref())?;
            println!("{}", classify_222(&t)?);
            Ok(())
        }
        Command::CertVerify(a) => {
            let (src, dst) = (read_tensor(Some(&a.src))?, read_tensor(Some(&a.dst))?);
            let cert = read_value(Some(&a.cert))?;
            match cert.get("kind").and_then(Value::as_str) {
                Some("restriction") => {
                    let ok = verify_restriction(&src, &dst, &RestrictionCertificate::from_json(&cert)?)?;
                    println!("{{\"ok\":{ok}}}");
                }
                Some("degeneration") => {
                    let c = verify_degeneration(&src, &dst, &DegenerationCertificate::from_json(&cert)?)?;
                    println!("{{\"ok\":{},\"d\":{},\"e\":{}}}", c.ok, c.d, c.e);
                }
                other => bail!("certificate kind {other:?} is neither `restriction` nor `degeneration`"),
            }
            Ok(())
        }
        Command::CertInterpolate { cert, out } => {
            let (src, dst) = (read_tensor(Some(&cert.src))?, read_tensor(Some(&cert.dst))?);
            let c = DegenerationCertificate::from_json(&read_value(Some(&cert.cert))?)?;
            emit(&out, &interpolate(&src, &dst, &c)?.to_json())
        }
        Command::Obstruct { tensor, p, theta, trials, seed, out } => {
            let t = read_tensor(tensor.as_deref())?;
            let theta = match theta {
                Some(v) => ThetaWeights::new(v)?,
                None => ThetaWeights::uniform(t.order()),
            };
            emit(&out, &obstruction_report(&t, p, &theta, trials, seed)?.to_json())
        }
        Command::Bounds(b) => run_bounds(b),
        Command::Hypergraph(h) => run_hypergraph(h),
        Command::Catalog(c) => run_catalog(c),
    }
}

fn run_op(op: OpCommand) -> Result<()> {
    let (t, out) = match op {
        OpCommand::Sum { tensor, other, out } => (read_tensor(Some(&tensor))?.direct_sum(&read_tensor(Some(&other))?)?, out),
        OpCommand::Kron { tensor, other, out } => (read_tensor(Some(&tensor))?.kron(&read_tensor(Some(&other))?)?, out),
        OpCommand::KronPower { tensor, n, out } => (read_tensor(Some(&tensor))?.kron_power(n)?, out),
        OpCommand::DirectPower { tensor, n, out } => (read_tensor(Some(&tensor))?.direct_power(n)?, out),
        OpCommand::Permute { tensor, perm, out } => (read_tensor(Some(&tensor))?.permute(&perm)?, out),
        OpCommand::Group { tensor, blocks, out } => {
            let blocks = blocks
                .split('/')
                .map(|b| b.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .context("blocks look like `0,1/2`")?;
            (read_tensor(Some(&tensor))?.group(&GroupingSpec::new(blocks))?, out)
        }
    };
    emit(&out, &tensor_to_json(&t))
}

fn run_bounds(b: BoundsCommand) -> Result<()> {
    match b {
        BoundsCommand::Disjoint { tensor, trials, seed, catalog, report } => {
            let t = read_tensor(tensor.as_deref())?;
            let r = disjoint_rank_bounds(&t, &load_catalog(&catalog)?, &BoundOptions { trials, seed })?;
            emit_report(&report, &r)
        }
        BoundsCommand::Strassen { tensor, n, catalog, report } => {
            let t = read_tensor(tensor.as_deref())?;
            emit_report(&report, &strassen_rank_bounds(&t, n, &load_catalog(&catalog)?)?)
        }
        BoundsCommand::Lattice { src, dst, n, p, out } => {
            let (s, t) = (read_tensor(Some(&src))?, read_tensor(Some(&dst))?);
            if s.order() != 3 {
                bail!("lattice obstruction needs order-3 tensors");
            }
            let o = lattice_obstruction(&s, &t, n, &KoszulSpec::new(s.dims()[2], p)?)?;
            emit(
                &out,
                &json!({
                    "covering": o.covering,
                    "p": p,
                    "rank_source": o.rank_source,
                    "rank_target": o.rank_target,
                    "obstructed": o.obstructed,
                }),
            )
        }
        BoundsCommand::Construct { cert, family, n, out } => {
            let (src, dst) = (read_tensor(Some(&cert.src))?, read_tensor(Some(&cert.dst))?);
            let c = DegenerationCertificate::from_json(&read_value(Some(&cert.cert))?)?;
            let built = lattice_construction(&src, &dst, &c, family, n)?;
            emit(
                &out,
                &json!({
                    "family": family.to_string(),
                    "n": n,
                    "hypergraph": built.hypergraph.to_json(),
                    "summands": built.summands,
                    "verified": true,
                    "certificate": built.certificate.to_json(),
                }),
            )
        }
        BoundsCommand::Omega { alpha, beta, premise, report } => emit_report(&report, &omega_report(alpha, beta, premise)?),
    }
}

fn run_hypergraph(h: HypergraphCommand) -> Result<()> {
    match h {
        HypergraphCommand::Make { family, n, k, out } => emit(&out, &make_family(family, n, k)?.to_json()),
        HypergraphCommand::Build { family, n, tensor, out } => {
            let t = read_tensor(Some(&tensor))?;
            let hg = make_family(family, n, t.order())?;
            let s = build_structure(&hg, &EdgeAssignment::broadcast(&t, hg.edge_count()))?;
            emit(&out, &tensor_to_json(&s))
        }
        HypergraphCommand::Fan { family, n, out } => {
            let f = fold_to_fan(family, n)?;
            emit(
                &out,
                &json!({
                    "source": f.source.to_json(),
                    "fan": f.fan.to_json(),
                    "map": f.map.to_json(),
                    "covering": f.covering,
                }),
            )
        }
    }
}

fn run_catalog(c: CatalogCommand) -> Result<()> {
    match c {
        CatalogCommand::Init { catalog } => {
            let dir = catalog_dir(&catalog)?;
            Catalog::builtin().save(dir)?;
            println!("{}", dir.display());
            Ok(())
        }
        CatalogCommand::List { catalog } => {
            for id in load_catalog(&catalog)?.ids() {
                println!("{id}");
            }
            Ok(())
        }
        CatalogCommand::Show { id, catalog, out } => emit(&out, &load_catalog(&catalog)?.get(&id)?.to_json()),
        CatalogCommand::Verify { catalog } => {
            let c = Catalog::load(catalog_dir(&catalog)?)?;
            println!("{{\"ok\":true,\"entries\":{}}}", c.len());
            Ok(())
        }
    }
}
