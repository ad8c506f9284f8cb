use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cogrowth::coset::CosetGraph;
use cogrowth::essential::{Certificate, ConstructionState};
use cogrowth::ideal::{
    correspondence, essentiality_report, parse_ideal_file, quotient_search, stabilize, Algebra, AlgebraMode,
    ColonSearch, EchelonBasis, Polynomial,
};
use cogrowth::intersection::{prop11_rows, product, shortest_loop, sufficient_nontrivial};
use cogrowth::source::{load_subgroup, read_file, Subgroup};
use cogrowth::verify::Suite;
use cogrowth::{CgFunction, Error, Family, GrowthTable, Word};
use serde_json::json;

#[derive(Parser)]
#[command(name = "cogrowth", version, about = "Growth and cogrowth of subgroups of free groups and of right ideals")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Vertex budget for coset graphs.
    #[arg(long, default_value_t = 1_000_000, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_vertices: u64,
    /// Row budget for echelon bases.
    #[arg(long, default_value_t = 100_000, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_rows: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Freely reduce input words instead of rejecting unreduced ones.
    #[arg(long, global = true)]
    reduce: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    FreeAssoc,
    GroupAlgebra,
}

impl From<Mode> for AlgebraMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FreeAssoc => AlgebraMode::FreeAssoc,
            Mode::GroupAlgebra => AlgebraMode::GroupAlgebra,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fold subgroup generators and print the core graph.
    Fold {
        #[arg(long)]
        gens: String,
    },
    /// Cogrowth table of a subgroup.
    Cogrowth(Depth),
    /// Growth of the subgroup's elements measured in the ambient generators.
    SubgroupGrowth(Depth),
    /// Free basis from the chords of the ShortLex spanning tree.
    Basis(Depth),
    /// Cogrowth of an intersection, with a nontriviality verdict.
    Intersect(Pair),
    /// Intersection cogrowth bounds side by side.
    Prop11(Pair),
    /// Coset sandwich rows.
    Eq5(Depth),
    /// Normal-subgroup cogrowth restriction for all splits n1 + n2 ≤ depth.
    Eq6(Depth),
    /// Build an essential subgroup with prescribed cogrowth.
    Construct(Construct),
    /// Replay certificates against a graph dump.
    Certify {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        certificates: PathBuf,
    },
    /// Growth of a right ideal at a horizon.
    IdealGrowth(IdealArgs),
    /// Cogrowth of a right ideal with an essentiality reading.
    IdealCogrowth(IdealArgs),
    /// Search for s with r·s in the ideal.
    ColonSearch {
        #[command(flatten)]
        ideal: IdealSpec,
        /// The polynomial r.
        #[arg(long)]
        r: String,
        /// Longest monomial allowed in s.
        #[arg(long)]
        length: usize,
    },
    /// Compare subgroup cogrowth with the cogrowth of its augmentation ideal.
    Correspond {
        #[arg(long)]
        gens: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 12)]
        max_horizon: usize,
    },
    /// Run the acceptance suite over a fixtures directory.
    VerifyAll {
        #[arg(long, default_value = "fixtures")]
        fixtures: PathBuf,
    },
}

#[derive(Args)]
struct Depth {
    /// Subgroup file, `.perm` file, or `quotient:z-shift` / `quotient:z2`.
    #[arg(long)]
    gens: String,
    #[arg(long)]
    depth: usize,
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    gens1: String,
    #[arg(long)]
    gens2: String,
    #[arg(long)]
    depth: usize,
}

#[derive(Args)]
struct Construct {
    /// Target family: poly:K, exp:B, inter:β or finite:R.
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value_t = 5)]
    elements: usize,
    #[arg(long, default_value_t = 12)]
    depth: usize,
    /// Lower-bound constant for the sandwich check; defaults to 2c + 2.
    #[arg(long)]
    constant: Option<u64>,
    /// Write certificates (JSON) here.
    #[arg(long)]
    certificates: Option<PathBuf>,
    /// Write the graph dump here.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Accepted for interface compatibility; the construction is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct IdealSpec {
    /// Ideal file, one polynomial per line.
    #[arg(long)]
    ideal: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::GroupAlgebra)]
    mode: Mode,
    #[arg(long, default_value_t = 2)]
    rank: u32,
    /// Longest product admitted into the basis.
    #[arg(long)]
    horizon: usize,
}

#[derive(Args)]
struct IdealArgs {
    #[command(flatten)]
    ideal: IdealSpec,
    #[arg(long)]
    depth: usize,
    /// Raise the horizon until the table stabilizes, up to this value.
    #[arg(long)]
    stabilize: Option<usize>,
}

enum Failure {
    /// A proved inequality failed: a bug signal.
    Check(String),
    Usage(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            return Failure::Resource(e.to_string());
        }
        match e {
            Error::Invariant(_) | Error::InvolutionViolation { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("resource limit: {m}");
            ExitCode::from(3)
        }
    }
}

/// Runs the command, writes its output, and turns a failed check into a
/// failure after the output is out.
fn run(cli: &Cli) -> Result<(), Failure> {
    let c = &cli.common;
    let mut violation = None;
    let text = match &cli.command {
        Command::Fold { gens } => fold_cmd(c, gens),
        Command::Cogrowth(d) => table_cmd(c, d, |g, n| g.cogrowth(n)),
        Command::SubgroupGrowth(d) => table_cmd(c, d, |g, n| g.subgroup_growth(n)),
        Command::Basis(d) => basis_cmd(c, d),
        Command::Intersect(p) => intersect_cmd(c, p),
        Command::Prop11(p) => prop11_cmd(c, p, &mut violation),
        Command::Eq5(d) => eq5_cmd(c, d, &mut violation),
        Command::Eq6(d) => eq6_cmd(c, d, &mut violation),
        Command::Construct(a) => construct_cmd(c, a, &mut violation),
        Command::Certify { dump, certificates } => certify_cmd(c, dump, certificates, &mut violation),
        Command::IdealGrowth(a) => ideal_cmd(c, a, false),
        Command::IdealCogrowth(a) => ideal_cmd(c, a, true),
        Command::ColonSearch { ideal, r, length } => colon_cmd(c, ideal, r, *length),
        Command::Correspond {
            gens,
            depth,
            max_horizon,
        } => correspond_cmd(c, gens, *depth, *max_horizon, &mut violation),
        Command::VerifyAll { fixtures } => verify_cmd(c, fixtures, &mut violation),
    }?;
    emit(c.output.as_deref(), &text)?;
    match violation {
        Some(m) => Err(Failure::Check(m)),
        None => Ok(()),
    }
}

/// Writes to stdout, or atomically replaces `path`.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string()))
        }
        Some(path) => write_atomic(path, text),
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(text.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn load(c: &Common, spec: &str) -> Result<Subgroup, Failure> {
    let mut s = load_subgroup(spec, c.reduce)?;
    s.graph.set_max_vertices(c.max_vertices as usize);
    Ok(s)
}

fn table_out(c: &Common, t: &GrowthTable) -> String {
    match c.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json() + "\n",
    }
}

fn json_out(value: serde_json::Value) -> String {
    serde_json::to_string_pretty(&value).expect("json values serialize") + "\n"
}

fn fold_cmd(c: &Common, gens: &str) -> Outcome {
    let s = load(c, gens)?;
    let g = &s.graph;
    Ok(match c.format {
        Format::Csv => g.dump(),
        Format::Json => {
            let edges: Vec<_> = g
                .defined_pairs()
                .filter(|(_, l, _)| l.is_positive())
                .map(|(v, l, u)| json!([v, l.to_string(), u]))
                .collect();
            json_out(json!({ "vertices": g.num_vertices(), "rank": g.alphabet().rank(), "edges": edges }))
        }
    })
}

fn table_cmd(
    c: &Common,
    d: &Depth,
    f: impl Fn(&mut CosetGraph, usize) -> cogrowth::Result<GrowthTable>,
) -> Outcome {
    let mut s = load(c, &d.gens)?;
    Ok(table_out(c, &f(&mut s.graph, d.depth)?))
}

fn words_out(c: &Common, header: &str, words: &[Word]) -> String {
    match c.format {
        Format::Csv => {
            let mut out = format!("{header}\n");
            for w in words {
                out.push_str(&format!("{w}\n"));
            }
            out
        }
        Format::Json => json_out(json!(words)),
    }
}

fn basis_cmd(c: &Common, d: &Depth) -> Outcome {
    let mut s = load(c, &d.gens)?;
    let basis = s.graph.nielsen_schreier_basis(d.depth)?;
    Ok(words_out(c, "generator", &basis))
}

fn intersect_cmd(c: &Common, p: &Pair) -> Outcome {
    let mut a = load(c, &p.gens1)?;
    let mut b = load(c, &p.gens2)?;
    let mut prod = product(&mut a.graph, &mut b.graph, p.depth)?;
    let table = prod.graph.cogrowth(p.depth)?;
    let verdict = sufficient_nontrivial(&mut a.graph, &mut b.graph, p.depth)?;
    let shortest = shortest_loop(&mut a.graph, &mut b.graph, p.depth)?;
    Ok(match c.format {
        Format::Csv => table.to_csv(),
        Format::Json => json_out(json!({
            "cogrowth": table.values(),
            "nontriviality": verdict,
            "shortest_loop": shortest,
            "exact": prod.graph.is_folded(),
        })),
    })
}

fn prop11_cmd(c: &Common, p: &Pair, violation: &mut Option<String>) -> Outcome {
    let mut a = load(c, &p.gens1)?;
    let mut b = load(c, &p.gens2)?;
    let rows = prop11_rows(&mut a.graph, &mut b.graph, p.depth)?;
    if let Some(r) = rows.iter().find(|r| !r.holds()) {
        *violation = Some(format!("intersection bounds fail at n = {}", r.n));
    }
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("n,first,second,intersection,product,max\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.n, r.first, r.second, r.intersection, r.product, r.max
                ));
            }
            out
        }
        Format::Json => json_out(json!(rows)),
    })
}

fn eq5_cmd(c: &Common, d: &Depth, violation: &mut Option<String>) -> Outcome {
    let mut s = load(c, &d.gens)?;
    let rows = s.graph.sandwich_rows_eq5(d.depth)?;
    if let Some(r) = rows.iter().find(|r| !r.holds()) {
        *violation = Some(format!("coset sandwich fails at n = {}", r.n));
    }
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("n,lower,total,upper\n");
            for r in &rows {
                out.push_str(&format!("{},{},{},{}\n", r.n, r.lower, r.total, r.upper));
            }
            out
        }
        Format::Json => json_out(json!(rows
            .iter()
            .map(|r| json!({"n": r.n, "lower": r.lower, "total": r.total, "upper": r.upper}))
            .collect::<Vec<_>>())),
    })
}

fn eq6_cmd(c: &Common, d: &Depth, violation: &mut Option<String>) -> Outcome {
    let mut s = load(c, &d.gens)?;
    let mut rows = Vec::new();
    for n1 in 1..=d.depth {
        for n2 in 0..=d.depth - n1 {
            let holds = s.graph.normality_check_eq6(n1, n2)?;
            if !holds && violation.is_none() {
                *violation = Some(format!("normal restriction fails at ({n1}, {n2})"));
            }
            rows.push((n1, n2, holds));
        }
    }
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("n1,n2,holds\n");
            for (n1, n2, h) in &rows {
                out.push_str(&format!("{n1},{n2},{h}\n"));
            }
            out
        }
        Format::Json => json_out(json!(rows
            .iter()
            .map(|(n1, n2, h)| json!({"n1": n1, "n2": n2, "holds": h}))
            .collect::<Vec<_>>())),
    })
}

fn construct_cmd(c: &Common, a: &Construct, violation: &mut Option<String>) -> Outcome {
    let family: Family = a.alpha.parse()?;
    let alpha = CgFunction::family(family)?;
    if alpha.is_bounded() {
        let mut g = cogrowth::essential::finite_index_fallback(&alpha)?;
        let table = g.cogrowth(a.depth)?;
        if let Some(path) = &a.dump {
            write_atomic(path, &g.dump())?;
        }
        return Ok(table_out(c, &table));
    }
    let mut st = ConstructionState::new(alpha)?;
    st.set_max_vertices(c.max_vertices as usize);
    let report = st.run_until(a.elements, a.depth)?;
    if !report.complete {
        return Err(Failure::Resource(report.stopped_by.unwrap_or_else(|| "construction stopped".into())));
    }
    let n = st.interior_depth() / 2;
    let sandwich = st.sandwich_report(n, a.constant)?;
    if !sandwich.all_pass() {
        *violation = Some("constructor sandwich violated".into());
    }
    let certificates = serde_json::to_string_pretty(st.certificates()).expect("certificates serialize") + "\n";
    if let Some(path) = &a.certificates {
        write_atomic(path, &certificates)?;
    }
    if let Some(path) = &a.dump {
        write_atomic(path, &st.export().dump())?;
    }
    Ok(match c.format {
        Format::Csv => sandwich.to_csv(),
        Format::Json => json_out(json!({
            "report": report,
            "sandwich": sandwich,
            "certificates": st.certificates(),
            "schedule": st.schedule(),
        })),
    })
}

fn certify_cmd(c: &Common, dump: &Path, certs: &Path, violation: &mut Option<String>) -> Outcome {
    let mut g = CosetGraph::from_dump(&read_file(dump)?)?;
    let certificates: Vec<Certificate> = serde_json::from_str(&read_file(certs)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", certs.display())))?;
    let mut rows = Vec::new();
    for cert in &certificates {
        let ok = g.contains(&cert.g.pow(cert.k as i64)).unwrap_or(false);
        if !ok && violation.is_none() {
            *violation = Some(format!("certificate for {} does not replay", cert.g));
        }
        rows.push((cert.g.clone(), cert.k, ok));
    }
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("g,k,replayed\n");
            for (w, k, ok) in &rows {
                out.push_str(&format!("{w},{k},{ok}\n"));
            }
            out
        }
        Format::Json => json_out(json!(rows
            .iter()
            .map(|(w, k, ok)| json!({"g": w, "k": k, "replayed": ok}))
            .collect::<Vec<_>>())),
    })
}

fn load_ideal(spec: &IdealSpec) -> Result<(Algebra, Vec<Polynomial>), Failure> {
    let algebra = Algebra::new(spec.mode.into(), spec.rank)?;
    let gens = parse_ideal_file(&read_file(&spec.ideal)?, &algebra)
        .map_err(|e| Failure::Usage(format!("{}: {e}", spec.ideal.display())))?;
    Ok((algebra, gens))
}

fn ideal_cmd(c: &Common, a: &IdealArgs, cogrowth_view: bool) -> Outcome {
    let (algebra, gens) = load_ideal(&a.ideal)?;
    let max_rows = c.max_rows as usize;
    let (basis, stable_at) = match a.stabilize {
        Some(max) => {
            let st = stabilize(algebra, gens, a.depth, a.ideal.horizon.max(a.depth), max, max_rows)?;
            (st.basis, st.stable_at)
        }
        None => (EchelonBasis::with_max_rows(algebra, gens, a.ideal.horizon, max_rows)?, None),
    };
    let growth = algebra.growth(a.depth);
    let ideal = basis.ideal_table(a.depth)?;
    let quotient = basis.cogrowth_table(a.depth)?;
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("n,algebra,ideal,cogrowth\n");
            for n in 0..=a.depth {
                out.push_str(&format!("{n},{},{},{}\n", growth.at(n), ideal.at(n), quotient.at(n)));
            }
            out
        }
        Format::Json => {
            let mut value = json!({
                "horizon": basis.horizon(),
                "stable_at": stable_at,
                "lower_bound": stable_at.is_none(),
                "algebra": growth.values(),
                "ideal": ideal.values(),
                "cogrowth": quotient.values(),
            });
            if cogrowth_view {
                value["essentiality"] = json!(essentiality_report(&basis, a.depth)?);
                value["standard_monomials"] = json!(basis.standard_monomials(a.depth)?);
            }
            json_out(value)
        }
    })
}

fn colon_cmd(c: &Common, spec: &IdealSpec, r: &str, length: usize) -> Outcome {
    let (algebra, gens) = load_ideal(spec)?;
    let basis = EchelonBasis::with_max_rows(algebra, gens, spec.horizon, c.max_rows as usize)?;
    let r = Polynomial::parse(r, &algebra)?;
    let result = quotient_search(&basis, &r, length)?;
    Ok(match c.format {
        Format::Csv => match &result {
            ColonSearch::Found { s, candidates } => format!("result,s,candidates\nfound,{s},{candidates}\n"),
            ColonSearch::NotFound {
                candidates,
                quotient_dimension,
                forced,
            } => format!(
                "result,candidates,quotient_dimension,forced\nnot-found,{candidates},{quotient_dimension},{forced}\n"
            ),
        },
        Format::Json => json_out(json!(result)),
    })
}

fn correspond_cmd(c: &Common, gens: &str, depth: usize, max_horizon: usize, violation: &mut Option<String>) -> Outcome {
    let mut s = load(c, gens)?;
    let generators = s.generating_set()?;
    let report = correspondence(&mut s.graph, &generators, depth, max_horizon, c.max_rows as usize)?;
    if report.stable_at.is_none() {
        return Err(Failure::Resource(format!("ideal table not stable by horizon {max_horizon}")));
    }
    if !report.matches {
        *violation = Some("ideal cogrowth differs from subgroup cogrowth".into());
    }
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("n,subgroup,ideal\n");
            for n in 0..=depth {
                out.push_str(&format!("{n},{},{}\n", report.subgroup[n], report.ideal[n]));
            }
            out
        }
        Format::Json => json_out(json!(report)),
    })
}

fn verify_cmd(c: &Common, dir: &Path, violation: &mut Option<String>) -> Outcome {
    let mut suite = Suite::load(dir)?;
    let outcomes = suite.run_all();
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if !failed.is_empty() {
        *violation = Some(format!("criteria {failed:?} failed"));
    }
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("criterion,name,status,detail\n");
            for o in &outcomes {
                let status = if o.passed { "pass" } else { "fail" };
                out.push_str(&format!("{},{},{status},\"{}\"\n", o.id, o.name, o.detail.replace('"', "'")));
            }
            out
        }
        Format::Json => json_out(json!(outcomes)),
    })
}
