//! The `liftlab` command line.
//!
//! Exit codes: 0 success, 1 a verification failed (the first counterexample
//! is printed), 2 usage or input error. Randomized commands take `--seed`
//! and otherwise use [`DEFAULT_SEED`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use liftlab_core::combi::Graph;
use liftlab_core::cover::{build_all_tk, build_tk, TkFamily};
use liftlab_core::match_protocol::{match_factorization, match_width_report};
use liftlab_core::permext::{
    color_matrix, fooling_verify, goemans_verify, one_round_protocol, perm_factorization, quadratic_fooling_set,
    two_round_protocol, FoolingCheck,
};
use liftlab_core::protocol::{Factorization, MarkovianProtocol};
use liftlab_core::slack::{slack_match, slack_perm, slack_spt, SlackMatrix};
use liftlab_core::sortnet::{
    apply_mask, generate, is_sorting_network, minimality, sorted_mask, ComparatorSeq, Direction, Minimality,
    MinimalityMode, NetworkKind,
};
use liftlab_core::spt_protocol::build_spt_protocol;
use liftlab_core::{Error, RatMatrix, Rational};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "liftlab", version, about = "Slack matrices, protocols and factorizations for classical polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a slack matrix as JSON.
    Slack(SlackArgs),
    /// Build a nonnegative factorization of a slack matrix.
    Factorize(FactorizeArgs),
    /// Check a protocol's expectations against the slack matrix.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of one protocol entry.
    Simulate(SimulateArgs),
    /// Sorting-network tools.
    #[command(subcommand)]
    Sortnet(SortnetCommand),
    /// Greedy vertex covers.
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Goemans' extension of the permutahedron.
    #[command(subcommand)]
    Goemans(GoemansCommand),
    /// Fooling set for the quadratic network's color matrix.
    Fooling(FoolingArgs),
    /// Summary table over all builders.
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PolytopeArg {
    Perm,
    Spt,
    Match,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Quadratic,
    Oddeven,
    Batcher,
}

impl From<KindArg> for NetworkKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Quadratic => NetworkKind::Quadratic,
            KindArg::Oddeven => NetworkKind::OddEvenTransposition,
            KindArg::Batcher => NetworkKind::Batcher,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ProtocolArg {
    /// Two-round spanning-tree protocol.
    Spt,
    /// One-round permutahedron protocol.
    Perm,
    /// Two-round permutahedron protocol.
    PermTwoRound,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
enum ModeArg {
    #[default]
    OneRemoval,
    Exhaustive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
enum DirectionArg {
    #[default]
    Forward,
    Reverse,
}

#[derive(Args, Debug)]
struct NetworkSource {
    /// Generated network (default: quadratic).
    #[arg(long = "gen", value_enum, conflicts_with = "network")]
    kind: Option<KindArg>,
    /// Network file: `n q`, then `q` lines `i j`.
    #[arg(long)]
    network: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SlackArgs {
    #[arg(long, value_enum)]
    polytope: PolytopeArg,
    #[arg(long)]
    n: Option<usize>,
    /// Graph file: `n m`, then `m` lines `u v` (default: complete graph).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Add the `x_e ≥ 0` rows to the spanning-tree matrix.
    #[arg(long)]
    nonneg: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FactorizeArgs {
    #[arg(long, value_enum)]
    polytope: PolytopeArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkSource,
    /// T_k families (one object or an array) replacing the greedy ones.
    #[arg(long)]
    tk: Option<PathBuf>,
    /// Check `A·B` against the slack matrix.
    #[arg(long)]
    verify: bool,
    /// Write `{"a": ..., "b": ...}` here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkSource,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkSource,
    /// Row label, e.g. `{1,3}`.
    #[arg(long)]
    x: String,
    /// Column label, e.g. `2134` or `{{1,2},{3,4}}`.
    #[arg(long)]
    y: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum SortnetCommand {
    /// Exit 0 if the file is a sorting network, 1 with an unsorted input otherwise.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        direction: DirectionArg,
    },
    /// Print a generated network in the file format.
    Generate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exit 0 if no deletion still sorts, 1 with a redundant set otherwise.
    Minimality {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
    },
}

#[derive(Subcommand, Debug)]
enum CoverCommand {
    /// Greedy T_k for the complete graph.
    Tk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GoemansCommand {
    /// Check every lift and seeded convex combinations of lifts.
    Verify {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        network: NetworkSource,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct FoolingArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(CliError::Core(Error::UncoveredMatching { k, matching })) => {
            let _ = writeln!(err, "verification failed: T_{k} does not cover matching {matching}");
            EXIT_FAILED
        }
        Err(CliError::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Slack(a) => cmd_slack(a, out),
        Command::Factorize(a) => cmd_factorize(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Sortnet(c) => cmd_sortnet(c, out),
        Command::Cover(CoverCommand::Tk { n, k, out: path }) => cmd_cover_tk(n, k, path, out),
        Command::Goemans(GoemansCommand::Verify {
            n,
            network,
            samples,
            seed,
        }) => cmd_goemans(n, network, samples, seed, out),
        Command::Fooling(a) => cmd_fooling(a, out),
        Command::Report(a) => cmd_report(a, out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Writes `data` to `path`, or to `out` when no path is given.
fn emit(data: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, format!("{data}\n")).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => Ok(writeln!(out, "{data}")?),
    }
}

fn load_graph(n: Option<usize>, graph: Option<&Path>) -> Result<Graph, CliError> {
    match (n, graph) {
        (_, Some(path)) => {
            let g = Graph::parse_edge_list(&read(path)?)?;
            if let Some(n) = n {
                if n != g.n() {
                    return Err(CliError::Usage(format!("--n {n} but the graph has {} vertices", g.n())));
                }
            }
            Ok(g)
        }
        (Some(n), None) => Ok(Graph::complete(n)),
        (None, None) => Err(CliError::Usage("--n or --graph is required".into())),
    }
}

fn load_network(n: Option<usize>, src: &NetworkSource) -> Result<ComparatorSeq, CliError> {
    match &src.network {
        Some(path) => {
            let seq = ComparatorSeq::parse(&read(path)?)?;
            if let Some(n) = n {
                if n != seq.n() {
                    return Err(CliError::Usage(format!("--n {n} but the network has {} wires", seq.n())));
                }
            }
            Ok(seq)
        }
        None => {
            let n = n.ok_or_else(|| CliError::Usage("--n is required with a generated network".into()))?;
            Ok(generate(src.kind.unwrap_or(KindArg::Quadratic).into(), n)?)
        }
    }
}

fn require_n(n: Option<usize>) -> Result<usize, CliError> {
    n.ok_or_else(|| CliError::Usage("--n is required".into()))
}

fn build_slack(polytope: PolytopeArg, n: Option<usize>, graph: Option<&Path>, nonneg: bool) -> Result<SlackMatrix, CliError> {
    Ok(match polytope {
        PolytopeArg::Perm => slack_perm(require_n(n)?)?,
        PolytopeArg::Spt => slack_spt(&load_graph(n, graph)?, nonneg)?,
        PolytopeArg::Match => slack_match(&load_graph(n, graph)?)?,
    })
}

fn cmd_slack(a: SlackArgs, out: &mut dyn Write) -> CliResult {
    let s = build_slack(a.polytope, a.n, a.graph.as_deref(), a.nonneg)?;
    emit(&s.matrix.to_json(), a.out.as_deref(), out)?;
    if a.out.is_some() {
        writeln!(out, "slack matrix {} x {}", s.nrows(), s.ncols())?;
    }
    Ok(EXIT_OK)
}

fn load_tk(path: &Path, n: usize) -> Result<Vec<TkFamily>, CliError> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let items = match value {
        Value::Array(items) => items,
        other => vec![other],
    };
    let mut families = build_all_tk(n)?;
    for item in items {
        let family = TkFamily::from_json(&item.to_string())?;
        if family.n != n || family.k == 0 || family.k >= families.len() {
            return Err(CliError::Usage(format!("T_{} for n={} does not fit n={n}", family.k, family.n)));
        }
        let k = family.k;
        families[k] = family;
    }
    Ok(families)
}

fn factorization_json(f: &Factorization) -> String {
    let a: Value = serde_json::from_str(&f.a.to_json()).expect("matrix json");
    let b: Value = serde_json::from_str(&f.b.to_json()).expect("matrix json");
    json!({ "a": a, "b": b }).to_string()
}

fn cmd_factorize(a: FactorizeArgs, out: &mut dyn Write) -> CliResult {
    let (f, slack) = match a.polytope {
        PolytopeArg::Perm => {
            let seq = load_network(a.n, &a.network)?;
            (perm_factorization(&seq)?.factorization, build_slack(a.polytope, Some(seq.n()), None, false)?)
        }
        PolytopeArg::Spt => {
            let g = load_graph(a.n, a.graph.as_deref())?;
            (build_spt_protocol(&g)?.compile_factorization()?, slack_spt(&g, false)?)
        }
        PolytopeArg::Match => {
            let g = load_graph(a.n, a.graph.as_deref())?;
            let tks = match &a.tk {
                Some(path) => load_tk(path, g.n())?,
                None => build_all_tk(g.n())?,
            };
            let f = match_factorization(&g, &tks)?;
            if a.verify {
                let r = match_width_report(&g, &tks, &f)?;
                writeln!(out, "width {} (bound {:.1}, within: {})", r.width, to_f64(&r.bound), r.within)?;
            }
            (f, slack_match(&g)?)
        }
    };
    writeln!(
        out,
        "factorization size {} ({} x {} times {} x {})",
        f.size(),
        f.a.nrows(),
        f.a.ncols(),
        f.b.nrows(),
        f.b.ncols()
    )?;
    if let Some(path) = &a.out {
        emit(&factorization_json(&f), Some(path), out)?;
    }
    if a.verify {
        let check = f.verify(&slack.matrix)?;
        writeln!(out, "verify: {check}")?;
        if !check.is_equal() {
            return Ok(EXIT_FAILED);
        }
    }
    Ok(EXIT_OK)
}

fn build_protocol(
    protocol: ProtocolArg,
    n: Option<usize>,
    graph: Option<&Path>,
    network: &NetworkSource,
) -> Result<(MarkovianProtocol, RatMatrix), CliError> {
    Ok(match protocol {
        ProtocolArg::Spt => {
            let g = load_graph(n, graph)?;
            (build_spt_protocol(&g)?, slack_spt(&g, false)?.matrix)
        }
        ProtocolArg::Perm | ProtocolArg::PermTwoRound => {
            let seq = load_network(n, network)?;
            let p = if protocol == ProtocolArg::Perm {
                one_round_protocol(&seq)?
            } else {
                two_round_protocol(&seq)?
            };
            (p, slack_perm(seq.n())?.matrix)
        }
    })
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CliResult {
    let (p, s) = build_protocol(a.protocol, a.n, a.graph.as_deref(), &a.network)?;
    let verdict = p.check_correct(&s)?;
    writeln!(out, "{verdict}")?;
    writeln!(out, "rounds {}, width {}", p.rounds(), p.gamma_width().width())?;
    Ok(if verdict.is_correct() { EXIT_OK } else { EXIT_FAILED })
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64()
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> CliResult {
    let (p, _) = build_protocol(a.protocol, a.n, a.graph.as_deref(), &a.network)?;
    let x = p
        .x_domain()
        .iter()
        .position(|l| *l == a.x)
        .ok_or_else(|| CliError::Usage(format!("unknown x label {:?}", a.x)))?;
    let y = p
        .y_domain()
        .iter()
        .position(|l| *l == a.y)
        .ok_or_else(|| CliError::Usage(format!("unknown y label {:?}", a.y)))?;
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let exact = p.exact_expectation(x, y)?;
    let sim = p.simulate(x, y, a.trials, a.seed)?;
    let stderr = (to_f64(&sim.variance) / a.trials as f64).sqrt();
    writeln!(out, "trials   {}", sim.trials)?;
    writeln!(out, "seed     {}", a.seed)?;
    writeln!(out, "mean     {} ({:.6})", sim.mean, to_f64(&sim.mean))?;
    writeln!(out, "exact    {} ({:.6})", exact, to_f64(&exact))?;
    writeln!(out, "variance {:.6}", to_f64(&sim.variance))?;
    writeln!(out, "std err  {stderr:.6}")?;
    writeln!(out, "nonneg   {}/{}", sim.count_nonneg, sim.trials)?;
    Ok(EXIT_OK)
}

fn cmd_sortnet(c: SortnetCommand, out: &mut dyn Write) -> CliResult {
    match c {
        SortnetCommand::Check { file, direction } => {
            let seq = ComparatorSeq::parse(&read(&file)?)?;
            let dir = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Reverse => Direction::Reverse,
            };
            if is_sorting_network(&seq, dir) {
                writeln!(out, "sorting network: n={} q={}", seq.n(), seq.len())?;
                return Ok(EXIT_OK);
            }
            let n = seq.n();
            let bad = (0u32..1 << n)
                .find(|&b| apply_mask(&seq, b, dir) != sorted_mask(n, b.count_ones() as usize, dir))
                .expect("some input fails");
            let bits = |b: u32| (0..n).map(|i| if b & (1 << i) != 0 { '1' } else { '0' }).collect::<String>();
            writeln!(out, "not a sorting network: n={} q={}", n, seq.len())?;
            writeln!(out, "input  {}", bits(bad))?;
            writeln!(out, "output {}", bits(apply_mask(&seq, bad, dir)))?;
            Ok(EXIT_FAILED)
        }
        SortnetCommand::Generate { kind, n, out: path } => {
            let seq = generate(kind.into(), n)?;
            emit(seq.to_text().trim_end(), path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        SortnetCommand::Minimality { file, mode } => {
            let seq = ComparatorSeq::parse(&read(&file)?)?;
            let mode = match mode {
                ModeArg::OneRemoval => MinimalityMode::OneRemoval,
                ModeArg::Exhaustive => MinimalityMode::Exhaustive,
            };
            match minimality(&seq, mode) {
                Ok(Minimality::Minimal) => {
                    writeln!(out, "minimal ({} comparators)", seq.len())?;
                    Ok(EXIT_OK)
                }
                Ok(Minimality::Redundant(removed)) => {
                    let listed: Vec<String> = removed
                        .iter()
                        .map(|&k| format!("#{k} {}", seq.comps()[k]))
                        .collect();
                    writeln!(out, "redundant: still sorts without {}", listed.join(", "))?;
                    Ok(EXIT_FAILED)
                }
                Err(Error::NotSortingNetwork) => {
                    writeln!(out, "not a sorting network")?;
                    Ok(EXIT_FAILED)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn cmd_cover_tk(n: usize, k: usize, path: Option<PathBuf>, out: &mut dyn Write) -> CliResult {
    let r = build_tk(n, k)?;
    emit(&r.family.to_json(), path.as_deref(), out)?;
    if path.is_some() {
        writeln!(out, "|T_{k}| = {} for n = {n} (bound {:.3})", r.family.sets.len(), to_f64(&r.bound))?;
    }
    Ok(EXIT_OK)
}

fn cmd_goemans(n: usize, network: NetworkSource, samples: usize, seed: u64, out: &mut dyn Write) -> CliResult {
    let seq = load_network(Some(n), &network)?;
    let r = goemans_verify(&seq, samples, seed)?;
    writeln!(out, "n={} q={} dimension={} inequalities={}", r.n, r.q, r.n * (r.q + 1), 2 * r.q)?;
    writeln!(out, "lifts checked {}, samples {} (seed {seed})", r.lifts, r.samples)?;
    match &r.failure {
        None => {
            writeln!(out, "all checks passed")?;
            Ok(EXIT_OK)
        }
        Some(f) => {
            writeln!(out, "failed: {f}")?;
            Ok(EXIT_FAILED)
        }
    }
}

fn cmd_fooling(a: FoolingArgs, out: &mut dyn Write) -> CliResult {
    let f = quadratic_fooling_set(a.n)?;
    let m = color_matrix(&generate(NetworkKind::Quadratic, a.n)?)?;
    let check = fooling_verify(&m, &f)?;
    if let Some(path) = &a.out {
        let data = serde_json::to_string(&f).expect("fooling set serializes");
        emit(&data, Some(path), out)?;
    }
    writeln!(out, "fooling set of size {} against a {} x {} color matrix", f.len(), m.nrows(), m.ncols())?;
    match check {
        FoolingCheck::Valid => {
            writeln!(out, "valid: nonnegative rank of the color matrix is {}", f.len())?;
            Ok(EXIT_OK)
        }
        FoolingCheck::ZeroPair { index } => {
            let (r, c) = &f.pairs[index];
            writeln!(out, "invalid: entry ({r}, {c}) is zero")?;
            Ok(EXIT_FAILED)
        }
        FoolingCheck::CrossPositive { first, second } => {
            let (r1, c1) = &f.pairs[first];
            let (r2, c2) = &f.pairs[second];
            writeln!(out, "invalid: ({r1}, {c2}) and ({r2}, {c1}) are both positive")?;
            Ok(EXIT_FAILED)
        }
    }
}

struct ReportRow {
    polytope: &'static str,
    n: usize,
    facets: usize,
    size: usize,
    width: usize,
    bound_label: String,
    bound: f64,
    pass: bool,
}

fn report_rows() -> Result<Vec<ReportRow>, CliError> {
    let mut rows = Vec::new();
    for n in 3..=6 {
        let seq = generate(NetworkKind::Quadratic, n)?;
        let s = slack_perm(n)?;
        let f = perm_factorization(&seq)?;
        let width = one_round_protocol(&seq)?.gamma_width().width();
        let bound = 2 * seq.len();
        rows.push(ReportRow {
            polytope: "perm",
            n,
            facets: s.nrows(),
            size: f.size(),
            width,
            bound_label: "2q".into(),
            bound: bound as f64,
            pass: f.factorization.verify(&s.matrix)?.is_equal() && f.size() <= bound && width <= bound,
        });
    }
    for n in 3..=5 {
        let g = Graph::complete(n);
        let p = build_spt_protocol(&g)?;
        let s = slack_spt(&g, false)?;
        let f = p.compile_factorization()?;
        let width = p.gamma_width().width();
        let bound = n * n * n;
        rows.push(ReportRow {
            polytope: "spt",
            n,
            facets: s.nrows(),
            size: f.size(),
            width,
            bound_label: "n^3".into(),
            bound: bound as f64,
            pass: p.check_correct(&s.matrix)?.is_correct() && width <= bound,
        });
    }
    for n in 4..=6 {
        let g = Graph::complete(n);
        let tks = build_all_tk(n)?;
        let f = match_factorization(&g, &tks)?;
        let s = slack_match(&g)?;
        let r = match_width_report(&g, &tks, &f)?;
        rows.push(ReportRow {
            polytope: "match",
            n,
            facets: s.nrows(),
            size: f.size(),
            width: r.width,
            bound_label: "n^3 ln(n) 1.5^n".into(),
            bound: to_f64(&r.bound),
            pass: f.verify(&s.matrix)?.is_equal() && r.within,
        });
    }
    Ok(rows)
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write) -> CliResult {
    let rows = report_rows()?;
    let all_pass = rows.iter().all(|r| r.pass);
    match a.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "polytope": r.polytope,
                        "n": r.n,
                        "facets": r.facets,
                        "factorization_size": r.size,
                        "width": r.width,
                        "bound": r.bound_label,
                        "bound_value": (r.bound * 10.0).round() / 10.0,
                        "pass": r.pass,
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "rows": items, "pass": all_pass })).expect("json"))?;
        }
        Format::Text => {
            writeln!(
                out,
                "{:<8} {:>3} {:>8} {:>8} {:>8} {:>18} {:>10}  result",
                "polytope", "n", "facets", "size", "width", "bound", "value"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<8} {:>3} {:>8} {:>8} {:>8} {:>18} {:>10.1}  {}",
                    r.polytope,
                    r.n,
                    r.facets,
                    r.size,
                    r.width,
                    r.bound_label,
                    r.bound,
                    if r.pass { "pass" } else { "FAIL" }
                )?;
            }
        }
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_FAILED })
}
