//! Batch front door: parse an instance file, pick a pipeline, run it, and
//! emit values, error, and diagnostics as text or JSON.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 size-guard refusal,
//! 1 internal invariant failure. All errors go to standard error with the
//! prefix `isoreg-error:`.

mod instance;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use isoreg::{
    boxes_to_domination, format_rat, l0_chain, l0_regress, l0_regress_pairwise, l0_regress_points,
    l1_chain, l1_regress, l1_regress_points, l2_exact, l2_exact_points, lp_approx,
    lp_approx_points, oracle_regress, parse_rat, pav_l2, rendezvous_violator, violator_closure,
    violator_pairwise, Dag, Diagnostics, Error, ErrorSum, Metric, PointSet, Rat, RegressionResult,
    WeightedFunction,
};

use instance::{parse_instance, Instance, Kind, Payload};

#[derive(Parser)]
#[command(name = "isoreg", version, about = "Isotonic regression over partial orders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the production pipelines.
    Regress(SolveArgs),
    /// Build a violator structure and report its size.
    Violator(ViolatorArgs),
    /// Solve a small instance by exhaustive search (cross-checking aid).
    Oracle(SolveArgs),
    /// Time a pipeline on a generated or provided instance.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Regression metric.
    #[arg(long, value_enum, default_value_t = MetricArg::L2)]
    metric: MetricArg,
    /// Exponent for --metric lp; must be finite and exceed 1.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Grid step for --metric lp: integer, fraction `p/q`, or decimal.
    #[arg(long)]
    delta: Option<String>,
    /// Order structure to solve over; auto follows the file header.
    #[arg(long, value_enum, default_value_t = OrderArg::Auto)]
    order: OrderArg,
    /// Violator construction; auto picks by order structure (affects L0 over
    /// points and the violator subcommand).
    #[arg(long, value_enum, default_value_t = ViolatorArg::Auto)]
    violator: ViolatorArg,
    /// Instance file (format v1).
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Weight quantization for Lp derivative costs.
    #[arg(long, default_value_t = 1 << 20)]
    weight_scale: i64,
}

#[derive(Args)]
struct ViolatorArgs {
    /// Order structure; auto follows the file header.
    #[arg(long, value_enum, default_value_t = OrderArg::Auto)]
    order: OrderArg,
    /// Violator construction; auto picks by order structure.
    #[arg(long, value_enum, default_value_t = ViolatorArg::Auto)]
    violator: ViolatorArg,
    /// Instance file (format v1).
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Print only the size summary, not the edge list.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Regression metric.
    #[arg(long, value_enum, default_value_t = MetricArg::L2)]
    metric: MetricArg,
    /// Exponent for --metric lp; must be finite and exceed 1.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Grid step for --metric lp: integer, fraction `p/q`, or decimal.
    #[arg(long)]
    delta: Option<String>,
    /// Shape of the generated instance (auto = dag); with --input, the order
    /// to solve the file under.
    #[arg(long, value_enum, default_value_t = OrderArg::Auto)]
    order: OrderArg,
    /// Violator construction; auto picks by order structure.
    #[arg(long, value_enum, default_value_t = ViolatorArg::Auto)]
    violator: ViolatorArg,
    /// Time this instance instead of generating one.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Weight quantization for Lp derivative costs.
    #[arg(long, default_value_t = 1 << 20)]
    weight_scale: i64,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    L0,
    L1,
    L2,
    Lp,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Auto,
    Dag,
    Chain,
    Points,
    Boxes,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ViolatorArg {
    Auto,
    Closure,
    Rendezvous,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

fn metric_name(metric: MetricArg) -> &'static str {
    match metric {
        MetricArg::L0 => "l0",
        MetricArg::L1 => "l1",
        MetricArg::L2 => "l2",
        MetricArg::Lp => "lp",
    }
}

fn order_name(order: OrderArg) -> &'static str {
    match order {
        OrderArg::Auto => "auto",
        OrderArg::Dag => "dag",
        OrderArg::Chain => "chain",
        OrderArg::Points => "points",
        OrderArg::Boxes => "boxes",
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::TooLarge(_) => 3,
            Error::Internal(_)
            | Error::ExtractionMismatch(_)
            | Error::NotAntichain(_)
            | Error::InvalidSplit(..) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("isoreg-error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("isoreg-error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Regress(args) => {
            let inst = load(&args.input)?;
            let report = solve(&inst, &args)?;
            emit(&render(&report, args.format), args.output.as_deref())
        }
        Command::Oracle(args) => {
            let inst = load(&args.input)?;
            let report = oracle(&inst, &args)?;
            emit(&render(&report, args.format), args.output.as_deref())
        }
        Command::Violator(args) => {
            let inst = load(&args.input)?;
            let text = violator_report(&inst, &args)?;
            emit(&text, args.output.as_deref())
        }
        Command::Bench(args) => bench(args),
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// The pipeline family an instance will be solved under.
enum Solver<'a> {
    Chain,
    OverDag(std::borrow::Cow<'a, Dag>),
    OverPoints(&'a PointSet),
}

fn resolve(inst: &Instance, order: OrderArg) -> Result<Solver<'_>, Failure> {
    use std::borrow::Cow;
    match (order, &inst.payload) {
        (OrderArg::Auto | OrderArg::Chain, Payload::Chain) => Ok(Solver::Chain),
        (OrderArg::Dag, Payload::Chain) => {
            Ok(Solver::OverDag(Cow::Owned(Dag::chain(inst.len()))))
        }
        (OrderArg::Auto | OrderArg::Dag, Payload::Edges(d)) => {
            Ok(Solver::OverDag(Cow::Borrowed(d)))
        }
        (OrderArg::Auto | OrderArg::Points, Payload::Domination(p)) => Ok(Solver::OverPoints(p)),
        (OrderArg::Boxes, Payload::Domination(p)) if inst.kind == Kind::Boxes => {
            Ok(Solver::OverPoints(p))
        }
        (o, _) => Err(input_error(format!(
            "--order {} cannot solve a {} instance",
            order_name(o),
            inst.kind.name()
        ))),
    }
}

fn check_violator_choice(solver: &Solver, choice: ViolatorArg) -> Result<(), Failure> {
    if matches!(choice, ViolatorArg::Rendezvous) && !matches!(solver, Solver::OverPoints(_)) {
        return Err(input_error(
            "the rendezvous construction requires a point or box instance",
        ));
    }
    Ok(())
}

fn to_metric(metric: MetricArg, p: f64) -> Result<Metric, Failure> {
    Ok(match metric {
        MetricArg::L0 => Metric::L0,
        MetricArg::L1 => Metric::L1,
        MetricArg::L2 => Metric::L2,
        MetricArg::Lp => Metric::lp(p)?,
    })
}

fn parse_delta(delta: &Option<String>) -> Result<Option<Rat>, Failure> {
    delta
        .as_deref()
        .map(parse_rat)
        .transpose()
        .map_err(Failure::from)
}

struct Report {
    values: Option<Vec<Rat>>,
    metric: &'static str,
    error: ErrorSum,
    diagnostics: Diagnostics,
}

impl Report {
    fn from_result(metric: &'static str, r: RegressionResult) -> Report {
        Report {
            values: Some(r.values),
            metric,
            error: r.error,
            diagnostics: r.diagnostics,
        }
    }
}

fn solve(inst: &Instance, args: &SolveArgs) -> Result<Report, Failure> {
    let solver = resolve(inst, args.order)?;
    check_violator_choice(&solver, args.violator)?;
    let delta = parse_delta(&args.delta)?;
    let wf = &inst.wf;
    let result = match &solver {
        Solver::Chain => match args.metric {
            MetricArg::L0 => l0_chain(wf)?,
            MetricArg::L1 => l1_chain(wf)?,
            MetricArg::L2 => pav_l2(wf)?,
            MetricArg::Lp => {
                lp_approx(&Dag::chain(wf.len()), wf, args.p, delta, args.weight_scale)?
            }
        },
        Solver::OverDag(dag) => match args.metric {
            MetricArg::L0 => l0_regress(dag, wf)?,
            MetricArg::L1 => l1_regress(dag, wf)?,
            MetricArg::L2 => l2_exact(dag, wf)?,
            MetricArg::Lp => lp_approx(dag, wf, args.p, delta, args.weight_scale)?,
        },
        Solver::OverPoints(ps) => match args.metric {
            MetricArg::L0 if args.violator == ViolatorArg::Closure => {
                l0_regress_pairwise(ps.len(), |u, v| ps.dominated_by(u, v), wf)?
            }
            MetricArg::L0 => l0_regress_points(ps, wf)?,
            MetricArg::L1 => l1_regress_points(ps, wf)?,
            MetricArg::L2 => l2_exact_points(ps, wf)?,
            MetricArg::Lp => lp_approx_points(ps, wf, args.p, delta, args.weight_scale)?,
        },
    };
    Ok(Report::from_result(metric_name(args.metric), result))
}

fn oracle(inst: &Instance, args: &SolveArgs) -> Result<Report, Failure> {
    let solver = resolve(inst, args.order)?;
    check_violator_choice(&solver, args.violator)?;
    let metric = to_metric(args.metric, args.p)?;
    let delta = parse_delta(&args.delta)?;
    let wf = &inst.wf;
    let owned;
    let dag: &Dag = match &solver {
        Solver::Chain => {
            owned = Dag::chain(wf.len());
            &owned
        }
        Solver::OverDag(d) => d,
        Solver::OverPoints(ps) => {
            // The search's size guard fires on the vertex count alone, so the
            // pairwise order is only materialized for plausibly small sets.
            let mut edges = Vec::new();
            if ps.len() <= 64 {
                for u in 0..ps.len() {
                    for v in 0..ps.len() {
                        if ps.dominated_by(u, v) {
                            edges.push((u, v));
                        }
                    }
                }
            }
            owned = Dag::new(ps.len(), edges)?;
            &owned
        }
    };
    let (values, error) = oracle_regress(dag, wf, metric, delta)?;
    Ok(Report {
        values: Some(values),
        metric: metric_name(args.metric),
        error,
        diagnostics: Diagnostics::default(),
    })
}

fn violator_report(inst: &Instance, args: &ViolatorArgs) -> Result<String, Failure> {
    let solver = resolve(inst, args.order)?;
    let wf = &inst.wf;
    let vd = match (&solver, args.violator) {
        (Solver::Chain, ViolatorArg::Auto | ViolatorArg::Closure) => {
            violator_closure(&Dag::chain(wf.len()), wf)?
        }
        (Solver::OverDag(dag), ViolatorArg::Auto | ViolatorArg::Closure) => {
            violator_closure(dag, wf)?
        }
        (Solver::OverPoints(ps), ViolatorArg::Auto | ViolatorArg::Rendezvous) => {
            rendezvous_violator(ps, wf)?
        }
        (Solver::OverPoints(ps), ViolatorArg::Closure) => {
            violator_pairwise(ps.len(), |u, v| ps.dominated_by(u, v), wf)?
        }
        (_, ViolatorArg::Rendezvous) => {
            return Err(input_error(
                "the rendezvous construction requires a point or box instance",
            ))
        }
    };
    Ok(match args.format {
        FormatArg::Text => {
            let mut out = String::new();
            if !args.stats {
                for &(u, v) in vd.edges() {
                    out.push_str(&format!("edge {u} {v}\n"));
                }
            }
            out.push_str(&format!("n_hat {}\n", vd.total_vertices()));
            out.push_str(&format!("m_hat {}\n", vd.edges().len()));
            out.push_str(&format!("steiner_count {}\n", vd.steiner_vertices()));
            out
        }
        FormatArg::Json => {
            let mut doc = json!({
                "n_hat": vd.total_vertices(),
                "m_hat": vd.edges().len(),
                "steiner_count": vd.steiner_vertices(),
            });
            if !args.stats {
                doc["edges"] = json!(vd.edges());
            }
            format!("{doc}\n")
        }
    })
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let (inst, label, solve_order) = match &args.input {
        Some(path) => (load(path)?, format!("input={}", path.display()), args.order),
        None => {
            let (inst, label) = generate(args.order, args.seed)?;
            (inst, label, OrderArg::Auto)
        }
    };
    let solve_args = SolveArgs {
        metric: args.metric,
        p: args.p,
        delta: args.delta.clone(),
        order: solve_order,
        violator: args.violator,
        input: PathBuf::new(),
        output: None,
        format: args.format,
        weight_scale: args.weight_scale,
    };
    let start = Instant::now();
    let mut report = solve(&inst, &solve_args)?;
    let elapsed = start.elapsed();
    // Timing goes to stderr so stdout stays byte-deterministic per seed.
    eprintln!(
        "isoreg-bench: {label} metric={} elapsed={elapsed:?}",
        metric_name(args.metric)
    );
    report.values = None;
    emit(&render(&report, args.format), args.output.as_deref())
}

fn generate(order: OrderArg, seed: u64) -> Result<(Instance, String), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match order {
        OrderArg::Auto | OrderArg::Dag => {
            let n = 2000usize;
            let target = 10_000usize;
            let mut edges = HashSet::new();
            while edges.len() < target {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            let dag = Dag::new(n, edges.into_iter().collect())?;
            let wf = WeightedFunction::new(
                (0..n).map(|_| rng.gen_range(0..=1000)).collect(),
                (0..n).map(|_| rng.gen_range(0..=10)).collect(),
            )?;
            Ok((
                Instance {
                    kind: Kind::Dag,
                    wf,
                    payload: Payload::Edges(dag),
                },
                format!("generated=dag n={n} m={target} seed={seed}"),
            ))
        }
        OrderArg::Chain => {
            let n = 200_000usize;
            let wf = WeightedFunction::new(
                (0..n).map(|_| rng.gen_range(0..=1_000_000)).collect(),
                (0..n).map(|_| rng.gen_range(1..=10)).collect(),
            )?;
            Ok((
                Instance {
                    kind: Kind::Chain,
                    wf,
                    payload: Payload::Chain,
                },
                format!("generated=chain n={n} seed={seed}"),
            ))
        }
        OrderArg::Points => {
            let n = 5000usize;
            let d = 3usize;
            let mut seen = HashSet::new();
            let mut coords = Vec::with_capacity(n);
            while coords.len() < n {
                let p: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=65_535)).collect();
                if seen.insert(p.clone()) {
                    coords.push(p);
                }
            }
            let points = PointSet::new(&coords)?;
            let wf = WeightedFunction::new(
                (0..n).map(|_| rng.gen_range(0..=999)).collect(),
                vec![1; n],
            )?;
            Ok((
                Instance {
                    kind: Kind::Points,
                    wf,
                    payload: Payload::Domination(points),
                },
                format!("generated=points n={n} d={d} seed={seed}"),
            ))
        }
        OrderArg::Boxes => {
            let n = 2000usize;
            let d = 2usize;
            let mut seen = HashSet::new();
            let mut lowers = Vec::with_capacity(n);
            let mut uppers = Vec::with_capacity(n);
            while lowers.len() < n {
                let lo: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=999)).collect();
                let hi: Vec<i64> = lo.iter().map(|&x| x + rng.gen_range(0..=99)).collect();
                if seen.insert((lo.clone(), hi.clone())) {
                    lowers.push(lo);
                    uppers.push(hi);
                }
            }
            let points = boxes_to_domination(&lowers, &uppers)?;
            let wf = WeightedFunction::new(
                (0..n).map(|_| rng.gen_range(0..=999)).collect(),
                (0..n).map(|_| rng.gen_range(0..=4)).collect(),
            )?;
            Ok((
                Instance {
                    kind: Kind::Boxes,
                    wf,
                    payload: Payload::Domination(points),
                },
                format!("generated=boxes n={n} d={d} seed={seed}"),
            ))
        }
    }
}

fn error_text(error: &ErrorSum) -> String {
    match error {
        ErrorSum::Exact(r) => format_rat(r),
        ErrorSum::Approx(x) => format!("{x}"),
    }
}

fn render(report: &Report, format: FormatArg) -> String {
    match format {
        FormatArg::Text => render_text(report),
        FormatArg::Json => render_json(report),
    }
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    if let Some(values) = &report.values {
        for (i, v) in values.iter().enumerate() {
            out.push_str(&format!("v {i} {}\n", format_rat(v)));
        }
    }
    out.push_str(&format!(
        "error {} {}\n",
        report.metric,
        error_text(&report.error)
    ));
    let d = &report.diagnostics;
    out.push_str(&format!("# diag pruned_removed={}\n", d.pruned_removed));
    out.push_str(&format!("# diag components={}\n", d.components));
    out.push_str(&format!("# diag subproblems={}\n", d.subproblems));
    out.push_str(&format!("# diag violator_vertices={}\n", d.violator_vertices));
    out.push_str(&format!("# diag violator_edges={}\n", d.violator_edges));
    out.push_str(&format!("# diag steiner_vertices={}\n", d.steiner_vertices));
    if let Some(w) = d.antichain_weight {
        out.push_str(&format!("# diag antichain_weight={w}\n"));
    }
    out
}

fn render_json(report: &Report) -> String {
    let d = &report.diagnostics;
    let error_value = match &report.error {
        ErrorSum::Exact(r) => json!(format_rat(r)),
        ErrorSum::Approx(x) => json!(x),
    };
    let doc = json!({
        "values": report
            .values
            .as_ref()
            .map(|vs| vs.iter().map(format_rat).collect::<Vec<_>>()),
        "error_p_sum": error_value,
        "diagnostics": {
            "pruned_removed": d.pruned_removed,
            "components": d.components,
            "subproblems": d.subproblems,
            "violator_vertices": d.violator_vertices,
            "violator_edges": d.violator_edges,
            "steiner_vertices": d.steiner_vertices,
            "antichain_weight": d.antichain_weight.map(|w| w.to_string()),
        },
    });
    format!("{doc}\n")
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
