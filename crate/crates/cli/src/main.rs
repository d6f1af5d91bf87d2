use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use cset_transport::cset::{find_homomorphism, validate_instance, EnumerationGuard};
use cset_transport::hausdorff::{hausdorff_distance, ComponentClass, Symmetrize};
use cset_transport::json::{
    ext_to_json, instance_from_str, joint_to_json, kernel_from_json, markov_to_json, measure_from_json,
    metric_from_json, transformation_to_json,
};
use cset_transport::lp::export_lp;
use cset_transport::relax::{
    markov_feasibility_lp, markov_feasible, relaxation_gap, wasserstein_cset_distance, wasserstein_cset_lp,
    WassersteinClass,
};
use cset_transport::transport::{optimal_coupling, wasserstein_kernels};
use cset_transport::{builtins, Error, ExtReal, HausdorffConfig, Instance, Order, Theory};

const SCHEMA: &str = "cset-transport/1";

#[derive(Parser)]
#[command(name = "cset-transport", version, about = "Homomorphisms and transport distances between finite C-sets")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance JSON file or a theory source file.
    Validate { input: String },
    /// Find a homomorphism X -> Y.
    Hom { x: String, y: String },
    /// Decide whether a Markov morphism X -> Y exists.
    MarkovFeasible {
        x: String,
        y: String,
        #[arg(long)]
        measure_preserving: bool,
    },
    /// Hausdorff distance between two instances, or the distance matrix of a corpus.
    Hausdorff {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<String>,
        #[command(flatten)]
        opts: HausdorffOpts,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Wasserstein distance between two instances, or the distance matrix of a corpus.
    Wasserstein {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<String>,
        /// Order p (finite).
        #[arg(long, default_value = "1", value_parser = parse_order)]
        p: Order,
        /// mm: short Markov kernels; noshort: arbitrary kernels.
        #[arg(long, default_value = "mm", value_parser = parse_wclass)]
        class: WassersteinClass,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Wasserstein and Hausdorff distances side by side; checks d_W <= d_H.
    Gap {
        x: String,
        y: String,
        #[command(flatten)]
        opts: HausdorffOpts,
    },
    /// Optimal transport between two measures: {"mu": [..], "nu": [..], "metric": [[..]]}.
    Ot {
        problem: String,
        #[arg(long, default_value = "1", value_parser = parse_order)]
        p: Order,
    },
    /// Wasserstein distance between kernels: {"m": K, "n": K, "mu": [..], "metric": [[..]]}.
    Wk {
        problem: String,
        #[arg(long, default_value = "1", value_parser = parse_order)]
        p: Order,
    },
    /// Write the linear program for a problem in LP text format.
    ExportLp {
        x: String,
        y: String,
        #[arg(long, value_enum, default_value = "feasibility")]
        problem: Problem,
        #[arg(long, default_value = "1", value_parser = parse_order)]
        p: Order,
        #[arg(long, default_value = "mm", value_parser = parse_wclass)]
        class: WassersteinClass,
        #[arg(long)]
        measure_preserving: bool,
        /// Write to a file instead of standard output.
        #[arg(short, long)]
        output: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Feasibility,
    Wasserstein,
}

#[derive(Args)]
struct HausdorffOpts {
    /// Order p: a number >= 1 or `inf`.
    #[arg(long, default_value = "1", value_parser = parse_order)]
    p: Order,
    /// met: short maps; mm: short and measure-decreasing; md: measure-decreasing; all: any maps.
    #[arg(long, default_value = "mm", value_parser = parse_class)]
    class: ComponentClass,
    #[arg(long, default_value = "none", value_parser = parse_symmetrize)]
    symmetrize: Symmetrize,
    /// Maximum number of candidate transformations.
    #[arg(long, default_value_t = cset_transport::cset::DEFAULT_GUARD)]
    guard: u64,
    /// Enumerate even when the guard is exceeded.
    #[arg(long)]
    force: bool,
}

impl HausdorffOpts {
    fn config(&self) -> HausdorffConfig {
        let mut cfg = HausdorffConfig::new(self.p, self.class);
        cfg.symmetrize = self.symmetrize;
        cfg.guard = if self.force { EnumerationGuard::forced() } else { EnumerationGuard::new(self.guard) };
        cfg
    }
}

#[derive(Args)]
struct Jobs {
    /// Worker threads for distance matrices (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn parse_order(s: &str) -> Result<Order, String> {
    s.parse::<Order>().map_err(|e| e.to_string())
}

fn parse_class(s: &str) -> Result<ComponentClass, String> {
    s.parse()
}

fn parse_wclass(s: &str) -> Result<WassersteinClass, String> {
    s.parse()
}

fn parse_symmetrize(s: &str) -> Result<Symmetrize, String> {
    s.parse()
}

enum Failure {
    /// Unreadable or malformed input: exit 2.
    Parse(String),
    /// The computation itself failed: exit 1.
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(_) | Error::Theory(_) => Failure::Parse(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_input(spec: &str) -> CliResult<String> {
    match spec.strip_prefix("builtin:") {
        Some(name) => builtins::source(name).map(str::to_string).ok_or_else(|| {
            let known: Vec<_> = builtins::names().collect();
            Failure::Parse(format!("no builtin instance `{name}` (known: {})", known.join(", ")))
        }),
        None => fs::read_to_string(spec).map_err(|e| Failure::Parse(format!("{spec}: {e}"))),
    }
}

fn load(spec: &str) -> CliResult<Instance> {
    instance_from_str(&read_input(spec)?).map_err(|e| match Failure::from(e) {
        Failure::Parse(m) => Failure::Parse(format!("{spec}: {m}")),
        Failure::Domain(m) => Failure::Domain(format!("{spec}: {m}")),
    })
}

fn load_json(spec: &str) -> CliResult<Value> {
    serde_json::from_str(&read_input(spec)?).map_err(|e| Failure::Parse(format!("{spec}: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| Failure::Parse(format!("missing field `{key}`")))
}

/// What a command prints: lines of text, or a JSON object.
struct Output {
    text: Vec<String>,
    json: Map<String, Value>,
}

impl Output {
    fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("schema".into(), json!(SCHEMA));
        json.insert("command".into(), json!(command));
        Output { text: Vec::new(), json }
    }

    fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.text.push(s.into());
        self
    }

    fn set(&mut self, key: &str, v: Value) -> &mut Self {
        self.json.insert(key.into(), v);
        self
    }

    fn render(self, format: Format) -> String {
        match format {
            Format::Text => self.text.iter().map(|l| format!("{l}\n")).collect(),
            Format::Json => format!("{}\n", Value::Object(self.json)),
        }
    }
}

fn matrix<F>(inputs: &[String], jobs: usize, f: F) -> CliResult<Vec<Vec<ExtReal>>>
where
    F: Fn(&Instance, &Instance) -> Result<ExtReal, Error> + Sync,
{
    let xs = inputs.iter().map(|s| load(s)).collect::<CliResult<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let n = xs.len();
    let cells: Vec<Result<ExtReal, Error>> =
        pool.install(|| (0..n * n).into_par_iter().map(|k| f(&xs[k / n], &xs[k % n])).collect());
    let mut out = vec![Vec::with_capacity(n); n];
    for (k, c) in cells.into_iter().enumerate() {
        out[k / n].push(c?);
    }
    Ok(out)
}

fn matrix_output(out: &mut Output, inputs: &[String], m: &[Vec<ExtReal>]) {
    for row in m {
        out.line(row.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\t"));
    }
    out.set("inputs", json!(inputs));
    out.set("matrix", Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|d| ext_to_json(*d)).collect())).collect()));
}

fn run(cli: &Cli) -> CliResult<String> {
    let mut out;
    match &cli.command {
        Command::Validate { input } => {
            out = Output::new("validate");
            let text = read_input(input)?;
            if text.trim_start().starts_with('{') {
                let x: Instance = instance_from_str(&text)?;
                validate_instance(&x)?;
                out.set("kind", json!("instance")).set("theory", json!(x.theory().name()));
            } else {
                let t = Theory::parse(&text).map_err(|e| Failure::Parse(e.to_string()))?;
                out.set("kind", json!("theory")).set("theory", json!(t.name()));
            }
            out.line("ok").set("valid", json!(true));
        }
        Command::Hom { x, y } => {
            out = Output::new("hom");
            let (x, y) = (load(x)?, load(y)?);
            match find_homomorphism(&x, &y)? {
                Some(t) => {
                    let tj = transformation_to_json(x.theory(), &t);
                    out.line("found").line(tj.to_string()).set("found", json!(true)).set("transformation", tj);
                }
                None => {
                    out.line("none").set("found", json!(false)).set("transformation", Value::Null);
                }
            }
        }
        Command::MarkovFeasible { x, y, measure_preserving } => {
            out = Output::new("markov-feasible");
            let (x, y) = (load(x)?, load(y)?);
            match markov_feasible(&x, &y, *measure_preserving)? {
                Some(phi) => {
                    let pj = markov_to_json(x.theory(), &phi);
                    out.line("feasible").line(pj.to_string()).set("feasible", json!(true)).set("certificate", pj);
                }
                None => {
                    out.line("infeasible").set("feasible", json!(false)).set("certificate", Value::Null);
                }
            }
        }
        Command::Hausdorff { inputs, opts, jobs } => {
            out = Output::new("hausdorff");
            let cfg = opts.config();
            out.set("p", json!(opts.p.to_string())).set("class", json!(opts.class.to_string()));
            if inputs.len() > 2 {
                let m = matrix(inputs, jobs.jobs, |x, y| Ok(hausdorff_distance(x, y, &cfg)?.distance))?;
                matrix_output(&mut out, inputs, &m);
            } else {
                let (x, y) = (load(&inputs[0])?, load(&inputs[1])?);
                let r = hausdorff_distance(&x, &y, &cfg)?;
                out.line(r.distance.to_string()).set("distance", ext_to_json(r.distance));
                if let Some((a, b)) = r.directed {
                    out.line(format!("directed {a} {b}")).set("directed", json!([ext_to_json(a), ext_to_json(b)]));
                }
                match &r.witness {
                    Some(t) => {
                        let tj = transformation_to_json(x.theory(), t);
                        out.line(format!("witness {tj}")).set("witness", tj);
                    }
                    None => {
                        out.set("witness", Value::Null);
                    }
                }
                let mut weights = Map::new();
                for (g, w) in &r.per_generator_weights {
                    out.line(format!("weight {g} {w}"));
                    weights.insert(g.clone(), ext_to_json(*w));
                }
                out.set("weights", Value::Object(weights));
            }
        }
        Command::Wasserstein { inputs, p, class, jobs } => {
            out = Output::new("wasserstein");
            out.set("p", json!(p.to_string())).set("class", json!(class.to_string()));
            if inputs.len() > 2 {
                let m = matrix(inputs, jobs.jobs, |x, y| Ok(wasserstein_cset_distance(x, y, *p, *class)?.distance))?;
                matrix_output(&mut out, inputs, &m);
            } else {
                let (x, y) = (load(&inputs[0])?, load(&inputs[1])?);
                let r = wasserstein_cset_distance(&x, &y, *p, *class)?;
                out.line(r.distance.to_string()).set("distance", ext_to_json(r.distance));
                match &r.transformation {
                    Some(phi) => {
                        let pj = markov_to_json(x.theory(), phi);
                        out.line(format!("certificate {pj}")).set("certificate", pj);
                    }
                    None => {
                        out.set("certificate", Value::Null);
                    }
                }
            }
        }
        Command::Gap { x, y, opts } => {
            out = Output::new("gap");
            let (x, y) = (load(x)?, load(y)?);
            let (w, h) = relaxation_gap(&x, &y, opts.p, &opts.config())?;
            out.line(format!("{w} {h}"))
                .set("p", json!(opts.p.to_string()))
                .set("class", json!(opts.class.to_string()))
                .set("wasserstein", ext_to_json(w))
                .set("hausdorff", ext_to_json(h));
        }
        Command::Ot { problem, p } => {
            out = Output::new("ot");
            let v = load_json(problem)?;
            let mu = measure_from_json(field(&v, "mu")?)?;
            let nu = measure_from_json(field(&v, "nu")?)?;
            let d = metric_from_json(field(&v, "metric")?)?;
            let pf = p.finite().ok_or_else(|| Failure::Domain("ot needs a finite order p".into()))?;
            if d.len() != mu.len() || d.len() != nu.len() {
                return Err(Failure::Domain("metric size must match both measures".into()));
            }
            let r = optimal_coupling(&mu, &nu, &d.powf(pf))?;
            let cost = r.cost.root(pf);
            out.line(cost.to_string()).set("p", json!(p.to_string())).set("distance", ext_to_json(cost));
            match &r.coupling {
                Some(pi) => {
                    let pj = joint_to_json(pi);
                    out.line(format!("coupling {pj}")).set("coupling", pj);
                }
                None => {
                    out.set("coupling", Value::Null);
                }
            }
        }
        Command::Wk { problem, p } => {
            out = Output::new("wk");
            let v = load_json(problem)?;
            let m = kernel_from_json(field(&v, "m")?)?;
            let n = kernel_from_json(field(&v, "n")?)?;
            let mu = measure_from_json(field(&v, "mu")?)?;
            let d = metric_from_json(field(&v, "metric")?)?;
            let r = wasserstein_kernels(&m, &n, &mu, &d, *p)?;
            let couplings: Vec<Value> = r.row_couplings.iter().map(|c| c.as_ref().map_or(Value::Null, joint_to_json)).collect();
            out.line(r.cost.to_string())
                .set("p", json!(p.to_string()))
                .set("distance", ext_to_json(r.cost))
                .set("row_couplings", Value::Array(couplings));
        }
        Command::ExportLp { x, y, problem, p, class, measure_preserving, output } => {
            let (x, y) = (load(x)?, load(y)?);
            let text = match problem {
                Problem::Feasibility => export_lp(&markov_feasibility_lp(&x, &y, *measure_preserving)?.model),
                Problem::Wasserstein => export_lp(&wasserstein_cset_lp(&x, &y, *p, *class)?.model),
            };
            out = Output::new("export-lp");
            match output {
                Some(path) => {
                    fs::write(path, &text).map_err(|e| Failure::Domain(format!("{path}: {e}")))?;
                    out.line(format!("wrote {path}")).set("path", json!(path));
                }
                None => {
                    if cli.format == Format::Text {
                        return Ok(text);
                    }
                    out.set("lp", json!(text));
                }
            }
        }
    }
    Ok(out.render(cli.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(s) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(s.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
