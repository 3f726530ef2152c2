use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use feynkit::cs;
use feynkit::gaugefix::{self, OrbitIntegrand, QuadConfig, RadialIntegrand};
use feynkit::gauss::SymmetricForm;
use feynkit::grassmann::{berezin_integral, berezin_iterated, grassmann_exp, GrassmannPolynomial};
use feynkit::jacobi::JacobiQuotient;
use feynkit::knot::{self, PolygonalLink};
use feynkit::linalg::determinant;
use feynkit::mc::McConfig;
use feynkit::perturb::{self, GraphFilter, Potential};
use feynkit::rational::square_matrix_from_json;
use feynkit::selftest;
use feynkit::wick::{self, MomentRequest};
use feynkit::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "feynkit", version, about = "Feynman diagram calculus and configuration-space knot integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct McArgs {
    /// Monte Carlo sample count (accepts forms like 2e7)
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Single sample stream, no threads
    #[arg(long)]
    deterministic: bool,
}

impl McArgs {
    fn config(&self) -> McConfig {
        let mut c = McConfig::new(self.samples, self.seed);
        if let Some(t) = self.threads {
            c = c.with_threads(t);
        }
        if self.deterministic {
            c = c.deterministic();
        }
        c
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Exact Gaussian moment <x^i1 ... x^im>
    Wick {
        /// Matrix JSON file or inline JSON
        #[arg(long)]
        matrix: String,
        /// One-based indices, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
        /// Also run a Monte Carlo check with this many samples
        #[arg(long, value_parser = parse_count)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Graph expansion of the normalised correlator (or partition function without legs)
    Expand {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        potential: String,
        /// One-based leg indices, comma separated
        #[arg(long, value_delimiter = ',')]
        legs: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Free energy as the sum over connected vacuum graphs
    Freeenergy {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        potential: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Berezin integral of exp(<c̄, Λ c>)
    Berezin {
        #[arg(long)]
        matrix: String,
    },
    /// Gauge-fixed integrals for the rotation and C^2 examples
    Gaugefix {
        /// rotation or cstar
        #[arg(long, default_value = "rotation")]
        example: String,
        #[arg(long, default_value = "gaussian")]
        integrand: String,
        #[arg(long, default_value_t = 1)]
        alpha: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025])]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Gauss linking integral of two components
    Lk {
        /// Link JSON file or a built-in name
        #[arg(long)]
        link: String,
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1])]
        components: Vec<usize>,
        #[command(flatten)]
        #[serde(flatten)]
        mc: McArgs,
    },
    /// Framed self-linking integral
    Slk {
        #[arg(long)]
        link: String,
        #[arg(long, default_value_t = 0)]
        component: usize,
        /// Push-off distance (default: a quarter of the smallest feature)
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        #[serde(flatten)]
        mc: McArgs,
    },
    /// Degree-two knot invariant W_X/4 + W_Y/3
    V2 {
        #[arg(long)]
        link: String,
        #[arg(long, default_value_t = 1e-4)]
        delta_cut: f64,
        #[command(flatten)]
        #[serde(flatten)]
        mc: McArgs,
    },
    /// Jacobi diagram space modulo AS, STU and IHX
    Jacobi {
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        circles: usize,
        /// Also drop diagrams with an isolated chord
        #[arg(long)]
        one_term: bool,
    },
    /// Run the oracle comparison suite (sample cap from FEYNKIT_SELFTEST_BUDGET)
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e18 => Ok(x as u64),
        _ => Err(format!("not a sample count: {s}")),
    }
}

fn load_json(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { std::fs::read_to_string(arg)? };
    Ok(serde_json::from_str(&text)?)
}

fn load_link(arg: &str) -> Result<PolygonalLink> {
    if Path::new(arg).is_file() {
        PolygonalLink::from_json(&load_json(arg)?)
    } else {
        knot::builtin(arg)
    }
}

/// Returns the result payload and a one-line summary.
fn execute(cmd: &Command) -> Result<(Value, String)> {
    match cmd {
        Command::Wick { matrix, indices, samples, seed } => {
            let a = SymmetricForm::from_json(&load_json(matrix)?)?;
            let req = MomentRequest::new(indices.clone());
            let value = wick::moment(&a, &req)?;
            let recursion = wick::moment_via_recursion(&a, &req)?;
            let mc = match samples {
                Some(n) if *n > 0 => Some(wick::moment_oracle_numeric(&a, &req, &McConfig::new(*n, *seed))?),
                _ => None,
            };
            let summary = format!("moment = {value}");
            Ok((
                json!({
                    "value": value.to_string(),
                    "pairings": wick::pairing_count(indices.len()).to_string(),
                    "recursion_agrees": value == recursion,
                    "monte_carlo": mc,
                }),
                summary,
            ))
        }
        Command::Expand { matrix, potential, legs, order } => {
            let a = SymmetricForm::from_json(&load_json(matrix)?)?;
            let u = Potential::from_json(&load_json(potential)?)?;
            let filter = if legs.is_empty() { GraphFilter::All } else { GraphFilter::NonVacuum };
            let mut catalog = Default::default();
            let exp = perturb::graph_expansion(&a, &u, legs, *order, filter, &mut catalog)?;
            let direct = if legs.is_empty() {
                perturb::partition_series_direct(&a, &u, *order)?
            } else {
                perturb::correlator_series_direct(&a, &u, legs, *order)?
            };
            let summary = format!("series = {}", exp.series);
            Ok((
                json!({
                    "series": exp.series.to_json(),
                    "direct_series": direct.to_json(),
                    "agrees_with_direct": exp.series == direct,
                    "graphs": exp.terms,
                }),
                summary,
            ))
        }
        Command::Freeenergy { matrix, potential, order } => {
            let a = SymmetricForm::from_json(&load_json(matrix)?)?;
            let u = Potential::from_json(&load_json(potential)?)?;
            let f = perturb::free_energy_series(&a, &u, *order)?;
            let c = perturb::connected_vacuum_series(&a, &u, *order)?;
            let summary = format!("free energy = {f}");
            Ok((json!({ "free_energy": f.to_json(), "connected_sum": c.to_json(), "agrees": f == c }), summary))
        }
        Command::Berezin { matrix } => {
            let lambda = square_matrix_from_json(&load_json(matrix)?)?;
            let integrand = grassmann_exp(&GrassmannPolynomial::bilinear(&lambda))?;
            let value = berezin_integral(&integrand);
            let det = determinant(&lambda);
            let summary = format!("integral = {value}, det = {det}");
            Ok((
                json!({
                    "value": value.to_string(),
                    "determinant": det.to_string(),
                    "agrees": value == det,
                    "iterated_order_value": berezin_iterated(&integrand).to_string(),
                }),
                summary,
            ))
        }
        Command::Gaugefix { example, integrand, alpha, epsilons, tol } => {
            let cfg = QuadConfig { epsilons: epsilons.clone(), tol: *tol, ..QuadConfig::default() };
            let (report, forms) = match example.as_str() {
                "rotation" => (gaugefix::rotation_example(RadialIntegrand::parse(integrand)?, &cfg)?, Value::Null),
                "cstar" => (
                    gaugefix::cstar_gauge_fixed(*alpha, OrbitIntegrand::parse(integrand)?, &cfg)?,
                    serde_json::to_value(gaugefix::quadratic_form_check())?,
                ),
                other => return Err(Error::Parse(format!("unknown example {other:?}; use rotation or cstar"))),
            };
            let summary = format!("Z_GF = {:.8} (direct {:.8}, rel diff {:.2e})", report.value, report.direct_value, report.rel_diff);
            let mut v = serde_json::to_value(&report)?;
            v["quadratic_forms"] = forms;
            Ok((v, summary))
        }
        Command::Lk { link, components, mc } => {
            let l = load_link(link)?;
            let [i, j] = components[..] else {
                return Err(Error::Parse("--components takes exactly two indices".into()));
            };
            let est = cs::linking_integral(&l, i, j, &mc.config())?;
            let exact = cs::linking_integral_exact(&l, i, j)?;
            let oracle = knot::combinatorial_linking(&l, i, j, mc.seed)?;
            let summary = format!("lk ≈ {:.5} ± {:.5} (crossings: {oracle})", est.value, est.std_error);
            Ok((
                json!({
                    "value": est.value,
                    "std_error": est.std_error,
                    "samples": est.samples,
                    "rounded": est.value.round() as i64,
                    "segment_sum": exact,
                    "oracle": oracle,
                    "abs_error": (est.value - oracle as f64).abs(),
                }),
                summary,
            ))
        }
        Command::Slk { link, component, eps, mc } => {
            let l = load_link(link)?;
            let eps = match eps {
                Some(e) => *e,
                None => knot::default_pushoff_eps(&l, *component)?,
            };
            let est = cs::self_linking_integral(&l, *component, eps, &mc.config())?;
            let oracle = knot::writhe_pushoff_selflinking(&l, *component)?;
            let summary = format!("self-linking ≈ {:.5} ± {:.5} (push-off count: {oracle})", est.value, est.std_error);
            Ok((
                json!({
                    "value": est.value,
                    "std_error": est.std_error,
                    "samples": est.samples,
                    "rounded": est.value.round() as i64,
                    "eps": eps,
                    "oracle": oracle,
                    "abs_error": (est.value - oracle as f64).abs(),
                }),
                summary,
            ))
        }
        Command::V2 { link, delta_cut, mc } => {
            let l = load_link(link)?;
            let est = cs::v2_integral(&l, &mc.config(), *delta_cut)?;
            let oracle = knot::conway_a2(&l, 0, mc.seed)?;
            let summary =
                format!("v2 ≈ {:.5} ± {:.5} (a2 = {oracle}, W_X/4 = {:.5}, W_Y/3 = {:.5})", est.v2.value, est.v2.std_error, est.wx_quarter.value.value, est.wy_third.value.value);
            Ok((
                json!({
                    "value": est.v2.value,
                    "std_error": est.v2.std_error,
                    "samples": est.v2.samples,
                    "rounded": est.v2.value.round() as i64,
                    "oracle": oracle,
                    "offset_from_oracle": est.v2.value - oracle as f64,
                    "wx_quarter": est.wx_quarter,
                    "wy_third": est.wy_third,
                }),
                summary,
            ))
        }
        Command::Jacobi { degree, circles, one_term } => {
            let q = JacobiQuotient::new(*degree, *circles, *one_term)?;
            let summary = format!("dim = {} ({} diagrams, {} relations)", q.dimension(), q.relations.columns.len(), q.relations.rows.len());
            Ok((q.to_json(), summary))
        }
        Command::Selftest { seed } => {
            let budget = match std::env::var("FEYNKIT_SELFTEST_BUDGET") {
                Ok(s) => parse_count(&s).map_err(Error::Parse)?,
                Err(_) => selftest::DEFAULT_BUDGET,
            };
            let checks = selftest::run(budget, *seed);
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            let summary = format!("{} checks, {} failed {:?}", checks.len(), failed.len(), failed);
            if !failed.is_empty() {
                eprintln!("{}", serde_json::to_string_pretty(&checks)?);
                return Err(Error::Divergent(format!("selftest failures: {}", failed.join(", "))));
            }
            Ok((json!({ "budget": budget, "checks": checks }), summary))
        }
    }
}

fn command_name(cmd: &Command) -> String {
    match serde_json::to_value(cmd) {
        Ok(Value::Object(m)) => m.keys().next().cloned().unwrap_or_default(),
        _ => String::new(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = command_name(&cli.command);
    let start = Instant::now();
    match execute(&cli.command) {
        Ok((result, summary)) => {
            let inputs = serde_json::to_value(&cli.command).ok().and_then(|v| v.get(&name).cloned());
            let report = json!({
                "subcommand": name,
                "seed": inputs.as_ref().and_then(|v| v.get("seed")).cloned(),
                "inputs": inputs,
                "result": result,
                "wall_time_s": start.elapsed().as_secs_f64(),
                "metadata": { "hbar": "1/(k + h)", "level": Value::Null, "note": "nominal; not an input of any computation" },
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
            eprintln!("{name}: {summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{name}: error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
