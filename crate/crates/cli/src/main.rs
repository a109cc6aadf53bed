//! Command-line scenario runner: emits the scan data as CSV or JSON and runs
//! the invariant suite.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use msqueeze::gaussian::{
    fig3_scan, ment_allocation, msep_allocation, optimal_cv_encoding, cv_squeezing_matrix, simon_check,
    squeezed_vacuum, SqueezedVacuumSpec,
};
use msqueeze::linalg::random::random_passive;
use msqueeze::oracle::OracleBudget;
use msqueeze::spin::{fig2_scan, nonlocal_encoding_scan, twin_fock_moment};
use msqueeze::verify::{run_verify, VerifyConfig, VerifyReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "msqueeze", version, about = "Multiparameter squeezing scenarios and invariant checks")]
struct Cli {
    /// Output file; standard output when omitted.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Output format. Tabular commands default to CSV, the others to JSON.
    #[arg(short, long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Collective versus mode-local one-axis twisting of two spin ensembles.
    Fig2 {
        /// Total particle number, split evenly into two modes.
        #[arg(short = 'n', long, default_value_t = 100)]
        particles: usize,
        #[arg(long, default_value_t = 0.06)]
        chi_t_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Variance ratio of entangled to separable squeezing for averaging M parameters.
    Fig3 {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 5, 10, 100])]
        modes: Vec<usize>,
        #[arg(long, default_value_t = 5.0)]
        r_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Sum and difference encoding on both twisted two-mode states.
    NonlocalEncoding {
        #[arg(short = 'n', long, default_value_t = 100)]
        particles: usize,
        #[arg(long, default_value_t = 0.06)]
        chi_t_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Small-angle moment matrix of twin-Fock states.
    TwinFock {
        #[arg(short = 'n', long, value_delimiter = ',', default_values_t = vec![4usize, 10, 20])]
        particles: Vec<usize>,
        /// Largest rotation angle of the extrapolation sequence.
        #[arg(long, default_value_t = 1e-2)]
        angle: f64,
    },
    /// Squeezed vacuum with uniform squeezing mixed by a random passive network.
    CvDemo {
        #[arg(long, default_value_t = 4)]
        modes: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0, 2.0])]
        squeezing_r: Vec<f64>,
    },
    /// Runs the invariant and oracle suite.
    Verify {
        #[arg(long)]
        random_trials: Option<usize>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        max_qubits: Option<usize>,
        #[arg(long)]
        fock_cutoff: Option<usize>,
        #[arg(long)]
        fig2_points: Option<usize>,
        #[arg(long)]
        mc_trials: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<msqueeze::Error> for Failure {
    fn from(e: msqueeze::Error) -> Self {
        use msqueeze::Error as E;
        match e {
            E::InvalidArgument(_) | E::OddDimension(_) | E::BudgetExceeded(_) | E::DimensionMismatch(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn to_csv(&self) -> Result<Vec<u8>, Failure> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Failure::Runtime(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj = self.header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

enum Output {
    Table(Table),
    Document { table: Table, json: Value },
}

fn linspace(max: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if points < 2 || !(max > 0.0) || !max.is_finite() {
        return Err(Failure::Config(format!("need at least two points and a positive range, got {points} up to {max}")));
    }
    Ok((0..points).map(|i| max * i as f64 / (points - 1) as f64).collect())
}

fn even_particles(n: usize) -> Result<(), Failure> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Failure::Config(format!("particle number must be even and at least 2, got {n}")));
    }
    Ok(())
}

fn fig2(particles: usize, chi_t_max: f64, points: usize) -> Result<Output, Failure> {
    even_particles(particles)?;
    let rows = fig2_scan(particles, &linspace(chi_t_max, points)?)?;
    let mut t = Table::new(vec![
        "chi_t",
        "gain_sum_nonlocal_db",
        "gain_diff_nonlocal_db",
        "gain_local_db",
        "gain_avg_nonlocal_db",
        "mean_spin_1",
        "mean_spin_2",
    ]);
    for r in rows {
        t.rows.push(
            [r.chi_t, r.gain_sum_nonlocal_db, r.gain_diff_nonlocal_db, r.gain_local_db, r.gain_avg_nonlocal_db, r.mean_spin[0], r.mean_spin[1]]
                .into_iter()
                .map(Cell::Num)
                .collect(),
        );
    }
    Ok(Output::Table(t))
}

fn fig3(modes: &[usize], r_max: f64, points: usize) -> Result<Output, Failure> {
    let grid = linspace(r_max, points)?;
    let mut t = Table::new(vec!["M", "r", "ratio", "approx_small_r", "approx_large_r"]);
    for &m in modes {
        for row in fig3_scan(m, &grid)? {
            t.rows.push(vec![
                Cell::Int(m as u64),
                Cell::Num(row.r),
                Cell::Num(row.ratio),
                Cell::Num(row.approx_small_r),
                Cell::Num(row.approx_large_r),
            ]);
        }
    }
    Ok(Output::Table(t))
}

fn nonlocal_encoding(particles: usize, chi_t_max: f64, points: usize) -> Result<Output, Failure> {
    even_particles(particles)?;
    let rows = nonlocal_encoding_scan(particles, &linspace(chi_t_max, points)?)?;
    let mut t = Table::new(vec!["chi_t", "gain_plus_nl_db", "gain_minus_nl_db", "gain_plus_loc_db", "gain_minus_loc_db"]);
    for r in rows {
        let pair = |e: &Option<msqueeze::spin::NonlocalEncoding>| match e {
            Some(e) => (e.gain_plus_db(), e.gain_minus_db()),
            None => (f64::NAN, f64::NAN),
        };
        let (nlp, nlm) = pair(&r.nonlocal);
        let (lp, lm) = pair(&r.local);
        t.rows.push([r.chi_t, nlp, nlm, lp, lm].into_iter().map(Cell::Num).collect());
    }
    Ok(Output::Table(t))
}

fn matrix_json(m: &msqueeze::linalg::RealSymMatrix) -> Value {
    let d = m.dim();
    json!((0..d).map(|i| (0..d).map(|j| m[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn twin_fock(particles: &[usize], angle: f64) -> Result<Output, Failure> {
    let mut t = Table::new(vec![
        "N",
        "analytic",
        "moment_xx",
        "moment_xy",
        "moment_yy",
        "fisher_xx",
        "fisher_xy",
        "fisher_yy",
        "relative_deviation",
        "fisher_deviation",
    ]);
    let mut docs = Vec::new();
    for &n in particles {
        let rep = twin_fock_moment(n, [angle, angle])?;
        let (m, f) = (&rep.extrapolated, &rep.quantum_fisher);
        t.rows.push(vec![
            Cell::Int(n as u64),
            Cell::Num(rep.analytic),
            Cell::Num(m[(0, 0)]),
            Cell::Num(m[(0, 1)]),
            Cell::Num(m[(1, 1)]),
            Cell::Num(f[(0, 0)]),
            Cell::Num(f[(0, 1)]),
            Cell::Num(f[(1, 1)]),
            Cell::Num(rep.relative_deviation),
            Cell::Num(rep.fisher_deviation),
        ]);
        docs.push(json!({
            "N": n,
            "analytic": rep.analytic,
            "moment": matrix_json(m),
            "quantum_fisher": matrix_json(f),
            "relative_deviation": rep.relative_deviation,
            "fisher_deviation": rep.fisher_deviation,
            "commutator_norm": rep.commutator_norm,
            "diagnostics": rep.diagnostics.iter().map(|d| format!("{d:?}")).collect::<Vec<_>>(),
        }));
    }
    Ok(Output::Document { table: t, json: Value::Array(docs) })
}

fn cv_demo(modes: usize, squeezing: &[f64], seed: u64) -> Result<Output, Failure> {
    if modes == 0 {
        return Err(Failure::Config("need at least one mode".into()));
    }
    if squeezing.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Failure::Config("squeezing parameters must be finite and non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mixer = random_passive(modes, &mut rng);
    let mut t = Table::new(vec![
        "M",
        "r",
        "photons",
        "lambda_min",
        "simon_squeezed",
        "min_xi2",
        "shot_noise_rank",
        "variance_msep",
        "variance_ment",
        "ratio",
    ]);
    let uniform = vec![1.0 / (modes as f64).sqrt(); modes];
    for &r in squeezing {
        let state = squeezed_vacuum(&SqueezedVacuumSpec::new(vec![r; modes], mixer.clone())?)?;
        let simon = simon_check(&state)?;
        let report = cv_squeezing_matrix(&state, &optimal_cv_encoding(&state)?)?;
        let photons = modes as f64 * r.sinh().powi(2);
        let (sep, ent) = if photons > 0.0 {
            (msep_allocation(&uniform, photons, 1e-15)?.variance, ment_allocation(photons)?.1)
        } else {
            (1.0, 1.0)
        };
        t.rows.push(vec![
            Cell::Int(modes as u64),
            Cell::Num(r),
            Cell::Num(photons),
            Cell::Num(simon.lambda_min),
            Cell::Flag(simon.squeezed),
            Cell::Num(report.eigenvalues.min()),
            Cell::Int(report.shot_noise_rank as u64),
            Cell::Num(sep),
            Cell::Num(ent),
            Cell::Num(ent / sep),
        ]);
    }
    Ok(Output::Table(t))
}

fn verify_output(report: &VerifyReport) -> Output {
    let mut t = Table::new(vec!["property", "check", "residual", "tolerance", "passed"]);
    let mut props = Vec::new();
    for p in &report.properties {
        for c in &p.checks {
            t.rows.push(vec![
                Cell::Text(p.id.to_string()),
                Cell::Text(c.name.clone()),
                Cell::Num(c.residual),
                Cell::Num(c.tolerance),
                Cell::Flag(c.passed),
            ]);
        }
        props.push(json!({
            "id": p.id,
            "title": p.title,
            "passed": p.passed(),
            "seconds": p.seconds,
            "error": p.error,
            "checks": p.checks.iter().map(|c| json!({
                "property": c.name,
                "tolerance": c.tolerance,
                "residual": c.residual,
                "passed": c.passed,
            })).collect::<Vec<_>>(),
        }));
    }
    Output::Document { table: t, json: json!({ "passed": report.passed(), "properties": props }) }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("MSQUEEZE_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Config(format!("MSQUEEZE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Runtime(e.to_string()))
}

fn emit(out: Output, format: Format, path: Option<&PathBuf>) -> Result<(), Failure> {
    let bytes = match (out, format) {
        (Output::Table(t) | Output::Document { table: t, .. }, Format::Csv) => t.to_csv()?,
        (Output::Table(t), Format::Json) => json_bytes(&t.to_json())?,
        (Output::Document { json, .. }, Format::Json) => json_bytes(&json)?,
    };
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    match path {
        Some(p) => fs::write(p, bytes).map_err(io),
        None => std::io::stdout().write_all(&bytes).map_err(io),
    }
}

fn json_bytes(v: &Value) -> Result<Vec<u8>, Failure> {
    let mut b = serde_json::to_vec_pretty(v).map_err(|e| Failure::Runtime(e.to_string()))?;
    b.push(b'\n');
    Ok(b)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_threads()?;
    let (out, default_format, passed) = match cli.command {
        Command::Fig2 { particles, chi_t_max, points } => (fig2(particles, chi_t_max, points)?, Format::Csv, true),
        Command::Fig3 { modes, r_max, points } => (fig3(&modes, r_max, points)?, Format::Csv, true),
        Command::NonlocalEncoding { particles, chi_t_max, points } => {
            (nonlocal_encoding(particles, chi_t_max, points)?, Format::Csv, true)
        }
        Command::TwinFock { particles, angle } => (twin_fock(&particles, angle)?, Format::Json, true),
        Command::CvDemo { modes, squeezing_r } => (cv_demo(modes, &squeezing_r, cli.seed)?, Format::Csv, true),
        Command::Verify { random_trials, grid_points, max_qubits, fock_cutoff, fig2_points, mc_trials } => {
            let defaults = VerifyConfig::default();
            let b = OracleBudget::default();
            let cfg = VerifyConfig {
                budget: OracleBudget {
                    max_qubits: max_qubits.unwrap_or(b.max_qubits),
                    fock_cutoff: fock_cutoff.unwrap_or(b.fock_cutoff),
                    grid_points: grid_points.unwrap_or(b.grid_points),
                    random_trials: random_trials.unwrap_or(b.random_trials),
                    seed: cli.seed,
                },
                fig2_points: fig2_points.unwrap_or(defaults.fig2_points),
                mc_trials: mc_trials.unwrap_or(defaults.mc_trials),
                ..defaults
            };
            let report = run_verify(&cfg)?;
            let passed = report.passed();
            (verify_output(&report), Format::Json, passed)
        }
    };
    emit(out, cli.format.unwrap_or(default_format), cli.output.as_ref())?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
