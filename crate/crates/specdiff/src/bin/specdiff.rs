use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use specdiff::{
    agglomerate, calibrate_sigma_h0, confidence_interval_d2_from_grids, coupled_innovations,
    dedupe_labels, distance_matrix, equality_test_from_grids, export_dendrogram, load_csv,
    matrix_to_csv, normality_diagnostic, precise_test_from_grids, prepare_comparison,
    replication_rng, run_table1, save_series_csv, simulate, ComparisonGrids, CouplingSpec,
    Linkage, ModelSpec, TestResult, TreeFormat,
};

/// Spectral-density comparison, distance and clustering for stationary
/// time series of unequal lengths.
#[derive(Parser)]
#[command(name = "specdiff", version, about)]
struct Cli {
    /// Cap the worker thread count (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether two series share one spectral density.
    Compare {
        /// CSV file of the first series.
        a: PathBuf,
        /// CSV file of the second series.
        b: PathBuf,
        /// Test level in (0,1).
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Also run the precise-hypothesis test at this tolerance;
        /// rejection then AFFIRMS similarity.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Skip mean-centering (both series are centered by default).
        #[arg(long)]
        no_center: bool,
        /// Emit one JSON object per test instead of the text report.
        #[arg(long)]
        json: bool,
        /// Column to read from each CSV (0-based index or header name).
        #[arg(long)]
        column: Option<String>,
    },
    /// Cluster two or more series by pairwise spectral distance.
    Cluster {
        /// CSV files, one series each.
        #[arg(num_args = 2.., required = true)]
        files: Vec<PathBuf>,
        /// Merge rule: average, complete or single.
        #[arg(long, default_value = "average")]
        linkage: String,
        /// Dendrogram encoding: newick or json.
        #[arg(long, default_value = "newick")]
        format: String,
        /// Also write the pairwise distance matrix as CSV.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
        /// Write the dendrogram here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Column to read from each CSV (0-based index or header name).
        #[arg(long)]
        column: Option<String>,
    },
    /// Generate a benchmark model realization (optionally a coupled pair).
    Simulate {
        /// Model: X1..X5, or parameterized like "X2:phi=-0.5",
        /// "X4:d=0.3,theta=0.6,m=1000".
        #[arg(long)]
        model: String,
        /// Series length.
        #[arg(long)]
        n: usize,
        /// Master seed (falls back to SPECDIFF_SEED, then 1).
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Second model: emits a coupled pair (requires --n2 and --out2).
        #[arg(long)]
        model2: Option<String>,
        /// Length of the second series (must be >= --n).
        #[arg(long)]
        n2: Option<usize>,
        /// Innovation correlation of the coupled pair, in [0,1].
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        /// Output CSV for the second series.
        #[arg(long)]
        out2: Option<PathBuf>,
    },
    /// Rejection-frequency table over the benchmark grid (1000 reps,
    /// levels 0.05 and 0.1).
    Table1 {
        /// Master seed (falls back to SPECDIFF_SEED, then 1).
        #[arg(long)]
        seed: Option<u64>,
        /// Replications per cell.
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the same rows as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// Exchange which model of a mixed pair gets the shorter length.
        #[arg(long)]
        flip: bool,
    },
    /// Dump a series' periodogram on its own Fourier grid as CSV.
    Spectrum {
        /// CSV file of the series.
        file: PathBuf,
        /// Column to read (0-based index or header name).
        #[arg(long)]
        column: Option<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the null-variance calibration and print the report.
    Calibrate {
        /// Replications (at least 200).
        #[arg(long, default_value_t = 500)]
        reps: u64,
        /// Series length (at least 2048).
        #[arg(long, default_value_t = 4096)]
        n: usize,
        /// Master seed (falls back to SPECDIFF_SEED, then 1).
        #[arg(long)]
        seed: Option<u64>,
        /// Emit the report as JSON instead of markdown.
        #[arg(long)]
        json: bool,
    },
    /// Kolmogorov test of the standardized null statistic against N(0,1).
    Normality {
        /// Model simulated on both sides (same spectral density).
        #[arg(long, default_value = "X1")]
        model: String,
        /// Length of both series.
        #[arg(long, default_value_t = 2048)]
        n: usize,
        /// Replications.
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        /// Master seed (falls back to SPECDIFF_SEED, then 1).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn resolve_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| {
            std::env::var("SPECDIFF_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> specdiff::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| specdiff::Error::Io {
            path: p.clone(),
            source: e,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn print_human(t: &TestResult, ci: Option<(f64, f64)>) {
    match t.method {
        specdiff::Method::Equality => println!("equality test"),
        specdiff::Method::Precise => println!(
            "precise test (epsilon = {})",
            t.epsilon.unwrap_or(f64::NAN)
        ),
    }
    println!("  n1 = {}, n2 = {}, swapped = {}", t.n1, t.n2, t.swapped);
    println!("  d1 = {:.6e}  d2 = {:.6e}  d12 = {:.6e}", t.d1, t.d2, t.d12);
    println!(
        "  d_squared = {:.6e}  r_squared = {:.6}",
        t.d_squared, t.r_squared
    );
    println!(
        "  sigma2_h0 = {:.6e}  sigma2_alt = {:.6e}",
        t.sigma2_h0, t.sigma2_alt
    );
    println!("  statistic = {:.6}  p_value = {:.6}", t.statistic, t.p_value);
    match t.method {
        specdiff::Method::Equality => {
            println!("  reject equal spectra at alpha = {}: {}", t.alpha, t.reject)
        }
        specdiff::Method::Precise => println!(
            "  affirm near-equality at alpha = {}: {}",
            t.alpha, t.reject
        ),
    }
    if let Some((lo, hi)) = ci {
        println!(
            "  {:.0}% confidence interval for d_squared: [{:.6e}, {:.6e}]",
            100.0 * (1.0 - t.alpha),
            lo,
            hi
        );
    }
}

fn cmd_compare(
    a: PathBuf,
    b: PathBuf,
    alpha: f64,
    epsilon: Option<f64>,
    no_center: bool,
    json: bool,
    column: Option<String>,
) -> specdiff::Result<()> {
    let sa = load_csv(&a, column.as_deref())?;
    let sb = load_csv(&b, column.as_deref())?;
    let input = prepare_comparison(&sa, &sb, !no_center);
    let grids = ComparisonGrids::compute(&input);
    let equality = equality_test_from_grids(&input, &grids, alpha)?;
    let ci = confidence_interval_d2_from_grids(&grids, alpha)?;
    let precise = match epsilon {
        Some(eps) => Some(precise_test_from_grids(&input, &grids, eps, alpha)?),
        None => None,
    };
    if json {
        println!("{}", serde_json::to_string(&equality).expect("serializes"));
        if let Some(p) = &precise {
            println!("{}", serde_json::to_string(p).expect("serializes"));
        }
    } else {
        print_human(&equality, Some(ci));
        if let Some(p) = &precise {
            print_human(p, None);
        }
    }
    Ok(())
}

fn cmd_cluster(
    files: Vec<PathBuf>,
    linkage: String,
    format: String,
    matrix_out: Option<PathBuf>,
    out: Option<PathBuf>,
    column: Option<String>,
) -> specdiff::Result<()> {
    let linkage: Linkage = linkage.parse()?;
    let format: TreeFormat = format.parse()?;
    let mut series = files
        .iter()
        .map(|p| load_csv(p, column.as_deref()))
        .collect::<specdiff::Result<Vec<_>>>()?;
    let labels: Vec<String> = series.iter().map(|s| s.label().to_string()).collect();
    for (s, label) in series.iter_mut().zip(dedupe_labels(&labels)) {
        *s = s.clone().relabeled(label);
    }
    let matrix = distance_matrix(&series)?;
    if let Some(p) = &matrix_out {
        std::fs::write(p, matrix_to_csv(&matrix)).map_err(|e| specdiff::Error::Io {
            path: p.clone(),
            source: e,
        })?;
    }
    let tree = agglomerate(&matrix, linkage);
    let mut text = export_dendrogram(&tree, format);
    text.push('\n');
    write_or_print(&out, &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    model: String,
    n: usize,
    seed: Option<u64>,
    out: Option<PathBuf>,
    model2: Option<String>,
    n2: Option<usize>,
    rho: f64,
    out2: Option<PathBuf>,
) -> specdiff::Result<()> {
    let seed = resolve_seed(seed);
    let model_a = ModelSpec::parse(&model)?;
    match model2 {
        None => {
            if n2.is_some() || out2.is_some() {
                return Err(specdiff::Error::InvalidParam(
                    "--n2/--out2 need --model2".into(),
                ));
            }
            if rho != 0.0 {
                return Err(specdiff::Error::InvalidParam(
                    "--rho couples a pair; give --model2, --n2 and --out2".into(),
                ));
            }
            let spec = CouplingSpec::new(n, n, 0.0)?;
            let pad = model_a.recommended_pad();
            let mut rng = replication_rng(seed, "simulate", 0);
            let (z1, _) = coupled_innovations(&spec, pad, &mut rng);
            let series = simulate(&model_a, n, &z1)?;
            match out {
                Some(p) => save_series_csv(&series, p),
                None => {
                    print!("{}", specdiff::series_to_csv(&series));
                    Ok(())
                }
            }
        }
        Some(m2) => {
            let model_b = ModelSpec::parse(&m2)?;
            let n2 = n2.ok_or_else(|| {
                specdiff::Error::InvalidParam("--model2 needs --n2".into())
            })?;
            let out2 = out2.ok_or_else(|| {
                specdiff::Error::InvalidParam("--model2 needs --out2".into())
            })?;
            let out = out.ok_or_else(|| {
                specdiff::Error::InvalidParam("coupled pairs need --out for the first series".into())
            })?;
            let spec = CouplingSpec::new(n, n2, rho)?;
            let pad = model_a
                .recommended_pad()
                .max(model_b.recommended_pad());
            let mut rng = replication_rng(seed, "simulate", 0);
            let (z1, z2) = coupled_innovations(&spec, pad, &mut rng);
            let a = simulate(&model_a, n, &z1)?;
            let b = simulate(&model_b, n2, &z2)?;
            save_series_csv(&a, out)?;
            save_series_csv(&b, out2)
        }
    }
}

fn cmd_table1(
    seed: Option<u64>,
    reps: u64,
    out: Option<PathBuf>,
    json_out: Option<PathBuf>,
    flip: bool,
) -> specdiff::Result<()> {
    let table = run_table1(resolve_seed(seed), reps, flip)?;
    write_or_print(&out, &table.to_csv())?;
    if let Some(p) = json_out {
        std::fs::write(&p, table.to_json()).map_err(|e| specdiff::Error::Io {
            path: p,
            source: e,
        })?;
    }
    Ok(())
}

fn cmd_spectrum(
    file: PathBuf,
    column: Option<String>,
    out: Option<PathBuf>,
) -> specdiff::Result<()> {
    let series = load_csv(&file, column.as_deref())?;
    let full = specdiff::spectral::periodogram_full_grid(&series);
    let n = series.n();
    let mut text = String::from("lambda,periodogram\n");
    for k in 1..=n / 2 {
        let lambda = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        text.push_str(&format!("{lambda},{}\n", full[k]));
    }
    write_or_print(&out, &text)
}

fn run(cli: Cli) -> specdiff::Result<()> {
    if let Some(t) = cli.threads {
        // ignore failure: the global pool can only be set once
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
    match cli.command {
        Command::Compare {
            a,
            b,
            alpha,
            epsilon,
            no_center,
            json,
            column,
        } => cmd_compare(a, b, alpha, epsilon, no_center, json, column),
        Command::Cluster {
            files,
            linkage,
            format,
            matrix_out,
            out,
            column,
        } => cmd_cluster(files, linkage, format, matrix_out, out, column),
        Command::Simulate {
            model,
            n,
            seed,
            out,
            model2,
            n2,
            rho,
            out2,
        } => cmd_simulate(model, n, seed, out, model2, n2, rho, out2),
        Command::Table1 {
            seed,
            reps,
            out,
            json_out,
            flip,
        } => cmd_table1(seed, reps, out, json_out, flip),
        Command::Spectrum { file, column, out } => cmd_spectrum(file, column, out),
        Command::Calibrate {
            reps,
            n,
            seed,
            json,
        } => {
            let report = calibrate_sigma_h0(reps, n, resolve_seed(seed))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
            } else {
                print!("{}", report.to_markdown());
            }
            if report.consistent() {
                Ok(())
            } else {
                Err(specdiff::Error::DegenerateVariance(
                    "calibration inconsistent with compiled constant".into(),
                ))
            }
        }
        Command::Normality {
            model,
            n,
            reps,
            seed,
        } => {
            let model = ModelSpec::parse(&model)?;
            let report = normality_diagnostic(&model, n, reps, resolve_seed(seed))?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let line = e
                .to_string()
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("error: invalid arguments")
                .to_string();
            let line = if line.starts_with("error:") {
                line
            } else {
                format!("error: {line}")
            };
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
