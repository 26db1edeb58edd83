use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use nwe_disc::ensembles::{gram_matrix, make_product_family};
use nwe_disc::minerr::{build_srm_for_family, chen_analysis, srm_optimality_check};
use nwe_disc::numerics::hermitian_eig;
use nwe_disc::unambig::{monte_carlo_protocol, sequential_protocol_exact, solve_ud_primal};
use nwe_disc::verify::{run_acceptance, Level};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_BAD_ARGS: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "nwe-disc", about = "State-discrimination analysis of symmetric product ensembles", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Full single-point analysis at one overlap value.
    Analyze {
        #[arg(long)]
        s: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Sweep the overlap range and write one CSV row per grid point.
    Sweep {
        #[arg(long, default_value_t = 0.1)]
        s_min: f64,
        #[arg(long, default_value_t = 0.9)]
        s_max: f64,
        #[arg(long, default_value_t = 9)]
        steps: usize,
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, value_enum, default_value = "full")]
        level: VerifyLevel,
    },
    /// Sample the sequential two-round protocol.
    Montecarlo {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// 12 significant digits, locale-free.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not argument errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_BAD_ARGS),
            };
        }
    };
    if let Err(code) = configure_threads() {
        return code;
    }
    match cli.command {
        Command::Analyze { s, format } => cmd_analyze(s, format),
        Command::Sweep {
            s_min,
            s_max,
            steps,
            out,
        } => cmd_sweep(s_min, s_max, steps, &out),
        Command::Verify { level } => cmd_verify(level),
        Command::Montecarlo { s, trials, seed } => cmd_montecarlo(s, trials, seed),
    }
}

fn configure_threads() -> Result<(), ExitCode> {
    let Ok(raw) = std::env::var("NWE_DISC_THREADS") else {
        return Ok(());
    };
    let Ok(n) = raw.parse::<usize>() else {
        eprintln!("NWE_DISC_THREADS must be a non-negative integer, got {raw:?}");
        return Err(ExitCode::from(EXIT_BAD_ARGS));
    };
    if n == 0 {
        return Ok(()); // auto
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| {
            eprintln!("failed to configure worker pool: {e}");
            ExitCode::from(EXIT_BAD_ARGS)
        })
}

fn check_s(s: f64) -> Result<(), ExitCode> {
    if s.is_finite() && s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        eprintln!("--s must lie strictly between 0 and 1, got {s}");
        Err(ExitCode::from(EXIT_BAD_ARGS))
    }
}

struct PointSummary {
    s: f64,
    gram_eigenvalues: Vec<f64>,
    lambda_min: f64,
    ud_value: f64,
    ud_gap: f64,
    srm_success: f64,
    srm_optimal: bool,
    srm_diag_spread: f64,
    locc_exact: f64,
    mu11: f64,
    mu12: f64,
    mu14: f64,
    schmidt_rank: usize,
    chen_verdict: &'static str,
}

fn analyze_point(s: f64) -> nwe_disc::Result<PointSummary> {
    let ensemble = make_product_family(s)?;
    let gram = gram_matrix(ensemble.states())?;
    let eig = hermitian_eig(&gram)?;
    let lambda_min = eig.eigenvalues[0];

    let sdp = solve_ud_primal(&gram, &vec![1.0 / 6.0; 6])?;
    let diag = srm_optimality_check(&gram)?;
    let srm = build_srm_for_family(s)?;
    let protocol = sequential_protocol_exact(s)?;
    let chen = chen_analysis(s)?;
    let schmidt_rank = srm.basis.schmidt_ranks.first().copied().unwrap_or(0);

    Ok(PointSummary {
        s,
        gram_eigenvalues: eig.eigenvalues,
        lambda_min,
        ud_value: sdp.value,
        ud_gap: sdp.gap,
        srm_success: srm.success,
        srm_optimal: diag.equal,
        srm_diag_spread: diag.spread,
        locc_exact: protocol.exact_success,
        mu11: chen.denominator_components[0].re,
        mu12: chen.denominator_components[1].re,
        mu14: chen.denominator_components[2].re,
        schmidt_rank,
        chen_verdict: if chen.locc_distinguishable {
            "locc_distinguishable"
        } else {
            "not_locc_distinguishable"
        },
    })
}

fn cmd_analyze(s: f64, format: Format) -> ExitCode {
    if let Err(code) = check_s(s) {
        return code;
    }
    let started = Instant::now();
    let point = match analyze_point(s) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("analysis failed: {e}");
            return ExitCode::from(EXIT_VERIFY_FAILED);
        }
    };
    let ud_equals_lambda_min = (point.ud_value - point.lambda_min).abs() <= 1e-6;
    let locc_ud_attains = (point.locc_exact - point.ud_value).abs() <= 1e-6;
    match format {
        Format::Json => {
            let eigs = point
                .gram_eigenvalues
                .iter()
                .map(|&x| num(x))
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "{{\"s\":{},\"gram_eigenvalues\":[{}],\"srm_success\":{},\"srm_optimal\":{},\
                 \"srm_diag_spread\":{},\"ud_value\":{},\"ud_gap\":{},\
                 \"ud_equals_lambda_min\":{},\"locc_exact\":{},\"locc_ud_attains\":{},\
                 \"mu11\":{},\"mu12\":{},\"mu14\":{},\"schmidt_rank\":{},\
                 \"chen_verdict\":\"{}\"}}",
                num(point.s),
                eigs,
                num(point.srm_success),
                point.srm_optimal,
                num(point.srm_diag_spread),
                num(point.ud_value),
                num(point.ud_gap),
                ud_equals_lambda_min,
                num(point.locc_exact),
                locc_ud_attains,
                num(point.mu11),
                num(point.mu12),
                num(point.mu14),
                point.schmidt_rank,
                point.chen_verdict,
            );
        }
        Format::Text => {
            println!("s                    {:.6}", point.s);
            println!(
                "gram eigenvalues     {}",
                point
                    .gram_eigenvalues
                    .iter()
                    .map(|x| format!("{x:.6}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            println!("srm success          {:.6}", point.srm_success);
            println!("srm optimal          {}", point.srm_optimal);
            println!("ud value             {:.6}", point.ud_value);
            println!("ud = lambda_min      {ud_equals_lambda_min}");
            println!("locc exact           {:.6}", point.locc_exact);
            println!("locc attains ud      {locc_ud_attains}");
            println!(
                "mu11 mu12 mu14       {:.6} {:.6} {:.6}",
                point.mu11, point.mu12, point.mu14
            );
            println!("schmidt rank         {}", point.schmidt_rank);
            println!("chen verdict         {}", point.chen_verdict);
            println!(
                "timing ms            {:.3}",
                started.elapsed().as_secs_f64() * 1e3
            );
        }
    }
    ExitCode::SUCCESS
}

fn cmd_sweep(s_min: f64, s_max: f64, steps: usize, out: &std::path::Path) -> ExitCode {
    if !(s_min.is_finite() && s_max.is_finite() && 0.0 < s_min && s_min < s_max && s_max < 1.0) {
        eprintln!("need 0 < --s-min < --s-max < 1, got {s_min} and {s_max}");
        return ExitCode::from(EXIT_BAD_ARGS);
    }
    if steps < 2 {
        eprintln!("--steps must be at least 2, got {steps}");
        return ExitCode::from(EXIT_BAD_ARGS);
    }
    let grid: Vec<f64> = (0..steps)
        .map(|k| s_min + (s_max - s_min) * k as f64 / (steps - 1) as f64)
        .collect();
    let points: Vec<nwe_disc::Result<PointSummary>> =
        grid.par_iter().map(|&s| analyze_point(s)).collect();

    let mut body = String::from(
        "s,lambda_min,ud_value,srm_success,srm_diag_spread,mu11,mu12,mu14,schmidt_rank,chen_verdict\n",
    );
    for point in points {
        let p = match point {
            Ok(p) => p,
            Err(e) => {
                eprintln!("sweep point failed: {e}");
                return ExitCode::from(EXIT_VERIFY_FAILED);
            }
        };
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            num(p.s),
            num(p.lambda_min),
            num(p.ud_value),
            num(p.srm_success),
            num(p.srm_diag_spread),
            num(p.mu11),
            num(p.mu12),
            num(p.mu14),
            p.schmidt_rank,
            p.chen_verdict,
        ));
    }
    match std::fs::File::create(out).and_then(|mut f| f.write_all(body.as_bytes())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cannot write {}: {e}", out.display());
            ExitCode::from(EXIT_IO)
        }
    }
}

fn cmd_verify(level: VerifyLevel) -> ExitCode {
    let level = match level {
        VerifyLevel::Fast => Level::Fast,
        VerifyLevel::Full => Level::Full,
    };
    let results = run_acceptance(level);
    let mut failures = 0;
    for r in &results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] criterion {}: {} — {}", r.id, r.name, r.detail);
        if !r.passed {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("{failures} of {} criteria failed", results.len());
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn cmd_montecarlo(s: f64, trials: u64, seed: u64) -> ExitCode {
    if let Err(code) = check_s(s) {
        return code;
    }
    if trials == 0 {
        eprintln!("--trials must be at least 1");
        return ExitCode::from(EXIT_BAD_ARGS);
    }
    match monte_carlo_protocol(s, trials, seed) {
        Ok(r) => {
            println!(
                "{{\"s\":{},\"trials\":{},\"seed\":{},\"exact\":{},\"empirical\":{},\
                 \"stderr\":{},\"wrong_conclusive_count\":{}}}",
                num(s),
                r.trials,
                r.seed,
                num(r.exact_success),
                num(r.empirical_success.unwrap_or(f64::NAN)),
                num(r.std_error.unwrap_or(f64::NAN)),
                r.wrong_conclusive,
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("monte carlo failed: {e}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
    }
}
