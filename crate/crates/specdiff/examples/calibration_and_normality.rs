//! Diagnostics behind the test's null distribution: the variance-constant
//! calibration report and a Kolmogorov-Smirnov check that the standardized
//! statistic is close to standard normal.
//!
//!   cargo run --release --example calibration_and_normality

use specdiff::*;

fn main() {
    let report = calibrate_sigma_h0(200, 2048, 1).unwrap();
    println!("{}", report.to_markdown());
    println!("consistent: {}", report.consistent());

    let diag = normality_diagnostic(&ModelSpec::x1(), 1024, 500, 1).unwrap();
    println!(
        "\nKS against N(0,1) over {} null statistics: D = {:.4}, p = {:.4}",
        500, diag.ks_statistic, diag.p_value
    );
}
