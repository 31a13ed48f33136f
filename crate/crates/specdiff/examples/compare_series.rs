//! Test whether two simulated series of different lengths share a spectral
//! density, then quantify the separation with a confidence interval.
//!
//!   cargo run --example compare_series

use specdiff::*;

fn main() {
    // white noise (n = 300) against an MA(1) process (n = 450)
    let spec = CouplingSpec::new(300, 450, 0.0).unwrap();
    let (z1, z2) = coupled_innovations_seeded(&spec, 1, 42);
    let a = simulate(&ModelSpec::x1(), 300, &z1).unwrap();
    let b = simulate(&ModelSpec::x3(), 450, &z2).unwrap();

    let input = prepare_comparison(&a, &b, true);
    let test = equality_test(&input, 0.05).unwrap();
    println!("equality test of {} vs {}", a.label(), b.label());
    println!("  statistic {:.4}", test.statistic);
    println!("  p-value   {:.6}", test.p_value);
    println!(
        "  decision  {}",
        if test.reject {
            "spectra differ"
        } else {
            "no evidence of a difference"
        }
    );

    let (lo, hi) = confidence_interval_d2(&input, 0.05).unwrap();
    println!("  95% CI for the squared distance: [{lo:.5}, {hi:.5}]");

    // the reverse question: are the spectra within epsilon of each other?
    // rejection here AFFIRMS similarity
    let precise = precise_test(&input, 0.05, 0.05).unwrap();
    println!(
        "precise test (epsilon = 0.05): p = {:.4}, similarity {}",
        precise.p_value,
        if precise.reject {
            "affirmed"
        } else {
            "not affirmed"
        }
    );

    // same exercise with two draws of the same process: no rejection
    // expected
    let (z1, z2) = coupled_innovations_seeded(&spec, 1, 43);
    let c = simulate(&ModelSpec::x3(), 300, &z1).unwrap();
    let d = simulate(&ModelSpec::x3(), 450, &z2).unwrap();
    let same = equality_test(&prepare_comparison(&c, &d, true), 0.05).unwrap();
    println!(
        "same model twice: p = {:.4}, reject = {}",
        same.p_value, same.reject
    );
}
