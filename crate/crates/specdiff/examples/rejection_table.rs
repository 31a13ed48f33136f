//! Rejection-frequency cells for the equality test: size on the diagonal
//! pairs (same model twice), power off it. A short run; the full
//! benchmark grid is `specdiff table1` or the ignored test full_table.
//!
//!   cargo run --release --example rejection_table

use specdiff::*;

fn main() {
    let reps = 400;
    let cells = [
        (ModelSpec::x1(), ModelSpec::x1(), 256, 256),
        (ModelSpec::x1(), ModelSpec::x1(), 256, 512),
        (ModelSpec::x2(), ModelSpec::x2(), 384, 384),
        (ModelSpec::x1(), ModelSpec::x3(), 256, 256),
        (ModelSpec::x1(), ModelSpec::x3(), 512, 512),
        (ModelSpec::x2(), ModelSpec::x3(), 384, 512),
    ];
    let mut table = RejectionTable::default();
    for (model_a, model_b, n1, n2) in cells {
        let cfg = MCConfig {
            model_a,
            model_b,
            n1,
            n2,
            rho: 0.0,
            alpha_levels: vec![0.05, 0.1],
            reps,
            master_seed: 1,
        };
        table.rows.extend(run_cell(&cfg).unwrap());
    }
    print!("{}", table.to_csv());
    println!();
    println!("same-model rows sit near their level; X1X3 and X2X3 rows show power growing with n");
}
