//! Cluster a mixed bag of series by spectral shape. Series lengths differ;
//! the pairwise distance uses each pair's shorter grid, so nothing needs
//! truncation or padding.
//!
//!   cargo run --example cluster_series

use rand::Rng;
use rand_distr::StandardNormal;
use specdiff::*;

fn draw(model: &ModelSpec, label: &str, n: usize, seed: u64) -> TimeSeries {
    let mut rng = replication_rng(seed, label, 0);
    let pad = model.recommended_pad();
    let z: Vec<f64> = (0..n + 2 * pad).map(|_| rng.sample(StandardNormal)).collect();
    simulate(model, n, &z).unwrap().relabeled(label)
}

fn main() {
    let series = vec![
        draw(&ModelSpec::x1(), "noise_short", 900, 1),
        draw(&ModelSpec::x1(), "noise_mid", 1200, 2),
        draw(&ModelSpec::x1(), "noise_long", 1600, 3),
        draw(&ModelSpec::x2(), "ar_short", 900, 4),
        draw(&ModelSpec::x2(), "ar_long", 1600, 5),
        draw(&ModelSpec::x3(), "ma_short", 1200, 6),
        draw(&ModelSpec::x3(), "ma_long", 1600, 7),
    ];

    let matrix = distance_matrix(&series).unwrap();
    println!("pairwise normalized spectral distances:");
    print!("{}", matrix_to_csv(&matrix));

    let tree = agglomerate(&matrix, Linkage::Average);
    println!("\naverage-linkage dendrogram (Newick):");
    println!("{}", export_dendrogram(&tree, TreeFormat::Newick));

    for k in [2, 3] {
        let groups = tree.cut(k).unwrap();
        println!("\n{k}-cluster cut:");
        for g in groups {
            println!("  {}", g.join(", "));
        }
    }
}
