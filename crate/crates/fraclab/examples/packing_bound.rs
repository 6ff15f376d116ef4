//! Packing lower bound for projections: limsup-mode (upper box) estimates of
//! projected covers stay above min(s, 1) for almost every direction, here on
//! the Cantor product C_{1/3} x C_{1/3} (s ~ 1.26).
//!
//! Run: `cargo run --release --example packing_bound`

use fraclab::harness::{run_packing, ExperimentConfig, ExperimentKind};

fn main() {
    let config = ExperimentConfig {
        kind: ExperimentKind::Packing,
        fractal: "cantor3sq".into(),
        directions: 50,
        seed: 11,
        window: (8, 15),
        tol: 0.1,
        ..Default::default()
    };
    let report = run_packing(&config).expect("sweep runs");
    println!(
        "C_1/3 x C_1/3, s = {:.4}; {} directions, limsup mode, window [{}, {}]",
        report.ground_truth_s.unwrap(),
        config.directions,
        config.window.0,
        config.window.1
    );
    println!(
        "median {:.4}; {:.1}% of estimates >= {:.2}",
        report.summary.median_slope.unwrap(),
        100.0 * report.summary.fraction_above_threshold.unwrap(),
        report.summary.threshold.unwrap()
    );
    for v in &report.verdicts {
        println!("{}: {}", v.name, if v.pass { "PASS" } else { "FAIL" });
    }
}
