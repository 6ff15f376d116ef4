//! Projection sweep over the four-corner Cantor set: almost every direction
//! preserves the full dimension min(s, 1) = 1, while the two axis directions
//! collapse onto the ratio-1/4 Cantor set of dimension 1/2.
//!
//! Run: `cargo run --release --example marstrand_sweep`
//! (about a minute; pass a direction count to shrink it, e.g. `-- 24`)

use fraclab::harness::{run_marstrand, ExperimentConfig, ExperimentKind};

fn main() {
    let directions: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    let config = ExperimentConfig {
        kind: ExperimentKind::Marstrand,
        fractal: "fourcorner".into(),
        directions,
        seed: 7,
        window: (12, 20),
        tol: 0.1,
        exceptional_tol: 0.07,
        ..Default::default()
    };
    let report = run_marstrand(&config).expect("sweep runs");
    println!(
        "four-corner Cantor, s = {:.3}, {} directions, window [{}, {}]",
        report.ground_truth_s.unwrap(),
        directions,
        config.window.0,
        config.window.1
    );
    println!(
        "median slope {:.4}; {:.1}% of estimates >= {:.2}",
        report.summary.median_slope.unwrap(),
        100.0 * report.summary.fraction_above_threshold.unwrap(),
        report.summary.threshold.unwrap()
    );
    for e in &report.exceptional {
        println!(
            "exceptional {:?}: estimate {:.4} (expected {:.2})",
            e.direction, e.estimate.slope, e.expected_dim
        );
    }
    for v in &report.verdicts {
        println!("{}: {}", v.name, if v.pass { "PASS" } else { "FAIL" });
    }
}
