//! Exercise the projection-lemma verifiers on the exact toy universe: check
//! hypotheses by brute force, run the recovery machine, and show how a
//! rigged universe gets flagged.
//!
//! Run: `cargo run --release --example lemma_checks`

use std::sync::Arc;

use fraclab::geometry::{dot, nearest_on_level_set, Direction, DyadicPoint};
use fraclab::toy::constants::ToyConstants;
use fraclab::toy::{
    clamp_oracle, recover_point, verify_point_lemma, Code, Plant, PlantedDecoder, ReferenceMachine,
    Universe,
};

fn main() {
    let universe = Universe::reference(16).expect("within budget");
    let constants = ToyConstants::default();

    // an honest instance: z producible, hypotheses brute-checked
    let z = [0.25f64, -0.5];
    let e = Direction::normalized(vec![0.6, 0.8]).unwrap();
    let r = 4;
    let k = universe.k_r(&z, r).expect("z approximable");
    let eta = k as f64 / r as f64;
    let report = verify_point_lemma(&universe, &z, &e, r, eta, 1.0 / r as f64, 0.5, &constants);
    println!("point lemma at r={r} (K_r(z) = {k}):");
    println!(
        "  hypothesis (i)  small complexity : {}",
        report.hypothesis_i
    );
    println!(
        "  hypothesis (ii) expensive levelset: {}",
        report.hypothesis_ii
    );
    println!(
        "  K_r(e.z) = {:?} >= {:.2}? {:?} (vacuous: {})",
        report.lhs, report.rhs, report.conclusion_holds, report.vacuous
    );
    println!("  witness program: {:?}", report.witness);

    // the clamp caps z's profile without touching conditionals
    let clamp = clamp_oracle(&universe, &z, 0.4, r);
    println!(
        "\nclamped profile (eta = 0.4): cap = {} bits, vacuous = {}",
        clamp.clamp_bits(),
        clamp.is_vacuous()
    );
    for t in 1..=r {
        println!(
            "  K^D_{t}(z) = {:?}  vs  K_{t}(z) = {:?}",
            clamp.k_t_z(t),
            universe.k_r(&z, t)
        );
    }

    // machine M: enumerate short programs until one projects near q; the
    // ball guard around a hint keeps far points with coincidental
    // projections out
    let q = dot(&e, &z);
    let p = recover_point(&universe, None, q, &e, r, k as f64 + 2.0, Some(&z))
        .expect("witness within budget");
    let pc = p.coords();
    let w = nearest_on_level_set(&pc, &e, q);
    let dist: f64 = pc
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    println!(
        "\nrecover_point: found {p} with |e.p - q| = {:.2e}; distance to level set {:.2e}",
        (dot(&e, &pc) - q).abs(),
        dist
    );

    // a rigged universe: a two-bit program for a distinct level-set point
    let cheap = DyadicPoint::new(vec![3, 1], 3); // same coordinate sum as (0.25, 0.25)
    let rigged = PlantedDecoder::new(
        ReferenceMachine::new(16).unwrap(),
        vec![Plant {
            code: Code::from_bit_str("11"),
            requires_oracle: None,
            point: cheap,
        }],
    )
    .unwrap();
    let rigged = Universe::new(Arc::new(rigged)).unwrap();
    let diag = Direction::normalized(vec![1.0, 1.0]).unwrap();
    let zd = [0.25f64, 0.25];
    let kd = rigged.k_r(&zd, 4).unwrap();
    let rep = verify_point_lemma(
        &rigged,
        &zd,
        &diag,
        6,
        kd as f64 / 4.0,
        0.1,
        0.5,
        &constants,
    );
    println!(
        "\nrigged universe: hypothesis (ii) holds? {} ({} violation(s) found)",
        rep.hypothesis_ii,
        rep.violations.len()
    );
    if let Some(v) = rep.violations.first() {
        println!(
            "  cheapest offender: w = {:?}, K = {} < required {:.2}",
            v.w, v.k_w, v.required
        );
    }
}
