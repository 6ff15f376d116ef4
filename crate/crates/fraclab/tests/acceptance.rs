//! Acceptance suite: every shipped claim, one pass/fail line each.
//!
//! The criteria run sequentially inside one test so the printed lines come
//! out in order and the per-criterion wall-clock budgets are measured on an
//! uncontended core. Run with `cargo test --test acceptance -- --nocapture`
//! to watch the lines.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fraclab::dimension::{ifs_box_dimension, Mode};
use fraclab::estimators::{
    complexity_profile, default_precision_schedule, effective_dim, DimMode, PointSource,
};
use fraclab::fractals::find;
use fraclab::geometry::{dot, nearest_on_level_set, sample_direction};
use fraclab::harness::{
    run_marstrand, run_packing, run_toy_verify, ExperimentConfig, ExperimentKind,
};
use fraclab::recovery::{sample_instance, verify_direction_recovery};
use fraclab::toy::constants::ToyConstants;
use fraclab::toy::{recover_point, verify_point_lemma, verify_symmetry_of_information, Universe};

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn record(
    results: &mut Vec<Outcome>,
    name: &'static str,
    budget_s: u64,
    f: impl FnOnce() -> (bool, String),
) {
    let start = Instant::now();
    let (pass, detail) = f();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_s);
    let within = elapsed <= budget;
    println!(
        "ACCEPTANCE {name}: {} [{:.1}s of {budget_s}s] {detail}",
        if pass && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    results.push(Outcome {
        name,
        pass: pass && within,
        detail,
        elapsed,
        budget,
    });
}

// criterion 1: ground-truth box dimensions over the stated window
fn dimension_ground_truth() -> (bool, String) {
    let window = (8, 20);
    let cases = [
        ("cantor3", 2f64.ln() / 3f64.ln()),
        ("sierpinski", 3f64.ln() / 2f64.ln()),
        ("fourcorner", 1.0),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (name, truth) in cases {
        let ifs = find(name).unwrap();
        let est = ifs_box_dimension(&ifs, window, Mode::Ls).unwrap();
        let err = (est.slope - truth).abs();
        ok &= err <= 0.05;
        details.push(format!("{name} {:.5} (err {:.4})", est.slope, err));
    }
    (ok, details.join("; "))
}

// criterion 2: Marstrand sweep on the four-corner Cantor set
fn marstrand_fourcorner() -> (bool, String) {
    let config = ExperimentConfig {
        kind: ExperimentKind::Marstrand,
        fractal: "fourcorner".into(),
        directions: 100,
        seed: 7,
        window: (12, 20),
        tol: 0.1,
        exceptional_tol: 0.07,
        ..Default::default()
    };
    let report = run_marstrand(&config).unwrap();
    let in_band = report
        .records
        .iter()
        .filter(|r| r.estimate.slope >= 0.9 && r.estimate.slope <= 1.1)
        .count();
    let frac = in_band as f64 / report.records.len() as f64;
    let axis = report
        .exceptional
        .iter()
        .find(|e| e.direction == vec![1.0, 0.0])
        .expect("axis direction cataloged");
    let axis_ok = (axis.estimate.slope - 0.5).abs() <= 0.07;
    let ok = frac >= 0.95 && axis_ok && report.all_pass();
    (
        ok,
        format!(
            "{:.0}% of 100 estimates in [0.9, 1.1]; e=(1,0) -> {:.4}",
            100.0 * frac,
            axis.estimate.slope
        ),
    )
}

// criterion 3: packing lower bound on C_{1/3}^2 and the Sierpinski triangle
fn packing_lower_bound() -> (bool, String) {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["cantor3sq", "sierpinski"] {
        let config = ExperimentConfig {
            kind: ExperimentKind::Packing,
            fractal: name.into(),
            directions: 100,
            seed: 7,
            window: (8, 15),
            tol: 0.1,
            ..Default::default()
        };
        let report = run_packing(&config).unwrap();
        let above = report
            .records
            .iter()
            .filter(|r| r.estimate.slope >= 0.9)
            .count();
        let frac = above as f64 / report.records.len() as f64;
        ok &= frac >= 0.95;
        details.push(format!("{name} {:.0}%", 100.0 * frac));
    }
    (ok, details.join("; "))
}

/// Independent second implementation of the reference decoder for
/// criterion 4: string-of-bits recursive descent, written against the
/// format description and sharing no code with the crate.
mod second_opinion {
    use std::collections::HashMap;

    struct Cursor<'a> {
        bits: &'a [u8],
        pos: usize,
    }

    impl<'a> Cursor<'a> {
        fn take(&mut self) -> Option<u8> {
            let b = *self.bits.get(self.pos)?;
            self.pos += 1;
            Some(b)
        }

        fn gamma(&mut self) -> Option<u64> {
            let mut zeros = 0;
            while self.take()? == 0 {
                zeros += 1;
                if zeros > 40 {
                    return None;
                }
            }
            let mut v: u64 = 1;
            for _ in 0..zeros {
                v = (v << 1) | self.take()? as u64;
            }
            Some(v)
        }

        fn point(&mut self) -> Option<(Vec<i64>, u32)> {
            let n = self.gamma()? as usize;
            if n == 0 || n > 8 {
                return None;
            }
            let hdr = self.gamma()? as u32;
            let prec = hdr.checked_sub(1)?;
            if prec > 30 {
                return None;
            }
            if prec == 0 {
                return Some((vec![0; n], 0));
            }
            let mut ms = Vec::with_capacity(n);
            for _ in 0..n {
                let mut u: i64 = 0;
                for _ in 0..prec {
                    u = (u << 1) | self.take()? as i64;
                }
                if u >= 1 << (prec - 1) {
                    u -= 1 << prec;
                }
                ms.push(u);
            }
            Some((ms, prec - 1))
        }

        fn uncond(&mut self) -> Option<(Vec<i64>, u32)> {
            if self.take()? == 1 {
                let swap = self.take()? == 1;
                let a = self.uncond()?;
                let b = self.cond(&a)?;
                let (first, second) = if swap { (b, a) } else { (a, b) };
                if first.0.len() + second.0.len() > 8 {
                    return None;
                }
                // concatenate at the finer precision
                let prec = first.1.max(second.1);
                let mut ms: Vec<i64> = first.0.iter().map(|&m| m << (prec - first.1)).collect();
                ms.extend(second.0.iter().map(|&m| m << (prec - second.1)));
                Some((ms, prec))
            } else {
                self.point()
            }
        }

        fn cond(&mut self, ctx: &(Vec<i64>, u32)) -> Option<(Vec<i64>, u32)> {
            if self.take()? == 1 {
                let (dm, dp) = self.point()?;
                if dm.len() != ctx.0.len() {
                    return None;
                }
                let prec = dp.max(ctx.1);
                let ms: Vec<i64> = ctx
                    .0
                    .iter()
                    .zip(&dm)
                    .map(|(&a, &b)| (a << (prec - ctx.1)) + (b << (prec - dp)))
                    .collect();
                Some((ms, prec))
            } else {
                self.uncond()
            }
        }
    }

    fn normalize(mut ms: Vec<i64>, mut prec: u32) -> (Vec<i64>, u32) {
        while prec > 0 && ms.iter().all(|m| m % 2 == 0) {
            for m in &mut ms {
                *m /= 2;
            }
            prec -= 1;
        }
        (ms, prec)
    }

    pub fn decode(bits: &[u8]) -> Option<(Vec<i64>, u32)> {
        let mut c = Cursor { bits, pos: 0 };
        let out = c.uncond()?;
        if c.pos != bits.len() {
            return None;
        }
        Some(normalize(out.0, out.1))
    }

    /// Brute-force table: every bit string of length <= l_max, longest last.
    pub fn full_scan(l_max: u32) -> HashMap<(Vec<i64>, u32), u32> {
        let mut table = HashMap::new();
        for len in 0..=l_max {
            for word in 0..(1u64 << len) {
                let bits: Vec<u8> = (0..len)
                    .map(|i| ((word >> (len - 1 - i)) & 1) as u8)
                    .collect();
                if let Some(p) = decode(&bits) {
                    table.entry(p).or_insert(len);
                }
            }
        }
        table
    }
}

// criterion 4: machine exactness
fn toy_exactness(universe16: &Universe) -> (bool, String) {
    let kraft = universe16.base().kraft_holds();
    let prefix = universe16.base().prefix_violations();

    let u12 = Universe::reference(12).unwrap();
    let independent = second_opinion::full_scan(12);
    let mut agree = independent.len() == u12.base().len();
    for (p, e) in u12.base().iter() {
        let key = (p.mantissas().to_vec(), p.precision());
        match independent.get(&key) {
            Some(&k) if k == e.k => {}
            _ => {
                agree = false;
                break;
            }
        }
    }
    let ok = kraft && prefix == 0 && agree;
    (
        ok,
        format!(
            "kraft {:.4} <= 1: {kraft}; prefix violations: {prefix}; \
             independent scan at l_max=12: {} points, match: {agree}",
            universe16.base().kraft_sum(),
            independent.len()
        ),
    )
}

// criterion 5: the recovery machine on hypothesis-satisfying instances
fn point_lemma_instances(universe: &Universe) -> (bool, String) {
    let constants = ToyConstants::default();
    let gamma = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(505);

    // cheap producible planar points make hypothesis (ii) satisfiable: the
    // level band must contain no point cheaper than (eta - eps) r
    let mut candidates: Vec<(Vec<f64>, u32)> = universe
        .base()
        .iter()
        .filter(|(p, _)| p.dim() == 2)
        .map(|(p, e)| (p.coords(), e.k))
        .filter(|(c, _)| c.iter().all(|v| v.abs() <= 0.9))
        .collect();
    candidates.sort_by(|a, b| (a.1, &a.0).partial_cmp(&(b.1, &b.0)).unwrap());
    candidates.truncate(candidates.len().div_ceil(2));

    let mut held = 0usize;
    let mut conclusion_ok = 0usize;
    let mut recovery_ok = 0usize;
    let mut attempts = 0usize;
    while held < 100 && attempts < 20_000 {
        attempts += 1;
        let (z, _) = &candidates[rng.gen_range(0..candidates.len())];
        let e = sample_direction(2, &mut rng);
        let r = rng.gen_range(3..=5u32);
        let k_r_z = match universe.k_r(z, r) {
            Some(k) => k,
            None => continue,
        };
        let eta = k_r_z as f64 / r as f64;
        let epsilon = 1.0 / r as f64;
        let delta = 0.5;
        let rep = verify_point_lemma(universe, z, &e, r, eta, epsilon, delta, &constants);
        if !(rep.hypothesis_i && rep.hypothesis_ii) {
            continue;
        }
        held += 1;
        if rep.conclusion_holds == Some(true) {
            conclusion_ok += 1;
        }
        // machine M at s = r, budget sized by the witness complexity
        let q = dot(&e, z);
        if let Some(p) = recover_point(universe, None, q, &e, r, k_r_z as f64 + 2.0, None) {
            let pc = p.coords();
            let w = nearest_on_level_set(&pc, &e, q);
            let dist: f64 = pc
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist <= f64::powf(2.0, gamma - r as f64) {
                recovery_ok += 1;
            }
        }
    }
    let ok = held == 100 && conclusion_ok == 100 && recovery_ok == 100;
    (
        ok,
        format!(
            "{held} hypothesis-satisfying instances in {attempts} draws; \
             conclusions {conclusion_ok}/100, recoveries within 2^(1-s) {recovery_ok}/100"
        ),
    )
}

// criterion 6: direction-recovery error bound
fn recovery_error_bound() -> (bool, String) {
    let mut pass = 0usize;
    let total = 1000usize;
    for index in 0..total {
        let n = 2 + (index % 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + index as u64);
        let inst = sample_instance(n, 30, 1.0, 15.0, false, &mut rng);
        let rep = verify_direction_recovery(&inst).unwrap();
        if rep.pass {
            pass += 1;
        }
    }
    let mut exact_ok = true;
    let mut worst_exact = 0.0f64;
    for index in 0..60 {
        let n = 2 + (index % 3);
        let mut rng = ChaCha8Rng::seed_from_u64(400 + index as u64);
        let inst = sample_instance(n, 30, 1.0, 12.0, true, &mut rng);
        let rep = verify_direction_recovery(&inst).unwrap();
        worst_exact = worst_exact.max(rep.error);
        exact_ok &= rep.error <= 1e-10;
    }
    let ok = pass == total && exact_ok;
    (
        ok,
        format!("{pass}/{total} noisy instances within bound; worst exact-input error {worst_exact:.2e}"),
    )
}

// criterion 7: symmetry of information under the frozen logarithmic slack
fn symmetry_of_information(universe: &Universe) -> (bool, String) {
    let constants = ToyConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut checked = 0usize;
    let mut passed = 0usize;
    let mut worst = 0.0f64;
    while checked < 100 {
        let jitter = f64::powi(2.0, -6);
        let x = [0.5 * rng.gen_range(-1i32..=1) as f64 + rng.gen_range(-jitter..=jitter)];
        let y = [0.5 * rng.gen_range(-1i32..=1) as f64 + rng.gen_range(-jitter..=jitter)];
        let r = rng.gen_range(1..=3u32);
        let s = rng.gen_range(1..=r);
        let rep = verify_symmetry_of_information(universe, &x, &y, r, s, &constants);
        let (Some(chain), Some(selfdev)) = (rep.chain_deviation, rep.self_deviation) else {
            continue;
        };
        checked += 1;
        worst = worst.max(chain.max(selfdev));
        if rep.all_defined_and_ok() {
            passed += 1;
        }
    }
    (
        passed == 100,
        format!("{passed}/100 tuples within c*log r + c'; worst deviation {worst}"),
    )
}

// criterion 8: estimator sanity on rational and random points
fn estimator_sanity() -> (bool, String) {
    let schedule = default_precision_schedule();
    let mut ok = true;
    let mut details = Vec::new();

    let mut worst_rational = 0.0f64;
    for (num, den) in [(1u64, 3u64), (22 % 7, 7), (5, 12), (3, 10)] {
        let src = PointSource::Rational {
            nums: vec![num],
            dens: vec![den],
        };
        let profile = complexity_profile(&src, &schedule).unwrap();
        let lo = effective_dim(&profile, DimMode::LimInf).unwrap();
        let hi = effective_dim(&profile, DimMode::LimSup).unwrap();
        ok &= lo <= 0.1 && lo <= hi;
        worst_rational = worst_rational.max(lo);
    }
    details.push(format!("rational liminf <= {worst_rational:.4}"));

    let mut rand_lo = f64::INFINITY;
    let mut rand_hi = f64::NEG_INFINITY;
    for seed in [7u64, 19, 4242] {
        for dim in [1usize, 2] {
            let src = PointSource::SeededRandom { dim, seed };
            let profile = complexity_profile(&src, &schedule).unwrap();
            let lo = effective_dim(&profile, DimMode::LimInf).unwrap();
            let hi = effective_dim(&profile, DimMode::LimSup).unwrap();
            ok &= (0.9..=1.05).contains(&lo) && (0.9..=1.05).contains(&hi) && lo <= hi;
            rand_lo = rand_lo.min(lo);
            rand_hi = rand_hi.max(hi);
        }
    }
    details.push(format!("random proxies in [{rand_lo:.4}, {rand_hi:.4}]"));
    (ok, details.join("; "))
}

// criterion 9: byte-identical reports modulo timestamp
fn reproducibility() -> (bool, String) {
    let marstrand = ExperimentConfig {
        kind: ExperimentKind::Marstrand,
        fractal: "fourcorner".into(),
        directions: 12,
        seed: 99,
        window: (6, 12),
        tol: 0.1,
        ..Default::default()
    };
    let a = run_marstrand(&marstrand).unwrap().canonical_json();
    let b = run_marstrand(&marstrand).unwrap().canonical_json();
    let toy = ExperimentConfig {
        kind: ExperimentKind::ToyVerify,
        instances: 15,
        l_max: 14,
        seed: 4,
        ..Default::default()
    };
    let c = run_toy_verify(&toy).unwrap().canonical_json();
    let d = run_toy_verify(&toy).unwrap().canonical_json();
    let ok = a.as_bytes() == b.as_bytes() && c.as_bytes() == d.as_bytes();
    (
        ok,
        format!(
            "marstrand report {} bytes, toy report {} bytes, both reruns byte-identical: {ok}",
            a.len(),
            c.len()
        ),
    )
}

#[test]
fn acceptance() {
    let mut results = Vec::new();

    record(
        &mut results,
        "1-dimension-ground-truth",
        60,
        dimension_ground_truth,
    );
    record(
        &mut results,
        "2-marstrand-fourcorner",
        300,
        marstrand_fourcorner,
    );
    record(
        &mut results,
        "3-packing-lower-bound",
        300,
        packing_lower_bound,
    );

    let universe16 = Arc::new(Universe::reference(16).unwrap());
    {
        let u = universe16.clone();
        record(&mut results, "4-toy-machine-exactness", 60, move || {
            toy_exactness(&u)
        });
    }
    {
        let u = universe16.clone();
        record(&mut results, "5-point-lemma-machine", 120, move || {
            point_lemma_instances(&u)
        });
    }
    record(
        &mut results,
        "6-recovery-error-bound",
        30,
        recovery_error_bound,
    );
    {
        let u = universe16.clone();
        record(&mut results, "7-symmetry-of-information", 60, move || {
            symmetry_of_information(&u)
        });
    }
    record(&mut results, "8-estimator-sanity", 30, estimator_sanity);
    record(&mut results, "9-reproducibility", 600, reproducibility);

    let failures: Vec<String> = results
        .iter()
        .filter(|o| !o.pass)
        .map(|o| {
            format!(
                "{} ({:.1}s/{:.0}s): {}",
                o.name,
                o.elapsed.as_secs_f64(),
                o.budget.as_secs_f64(),
                o.detail
            )
        })
        .collect();
    assert!(
        failures.is_empty(),
        "failed criteria:\n{}",
        failures.join("\n")
    );
}
