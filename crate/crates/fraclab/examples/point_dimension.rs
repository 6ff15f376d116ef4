//! Effective-dimension proxies of individual points via the dictionary
//! compressor: rational points collapse toward 0, random points sit at
//! density 1, and the liminf proxy never exceeds the limsup proxy.
//!
//! Run: `cargo run --release --example point_dimension`

use fraclab::estimators::{
    complexity_profile, default_precision_schedule, effective_dim, DimMode, PointSource,
};

fn show(label: &str, source: &PointSource) {
    let profile = complexity_profile(source, &default_precision_schedule()).expect("profiles");
    let lo = effective_dim(&profile, DimMode::LimInf).unwrap();
    let hi = effective_dim(&profile, DimMode::LimSup).unwrap();
    let (r, k) = *profile.samples.last().unwrap();
    println!("{label:<28} liminf {lo:.4}  limsup {hi:.4}   (k_{r} = {k})");
}

fn main() {
    println!("effective-dimension proxies over r = 32 .. 4096\n");
    show(
        "1/3 (periodic expansion)",
        &PointSource::Rational {
            nums: vec![1],
            dens: vec![3],
        },
    );
    show(
        "22/7",
        &PointSource::Rational {
            nums: vec![22 % 7],
            dens: vec![7],
        },
    );
    show(
        "dyadic 5/16 (terminating)",
        &PointSource::F64(vec![5.0 / 16.0]),
    );
    show(
        "seeded random, R^1",
        &PointSource::SeededRandom { dim: 1, seed: 42 },
    );
    show(
        "seeded random, R^2",
        &PointSource::SeededRandom { dim: 2, seed: 42 },
    );
    let cantor = fraclab::fractals::find("cantor3").unwrap();
    let sample = PointSource::fractal_sample(&cantor, 9, 4096).expect("rational maps");
    show("middle-third Cantor sample", &sample);
    println!(
        "\n(substring matching does not expose base-3 digit structure, so Cantor\n\
         samples read as incompressible here; exact complexities live in the toy\n\
         universe instead)"
    );
}
