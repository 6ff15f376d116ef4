//! Box-counting dimension of every catalog attractor against its Moran
//! (similarity) dimension.
//!
//! Run: `cargo run --release --example box_dimension`

use fraclab::dimension::{ifs_box_dimension, Mode};
use fraclab::fractals::catalog;

fn main() {
    println!(
        "{:<12} {:>3} {:>10} {:>10} {:>9} {:>9}",
        "name", "n", "moran", "ls-slope", "error", "rms"
    );
    for ifs in catalog() {
        // the 3-D dust and the full square get a shallower window to keep
        // cell counts tame; everything else runs the default [8, 20]
        let window = match ifs.name.as_str() {
            "dust3" => (6, 14),
            "square" => (6, 12),
            "sierpinski" | "cantor3sq" => (8, 18),
            _ => (8, 20),
        };
        let truth = ifs.similarity_dimension();
        let est = ifs_box_dimension(&ifs, window, Mode::Ls).expect("window satisfiable");
        println!(
            "{:<12} {:>3} {:>10.5} {:>10.5} {:>9.5} {:>9.1e}",
            ifs.name,
            ifs.dim(),
            truth,
            est.slope,
            (est.slope - truth).abs(),
            est.rms
        );
    }
    println!("\nliminf / ls / limsup on the middle-third Cantor set:");
    let ifs = fraclab::fractals::find("cantor3").unwrap();
    for mode in [Mode::LimInf, Mode::Ls, Mode::LimSup] {
        let est = ifs_box_dimension(&ifs, (8, 20), mode).unwrap();
        println!("  {:<7} {:.5}", est.mode.to_string(), est.slope);
    }
}
