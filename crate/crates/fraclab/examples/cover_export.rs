//! Generate a grid cover, project it onto a line, and export both as CSV.
//!
//! Run: `cargo run --release --example cover_export`

use fraclab::fractals::cover::{generate_cover, project_cover, DEFAULT_MAX_PRECISION};
use fraclab::fractals::find;
use fraclab::geometry::Direction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ifs = find("fourcorner")?;
    let r = 6;
    let cover = generate_cover(&ifs, r, DEFAULT_MAX_PRECISION)?;
    println!(
        "{} at precision {r}: {} occupied cells of side 2^-{r}",
        ifs.name,
        cover.len()
    );

    let out = std::env::temp_dir().join("fourcorner_r6.csv");
    let mut file = std::fs::File::create(&out)?;
    cover.write_csv(&mut file)?;
    println!("cover CSV -> {}", out.display());

    let e = Direction::normalized(vec![0.6, 0.8])?;
    let projected = project_cover(&cover, &e);
    println!("projected along {e}: {} cells on the line", projected.len());

    let out = std::env::temp_dir().join("fourcorner_r6_proj.csv");
    let mut file = std::fs::File::create(&out)?;
    projected.write_csv(&mut file)?;
    println!("projection CSV -> {}", out.display());

    // refinement sanity: counts grow by at most 2^n per level
    let finer = generate_cover(&ifs, r + 1, DEFAULT_MAX_PRECISION)?;
    println!(
        "refining to 2^-{}: {} cells (x{:.2})",
        r + 1,
        finer.len(),
        finer.len() as f64 / cover.len() as f64
    );
    Ok(())
}
