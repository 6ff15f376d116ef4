//! Build the exact toy universe and inspect it: Kraft sum, prefix-freeness,
//! precision-complexity profiles, and symmetry-of-information deviations.
//!
//! Run: `cargo run --release --example toy_universe`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fraclab::toy::constants::ToyConstants;
use fraclab::toy::{verify_symmetry_of_information, Universe};

fn main() {
    let l_max = 16;
    let universe = Universe::reference(l_max).expect("within enumeration budget");
    let table = universe.base();
    println!("reference universe, l_max = {l_max}");
    println!("  producible points : {}", table.len());
    println!("  halting programs  : {}", table.halting_programs().len());
    println!(
        "  kraft sum         : {:.6} (exact <= 1: {})",
        table.kraft_sum(),
        table.kraft_holds()
    );
    println!("  prefix violations : {}", table.prefix_violations());

    // precision profile of one real number
    let x = [0.137f64];
    print!("\nK_r(0.137): ");
    for r in 0..=6 {
        match universe.k_r(&x, r) {
            Some(k) => print!("r={r}:{k}  "),
            None => print!("r={r}:_|_  "),
        }
    }
    println!();

    // symmetry-of-information deviations over seeded tuples
    let constants = ToyConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_chain = 0.0f64;
    let mut worst_self = 0.0f64;
    let mut defined = 0;
    let total = 400;
    for _ in 0..total {
        let jitter = f64::powi(2.0, -6);
        let x = [0.5 * rng.gen_range(-1i32..=1) as f64 + rng.gen_range(-jitter..=jitter)];
        let y = [0.5 * rng.gen_range(-1i32..=1) as f64 + rng.gen_range(-jitter..=jitter)];
        let r = rng.gen_range(1..=3u32);
        let s = rng.gen_range(1..=r);
        let rep = verify_symmetry_of_information(&universe, &x, &y, r, s, &constants);
        if let (Some(c), Some(se)) = (rep.chain_deviation, rep.self_deviation) {
            defined += 1;
            worst_chain = worst_chain.max(c);
            worst_self = worst_self.max(se);
        }
    }
    println!("\nsymmetry of information over {defined}/{total} defined tuples:");
    println!("  worst chain deviation |K(x|y)+K(y)-K(x,y)| = {worst_chain}");
    println!("  worst self  deviation |K_(r,s)(x|x)+K_s(x)-K_r(x)| = {worst_self}");
    println!(
        "  frozen bound at r=1..3: {:.1} .. {:.1}",
        constants.symmetry_bound(1),
        constants.symmetry_bound(3)
    );
}
