//! Recover a projection direction from two approximate points on a common
//! level set, and check the quadratic error bound across dimensions.
//!
//! Run: `cargo run --release --example direction_recovery`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fraclab::recovery::{alpha_for_dim, sample_instance, verify_direction_recovery};

fn main() {
    let per_dim = 4000;
    println!("instances per dimension: {per_dim}, r = 30, t in [1, 15]\n");
    for n in [2usize, 3, 4] {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
        let mut worst_exp = f64::NEG_INFINITY;
        let mut fails = 0usize;
        let mut max_err = 0.0f64;
        for _ in 0..per_dim {
            let inst = sample_instance(n, 30, 1.0, 15.0, false, &mut rng);
            let rep = verify_direction_recovery(&inst).expect("sampled instances are regular");
            // the exponent alpha would need to cover this instance:
            // error = 2^(-r + t + x)  =>  x = log2(error) + r - t
            if rep.error > 0.0 {
                let x = rep.error.log2() + rep.r as f64 - rep.t;
                worst_exp = worst_exp.max(x);
            }
            max_err = max_err.max(rep.error);
            if !rep.pass {
                fails += 1;
            }
        }
        println!(
            "n={n}: worst required exponent {:+.3}, frozen alpha {:+.1}, headroom {:+.3}, \
             failures {fails}, max error {max_err:.3e}",
            worst_exp,
            alpha_for_dim(n),
            alpha_for_dim(n) - worst_exp,
        );
    }

    // exact inputs recover the component to machine precision
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inst = sample_instance(3, 30, 1.0, 10.0, true, &mut rng);
    let rep = verify_direction_recovery(&inst).unwrap();
    println!(
        "\nexact-input instance: error {:.3e} (recovered {:+.12} vs true {:+.12})",
        rep.error, rep.recovered, rep.truth
    );
}
