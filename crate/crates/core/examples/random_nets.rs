//! Sample random proofs, translate them, and relink them at random to see
//! how often an arbitrary linking is still correct.
//!
//!     cargo run --example random_nets [seed]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unets::calculus::translate;
use unets::nets::check_correct;
use unets::sample::{random_proof, relink, SampleConfig};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_proof(&mut rng, &SampleConfig::with_cuts(1));
    println!("{p}\n");
    let l = translate(&p).unwrap();
    println!("{l}\n");

    let (mut ok, trials) = (0, 200);
    for _ in 0..trials {
        let r = relink(&mut rng, &l);
        ok += usize::from(check_correct(&r).unwrap().verdict.is_correct());
    }
    println!("{ok} of {trials} random relinkings are correct");
}
