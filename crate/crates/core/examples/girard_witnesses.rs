//! Unfold nets into Girard nets with explicit witnesses, and watch the
//! witnesses grow while the unification nets stay small.
//!
//!     cargo run --example girard_witnesses

use unets::cutelim::girard_normalize;
use unets::families::{girard_chain, par_blowup};
use unets::nets::{girard_of, unet_of_girard, Linking};

fn main() {
    let l = Linking::parse("(ex x. ~P(x)) | (all y. P(y))\nlinks: (0 1)").unwrap();
    let g = girard_of(&l, 1000).unwrap();
    println!("{g}\n");
    assert_eq!(unet_of_girard(&g), l);

    for i in 0..=6 {
        let g = girard_of(&par_blowup(i), 1_000_000).unwrap();
        println!("A_{i}: net size {:>2}, witness size {:>4}", par_blowup(i).size(), g.term_size());
    }

    let (nf, stats) = girard_normalize(&girard_chain(4), 1_000_000).unwrap();
    println!("\nGirard elimination: {} steps, peak term with {} variable occurrences", stats.steps, stats.peak_term_vars);
    println!("{}", unet_of_girard(&nf));
}
