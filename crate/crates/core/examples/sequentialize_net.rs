//! Read sequent proofs back from nets, including one whose cut needs a substitution.
//!
//!     cargo run --example sequentialize_net

use unets::calculus::translate;
use unets::nets::{sequentialize, sequentialize_cuts, Linking};

fn main() {
    let plain = Linking::parse("~P | all x. ~Q(x), ex y. (P * Q(y))\nlinks: (0 2) (1 3)").unwrap();
    let p = sequentialize(&plain).expect("correct nets sequentialize");
    println!("{p}\n");
    assert_eq!(translate(&p).unwrap(), plain);

    let cut = Linking::parse("P(f(x)), cut{~P(y) ; P(y)}, ex z. ~P(z)\nlinks: (0 2) (1 3)").unwrap();
    let q = sequentialize_cuts(&cut).expect("correct nets sequentialize");
    println!("{q}");
}
