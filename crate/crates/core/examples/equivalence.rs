//! Proof equivalence: two proofs with different witnesses and rule orders
//! share a net; two proofs differing only in axiom pairing do not.
//!
//!     cargo run --example equivalence

use unets::calculus::{apply_commutation, commutation_sites, equivalent, parse_proof};

fn main() {
    let a = parse_proof("(exists 0 x f(c) (~P(x)) (exists 1 y f(c) (P(y)) (ax ~P(f(c)))))").unwrap();
    let b = parse_proof("(exists 1 y g(z) (P(y)) (exists 0 x g(z) (~P(x)) (ax ~P(g(z)))))").unwrap();
    println!("witness/order variants equivalent: {}", equivalent(&a, &b).unwrap());

    let straight = parse_proof("(par 0 (perm (0 2 1) (tensor (ax ~P(a)) (ax P(a)))))").unwrap();
    let crossed = parse_proof("(par 0 (perm (2 0 1) (tensor (ax ~P(a)) (ax P(a)))))").unwrap();
    println!("straight vs crossed equivalent: {}", equivalent(&straight, &crossed).unwrap());

    for (at, slot) in commutation_sites(&a) {
        let c = apply_commutation(&a, &at, slot).unwrap();
        println!("\ncommuted at {at:?}/{slot}:\n{c}");
    }
}
