//! Check a sequent proof and read off its unification net.
//!
//!     cargo run --example translate_proof

use unets::calculus::{check_proof, parse_proof, skeleton, translate, verify_unification_proof};

const PROOF: &str = "
(par 0
  (forall 1 y
    (exists 0 x y (~P(x))
      (ax ~P(y)))))";

fn main() {
    let p = parse_proof(PROOF).expect("parses");
    println!("conclusion: {}", check_proof(&p).expect("checks"));
    let net = translate(&p).expect("translates");
    println!("net:\n{net}");
    // Erasing witnesses leaves a proof whose axioms need only be unifiable.
    let u = skeleton(&p);
    println!("skeleton:\n{u}\nvalid: {}", verify_unification_proof(&u).is_valid());
}
