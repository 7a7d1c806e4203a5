//! Eliminate cuts: the fast normalizer, then a traced random-order run.
//!
//!     cargo run --example normalize_cuts

use unets::cutelim::{find_redexes, normalize, normalize_with, NormalizeOptions, Strategy};
use unets::families::cut_chain;
use unets::nets::Linking;

fn main() {
    let l = Linking::parse("all x. ~P(f(x)), cut{ex y. P(y) ; all y. ~P(y)}, ex z. (P(z) * (~Q(z) | Q(z)))\nlinks: (0 4) (1 5) (2 3)")
        .expect("valid linking");
    for r in find_redexes(&l) {
        println!("redex: {r}");
    }
    let (nf, steps) = normalize(&l);
    println!("normal form after {steps} steps:\n{nf}\n");

    let chain = cut_chain(3);
    let opts = NormalizeOptions { strategy: Strategy::Random(7), verify: true, trace: true };
    let run = normalize_with(&chain, &opts).expect("every step stays correct");
    for (i, net) in run.trace.iter().enumerate() {
        println!("step {i}: {} cuts, size {}", net.host.cuts.len(), net.size());
    }
    assert_eq!(run.net, normalize(&chain).0);
}
