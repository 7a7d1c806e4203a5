//! Decide correctness of two linkings that differ only in where ⊗ and ⅋ sit.
//!
//!     cargo run --example check_net

use unets::nets::{build_graph, check_correct, Linking, Verdict};

fn main() {
    let nets = [
        "~P | all x. ~Q(x), ex y. (P * Q(y))\nlinks: (0 2) (1 3)",
        "~P * all x. ~Q(x), ex y. (P | Q(y))\nlinks: (0 2) (1 3)",
    ];
    for src in nets {
        let l = Linking::parse(src).expect("valid linking");
        let g = build_graph(&l).expect("unifiable");
        let report = check_correct(&l).expect("well formed");
        println!("{}", l.host);
        print!("  mgu: {}", g.mgu);
        println!("  leaps: {}, switchings: {}", g.leaps.len(), g.graph.switching_count());
        match &report.verdict {
            Verdict::SwitchingFailure { witness: Some(w), .. } => {
                println!("  {} (kept edges {:?})", report.verdict, w.choice)
            }
            v => println!("  {v}"),
        }
        println!("  checked in {:?} using {} store nodes\n", report.elapsed, report.store_nodes);
    }
}
