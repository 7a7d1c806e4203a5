//! Benchmark the three families: check time, normalization steps and Girard
//! witness growth.
//!
//!     cargo run --release --example blowup_families

use unets::cli::bench_row;
use unets::families::Family;
use unets::nets::CheckOptions;

fn main() {
    for family in Family::ALL {
        println!("{family}");
        println!("{:>4} {:>6} {:>12} {:>6} {:>8}", "n", "size", "check", "steps", "girard");
        for n in [1, 2, 4, 8, 12, 16] {
            let row = bench_row(family, n, 1_000_000, &CheckOptions::default()).unwrap();
            let girard = row.girard.map_or("cap".to_string(), |g| g.to_string());
            println!("{:>4} {:>6} {:>12?} {:>6} {:>8}", row.n, row.size, row.check_time, row.steps, girard);
        }
        println!();
    }
}
