//! Operation counts per channel use for every algorithm row.
//!
//! `cargo run --example complexity_table -- [nt] [nr] [m] [L]`

use relaxbp::cli::{complexity_table, ComplexityArgs};

fn main() {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().expect("integer argument"));
    let args = ComplexityArgs {
        nt: args.next().unwrap_or(4),
        nr: args.next().unwrap_or(4),
        m: args.next().unwrap_or(1),
        l: args.next().unwrap_or(5),
        rd1: None,
        rd2: 0,
        csv: false,
    };
    println!("{:<16} {:>12} {:>12} {:>12}", "algorithm", "mults", "adds", "comps");
    for (label, ops) in complexity_table(&args) {
        println!(
            "{label:<16} {:>12} {:>12} {:>12}",
            ops.multiplications, ops.additions, ops.comparisons
        );
    }
}
