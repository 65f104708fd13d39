//! Recompute every bundled golden instance, in floating point and exactly.

use dagcast::capacity::{compute_capacity, compute_capacity_rational};
use dagcast::fixtures;

fn main() {
    println!(
        "{:<15} {:>10} {:>10} {:>8}  tight nodes",
        "fixture", "lambda*", "exact", "frozen"
    );
    for f in fixtures::all() {
        let net = f.network();
        let table = f.table();
        let res = compute_capacity(&net, &table).expect("capacity");
        let exact = compute_capacity_rational(&net, &table).expect("exact capacity");
        let tight: Vec<&str> = res.tight_nodes.iter().map(|&v| net.name(v)).collect();
        println!(
            "{:<15} {:>10.6} {:>10} {:>8}  {}",
            f.name,
            res.lambda_star,
            exact.to_string(),
            if f.verify().unwrap().pass {
                "ok"
            } else {
                "MISMATCH"
            },
            tight.join(",")
        );
    }
}
