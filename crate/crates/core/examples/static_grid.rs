//! Static capacity of the 3x3 grid, its optimal activation mixture, and the
//! bounds that hold when every link is ON with probability p.

use dagcast::capacity::{approx_capacity, capacity_bounds, compute_static_capacity};
use dagcast::fixtures;
use dagcast::graph::enumerate_matchings;

fn main() {
    let grid = fixtures::grid3x3();
    let all = enumerate_matchings(&grid, &grid.full_mask(), 1_000_000).unwrap();
    println!("matchings of the grid (empty included): {}", all.len());

    let res = compute_static_capacity(&grid).unwrap();
    println!("lambda*_stat = {:.6}", res.lambda_star);
    for (act, w) in &res.schedules[0].weights {
        let labels: Vec<String> = act.edges().iter().map(|&e| grid.edge_label(e)).collect();
        println!("  {w:.4}  {{{}}}", labels.join(", "));
    }
    for v in grid.receivers() {
        println!("  rate into {} = {:.4}", grid.name(v), res.node_rates[v]);
    }

    for p in [0.4, 0.6, 1.0] {
        let b = capacity_bounds(&grid, p).unwrap();
        let a = approx_capacity(&grid, p).unwrap();
        println!(
            "p = {p}: {:.3} <= lambda* <= {:.3}, p-approximation {:.3}",
            b.lower, b.upper, a.value
        );
    }
}
