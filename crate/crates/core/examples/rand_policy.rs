//! The randomized reference policy on the static grid: designed versus
//! measured incoming rate per node.

use std::sync::Arc;

use dagcast::capacity::compute_static_capacity;
use dagcast::connectivity::{ConfigProcess, ConfigTable};
use dagcast::fixtures;
use dagcast::policy::build_rand_policy;
use dagcast::sim::{run, Arrivals, PolicyChoice, SimConfig};

fn main() {
    let lambda = 0.3;
    let net = Arc::new(fixtures::grid3x3());
    let table = ConfigTable::all_on(net.edge_count());
    let cap = compute_static_capacity(&net).unwrap();
    let spec = build_rand_policy(&net, &table, lambda, &cap).unwrap();

    let process = Arc::new(ConfigProcess::Table(table));
    let cfg = SimConfig::new(
        net.clone(),
        process,
        PolicyChoice::Rand {
            lambda_design: lambda,
        },
        Arrivals::Poisson(lambda),
        100_000,
        11,
    );
    let r = run(&cfg).unwrap();
    println!("node label     q   target  measured  (std err)");
    for v in net.receivers() {
        println!(
            "{:<4} {:>5} {:>6.3} {:>7.4} {:>9.4}  ({:.4})",
            net.name(v),
            spec.labels[v],
            spec.q[v],
            spec.targets[v],
            r.incoming[v].mean,
            r.incoming[v].std_err
        );
    }
    println!("stable: {:?}", r.stability.map(|v| v.stable));
}
