//! Run π* on the static 3x3 grid below and above its capacity of 2/5.
//!
//! `cargo run --release --example simulate_pistar -- [slots] [seed]`

use std::sync::Arc;

use dagcast::connectivity::{ConfigProcess, ConfigTable};
use dagcast::fixtures;
use dagcast::sim::{run, Arrivals, PolicyChoice, SimConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let slots: u64 = args.next().map_or(200_000, |s| s.parse().expect("slots"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let net = Arc::new(fixtures::grid3x3());
    let process = Arc::new(ConfigProcess::Table(ConfigTable::all_on(net.edge_count())));

    println!("lambda  delivered  mean_delay  slope      verdict");
    for lambda in [0.30, 0.34, 0.36, 0.38, 0.40, 0.42, 0.44, 0.50] {
        let cfg = SimConfig::new(
            net.clone(),
            process.clone(),
            PolicyChoice::Pistar,
            Arrivals::Poisson(lambda),
            slots,
            seed,
        );
        let r = run(&cfg).expect("simulation runs");
        let v = r.stability.expect("horizon long enough for a verdict");
        println!(
            "{lambda:<7.2} {:<10.4} {:<11.2} {:<10.5} {}",
            r.delivered_rate,
            r.mean_delay.unwrap_or(f64::NAN),
            v.slope,
            if v.stable { "stable" } else { "unstable" }
        );
    }
}
