//! π′ schedules from views refreshed only over ON links. With every link
//! ON it makes exactly the decisions π* makes.

use std::sync::Arc;

use dagcast::connectivity::{ConfigProcess, IidLinkProcess};
use dagcast::fixtures;
use dagcast::sim::{run, Arrivals, PolicyChoice, SimConfig};

fn main() {
    let net = Arc::new(fixtures::grid3x3());
    let cfg = |p: f64, policy, lambda| {
        let process = Arc::new(ConfigProcess::Iid(IidLinkProcess::uniform(12, p).unwrap()));
        SimConfig::new(
            net.clone(),
            process,
            policy,
            Arrivals::Poisson(lambda),
            100_000,
            7,
        )
    };

    let a = run(&cfg(1.0, PolicyChoice::Pistar, 0.3)).unwrap();
    let b = run(&cfg(1.0, PolicyChoice::piprime(), 0.3)).unwrap();
    println!(
        "p = 1: pistar digest {}, piprime digest {}",
        a.trace_digest, b.trace_digest
    );

    for lambda in [0.1, 0.15, 0.2, 0.25] {
        let pi = run(&cfg(0.6, PolicyChoice::piprime(), lambda)).unwrap();
        let ps = run(&cfg(0.6, PolicyChoice::Pistar, lambda)).unwrap();
        println!(
            "p = 0.6, lambda = {lambda}: piprime delay {:.2} (max |W'-W| = {}), pistar delay {:.2}",
            pi.mean_delay.unwrap_or(f64::NAN),
            pi.max_weight_gap.unwrap_or(0),
            ps.mean_delay.unwrap_or(f64::NAN),
        );
    }
}
