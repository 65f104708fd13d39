//! Mean broadcast delay of π′ on the grid against λ for three ON
//! probabilities, written as CSV to stdout.
//!
//! `cargo run --release --example delay_sweep > delays.csv`

use dagcast::fixtures;
use dagcast::sim::{sweep, write_sweep_csv};

fn main() {
    let spec = fixtures::sweep_spec("delay-sweep").unwrap();
    let rows = sweep(&spec.points().unwrap());
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "lambda {} p {}: {}",
            r.lambda,
            r.p,
            r.error.as_deref().unwrap()
        );
    }
    write_sweep_csv(&rows, std::io::stdout()).unwrap();
}
