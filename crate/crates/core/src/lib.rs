//! Broadcast capacity and max-weight broadcast scheduling on wireless DAGs
//! whose links switch ON and OFF over time.
//!
//! * [`graph`]: networks, activations (matchings) and cuts.
//! * [`connectivity`]: ON/OFF configuration processes and seeded sampling.
//! * [`capacity`]: exact capacity LP, bounds, the static approximation and
//!   the odd-set membership check.
//! * [`policy`]: packet frontiers, virtual queues, `π*`, `π′` and `π^RAND`.
//! * [`sim`]: the slotted simulator, stability verdicts and sweeps.
//! * [`cli`]: the `dagcast` command line.
//! * [`fixtures`]: bundled golden instances.
//!
//! Runnable examples live in `examples/`: `capacity_golden`, `static_grid`,
//! `edmonds_oracle`, `simulate_pistar`, `stale_state`, `rand_policy` and
//! `delay_sweep`.
//!
//! ```
//! use dagcast::capacity::compute_capacity;
//! use dagcast::fixtures;
//!
//! let net = fixtures::two_link_network();
//! let res = compute_capacity(&net, &fixtures::two_link_case1(&net)).unwrap();
//! assert!((res.lambda_star - 0.375).abs() < 1e-9);
//! ```

pub mod capacity;
pub mod cli;
pub mod connectivity;
pub mod fixtures;
pub mod graph;
pub mod lp;
pub mod policy;
pub mod sim;
