//! Built-in golden instances with frozen capacities.

use serde::Deserialize;

use crate::capacity::{compute_capacity, CapacityError};
use crate::connectivity::{ConfigProcess, ConfigTable, ProbValue, RawProcess, DEFAULT_TABLE_LIMIT};
use crate::graph::{validate_network, EdgeMask, Network, RawNetwork};
use crate::sim::SweepSpec;

const SOURCES: &[(&str, &str)] = &[
    (
        "twolink-case1",
        include_str!("../fixtures/twolink-case1.json"),
    ),
    (
        "twolink-case2",
        include_str!("../fixtures/twolink-case2.json"),
    ),
    (
        "twolink-case3",
        include_str!("../fixtures/twolink-case3.json"),
    ),
    ("grid3x3", include_str!("../fixtures/grid3x3.json")),
    ("path3", include_str!("../fixtures/path3.json")),
    ("star3", include_str!("../fixtures/star3.json")),
    ("single-edge", include_str!("../fixtures/single-edge.json")),
];

const SWEEPS: &[(&str, &str)] = &[("delay-sweep", include_str!("../fixtures/delay-sweep.json"))];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub lambda_star: ProbValue,
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub name: String,
    pub origin: String,
    pub description: String,
    pub network: RawNetwork,
    pub process: RawProcess,
    pub expected: Expected,
}

impl Fixture {
    pub fn network(&self) -> Network {
        validate_network(&self.network).expect("fixture network is valid")
    }

    pub fn process(&self) -> ConfigProcess {
        self.process
            .resolve(&self.network())
            .expect("fixture process is valid")
    }

    pub fn table(&self) -> ConfigTable {
        self.process()
            .stationary_distribution(DEFAULT_TABLE_LIMIT)
            .expect("fixture table is small")
    }

    pub fn expected_lambda(&self) -> f64 {
        self.expected
            .lambda_star
            .value()
            .expect("fixture value parses")
    }

    /// Recompute the capacity and compare with the frozen value.
    pub fn verify(&self) -> Result<FixtureOutcome, CapacityError> {
        let res = compute_capacity(&self.network(), &self.table())?;
        let expected = self.expected_lambda();
        Ok(FixtureOutcome {
            name: self.name.clone(),
            expected,
            computed: res.lambda_star,
            pass: (res.lambda_star - expected).abs() <= self.expected.tol,
        })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FixtureOutcome {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub pass: bool,
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

pub fn get(name: &str) -> Option<Fixture> {
    SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| serde_json::from_str(src).expect("embedded fixture parses"))
}

pub fn all() -> Vec<Fixture> {
    names().filter_map(get).collect()
}

pub fn sweep_names() -> impl Iterator<Item = &'static str> {
    SWEEPS.iter().map(|(n, _)| *n)
}

/// Embedded sweep file by name.
pub fn sweep_spec(name: &str) -> Option<SweepSpec> {
    SWEEPS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| serde_json::from_str(src).expect("embedded sweep parses"))
}

/// Raw JSON of an embedded sweep spec.
pub fn sweep_source(name: &str) -> Option<&'static str> {
    SWEEPS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// `r -> a`, `r -> b`.
pub fn two_link_network() -> Network {
    get("twolink-case1").unwrap().network()
}

fn two_link_table(net: &Network, rows: &[(u64, f64)]) -> ConfigTable {
    let entries = rows
        .iter()
        .map(|&(bits, p)| (EdgeMask::from_bits(net.edge_count(), bits), p))
        .collect();
    ConfigTable::new(net.edge_count(), entries).unwrap()
}

/// All four configurations with probability 1/4.
pub fn two_link_case1(net: &Network) -> ConfigTable {
    two_link_table(net, &[(0, 0.25), (1, 0.25), (2, 0.25), (3, 0.25)])
}

/// Both ON or both OFF, 1/2 each.
pub fn two_link_case2(net: &Network) -> ConfigTable {
    two_link_table(net, &[(0, 0.5), (3, 0.5)])
}

/// Exactly one link ON, 1/2 each.
pub fn two_link_case3(net: &Network) -> ConfigTable {
    two_link_table(net, &[(1, 0.5), (2, 0.5)])
}

/// 3x3 grid with nodes `r a b / c d e / f g h`, links pointing right and down.
pub fn grid3x3() -> Network {
    get("grid3x3").unwrap().network()
}
