//! Helpers shared by the integration tests.
#![allow(dead_code)]

use dagcast::connectivity::{ConfigTable, RngStream};
use dagcast::graph::{enumerate_matchings, EdgeMask, Network};
use dagcast::lp::LinearProgram;

/// Every DAG on `n` nodes with edges `i -> j` for `i < j` in which each node
/// other than 0 has an in-edge. Every unit-capacity DAG with a single root
/// is isomorphic to one of these.
pub fn rooted_dags(n: usize) -> Vec<Network> {
    let mut out = Vec::new();
    let mut choice = vec![0u32; n];
    fn rec(n: usize, j: usize, choice: &mut Vec<u32>, out: &mut Vec<Network>) {
        if j == n {
            let mut edges = Vec::new();
            for (d, &bits) in choice.iter().enumerate().skip(1) {
                for s in 0..d {
                    if bits >> s & 1 == 1 {
                        edges.push((s, d, 1));
                    }
                }
            }
            out.push(Network::from_edges(n, 0, &edges).expect("rooted dag"));
            return;
        }
        for bits in 1..(1u32 << j) {
            choice[j] = bits;
            rec(n, j + 1, choice, out);
        }
    }
    rec(n, 1, &mut choice, &mut out);
    out
}

/// Random rooted DAG: node `j` gets one in-edge from a uniform earlier
/// node, then extra forward edges are added up to `max_edges`.
pub fn random_dag(rng: &mut RngStream, n: usize, max_edges: usize, max_cap: u32) -> Network {
    let mut edges: Vec<(usize, usize)> = (1..n)
        .map(|j| ((rng.next_u64() % j as u64) as usize, j))
        .collect();
    let target = (n - 1) + (rng.next_u64() % (max_edges + 2 - n) as u64) as usize;
    let mut tries = 0;
    while edges.len() < target && tries < 200 {
        tries += 1;
        let a = (rng.next_u64() % n as u64) as usize;
        let b = (rng.next_u64() % n as u64) as usize;
        let (s, d) = (a.min(b), a.max(b));
        if s != d && !edges.contains(&(s, d)) {
            edges.push((s, d));
        }
    }
    let caps: Vec<(usize, usize, u32)> = edges
        .into_iter()
        .map(|(s, d)| (s, d, 1 + (rng.next_u64() % max_cap as u64) as u32))
        .collect();
    Network::from_edges(n, 0, &caps).expect("random dag")
}

/// Random table with `k` distinct masks and probabilities that are
/// multiples of 1/64.
pub fn random_table(rng: &mut RngStream, m: usize, k: usize) -> ConfigTable {
    let mut masks: Vec<u64> = Vec::new();
    while masks.len() < k.min(1 << m) {
        let b = rng.next_u64() & ((1u64 << m) - 1);
        if !masks.contains(&b) {
            masks.push(b);
        }
    }
    let mut units = vec![1u64; masks.len()];
    for _ in masks.len()..64 {
        units[(rng.next_u64() % masks.len() as u64) as usize] += 1;
    }
    let entries = masks
        .iter()
        .zip(&units)
        .map(|(&b, &u)| (EdgeMask::from_bits(m, b), u as f64 / 64.0))
        .collect();
    ConfigTable::new(m, entries).expect("random table")
}

/// Largest `t <= 2` with `t β` in the convex hull of the matchings inside
/// `on`; the hull is down-closed, so a nonnegative `β` is a member iff
/// `t >= 1`.
pub fn hull_scale(net: &Network, on: &EdgeMask, beta: &[f64]) -> f64 {
    let matchings: Vec<_> = enumerate_matchings(net, on, 1 << 20)
        .unwrap()
        .into_iter()
        .filter(|a| !a.is_empty())
        .collect();
    let cols = 1 + matchings.len();
    let mut obj = vec![0.0; cols];
    obj[0] = 1.0;
    let mut lp = LinearProgram::new(obj);
    for (e, &b) in beta.iter().enumerate() {
        let mut row = vec![0.0; cols];
        row[0] = b;
        for (k, a) in matchings.iter().enumerate() {
            if a.mask().contains(e) {
                row[k + 1] = -1.0;
            }
        }
        lp.add_le(row, 0.0);
    }
    let mut row = vec![1.0; cols];
    row[0] = 0.0;
    lp.add_le(row, 1.0);
    let mut cap = vec![0.0; cols];
    cap[0] = 1.0;
    lp.add_le(cap, 2.0);
    lp.solve().expect("hull lp").objective
}
