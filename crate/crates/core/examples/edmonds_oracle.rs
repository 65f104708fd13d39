//! Odd-set test of the matching polytope: the triangle's half point is
//! rejected, every optimal per-configuration activation mixture is accepted.

use dagcast::capacity::{check_matching_polytope_membership, compute_capacity};
use dagcast::fixtures;
use dagcast::graph::Network;

fn main() {
    let tri = Network::from_edges(3, 0, &[(0, 1, 1), (0, 2, 1), (1, 2, 1)]).unwrap();
    let verdict =
        check_matching_polytope_membership(&tri, &tri.full_mask(), &[0.5, 0.5, 0.5], 1e-9).unwrap();
    println!("triangle (1/2, 1/2, 1/2): {verdict:?}");

    for f in fixtures::all() {
        let net = f.network();
        let res = compute_capacity(&net, &f.table()).unwrap();
        for s in &res.schedules {
            let m = check_matching_polytope_membership(&net, &s.mask, &s.beta(), 1e-9).unwrap();
            println!("{:<14} sigma {:?}: {:?}", f.name, s.mask, m);
        }
    }
}
