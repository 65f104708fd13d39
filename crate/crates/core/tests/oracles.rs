mod common;

use std::sync::Arc;

use dagcast::capacity::{check_matching_polytope_membership, compute_capacity};
use dagcast::connectivity::{
    ConfigProcess, ConfigTable, IidLinkProcess, MarkovConfigProcess, RngStream,
};
use dagcast::fixtures;
use dagcast::graph::{enumerate_matchings, Activation, EdgeMask, Network};
use dagcast::policy::{delayed_view_update, DelayedView, FrontierState, PolicyError};
use dagcast::sim::{run, Arrivals, PolicyChoice, SimConfig, SimError};

/// All weight vectors on `k + 1` outcomes that are multiples of `1/steps`.
fn simplex_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == k {
            out.push(cur.iter().map(|&c| c as f64 / steps as f64).collect());
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k, left - c, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, steps, steps, &mut Vec::new(), &mut out);
    out
}

/// Best broadcast rate over a grid of per-configuration mixtures.
fn grid_search(net: &Network, table: &ConfigTable, steps: usize) -> f64 {
    let per: Vec<(f64, Vec<Activation>, Vec<Vec<f64>>)> = table
        .entries()
        .iter()
        .map(|(mask, p)| {
            let ms: Vec<Activation> = enumerate_matchings(net, mask, 1 << 16)
                .unwrap()
                .into_iter()
                .filter(|a| !a.is_empty())
                .collect();
            let grid = simplex_grid(ms.len(), steps);
            (*p, ms, grid)
        })
        .collect();
    let rate = |choice: &[usize]| -> f64 {
        let mut avg = vec![0.0; net.edge_count()];
        for ((p, ms, grid), &c) in per.iter().zip(choice) {
            for (a, w) in ms.iter().zip(&grid[c]) {
                for &e in a.edges() {
                    avg[e] += p * w;
                }
            }
        }
        net.receivers()
            .map(|v| {
                net.in_edges(v)
                    .iter()
                    .map(|&e| net.edge(e).cap as f64 * avg[e])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = 0.0f64;
    let mut choice = vec![0usize; per.len()];
    loop {
        best = best.max(rate(&choice));
        let mut i = 0;
        loop {
            if i == choice.len() {
                return best;
            }
            choice[i] += 1;
            if choice[i] < per[i].2.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn lp_matches_grid_search_on_small_instances() {
    let steps = 24;
    let mut rng = RngStream::new(42);
    let mut checked = 0;
    for n in 2..=3 {
        for net in common::rooted_dags(n) {
            for _ in 0..6 {
                let k = 1 + (rng.next_u64() % 2) as usize;
                let table = common::random_table(&mut rng, net.edge_count(), k);
                let lp = compute_capacity(&net, &table).unwrap().lambda_star;
                let brute = grid_search(&net, &table, steps);
                assert!(brute <= lp + 1e-9, "grid {brute} beats LP {lp}");
                assert!(
                    lp - brute <= 4.0 / steps as f64,
                    "LP {lp} far above grid {brute}"
                );
                checked += 1;
            }
        }
    }
    let net = fixtures::two_link_network();
    for (table, want) in [
        (fixtures::two_link_case1(&net), 0.375),
        (fixtures::two_link_case2(&net), 0.25),
        (fixtures::two_link_case3(&net), 0.5),
    ] {
        assert!((grid_search(&net, &table, steps) - want).abs() < 1e-12);
    }
    assert!(checked >= 24);
}

#[test]
fn grid_has_131_matchings() {
    let g = fixtures::grid3x3();
    assert_eq!(
        enumerate_matchings(&g, &g.full_mask(), 1 << 20)
            .unwrap()
            .len(),
        131
    );
}

#[test]
fn five_matching_certificate_reaches_two_fifths() {
    let g = fixtures::grid3x3();
    let e = |s: &str, d: &str| g.edge_by_name(s, d).unwrap();
    let m1 = [e("r", "a"), e("c", "d"), e("b", "e"), e("g", "h")];
    let m2 = [e("r", "a"), e("c", "f"), e("b", "e"), e("g", "h")];
    let m3 = [e("r", "c"), e("a", "b"), e("f", "g")];
    let m5 = [e("a", "d"), e("c", "f")];
    let mut beta = vec![0.0; 12];
    for m in [&m1[..], &m2[..], &m3[..], &m3[..], &m5[..]] {
        assert!(Activation::new(&g, &g.full_mask(), m).is_some());
        for &x in m {
            beta[x] += 0.2;
        }
    }
    for v in g.receivers() {
        let rate: f64 = g.in_edges(v).iter().map(|&x| beta[x]).sum();
        assert!((rate - 0.4).abs() < 1e-12, "node {}", g.name(v));
    }
    assert!(
        check_matching_polytope_membership(&g, &g.full_mask(), &beta, 1e-12)
            .unwrap()
            .is_inside()
    );
}

#[test]
fn staleness_over_a_half_on_link_is_geometric() {
    let net = Network::from_edges(2, 0, &[(0, 1, 1)]).unwrap();
    let mut view = DelayedView::new(&net);
    let mut rng = RngStream::new(8);
    let state = FrontierState::new(2);
    let mut ages = Vec::new();
    for t in 0..200_000u64 {
        let on = if rng.bernoulli(0.5) {
            net.full_mask()
        } else {
            net.empty_mask()
        };
        delayed_view_update(&net, &mut view, &on, &state, t, 1.0, &mut rng);
        if t >= 1000 && t % 50 == 0 {
            ages.push((t - view.last_exchange[0].unwrap()) as f64);
        }
    }
    // Slots since the last ON slot are geometric with mean (1 - p) / p = 1.
    let k = ages.len() as f64;
    let mean = ages.iter().sum::<f64>() / k;
    let se = (2.0f64 / k).sqrt();
    assert!((mean - 1.0).abs() < 3.0 * se, "mean age {mean}");
}

#[test]
fn rand_policy_design_from_the_process() {
    let net = Arc::new(fixtures::two_link_network());
    let chain = MarkovConfigProcess::new(
        vec![EdgeMask::from_bits(2, 3), EdgeMask::from_bits(2, 1)],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        0,
    )
    .unwrap();
    let cfg = SimConfig::new(
        net.clone(),
        Arc::new(ConfigProcess::Markov(chain)),
        PolicyChoice::Rand { lambda_design: 0.2 },
        Arrivals::Poisson(0.2),
        2000,
        1,
    );
    assert!(run(&cfg).is_ok());

    let iid = Arc::new(ConfigProcess::Iid(IidLinkProcess::uniform(2, 0.5).unwrap()));
    let mut cfg = SimConfig::new(
        net.clone(),
        iid.clone(),
        PolicyChoice::Rand { lambda_design: 0.5 },
        Arrivals::Poisson(0.2),
        2000,
        1,
    );
    assert!(matches!(
        run(&cfg),
        Err(SimError::Policy(PolicyError::RateAboveCapacity { .. }))
    ));
    cfg.policy = PolicyChoice::Rand { lambda_design: 0.3 };
    assert!(run(&cfg).is_ok());
}
