//! Packet state under in-order delivery, virtual queues, and the three
//! activation modules: max-weight `π*`, stale-state `π′`, and the
//! stationary randomized reference `π^RAND`.
//!
//! Every node holds the prefix `1..=R_j` of the packet stream. A node may
//! receive a packet only once all of its in-neighbors hold it, so its
//! deficit `X_j = min_{i ∈ in(j)} (R_i - R_j)` is never negative.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::capacity::CapacityResult;
use crate::connectivity::{ConfigTable, RngStream};
use crate::graph::{
    enumerate_matchings, topological_order, Activation, EdgeId, EdgeMask, GraphError, Network,
    NodeId, DEFAULT_MATCHING_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("design rate {lambda} is not below the capacity {lambda_star}")]
    RateAboveCapacity { lambda: f64, lambda_star: f64 },
    #[error("configuration {0:?} is not in the design distribution")]
    UnknownConfiguration(EdgeMask),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `R_j(t)`: every node holds packets `1..=R_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrontierState {
    r: Vec<u64>,
}

impl FrontierState {
    pub fn new(n: usize) -> FrontierState {
        FrontierState { r: vec![0; n] }
    }

    pub fn from_counts(r: Vec<u64>) -> FrontierState {
        FrontierState { r }
    }

    pub fn get(&self, v: NodeId) -> u64 {
        self.r[v]
    }

    pub fn counts(&self) -> &[u64] {
        &self.r
    }

    /// Exogenous arrivals at the source.
    pub fn arrive(&mut self, net: &Network, packets: u64) {
        self.r[net.source()] += packets;
    }

    /// Smallest frontier over the receivers: packets held by every node.
    pub fn delivered(&self, net: &Network) -> u64 {
        net.receivers()
            .map(|v| self.r[v])
            .min()
            .unwrap_or(self.r[net.source()])
    }
}

/// `X_j` and `i*(j)`; both are unset at the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualQueues {
    pub x: Vec<i64>,
    pub istar: Vec<Option<NodeId>>,
}

impl VirtualQueues {
    pub fn total(&self) -> i64 {
        self.x.iter().sum()
    }
}

/// Deficits from an arbitrary node-value lookup. In-neighbors are visited in
/// increasing id, so a strict comparison keeps the lexicographic argmin.
fn queues_from(net: &Network, value: impl Fn(NodeId, NodeId) -> u64) -> VirtualQueues {
    let n = net.node_count();
    let mut x = vec![0i64; n];
    let mut istar = vec![None; n];
    for j in net.receivers() {
        let mut best: Option<(i64, NodeId)> = None;
        for i in net.in_neighbors(j) {
            let d = value(j, i) as i64 - value(j, j) as i64;
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, i));
            }
        }
        if let Some((d, i)) = best {
            x[j] = d;
            istar[j] = Some(i);
        }
    }
    VirtualQueues { x, istar }
}

pub fn compute_virtual_queues(net: &Network, state: &FrontierState) -> VirtualQueues {
    queues_from(net, |_, v| state.r[v])
}

/// `K_j = { m ∈ out(j) : i*(m) = j }`, each sorted by id.
pub fn compute_k_sets(net: &Network, vq: &VirtualQueues) -> Vec<Vec<NodeId>> {
    let mut k = vec![Vec::new(); net.node_count()];
    for m in net.receivers() {
        if let Some(j) = vq.istar[m] {
            k[j].push(m);
        }
    }
    k
}

/// `W_ij = X_j - Σ_{k ∈ K_j} X_k` on ON edges, 0 elsewhere.
pub fn compute_weights(
    net: &Network,
    vq: &VirtualQueues,
    k: &[Vec<NodeId>],
    sigma: &EdgeMask,
) -> Vec<i64> {
    let node_weight: Vec<i64> = (0..net.node_count())
        .map(|j| vq.x[j] - k[j].iter().map(|&m| vq.x[m]).sum::<i64>())
        .collect();
    net.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            if sigma.contains(e) {
                node_weight[edge.dst]
            } else {
                0
            }
        })
        .collect()
}

/// Lazily enumerated matchings per configuration.
#[derive(Debug, Clone)]
pub struct MatchingCache {
    map: HashMap<EdgeMask, Arc<Vec<Activation>>>,
    limit: usize,
}

impl Default for MatchingCache {
    fn default() -> Self {
        MatchingCache::new(DEFAULT_MATCHING_LIMIT)
    }
}

impl MatchingCache {
    pub fn new(limit: usize) -> MatchingCache {
        MatchingCache {
            map: HashMap::new(),
            limit,
        }
    }

    pub fn get(
        &mut self,
        net: &Network,
        sigma: &EdgeMask,
    ) -> Result<Arc<Vec<Activation>>, GraphError> {
        if let Some(v) = self.map.get(sigma) {
            return Ok(v.clone());
        }
        let all = Arc::new(enumerate_matchings(net, sigma, self.limit)?);
        self.map.insert(sigma.clone(), all.clone());
        Ok(all)
    }
}

/// Score `Σ_e c_e W_e` of an activation.
pub fn activation_score(net: &Network, act: &Activation, weights: &[i64]) -> i64 {
    act.edges()
        .iter()
        .map(|&e| net.edge(e).cap as i64 * weights[e])
        .sum()
}

/// Max-weight activation among `matchings` (canonical order, empty first);
/// the first maximizer wins.
pub fn select_max_weight(net: &Network, matchings: &[Activation], weights: &[i64]) -> Activation {
    let mut best: Option<(&Activation, i64)> = None;
    for a in matchings {
        let s = activation_score(net, a, weights);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((a, s));
        }
    }
    best.map_or_else(|| Activation::empty(net.edge_count()), |(a, _)| a.clone())
}

/// One `π*` decision from true state.
pub fn pistar_activate(
    net: &Network,
    sigma: &EdgeMask,
    state: &FrontierState,
    cache: &mut MatchingCache,
) -> Result<Activation, GraphError> {
    let vq = compute_virtual_queues(net, state);
    let k = compute_k_sets(net, &vq);
    let w = compute_weights(net, &vq, &k, sigma);
    Ok(select_max_weight(net, &cache.get(net, sigma)?, &w))
}

fn schedule_with(
    net: &Network,
    state: &mut FrontierState,
    act: &Activation,
    ceiling: impl Fn(NodeId) -> u64,
) -> Vec<u64> {
    let mut moved = vec![0u64; net.edge_count()];
    for &e in act.edges() {
        let j = net.edge(e).dst;
        let room = ceiling(j).saturating_sub(state.r[j]);
        moved[e] = room.min(net.edge(e).cap as u64);
    }
    // Applied after all amounts are fixed: receptions use slot-start state.
    for &e in act.edges() {
        state.r[net.edge(e).dst] += moved[e];
    }
    moved
}

/// Deliver `min(c_e, min_{k ∈ in(j)} R_k - R_j)` packets on each active
/// edge `(i, j)`. Returns the packets moved per edge.
pub fn schedule_packets(net: &Network, state: &mut FrontierState, act: &Activation) -> Vec<u64> {
    let snapshot = state.r.clone();
    schedule_with(net, state, act, |j| {
        net.in_neighbors(j).map(|k| snapshot[k]).min().unwrap_or(0)
    })
}

/// As [`schedule_packets`], with the ceiling taken from each receiver's
/// own view of its in-neighbors. Views never exceed the truth, so the
/// result is still admissible.
pub fn schedule_packets_with_view(
    net: &Network,
    state: &mut FrontierState,
    act: &Activation,
    view: &DelayedView,
) -> Vec<u64> {
    schedule_with(net, state, act, |j| {
        net.in_neighbors(j)
            .map(|k| view.value(j, k))
            .min()
            .unwrap_or(0)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LindleyViolation {
    pub node: NodeId,
    pub lhs: i64,
    pub rhs: i64,
}

/// `X_j(t+1) <= (X_j(t) - Σ_k μ_kj)^+ + Σ_m μ_{m, i*(j)}` for every `j`.
///
/// `moved` holds the packets delivered per edge between the two snapshots
/// and `source_inflow` the arrivals that entered the source.
pub fn lindley_check(
    net: &Network,
    prev: &VirtualQueues,
    moved: &[u64],
    source_inflow: u64,
    next: &VirtualQueues,
) -> Result<(), LindleyViolation> {
    let inflow = |v: NodeId| -> i64 {
        if v == net.source() {
            source_inflow as i64
        } else {
            net.in_edges(v).iter().map(|&e| moved[e] as i64).sum()
        }
    };
    for j in net.receivers() {
        let Some(i) = prev.istar[j] else { continue };
        let rhs = (prev.x[j] - inflow(j)).max(0) + inflow(i);
        if next.x[j] > rhs {
            return Err(LindleyViolation {
                node: j,
                lhs: next.x[j],
                rhs,
            });
        }
    }
    Ok(())
}

/// Path `r -> ... -> j` obtained by following `i*` pointers back from `j`.
pub fn construct_path(net: &Network, vq: &VirtualQueues, j: NodeId) -> Vec<NodeId> {
    let mut path = vec![j];
    let mut u = j;
    while u != net.source() {
        match vq.istar[u] {
            Some(i) => {
                path.push(i);
                u = i;
            }
            None => break,
        }
    }
    path.reverse();
    path
}

/// Stale packet-state knowledge.
///
/// Node `j` keeps a value and a stamp for every node. Its own entry is
/// always current. Whenever a link is ON its endpoints merge their tables,
/// keeping the freshest entry per node. Two exchange rounds per slot let
/// values travel two hops, which is what the weights need.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedView {
    n: usize,
    value: Vec<u64>,
    stamp: Vec<u64>,
    /// Last slot each edge carried an exchange.
    pub last_exchange: Vec<Option<u64>>,
}

/// Exchange rounds per slot.
pub const VIEW_ROUNDS: usize = 2;

impl DelayedView {
    pub fn new(net: &Network) -> DelayedView {
        let n = net.node_count();
        DelayedView {
            n,
            value: vec![0; n * n],
            stamp: vec![0; n * n],
            last_exchange: vec![None; net.edge_count()],
        }
    }

    /// `j`'s last known value of `R_i`.
    pub fn value(&self, j: NodeId, i: NodeId) -> u64 {
        self.value[j * self.n + i]
    }

    /// Slot at which `j`'s entry for `i` was produced.
    pub fn stamp(&self, j: NodeId, i: NodeId) -> u64 {
        self.stamp[j * self.n + i]
    }

    fn merge_into(&mut self, from: &DelayedView, a: NodeId, b: NodeId) {
        let n = self.n;
        for x in 0..n {
            let (ia, ib) = (a * n + x, b * n + x);
            if from.stamp[ib] > self.stamp[ia]
                || (from.stamp[ib] == self.stamp[ia] && from.value[ib] > self.value[ia])
            {
                self.stamp[ia] = from.stamp[ib];
                self.value[ia] = from.value[ib];
            }
        }
    }
}

/// Refresh own entries, then exchange over ON links. Each ON link carries
/// an exchange with probability `update_prob`; no randomness is drawn when
/// it is 1.
pub fn delayed_view_update(
    net: &Network,
    view: &mut DelayedView,
    sigma: &EdgeMask,
    state: &FrontierState,
    slot: u64,
    update_prob: f64,
    rng: &mut RngStream,
) {
    let n = view.n;
    // Stamps are slot + 1 so that slot 0 beats the initial zero stamp.
    let now = slot + 1;
    for j in 0..n {
        view.value[j * n + j] = state.r[j];
        view.stamp[j * n + j] = now;
    }
    let active: Vec<EdgeId> = sigma
        .iter()
        .filter(|_| update_prob >= 1.0 || rng.bernoulli(update_prob))
        .collect();
    for &e in &active {
        view.last_exchange[e] = Some(slot);
    }
    for _ in 0..VIEW_ROUNDS {
        let before = view.clone();
        for &e in &active {
            let edge = net.edge(e);
            view.merge_into(&before, edge.src, edge.dst);
            view.merge_into(&before, edge.dst, edge.src);
        }
    }
}

/// Weights `W′` where every term of `W′_ij` comes from `j`'s own view.
pub fn stale_weights(net: &Network, view: &DelayedView, sigma: &EdgeMask) -> Vec<i64> {
    // X′ of node m as seen by node j.
    let seen = |j: NodeId, m: NodeId| -> (i64, Option<NodeId>) {
        let mut best: Option<(i64, NodeId)> = None;
        for i in net.in_neighbors(m) {
            let d = view.value(j, i) as i64 - view.value(j, m) as i64;
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, i));
            }
        }
        best.map_or((0, None), |(d, i)| (d, Some(i)))
    };
    let node_weight: Vec<i64> = (0..net.node_count())
        .map(|j| {
            if j == net.source() {
                return 0;
            }
            let own = seen(j, j).0;
            let children: i64 = net
                .out_neighbors(j)
                .map(|m| seen(j, m))
                .filter(|(_, i)| *i == Some(j))
                .map(|(x, _)| x)
                .sum();
            own - children
        })
        .collect();
    net.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            if sigma.contains(e) {
                node_weight[edge.dst]
            } else {
                0
            }
        })
        .collect()
}

/// One `π′` decision from the stale views.
pub fn piprime_activate(
    net: &Network,
    sigma: &EdgeMask,
    view: &DelayedView,
    cache: &mut MatchingCache,
) -> Result<Activation, GraphError> {
    let w = stale_weights(net, view, sigma);
    Ok(select_max_weight(net, &cache.get(net, sigma)?, &w))
}

/// Stationary randomized policy designed for a target rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RandPolicySpec {
    pub lambda: f64,
    pub epsilon: f64,
    /// Per configuration: activations with selection probabilities.
    pub configs: Vec<(EdgeMask, Vec<(Activation, f64)>)>,
    /// Thinning probability of each node's in-edges (1 at the source).
    pub q: Vec<f64>,
    /// 1-based topological label per node; the source is 1.
    pub labels: Vec<usize>,
    /// Designed incoming rate `λ + ε l / |V|` per node (λ at the source).
    pub targets: Vec<f64>,
    /// Incoming rate of the unthinned mixture per node.
    pub cut_rates: Vec<f64>,
    index: HashMap<EdgeMask, usize>,
}

impl RandPolicySpec {
    /// Expected incoming rate once thinned: `q_l` times the cut rate.
    pub fn expected_rate(&self, v: NodeId) -> f64 {
        self.q[v] * self.cut_rates[v]
    }
}

/// `α` from the capacity optimum; `q_l` from
/// `q_l · (incoming rate of v_l) = λ + ε l / |V|`, clamped to `[0, 1]`.
pub fn build_rand_policy(
    net: &Network,
    dist: &ConfigTable,
    lambda: f64,
    cap: &CapacityResult,
) -> Result<RandPolicySpec, PolicyError> {
    if !(lambda >= 0.0 && lambda < cap.lambda_star) {
        return Err(PolicyError::RateAboveCapacity {
            lambda,
            lambda_star: cap.lambda_star,
        });
    }
    let epsilon = cap.lambda_star - lambda;
    let n = net.node_count();
    let mut labels = vec![0; n];
    for (pos, v) in topological_order(net).into_iter().enumerate() {
        labels[v] = pos + 1;
    }
    let mut q = vec![1.0; n];
    let mut targets = vec![lambda; n];
    for v in net.receivers() {
        targets[v] = lambda + epsilon * labels[v] as f64 / n as f64;
        q[v] = (targets[v] / cap.node_rates[v]).clamp(0.0, 1.0);
    }
    let mut configs = Vec::with_capacity(dist.len());
    let mut index = HashMap::new();
    for (i, (mask, _)) in dist.entries().iter().enumerate() {
        let weights = cap
            .schedule_for(mask)
            .map(|s| s.weights.clone())
            .unwrap_or_else(|| vec![(Activation::empty(net.edge_count()), 1.0)]);
        configs.push((mask.clone(), weights));
        index.insert(mask.clone(), i);
    }
    Ok(RandPolicySpec {
        lambda,
        epsilon,
        configs,
        q,
        labels,
        targets,
        cut_rates: cap.node_rates.clone(),
        index,
    })
}

/// Sample `s_k^σ ~ α^σ`, then keep each selected edge with the receiver's `q`.
pub fn rand_activate(
    net: &Network,
    spec: &RandPolicySpec,
    sigma: &EdgeMask,
    rng: &mut RngStream,
) -> Result<Activation, PolicyError> {
    let &i = spec
        .index
        .get(sigma)
        .ok_or_else(|| PolicyError::UnknownConfiguration(sigma.clone()))?;
    let options = &spec.configs[i].1;
    let probs: Vec<f64> = options.iter().map(|(_, p)| *p).collect();
    let chosen = &options[rng.categorical(&probs)].0;
    let mut mask = EdgeMask::empty(net.edge_count());
    for &e in chosen.edges() {
        let q = spec.q[net.edge(e).dst];
        if q >= 1.0 || (q > 0.0 && rng.bernoulli(q)) {
            mask.insert(e);
        }
    }
    Ok(Activation::from_mask_unchecked(mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::compute_static_capacity;
    use crate::fixtures;

    /// r feeds a, b, c; all three feed j.
    fn three_node() -> (Network, FrontierState) {
        let net = Network::from_edges(
            5,
            0,
            &[
                (0, 1, 10),
                (0, 2, 10),
                (0, 3, 10),
                (1, 4, 10),
                (2, 4, 10),
                (3, 4, 10),
            ],
        )
        .unwrap();
        (net, FrontierState::from_counts(vec![20, 18, 15, 14, 10]))
    }

    fn chain() -> Network {
        Network::from_edges(3, 0, &[(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    #[test]
    fn three_node_virtual_queue_and_reception() {
        let (net, mut state) = three_node();
        let vq = compute_virtual_queues(&net, &state);
        assert_eq!(vq.x[4], 4);
        assert_eq!(vq.istar[4], Some(3));
        let k = compute_k_sets(&net, &vq);
        assert!(k[3].contains(&4) && !k[1].contains(&4) && !k[2].contains(&4));
        let cj = net.edge_id(3, 4).unwrap();
        let act = Activation::new(&net, &net.full_mask(), &[cj]).unwrap();
        let moved = schedule_packets(&net, &mut state, &act);
        assert_eq!(moved[cj], 4);
        assert_eq!(state.get(4), 14);
        let path = construct_path(&net, &vq, 4);
        assert_eq!(path, vec![0, 3, 4]);
    }

    #[test]
    fn ties_break_to_smallest_id() {
        let net = Network::from_edges(4, 0, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        let state = FrontierState::from_counts(vec![9, 5, 5, 2]);
        let vq = compute_virtual_queues(&net, &state);
        assert_eq!((vq.x[3], vq.istar[3]), (3, Some(1)));
        let equal = FrontierState::from_counts(vec![4; 4]);
        assert!(compute_virtual_queues(&net, &equal)
            .x
            .iter()
            .all(|&x| x == 0));
    }

    #[test]
    fn chain_weights() {
        let net = chain();
        let state = FrontierState::from_counts(vec![7, 5, 0]);
        let vq = compute_virtual_queues(&net, &state);
        assert_eq!(vq.x, vec![0, 2, 5]);
        let k = compute_k_sets(&net, &vq);
        assert_eq!(k, vec![vec![1], vec![2], vec![]]);
        let w = compute_weights(&net, &vq, &k, &net.full_mask());
        assert_eq!(w, vec![-3, 5]);
        let off = compute_weights(&net, &vq, &k, &EdgeMask::from_edges(2, [1]));
        assert_eq!(off, vec![0, 5]);
        assert_eq!(construct_path(&net, &vq, 2), vec![0, 1, 2]);
    }

    #[test]
    fn max_weight_selection() {
        let net = fixtures::two_link_network();
        let mut cache = MatchingCache::default();
        let all = cache.get(&net, &net.full_mask()).unwrap();
        assert_eq!(select_max_weight(&net, &all, &[5, 3]).edges(), &[0]);
        assert!(select_max_weight(&net, &all, &[-1, 0]).is_empty());
        assert!(select_max_weight(&net, &all, &[0, 0]).is_empty());
        let off = cache.get(&net, &net.empty_mask()).unwrap();
        assert!(select_max_weight(&net, &off, &[5, 3]).is_empty());
    }

    #[test]
    fn capacity_limits_transfer() {
        let net = chain();
        let mut state = FrontierState::from_counts(vec![6, 4, 0]);
        let act = Activation::new(&net, &net.full_mask(), &[1]).unwrap();
        assert_eq!(schedule_packets(&net, &mut state, &act), vec![0, 1]);
        let mut flat = FrontierState::from_counts(vec![3, 3, 3]);
        let act = Activation::new(&net, &net.full_mask(), &[0]).unwrap();
        assert_eq!(schedule_packets(&net, &mut flat, &act), vec![0, 0]);
    }

    #[test]
    fn lindley_detects_corruption() {
        let net = chain();
        let state = FrontierState::from_counts(vec![5, 3, 1]);
        let vq = compute_virtual_queues(&net, &state);
        assert!(lindley_check(&net, &vq, &[0, 0], 0, &vq).is_ok());
        let mut bad = vq.clone();
        bad.x[2] += 10;
        assert_eq!(
            lindley_check(&net, &vq, &[0, 0], 0, &bad).unwrap_err().node,
            2
        );
    }

    #[test]
    fn views_follow_on_links() {
        let net = Network::from_edges(2, 0, &[(0, 1, 1)]).unwrap();
        let mut view = DelayedView::new(&net);
        let mut rng = RngStream::new(0);
        let mut state = FrontierState::new(2);
        state.arrive(&net, 3);
        delayed_view_update(&net, &mut view, &net.full_mask(), &state, 0, 1.0, &mut rng);
        assert_eq!(view.value(1, 0), 3);
        for t in 1..6 {
            state.arrive(&net, 1);
            delayed_view_update(&net, &mut view, &net.empty_mask(), &state, t, 1.0, &mut rng);
            assert_eq!(view.value(1, 0), 3);
            assert_eq!(view.value(0, 0), 3 + t);
        }
    }

    #[test]
    fn full_view_reproduces_true_weights() {
        let grid = fixtures::grid3x3();
        let mut rng = RngStream::new(3);
        let mut state = FrontierState::new(9);
        let mut view = DelayedView::new(&grid);
        let mut cache = MatchingCache::default();
        for t in 0..200 {
            state.arrive(&grid, rng.poisson(0.35));
            let sigma = grid.full_mask();
            delayed_view_update(&grid, &mut view, &sigma, &state, t, 1.0, &mut rng);
            let vq = compute_virtual_queues(&grid, &state);
            let k = compute_k_sets(&grid, &vq);
            assert_eq!(
                stale_weights(&grid, &view, &sigma),
                compute_weights(&grid, &vq, &k, &sigma)
            );
            let a = pistar_activate(&grid, &sigma, &state, &mut cache).unwrap();
            let b = piprime_activate(&grid, &sigma, &view, &mut cache).unwrap();
            assert_eq!(a, b);
            schedule_packets(&grid, &mut state, &a);
        }
    }

    #[test]
    fn rand_policy_targets() {
        let grid = fixtures::grid3x3();
        let table = ConfigTable::all_on(12);
        let cap = compute_static_capacity(&grid).unwrap();
        let spec = build_rand_policy(&grid, &table, 0.3, &cap).unwrap();
        assert!((spec.epsilon - 0.1).abs() < 1e-9);
        let order = topological_order(&grid);
        for w in order[1..].windows(2) {
            let (u, v) = (w[0], w[1]);
            assert!(spec.targets[u] < spec.targets[v]);
        }
        for v in grid.receivers() {
            let want = 0.3 + 0.1 * spec.labels[v] as f64 / 9.0;
            assert!((spec.expected_rate(v) - want).abs() < 1e-9);
            assert!((0.0..=1.0).contains(&spec.q[v]));
        }
        assert!(matches!(
            build_rand_policy(&grid, &table, 0.4, &cap),
            Err(PolicyError::RateAboveCapacity { .. })
        ));
        let zero = build_rand_policy(&grid, &table, 0.0, &cap).unwrap();
        assert!(grid.receivers().all(|v| zero.q[v] > 0.0));
        let mut rng = RngStream::new(1);
        assert!(matches!(
            rand_activate(&grid, &spec, &grid.empty_mask(), &mut rng),
            Err(PolicyError::UnknownConfiguration(_))
        ));
    }

    #[test]
    fn rand_extremes() {
        let grid = fixtures::grid3x3();
        let table = ConfigTable::all_on(12);
        let cap = compute_static_capacity(&grid).unwrap();
        let mut spec = build_rand_policy(&grid, &table, 0.3, &cap).unwrap();
        let mut rng = RngStream::new(5);
        spec.q = vec![0.0; 9];
        for _ in 0..50 {
            assert!(rand_activate(&grid, &spec, &grid.full_mask(), &mut rng)
                .unwrap()
                .is_empty());
        }
        spec.q = vec![1.0; 9];
        let options: Vec<Activation> = spec.configs[0].1.iter().map(|(a, _)| a.clone()).collect();
        for _ in 0..50 {
            let a = rand_activate(&grid, &spec, &grid.full_mask(), &mut rng).unwrap();
            assert!(options.contains(&a));
        }
    }
}
