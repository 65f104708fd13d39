//! Immutable network model: validated DAGs, edge masks, proper cuts and
//! enumeration of feasible activations under primary interference.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

/// Default guard for [`enumerate_matchings`].
pub const DEFAULT_MATCHING_LIMIT: usize = 1_000_000;
/// Default guard for [`all_proper_cuts`], in nodes.
pub const DEFAULT_CUT_NODE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("network has a cycle through back edge {src} -> {dst}")]
    Cycle { src: String, dst: String },
    #[error("node {0} is not reachable from the source")]
    Unreachable(String),
    #[error("edge {src} -> {dst} has capacity {cap}; capacities must be integers >= 1")]
    Capacity { src: String, dst: String, cap: i64 },
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: String, dst: String },
    #[error("duplicate node name {0}")]
    DuplicateNode(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("network must have at least one node")]
    Empty,
    #[error("edge mask has length {got}, network has {expected} edges")]
    MaskLength { expected: usize, got: usize },
    #[error("more than {limit} matchings")]
    TooManyMatchings { limit: usize },
    #[error("the source has no single-node cut")]
    SourceCut,
    #[error("{nodes} nodes exceed the proper-cut enumeration limit of {limit}")]
    TooManyCuts { nodes: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub cap: u32,
}

/// Raw network description as read from a JSON network file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNetwork {
    pub nodes: Vec<String>,
    pub source: String,
    pub edges: Vec<RawEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEdge {
    pub src: String,
    pub dst: String,
    pub cap: i64,
}

/// Interference model. Only node-exclusive (primary) interference ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interference {
    #[default]
    Primary,
}

impl Interference {
    /// Whether `edge` may be added to a feasible set whose busy nodes are `busy`.
    fn admits(self, edge: &Edge, busy: &[bool]) -> bool {
        match self {
            Interference::Primary => !busy[edge.src] && !busy[edge.dst],
        }
    }
}

/// Validated, immutable network. Edges are stored sorted by `(src, dst)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    source: NodeId,
    edges: Vec<Edge>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
    interference: Interference,
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn interference(&self) -> Interference {
        self.interference
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn edge_id(&self, src: NodeId, dst: NodeId) -> Option<EdgeId> {
        self.edges
            .binary_search_by(|e| (e.src, e.dst).cmp(&(src, dst)))
            .ok()
    }

    pub fn edge_by_name(&self, src: &str, dst: &str) -> Result<EdgeId, GraphError> {
        let s = self
            .node_id(src)
            .ok_or_else(|| GraphError::UnknownNode(src.to_string()))?;
        let d = self
            .node_id(dst)
            .ok_or_else(|| GraphError::UnknownNode(dst.to_string()))?;
        self.edge_id(s, d)
            .ok_or_else(|| GraphError::UnknownNode(format!("{src}->{dst}")))
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.in_edges[v].iter().map(move |&e| self.edges[e].src)
    }

    pub fn out_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out_edges[v].iter().map(move |&e| self.edges[e].dst)
    }

    pub fn max_capacity(&self) -> u32 {
        self.edges.iter().map(|e| e.cap).max().unwrap_or(0)
    }

    /// Non-source nodes in id order.
    pub fn receivers(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).filter(move |&v| v != self.source)
    }

    pub fn full_mask(&self) -> EdgeMask {
        EdgeMask::full(self.edge_count())
    }

    pub fn empty_mask(&self) -> EdgeMask {
        EdgeMask::empty(self.edge_count())
    }

    pub fn edge_label(&self, e: EdgeId) -> String {
        let edge = &self.edges[e];
        format!("{}->{}", self.names[edge.src], self.names[edge.dst])
    }

    /// Build a network from integer ids, naming node `i` as `"{i}"`.
    pub fn from_edges(
        n: usize,
        source: NodeId,
        edges: &[(NodeId, NodeId, u32)],
    ) -> Result<Network, GraphError> {
        let raw = RawNetwork {
            nodes: (0..n).map(|i| i.to_string()).collect(),
            source: source.to_string(),
            edges: edges
                .iter()
                .map(|&(s, d, c)| RawEdge {
                    src: s.to_string(),
                    dst: d.to_string(),
                    cap: c as i64,
                })
                .collect(),
        };
        validate_network(&raw)
    }

    pub fn to_raw(&self) -> RawNetwork {
        RawNetwork {
            nodes: self.names.clone(),
            source: self.names[self.source].clone(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    src: self.names[e.src].clone(),
                    dst: self.names[e.dst].clone(),
                    cap: e.cap as i64,
                })
                .collect(),
        }
    }
}

/// Validate a raw description: unique names, positive integral capacities,
/// no duplicate edges, acyclic, every node reachable from the source.
pub fn validate_network(raw: &RawNetwork) -> Result<Network, GraphError> {
    if raw.nodes.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut index = HashMap::with_capacity(raw.nodes.len());
    for (i, name) in raw.nodes.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(GraphError::DuplicateNode(name.clone()));
        }
    }
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    };
    let source = lookup(&raw.source)?;

    let mut edges = Vec::with_capacity(raw.edges.len());
    let mut seen = BTreeSet::new();
    for re in &raw.edges {
        let src = lookup(&re.src)?;
        let dst = lookup(&re.dst)?;
        if re.cap < 1 || re.cap > u32::MAX as i64 {
            return Err(GraphError::Capacity {
                src: re.src.clone(),
                dst: re.dst.clone(),
                cap: re.cap,
            });
        }
        if !seen.insert((src, dst)) {
            return Err(GraphError::DuplicateEdge {
                src: re.src.clone(),
                dst: re.dst.clone(),
            });
        }
        edges.push(Edge {
            src,
            dst,
            cap: re.cap as u32,
        });
    }
    edges.sort_by_key(|e| (e.src, e.dst));

    let n = raw.nodes.len();
    let mut in_edges = vec![Vec::new(); n];
    let mut out_edges = vec![Vec::new(); n];
    for (id, e) in edges.iter().enumerate() {
        out_edges[e.src].push(id);
        in_edges[e.dst].push(id);
    }

    if let Some((u, v)) = find_back_edge(n, &edges, &out_edges) {
        return Err(GraphError::Cycle {
            src: raw.nodes[u].clone(),
            dst: raw.nodes[v].clone(),
        });
    }

    let mut reached = vec![false; n];
    let mut stack = vec![source];
    reached[source] = true;
    while let Some(u) = stack.pop() {
        for &e in &out_edges[u] {
            let v = edges[e].dst;
            if !reached[v] {
                reached[v] = true;
                stack.push(v);
            }
        }
    }
    if let Some(v) = reached.iter().position(|r| !r) {
        return Err(GraphError::Unreachable(raw.nodes[v].clone()));
    }

    Ok(Network {
        names: raw.nodes.clone(),
        index,
        source,
        edges,
        in_edges,
        out_edges,
        interference: Interference::Primary,
    })
}

/// Iterative DFS; returns the first back edge in id order, if any.
fn find_back_edge(n: usize, edges: &[Edge], out: &[Vec<EdgeId>]) -> Option<(NodeId, NodeId)> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < out[u].len() {
                let v = edges[out[u][*next]].dst;
                *next += 1;
                match color[v] {
                    0 => {
                        color[v] = 1;
                        stack.push((v, 0));
                    }
                    1 => return Some((u, v)),
                    _ => {}
                }
            } else {
                color[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Topological order with the source first; ties go to the smallest id.
pub fn topological_order(net: &Network) -> Vec<NodeId> {
    let n = net.node_count();
    let mut indeg: Vec<usize> = (0..n).map(|v| net.in_edges(v).len()).collect();
    let mut ready: BTreeSet<NodeId> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = ready.pop_first() {
        order.push(u);
        for v in net.out_neighbors(u) {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.insert(v);
            }
        }
    }
    // Every node is reachable from the source, so the source is the only
    // node without in-edges and therefore comes first.
    debug_assert_eq!(order.first(), Some(&net.source()));
    order
}

/// Subset of the edge set, stored as a little-endian bit vector.
///
/// Masks order by the integer value of their bit pattern, edge 0 being the
/// least significant bit. This is the canonical order used for matchings.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeMask {
    len: usize,
    words: Vec<u64>,
}

impl EdgeMask {
    pub fn empty(len: usize) -> EdgeMask {
        EdgeMask {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> EdgeMask {
        let mut m = EdgeMask::empty(len);
        for e in 0..len {
            m.insert(e);
        }
        m
    }

    pub fn from_edges(len: usize, edges: impl IntoIterator<Item = EdgeId>) -> EdgeMask {
        let mut m = EdgeMask::empty(len);
        for e in edges {
            m.insert(e);
        }
        m
    }

    /// Mask for `len <= 64` from its integer bit pattern.
    pub fn from_bits(len: usize, bits: u64) -> EdgeMask {
        assert!(len <= 64, "from_bits supports at most 64 edges");
        let mut m = EdgeMask::empty(len);
        if len > 0 {
            let keep = if len == 64 {
                u64::MAX
            } else {
                (1u64 << len) - 1
            };
            m.words[0] = bits & keep;
        }
        m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        e < self.len && self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn insert(&mut self, e: EdgeId) {
        assert!(
            e < self.len,
            "edge {e} out of range for mask of length {}",
            self.len
        );
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn remove(&mut self, e: EdgeId) {
        if e < self.len {
            self.words[e / 64] &= !(1 << (e % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.len).filter(move |&e| self.contains(e))
    }

    pub fn is_subset(&self, other: &EdgeMask) -> bool {
        self.len == other.len
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn check_len(&self, net: &Network) -> Result<(), GraphError> {
        if self.len == net.edge_count() {
            Ok(())
        } else {
            Err(GraphError::MaskLength {
                expected: net.edge_count(),
                got: self.len,
            })
        }
    }
}

impl Ord for EdgeMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for EdgeMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for EdgeMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A feasible link activation: a matching contained in some ON set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Activation {
    mask: EdgeMask,
    edges: Vec<EdgeId>,
}

impl Activation {
    pub fn empty(m: usize) -> Activation {
        Activation {
            mask: EdgeMask::empty(m),
            edges: Vec::new(),
        }
    }

    /// Checked constructor: `edges` must form a matching inside `on`.
    pub fn new(net: &Network, on: &EdgeMask, edges: &[EdgeId]) -> Option<Activation> {
        let mask = EdgeMask::from_edges(net.edge_count(), edges.iter().copied());
        if mask.count() != edges.len() || !is_feasible(net, &mask) || !mask.is_subset(on) {
            return None;
        }
        Some(Activation::from_mask_unchecked(mask))
    }

    pub(crate) fn from_mask_unchecked(mask: EdgeMask) -> Activation {
        let edges = mask.iter().collect();
        Activation { mask, edges }
    }

    pub fn mask(&self) -> &EdgeMask {
        &self.mask
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Incidence vector as `f64`.
    pub fn incidence(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.mask.len()];
        for &e in &self.edges {
            v[e] = 1.0;
        }
        v
    }
}

impl fmt::Debug for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.edges.iter()).finish()
    }
}

/// Feasibility under the network's interference model.
pub fn is_feasible(net: &Network, mask: &EdgeMask) -> bool {
    let mut busy = vec![false; net.node_count()];
    for e in mask.iter() {
        let edge = net.edge(e);
        if !net.interference().admits(edge, &busy) {
            return false;
        }
        busy[edge.src] = true;
        busy[edge.dst] = true;
    }
    true
}

/// All feasible activations inside `on`, the empty one included, in
/// canonical mask order.
pub fn enumerate_matchings(
    net: &Network,
    on: &EdgeMask,
    limit: usize,
) -> Result<Vec<Activation>, GraphError> {
    on.check_len(net)?;
    let candidates: Vec<EdgeId> = on.iter().collect();
    let mut busy = vec![false; net.node_count()];
    let mut current = EdgeMask::empty(net.edge_count());
    let mut out = Vec::new();
    extend_matchings(
        net,
        &candidates,
        0,
        &mut busy,
        &mut current,
        &mut out,
        limit,
    )?;
    out.sort_unstable();
    Ok(out
        .into_iter()
        .map(Activation::from_mask_unchecked)
        .collect())
}

fn extend_matchings(
    net: &Network,
    candidates: &[EdgeId],
    from: usize,
    busy: &mut [bool],
    current: &mut EdgeMask,
    out: &mut Vec<EdgeMask>,
    limit: usize,
) -> Result<(), GraphError> {
    if out.len() >= limit {
        return Err(GraphError::TooManyMatchings { limit });
    }
    out.push(current.clone());
    for (k, &e) in candidates.iter().enumerate().skip(from) {
        let edge = *net.edge(e);
        if !net.interference().admits(&edge, busy) {
            continue;
        }
        busy[edge.src] = true;
        busy[edge.dst] = true;
        current.insert(e);
        extend_matchings(net, candidates, k + 1, busy, current, out, limit)?;
        current.remove(e);
        busy[edge.src] = false;
        busy[edge.dst] = false;
    }
    Ok(())
}

/// Cut vector `u` of a proper partition `(U, V \ U)` with the source in `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutVector {
    /// Membership of `U`, indexed by node.
    pub side: Vec<bool>,
    pub weights: Vec<f64>,
}

impl CutVector {
    fn from_side(net: &Network, side: Vec<bool>) -> CutVector {
        let weights = net
            .edges()
            .iter()
            .map(|e| {
                if side[e.src] && !side[e.dst] {
                    e.cap as f64
                } else {
                    0.0
                }
            })
            .collect();
        CutVector { side, weights }
    }

    pub fn dot(&self, beta: &[f64]) -> f64 {
        self.weights.iter().zip(beta).map(|(u, b)| u * b).sum()
    }
}

/// Cut `V \ {j}`: carries `c_e` exactly on the in-edges of `j`.
pub fn single_node_cut(net: &Network, j: NodeId) -> Result<CutVector, GraphError> {
    if j == net.source() {
        return Err(GraphError::SourceCut);
    }
    let mut side = vec![true; net.node_count()];
    side[j] = false;
    Ok(CutVector::from_side(net, side))
}

/// Every proper cut, ordered by the bit pattern of `U \ {r}` over the
/// remaining nodes in id order.
pub fn all_proper_cuts(net: &Network, node_limit: usize) -> Result<Vec<CutVector>, GraphError> {
    let n = net.node_count();
    if n > node_limit || n > 63 {
        return Err(GraphError::TooManyCuts {
            nodes: n,
            limit: node_limit.min(63),
        });
    }
    let others: Vec<NodeId> = net.receivers().collect();
    let full = (1u64 << others.len()) - 1;
    let mut cuts = Vec::with_capacity(full as usize);
    for bits in 0..full {
        let mut side = vec![false; n];
        side[net.source()] = true;
        for (k, &v) in others.iter().enumerate() {
            side[v] = bits >> k & 1 == 1;
        }
        cuts.push(CutVector::from_side(net, side));
    }
    Ok(cuts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(nodes: &[&str], edges: &[(&str, &str, i64)]) -> RawNetwork {
        RawNetwork {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            source: nodes[0].to_string(),
            edges: edges
                .iter()
                .map(|&(s, d, c)| RawEdge {
                    src: s.into(),
                    dst: d.into(),
                    cap: c,
                })
                .collect(),
        }
    }

    /// Brute force: every subset of the ON edges, filtered by pairwise
    /// disjointness of endpoints.
    fn brute_force_matching_count(net: &Network, on: &EdgeMask) -> usize {
        let on_edges: Vec<EdgeId> = on.iter().collect();
        let k = on_edges.len();
        (0u64..1 << k)
            .filter(|bits| {
                let chosen: Vec<&Edge> = (0..k)
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| net.edge(on_edges[i]))
                    .collect();
                chosen.iter().enumerate().all(|(a, x)| {
                    chosen[a + 1..].iter().all(|y| {
                        x.src != y.src && x.src != y.dst && x.dst != y.src && x.dst != y.dst
                    })
                })
            })
            .count()
    }

    #[test]
    fn minimal_dag_is_valid() {
        let net = validate_network(&raw(&["r", "a"], &[("r", "a", 1)])).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.edge_count(), 1);
        assert_eq!(net.source(), 0);
    }

    #[test]
    fn triangle_cycle_is_rejected() {
        let err = validate_network(&raw(
            &["r", "a", "b"],
            &[("r", "a", 1), ("a", "b", 1), ("b", "r", 1)],
        ))
        .unwrap_err();
        assert!(matches!(err, GraphError::Cycle { .. }), "{err:?}");
    }

    #[test]
    fn unreachable_and_capacity_errors() {
        let err =
            validate_network(&raw(&["r", "a", "b"], &[("r", "a", 1), ("b", "a", 1)])).unwrap_err();
        assert_eq!(err, GraphError::Unreachable("b".into()));
        let err = validate_network(&raw(&["r", "a"], &[("r", "a", 0)])).unwrap_err();
        assert!(matches!(err, GraphError::Capacity { cap: 0, .. }));
        let err = validate_network(&raw(&["r", "a"], &[("r", "a", 1), ("r", "a", 2)])).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { .. }));
        let err = validate_network(&raw(&["r", "a"], &[("r", "x", 1)])).unwrap_err();
        assert_eq!(err, GraphError::UnknownNode("x".into()));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let err = validate_network(&raw(&["r", "a"], &[("r", "a", 1), ("a", "a", 1)])).unwrap_err();
        assert_eq!(
            err,
            GraphError::Cycle {
                src: "a".into(),
                dst: "a".into()
            }
        );
    }

    #[test]
    fn two_links_from_source_share_a_node() {
        let net = Network::from_edges(3, 0, &[(0, 1, 1), (0, 2, 1)]).unwrap();
        let all = enumerate_matchings(&net, &net.full_mask(), DEFAULT_MATCHING_LIMIT).unwrap();
        let sets: Vec<Vec<EdgeId>> = all.iter().map(|a| a.edges().to_vec()).collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![1]]);
    }

    #[test]
    fn empty_on_set_has_only_empty_matching() {
        let net = Network::from_edges(3, 0, &[(0, 1, 1), (0, 2, 1)]).unwrap();
        let all = enumerate_matchings(&net, &net.empty_mask(), 10).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_empty());
    }

    #[test]
    fn matching_limit_is_enforced() {
        let net = Network::from_edges(4, 0, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let err = enumerate_matchings(&net, &net.full_mask(), 3).unwrap_err();
        assert_eq!(err, GraphError::TooManyMatchings { limit: 3 });
        assert_eq!(
            enumerate_matchings(&net, &net.full_mask(), 5)
                .unwrap()
                .len(),
            5
        );
    }

    #[test]
    fn canonical_order_is_integer_bit_order() {
        let net = Network::from_edges(4, 0, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let all = enumerate_matchings(&net, &net.full_mask(), 100).unwrap();
        let sets: Vec<Vec<EdgeId>> = all.iter().map(|a| a.edges().to_vec()).collect();
        // bit values: 0, 1, 2, 4, 5
        assert_eq!(sets, vec![vec![], vec![0], vec![1], vec![2], vec![0, 2]]);
    }

    #[test]
    fn mask_length_mismatch() {
        let net = Network::from_edges(2, 0, &[(0, 1, 1)]).unwrap();
        assert!(matches!(
            enumerate_matchings(&net, &EdgeMask::empty(3), 10),
            Err(GraphError::MaskLength { .. })
        ));
    }

    #[test]
    fn matching_counts_match_brute_force_on_small_graphs() {
        let k4: Vec<(usize, usize, u32)> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j, 1)))
            .collect();
        let net = Network::from_edges(4, 0, &k4).unwrap();
        for bits in 0..1u64 << net.edge_count() {
            let on = EdgeMask::from_bits(net.edge_count(), bits);
            let all = enumerate_matchings(&net, &on, 1000).unwrap();
            assert_eq!(all.len(), brute_force_matching_count(&net, &on));
            for a in &all {
                assert!(is_feasible(&net, a.mask()) && a.mask().is_subset(&on));
            }
        }
    }

    #[test]
    fn single_node_cuts() {
        let net = Network::from_edges(3, 0, &[(0, 1, 3), (0, 2, 1), (1, 2, 1)]).unwrap();
        let u1 = single_node_cut(&net, 1).unwrap();
        assert_eq!(u1.weights, vec![3.0, 0.0, 0.0]);
        let u2 = single_node_cut(&net, 2).unwrap();
        assert_eq!(u2.weights, vec![0.0, 1.0, 1.0]);
        assert_eq!(single_node_cut(&net, 0).unwrap_err(), GraphError::SourceCut);
    }

    #[test]
    fn proper_cut_counts() {
        let net = Network::from_edges(2, 0, &[(0, 1, 1)]).unwrap();
        assert_eq!(all_proper_cuts(&net, 20).unwrap().len(), 1);
        let net = Network::from_edges(3, 0, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let cuts = all_proper_cuts(&net, 20).unwrap();
        assert_eq!(cuts.len(), 3);
        assert!(cuts.iter().all(|c| c.side[0]));
        assert!(matches!(
            all_proper_cuts(&net, 2),
            Err(GraphError::TooManyCuts { .. })
        ));
    }

    #[test]
    fn topological_orders() {
        let chain = Network::from_edges(3, 0, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(topological_order(&chain), vec![0, 1, 2]);
        let diamond =
            Network::from_edges(4, 0, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        let order = topological_order(&diamond);
        assert_eq!(order.first(), Some(&0));
        assert_eq!(order.last(), Some(&3));
        // Source need not carry id 0.
        let net = Network::from_edges(3, 2, &[(2, 0, 1), (0, 1, 1)]).unwrap();
        assert_eq!(topological_order(&net), vec![2, 0, 1]);
    }

    #[test]
    fn mask_ordering_and_subset() {
        let a = EdgeMask::from_edges(70, [0, 65]);
        let b = EdgeMask::from_edges(70, [1, 2, 3]);
        assert!(b < a);
        assert!(EdgeMask::from_edges(70, [65]).is_subset(&a));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 65]);
        assert_eq!(a.count(), 2);
    }
}
