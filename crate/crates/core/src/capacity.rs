//! Broadcast capacity of a time-varying DAG.
//!
//! The capacity is the optimum of an LP over one convex combination of
//! matchings per configuration: maximize `λ` subject to, for every
//! non-source node `v`,
//!
//! ```text
//! λ <= Σ_{e ∈ in(v)} c_e Σ_σ p(σ) β_σ(e),    β_σ = Σ_k α_k^σ s_k^σ
//! ```
//!
//! with `α^σ` in the simplex. Matchings are enumerated explicitly, so the
//! variables are the weights `α_k^σ`. Because the empty matching is always
//! feasible the simplex constraint is relaxed to `Σ_k α_k^σ <= 1` over the
//! non-empty matchings, leaving a problem whose origin is feasible.
//!
//! [`check_matching_polytope_membership`] tests a vector against the
//! odd-set description of the matching polytope and serves as an
//! independent check on every optimal `β_σ`.

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::connectivity::{ConfigTable, ProcessError};
use crate::graph::{
    all_proper_cuts, enumerate_matchings, single_node_cut, Activation, CutVector, EdgeId, EdgeMask,
    GraphError, Network, NodeId, DEFAULT_CUT_NODE_LIMIT, DEFAULT_MATCHING_LIMIT,
};
use crate::lp::{LinearProgram, LpError, LpScalar};

/// Default refusal threshold on tableau size (rows x columns).
pub const DEFAULT_LP_CELL_LIMIT: usize = 20_000_000;
/// Default guard on nodes for odd-set enumeration.
pub const DEFAULT_ODD_SET_NODE_LIMIT: usize = 20;
/// Relative tolerance when reporting tight nodes.
const TIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("LP solver failed: {source} ({rows} rows, {cols} columns)")]
    LpNumericalFailure {
        source: LpError,
        rows: usize,
        cols: usize,
    },
    #[error("capacity LP would have {rows} rows and {cols} columns (cell limit {limit})")]
    LpTooLarge {
        rows: usize,
        cols: usize,
        limit: usize,
    },
    #[error("probability {0} must lie in (0, 1]")]
    BadProbability(f64),
    #[error("configuration table has {got} edges, network has {expected}")]
    TableMismatch { expected: usize, got: usize },
    #[error("odd-set check needs 2^{nodes} subsets (node limit {limit})")]
    TooManyOddSets { nodes: usize, limit: usize },
    #[error("beta has {got} entries, network has {expected} edges")]
    BetaLength { expected: usize, got: usize },
}

/// Which cut constraints enter the LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutConstraints {
    /// One constraint per non-source node.
    #[default]
    SingleNode,
    /// Every proper cut (exponential; for verification).
    AllProper,
}

#[derive(Debug, Clone)]
pub struct CapacityOptions {
    pub match_limit: usize,
    pub lp_cell_limit: usize,
    pub cuts: CutConstraints,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions {
            match_limit: DEFAULT_MATCHING_LIMIT,
            lp_cell_limit: DEFAULT_LP_CELL_LIMIT,
            cuts: CutConstraints::SingleNode,
        }
    }
}

/// Optimal activation distribution for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSchedule {
    pub mask: EdgeMask,
    pub prob: f64,
    /// Activations with positive weight, canonical order; weights sum to 1.
    pub weights: Vec<(Activation, f64)>,
}

impl ConfigSchedule {
    /// `β_σ = Σ_k α_k s_k` as an edge vector.
    pub fn beta(&self) -> Vec<f64> {
        let mut beta = vec![0.0; self.mask.len()];
        for (a, w) in &self.weights {
            for &e in a.edges() {
                beta[e] += w;
            }
        }
        beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub lambda_star: f64,
    pub schedules: Vec<ConfigSchedule>,
    /// Nodes whose single-node cut attains the optimum, sorted by id.
    pub tight_nodes: Vec<NodeId>,
    /// `u_j · Σ_σ p(σ) β_σ` per node (0 at the source).
    pub node_rates: Vec<f64>,
}

impl CapacityResult {
    /// Time-averaged activation `Σ_σ p(σ) β_σ`.
    pub fn mean_activation(&self) -> Vec<f64> {
        let m = self.schedules.first().map_or(0, |s| s.mask.len());
        let mut avg = vec![0.0; m];
        for s in &self.schedules {
            for (e, b) in s.beta().into_iter().enumerate() {
                avg[e] += s.prob * b;
            }
        }
        avg
    }

    pub fn schedule_for(&self, mask: &EdgeMask) -> Option<&ConfigSchedule> {
        self.schedules.iter().find(|s| &s.mask == mask)
    }
}

/// Enumerated matchings of every configuration, reused across solves.
struct CapacityModel<'a> {
    net: &'a Network,
    table: &'a ConfigTable,
    /// Non-empty matchings per configuration.
    matchings: Vec<Vec<Activation>>,
    cuts: Vec<CutVector>,
}

impl<'a> CapacityModel<'a> {
    fn build(
        net: &'a Network,
        table: &'a ConfigTable,
        opts: &CapacityOptions,
    ) -> Result<Self, CapacityError> {
        if table.edge_count() != net.edge_count() {
            return Err(CapacityError::TableMismatch {
                expected: net.edge_count(),
                got: table.edge_count(),
            });
        }
        let mut matchings = Vec::with_capacity(table.len());
        let mut total = 0usize;
        for (mask, _) in table.entries() {
            let remaining = opts.match_limit.saturating_sub(total).max(1);
            let mut all = enumerate_matchings(net, mask, remaining).map_err(|e| match e {
                GraphError::TooManyMatchings { .. } => GraphError::TooManyMatchings {
                    limit: opts.match_limit,
                },
                other => other,
            })?;
            all.retain(|a| !a.is_empty());
            total += all.len();
            matchings.push(all);
        }
        let cuts = match opts.cuts {
            CutConstraints::SingleNode => net
                .receivers()
                .map(|j| single_node_cut(net, j))
                .collect::<Result<Vec<_>, _>>()?,
            CutConstraints::AllProper => all_proper_cuts(net, DEFAULT_CUT_NODE_LIMIT)?,
        };
        let rows = cuts.len() + table.len();
        let cols = 1 + total + rows;
        if rows.saturating_mul(cols) > opts.lp_cell_limit {
            return Err(CapacityError::LpTooLarge {
                rows,
                cols,
                limit: opts.lp_cell_limit,
            });
        }
        Ok(CapacityModel {
            net,
            table,
            matchings,
            cuts,
        })
    }

    fn columns(&self) -> usize {
        1 + self.matchings.iter().map(Vec::len).sum::<usize>()
    }

    /// Column 0 is λ; then α per (configuration, non-empty matching).
    fn program<T: LpScalar>(&self) -> LinearProgram<T> {
        let cols = self.columns();
        let mut objective = vec![T::zero(); cols];
        objective[0] = T::from_f64(1.0);
        let mut lp = LinearProgram::new(objective);
        for cut in &self.cuts {
            let mut row = vec![T::zero(); cols];
            row[0] = T::from_f64(1.0);
            let mut col = 1;
            for ((_, p), ms) in self.table.entries().iter().zip(&self.matchings) {
                let p = T::from_f64(*p);
                for a in ms {
                    let gain: f64 = a.edges().iter().map(|&e| cut.weights[e]).sum();
                    if gain != 0.0 {
                        row[col] = -(p.clone() * T::from_f64(gain));
                    }
                    col += 1;
                }
            }
            lp.add_le(row, T::zero());
        }
        let mut col = 1;
        for ms in &self.matchings {
            let mut row = vec![T::zero(); cols];
            for _ in ms {
                row[col] = T::from_f64(1.0);
                col += 1;
            }
            lp.add_le(row, T::from_f64(1.0));
        }
        lp
    }

    fn solve_lp<T: LpScalar>(&self) -> Result<(T, Vec<T>), CapacityError> {
        let lp = self.program::<T>();
        let sol = lp
            .solve()
            .map_err(|source| CapacityError::LpNumericalFailure {
                source,
                rows: lp.constraints(),
                cols: lp.vars(),
            })?;
        Ok((sol.objective, sol.x))
    }

    fn result(&self, lambda: f64, x: &[f64]) -> CapacityResult {
        let m = self.net.edge_count();
        let mut schedules = Vec::with_capacity(self.table.len());
        let mut col = 1;
        for ((mask, p), ms) in self.table.entries().iter().zip(&self.matchings) {
            let mut weights = Vec::new();
            let mut used = 0.0;
            for a in ms {
                let w = x[col].max(0.0);
                col += 1;
                if w > 1e-12 {
                    used += w;
                    weights.push((a.clone(), w));
                }
            }
            // Normalize so the per-configuration weights form a distribution.
            if used > 1.0 {
                weights.iter_mut().for_each(|(_, w)| *w /= used);
                used = 1.0;
            }
            if 1.0 - used > 1e-12 {
                weights.insert(0, (Activation::empty(m), 1.0 - used));
            }
            schedules.push(ConfigSchedule {
                mask: mask.clone(),
                prob: *p,
                weights,
            });
        }
        let mut result = CapacityResult {
            lambda_star: lambda.max(0.0),
            schedules,
            tight_nodes: Vec::new(),
            node_rates: vec![0.0; self.net.node_count()],
        };
        let avg = result.mean_activation();
        for j in self.net.receivers() {
            let rate: f64 = self
                .net
                .in_edges(j)
                .iter()
                .map(|&e| self.net.edge(e).cap as f64 * avg[e])
                .sum();
            result.node_rates[j] = rate;
        }
        let lam = result.lambda_star;
        result.tight_nodes = self
            .net
            .receivers()
            .filter(|&j| result.node_rates[j] - lam <= TIGHT_TOL * lam.max(1.0))
            .collect();
        result
    }
}

pub fn compute_capacity(
    net: &Network,
    dist: &ConfigTable,
) -> Result<CapacityResult, CapacityError> {
    compute_capacity_with(net, dist, &CapacityOptions::default())
}

pub fn compute_capacity_with(
    net: &Network,
    dist: &ConfigTable,
    opts: &CapacityOptions,
) -> Result<CapacityResult, CapacityError> {
    let model = CapacityModel::build(net, dist, opts)?;
    let (lambda, x) = model.solve_lp::<f64>()?;
    Ok(model.result(lambda, &x))
}

/// Exact optimum in rational arithmetic. Probabilities are converted from
/// their binary `f64` values, so dyadic inputs are represented exactly.
pub fn compute_capacity_rational(
    net: &Network,
    dist: &ConfigTable,
) -> Result<BigRational, CapacityError> {
    let model = CapacityModel::build(net, dist, &CapacityOptions::default())?;
    let (lambda, _) = model.solve_lp::<BigRational>()?;
    Ok(lambda)
}

/// Capacity of the static network (every link always ON).
pub fn compute_static_capacity(net: &Network) -> Result<CapacityResult, CapacityError> {
    compute_capacity(net, &ConfigTable::all_on(net.edge_count()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityBounds {
    pub lower: f64,
    pub upper: f64,
    pub p: f64,
    /// Condition under which the bounds hold.
    pub premise: &'static str,
}

pub const UNIFORM_MARGINAL_PREMISE: &str =
    "every link is ON with the same marginal probability p under the stationary distribution";

fn check_p(p: f64) -> Result<(), CapacityError> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(CapacityError::BadProbability(p))
    }
}

/// `(p λ_stat, λ_stat)`. Valid only when every link has ON-marginal `p`;
/// that premise is the caller's responsibility and is recorded in the result.
pub fn capacity_bounds(net: &Network, p: f64) -> Result<CapacityBounds, CapacityError> {
    check_p(p)?;
    let stat = compute_static_capacity(net)?.lambda_star;
    Ok(CapacityBounds {
        lower: p * stat,
        upper: stat,
        p,
        premise: UNIFORM_MARGINAL_PREMISE,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub value: f64,
    pub p: f64,
    /// Static optimal activation distribution.
    pub certificate: Vec<(Activation, f64)>,
    /// `Σ_k α_k s_k` of the certificate.
    pub static_beta: Vec<f64>,
}

impl Approximation {
    /// Broadcast rate obtained by running the certificate restricted to each
    /// configuration, `β_σ(e) = β(e) 1{e ∈ σ}`, under `dist`.
    pub fn achieved_rate(&self, net: &Network, dist: &ConfigTable) -> f64 {
        let marg = dist.marginals();
        net.receivers()
            .map(|j| {
                net.in_edges(j)
                    .iter()
                    .map(|&e| net.edge(e).cap as f64 * self.static_beta[e] * marg[e])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `p`-approximation `p λ_stat` with the static optimum as certificate.
pub fn approx_capacity(net: &Network, p: f64) -> Result<Approximation, CapacityError> {
    check_p(p)?;
    let stat = compute_static_capacity(net)?;
    let schedule = &stat.schedules[0];
    Ok(Approximation {
        value: p * stat.lambda_star,
        p,
        certificate: schedule.weights.clone(),
        static_beta: schedule.beta(),
    })
}

/// First violated inequality of the matching-polytope description.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolatedConstraint {
    /// Positive weight on an edge outside the ON set.
    OutsideSupport {
        edge: EdgeId,
        value: f64,
    },
    Negative {
        edge: EdgeId,
        value: f64,
    },
    Degree {
        node: NodeId,
        sum: f64,
    },
    OddSet {
        nodes: Vec<NodeId>,
        sum: f64,
        bound: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Inside,
    Violated(ViolatedConstraint),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }
}

/// Check `β` against nonnegativity, degree and odd-set inequalities of the
/// matching polytope of the ON subgraph (edges taken as undirected).
///
/// Order: support, nonnegativity by edge, degree by node, odd sets (size
/// three and up) by the integer value of their node bit pattern.
pub fn check_matching_polytope_membership(
    net: &Network,
    on: &EdgeMask,
    beta: &[f64],
    tol: f64,
) -> Result<Membership, CapacityError> {
    on.check_len(net)?;
    let n = net.node_count();
    if beta.len() != net.edge_count() {
        return Err(CapacityError::BetaLength {
            expected: net.edge_count(),
            got: beta.len(),
        });
    }
    if n > DEFAULT_ODD_SET_NODE_LIMIT {
        return Err(CapacityError::TooManyOddSets {
            nodes: n,
            limit: DEFAULT_ODD_SET_NODE_LIMIT,
        });
    }
    for (e, &b) in beta.iter().enumerate() {
        if !on.contains(e) && b.abs() > tol {
            return Ok(Membership::Violated(ViolatedConstraint::OutsideSupport {
                edge: e,
                value: b,
            }));
        }
    }
    for (e, &b) in beta.iter().enumerate() {
        if b < -tol {
            return Ok(Membership::Violated(ViolatedConstraint::Negative {
                edge: e,
                value: b,
            }));
        }
    }
    let mut degree = vec![0.0; n];
    for e in on.iter() {
        let edge = net.edge(e);
        degree[edge.src] += beta[e];
        degree[edge.dst] += beta[e];
    }
    if let Some(node) = (0..n).find(|&v| degree[v] > 1.0 + tol) {
        return Ok(Membership::Violated(ViolatedConstraint::Degree {
            node,
            sum: degree[node],
        }));
    }
    let support: Vec<(u32, f64)> = on
        .iter()
        .map(|e| {
            let edge = net.edge(e);
            ((1u32 << edge.src) | (1u32 << edge.dst), beta[e])
        })
        .collect();
    for set in 1u32..(1u32 << n) {
        let size = set.count_ones();
        if size < 3 || size % 2 == 0 {
            continue;
        }
        let sum: f64 = support
            .iter()
            .filter(|(ends, _)| ends & set == *ends)
            .map(|(_, b)| b)
            .sum();
        let bound = (size - 1) as f64 / 2.0;
        if sum > bound + tol {
            return Ok(Membership::Violated(ViolatedConstraint::OddSet {
                nodes: (0..n).filter(|v| set >> v & 1 == 1).collect(),
                sum,
                bound,
            }));
        }
    }
    Ok(Membership::Inside)
}
