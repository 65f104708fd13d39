//! Slotted-time broadcast simulation.
//!
//! Each slot runs arrivals, configuration sampling, (for `π′`) the view
//! exchange, activation, scheduling and metrics, in that order. Arrivals,
//! configurations and policy randomness draw from separate streams derived
//! from the run seed, so changing one does not shift the others.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{compute_capacity, CapacityError};
use crate::connectivity::{
    ConfigProcess, IidLinkProcess, ProcessError, RngStream, DEFAULT_TABLE_LIMIT,
};
use crate::graph::{is_feasible, validate_network, GraphError, Network, NodeId, RawNetwork};
use crate::policy::{
    build_rand_policy, compute_k_sets, compute_virtual_queues, compute_weights, construct_path,
    delayed_view_update, lindley_check, piprime_activate, pistar_activate, rand_activate,
    schedule_packets, schedule_packets_with_view, stale_weights, DelayedView, FrontierState,
    MatchingCache, PolicyError, RandPolicySpec, VirtualQueues,
};

/// Default stability threshold factor on `c_max`.
pub const DEFAULT_THETA: f64 = 0.01;
/// Minimum post-warmup series length for a verdict.
pub const MIN_SERIES: usize = 1000;
/// Upper bound on stored series points.
const SERIES_POINTS: u64 = 20_000;
/// Slot spacing of sampled invariant checks.
const SAMPLED_STRIDE: u64 = 64;

const STREAM_ARRIVALS: u64 = 0;
const STREAM_CONFIG: u64 = 1;
const STREAM_POLICY: u64 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invariant `{kind}` violated at slot {slot} (node {node:?}): {detail}")]
    InvariantViolation {
        slot: u64,
        node: Option<NodeId>,
        kind: &'static str,
        detail: String,
    },
    #[error("series has {len} points after warmup, need {need}")]
    SeriesTooShort { len: usize, need: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum PolicyChoice {
    Pistar,
    Piprime {
        update_prob: f64,
    },
    /// Randomized reference policy designed for `lambda_design`.
    Rand {
        lambda_design: f64,
    },
}

impl PolicyChoice {
    pub fn piprime() -> PolicyChoice {
        PolicyChoice::Piprime { update_prob: 1.0 }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PolicyChoice::Pistar => "pistar",
            PolicyChoice::Piprime { .. } => "piprime",
            PolicyChoice::Rand { .. } => "rand",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", content = "rate", rename_all = "lowercase")]
pub enum Arrivals {
    Poisson(f64),
    /// `floor((t+1) λ) - floor(t λ)` packets in slot `t`.
    Deterministic(f64),
}

impl Arrivals {
    pub fn rate(&self) -> f64 {
        match *self {
            Arrivals::Poisson(l) | Arrivals::Deterministic(l) => l,
        }
    }

    fn sample(&self, t: u64, rng: &mut RngStream) -> u64 {
        match *self {
            Arrivals::Poisson(l) => rng.poisson(l),
            Arrivals::Deterministic(l) => {
                ((t + 1) as f64 * l).floor() as u64 - (t as f64 * l).floor() as u64
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckLevel {
    #[default]
    Off,
    Sampled,
    EverySlot,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub net: Arc<Network>,
    pub process: Arc<ConfigProcess>,
    pub policy: PolicyChoice,
    pub arrivals: Arrivals,
    pub slots: u64,
    pub seed: u64,
    /// Defaults to `slots / 10`.
    pub warmup: Option<u64>,
    pub checks: CheckLevel,
    pub theta: f64,
    /// Keep the per-slot activations and frontiers.
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(
        net: Arc<Network>,
        process: Arc<ConfigProcess>,
        policy: PolicyChoice,
        arrivals: Arrivals,
        slots: u64,
        seed: u64,
    ) -> SimConfig {
        SimConfig {
            net,
            process,
            policy,
            arrivals,
            slots,
            seed,
            warmup: None,
            checks: CheckLevel::Off,
            theta: DEFAULT_THETA,
            record_trace: false,
        }
    }

    pub fn warmup_slots(&self) -> u64 {
        self.warmup.unwrap_or(self.slots / 10)
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.slots == 0 {
            return Err(SimError::BadConfig(
                "horizon must be at least one slot".into(),
            ));
        }
        let l = self.arrivals.rate();
        if !(l.is_finite() && l >= 0.0) {
            return Err(SimError::BadConfig(format!(
                "arrival rate {l} must be >= 0"
            )));
        }
        if self.warmup_slots() >= self.slots {
            return Err(SimError::BadConfig(
                "warmup must be shorter than the horizon".into(),
            ));
        }
        if self.process.edge_count() != self.net.edge_count() {
            return Err(SimError::BadConfig(format!(
                "process covers {} edges, network has {}",
                self.process.edge_count(),
                self.net.edge_count()
            )));
        }
        if let PolicyChoice::Piprime { update_prob } = self.policy {
            if !(update_prob > 0.0 && update_prob <= 1.0) {
                return Err(SimError::BadConfig(format!(
                    "update probability {update_prob} must lie in (0, 1]"
                )));
            }
        }
        if !(self.theta > 0.0) {
            return Err(SimError::BadConfig("theta must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub stable: bool,
    /// Least-squares slope of `ΣX` per slot over the fit window.
    pub slope: f64,
    pub theta: f64,
    pub threshold: f64,
}

/// Stable iff the least-squares slope over the last half of the series is
/// below `theta * c_max`.
pub fn stability_verdict(
    t: &[u64],
    y: &[i64],
    theta: f64,
    c_max: f64,
) -> Result<Verdict, SimError> {
    let len = t.len().min(y.len());
    if len < MIN_SERIES {
        return Err(SimError::SeriesTooShort {
            len,
            need: MIN_SERIES,
        });
    }
    let from = len / 2;
    let xs: Vec<f64> = t[from..len].iter().map(|&v| v as f64).collect();
    let ys: Vec<f64> = y[from..len].iter().map(|&v| v as f64).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let threshold = theta * c_max;
    Ok(Verdict {
        stable: slope < threshold,
        slope,
        theta,
        threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumSeries {
    pub stride: u64,
    pub t: Vec<u64>,
    pub sum_x: Vec<i64>,
}

/// Allocated incoming capacity per node: `Σ_{e ∈ in(v) active} c_e` per slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncomingRate {
    pub mean: f64,
    /// Standard error of the mean, from the per-slot sample variance.
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub active: Vec<usize>,
    pub frontier: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub level: CheckLevel,
    pub slots_checked: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub schema: u32,
    pub policy: PolicyChoice,
    pub arrivals: Arrivals,
    pub slots: u64,
    pub seed: u64,
    pub warmup: u64,
    pub total_arrivals: u64,
    pub arrival_rate: f64,
    /// Packets held by every node at the horizon.
    pub delivered: u64,
    pub delivered_rate: f64,
    pub mean_delay: Option<f64>,
    pub delay_std: Option<f64>,
    /// Broadcast delay of every post-warmup packet, in delivery order.
    pub delays: Vec<u64>,
    pub final_frontier: Vec<u64>,
    pub mean_sum_x: f64,
    pub series: SumSeries,
    pub stability: Option<Verdict>,
    pub incoming: Vec<IncomingRate>,
    /// Largest `|W′_e - W_e|` seen (`π′` only).
    pub max_weight_gap: Option<i64>,
    /// FNV-1a digest of all activations and frontiers.
    pub trace_digest: String,
    pub checks: CheckSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

enum Runner {
    Pistar(MatchingCache),
    Piprime {
        cache: MatchingCache,
        view: Box<DelayedView>,
        update_prob: f64,
    },
    Rand(Box<RandPolicySpec>),
}

fn build_runner(cfg: &SimConfig) -> Result<Runner, SimError> {
    let net = &cfg.net;
    Ok(match cfg.policy {
        PolicyChoice::Pistar => Runner::Pistar(MatchingCache::default()),
        PolicyChoice::Piprime { update_prob } => Runner::Piprime {
            cache: MatchingCache::default(),
            view: Box::new(DelayedView::new(net)),
            update_prob,
        },
        PolicyChoice::Rand { lambda_design } => {
            let table = cfg.process.stationary_distribution(DEFAULT_TABLE_LIMIT)?;
            let cap = compute_capacity(net, &table)?;
            Runner::Rand(Box::new(build_rand_policy(
                net,
                &table,
                lambda_design,
                &cap,
            )?))
        }
    })
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Fnv {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    fn word(&mut self, w: u64) {
        for b in w.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

fn violation(slot: u64, node: Option<NodeId>, kind: &'static str, detail: String) -> SimError {
    SimError::InvariantViolation {
        slot,
        node,
        kind,
        detail,
    }
}

/// Per-slot assertions. `start` is the post-arrival state that activation
/// saw, `end` the state after scheduling.
struct Checker<'a> {
    net: &'a Network,
}

impl Checker<'_> {
    fn queues(&self, slot: u64, state: &FrontierState, vq: &VirtualQueues) -> Result<(), SimError> {
        let net = self.net;
        let src = state.get(net.source()) as i64;
        for j in net.receivers() {
            if vq.x[j] < 0 {
                return Err(violation(
                    slot,
                    Some(j),
                    "nonnegative-queue",
                    format!("X = {}", vq.x[j]),
                ));
            }
            let path = construct_path(net, vq, j);
            let along: i64 = path[1..].iter().map(|&u| vq.x[u]).sum();
            if path[0] != net.source() || state.get(j) as i64 != src - along {
                return Err(violation(
                    slot,
                    Some(j),
                    "telescoping",
                    format!("R_j = {}, R_r - ΣX = {}", state.get(j), src - along),
                ));
            }
        }
        Ok(())
    }

    fn transition(
        &self,
        slot: u64,
        sigma: &crate::graph::EdgeMask,
        act: &crate::graph::Activation,
        start: &FrontierState,
        end: &FrontierState,
    ) -> Result<(), SimError> {
        let net = self.net;
        if !act.mask().is_subset(sigma) || !is_feasible(net, act.mask()) {
            return Err(violation(
                slot,
                None,
                "matching",
                format!("{act:?} in {sigma:?}"),
            ));
        }
        let src = end.get(net.source());
        for v in 0..net.node_count() {
            if end.get(v) < start.get(v) {
                return Err(violation(slot, Some(v), "monotone-frontier", String::new()));
            }
            if end.get(v) > src {
                return Err(violation(slot, Some(v), "behind-source", String::new()));
            }
        }
        for j in net.receivers() {
            let ceiling = net.in_neighbors(j).map(|i| start.get(i)).min().unwrap_or(0);
            if end.get(j) > ceiling {
                return Err(violation(
                    slot,
                    Some(j),
                    "in-neighbor",
                    format!("R_j = {} above in-neighbor minimum {ceiling}", end.get(j)),
                ));
            }
        }
        Ok(())
    }
}

pub fn run(cfg: &SimConfig) -> Result<SimReport, SimError> {
    cfg.validate()?;
    let net: &Network = &cfg.net;
    let n = net.node_count();
    let warmup = cfg.warmup_slots();
    let mut runner = build_runner(cfg)?;
    let mut arrivals_rng = RngStream::derive(cfg.seed, STREAM_ARRIVALS);
    let mut config_rng = RngStream::derive(cfg.seed, STREAM_CONFIG);
    let mut policy_rng = RngStream::derive(cfg.seed, STREAM_POLICY);
    let mut sampler = cfg.process.sampler();
    let checker = Checker { net };

    let stride = cfg.slots.div_ceil(SERIES_POINTS).max(1);
    let mut series = SumSeries {
        stride,
        t: Vec::new(),
        sum_x: Vec::new(),
    };
    let mut state = FrontierState::new(n);
    let mut pending: VecDeque<u64> = VecDeque::new();
    let mut delivered = 0u64;
    let mut delays = Vec::new();
    let mut total_arrivals = 0u64;
    let mut sum_x_total = 0f64;
    let mut in_sum = vec![0f64; n];
    let mut in_sq = vec![0f64; n];
    let mut max_gap: Option<i64> = None;
    let mut digest = Fnv::new();
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut slots_checked = 0u64;
    let mut prev: Option<(VirtualQueues, Vec<u64>)> = None;

    for t in 0..cfg.slots {
        let a = cfg.arrivals.sample(t, &mut arrivals_rng);
        state.arrive(net, a);
        total_arrivals += a;
        for _ in 0..a {
            pending.push_back(t);
        }
        let sigma = sampler.sample(&mut config_rng);
        let vq = compute_virtual_queues(net, &state);

        let check_now = match cfg.checks {
            CheckLevel::Off => false,
            CheckLevel::Sampled => t % SAMPLED_STRIDE == 0,
            CheckLevel::EverySlot => true,
        };
        if check_now {
            slots_checked += 1;
            checker.queues(t, &state, &vq)?;
            if let Some((pvq, moved)) = &prev {
                lindley_check(net, pvq, moved, a, &vq).map_err(|v| {
                    violation(
                        t,
                        Some(v.node),
                        "lindley",
                        format!("X(t+1) = {} > {}", v.lhs, v.rhs),
                    )
                })?;
            }
        }

        let start = state.clone();
        let (act, moved) = match &mut runner {
            Runner::Pistar(cache) => {
                let act = pistar_activate(net, &sigma, &state, cache)?;
                let moved = schedule_packets(net, &mut state, &act);
                (act, moved)
            }
            Runner::Piprime {
                cache,
                view,
                update_prob,
            } => {
                delayed_view_update(net, view, &sigma, &state, t, *update_prob, &mut policy_rng);
                let act = piprime_activate(net, &sigma, view, cache)?;
                let stale = stale_weights(net, view, &sigma);
                let k = compute_k_sets(net, &vq);
                let truth = compute_weights(net, &vq, &k, &sigma);
                let gap = stale
                    .iter()
                    .zip(&truth)
                    .map(|(a, b)| (a - b).abs())
                    .max()
                    .unwrap_or(0);
                max_gap = Some(max_gap.map_or(gap, |g| g.max(gap)));
                let moved = schedule_packets_with_view(net, &mut state, &act, view);
                (act, moved)
            }
            Runner::Rand(spec) => {
                let act = rand_activate(net, spec, &sigma, &mut policy_rng)?;
                let moved = schedule_packets(net, &mut state, &act);
                (act, moved)
            }
        };
        if check_now {
            checker.transition(t, &sigma, &act, &start, &state)?;
        }

        let mut incoming = vec![0u64; n];
        for &e in act.edges() {
            incoming[net.edge(e).dst] += net.edge(e).cap as u64;
        }
        for v in 0..n {
            let x = incoming[v] as f64;
            in_sum[v] += x;
            in_sq[v] += x * x;
        }

        let now = state.delivered(net);
        while delivered < now {
            delivered += 1;
            let arrived = pending.pop_front().expect("delivered packets have arrived");
            if arrived >= warmup {
                delays.push(t + 1 - arrived);
            }
        }

        let end_vq_total = compute_virtual_queues(net, &state).total();
        sum_x_total += end_vq_total as f64;
        if t % stride == 0 {
            series.t.push(t);
            series.sum_x.push(end_vq_total);
        }

        for w in act.mask().iter() {
            digest.word(w as u64);
        }
        digest.word(u64::MAX);
        for &r in state.counts() {
            digest.word(r);
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceEntry {
                active: act.edges().to_vec(),
                frontier: state.counts().to_vec(),
            });
        }
        prev = Some((vq, moved));
    }

    let post: Vec<usize> = (0..series.t.len())
        .filter(|&i| series.t[i] >= warmup)
        .collect();
    let pt: Vec<u64> = post.iter().map(|&i| series.t[i]).collect();
    let py: Vec<i64> = post.iter().map(|&i| series.sum_x[i]).collect();
    let stability = stability_verdict(&pt, &py, cfg.theta, net.max_capacity() as f64).ok();

    let (mean_delay, delay_std) = if delays.is_empty() {
        (None, None)
    } else {
        let k = delays.len() as f64;
        let mean = delays.iter().sum::<u64>() as f64 / k;
        let var = delays
            .iter()
            .map(|&d| (d as f64 - mean).powi(2))
            .sum::<f64>()
            / k;
        (Some(mean), Some(var.sqrt()))
    };
    let slots = cfg.slots as f64;
    let incoming = (0..n)
        .map(|v| {
            let mean = in_sum[v] / slots;
            let var = (in_sq[v] / slots - mean * mean).max(0.0);
            IncomingRate {
                mean,
                std_err: (var / slots).sqrt(),
            }
        })
        .collect();

    Ok(SimReport {
        schema: 1,
        policy: cfg.policy,
        arrivals: cfg.arrivals,
        slots: cfg.slots,
        seed: cfg.seed,
        warmup,
        total_arrivals,
        arrival_rate: total_arrivals as f64 / slots,
        delivered,
        delivered_rate: delivered as f64 / slots,
        mean_delay,
        delay_std,
        delays,
        final_frontier: state.counts().to_vec(),
        mean_sum_x: sum_x_total / slots,
        series,
        stability,
        incoming,
        max_weight_gap: max_gap,
        trace_digest: format!("{:016x}", digest.0),
        checks: CheckSummary {
            level: cfg.checks,
            slots_checked,
            violations: 0,
        },
        trace,
    })
}

/// One sweep point: a config plus the ON probability it was built for.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub p: f64,
    pub cfg: SimConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub p: f64,
    pub policy: &'static str,
    pub mean_delay: Option<f64>,
    pub delivered_rate: Option<f64>,
    pub stable: Option<bool>,
    pub seed: u64,
    #[serde(skip)]
    pub error: Option<String>,
}

/// Run every point in parallel; rows come back in input order and a failed
/// point yields a row with its error and empty metrics.
pub fn sweep(points: &[SweepPoint]) -> Vec<SweepRow> {
    points
        .par_iter()
        .map(|pt| {
            let base = SweepRow {
                lambda: pt.cfg.arrivals.rate(),
                p: pt.p,
                policy: pt.cfg.policy.label(),
                mean_delay: None,
                delivered_rate: None,
                stable: None,
                seed: pt.cfg.seed,
                error: None,
            };
            match run(&pt.cfg) {
                Ok(r) => SweepRow {
                    mean_delay: r.mean_delay,
                    delivered_rate: Some(r.delivered_rate),
                    stable: r.stability.map(|v| v.stable),
                    ..base
                },
                Err(e) => SweepRow {
                    error: Some(e.to_string()),
                    ..base
                },
            }
        })
        .collect()
}

/// Sweep file: one network, one policy, i.i.d. links with ON probability
/// `p` per series, and a list of arrival rates per series.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub schema: u32,
    #[serde(default)]
    pub origin: Option<String>,
    #[serde(default)]
    pub fixture: Option<String>,
    #[serde(default)]
    pub network: Option<RawNetwork>,
    pub policy: String,
    #[serde(default)]
    pub update_prob: Option<f64>,
    #[serde(default)]
    pub lambda_design: Option<f64>,
    pub slots: u64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub warmup: Option<u64>,
    pub series: Vec<SweepSeries>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSeries {
    pub p: f64,
    pub lambdas: Vec<f64>,
}

impl SweepSpec {
    pub fn network(&self) -> Result<Network, SimError> {
        match (&self.fixture, &self.network) {
            (Some(name), None) => crate::fixtures::get(name)
                .map(|f| f.network())
                .ok_or_else(|| SimError::BadConfig(format!("unknown fixture {name:?}"))),
            (None, Some(raw)) => Ok(validate_network(raw)?),
            _ => Err(SimError::BadConfig(
                "sweep needs exactly one of `fixture` and `network`".into(),
            )),
        }
    }

    pub fn policy_choice(&self) -> Result<PolicyChoice, SimError> {
        match self.policy.as_str() {
            "pistar" => Ok(PolicyChoice::Pistar),
            "piprime" => Ok(PolicyChoice::Piprime {
                update_prob: self.update_prob.unwrap_or(1.0),
            }),
            "rand" => self
                .lambda_design
                .map(|lambda_design| PolicyChoice::Rand { lambda_design })
                .ok_or_else(|| SimError::BadConfig("policy rand needs lambda_design".into())),
            other => Err(SimError::BadConfig(format!("unknown policy {other:?}"))),
        }
    }

    /// Points ordered by series, then rate, then seed.
    pub fn points(&self) -> Result<Vec<SweepPoint>, SimError> {
        if self.schema != 1 {
            return Err(SimError::BadConfig(format!(
                "unsupported schema {}",
                self.schema
            )));
        }
        let net = Arc::new(self.network()?);
        let policy = self.policy_choice()?;
        let mut points = Vec::new();
        for s in &self.series {
            let links = IidLinkProcess::uniform(net.edge_count(), s.p)?;
            let process = Arc::new(ConfigProcess::Iid(links));
            for &lambda in &s.lambdas {
                for &seed in &self.seeds {
                    let mut cfg = SimConfig::new(
                        net.clone(),
                        process.clone(),
                        policy,
                        Arrivals::Poisson(lambda),
                        self.slots,
                        seed,
                    );
                    cfg.warmup = self.warmup;
                    points.push(SweepPoint { p: s.p, cfg });
                }
            }
        }
        Ok(points)
    }
}

/// CSV with the fixed header `lambda,p,policy,mean_delay,delivered_rate,stable,seed`.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "lambda",
        "p",
        "policy",
        "mean_delay",
        "delivered_rate",
        "stable",
        "seed",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.lambda.to_string(),
            r.p.to_string(),
            r.policy.to_string(),
            opt(r.mean_delay),
            opt(r.delivered_rate),
            r.stable.map(|s| s.to_string()).unwrap_or_default(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
