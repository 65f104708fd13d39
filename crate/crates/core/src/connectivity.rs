//! Stationary ON/OFF configuration processes and their sampling.
//!
//! Three flavors share one sampling interface: an explicit joint table,
//! independent per-link ON probabilities, and a finite-state Markov chain.
//! The capacity solver only consumes [`ConfigProcess::stationary_distribution`];
//! the simulator only draws samples.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::graph::{EdgeMask, GraphError, Network};

/// Tolerance on probability sums.
pub const PROB_SUM_TOL: f64 = 1e-12;
/// Default cap on explicit product-form expansion (entries).
pub const DEFAULT_TABLE_LIMIT: usize = 1 << 16;
const MARKOV_RESIDUAL: f64 = 1e-12;
const MARKOV_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcessError {
    #[error("probabilities sum to {0}, expected 1")]
    BadSum(f64),
    #[error("invalid probability {0}")]
    BadProbability(f64),
    #[error("configuration listed twice: {0:?}")]
    DuplicateMask(EdgeMask),
    #[error("configuration table is empty")]
    EmptyTable,
    #[error("explicit table would need {entries} entries (limit {limit})")]
    TableTooLarge { entries: u128, limit: usize },
    #[error("markov chain is not ergodic: {0}")]
    NonErgodicChain(String),
    #[error("transition matrix must be {n}x{n}")]
    BadTransitionShape { n: usize },
    #[error("initial state {0} out of range")]
    BadInitialState(usize),
    #[error("unparseable probability {0:?}")]
    BadProbabilityText(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Seeded deterministic generator (ChaCha8, 64-bit word stream).
///
/// Uniform variates use the top 53 bits of one `u64` draw, so the sequence
/// depends only on the ChaCha8 keystream.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> RngStream {
        RngStream {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` under a master seed.
    pub fn derive(seed: u64, stream: u64) -> RngStream {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Index drawn from a discrete distribution by inversion.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        // Rounding left the tail short of 1: take the last positive weight.
        weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }

    /// Poisson variate by sequential inversion.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let u = self.uniform();
        let mut k = 0u64;
        let mut pmf = (-mean).exp();
        let mut cdf = pmf;
        while u >= cdf && pmf > 0.0 {
            k += 1;
            pmf *= mean / k as f64;
            cdf += pmf;
        }
        k
    }
}

/// Explicit stationary distribution over configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigTable {
    m: usize,
    entries: Vec<(EdgeMask, f64)>,
}

impl ConfigTable {
    /// Zero-probability rows are dropped: they are not part of the
    /// configuration set.
    pub fn new(m: usize, entries: Vec<(EdgeMask, f64)>) -> Result<ConfigTable, ProcessError> {
        let mut kept = Vec::with_capacity(entries.len());
        let mut seen = std::collections::HashSet::new();
        let mut sum = 0.0;
        for (mask, p) in entries {
            if mask.len() != m {
                return Err(GraphError::MaskLength {
                    expected: m,
                    got: mask.len(),
                }
                .into());
            }
            if !p.is_finite() || !(0.0..=1.0 + PROB_SUM_TOL).contains(&p) {
                return Err(ProcessError::BadProbability(p));
            }
            if p == 0.0 {
                continue;
            }
            if !seen.insert(mask.clone()) {
                return Err(ProcessError::DuplicateMask(mask));
            }
            sum += p;
            kept.push((mask, p));
        }
        if kept.is_empty() {
            return Err(ProcessError::EmptyTable);
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(ProcessError::BadSum(sum));
        }
        Ok(ConfigTable { m, entries: kept })
    }

    /// The static network: every edge ON with probability one.
    pub fn all_on(m: usize) -> ConfigTable {
        ConfigTable {
            m,
            entries: vec![(EdgeMask::full(m), 1.0)],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[(EdgeMask, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, mask: &EdgeMask) -> Option<usize> {
        self.entries.iter().position(|(m, _)| m == mask)
    }

    /// Marginal ON probability of every edge.
    pub fn marginals(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (mask, p) in &self.entries {
            for e in mask.iter() {
                out[e] += p;
            }
        }
        out
    }

    /// `Some(p)` when every edge is ON with the same marginal `p` (within `tol`).
    pub fn uniform_marginal(&self, tol: f64) -> Option<f64> {
        let marg = self.marginals();
        let first = *marg.first()?;
        marg.iter()
            .all(|x| (x - first).abs() <= tol)
            .then_some(first)
    }
}

/// Independent links, edge `e` ON with probability `p[e]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IidLinkProcess {
    p: Vec<f64>,
}

impl IidLinkProcess {
    pub fn new(p: Vec<f64>) -> Result<IidLinkProcess, ProcessError> {
        if let Some(&bad) = p.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
            return Err(ProcessError::BadProbability(bad));
        }
        Ok(IidLinkProcess { p })
    }

    pub fn uniform(m: usize, p: f64) -> Result<IidLinkProcess, ProcessError> {
        IidLinkProcess::new(vec![p; m])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }
}

/// Configuration driven by a finite-state Markov chain over edge masks.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovConfigProcess {
    states: Vec<EdgeMask>,
    transition: Vec<Vec<f64>>,
    initial: usize,
}

impl MarkovConfigProcess {
    pub fn new(
        states: Vec<EdgeMask>,
        transition: Vec<Vec<f64>>,
        initial: usize,
    ) -> Result<MarkovConfigProcess, ProcessError> {
        let n = states.len();
        if n == 0 {
            return Err(ProcessError::EmptyTable);
        }
        if transition.len() != n || transition.iter().any(|row| row.len() != n) {
            return Err(ProcessError::BadTransitionShape { n });
        }
        if initial >= n {
            return Err(ProcessError::BadInitialState(initial));
        }
        for row in &transition {
            if let Some(&bad) = row.iter().find(|&&x| !(x.is_finite() && x >= 0.0)) {
                return Err(ProcessError::BadProbability(bad));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > PROB_SUM_TOL {
                return Err(ProcessError::BadSum(s));
            }
        }
        let chain = MarkovConfigProcess {
            states,
            transition,
            initial,
        };
        if let Some(v) = chain.unreachable_state() {
            return Err(ProcessError::NonErgodicChain(format!(
                "state {v} is not mutually reachable with state 0"
            )));
        }
        Ok(chain)
    }

    pub fn states(&self) -> &[EdgeMask] {
        &self.states
    }

    fn reach(&self, from: usize, forward: bool) -> Vec<bool> {
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let w = if forward {
                    self.transition[u][v]
                } else {
                    self.transition[v][u]
                };
                if w > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn unreachable_state(&self) -> Option<usize> {
        let fwd = self.reach(0, true);
        let bwd = self.reach(0, false);
        (0..self.states.len()).find(|&v| !(fwd[v] && bwd[v]))
    }

    /// Period of the (irreducible) chain via BFS levels from state 0.
    pub fn period(&self) -> u64 {
        let n = self.states.len();
        let mut level = vec![u64::MAX; n];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut g = 0u64;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if self.transition[u][v] <= 0.0 {
                    continue;
                }
                if level[v] == u64::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                } else {
                    g = gcd(g, (level[u] + 1).abs_diff(level[v]));
                }
            }
        }
        g
    }

    /// Stationary vector over chain states by power iteration.
    pub fn stationary_vector(&self) -> Result<Vec<f64>, ProcessError> {
        if self.period() != 1 {
            return Err(ProcessError::NonErgodicChain(format!(
                "chain is periodic with period {}",
                self.period()
            )));
        }
        let n = self.states.len();
        let mut pi = vec![1.0 / n as f64; n];
        let mut next = vec![0.0; n];
        for _ in 0..MARKOV_MAX_ITER {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (u, row) in self.transition.iter().enumerate() {
                for (v, w) in row.iter().enumerate() {
                    next[v] += pi[u] * w;
                }
            }
            let s: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= s);
            let residual = pi
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut pi, &mut next);
            if residual < MARKOV_RESIDUAL {
                return Ok(pi);
            }
        }
        Err(ProcessError::NonErgodicChain(
            "power iteration did not converge".into(),
        ))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigProcess {
    Table(ConfigTable),
    Iid(IidLinkProcess),
    Markov(MarkovConfigProcess),
}

impl ConfigProcess {
    pub fn edge_count(&self) -> usize {
        match self {
            ConfigProcess::Table(t) => t.m,
            ConfigProcess::Iid(p) => p.p.len(),
            ConfigProcess::Markov(c) => c.states[0].len(),
        }
    }

    pub fn sampler(&self) -> ConfigSampler<'_> {
        ConfigSampler {
            process: self,
            markov_state: match self {
                ConfigProcess::Markov(c) => c.initial,
                _ => 0,
            },
            started: false,
        }
    }

    /// Explicit table view; identical for tables, product-form for
    /// independent links, left eigenvector for Markov chains.
    pub fn stationary_distribution(&self, limit: usize) -> Result<ConfigTable, ProcessError> {
        match self {
            ConfigProcess::Table(t) => Ok(t.clone()),
            ConfigProcess::Iid(iid) => {
                let m = iid.p.len();
                let random: Vec<usize> = (0..m).filter(|&e| iid.p[e] < 1.0).collect();
                let entries = 1u128 << random.len().min(127);
                if random.len() >= 127 || entries > limit as u128 {
                    return Err(ProcessError::TableTooLarge { entries, limit });
                }
                let mut out = Vec::with_capacity(entries as usize);
                for bits in 0..entries as u64 {
                    let mut mask = EdgeMask::empty(m);
                    let mut prob = 1.0;
                    for e in 0..m {
                        if iid.p[e] >= 1.0 {
                            mask.insert(e);
                        }
                    }
                    for (k, &e) in random.iter().enumerate() {
                        if bits >> k & 1 == 1 {
                            mask.insert(e);
                            prob *= iid.p[e];
                        } else {
                            prob *= 1.0 - iid.p[e];
                        }
                    }
                    out.push((mask, prob));
                }
                out.sort_by(|a, b| a.0.cmp(&b.0));
                ConfigTable::new(m, out)
            }
            ConfigProcess::Markov(chain) => {
                let pi = chain.stationary_vector()?;
                let mut merged: BTreeMap<EdgeMask, f64> = BTreeMap::new();
                for (mask, p) in chain.states.iter().zip(pi) {
                    *merged.entry(mask.clone()).or_default() += p;
                }
                let total: f64 = merged.values().sum();
                let entries = merged
                    .into_iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(m, p)| (m, p / total))
                    .collect();
                ConfigTable::new(chain.states[0].len(), entries)
            }
        }
    }
}

/// Per-run sampling state for a [`ConfigProcess`].
#[derive(Debug, Clone)]
pub struct ConfigSampler<'a> {
    process: &'a ConfigProcess,
    markov_state: usize,
    started: bool,
}

impl ConfigSampler<'_> {
    /// Configuration for the next slot. Markov chains report their initial
    /// state on the first call and take one step per call afterwards.
    pub fn sample(&mut self, rng: &mut RngStream) -> EdgeMask {
        match self.process {
            ConfigProcess::Table(t) => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (mask, p) in &t.entries {
                    acc += p;
                    if u < acc {
                        return mask.clone();
                    }
                }
                t.entries.last().expect("table is nonempty").0.clone()
            }
            ConfigProcess::Iid(iid) => {
                let mut mask = EdgeMask::empty(iid.p.len());
                for (e, &p) in iid.p.iter().enumerate() {
                    if rng.uniform() < p {
                        mask.insert(e);
                    }
                }
                mask
            }
            ConfigProcess::Markov(chain) => {
                if self.started {
                    self.markov_state = rng.categorical(&chain.transition[self.markov_state]);
                }
                self.started = true;
                chain.states[self.markov_state].clone()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON process files

/// A probability written as a JSON number, a decimal string, or `"a/b"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ProbValue {
    Number(f64),
    Text(String),
}

impl ProbValue {
    pub fn value(&self) -> Result<f64, ProcessError> {
        match self {
            ProbValue::Number(x) => Ok(*x),
            ProbValue::Text(s) => {
                let s = s.trim();
                let parsed = match s.split_once('/') {
                    Some((a, b)) => a
                        .trim()
                        .parse::<f64>()
                        .ok()
                        .zip(b.trim().parse::<f64>().ok())
                        .map(|(a, b)| a / b),
                    None => s.parse::<f64>().ok(),
                };
                parsed
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| ProcessError::BadProbabilityText(s.to_string()))
            }
        }
    }
}

/// ON set: `"all"` or a list of `[src, dst]` name pairs.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RawMask {
    Keyword(String),
    Edges(Vec<(String, String)>),
}

impl RawMask {
    pub fn resolve(&self, net: &Network) -> Result<EdgeMask, ProcessError> {
        match self {
            RawMask::Keyword(k) if k == "all" => Ok(net.full_mask()),
            RawMask::Keyword(k) if k == "none" => Ok(net.empty_mask()),
            RawMask::Keyword(k) => Err(GraphError::UnknownNode(k.clone()).into()),
            RawMask::Edges(list) => {
                let mut mask = net.empty_mask();
                for (s, d) in list {
                    mask.insert(net.edge_by_name(s, d)?);
                }
                Ok(mask)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub on: RawMask,
    pub p: ProbValue,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEdgeProb {
    pub src: String,
    pub dst: String,
    pub p: ProbValue,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawState {
    pub on: RawMask,
}

/// Process file, tagged by `"type"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum RawProcess {
    Table {
        configs: Vec<RawConfig>,
    },
    Iid {
        p: ProbValue,
        #[serde(default)]
        per_edge: Vec<RawEdgeProb>,
    },
    Markov {
        states: Vec<RawState>,
        transition: Vec<Vec<ProbValue>>,
        #[serde(default)]
        initial: usize,
    },
}

impl RawProcess {
    pub fn resolve(&self, net: &Network) -> Result<ConfigProcess, ProcessError> {
        let m = net.edge_count();
        match self {
            RawProcess::Table { configs } => {
                let entries = configs
                    .iter()
                    .map(|c| Ok((c.on.resolve(net)?, c.p.value()?)))
                    .collect::<Result<Vec<_>, ProcessError>>()?;
                Ok(ConfigProcess::Table(ConfigTable::new(m, entries)?))
            }
            RawProcess::Iid { p, per_edge } => {
                let mut probs = vec![p.value()?; m];
                for ep in per_edge {
                    probs[net.edge_by_name(&ep.src, &ep.dst)?] = ep.p.value()?;
                }
                Ok(ConfigProcess::Iid(IidLinkProcess::new(probs)?))
            }
            RawProcess::Markov {
                states,
                transition,
                initial,
            } => {
                let masks = states
                    .iter()
                    .map(|s| s.on.resolve(net))
                    .collect::<Result<Vec<_>, _>>()?;
                let rows = transition
                    .iter()
                    .map(|row| row.iter().map(ProbValue::value).collect())
                    .collect::<Result<Vec<Vec<f64>>, _>>()?;
                Ok(ConfigProcess::Markov(MarkovConfigProcess::new(
                    masks, rows, *initial,
                )?))
            }
        }
    }
}
