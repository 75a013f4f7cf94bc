//! Parameter containers of the truncated nested SBM and its log densities.
//!
//! The joint and collapsed densities here are computed from scratch and serve
//! as the reference against which every sampler kernel is checked.

use serde::{Deserialize, Serialize};

use crate::error::{NsbmError, Result};
use crate::netcore::{compute_block_sums, label_counts, Adjacency, BlockStats, LabelVector, SymMatrix};
use crate::numerics::{log_beta, log_beta_pdf, log_stick_break, stick_break};

/// Edge probabilities are kept in `[ETA_CLAMP, 1 − ETA_CLAMP]` before taking logs.
pub const ETA_CLAMP: f64 = 1e-12;

/// Priors and truncation levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    /// Beta prior shapes for the edge probabilities.
    pub alpha: f64,
    pub beta: f64,
    /// Concentration of the community-level stick-breaking prior.
    pub w0: f64,
    /// Concentration of the class-level stick-breaking prior.
    pub pi0: f64,
    /// Class truncation `K`.
    pub classes: usize,
    /// Community truncation `L`.
    pub communities: usize,
}

impl Hyper {
    /// Flat priors with the default truncation for `num_networks` networks.
    pub fn defaults_for(num_networks: usize) -> Self {
        Hyper {
            alpha: 1.0,
            beta: 1.0,
            w0: 1.0,
            pi0: 1.0,
            classes: num_networks.clamp(1, 20),
            communities: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.alpha, self.beta, self.w0, self.pi0]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !positive {
            return Err(NsbmError::InvalidOptions(format!(
                "hyperparameters must be positive: {self:?}"
            )));
        }
        if self.classes == 0 || self.communities == 0 {
            return Err(NsbmError::InvalidOptions(
                "truncation levels must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One observed network with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub id: String,
    pub adj: Adjacency,
    pub z_true: Option<usize>,
    pub xi_true: Option<Vec<usize>>,
}

impl Network {
    pub fn new(id: impl Into<String>, adj: Adjacency) -> Self {
        Network {
            id: id.into(),
            adj,
            z_true: None,
            xi_true: None,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.n()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCollection {
    networks: Vec<Network>,
}

impl NetworkCollection {
    pub fn new(networks: Vec<Network>) -> Result<Self> {
        for net in &networks {
            if let Some(xi) = &net.xi_true {
                if xi.len() != net.n() {
                    return Err(NsbmError::DimensionMismatch(format!(
                        "network {}: {} truth labels for {} nodes",
                        net.id,
                        xi.len(),
                        net.n()
                    )));
                }
            }
        }
        Ok(NetworkCollection { networks })
    }

    pub fn from_adjacencies(adjs: Vec<Adjacency>) -> Self {
        NetworkCollection {
            networks: adjs
                .into_iter()
                .enumerate()
                .map(|(j, adj)| Network::new(format!("net{j}"), adj))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    pub fn networks(&self) -> &[Network] {
        &self.networks
    }

    pub fn adj(&self, j: usize) -> &Adjacency {
        &self.networks[j].adj
    }

    /// Class truth for every network, if all networks carry one.
    pub fn z_truth(&self) -> Option<Vec<usize>> {
        self.networks.iter().map(|n| n.z_true).collect()
    }

    /// Community truth for every network, if all networks carry one.
    pub fn xi_truth(&self) -> Option<Vec<Vec<usize>>> {
        self.networks.iter().map(|n| n.xi_true.clone()).collect()
    }
}

/// All latent variables of the truncated model.
///
/// The final stick of every class (`u[k][L-1]`) and of the class sticks
/// (`v[K-1]`) is fixed to 1, so the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub z: Vec<usize>,
    pub xi: Vec<LabelVector>,
    pub eta: Vec<SymMatrix<f64>>,
    u: Vec<Vec<f64>>,
    v: Vec<f64>,
    log_w: Vec<Vec<f64>>,
    log_pi: Vec<f64>,
}

impl ModelState {
    pub fn new(
        z: Vec<usize>,
        xi: Vec<LabelVector>,
        eta: Vec<SymMatrix<f64>>,
        mut u: Vec<Vec<f64>>,
        mut v: Vec<f64>,
    ) -> Result<Self> {
        let classes = v.len();
        if classes == 0 || u.len() != classes || eta.len() != classes {
            return Err(NsbmError::DimensionMismatch(format!(
                "{} class sticks, {} community stick rows, {} eta matrices",
                classes,
                u.len(),
                eta.len()
            )));
        }
        let communities = u[0].len();
        if communities == 0
            || u.iter().any(|row| row.len() != communities)
            || eta.iter().any(|e| e.dim() != communities)
        {
            return Err(NsbmError::DimensionMismatch(
                "community truncation differs across classes".into(),
            ));
        }
        if xi.len() != z.len() {
            return Err(NsbmError::DimensionMismatch(format!(
                "{} class labels but {} label vectors",
                z.len(),
                xi.len()
            )));
        }
        if let Some(&label) = z.iter().find(|&&k| k >= classes) {
            return Err(NsbmError::LabelOutOfRange { label, bound: classes });
        }
        if let Some(bad) = xi.iter().find(|x| x.bound() != communities) {
            return Err(NsbmError::DimensionMismatch(format!(
                "label bound {} differs from truncation {communities}",
                bad.bound()
            )));
        }
        for row in u.iter_mut() {
            row[communities - 1] = 1.0;
        }
        v[classes - 1] = 1.0;
        let mut state = ModelState {
            z,
            xi,
            eta,
            u,
            v,
            log_w: Vec::new(),
            log_pi: Vec::new(),
        };
        state.refresh_weights()?;
        Ok(state)
    }

    pub fn classes(&self) -> usize {
        self.v.len()
    }

    pub fn communities(&self) -> usize {
        self.u[0].len()
    }

    pub fn u(&self) -> &[Vec<f64>] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Replaces the community sticks of class `k`; the terminal stick stays 1.
    pub fn set_u(&mut self, k: usize, mut sticks: Vec<f64>) -> Result<()> {
        let last = self.communities() - 1;
        if sticks.len() != last + 1 {
            return Err(NsbmError::DimensionMismatch("stick vector length".into()));
        }
        sticks[last] = 1.0;
        self.log_w[k] = log_stick_break(&sticks)?;
        self.u[k] = sticks;
        Ok(())
    }

    /// Replaces the class sticks; the terminal stick stays 1.
    pub fn set_v(&mut self, mut sticks: Vec<f64>) -> Result<()> {
        let last = self.classes() - 1;
        if sticks.len() != last + 1 {
            return Err(NsbmError::DimensionMismatch("stick vector length".into()));
        }
        sticks[last] = 1.0;
        self.log_pi = log_stick_break(&sticks)?;
        self.v = sticks;
        Ok(())
    }

    fn refresh_weights(&mut self) -> Result<()> {
        self.log_w = self
            .u
            .iter()
            .map(|row| log_stick_break(row))
            .collect::<Result<_>>()?;
        self.log_pi = log_stick_break(&self.v)?;
        Ok(())
    }

    /// `ln w_{x,k}` for every community `x` of class `k`.
    pub fn log_w(&self, k: usize) -> &[f64] {
        &self.log_w[k]
    }

    pub fn log_pi(&self) -> &[f64] {
        &self.log_pi
    }

    pub fn w(&self, k: usize) -> Vec<f64> {
        stick_break(&self.u[k]).expect("sticks validated on assignment")
    }

    pub fn pi(&self) -> Vec<f64> {
        stick_break(&self.v).expect("sticks validated on assignment")
    }

    fn check_data(&self, data: &NetworkCollection) -> Result<()> {
        if self.z.len() != data.len() {
            return Err(NsbmError::DimensionMismatch(format!(
                "state has {} networks, data has {}",
                self.z.len(),
                data.len()
            )));
        }
        for (j, xi) in self.xi.iter().enumerate() {
            if xi.len() != data.adj(j).n() {
                return Err(NsbmError::DimensionMismatch(format!(
                    "network {j}: {} labels for {} nodes",
                    xi.len(),
                    data.adj(j).n()
                )));
            }
        }
        Ok(())
    }
}

/// `logit = ln[η/(1−η)]` and `log1m = ln(1−η)` of the clamped edge probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaLogs {
    pub logit: Vec<SymMatrix<f64>>,
    pub log1m: Vec<SymMatrix<f64>>,
}

impl EtaLogs {
    pub fn from_eta(eta: &[SymMatrix<f64>]) -> Self {
        let map = |f: fn(f64) -> f64| -> Vec<SymMatrix<f64>> {
            eta.iter()
                .map(|e| {
                    let mut out = SymMatrix::zeros(e.dim());
                    for x in 0..e.dim() {
                        for y in x..e.dim() {
                            out.set(x, y, f(clamp_eta(e.get(x, y))));
                        }
                    }
                    out
                })
                .collect()
        };
        EtaLogs {
            logit: map(|p| p.ln() - (-p).ln_1p()),
            log1m: map(|p| (-p).ln_1p()),
        }
    }
}

pub fn clamp_eta(p: f64) -> f64 {
    p.clamp(ETA_CLAMP, 1.0 - ETA_CLAMP)
}

/// Block sums of every network under its labels.
pub fn network_block_stats(xi: &[LabelVector], data: &NetworkCollection) -> Result<Vec<BlockStats>> {
    xi.iter()
        .enumerate()
        .map(|(j, labels)| compute_block_sums(data.adj(j), labels, labels.bound()))
        .collect()
}

/// Aggregate block sums per class.
pub fn class_block_stats(
    z: &[usize],
    per_network: &[BlockStats],
    classes: usize,
    communities: usize,
) -> Vec<BlockStats> {
    let mut out = vec![BlockStats::zeros(communities); classes];
    for (stats, &k) in per_network.iter().zip(z) {
        out[k].add_assign(stats);
    }
    out
}

// Σ_j [ln π_{z_j} + Σ_x n_x ln w_{x,z_j}], skipping empty communities.
fn label_log_prior(state: &ModelState) -> Result<f64> {
    let mut total = 0.0;
    for (j, &k) in state.z.iter().enumerate() {
        total += state.log_pi()[k];
        let (counts, _) = label_counts(&state.xi[j], state.communities())?;
        for (x, &c) in counts.iter().enumerate() {
            if c > 0 {
                total += c as f64 * state.log_w(k)[x];
            }
        }
    }
    Ok(total)
}

// Beta prior densities of the free sticks (terminal sticks excluded).
fn stick_log_prior(state: &ModelState, h: &Hyper) -> f64 {
    let mut total = 0.0;
    for row in state.u() {
        for &u in &row[..row.len() - 1] {
            total += log_beta_pdf(u, 1.0, h.w0);
        }
    }
    let v = state.v();
    for &vk in &v[..v.len() - 1] {
        total += log_beta_pdf(vk, 1.0, h.pi0);
    }
    total
}

/// Log of the full joint density of data, labels, edge probabilities and sticks.
pub fn log_joint(state: &ModelState, data: &NetworkCollection, h: &Hyper) -> Result<f64> {
    state.check_data(data)?;
    let per_network = network_block_stats(&state.xi, data)?;
    let (classes, communities) = (state.classes(), state.communities());
    let aggregate = class_block_stats(&state.z, &per_network, classes, communities);
    let logs = EtaLogs::from_eta(&state.eta);

    let mut total = 0.0;
    for k in 0..classes {
        for x in 0..communities {
            for y in x..communities {
                let (m, m_bar) = (aggregate[k].m(x, y), aggregate[k].m_bar(x, y));
                let log1m = logs.log1m[k].get(x, y);
                let log_p = logs.logit[k].get(x, y) + log1m;
                total += m as f64 * log_p + m_bar as f64 * log1m;
                total += log_beta_pdf(clamp_eta(state.eta[k].get(x, y)), h.alpha, h.beta);
            }
        }
    }
    total += label_log_prior(state)?;
    total += stick_log_prior(state, h);
    Ok(total)
}

/// `Σ_k Σ_{x≤y} ln B(m_{xyk} + α, m̄_{xyk} + β)`: the edge-probability-marginalized likelihood.
pub fn collapsed_beta_term(
    z: &[usize],
    xi: &[LabelVector],
    data: &NetworkCollection,
    h: &Hyper,
) -> Result<f64> {
    let communities = xi.first().map_or(h.communities, |x| x.bound());
    let per_network = network_block_stats(xi, data)?;
    let classes = z.iter().copied().max().map_or(1, |k| k + 1).max(h.classes);
    let aggregate = class_block_stats(z, &per_network, classes, communities);
    let mut total = 0.0;
    for stats in &aggregate {
        for x in 0..communities {
            for y in x..communities {
                total += log_beta(stats.m(x, y) as f64 + h.alpha, stats.m_bar(x, y) as f64 + h.beta);
            }
        }
    }
    Ok(total)
}

/// Log density with edge probabilities integrated out, at fixed sticks.
pub fn collapsed_log_joint(state: &ModelState, data: &NetworkCollection, h: &Hyper) -> Result<f64> {
    state.check_data(data)?;
    let hk = Hyper {
        classes: state.classes(),
        ..*h
    };
    Ok(collapsed_beta_term(&state.z, &state.xi, data, &hk)?
        + label_log_prior(state)?
        + stick_log_prior(state, h))
}

/// Posterior-mean edge probabilities `(m + α) / (N + α + β)` per class.
pub fn estimate_eta(
    z: &[usize],
    xi: &[LabelVector],
    data: &NetworkCollection,
    h: &Hyper,
) -> Result<Vec<SymMatrix<f64>>> {
    if z.len() != data.len() || xi.len() != data.len() {
        return Err(NsbmError::DimensionMismatch("labels do not match data".into()));
    }
    let communities = xi.first().map_or(h.communities, |x| x.bound());
    let per_network = network_block_stats(xi, data)?;
    let aggregate = class_block_stats(z, &per_network, h.classes, communities);
    Ok(aggregate
        .iter()
        .map(|stats| {
            let mut eta = SymMatrix::zeros(communities);
            for x in 0..communities {
                for y in x..communities {
                    let p = (stats.m(x, y) as f64 + h.alpha)
                        / (stats.n(x, y) as f64 + h.alpha + h.beta);
                    eta.set(x, y, p);
                }
            }
            eta
        })
        .collect())
}

/// One retained `(z, ξ)` snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Draw {
    pub iter: usize,
    pub z: Vec<usize>,
    pub xi: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub log_density: f64,
    pub occupied_classes: usize,
    pub mean_occupied_communities: f64,
    pub z_nmi: Option<f64>,
    pub xi_nmi: Option<f64>,
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PosteriorSamples {
    pub draws: Vec<Draw>,
    pub trace: Vec<TraceRow>,
}
