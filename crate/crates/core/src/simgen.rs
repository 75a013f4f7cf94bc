//! Synthetic collections of networks with planted classes and communities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NsbmError, Result};
use crate::model::{Network, NetworkCollection};
use crate::netcore::{Adjacency, SymMatrix};

/// Either one value for every class or one value per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerClass {
    Same(usize),
    Each(Vec<usize>),
}

/// Settings of the planted-partition generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(rename = "J")]
    pub networks: usize,
    /// Fixed node count; exclusive with `n_range`.
    #[serde(rename = "n", default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// Inclusive node-count range sampled per network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<(usize, usize)>,
    #[serde(rename = "K")]
    pub classes: usize,
    #[serde(rename = "L")]
    pub communities: PerClass,
    pub gamma: f64,
    pub lambda: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Assign classes round-robin when `J` is a multiple of `K`.
    #[serde(default = "default_true")]
    pub balanced: bool,
}

fn default_true() -> bool {
    true
}

impl SimConfig {
    /// Parses and validates a JSON config.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(text).map_err(|e| NsbmError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NsbmError::InvalidConfig(m));
        if self.networks == 0 || self.classes == 0 {
            return bad("J and K must be at least 1".into());
        }
        match (self.nodes, self.n_range) {
            (Some(_), Some(_)) => return bad("give either n or n_range, not both".into()),
            (None, None) => return bad("missing n or n_range".into()),
            (Some(0), _) => return bad("n must be at least 1".into()),
            (_, Some((lo, hi))) if lo == 0 || lo > hi => {
                return bad(format!("invalid n_range [{lo}, {hi}]"))
            }
            _ => {}
        }
        if let PerClass::Each(l) = &self.communities {
            if l.len() != self.classes {
                return bad(format!("L lists {} classes but K = {}", l.len(), self.classes));
            }
        }
        if (0..self.classes).any(|k| self.communities_of(k) == 0) {
            return bad("every class needs at least one community".into());
        }
        if !(0.0..=1.0).contains(&self.gamma) || !(0.0..=1.0).contains(&self.tau) {
            return bad("gamma and tau must lie in [0, 1]".into());
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be positive".into());
        }
        Ok(())
    }

    pub fn communities_of(&self, k: usize) -> usize {
        match &self.communities {
            PerClass::Same(l) => *l,
            PerClass::Each(l) => l[k],
        }
    }

    fn max_nodes(&self) -> usize {
        self.nodes.or(self.n_range.map(|r| r.1)).unwrap_or(0)
    }

    fn draw_nodes<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match (self.nodes, self.n_range) {
            (Some(n), _) => n,
            (None, Some((lo, hi))) => rng.random_range(lo..=hi),
            (None, None) => unreachable!("validated"),
        }
    }
}

/// A generated collection with its planted connectivity.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub collection: NetworkCollection,
    /// Unscaled connectivity matrix of each class.
    pub eta: Vec<SymMatrix<f64>>,
    /// Degree scale applied to each network (1 when unscaled).
    pub scales: Vec<f64>,
    /// Node pairs whose scaled probability exceeded 1 and was clamped.
    pub clamped_pairs: usize,
}

/// `(1 − γ) I + γ U` with `U` symmetric uniform on `[0, 1]`.
pub fn gen_eta<R: Rng + ?Sized>(communities: usize, gamma: f64, rng: &mut R) -> SymMatrix<f64> {
    let mut eta = SymMatrix::zeros(communities);
    for x in 0..communities {
        for y in x..communities {
            let identity = if x == y { 1.0 } else { 0.0 };
            eta.set(x, y, (1.0 - gamma) * identity + gamma * rng.random::<f64>());
        }
    }
    eta
}

/// Expected average degree of an SBM with the given labels:
/// `(1/n) Σ_s Σ_{t≠s} η[ξ_s][ξ_t]`.
pub fn ead(eta: &SymMatrix<f64>, xi: &[usize]) -> f64 {
    let n = xi.len();
    if n < 2 {
        return 0.0;
    }
    let mut counts = vec![0.0; eta.dim()];
    for &x in xi {
        counts[x] += 1.0;
    }
    let mut total = 0.0;
    for x in 0..eta.dim() {
        for y in 0..eta.dim() {
            total += counts[x] * counts[y] * eta.get(x, y);
        }
        total -= counts[x] * eta.get(x, x);
    }
    total / n as f64
}

// Bernoulli(scale · η) edges over all pairs s < t.
fn sample_sbm<R: Rng + ?Sized>(
    eta: &SymMatrix<f64>,
    scale: f64,
    xi: &[usize],
    rng: &mut R,
    clamped: &mut usize,
) -> Result<Adjacency> {
    let n = xi.len();
    let mut edges = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            let mut p = scale * eta.get(xi[s], xi[t]);
            if p > 1.0 {
                *clamped += 1;
                p = 1.0;
            }
            if rng.random::<f64>() < p {
                edges.push((s, t));
            }
        }
    }
    Adjacency::from_edges(n, edges)
}

/// Planted-partition collection: networks share class templates, node labels
/// are resampled with probability `tau`, and each network's connectivity is
/// scaled to expected average degree `lambda`.
pub fn gen_collection<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<SimOutput> {
    cfg.validate()?;
    let (j_total, classes) = (cfg.networks, cfg.classes);
    let z: Vec<usize> = if cfg.balanced && j_total % classes == 0 {
        (0..j_total).map(|j| j % classes).collect()
    } else {
        (0..j_total).map(|_| rng.random_range(0..classes)).collect()
    };
    let eta: Vec<SymMatrix<f64>> = (0..classes)
        .map(|k| gen_eta(cfg.communities_of(k), cfg.gamma, rng))
        .collect();
    let templates: Vec<Vec<usize>> = (0..classes)
        .map(|k| {
            let l = cfg.communities_of(k);
            (0..cfg.max_nodes()).map(|_| rng.random_range(0..l)).collect()
        })
        .collect();

    let mut networks = Vec::with_capacity(j_total);
    let mut scales = Vec::with_capacity(j_total);
    let mut clamped = 0;
    for (j, &k) in z.iter().enumerate() {
        let n = cfg.draw_nodes(rng);
        let l = cfg.communities_of(k);
        let xi: Vec<usize> = templates[k][..n]
            .iter()
            .map(|&x| {
                if cfg.tau > 0.0 && rng.random::<f64>() < cfg.tau {
                    rng.random_range(0..l)
                } else {
                    x
                }
            })
            .collect();
        let degree = ead(&eta[k], &xi);
        if degree <= 0.0 {
            return Err(NsbmError::Domain(format!(
                "network {j} has zero expected average degree and cannot be scaled"
            )));
        }
        let scale = cfg.lambda / degree;
        let adj = sample_sbm(&eta[k], scale, &xi, rng, &mut clamped)?;
        scales.push(scale);
        networks.push(Network {
            id: format!("net{j}"),
            adj,
            z_true: Some(k),
            xi_true: Some(xi),
        });
    }
    Ok(SimOutput {
        collection: NetworkCollection::new(networks)?,
        eta,
        scales,
        clamped_pairs: clamped,
    })
}

/// Interaction probabilities between extroverts, ambiverts and introverts
/// in each of three school types.
pub const PERSONALITY_ETA: [[[f64; 3]; 3]; 3] = [
    [[0.9, 0.75, 0.5], [0.75, 0.6, 0.25], [0.5, 0.25, 0.1]],
    [[0.8, 0.1, 0.3], [0.1, 0.9, 0.2], [0.3, 0.2, 0.7]],
    [[0.1, 0.4, 0.6], [0.4, 0.3, 0.1], [0.6, 0.1, 0.5]],
];

/// Share of extroverts, ambiverts and introverts per school type.
pub const PERSONALITY_SHARES: [[f64; 3]; 3] = [[0.4, 0.35, 0.25], [0.7, 0.15, 0.15], [0.2, 0.4, 0.4]];

/// Non-assortative benchmark: `per_school` networks for each of three
/// schools, ordered school by school, with unscaled connectivity.
pub fn personality_benchmark<R: Rng + ?Sized>(
    per_school: usize,
    n_range: (usize, usize),
    rng: &mut R,
) -> Result<SimOutput> {
    let (lo, hi) = n_range;
    if lo == 0 || lo > hi {
        return Err(NsbmError::InvalidConfig(format!("invalid n_range [{lo}, {hi}]")));
    }
    let eta: Vec<SymMatrix<f64>> = PERSONALITY_ETA
        .iter()
        .map(|m| SymMatrix::from_upper(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()))
        .collect();
    let mut networks = Vec::with_capacity(3 * per_school);
    let mut clamped = 0;
    for (k, shares) in PERSONALITY_SHARES.iter().enumerate() {
        for _ in 0..per_school {
            let n = rng.random_range(lo..=hi);
            let xi: Vec<usize> = (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    if u < shares[0] {
                        0
                    } else if u < shares[0] + shares[1] {
                        1
                    } else {
                        2
                    }
                })
                .collect();
            let adj = sample_sbm(&eta[k], 1.0, &xi, rng, &mut clamped)?;
            networks.push(Network {
                id: format!("net{}", networks.len()),
                adj,
                z_true: Some(k),
                xi_true: Some(xi),
            });
        }
    }
    Ok(SimOutput {
        collection: NetworkCollection::new(networks)?,
        eta,
        scales: vec![1.0; 3 * per_school],
        clamped_pairs: clamped,
    })
}
