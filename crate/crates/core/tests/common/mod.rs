#![allow(dead_code)]

use nsbm::model::{Hyper, ModelState, NetworkCollection};
use nsbm::netcore::{Adjacency, LabelVector, SymMatrix};
use nsbm::numerics::{log_sum_exp, ChainRng};
use rand::Rng;

pub fn random_graph(rng: &mut ChainRng, n: usize, p: f64) -> Adjacency {
    let mut edges = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            if rng.random::<f64>() < p {
                edges.push((s, t));
            }
        }
    }
    Adjacency::from_edges(n, edges).unwrap()
}

pub fn random_data(rng: &mut ChainRng, networks: usize, max_nodes: usize) -> NetworkCollection {
    let adjs = (0..networks)
        .map(|_| {
            let n = rng.random_range(2..=max_nodes);
            let p = rng.random_range(0.1..0.9);
            random_graph(rng, n, p)
        })
        .collect();
    NetworkCollection::from_adjacencies(adjs)
}

pub fn hyper(classes: usize, communities: usize) -> Hyper {
    Hyper {
        alpha: 0.7,
        beta: 1.3,
        w0: 2.0,
        pi0: 0.5,
        classes,
        communities,
    }
}

pub fn random_eta(rng: &mut ChainRng, communities: usize) -> SymMatrix<f64> {
    let mut e = SymMatrix::zeros(communities);
    for x in 0..communities {
        for y in x..communities {
            e.set(x, y, rng.random_range(0.05..0.95));
        }
    }
    e
}

pub fn random_state(rng: &mut ChainRng, data: &NetworkCollection, h: &Hyper) -> ModelState {
    let (classes, communities) = (h.classes, h.communities);
    let z = (0..data.len()).map(|_| rng.random_range(0..classes)).collect();
    let xi = data
        .networks()
        .iter()
        .map(|net| {
            let labels = (0..net.n()).map(|_| rng.random_range(0..communities)).collect();
            LabelVector::new(labels, communities).unwrap()
        })
        .collect();
    let eta = (0..classes).map(|_| random_eta(rng, communities)).collect();
    let u = (0..classes)
        .map(|_| (0..communities).map(|_| rng.random_range(0.1..0.9)).collect())
        .collect();
    let v = (0..classes).map(|_| rng.random_range(0.1..0.9)).collect();
    ModelState::new(z, xi, eta, u, v).unwrap()
}

/// Largest absolute gap between two log distributions after normalization.
pub fn normalized_gap(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    let (zg, zw) = (log_sum_exp(got), log_sum_exp(want));
    got.iter()
        .zip(want)
        .map(|(g, w)| {
            if *w == f64::NEG_INFINITY && *g == f64::NEG_INFINITY {
                0.0
            } else {
                (g - zg - (w - zw)).abs()
            }
        })
        .fold(0.0, f64::max)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
