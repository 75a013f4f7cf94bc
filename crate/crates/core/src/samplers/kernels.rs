//! Update kernels shared by the four samplers.
//!
//! Every discrete kernel is split into a `*_logits` function returning the
//! unnormalized log full conditional and an `update_*` function that samples
//! from it, so the conditionals can be checked against the joint densities.

use rand::Rng;

use super::state::ChainState;
use crate::error::Result;
use crate::netcore::{greater_counts, DeltaStats, NeighborCounts};
use crate::numerics::{log_beta_ratio_unchecked, log_sum_exp, sample_beta, sample_categorical_logits};

/// Beta shapes of the conditional of `η_{xyk}`.
pub fn eta_posterior(cs: &ChainState, k: usize, x: usize, y: usize) -> (f64, f64) {
    let stats = cs.class_stats(k);
    (
        stats.m(x, y) as f64 + cs.hyper.alpha,
        stats.m_bar(x, y) as f64 + cs.hyper.beta,
    )
}

pub fn update_eta<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    let communities = cs.hyper.communities;
    for k in 0..cs.hyper.classes {
        for x in 0..communities {
            for y in x..communities {
                let (a, b) = eta_posterior(cs, k, x, y);
                let p = sample_beta(a, b, rng)?;
                cs.params.eta[k].set(x, y, p);
            }
        }
    }
    cs.refresh_eta_logs();
    Ok(())
}

// `Σ_y τ_y logit[k][x][y] + ν_y log1m[k][x][y]`: log-likelihood of the
// edges between a node placed in community x and the rest of its network.
#[inline]
fn node_edge_score(cs: &ChainState, k: usize, x: usize, nc: &NeighborCounts) -> f64 {
    let logit = cs.eta_logs.logit[k].row(x);
    let log1m = cs.eta_logs.log1m[k].row(x);
    let mut total = 0.0;
    for y in 0..nc.nu.len() {
        let nu = nc.nu[y];
        if nu > 0 {
            total += nc.tau[y] as f64 * logit[y] + nu as f64 * log1m[y];
        }
    }
    total
}

fn xi_gibbs_logits_from(cs: &ChainState, k: usize, nc: &NeighborCounts) -> Vec<f64> {
    let log_w = cs.params.log_w(k);
    (0..cs.hyper.communities)
        .map(|x| {
            if log_w[x] == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                log_w[x] + node_edge_score(cs, k, x, nc)
            }
        })
        .collect()
}

/// Log full conditional of `ξ_{sj}` given everything else.
pub fn xi_gibbs_logits(cs: &ChainState, j: usize, s: usize) -> Vec<f64> {
    let nc = cs.neighbor_counts(j, s);
    xi_gibbs_logits_from(cs, cs.params.z[j], &nc)
}

/// Sequential sweep over nodes (index order) of every network.
pub fn update_xi_gibbs<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    for j in 0..cs.num_networks() {
        let k = cs.params.z[j];
        for s in 0..cs.data().adj(j).n() {
            let nc = cs.neighbor_counts(j, s);
            let logits = xi_gibbs_logits_from(cs, k, &nc);
            let to = sample_categorical_logits(&logits, rng)?;
            let from = cs.params.xi[j].get(s);
            cs.move_node(j, s, &DeltaStats::new(from, to, nc))?;
        }
    }
    Ok(())
}

// `Σ_x n_x ln w_{x,k}` over occupied communities.
#[inline]
fn label_score(log_w: &[f64], counts: &[usize]) -> f64 {
    let mut total = 0.0;
    for (x, &c) in counts.iter().enumerate() {
        if c > 0 {
            total += c as f64 * log_w[x];
        }
    }
    total
}

// Occupied blocks `(x, y, m, N)` of network j with x ≤ y.
fn occupied_blocks(cs: &ChainState, j: usize) -> Vec<(usize, usize, i64, i64)> {
    let stats = cs.net_stats(j);
    let communities = cs.hyper.communities;
    let mut out = Vec::new();
    for x in 0..communities {
        if cs.label_counts(j)[x] == 0 {
            continue;
        }
        for y in x..communities {
            let pairs = stats.n(x, y);
            if pairs > 0 {
                out.push((x, y, stats.m(x, y), pairs));
            }
        }
    }
    out
}

// Log-likelihood of network j's edges under class k.
fn network_edge_score(cs: &ChainState, k: usize, blocks: &[(usize, usize, i64, i64)]) -> f64 {
    let (logit, log1m) = (&cs.eta_logs.logit[k], &cs.eta_logs.log1m[k]);
    blocks
        .iter()
        .map(|&(x, y, m, pairs)| m as f64 * logit.get(x, y) + pairs as f64 * log1m.get(x, y))
        .sum()
}

/// Log full conditional of `z_j` given labels and continuous parameters.
pub fn z_gibbs_logits(cs: &ChainState, j: usize) -> Vec<f64> {
    let blocks = occupied_blocks(cs, j);
    let counts = cs.label_counts(j);
    (0..cs.hyper.classes)
        .map(|r| {
            let base = cs.params.log_pi()[r] + label_score(cs.params.log_w(r), counts);
            if base == f64::NEG_INFINITY {
                base
            } else {
                base + network_edge_score(cs, r, &blocks)
            }
        })
        .collect()
}

/// Draws every `z_j` from the same pre-update state, then rebuilds the aggregates.
pub fn update_z_gibbs<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    let z = (0..cs.num_networks())
        .map(|j| sample_categorical_logits(&z_gibbs_logits(cs, j), rng))
        .collect::<Result<Vec<_>>>()?;
    cs.set_classes(z);
    Ok(())
}

/// Beta shapes of the conditionals of the free community sticks of class `k`.
pub fn u_posterior(cs: &ChainState, k: usize) -> Vec<(f64, f64)> {
    let communities = cs.hyper.communities;
    let mut pooled = vec![0usize; communities];
    for j in (0..cs.num_networks()).filter(|&j| cs.params.z[j] == k) {
        for (p, c) in pooled.iter_mut().zip(cs.label_counts(j)) {
            *p += c;
        }
    }
    let greater = greater_counts(&pooled);
    (0..communities - 1)
        .map(|x| (pooled[x] as f64 + 1.0, greater[x] as f64 + cs.hyper.w0))
        .collect()
}

pub fn update_u<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    for k in 0..cs.hyper.classes {
        let mut sticks = u_posterior(cs, k)
            .into_iter()
            .map(|(a, b)| sample_beta(a, b, rng))
            .collect::<Result<Vec<_>>>()?;
        sticks.push(1.0);
        cs.params.set_u(k, sticks)?;
    }
    Ok(())
}

/// Beta shapes of the conditionals of the free class sticks.
pub fn v_posterior(cs: &ChainState) -> Vec<(f64, f64)> {
    let classes = cs.hyper.classes;
    let mut counts = vec![0usize; classes];
    for &k in &cs.params.z {
        counts[k] += 1;
    }
    let greater = greater_counts(&counts);
    (0..classes - 1)
        .map(|k| (counts[k] as f64 + 1.0, greater[k] as f64 + cs.hyper.pi0))
        .collect()
}

pub fn update_v<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    let mut sticks = v_posterior(cs)
        .into_iter()
        .map(|(a, b)| sample_beta(a, b, rng))
        .collect::<Result<Vec<_>>>()?;
    sticks.push(1.0);
    cs.params.set_v(sticks)
}

// Moving node s from `from` to `to` factors into removing s, which is the
// same for every candidate, and adding it to `to`, which only touches the
// blocks `(to, y)` with `ν_y > 0`. The constant removal factor is dropped.
fn xi_collapsed_logits_from(cs: &ChainState, j: usize, s: usize, nc: &NeighborCounts) -> Vec<f64> {
    let k = cs.params.z[j];
    let from = cs.params.xi[j].get(s);
    let (alpha, beta) = (cs.hyper.alpha, cs.hyper.beta);
    let q = cs.class_stats(k);
    let log_w = cs.params.log_w(k);
    let (tau, nu) = (&nc.tau, &nc.nu);
    let neighbors: Vec<usize> = (0..nu.len()).filter(|&y| nu[y] > 0).collect();

    // Class block counts (m, N) with node s taken out.
    let without_s = |a: usize, b: usize| -> (i64, i64) {
        let (mut m, mut pairs) = (q.m(a, b), q.n(a, b));
        if a == from {
            m -= tau[b];
            pairs -= nu[b];
        } else if b == from {
            m -= tau[a];
            pairs -= nu[a];
        }
        (m, pairs)
    };
    let add_to = |to: usize| -> f64 {
        neighbors
            .iter()
            .map(|&y| {
                let (m, pairs) = without_s(to, y);
                log_beta_ratio_unchecked(m as f64 + alpha, (pairs - m) as f64 + beta, tau[y], nu[y] - tau[y])
            })
            .sum()
    };
    // Every community with no blocks left shares one value.
    let mut unused_row = None;
    (0..cs.hyper.communities)
        .map(|to| {
            if log_w[to] == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            let unused = neighbors.iter().all(|&y| without_s(to, y) == (0, 0));
            let gain = if unused {
                *unused_row.get_or_insert_with(|| add_to(to))
            } else {
                add_to(to)
            };
            log_w[to] + gain
        })
        .collect()
}

/// Log full conditional of `ξ_{sj}` with the edge probabilities integrated out.
pub fn xi_collapsed_logits(cs: &ChainState, j: usize, s: usize) -> Vec<f64> {
    let nc = cs.neighbor_counts(j, s);
    xi_collapsed_logits_from(cs, j, s, &nc)
}

pub fn update_xi_collapsed<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    for j in 0..cs.num_networks() {
        for s in 0..cs.data().adj(j).n() {
            let nc = cs.neighbor_counts(j, s);
            let logits = xi_collapsed_logits_from(cs, j, s, &nc);
            let to = sample_categorical_logits(&logits, rng)?;
            let from = cs.params.xi[j].get(s);
            cs.move_node(j, s, &DeltaStats::new(from, to, nc))?;
        }
    }
    Ok(())
}

/// Log full conditional of `z_j` with the edge probabilities integrated out.
///
/// Moving network j out of its class `r0` changes that class's counts the
/// same way for every candidate `r ≠ r0`, so that factor is computed once.
pub fn z_collapsed_logits(cs: &ChainState, j: usize) -> Vec<f64> {
    let (alpha, beta) = (cs.hyper.alpha, cs.hyper.beta);
    let r0 = cs.params.z[j];
    let blocks = occupied_blocks(cs, j);
    let counts = cs.label_counts(j);

    let block_ratio = |k: usize, sign: i64| -> f64 {
        let q = cs.class_stats(k);
        blocks
            .iter()
            .map(|&(x, y, m, pairs)| {
                log_beta_ratio_unchecked(
                    q.m(x, y) as f64 + alpha,
                    q.m_bar(x, y) as f64 + beta,
                    sign * m,
                    sign * (pairs - m),
                )
            })
            .sum()
    };
    let log_kappa = block_ratio(r0, -1);

    (0..cs.hyper.classes)
        .map(|r| {
            let base = cs.params.log_pi()[r] + label_score(cs.params.log_w(r), counts);
            if r == r0 || base == f64::NEG_INFINITY {
                base
            } else {
                base + log_kappa + block_ratio(r, 1)
            }
        })
        .collect()
}

/// Sequential over networks; aggregates follow each accepted draw.
pub fn update_z_collapsed<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    for j in 0..cs.num_networks() {
        let r = sample_categorical_logits(&z_collapsed_logits(cs, j), rng)?;
        cs.move_network(j, r);
    }
    Ok(())
}

// Edge log-likelihood of all of network j under every class.
fn network_edge_scores(cs: &ChainState, j: usize) -> Vec<f64> {
    let blocks = occupied_blocks(cs, j);
    (0..cs.hyper.classes)
        .map(|k| network_edge_score(cs, k, &blocks))
        .collect()
}

// Marginal-over-class conditional of ξ_{sj}. `edge_scores[k]` is the edge
// log-likelihood of the whole network under class k with node s at its
// current label; node s's own contribution is removed to get the remainder.
fn xi_marginal_logits_from(
    cs: &ChainState,
    j: usize,
    s: usize,
    nc: &NeighborCounts,
    edge_scores: &[f64],
) -> Vec<f64> {
    let from = cs.params.xi[j].get(s);
    let communities = cs.hyper.communities;
    let mut rest_counts = cs.label_counts(j).to_vec();
    rest_counts[from] -= 1;

    let mut per_class: Vec<Vec<f64>> = Vec::with_capacity(cs.hyper.classes);
    for k in 0..cs.hyper.classes {
        let log_w = cs.params.log_w(k);
        let head = cs.params.log_pi()[k] + label_score(log_w, &rest_counts);
        let row: Vec<f64> = if head == f64::NEG_INFINITY {
            vec![f64::NEG_INFINITY; communities]
        } else {
            let remainder = head + edge_scores[k] - node_edge_score(cs, k, from, nc);
            (0..communities)
                .map(|x| {
                    if log_w[x] == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        remainder + log_w[x] + node_edge_score(cs, k, x, nc)
                    }
                })
                .collect()
        };
        per_class.push(row);
    }
    let mut buf = vec![0.0; cs.hyper.classes];
    (0..communities)
        .map(|x| {
            for (b, row) in buf.iter_mut().zip(&per_class) {
                *b = row[x];
            }
            log_sum_exp(&buf)
        })
        .collect()
}

/// Log conditional of `ξ_{sj}` given the other labels of network j and the
/// continuous parameters, with `z_j` summed out.
pub fn xi_marginal_logits(cs: &ChainState, j: usize, s: usize) -> Vec<f64> {
    let nc = cs.neighbor_counts(j, s);
    let scores = network_edge_scores(cs, j);
    xi_marginal_logits_from(cs, j, s, &nc, &scores)
}

pub fn update_xi_marginal_z<R: Rng + ?Sized>(cs: &mut ChainState, rng: &mut R) -> Result<()> {
    for j in 0..cs.num_networks() {
        let mut scores = network_edge_scores(cs, j);
        for s in 0..cs.data().adj(j).n() {
            let nc = cs.neighbor_counts(j, s);
            let logits = xi_marginal_logits_from(cs, j, s, &nc, &scores);
            let to = sample_categorical_logits(&logits, rng)?;
            let from = cs.params.xi[j].get(s);
            if to != from {
                for (k, score) in scores.iter_mut().enumerate() {
                    *score += node_edge_score(cs, k, to, &nc) - node_edge_score(cs, k, from, &nc);
                }
                cs.move_node(j, s, &DeltaStats::new(from, to, nc))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{collapsed_log_joint, log_joint, Hyper, ModelState, NetworkCollection};
    use crate::numerics::{log_beta_pdf, stream_rng, ChainRng};
    use crate::samplers::testutil::{hyper, random_data, random_state};

    const TOL: f64 = 1e-8;

    // Compares two unnormalized log distributions after normalization.
    fn assert_same_distribution(got: &[f64], want: &[f64]) {
        assert_eq!(got.len(), want.len());
        let (zg, zw) = (log_sum_exp(got), log_sum_exp(want));
        for (g, w) in got.iter().zip(want) {
            if *w == f64::NEG_INFINITY {
                assert_eq!(*g, f64::NEG_INFINITY);
            } else {
                assert!((g - zg - (w - zw)).abs() < TOL, "{got:?} vs {want:?}");
            }
        }
    }

    struct Case {
        data: NetworkCollection,
        h: Hyper,
        state: ModelState,
        rng: ChainRng,
    }

    fn cases(seed: u64, count: usize) -> impl Iterator<Item = Case> {
        (0..count).map(move |i| {
            let mut rng = stream_rng(seed, i as u64);
            let classes = rng.random_range(1..=3);
            let communities = rng.random_range(1..=4);
            let networks = rng.random_range(1..=4);
            let data = random_data(&mut rng, networks, 7);
            let h = hyper(classes, communities);
            let state = random_state(&mut rng, &data, &h);
            Case { data, h, state, rng }
        })
    }

    fn pick_node(case: &mut Case) -> (usize, usize) {
        let j = case.rng.random_range(0..case.data.len());
        let s = case.rng.random_range(0..case.data.adj(j).n());
        (j, s)
    }

    fn with_label(state: &ModelState, j: usize, s: usize, x: usize) -> ModelState {
        let mut st = state.clone();
        st.xi[j].set(s, x).unwrap();
        st
    }

    fn with_class(state: &ModelState, j: usize, k: usize) -> ModelState {
        let mut st = state.clone();
        st.z[j] = k;
        st
    }

    #[test]
    fn xi_gibbs_matches_joint() {
        for mut case in cases(100, 100) {
            let (j, s) = pick_node(&mut case);
            let cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            let oracle: Vec<f64> = (0..case.h.communities)
                .map(|x| log_joint(&with_label(&case.state, j, s, x), &case.data, &case.h).unwrap())
                .collect();
            assert_same_distribution(&xi_gibbs_logits(&cs, j, s), &oracle);
        }
    }

    #[test]
    fn z_gibbs_matches_joint() {
        for mut case in cases(101, 100) {
            let (j, _) = pick_node(&mut case);
            let cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            let oracle: Vec<f64> = (0..case.h.classes)
                .map(|k| log_joint(&with_class(&case.state, j, k), &case.data, &case.h).unwrap())
                .collect();
            assert_same_distribution(&z_gibbs_logits(&cs, j), &oracle);
        }
    }

    #[test]
    fn xi_collapsed_matches_collapsed_joint() {
        for mut case in cases(102, 100) {
            let (j, s) = pick_node(&mut case);
            let cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            let oracle: Vec<f64> = (0..case.h.communities)
                .map(|x| {
                    collapsed_log_joint(&with_label(&case.state, j, s, x), &case.data, &case.h).unwrap()
                })
                .collect();
            assert_same_distribution(&xi_collapsed_logits(&cs, j, s), &oracle);
        }
    }

    #[test]
    fn z_collapsed_matches_collapsed_joint() {
        for mut case in cases(103, 100) {
            let (j, _) = pick_node(&mut case);
            let cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            let oracle: Vec<f64> = (0..case.h.classes)
                .map(|k| collapsed_log_joint(&with_class(&case.state, j, k), &case.data, &case.h).unwrap())
                .collect();
            assert_same_distribution(&z_collapsed_logits(&cs, j), &oracle);
        }
    }

    #[test]
    fn xi_marginal_matches_joint_summed_over_classes() {
        for mut case in cases(104, 100) {
            let (j, s) = pick_node(&mut case);
            let cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            let oracle: Vec<f64> = (0..case.h.communities)
                .map(|x| {
                    let per_class: Vec<f64> = (0..case.h.classes)
                        .map(|k| {
                            let st = with_class(&with_label(&case.state, j, s, x), j, k);
                            log_joint(&st, &case.data, &case.h).unwrap()
                        })
                        .collect();
                    log_sum_exp(&per_class)
                })
                .collect();
            assert_same_distribution(&xi_marginal_logits(&cs, j, s), &oracle);
        }
    }

    #[test]
    fn single_class_marginal_equals_gibbs() {
        for mut case in cases(105, 50) {
            case.h.classes = 1;
            let state = random_state(&mut case.rng, &case.data, &case.h);
            let (j, s) = pick_node(&mut case);
            let cs = ChainState::new(&case.data, case.h, state).unwrap();
            assert_same_distribution(&xi_marginal_logits(&cs, j, s), &xi_gibbs_logits(&cs, j, s));
        }
    }

    // The joint as a function of one continuous coordinate must differ from
    // the claimed Beta conditional by a constant.
    fn check_beta_conditional(
        (a, b): (f64, f64),
        mut joint_at: impl FnMut(f64) -> f64,
    ) {
        let (p, q) = (0.23, 0.71);
        let lhs = joint_at(p) - joint_at(q);
        let rhs = log_beta_pdf(p, a, b) - log_beta_pdf(q, a, b);
        assert!((lhs - rhs).abs() < TOL, "{lhs} vs {rhs}");
    }

    #[test]
    fn continuous_conditionals_match_joint() {
        for mut case in cases(106, 100) {
            let cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            let (k, x) = (
                case.rng.random_range(0..case.h.classes),
                case.rng.random_range(0..case.h.communities),
            );
            let y = case.rng.random_range(0..case.h.communities);
            check_beta_conditional(eta_posterior(&cs, k, x, y), |p| {
                let mut st = case.state.clone();
                st.eta[k].set(x, y, p);
                log_joint(&st, &case.data, &case.h).unwrap()
            });
            for (x, shapes) in u_posterior(&cs, k).into_iter().enumerate() {
                check_beta_conditional(shapes, |p| {
                    let mut st = case.state.clone();
                    let mut sticks = st.u()[k].clone();
                    sticks[x] = p;
                    st.set_u(k, sticks).unwrap();
                    log_joint(&st, &case.data, &case.h).unwrap()
                });
            }
            for (k, shapes) in v_posterior(&cs).into_iter().enumerate() {
                check_beta_conditional(shapes, |p| {
                    let mut st = case.state.clone();
                    let mut sticks = st.v().to_vec();
                    sticks[k] = p;
                    st.set_v(sticks).unwrap();
                    log_joint(&st, &case.data, &case.h).unwrap()
                });
            }
        }
    }

    type Update = fn(&mut ChainState, &mut ChainRng) -> Result<()>;

    const UPDATES: [(&str, Update); 8] = [
        ("eta", update_eta),
        ("xi_gibbs", update_xi_gibbs),
        ("z_gibbs", update_z_gibbs),
        ("xi_collapsed", update_xi_collapsed),
        ("z_collapsed", update_z_collapsed),
        ("xi_marginal", update_xi_marginal_z),
        ("u", update_u),
        ("v", update_v),
    ];

    #[test]
    fn updates_keep_statistics_coherent() {
        for mut case in cases(107, 30) {
            let mut cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            for _ in 0..3 {
                for (name, update) in UPDATES {
                    update(&mut cs, &mut case.rng).unwrap();
                    assert!(cs.stats_coherent().unwrap(), "{name} broke the statistics");
                }
            }
        }
    }

    #[test]
    fn updates_are_deterministic_given_the_stream() {
        for case in cases(108, 10) {
            let run = || {
                let mut rng = stream_rng(7, 0);
                let mut cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
                for (_, update) in UPDATES {
                    update(&mut cs, &mut rng).unwrap();
                }
                cs.into_params()
            };
            assert_eq!(run(), run());
        }
    }

    #[test]
    fn sticks_stay_terminal() {
        for mut case in cases(109, 20) {
            let mut cs = ChainState::new(&case.data, case.h, case.state.clone()).unwrap();
            update_u(&mut cs, &mut case.rng).unwrap();
            update_v(&mut cs, &mut case.rng).unwrap();
            assert!(cs.params.u().iter().all(|row| *row.last().unwrap() == 1.0));
            assert_eq!(*cs.params.v().last().unwrap(), 1.0);
            let total: f64 = cs.params.pi().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
