use std::time::Instant;

use rand::Rng;

use super::kernels::*;
use super::state::ChainState;
use super::{ChainOptions, InitMode, SamplerKind, Step};
use crate::error::{NsbmError, Result};
use crate::metrics::{mean_xi_nmi, nmi};
use crate::model::{collapsed_log_joint, log_joint, Draw, Hyper, ModelState, NetworkCollection, PosteriorSamples, TraceRow};
use crate::netcore::{Adjacency, LabelVector, SymMatrix};
use crate::numerics::{stream_rng, ChainRng};

/// Collapsed sweeps used by the per-network warm start.
pub const DPSBM_ITERATIONS: usize = 100;

// Streams 1.. of the chain seed feed the per-network warm starts.
const INIT_STREAM_BASE: u64 = 1;

fn random_labels<R: Rng + ?Sized>(n: usize, communities: usize, rng: &mut R) -> LabelVector {
    let span = communities.min(10);
    let labels = (0..n).map(|_| rng.random_range(0..span)).collect();
    LabelVector::new(labels, communities).expect("labels drawn below the bound")
}

fn placeholder_state(z: Vec<usize>, xi: Vec<LabelVector>, h: &Hyper) -> Result<ModelState> {
    ModelState::new(
        z,
        xi,
        vec![SymMatrix::filled(h.communities, 0.5); h.classes],
        vec![vec![0.5; h.communities]; h.classes],
        vec![0.5; h.classes],
    )
}

/// Relabels communities `0, 1, ...` by decreasing size, ties by first
/// appearance. The stick-breaking prior favors this ordering, and it lines up
/// the label sets of independently fitted networks.
pub fn size_ordered(labels: &LabelVector) -> LabelVector {
    let bound = labels.bound();
    let mut count = vec![0usize; bound];
    let mut first = vec![usize::MAX; bound];
    for (s, &x) in labels.as_slice().iter().enumerate() {
        count[x] += 1;
        first[x] = first[x].min(s);
    }
    let mut order: Vec<usize> = (0..bound).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(count[x]), first[x], x));
    let mut rank = vec![0; bound];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }
    let relabeled = labels.as_slice().iter().map(|&x| rank[x]).collect();
    LabelVector::new(relabeled, bound).expect("ranks lie below the bound")
}

/// Fits a single-class collapsed sampler (a DP-SBM) to one network and
/// returns its final community labels in size order.
///
/// Two chains run back to back, one from a single community and one from
/// labels scattered over the first ten. The first resolves small graphs
/// cleanly but splits large weak blocks slowly; the second leaves stray
/// fragments on small graphs. The final state with the higher collapsed log
/// density is returned.
pub fn dpsbm_init<R: Rng + ?Sized>(adj: &Adjacency, hyper: &Hyper, rng: &mut R) -> Result<LabelVector> {
    dpsbm_init_with(adj, hyper, DPSBM_ITERATIONS, rng)
}

pub fn dpsbm_init_with<R: Rng + ?Sized>(
    adj: &Adjacency,
    hyper: &Hyper,
    iterations: usize,
    rng: &mut R,
) -> Result<LabelVector> {
    let single = Hyper { classes: 1, ..*hyper };
    let data = NetworkCollection::from_adjacencies(vec![adj.clone()]);
    let mut best: Option<(f64, LabelVector)> = None;
    let starts = [
        LabelVector::constant(adj.n(), single.communities),
        random_labels(adj.n(), single.communities, rng),
    ];
    for xi in starts {
        let params = placeholder_state(vec![0], vec![xi], &single)?;
        let mut cs = ChainState::new(&data, single, params)?;
        update_u(&mut cs, rng)?;
        for _ in 0..iterations {
            update_xi_collapsed(&mut cs, rng)?;
            update_u(&mut cs, rng)?;
        }
        let params = cs.into_params();
        let score = collapsed_log_joint(&params, &data, &single)?;
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, params.xi.into_iter().next().expect("one network")));
        }
    }
    Ok(size_ordered(&best.expect("two starts").1))
}

/// Initial labels per `opts.init`; continuous parameters are placeholders
/// that the chain redraws from their conditionals before the first iteration.
pub fn initial_state<R: Rng + ?Sized>(
    data: &NetworkCollection,
    hyper: &Hyper,
    opts: &ChainOptions,
    rng: &mut R,
) -> Result<ModelState> {
    let (z, xi) = match opts.init {
        InitMode::Warm => {
            let xi = data
                .networks()
                .iter()
                .enumerate()
                .map(|(j, net)| {
                    let mut net_rng = stream_rng(opts.seed, INIT_STREAM_BASE + j as u64);
                    dpsbm_init_with(&net.adj, hyper, opts.init_iterations, &mut net_rng)
                })
                .collect::<Result<Vec<_>>>()?;
            let z = (0..data.len()).map(|j| j % hyper.classes).collect();
            (z, xi)
        }
        InitMode::Random => {
            let xi = data
                .networks()
                .iter()
                .map(|net| random_labels(net.n(), hyper.communities, rng))
                .collect();
            let z = (0..data.len()).map(|_| rng.random_range(0..hyper.classes)).collect();
            (z, xi)
        }
    };
    placeholder_state(z, xi, hyper)
}

pub(crate) fn apply_step<R: Rng + ?Sized>(step: Step, cs: &mut ChainState, rng: &mut R) -> Result<()> {
    match step {
        Step::Eta => update_eta(cs, rng),
        Step::XiGibbs => update_xi_gibbs(cs, rng),
        Step::ZGibbs => update_z_gibbs(cs, rng),
        Step::XiCollapsed => update_xi_collapsed(cs, rng),
        Step::ZCollapsed => update_z_collapsed(cs, rng),
        Step::XiMarginal => update_xi_marginal_z(cs, rng),
        Step::U => update_u(cs, rng),
        Step::V => update_v(cs, rng),
    }
}

fn snapshot(cs: &ChainState, iter: usize) -> Draw {
    Draw {
        iter,
        z: cs.params.z.clone(),
        xi: cs.params.xi.iter().map(|x| x.as_slice().to_vec()).collect(),
    }
}

struct Truth {
    z: Option<Vec<usize>>,
    xi: Option<Vec<Vec<usize>>>,
}

fn trace_row(
    kind: SamplerKind,
    cs: &ChainState,
    iter: usize,
    truth: &Truth,
    elapsed_ms: Option<f64>,
) -> Result<TraceRow> {
    let log_density = if kind.is_collapsed() {
        collapsed_log_joint(&cs.params, cs.data(), &cs.hyper)?
    } else {
        log_joint(&cs.params, cs.data(), &cs.hyper)?
    };
    let mut used = vec![false; cs.hyper.classes];
    for &k in &cs.params.z {
        used[k] = true;
    }
    let occupied_classes = used.iter().filter(|&&u| u).count();
    let mean_occupied_communities = (0..cs.num_networks())
        .map(|j| cs.label_counts(j).iter().filter(|&&c| c > 0).count() as f64)
        .sum::<f64>()
        / cs.num_networks() as f64;
    let z_nmi = truth.z.as_ref().map(|t| nmi(&cs.params.z, t)).transpose()?;
    let xi_nmi = match &truth.xi {
        Some(t) if t.iter().all(|x| !x.is_empty()) => {
            let est: Vec<Vec<usize>> = cs.params.xi.iter().map(|x| x.as_slice().to_vec()).collect();
            Some(mean_xi_nmi(&est, t)?)
        }
        _ => None,
    };
    Ok(TraceRow {
        iter,
        log_density,
        occupied_classes,
        mean_occupied_communities,
        z_nmi,
        xi_nmi,
        elapsed_ms,
    })
}

/// Runs one chain seeded from `opts.seed`.
pub fn run_chain(
    kind: SamplerKind,
    data: &NetworkCollection,
    hyper: &Hyper,
    opts: &ChainOptions,
) -> Result<PosteriorSamples> {
    let mut rng = stream_rng(opts.seed, 0);
    run_chain_with_rng(kind, data, hyper, opts, &mut rng)
}

/// Runs one chain. Iteration 0 is the initialization; draws are kept for
/// iterations past the burn-in at the thinning interval, and a chain of zero
/// iterations returns the initialization as its only draw.
pub fn run_chain_with_rng(
    kind: SamplerKind,
    data: &NetworkCollection,
    hyper: &Hyper,
    opts: &ChainOptions,
    rng: &mut ChainRng,
) -> Result<PosteriorSamples> {
    opts.validate()?;
    hyper.validate()?;
    if data.is_empty() {
        return Err(NsbmError::Empty("network collection".into()));
    }
    let start = Instant::now();
    let elapsed = |on: bool| on.then(|| start.elapsed().as_secs_f64() * 1e3);

    let params = initial_state(data, hyper, opts, rng)?;
    let mut cs = ChainState::new(data, *hyper, params)?;
    update_u(&mut cs, rng)?;
    update_v(&mut cs, rng)?;
    if !kind.is_collapsed() {
        update_eta(&mut cs, rng)?;
    }

    let truth = Truth {
        z: data.z_truth(),
        xi: data.xi_truth(),
    };
    let mut samples = PosteriorSamples::default();
    samples
        .trace
        .push(trace_row(kind, &cs, 0, &truth, elapsed(opts.record_timing))?);
    if opts.iterations == 0 {
        samples.draws.push(snapshot(&cs, 0));
    }
    for it in 1..=opts.iterations {
        for &step in kind.schedule() {
            apply_step(step, &mut cs, rng)?;
        }
        samples
            .trace
            .push(trace_row(kind, &cs, it, &truth, elapsed(opts.record_timing))?);
        if opts.keeps(it) {
            samples.draws.push(snapshot(&cs, it));
        }
    }
    Ok(samples)
}
