use crate::error::{NsbmError, Result};
use crate::model::{class_block_stats, network_block_stats, EtaLogs, Hyper, ModelState, NetworkCollection};
use crate::netcore::{label_counts, neighbor_counts_from, BlockStats, DeltaStats, NeighborCounts};

/// A chain's parameters together with the sufficient statistics the kernels
/// read: per-network block sums, per-class aggregates, per-network label
/// counts and the log transforms of the edge probabilities.
///
/// Label and class moves go through [`ChainState::move_node`] and
/// [`ChainState::move_network`], which update the statistics incrementally.
#[derive(Debug, Clone)]
pub struct ChainState<'a> {
    data: &'a NetworkCollection,
    pub hyper: Hyper,
    pub params: ModelState,
    pub eta_logs: EtaLogs,
    net_stats: Vec<BlockStats>,
    class_stats: Vec<BlockStats>,
    label_counts: Vec<Vec<usize>>,
}

impl<'a> ChainState<'a> {
    pub fn new(data: &'a NetworkCollection, hyper: Hyper, params: ModelState) -> Result<Self> {
        hyper.validate()?;
        if params.classes() != hyper.classes || params.communities() != hyper.communities {
            return Err(NsbmError::DimensionMismatch(format!(
                "state truncation ({}, {}) differs from hyperparameters ({}, {})",
                params.classes(),
                params.communities(),
                hyper.classes,
                hyper.communities
            )));
        }
        let net_stats = network_block_stats(&params.xi, data)?;
        let class_stats = class_block_stats(&params.z, &net_stats, hyper.classes, hyper.communities);
        let label_counts = params
            .xi
            .iter()
            .map(|xi| label_counts(xi, hyper.communities).map(|c| c.0))
            .collect::<Result<_>>()?;
        let eta_logs = EtaLogs::from_eta(&params.eta);
        Ok(ChainState {
            data,
            hyper,
            params,
            eta_logs,
            net_stats,
            class_stats,
            label_counts,
        })
    }

    pub fn data(&self) -> &'a NetworkCollection {
        self.data
    }

    pub fn num_networks(&self) -> usize {
        self.params.z.len()
    }

    pub fn net_stats(&self, j: usize) -> &BlockStats {
        &self.net_stats[j]
    }

    pub fn class_stats(&self, k: usize) -> &BlockStats {
        &self.class_stats[k]
    }

    pub fn label_counts(&self, j: usize) -> &[usize] {
        &self.label_counts[j]
    }

    pub fn neighbor_counts(&self, j: usize, s: usize) -> NeighborCounts {
        neighbor_counts_from(
            self.data.adj(j),
            self.params.xi[j].as_slice(),
            s,
            &self.label_counts[j],
        )
    }

    pub fn refresh_eta_logs(&mut self) {
        self.eta_logs = EtaLogs::from_eta(&self.params.eta);
    }

    /// Relabels node `s` of network `j` from `delta.from` to `delta.to`.
    pub fn move_node(&mut self, j: usize, s: usize, delta: &DeltaStats) -> Result<()> {
        debug_assert_eq!(self.params.xi[j].get(s), delta.from);
        if delta.from == delta.to {
            return Ok(());
        }
        self.params.xi[j].set(s, delta.to)?;
        self.net_stats[j].apply(delta);
        self.class_stats[self.params.z[j]].apply(delta);
        self.label_counts[j][delta.from] -= 1;
        self.label_counts[j][delta.to] += 1;
        Ok(())
    }

    /// Moves network `j` to class `r`, shifting its block sums between aggregates.
    pub fn move_network(&mut self, j: usize, r: usize) {
        let r0 = self.params.z[j];
        if r == r0 {
            return;
        }
        self.class_stats[r0].sub_assign(&self.net_stats[j]);
        self.class_stats[r].add_assign(&self.net_stats[j]);
        self.params.z[j] = r;
    }

    /// Replaces all class labels and rebuilds the aggregates.
    pub fn set_classes(&mut self, z: Vec<usize>) {
        self.params.z = z;
        self.class_stats = class_block_stats(
            &self.params.z,
            &self.net_stats,
            self.hyper.classes,
            self.hyper.communities,
        );
    }

    /// Whether the incrementally maintained statistics equal a fresh recomputation.
    pub fn stats_coherent(&self) -> Result<bool> {
        let fresh = ChainState::new(self.data, self.hyper, self.params.clone())?;
        Ok(fresh.net_stats == self.net_stats
            && fresh.class_stats == self.class_stats
            && fresh.label_counts == self.label_counts)
    }

    pub fn into_params(self) -> ModelState {
        self.params
    }
}
