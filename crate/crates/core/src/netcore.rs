//! Graph storage, label vectors and block-sum sufficient statistics.
//!
//! Block sums follow the pair-indexing convention of the SBM likelihood: a
//! within-block entry `(x, x)` counts unordered pairs once, a cross-block
//! entry `(x, y)` counts every pair with one endpoint in `x` and the other in
//! `y` once. Matrices are stored fully (both triangles) and kept symmetric.

use crate::error::{NsbmError, Result};

/// Undirected simple graph stored as sorted neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    neighbors: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Adjacency {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Adjacency {
            n,
            neighbors: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) are merged; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut neighbors = vec![Vec::new(); n];
        for (s, t) in edges {
            if s >= n {
                return Err(NsbmError::NodeOutOfRange { node: s, n });
            }
            if t >= n {
                return Err(NsbmError::NodeOutOfRange { node: t, n });
            }
            if s == t {
                return Err(NsbmError::Domain(format!("self-loop at node {s}")));
            }
            neighbors[s].push(t as u32);
            neighbors[t].push(s as u32);
        }
        let mut degree_sum = 0;
        for list in neighbors.iter_mut() {
            list.sort_unstable();
            list.dedup();
            degree_sum += list.len();
        }
        Ok(Adjacency {
            n,
            neighbors,
            edge_count: degree_sum / 2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, s: usize) -> &[u32] {
        &self.neighbors[s]
    }

    pub fn degree(&self, s: usize) -> usize {
        self.neighbors[s].len()
    }

    /// Edge lookup by binary search in the sorted neighbour list of `s`.
    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        s != t
            && s < self.n
            && t < self.n
            && self.neighbors[s].binary_search(&(t as u32)).is_ok()
    }

    /// Edges as `(s, t)` with `s < t`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(s, list)| {
            list.iter()
                .map(|&t| t as usize)
                .filter(move |&t| t > s)
                .map(move |t| (s, t))
        })
    }
}

/// Community labels of one network, bounded by the truncation level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    bound: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, bound: usize) -> Result<Self> {
        if let Some(&label) = labels.iter().find(|&&l| l >= bound) {
            return Err(NsbmError::LabelOutOfRange { label, bound });
        }
        Ok(LabelVector { labels, bound })
    }

    /// All nodes in community 0.
    pub fn constant(n: usize, bound: usize) -> Self {
        LabelVector {
            labels: vec![0; n],
            bound: bound.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn get(&self, s: usize) -> usize {
        self.labels[s]
    }

    pub fn set(&mut self, s: usize, label: usize) -> Result<()> {
        if label >= self.bound {
            return Err(NsbmError::LabelOutOfRange {
                label,
                bound: self.bound,
            });
        }
        if s >= self.labels.len() {
            return Err(NsbmError::NodeOutOfRange {
                node: s,
                n: self.labels.len(),
            });
        }
        self.labels[s] = label;
        Ok(())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.labels
    }
}

/// Dense square matrix whose setters keep `(x, y)` and `(y, x)` equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> SymMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![T::default(); dim * dim],
        }
    }
}

impl<T: Copy> SymMatrix<T> {
    pub fn filled(dim: usize, value: T) -> Self {
        SymMatrix {
            dim,
            data: vec![value; dim * dim],
        }
    }

    /// Builds from a row-major `dim × dim` table; only `x ≤ y` entries are read.
    pub fn from_upper(rows: &[Vec<T>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for x in 0..dim {
            for y in 0..dim {
                data.push(if x <= y { rows[x][y] } else { rows[y][x] });
            }
        }
        SymMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[x * self.dim + y]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.data[x * self.dim + y] = value;
        self.data[y * self.dim + x] = value;
    }

    pub fn row(&self, x: usize) -> &[T] {
        &self.data[x * self.dim..(x + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.dim).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool
    where
        T: PartialEq,
    {
        (0..self.dim).all(|x| (0..x).all(|y| self.get(x, y) == self.get(y, x)))
    }

    /// Permutes row and column indices: entry `(x, y)` moves to `(perm[x], perm[y])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for x in 0..self.dim {
            for y in 0..self.dim {
                out.data[perm[x] * self.dim + perm[y]] = self.get(x, y);
            }
        }
        out
    }
}

impl SymMatrix<i64> {
    #[inline]
    pub fn add(&mut self, x: usize, y: usize, delta: i64) {
        self.data[x * self.dim + y] += delta;
        if x != y {
            self.data[y * self.dim + x] += delta;
        }
    }

    /// Sum over the upper triangle including the diagonal.
    pub fn upper_sum(&self) -> i64 {
        (0..self.dim)
            .map(|x| (x..self.dim).map(|y| self.get(x, y)).sum::<i64>())
            .sum()
    }
}

/// Edge block sums `m` and pair counts `N` of one network or of a class aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStats {
    pub edges: SymMatrix<i64>,
    pub pairs: SymMatrix<i64>,
}

impl BlockStats {
    pub fn zeros(dim: usize) -> Self {
        BlockStats {
            edges: SymMatrix::zeros(dim),
            pairs: SymMatrix::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.edges.dim()
    }

    #[inline]
    pub fn m(&self, x: usize, y: usize) -> i64 {
        self.edges.get(x, y)
    }

    #[inline]
    pub fn n(&self, x: usize, y: usize) -> i64 {
        self.pairs.get(x, y)
    }

    /// Non-edge count `N − m` of a block.
    #[inline]
    pub fn m_bar(&self, x: usize, y: usize) -> i64 {
        self.pairs.get(x, y) - self.edges.get(x, y)
    }

    pub fn add_assign(&mut self, other: &BlockStats) {
        for (a, b) in self.edges.data.iter_mut().zip(&other.edges.data) {
            *a += *b;
        }
        for (a, b) in self.pairs.data.iter_mut().zip(&other.pairs.data) {
            *a += *b;
        }
    }

    pub fn sub_assign(&mut self, other: &BlockStats) {
        for (a, b) in self.edges.data.iter_mut().zip(&other.edges.data) {
            *a -= *b;
        }
        for (a, b) in self.pairs.data.iter_mut().zip(&other.pairs.data) {
            *a -= *b;
        }
    }

    /// Applies a single-node relabeling delta. Touches only the rows of the
    /// old and new labels.
    pub fn apply(&mut self, delta: &DeltaStats) {
        let (a, b) = (delta.from, delta.to);
        if a == b {
            return;
        }
        for y in 0..self.dim() {
            self.edges.add(a, y, delta.edge_delta(a, y));
            self.pairs.add(a, y, delta.pair_delta(a, y));
        }
        for y in (0..self.dim()).filter(|&y| y != a) {
            self.edges.add(b, y, delta.edge_delta(b, y));
            self.pairs.add(b, y, delta.pair_delta(b, y));
        }
    }
}

/// Edge and pair counts from one node into every community, excluding itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborCounts {
    pub tau: Vec<i64>,
    pub nu: Vec<i64>,
}

/// Change in block sums caused by moving one node from `from` to `to`.
///
/// With `δ = e_to − e_from`, `U = tau` and `V = nu` of the moved node:
/// `D = δUᵀ + Uδᵀ` with the diagonal halved, and `Δ` likewise from `V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaStats {
    pub from: usize,
    pub to: usize,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

impl DeltaStats {
    pub fn new(from: usize, to: usize, counts: NeighborCounts) -> Self {
        DeltaStats {
            from,
            to,
            u: counts.tau,
            v: counts.nu,
        }
    }

    #[inline]
    pub fn indicator_diff(&self, x: usize) -> i64 {
        if self.from == self.to {
            0
        } else if x == self.to {
            1
        } else if x == self.from {
            -1
        } else {
            0
        }
    }

    #[inline]
    fn entry(&self, counts: &[i64], x: usize, y: usize) -> i64 {
        if x == y {
            self.indicator_diff(x) * counts[x]
        } else {
            self.indicator_diff(x) * counts[y] + self.indicator_diff(y) * counts[x]
        }
    }

    /// `D[x][y]`, the change in edge block sums.
    #[inline]
    pub fn edge_delta(&self, x: usize, y: usize) -> i64 {
        self.entry(&self.u, x, y)
    }

    /// `Δ[x][y]`, the change in pair counts.
    #[inline]
    pub fn pair_delta(&self, x: usize, y: usize) -> i64 {
        self.entry(&self.v, x, y)
    }

    pub fn edge_delta_matrix(&self) -> SymMatrix<i64> {
        self.dense(|x, y| self.edge_delta(x, y))
    }

    pub fn pair_delta_matrix(&self) -> SymMatrix<i64> {
        self.dense(|x, y| self.pair_delta(x, y))
    }

    fn dense(&self, f: impl Fn(usize, usize) -> i64) -> SymMatrix<i64> {
        let dim = self.u.len();
        let mut out = SymMatrix::zeros(dim);
        for x in 0..dim {
            for y in x..dim {
                out.set(x, y, f(x, y));
            }
        }
        out
    }
}

fn check_labels(adj: &Adjacency, xi: &LabelVector, bound: usize) -> Result<()> {
    if xi.len() != adj.n() {
        return Err(NsbmError::DimensionMismatch(format!(
            "{} labels for {} nodes",
            xi.len(),
            adj.n()
        )));
    }
    if let Some(&label) = xi.as_slice().iter().find(|&&l| l >= bound) {
        return Err(NsbmError::LabelOutOfRange { label, bound });
    }
    Ok(())
}

/// Block sums of one network under labels `xi` with truncation `bound`.
pub fn compute_block_sums(adj: &Adjacency, xi: &LabelVector, bound: usize) -> Result<BlockStats> {
    check_labels(adj, xi, bound)?;
    let labels = xi.as_slice();
    let mut stats = BlockStats::zeros(bound);
    for (s, t) in adj.edges() {
        stats.edges.add(labels[s], labels[t], 1);
    }
    let (counts, _) = label_counts(xi, bound)?;
    for x in 0..bound {
        let cx = counts[x] as i64;
        stats.pairs.set(x, x, cx * (cx - 1) / 2);
        for y in x + 1..bound {
            stats.pairs.set(x, y, cx * counts[y] as i64);
        }
    }
    Ok(stats)
}

/// Edge counts `tau` and node counts `nu` from node `s` into each community.
pub fn neighbor_counts(
    adj: &Adjacency,
    xi: &LabelVector,
    s: usize,
    bound: usize,
) -> Result<NeighborCounts> {
    check_labels(adj, xi, bound)?;
    if s >= adj.n() {
        return Err(NsbmError::NodeOutOfRange { node: s, n: adj.n() });
    }
    let (counts, _) = label_counts(xi, bound)?;
    Ok(neighbor_counts_from(adj, xi.as_slice(), s, &counts))
}

/// Like [`neighbor_counts`] but reuses the network's label counts, costing
/// `O(degree + L)`.
pub fn neighbor_counts_from(
    adj: &Adjacency,
    labels: &[usize],
    s: usize,
    counts: &[usize],
) -> NeighborCounts {
    let mut tau = vec![0i64; counts.len()];
    for &t in adj.neighbors(s) {
        tau[labels[t as usize]] += 1;
    }
    let mut nu: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
    nu[labels[s]] -= 1;
    NeighborCounts { tau, nu }
}

/// Block-sum change for relabeling node `node` to `to`.
pub fn delta_block_sums(
    adj: &Adjacency,
    xi: &LabelVector,
    node: usize,
    to: usize,
) -> Result<DeltaStats> {
    let bound = xi.bound();
    if to >= bound {
        return Err(NsbmError::LabelOutOfRange { label: to, bound });
    }
    let counts = neighbor_counts(adj, xi, node, bound)?;
    Ok(DeltaStats::new(xi.get(node), to, counts))
}

/// Per-label counts `n_x` and counts of strictly larger labels `n_{>x}`.
pub fn label_counts(xi: &LabelVector, bound: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut counts = vec![0usize; bound];
    for &label in xi.as_slice() {
        if label >= bound {
            return Err(NsbmError::LabelOutOfRange { label, bound });
        }
        counts[label] += 1;
    }
    Ok((counts.clone(), greater_counts(&counts)))
}

/// Suffix sums excluding the current index: `out[x] = Σ_{y > x} counts[y]`.
pub fn greater_counts(counts: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; counts.len()];
    let mut acc = 0;
    for x in (0..counts.len()).rev() {
        out[x] = acc;
        acc += counts[x];
    }
    out
}

/// Per-network block edge sums `D` and non-edge sums `D̄ = N − D`: the amounts
/// moved between class aggregates when the network changes class.
pub fn network_move_deltas(
    adj: &Adjacency,
    xi: &LabelVector,
    bound: usize,
) -> Result<(SymMatrix<i64>, SymMatrix<i64>)> {
    let stats = compute_block_sums(adj, xi, bound)?;
    let mut non_edges = stats.pairs.clone();
    for (ne, e) in non_edges.data.iter_mut().zip(&stats.edges.data) {
        *ne -= *e;
    }
    Ok((stats.edges, non_edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> Adjacency {
        Adjacency::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    // Direct summation over the pair index sets: s < t within a block,
    // ordered s ≠ t across blocks.
    fn brute_block_sums(adj: &Adjacency, labels: &[usize], bound: usize) -> BlockStats {
        let mut stats = BlockStats::zeros(bound);
        let n = adj.n();
        for x in 0..bound {
            for y in x..bound {
                let (mut m, mut pairs) = (0, 0);
                for s in 0..n {
                    for t in 0..n {
                        let in_set = if x == y { s < t } else { s != t };
                        if in_set && labels[s] == x && labels[t] == y {
                            pairs += 1;
                            if adj.has_edge(s, t) {
                                m += 1;
                            }
                        }
                    }
                }
                stats.edges.set(x, y, m);
                stats.pairs.set(x, y, pairs);
            }
        }
        stats
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Adjacency {
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

    #[test]
    fn adjacency_rejects_self_loops_and_merges_duplicates() {
        assert!(Adjacency::from_edges(3, [(1, 1)]).is_err());
        assert!(Adjacency::from_edges(3, [(0, 3)]).is_err());
        let adj = Adjacency::from_edges(3, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(adj.edge_count(), 1);
        assert!(adj.has_edge(1, 0));
        assert!(!adj.has_edge(0, 0));
        assert_eq!(adj.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn block_sums_empty_graph() {
        let adj = Adjacency::empty(5);
        let xi = LabelVector::new(vec![0, 0, 1, 1, 1], 2).unwrap();
        let stats = compute_block_sums(&adj, &xi, 2).unwrap();
        assert_eq!(stats.edges.upper_sum(), 0);
        assert_eq!(stats.n(0, 0), 1);
        assert_eq!(stats.n(1, 1), 3);
        assert_eq!(stats.n(0, 1), 6);
    }

    #[test]
    fn block_sums_triangle() {
        let adj = triangle();
        let xi = LabelVector::new(vec![0, 0, 1], 2).unwrap();
        let stats = compute_block_sums(&adj, &xi, 2).unwrap();
        assert_eq!(stats, brute_block_sums(&adj, xi.as_slice(), 2));
        assert_eq!((stats.m(0, 0), stats.n(0, 0)), (1, 1));
        assert_eq!((stats.m(0, 1), stats.n(0, 1)), (2, 2));
        assert_eq!((stats.m(1, 1), stats.n(1, 1)), (0, 0));
        assert_eq!(stats.m(1, 0), 2);
    }

    #[test]
    fn block_sums_complete_graph() {
        let edges = (0..4).flat_map(|s| (s + 1..4).map(move |t| (s, t)));
        let adj = Adjacency::from_edges(4, edges).unwrap();
        let stats = compute_block_sums(&adj, &LabelVector::constant(4, 1), 1).unwrap();
        assert_eq!((stats.m(0, 0), stats.n(0, 0)), (6, 6));
    }

    #[test]
    fn block_sums_reject_bad_labels() {
        let adj = triangle();
        let xi = LabelVector::new(vec![0, 0, 2], 3).unwrap();
        assert!(matches!(
            compute_block_sums(&adj, &xi, 2),
            Err(NsbmError::LabelOutOfRange { label: 2, bound: 2 })
        ));
        assert!(LabelVector::new(vec![0, 5], 2).is_err());
    }

    #[test]
    fn delta_noop_move() {
        let adj = triangle();
        let xi = LabelVector::new(vec![0, 0, 1], 2).unwrap();
        let delta = delta_block_sums(&adj, &xi, 1, 0).unwrap();
        assert_eq!(delta.edge_delta_matrix(), SymMatrix::zeros(2));
        assert_eq!(delta.pair_delta_matrix(), SymMatrix::zeros(2));
    }

    #[test]
    fn delta_triangle_move_matches_recompute() {
        let adj = triangle();
        let xi = LabelVector::new(vec![0, 0, 1], 2).unwrap();
        let mut stats = compute_block_sums(&adj, &xi, 2).unwrap();
        let delta = delta_block_sums(&adj, &xi, 2, 0).unwrap();
        stats.apply(&delta);
        assert_eq!(stats.m(0, 0), 3);
        assert_eq!(stats.m(0, 1), 0);
        let moved = LabelVector::new(vec![0, 0, 0], 2).unwrap();
        assert_eq!(stats, compute_block_sums(&adj, &moved, 2).unwrap());
    }

    #[test]
    fn delta_star_center_matches_recompute() {
        let adj = Adjacency::from_edges(6, (1..6).map(|t| (0, t))).unwrap();
        let xi = LabelVector::new(vec![0, 1, 2, 1, 0, 2], 3).unwrap();
        for to in 0..3 {
            let mut stats = compute_block_sums(&adj, &xi, 3).unwrap();
            stats.apply(&delta_block_sums(&adj, &xi, 0, to).unwrap());
            let mut moved = xi.clone();
            moved.set(0, to).unwrap();
            assert_eq!(stats, compute_block_sums(&adj, &moved, 3).unwrap());
        }
    }

    #[test]
    fn delta_random_graphs_match_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.random_range(2..15);
            let bound = rng.random_range(1..5);
            let adj = random_graph(&mut rng, n, 0.4);
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..bound)).collect();
            let mut xi = LabelVector::new(labels, bound).unwrap();
            let mut stats = compute_block_sums(&adj, &xi, bound).unwrap();
            for _ in 0..50 {
                let node = rng.random_range(0..n);
                let to = rng.random_range(0..bound);
                stats.apply(&delta_block_sums(&adj, &xi, node, to).unwrap());
                xi.set(node, to).unwrap();
                assert_eq!(stats, brute_block_sums(&adj, xi.as_slice(), bound));
                assert!(stats.edges.is_symmetric() && stats.pairs.is_symmetric());
            }
        }
    }

    #[test]
    fn neighbor_counts_cases() {
        let adj = triangle();
        let xi = LabelVector::new(vec![0, 0, 1], 2).unwrap();
        let counts = neighbor_counts(&adj, &xi, 0, 2).unwrap();
        assert_eq!(counts.tau, vec![1, 1]);
        assert_eq!(counts.nu, vec![1, 1]);

        let isolated = Adjacency::from_edges(4, [(0, 1)]).unwrap();
        let xi = LabelVector::new(vec![0, 1, 1, 0], 2).unwrap();
        let counts = neighbor_counts(&isolated, &xi, 3, 2).unwrap();
        assert_eq!(counts.tau, vec![0, 0]);
        assert_eq!(counts.nu.iter().sum::<i64>(), 3);
        assert!(neighbor_counts(&isolated, &xi, 4, 2).is_err());
    }

    #[test]
    fn label_count_cases() {
        let xi = LabelVector::new(vec![0, 0, 1, 2], 3).unwrap();
        assert_eq!(label_counts(&xi, 3).unwrap(), (vec![2, 1, 1], vec![2, 1, 0]));
        let zeros = LabelVector::constant(5, 3);
        assert_eq!(label_counts(&zeros, 3).unwrap().1, vec![0, 0, 0]);
        let empty = LabelVector::new(vec![], 3).unwrap();
        assert_eq!(label_counts(&empty, 3).unwrap(), (vec![0; 3], vec![0; 3]));
    }

    #[test]
    fn network_move_deltas_cases() {
        let adj = Adjacency::empty(4);
        let xi = LabelVector::new(vec![0, 1, 1, 0], 2).unwrap();
        let (d, d_bar) = network_move_deltas(&adj, &xi, 2).unwrap();
        assert_eq!(d, SymMatrix::zeros(2));
        assert_eq!(d_bar, compute_block_sums(&adj, &xi, 2).unwrap().pairs);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let adj = random_graph(&mut rng, 12, 0.3);
        let labels: Vec<usize> = (0..12).map(|_| rng.random_range(0..3)).collect();
        let xi = LabelVector::new(labels, 3).unwrap();
        let (d, d_bar) = network_move_deltas(&adj, &xi, 3).unwrap();
        let brute = brute_block_sums(&adj, xi.as_slice(), 3);
        assert_eq!(d, brute.edges);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(d.get(x, y) + d_bar.get(x, y), brute.n(x, y));
            }
        }
    }

    #[test]
    fn single_network_totals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let adj = random_graph(&mut rng, 17, 0.25);
        let labels: Vec<usize> = (0..17).map(|_| rng.random_range(0..4)).collect();
        let xi = LabelVector::new(labels, 4).unwrap();
        let stats = compute_block_sums(&adj, &xi, 4).unwrap();
        assert_eq!(stats.edges.upper_sum(), adj.edge_count() as i64);
        assert_eq!(stats.pairs.upper_sum(), 17 * 16 / 2);
    }
}
