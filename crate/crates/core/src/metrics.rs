//! Partition comparison (NMI, variation of information) and medoid
//! posterior summaries.

use std::collections::HashMap;

use crate::error::{NsbmError, Result};
use crate::model::PosteriorSamples;

/// Denominator used to normalize mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NmiNormalization {
    /// `2I / (H(a) + H(b))`
    #[default]
    Arithmetic,
    /// `I / sqrt(H(a) H(b))`
    Geometric,
    /// `I / max(H(a), H(b))`
    Max,
}

struct Contingency {
    total: f64,
    rows: Vec<f64>,
    cols: Vec<f64>,
    // Row-major `rows.len() × cols.len()` counts; dense so sums run in a fixed order.
    cells: Vec<f64>,
}

fn dense_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut index = HashMap::new();
    let dense = labels
        .iter()
        .map(|l| {
            let next = index.len();
            *index.entry(*l).or_insert(next)
        })
        .collect();
    (dense, index.len())
}

fn contingency(a: &[usize], b: &[usize]) -> Result<Contingency> {
    if a.len() != b.len() {
        return Err(NsbmError::DimensionMismatch(format!(
            "partitions of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(NsbmError::Empty("partition".into()));
    }
    let (da, ka) = dense_labels(a);
    let (db, kb) = dense_labels(b);
    let mut rows = vec![0.0; ka];
    let mut cols = vec![0.0; kb];
    let mut cells = vec![0.0; ka * kb];
    for (&x, &y) in da.iter().zip(&db) {
        rows[x] += 1.0;
        cols[y] += 1.0;
        cells[x * kb + y] += 1.0;
    }
    Ok(Contingency {
        total: a.len() as f64,
        rows,
        cols,
        cells,
    })
}

fn entropy(counts: &[f64], total: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.ln()
        })
        .sum()
}

impl Contingency {
    fn entropies(&self) -> (f64, f64) {
        (entropy(&self.rows, self.total), entropy(&self.cols, self.total))
    }

    fn occupied(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let kb = self.cols.len();
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(move |(i, &c)| (i / kb, i % kb, c))
    }

    fn mutual_information(&self) -> f64 {
        let n = self.total;
        self.occupied()
            .map(|(x, y, c)| c / n * (c * n / (self.rows[x] * self.cols[y])).ln())
            .sum::<f64>()
            .max(0.0)
    }

    // H(a | b) + H(b | a); exactly zero when the partitions agree.
    fn conditional_entropies(&self) -> f64 {
        let n = self.total;
        self.occupied()
            .map(|(x, y, c)| -c / n * ((c / self.rows[x]).ln() + (c / self.cols[y]).ln()))
            .sum::<f64>()
            .max(0.0)
    }
}

/// Normalized mutual information with the arithmetic-mean denominator.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    nmi_with(a, b, NmiNormalization::Arithmetic)
}

/// NMI in `[0, 1]`. Two constant partitions score 1; exactly one constant
/// partition scores 0.
pub fn nmi_with(a: &[usize], b: &[usize], norm: NmiNormalization) -> Result<f64> {
    let table = contingency(a, b)?;
    let (ha, hb) = table.entropies();
    match (ha == 0.0, hb == 0.0) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let mi = table.mutual_information();
    let denom = match norm {
        NmiNormalization::Arithmetic => 0.5 * (ha + hb),
        NmiNormalization::Geometric => (ha * hb).sqrt(),
        NmiNormalization::Max => ha.max(hb),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Variation of information `H(a) + H(b) − 2 I(a, b)`.
pub fn vi(a: &[usize], b: &[usize]) -> Result<f64> {
    Ok(contingency(a, b)?.conditional_entropies())
}

/// Mean NMI over networks.
pub fn mean_xi_nmi(est: &[Vec<usize>], truth: &[Vec<usize>]) -> Result<f64> {
    if est.len() != truth.len() {
        return Err(NsbmError::DimensionMismatch(format!(
            "{} estimated networks vs {} truth networks",
            est.len(),
            truth.len()
        )));
    }
    if est.is_empty() {
        return Err(NsbmError::Empty("network list".into()));
    }
    let mut total = 0.0;
    for (e, t) in est.iter().zip(truth) {
        total += nmi(e, t)?;
    }
    Ok(total / est.len() as f64)
}

/// Relabels clusters in order of first appearance.
pub fn canonical(labels: &[usize]) -> Vec<usize> {
    dense_labels(labels).0
}

/// Index of the draw whose mean VI to all draws is smallest; ties go to the
/// earliest draw.
pub fn medoid_index<P: AsRef<[usize]>>(draws: &[P]) -> Result<usize> {
    if draws.is_empty() {
        return Err(NsbmError::Empty("no draws to summarize".into()));
    }
    // Collapse draws that are equal up to relabeling; they share a score.
    let mut groups: Vec<(usize, usize)> = Vec::new(); // (first index, multiplicity)
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, d) in draws.iter().enumerate() {
        let key = canonical(d.as_ref());
        match seen.get(&key) {
            Some(&g) => groups[g].1 += 1,
            None => {
                seen.insert(key, groups.len());
                groups.push((i, 1));
            }
        }
    }
    let g = groups.len();
    let mut dist = vec![0.0; g * g];
    for a in 0..g {
        for b in a + 1..g {
            let d = vi(draws[groups[a].0].as_ref(), draws[groups[b].0].as_ref())?;
            dist[a * g + b] = d;
            dist[b * g + a] = d;
        }
    }
    let mut best = (f64::INFINITY, usize::MAX);
    for a in 0..g {
        let score: f64 = (0..g).map(|b| groups[b].1 as f64 * dist[a * g + b]).sum();
        let candidate = (score, groups[a].0);
        if candidate.0 < best.0 || (candidate.0 == best.0 && candidate.1 < best.1) {
            best = candidate;
        }
    }
    Ok(best.1)
}

/// The sampled partition minimizing the mean VI to all sampled partitions.
pub fn summarize_min_vi<P: AsRef<[usize]>>(draws: &[P]) -> Result<Vec<usize>> {
    Ok(draws[medoid_index(draws)?].as_ref().to_vec())
}

/// Which partition of a draw to summarize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Z,
    Xi(usize),
}

pub fn summarize_samples(samples: &PosteriorSamples, level: Level) -> Result<Vec<usize>> {
    let parts: Vec<&[usize]> = match level {
        Level::Z => samples.draws.iter().map(|d| d.z.as_slice()).collect(),
        Level::Xi(j) => samples
            .draws
            .iter()
            .map(|d| {
                d.xi.get(j).map(|x| x.as_slice()).ok_or_else(|| {
                    NsbmError::DimensionMismatch(format!("draw has no network {j}"))
                })
            })
            .collect::<Result<_>>()?,
    };
    summarize_min_vi(&parts)
}
