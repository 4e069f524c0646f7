//! History dependence of sequential measurement statistics.

use crate::config::TOL;
use crate::temporal::TemporalChain;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct DecorrelationReport {
    /// `stage_gaps[k − 1]` is the gap after stage `k` (0-based, `1 ≤ k ≤ N − 2`).
    pub stage_gaps: Vec<f64>,
    pub max_gap: f64,
}

impl DecorrelationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_gap <= tol
    }
}

/// For every stage `k` with both a past and a future, compares the
/// conditional distribution of outcomes after `k` across all histories that
/// agree on outcome `k`. Histories with probability below the branch floor
/// are skipped.
pub fn projective_only_decorrelation_check(chain: &TemporalChain) -> Result<DecorrelationReport> {
    let table = chain.run()?;
    let (d, n) = (table.site_dim(), table.n_sites());
    let probs = table.probs();
    let mut stage_gaps = Vec::new();
    for k in 1..n.saturating_sub(1) {
        let future = d.pow((n - k - 1) as u32);
        let mut gap: f64 = 0.0;
        for last in 0..d {
            let mut reference: Option<Vec<f64>> = None;
            for earlier in 0..d.pow(k as u32) {
                let prefix = earlier * d + last;
                let block = &probs[prefix * future..(prefix + 1) * future];
                let p: f64 = block.iter().sum();
                if p < TOL.branch_floor {
                    continue;
                }
                let cond: Vec<f64> = block.iter().map(|q| q / p).collect();
                match &reference {
                    None => reference = Some(cond),
                    Some(r) => {
                        for (a, b) in r.iter().zip(&cond) {
                            gap = gap.max((a - b).abs());
                        }
                    }
                }
            }
        }
        stage_gaps.push(gap);
    }
    let max_gap = stage_gaps.iter().copied().fold(0.0, f64::max);
    Ok(DecorrelationReport { stage_gaps, max_gap })
}
