//! The Gibbs (G), collapsed Gibbs (CG), blocked Gibbs (BG) and incompatible
//! blocked Gibbs (IBG) samplers.

mod chain;
pub mod kernels;
mod state;
#[cfg(test)]
pub(crate) mod testutil;

use std::fmt;
use std::str::FromStr;

pub use chain::{
    dpsbm_init, dpsbm_init_with, initial_state, run_chain, run_chain_with_rng, size_ordered, DPSBM_ITERATIONS,
};
pub use kernels::*;
pub use state::ChainState;

use crate::error::{NsbmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    Gibbs,
    Collapsed,
    Blocked,
    IncompatibleBlocked,
}

/// One update within an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Eta,
    XiGibbs,
    ZGibbs,
    XiCollapsed,
    ZCollapsed,
    XiMarginal,
    U,
    V,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 4] = [
        SamplerKind::Gibbs,
        SamplerKind::Collapsed,
        SamplerKind::Blocked,
        SamplerKind::IncompatibleBlocked,
    ];

    /// Update order of one iteration.
    pub fn schedule(self) -> &'static [Step] {
        use Step::*;
        match self {
            SamplerKind::Gibbs => &[Eta, XiGibbs, ZGibbs, U, V],
            SamplerKind::Collapsed => &[XiCollapsed, ZCollapsed, U, V],
            SamplerKind::Blocked => &[Eta, XiMarginal, ZGibbs, U, V],
            SamplerKind::IncompatibleBlocked => &[Eta, ZGibbs, XiMarginal, U, V],
        }
    }

    pub fn is_collapsed(self) -> bool {
        self == SamplerKind::Collapsed
    }

    pub fn short_name(self) -> &'static str {
        match self {
            SamplerKind::Gibbs => "g",
            SamplerKind::Collapsed => "cg",
            SamplerKind::Blocked => "bg",
            SamplerKind::IncompatibleBlocked => "ibg",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for SamplerKind {
    type Err = NsbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g" | "gibbs" => Ok(SamplerKind::Gibbs),
            "cg" | "collapsed" => Ok(SamplerKind::Collapsed),
            "bg" | "blocked" => Ok(SamplerKind::Blocked),
            "ibg" | "incompatible" => Ok(SamplerKind::IncompatibleBlocked),
            other => Err(NsbmError::InvalidOptions(format!("unknown sampler '{other}'"))),
        }
    }
}

/// How labels are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Per-network DP-SBM fit for ξ, classes assigned cyclically.
    #[default]
    Warm,
    /// ξ uniform over the first `min(L, 10)` communities, z uniform over classes.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOptions {
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
    pub seed: u64,
    pub init: InitMode,
    /// Collapsed sweeps per network in the warm start.
    pub init_iterations: usize,
    /// Record wall-clock time in the trace.
    pub record_timing: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            iterations: 1000,
            burnin: 500,
            thin: 5,
            seed: 0,
            init: InitMode::Warm,
            init_iterations: DPSBM_ITERATIONS,
            record_timing: true,
        }
    }
}

impl ChainOptions {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(NsbmError::InvalidOptions("thinning must be at least 1".into()));
        }
        if self.iterations > 0 && self.burnin >= self.iterations {
            return Err(NsbmError::InvalidOptions(format!(
                "burn-in {} must be smaller than iterations {}",
                self.burnin, self.iterations
            )));
        }
        if self.iterations == 0 && self.burnin > 0 {
            return Err(NsbmError::InvalidOptions(
                "burn-in requires at least one iteration".into(),
            ));
        }
        Ok(())
    }

    /// Whether iteration `it` (1-based) is retained.
    pub fn keeps(&self, it: usize) -> bool {
        it > self.burnin && (it - self.burnin) % self.thin == 0
    }
}
