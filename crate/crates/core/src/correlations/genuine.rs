//! Genuine multipartite correlations: the weakest bipartite cut.

use super::{mutual_information, quantum_discord_with, Ansatz, Bipartition, MinimizerOptions};
use crate::qmat::DensityMatrix;
use crate::{Error, Result};

/// Mutual information differences below this are ties when choosing the cut.
pub const CUT_TIE_TOLERANCE: f64 = 1e-12;

/// Total, classical and quantum correlations across the weakest cut.
#[derive(Debug, Clone)]
pub struct GenuineCorrelations {
    pub total: f64,
    pub classical: f64,
    pub quantum: f64,
    /// Cut of least mutual information; its side A is the measured side.
    pub cut: Bipartition,
}

fn cuts(n: usize, symmetric: bool) -> Vec<Bipartition> {
    if symmetric {
        Bipartition::by_size(n)
    } else {
        Bipartition::all(n)
    }
}

/// Smallest mutual information over all bipartitions, and the earliest cut
/// reaching it. With `symmetric` only one cut per size is examined, which is
/// exact for permutation-symmetric states.
pub fn genuine_total(rho: &DensityMatrix, symmetric: bool) -> Result<(f64, Bipartition)> {
    let n = rho.n_sites();
    if n < 2 {
        return Err(Error::Shape("genuine correlations need at least two sites".into()));
    }
    let mut best: Option<(f64, Bipartition)> = None;
    for cut in cuts(n, symmetric) {
        let i = mutual_information(rho, &cut)?;
        match &best {
            Some((b, _)) if i >= b - CUT_TIE_TOLERANCE => {}
            _ => best = Some((i, cut)),
        }
    }
    Ok(best.expect("at least one cut"))
}

/// Genuine correlations with an independent basis per measured site over every cut.
pub fn genuine_correlations(rho: &DensityMatrix, opts: &MinimizerOptions) -> Result<GenuineCorrelations> {
    genuine_correlations_with(rho, false, opts)
}

/// Genuine correlations; `symmetric` restricts to one cut per size and a shared
/// basis on the measured side.
pub fn genuine_correlations_with(
    rho: &DensityMatrix,
    symmetric: bool,
    opts: &MinimizerOptions,
) -> Result<GenuineCorrelations> {
    let (total, cut) = genuine_total(rho, symmetric)?;
    let ansatz = if symmetric { Ansatz::Shared } else { Ansatz::PerSite };
    let d = quantum_discord_with(rho, &cut, cut.smaller_side(), ansatz, opts)?;
    Ok(GenuineCorrelations {
        total,
        classical: d.classical,
        quantum: d.discord,
        cut,
    })
}
