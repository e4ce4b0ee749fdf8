//! Bipartite mutual information, one-way classical correlations and discord.

use nalgebra::DMatrix;

use super::{clamp_bits, minimize, Ansatz, BasisFamily, Bipartition, MinimizerOptions, Side};
use crate::qmat::{entropy_of_matrix, partial_trace_sparse, von_neumann_entropy, DensityMatrix, MeasurementBasis, Split, C64};
use crate::{Error, Result};

/// Outcomes less likely than this contribute nothing to a conditional entropy.
pub const CONDITIONAL_PROBABILITY_FLOOR: f64 = 1e-14;

/// `I(a:b) = S(rho_a) + S(rho_b) - S(rho)`.
pub fn mutual_information(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    cut.check(rho.n_sites())?;
    let nz = rho.nonzeros();
    let sa = von_neumann_entropy(&partial_trace_sparse(&nz, rho.site_dims(), cut.side_a())?);
    let sb = von_neumann_entropy(&partial_trace_sparse(&nz, rho.site_dims(), cut.side_b())?);
    Ok(clamp_bits(sa + sb - von_neumann_entropy(rho)))
}

/// Post-measurement states of the unmeasured side for every outcome.
pub(crate) struct Conditioner {
    dim_kept: usize,
    dim_measured: usize,
    /// (kept row, measured row, kept column, measured column, value)
    entries: Vec<(usize, usize, usize, usize, C64)>,
}

impl Conditioner {
    pub fn new(rho: &DensityMatrix, kept: &[usize]) -> Result<Self> {
        let split = Split::new(rho.site_dims(), kept)?;
        let entries = rho
            .nonzeros()
            .into_iter()
            .map(|(i, j, z)| {
                let (a, b) = split.parts[i];
                let (a2, b2) = split.parts[j];
                (a, b, a2, b2, z)
            })
            .collect();
        Ok(Self {
            dim_kept: split.kept_dim,
            dim_measured: split.traced_dim,
            entries,
        })
    }

    /// `sum_k p_k S(rho_{kept|k})` for the outcomes `k` given by the columns of `v`.
    pub fn conditional_entropy(&self, v: &DMatrix<C64>) -> f64 {
        let (da, db) = (self.dim_kept, self.dim_measured);
        let mut sigma = vec![DMatrix::<C64>::zeros(da, da); db];
        for &(a, b, a2, b2, z) in &self.entries {
            for (k, s) in sigma.iter_mut().enumerate() {
                let w = v[(b, k)].conj() * v[(b2, k)];
                if w.re != 0.0 || w.im != 0.0 {
                    s[(a, a2)] += w * z;
                }
            }
        }
        let mut total = 0.0;
        for s in &sigma {
            let p: f64 = (0..da).map(|i| s[(i, i)].re).sum();
            if p < CONDITIONAL_PROBABILITY_FLOOR {
                continue;
            }
            total += entropy_of_matrix(s) + p * p.log2();
        }
        total
    }
}

/// `sum_j p_j S(rho_{other|j})` after measuring `measured` in `basis`.
pub fn measured_conditional_entropy(
    rho: &DensityMatrix,
    cut: &Bipartition,
    measured: Side,
    basis: &MeasurementBasis,
) -> Result<f64> {
    cut.check(rho.n_sites())?;
    let measured_sites = cut.side(measured);
    let dims: Vec<usize> = measured_sites.iter().map(|&s| rho.site_dims()[s]).collect();
    basis.check_fits(&dims)?;
    let cond = Conditioner::new(rho, cut.side(measured.other()))?;
    Ok(clamp_bits(cond.conditional_entropy(&basis.product_unitary())))
}

/// Outcome of a discord minimisation.
#[derive(Debug, Clone)]
pub struct DiscordResult {
    pub discord: f64,
    /// Classical correlations `J` at the optimal basis.
    pub classical: f64,
    pub mutual_info: f64,
    pub measured: Side,
    /// Optimal basis on the measured sites, in ascending site order.
    pub basis: MeasurementBasis,
}

/// `D = I - J` with measurements on `measured`, independent basis per site.
pub fn quantum_discord(
    rho: &DensityMatrix,
    cut: &Bipartition,
    measured: Side,
    opts: &MinimizerOptions,
) -> Result<DiscordResult> {
    quantum_discord_with(rho, cut, measured, Ansatz::PerSite, opts)
}

/// [`quantum_discord`] with a choice of basis ansatz on the measured side.
pub fn quantum_discord_with(
    rho: &DensityMatrix,
    cut: &Bipartition,
    measured: Side,
    ansatz: Ansatz,
    opts: &MinimizerOptions,
) -> Result<DiscordResult> {
    cut.check(rho.n_sites())?;
    let measured_sites = cut.side(measured);
    let kept_sites = cut.side(measured.other());
    let dims: Vec<usize> = measured_sites.iter().map(|&s| rho.site_dims()[s]).collect();
    let family = BasisFamily::new(&dims, ansatz).map_err(|e| match e {
        Error::Domain(m) => Error::Domain(format!("measured side: {m}")),
        other => other,
    })?;
    let nz = rho.nonzeros();
    let s_total = von_neumann_entropy(rho);
    let s_measured = von_neumann_entropy(&partial_trace_sparse(&nz, rho.site_dims(), measured_sites)?);
    let s_kept = von_neumann_entropy(&partial_trace_sparse(&nz, rho.site_dims(), kept_sites)?);
    let cond = Conditioner::new(rho, kept_sites)?;
    let best = minimize(
        |x| cond.conditional_entropy(&family.product_unitary(x)),
        &family.ranges(),
        opts,
    )?;
    let mutual_info = clamp_bits(s_kept + s_measured - s_total);
    Ok(DiscordResult {
        discord: clamp_bits(s_measured - s_total + best.value),
        classical: clamp_bits(s_kept - best.value),
        mutual_info,
        measured,
        basis: family.basis(&best.point),
    })
}

/// One-way classical correlations `J` with measurements on `measured`.
pub fn classical_correlations(
    rho: &DensityMatrix,
    cut: &Bipartition,
    measured: Side,
    opts: &MinimizerOptions,
) -> Result<f64> {
    Ok(quantum_discord(rho, cut, measured, opts)?.classical)
}

/// Larger of the two one-way discords across `cut`.
pub fn two_way_discord(rho: &DensityMatrix, cut: &Bipartition, opts: &MinimizerOptions) -> Result<f64> {
    let a = quantum_discord(rho, cut, Side::A, opts)?.discord;
    let b = quantum_discord(rho, cut, Side::B, opts)?.discord;
    Ok(a.max(b))
}
