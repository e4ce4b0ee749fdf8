//! Every correlation measure of one state in a single record.

use super::{
    discord_witness, eof_two_qubits, genuine_correlations_with, global_discord, ppt_separable, quantum_discord,
    Ansatz, Bipartition, MinimizerOptions, Side,
};
use crate::qmat::DensityMatrix;
use crate::Result;

/// Knobs for [`correlation_report`].
#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    pub minimizer: MinimizerOptions,
    /// Basis ansatz of the global discord search.
    pub global_ansatz: Ansatz,
    /// Restrict genuine correlations to one cut per size with a shared basis.
    pub symmetric_genuine: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub global_discord: f64,
    pub genuine_total: f64,
    pub genuine_classical: f64,
    pub genuine_quantum: f64,
    /// Present for two-qubit states only.
    pub eof: Option<f64>,
    /// Present when the cut has a supported dimension pair.
    pub ppt_separable: Option<bool>,
    pub witness_norm: f64,
}

/// Bipartite quantities use `cut` with measurements on side B.
pub fn correlation_report(rho: &DensityMatrix, cut: &Bipartition, opts: &ReportOptions) -> Result<CorrelationReport> {
    let bip = quantum_discord(rho, cut, Side::B, &opts.minimizer)?;
    let gd = global_discord(rho, opts.global_ansatz, &opts.minimizer)?;
    let genuine = genuine_correlations_with(rho, opts.symmetric_genuine, &opts.minimizer)?;
    let eof = if rho.site_dims() == [2, 2] {
        Some(eof_two_qubits(rho)?)
    } else {
        None
    };
    Ok(CorrelationReport {
        mutual_info: bip.mutual_info,
        classical: bip.classical,
        discord: bip.discord,
        global_discord: gd.value,
        genuine_total: genuine.total,
        genuine_classical: genuine.classical,
        genuine_quantum: genuine.quantum,
        eof,
        ppt_separable: ppt_separable(rho, cut).ok(),
        witness_norm: discord_witness(rho).norm,
    })
}
