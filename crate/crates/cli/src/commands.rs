//! Table builders behind each subcommand.

use rayon::prelude::*;

use qbw_core::battery::{composite_hamiltonian, product_state, BatteryEnsemble};
use qbw_core::correlations::{
    analytic_gd_max, correlation_report, discord_witness, eof_two_qubits, genuine_total, global_discord,
    quantum_discord, two_way_discord, Ansatz, Bipartition, MinimizerOptions, ReportOptions, Side,
};
use qbw_core::protocol::{
    apply_protocol, classical_limit_work, direct_swap, max_extractable_work, multi_step_decomposition,
    optimal_protocol, run_protocol, work_extracted, ProtocolTrace, SwapProtocol,
};
use qbw_core::qmat::DensityMatrix;

use crate::config::{ProtocolKind, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const FIG3_SIZES: [usize; 4] = [3, 5, 7, 10];
const P0_RANGE: (f64, f64) = (0.005, 0.495);
const FIG2_P0: f64 = 0.224;

type Rows = Result<Vec<Vec<Cell>>, CliError>;

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}

/// `points` values strictly inside `(lo, hi)`.
fn interior(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| lo + (hi - lo) * (k + 1) as f64 / (points + 1) as f64)
        .collect()
}

fn ansatz_for(n: usize) -> Ansatz {
    if n > 3 {
        Ansatz::Shared
    } else {
        Ansatz::PerSite
    }
}

fn minimizer(cfg: &RunConfig) -> MinimizerOptions {
    MinimizerOptions::default().with_seed(cfg.seed)
}

fn qubit_energies(cfg: &RunConfig) -> Result<[f64; 2], CliError> {
    if cfg.d != 2 {
        return Err(CliError::Config(format!("this command needs d = 2, got {}", cfg.d)));
    }
    Ok([cfg.energies[0], cfg.energies[1]])
}

fn protocol(kind: ProtocolKind, e: &BatteryEnsemble) -> SwapProtocol {
    match kind {
        ProtocolKind::Direct => SwapProtocol::new(vec![direct_swap(e)]),
        ProtocolKind::Multistep => multi_step_decomposition(&direct_swap(e), e),
        ProtocolKind::Optimal => optimal_protocol(e),
    }
}

fn trace(e: &BatteryEnsemble, proto: &SwapProtocol, samples: usize) -> Result<ProtocolTrace, CliError> {
    Ok(run_protocol(&product_state(e), proto, &composite_hamiltonian(e), samples)?)
}

fn max_of<F>(states: &[DensityMatrix], f: F) -> Result<f64, CliError>
where
    F: Fn(&DensityMatrix) -> Result<f64, CliError>,
{
    states.iter().try_fold(0.0f64, |acc, s| Ok(acc.max(f(s)?)))
}

fn gd_max(states: &[DensityMatrix], n: usize, opts: &MinimizerOptions) -> Result<f64, CliError> {
    max_of(states, |s| Ok(global_discord(s, ansatz_for(n), opts)?.value))
}

fn fig3_sizes(cfg: &RunConfig) -> Result<Vec<usize>, CliError> {
    match cfg.n {
        None => Ok(FIG3_SIZES.to_vec()),
        Some(n) if FIG3_SIZES.contains(&n) => Ok(vec![n]),
        Some(n) => Err(CliError::Config(format!("fig3 supports n in {FIG3_SIZES:?}, got {n}"))),
    }
}

fn collect_rows<T, F>(grid: &[T], f: F) -> Rows
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    grid.par_iter().map(f).collect()
}

pub fn fig1(cfg: &RunConfig) -> Result<Table, CliError> {
    if cfg.n.is_some_and(|n| n != 2) {
        return Err(CliError::Config("fig1 needs n = 2".into()));
    }
    let energies = qubit_energies(cfg)?;
    let opts = minimizer(cfg);
    let cut = Bipartition::rest_last(2)?;
    let mut table = Table::new(["p0", "w_max", "qd_max_direct", "eof_max_direct", "qd_max_multistep"]);
    let grid = linspace(P0_RANGE.0, P0_RANGE.1, cfg.points);
    table.rows = collect_rows(&grid, |&p0| {
        let e = BatteryEnsemble::qubits(2, p0, energies)?;
        let (w_max, _) = max_extractable_work(&e.product_populations(), &composite_hamiltonian(&e))?;
        let direct = trace(&e, &protocol(ProtocolKind::Direct, &e), cfg.samples)?;
        let multi = trace(&e, &protocol(ProtocolKind::Multistep, &e), cfg.samples)?;
        let qd = |s: &DensityMatrix| Ok(two_way_discord(s, &cut, &opts)?);
        Ok(vec![
            p0.into(),
            w_max.into(),
            max_of(&direct.states, qd)?.into(),
            max_of(&direct.states, |s| Ok(eof_two_qubits(s)?))?.into(),
            max_of(&multi.states, qd)?.into(),
        ])
    })?;
    Ok(table)
}

pub fn fig2(cfg: &RunConfig) -> Result<Table, CliError> {
    if cfg.n.is_some_and(|n| n != 2) || cfg.d != 3 {
        return Err(CliError::Config("fig2 needs n = 2 and d = 3".into()));
    }
    let p0 = cfg.probs.as_ref().map_or(FIG2_P0, |p| p[0]);
    if !(0.0 < p0 && p0 < 1.0 / 3.0) {
        return Err(CliError::Config(format!("fig2 needs 0 < p0 < 1/3, got {p0}")));
    }
    let opts = minimizer(cfg);
    let cut = Bipartition::rest_last(2)?;
    let mut table = Table::new(["p1", "w_diff", "j_final"]);
    let grid = interior(p0, (1.0 - p0) / 2.0, cfg.points);
    table.rows = collect_rows(&grid, |&p1| {
        let e = BatteryEnsemble::new(2, vec![p0, p1, 1.0 - p0 - p1], cfg.energies.clone())?;
        let (w_max, _) = max_extractable_work(&e.product_populations(), &composite_hamiltonian(&e))?;
        let fin = apply_protocol(&product_state(&e), &optimal_protocol(&e))?;
        let j = quantum_discord(&fin, &cut, Side::B, &opts)?.classical;
        Ok(vec![p1.into(), (w_max - classical_limit_work(&e)).into(), j.into()])
    })?;
    Ok(table)
}

pub fn fig3a(cfg: &RunConfig) -> Result<Table, CliError> {
    let energies = qubit_energies(cfg)?;
    let sizes = fig3_sizes(cfg)?;
    let with_stages = sizes.contains(&3);
    let opts = minimizer(cfg);
    let mut header = vec!["p0".to_string()];
    header.extend(sizes.iter().map(|n| format!("gd_max_n{n}")));
    header.extend(sizes.iter().map(|n| format!("gd_analytic_n{n}")));
    if with_stages {
        header.extend((1..=5).map(|k| format!("gd_stage{k}")));
    }
    let mut table = Table::new(header);
    let grid = linspace(P0_RANGE.0, P0_RANGE.1, cfg.points);
    table.rows = collect_rows(&grid, |&p0| {
        let mut row: Vec<Cell> = vec![p0.into()];
        for &n in &sizes {
            let e = BatteryEnsemble::qubits(n, p0, energies)?;
            let t = trace(&e, &protocol(ProtocolKind::Direct, &e), cfg.samples)?;
            row.push(gd_max(&t.states, n, &opts)?.into());
        }
        row.extend(sizes.iter().map(|&n| Cell::Num(analytic_gd_max(p0, n))));
        if with_stages {
            let e = BatteryEnsemble::qubits(3, p0, energies)?;
            let t = trace(&e, &protocol(ProtocolKind::Multistep, &e), cfg.samples)?;
            for stage in 0..5 {
                let states: Vec<DensityMatrix> = t
                    .states
                    .iter()
                    .zip(&t.stages)
                    .filter(|(_, s)| **s == Some(stage))
                    .map(|(rho, _)| rho.clone())
                    .collect();
                row.push(gd_max(&states, 3, &opts)?.into());
            }
        }
        Ok(row)
    })?;
    Ok(table)
}

pub fn fig3b(cfg: &RunConfig) -> Result<Table, CliError> {
    let energies = qubit_energies(cfg)?;
    let sizes = fig3_sizes(cfg)?;
    let mut header = vec!["p0".to_string()];
    header.extend(sizes.iter().map(|n| format!("gc_max_n{n}")));
    let mut table = Table::new(header);
    let grid = linspace(P0_RANGE.0, P0_RANGE.1, cfg.points);
    table.rows = collect_rows(&grid, |&p0| {
        let mut row: Vec<Cell> = vec![p0.into()];
        for &n in &sizes {
            let e = BatteryEnsemble::qubits(n, p0, energies)?;
            let t = trace(&e, &protocol(ProtocolKind::Direct, &e), cfg.samples)?;
            row.push(max_of(&t.states, |s| Ok(genuine_total(s, n > 3)?.0))?.into());
        }
        Ok(row)
    })?;
    Ok(table)
}

pub fn fig3c(cfg: &RunConfig) -> Result<Table, CliError> {
    let energies = qubit_energies(cfg)?;
    let sizes = fig3_sizes(cfg)?;
    let opts = minimizer(cfg);
    let grid: Vec<(usize, f64)> = sizes
        .iter()
        .flat_map(|&n| linspace(P0_RANGE.0, P0_RANGE.1, cfg.points).into_iter().map(move |p| (n, p)))
        .collect();
    let mut table = Table::new(["n", "p0", "w", "gd_max"]);
    table.rows = collect_rows(&grid, |&(n, p0)| {
        let e = BatteryEnsemble::qubits(n, p0, energies)?;
        let proto = protocol(ProtocolKind::Direct, &e);
        let rho0 = product_state(&e);
        let w = work_extracted(&rho0, &apply_protocol(&rho0, &proto)?, &composite_hamiltonian(&e))?;
        let t = trace(&e, &proto, cfg.samples)?;
        Ok(vec![Cell::Int(n), p0.into(), w.into(), gd_max(&t.states, n, &opts)?.into()])
    })?;
    Ok(table)
}

pub fn sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let energies = qubit_energies(cfg)?;
    let n = cfg.n.unwrap_or(2);
    let opts = minimizer(cfg);
    let mut table = Table::new(["p0", "w_max", "w_classical", "w_protocol", "gd_max", "witness_max"]);
    let grid = linspace(P0_RANGE.0, P0_RANGE.1, cfg.points);
    table.rows = collect_rows(&grid, |&p0| {
        let e = BatteryEnsemble::qubits(n, p0, energies)?;
        let h = composite_hamiltonian(&e);
        let rho0 = product_state(&e);
        let (w_max, _) = max_extractable_work(&e.product_populations(), &h)?;
        let proto = protocol(cfg.protocol, &e);
        let w_protocol = work_extracted(&rho0, &apply_protocol(&rho0, &proto)?, &h)?;
        let t = trace(&e, &proto, cfg.samples)?;
        Ok(vec![
            p0.into(),
            w_max.into(),
            classical_limit_work(&e).into(),
            w_protocol.into(),
            gd_max(&t.states, n, &opts)?.into(),
            max_of(&t.states, |s| Ok(discord_witness(s).norm))?.into(),
        ])
    })?;
    Ok(table)
}

pub fn compute(cfg: &RunConfig) -> Result<Table, CliError> {
    let n = cfg.n.unwrap_or(2);
    if n < 2 {
        return Err(CliError::Config("compute needs at least two sites".into()));
    }
    let probs = cfg
        .probs
        .clone()
        .ok_or_else(|| CliError::Config("compute needs --probs".into()))?;
    let e = BatteryEnsemble::new(n, probs, cfg.energies.clone())?;
    let t = trace(&e, &protocol(cfg.protocol, &e), cfg.samples)?;
    let cut = Bipartition::rest_last(n)?;
    let opts = ReportOptions {
        minimizer: minimizer(cfg),
        global_ansatz: ansatz_for(n),
        symmetric_genuine: n > 3,
    };
    let mut table = Table::new([
        "step",
        "theta",
        "time",
        "work",
        "coherence",
        "mutual_info",
        "classical",
        "discord",
        "global_discord",
        "genuine_total",
        "genuine_classical",
        "genuine_quantum",
        "eof",
        "ppt_separable",
        "witness_norm",
    ]);
    let indices: Vec<usize> = (0..t.len()).collect();
    table.rows = collect_rows(&indices, |&k| {
        let rho = &t.states[k];
        let r = correlation_report(rho, &cut, &opts)?;
        Ok(vec![
            t.stages[k].map_or(Cell::Empty, |s| Cell::Int(s + 1)),
            t.thetas[k].into(),
            t.times[k].into(),
            t.works[k].into(),
            rho.max_coherence().into(),
            r.mutual_info.into(),
            r.classical.into(),
            r.discord.into(),
            r.global_discord.into(),
            r.genuine_total.into(),
            r.genuine_classical.into(),
            r.genuine_quantum.into(),
            r.eof.into(),
            r.ppt_separable.into(),
            r.witness_norm.into(),
        ])
    })?;
    Ok(table)
}
