//! Swap-based extraction cycles.
//!
//! A swap between composite eigenstates `|alpha>` and `|beta>` is generated by
//! `X = |alpha><beta| + |beta><alpha|` with constant coupling, so that after a
//! rotation angle `theta = omega t` the evolution is `U = exp(-i theta X)`. A
//! full swap is `theta = pi/2`.

use std::f64::consts::FRAC_PI_2;

use crate::battery::{composite_hamiltonian, energy_groups, populations_equal, BatteryEnsemble};
use crate::qmat::{digits, compose, DensityMatrix, C64};
use crate::{Error, Result};

/// Coherences below this magnitude count as absent when a diagonal state is required.
pub const DIAGONAL_TOLERANCE: f64 = 1e-12;

/// Exchange of two composite basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapStep {
    alpha: usize,
    beta: usize,
    hamming: usize,
}

impl SwapStep {
    pub fn new(alpha: usize, beta: usize, site_dims: &[usize]) -> Result<Self> {
        let dim: usize = site_dims.iter().product();
        if alpha == beta || alpha >= dim || beta >= dim {
            return Err(Error::Domain(format!(
                "invalid swap ({alpha}, {beta}) in dimension {dim}"
            )));
        }
        let hamming = digits(alpha, site_dims)
            .iter()
            .zip(digits(beta, site_dims))
            .filter(|(a, b)| **a != *b)
            .count();
        Ok(Self { alpha, beta, hamming })
    }

    /// Swap between the states given as per-site levels.
    pub fn from_levels(alpha: &[usize], beta: &[usize], site_dims: &[usize]) -> Result<Self> {
        if alpha.len() != site_dims.len() || beta.len() != site_dims.len() {
            return Err(Error::Shape("level strings do not match the register".into()));
        }
        if alpha.iter().chain(beta).zip(site_dims.iter().chain(site_dims)).any(|(k, d)| k >= d) {
            return Err(Error::Domain("level exceeds site dimension".into()));
        }
        Self::new(compose(alpha, site_dims), compose(beta, site_dims), site_dims)
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// Number of sites on which the two states differ.
    pub fn hamming(&self) -> usize {
        self.hamming
    }

    /// The unordered pair, smaller index first.
    pub fn pair(&self) -> (usize, usize) {
        (self.alpha.min(self.beta), self.alpha.max(self.beta))
    }
}

/// Ordered list of swaps, each driven to completion at angular speed `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapProtocol {
    steps: Vec<SwapStep>,
    omega: f64,
}

impl SwapProtocol {
    pub fn new(steps: Vec<SwapStep>) -> Self {
        Self { steps, omega: 1.0 }
    }

    pub fn with_omega(steps: Vec<SwapStep>, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        Ok(Self { steps, omega })
    }

    pub fn steps(&self) -> &[SwapStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Duration of one complete swap.
    pub fn tau_step(&self) -> f64 {
        FRAC_PI_2 / self.omega
    }
}

fn rotation(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        (1.0, 0.0)
    } else if theta == FRAC_PI_2 {
        (0.0, 1.0)
    } else {
        (theta.cos(), theta.sin())
    }
}

/// Applies `exp(-i theta (|alpha><beta| + h.c.))` to `rho`.
pub fn evolve_step(rho: &DensityMatrix, step: &SwapStep, theta: f64) -> Result<DensityMatrix> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!("rotation angle {theta} outside [0, pi/2]")));
    }
    let dim = rho.dim();
    if step.alpha >= dim || step.beta >= dim {
        return Err(Error::Shape(format!("swap ({}, {}) outside dimension {dim}", step.alpha, step.beta)));
    }
    let (c, s) = rotation(theta);
    let (a, b) = (step.alpha, step.beta);
    let mut m = rho.matrix().clone();
    let mis = C64::new(0.0, -s);
    let cc = C64::new(c, 0.0);
    // U acts on rows a, b: row_a' = c row_a - i s row_b, row_b' = -i s row_a + c row_b
    for k in 0..dim {
        let (ra, rb) = (m[(a, k)], m[(b, k)]);
        m[(a, k)] = cc * ra + mis * rb;
        m[(b, k)] = mis * ra + cc * rb;
    }
    // U^dagger on columns a, b
    let pis = C64::new(0.0, s);
    for k in 0..dim {
        let (ca, cb) = (m[(k, a)], m[(k, b)]);
        m[(k, a)] = ca * cc + cb * pis;
        m[(k, b)] = ca * pis + cb * cc;
    }
    m[(a, a)].im = 0.0;
    m[(b, b)].im = 0.0;
    m[(b, a)] = m[(a, b)].conj();
    Ok(DensityMatrix::from_parts(m, rho.site_dims().to_vec()))
}

/// Splits a swap that changes `m` battery indices into `2m - 1` single-index
/// swaps. The path changes the differing indices left to right from `alpha`
/// toward `beta` and then retraces itself.
pub fn multi_step_decomposition(step: &SwapStep, e: &BatteryEnsemble) -> SwapProtocol {
    let dims = e.site_dims();
    let beta_levels = digits(step.beta, &dims);
    let mut current = digits(step.alpha, &dims);
    let mut path = vec![step.alpha];
    for site in 0..dims.len() {
        if current[site] != beta_levels[site] {
            current[site] = beta_levels[site];
            path.push(compose(&current, &dims));
        }
    }
    let mut steps = Vec::with_capacity(2 * path.len());
    let make = |x: usize, y: usize| SwapStep::new(x, y, &dims).expect("path states are distinct");
    for w in path.windows(2) {
        steps.push(make(w[0], w[1]));
    }
    for w in path.windows(2).rev().skip(1) {
        steps.push(make(w[0], w[1]));
    }
    SwapProtocol::new(steps)
}

/// Protocol states sampled on a uniform angle grid.
///
/// Every step contributes `samples_per_step` states from `theta = 0` to
/// `theta = pi/2` inclusive, so the state at a step boundary appears twice
/// (end of one stage, start of the next). An empty protocol yields `rho0` alone.
#[derive(Debug, Clone)]
pub struct ProtocolTrace {
    pub times: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Index of the step each sample belongs to; `None` only for the lone
    /// sample of an empty protocol.
    pub stages: Vec<Option<usize>>,
    pub states: Vec<DensityMatrix>,
    pub works: Vec<f64>,
}

impl ProtocolTrace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trace has at least one sample")
    }
}

/// One sampled state of a running protocol.
#[derive(Debug, Clone)]
pub struct Sample {
    pub time: f64,
    pub theta: f64,
    pub stage: Option<usize>,
    pub state: DensityMatrix,
    pub work: f64,
}

/// Lazy iterator over the samples of a protocol run; see [`ProtocolTrace`].
pub struct ProtocolSamples<'a> {
    proto: &'a SwapProtocol,
    energies: &'a [f64],
    initial_energy: f64,
    base: DensityMatrix,
    step: usize,
    sample: usize,
    samples_per_step: usize,
    done: bool,
}

impl Iterator for ProtocolSamples<'_> {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        if self.done {
            return None;
        }
        if self.proto.is_empty() {
            self.done = true;
            return Some(Sample {
                time: 0.0,
                theta: 0.0,
                stage: None,
                state: self.base.clone(),
                work: 0.0,
            });
        }
        let last = self.samples_per_step - 1;
        let theta = if self.sample == last {
            FRAC_PI_2
        } else {
            FRAC_PI_2 * self.sample as f64 / last as f64
        };
        let step = &self.proto.steps[self.step];
        let state = evolve_step(&self.base, step, theta).expect("grid angles lie in [0, pi/2]");
        let work = self.initial_energy - mean_energy(&state, self.energies);
        let out = Sample {
            time: self.step as f64 * self.proto.tau_step() + theta / self.proto.omega,
            theta,
            stage: Some(self.step),
            state,
            work,
        };
        if self.sample == last {
            self.base = out.state.clone();
            self.sample = 0;
            self.step += 1;
            self.done = self.step == self.proto.len();
        } else {
            self.sample += 1;
        }
        Some(out)
    }
}

/// Streams the samples of `proto` applied to `rho0`.
pub fn protocol_samples<'a>(
    rho0: &DensityMatrix,
    proto: &'a SwapProtocol,
    energies: &'a [f64],
    samples_per_step: usize,
) -> Result<ProtocolSamples<'a>> {
    if samples_per_step < 2 {
        return Err(Error::Domain(format!(
            "need at least two samples per step, got {samples_per_step}"
        )));
    }
    if energies.len() != rho0.dim() {
        return Err(Error::Shape(format!(
            "{} energies for dimension {}",
            energies.len(),
            rho0.dim()
        )));
    }
    Ok(ProtocolSamples {
        proto,
        energies,
        initial_energy: mean_energy(rho0, energies),
        base: rho0.clone(),
        step: 0,
        sample: 0,
        samples_per_step,
        done: false,
    })
}

/// Runs `proto` on `rho0`, recording states and the work `W(t)` against the
/// diagonal Hamiltonian `energies`.
pub fn run_protocol(
    rho0: &DensityMatrix,
    proto: &SwapProtocol,
    energies: &[f64],
    samples_per_step: usize,
) -> Result<ProtocolTrace> {
    let mut trace = ProtocolTrace {
        times: Vec::new(),
        thetas: Vec::new(),
        stages: Vec::new(),
        states: Vec::new(),
        works: Vec::new(),
    };
    for s in protocol_samples(rho0, proto, energies, samples_per_step)? {
        trace.times.push(s.time);
        trace.thetas.push(s.theta);
        trace.stages.push(s.stage);
        trace.states.push(s.state);
        trace.works.push(s.work);
    }
    Ok(trace)
}

/// Applies every step of `proto` as a complete swap.
pub fn apply_protocol(rho0: &DensityMatrix, proto: &SwapProtocol) -> Result<DensityMatrix> {
    proto
        .steps()
        .iter()
        .try_fold(rho0.clone(), |rho, step| evolve_step(&rho, step, FRAC_PI_2))
}

fn mean_energy(rho: &DensityMatrix, energies: &[f64]) -> f64 {
    energies
        .iter()
        .enumerate()
        .map(|(i, &e)| e * rho.entry(i, i).re)
        .sum()
}

/// `W = Tr[rho0 h] - Tr[rho_tau h]` for a diagonal Hamiltonian.
pub fn work_extracted(rho0: &DensityMatrix, rho_tau: &DensityMatrix, energies: &[f64]) -> Result<f64> {
    if rho0.dim() != rho_tau.dim() || energies.len() != rho0.dim() {
        return Err(Error::Shape(format!(
            "dimensions {}, {} and {} energies do not match",
            rho0.dim(),
            rho_tau.dim(),
            energies.len()
        )));
    }
    Ok(mean_energy(rho0, energies) - mean_energy(rho_tau, energies))
}

/// Maximal work obtainable by reordering populations, and the reordering.
///
/// `perm[k]` is the level whose population ends up on level `k`. The largest
/// populations go to the lowest energies; degenerate levels keep their own
/// population whenever it belongs to their group, and remaining ties are
/// resolved lowest index first.
pub fn max_extractable_work(populations: &[f64], energies: &[f64]) -> Result<(f64, Vec<usize>)> {
    if populations.len() != energies.len() {
        return Err(Error::Shape(format!(
            "{} populations for {} energies",
            populations.len(),
            energies.len()
        )));
    }
    let n = populations.len();
    let mut sources: Vec<usize> = (0..n).collect();
    sources.sort_by(|&a, &b| populations[b].total_cmp(&populations[a]).then(a.cmp(&b)));

    let groups = energy_groups(energies);
    let mut perm = vec![usize::MAX; n];
    let mut source_used = vec![false; n];
    let mut pending: Vec<(usize, f64)> = Vec::new();
    let mut position = 0;
    for g in &groups {
        let mut targets: Vec<f64> = sources[position..position + g.len()]
            .iter()
            .map(|&s| populations[s])
            .collect();
        position += g.len();
        let mut open = Vec::new();
        for &level in g {
            if let Some(slot) = targets.iter().position(|&t| populations_equal(t, populations[level])) {
                targets.swap_remove(slot);
                perm[level] = level;
                source_used[level] = true;
            } else {
                open.push(level);
            }
        }
        targets.sort_by(|a, b| b.total_cmp(a));
        pending.extend(open.into_iter().zip(targets));
    }
    for (level, value) in pending {
        let src = (0..n)
            .find(|&s| !source_used[s] && populations_equal(populations[s], value))
            .or_else(|| (0..n).find(|&s| !source_used[s]))
            .expect("one source per level");
        source_used[src] = true;
        perm[level] = src;
    }
    let work = (0..n)
        .map(|k| (populations[k] - populations[perm[k]]) * energies[k])
        .sum();
    Ok((work, perm))
}

/// [`max_extractable_work`] for a state that must be diagonal in the energy basis.
pub fn max_extractable_work_state(rho: &DensityMatrix, energies: &[f64]) -> Result<(f64, Vec<usize>)> {
    if !rho.is_diagonal(DIAGONAL_TOLERANCE) {
        return Err(Error::Domain(
            "maximal work is only defined here for states diagonal in the energy basis".into(),
        ));
    }
    max_extractable_work(&rho.diagonal(), energies)
}

/// Best work obtainable by acting on each battery separately.
pub fn classical_limit_work(e: &BatteryEnsemble) -> f64 {
    let (single, _) = max_extractable_work(e.probs(), e.energies()).expect("lengths match");
    e.n() as f64 * single
}

/// Root `p1` of `p1^2 = p0 (1 - p0 - p1)`, above which two qutrits beat the classical limit.
pub fn qutrit_threshold(p0: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0 / 3.0) {
        return Err(Error::Domain(format!("threshold needs 0 < p0 < 1/3, got {p0}")));
    }
    Ok(0.5 * (-p0 + (p0 * p0 + 4.0 * p0 * (1.0 - p0)).sqrt()))
}

/// Transpositions realising the reordering of [`max_extractable_work`] on
/// `Omega^{⊗n}`, found by selection sort along the permutation cycles.
pub fn optimal_protocol(e: &BatteryEnsemble) -> SwapProtocol {
    let pops = e.product_populations();
    let h = composite_hamiltonian(e);
    let (_, perm) = max_extractable_work(&pops, &h).expect("lengths match");
    protocol_for_permutation(&perm, &e.site_dims())
}

pub(crate) fn protocol_for_permutation(perm: &[usize], site_dims: &[usize]) -> SwapProtocol {
    let n = perm.len();
    let mut content: Vec<usize> = (0..n).collect();
    let mut where_is: Vec<usize> = (0..n).collect();
    let mut steps = Vec::new();
    for k in 0..n {
        if content[k] == perm[k] {
            continue;
        }
        let pos = where_is[perm[k]];
        steps.push(SwapStep::new(k, pos, site_dims).expect("distinct levels"));
        let moved = content[k];
        content.swap(k, pos);
        where_is[perm[k]] = k;
        where_is[moved] = pos;
    }
    SwapProtocol::new(steps)
}

/// Direct swap `|0...0> <-> |(d-1)...(d-1)>`.
pub fn direct_swap(e: &BatteryEnsemble) -> SwapStep {
    let dims = e.site_dims();
    let top = vec![e.d() - 1; e.n()];
    SwapStep::new(0, compose(&top, &dims), &dims).expect("register has at least two states")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::product_state;
    use crate::qmat::hermitian_eig;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn qubits(n: usize, p0: f64) -> BatteryEnsemble {
        BatteryEnsemble::qubits(n, p0, [0.0, 1.0]).unwrap()
    }

    fn qutrits(p1: f64) -> BatteryEnsemble {
        let p0 = 0.224;
        BatteryEnsemble::new(2, vec![p0, p1, 1.0 - p0 - p1], vec![0.0, 0.579, 1.0]).unwrap()
    }

    #[test]
    fn swap_step_validation() {
        assert!(SwapStep::new(1, 1, &[2, 2]).is_err());
        assert!(SwapStep::new(0, 4, &[2, 2]).is_err());
        assert_eq!(SwapStep::new(0, 3, &[2, 2]).unwrap().hamming(), 2);
        assert_eq!(SwapStep::new(0, 8, &[3, 3]).unwrap().hamming(), 2);
        assert_eq!(SwapStep::new(1, 2, &[3, 3]).unwrap().hamming(), 1);
        assert_eq!(SwapStep::from_levels(&[1, 1], &[0, 2], &[3, 3]).unwrap().pair(), (2, 4));
    }

    #[test]
    fn evolve_identity_and_full_swap() {
        let e = qubits(2, 0.3);
        let rho = product_state(&e);
        let step = direct_swap(&e);
        assert_eq!(evolve_step(&rho, &step, 0.0).unwrap(), rho);
        let full = evolve_step(&rho, &step, FRAC_PI_2).unwrap();
        let d = full.diagonal();
        assert!((d[0] - 0.49).abs() < 1e-15 && (d[3] - 0.09).abs() < 1e-15);
        assert_eq!(full.max_coherence(), 0.0);
        assert!(matches!(evolve_step(&rho, &step, 2.0), Err(Error::Domain(_))));
        assert!(matches!(evolve_step(&rho, &step, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn evolve_matches_closed_form() {
        let e = qubits(2, 0.3);
        let rho = product_state(&e);
        let step = direct_swap(&e);
        let theta = 0.37;
        let out = evolve_step(&rho, &step, theta).unwrap();
        let (pa, pb) = (0.09, 0.49);
        let (c, s) = (theta.cos(), theta.sin());
        assert!((out.entry(0, 0).re - (pa * c * c + pb * s * s)).abs() < 1e-15);
        assert!((out.entry(3, 3).re - (pb * c * c + pa * s * s)).abs() < 1e-15);
        assert!((out.entry(0, 3) - C64::new(0.0, (pa - pb) * c * s)).norm() < 1e-15);
        assert_eq!(out.entry(1, 1).re, 0.21);
    }

    #[test]
    fn two_qutrit_swap_matrix() {
        let (p0, p1, p2) = (0.224, 0.322, 0.454);
        let e = BatteryEnsemble::new(2, vec![p0, p1, p2], vec![0.0, 0.579, 1.0]).unwrap();
        let t = 0.7;
        let out = evolve_step(&product_state(&e), &direct_swap(&e), t).unwrap();
        let (c, s) = (t.cos(), t.sin());
        let diag = [
            p0 * p0 * c * c + p2 * p2 * s * s,
            p0 * p1,
            p0 * p2,
            p0 * p1,
            p1 * p1,
            p1 * p2,
            p0 * p2,
            p1 * p2,
            p2 * p2 * c * c + p0 * p0 * s * s,
        ];
        for i in 0..9 {
            for j in 0..9 {
                let expected = if i == j {
                    C64::new(diag[i], 0.0)
                } else if (i, j) == (0, 8) {
                    C64::new(0.0, (p0 * p0 - p2 * p2) * c * s)
                } else if (i, j) == (8, 0) {
                    C64::new(0.0, -(p0 * p0 - p2 * p2) * c * s)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((out.entry(i, j) - expected).norm() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let e2 = qubits(2, 0.3);
        let single = SwapStep::new(0, 2, &[2, 2]).unwrap();
        assert_eq!(multi_step_decomposition(&single, &e2).steps(), &[single]);

        let pairs: Vec<_> = multi_step_decomposition(&direct_swap(&e2), &e2)
            .steps()
            .iter()
            .map(|s| (s.alpha(), s.beta()))
            .collect();
        assert_eq!(pairs, vec![(0b00, 0b10), (0b10, 0b11), (0b00, 0b10)]);

        let e3 = qubits(3, 0.3);
        let pairs: Vec<_> = multi_step_decomposition(&direct_swap(&e3), &e3)
            .steps()
            .iter()
            .map(|s| (s.alpha(), s.beta()))
            .collect();
        assert_eq!(
            pairs,
            vec![(0b000, 0b100), (0b100, 0b110), (0b110, 0b111), (0b100, 0b110), (0b000, 0b100)]
        );
    }

    #[test]
    fn decomposition_composes_to_the_swap() {
        let e = BatteryEnsemble::new(3, vec![0.2, 0.3, 0.5], vec![0.0, 0.4, 1.0]).unwrap();
        let dims = e.site_dims();
        for (alpha, beta) in [(0usize, 26usize), (5, 19), (1, 7)] {
            let step = SwapStep::new(alpha, beta, &dims).unwrap();
            let proto = multi_step_decomposition(&step, &e);
            let m = step.hamming();
            assert_eq!(proto.len(), 2 * m - 1);
            for k in 0..proto.len() {
                assert_eq!(proto.steps()[k], proto.steps()[proto.len() - 1 - k]);
                assert_eq!(proto.steps()[k].hamming(), 1);
            }
            let mut content: Vec<usize> = (0..e.dim()).collect();
            for s in proto.steps() {
                content.swap(s.alpha(), s.beta());
            }
            let mut expected: Vec<usize> = (0..e.dim()).collect();
            expected.swap(alpha, beta);
            assert_eq!(content, expected);
        }
    }

    #[test]
    fn run_protocol_examples() {
        let e = qubits(2, 0.3);
        let rho = product_state(&e);
        let h = composite_hamiltonian(&e);
        let empty = run_protocol(&rho, &SwapProtocol::new(vec![]), &h, 5).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty.states[0], rho);
        assert_eq!(empty.works[0], 0.0);

        let direct = SwapProtocol::new(vec![direct_swap(&e)]);
        let t = run_protocol(&rho, &direct, &h, 11).unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t.works[0], 0.0);
        let d = t.final_state().diagonal();
        assert!((d[0] - 0.49).abs() < 1e-15 && (d[3] - 0.09).abs() < 1e-15);
        assert!((d[1] - 0.21).abs() < 1e-15 && (d[2] - 0.21).abs() < 1e-15);

        let multi = multi_step_decomposition(&direct_swap(&e), &e);
        let tm = run_protocol(&rho, &multi, &h, 7).unwrap();
        assert_eq!(tm.len(), 21);
        assert!((tm.final_state().matrix() - t.final_state().matrix()).camax() < 1e-9);
        assert!((tm.times.last().unwrap() - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert!(matches!(run_protocol(&rho, &direct, &h, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn work_examples() {
        let e = qubits(2, 0.3);
        let rho = product_state(&e);
        let h = composite_hamiltonian(&e);
        assert_eq!(work_extracted(&rho, &rho, &h).unwrap(), 0.0);
        let step = direct_swap(&e);
        let full = evolve_step(&rho, &step, FRAC_PI_2).unwrap();
        assert!((work_extracted(&rho, &full, &h).unwrap() - 0.8).abs() < 1e-12);
        let half = evolve_step(&rho, &step, FRAC_PI_4).unwrap();
        assert!((work_extracted(&rho, &half, &h).unwrap() - 0.4).abs() < 1e-12);
        assert!(work_extracted(&rho, &product_state(&qubits(1, 0.3)), &h).is_err());
    }

    #[test]
    fn max_work_examples() {
        let (w, perm) = max_extractable_work(&[0.49, 0.21, 0.21, 0.09], &[0.0, 1.0, 1.0, 2.0]).unwrap();
        assert_eq!(w, 0.0);
        assert_eq!(perm, vec![0, 1, 2, 3]);
        let (w, perm) = max_extractable_work(&[0.09, 0.21, 0.21, 0.49], &[0.0, 1.0, 1.0, 2.0]).unwrap();
        assert!((w - 0.8).abs() < 1e-12);
        assert_eq!(perm, vec![3, 1, 2, 0]);

        let e = qutrits(0.40);
        let pops = e.product_populations();
        let h = composite_hamiltonian(&e);
        let (w, _) = max_extractable_work(&pops, &h).unwrap();
        let brute = brute_force_max_work(&pops, &h);
        assert!((w - brute).abs() < 1e-12);
        assert!(w > classical_limit_work(&e) + 1e-6);

        let coherent = evolve_step(&product_state(&e), &direct_swap(&e), 0.3).unwrap();
        assert!(matches!(max_extractable_work_state(&coherent, &h), Err(Error::Domain(_))));
    }

    /// Exhaustive search over every population permutation (Heap's algorithm).
    fn brute_force_max_work(pops: &[f64], h: &[f64]) -> f64 {
        let initial: f64 = pops.iter().zip(h).map(|(p, e)| p * e).sum();
        let mut a = pops.to_vec();
        let n = a.len();
        let mut c = vec![0usize; n];
        let energy = |a: &[f64]| a.iter().zip(h).map(|(p, e)| p * e).sum::<f64>();
        let mut best = initial - energy(&a);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                best = best.max(initial - energy(&a));
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        best
    }

    #[test]
    fn classical_limit_examples() {
        let passive = BatteryEnsemble::new(1, vec![0.6, 0.3, 0.1], vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(classical_limit_work(&passive), 0.0);
        let e = qutrits(0.3);
        assert!((classical_limit_work(&e) - 0.504).abs() < 1e-12);
        let q = qubits(2, 0.3);
        let (w, _) = max_extractable_work(&q.product_populations(), &composite_hamiltonian(&q)).unwrap();
        assert!((classical_limit_work(&q) - w).abs() < 1e-12);
    }

    #[test]
    fn threshold_examples() {
        assert!(qutrit_threshold(1e-12).unwrap() < 1e-5);
        let oracle = |p0: f64| {
            // p^2 + p0 p - p0 (1 - p0) = 0
            let (b, c) = (p0, -p0 * (1.0 - p0));
            (-b + (b * b - 4.0 * c).sqrt()) / 2.0
        };
        let t = qutrit_threshold(0.224).unwrap();
        assert!((t - oracle(0.224)).abs() < 1e-15);
        assert!((t - 0.3197).abs() < 1e-4);
        let t = qutrit_threshold(0.25).unwrap();
        assert!((t * t + 0.25 * t - 0.1875).abs() < 1e-14);
        assert!(qutrit_threshold(0.0).is_err());
        assert!(qutrit_threshold(0.34).is_err());
    }

    #[test]
    fn optimal_protocol_examples() {
        let passive = BatteryEnsemble::qubits(3, 0.8, [0.0, 1.0]).unwrap();
        assert!(optimal_protocol(&passive).is_empty());

        let e = qubits(2, 0.3);
        let proto = optimal_protocol(&e);
        assert_eq!(proto.steps().iter().map(SwapStep::pair).collect::<Vec<_>>(), vec![(0, 3)]);

        let q = qutrits(0.40);
        let pairs: Vec<_> = optimal_protocol(&q).steps().iter().map(SwapStep::pair).collect();
        assert!(pairs.iter().any(|&(a, b)| a == 4 || b == 4), "{pairs:?}");

        let below = qutrits(0.25);
        let pairs: Vec<_> = optimal_protocol(&below).steps().iter().map(SwapStep::pair).collect();
        assert!(!pairs.iter().any(|&(a, b)| a == 4 || b == 4), "{pairs:?}");
    }

    #[test]
    fn protocol_is_unitary() {
        let e = BatteryEnsemble::new(2, vec![0.2, 0.3, 0.5], vec![0.0, 0.5, 1.2]).unwrap();
        let rho = product_state(&e);
        let h = composite_hamiltonian(&e);
        let proto = optimal_protocol(&e);
        let trace = run_protocol(&rho, &proto, &h, 6).unwrap();
        let mut reference = rho.spectrum();
        reference.sort_by(f64::total_cmp);
        for s in &trace.states {
            assert!((s.trace() - 1.0).abs() < 1e-12);
            let eigs = hermitian_eig(s.matrix()).unwrap().values;
            for (x, y) in eigs.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn optimal_protocol_reaches_max_work(
            raw in proptest::collection::vec(0.01f64..1.0, 2..=4),
            n in 1usize..=4,
            gaps in proptest::collection::vec(0.05f64..1.0, 3),
        ) {
            let d = raw.len();
            prop_assume!(n as f64 * (d as f64).log2() <= 8.0);
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mut energies = vec![0.0];
            for g in gaps.iter().take(d - 1) {
                energies.push(energies.last().unwrap() + g);
            }
            let e = BatteryEnsemble::new(n, probs, energies).unwrap();
            let rho = product_state(&e);
            let h = composite_hamiltonian(&e);
            let proto = optimal_protocol(&e);
            prop_assert!(proto.len() < e.dim());
            let fin = apply_protocol(&rho, &proto).unwrap();
            let (best, _) = max_extractable_work(&e.product_populations(), &h).unwrap();
            prop_assert!((work_extracted(&rho, &fin, &h).unwrap() - best).abs() < 1e-10);
            prop_assert!(best >= classical_limit_work(&e) - 1e-12);

            // work is additive over the steps
            let mut state = rho.clone();
            let mut sum = 0.0;
            for s in proto.steps() {
                let next = evolve_step(&state, s, FRAC_PI_2).unwrap();
                sum += work_extracted(&state, &next, &h).unwrap();
                state = next;
            }
            prop_assert!((sum - best).abs() < 1e-10);
        }

        #[test]
        fn qubit_registers_never_beat_the_classical_limit(p0 in 0.0f64..1.0, n in 1usize..=6) {
            let e = qubits(n, p0);
            let (w, _) = max_extractable_work(&e.product_populations(), &composite_hamiltonian(&e)).unwrap();
            prop_assert!((w - classical_limit_work(&e)).abs() < 1e-10);
        }

        #[test]
        fn direct_and_multistep_agree(p in proptest::collection::vec(0.01f64..1.0, 3), alpha in 0usize..27, beta in 0usize..27) {
            prop_assume!(alpha != beta);
            let total: f64 = p.iter().sum();
            let e = BatteryEnsemble::new(3, p.iter().map(|x| x / total).collect(), vec![0.0, 0.3, 1.0]).unwrap();
            let step = SwapStep::new(alpha, beta, &e.site_dims()).unwrap();
            let rho = product_state(&e);
            let direct = apply_protocol(&rho, &SwapProtocol::new(vec![step])).unwrap();
            let multi = apply_protocol(&rho, &multi_step_decomposition(&step, &e)).unwrap();
            prop_assert!((direct.matrix() - multi.matrix()).camax() < 1e-9);
        }
    }
}
