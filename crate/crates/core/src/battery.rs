//! Ensembles of identical batteries, composite Hamiltonians, Gibbs references
//! and passivity checks.

use crate::qmat::{digits, shannon_bits, DensityMatrix};
use crate::{Error, Result};

/// Probabilities must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
/// Composite energies closer than this are treated as degenerate.
pub const ENERGY_TIE_TOLERANCE: f64 = 1e-12;
/// Relative tolerance below which two populations count as equal.
pub const POPULATION_TIE_TOLERANCE: f64 = 1e-12;
/// Default surrogate for "every n" in [`is_completely_passive`].
pub const DEFAULT_PASSIVITY_DEPTH: usize = 6;

const BETA_TOLERANCE: f64 = 1e-12;

/// `n` identical `d`-level batteries, each prepared in `sum_k p_k |k><k|`
/// with Hamiltonian `sum_k eps_k |k><k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryEnsemble {
    n: usize,
    probs: Vec<f64>,
    energies: Vec<f64>,
}

impl BatteryEnsemble {
    pub fn new(n: usize, probs: Vec<f64>, energies: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("battery count must be at least 1".into()));
        }
        let d = probs.len();
        if d < 2 {
            return Err(Error::Domain(format!("need at least two levels, got {d}")));
        }
        if energies.len() != d {
            return Err(Error::Domain(format!(
                "{} energies given for {d} levels",
                energies.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Domain(format!("probabilities must be nonnegative: {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        if energies.iter().any(|e| !e.is_finite()) || energies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "energies must be strictly increasing: {energies:?}"
            )));
        }
        Ok(Self { n, probs, energies })
    }

    /// Two-level batteries with `p = (p0, 1 - p0)`.
    pub fn qubits(n: usize, p0: f64, energies: [f64; 2]) -> Result<Self> {
        Self::new(n, vec![p0, 1.0 - p0], energies.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.d().pow(self.n as u32)
    }

    pub fn site_dims(&self) -> Vec<usize> {
        vec![self.d(); self.n]
    }

    /// Same single-battery data with a different battery count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.probs.clone(), self.energies.clone())
    }

    /// Populations of `Omega^{⊗n}`, i.e. the diagonal of [`product_state`].
    pub fn product_populations(&self) -> Vec<f64> {
        let dims = self.site_dims();
        (0..self.dim())
            .map(|i| digits(i, &dims).iter().map(|&k| self.probs[k]).product())
            .collect()
    }
}

/// `Omega^{⊗n}` as a density matrix.
pub fn product_state(e: &BatteryEnsemble) -> DensityMatrix {
    DensityMatrix::from_diagonal(&e.product_populations(), e.site_dims())
        .expect("product of normalised populations is a valid state")
}

/// Diagonal of `h0 = H ⊗ 1 ⊗ ... + ... + 1 ⊗ ... ⊗ H`.
pub fn composite_hamiltonian(e: &BatteryEnsemble) -> Vec<f64> {
    let dims = e.site_dims();
    (0..e.dim())
        .map(|i| digits(i, &dims).iter().map(|&k| e.energies[k]).sum())
        .collect()
}

pub(crate) fn populations_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= POPULATION_TIE_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Level indices grouped by degenerate energy, groups in ascending energy and
/// indices ascending within a group.
pub(crate) fn energy_groups(energies: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some(g) if (energies[idx] - energies[g[0]]).abs() <= ENERGY_TIE_TOLERANCE => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

/// True iff no population is exceeded by the population of a strictly higher
/// energy level. Any order among degenerate levels is passive.
pub fn is_passive(probs: &[f64], energies: &[f64]) -> bool {
    assert_eq!(probs.len(), energies.len(), "populations and energies differ in length");
    let groups = energy_groups(energies);
    let mut lower_min = f64::INFINITY;
    for g in groups {
        let max = g.iter().map(|&i| probs[i]).fold(f64::NEG_INFINITY, f64::max);
        let min = g.iter().map(|&i| probs[i]).fold(f64::INFINITY, f64::min);
        if max > lower_min && !populations_equal(max, lower_min) {
            return false;
        }
        lower_min = lower_min.min(min);
    }
    true
}

/// True iff `Omega^{⊗m}` is passive for every `m <= n_check`.
pub fn is_completely_passive(e: &BatteryEnsemble, n_check: usize) -> bool {
    (1..=n_check.max(1)).all(|m| {
        let em = e.with_n(m).expect("single-battery data already validated");
        is_passive(&em.product_populations(), &composite_hamiltonian(&em))
    })
}

/// Inverse temperature of the single-battery Gibbs state with the same entropy
/// as `Omega`, together with that state.
#[derive(Debug, Clone)]
pub struct GibbsResult {
    /// `f64::INFINITY` for a pure input.
    pub beta: f64,
    pub state: DensityMatrix,
}

/// Gibbs populations `e^{-beta eps_k} / Z`; `beta = inf` gives the ground state.
pub fn gibbs_populations(energies: &[f64], beta: f64) -> Vec<f64> {
    let mut out = vec![0.0; energies.len()];
    if beta.is_infinite() {
        out[0] = 1.0;
        return out;
    }
    let e0 = energies[0];
    let weights: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    for (o, w) in out.iter_mut().zip(&weights) {
        *o = w / z;
    }
    out
}

fn gibbs_entropy(energies: &[f64], beta: f64) -> f64 {
    shannon_bits(gibbs_populations(energies, beta))
}

/// Solves `S(Omega) = S(Omega_eq)` for `beta >= 0` by bracket doubling and bisection.
pub fn solve_beta(e: &BatteryEnsemble) -> GibbsResult {
    let d = e.d();
    let target = shannon_bits(e.probs().iter().copied());
    let dims = vec![d];
    let make = |beta: f64| {
        GibbsResult {
            beta,
            state: DensityMatrix::from_diagonal(&gibbs_populations(e.energies(), beta), dims.clone())
                .expect("Gibbs populations are normalised"),
        }
    };
    if target <= 1e-15 {
        return make(f64::INFINITY);
    }
    let max_entropy = (d as f64).log2();
    if target >= max_entropy - 1e-15 {
        return make(0.0);
    }
    let energies = e.energies();
    let (mut lo, mut hi) = (0.0, 1.0);
    while gibbs_entropy(energies, hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return make(f64::INFINITY);
        }
    }
    while hi - lo > BETA_TOLERANCE * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if gibbs_entropy(energies, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    make(0.5 * (lo + hi))
}
