//! Reduction of a qudit register with one coherence onto a qubit register.
//!
//! For a coherence between `|alpha>` and `|beta>`, each site on which the two
//! states differ becomes a qubit spanned by `{|alpha_i>, |beta_i>}`; sites where
//! they agree are pinned at their common level and dropped. The state is
//! projected onto the kept span and renormalised.

use nalgebra::DMatrix;

use crate::qmat::{compose, digits, DensityMatrix, C64};
use crate::{Error, Result};

/// Off-diagonal entries above this magnitude count as coherences.
pub const COHERENCE_TOLERANCE: f64 = 1e-12;
/// Projections with less trace than this cannot be renormalised.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// The unique coherent pair `(i, j)` with `i < j`, `None` for a diagonal state.
pub fn detect_single_coherence(rho: &DensityMatrix) -> Result<Option<(usize, usize)>> {
    let mut found: Option<(usize, usize)> = None;
    let n = rho.dim();
    for j in 0..n {
        for i in 0..j {
            if rho.entry(i, j).norm() > COHERENCE_TOLERANCE {
                if let Some((a, b)) = found {
                    return Err(Error::MultipleCoherences(a, b, i, j));
                }
                found = Some((i, j));
            }
        }
    }
    Ok(found)
}

/// Result of [`qudit_to_qubit_map`].
#[derive(Debug, Clone)]
pub struct MappedState {
    /// Normalised state on the differing sites, one qubit each.
    pub state: DensityMatrix,
    /// Trace of the projection before normalisation.
    pub weight: f64,
    /// `(alpha_i, beta_i)` for every kept site; `alpha_i` becomes `|0>`.
    pub kept_basis: Vec<(usize, usize)>,
    /// Original indices of the kept sites.
    pub sites: Vec<usize>,
    /// `(site, level)` of every pinned site.
    pub pinned: Vec<(usize, usize)>,
    original_dims: Vec<usize>,
}

impl MappedState {
    /// Composite index in the original register of qubit basis state `x`.
    pub fn original_index(&self, x: usize) -> usize {
        let m = self.sites.len();
        let bits = digits(x, &vec![2; m]);
        let mut levels = vec![0; self.original_dims.len()];
        for &(s, l) in &self.pinned {
            levels[s] = l;
        }
        for ((&s, &(a, b)), &bit) in self.sites.iter().zip(&self.kept_basis).zip(&bits) {
            levels[s] = if bit == 0 { a } else { b };
        }
        compose(&levels, &self.original_dims)
    }

    /// `weight * state` placed back into the full register, zero elsewhere.
    pub fn embed(&self) -> DMatrix<C64> {
        let dim: usize = self.original_dims.iter().product();
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        let k = self.state.dim();
        for x in 0..k {
            for y in 0..k {
                out[(self.original_index(x), self.original_index(y))] =
                    self.state.entry(x, y) * C64::new(self.weight, 0.0);
            }
        }
        out
    }
}

/// Projects `rho` onto the qubit span selected by the composite states `alpha` and `beta`.
pub fn qudit_to_qubit_map(rho: &DensityMatrix, alpha: usize, beta: usize) -> Result<MappedState> {
    let dims = rho.site_dims().to_vec();
    if alpha >= rho.dim() || beta >= rho.dim() {
        return Err(Error::Shape(format!(
            "basis states ({alpha}, {beta}) outside dimension {}",
            rho.dim()
        )));
    }
    let la = digits(alpha, &dims);
    let lb = digits(beta, &dims);
    let mut sites = Vec::new();
    let mut kept_basis = Vec::new();
    let mut pinned = Vec::new();
    for s in 0..dims.len() {
        if la[s] == lb[s] {
            pinned.push((s, la[s]));
        } else {
            sites.push(s);
            kept_basis.push((la[s], lb[s]));
        }
    }
    if sites.is_empty() {
        return Err(Error::Domain("alpha and beta coincide".into()));
    }
    let mut mapped = MappedState {
        state: DensityMatrix::maximally_mixed(vec![2; sites.len()]),
        weight: 0.0,
        kept_basis,
        sites,
        pinned,
        original_dims: dims,
    };
    let k = 1usize << mapped.sites.len();
    let index: Vec<usize> = (0..k).map(|x| mapped.original_index(x)).collect();
    let block = DMatrix::from_fn(k, k, |x, y| rho.entry(index[x], index[y]));
    let weight: f64 = (0..k).map(|x| block[(x, x)].re).sum();
    if weight < WEIGHT_TOLERANCE {
        return Err(Error::ZeroWeight(weight));
    }
    mapped.state = DensityMatrix::new(block / C64::new(weight, 0.0), vec![2; mapped.sites.len()])?;
    mapped.weight = weight;
    Ok(mapped)
}
