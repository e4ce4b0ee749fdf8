//! Symmetric (two-party) and global (multi-party) discord.
//!
//! For a product measurement `Pi` the relative entropy to the dephased state is
//! `S(rho || Pi(rho)) = H(diag(V^dagger rho V)) - S(rho)`, so each objective
//! evaluation only needs the outcome distributions of the full state and of
//! every single-site marginal.

use nalgebra::DMatrix;

use super::{clamp_bits, minimize, Ansatz, BasisFamily, MinimizerOptions};
use crate::qmat::{partial_trace_sparse, shannon_bits, von_neumann_entropy, DensityMatrix, MeasurementBasis, C64};
use crate::{Error, Result};

/// Minimised global discord and the product basis reaching it.
#[derive(Debug, Clone)]
pub struct GlobalDiscord {
    pub value: f64,
    pub basis: MeasurementBasis,
}

struct Objective {
    dims: Vec<usize>,
    strides: Vec<usize>,
    populations: Vec<f64>,
    /// Upper-triangle coherences `(i, j, rho_ij)` with `i < j`.
    coherences: Vec<(usize, usize, C64)>,
    /// Per coherence, the site digits of `i` and `j`.
    coherence_digits: Vec<(Vec<usize>, Vec<usize>)>,
    dense: Option<DMatrix<C64>>,
    marginals: Vec<DMatrix<C64>>,
    constant: f64,
}

impl Objective {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let dims = rho.site_dims().to_vec();
        let n = dims.len();
        let mut strides = vec![1; n];
        for s in (0..n.saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * dims[s + 1];
        }
        let nz = rho.nonzeros();
        let coherences: Vec<(usize, usize, C64)> = nz.iter().copied().filter(|&(i, j, _)| i < j).collect();
        let dim = rho.dim();
        let max_d = dims.iter().copied().max().unwrap_or(1);
        let dense = (coherences.len() > dim * max_d).then(|| rho.matrix().clone());
        let coherence_digits = if dense.is_some() {
            Vec::new()
        } else {
            coherences
                .iter()
                .map(|&(i, j, _)| (crate::qmat::digits(i, &dims), crate::qmat::digits(j, &dims)))
                .collect()
        };
        let mut marginals = Vec::with_capacity(n);
        let mut marginal_entropy = 0.0;
        for s in 0..n {
            let m = partial_trace_sparse(&nz, &dims, &[s])?;
            marginal_entropy += von_neumann_entropy(&m);
            marginals.push(m.into_matrix());
        }
        Ok(Self {
            dims,
            strides,
            populations: rho.diagonal(),
            coherences,
            coherence_digits,
            dense,
            marginals,
            constant: marginal_entropy - von_neumann_entropy(rho),
        })
    }

    fn outcome_distribution(&self, sites: &[DMatrix<C64>]) -> Vec<f64> {
        if let Some(m) = &self.dense {
            let v = sites
                .iter()
                .fold(DMatrix::<C64>::identity(1, 1), |acc, u| acc.kronecker(u));
            let mv = m * &v;
            return (0..v.ncols())
                .map(|k| {
                    let mut acc = 0.0;
                    for i in 0..v.nrows() {
                        acc += (v[(i, k)].conj() * mv[(i, k)]).re;
                    }
                    acc
                })
                .collect();
        }

        // populations through the per-site transition matrices |u_s[i, k]|^2
        let mut q = self.populations.clone();
        let mut scratch = vec![0.0; q.len()];
        for (s, u) in sites.iter().enumerate() {
            let d = self.dims[s];
            let stride = self.strides[s];
            let block = stride * d;
            scratch.iter_mut().for_each(|x| *x = 0.0);
            for base in (0..q.len()).step_by(block) {
                for i in 0..d {
                    for k in 0..d {
                        let w = u[(i, k)].norm_sqr();
                        if w == 0.0 {
                            continue;
                        }
                        for r in 0..stride {
                            scratch[base + k * stride + r] += w * q[base + i * stride + r];
                        }
                    }
                }
            }
            std::mem::swap(&mut q, &mut scratch);
        }

        // each coherence adds 2 Re(conj(V_ik) rho_ij V_jk); the weights factor over sites
        let mut w = Vec::with_capacity(q.len());
        let mut next = Vec::with_capacity(q.len());
        for ((_, _, z), (di, dj)) in self.coherences.iter().zip(&self.coherence_digits) {
            w.clear();
            w.push(*z);
            for (s, u) in sites.iter().enumerate() {
                let d = self.dims[s];
                next.clear();
                for &x in &w {
                    for k in 0..d {
                        next.push(x * u[(di[s], k)].conj() * u[(dj[s], k)]);
                    }
                }
                std::mem::swap(&mut w, &mut next);
            }
            for (slot, x) in q.iter_mut().zip(&w) {
                *slot += 2.0 * x.re;
            }
        }
        q
    }

    fn value(&self, sites: &[DMatrix<C64>]) -> f64 {
        let mut total = shannon_bits(self.outcome_distribution(sites));
        for (m, u) in self.marginals.iter().zip(sites) {
            let d = m.nrows();
            let rotated = u.adjoint() * m * u;
            total -= shannon_bits((0..d).map(|i| rotated[(i, i)].re));
        }
        total + self.constant
    }
}

/// Global discord: the product measurement minimising
/// `S(rho || Pi(rho)) - sum_j S(rho_j || Pi_j(rho_j))`.
pub fn global_discord(rho: &DensityMatrix, ansatz: Ansatz, opts: &MinimizerOptions) -> Result<GlobalDiscord> {
    let family = BasisFamily::new(rho.site_dims(), ansatz)?;
    let objective = Objective::new(rho)?;
    let eval = |x: &[f64]| {
        let sites: Vec<DMatrix<C64>> = family.sites(x).into_iter().map(|b| b.unitary().clone()).collect();
        objective.value(&sites)
    };
    let best = minimize(eval, &family.ranges(), opts)?;
    Ok(GlobalDiscord {
        value: clamp_bits(best.value),
        basis: family.basis(&best.point),
    })
}

/// Two-party global discord with bilateral measurements.
pub fn symmetric_discord(rho: &DensityMatrix, opts: &MinimizerOptions) -> Result<GlobalDiscord> {
    if rho.n_sites() != 2 {
        return Err(Error::Shape(format!(
            "symmetric discord needs two sites, got {}",
            rho.n_sites()
        )));
    }
    global_discord(rho, Ansatz::PerSite, opts)
}

fn xlog(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Closed-form global discord of the `n`-qubit direct-swap state at a quarter
/// period, evaluated in the computational basis.
pub fn analytic_gd_max(p0: f64, n: usize) -> f64 {
    let a = p0.powi(n as i32);
    let b = (1.0 - p0).powi(n as i32);
    let s = a + b;
    let value = xlog(a) + xlog(b) - if s > 0.0 { s * (0.5 * s).log2() } else { 0.0 };
    clamp_bits(value)
}
