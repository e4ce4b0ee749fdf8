//! Dense complex density-matrix kernel.
//!
//! Site 0 is the most significant digit of a composite index: for site dimensions
//! `[d0, d1, ..., d_{n-1}]` the basis state `|k0 k1 ... k_{n-1}>` sits at index
//! `((k0 * d1 + k1) * d2 + k2) ...`, which is the ordering produced by the
//! Kronecker product `A0 ⊗ A1 ⊗ ...`.

mod basis;
mod eig;

pub use basis::{MeasurementBasis, SiteBasis, BASIS_TOLERANCE};
pub use eig::{hermitian_eig, hermiticity_defect, EigenSystem, HERMITIAN_TOLERANCE, OFF_DIAGONAL_TOLERANCE};
pub(crate) use eig::{eig_unchecked, eigvals_unchecked};

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Tolerance on the trace of a density matrix.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Smallest eigenvalue accepted for a positive semidefinite state; eigenvalues in
/// `[-PSD_TOLERANCE, 0)` are treated as round-off and clamped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Eigenvalue threshold of the support test in [`relative_entropy`].
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Decomposes a composite index into per-site levels.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits`].
pub fn compose(levels: &[usize], dims: &[usize]) -> usize {
    levels.iter().zip(dims).fold(0, |acc, (&k, &d)| acc * d + k)
}

/// A Hermitian, unit-trace, positive semidefinite matrix over a register of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
    site_dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates and stores a density matrix. The stored matrix is the exact
    /// Hermitian part of the input, so `entry(i, j) == entry(j, i).conj()`.
    pub fn new(matrix: DMatrix<C64>, site_dims: Vec<usize>) -> Result<Self> {
        check_layout(&matrix, &site_dims)?;
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::Shape(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        let matrix = hermitian_part(matrix);
        let rho = Self { matrix, site_dims };
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::Domain(format!("trace {trace} differs from 1")));
        }
        let min = eigvals_unchecked(&rho.matrix).first().copied().unwrap_or(0.0);
        if min < -PSD_TOLERANCE {
            return Err(Error::Domain(format!("state is not positive semidefinite (eigenvalue {min:e})")));
        }
        Ok(rho)
    }

    /// Wraps a matrix produced by a validity-preserving operation.
    pub(crate) fn from_parts(matrix: DMatrix<C64>, site_dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), site_dims.iter().product::<usize>());
        Self { matrix, site_dims }
    }

    /// Diagonal state with the given populations.
    pub fn from_diagonal(populations: &[f64], site_dims: Vec<usize>) -> Result<Self> {
        let diag = DVector::from_iterator(populations.len(), populations.iter().map(|&p| C64::new(p, 0.0)));
        Self::new(DMatrix::from_diagonal(&diag), site_dims)
    }

    /// Projector onto a normalised pure state.
    pub fn pure(amplitudes: &[C64], site_dims: Vec<usize>) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let v = v / C64::new(norm, 0.0);
        Self::new(&v * v.adjoint(), site_dims)
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(site_dims: Vec<usize>) -> Self {
        let dim: usize = site_dims.iter().product();
        let m = DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Self::from_parts(m, site_dims)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_sites(&self) -> usize {
        self.site_dims.len()
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Real parts of the diagonal (the populations in the computational basis).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Largest off-diagonal magnitude.
    pub fn max_coherence(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..j {
                worst = worst.max(self.matrix[(i, j)].norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.max_coherence() <= tol
    }

    pub fn eigen(&self) -> EigenSystem {
        eig_unchecked(&self.matrix)
    }

    /// Eigenvalues in ascending order, with round-off negatives clamped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        eigvals_unchecked(&self.matrix).into_iter().map(clamp_round_off).collect()
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::Shape(format!(
                "unitary is {}x{}, state has dimension {}",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        let m = u * &self.matrix * u.adjoint();
        Ok(Self::from_parts(hermitian_part(m), self.site_dims.clone()))
    }

    /// `self ⊗ other` with concatenated site lists.
    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        let mut dims = self.site_dims.clone();
        dims.extend_from_slice(&other.site_dims);
        Self::from_parts(tensor(&self.matrix, &other.matrix), dims)
    }

    /// Nonzero entries `(row, column, value)` in column-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let z = self.matrix[(i, j)];
                if z != ZERO {
                    out.push((i, j, z));
                }
            }
        }
        out
    }
}

fn check_layout(m: &DMatrix<C64>, site_dims: &[usize]) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    if site_dims.is_empty() || site_dims.contains(&0) {
        return Err(Error::Shape(format!("invalid site dimensions {site_dims:?}")));
    }
    let dim: usize = site_dims.iter().product();
    if dim != m.nrows() {
        return Err(Error::Shape(format!(
            "site dimensions {site_dims:?} multiply to {dim}, matrix has dimension {}",
            m.nrows()
        )));
    }
    Ok(())
}

pub(crate) fn hermitian_part(mut m: DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    m
}

pub(crate) fn clamp_round_off(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// Kronecker product.
pub fn tensor(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Index bookkeeping for splitting a register into kept and traced sites.
pub(crate) struct Split {
    pub kept_dims: Vec<usize>,
    pub kept_dim: usize,
    pub traced_dim: usize,
    /// For every composite index: (index within kept sites, index within traced sites).
    pub parts: Vec<(usize, usize)>,
    /// `full[kept * traced_dim + traced]` is the composite index.
    pub full: Vec<usize>,
}

impl Split {
    pub fn new(site_dims: &[usize], keep: &[usize]) -> Result<Self> {
        let n = site_dims.len();
        if keep.is_empty() {
            return Err(Error::Shape("empty set of kept sites".into()));
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() {
            return Err(Error::Shape(format!("duplicate site in {keep:?}")));
        }
        if let Some(&bad) = keep_sorted.iter().find(|&&s| s >= n) {
            return Err(Error::Shape(format!("site {bad} out of range for {n} sites")));
        }
        let traced: Vec<usize> = (0..n).filter(|s| keep_sorted.binary_search(s).is_err()).collect();
        let kept_dims: Vec<usize> = keep_sorted.iter().map(|&s| site_dims[s]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&s| site_dims[s]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced_dims.iter().product();
        let dim = kept_dim * traced_dim;
        let mut parts = Vec::with_capacity(dim);
        let mut full = vec![0; dim];
        let mut a_levels = vec![0; keep_sorted.len()];
        let mut t_levels = vec![0; traced.len()];
        for idx in 0..dim {
            let levels = digits(idx, site_dims);
            for (slot, &s) in a_levels.iter_mut().zip(&keep_sorted) {
                *slot = levels[s];
            }
            for (slot, &s) in t_levels.iter_mut().zip(&traced) {
                *slot = levels[s];
            }
            let a = compose(&a_levels, &kept_dims);
            let t = compose(&t_levels, &traced_dims);
            parts.push((a, t));
            full[a * traced_dim + t] = idx;
        }
        Ok(Self {
            kept_dims,
            kept_dim,
            traced_dim,
            parts,
            full,
        })
    }
}

/// Reduced state on the sites in `keep` (returned in ascending site order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let split = Split::new(rho.site_dims(), keep)?;
    let (ka, kt) = (split.kept_dim, split.traced_dim);
    let m = rho.matrix();
    let out = DMatrix::from_fn(ka, ka, |a, b| {
        let mut acc = ZERO;
        for t in 0..kt {
            acc += m[(split.full[a * kt + t], split.full[b * kt + t])];
        }
        acc
    });
    Ok(DensityMatrix::from_parts(out, split.kept_dims))
}

/// Partial trace computed from a list of nonzero entries; cheaper than
/// [`partial_trace`] for sparse states when many reductions are needed.
pub(crate) fn partial_trace_sparse(
    entries: &[(usize, usize, C64)],
    site_dims: &[usize],
    keep: &[usize],
) -> Result<DensityMatrix> {
    let split = Split::new(site_dims, keep)?;
    let mut out = DMatrix::<C64>::zeros(split.kept_dim, split.kept_dim);
    for &(i, j, z) in entries {
        let (a, t) = split.parts[i];
        let (b, u) = split.parts[j];
        if t == u {
            out[(a, b)] += z;
        }
    }
    Ok(DensityMatrix::from_parts(out, split.kept_dims))
}

/// Shannon entropy in bits of a probability list, with `0 log 0 = 0`.
pub fn shannon_bits(values: impl IntoIterator<Item = f64>) -> f64 {
    let s: f64 = values
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_bits(rho.spectrum())
}

/// Entropy in bits of a (possibly sub-normalised) Hermitian PSD matrix; the
/// unnormalised form `-sum λ log λ` is returned.
pub(crate) fn entropy_of_matrix(m: &DMatrix<C64>) -> f64 {
    eigvals_unchecked(m)
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// Quantum relative entropy `S(rho1 || rho2)` in bits; `f64::INFINITY` when the
/// support of `rho1` is not contained in that of `rho2`.
pub fn relative_entropy(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::Shape(format!(
            "relative entropy between dimensions {} and {}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    let e2 = rho2.eigen();
    let m1 = rho1.matrix();
    let mut cross = 0.0;
    for (k, &lambda) in e2.values.iter().enumerate() {
        let w = e2.vectors.column(k);
        let weight = (w.adjoint() * m1 * w)[(0, 0)].re;
        if lambda <= SUPPORT_TOLERANCE {
            if weight > SUPPORT_TOLERANCE {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * lambda.log2();
    }
    let value = -von_neumann_entropy(rho1) - cross;
    Ok(if value < 0.0 && value > -1e-12 { 0.0 } else { value })
}

/// Projective dephasing `sum_k Π_k rho Π_k` in a product basis covering every site.
pub fn dephase(rho: &DensityMatrix, basis: &MeasurementBasis) -> Result<DensityMatrix> {
    basis.check_fits(rho.site_dims())?;
    let v = basis.product_unitary();
    let rotated = v.adjoint() * rho.matrix() * &v;
    let n = rho.dim();
    let mut diag = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        diag[(i, i)] = C64::new(rotated[(i, i)].re, 0.0);
    }
    let out = &v * diag * v.adjoint();
    Ok(DensityMatrix::from_parts(hermitian_part(out), rho.site_dims().to_vec()))
}
