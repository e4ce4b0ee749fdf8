use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::C64;
use crate::{Error, Result};

/// Orthonormality/completeness tolerance for measurement bases.
pub const BASIS_TOLERANCE: f64 = 1e-10;

/// Rank-1 projective measurement on one site. The projectors are
/// `|u_k><u_k|` for the columns `u_k` of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteBasis {
    unitary: DMatrix<C64>,
}

impl SiteBasis {
    /// Builds a basis from a unitary whose columns are the measurement vectors.
    pub fn new(unitary: DMatrix<C64>) -> Result<Self> {
        if unitary.nrows() != unitary.ncols() || unitary.nrows() == 0 {
            return Err(Error::Basis(format!(
                "basis matrix is {}x{}",
                unitary.nrows(),
                unitary.ncols()
            )));
        }
        let d = unitary.nrows();
        let gram = unitary.adjoint() * &unitary;
        let defect = (gram - DMatrix::<C64>::identity(d, d)).camax();
        if defect > BASIS_TOLERANCE {
            return Err(Error::Basis(format!(
                "basis vectors are not orthonormal and complete (defect {defect:e})"
            )));
        }
        Ok(Self { unitary })
    }

    pub fn computational(d: usize) -> Self {
        Self {
            unitary: DMatrix::identity(d, d),
        }
    }

    /// Number of real parameters of the angle parameterisation for dimension `d`.
    pub fn param_count(d: usize) -> Result<usize> {
        match d {
            2 => Ok(2),
            3 => Ok(8),
            _ => Err(Error::Domain(format!(
                "basis parameterisation is available for qubits and qutrits, not d={d}"
            ))),
        }
    }

    /// Natural range of each angle, used to lay out the coarse search grid.
    pub fn param_ranges(d: usize) -> Result<Vec<f64>> {
        match d {
            2 => Ok(vec![PI, 2.0 * PI]),
            3 => Ok(vec![PI, 2.0 * PI, PI, 2.0 * PI, PI, 2.0 * PI, 2.0 * PI, 2.0 * PI]),
            _ => Err(Error::Domain(format!("no basis parameterisation for d={d}"))),
        }
    }

    /// Qubit: polar and azimuthal angle of the first basis vector.
    /// Qutrit: `diag(1, e^{i a}, e^{i b}) R01(t1, f1) R02(t2, f2) R12(t3, f3)` with
    /// parameters `[t1, f1, t2, f2, t3, f3, a, b]`.
    pub fn from_angles(d: usize, params: &[f64]) -> Result<Self> {
        let expected = Self::param_count(d)?;
        if params.len() != expected {
            return Err(Error::Domain(format!(
                "expected {expected} angles for d={d}, got {}",
                params.len()
            )));
        }
        let unitary = match d {
            2 => qubit_unitary(params[0], params[1]),
            _ => {
                let r01 = givens(3, 0, 1, params[0], params[1]);
                let r02 = givens(3, 0, 2, params[2], params[3]);
                let r12 = givens(3, 1, 2, params[4], params[5]);
                let mut phases = DMatrix::<C64>::identity(3, 3);
                phases[(1, 1)] = C64::from_polar(1.0, params[6]);
                phases[(2, 2)] = C64::from_polar(1.0, params[7]);
                phases * r01 * r02 * r12
            }
        };
        Ok(Self { unitary })
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn unitary(&self) -> &DMatrix<C64> {
        &self.unitary
    }

    /// Projector onto outcome `k`.
    pub fn projector(&self, k: usize) -> DMatrix<C64> {
        let v = self.unitary.column(k);
        v * v.adjoint()
    }
}

fn qubit_unitary(theta: f64, phi: f64) -> DMatrix<C64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    DMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)])
}

fn givens(d: usize, i: usize, j: usize, theta: f64, phi: f64) -> DMatrix<C64> {
    let mut g = DMatrix::<C64>::identity(d, d);
    let (c, s) = (theta.cos(), theta.sin());
    let e = C64::from_polar(1.0, phi);
    g[(i, i)] = C64::new(c, 0.0);
    g[(j, j)] = C64::new(c, 0.0);
    g[(i, j)] = -e.conj() * s;
    g[(j, i)] = e * s;
    g
}

/// Product measurement: one [`SiteBasis`] per site, in site order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    sites: Vec<SiteBasis>,
}

impl MeasurementBasis {
    pub fn new(sites: Vec<SiteBasis>) -> Self {
        Self { sites }
    }

    pub fn computational(site_dims: &[usize]) -> Self {
        Self {
            sites: site_dims.iter().map(|&d| SiteBasis::computational(d)).collect(),
        }
    }

    pub fn sites(&self) -> &[SiteBasis] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(SiteBasis::dim).collect()
    }

    pub(crate) fn check_fits(&self, site_dims: &[usize]) -> Result<()> {
        if self.dims() != site_dims {
            return Err(Error::Basis(format!(
                "basis dimensions {:?} do not match sites {:?}",
                self.dims(),
                site_dims
            )));
        }
        Ok(())
    }

    /// Kronecker product of the per-site unitaries; column `k` is the product
    /// basis vector of outcome string `k`.
    pub fn product_unitary(&self) -> DMatrix<C64> {
        self.sites
            .iter()
            .fold(DMatrix::<C64>::identity(1, 1), |acc, s| acc.kronecker(s.unitary()))
    }
}
