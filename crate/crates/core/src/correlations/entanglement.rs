//! Two-qubit entanglement of formation and the partial-transpose test.

use nalgebra::DMatrix;

use super::Bipartition;
use crate::qmat::{eigvals_unchecked, hermitian_part, shannon_bits, DensityMatrix, Split, C64};
use crate::{Error, Result};

/// Smallest partial-transpose eigenvalue still counted as nonnegative.
pub const PPT_TOLERANCE: f64 = 1e-10;

fn check_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.site_dims() != [2, 2] {
        return Err(Error::Shape(format!(
            "two-qubit state required, got site dimensions {:?}",
            rho.site_dims()
        )));
    }
    Ok(())
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`, the `l_i` being the
/// decreasing square-root eigenvalues of `sqrt(rho) rho~ sqrt(rho)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubits(rho)?;
    let e = rho.eigen();
    let root = {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            e.values.iter().map(|&x| C64::new(x.max(0.0).sqrt(), 0.0)),
        ));
        &e.vectors * d * e.vectors.adjoint()
    };
    // sigma_y ⊗ sigma_y is the antidiagonal (-1, 1, 1, -1)
    let mut yy = DMatrix::<C64>::zeros(4, 4);
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);
    let flipped = &yy * rho.matrix().conjugate() * &yy;
    let r = hermitian_part(&root * flipped * &root);
    let mut l: Vec<f64> = eigvals_unchecked(&r).into_iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Entanglement of formation in ebits.
pub fn eof_two_qubits(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    if c == 0.0 {
        return Ok(0.0);
    }
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(shannon_bits([x, 1.0 - x]))
}

/// Partial transpose over side B of `cut`, in the composite basis of `rho`.
pub fn partial_transpose(rho: &DensityMatrix, cut: &Bipartition) -> Result<DMatrix<C64>> {
    cut.check(rho.n_sites())?;
    let split = Split::new(rho.site_dims(), cut.side_a())?;
    let tb = split.traced_dim;
    let dim = rho.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for (i, j, z) in rho.nonzeros() {
        let (a, b) = split.parts[i];
        let (a2, b2) = split.parts[j];
        out[(split.full[a * tb + b2], split.full[a2 * tb + b])] = z;
    }
    Ok(out)
}

/// PPT test, exact for 2⊗2 and 2⊗3 cuts; a necessary condition only for 3⊗3.
pub fn ppt_separable(rho: &DensityMatrix, cut: &Bipartition) -> Result<bool> {
    cut.check(rho.n_sites())?;
    let dim_of = |sites: &[usize]| sites.iter().map(|&s| rho.site_dims()[s]).product::<usize>();
    let (da, db) = (dim_of(cut.side_a()), dim_of(cut.side_b()));
    if !matches!((da, db), (2, 2) | (2, 3) | (3, 2) | (3, 3)) {
        return Err(Error::Domain(format!(
            "partial-transpose test supports 2x2, 2x3 and 3x3 cuts, got {da}x{db}"
        )));
    }
    let pt = partial_transpose(rho, cut)?;
    let min = eigvals_unchecked(&pt).first().copied().unwrap_or(0.0);
    Ok(min >= -PPT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::{product_state, BatteryEnsemble};
    use crate::protocol::{direct_swap, evolve_step};
    use std::f64::consts::FRAC_PI_4;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn cut() -> Bipartition {
        Bipartition::new(vec![0], 2).unwrap()
    }

    #[test]
    fn examples() {
        let prod = DensityMatrix::from_diagonal(&[0.3, 0.7], vec![2])
            .unwrap()
            .tensor(&DensityMatrix::pure(&[c(1.0), c(1.0)], vec![2]).unwrap());
        assert!(eof_two_qubits(&prod).unwrap().abs() < 1e-9);
        assert!(ppt_separable(&prod, &cut()).unwrap());

        let bell = DensityMatrix::pure(&[c(1.0), c(0.0), c(0.0), c(1.0)], vec![2, 2]).unwrap();
        assert!((eof_two_qubits(&bell).unwrap() - 1.0).abs() < 1e-9);
        assert!(!ppt_separable(&bell, &cut()).unwrap());

        let diag = DensityMatrix::from_diagonal(&[0.1, 0.2, 0.3, 0.4], vec![2, 2]).unwrap();
        assert!(ppt_separable(&diag, &cut()).unwrap());
        assert!(matches!(eof_two_qubits(&DensityMatrix::maximally_mixed(vec![2, 3])), Err(Error::Shape(_))));
    }

    #[test]
    fn x_state_closed_form() {
        let e = BatteryEnsemble::qubits(2, 0.1, [0.0, 1.0]).unwrap();
        let rho = evolve_step(&product_state(&e), &direct_swap(&e), FRAC_PI_4).unwrap();
        let closed = 2.0 * (rho.entry(0, 3).norm() - (rho.entry(1, 1).re * rho.entry(2, 2).re).sqrt()).max(0.0);
        assert!((closed - 0.62).abs() < 1e-12);
        assert!((concurrence(&rho).unwrap() - closed).abs() < 1e-9);
        let x = 0.5 * (1.0 + (1.0 - closed * closed).sqrt());
        assert!((eof_two_qubits(&rho).unwrap() - shannon_bits([x, 1.0 - x])).abs() < 1e-9);
        assert!(!ppt_separable(&rho, &cut()).unwrap());
    }

    #[test]
    fn unsupported_cuts() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2, 2]);
        let c = Bipartition::new(vec![0], 3).unwrap();
        assert!(matches!(ppt_separable(&rho, &c), Err(Error::Domain(_))));
        let q = DensityMatrix::maximally_mixed(vec![3, 3]);
        assert!(ppt_separable(&q, &cut()).unwrap());
    }

    #[test]
    fn partial_transpose_of_bell_has_negative_eigenvalue() {
        let bell = DensityMatrix::pure(&[c(1.0), c(0.0), c(0.0), c(1.0)], vec![2, 2]).unwrap();
        let pt = partial_transpose(&bell, &cut()).unwrap();
        let vals = crate::qmat::hermitian_eig(&pt).unwrap().values;
        assert!((vals[0] + 0.5).abs() < 1e-12);
    }
}
