//! Commutator witness of nonclassical correlations.

use nalgebra::DMatrix;

use crate::qmat::{digits, partial_trace_sparse, DensityMatrix, C64};

/// Norms above this certify that the state is not classical in any local basis.
pub const WITNESS_THRESHOLD: f64 = 1e-10;

/// `C = [rho, rho~]` with `rho~` the product of the single-site marginals.
#[derive(Debug, Clone)]
pub struct Witness {
    pub commutator: DMatrix<C64>,
    /// Frobenius norm of `commutator`.
    pub norm: f64,
}

impl Witness {
    pub fn certifies_discord(&self) -> bool {
        self.norm > WITNESS_THRESHOLD
    }
}

pub fn discord_witness(rho: &DensityMatrix) -> Witness {
    let dims = rho.site_dims();
    let nz = rho.nonzeros();
    let marginals: Vec<DMatrix<C64>> = (0..dims.len())
        .map(|s| {
            partial_trace_sparse(&nz, dims, &[s])
                .expect("single site is a valid selection")
                .into_matrix()
        })
        .collect();
    let diagonal_marginals = marginals.iter().all(|m| {
        (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
    });
    let dim = rho.dim();
    let commutator = if diagonal_marginals {
        let tilde: Vec<f64> = (0..dim)
            .map(|i| {
                digits(i, dims)
                    .iter()
                    .zip(&marginals)
                    .map(|(&k, m)| m[(k, k)].re)
                    .product()
            })
            .collect();
        let mut c = DMatrix::<C64>::zeros(dim, dim);
        for &(i, j, z) in &nz {
            c[(i, j)] = z * (tilde[j] - tilde[i]);
        }
        c
    } else {
        let tilde = marginals
            .iter()
            .fold(DMatrix::<C64>::identity(1, 1), |acc, m| acc.kronecker(m));
        rho.matrix() * &tilde - &tilde * rho.matrix()
    };
    let norm = commutator.norm();
    Witness { commutator, norm }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::{product_state, BatteryEnsemble};
    use crate::protocol::{direct_swap, evolve_step};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn diagonal_states_commute() {
        let rho = DensityMatrix::from_diagonal(&[0.1, 0.2, 0.3, 0.4], vec![2, 2]).unwrap();
        let w = discord_witness(&rho);
        assert_eq!(w.norm, 0.0);
        assert!(!w.certifies_discord());
    }

    #[test]
    fn two_qubit_quarter_swap_is_invisible() {
        let e = BatteryEnsemble::qubits(2, 0.3, [0.0, 1.0]).unwrap();
        let rho = evolve_step(&product_state(&e), &direct_swap(&e), FRAC_PI_4).unwrap();
        assert!(discord_witness(&rho).norm < 1e-12);
        let off = evolve_step(&product_state(&e), &direct_swap(&e), 0.3).unwrap();
        assert!(discord_witness(&off).certifies_discord());
    }

    #[test]
    fn swap_element_formula() {
        let e = BatteryEnsemble::new(2, vec![0.224, 0.322, 0.454], vec![0.0, 0.579, 1.0]).unwrap();
        let step = direct_swap(&e);
        let rho = evolve_step(&product_state(&e), &step, 0.7).unwrap();
        let w = discord_witness(&rho);
        let tilde = {
            let r0 = crate::qmat::partial_trace(&rho, &[0]).unwrap();
            let r1 = crate::qmat::partial_trace(&rho, &[1]).unwrap();
            r0.tensor(&r1)
        };
        let (a, b) = (step.alpha(), step.beta());
        let expected = rho.entry(a, b) * (tilde.entry(b, b) - tilde.entry(a, a));
        assert!((w.commutator[(a, b)] - expected).norm() < 1e-14);
        // written with <b|rho|a> the element differs only by conjugation of the coherence
        let conjugated = rho.entry(b, a) * (tilde.entry(b, b) - tilde.entry(a, a));
        assert!((w.commutator[(a, b)].norm() - conjugated.norm()).abs() < 1e-14);
        assert!(expected.norm() > 1e-3);
        assert!(w.norm > 1e-6);
    }

    #[test]
    fn dense_path_matches_direct_commutator() {
        let amps = [C64::new(0.6, 0.0), C64::new(0.0, 0.3), C64::new(0.5, 0.1), C64::new(0.2, -0.4)];
        let rho = DensityMatrix::pure(&amps, vec![2, 2]).unwrap();
        let tilde = crate::qmat::partial_trace(&rho, &[0])
            .unwrap()
            .tensor(&crate::qmat::partial_trace(&rho, &[1]).unwrap());
        let direct = rho.matrix() * tilde.matrix() - tilde.matrix() * rho.matrix();
        let w = discord_witness(&rho);
        assert!((w.commutator - &direct).norm() < 1e-14);
    }
}
