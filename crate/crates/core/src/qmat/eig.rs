//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! The matrix is first split into the connected components of its off-diagonal
//! sparsity pattern. Each component is a principal block that can be
//! diagonalised on its own, which turns the swap-protocol states (diagonal plus a
//! handful of coherences) into a set of 1x1 and 2x2 problems.

use nalgebra::DMatrix;

use super::C64;
use crate::{Error, Result};

/// Stopping threshold on the Frobenius norm of the off-diagonal part.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
/// Maximum entrywise deviation from Hermiticity accepted on input.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl EigenSystem {
    /// Rebuilds `sum_k values[k] |v_k><v_k|`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let n = self.values.len();
        let mut out = DMatrix::<C64>::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            for j in 0..n {
                let vj = v[j].conj() * lambda;
                if vj == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..n {
                    out[(i, j)] += v[i] * vj;
                }
            }
        }
        out
    }
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &DMatrix<C64>) -> Result<EigenSystem> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::Shape(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    Ok(eig_unchecked(m))
}

/// Eigendecomposition without the Hermiticity check. Only the upper triangle
/// and the real part of the diagonal are read.
pub(crate) fn eig_unchecked(m: &DMatrix<C64>) -> EigenSystem {
    let n = m.nrows();
    let mut values = vec![0.0; n];
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    let mut column = 0;
    let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(n);

    for block in components(m) {
        if block.len() == 1 {
            let i = block[0];
            values[column] = m[(i, i)].re;
            vectors[(i, column)] = C64::new(1.0, 0.0);
            pairs.push((values[column], column));
            column += 1;
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| {
            let (i, j) = (block[r], block[c]);
            if i <= j {
                m[(i, j)]
            } else {
                m[(j, i)].conj()
            }
        });
        let (vals, vecs) = jacobi(sub);
        for k in 0..block.len() {
            values[column] = vals[k];
            for (r, &i) in block.iter().enumerate() {
                vectors[(i, column)] = vecs[(r, k)];
            }
            pairs.push((vals[k], column));
            column += 1;
        }
    }

    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let sorted_values = pairs.iter().map(|p| p.0).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |i, k| vectors[(i, pairs[k].1)]);
    EigenSystem {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// Eigenvalues in ascending order, without the eigenvectors.
pub(crate) fn eigvals_unchecked(m: &DMatrix<C64>) -> Vec<f64> {
    let mut values = Vec::with_capacity(m.nrows());
    for block in components(m) {
        if block.len() == 1 {
            values.push(m[(block[0], block[0])].re);
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| {
            let (i, j) = (block[r], block[c]);
            if i <= j {
                m[(i, j)]
            } else {
                m[(j, i)].conj()
            }
        });
        values.extend(jacobi(sub).0);
    }
    values.sort_by(f64::total_cmp);
    values
}

/// Connected components of the graph whose edges are the nonzero off-diagonal
/// entries. Each component is returned as a sorted index list.
fn components(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..j {
            let z = m[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

fn off_diagonal_norm(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn jacobi(mut a: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut v = DMatrix::<C64>::identity(n, n);
    let scale = a.norm().max(1.0);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TOLERANCE * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

/// Annihilates `a[p][q]` with the unitary `W = P J`, where `P` removes the
/// phase of the pivot and `J` is the real Jacobi rotation.
fn rotate(a: &mut DMatrix<C64>, v: &mut DMatrix<C64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g <= f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();
    // W columns: W[:,p] = (c, -s e^{-i phi}), W[:,q] = (s, c e^{-i phi}).
    let w_qp = -ph_conj * s;
    let w_qq = ph_conj * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * w_qp;
        a[(k, q)] = akp * s + akq * w_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * w_qp.conj();
        a[(q, k)] = apk * s + aqk * w_qq.conj();
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * w_qp;
        v[(k, q)] = vkp * s + vkq * w_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        let g = DMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        (&g + g.adjoint()) * c(0.5, 0.0)
    }

    #[test]
    fn diagonal_input() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3, 0.0), c(0.7, 0.0)]));
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.values, vec![0.3, 0.7]);
        assert_eq!(e.vectors, DMatrix::identity(2, 2));
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_has_complex_vectors() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.reconstruct() - &m).norm() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(matches!(hermitian_eig(&m), Err(Error::Shape(_))));
        let r = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(hermitian_eig(&r), Err(Error::Shape(_))));
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 8, 17, 32] {
            let m = random_hermitian(n, &mut rng);
            let e = hermitian_eig(&m).unwrap();
            let rec = e.reconstruct();
            for (x, y) in rec.iter().zip(m.iter()) {
                assert!((x - y).norm() < 1e-9, "n={n}");
            }
            let gram = e.vectors.adjoint() * &e.vectors;
            assert!((gram - DMatrix::<C64>::identity(n, n)).norm() < 1e-10);
            let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
            assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn block_structure_is_respected() {
        // diag + a single coherence between 0 and 3
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 0)] = c(0.4, 0.0);
        m[(1, 1)] = c(0.1, 0.0);
        m[(2, 2)] = c(0.2, 0.0);
        m[(3, 3)] = c(0.3, 0.0);
        m[(0, 3)] = c(0.0, 0.05);
        m[(3, 0)] = c(0.0, -0.05);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.reconstruct() - &m).norm() < 1e-13);
        assert!((e.values[0] - 0.1).abs() < 1e-15);
        assert_eq!(eigvals_unchecked(&m), e.values);
    }

    #[test]
    fn values_only_path_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 4, 9, 16] {
            let m = random_hermitian(n, &mut rng);
            assert_eq!(eigvals_unchecked(&m), eig_unchecked(&m).values);
        }
    }
}
