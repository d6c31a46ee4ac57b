//! Exact spectra at desk scale: dense diagonalization for small systems and a
//! Lanczos extremal solve (full reorthogonalization) above that.

use crate::pauli::PauliSum;
use crate::statevec::{self, apply_sum, inner, norm, normalize, qubit_bit};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use thiserror::Error;

/// Largest system accepted by [`to_matrix`] and [`ground_energy`].
pub const MAX_EIGEN_QUBITS: usize = 16;
/// Dense diagonalization is used up to this size, Lanczos above it.
pub const DENSE_QUBIT_LIMIT: usize = 10;

const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("{0} qubits exceeds the exact-diagonalization guard of {MAX_EIGEN_QUBITS}")]
    TooManyQubits(usize),
    #[error("eigensolver failed to converge after {0} iterations")]
    NoConvergence(usize),
}

/// Sparse Hermitian operator in compressed-row form.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub dimension: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dimension];
        for row in 0..self.dimension {
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.values[idx] * v[self.cols[idx]];
            }
            out[row] = acc;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dimension, self.dimension, Complex64::new(0.0, 0.0));
        for row in 0..self.dimension {
            for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                m[(row, self.cols[idx])] += self.values[idx];
            }
        }
        m
    }
}

/// Build the sparse matrix `Σ c_a · Kron(word_a)`; each word contributes one
/// entry per row.
pub fn to_matrix(h: &PauliSum) -> Result<OperatorMatrix, EigenError> {
    let n = h.n_qubits();
    if n > MAX_EIGEN_QUBITS {
        return Err(EigenError::TooManyQubits(n));
    }
    let dim = 1usize << n;
    // Precompute per-word index masks and phases.
    struct Entry {
        flip: u64,
        zmask: u64,
        coeff: Complex64,
    }
    let mut entries = Vec::with_capacity(h.len());
    for (w, c) in h.iter() {
        let mut flip = 0u64;
        let mut zmask = 0u64;
        for q in 0..n {
            let bit = 1u64 << qubit_bit(n, q);
            if (w.x_mask() >> q) & 1 == 1 {
                flip |= bit;
            }
            if (w.z_mask() >> q) & 1 == 1 {
                zmask |= bit;
            }
        }
        let y_count = (w.x_mask() & w.z_mask()).count_ones();
        entries.push(Entry {
            flip,
            zmask,
            coeff: *c * Complex64::new(0.0, 1.0).powu(y_count),
        });
    }
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    let mut scratch: Vec<(usize, Complex64)> = Vec::with_capacity(entries.len());
    row_ptr.push(0);
    for row in 0..dim as u64 {
        scratch.clear();
        for e in &entries {
            let col = row ^ e.flip;
            // M[row][col] = coeff * (-1)^{|zmask & col|}
            let sign = if (e.zmask & col).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            scratch.push((col as usize, e.coeff * sign));
        }
        scratch.sort_by_key(|(c, _)| *c);
        let mut idx = 0;
        while idx < scratch.len() {
            let col = scratch[idx].0;
            let mut acc = Complex64::new(0.0, 0.0);
            while idx < scratch.len() && scratch[idx].0 == col {
                acc += scratch[idx].1;
                idx += 1;
            }
            if acc.norm() > 0.0 {
                cols.push(col);
                values.push(acc);
            }
        }
        row_ptr.push(cols.len());
    }
    Ok(OperatorMatrix {
        dimension: dim,
        row_ptr,
        cols,
        values,
    })
}

/// Smallest eigenvalue and a corresponding eigenvector.
pub fn ground_state(h: &PauliSum) -> Result<(f64, Vec<Complex64>), EigenError> {
    let n = h.n_qubits();
    if n > MAX_EIGEN_QUBITS {
        return Err(EigenError::TooManyQubits(n));
    }
    if n <= DENSE_QUBIT_LIMIT {
        dense_ground(h)
    } else {
        lanczos_ground(h)
    }
}

/// Smallest eigenvalue only.
pub fn ground_energy(h: &PauliSum) -> Result<f64, EigenError> {
    Ok(ground_state(h)?.0)
}

/// Full sorted spectrum (dense sizes only).
pub fn spectrum(h: &PauliSum) -> Result<Vec<f64>, EigenError> {
    let n = h.n_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(EigenError::TooManyQubits(n));
    }
    let m = to_matrix(h)?.to_dense();
    let m = hermitize(m);
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

fn dense_ground(h: &PauliSum) -> Result<(f64, Vec<Complex64>), EigenError> {
    let m = to_matrix(h)?.to_dense();
    let m = hermitize(m);
    let eig = nalgebra::SymmetricEigen::new(m);
    let (mut best_idx, mut best) = (0usize, f64::INFINITY);
    for (i, v) in eig.eigenvalues.iter().enumerate() {
        if *v < best {
            best = *v;
            best_idx = i;
        }
    }
    let vec: Vec<Complex64> = eig.eigenvectors.column(best_idx).iter().copied().collect();
    check_residual(h, best, &vec)?;
    Ok((best, vec))
}

fn check_residual(h: &PauliSum, energy: f64, v: &[Complex64]) -> Result<(), EigenError> {
    let hv = apply_sum(h, v);
    let res: f64 = hv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum::<f64>()
        .sqrt();
    // scale-aware bound: coefficients of desk-scale Hamiltonians are O(1..10^2)
    let scale = h.l1_norm().max(1.0);
    if res > RESIDUAL_TOLERANCE * scale {
        return Err(EigenError::NoConvergence(0));
    }
    Ok(())
}

/// Lanczos with full reorthogonalization; Krylov dimension min(200, 2^n).
fn lanczos_ground(h: &PauliSum) -> Result<(f64, Vec<Complex64>), EigenError> {
    let dim = 1usize << h.n_qubits();
    let max_krylov = 200.min(dim);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1a2b3c4d);
    let mut v0: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    normalize(&mut v0);

    let mut basis: Vec<Vec<Complex64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let scale = h.l1_norm().max(1.0);
    let mut converged_at = None;

    for k in 0..max_krylov {
        let vk = basis[k].clone();
        let mut w = apply_sum(h, &vk);
        let alpha = inner(&vk, &w).re;
        alphas.push(alpha);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = inner(b, &w);
                for (wj, bj) in w.iter_mut().zip(b) {
                    *wj -= proj * bj;
                }
            }
        }
        let beta = norm(&w);

        // Ritz residual bound: beta times the last component of the Ritz vector
        let (_, ritz_vec) = smallest_tridiag_pair(&alphas, &betas);
        let residual_bound = beta * ritz_vec.last().copied().unwrap_or(1.0).abs();
        if residual_bound < 1e-11 * scale || beta < 1e-13 {
            converged_at = Some(k + 1);
            break;
        }
        if k + 1 < max_krylov {
            betas.push(beta);
            let mut next = w;
            for x in next.iter_mut() {
                *x /= beta;
            }
            basis.push(next);
        }
    }

    let steps = alphas.len();
    let (ritz_value, ritz_vec) = smallest_tridiag_pair(&alphas, &betas);
    let mut ground = vec![Complex64::new(0.0, 0.0); dim];
    for (c, b) in ritz_vec.iter().zip(&basis) {
        for (g, bj) in ground.iter_mut().zip(b) {
            *g += Complex64::new(*c, 0.0) * bj;
        }
    }
    normalize(&mut ground);
    if check_residual(h, ritz_value, &ground).is_err() {
        return Err(EigenError::NoConvergence(converged_at.unwrap_or(steps)));
    }
    Ok((ritz_value, ground))
}

fn tridiag_matrix(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k && i < betas.len() {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    t
}

fn smallest_tridiag_pair(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let eig = nalgebra::SymmetricEigen::new(tridiag_matrix(alphas, betas));
    let (mut idx, mut best) = (0usize, f64::INFINITY);
    for (i, v) in eig.eigenvalues.iter().enumerate() {
        if *v < best {
            best = *v;
            idx = i;
        }
    }
    (best, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// Variational sanity probe: `⟨v|H|v⟩` for a normalized random state.
pub fn rayleigh_quotient(h: &PauliSum, seed: u64) -> f64 {
    let dim = 1usize << h.n_qubits();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    normalize(&mut v);
    statevec::expectation_sum(h, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{PauliSum, PauliTerm, PauliWord};

    fn sum(pairs: &[(&str, f64)]) -> PauliSum {
        PauliSum::from_strings(pairs).unwrap()
    }

    #[test]
    fn single_qubit_z() {
        let h = sum(&[("Z", 1.0)]);
        let m = to_matrix(&h).unwrap().to_dense();
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(1, 1)].re, -1.0);
        assert!((ground_energy(&h).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_identity() {
        let h = sum(&[("II", -2.475)]);
        assert!((ground_energy(&h).unwrap() + 2.475).abs() < 1e-12);
    }

    #[test]
    fn two_level_closed_form() {
        // aI + bX + cZ + dY → a - sqrt(b² + c² + d²)
        let h = sum(&[("I", -1.827), ("X", -0.414), ("Z", -0.292), ("Y", 0.648)]);
        let expect = -1.827 - (0.414f64.powi(2) + 0.292f64.powi(2) + 0.648f64.powi(2)).sqrt();
        assert!((ground_energy(&h).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 6;
        let alphabet = ['I', 'X', 'Y', 'Z'];
        let mut h = PauliSum::new(n);
        for _ in 0..30 {
            let s: String = (0..n).map(|_| alphabet[rng.gen_range(0..4)]).collect();
            h.add_term(PauliTerm::real(
                PauliWord::parse(&s).unwrap(),
                rng.gen::<f64>() - 0.5,
            ))
            .unwrap();
        }
        let dense = dense_ground(&h).unwrap().0;
        let lanczos = lanczos_ground(&h).unwrap().0;
        assert!((dense - lanczos).abs() < 1e-8, "{dense} vs {lanczos}");
    }

    #[test]
    fn variational_bound_holds() {
        let h = sum(&[("ZZ", 1.0), ("XI", 0.3), ("IY", -0.4)]);
        let e0 = ground_energy(&h).unwrap();
        for seed in 0..32 {
            assert!(rayleigh_quotient(&h, seed) >= e0 - 1e-10);
        }
    }

    #[test]
    fn matrix_roundtrip_recovers_coefficients() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let n = 3;
        let alphabet = ['I', 'X', 'Y', 'Z'];
        let mut h = PauliSum::new(n);
        for _ in 0..10 {
            let s: String = (0..n).map(|_| alphabet[rng.gen_range(0..4)]).collect();
            h.add_term(PauliTerm::real(
                PauliWord::parse(&s).unwrap(),
                rng.gen::<f64>() - 0.5,
            ))
            .unwrap();
        }
        let m = to_matrix(&h).unwrap().to_dense();
        // c_w = Tr(W · M) / 2^n, extracted per word
        let dim = 1usize << n;
        for (w, c) in h.iter() {
            let wm = to_matrix(&PauliSum::from_terms(n, [PauliTerm::real(*w, 1.0)]).unwrap())
                .unwrap()
                .to_dense();
            let mut trace = num_complex::Complex64::new(0.0, 0.0);
            for i in 0..dim {
                for k in 0..dim {
                    trace += wm[(i, k)] * m[(k, i)];
                }
            }
            let recovered = trace / dim as f64;
            assert!((recovered - c).norm() < 1e-12, "{w}");
        }
    }

    #[test]
    fn guard_rejects_large_systems() {
        let h = PauliSum::new(17);
        assert!(matches!(
            ground_energy(&h),
            Err(EigenError::TooManyQubits(17))
        ));
    }
}
