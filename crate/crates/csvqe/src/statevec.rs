//! Dense state vectors and the action of Pauli operators on them.
//!
//! Basis convention: qubit `j` corresponds to bit `n-1-j` of the basis index,
//! so qubit 0 (the leftmost string character) is the most significant bit.
//! This matches a Kronecker product taken left to right over the string form.

use crate::pauli::{PauliSum, PauliWord};
use num_complex::Complex64;

/// Bit position of `qubit` inside a basis index on `n` qubits.
#[inline]
pub fn qubit_bit(n: usize, qubit: usize) -> usize {
    n - 1 - qubit
}

/// Mask with the index bits of all qubits set in `qubit_mask`.
fn index_mask(n: usize, qubit_mask: u64) -> u64 {
    let mut out = 0u64;
    for q in 0..n {
        if (qubit_mask >> q) & 1 == 1 {
            out |= 1 << qubit_bit(n, q);
        }
    }
    out
}

/// Apply `coeff * word` to `state`, accumulating into `out`.
pub fn apply_word(word: &PauliWord, coeff: Complex64, state: &[Complex64], out: &mut [Complex64]) {
    let n = word.n_qubits();
    debug_assert_eq!(state.len(), 1 << n);
    let flip = index_mask(n, word.x_mask());
    let zmask = index_mask(n, word.z_mask());
    // each factor is i^{x z} X^x Z^z; collect the i's once
    let y_count = (word.x_mask() & word.z_mask()).count_ones();
    let global = Complex64::new(0.0, 1.0).powu(y_count) * coeff;
    for (b, amp) in state.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let sign = if ((b as u64 & zmask).count_ones()) % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        out[b as usize ^ flip as usize] += global * sign * amp;
    }
}

/// `H |ψ⟩` for a Pauli-sum Hamiltonian.
pub fn apply_sum(h: &PauliSum, state: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (w, c) in h.iter() {
        apply_word(w, *c, state, &mut out);
    }
    out
}

/// `⟨ψ| P |ψ⟩` for a single word.
pub fn expectation_word(word: &PauliWord, state: &[Complex64]) -> f64 {
    let mut applied = vec![Complex64::new(0.0, 0.0); state.len()];
    apply_word(word, Complex64::new(1.0, 0.0), state, &mut applied);
    inner(state, &applied).re
}

/// `⟨ψ| H |ψ⟩`.
pub fn expectation_sum(h: &PauliSum, state: &[Complex64]) -> f64 {
    inner(state, &apply_sum(h, state)).re
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// Project onto the ±1 eigenspace of `word` and renormalize.
/// Returns the pre-projection outcome probability.
pub fn project_eigenspace(word: &PauliWord, sign: f64, state: &mut Vec<Complex64>) -> f64 {
    let mut applied = vec![Complex64::new(0.0, 0.0); state.len()];
    apply_word(word, Complex64::new(0.5 * sign, 0.0), state, &mut applied);
    for (b, amp) in state.iter_mut().enumerate() {
        *amp = *amp * 0.5 + applied[b];
    }
    let p = norm(state).powi(2);
    normalize(state);
    p
}
