//! Shared generators for the integration suites.

use csvqe::pauli::{PauliSum, PauliTerm, PauliWord, Phase};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn word(s: &str) -> PauliWord {
    PauliWord::parse(s).unwrap()
}

/// Random Hermitian Hamiltonian with distinct words.
pub fn random_hamiltonian(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> PauliSum {
    let mut h = PauliSum::new(n);
    let live = (1u64 << n) - 1;
    // requesting more distinct words than exist on n qubits cannot terminate
    let terms = terms.min((1usize << (2 * n)) - 1);
    while h.len() < terms {
        let w = PauliWord::from_masks(n, rng.gen::<u64>() & live, rng.gen::<u64>() & live)
            .unwrap();
        let c = rng.gen::<f64>() - 0.5;
        if c.abs() < 1e-3 {
            continue;
        }
        h.add_term(PauliTerm::real(w, c)).unwrap();
    }
    h
}

/// A pairwise-anticommuting family of `m ≤ 2n+1` words: the standard ladder
/// `X_0, Y_0, Z_0 X_1, Z_0 Y_1, ...` scrambled by random π/2 rotations.
pub fn random_anticommuting_words(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<PauliWord> {
    assert!(m <= 2 * n + 1);
    let mut ladder: Vec<PauliWord> = Vec::new();
    for q in 0..n {
        let mut x = PauliWord::identity(n);
        let mut y = PauliWord::identity(n);
        for p in 0..q {
            x = x.with_factor(p, csvqe::pauli::Factor::Z);
            y = y.with_factor(p, csvqe::pauli::Factor::Z);
        }
        ladder.push(x.with_factor(q, csvqe::pauli::Factor::X));
        ladder.push(y.with_factor(q, csvqe::pauli::Factor::Y));
    }
    let mut all_z = PauliWord::identity(n);
    for q in 0..n {
        all_z = all_z.with_factor(q, csvqe::pauli::Factor::Z);
    }
    ladder.push(all_z);
    ladder.truncate(m);

    // scramble with random Clifford conjugations (anticommutation preserved)
    let live = (1u64 << n) - 1;
    for _ in 0..4 * n {
        let q = match PauliWord::from_masks(n, rng.gen::<u64>() & live, rng.gen::<u64>() & live)
        {
            Ok(w) if !w.is_identity() => w,
            _ => continue,
        };
        for w in ladder.iter_mut() {
            if !q.commutes(w).unwrap() {
                let (phase, product) = q.multiply(w).unwrap();
                debug_assert!(phase.mul(Phase::PlusI).is_real());
                *w = product;
            }
        }
    }
    for i in 0..ladder.len() {
        for j in (i + 1)..ladder.len() {
            assert!(ladder[i].anticommutes(&ladder[j]).unwrap());
        }
    }
    ladder
}

/// Unit vector of `m` nonzero random amplitudes.
pub fn random_unit_amplitudes(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() - 0.5).collect();
        let norm: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 || raw.iter().any(|x| x.abs() / norm < 1e-3) {
            continue;
        }
        return raw.into_iter().map(|x| x / norm).collect();
    }
}
