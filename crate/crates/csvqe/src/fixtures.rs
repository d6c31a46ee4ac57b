//! Embedded fixtures so the demos run without input files.

use crate::pauli::{PauliSum, PauliWord};

/// The 14-term, 4-qubit worked example used throughout the test suite.
pub fn toy_hamiltonian() -> PauliSum {
    PauliSum::from_strings(&[
        ("IIYI", 0.6),
        ("XYXI", 0.7),
        ("XZXI", 0.7),
        ("XZZI", 0.6),
        ("YXYI", 0.1),
        ("ZZZI", 0.7),
        ("IIIZ", 0.5),
        ("XXXI", 0.1),
        ("XXYI", 0.5),
        ("XXZI", 0.2),
        ("YXXI", 0.2),
        ("YYZI", 0.2),
        ("YZXI", 0.1),
        ("ZYYI", 0.1),
    ])
    .expect("toy Hamiltonian fixture")
}

/// Exact ground energy of the noncontextual part of the toy problem:
/// -1/2 - sqrt(39/10).
pub fn toy_noncontextual_energy() -> f64 {
    -0.5 - (1.3f64 * 1.3 + 1.4 * 1.4 + 0.5 * 0.5).sqrt()
}

/// The nine observables of the 2-qubit square, row-major.
pub fn peres_mermin_square() -> [[PauliWord; 3]; 3] {
    let w = |s: &str| PauliWord::parse(s).unwrap();
    [
        [w("IZ"), w("ZI"), w("ZZ")],
        [w("XI"), w("IX"), w("XX")],
        [w("XZ"), w("ZX"), w("YY")],
    ]
}

/// The square flattened for contextuality checks.
pub fn peres_mermin_set() -> Vec<PauliWord> {
    peres_mermin_square().iter().flatten().copied().collect()
}
