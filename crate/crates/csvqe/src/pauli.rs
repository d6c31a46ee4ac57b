//! Exact n-qubit Pauli algebra over a symplectic (bit-mask) representation.
//!
//! A Pauli word is stored as a pair of bit masks: bit `j` of `x_mask` is set
//! when qubit `j` carries an X component (X or Y), bit `j` of `z_mask` when it
//! carries a Z component (Z or Y). Qubit 0 is the leftmost character of the
//! string form, so `"XZXI"` has `x_mask = 0b0101` and `z_mask = 0b0010`.
//! Phases are tracked as exponents of `i` modulo 4, never as floats.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Coefficients with absolute value below this are dropped from a [`PauliSum`].
pub const DROP_TOLERANCE: f64 = 1e-12;

/// Imaginary parts below this are accepted when a sum is flagged Hermitian.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("invalid character at position {0} (expected one of I, X, Y, Z)")]
    InvalidCharacter(usize),
    #[error("empty Pauli string")]
    EmptyString,
    #[error("qubit-count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
}

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factor {
    I,
    X,
    Y,
    Z,
}

impl Factor {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Factor::I,
            (true, false) => Factor::X,
            (true, true) => Factor::Y,
            (false, true) => Factor::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Factor::I => 'I',
            Factor::X => 'X',
            Factor::Y => 'Y',
            Factor::Z => 'Z',
        }
    }
}

/// Quarter-turn phase `i^k`, tracked exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() as i64 + other.exponent() as i64)
    }

    pub fn conj(self) -> Phase {
        Phase::from_exponent(-(self.exponent() as i64))
    }

    pub fn negate(self) -> Phase {
        Phase::from_exponent(self.exponent() as i64 + 2)
    }

    pub fn as_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// True for the Hermitian phases +1 and -1.
    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }

    /// +1 or -1 as a float; panics on imaginary phases.
    pub fn as_sign(self) -> f64 {
        match self {
            Phase::PlusOne => 1.0,
            Phase::MinusOne => -1.0,
            _ => panic!("phase {self:?} is not a sign"),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::PlusOne => write!(f, "+1"),
            Phase::PlusI => write!(f, "+i"),
            Phase::MinusOne => write!(f, "-1"),
            Phase::MinusI => write!(f, "-i"),
        }
    }
}

/// An n-qubit Pauli string in symplectic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliWord {
    /// The identity word; `n_qubits` may be zero (the fully projected case).
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        PauliWord {
            n_qubits,
            x_mask: 0,
            z_mask: 0,
        }
    }

    pub fn from_masks(n_qubits: usize, x_mask: u64, z_mask: u64) -> Result<Self, PauliError> {
        if n_qubits == 0 {
            return Err(PauliError::EmptyString);
        }
        if n_qubits > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n_qubits));
        }
        let live = if n_qubits == 64 { !0 } else { (1u64 << n_qubits) - 1 };
        Ok(PauliWord {
            n_qubits,
            x_mask: x_mask & live,
            z_mask: z_mask & live,
        })
    }

    /// Parse a string such as `"XZXI"`; qubit 0 is the leftmost character.
    pub fn parse(text: &str) -> Result<Self, PauliError> {
        if text.is_empty() {
            return Err(PauliError::EmptyString);
        }
        if text.len() > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(text.len()));
        }
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for (j, c) in text.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x_mask |= 1 << j,
                'Y' => {
                    x_mask |= 1 << j;
                    z_mask |= 1 << j;
                }
                'Z' => z_mask |= 1 << j,
                _ => return Err(PauliError::InvalidCharacter(j)),
            }
        }
        Ok(PauliWord {
            n_qubits: text.len(),
            x_mask,
            z_mask,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn factor(&self, qubit: usize) -> Factor {
        assert!(qubit < self.n_qubits);
        Factor::from_bits(
            (self.x_mask >> qubit) & 1 == 1,
            (self.z_mask >> qubit) & 1 == 1,
        )
    }

    pub fn with_factor(&self, qubit: usize, factor: Factor) -> Self {
        assert!(qubit < self.n_qubits);
        let mut w = *self;
        w.x_mask &= !(1 << qubit);
        w.z_mask &= !(1 << qubit);
        match factor {
            Factor::I => {}
            Factor::X => w.x_mask |= 1 << qubit,
            Factor::Y => {
                w.x_mask |= 1 << qubit;
                w.z_mask |= 1 << qubit;
            }
            Factor::Z => w.z_mask |= 1 << qubit,
        }
        w
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// True when every factor is I or Z.
    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    /// True when the word is `Z` on exactly one qubit and identity elsewhere.
    pub fn single_z_qubit(&self) -> Option<usize> {
        if self.x_mask == 0 && self.z_mask.count_ones() == 1 {
            Some(self.z_mask.trailing_zeros() as usize)
        } else {
            None
        }
    }

    fn check_len(&self, other: &PauliWord) -> Result<(), PauliError> {
        if self.n_qubits != other.n_qubits {
            Err(PauliError::LengthMismatch(self.n_qubits, other.n_qubits))
        } else {
            Ok(())
        }
    }

    /// Phase-tracked product `self * other`.
    ///
    /// Decomposing each factor as `i^(xz) X^x Z^z`, the product of two words
    /// picks up `i^e` with
    /// `e = |x1&z1| + |x2&z2| + 2|z1&x2| - |x3&z3|  (mod 4)`
    /// where `(x3, z3)` are the masks of the output word.
    pub fn multiply(&self, other: &PauliWord) -> Result<(Phase, PauliWord), PauliError> {
        self.check_len(other)?;
        let x3 = self.x_mask ^ other.x_mask;
        let z3 = self.z_mask ^ other.z_mask;
        let e = (self.x_mask & self.z_mask).count_ones() as i64
            + (other.x_mask & other.z_mask).count_ones() as i64
            + 2 * (self.z_mask & other.x_mask).count_ones() as i64
            - (x3 & z3).count_ones() as i64;
        Ok((
            Phase::from_exponent(e),
            PauliWord {
                n_qubits: self.n_qubits,
                x_mask: x3,
                z_mask: z3,
            },
        ))
    }

    /// True iff the symplectic form `|x1&z2| + |z1&x2|` is even.
    pub fn commutes(&self, other: &PauliWord) -> Result<bool, PauliError> {
        self.check_len(other)?;
        let form = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        Ok(form % 2 == 0)
    }

    pub fn anticommutes(&self, other: &PauliWord) -> Result<bool, PauliError> {
        Ok(!self.commutes(other)?)
    }

    /// Symplectic row vector `[x bits.., z bits..]` over GF(2).
    pub fn symplectic_bits(&self) -> Vec<bool> {
        let mut bits = Vec::with_capacity(2 * self.n_qubits);
        for j in 0..self.n_qubits {
            bits.push((self.x_mask >> j) & 1 == 1);
        }
        for j in 0..self.n_qubits {
            bits.push((self.z_mask >> j) & 1 == 1);
        }
        bits
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n_qubits {
            write!(f, "{}", self.factor(j).as_char())?;
        }
        Ok(())
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliWord {
    /// Lexicographic on the string form (I < X < Y < Z), then on length.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let n = self.n_qubits.min(other.n_qubits);
        for j in 0..n {
            match self.factor(j).cmp(&other.factor(j)) {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.n_qubits.cmp(&other.n_qubits)
    }
}

/// A Pauli word with a complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub word: PauliWord,
    pub coeff: Complex64,
}

impl PauliTerm {
    pub fn new(word: PauliWord, coeff: Complex64) -> Self {
        assert!(coeff.is_finite(), "coefficient must be finite");
        PauliTerm { word, coeff }
    }

    pub fn real(word: PauliWord, coeff: f64) -> Self {
        PauliTerm::new(word, Complex64::new(coeff, 0.0))
    }
}

/// Jordan product `a∘b = {a,b}/2`: the phase-tracked matrix product when the
/// words commute, `None` (exact zero) when they anticommute.
pub fn jordan_product(a: &PauliTerm, b: &PauliTerm) -> Result<Option<PauliTerm>, PauliError> {
    if !a.word.commutes(&b.word)? {
        return Ok(None);
    }
    let (phase, word) = a.word.multiply(&b.word)?;
    Ok(Some(PauliTerm::new(
        word,
        a.coeff * b.coeff * phase.as_complex(),
    )))
}

/// Monte-Carlo estimate of the probability that two uniformly random n-qubit
/// Pauli words anticommute. Converges to `(1/2)(1 - (1/4)^n)`.
pub fn anticommutation_probability_mc(n: usize, samples: u64, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    assert!(n >= 1 && n <= MAX_QUBITS && samples >= 1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let live = if n == 64 { !0u64 } else { (1u64 << n) - 1 };
    let mut hits = 0u64;
    for _ in 0..samples {
        let (xa, za) = (rng.gen::<u64>() & live, rng.gen::<u64>() & live);
        let (xb, zb) = (rng.gen::<u64>() & live, rng.gen::<u64>() & live);
        let form = (xa & zb).count_ones() + (za & xb).count_ones();
        if form % 2 == 1 {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

/// Closed-form anticommutation probability `(1/2)(1 - (1/4)^n)`.
pub fn anticommutation_probability_exact(n: usize) -> f64 {
    0.5 * (1.0 - 0.25f64.powi(n as i32))
}

/// A Hamiltonian as a deduplicated map from Pauli word to complex coefficient.
///
/// Insertion accumulates coefficients; anything with magnitude below
/// [`DROP_TOLERANCE`] is removed. The map is ordered, so iteration and
/// serialization are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliWord, Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self, PauliError>
    where
        I: IntoIterator<Item = PauliTerm>,
    {
        let mut sum = PauliSum::new(n_qubits);
        for t in terms {
            sum.add_term(t)?;
        }
        Ok(sum)
    }

    /// Parse `(pauli string, real coefficient)` pairs.
    pub fn from_strings(pairs: &[(&str, f64)]) -> Result<Self, PauliError> {
        let first = pairs.first().ok_or(PauliError::EmptyString)?;
        let n = first.0.len();
        let mut sum = PauliSum::new(n);
        for (s, c) in pairs {
            sum.add_term(PauliTerm::real(PauliWord::parse(s)?, *c))?;
        }
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, term: PauliTerm) -> Result<(), PauliError> {
        if term.word.n_qubits() != self.n_qubits {
            return Err(PauliError::LengthMismatch(
                term.word.n_qubits(),
                self.n_qubits,
            ));
        }
        let entry = self.terms.entry(term.word).or_insert(Complex64::new(0.0, 0.0));
        *entry += term.coeff;
        if entry.norm() < DROP_TOLERANCE {
            self.terms.remove(&term.word);
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &PauliSum) -> Result<(), PauliError> {
        for (w, c) in other.iter() {
            self.add_term(PauliTerm::new(*w, *c))?;
        }
        Ok(())
    }

    pub fn coeff(&self, word: &PauliWord) -> Complex64 {
        self.terms
            .get(word)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn contains(&self, word: &PauliWord) -> bool {
        self.terms.contains_key(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    pub fn words(&self) -> Vec<PauliWord> {
        self.terms.keys().copied().collect()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
        self.terms.retain(|_, c| c.norm() >= DROP_TOLERANCE);
    }

    /// Largest |imaginary part| over all coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_imag() <= HERMITICITY_TOLERANCE
    }

    /// One-norm of the coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (w, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if c.im.abs() < DROP_TOLERANCE {
                write!(f, "{:.6}*{}", c.re, w)?;
            } else {
                write!(f, "({:.6}{:+.6}i)*{}", c.re, c.im, w)?;
            }
        }
        Ok(())
    }
}
