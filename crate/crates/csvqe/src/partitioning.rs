//! Unitary partitioning: map a normalized linear combination of pairwise
//! anticommuting Pauli words onto a single member word, either by a sequence
//! of rotations or by one linear combination of Pauli operators, and
//! conjugate Hamiltonians by the result.

use crate::pauli::{PauliError, PauliSum, PauliTerm, PauliWord, Phase};
use num_complex::Complex64;
use thiserror::Error;

const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("words {0} and {1} do not anticommute")]
    NotAnticommuting(String, String),
    #[error("amplitudes are not normalized: |r| = {0}")]
    NotNormalized(f64),
    #[error("qubit-count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// `A(r) = Σ r_j P_j` with pairwise anticommuting words and unit `r`.
#[derive(Debug, Clone)]
pub struct AnticommutingObservable {
    n_qubits: usize,
    terms: Vec<(PauliWord, f64)>,
    target: usize,
}

impl AnticommutingObservable {
    /// `target` defaults to the term with the largest signed amplitude, which
    /// maximizes `cos φ_k` and hence the identity weight of the LCU rotation.
    pub fn new(
        terms: Vec<(PauliWord, f64)>,
        target: Option<usize>,
    ) -> Result<Self, PartitionError> {
        assert!(!terms.is_empty());
        let n = terms[0].0.n_qubits();
        for (w, _) in &terms {
            if w.n_qubits() != n {
                return Err(PartitionError::DimensionMismatch(n, w.n_qubits()));
            }
        }
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                if terms[i].0.commutes(&terms[j].0)? {
                    return Err(PartitionError::NotAnticommuting(
                        terms[i].0.to_string(),
                        terms[j].0.to_string(),
                    ));
                }
            }
        }
        let norm: f64 = terms.iter().map(|(_, r)| r * r).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(PartitionError::NotNormalized(norm));
        }
        let target = target.unwrap_or_else(|| {
            let mut best = 0;
            for i in 1..terms.len() {
                if terms[i].1 > terms[best].1 {
                    best = i;
                }
            }
            best
        });
        assert!(target < terms.len());
        Ok(AnticommutingObservable {
            n_qubits: n,
            terms,
            target,
        })
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

    pub fn terms(&self) -> &[(PauliWord, f64)] {
        &self.terms
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    pub fn target_word(&self) -> PauliWord {
        self.terms[self.target].0
    }

    /// Sign the reduced operator carries: +1 by branch choice except for the
    /// single-term case, where it is the sign of the lone amplitude.
    pub fn target_sign(&self) -> f64 {
        if self.terms.len() == 1 {
            self.terms[0].1.signum()
        } else {
            1.0
        }
    }

    pub fn as_sum(&self) -> PauliSum {
        let mut sum = PauliSum::new(self.n_qubits);
        for (w, r) in &self.terms {
            sum.add_term(PauliTerm::real(*w, *r)).unwrap();
        }
        sum
    }
}

/// Ordered π-rotation steps; the step `(W, θ)` applies `exp(i·(θ/2)·W)`.
#[derive(Debug, Clone)]
pub struct SeqRotPlan {
    pub n_qubits: usize,
    pub target: PauliWord,
    pub steps: Vec<(PauliWord, f64)>,
}

/// `R = δ_I·I + Σ_j δ'_j · (P_k P_j)` as an explicit Pauli sum.
#[derive(Debug, Clone)]
pub struct LcuOperator {
    pub n_qubits: usize,
    pub target: PauliWord,
    pub identity_coeff: f64,
    pub terms: Vec<(PauliWord, Complex64)>,
}

/// Either construction of the reduction operator `R`.
#[derive(Debug, Clone)]
pub enum UpOperator {
    SeqRot(SeqRotPlan),
    Lcu(LcuOperator),
}

/// Method selector used across the pipeline and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpMethod {
    SeqRot,
    Lcu,
}

impl std::fmt::Display for UpMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UpMethod::SeqRot => write!(f, "seqrot"),
            UpMethod::Lcu => write!(f, "lcu"),
        }
    }
}

/// Build the sequence of rotations sending `A` to its target word.
///
/// Each step removes one non-target term: with running target amplitude
/// `r_k` and the victim `r_j`, the generator is the word of `i·P_k·P_j`
/// (sign `s`) and the angle `θ = atan2(-s·r_j, r_k)`, after which
/// `r_k ← √(r_k² + r_j²)`. The final amplitude is +1.
pub fn build_seqrot(a: &AnticommutingObservable) -> Result<SeqRotPlan, PartitionError> {
    let k = a.target_index();
    let target = a.target_word();
    let mut steps = Vec::new();
    let mut running = a.terms()[k].1;
    if a.len() == 1 {
        return Ok(SeqRotPlan {
            n_qubits: a.n_qubits(),
            target,
            steps,
        });
    }
    for (j, (word, amp)) in a.terms().iter().enumerate() {
        if j == k {
            continue;
        }
        let (phase, gen_word) = target.multiply(word)?;
        // i · P_k · P_j is Hermitian for anticommuting pairs: sign ±1
        let signed = phase.mul(Phase::PlusI);
        debug_assert!(signed.is_real());
        let s = signed.as_sign();
        let theta = (-s * amp).atan2(running);
        steps.push((gen_word, theta));
        running = running.hypot(*amp);
    }
    debug_assert!((running - 1.0).abs() < 1e-9);
    Ok(SeqRotPlan {
        n_qubits: a.n_qubits(),
        target,
        steps,
    })
}

/// Build the linear-combination-of-unitaries rotation for `A`.
///
/// With `cos φ_k = r_k`, the operator is `cos(φ_k/2)·I` plus
/// `sin(φ_k/2)·δ_j` on each product word `P_k·P_j`, `δ_j = r_j / sin φ_k`.
pub fn build_lcu(a: &AnticommutingObservable) -> Result<LcuOperator, PartitionError> {
    let k = a.target_index();
    let target = a.target_word();
    let r_k = a.terms()[k].1;
    if a.len() == 1 || (1.0 - r_k) < NORM_TOLERANCE {
        return Ok(LcuOperator {
            n_qubits: a.n_qubits(),
            target,
            identity_coeff: 1.0,
            terms: Vec::new(),
        });
    }
    if (1.0 + r_k) < NORM_TOLERANCE {
        // A = -P_k exactly: a half-turn about any partner product flips it
        let j = if k == 0 { 1 } else { 0 };
        let (phase, word) = target.multiply(&a.terms()[j].0)?;
        return Ok(LcuOperator {
            n_qubits: a.n_qubits(),
            target,
            identity_coeff: 0.0,
            terms: vec![(word, phase.as_complex())],
        });
    }
    let phi = r_k.clamp(-1.0, 1.0).acos();
    let omega = phi.sin();
    let identity_coeff = (phi / 2.0).cos();
    let half_sin = (phi / 2.0).sin();
    let mut terms = Vec::new();
    for (j, (word, amp)) in a.terms().iter().enumerate() {
        if j == k {
            continue;
        }
        let delta = amp / omega;
        let (phase, prod) = target.multiply(word)?;
        terms.push((prod, phase.as_complex() * (half_sin * delta)));
    }
    Ok(LcuOperator {
        n_qubits: a.n_qubits(),
        target,
        identity_coeff,
        terms,
    })
}

pub fn build_up(a: &AnticommutingObservable, method: UpMethod) -> Result<UpOperator, PartitionError> {
    Ok(match method {
        UpMethod::SeqRot => UpOperator::SeqRot(build_seqrot(a)?),
        UpMethod::Lcu => UpOperator::Lcu(build_lcu(a)?),
    })
}

/// One conjugation step `exp(i·(θ/2)·W) · H · exp(-i·(θ/2)·W)`:
/// commuting terms pass through, anticommuting terms split into
/// `cosθ·P + i·sinθ·(W·P)`.
fn conjugate_rotation_step(
    h: &PauliSum,
    word: &PauliWord,
    theta: f64,
) -> Result<PauliSum, PauliError> {
    let mut out = PauliSum::new(h.n_qubits());
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    for (p, c) in h.iter() {
        if word.commutes(p)? {
            out.add_term(PauliTerm::new(*p, *c))?;
        } else {
            out.add_term(PauliTerm::new(*p, c * cos_t))?;
            let (phase, wp) = word.multiply(p)?;
            let coeff = c * sin_t * (phase.mul(Phase::PlusI)).as_complex();
            out.add_term(PauliTerm::new(wp, coeff))?;
        }
    }
    Ok(out)
}

impl SeqRotPlan {
    /// `R_S H R_S†`, applied step by step.
    pub fn conjugate_sum(&self, h: &PauliSum) -> Result<PauliSum, PartitionError> {
        if h.n_qubits() != self.n_qubits {
            return Err(PartitionError::DimensionMismatch(self.n_qubits, h.n_qubits()));
        }
        let mut current = h.clone();
        for (word, theta) in &self.steps {
            current = conjugate_rotation_step(&current, word, *theta)?;
        }
        Ok(current)
    }

    /// The rotation expanded into an explicit Pauli sum (small plans only).
    pub fn as_sum(&self) -> PauliSum {
        let mut op = PauliSum::new(self.n_qubits.max(1));
        op.add_term(PauliTerm::real(PauliWord::identity(self.n_qubits), 1.0))
            .unwrap();
        for (word, theta) in &self.steps {
            // R_step = cos(θ/2)·I + i·sin(θ/2)·W, multiplied on the left
            let mut next = PauliSum::new(self.n_qubits);
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            for (p, coeff) in op.iter() {
                next.add_term(PauliTerm::new(*p, coeff * c)).unwrap();
                let (phase, wp) = word.multiply(p).unwrap();
                next.add_term(PauliTerm::new(
                    wp,
                    coeff * s * (phase.mul(Phase::PlusI)).as_complex(),
                ))
                .unwrap();
            }
            op = next;
        }
        op
    }
}

impl LcuOperator {
    pub fn as_sum(&self) -> PauliSum {
        let mut op = PauliSum::new(self.n_qubits.max(1));
        op.add_term(PauliTerm::real(
            PauliWord::identity(self.n_qubits),
            self.identity_coeff,
        ))
        .unwrap();
        for (w, c) in &self.terms {
            op.add_term(PauliTerm::new(*w, *c)).unwrap();
        }
        op
    }

    /// `R H R†` by direct symbolic triple products.
    pub fn conjugate_sum(&self, h: &PauliSum) -> Result<PauliSum, PartitionError> {
        if h.n_qubits() != self.n_qubits {
            return Err(PartitionError::DimensionMismatch(self.n_qubits, h.n_qubits()));
        }
        let r = self.as_sum();
        let mut out = PauliSum::new(h.n_qubits());
        for (wa, ca) in r.iter() {
            for (p, c) in h.iter() {
                let (ph1, left) = wa.multiply(p)?;
                for (wb, cb) in r.iter() {
                    let (ph2, word) = left.multiply(wb)?;
                    let coeff = ca * c * cb.conj() * ph1.as_complex() * ph2.as_complex();
                    out.add_term(PauliTerm::new(word, coeff))?;
                }
            }
        }
        Ok(out)
    }
}

impl UpOperator {
    pub fn conjugate_sum(&self, h: &PauliSum) -> Result<PauliSum, PartitionError> {
        match self {
            UpOperator::SeqRot(p) => p.conjugate_sum(h),
            UpOperator::Lcu(p) => p.conjugate_sum(h),
        }
    }

    /// `R†`: reversed, negated rotation steps, or conjugated coefficients.
    pub fn adjoint(&self) -> UpOperator {
        match self {
            UpOperator::SeqRot(p) => UpOperator::SeqRot(SeqRotPlan {
                n_qubits: p.n_qubits,
                target: p.target,
                steps: p.steps.iter().rev().map(|(w, t)| (*w, -t)).collect(),
            }),
            UpOperator::Lcu(p) => UpOperator::Lcu(LcuOperator {
                n_qubits: p.n_qubits,
                target: p.target,
                identity_coeff: p.identity_coeff,
                terms: p.terms.iter().map(|(w, c)| (*w, c.conj())).collect(),
            }),
        }
    }

    pub fn as_sum(&self) -> PauliSum {
        match self {
            UpOperator::SeqRot(p) => p.as_sum(),
            UpOperator::Lcu(p) => p.as_sum(),
        }
    }

    pub fn target(&self) -> PauliWord {
        match self {
            UpOperator::SeqRot(p) => p.target,
            UpOperator::Lcu(p) => p.target,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            UpOperator::SeqRot(p) => p.n_qubits,
            UpOperator::Lcu(p) => p.n_qubits,
        }
    }
}

/// Term counts from conjugating `H` by both constructions, with the
/// closed-form quadratic bound for the LCU route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermGrowth {
    pub input_terms: usize,
    pub count_seqrot: usize,
    pub count_lcu: usize,
    pub bound_lcu: usize,
}

pub fn lcu_growth_bound(input_terms: usize, clique_size: usize) -> usize {
    let m = clique_size.saturating_sub(1);
    input_terms * (1 + m + m * (m.saturating_sub(1)) / 2)
}

pub fn term_growth_report(
    h: &PauliSum,
    a: &AnticommutingObservable,
) -> Result<TermGrowth, PartitionError> {
    let seqrot = build_seqrot(a)?.conjugate_sum(h)?;
    let lcu = build_lcu(a)?.conjugate_sum(h)?;
    Ok(TermGrowth {
        input_terms: h.len(),
        count_seqrot: seqrot.len(),
        count_lcu: lcu.len(),
        bound_lcu: lcu_growth_bound(h.len(), a.len()),
    })
}
