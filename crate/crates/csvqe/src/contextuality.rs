//! Contextuality testing and the noncontextual model structure.
//!
//! A set of Pauli words is strongly contextual iff its non-universally
//! commuting part `T` contains a triple where one operator commutes with two
//! mutually anticommuting ones. Noncontextual sets split as `Z ∪ T` where `T`
//! decomposes into cliques: commuting within, anticommuting across. From that
//! split an independent generator set `G` is extracted over GF(2), and every
//! word of the set is expressed as a signed product of generators and at most
//! one clique representative.

use crate::exec;
use crate::pauli::{PauliError, PauliSum, PauliTerm, PauliWord, Phase};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContextualityError {
    #[error("words of mixed qubit counts: {0} vs {1}")]
    MixedLengths(usize, usize),
    #[error("set is not noncontextual: {0}")]
    NotNoncontextual(String),
    #[error("inference consistency check failed for {0}")]
    InferenceFailure(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

fn check_same_length(words: &[PauliWord]) -> Result<usize, ContextualityError> {
    let mut iter = words.iter();
    let n = iter.next().map(|w| w.n_qubits()).unwrap_or(0);
    for w in iter {
        if w.n_qubits() != n {
            return Err(ContextualityError::MixedLengths(n, w.n_qubits()));
        }
    }
    Ok(n)
}

/// Split `S` into the universally commuting part `Z` and its complement `T`,
/// preserving input order.
pub fn partition_commuting(
    words: &[PauliWord],
) -> Result<(Vec<PauliWord>, Vec<PauliWord>), ContextualityError> {
    check_same_length(words)?;
    let mut z = Vec::new();
    let mut t = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let universal = words
            .iter()
            .enumerate()
            .all(|(j, other)| i == j || w.commutes(other).unwrap());
        if universal {
            z.push(*w);
        } else {
            t.push(*w);
        }
    }
    Ok((z, t))
}

/// Strong-contextuality test: scan `T` for an operator commuting with two
/// mutually anticommuting operators.
pub fn is_contextual(words: &[PauliWord]) -> Result<bool, ContextualityError> {
    let (_, t) = partition_commuting(words)?;
    if t.len() < 3 {
        return Ok(false);
    }
    let found = exec::par_any(t.len(), |i| {
        for j in 0..t.len() {
            if j == i || !t[i].commutes(&t[j]).unwrap() {
                continue;
            }
            for k in (j + 1)..t.len() {
                if k == i {
                    continue;
                }
                if t[i].commutes(&t[k]).unwrap() && !t[j].commutes(&t[k]).unwrap() {
                    return true;
                }
            }
        }
        false
    });
    Ok(found)
}

/// Group a noncontextual `T` into its commutation-equivalence cliques.
/// Clique order and member order follow first encounter in the input.
pub fn decompose_cliques(t: &[PauliWord]) -> Result<Vec<Vec<PauliWord>>, ContextualityError> {
    check_same_length(t)?;
    let mut cliques: Vec<Vec<PauliWord>> = Vec::new();
    for w in t {
        let mut joined = false;
        for clique in cliques.iter_mut() {
            if w.commutes(&clique[0]).unwrap() {
                clique.push(*w);
                joined = true;
                break;
            }
        }
        if !joined {
            cliques.push(vec![*w]);
        }
    }
    // commutation must be an equivalence relation: verify all pairs
    for (a, ca) in cliques.iter().enumerate() {
        for (b, cb) in cliques.iter().enumerate() {
            for wa in ca {
                for wb in cb {
                    if wa == wb {
                        continue;
                    }
                    let commute = wa.commutes(wb).unwrap();
                    if a == b && !commute {
                        return Err(ContextualityError::NotNoncontextual(format!(
                            "{wa} and {wb} share a clique but anticommute"
                        )));
                    }
                    if a != b && commute {
                        return Err(ContextualityError::NotNoncontextual(format!(
                            "{wa} and {wb} are in different cliques but commute"
                        )));
                    }
                }
            }
        }
    }
    Ok(cliques)
}

/// Greedy split of `H` into a noncontextual part and the contextual rest.
///
/// Terms are visited in descending |coefficient| (ties broken by
/// lexicographic word order) and kept when the running set stays
/// noncontextual. The two parts sum to `H` exactly.
pub fn extract_noncontextual(h: &PauliSum) -> (PauliSum, PauliSum) {
    let mut order: Vec<(PauliWord, num_complex::Complex64)> =
        h.iter().map(|(w, c)| (*w, *c)).collect();
    order.sort_by(|(wa, ca), (wb, cb)| {
        cb.norm()
            .partial_cmp(&ca.norm())
            .unwrap()
            .then_with(|| wa.cmp(wb))
    });
    let mut kept: Vec<PauliWord> = Vec::new();
    let mut noncon = PauliSum::new(h.n_qubits());
    let mut con = PauliSum::new(h.n_qubits());
    for (w, c) in order {
        kept.push(w);
        if is_contextual(&kept).unwrap() {
            kept.pop();
            con.add_term(PauliTerm::new(w, c)).unwrap();
        } else {
            noncon.add_term(PauliTerm::new(w, c)).unwrap();
        }
    }
    (noncon, con)
}

/// How a word of `S` is reproduced from the generators: the word equals
/// `phase · Π G[i] · rep(clique)` with the product in ascending index order
/// and the clique representative, when present, multiplied last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inference {
    pub generator_indices: Vec<usize>,
    pub clique: Option<usize>,
    pub phase: Phase,
}

/// The noncontextual model: Z/T split, cliques with representatives, the
/// independent generator set G and the inference table over the whole set.
#[derive(Debug, Clone)]
pub struct NoncontextualStructure {
    pub n_qubits: usize,
    pub z_set: Vec<PauliWord>,
    pub cliques: Vec<Vec<PauliWord>>,
    pub reps: Vec<PauliWord>,
    /// Per clique, aligned with members: `member = phase · word · rep`.
    pub a_factors: Vec<Vec<(PauliWord, Phase)>>,
    pub generators: Vec<PauliWord>,
    pub inference: BTreeMap<PauliWord, Inference>,
}

impl NoncontextualStructure {
    pub fn clique_count(&self) -> usize {
        self.cliques.len()
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// All words the structure covers.
    pub fn support(&self) -> Vec<PauliWord> {
        let mut out = self.z_set.clone();
        for c in &self.cliques {
            out.extend(c.iter().copied());
        }
        out
    }
}

/// GF(2) echelon basis over symplectic rows, remembering which accepted
/// generators combine into each row.
struct Gf2Basis {
    width: usize,
    /// (pivot bit, reduced row, generator-index mask)
    rows: Vec<(usize, Vec<bool>, Vec<usize>)>,
}

impl Gf2Basis {
    fn new(width: usize) -> Self {
        Gf2Basis {
            width,
            rows: Vec::new(),
        }
    }

    fn reduce(&self, vec: &mut Vec<bool>, combo: &mut Vec<usize>) {
        for (pivot, row, mask) in &self.rows {
            if vec[*pivot] {
                for i in 0..self.width {
                    vec[i] ^= row[i];
                }
                for g in mask {
                    toggle(combo, *g);
                }
            }
        }
    }

    /// Try to insert the vector as generator `gen_index`; false if dependent.
    fn insert(&mut self, bits: Vec<bool>, gen_index: usize) -> bool {
        let mut vec = bits;
        let mut combo = vec![gen_index];
        self.reduce(&mut vec, &mut combo);
        match vec.iter().position(|b| *b) {
            Some(pivot) => {
                self.rows.push((pivot, vec, combo));
                self.rows.sort_by_key(|(p, _, _)| *p);
                true
            }
            None => false,
        }
    }

    /// Express `bits` over the accepted generators, if possible.
    fn express(&self, bits: Vec<bool>) -> Option<Vec<usize>> {
        let mut vec = bits;
        let mut combo = Vec::new();
        self.reduce(&mut vec, &mut combo);
        if vec.iter().any(|b| *b) {
            None
        } else {
            combo.sort_unstable();
            Some(combo)
        }
    }
}

fn toggle(combo: &mut Vec<usize>, g: usize) {
    if let Some(pos) = combo.iter().position(|x| *x == g) {
        combo.remove(pos);
    } else {
        combo.push(g);
    }
}

/// Pick the clique representative: maximum Pauli weight, ties broken by
/// lexicographically smallest string. This reproduces the reference
/// reductions of the worked example.
fn pick_representative(clique: &[PauliWord]) -> PauliWord {
    *clique
        .iter()
        .max_by(|a, b| {
            a.weight()
                .cmp(&b.weight())
                .then_with(|| b.cmp(a)) // prefer lexicographically smaller on ties
        })
        .unwrap()
}

/// Build the generator set and inference table from a Z/T decomposition.
pub fn build_generators(
    z_set: &[PauliWord],
    cliques: &[Vec<PauliWord>],
) -> Result<NoncontextualStructure, ContextualityError> {
    let mut all: Vec<PauliWord> = z_set.to_vec();
    for c in cliques {
        all.extend(c.iter().copied());
    }
    let n = check_same_length(&all)?;

    let reps: Vec<PauliWord> = cliques.iter().map(|c| pick_representative(c)).collect();

    // A-factors: member = phase · word · rep  ⇔  word·phase = member · rep
    let mut a_factors: Vec<Vec<(PauliWord, Phase)>> = Vec::new();
    for (j, clique) in cliques.iter().enumerate() {
        let mut factors = Vec::new();
        for member in clique {
            let (ph, word) = member.multiply(&reps[j])?;
            if !ph.is_real() {
                return Err(ContextualityError::InferenceFailure(format!(
                    "A-factor of {member} has imaginary phase"
                )));
            }
            factors.push((word, ph));
        }
        a_factors.push(factors);
    }

    // Candidate generators: Z members first, then the A-factor words in
    // clique order, reduced to an independent subset over GF(2).
    let mut candidates: Vec<PauliWord> = z_set.to_vec();
    for factors in &a_factors {
        for (word, _) in factors {
            if !word.is_identity() {
                candidates.push(*word);
            }
        }
    }
    let mut basis = Gf2Basis::new(2 * n);
    let mut generators: Vec<PauliWord> = Vec::new();
    for cand in candidates {
        if generators.contains(&cand) {
            continue;
        }
        if basis.insert(cand.symplectic_bits(), generators.len()) {
            generators.push(cand);
        }
    }

    // Inference table over Z ∪ T, plus the generators themselves.
    let mut inference = BTreeMap::new();
    for (i, g) in generators.iter().enumerate() {
        inference.insert(*g, Inference {
            generator_indices: vec![i],
            clique: None,
            phase: Phase::PlusOne,
        });
    }
    for w in z_set {
        let indices = basis.express(w.symplectic_bits()).ok_or_else(|| {
            ContextualityError::InferenceFailure(format!("{w} not generated by G"))
        })?;
        let phase = product_phase(&generators, &indices, None, w)?;
        inference.insert(*w, Inference {
            generator_indices: indices,
            clique: None,
            phase,
        });
    }
    for (j, clique) in cliques.iter().enumerate() {
        for (member, (a_word, _)) in clique.iter().zip(&a_factors[j]) {
            let indices = if a_word.is_identity() {
                Vec::new()
            } else {
                basis.express(a_word.symplectic_bits()).ok_or_else(|| {
                    ContextualityError::InferenceFailure(format!(
                        "A-factor {a_word} not generated by G"
                    ))
                })?
            };
            let phase = product_phase(&generators, &indices, Some(reps[j]), member)?;
            inference.insert(*member, Inference {
                generator_indices: indices,
                clique: Some(j),
                phase,
            });
        }
    }

    // size bounds: a commuting independent set beside N ≥ 1 anticommuting
    // representatives has at most n-1 members, and at most 2n+1 reps exist
    debug_assert!(cliques.is_empty() || generators.len() + 1 <= n.max(1));
    debug_assert!(reps.len() <= 2 * n + 1);

    let structure = NoncontextualStructure {
        n_qubits: n,
        z_set: z_set.to_vec(),
        cliques: cliques.to_vec(),
        reps,
        a_factors,
        generators,
        inference,
    };
    verify_inference(&structure)?;
    Ok(structure)
}

/// Phase making `target = phase · Π G[i] · rep`, ascending index order.
fn product_phase(
    generators: &[PauliWord],
    indices: &[usize],
    rep: Option<PauliWord>,
    target: &PauliWord,
) -> Result<Phase, ContextualityError> {
    let n = target.n_qubits();
    let mut word = PauliWord::identity(n);
    let mut phase = Phase::PlusOne;
    for i in indices {
        let (p, w) = word.multiply(&generators[*i])?;
        phase = phase.mul(p);
        word = w;
    }
    if let Some(r) = rep {
        let (p, w) = word.multiply(&r)?;
        phase = phase.mul(p);
        word = w;
    }
    if word != *target {
        return Err(ContextualityError::InferenceFailure(format!(
            "product {word} does not reproduce {target}"
        )));
    }
    let needed = phase.conj();
    if !needed.is_real() {
        return Err(ContextualityError::InferenceFailure(format!(
            "{target} reproduced only up to imaginary phase"
        )));
    }
    Ok(needed)
}

/// Re-multiply every table entry and confirm it reproduces its word exactly.
fn verify_inference(s: &NoncontextualStructure) -> Result<(), ContextualityError> {
    for (word, inf) in &s.inference {
        let rep = inf.clique.map(|j| s.reps[j]);
        let phase = product_phase(&s.generators, &inf.generator_indices, rep, word)?;
        if phase != inf.phase {
            return Err(ContextualityError::InferenceFailure(word.to_string()));
        }
    }
    Ok(())
}

/// Full structure straight from a noncontextual Hamiltonian.
///
/// Words are visited in descending |coefficient| (lexicographic on ties),
/// the same order the greedy extraction inserts them, so clique numbering
/// and generator selection are stable across the pipeline.
pub fn structure_of(h_noncon: &PauliSum) -> Result<NoncontextualStructure, ContextualityError> {
    let mut words: Vec<(PauliWord, f64)> =
        h_noncon.iter().map(|(w, c)| (*w, c.norm())).collect();
    words.sort_by(|(wa, ca), (wb, cb)| {
        cb.partial_cmp(ca).unwrap().then_with(|| wa.cmp(wb))
    });
    let words: Vec<PauliWord> = words.into_iter().map(|(w, _)| w).collect();
    if is_contextual(&words)? {
        return Err(ContextualityError::NotNoncontextual(
            "input Hamiltonian is contextual".to_string(),
        ));
    }
    let (z, t) = partition_commuting(&words)?;
    let cliques = decompose_cliques(&t)?;
    build_generators(&z, &cliques)
}

/// Peres–Mermin square: (quantum value, classical bound).
///
/// The quantum value comes from the six symbolic row/column products (five
/// `+I`, one `-I`); the classical bound from brute force over all 512
/// deterministic ±1 assignments.
pub fn peres_mermin_demo() -> (i64, i64) {
    let square = crate::fixtures::peres_mermin_square();

    let line_sign = |a: &PauliWord, b: &PauliWord, c: &PauliWord| -> i64 {
        let (p1, w1) = a.multiply(b).unwrap();
        let (p2, w2) = w1.multiply(c).unwrap();
        assert!(w2.is_identity(), "line does not multiply to ±I");
        let total = p1.mul(p2);
        total.as_sign() as i64
    };

    let mut quantum = 0i64;
    for r in 0..3 {
        quantum += line_sign(&square[r][0], &square[r][1], &square[r][2]);
    }
    for c in 0..2 {
        quantum += line_sign(&square[0][c], &square[1][c], &square[2][c]);
    }
    quantum -= line_sign(&square[0][2], &square[1][2], &square[2][2]);

    let mut classical = i64::MIN;
    for assignment in 0..512u32 {
        let v = |r: usize, c: usize| -> i64 {
            if (assignment >> (3 * r + c)) & 1 == 0 {
                1
            } else {
                -1
            }
        };
        let rows: i64 = (0..3).map(|r| v(r, 0) * v(r, 1) * v(r, 2)).sum();
        let cols = v(0, 0) * v(1, 0) * v(2, 0) + v(0, 1) * v(1, 1) * v(2, 1)
            - v(0, 2) * v(1, 2) * v(2, 2);
        classical = classical.max(rows + cols);
    }
    (quantum, classical)
}
