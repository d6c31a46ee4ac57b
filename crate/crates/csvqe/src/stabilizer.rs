//! Stabilizer subspace reduction: build the noncontextual stabilizer set,
//! map it to distinct single-qubit Z operators with π/2 Clifford rotations
//! (plus the unitary-partitioning stage when the anticommuting observable is
//! fixed), project the rotated Hamiltonian onto the stabilized qubits, and
//! search over which stabilizers to fix.

use crate::contextuality::{extract_noncontextual, structure_of, NoncontextualStructure};
use crate::eigen;
use crate::exec;
use crate::noncon::{solve, NoncontextualState, OptimizerConfig, SolverError};
use crate::partitioning::{
    build_up, AnticommutingObservable, PartitionError, UpMethod, UpOperator,
};
use crate::pauli::{Factor, PauliError, PauliSum, PauliTerm, PauliWord, Phase};
use std::collections::BTreeMap;
use thiserror::Error;

/// Exhaustive subset search is used when `2^|W_all| - 1` stays below this.
pub const BRUTE_FORCE_SUBSET_LIMIT: usize = 4096;

#[derive(Debug, Error)]
pub enum StabilizerError {
    #[error("stabilizers cannot be mapped to distinct qubits ({0})")]
    DependentStabilizers(String),
    #[error("qubit index {0} out of range for {1} qubits")]
    IndexOutOfRange(usize, usize),
    #[error("exact eigensolve infeasible at {0} qubits")]
    TooLargeForExactEigensolve(usize),
    #[error("cannot fix {requested} stabilizers, only {available} available")]
    NotEnoughStabilizers { requested: usize, available: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("eigensolver failure: {0}")]
    Eigen(#[from] eigen::EigenError),
}

/// One member of the stabilizer set: a signed generator or the
/// anticommuting observable `A(r)` (sign fixed to +1).
#[derive(Debug, Clone)]
pub enum StabilizerEntry {
    Generator { word: PauliWord, sign: f64 },
    Observable(AnticommutingObservable),
}

impl StabilizerEntry {
    pub fn describe(&self) -> String {
        match self {
            StabilizerEntry::Generator { word, sign } => {
                format!("{}{}", if *sign >= 0.0 { "+" } else { "-" }, word)
            }
            StabilizerEntry::Observable(_) => "+A(r)".to_string(),
        }
    }
}

/// The full set `W_all`, or a subset of it, in a fixed order: signed
/// generators first, then the observable.
#[derive(Debug, Clone)]
pub struct StabilizerSet {
    pub n_qubits: usize,
    pub entries: Vec<StabilizerEntry>,
}

impl StabilizerSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> StabilizerSet {
        StabilizerSet {
            n_qubits: self.n_qubits,
            entries: indices.iter().map(|i| self.entries[*i].clone()).collect(),
        }
    }

    pub fn describe(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.describe()).collect()
    }
}

/// `W_all`: every signed generator `q_i G_i` plus `A(r)` when cliques exist.
pub fn build_w_all(
    structure: &NoncontextualStructure,
    state: &NoncontextualState,
) -> Result<StabilizerSet, StabilizerError> {
    let mut entries = Vec::new();
    for (g, q) in structure.generators.iter().zip(&state.q) {
        entries.push(StabilizerEntry::Generator {
            word: *g,
            sign: *q as f64,
        });
    }
    if structure.clique_count() > 0 {
        let terms: Vec<(PauliWord, f64)> = structure
            .reps
            .iter()
            .zip(&state.r)
            .map(|(rep, r)| (*rep, *r))
            .collect();
        entries.push(StabilizerEntry::Observable(AnticommutingObservable::new(
            terms, None,
        )?));
    }
    Ok(StabilizerSet {
        n_qubits: structure.n_qubits,
        entries,
    })
}

/// A π/2 Clifford rotation `exp(±i·π/4·word)`.
#[derive(Debug, Clone)]
pub struct CliffordRotation {
    pub word: PauliWord,
    pub positive: bool,
}

impl CliffordRotation {
    /// Conjugate a signed word: commuting words pass through, anticommuting
    /// words map to `±i·Q·P`, which is again a signed word.
    fn conjugate_signed(&self, sign: f64, word: &PauliWord) -> (f64, PauliWord) {
        if self.word.commutes(word).unwrap() {
            return (sign, *word);
        }
        let (phase, product) = self.word.multiply(word).unwrap();
        let factor = if self.positive {
            phase.mul(Phase::PlusI)
        } else {
            phase.mul(Phase::MinusI)
        };
        (sign * factor.as_sign(), product)
    }

    fn conjugate_sum(&self, h: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new(h.n_qubits());
        for (p, c) in h.iter() {
            let (s, w) = self.conjugate_signed(1.0, p);
            out.add_term(PauliTerm::new(w, c * s)).unwrap();
        }
        out
    }
}

/// The complete `U_W`: optional unitary-partitioning stage followed by the
/// Clifford stage, with the per-entry qubit assignments and final signs.
#[derive(Debug, Clone)]
pub struct RotationPlan {
    pub n_qubits: usize,
    pub up_stage: Option<UpOperator>,
    pub clifford_stage: Vec<CliffordRotation>,
    /// Aligned with the entries of the set the plan was built from:
    /// `(qubit, eigenvalue)` of the mapped single-qubit Z.
    pub assignments: Vec<(usize, f64)>,
}

impl RotationPlan {
    /// `U_W† H U_W`.
    pub fn conjugate(&self, h: &PauliSum) -> Result<PauliSum, StabilizerError> {
        let mut current = match &self.up_stage {
            Some(up) => up.conjugate_sum(h)?,
            None => h.clone(),
        };
        for rot in &self.clifford_stage {
            current = rot.conjugate_sum(&current);
        }
        Ok(current)
    }

    pub fn projector(&self) -> SubspaceProjector {
        let mut fixed = BTreeMap::new();
        for (qubit, eigenvalue) in &self.assignments {
            fixed.insert(*qubit, *eigenvalue);
        }
        SubspaceProjector {
            n_qubits: self.n_qubits,
            fixed,
        }
    }

    /// Projector restricted to a subset of the plan's entries
    /// (used by the full-rotation comparison mode).
    pub fn projector_for(&self, entry_indices: &[usize]) -> SubspaceProjector {
        let mut fixed = BTreeMap::new();
        for i in entry_indices {
            let (qubit, eigenvalue) = self.assignments[*i];
            fixed.insert(qubit, eigenvalue);
        }
        SubspaceProjector {
            n_qubits: self.n_qubits,
            fixed,
        }
    }
}

/// Map from fixed qubit to its enforced Z eigenvalue.
#[derive(Debug, Clone)]
pub struct SubspaceProjector {
    pub n_qubits: usize,
    pub fixed: BTreeMap<usize, f64>,
}

impl SubspaceProjector {
    /// Fixed qubit as a computational-basis bit: 0 for ⟨Z⟩ = +1, 1 for -1.
    pub fn fixed_bits(&self) -> BTreeMap<usize, u8> {
        self.fixed
            .iter()
            .map(|(q, e)| (*q, if *e > 0.0 { 0u8 } else { 1u8 }))
            .collect()
    }
}

/// Deterministic choices inside the Clifford-stage construction. The
/// defaults reproduce the reference reductions; the comparison mode uses its
/// own calibrated set.
#[derive(Debug, Clone, Copy)]
struct Conventions {
    /// Exponent sign of the X↔Y flip rotations.
    b_positive: bool,
    /// Exponent sign of the diagonal pre-rotations.
    d_positive: bool,
    /// Pick the highest- instead of lowest-index eligible site.
    highest_site: bool,
    /// Rotate lone single-qubit-Z entries through the diagonal path too.
    rotate_single_z: bool,
    /// Map the observable's reduced word before the generators.
    observable_first: bool,
}

const DEFAULT_CONVENTIONS: Conventions = Conventions {
    b_positive: true,
    d_positive: true,
    highest_site: false,
    rotate_single_z: false,
    observable_first: false,
};

/// Build `U_W` for a subset `W` of the stabilizers.
///
/// The unitary-partitioning stage is included iff `W` contains `A(r)`.
/// Working through the entries in order: an entry already equal to a
/// single-qubit Z on an unassigned qubit is taken as-is; a non-diagonal
/// entry is mapped by one rotation generated by the word with X↔Y flipped
/// on the lowest-index unassigned X/Y site; a diagonal entry is first made
/// non-diagonal by a rotation generated by a single-qubit Y on its
/// lowest-index unassigned Z site.
pub fn build_u(w: &StabilizerSet, method: UpMethod) -> Result<RotationPlan, StabilizerError> {
    build_u_with(w, method, DEFAULT_CONVENTIONS)
}

fn build_u_with(
    w: &StabilizerSet,
    method: UpMethod,
    conv: Conventions,
) -> Result<RotationPlan, StabilizerError> {
    let n = w.n_qubits;
    let mut up_stage = None;

    // Signed words entering the Clifford stage, in entry order.
    let mut current: Vec<(f64, PauliWord)> = Vec::with_capacity(w.len());
    for entry in &w.entries {
        match entry {
            StabilizerEntry::Generator { word, sign } => current.push((*sign, *word)),
            StabilizerEntry::Observable(obs) => {
                let up = build_up(obs, method)?;
                current.push((obs.target_sign(), up.target()));
                up_stage = Some(up);
            }
        }
    }

    let order: Vec<usize> = if conv.observable_first {
        let mut order: Vec<usize> = Vec::with_capacity(current.len());
        for (i, entry) in w.entries.iter().enumerate() {
            if matches!(entry, StabilizerEntry::Observable(_)) {
                order.push(i);
            }
        }
        for (i, entry) in w.entries.iter().enumerate() {
            if matches!(entry, StabilizerEntry::Generator { .. }) {
                order.push(i);
            }
        }
        order
    } else {
        (0..current.len()).collect()
    };

    let mut cliffords: Vec<CliffordRotation> = Vec::new();
    let mut assignments: Vec<(usize, f64)> = vec![(usize::MAX, 0.0); w.len()];
    let mut assigned: Vec<usize> = Vec::new();

    for (step, &idx) in order.iter().enumerate() {
        let (sign, word) = current[idx];
        if let Some(q) = word.single_z_qubit() {
            if !conv.rotate_single_z {
                if assigned.contains(&q) {
                    return Err(StabilizerError::DependentStabilizers(format!(
                        "qubit {q} already fixed when mapping {word}"
                    )));
                }
                assigned.push(q);
                assignments[idx] = (q, sign);
                continue;
            }
        }
        let mut rotations_here: Vec<CliffordRotation> = Vec::new();
        let (mut s, mut p) = (sign, word);
        if p.is_diagonal() {
            // one rotation to turn a Z site into an X site
            let q = pick_site(&p, &assigned, conv.highest_site, |f| f == Factor::Z)
                .ok_or_else(|| {
                    StabilizerError::DependentStabilizers(format!("no free Z site on {p}"))
                })?;
            let generator = PauliWord::identity(n).with_factor(q, Factor::Y);
            let rot = CliffordRotation {
                word: generator,
                positive: conv.d_positive,
            };
            let (ns, np) = rot.conjugate_signed(s, &p);
            s = ns;
            p = np;
            rotations_here.push(rot);
        }
        // one rotation from the X↔Y flip on the chosen site
        let q = pick_site(&p, &assigned, conv.highest_site, |f| {
            f == Factor::X || f == Factor::Y
        })
        .ok_or_else(|| {
            StabilizerError::DependentStabilizers(format!("no free X/Y site on {p}"))
        })?;
        let flipped = match p.factor(q) {
            Factor::X => Factor::Y,
            Factor::Y => Factor::X,
            _ => unreachable!(),
        };
        let rot = CliffordRotation {
            word: p.with_factor(q, flipped),
            positive: conv.b_positive,
        };
        let (ns, np) = rot.conjugate_signed(s, &p);
        s = ns;
        p = np;
        rotations_here.push(rot);
        debug_assert_eq!(np.single_z_qubit(), Some(q));

        for rot in rotations_here {
            for &later in order.iter().skip(step + 1) {
                let (es, ew) = rot.conjugate_signed(current[later].0, &current[later].1);
                current[later] = (es, ew);
            }
            cliffords.push(rot);
        }
        assigned.push(q);
        assignments[idx] = (q, s);
        let _ = p;
    }

    Ok(RotationPlan {
        n_qubits: n,
        up_stage,
        clifford_stage: cliffords,
        assignments,
    })
}

fn pick_site<F: Fn(Factor) -> bool>(
    word: &PauliWord,
    assigned: &[usize],
    highest: bool,
    accept: F,
) -> Option<usize> {
    let mut candidates = (0..word.n_qubits()).filter(|q| !assigned.contains(q) && accept(word.factor(*q)));
    if highest {
        candidates.last()
    } else {
        candidates.next()
    }
}

/// The comparison mode's construction (the previous behavior of the
/// pipeline): the full stabilizer set is always rotated, including lone
/// single-qubit Z entries, which therefore pick up two redundant rotations.
pub fn build_u_legacy(
    w: &StabilizerSet,
    method: UpMethod,
) -> Result<RotationPlan, StabilizerError> {
    build_u_with(w, method, LEGACY_CONVENTIONS)
}

const LEGACY_CONVENTIONS: Conventions = Conventions {
    b_positive: true,
    d_positive: true,
    highest_site: false,
    rotate_single_z: true,
    observable_first: true,
};

/// Project a rotated Hamiltonian onto the fixed-qubit subspace: terms acting
/// with X or Y on a fixed qubit drop, Z factors fold their eigenvalue into
/// the coefficient, and fixed columns are removed.
pub fn project(
    h_rot: &PauliSum,
    projector: &SubspaceProjector,
) -> Result<PauliSum, StabilizerError> {
    let n = h_rot.n_qubits();
    for q in projector.fixed.keys() {
        if *q >= n {
            return Err(StabilizerError::IndexOutOfRange(*q, n));
        }
    }
    let free: Vec<usize> = (0..n).filter(|q| !projector.fixed.contains_key(q)).collect();
    let mut out = PauliSum::new(free.len());
    'terms: for (word, coeff) in h_rot.iter() {
        let mut factor = 1.0;
        for (q, eigenvalue) in &projector.fixed {
            match word.factor(*q) {
                Factor::I => {}
                Factor::Z => factor *= eigenvalue,
                Factor::X | Factor::Y => continue 'terms,
            }
        }
        let mut reduced = PauliWord::identity(free.len());
        for (new_q, old_q) in free.iter().enumerate() {
            reduced = reduced.with_factor(new_q, word.factor(*old_q));
        }
        out.add_term(PauliTerm::new(reduced, coeff * factor))?;
    }
    Ok(out)
}

/// Reduced Hamiltonian at one level of the stabilizer-fixing sweep.
#[derive(Debug, Clone)]
pub struct SelectionLevel {
    pub kept_qubits: usize,
    /// Indices into `W_all` of the fixed stabilizers.
    pub fixed_indices: Vec<usize>,
    pub fixed_description: Vec<String>,
    pub reduced: PauliSum,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct ReductionOptions {
    pub method: UpMethod,
    pub legacy_full_rotation: bool,
    pub optimizer: OptimizerConfig,
    /// Exhaustive subset search is used while `2^|W_all| - 1` stays at or
    /// below this; greedy removal takes over beyond it.
    pub brute_force_limit: usize,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            method: UpMethod::Lcu,
            legacy_full_rotation: false,
            optimizer: OptimizerConfig::default(),
            brute_force_limit: BRUTE_FORCE_SUBSET_LIMIT,
        }
    }
}

fn reduced_for_subset(
    h: &PauliSum,
    w_all: &StabilizerSet,
    indices: &[usize],
    opts: &ReductionOptions,
    legacy: Option<(&RotationPlan, &PauliSum)>,
) -> Result<PauliSum, StabilizerError> {
    match legacy {
        Some((plan, rotated)) => {
            let projector = plan.projector_for(indices);
            project(rotated, &projector)
        }
        None => {
            if indices.is_empty() {
                return Ok(h.clone());
            }
            let subset = w_all.subset(indices);
            let plan = build_u(&subset, opts.method)?;
            let rotated = plan.conjugate(h)?;
            project(&rotated, &plan.projector())
        }
    }
}

fn level_energy(reduced: &PauliSum) -> Result<f64, StabilizerError> {
    if reduced.n_qubits() > eigen::MAX_EIGEN_QUBITS {
        return Err(StabilizerError::TooLargeForExactEigensolve(
            reduced.n_qubits(),
        ));
    }
    Ok(eigen::ground_energy(reduced)?)
}

/// Sweep over how many stabilizers to fix.
///
/// When `2^|W_all| - 1` is small the subset of each size is chosen by
/// exhaustive search; otherwise stabilizers are removed greedily from the
/// full set, re-evaluating the exact ground energy at each step. Ties break
/// toward the lexicographically smallest index set.
pub fn stabilizer_selection_sweep(
    h: &PauliSum,
    w_all: &StabilizerSet,
    opts: &ReductionOptions,
) -> Result<Vec<SelectionLevel>, StabilizerError> {
    let m = w_all.len();
    let legacy_data = if opts.legacy_full_rotation {
        let plan = build_u_legacy(w_all, opts.method)?;
        let rotated = plan.conjugate(h)?;
        Some((plan, rotated))
    } else {
        None
    };
    let legacy_ref = legacy_data.as_ref().map(|(p, r)| (p, r));

    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(m + 1);
    chosen.push(Vec::new());
    if m > 0 {
        if (1u128 << m) - 1 <= opts.brute_force_limit as u128 {
            for size in 1..=m {
                let subsets = combinations(m, size);
                let evaluated = exec::try_par_map_vec(subsets, |s| {
                    let reduced = reduced_for_subset(h, w_all, &s, opts, legacy_ref)?;
                    let e = level_energy(&reduced)?;
                    Ok::<_, StabilizerError>((s, e))
                })?;
                let mut best: Option<&(Vec<usize>, f64)> = None;
                for cand in &evaluated {
                    match best {
                        None => best = Some(cand),
                        Some(b) => {
                            if cand.1 < b.1 - 1e-12 {
                                best = Some(cand);
                            }
                        }
                    }
                }
                chosen.push(best.unwrap().0.clone());
            }
        } else {
            // greedy removal chain from the full set
            let mut working: Vec<usize> = (0..m).collect();
            let mut chain = vec![working.clone()];
            while working.len() > 1 {
                let candidates = exec::try_par_map_range(working.len() as u64, |drop| {
                    let drop = drop as usize;
                    let mut sub = working.clone();
                    sub.remove(drop);
                    let reduced = reduced_for_subset(h, w_all, &sub, opts, legacy_ref)?;
                    Ok::<_, StabilizerError>((drop, level_energy(&reduced)?))
                })?;
                let mut best = 0usize;
                for (i, (_, e)) in candidates.iter().enumerate() {
                    if *e < candidates[best].1 - 1e-12 {
                        best = i;
                    }
                }
                working.remove(candidates[best].0);
                chain.push(working.clone());
            }
            for subset in chain.into_iter().rev() {
                chosen.push(subset);
            }
        }
    }

    // chosen[k] has k fixed stabilizers; emit levels by ascending kept qubits
    let mut levels = Vec::with_capacity(chosen.len());
    for subset in chosen.iter().rev() {
        let reduced = reduced_for_subset(h, w_all, subset, opts, legacy_ref)?;
        let energy = level_energy(&reduced)?;
        levels.push(SelectionLevel {
            kept_qubits: h.n_qubits() - subset.len(),
            fixed_indices: subset.clone(),
            fixed_description: subset
                .iter()
                .map(|i| w_all.entries[*i].describe())
                .collect(),
            reduced,
            energy,
        });
    }
    Ok(levels)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::new(), 0usize)];
    while let Some((prefix, start)) = stack.pop() {
        if prefix.len() == k {
            out.push(prefix);
            continue;
        }
        // descending start so the lexicographically smallest pops last
        for i in (start..n).rev() {
            let mut next = prefix.clone();
            next.push(i);
            stack.push((next, i + 1));
        }
    }
    out.sort();
    out
}

/// Outcome of the full pipeline on one Hamiltonian.
#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub structure: NoncontextualStructure,
    pub state: NoncontextualState,
    pub noncontextual_energy: f64,
    pub full_ground_energy: f64,
    pub w_all_description: Vec<String>,
    pub levels: Vec<SelectionLevel>,
}

/// Full pipeline: split, solve, build stabilizers, sweep (or evaluate one
/// keep level), reporting reduced Hamiltonians and exact energies.
pub fn cs_vqe_reduce(
    h: &PauliSum,
    qubits_to_keep: Option<usize>,
    opts: &ReductionOptions,
) -> Result<ReductionOutcome, StabilizerError> {
    let n = h.n_qubits();
    let (h_noncon, _h_con) = extract_noncontextual(h);
    let structure = structure_of(&h_noncon).map_err(|e| {
        StabilizerError::DependentStabilizers(format!("structure construction failed: {e}"))
    })?;
    let solution = solve(&h_noncon, &structure, &opts.optimizer)?;
    let w_all = build_w_all(&structure, &solution.state)?;
    let full_ground_energy = level_energy(h)?;

    let levels = match qubits_to_keep {
        None => stabilizer_selection_sweep(h, &w_all, opts)?,
        Some(keep) => {
            if keep > n {
                return Err(StabilizerError::IndexOutOfRange(keep, n));
            }
            let fix = n - keep;
            if fix > w_all.len() {
                return Err(StabilizerError::NotEnoughStabilizers {
                    requested: fix,
                    available: w_all.len(),
                });
            }
            let sweep = stabilizer_selection_sweep(h, &w_all, opts)?;
            sweep
                .into_iter()
                .filter(|level| level.kept_qubits == keep)
                .collect()
        }
    };

    Ok(ReductionOutcome {
        structure,
        state: solution.state,
        noncontextual_energy: solution.energy,
        full_ground_energy,
        w_all_description: w_all.describe(),
        levels,
    })
}

impl ReductionOutcome {
    pub fn to_report(&self, pipeline_note: Vec<String>) -> crate::io::ReductionReport {
        crate::io::ReductionReport {
            pipeline: pipeline_note,
            rows: self
                .levels
                .iter()
                .map(|level| crate::io::ReportRow {
                    qubits: level.kept_qubits,
                    terms: level.reduced.len(),
                    energy: level.energy,
                    delta_e: (level.energy - self.full_ground_energy).abs(),
                })
                .collect(),
        }
    }
}
