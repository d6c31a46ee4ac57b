//! Measurement planning by unitary partitioning: cover the Hamiltonian with
//! pairwise-anticommuting cliques via greedy graph coloring, attach a
//! reduction rotation per clique, and estimate shot counts, variance ratios,
//! gate costs, and simulated sampling statistics.

use crate::partitioning::{build_up, AnticommutingObservable, PartitionError, UpMethod, UpOperator};
use crate::pauli::{PauliSum, PauliWord, HERMITICITY_TOLERANCE};
use crate::statevec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense shot simulation is refused above this many qubits.
pub const MAX_SIM_QUBITS: usize = 12;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("variance {0} outside [0, 1]")]
    InvalidVariance(f64),
    #[error("{0} qubits exceeds the simulation guard of {MAX_SIM_QUBITS}")]
    TooManyQubits(usize),
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("coefficient of {0} has imaginary part {1:.3e}; plan requires a Hermitian input")]
    ComplexCoefficient(String, f64),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Partition the Hamiltonian's words into pairwise-anticommuting cliques.
///
/// Builds the commutation graph (edges join commuting words) and colors it
/// greedily in descending-degree order, ties broken lexicographically; each
/// color class is then a set of mutually anticommuting words.
pub fn clique_cover(h: &PauliSum) -> Vec<Vec<PauliWord>> {
    let words = h.words();
    let n = words.len();
    if n == 0 {
        return Vec::new();
    }
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if words[i].commutes(&words[j]).unwrap() {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    let degree: Vec<usize> = adj.iter().map(|row| row.iter().filter(|x| **x).count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| degree[*b].cmp(&degree[*a]).then_with(|| words[*a].cmp(&words[*b])));

    let mut color = vec![usize::MAX; n];
    let mut n_colors = 0usize;
    for &v in &order {
        let mut used = vec![false; n_colors];
        for u in 0..n {
            if adj[v][u] && color[u] != usize::MAX {
                used[color[u]] = true;
            }
        }
        let c = (0..n_colors).find(|c| !used[*c]).unwrap_or_else(|| {
            n_colors += 1;
            n_colors - 1
        });
        color[v] = c;
    }
    let mut cliques = vec![Vec::new(); n_colors];
    for &v in &order {
        cliques[color[v]].push(words[v]);
    }
    cliques
}

/// One normalized anticommuting group `γ_j C_j` with its reduction rotation.
#[derive(Debug, Clone)]
pub struct PlannedClique {
    pub members: Vec<(PauliWord, f64)>,
    pub norm: f64,
    pub observable: AnticommutingObservable,
    pub rotation: UpOperator,
}

/// A full measurement plan for a Hamiltonian.
#[derive(Debug, Clone)]
pub struct MeasurementPlan {
    pub n_qubits: usize,
    pub identity_offset: f64,
    pub cliques: Vec<PlannedClique>,
    pub epsilon: f64,
}

impl MeasurementPlan {
    /// Build the plan. Identity terms carry no measurement cost and are
    /// tracked as a constant offset.
    pub fn build(h: &PauliSum, epsilon: f64, method: UpMethod) -> Result<Self, MeasureError> {
        let mut stripped = PauliSum::new(h.n_qubits());
        let mut offset = 0.0;
        for (w, c) in h.iter() {
            if c.im.abs() > HERMITICITY_TOLERANCE {
                return Err(MeasureError::ComplexCoefficient(w.to_string(), c.im.abs()));
            }
            if w.is_identity() {
                offset += c.re;
            } else {
                stripped
                    .add_term(crate::pauli::PauliTerm::real(*w, c.re))
                    .unwrap();
            }
        }
        let cover = clique_cover(&stripped);
        let mut cliques = Vec::with_capacity(cover.len());
        for members in cover {
            let coeffs: Vec<(PauliWord, f64)> = members
                .iter()
                .map(|w| (*w, stripped.coeff(w).re))
                .collect();
            let norm: f64 = coeffs.iter().map(|(_, c)| c * c).sum::<f64>().sqrt();
            let normalized: Vec<(PauliWord, f64)> =
                coeffs.iter().map(|(w, c)| (*w, c / norm)).collect();
            let observable = AnticommutingObservable::new(normalized, None)?;
            let rotation = build_up(&observable, method)?;
            cliques.push(PlannedClique {
                members: coeffs,
                norm,
                observable,
                rotation,
            });
        }
        Ok(MeasurementPlan {
            n_qubits: h.n_qubits(),
            identity_offset: offset,
            cliques,
            epsilon,
        })
    }

    pub fn clique_count(&self) -> usize {
        self.cliques.len()
    }

    pub fn term_count(&self) -> usize {
        self.cliques.iter().map(|c| c.members.len()).sum()
    }
}

/// Shot estimates for grouped versus term-by-term measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub m_grouped: f64,
    pub m_ungrouped: f64,
    pub ratio: f64,
    pub bound: f64,
}

/// Measurement-count estimate at precision `epsilon`.
///
/// Grouped variance per clique is `Σ c_k² Var[P_k]` (anticommuting members
/// have zero sequential covariance); the ratio `M_u / M_g` is bounded by the
/// Cauchy–Schwarz factor `(Σ √|C_j| ‖x_j‖₂ / Σ ‖x_j‖₂)²`.
pub fn estimate_shots(
    plan: &MeasurementPlan,
    variances: Option<&dyn Fn(&PauliWord) -> f64>,
    epsilon: f64,
) -> Result<ShotEstimate, MeasureError> {
    let mut grouped_sqrt = 0.0;
    let mut ungrouped_sqrt = 0.0;
    let mut bound_numerator = 0.0;
    for clique in &plan.cliques {
        let mut group_var = 0.0;
        let mut l1 = 0.0;
        for (word, coeff) in &clique.members {
            let var = variances.map(|f| f(word)).unwrap_or(1.0);
            if !(0.0..=1.0).contains(&var) {
                return Err(MeasureError::InvalidVariance(var));
            }
            group_var += coeff * coeff * var;
            l1 += coeff.abs() * var.sqrt();
        }
        let l2 = group_var.sqrt();
        grouped_sqrt += l2;
        ungrouped_sqrt += l1;
        bound_numerator += (clique.members.len() as f64).sqrt() * l2;
    }
    let eps2 = epsilon * epsilon;
    let m_grouped = grouped_sqrt * grouped_sqrt / eps2;
    let m_ungrouped = ungrouped_sqrt * ungrouped_sqrt / eps2;
    let (ratio, bound) = if grouped_sqrt > 0.0 {
        (
            m_ungrouped / m_grouped,
            (bound_numerator / grouped_sqrt).powi(2),
        )
    } else {
        (1.0, 1.0)
    };
    Ok(ShotEstimate {
        m_grouped,
        m_ungrouped,
        ratio,
        bound,
    })
}

/// Sampled energy estimate and per-clique empirical variances.
///
/// Each clique is measured through its reduction: the single word
/// `P_k = R C R†` is sampled on `R|ψ⟩`, which reproduces the statistics of
/// measuring the whole normalized clique at once.
pub fn simulate_shots(
    state: &[Complex64],
    plan: &MeasurementPlan,
    shots: u64,
    seed: u64,
) -> Result<(f64, Vec<f64>), MeasureError> {
    if plan.n_qubits > MAX_SIM_QUBITS {
        return Err(MeasureError::TooManyQubits(plan.n_qubits));
    }
    if shots == 0 {
        return Err(MeasureError::ZeroShots);
    }
    assert_eq!(state.len(), 1 << plan.n_qubits);
    let mut energy = plan.identity_offset;
    let mut variances = Vec::with_capacity(plan.cliques.len());
    for (j, clique) in plan.cliques.iter().enumerate() {
        let rotated = {
            let op = clique.rotation.as_sum();
            let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
            for (w, c) in op.iter() {
                statevec::apply_word(w, *c, state, &mut out);
            }
            out
        };
        let target = clique.rotation.target();
        let expect = statevec::expectation_word(&target, &rotated).clamp(-1.0, 1.0);
        let p_plus = 0.5 * (1.0 + expect);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64 + 1);
        let mut plus = 0u64;
        for _ in 0..shots {
            if rng.gen::<f64>() < p_plus {
                plus += 1;
            }
        }
        let mean = (2.0 * plus as f64 - shots as f64) / shots as f64;
        energy += clique.norm * mean;
        let sample_var = if shots > 1 {
            (1.0 - mean * mean) * shots as f64 / (shots - 1) as f64
        } else {
            0.0
        };
        variances.push(clique.norm * clique.norm * sample_var);
    }
    Ok((energy, variances))
}

/// Paired sequential single-shot measurements of two words: sample `a`,
/// collapse, then sample `b` on the post-measurement state.
pub fn sequential_pair_samples(
    state: &[Complex64],
    a: &PauliWord,
    b: &PauliWord,
    shots: u64,
    seed: u64,
) -> Result<Vec<(i8, i8)>, MeasureError> {
    let n = a.n_qubits();
    if n > MAX_SIM_QUBITS {
        return Err(MeasureError::TooManyQubits(n));
    }
    if shots == 0 {
        return Err(MeasureError::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(shots as usize);
    for _ in 0..shots {
        let mut psi = state.to_vec();
        let expect_a = statevec::expectation_word(a, &psi).clamp(-1.0, 1.0);
        let p_plus = 0.5 * (1.0 + expect_a);
        let sa: i8 = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        statevec::project_eigenspace(a, sa as f64, &mut psi);
        let expect_b = statevec::expectation_word(b, &psi).clamp(-1.0, 1.0);
        let q_plus = 0.5 * (1.0 + expect_b);
        let sb: i8 = if rng.gen::<f64>() < q_plus { 1 } else { -1 };
        out.push((sa, sb));
    }
    Ok(out)
}

/// Circuit-cost upper bound for measuring one clique by a sequence of
/// rotations: `N_s·(|C|-1)` single-qubit and CNOT gates.
pub fn gate_estimate(clique_size: usize, n_system_qubits: usize) -> (usize, usize) {
    let per = n_system_qubits * clique_size.saturating_sub(1);
    (per, per)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateEstimateRow {
    pub clique_size: usize,
    pub single_qubit_upper: usize,
    pub cnot_upper: usize,
}

/// Summary report serialized for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementReport {
    pub terms_before: usize,
    pub cliques_after: usize,
    pub ratio_bound: f64,
    pub gate_estimates: Vec<GateEstimateRow>,
}

pub fn measurement_report(h: &PauliSum, method: UpMethod) -> Result<MeasurementReport, MeasureError> {
    let plan = MeasurementPlan::build(h, 1.0, method)?;
    let estimate = estimate_shots(&plan, None, 1.0)?;
    let gate_estimates = plan
        .cliques
        .iter()
        .map(|c| {
            let (sq, cx) = gate_estimate(c.members.len(), h.n_qubits());
            GateEstimateRow {
                clique_size: c.members.len(),
                single_qubit_upper: sq,
                cnot_upper: cx,
            }
        })
        .collect();
    Ok(MeasurementReport {
        terms_before: plan.term_count(),
        cliques_after: plan.clique_count(),
        ratio_bound: estimate.bound,
        gate_estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pauli::PauliTerm;

    fn w(s: &str) -> PauliWord {
        PauliWord::parse(s).unwrap()
    }

    fn cover_is_valid(h: &PauliSum, cliques: &[Vec<PauliWord>]) {
        let mut seen = Vec::new();
        for clique in cliques {
            for i in 0..clique.len() {
                for j in (i + 1)..clique.len() {
                    assert!(
                        clique[i].anticommutes(&clique[j]).unwrap(),
                        "{} and {} share a clique but commute",
                        clique[i],
                        clique[j]
                    );
                }
            }
            seen.extend(clique.iter().copied());
        }
        let mut expected = h.words();
        expected.sort();
        seen.sort();
        assert_eq!(seen, expected);
    }

    #[test]
    fn toy_contextual_part_cover() {
        let (_, con) = crate::contextuality::extract_noncontextual(&fixtures::toy_hamiltonian());
        assert_eq!(con.len(), 7);
        let cover = clique_cover(&con);
        cover_is_valid(&con, &cover);
        assert!(cover.len() < con.len());
    }

    #[test]
    fn all_commuting_cover_is_singletons() {
        let h = PauliSum::from_strings(&[("ZI", 1.0), ("IZ", 0.5), ("ZZ", 0.25)]).unwrap();
        let cover = clique_cover(&h);
        assert_eq!(cover.len(), 3);
        assert!(cover.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn fully_anticommuting_single_clique() {
        let h = PauliSum::from_strings(&[("X", 0.3), ("Y", 0.4), ("Z", 0.5)]).unwrap();
        let cover = clique_cover(&h);
        assert_eq!(cover.len(), 1);
        assert_eq!(cover[0].len(), 3);
    }

    #[test]
    fn cover_is_deterministic() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alphabet = ['I', 'X', 'Y', 'Z'];
        let mut h = PauliSum::new(5);
        for _ in 0..60 {
            let s: String = (0..5).map(|_| alphabet[rng.gen_range(0..4)]).collect();
            h.add_term(PauliTerm::real(w(&s), rng.gen::<f64>() - 0.5))
                .unwrap();
        }
        let a = clique_cover(&h);
        let b = clique_cover(&h);
        assert_eq!(a, b);
        cover_is_valid(&h, &a);
    }

    #[test]
    fn plan_norms_are_consistent() {
        let h = fixtures::toy_hamiltonian();
        let plan = MeasurementPlan::build(&h, 0.01, UpMethod::Lcu).unwrap();
        for clique in &plan.cliques {
            let gamma: f64 = clique.members.iter().map(|(_, c)| c * c).sum::<f64>().sqrt();
            assert!((gamma - clique.norm).abs() < 1e-12);
        }
        // identity-free toy Hamiltonian: every term in exactly one clique
        assert_eq!(plan.term_count(), h.len());
    }

    #[test]
    fn singleton_cliques_give_unit_ratio() {
        let h = PauliSum::from_strings(&[("ZI", 1.0), ("IZ", 0.5), ("ZZ", 0.25)]).unwrap();
        let plan = MeasurementPlan::build(&h, 0.1, UpMethod::Lcu).unwrap();
        let est = estimate_shots(&plan, None, 0.1).unwrap();
        assert!((est.ratio - 1.0).abs() < 1e-12);
        assert!(est.bound >= est.ratio - 1e-9);
    }

    #[test]
    fn equal_weight_clique_ratio_is_clique_size() {
        let h = PauliSum::from_strings(&[("XI", 0.5), ("YI", 0.5), ("ZX", 0.5), ("ZY", 0.5)])
            .unwrap();
        let cover = clique_cover(&h);
        assert_eq!(cover.len(), 1);
        let plan = MeasurementPlan::build(&h, 1.0, UpMethod::Lcu).unwrap();
        let est = estimate_shots(&plan, None, 1.0).unwrap();
        assert!((est.ratio - 4.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_variance_is_rejected() {
        let h = PauliSum::from_strings(&[("X", 1.0)]).unwrap();
        let plan = MeasurementPlan::build(&h, 1.0, UpMethod::Lcu).unwrap();
        let bad = |_: &PauliWord| 1.5;
        assert!(matches!(
            estimate_shots(&plan, Some(&bad), 1.0),
            Err(MeasureError::InvalidVariance(_))
        ));
    }

    #[test]
    fn gate_estimates() {
        assert_eq!(gate_estimate(1, 4), (0, 0));
        assert_eq!(gate_estimate(2, 4), (4, 4));
        assert_eq!(gate_estimate(3, 4), (8, 8));
    }

    #[test]
    fn stabilizer_state_has_zero_empirical_variance() {
        // |00⟩ is a +1 eigenstate of ZI; clique {ZI, XI... } reduce leaves ZI
        let h = PauliSum::from_strings(&[("ZI", 0.8)]).unwrap();
        let plan = MeasurementPlan::build(&h, 1.0, UpMethod::SeqRot).unwrap();
        let state = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let (energy, variances) = simulate_shots(&state, &plan, 2000, 7).unwrap();
        assert!((energy - 0.8).abs() < 1e-12);
        assert!(variances[0].abs() < 1e-12);
    }

    #[test]
    fn eigenstate_energy_estimate_converges() {
        let h = fixtures::toy_hamiltonian();
        let (e0, ground) = crate::eigen::ground_state(&h).unwrap();
        let plan = MeasurementPlan::build(&h, 1.0, UpMethod::Lcu).unwrap();
        // exact per-clique expectations must reproduce the energy exactly
        let mut exact = plan.identity_offset;
        for clique in &plan.cliques {
            let mut c_exp = 0.0;
            for (word, coeff) in &clique.members {
                c_exp += coeff / clique.norm * statevec::expectation_word(word, &ground);
            }
            exact += clique.norm * c_exp;
        }
        assert!((exact - e0).abs() < 1e-10);

        let shots = 100_000u64;
        let (estimate, _) = simulate_shots(&ground, &plan, shots, 3).unwrap();
        // predicted standard error from exact clique variances
        let mut var_sum = 0.0;
        for clique in &plan.cliques {
            let op = clique.rotation.as_sum();
            let mut rotated = vec![Complex64::new(0.0, 0.0); ground.len()];
            for (w, c) in op.iter() {
                statevec::apply_word(w, *c, &ground, &mut rotated);
            }
            let expect = statevec::expectation_word(&clique.rotation.target(), &rotated);
            var_sum += clique.norm * clique.norm * (1.0 - expect * expect);
        }
        let sigma = (var_sum / shots as f64).sqrt();
        assert!(
            (estimate - e0).abs() < 5.0 * sigma.max(1e-9),
            "estimate {estimate} vs {e0} (5σ = {})",
            5.0 * sigma
        );
    }

    #[test]
    fn sequential_anticommuting_pairs_have_zero_covariance() {
        use rand::{Rng, SeedableRng};
        // random 2-qubit state, anticommuting pair (XI, ZI)
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut state: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        statevec::normalize(&mut state);
        let shots = 20_000u64;
        let samples =
            sequential_pair_samples(&state, &w("XI"), &w("ZI"), shots, 5).unwrap();
        let mean_a: f64 = samples.iter().map(|(a, _)| *a as f64).sum::<f64>() / shots as f64;
        let mean_b: f64 = samples.iter().map(|(_, b)| *b as f64).sum::<f64>() / shots as f64;
        let cov: f64 = samples
            .iter()
            .map(|(a, b)| (*a as f64 - mean_a) * (*b as f64 - mean_b))
            .sum::<f64>()
            / (shots - 1) as f64;
        // Var of the product estimate ≈ 1/shots ⇒ 5σ ≈ 5/√shots
        assert!(cov.abs() < 5.0 / (shots as f64).sqrt(), "cov = {cov}");
    }

    #[test]
    fn single_qubit_operator_plan_is_trivial() {
        // the fully anticommuting single-qubit algebra: one clique of {X,Y,Z}
        let h = PauliSum::from_strings(&[("I", -1.827), ("X", -0.414), ("Z", -0.292), ("Y", 0.648)])
            .unwrap();
        let plan = MeasurementPlan::build(&h, 1e-3, UpMethod::Lcu).unwrap();
        assert!(plan.clique_count() <= 3);
        assert!((plan.identity_offset - (-1.827)).abs() < 1e-12);
    }

    #[test]
    fn report_shapes() {
        let h = PauliSum::from_strings(&[("XY", 0.4)]).unwrap();
        let report = measurement_report(&h, UpMethod::Lcu).unwrap();
        assert_eq!(report.terms_before, 1);
        assert_eq!(report.cliques_after, 1);
        assert!((report.ratio_bound - 1.0).abs() < 1e-12);
    }
}
