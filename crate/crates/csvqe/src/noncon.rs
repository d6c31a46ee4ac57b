//! Classical solution of the noncontextual Hamiltonian.
//!
//! A noncontextual state is a pair `(q, r)`: one ±1 value per generator and a
//! unit vector of clique-representative expectations. The energy is inferred
//! term by term through the structure's inference table; the ground state is
//! found by brute force over all `2^|G|` sign assignments, minimizing over
//! the unit sphere in `r` for each.

use crate::contextuality::NoncontextualStructure;
use crate::exec;
use crate::pauli::{PauliSum, PauliWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Brute force is refused above this many generators.
pub const MAX_GENERATORS: usize = 24;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("word {0} is not covered by the inference table")]
    UnknownWord(String),
    #[error("state dimensions ({q} signs, {r} amplitudes) do not match the structure")]
    DimensionMismatch { q: usize, r: usize },
    #[error("{0} generators exceed the brute-force guard of {MAX_GENERATORS}")]
    TooManyGenerators(usize),
}

/// The `(q, r)` pair parameterizing a noncontextual state.
#[derive(Debug, Clone, PartialEq)]
pub struct NoncontextualState {
    pub q: Vec<i8>,
    pub r: Vec<f64>,
}

impl NoncontextualState {
    pub fn new(q: Vec<i8>, r: Vec<f64>) -> Self {
        assert!(q.iter().all(|v| *v == 1 || *v == -1));
        let norm: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(
            r.is_empty() || (norm - 1.0).abs() < 1e-10,
            "r must be a unit vector (|r| = {norm})"
        );
        NoncontextualState { q, r }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_evals: usize,
    pub simplex_tol: f64,
    pub seed: u64,
    /// Record the per-assignment optimum (diagnostic, small |G| only).
    pub per_q_energies: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 16,
            max_evals: 5000,
            simplex_tol: 1e-12,
            seed: 0,
            per_q_energies: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub state: NoncontextualState,
    pub energy: f64,
    pub per_q_energies: Option<BTreeMap<String, f64>>,
}

/// Expectation of a single word of `S` under `(q, r)`: the recorded phase
/// times the product of generator signs, times `r_j` for clique members.
pub fn infer_expectation(
    word: &PauliWord,
    structure: &NoncontextualStructure,
    state: &NoncontextualState,
) -> Result<f64, SolverError> {
    check_dims(structure, state)?;
    let inf = structure
        .inference
        .get(word)
        .ok_or_else(|| SolverError::UnknownWord(word.to_string()))?;
    let mut value = inf.phase.as_sign();
    for i in &inf.generator_indices {
        value *= state.q[*i] as f64;
    }
    if let Some(j) = inf.clique {
        value *= state.r[j];
    }
    Ok(value)
}

fn check_dims(
    structure: &NoncontextualStructure,
    state: &NoncontextualState,
) -> Result<(), SolverError> {
    if state.q.len() != structure.generator_count() || state.r.len() != structure.clique_count() {
        return Err(SolverError::DimensionMismatch {
            q: state.q.len(),
            r: state.r.len(),
        });
    }
    Ok(())
}

/// `Σ c_P ⟨P⟩` over the noncontextual Hamiltonian.
pub fn energy(
    h_noncon: &PauliSum,
    structure: &NoncontextualStructure,
    state: &NoncontextualState,
) -> Result<f64, SolverError> {
    check_dims(structure, state)?;
    let mut total = 0.0;
    for (word, coeff) in h_noncon.iter() {
        total += coeff.re * infer_expectation(word, structure, state)?;
    }
    Ok(total)
}

/// For a fixed `q`, the energy is `constant + w · r`; collect the pieces.
fn linear_form(
    h_noncon: &PauliSum,
    structure: &NoncontextualStructure,
    q: &[i8],
) -> Result<(f64, Vec<f64>), SolverError> {
    let mut constant = 0.0;
    let mut weights = vec![0.0; structure.clique_count()];
    for (word, coeff) in h_noncon.iter() {
        let inf = structure
            .inference
            .get(word)
            .ok_or_else(|| SolverError::UnknownWord(word.to_string()))?;
        let mut value = inf.phase.as_sign() * coeff.re;
        for i in &inf.generator_indices {
            value *= q[*i] as f64;
        }
        match inf.clique {
            Some(j) => weights[j] += value,
            None => constant += value,
        }
    }
    Ok((constant, weights))
}

/// Hyperspherical angles → unit vector.
fn angles_to_unit(angles: &[f64], dim: usize) -> Vec<f64> {
    debug_assert_eq!(angles.len() + 1, dim);
    let mut r = vec![0.0; dim];
    let mut sines = 1.0;
    for (i, theta) in angles.iter().enumerate() {
        r[i] = sines * theta.cos();
        sines *= theta.sin();
    }
    r[dim - 1] = sines;
    r
}

/// Nelder–Mead direct search over hyperspherical angles.
fn minimize_on_sphere(
    constant: f64,
    weights: &[f64],
    config: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<f64>) {
    let dim = weights.len();
    match dim {
        0 => return (constant, Vec::new()),
        1 => {
            // the 0-sphere: just two points
            let plus = constant + weights[0];
            let minus = constant - weights[0];
            return if plus <= minus {
                (plus, vec![1.0])
            } else {
                (minus, vec![-1.0])
            };
        }
        _ => {}
    }
    let d = dim - 1;
    let f = |angles: &[f64]| -> f64 {
        let r = angles_to_unit(angles, dim);
        constant + weights.iter().zip(&r).map(|(w, x)| w * x).sum::<f64>()
    };

    let mut best_val = f64::INFINITY;
    let mut best_angles = vec![0.0; d];
    for _ in 0..config.restarts.max(1) {
        let start: Vec<f64> = (0..d)
            .map(|_| rng.gen::<f64>() * std::f64::consts::PI)
            .collect();
        let (val, angles) = nelder_mead(&f, &start, config.simplex_tol, config.max_evals);
        if val < best_val {
            best_val = val;
            best_angles = angles;
        }
    }
    (best_val, angles_to_unit(&best_angles, dim))
}

/// Textbook Nelder–Mead; converges when the value spread across the simplex
/// drops below `tol` or the evaluation budget is spent.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    tol: f64,
    max_evals: usize,
) -> (f64, Vec<f64>) {
    let d = start.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..d {
        let mut v = start.to_vec();
        v[i] += 0.5;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();

    while evals < max_evals {
        let mut order: Vec<usize> = (0..simplex.len()).collect();
        order.sort_by(|a, b| values[*a].partial_cmp(&values[*b]).unwrap());
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d.saturating_sub(1)];
        if values[worst] - values[best] < tol {
            break;
        }
        // centroid of all but the worst
        let mut centroid = vec![0.0; d];
        for &i in order.iter().take(d) {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / d as f64;
            }
        }
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| 2.0 * c - w)
            .collect();
        let fr = eval(&reflect, &mut evals);
        if fr < values[best] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| 3.0 * c - 2.0 * w)
                .collect();
            let fe = eval(&expand, &mut evals);
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| 0.5 * (c + w))
                .collect();
            let fc = eval(&contract, &mut evals);
            if fc < values[worst] {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                // shrink toward the best vertex
                let anchor = simplex[best].clone();
                for i in 0..simplex.len() {
                    if i == best {
                        continue;
                    }
                    simplex[i] = anchor
                        .iter()
                        .zip(&simplex[i])
                        .map(|(a, x)| 0.5 * (a + x))
                        .collect();
                    values[i] = eval(&simplex[i], &mut evals);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] {
            best = i;
        }
    }
    (values[best], simplex[best].clone())
}

/// Brute-force ground state: all ±1 assignments of `q`, each minimized over
/// the unit sphere in `r`. Ties within 1e-9 resolve to the lexicographically
/// smallest `q` (−1 < +1).
pub fn solve(
    h_noncon: &PauliSum,
    structure: &NoncontextualStructure,
    config: &OptimizerConfig,
) -> Result<SolveResult, SolverError> {
    let g = structure.generator_count();
    if g > MAX_GENERATORS {
        return Err(SolverError::TooManyGenerators(g));
    }
    let assignments = 1u64 << g;

    // q_i from bit (g-1-i): ascending index = lexicographic order with -1 < +1
    let q_of = |idx: u64| -> Vec<i8> {
        (0..g)
            .map(|i| {
                if (idx >> (g - 1 - i)) & 1 == 0 {
                    -1
                } else {
                    1
                }
            })
            .collect()
    };

    let evaluate = |idx: u64| -> Result<(u64, f64, Vec<f64>), SolverError> {
        let q = q_of(idx);
        let (constant, weights) = linear_form(h_noncon, structure, &q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(idx + 1)));
        let (value, r) = minimize_on_sphere(constant, &weights, config, &mut rng);
        Ok((idx, value, r))
    };

    let results = exec::try_par_map_range(assignments, evaluate)?;

    let mut best: Option<(u64, f64, Vec<f64>)> = None;
    for (idx, value, r) in results.iter() {
        match &best {
            None => best = Some((*idx, *value, r.clone())),
            Some((_, bv, _)) => {
                if *value < bv - 1e-9 {
                    best = Some((*idx, *value, r.clone()));
                }
            }
        }
    }
    let (best_idx, best_energy, best_r) = best.expect("at least one assignment");

    let per_q = if config.per_q_energies {
        let mut map = BTreeMap::new();
        for (idx, value, _) in &results {
            let key: String = q_of(*idx)
                .iter()
                .map(|s| if *s > 0 { '+' } else { '-' })
                .collect();
            map.insert(key, *value);
        }
        Some(map)
    } else {
        None
    };

    Ok(SolveResult {
        state: NoncontextualState::new(q_of(best_idx), best_r),
        energy: best_energy,
        per_q_energies: per_q,
    })
}
