//! Browser bindings for the reduction pipeline: JSON in, JSON out, so the
//! page needs no framework. Built single-threaded (no `parallel` feature).

use csvqe::contextuality::{
    decompose_cliques, extract_noncontextual, is_contextual, partition_commuting,
    peres_mermin_demo, structure_of,
};
use csvqe::io::HamiltonianFile;
use csvqe::measurement::{estimate_shots, MeasurementPlan};
use csvqe::partitioning::UpMethod;
use csvqe::pauli::PauliSum;
use csvqe::stabilizer::{cs_vqe_reduce, ReductionOptions};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse(hamiltonian_json: &str) -> Result<PauliSum, JsError> {
    let file: HamiltonianFile =
        serde_json::from_str(hamiltonian_json).map_err(|e| JsError::new(&e.to_string()))?;
    file.to_sum().map_err(|e| JsError::new(&e.to_string()))
}

fn method_of(name: &str) -> Result<UpMethod, JsError> {
    match name {
        "seqrot" => Ok(UpMethod::SeqRot),
        "lcu" => Ok(UpMethod::Lcu),
        other => Err(JsError::new(&format!("unknown method {other:?}"))),
    }
}

/// The embedded 4-qubit example, ready to paste into the input box.
#[wasm_bindgen]
pub fn toy_example() -> String {
    let file = HamiltonianFile::from_sum(
        &csvqe::fixtures::toy_hamiltonian(),
        std::collections::BTreeMap::new(),
    );
    serde_json::to_string_pretty(&file).unwrap()
}

/// Contextuality verdict plus the noncontextual split summary.
#[wasm_bindgen]
pub fn check_contextual(hamiltonian_json: &str) -> Result<String, JsError> {
    let h = parse(hamiltonian_json)?;
    let words = h.words();
    let contextual = is_contextual(&words).map_err(|e| JsError::new(&e.to_string()))?;
    let (z, t) = partition_commuting(&words).map_err(|e| JsError::new(&e.to_string()))?;
    let clique_sizes: Vec<usize> = if contextual {
        Vec::new()
    } else {
        decompose_cliques(&t)
            .map(|cs| cs.iter().map(|c| c.len()).collect())
            .unwrap_or_default()
    };
    let (noncon, con) = extract_noncontextual(&h);
    let generators: Vec<String> = structure_of(&noncon)
        .map(|s| s.generators.iter().map(|g| g.to_string()).collect())
        .unwrap_or_default();
    Ok(serde_json::to_string_pretty(&json!({
        "contextual": contextual,
        "z_size": z.len(),
        "clique_sizes": clique_sizes,
        "noncontextual_terms": noncon.len(),
        "contextual_terms": con.len(),
        "generators": generators,
    }))
    .unwrap())
}

/// Full reduction sweep; rows are plot-ready (qubits, terms, energy, ΔE).
#[wasm_bindgen]
pub fn reduce(hamiltonian_json: &str, method: &str, legacy: bool) -> Result<String, JsError> {
    let h = parse(hamiltonian_json)?;
    let opts = ReductionOptions {
        method: method_of(method)?,
        legacy_full_rotation: legacy,
        ..ReductionOptions::default()
    };
    let outcome = cs_vqe_reduce(&h, None, &opts).map_err(|e| JsError::new(&e.to_string()))?;
    let rows: Vec<_> = outcome
        .levels
        .iter()
        .map(|level| {
            json!({
                "qubits": level.kept_qubits,
                "terms": level.reduced.len(),
                "energy": level.energy,
                "delta_e": (level.energy - outcome.full_ground_energy).abs(),
                "fixed": level.fixed_description,
                "hamiltonian": level.reduced.to_string(),
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&json!({
        "noncontextual_energy": outcome.noncontextual_energy,
        "full_ground_energy": outcome.full_ground_energy,
        "stabilizers": outcome.w_all_description,
        "rows": rows,
    }))
    .unwrap())
}

/// Anticommuting clique cover and measurement-cost estimates.
#[wasm_bindgen]
pub fn measure_plan(hamiltonian_json: &str, epsilon: f64) -> Result<String, JsError> {
    let h = parse(hamiltonian_json)?;
    let plan = MeasurementPlan::build(&h, epsilon, UpMethod::Lcu)
        .map_err(|e| JsError::new(&e.to_string()))?;
    let shots = estimate_shots(&plan, None, epsilon).map_err(|e| JsError::new(&e.to_string()))?;
    let cliques: Vec<_> = plan
        .cliques
        .iter()
        .map(|c| {
            json!({
                "size": c.members.len(),
                "norm": c.norm,
                "members": c.members.iter().map(|(w, c)| format!("{c:+.4}·{w}")).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&json!({
        "terms_before": plan.term_count(),
        "cliques_after": plan.clique_count(),
        "m_grouped": shots.m_grouped,
        "m_ungrouped": shots.m_ungrouped,
        "ratio": shots.ratio,
        "bound": shots.bound,
        "cliques": cliques,
    }))
    .unwrap())
}

/// The observable-square demonstration values (quantum, classical).
#[wasm_bindgen]
pub fn peres_mermin() -> String {
    let (quantum, classical) = peres_mermin_demo();
    serde_json::to_string(&json!({"quantum": quantum, "classical_bound": classical})).unwrap()
}
