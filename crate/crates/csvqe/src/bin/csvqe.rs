//! Command-line front door: contextuality checks, the full reduction
//! pipeline, measurement planning, exact eigensolves, and the built-in
//! demonstrations.
//!
//! Exit codes: 0 success, 1 usage, 2 input, 3 computation guard.

use clap::{Parser, Subcommand, ValueEnum};
use csvqe::contextuality::{
    decompose_cliques, extract_noncontextual, is_contextual, partition_commuting,
    peres_mermin_demo, structure_of,
};
use csvqe::eigen;
use csvqe::fixtures;
use csvqe::io::{self, ReductionReport};
use csvqe::measurement::{estimate_shots, measurement_report, MeasurementPlan};
use csvqe::noncon::{solve, OptimizerConfig};
use csvqe::partitioning::{build_lcu, build_seqrot, UpMethod};
use csvqe::pauli::PauliWord;
use csvqe::stabilizer::{build_w_all, cs_vqe_reduce, ReductionOptions, StabilizerError};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(
    name = "csvqe",
    about = "Contextual-subspace reduction and measurement planning for qubit Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Seqrot,
    Lcu,
}

impl From<MethodArg> for UpMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Seqrot => UpMethod::SeqRot,
            MethodArg::Lcu => UpMethod::Lcu,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Test a Hamiltonian file for strong contextuality.
    CheckContextual {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the reduction pipeline; sweeps every keep level unless --keep is given.
    Reduce {
        #[arg(long)]
        input: PathBuf,
        /// Number of qubits to keep (omit for a full sweep).
        #[arg(long)]
        keep: Option<usize>,
        #[arg(long, value_enum, default_value = "lcu")]
        method: MethodArg,
        /// Always apply the full-stabilizer rotation (comparison mode).
        #[arg(long)]
        legacy_full_rotation: bool,
        /// Random restarts per sign assignment in the noncontextual solve.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Simplex spread at which the direct search stops.
        #[arg(long, default_value_t = 1e-12)]
        opt_tolerance: f64,
        /// Evaluation budget per direct-search run.
        #[arg(long, default_value_t = 5000)]
        max_evals: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Emit the tabular section as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Partition into anticommuting cliques and estimate measurement costs.
    MeasurePlan {
        #[arg(long)]
        input: PathBuf,
        /// Target precision on the energy estimate.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "lcu")]
        method: MethodArg,
        /// Also sample the plan on the exact ground state with this many shots.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact ground energy of a Hamiltonian file.
    Eigensolve {
        #[arg(long)]
        input: PathBuf,
    },
    /// Built-in walkthroughs: `toy` or `peres-mermin`.
    Demo { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap help/version are not usage errors
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => err.report(),
    }
}

enum CliError {
    Input(String),
    Guard(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Input(msg) => {
                eprintln!("input error: {msg}");
                ExitCode::from(EXIT_INPUT)
            }
            CliError::Guard(msg) => {
                eprintln!("computation guard: {msg}");
                ExitCode::from(EXIT_GUARD)
            }
        }
    }
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<StabilizerError> for CliError {
    fn from(e: StabilizerError) -> Self {
        CliError::Guard(e.to_string())
    }
}

impl From<eigen::EigenError> for CliError {
    fn from(e: eigen::EigenError) -> Self {
        CliError::Guard(e.to_string())
    }
}

impl From<csvqe::measurement::MeasureError> for CliError {
    fn from(e: csvqe::measurement::MeasureError) -> Self {
        CliError::Guard(e.to_string())
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::CheckContextual { input } => {
            let (h, _) = io::load_hamiltonian(&input)?;
            let words = h.words();
            let contextual = is_contextual(&words)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let (z, t) = partition_commuting(&words)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let clique_sizes: Vec<usize> = if contextual {
                Vec::new()
            } else {
                decompose_cliques(&t)
                    .map(|cs| cs.iter().map(|c| c.len()).collect())
                    .unwrap_or_default()
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "contextual": contextual,
                    "z_size": z.len(),
                    "clique_sizes": clique_sizes,
                }))
                .unwrap()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce {
            input,
            keep,
            method,
            legacy_full_rotation,
            restarts,
            opt_tolerance,
            max_evals,
            seed,
            output,
            csv,
        } => {
            let (h, _) = io::load_hamiltonian(&input)?;
            let opts = ReductionOptions {
                method: method.into(),
                legacy_full_rotation,
                optimizer: OptimizerConfig {
                    restarts,
                    seed,
                    simplex_tol: opt_tolerance,
                    max_evals,
                    ..OptimizerConfig::default()
                },
                ..ReductionOptions::default()
            };
            let outcome = cs_vqe_reduce(&h, keep, &opts)?;
            let mut pipeline = vec![
                format!("extract: |H_noncon| = {}", outcome.structure.support().len()),
                format!(
                    "solve: E_noncon = {:.6}, |G| = {}, cliques = {}",
                    outcome.noncontextual_energy,
                    outcome.structure.generator_count(),
                    outcome.structure.clique_count()
                ),
                format!("stabilizers: {}", outcome.w_all_description.join(", ")),
                format!("method: {}", opts.method),
            ];
            if legacy_full_rotation {
                pipeline.push("legacy full-stabilizer rotation".to_string());
            }
            let report = outcome.to_report(pipeline);
            emit_report(&report, output.as_deref(), csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MeasurePlan {
            input,
            epsilon,
            method,
            shots,
            seed,
            output,
        } => {
            let (h, _) = io::load_hamiltonian(&input)?;
            let method: UpMethod = method.into();
            let report = measurement_report(&h, method)?;
            let plan = MeasurementPlan::build(&h, epsilon, method)?;
            let estimate = estimate_shots(&plan, None, epsilon)?;
            let mut document = json!({
                "terms_before": report.terms_before,
                "cliques_after": report.cliques_after,
                "ratio_bound": report.ratio_bound,
                "gate_estimates": report.gate_estimates,
                "epsilon": epsilon,
                "shots": {
                    "m_grouped": estimate.m_grouped,
                    "m_ungrouped": estimate.m_ungrouped,
                    "ratio": estimate.ratio,
                    "bound": estimate.bound,
                },
            });
            if let Some(shots) = shots {
                // sample the plan on the exact ground state
                let (exact, ground) = eigen::ground_state(&h)?;
                let (sampled, _) =
                    csvqe::measurement::simulate_shots(&ground, &plan, shots, seed)?;
                document["simulated"] = json!({
                    "shots": shots,
                    "seed": seed,
                    "exact_energy": exact,
                    "sampled_energy": sampled,
                });
            }
            let text = serde_json::to_string_pretty(&document).unwrap();
            match output {
                Some(path) => std::fs::write(path, text + "\n")
                    .map_err(|e| CliError::Input(e.to_string()))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eigensolve { input } => {
            let (h, _) = io::load_hamiltonian(&input)?;
            let energy = eigen::ground_energy(&h)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "n_qubits": h.n_qubits(),
                    "terms": h.len(),
                    "ground_energy": energy,
                }))
                .unwrap()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo { name } => match name.as_str() {
            "toy" => demo_toy(),
            "peres-mermin" => {
                let (quantum, classical) = peres_mermin_demo();
                println!("row/column observable square:");
                for row in fixtures::peres_mermin_square() {
                    println!("  {}  {}  {}", row[0], row[1], row[2]);
                }
                println!("quantum value:   {quantum}");
                println!("classical bound: {classical}");
                let ok = quantum == 6 && classical == 4;
                println!("check (6, 4): {}", if ok { "pass" } else { "FAIL" });
                Ok(ExitCode::SUCCESS)
            }
            other => {
                eprintln!("unknown demo {other:?}; use `toy` or `peres-mermin`");
                Ok(ExitCode::from(EXIT_USAGE))
            }
        },
    }
}

fn emit_report(
    report: &ReductionReport,
    output: Option<&std::path::Path>,
    csv: bool,
) -> Result<(), CliError> {
    if csv {
        let text = io::report_csv(report);
        match output {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| CliError::Input(e.to_string()))?
            }
            None => print!("{text}"),
        }
    } else {
        match output {
            Some(path) => io::save_report(path, report)?,
            None => println!("{}", serde_json::to_string_pretty(report).unwrap()),
        }
    }
    Ok(())
}

fn demo_toy() -> Result<ExitCode, CliError> {
    let mut failures = 0usize;
    let mut check = |label: &str, ok: bool| {
        println!("  [{}] {label}", if ok { "pass" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    let h = fixtures::toy_hamiltonian();
    println!("toy Hamiltonian: {} terms on {} qubits", h.len(), h.n_qubits());

    let (noncon, con) = extract_noncontextual(&h);
    println!("\nnoncontextual split:");
    println!("  H_noncon: {noncon}");
    println!("  H_con:    {con}");
    check("split sizes 7 + 7", noncon.len() == 7 && con.len() == 7);
    check(
        "noncontextual part passes the triple test",
        !is_contextual(&noncon.words()).unwrap(),
    );

    let structure = structure_of(&noncon).map_err(|e| CliError::Input(e.to_string()))?;
    let mut gens: Vec<String> = structure.generators.iter().map(|g| g.to_string()).collect();
    gens.sort();
    println!("\ngenerators G = {{{}}}", gens.join(", "));
    check(
        "G = {IIIZ, IXYI, YIYI}",
        gens == vec!["IIIZ", "IXYI", "YIYI"],
    );

    let result = solve(&noncon, &structure, &OptimizerConfig::default())
        .map_err(|e| CliError::Guard(e.to_string()))?;
    println!("\nnoncontextual ground state:");
    println!("  energy = {:.6}", result.energy);
    check(
        "energy = -2.475 within 1e-3",
        (result.energy - fixtures::toy_noncontextual_energy()).abs() < 1e-3,
    );
    let expectations = [
        ("YXYI", 0.25318483),
        ("XYXI", -0.65828059),
        ("XZXI", -0.70891756),
    ];
    for (word, expect) in expectations {
        let got = csvqe::noncon::infer_expectation(
            &PauliWord::parse(word).unwrap(),
            &structure,
            &result.state,
        )
        .map_err(|e| CliError::Guard(e.to_string()))?;
        check(&format!("⟨{word}⟩ = {expect:.5}"), (got - expect).abs() < 1e-4);
    }

    let w_all = build_w_all(&structure, &result.state)
        .map_err(|e| CliError::Guard(e.to_string()))?;
    println!("\nstabilizers W_all = {{{}}}", w_all.describe().join(", "));

    let terms: Vec<(PauliWord, f64)> = structure
        .reps
        .iter()
        .zip(&result.state.r)
        .map(|(rep, r)| (*rep, *r))
        .collect();
    let a = csvqe::partitioning::AnticommutingObservable::new(terms, None)
        .map_err(|e| CliError::Guard(e.to_string()))?;
    let seqrot = build_seqrot(&a).map_err(|e| CliError::Guard(e.to_string()))?;
    println!("\nsequence-of-rotations reduction of A(r):");
    for (word, angle) in &seqrot.steps {
        println!("  exp(i·{:.10}/2·{word})", angle);
    }
    check(
        "angles (1.2036225, -0.7879623) on (ZZZI, ZYZI)",
        seqrot.steps.len() == 2
            && seqrot.steps[0].0 == PauliWord::parse("ZZZI").unwrap()
            && (seqrot.steps[0].1 - 1.2036225088338255).abs() < 1e-6
            && seqrot.steps[1].0 == PauliWord::parse("ZYZI").unwrap()
            && (seqrot.steps[1].1 + 0.7879622757719398).abs() < 1e-6,
    );
    let lcu = build_lcu(&a).map_err(|e| CliError::Guard(e.to_string()))?;
    println!("\nLCU reduction of A(r):");
    println!("  {:.8}·IIII", lcu.identity_coeff);
    for (word, coeff) in &lcu.terms {
        println!("  ({:.8}{:+.8}i)·{word}", coeff.re, coeff.im);
    }
    check(
        "LCU coefficients (0.79157591, 0.41580383i, -0.44778874i)",
        (lcu.identity_coeff - 0.79157591).abs() < 1e-6,
    );

    println!("\nreduction sweep (LCU):");
    let outcome = cs_vqe_reduce(&h, None, &ReductionOptions::default())?;
    println!("  qubits  terms  energy      ΔE");
    for level in &outcome.levels {
        println!(
            "  {:>6}  {:>5}  {:>9.4}  {:.2e}",
            level.kept_qubits,
            level.reduced.len(),
            level.energy,
            (level.energy - outcome.full_ground_energy).abs()
        );
    }
    let one_qubit = outcome
        .levels
        .iter()
        .find(|level| level.kept_qubits == 1)
        .expect("1-qubit level");
    check(
        "1-qubit reduction energy -2.6495 within 1e-3",
        (one_qubit.energy + 2.6495).abs() < 1e-3,
    );
    check(
        "energies decrease monotonically with kept qubits",
        outcome
            .levels
            .windows(2)
            .all(|pair| pair[1].energy <= pair[0].energy + 1e-10),
    );

    println!();
    if failures == 0 {
        println!("all embedded checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{failures} embedded check(s) FAILED");
        Ok(ExitCode::from(EXIT_GUARD))
    }
}
