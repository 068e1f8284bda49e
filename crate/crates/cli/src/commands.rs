use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use coinrep_core::errata::{self, ErrataConfig, ErrataLedger, Verdict};
use coinrep_core::evolve::{self, EvolutionProblem, EvolveError, Method, Trajectory};
use coinrep_core::exec::Execution;
use coinrep_core::mat4prob::{self, ProbTable15, TCheckReport};
use coinrep_core::observable::DichotomicObservable;
use coinrep_core::qubit::{self, BlochVector, ProbabilityTriple};
use coinrep_core::superpose::{self, SuperpositionInput, SweepConfig, WeightMapping};
use coinrep_core::suprematism::{self, Layout, RenderSpec};
use serde::Serialize;

use crate::error::CliError;
use crate::state::{self, ComplexMatrix2, State};
use crate::{
    CheckArgs, Command, ErrataArgs, EvolveArgs, LayoutArg, MatrixCommand, MethodArg, RenderArgs,
    SuperposeArgs, WeightsConvention,
};

/// Largest permutation mismatch `matrix t-check` accepts.
pub const T_CHECK_TOL: f64 = 1e-14;

pub fn run(cmd: Command, exec: Execution) -> Result<u8, CliError> {
    match cmd {
        Command::Check(a) => check(&a),
        Command::Superpose(a) => superpose(&a, exec),
        Command::Evolve(a) => evolve(&a),
        Command::Render(a) => render(&a),
        Command::Matrix { command } => matrix(command, exec),
        Command::Errata(a) => errata(&a, exec),
    }
}

fn to_pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

/// Writes to `out` or, when absent, to stdout.
fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

#[derive(Serialize)]
struct Tsallis {
    q: f64,
    value: Option<f64>,
}

#[derive(Serialize)]
struct CheckReport {
    state: ProbabilityTriple,
    quantum: bool,
    pure: bool,
    margin: f64,
    /// Descending; absent outside the quantum ball.
    lambda: Option<[f64; 2]>,
    bloch: BlochVector,
    entropy_vn: Option<f64>,
    entropy_tsallis: Tsallis,
}

fn check(a: &CheckArgs) -> Result<u8, CliError> {
    if !(a.q.is_finite() && a.q > 0.0 && a.q != 1.0) {
        return Err(CliError::Schema(format!("--q must be positive and != 1, got {}", a.q)));
    }
    let p = state::load(&a.state)?.triple()?;
    let qc = qubit::is_quantum(&p);
    let spec = qubit::spectral(&p).ok();
    let report = CheckReport {
        state: p,
        quantum: qc.quantum,
        pure: qc.quantum && qubit::is_pure(&p),
        margin: qc.margin,
        lambda: spec.map(|s| [s.lambda1, s.lambda2]),
        bloch: qubit::bloch(&p),
        entropy_vn: qubit::von_neumann_entropy(&p).ok(),
        entropy_tsallis: Tsallis {
            q: a.q,
            value: qubit::tsallis_entropy(&p, a.q).ok(),
        },
    };
    emit(&to_pretty(&report), None)?;
    Ok(if qc.quantum { 0 } else { 2 })
}

#[derive(Serialize)]
struct OracleReport {
    /// Deviation from the normalized `c1 psi1 + c2 psi2`.
    coefficient_state_deviation: f64,
    /// Mapping used for the operator form; `null` when the sweep selects none.
    weights_convention: Option<WeightMapping>,
    /// Why no convention was selected.
    #[serde(skip_serializing_if = "Option::is_none")]
    convention_note: Option<String>,
    /// Operator-form deviation per mapping; `null` where the form is undefined.
    operator_form_deviation: BTreeMap<&'static str, Option<f64>>,
}

#[derive(Serialize)]
struct SuperposeReport {
    result: ProbabilityTriple,
    normalizer: f64,
    purity_residual: f64,
    oracle: OracleReport,
}

fn superpose(a: &SuperposeArgs, exec: Execution) -> Result<u8, CliError> {
    let input = SuperpositionInput {
        p: state::load(&a.state1)?.triple()?,
        big_p: state::load(&a.state2)?.triple()?,
        key: state::load(&a.key)?.triple()?,
    };
    let out = superpose::superpose_probabilities(&input).map_err(CliError::domain)?;
    let coeff = superpose::coefficient_oracle(&input)
        .and_then(|m| Ok(qubit::from_coin_matrix(&m)?))
        .map_err(CliError::domain)?;

    let (selected, mappings, note) = match a.weights_convention {
        WeightsConvention::KeyPopulation => (Some(WeightMapping::KeyPopulation), vec![WeightMapping::KeyPopulation], None),
        WeightsConvention::Equal => (Some(WeightMapping::Equal), vec![WeightMapping::Equal], None),
        WeightsConvention::Auto => {
            let cfg = SweepConfig {
                seed: a.seed,
                samples: a.samples,
                exec,
            };
            match superpose::resolve_weight_convention(&cfg).convention() {
                Ok(m) => (Some(m), vec![m], None),
                Err(e) => (None, WeightMapping::ALL.to_vec(), Some(e.to_string())),
            }
        }
    };
    let operator_form_deviation = mappings
        .into_iter()
        .map(|m| (m.id(), superpose::oracle_deviation(&input, m).ok()))
        .collect();

    let report = SuperposeReport {
        result: out.result,
        normalizer: out.normalizer,
        purity_residual: out.purity_residual,
        oracle: OracleReport {
            coefficient_state_deviation: out.result.max_abs_diff(&coeff),
            weights_convention: selected,
            convention_note: note,
            operator_form_deviation,
        },
    };
    if let Some(path) = &a.out {
        state::save(path, &State::ProbabilityTriple(out.result))?;
    }
    emit(&to_pretty(&report), None)?;
    Ok(0)
}

#[derive(Serialize)]
struct SampleRow {
    t: f64,
    p1: f64,
    p2: f64,
    p3: f64,
    eigenvalue_drift: f64,
}

#[derive(Serialize)]
struct TrajectoryOut {
    method: Method,
    max_eigenvalue_drift: f64,
    samples: Vec<SampleRow>,
}

impl From<&Trajectory> for TrajectoryOut {
    fn from(tr: &Trajectory) -> Self {
        let samples = tr
            .samples
            .iter()
            .zip(tr.eigenvalue_drift())
            .map(|(s, d)| SampleRow {
                t: s.t,
                p1: s.p.p1(),
                p2: s.p.p2(),
                p3: s.p.p3(),
                eigenvalue_drift: d,
            })
            .collect();
        TrajectoryOut {
            method: tr.method,
            max_eigenvalue_drift: tr.max_eigenvalue_drift(),
            samples,
        }
    }
}

#[derive(Serialize)]
struct TrajectoryFile {
    schema_version: u64,
    initial: ProbabilityTriple,
    hamiltonian: DichotomicObservable,
    t_final: f64,
    steps: usize,
    trajectories: Vec<TrajectoryOut>,
    /// Largest component gap between the two methods (`--method both`).
    #[serde(skip_serializing_if = "Option::is_none")]
    max_deviation: Option<f64>,
}

fn evolve_error(e: EvolveError) -> CliError {
    match e {
        EvolveError::InvalidProblem(m) => CliError::Schema(m),
        other => CliError::domain(other),
    }
}

fn evolve(a: &EvolveArgs) -> Result<u8, CliError> {
    let [x, y, z1, z2] = a.obs;
    let h = DichotomicObservable::new(x, y, z1, z2).map_err(|e| CliError::Schema(e.to_string()))?;
    let p = state::load(&a.state)?.triple()?;
    let prob = EvolutionProblem::new(p, h, a.t, a.steps).map_err(evolve_error)?;

    let mut runs = Vec::new();
    if a.method != MethodArg::Integrator {
        runs.push(evolve::propagate(&prob).map_err(evolve_error)?);
    }
    if a.method != MethodArg::Propagator {
        runs.push(evolve::integrate_vonneumann(&prob).map_err(evolve_error)?);
    }
    let max_deviation = (runs.len() == 2).then(|| runs[0].max_deviation(&runs[1]));
    let file = TrajectoryFile {
        schema_version: state::SCHEMA_VERSION,
        initial: p,
        hamiltonian: h,
        t_final: a.t,
        steps: a.steps,
        trajectories: runs.iter().map(TrajectoryOut::from).collect(),
        max_deviation,
    };
    emit(&to_pretty(&file), a.out.as_deref())?;
    if let (Some(d), Some(_)) = (max_deviation, &a.out) {
        println!("max deviation between methods: {d:e}");
    }
    Ok(0)
}

fn render(a: &RenderArgs) -> Result<u8, CliError> {
    let p = state::load(&a.state)?.triple()?;
    let spec = RenderSpec {
        width: a.width,
        height: a.height,
        scale: a.scale,
        layout: match a.layout {
            LayoutArg::Triangle => Layout::Triangle,
            LayoutArg::Triada => Layout::Triada,
            LayoutArg::Tower => Layout::Tower,
        },
        ..RenderSpec::default()
    };
    let svg = suprematism::render_svg(&p, &spec).map_err(|e| CliError::Schema(e.to_string()))?;
    emit(&svg, Some(&a.out))?;
    Ok(0)
}

fn load_table(path: &Path) -> Result<ProbTable15, CliError> {
    match state::load(path)? {
        State::ProbTable15(t) => Ok(t),
        other => Err(CliError::Schema(format!(
            "{}: expected a prob-table-15 state, got {}",
            path.display(),
            other.kind()
        ))),
    }
}

fn load_amplitude(path: &Path) -> Result<ComplexMatrix2, CliError> {
    match state::load(path)? {
        State::Amplitude2(m) => Ok(m),
        other => Err(CliError::Schema(format!(
            "{}: expected an amplitude2 state, got {}",
            path.display(),
            other.kind()
        ))),
    }
}

fn matrix(cmd: MatrixCommand, exec: Execution) -> Result<u8, CliError> {
    match cmd {
        MatrixCommand::Parametrize { file, out } => {
            let a = load_amplitude(&file)?.to_cmat()?;
            let table = mat4prob::probs_from_amplitude2(&a).map_err(CliError::domain)?;
            emit(&state::to_json(&State::ProbTable15(table)), out.as_deref())?;
            Ok(0)
        }
        MatrixCommand::Reconstruct { file, out } => {
            let table = load_table(&file)?;
            let a = mat4prob::amplitude2_from_probs(&table).map_err(CliError::domain)?;
            let m = State::Amplitude2(ComplexMatrix2::from_cmat(&a));
            emit(&state::to_json(&m), out.as_deref())?;
            Ok(0)
        }
        MatrixCommand::TCheck { seed, samples } => {
            let report: TCheckReport = mat4prob::t_check(seed, samples, exec);
            emit(&to_pretty(&report), None)?;
            let ok = report.is_permutation && report.max_deviation < T_CHECK_TOL;
            Ok(if ok { 0 } else { 2 })
        }
    }
}

fn errata_table(ledger: &ErrataLedger) -> String {
    let mut s = format!(
        "errata ledger (seed {}, {} samples, confirm above {:e}, match below {:e})\n\n",
        ledger.seed, ledger.samples, ledger.confirm_tol, ledger.match_tol
    );
    s += &format!(
        "{:<30} {:<10} {:<14} {:>12} {:>12}\n",
        "id", "source", "verdict", "printed", "corrected"
    );
    for e in &ledger.entries {
        let verdict = match e.verdict {
            Verdict::Confirmed => "confirmed",
            Verdict::NotConfirmed => "NOT CONFIRMED",
        };
        let source = if e.documented { "documented" } else { "additional" };
        s += &format!(
            "{:<30} {:<10} {:<14} {:>12.3e} {:>12.3e}\n",
            e.id, source, verdict, e.printed_deviation, e.corrected_deviation
        );
        s += &format!("    {}\n    printed:   {}\n    corrected: {}\n", e.summary, e.printed, e.corrected);
    }
    s += "\nnotation slips:\n";
    for n in &ledger.notation {
        s += &format!("    {n}\n");
    }
    s += &format!(
        "\n{} documented and {} additional errata confirmed\n",
        ledger.documented_confirmed, ledger.additional_confirmed
    );
    s
}

fn errata(a: &ErrataArgs, exec: Execution) -> Result<u8, CliError> {
    if a.samples == 0 {
        return Err(CliError::Schema("--samples must be positive".into()));
    }
    let ledger = errata::run(&ErrataConfig {
        seed: a.seed,
        samples: a.samples,
        exec,
    });
    let text = if a.json {
        to_pretty(&ledger)
    } else {
        errata_table(&ledger)
    };
    emit(&text, None)?;
    let unexpected = ledger.unexpected();
    for e in &unexpected {
        eprintln!("coinrep: unexpected verdict for {}", e.id);
    }
    Ok(if unexpected.is_empty() { 0 } else { 2 })
}
