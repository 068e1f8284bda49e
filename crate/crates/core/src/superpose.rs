//! Superposition of pure qubit states as a nonlinear rule on probabilities.
//!
//! Given the pure triples `p` and `P` of two states and a third pure triple
//! `Pi`, the addition rule returns the triple of the superposed state. It is
//! evaluated directly on probabilities; the operator form
//!
//! ```text
//! rho = l1 rho1 + l2 rho2
//!     + sqrt(l1 l2) (rho1 rho0 rho2 + rho2 rho0 rho1) / sqrt(Tr rho1 rho0 rho2 rho0)
//! ```
//!
//! is kept separately in [`superpose_oracle`] and compared against the rule by
//! [`resolve_weight_convention`].
//!
//! Algebraically the rule is the normalized vector `c1 psi1 + c2 psi2`, where
//! `psi1`, `psi2` are the state vectors of `p` and `P` with real positive
//! first components and `(c1, c2)` is the state vector of `Pi`.
//! [`coefficient_oracle`] builds that vector with matrix arithmetic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cmat::{CMat2, CVec2};
use crate::exec::{self, Execution};
use crate::qubit::{self, DensityMatrix2, ProbabilityTriple, QubitError};

/// `p3` and `P3` must exceed this (the rule divides by `sqrt(p3 P3)`).
pub const DENOMINATOR_TOL: f64 = 1e-10;
/// `|T|` below this is rejected.
pub const NORMALIZER_TOL: f64 = 1e-10;
/// Output purity tolerance.
pub const OUTPUT_PURITY_TOL: f64 = 1e-8;
/// Agreement needed for a weight mapping to be adopted.
pub const CONVENTION_TOL: f64 = 1e-8;
/// Oracle results whose raw trace is off by more than this get renormalized.
pub const TRACE_RENORM_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuperposeError {
    #[error("{which} state is not pure (residual {residual:e})")]
    NotPure { which: &'static str, residual: f64 },
    #[error("{which} has p3 = {p3:e}; the rule divides by sqrt(p3 P3)")]
    DegenerateDenominator { which: &'static str, p3: f64 },
    #[error("normalizer T = {0:e} vanishes (destructive interference)")]
    VanishingNormalizer(f64),
    #[error("Tr(rho1 rho0 rho2 rho0) = {0:e} is too small")]
    ZeroOverlapDenominator(f64),
    #[error("weights must lie in [0, 1] and sum to 1, got ({0}, {1})")]
    BadWeights(f64, f64),
    #[error("no weight mapping reproduces the operator form on orthogonal states (best max deviation {best:e})")]
    NoConsistentMapping { best: f64 },
    #[error(transparent)]
    Qubit(#[from] QubitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpositionInput {
    /// First state.
    pub p: ProbabilityTriple,
    /// Second state.
    pub big_p: ProbabilityTriple,
    /// Key state.
    pub key: ProbabilityTriple,
}

/// Raw output of the addition rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuleOutput {
    /// `(P1, P2, P3)` before any range check.
    pub probabilities: [f64; 3],
    /// The normalizer `T`.
    pub normalizer: f64,
}

/// Evaluates the addition rule term by term. Only the denominators are
/// checked; purity of the inputs is not required here.
pub fn superposition_rule(input: &SuperpositionInput) -> Result<RuleOutput, SuperposeError> {
    let SuperpositionInput { p, big_p, key } = input;
    if p.p3() <= DENOMINATOR_TOL {
        return Err(SuperposeError::DegenerateDenominator { which: "first", p3: p.p3() });
    }
    if big_p.p3() <= DENOMINATOR_TOL {
        return Err(SuperposeError::DegenerateDenominator { which: "second", p3: big_p.p3() });
    }
    let (p1, p2, p3) = (p.p1() - 0.5, p.p2() - 0.5, p.p3());
    let (q1, q2, q3) = (big_p.p1() - 0.5, big_p.p2() - 0.5, big_p.p3());
    let (k1, k2, k3) = (key.p1() - 0.5, key.p2() - 0.5, key.p3());
    let root = (p3 * q3).sqrt();

    let normalizer = 1.0
        + 2.0 / root * (k1 * (p1 * q1 + q2 * p2 + p3 * q3) + k2 * (p2 * q1 - p1 * q2));
    if normalizer.abs() <= NORMALIZER_TOL {
        return Err(SuperposeError::VanishingNormalizer(normalizer));
    }
    let ratio_qp = (q3 / p3).sqrt();
    let ratio_pq = (p3 / q3).sqrt();

    let big3 = (k3 * p3 + (1.0 - k3) * q3 + 2.0 * root * k1) / normalizer;
    let big1 = (k3 * p1
        + q1 * (1.0 - k3)
        + (k1 * p1 + k2 * p2) * ratio_qp
        + (k1 * q1 - k2 * q2) * ratio_pq)
        / normalizer
        + 0.5;
    let big2 = ((p2 * k3 + q2 * (1.0 - k3))
        + ratio_qp * (k1 * p2 - k2 * p1)
        + ratio_pq * (k2 * q1 + k1 * q2))
        / normalizer
        + 0.5;
    Ok(RuleOutput {
        probabilities: [big1, big2, big3],
        normalizer,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Superposition {
    pub result: ProbabilityTriple,
    pub normalizer: f64,
    pub purity_residual: f64,
}

fn require_pure(which: &'static str, p: &ProbabilityTriple) -> Result<(), SuperposeError> {
    let residual = qubit::purity_residual(p);
    if residual > qubit::PURITY_TOL {
        Err(SuperposeError::NotPure { which, residual })
    } else {
        Ok(())
    }
}

fn clamp_prob(v: f64) -> Result<f64, SuperposeError> {
    if (-OUTPUT_PURITY_TOL..=1.0 + OUTPUT_PURITY_TOL).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(QubitError::OutOfRange { name: "result", value: v }.into())
    }
}

/// Superposes two pure states. All three inputs must be pure and the output
/// must come out pure and quantum-valid.
pub fn superpose_probabilities(input: &SuperpositionInput) -> Result<Superposition, SuperposeError> {
    require_pure("first", &input.p)?;
    require_pure("second", &input.big_p)?;
    require_pure("key", &input.key)?;
    let raw = superposition_rule(input)?;
    let [a, b, cc] = raw.probabilities;
    let result = ProbabilityTriple::new(clamp_prob(a)?, clamp_prob(b)?, clamp_prob(cc)?)?;
    let purity_residual = qubit::purity_residual(&result);
    if purity_residual > OUTPUT_PURITY_TOL {
        return Err(SuperposeError::NotPure { which: "result", residual: purity_residual });
    }
    Ok(Superposition {
        result,
        normalizer: raw.normalizer,
        purity_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutput {
    pub density: CMat2,
    /// Trace before renormalization.
    pub raw_trace: f64,
    pub renormalized: bool,
}

fn require_pure_density(which: &'static str, rho: &DensityMatrix2) -> Result<(), SuperposeError> {
    let residual = (rho.purity() - 1.0).abs();
    if residual > qubit::PURITY_TOL {
        Err(SuperposeError::NotPure { which, residual })
    } else {
        Ok(())
    }
}

/// Operator form of the superposition of two pure states with key state
/// `rho0` and weights `lambda1 + lambda2 = 1`.
pub fn superpose_oracle(
    rho1: &DensityMatrix2,
    rho2: &DensityMatrix2,
    rho0: &DensityMatrix2,
    lambda1: f64,
    lambda2: f64,
) -> Result<OracleOutput, SuperposeError> {
    require_pure_density("first", rho1)?;
    require_pure_density("second", rho2)?;
    require_pure_density("key", rho0)?;
    if !(0.0..=1.0).contains(&lambda1)
        || !(0.0..=1.0).contains(&lambda2)
        || (lambda1 + lambda2 - 1.0).abs() > 1e-12
    {
        return Err(SuperposeError::BadWeights(lambda1, lambda2));
    }
    let (r1, r2, r0) = (*rho1.matrix(), *rho2.matrix(), *rho0.matrix());
    let overlap = (r1 * r0 * r2 * r0).trace().re;
    if overlap <= 1e-20 {
        return Err(SuperposeError::ZeroOverlapDenominator(overlap));
    }
    let cross = (r1 * r0 * r2 + r2 * r0 * r1).scale_re((lambda1 * lambda2).sqrt() / overlap.sqrt());
    let raw = r1.scale_re(lambda1) + r2.scale_re(lambda2) + cross;
    let raw_trace = raw.trace().re;
    let renormalized = (raw_trace - 1.0).abs() > TRACE_RENORM_TOL;
    let density = if renormalized {
        raw.scale_re(1.0 / raw_trace)
    } else {
        raw
    };
    Ok(OracleOutput {
        density,
        raw_trace,
        renormalized,
    })
}

/// Density matrix of the normalized `c1 psi1 + c2 psi2`, with `(c1, c2)` the
/// state vector of the key. Requires pure inputs with `p3, P3 > 0`.
pub fn coefficient_oracle(input: &SuperpositionInput) -> Result<CMat2, SuperposeError> {
    let psi1 = qubit::pure_state_vector(&input.p)?;
    let psi2 = qubit::pure_state_vector(&input.big_p)?;
    let coeff = qubit::pure_state_vector(&input.key)?;
    let (a, b) = (coeff.vector()[0], coeff.vector()[1]);
    let chi = psi1.vector().scale(a) + psi2.vector().scale(b);
    let n = chi.norm_sqr();
    if n <= NORMALIZER_TOL {
        return Err(SuperposeError::VanishingNormalizer(n));
    }
    Ok(chi.outer(&chi).scale_re(1.0 / n))
}

/// Candidate identification of the operator-form weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMapping {
    /// `(lambda1, lambda2) = (Pi3, 1 - Pi3)`.
    KeyPopulation,
    /// `(lambda1, lambda2) = (1/2, 1/2)`.
    Equal,
}

impl WeightMapping {
    pub const ALL: [WeightMapping; 2] = [WeightMapping::KeyPopulation, WeightMapping::Equal];

    pub fn id(self) -> &'static str {
        match self {
            WeightMapping::KeyPopulation => "key-population",
            WeightMapping::Equal => "equal",
        }
    }

    pub fn weights(self, key: &ProbabilityTriple) -> (f64, f64) {
        match self {
            WeightMapping::KeyPopulation => (key.p3(), 1.0 - key.p3()),
            WeightMapping::Equal => (0.5, 0.5),
        }
    }
}

/// Compares the addition rule with the operator form for one input under a
/// weight mapping. Returns the max deviation of the three probabilities.
pub fn oracle_deviation(
    input: &SuperpositionInput,
    mapping: WeightMapping,
) -> Result<f64, SuperposeError> {
    let rule = superpose_probabilities(input)?;
    let (l1, l2) = mapping.weights(&input.key);
    let oracle = superpose_oracle(
        &qubit::to_density(&input.p)?,
        &qubit::to_density(&input.big_p)?,
        &qubit::to_density(&input.key)?,
        l1,
        l2,
    )?;
    let q = qubit::from_coin_matrix(&oracle.density)?;
    Ok(rule.result.max_abs_diff(&q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `psi1` orthogonal to `psi2`, random pure key.
    Orthogonal,
    /// Independent random pure states.
    NonOrthogonal,
    /// Key on the z axis (`Pi1 = Pi2 = 1/2`), where both forms reduce to a
    /// single input state.
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    /// Weight mapping id, or `coefficient-state` for the diagnostic row.
    pub mapping: String,
    pub regime: Regime,
    pub samples: usize,
    /// Inputs rejected by a precondition (vanishing normalizer and the like).
    pub skipped: usize,
    pub max_deviation: f64,
    pub mean_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightConventionReport {
    pub seed: u64,
    pub samples_per_regime: usize,
    pub tolerance: f64,
    pub rows: Vec<DeviationRow>,
    /// Mapping whose orthogonal sweep stays below the tolerance, if any.
    pub selected: Option<WeightMapping>,
}

impl WeightConventionReport {
    pub fn row(&self, mapping: &str, regime: Regime) -> Option<&DeviationRow> {
        self.rows.iter().find(|r| r.mapping == mapping && r.regime == regime)
    }

    pub fn convention(&self) -> Result<WeightMapping, SuperposeError> {
        self.selected.ok_or_else(|| {
            let best = WeightMapping::ALL
                .iter()
                .filter_map(|m| self.row(m.id(), Regime::Orthogonal))
                .map(|r| r.max_deviation)
                .fold(f64::INFINITY, f64::min);
            SuperposeError::NoConsistentMapping { best }
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub seed: u64,
    pub samples: usize,
    pub exec: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 0,
            samples: 10_000,
            exec: Execution::default(),
        }
    }
}

/// Uniform point on the purity sphere.
pub fn random_pure(rng: &mut impl Rng) -> ProbabilityTriple {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(0.1..=1.0).contains(&n) {
            continue;
        }
        let p = [0.5 + 0.5 * v[0] / n, 0.5 + 0.5 * v[1] / n, 0.5 + 0.5 * v[2] / n];
        if let Ok(t) = ProbabilityTriple::from_array(p.map(|x| x.clamp(0.0, 1.0))) {
            return t;
        }
    }
}

/// Pure state with `p3` bounded away from 0 so the rule is well conditioned.
fn random_pure_with_p3(rng: &mut impl Rng) -> ProbabilityTriple {
    loop {
        let p = random_pure(rng);
        if (1e-3..=1.0 - 1e-3).contains(&p.p3()) {
            return p;
        }
    }
}

/// The orthogonal pure state: the antipode on the purity sphere.
pub fn antipode(p: &ProbabilityTriple) -> ProbabilityTriple {
    ProbabilityTriple::new(1.0 - p.p1(), 1.0 - p.p2(), 1.0 - p.p3())
        .expect("antipode of a cube point stays in the cube")
}

fn sample_inputs(regime: Regime, seed: u64, n: usize) -> Vec<SuperpositionInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(regime as u64);
    (0..n)
        .map(|i| {
            let p = random_pure_with_p3(&mut rng);
            let big_p = match regime {
                Regime::Orthogonal => antipode(&p),
                _ => random_pure_with_p3(&mut rng),
            };
            let key = match regime {
                Regime::Control => {
                    let p3 = if i % 2 == 0 { 1.0 } else { 0.0 };
                    ProbabilityTriple::new(0.5, 0.5, p3).unwrap()
                }
                _ => random_pure(&mut rng),
            };
            SuperpositionInput { p, big_p, key }
        })
        .collect()
}

fn summarize(
    mapping: &str,
    regime: Regime,
    results: Vec<Result<f64, SuperposeError>>,
) -> DeviationRow {
    let ok: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let max_deviation = ok.iter().copied().fold(0.0, f64::max);
    let mean_deviation = if ok.is_empty() {
        0.0
    } else {
        ok.iter().sum::<f64>() / ok.len() as f64
    };
    DeviationRow {
        mapping: mapping.to_string(),
        regime,
        samples: ok.len(),
        skipped: results.len() - ok.len(),
        max_deviation,
        mean_deviation,
    }
}

/// Sweeps random pure inputs and measures, for each candidate weight mapping
/// and regime, how far the addition rule is from the operator form with
/// `rho0` = key state. A `coefficient-state` row compares the rule with
/// [`coefficient_oracle`] for reference; it never takes part in selection.
pub fn resolve_weight_convention(cfg: &SweepConfig) -> WeightConventionReport {
    let mut rows = Vec::new();
    for regime in [Regime::Orthogonal, Regime::NonOrthogonal, Regime::Control] {
        let inputs = sample_inputs(regime, cfg.seed, cfg.samples);
        for mapping in WeightMapping::ALL {
            let results = exec::map_collect(cfg.exec, &inputs, |inp| oracle_deviation(inp, mapping));
            rows.push(summarize(mapping.id(), regime, results));
        }
        let results = exec::map_collect(cfg.exec, &inputs, |inp| {
            let rule = superpose_probabilities(inp)?;
            let q = qubit::from_coin_matrix(&coefficient_oracle(inp)?)?;
            Ok(rule.result.max_abs_diff(&q))
        });
        rows.push(summarize("coefficient-state", regime, results));
    }
    let selected = WeightMapping::ALL.into_iter().find(|m| {
        rows.iter().any(|r| {
            r.mapping == m.id()
                && r.regime == Regime::Orthogonal
                && r.samples > 0
                && r.max_deviation < CONVENTION_TOL
        })
    });
    WeightConventionReport {
        seed: cfg.seed,
        samples_per_regime: cfg.samples,
        tolerance: CONVENTION_TOL,
        rows,
        selected,
    }
}

/// Projector onto a vector, for building pure test states.
pub fn projector(v: &CVec2) -> Result<DensityMatrix2, QubitError> {
    let v = v.normalized();
    DensityMatrix2::new(v.outer(&v))
}
