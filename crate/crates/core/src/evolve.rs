//! Unitary evolution of the coin probabilities.
//!
//! With `rho(p)` the table-form matrix and `H` a dichotomic observable, the
//! probabilities follow `d rho / dt = -i [H, rho]` (units with hbar = 1).
//! Two independent routes are provided: the closed-form propagator
//! `rho(t) = u(t) rho(0) u(t)^dagger` with `u(t) = exp(-i t H)`, and a fixed
//! step RK4 integration of the commutator rates on `(p1, p2, p3)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::cmat::{self, c, CMat2, CMat4, CVec4, C64};
use crate::observable::{self, DichotomicObservable};
use crate::qubit::{self, ProbabilityTriple, QubitError};

/// Samples may leave the quantum ball by at most this much.
pub const VALIDITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("initial state is not quantum-valid (margin {margin:e})")]
    NotQuantum { margin: f64 },
    #[error("invalid evolution problem: {0}")]
    InvalidProblem(String),
    #[error("trajectory left the state space at t = {t}: {source}")]
    LeftStateSpace { t: f64, source: QubitError },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionProblem {
    pub initial: ProbabilityTriple,
    pub hamiltonian: DichotomicObservable,
    pub t_final: f64,
    pub steps: usize,
}

impl EvolutionProblem {
    pub fn new(
        initial: ProbabilityTriple,
        hamiltonian: DichotomicObservable,
        t_final: f64,
        steps: usize,
    ) -> Result<Self, EvolveError> {
        let prob = EvolutionProblem {
            initial,
            hamiltonian,
            t_final,
            steps,
        };
        prob.validate()?;
        Ok(prob)
    }

    fn validate(&self) -> Result<(), EvolveError> {
        let check = qubit::is_quantum(&self.initial);
        if !check.quantum {
            return Err(EvolveError::NotQuantum {
                margin: check.margin,
            });
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(EvolveError::InvalidProblem(format!(
                "t_final must be finite and positive, got {}",
                self.t_final
            )));
        }
        if self.steps == 0 {
            return Err(EvolveError::InvalidProblem("steps must be >= 1".into()));
        }
        let h = &self.hamiltonian;
        if ![h.x, h.y, h.z1, h.z2].iter().all(|v| v.is_finite()) {
            return Err(EvolveError::InvalidProblem("non-finite Hamiltonian".into()));
        }
        Ok(())
    }

    /// Sample times `k t_final / steps`, `k = 0..=steps`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| self.t_final * k as f64 / self.steps as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Propagator,
    Integrator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub p: ProbabilityTriple,
}

impl Serialize for Sample {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Flat {
            t: f64,
            p1: f64,
            p2: f64,
            p3: f64,
        }
        Flat {
            t: self.t,
            p1: self.p.p1(),
            p2: self.p.p2(),
            p3: self.p.p3(),
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub method: Method,
    pub hamiltonian: DichotomicObservable,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories have at least two samples")
    }

    /// Largest component deviation between two trajectories sampled at the
    /// same times.
    pub fn max_deviation(&self, other: &Trajectory) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.p.max_abs_diff(&b.p))
            .fold(0.0, f64::max)
    }

    /// `|lambda1(t) - lambda1(0)|` at each sample.
    pub fn eigenvalue_drift(&self) -> Vec<f64> {
        let lambda = |p: &ProbabilityTriple| {
            let (x, y) = (p.p1() - 0.5, p.p2() - 0.5);
            let det = p.p3() * (1.0 - p.p3()) - x * x - y * y;
            0.5 + (0.25 - det).max(0.0).sqrt()
        };
        let l0 = lambda(&self.samples[0].p);
        self.samples.iter().map(|s| (lambda(&s.p) - l0).abs()).collect()
    }

    pub fn max_eigenvalue_drift(&self) -> f64 {
        self.eigenvalue_drift().into_iter().fold(0.0, f64::max)
    }
}

fn to_sample(t: f64, raw: [f64; 3]) -> Result<Sample, EvolveError> {
    let clamp = |v: f64| {
        if (-VALIDITY_TOL..=1.0 + VALIDITY_TOL).contains(&v) {
            v.clamp(0.0, 1.0)
        } else {
            v
        }
    };
    let p = ProbabilityTriple::from_array(raw.map(clamp))
        .map_err(|source| EvolveError::LeftStateSpace { t, source })?;
    let margin = qubit::is_quantum(&p).margin;
    if margin < -VALIDITY_TOL {
        return Err(EvolveError::LeftStateSpace {
            t,
            source: QubitError::NotQuantum { margin },
        });
    }
    Ok(Sample { t, p })
}

fn triple_from_matrix(m: &CMat2) -> [f64; 3] {
    [m[(0, 1)].re + 0.5, -m[(0, 1)].im + 0.5, m[(0, 0)].re]
}

fn raw_matrix(p: [f64; 3]) -> CMat2 {
    let r12 = c(p[0] - 0.5, -(p[1] - 0.5));
    CMat2::from_rows([[c(p[2], 0.0), r12], [r12.conj(), c(1.0 - p[2], 0.0)]])
}

/// `u(t) = exp(-i t H)`.
pub fn propagator(h: &DichotomicObservable, t: f64) -> CMat2 {
    cmat::expm_herm_generator(&observable::to_hermitian(h), t)
        .expect("observable matrices are Hermitian by construction")
}

/// `u(t) (x) u*(t)`, acting on the row-major vectorization of `rho`.
pub fn superoperator(h: &DichotomicObservable, t: f64) -> CMat4 {
    let u = propagator(h, t);
    cmat::kron(&u, &u.conj())
}

/// Evolves by applying `u (x) u*` to `(p3, p, p*, 1 - p3)`.
pub fn evolve_vectorized(p: &ProbabilityTriple, h: &DichotomicObservable, t: f64) -> [f64; 3] {
    let rho = qubit::coin_matrix(p);
    let v: CVec4 = rho.flatten();
    let out = superoperator(h, t).apply(&v);
    [out[1].re + 0.5, -out[1].im + 0.5, out[0].re]
}

/// Closed-form propagation sampled at `steps + 1` equally spaced times.
pub fn propagate(prob: &EvolutionProblem) -> Result<Trajectory, EvolveError> {
    prob.validate()?;
    let rho0 = qubit::coin_matrix(&prob.initial);
    let samples = prob
        .times()
        .map(|t| {
            let u = propagator(&prob.hamiltonian, t);
            to_sample(t, triple_from_matrix(&(u * rho0 * u.adjoint())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Trajectory {
        method: Method::Propagator,
        hamiltonian: prob.hamiltonian,
        samples,
    })
}

/// `(dp1/dt, dp2/dt, dp3/dt)` from `-i [H, rho]`.
pub fn commutator_rates(h: &DichotomicObservable, p: [f64; 3]) -> [f64; 3] {
    let d = observable::to_hermitian(h)
        .commutator(&raw_matrix(p))
        .scale(c(0.0, -1.0));
    [d[(0, 1)].re, -d[(0, 1)].im, d[(0, 0)].re]
}

fn axpy(a: [f64; 3], s: f64, b: [f64; 3]) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// Classical RK4 on the commutator rates with step `t_final / steps`.
pub fn integrate_vonneumann(prob: &EvolutionProblem) -> Result<Trajectory, EvolveError> {
    prob.validate()?;
    let h = &prob.hamiltonian;
    let dt = prob.t_final / prob.steps as f64;
    let mut state = prob.initial.as_array();
    let mut samples = Vec::with_capacity(prob.steps + 1);
    samples.push(Sample {
        t: 0.0,
        p: prob.initial,
    });
    for k in 1..=prob.steps {
        let k1 = commutator_rates(h, state);
        let k2 = commutator_rates(h, axpy(state, 0.5 * dt, k1));
        let k3 = commutator_rates(h, axpy(state, 0.5 * dt, k2));
        let k4 = commutator_rates(h, axpy(state, dt, k3));
        for i in 0..3 {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = prob.t_final * k as f64 / prob.steps as f64;
        samples.push(to_sample(t, state)?);
    }
    Ok(Trajectory {
        method: Method::Integrator,
        hamiltonian: *h,
        samples,
    })
}

/// Max deviations of the printed component equations (and their corrected
/// forms) from the commutator rates, with `p = p1 - 1/2 - i (p2 - 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KineticFormReport {
    pub samples: usize,
    /// `i dp3/dt = (x - iy) p* - (x - iy) p` as printed.
    pub printed_dp3: f64,
    /// `i dp/dt = [z1 - z2 - 2(x - iy)] p` as printed.
    pub printed_dp: f64,
    /// `-i dp*/dt = [z1 - z2 - 2(x + iy)] p*` as printed.
    pub printed_dp_conj: f64,
    /// `i dp3/dt = (x - iy) p* - (x + iy) p`.
    pub corrected_dp3: f64,
    /// `i dp/dt = (z1 - z2) p + (x - iy)(1 - 2 p3)`.
    pub corrected_dp: f64,
}

impl KineticFormReport {
    fn merge(self, o: Self) -> Self {
        KineticFormReport {
            samples: self.samples + o.samples,
            printed_dp3: self.printed_dp3.max(o.printed_dp3),
            printed_dp: self.printed_dp.max(o.printed_dp),
            printed_dp_conj: self.printed_dp_conj.max(o.printed_dp_conj),
            corrected_dp3: self.corrected_dp3.max(o.corrected_dp3),
            corrected_dp: self.corrected_dp.max(o.corrected_dp),
        }
    }

    fn empty() -> Self {
        KineticFormReport {
            samples: 0,
            printed_dp3: 0.0,
            printed_dp: 0.0,
            printed_dp_conj: 0.0,
            corrected_dp3: 0.0,
            corrected_dp: 0.0,
        }
    }
}

/// Compares the printed linear kinetic equations with the commutator rates
/// at the given states.
pub fn check_kinetic_form(h: &DichotomicObservable, states: &[ProbabilityTriple]) -> KineticFormReport {
    let i = c(0.0, 1.0);
    let hx = c(h.x, -h.y);
    let dz = c(h.z1 - h.z2, 0.0);
    states.iter().fold(KineticFormReport::empty(), |acc, s| {
        let p = s.coherence();
        let pc = p.conj();
        let p3 = s.p3();
        let d = observable::to_hermitian(h)
            .commutator(&qubit::coin_matrix(s))
            .scale(-i);
        let (dp3, dp, dpc) = (d[(0, 0)], d[(0, 1)], d[(1, 0)]);

        let printed_dp3: C64 = -i * (hx * pc - hx * p);
        let printed_dp: C64 = -i * ((dz - hx * 2.0) * p);
        let printed_dpc: C64 = i * ((dz - hx.conj() * 2.0) * pc);
        let corrected_dp3: C64 = -i * (hx * pc - hx.conj() * p);
        let corrected_dp: C64 = -i * (dz * p + hx * (1.0 - 2.0 * p3));

        acc.merge(KineticFormReport {
            samples: 1,
            printed_dp3: (printed_dp3 - dp3).norm(),
            printed_dp: (printed_dp - dp).norm(),
            printed_dp_conj: (printed_dpc - dpc).norm(),
            corrected_dp3: (corrected_dp3 - dp3).norm(),
            corrected_dp: (corrected_dp - dp).norm(),
        })
    })
}

/// Random Hamiltonians and random quantum states, `samples` pairs.
pub fn kinetic_form_sweep(seed: u64, samples: usize) -> KineticFormReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).fold(KineticFormReport::empty(), |acc, _| {
        let h = DichotomicObservable {
            x: rng.gen_range(-1.0..1.0),
            y: rng.gen_range(-1.0..1.0),
            z1: rng.gen_range(-1.0..1.0),
            z2: rng.gen_range(-1.0..1.0),
        };
        let p = random_quantum(&mut rng);
        acc.merge(check_kinetic_form(&h, &[p]))
    })
}

/// Uniform point of the quantum ball.
pub fn random_quantum(rng: &mut impl Rng) -> ProbabilityTriple {
    loop {
        let p = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        let t = ProbabilityTriple::from_array(p).expect("unit interval samples");
        if qubit::is_quantum(&t).quantum {
            return t;
        }
    }
}
