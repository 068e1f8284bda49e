//! A qubit as three coins.
//!
//! The state is the triple of "up" probabilities `(p1, p2, p3)`. Arranged in
//! table form it gives the 2x2 matrix
//!
//! ```text
//! [ p3                        (p1-1/2) - i(p2-1/2) ]
//! [ (p1-1/2) + i(p2-1/2)      1 - p3               ]
//! ```
//!
//! which is Hermitian with unit trace for every point of the unit cube, and a
//! density matrix exactly when the point lies in the ball
//! `sum (p_k - 1/2)^2 <= 1/4`. Pure states sit on the surface of that ball.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmat::{self, c, CMat2, CVec, CVec2, C64};

/// Positivity tolerance on the quantum-validity margin.
pub const QUANTUM_TOL: f64 = 1e-12;
/// Tolerance on the purity residual `|sum (p_k - 1/2)^2 - 1/4|`.
pub const PURITY_TOL: f64 = 1e-10;
/// Hermiticity / trace / eigenvalue slack accepted by [`DensityMatrix2::new`].
pub const DENSITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QubitError {
    #[error("probability {name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("probabilities violate the quantum condition (margin {margin:e})")]
    NotQuantum { margin: f64 },
    #[error("state is not pure (residual {residual:e})")]
    NotPure { residual: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

fn check_prob(name: &'static str, value: f64) -> Result<f64, QubitError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(QubitError::OutOfRange { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct ProbabilityTriple {
    p1: f64,
    p2: f64,
    p3: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTriple {
    p1: f64,
    p2: f64,
    p3: f64,
}

impl TryFrom<RawTriple> for ProbabilityTriple {
    type Error = QubitError;
    fn try_from(r: RawTriple) -> Result<Self, QubitError> {
        ProbabilityTriple::new(r.p1, r.p2, r.p3)
    }
}

impl From<ProbabilityTriple> for RawTriple {
    fn from(p: ProbabilityTriple) -> Self {
        RawTriple {
            p1: p.p1,
            p2: p.p2,
            p3: p.p3,
        }
    }
}

impl ProbabilityTriple {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self, QubitError> {
        Ok(ProbabilityTriple {
            p1: check_prob("p1", p1)?,
            p2: check_prob("p2", p2)?,
            p3: check_prob("p3", p3)?,
        })
    }

    pub fn from_array(p: [f64; 3]) -> Result<Self, QubitError> {
        Self::new(p[0], p[1], p[2])
    }

    /// The maximally mixed state.
    pub fn center() -> Self {
        ProbabilityTriple {
            p1: 0.5,
            p2: 0.5,
            p3: 0.5,
        }
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn p3(&self) -> f64 {
        self.p3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    /// Off-diagonal element `rho_12 = (p1 - 1/2) - i (p2 - 1/2)`.
    pub fn coherence(&self) -> C64 {
        c(self.p1 - 0.5, -(self.p2 - 0.5))
    }

    /// `sum_k (p_k - 1/2)^2`, the squared distance from the center.
    pub fn radius_sqr(&self) -> f64 {
        let (x, y, z) = (self.p1 - 0.5, self.p2 - 0.5, self.p3 - 0.5);
        x * x + y * y + z * z
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A 2x2 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    m: CMat2,
}

impl DensityMatrix2 {
    pub fn new(m: CMat2) -> Result<Self, QubitError> {
        if !m.is_finite() {
            return Err(QubitError::InvalidDensity("non-finite entry".into()));
        }
        let defect = m.hermiticity_defect();
        if defect > DENSITY_TOL {
            return Err(QubitError::InvalidDensity(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = m.trace();
        if (tr - c(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(QubitError::InvalidDensity(format!("trace {tr} != 1")));
        }
        let eig = cmat::eig_hermitian(&m)
            .map_err(|e| QubitError::InvalidDensity(e.to_string()))?;
        if eig.values[0] < -DENSITY_TOL {
            return Err(QubitError::InvalidDensity(format!(
                "negative eigenvalue {:e}",
                eig.values[0]
            )));
        }
        Ok(DensityMatrix2 { m })
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.m
    }

    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }
}

/// The table-form matrix of any cube point. Hermitian with unit trace; only
/// positive semidefinite inside the quantum ball.
pub fn coin_matrix(p: &ProbabilityTriple) -> CMat2 {
    let r12 = p.coherence();
    CMat2::from_rows([[c(p.p3, 0.0), r12], [r12.conj(), c(1.0 - p.p3, 0.0)]])
}

/// Density matrix of a quantum-valid triple.
pub fn to_density(p: &ProbabilityTriple) -> Result<DensityMatrix2, QubitError> {
    let check = is_quantum(p);
    if !check.quantum {
        return Err(QubitError::NotQuantum {
            margin: check.margin,
        });
    }
    Ok(DensityMatrix2 { m: coin_matrix(p) })
}

fn clamp_unit(name: &'static str, v: f64) -> Result<f64, QubitError> {
    if (-DENSITY_TOL..=1.0 + DENSITY_TOL).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(QubitError::OutOfRange { name, value: v })
    }
}

/// Reads the three coin probabilities off a density matrix.
pub fn from_density(rho: &DensityMatrix2) -> ProbabilityTriple {
    let m = rho.matrix();
    // a valid density matrix keeps these within DENSITY_TOL of [0, 1]
    let p3 = m[(0, 0)].re.clamp(0.0, 1.0);
    let p1 = (m[(0, 1)].re + 0.5).clamp(0.0, 1.0);
    let p2 = (-m[(0, 1)].im + 0.5).clamp(0.0, 1.0);
    ProbabilityTriple { p1, p2, p3 }
}

/// Like [`from_density`] but for any Hermitian unit-trace matrix.
pub fn from_coin_matrix(m: &CMat2) -> Result<ProbabilityTriple, QubitError> {
    if m.hermiticity_defect() > DENSITY_TOL
        || (m.trace() - c(1.0, 0.0)).norm() > DENSITY_TOL
    {
        return Err(QubitError::InvalidDensity(
            "not Hermitian with unit trace".into(),
        ));
    }
    Ok(ProbabilityTriple {
        p1: clamp_unit("p1", m[(0, 1)].re + 0.5)?,
        p2: clamp_unit("p2", -m[(0, 1)].im + 0.5)?,
        p3: clamp_unit("p3", m[(0, 0)].re)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumCheck {
    pub quantum: bool,
    /// `1/4 - sum (p_k - 1/2)^2`; equals `det rho`.
    pub margin: f64,
}

pub fn is_quantum(p: &ProbabilityTriple) -> QuantumCheck {
    let margin = 0.25 - p.radius_sqr();
    QuantumCheck {
        quantum: margin >= -QUANTUM_TOL,
        margin,
    }
}

pub fn purity_residual(p: &ProbabilityTriple) -> f64 {
    (p.radius_sqr() - 0.25).abs()
}

pub fn is_pure(p: &ProbabilityTriple) -> bool {
    purity_residual(p) <= PURITY_TOL
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateVector {
    v: CVec2,
}

impl PureStateVector {
    pub fn vector(&self) -> &CVec2 {
        &self.v
    }

    pub fn projector(&self) -> CMat2 {
        self.v.outer(&self.v)
    }
}

/// Amplitude threshold below which `p3` is treated as zero.
pub const P3_ZERO_TOL: f64 = 1e-12;

/// State vector `(sqrt p3, (p1-1/2 + i(p2-1/2)) / sqrt p3)` of a pure triple.
/// At `p3 = 0` the limit state `(0, 1)` is returned.
pub fn pure_state_vector(p: &ProbabilityTriple) -> Result<PureStateVector, QubitError> {
    let residual = purity_residual(p);
    if residual > PURITY_TOL {
        return Err(QubitError::NotPure { residual });
    }
    let v = if p.p3 > P3_ZERO_TOL {
        let s = p.p3.sqrt();
        CVec([c(s, 0.0), p.coherence().conj() / s])
    } else {
        CVec([c(0.0, 0.0), c(1.0, 0.0)])
    };
    Ok(PureStateVector { v: v.normalized() })
}

/// Spin-projection means `(Tr rho sx, Tr rho sy, Tr rho sz)`.
///
/// Cube points outside the quantum ball map outside the unit ball; see
/// [`BlochVector::is_physical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BlochVector {
    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c
    }

    pub fn is_physical(&self) -> bool {
        self.norm_sqr() <= 1.0 + QUANTUM_TOL
    }
}

pub fn bloch(p: &ProbabilityTriple) -> BlochVector {
    BlochVector {
        a: 2.0 * p.p1 - 1.0,
        b: 2.0 * p.p2 - 1.0,
        c: 2.0 * p.p3 - 1.0,
    }
}

pub fn bloch_inverse(b: &BlochVector) -> Result<ProbabilityTriple, QubitError> {
    ProbabilityTriple::new((b.a + 1.0) / 2.0, (b.b + 1.0) / 2.0, (b.c + 1.0) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub lambda1: f64,
    pub lambda2: f64,
    pub e1: CVec2,
    pub e2: CVec2,
}

/// Eigenvalues `1/2 +- sqrt(1/4 - det rho)` and their eigenvectors.
///
/// The eigenvector of `lambda` is proportional to
/// `(1, (lambda - p3) / rho_12)`; it is built from whichever row of
/// `rho - lambda` is better conditioned and falls back to basis vectors when
/// `rho_12 = 0`.
pub fn spectral(p: &ProbabilityTriple) -> Result<SpectralData, QubitError> {
    let check = is_quantum(p);
    if !check.quantum {
        return Err(QubitError::NotQuantum {
            margin: check.margin,
        });
    }
    let (x, y) = (p.p1 - 0.5, p.p2 - 0.5);
    let det = p.p3 * (1.0 - p.p3) - x * x - y * y;
    let root = (0.25 - det).max(0.0).sqrt();
    let lambda1 = 0.5 + root;
    let lambda2 = 0.5 - root;

    let r12 = p.coherence();
    let (e1, e2) = if r12.norm() == 0.0 {
        let up = CVec2::basis(0);
        let down = CVec2::basis(1);
        if p.p3 >= 0.5 {
            (up, down)
        } else {
            (down, up)
        }
    } else {
        let vector_for = |lambda: f64| {
            let row0 = CVec([r12, c(lambda - p.p3, 0.0)]);
            let row1 = CVec([c(lambda - (1.0 - p.p3), 0.0), r12.conj()]);
            let v = if row0.norm_sqr() >= row1.norm_sqr() { row0 } else { row1 };
            v.normalized().with_canonical_phase()
        };
        (vector_for(lambda1), vector_for(lambda2))
    };
    Ok(SpectralData {
        lambda1,
        lambda2,
        e1,
        e2,
    })
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `-sum lambda ln lambda` in nats.
pub fn von_neumann_entropy(p: &ProbabilityTriple) -> Result<f64, QubitError> {
    let s = spectral(p)?;
    Ok(-xlnx(s.lambda1.clamp(0.0, 1.0)) - xlnx(s.lambda2.clamp(0.0, 1.0)))
}

/// `(lambda1^q + lambda2^q - 1) / (1 - q)` for `q > 0`, `q != 1`.
pub fn tsallis_entropy(p: &ProbabilityTriple, q: f64) -> Result<f64, QubitError> {
    if !(q.is_finite() && q > 0.0 && q != 1.0) {
        return Err(QubitError::BadParameter(format!(
            "Tsallis index must be positive and != 1, got {q}"
        )));
    }
    let s = spectral(p)?;
    let l1 = s.lambda1.clamp(0.0, 1.0);
    let l2 = s.lambda2.clamp(0.0, 1.0);
    Ok((l1.powf(q) + l2.powf(q) - 1.0) / (1.0 - q))
}

/// Entropy of the coin distribution `(prob, 1 - prob)` in nats.
pub fn shannon_entropy(prob: f64) -> Result<f64, QubitError> {
    let prob = check_prob("prob", prob)?;
    Ok(-xlnx(prob) - xlnx(1.0 - prob))
}
