//! Qubit observables as classical dichotomic random variables.
//!
//! Three coins carry the random variables `(x, -x)`, `(y, -y)` and
//! `(z1, z2)`. Arranged as `H = [[z1, x - iy], [x + iy, z2]]` they give every
//! 2x2 Hermitian matrix exactly once.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmat::{self, c, CMat2, CVec, CVec2};
use crate::qubit::{self, ProbabilityTriple};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("{0}")]
    OutOfRange(String),
    #[error("state is not quantum-valid (margin {margin:e})")]
    NotQuantum { margin: f64 },
    #[error("non-finite observable component")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomicObservable {
    pub x: f64,
    pub y: f64,
    pub z1: f64,
    pub z2: f64,
}

impl DichotomicObservable {
    pub fn new(x: f64, y: f64, z1: f64, z2: f64) -> Result<Self, ObservableError> {
        if [x, y, z1, z2].iter().all(|v| v.is_finite()) {
            Ok(DichotomicObservable { x, y, z1, z2 })
        } else {
            Err(ObservableError::NonFinite)
        }
    }

    pub fn zero() -> Self {
        DichotomicObservable {
            x: 0.0,
            y: 0.0,
            z1: 0.0,
            z2: 0.0,
        }
    }

    /// Spin projection `s_x = sigma_x / 2`.
    pub fn spin_x() -> Self {
        DichotomicObservable { x: 0.5, ..Self::zero() }
    }

    pub fn spin_y() -> Self {
        DichotomicObservable { y: 0.5, ..Self::zero() }
    }

    pub fn spin_z() -> Self {
        DichotomicObservable {
            z1: 0.5,
            z2: -0.5,
            ..Self::zero()
        }
    }
}

/// Values of one dichotomic variable on the two coin outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinRandomVariable {
    pub f_up: f64,
    pub f_down: f64,
}

pub fn to_hermitian(obs: &DichotomicObservable) -> CMat2 {
    CMat2::from_rows([
        [c(obs.z1, 0.0), c(obs.x, -obs.y)],
        [c(obs.x, obs.y), c(obs.z2, 0.0)],
    ])
}

pub fn from_hermitian(h: &CMat2) -> Result<DichotomicObservable, ObservableError> {
    if !h.is_finite() {
        return Err(ObservableError::NonFinite);
    }
    let defect = h.hermiticity_defect();
    if defect > cmat::HERMITIAN_TOL {
        return Err(ObservableError::NotHermitian(defect));
    }
    Ok(DichotomicObservable {
        x: h[(1, 0)].re,
        y: h[(1, 0)].im,
        z1: h[(0, 0)].re,
        z2: h[(1, 1)].re,
    })
}

/// Coefficients of `H = a0 1 + ax sx + ay sy + az sz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliCoefficients {
    pub identity: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl PauliCoefficients {
    pub fn to_matrix(&self) -> CMat2 {
        CMat2::identity().scale_re(self.identity)
            + cmat::sigma_x().scale_re(self.sx)
            + cmat::sigma_y().scale_re(self.sy)
            + cmat::sigma_z().scale_re(self.sz)
    }
}

/// `H = (z1+z2)/2 1 + x sx + y sy + (z1-z2)/2 sz`.
pub fn pauli_decomposition(obs: &DichotomicObservable) -> PauliCoefficients {
    PauliCoefficients {
        identity: 0.5 * (obs.z1 + obs.z2),
        sx: obs.x,
        sy: obs.y,
        sz: 0.5 * (obs.z1 - obs.z2),
    }
}

/// `prob_up f_up^k + (1 - prob_up) f_down^k`.
pub fn coin_moment(
    rv: &CoinRandomVariable,
    prob_up: f64,
    k: u32,
) -> Result<f64, ObservableError> {
    if !(0.0..=1.0).contains(&prob_up) {
        return Err(ObservableError::OutOfRange(format!(
            "probability {prob_up} outside [0, 1]"
        )));
    }
    if k == 0 {
        return Err(ObservableError::OutOfRange("moment order must be >= 1".into()));
    }
    let k = k as i32;
    Ok(prob_up * rv.f_up.powi(k) + (1.0 - prob_up) * rv.f_down.powi(k))
}

fn require_quantum(p: &ProbabilityTriple) -> Result<(), ObservableError> {
    let check = qubit::is_quantum(p);
    if check.quantum {
        Ok(())
    } else {
        Err(ObservableError::NotQuantum {
            margin: check.margin,
        })
    }
}

/// `<H> = x(2p1-1) + y(2p2-1) + p3(z1-z2) + z2`.
pub fn quantum_mean(
    p: &ProbabilityTriple,
    obs: &DichotomicObservable,
) -> Result<f64, ObservableError> {
    require_quantum(p)?;
    Ok(obs.x * (2.0 * p.p1() - 1.0)
        + obs.y * (2.0 * p.p2() - 1.0)
        + p.p3() * (obs.z1 - obs.z2)
        + obs.z2)
}

/// `Tr(rho H^k)`.
pub fn quantum_moment(
    p: &ProbabilityTriple,
    obs: &DichotomicObservable,
    k: u32,
) -> Result<f64, ObservableError> {
    require_quantum(p)?;
    if k == 0 {
        return Err(ObservableError::OutOfRange("moment order must be >= 1".into()));
    }
    let rho = qubit::coin_matrix(p);
    Ok((rho * to_hermitian(obs).pow(k)).trace().re)
}

/// `(H1, H2) = (z1+z2)/2 +- sqrt((z1-z2)^2/4 + x^2 + y^2)`, `H1 >= H2`.
pub fn observable_eigenvalues(obs: &DichotomicObservable) -> (f64, f64) {
    let mean = 0.5 * (obs.z1 + obs.z2);
    let half_gap = 0.5 * (obs.z1 - obs.z2);
    let r = half_gap.hypot(obs.x.hypot(obs.y));
    (mean + r, mean - r)
}

/// Below this value of `x^2 + y^2 + (z1 - z2)^2` the observable is treated as
/// a multiple of the identity.
pub const DEGENERATE_TOL: f64 = 1e-20;

/// Doubly stochastic 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BistochasticMatrix2(pub [[f64; 2]; 2]);

impl BistochasticMatrix2 {
    pub fn identity() -> Self {
        BistochasticMatrix2([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn max_sum_defect(&self) -> f64 {
        let m = &self.0;
        [
            m[0][0] + m[0][1],
            m[1][0] + m[1][1],
            m[0][0] + m[1][0],
            m[0][1] + m[1][1],
        ]
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bistochastic {
    pub matrix: BistochasticMatrix2,
    /// Columns are the eigenvectors for `H1`, `H2`.
    pub unitary: CMat2,
    pub eigenvalues: (f64, f64),
    /// Set when the observable is a multiple of the identity; the matrix is
    /// then the identity by convention.
    pub degenerate: bool,
}

fn eigenvector(obs: &DichotomicObservable, lambda: f64) -> CVec2 {
    let h12 = c(obs.x, -obs.y);
    let row0 = CVec([h12, c(lambda - obs.z1, 0.0)]);
    let row1 = CVec([c(lambda - obs.z2, 0.0), h12.conj()]);
    let v = if row0.norm_sqr() >= row1.norm_sqr() { row0 } else { row1 };
    v.normalized().with_canonical_phase()
}

/// The bistochastic matrix `|u_ij|^2` of the unitary diagonalizing `H`.
pub fn bistochastic(obs: &DichotomicObservable) -> Bistochastic {
    let eigenvalues = observable_eigenvalues(obs);
    let spread = obs.x * obs.x + obs.y * obs.y + (obs.z1 - obs.z2).powi(2);
    if spread <= DEGENERATE_TOL {
        return Bistochastic {
            matrix: BistochasticMatrix2::identity(),
            unitary: CMat2::identity(),
            eigenvalues,
            degenerate: true,
        };
    }
    let v1 = eigenvector(obs, eigenvalues.0);
    let v2 = eigenvector(obs, eigenvalues.1);
    let unitary = CMat2::from_rows([[v1[0], v2[0]], [v1[1], v2[1]]]);
    let m = |i: usize, j: usize| unitary[(i, j)].norm_sqr();
    Bistochastic {
        matrix: BistochasticMatrix2([[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]]),
        unitary,
        eigenvalues,
        degenerate: false,
    }
}

/// `|u11|^2 = [1 + |H1 - z1|^2 / (x^2 + y^2)]^{-1}`; requires `x^2 + y^2 > 0`.
pub fn u11_weight(obs: &DichotomicObservable) -> Option<f64> {
    let r2 = obs.x * obs.x + obs.y * obs.y;
    if r2 == 0.0 {
        return None;
    }
    let (h1, _) = observable_eigenvalues(obs);
    Some(1.0 / (1.0 + (h1 - obs.z1).powi(2) / r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::{sigma_x, sigma_y, sigma_z};

    fn obs(x: f64, y: f64, z1: f64, z2: f64) -> DichotomicObservable {
        DichotomicObservable::new(x, y, z1, z2).unwrap()
    }

    fn p(p1: f64, p2: f64, p3: f64) -> ProbabilityTriple {
        ProbabilityTriple::new(p1, p2, p3).unwrap()
    }

    #[test]
    fn spin_projections_are_half_paulis() {
        assert_eq!(to_hermitian(&DichotomicObservable::spin_x()), sigma_x().scale_re(0.5));
        assert_eq!(to_hermitian(&DichotomicObservable::spin_y()), sigma_y().scale_re(0.5));
        assert_eq!(to_hermitian(&DichotomicObservable::spin_z()), sigma_z().scale_re(0.5));
        for o in [
            DichotomicObservable::spin_x(),
            DichotomicObservable::spin_y(),
            DichotomicObservable::spin_z(),
        ] {
            assert_eq!(observable_eigenvalues(&o), (0.5, -0.5));
        }
    }

    #[test]
    fn commutation_relation_is_exact() {
        let sx = to_hermitian(&DichotomicObservable::spin_x());
        let sy = to_hermitian(&DichotomicObservable::spin_y());
        let sz = to_hermitian(&DichotomicObservable::spin_z());
        assert_eq!(sx.commutator(&sy), sz.scale(c(0.0, 1.0)));
    }

    #[test]
    fn hermitian_round_trip_and_pauli_form() {
        let o = obs(0.3, -1.7, 2.5, 0.25);
        assert_eq!(from_hermitian(&to_hermitian(&o)).unwrap(), o);
        let pc = pauli_decomposition(&o);
        assert!(pc.to_matrix().max_abs_diff(&to_hermitian(&o)) < 1e-12);
        let bad = CMat2::from_real([[0.0, 1.0], [2.0, 0.0]]);
        assert!(matches!(from_hermitian(&bad), Err(ObservableError::NotHermitian(_))));
    }

    #[test]
    fn coin_moments() {
        let x = 1.3;
        let rv = CoinRandomVariable { f_up: x, f_down: -x };
        assert_eq!(coin_moment(&rv, 0.5, 1).unwrap(), 0.0);
        assert!((coin_moment(&rv, 0.27, 2).unwrap() - x * x).abs() < 1e-15);
        let rv = CoinRandomVariable { f_up: 1.0, f_down: -1.0 };
        assert!((coin_moment(&rv, 0.8, 1).unwrap() - 0.6).abs() < 1e-15);
        assert!(coin_moment(&rv, 1.1, 1).is_err());
        assert!(coin_moment(&rv, 0.5, 0).is_err());
    }

    #[test]
    fn mean_examples() {
        let o = obs(0.7, -0.2, 1.5, 0.5);
        assert_eq!(quantum_mean(&ProbabilityTriple::center(), &o).unwrap(), 1.0);
        let sz = obs(0.0, 0.0, 1.0, -1.0);
        assert!((quantum_mean(&p(0.5, 0.5, 0.8), &sz).unwrap() - 0.6).abs() < 1e-15);
        let sx = obs(1.0, 0.0, 0.0, 0.0);
        assert_eq!(quantum_mean(&p(1.0, 0.5, 0.5), &sx).unwrap(), 1.0);
        assert!(quantum_mean(&p(1.0, 1.0, 1.0), &sx).is_err());
    }

    #[test]
    fn moment_examples() {
        let sx = obs(1.0, 0.0, 0.0, 0.0);
        assert!((quantum_moment(&p(0.6, 0.7, 0.8), &sx, 2).unwrap() - 1.0).abs() < 1e-15);
        let sz = obs(0.0, 0.0, 1.0, -1.0);
        assert!((quantum_moment(&p(0.5, 0.5, 0.8), &sz, 2).unwrap() - 1.0).abs() < 1e-15);

        // spectral oracle: sum_i h_i^3 <e_i|rho|e_i>
        let state = p(0.6, 0.7, 0.8);
        let o = obs(0.4, -1.1, 0.9, -0.3);
        let rho = qubit::coin_matrix(&state);
        let e = cmat::eig_hermitian(&to_hermitian(&o)).unwrap();
        let oracle: f64 = (0..2)
            .map(|i| {
                let v = e.vector(i);
                e.values[i].powi(3) * v.inner(&rho.apply(&v)).re
            })
            .sum();
        assert!((quantum_moment(&state, &o, 3).unwrap() - oracle).abs() < 1e-12);
        assert!(
            (quantum_moment(&state, &o, 1).unwrap() - quantum_mean(&state, &o).unwrap()).abs()
                < 1e-12
        );
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(observable_eigenvalues(&obs(0.0, 0.0, 1.0, -1.0)), (1.0, -1.0));
        // characteristic polynomial of [[0, 3-4i], [3+4i, 0]]: l^2 - 25
        assert_eq!(observable_eigenvalues(&obs(3.0, 4.0, 0.0, 0.0)), (5.0, -5.0));
        assert_eq!(observable_eigenvalues(&obs(0.0, 0.0, 0.7, 0.7)), (0.7, 0.7));
    }

    #[test]
    fn bistochastic_examples() {
        let b = bistochastic(&obs(0.0, 0.0, 1.0, -1.0));
        assert_eq!(b.matrix, BistochasticMatrix2::identity());
        assert!(!b.degenerate);
        let b = bistochastic(&obs(1.0, 0.0, 0.0, 0.0));
        for row in b.matrix.0 {
            for v in row {
                assert!((v - 0.5).abs() < 1e-15);
            }
        }
        let b = bistochastic(&obs(0.0, 0.0, -1.0, 1.0));
        assert_eq!(b.matrix.0, [[0.0, 1.0], [1.0, 0.0]]);
        let b = bistochastic(&obs(0.0, 0.0, 0.3, 0.3));
        assert!(b.degenerate);
        assert_eq!(b.matrix, BistochasticMatrix2::identity());
    }

    #[test]
    fn bistochastic_relates_diagonal_to_eigenvalues() {
        let o = obs(0.4, -1.1, 0.9, -0.3);
        let b = bistochastic(&o);
        let (h1, h2) = b.eigenvalues;
        let w = b.matrix.0[0][0];
        assert!(b.matrix.max_sum_defect() < 1e-12);
        assert!((o.z1 - (w * h1 + (1.0 - w) * h2)).abs() < 1e-12);
        assert!((o.z2 - (w * h2 + (1.0 - w) * h1)).abs() < 1e-12);
        assert!((u11_weight(&o).unwrap() - w).abs() < 1e-12);
        // U diag(H1, H2) U^dagger reproduces H
        let d = CMat2::diag([c(h1, 0.0), c(h2, 0.0)]);
        let h = b.unitary * d * b.unitary.adjoint();
        assert!(h.max_abs_diff(&to_hermitian(&o)) < 1e-12);
    }
}
