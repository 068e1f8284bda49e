//! Probability parametrization of a 2x2 complex matrix.
//!
//! A matrix `A` is read row by row into `|A> = (A11, A12, A21, A22)`. The
//! rank-one matrix `|A><A|` is a 4x4 density matrix, and any Hermitian unit
//! trace 4x4 matrix is written with 15 coin probabilities:
//!
//! ```text
//! rho_22 = 1 - p3(22),  rho_33 = 1 - p3(33),  rho_44 = 1 - p3(44)
//! rho_11 = p3(22) + p3(33) + p3(44) - 2
//! rho_kj = p1(jk) - 1/2 + i (p2(jk) - 1/2)     for j < k
//! ```
//!
//! and `rho_jk = conj(rho_kj)`. The last line mirrors the 2x2 table, where the
//! lower entry carries `+i`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmat::{self, c, CMat16, CMat2, CMat4, CVec, CVec16, CVec4, C64};
use crate::exec::{self, Execution};

pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const SLOT_TOL: f64 = 1e-12;
pub const CONSISTENCY_TOL: f64 = 1e-10;
/// Smallest `|A_i|^2` accepted as the phase pivot of the inverse map.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Mat4Error {
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("diagonal probabilities sum to less than 2 (rho_11 = {rho11:e})")]
    TraceViolation { rho11: f64 },
    #[error("Tr(A^dagger A) = {trace}, expected 1")]
    NotNormalized { trace: f64 },
    #[error("table is not rank one (residual {residual:e})")]
    InconsistentTable { residual: f64 },
    #[error("probability {slot} = {value} outside [0, 1]")]
    OutOfRange { slot: String, value: f64 },
    #[error("matrix is not a density matrix: {0}")]
    InvalidDensity(String),
}

/// Lower-triangle index pairs `(j, k)`, zero-based, in table order
/// 12, 13, 14, 23, 24, 34.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_label(i: usize) -> String {
    let (j, k) = PAIRS[i];
    format!("{}{}", j + 1, k + 1)
}

/// `|A>`, row-major.
pub fn vectorize(a: &CMat2) -> CVec4 {
    CVec([a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]])
}

pub fn devectorize(v: &CVec4) -> CMat2 {
    CMat2::from_rows([[v[0], v[1]], [v[2], v[3]]])
}

/// A component `A_left * conj(A_right)` of a 16-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub left: (usize, usize),
    pub right: (usize, usize),
}

const fn comp(l: (usize, usize), r: (usize, usize)) -> Component {
    Component { left: l, right: r }
}

/// Components of `|A'>`, the rows of `A (x) A*` read one after another.
pub const APRIME_COMPONENTS: [Component; 16] = [
    comp((0, 0), (0, 0)),
    comp((0, 0), (0, 1)),
    comp((0, 1), (0, 0)),
    comp((0, 1), (0, 1)),
    comp((0, 0), (1, 0)),
    comp((0, 0), (1, 1)),
    comp((0, 1), (1, 0)),
    comp((0, 1), (1, 1)),
    comp((1, 0), (0, 0)),
    comp((1, 0), (0, 1)),
    comp((1, 1), (0, 0)),
    comp((1, 1), (0, 1)),
    comp((1, 0), (1, 0)),
    comp((1, 0), (1, 1)),
    comp((1, 1), (1, 0)),
    comp((1, 1), (1, 1)),
];

/// Components of `|A~>`, the rows of `|A><A|` read one after another.
pub const ATILDE_COMPONENTS: [Component; 16] = [
    comp((0, 0), (0, 0)),
    comp((0, 0), (0, 1)),
    comp((0, 0), (1, 0)),
    comp((0, 0), (1, 1)),
    comp((0, 1), (0, 0)),
    comp((0, 1), (0, 1)),
    comp((0, 1), (1, 0)),
    comp((0, 1), (1, 1)),
    comp((1, 0), (0, 0)),
    comp((1, 0), (0, 1)),
    comp((1, 0), (1, 0)),
    comp((1, 0), (1, 1)),
    comp((1, 1), (0, 0)),
    comp((1, 1), (0, 1)),
    comp((1, 1), (1, 0)),
    comp((1, 1), (1, 1)),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec16Pair {
    pub aprime: CVec16,
    pub atilde: CVec16,
}

fn evaluate(a: &CMat2, list: &[Component; 16]) -> CVec16 {
    CVec(list.map(|k| a[k.left] * a[k.right].conj()))
}

pub fn build_vec16(a: &CMat2) -> Vec16Pair {
    Vec16Pair {
        aprime: evaluate(a, &APRIME_COMPONENTS),
        atilde: evaluate(a, &ATILDE_COMPONENTS),
    }
}

/// The permutation with `|A'> = T |A~>`, read off by matching the two
/// component lists.
pub fn permutation_t() -> CMat16 {
    let mut t = CMat16::zeros();
    for (r, want) in APRIME_COMPONENTS.iter().enumerate() {
        let s = ATILDE_COMPONENTS
            .iter()
            .position(|k| k == want)
            .expect("both lists enumerate the same 16 products");
        t[(r, s)] = c(1.0, 0.0);
    }
    t
}

/// Builds a 16x16 matrix from unit 2x2 blocks at the given one-based block
/// positions of an 8x8 block grid.
pub fn block_matrix(blocks: &[(usize, usize)]) -> CMat16 {
    let mut t = CMat16::zeros();
    for &(bi, bk) in blocks {
        for d in 0..2 {
            t[(2 * (bi - 1) + d, 2 * (bk - 1) + d)] = c(1.0, 0.0);
        }
    }
    t
}

/// Unit blocks of `T` as they appear in the printed block description.
pub const PRINTED_T_BLOCKS: [(usize, usize); 8] =
    [(1, 1), (1, 3), (3, 1), (4, 4), (5, 5), (6, 7), (7, 6), (8, 8)];

/// Unit blocks of the permutation obtained from the component lists.
pub const COMPONENT_T_BLOCKS: [(usize, usize); 8] =
    [(1, 1), (2, 3), (3, 2), (4, 4), (5, 5), (6, 7), (7, 6), (8, 8)];

/// Every row and column holds a single 1 and zeros elsewhere.
pub fn is_permutation(m: &CMat16) -> bool {
    let ok = |line: &mut dyn Iterator<Item = C64>| {
        let mut ones = 0;
        for z in line {
            if z == c(1.0, 0.0) {
                ones += 1;
            } else if z != c(0.0, 0.0) {
                return false;
            }
        }
        ones == 1
    };
    (0..16).all(|i| ok(&mut (0..16).map(|j| m[(i, j)])) && ok(&mut (0..16).map(|j| m[(j, i)])))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(CMat4);

impl DensityMatrix4 {
    /// Hermitian, unit trace and positive semidefinite, each to 1e-12.
    pub fn new(m: CMat4) -> Result<Self, Mat4Error> {
        if !m.is_finite() {
            return Err(Mat4Error::InvalidDensity("non-finite entries".into()));
        }
        let defect = m.hermiticity_defect();
        if defect > TRACE_TOL {
            return Err(Mat4Error::InvalidDensity(format!("not Hermitian ({defect:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Mat4Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = min_eigenvalue(&m)?;
        if min < -TRACE_TOL {
            return Err(Mat4Error::InvalidDensity(format!("eigenvalue {min:e}")));
        }
        Ok(DensityMatrix4(m))
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }
}

/// Smallest eigenvalue of a Hermitian 4x4 matrix.
pub fn min_eigenvalue(m: &CMat4) -> Result<f64, Mat4Error> {
    cmat::eig_hermitian(m)
        .map(|e| e.values[0])
        .map_err(|e| Mat4Error::InvalidDensity(e.to_string()))
}

/// `|A><A| / <A|A>` on the vectorization of `a`.
pub fn rank1_density(a: &CMat2) -> Result<DensityMatrix4, Mat4Error> {
    let v = vectorize(a);
    let n = v.norm_sqr();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Mat4Error::ZeroMatrix);
    }
    DensityMatrix4::new(v.outer(&v).scale_re(1.0 / n))
}

/// The 15 coin probabilities of a 4x4 density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct ProbTable15 {
    diag: [f64; 3],
    pairs: [[f64; 2]; 6],
}

impl ProbTable15 {
    /// `diag` holds `p3(22), p3(33), p3(44)`; `pairs` holds `(p1, p2)` for
    /// the pairs in [`PAIRS`] order.
    pub fn new(diag: [f64; 3], pairs: [[f64; 2]; 6]) -> Result<Self, Mat4Error> {
        let check = |slot: String, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(Mat4Error::OutOfRange { slot, value })
            }
        };
        for (j, &d) in diag.iter().enumerate() {
            check(format!("p3({0}{0})", j + 2), d)?;
        }
        for (i, pair) in pairs.iter().enumerate() {
            check(format!("p1({})", pair_label(i)), pair[0])?;
            check(format!("p2({})", pair_label(i)), pair[1])?;
        }
        let rho11 = diag.iter().sum::<f64>() - 2.0;
        if rho11 < -TRACE_TOL {
            return Err(Mat4Error::TraceViolation { rho11 });
        }
        Ok(ProbTable15 { diag, pairs })
    }

    pub fn diag(&self) -> [f64; 3] {
        self.diag
    }

    pub fn pairs(&self) -> [[f64; 2]; 6] {
        self.pairs
    }

    /// All 15 values: the three diagonal probabilities, then `p1, p2` per pair.
    pub fn values(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        out[..3].copy_from_slice(&self.diag);
        for (i, p) in self.pairs.iter().enumerate() {
            out[3 + 2 * i] = p[0];
            out[4 + 2 * i] = p[1];
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for ProbTable15 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p3: ({}, {}, {})",
            self.diag[0], self.diag[1], self.diag[2]
        )?;
        for (i, p) in self.pairs.iter().enumerate() {
            write!(f, "; ({}): ({}, {})", pair_label(i), p[0], p[1])?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiag {
    #[serde(rename = "22")]
    d22: f64,
    #[serde(rename = "33")]
    d33: f64,
    #[serde(rename = "44")]
    d44: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPairs {
    #[serde(rename = "12")]
    p12: [f64; 2],
    #[serde(rename = "13")]
    p13: [f64; 2],
    #[serde(rename = "14")]
    p14: [f64; 2],
    #[serde(rename = "23")]
    p23: [f64; 2],
    #[serde(rename = "24")]
    p24: [f64; 2],
    #[serde(rename = "34")]
    p34: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    diag: RawDiag,
    pairs: RawPairs,
}

impl TryFrom<RawTable> for ProbTable15 {
    type Error = Mat4Error;

    fn try_from(r: RawTable) -> Result<Self, Self::Error> {
        let p = r.pairs;
        ProbTable15::new(
            [r.diag.d22, r.diag.d33, r.diag.d44],
            [p.p12, p.p13, p.p14, p.p23, p.p24, p.p34],
        )
    }
}

impl From<ProbTable15> for RawTable {
    fn from(t: ProbTable15) -> Self {
        let [p12, p13, p14, p23, p24, p34] = t.pairs;
        RawTable {
            diag: RawDiag {
                d22: t.diag[0],
                d33: t.diag[1],
                d44: t.diag[2],
            },
            pairs: RawPairs {
                p12,
                p13,
                p14,
                p23,
                p24,
                p34,
            },
        }
    }
}

/// Hermitian unit-trace matrix of a table. Positivity is not implied; see
/// [`min_eigenvalue`].
pub fn density4_from_probs(t: &ProbTable15) -> CMat4 {
    let mut m = CMat4::zeros();
    let [d22, d33, d44] = t.diag;
    m[(0, 0)] = c(d22 + d33 + d44 - 2.0, 0.0);
    m[(1, 1)] = c(1.0 - d22, 0.0);
    m[(2, 2)] = c(1.0 - d33, 0.0);
    m[(3, 3)] = c(1.0 - d44, 0.0);
    for (&(j, k), p) in PAIRS.iter().zip(&t.pairs) {
        let lower = c(p[0] - 0.5, p[1] - 0.5);
        m[(k, j)] = lower;
        m[(j, k)] = lower.conj();
    }
    m
}

fn clamp_slot(slot: impl Fn() -> String, v: f64) -> Result<f64, Mat4Error> {
    if (-SLOT_TOL..=1.0 + SLOT_TOL).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Mat4Error::OutOfRange { slot: slot(), value: v })
    }
}

/// Reads the 15 probabilities off a Hermitian unit-trace 4x4 matrix.
pub fn probs_from_density4(m: &CMat4) -> Result<ProbTable15, Mat4Error> {
    let defect = m.hermiticity_defect();
    if !m.is_finite() || defect > TRACE_TOL {
        return Err(Mat4Error::InvalidDensity(format!("not Hermitian ({defect:e})")));
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Mat4Error::InvalidDensity(format!("trace {tr}")));
    }
    let mut diag = [0.0; 3];
    for (j, d) in diag.iter_mut().enumerate() {
        *d = clamp_slot(|| format!("p3({0}{0})", j + 2), 1.0 - m[(j + 1, j + 1)].re)?;
    }
    let mut pairs = [[0.0; 2]; 6];
    for (i, &(j, k)) in PAIRS.iter().enumerate() {
        let z = m[(k, j)];
        pairs[i] = [
            clamp_slot(|| format!("p1({})", pair_label(i)), z.re + 0.5)?,
            clamp_slot(|| format!("p2({})", pair_label(i)), z.im + 0.5)?,
        ];
    }
    ProbTable15::new(diag, pairs)
}

/// Table of a normalized amplitude matrix, `Tr(A^dagger A) = 1`.
pub fn probs_from_amplitude2(a: &CMat2) -> Result<ProbTable15, Mat4Error> {
    let v = vectorize(a);
    let trace = v.norm_sqr();
    if !trace.is_finite() || (trace - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Mat4Error::NotNormalized { trace });
    }
    let rho = v.outer(&v);
    probs_from_density4(&rho)
}

/// Inverse of [`probs_from_amplitude2`] up to a global phase. The column of
/// the largest diagonal entry fixes the moduli and relative phases; the
/// global phase then makes the first entry of `|A>` with
/// `|A_i|^2 > PIVOT_TOL` real and positive.
pub fn amplitude2_from_probs(t: &ProbTable15) -> Result<CMat2, Mat4Error> {
    let rho = density4_from_probs(t);
    let pivot = (0..4)
        .max_by(|&i, &j| rho[(i, i)].re.total_cmp(&rho[(j, j)].re))
        .expect("four diagonal entries");
    let ai = rho[(pivot, pivot)].re.sqrt();
    if !(ai > 0.0) {
        return Err(Mat4Error::TraceViolation { rho11: rho[(0, 0)].re });
    }
    let v: CVec4 = CVec(std::array::from_fn(|j| rho[(j, pivot)] / ai));
    let residual = v.outer(&v).max_abs_diff(&rho);
    if residual > CONSISTENCY_TOL {
        return Err(Mat4Error::InconsistentTable { residual });
    }
    let first = (0..4)
        .find(|&i| v[i].norm_sqr() > PIVOT_TOL)
        .unwrap_or(pivot);
    let phase = v[first].conj() / v[first].norm();
    let mut out = v.scale(phase);
    out.0[first] = c(v[first].norm(), 0.0);
    Ok(devectorize(&out))
}

/// `min over phi of max |e^{i phi} a - b|`, evaluated at the optimal phase
/// `phi = arg <a|b>`.
pub fn phase_distance(a: &CMat2, b: &CMat2) -> f64 {
    let (va, vb) = (vectorize(a), vectorize(b));
    let overlap = va.inner(&vb);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    va.scale(phase).max_abs_diff(&vb)
}

/// Random matrix with entries uniform in the unit square, scaled to
/// `Tr(A^dagger A) = 1`.
pub fn random_normalized(rng: &mut impl Rng) -> CMat2 {
    loop {
        let v: CVec4 = CVec(std::array::from_fn(|_| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }));
        if v.norm_sqr() > 1e-6 {
            return devectorize(&v.normalized());
        }
    }
}

/// Results of checking `|A'> = T |A~>` and the list conventions on random
/// matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TCheckReport {
    pub seed: u64,
    pub samples: usize,
    /// `max |A' - T A~|`.
    pub max_deviation: f64,
    /// `max |A' - vec(A (x) A*)|`.
    pub kron_deviation: f64,
    /// `max |A~ - vec(|A><A|)|`.
    pub outer_deviation: f64,
    /// `max |T T - 1|`.
    pub involution_defect: f64,
    /// `max |T^T T - 1|`.
    pub orthogonality_defect: f64,
    pub is_permutation: bool,
}

pub fn t_check(seed: u64, samples: usize, exec: Execution) -> TCheckReport {
    let t = permutation_t();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<CMat2> = (0..samples)
        .map(|_| {
            CMat2::from_rows(std::array::from_fn(|_| {
                std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            }))
        })
        .collect();
    let devs = exec::map_collect(exec, &inputs, |a| {
        let pair = build_vec16(a);
        let v = vectorize(a);
        [
            t.apply(&pair.atilde).max_abs_diff(&pair.aprime),
            cmat::kron(a, &a.conj()).flatten::<16>().max_abs_diff(&pair.aprime),
            v.outer(&v).flatten::<16>().max_abs_diff(&pair.atilde),
        ]
    });
    let col = |i: usize| devs.iter().map(|d| d[i]).fold(0.0, f64::max);
    TCheckReport {
        seed,
        samples,
        max_deviation: col(0),
        kron_deviation: col(1),
        outer_deviation: col(2),
        involution_defect: (t * t).max_abs_diff(&CMat16::identity()),
        orthogonality_defect: (t.transpose() * t).max_abs_diff(&CMat16::identity()),
        is_permutation: is_permutation(&t),
    }
}
