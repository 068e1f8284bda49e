//! Fixed-size complex linear algebra.
//!
//! Matrices are stored row-major. The Kronecker product follows the block
//! convention `kron(a, b)[(i, k), (j, l)] = a[i][j] * b[k][l]`, which is the
//! same ordering used when a 2x2 matrix is flattened row by row into a
//! 4-vector.
//!
//! Two eigen paths are provided: a closed form for 2x2 Hermitian matrices and
//! cyclic complex Jacobi rotations for larger ones. Both serve as reference
//! oracles for the probability-space formulas elsewhere in the crate.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Entrywise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Components with modulus below this are skipped when fixing phases.
pub const PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmatError {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("non-finite entry")]
    NonFinite,
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a complex number, rejecting NaN and infinities.
pub fn complex(re: f64, im: f64) -> Result<C64, CmatError> {
    if re.is_finite() && im.is_finite() {
        Ok(C64::new(re, im))
    } else {
        Err(CmatError::NonFinite)
    }
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;
pub type CMat16 = CMat<16>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [C64; N]);

pub type CVec2 = CVec<2>;
pub type CVec4 = CVec<4>;
pub type CVec16 = CVec<16>;

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[C64; N]; N]) -> Self {
        CMat(rows)
    }

    pub fn try_from_rows(rows: [[C64; N]; N]) -> Result<Self, CmatError> {
        let m = CMat(rows);
        if m.is_finite() {
            Ok(m)
        } else {
            Err(CmatError::NonFinite)
        }
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = c(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z = z.conj());
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        if N == 2 {
            return self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0];
        }
        let mut a = self.0;
        let mut det = ONE;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap();
            if a[pivot][col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col];
            det *= p;
            for row in col + 1..N {
                let f = a[row][col] / p;
                for k in col..N {
                    let v = a[col][k];
                    a[row][k] -= f * v;
                }
            }
        }
        det
    }

    pub fn apply(&self, v: &CVec<N>) -> CVec<N> {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        CVec(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn column(&self, j: usize) -> CVec<N> {
        let mut v = [ZERO; N];
        for (i, x) in v.iter_mut().enumerate() {
            *x = self.0[i][j];
        }
        CVec(v)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Row-major flattening. `M` must equal `N * N`.
    pub fn flatten<const M: usize>(&self) -> CVec<M> {
        assert_eq!(M, N * N, "flatten target size must be N*N");
        let mut out = [ZERO; M];
        for i in 0..N {
            for j in 0..N {
                out[i * N + j] = self.0[i][j];
            }
        }
        CVec(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc * *self)
    }
}

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> CVec<N> {
    pub fn zeros() -> Self {
        CVec([ZERO; N])
    }

    pub fn basis(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = ONE;
        v
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|self><other|`.
    pub fn outer(&self, other: &Self) -> CMat<N> {
        let mut m = CMat::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * other.0[j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut v = *self;
        v.0.iter_mut().for_each(|z| *z *= s);
        v
    }

    pub fn normalized(&self) -> Self {
        self.scale(c(1.0 / self.norm(), 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Multiplies by a global phase so the first component with modulus
    /// above [`PHASE_TOL`] is real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        match self.0.iter().find(|z| z.norm() > PHASE_TOL) {
            Some(z) => self.scale(z.conj() / z.norm()),
            None => *self,
        }
    }
}

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            self.0[i] += rhs.0[i];
        }
        self
    }
}

impl<const N: usize> Index<usize> for CVec<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

fn kron_generic<const A: usize, const B: usize, const C: usize>(
    a: &CMat<A>,
    b: &CMat<B>,
) -> CMat<C> {
    assert_eq!(C, A * B);
    let mut m = CMat::<C>::zeros();
    for i in 0..A {
        for j in 0..A {
            let s = a.0[i][j];
            for k in 0..B {
                for l in 0..B {
                    m.0[i * B + k][j * B + l] = s * b.0[k][l];
                }
            }
        }
    }
    m
}

pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    kron_generic(a, b)
}

pub fn kron4(a: &CMat4, b: &CMat4) -> CMat16 {
    kron_generic(a, b)
}

pub fn sigma_x() -> CMat2 {
    CMat::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn sigma_y() -> CMat2 {
    CMat([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]])
}

pub fn sigma_z() -> CMat2 {
    CMat::from_real([[1.0, 0.0], [0.0, -1.0]])
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct Eigen<const N: usize> {
    /// Ascending.
    pub values: [f64; N],
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: CMat<N>,
}

impl<const N: usize> Eigen<N> {
    pub fn vector(&self, k: usize) -> CVec<N> {
        self.vectors.column(k)
    }

    /// `sum_k lambda_k v_k v_k^dagger`.
    pub fn reconstruct(&self) -> CMat<N> {
        (0..N).fold(CMat::zeros(), |acc, k| {
            let v = self.vector(k);
            acc + v.outer(&v).scale_re(self.values[k])
        })
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
/// matrix. Each eigenvector has its first significant component made real
/// and positive.
pub fn eig_hermitian<const N: usize>(m: &CMat<N>) -> Result<Eigen<N>, CmatError> {
    if !m.is_finite() {
        return Err(CmatError::NonFinite);
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(CmatError::NotHermitian(defect));
    }
    let (values, vectors) = if N == 2 {
        eig2_closed_form(m)
    } else {
        jacobi(m)
    };
    // stable sort keeps Jacobi order on ties
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut sorted = Eigen {
        values: [0.0; N],
        vectors: CMat::zeros(),
    };
    for (dst, &src) in order.iter().enumerate() {
        sorted.values[dst] = values[src];
        let v = vectors.column(src).with_canonical_phase();
        for i in 0..N {
            sorted.vectors.0[i][dst] = v.0[i];
        }
    }
    Ok(sorted)
}

fn eig2_closed_form<const N: usize>(m: &CMat<N>) -> ([f64; N], CMat<N>) {
    let a = m.0[0][0].re;
    let d = m.0[1][1].re;
    // average the two off-diagonal estimates to symmetrize small defects
    let b = (m.0[0][1] + m.0[1][0].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b.norm());
    let mut values = [0.0; N];
    let mut vectors = CMat::<N>::zeros();
    if b.norm() == 0.0 {
        let (lo, hi) = if a <= d { (0, 1) } else { (1, 0) };
        values[0] = m.0[lo][lo].re;
        values[1] = m.0[hi][hi].re;
        vectors.0[lo][0] = ONE;
        vectors.0[hi][1] = ONE;
        return (values, vectors);
    }
    values[0] = mean - radius;
    values[1] = mean + radius;
    for k in 0..2 {
        let lambda = values[k];
        // (m - lambda) v = 0: take whichever null-space form is better conditioned
        let from_row0 = [b, c(lambda - a, 0.0)];
        let from_row1 = [c(lambda - d, 0.0), b.conj()];
        let n0 = from_row0[0].norm_sqr() + from_row0[1].norm_sqr();
        let n1 = from_row1[0].norm_sqr() + from_row1[1].norm_sqr();
        let (v, n) = if n0 >= n1 { (from_row0, n0) } else { (from_row1, n1) };
        let s = 1.0 / n.sqrt();
        vectors.0[0][k] = v[0] * s;
        vectors.0[1][k] = v[1] * s;
    }
    (values, vectors)
}

fn off_diagonal_norm<const N: usize>(a: &[[C64; N]; N]) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi. Each rotation `G` acts on the (p, q) plane with
/// `G_pp = G_qq = c`, `G_pq = s e^{i phi}`, `G_qp = -s e^{-i phi}` where
/// `phi = arg a_pq`, and the update is `A <- G^dagger A G`.
fn jacobi<const N: usize>(m: &CMat<N>) -> ([f64; N], CMat<N>) {
    let mut a = m.0;
    for i in 0..N {
        a[i][i] = c(a[i][i].re, 0.0);
    }
    let mut v = CMat::<N>::identity().0;
    let scale = m.frobenius().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let g_pq = phase * sn;
                let g_qp = -phase.conj() * sn;

                // A <- A G (columns p, q)
                for row in a.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * cs + xq * g_qp;
                    row[q] = xp * g_pq + xq * cs;
                }
                // A <- G^dagger A (rows p, q)
                for col in 0..N {
                    let (xp, xq) = (a[p][col], a[q][col]);
                    a[p][col] = xp * cs + xq * g_qp.conj();
                    a[q][col] = xp * g_pq.conj() + xq * cs;
                }
                a[p][q] = ZERO;
                a[q][p] = ZERO;
                a[p][p] = c(a[p][p].re, 0.0);
                a[q][q] = c(a[q][q].re, 0.0);
                for row in v.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * cs + xq * g_qp;
                    row[q] = xp * g_pq + xq * cs;
                }
            }
        }
    }
    let mut values = [0.0; N];
    for i in 0..N {
        values[i] = a[i][i].re;
    }
    (values, CMat(v))
}

/// `exp(-i t h)` for a Hermitian 2x2 generator.
///
/// Writes `h = alpha 1 + n . sigma` and returns
/// `e^{-i alpha t} [cos(w t) 1 - i sin(w t) (n/w) . sigma]` with `w = |n|`.
pub fn expm_herm_generator(h: &CMat2, t: f64) -> Result<CMat2, CmatError> {
    if !h.is_finite() || !t.is_finite() {
        return Err(CmatError::NonFinite);
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(CmatError::NotHermitian(defect));
    }
    let alpha = 0.5 * (h.0[0][0].re + h.0[1][1].re);
    let off = (h.0[1][0] + h.0[0][1].conj()) * 0.5;
    let nx = off.re;
    let ny = off.im;
    let nz = 0.5 * (h.0[0][0].re - h.0[1][1].re);
    let omega = (nx * nx + ny * ny + nz * nz).sqrt();
    let global = C64::from_polar(1.0, -alpha * t);
    if omega == 0.0 {
        return Ok(CMat::identity().scale(global));
    }
    let (sin, cos) = (omega * t).sin_cos();
    let k = sin / omega;
    // cos 1 - i k (nx sx + ny sy + nz sz)
    let u = CMat([
        [c(cos, -k * nz), c(-k * ny, -k * nx)],
        [c(k * ny, -k * nx), c(cos, k * nz)],
    ]);
    Ok(u.scale(global))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat<const N: usize>(rng: &mut impl Rng) -> CMat<N> {
        let mut m = CMat::<N>::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    fn random_hermitian<const N: usize>(rng: &mut impl Rng) -> CMat<N> {
        let m = random_mat::<N>(rng);
        (m + m.adjoint()).scale_re(0.5)
    }

    /// Taylor series with scaling and squaring; independent of the Pauli form.
    fn expm_series(h: &CMat2, t: f64) -> CMat2 {
        let squarings = 8;
        let a = h.scale(c(0.0, -t / f64::from(1u32 << squarings)));
        let mut term = CMat2::identity();
        let mut sum = CMat2::identity();
        for k in 1..30 {
            term = (term * a).scale_re(1.0 / k as f64);
            sum = sum + term;
        }
        (0..squarings).fold(sum, |m, _| m * m)
    }

    #[test]
    fn basic_algebra() {
        assert_eq!(CMat2::identity().trace(), c(2.0, 0.0));
        let d = CMat2::diag([c(2.0, 1.0), c(-3.0, 0.5)]);
        assert!((d.det() - c(2.0, 1.0) * c(-3.0, 0.5)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_mat::<4>(&mut rng);
        assert_eq!(m.adjoint().adjoint(), m);
        let d4 = CMat4::diag([c(1.0, 0.0), c(2.0, 0.0), c(3.0, 1.0), c(-1.0, 0.0)]);
        assert!((d4.det() - c(-6.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn det_of_product_is_product_of_dets() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_mat::<4>(&mut rng);
        let b = random_mat::<4>(&mut rng);
        assert!(((a * b).det() - a.det() * b.det()).norm() < 1e-12);
    }

    #[test]
    fn complex_rejects_non_finite() {
        assert!(complex(f64::NAN, 0.0).is_err());
        assert!(complex(1.0, f64::INFINITY).is_err());
        assert!(CMat2::try_from_rows([[c(f64::NAN, 0.0), ONE], [ONE, ONE]]).is_err());
    }

    #[test]
    fn kron_identity_and_block_order() {
        assert_eq!(kron(&CMat2::identity(), &CMat2::identity()), CMat4::identity());
        let k = kron(&sigma_x(), &CMat2::identity());
        // basis |0,0> goes to |1,0>, i.e. slot 0 -> slot 2
        assert_eq!(k.apply(&CVec4::basis(0)), CVec4::basis(2));
        assert_eq!(k.apply(&CVec4::basis(1)), CVec4::basis(3));
        assert_eq!(k.apply(&CVec4::basis(2)), CVec4::basis(0));
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (a, b, cc, d) = (
                random_mat::<2>(&mut rng),
                random_mat::<2>(&mut rng),
                random_mat::<2>(&mut rng),
                random_mat::<2>(&mut rng),
            );
            let lhs = kron(&a, &b) * kron(&cc, &d);
            let rhs = kron(&(a * cc), &(b * d));
            assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        }
        let a = random_mat::<4>(&mut rng);
        let b = random_mat::<4>(&mut rng);
        let k = kron4(&a, &b);
        assert_eq!(k[(5, 6)], a[(1, 1)] * b[(1, 2)]);
        assert_eq!(k[(15, 0)], a[(3, 0)] * b[(3, 0)]);
    }

    #[test]
    fn eig_pauli_z_and_x() {
        let e = eig_hermitian(&sigma_z()).unwrap();
        assert_eq!(e.values, [-1.0, 1.0]);
        assert!(e.vector(0).max_abs_diff(&CVec2::basis(1)) < 1e-15);
        assert!(e.vector(1).max_abs_diff(&CVec2::basis(0)) < 1e-15);

        let e = eig_hermitian(&sigma_x()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        assert!(e.vector(0).max_abs_diff(&CVec([c(s, 0.0), c(-s, 0.0)])) < 1e-15);
        assert!(e.vector(1).max_abs_diff(&CVec([c(s, 0.0), c(s, 0.0)])) < 1e-15);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMat2::from_real([[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m), Err(CmatError::NotHermitian(_))));
    }

    fn check_eig<const N: usize>(m: &CMat<N>) {
        let e = eig_hermitian(m).unwrap();
        assert!(e.reconstruct().max_abs_diff(m) < 1e-10);
        for k in 0..N {
            let v = e.vector(k);
            let mv = m.apply(&v);
            assert!(mv.max_abs_diff(&v.scale(c(e.values[k], 0.0))) < 1e-10);
            for l in 0..N {
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((v.inner(&e.vector(l)) - c(expected, 0.0)).norm() < 1e-10);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            check_eig(&random_hermitian::<2>(&mut rng));
            check_eig(&random_hermitian::<4>(&mut rng));
        }
        for _ in 0..20 {
            check_eig(&random_hermitian::<16>(&mut rng));
        }
    }

    #[test]
    fn eig_degenerate_spectrum() {
        check_eig(&CMat4::identity().scale_re(0.25));
        let v = CVec([c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(-0.5, 0.0)]);
        check_eig(&v.outer(&v));
        let e = eig_hermitian(&v.outer(&v)).unwrap();
        assert!((e.values[3] - 1.0).abs() < 1e-12);
        assert!(e.values[..3].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn expm_zero_generator_and_spinor_sign() {
        let u = expm_herm_generator(&CMat2::zeros(), 1.7).unwrap();
        assert_eq!(u, CMat2::identity());
        let h = sigma_z().scale_re(0.5);
        let u = expm_herm_generator(&h, 2.0 * std::f64::consts::PI).unwrap();
        let oracle = expm_series(&h, 2.0 * std::f64::consts::PI);
        assert!(u.max_abs_diff(&-CMat2::identity()) < 1e-12);
        assert!(oracle.max_abs_diff(&-CMat2::identity()) < 1e-12);
    }

    #[test]
    fn expm_matches_series_and_group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let h = random_hermitian::<2>(&mut rng);
            let t = rng.gen_range(-3.0..3.0);
            let s = rng.gen_range(-3.0..3.0);
            let u = expm_herm_generator(&h, t).unwrap();
            assert!(u.max_abs_diff(&expm_series(&h, t)) < 1e-10);
            assert!((u * u.adjoint()).max_abs_diff(&CMat2::identity()) < 1e-12);
            let us = expm_herm_generator(&h, s).unwrap();
            let uts = expm_herm_generator(&h, t + s).unwrap();
            assert!((u * us).max_abs_diff(&uts) < 1e-10);
            let expected_det = C64::from_polar(1.0, -t * h.trace().re);
            assert!((u.det() - expected_det).norm() < 1e-10);
        }
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = CMat2::from_real([[0.0, 1.0], [0.0, 0.0]]);
        assert!(expm_herm_generator(&m, 1.0).is_err());
    }
}
