//! Dense complex linear algebra kernel.
//!
//! Everything downstream (state families, measurements, the UD solver) sits
//! on top of one cyclic Jacobi eigensolver for Hermitian matrices. Matrix
//! functions are evaluated on the support, and the bipartite Schmidt
//! decomposition is realized through the eigendecomposition of the Gram of
//! the reshaped coefficient matrix.

use num_complex::Complex64;

use crate::ensembles::PureState;
use crate::error::{Error, Result};

/// Tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues below `rel * max|lambda|` are treated as null-space.
pub const NULL_TOL_REL: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Apply to a vector: `A v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Rank-one update `self += c * v v^dag`.
    pub fn add_outer(&mut self, c: Complex64, v: &[Complex64]) {
        assert_eq!(self.rows, v.len());
        assert_eq!(self.cols, v.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                let upd = c * v[i] * v[j].conj();
                self.set(i, j, self.get(i, j) + upd);
            }
        }
    }

    /// Solve `A X = B` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != self.cols || b.rows != self.rows {
            return Err(Error::DimensionMismatch(
                "solve requires square A and matching right-hand side".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a.get(r, col).norm()))
                .max_by(|l, r| l.1.total_cmp(&r.1))
                .unwrap();
            if pivot_abs < 1e-14 {
                return Err(Error::SolverFailure("singular linear system".into()));
            }
            if pivot_row != col {
                for j in 0..n {
                    let (u, v) = (a.get(col, j), a.get(pivot_row, j));
                    a.set(col, j, v);
                    a.set(pivot_row, j, u);
                }
                for j in 0..x.cols {
                    let (u, v) = (x.get(col, j), x.get(pivot_row, j));
                    x.set(col, j, v);
                    x.set(pivot_row, j, u);
                }
            }
            let pivot = a.get(col, col);
            for r in (col + 1)..n {
                let factor = a.get(r, col) / pivot;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a.get(r, j) - factor * a.get(col, j);
                    a.set(r, j, v);
                }
                for j in 0..x.cols {
                    let v = x.get(r, j) - factor * x.get(col, j);
                    x.set(r, j, v);
                }
            }
        }
        for col in (0..n).rev() {
            let pivot = a.get(col, col);
            for j in 0..x.cols {
                let mut v = x.get(col, j);
                for k in (col + 1)..n {
                    v -= a.get(col, k) * x.get(k, j);
                }
                x.set(col, j, v / pivot);
            }
        }
        Ok(x)
    }
}

/// Hermitian view of a [`ComplexMatrix`]; validity is checked at construction.
#[derive(Debug, Clone)]
pub struct Hermitian(ComplexMatrix);

impl Hermitian {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let dev = m.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitian { deviation: dev });
        }
        Ok(Self(m))
    }

    /// Symmetrize `(A + A^dag)/2` first; rejects only gross asymmetry.
    pub fn symmetrized(m: &ComplexMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch("not square".into()));
        }
        let sym = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
        Ok(Self(sym))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// Result of a Hermitian eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as matrix columns, same order as eigenvalues.
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors.get(i, k))
            .collect()
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(a: &Hermitian) -> Result<EigDecomposition> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.max_abs().max(1e-300);
    let target = 1e-15 * scale;

    let mut converged = false;
    let mut last_off = 0.0;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.get(p, q).norm());
            }
        }
        last_off = off;
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let x = apq.norm();
                if x <= target * 1e-2 {
                    continue;
                }
                let w = apq / x; // phase of the pivot entry
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let tau = (aqq - app) / (2.0 * x);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // U on the (p,q) plane: [[c, s], [-conj(w) s, conj(w) c]].
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -w.conj() * s;
                let uqq = w.conj() * c;

                // Columns: B = M U.
                for r in 0..n {
                    let mp = m.get(r, p);
                    let mq = m.get(r, q);
                    m.set(r, p, mp * upp + mq * uqp);
                    m.set(r, q, mp * upq + mq * uqq);
                }
                // Rows: M' = U^dag B.
                for cidx in 0..n {
                    let mp = m.get(p, cidx);
                    let mq = m.get(q, cidx);
                    m.set(p, cidx, upp.conj() * mp + uqp.conj() * mq);
                    m.set(q, cidx, upq.conj() * mp + uqq.conj() * mq);
                }
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));
                // Accumulate V U.
                for r in 0..n {
                    let vp = v.get(r, p);
                    let vq = v.get(r, q);
                    v.set(r, p, vp * upp + vq * uqp);
                    v.set(r, q, vp * upq + vq * uqq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
            off: last_off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| m.get(k, k).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral function restricted to the support: eigenvalues at or below
/// `null_tol` are skipped.
pub fn matrix_function_on_support(
    a: &Hermitian,
    f: impl Fn(f64) -> f64,
    null_tol: f64,
) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= null_tol {
            continue;
        }
        let value = f(lambda);
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "function not finite at eigenvalue {lambda}"
            )));
        }
        out.add_outer(Complex64::new(value, 0.0), &eig.eigenvector(k));
    }
    Ok(out)
}

/// Relative null-space cutoff for a given Hermitian matrix.
pub fn default_null_tol(a: &Hermitian) -> f64 {
    NULL_TOL_REL * a.matrix().max_abs().max(f64::MIN_POSITIVE)
}

/// True iff the minimum eigenvalue is at least `-tol`.
pub fn psd_check(a: &Hermitian, tol: f64) -> Result<bool> {
    let eig = hermitian_eig(a)?;
    Ok(eig.eigenvalues.first().map_or(true, |&l| l >= -tol))
}

pub fn min_eigenvalue(a: &Hermitian) -> Result<f64> {
    let eig = hermitian_eig(a)?;
    Ok(eig.eigenvalues[0])
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |i, j| {
        a.get(i / b.rows(), j / b.cols()) * b.get(i % b.rows(), j % b.cols())
    })
}

/// Schmidt decomposition of a bipartite pure state.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Singular values, descending; length `min(dim_a, dim_b)`.
    pub coefficients: Vec<f64>,
    /// Orthonormal left factors, one per coefficient above tolerance.
    pub left_vectors: Vec<PureState>,
    /// Orthonormal right factors, one per coefficient above tolerance.
    pub right_vectors: Vec<PureState>,
    /// Number of coefficients above `SCHMIDT_RANK_TOL`.
    pub rank: usize,
}

pub const SCHMIDT_RANK_TOL: f64 = 1e-9;

/// Schmidt decomposition via the eigendecomposition of `C C^dag`, where `C`
/// is the `dim_a x dim_b` reshaping of the amplitudes.
pub fn schmidt_decompose(v: &PureState, dim_a: usize, dim_b: usize) -> Result<SchmidtDecomposition> {
    schmidt_decompose_raw(v.amplitudes(), dim_a, dim_b)
}

/// Same as [`schmidt_decompose`] for a raw (possibly unnormalized) vector.
pub fn schmidt_decompose_raw(
    amps: &[Complex64],
    dim_a: usize,
    dim_b: usize,
) -> Result<SchmidtDecomposition> {
    if dim_a * dim_b != amps.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape length {} into {}x{}",
            amps.len(),
            dim_a,
            dim_b
        )));
    }
    let c = ComplexMatrix::from_fn(dim_a, dim_b, |i, j| amps[i * dim_b + j]);
    let gram = Hermitian::symmetrized(&c.mul(&c.adjoint()))?;
    let eig = hermitian_eig(&gram)?;

    let k = dim_a.min(dim_b);
    // Descending singular values; gram eigenvalues come back ascending.
    let mut coefficients = Vec::with_capacity(k);
    let mut left_vectors = Vec::new();
    let mut right_vectors = Vec::new();
    for idx in 0..k {
        let col = dim_a - 1 - idx;
        let u = eig.eigenvector(col);
        let cu = c.adjoint().apply(&u);
        // `|C^dag u|` re-estimates the singular value; near the rank
        // boundary it is far less noisy than the Jacobi eigenvalue.
        let sigma = cu.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        coefficients.push(sigma);
        if sigma > SCHMIDT_RANK_TOL {
            let right: Vec<Complex64> = cu.iter().map(|z| z / sigma).collect();
            left_vectors.push(PureState::new(u)?);
            right_vectors.push(PureState::new(right)?);
        }
    }
    let rank = left_vectors.len();
    if rank == 0 {
        return Err(Error::Validation("zero vector has no Schmidt form".into()));
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Hermitian {
        let raw = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Hermitian::symmetrized(&raw.add(&raw.adjoint())).unwrap()
    }

    #[test]
    fn jacobi_reconstructs_the_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 6, 9] {
            let a = random_hermitian(n, &mut rng);
            let eig = hermitian_eig(&a).unwrap();
            let mut rebuilt = ComplexMatrix::zeros(n, n);
            for (k, &l) in eig.eigenvalues.iter().enumerate() {
                rebuilt.add_outer(Complex64::new(l, 0.0), &eig.eigenvector(k));
            }
            assert!(rebuilt.sub(a.matrix()).max_abs() < 1e-12);
            for w in eig.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn jacobi_eigenvectors_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_hermitian(7, &mut rng);
        let eig = hermitian_eig(&a).unwrap();
        let gram = eig.eigenvectors.adjoint().mul(&eig.eigenvectors);
        assert!(gram.sub(&ComplexMatrix::identity(7)).max_abs() < 1e-13);
    }

    #[test]
    fn psd_check_agrees_with_eigenvalue_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let a = random_hermitian(4, &mut rng);
            let min = min_eigenvalue(&a).unwrap();
            assert_eq!(psd_check(&a, 1e-12).unwrap(), min >= -1e-12);
        }
    }

    #[test]
    fn matrix_function_inverts_on_support_only() {
        // diag(4, 1, 0): inverse square root must skip the kernel.
        let a = Hermitian::new(ComplexMatrix::from_fn(3, 3, |i, j| {
            let v = if i != j { 0.0 } else { [4.0, 1.0, 0.0][i] };
            Complex64::new(v, 0.0)
        }))
        .unwrap();
        let out = matrix_function_on_support(&a, |l| 1.0 / l.sqrt(), default_null_tol(&a)).unwrap();
        assert!((out.get(0, 0).re - 0.5).abs() < 1e-14);
        assert!((out.get(1, 1).re - 1.0).abs() < 1e-14);
        assert!(out.get(2, 2).norm() < 1e-14);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = ComplexMatrix::from_fn(5, 5, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let x = ComplexMatrix::from_fn(5, 2, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let b = a.mul(&x);
        let solved = a.solve(&b).unwrap();
        assert!(solved.sub(&x).max_abs() < 1e-11);
    }

    #[test]
    fn singular_solve_is_rejected() {
        let a = ComplexMatrix::zeros(3, 3);
        assert!(a.solve(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn schmidt_of_product_state_is_rank_one() {
        let a = PureState::from_real(&[0.6, 0.8]).unwrap();
        let b = PureState::from_real(&[1.0 / 2.0_f64.sqrt(), -1.0 / 2.0_f64.sqrt()]).unwrap();
        let d = schmidt_decompose(&a.tensor(&b), 2, 2).unwrap();
        assert_eq!(d.rank, 1);
        assert!((d.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(d.coefficients[1].abs() < 1e-12);
    }

    #[test]
    fn schmidt_of_bell_state_is_balanced() {
        let r = 1.0 / 2.0_f64.sqrt();
        let bell = PureState::from_real(&[r, 0.0, 0.0, r]).unwrap();
        let d = schmidt_decompose(&bell, 2, 2).unwrap();
        assert_eq!(d.rank, 2);
        for c in &d.coefficients {
            assert!((c - r).abs() < 1e-12);
        }
        // Reconstruction from the Schmidt form.
        let mut rebuilt = vec![Complex64::new(0.0, 0.0); 4];
        for k in 0..d.rank {
            let term = d.left_vectors[k].tensor(&d.right_vectors[k]);
            for (r_, t) in rebuilt.iter_mut().zip(term.amplitudes()) {
                *r_ += Complex64::new(d.coefficients[k], 0.0) * t;
            }
        }
        for (x, y) in rebuilt.iter().zip(bell.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn kron_matches_direct_tensor() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64));
        let k = kron(&a, &b);
        assert_eq!(k.rows(), 6);
        for i in 0..6 {
            for j in 0..6 {
                let expected = a.get(i / 3, j / 3) * b.get(i % 3, j % 3);
                assert_eq!(k.get(i, j), expected);
            }
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, Complex64::new(0.5, 0.0));
        assert!(matches!(
            Hermitian::new(m),
            Err(Error::NonHermitian { .. })
        ));
    }
}
