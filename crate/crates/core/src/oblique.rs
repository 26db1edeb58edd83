//! Vectors and operators in nonorthogonal ordered bases: metric-based
//! coordinates, inner products, and change of basis.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::ensembles::PureState;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix, Hermitian};

/// Relative residual accepted for span membership.
pub const SPAN_TOL: f64 = 1e-9;

static NEXT_BASIS_ID: AtomicU64 = AtomicU64::new(1);

/// Ordered, linearly independent (possibly nonorthogonal) basis of a
/// subspace, with its Gram metric cached.
#[derive(Debug, Clone)]
pub struct ObliqueBasis {
    id: u64,
    vectors: Vec<PureState>,
    metric: Hermitian,
    metric_inv: ComplexMatrix,
}

impl ObliqueBasis {
    pub fn new(vectors: Vec<PureState>) -> Result<Self> {
        let metric = crate::ensembles::gram_matrix(&vectors)?;
        let eig = hermitian_eig(&metric)?;
        let min_eig = eig.eigenvalues[0];
        if min_eig <= 1e-10 {
            return Err(Error::LinearlyDependent { min_eig });
        }
        let n = vectors.len();
        let mut metric_inv = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            metric_inv.add_outer(
                Complex64::new(1.0 / eig.eigenvalues[k], 0.0),
                &eig.eigenvector(k),
            );
        }
        Ok(Self {
            id: NEXT_BASIS_ID.fetch_add(1, Ordering::Relaxed),
            vectors,
            metric,
            metric_inv,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn metric(&self) -> &Hermitian {
        &self.metric
    }

    /// Canonical-space vector from coordinates.
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.ambient_dim()];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            for (o, a) in out.iter_mut().zip(v.amplitudes()) {
                *o += c * a;
            }
        }
        out
    }

    fn solve_coords(&self, target: &[Complex64]) -> (Vec<Complex64>, f64) {
        let overlaps: Vec<Complex64> = self
            .vectors
            .iter()
            .map(|v| {
                v.amplitudes()
                    .iter()
                    .zip(target)
                    .map(|(a, b)| a.conj() * b)
                    .sum()
            })
            .collect();
        let coeffs = self.metric_inv.apply(&overlaps);
        let rebuilt = self.reconstruct(&coeffs);
        let norm: f64 = target.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let residual: f64 = rebuilt
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / norm.max(1e-300);
        (coeffs, residual)
    }
}

/// Coordinates of a vector in a specific [`ObliqueBasis`].
#[derive(Debug, Clone)]
pub struct ObliqueCoords {
    basis_id: u64,
    pub coeffs: Vec<Complex64>,
}

impl ObliqueCoords {
    pub fn basis_id(&self) -> u64 {
        self.basis_id
    }
}

/// Coordinates of `v` in `basis`, solved through the metric normal
/// equations `c = G^{-1} overlaps`.
pub fn coords_in_basis(v: &PureState, basis: &ObliqueBasis) -> Result<ObliqueCoords> {
    let (coeffs, residual) = basis.solve_coords(v.amplitudes());
    if residual > SPAN_TOL {
        return Err(Error::OutsideSpan { residual });
    }
    Ok(ObliqueCoords {
        basis_id: basis.id,
        coeffs,
    })
}

/// Matrix of a canonical-basis operator with respect to an oblique basis:
/// column `k` holds the coordinates of `A b_k`.
pub fn operator_matrix_in_basis(a: &ComplexMatrix, basis: &ObliqueBasis) -> Result<ComplexMatrix> {
    let n = basis.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let image = a.apply(basis.vectors[k].amplitudes());
        let norm: f64 = image.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let (coeffs, residual) = basis.solve_coords(&image);
        // Images that vanish are inside any span.
        if norm > 1e-12 && residual > SPAN_TOL {
            return Err(Error::OutsideSpan { residual });
        }
        for (i, c) in coeffs.iter().enumerate() {
            out.set(i, k, *c);
        }
    }
    Ok(out)
}

/// Change-of-basis matrix: column `j` holds the coordinates of the `j`-th
/// `from`-vector in the `to` basis. Spans must coincide.
pub fn change_of_basis(from: &ObliqueBasis, to: &ObliqueBasis) -> Result<ComplexMatrix> {
    if from.len() != to.len() || from.ambient_dim() != to.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "bases have different sizes".into(),
        ));
    }
    // Both directions must embed; otherwise the spans differ.
    for v in to.vectors() {
        let (_, residual) = from.solve_coords(v.amplitudes());
        if residual > SPAN_TOL {
            return Err(Error::OutsideSpan { residual });
        }
    }
    let n = from.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let (coeffs, residual) = to.solve_coords(from.vectors[j].amplitudes());
        if residual > SPAN_TOL {
            return Err(Error::OutsideSpan { residual });
        }
        for (i, c) in coeffs.iter().enumerate() {
            out.set(i, j, *c);
        }
    }
    Ok(out)
}

/// Metric inner product `a^dag G b`; equals the canonical inner product of
/// the reconstructed vectors.
pub fn oblique_inner_product(
    basis: &ObliqueBasis,
    a: &ObliqueCoords,
    b: &ObliqueCoords,
) -> Result<Complex64> {
    if a.basis_id != basis.id || b.basis_id != basis.id {
        return Err(Error::BasisMismatch);
    }
    let gb = basis.metric.matrix().apply(&b.coeffs);
    Ok(a.coeffs
        .iter()
        .zip(&gb)
        .map(|(x, y)| x.conj() * y)
        .sum())
}
