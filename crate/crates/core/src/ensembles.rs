//! State families: symmetric sets with equal pairwise overlap, the
//! six-state product family built from them, the double trine, Gram
//! matrices, reciprocal (dual) states and linear-independence checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix, Hermitian};

pub const NORM_TOL: f64 = 1e-12;
pub const RANK_TOL: f64 = 1e-10;

/// Unit-norm pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 8.0 * NORM_TOL {
            return Err(Error::Validation(format!(
                "state norm^2 = {norm_sq}, not unit"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm < 1e-14 {
            return Err(Error::Validation("cannot normalize zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Canonical basis state `|k>` in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes: amps }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Self { amplitudes: amps }
    }

    /// Rank-one projector `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        m.add_outer(Complex64::new(1.0, 0.0), &self.amplitudes);
        m
    }
}

/// States with prior probabilities.
#[derive(Debug, Clone)]
pub struct Ensemble {
    states: Vec<PureState>,
    priors: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<PureState>, priors: Vec<f64>) -> Result<Self> {
        if states.len() != priors.len() {
            return Err(Error::Validation(
                "state and prior counts differ".into(),
            ));
        }
        if states.is_empty() {
            return Err(Error::Validation("empty ensemble".into()));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "ensemble states have mixed dimensions".into(),
            ));
        }
        if priors.iter().any(|&p| p < 0.0) {
            return Err(Error::Validation("negative prior".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("priors sum to {total}")));
        }
        Ok(Self { states, priors })
    }

    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let n = states.len();
        Self::new(states, vec![1.0 / n as f64; n])
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Density operator `sum_i eta_i |psi_i><psi_i|`.
    pub fn density(&self) -> ComplexMatrix {
        let mut rho = ComplexMatrix::zeros(self.dim(), self.dim());
        for (state, &prior) in self.states.iter().zip(&self.priors) {
            rho.add_outer(Complex64::new(prior, 0.0), state.amplitudes());
        }
        rho
    }
}

/// Parameters of the symmetric family: `N` unit states in dimension `d`
/// with all pairwise inner products equal to `s`.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricFamilyParams {
    pub s: f64,
    pub n: usize,
    pub d: usize,
}

impl SymmetricFamilyParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Validation("need at least two states".into()));
        }
        if self.d < self.n {
            return Err(Error::Validation(format!(
                "dimension {} below state count {}",
                self.d, self.n
            )));
        }
        let lower = -1.0 / (self.n as f64 - 1.0);
        if !(self.s > lower && self.s < 1.0) {
            return Err(Error::Validation(format!(
                "overlap {} outside the linear-independence interval ({lower}, 1)",
                self.s
            )));
        }
        Ok(())
    }
}

/// Build `N` states with pairwise overlap exactly `s` from the
/// eigendecomposition of the target Gram matrix. Amplitudes come out real.
pub fn make_symmetric_states(params: SymmetricFamilyParams) -> Result<Vec<PureState>> {
    params.validate()?;
    let (s, n, d) = (params.s, params.n, params.d);
    let gram = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(if i == j { 1.0 } else { s }, 0.0)
    });
    let eig = hermitian_eig(&Hermitian::new(gram)?)?;
    // State i is column i of Lambda^{1/2} V^dag: inner products reproduce the Gram.
    let mut states = Vec::with_capacity(n);
    for i in 0..n {
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        for (k, amp) in amps.iter_mut().enumerate().take(n) {
            let lambda = eig.eigenvalues[k].max(0.0);
            *amp = lambda.sqrt() * eig.eigenvectors.get(i, k).conj();
        }
        states.push(PureState::new(amps)?);
    }
    Ok(states)
}

/// Index pairs (i, j), i != j, in the fixed ordering of the six-state family.
pub const PRODUCT_FAMILY_PAIRS: [(usize, usize); 6] =
    [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

/// The six-state product family in dimension 9, equal priors.
pub fn make_product_family(s: f64) -> Result<Ensemble> {
    let states = make_product_family_states(s)?;
    Ensemble::uniform(states)
}

pub fn make_product_family_states(s: f64) -> Result<Vec<PureState>> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Validation(format!(
            "product family requires s in (0,1), got {s}"
        )));
    }
    let psi = make_symmetric_states(SymmetricFamilyParams { s, n: 3, d: 3 })?;
    Ok(PRODUCT_FAMILY_PAIRS
        .iter()
        .map(|&(i, j)| psi[i].tensor(&psi[j]))
        .collect())
}

/// The trine: three real qubit states at mutual angle 2*pi/3.
pub fn trine_factors() -> Vec<PureState> {
    let h = 3.0_f64.sqrt() / 2.0;
    vec![
        PureState::from_real(&[1.0, 0.0]).unwrap(),
        PureState::from_real(&[-0.5, -h]).unwrap(),
        PureState::from_real(&[-0.5, h]).unwrap(),
    ]
}

/// Three equiprobable two-qubit product states built from the trine.
pub fn make_double_trine() -> Ensemble {
    let states = trine_factors().iter().map(|a| a.tensor(a)).collect();
    Ensemble::uniform(states).unwrap()
}

/// Gram matrix of a state list.
pub fn gram_matrix(states: &[PureState]) -> Result<Hermitian> {
    if states.is_empty() {
        return Err(Error::Validation("empty state list".into()));
    }
    let dim = states[0].dim();
    if states.iter().any(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch(
            "states have mixed dimensions".into(),
        ));
    }
    let n = states.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        g.set(i, i, Complex64::new(1.0, 0.0));
        for j in (i + 1)..n {
            let v = states[i].inner(&states[j]);
            g.set(i, j, v);
            g.set(j, i, v.conj());
        }
    }
    Hermitian::new(g)
}

/// Reciprocal (dual) states: `<psi'_i|psi_j> = 0` for `i != j`, with
/// `<psi'_i|psi_i>` real positive. Computed through the Gram inverse, so the
/// duals live in the span of the input states.
pub fn reciprocal_states(states: &[PureState]) -> Result<Vec<PureState>> {
    let gram = gram_matrix(states)?;
    let eig = hermitian_eig(&gram)?;
    let min_eig = eig.eigenvalues[0];
    if min_eig <= RANK_TOL {
        return Err(Error::LinearlyDependent { min_eig });
    }
    let n = states.len();
    let dim = states[0].dim();
    // G^{-1} from the spectral decomposition.
    let mut gram_inv = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        gram_inv.add_outer(
            Complex64::new(1.0 / eig.eigenvalues[k], 0.0),
            &eig.eigenvector(k),
        );
    }
    let mut duals = Vec::with_capacity(n);
    for i in 0..n {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..n {
            let c = gram_inv.get(j, i);
            for (a, b) in amps.iter_mut().zip(states[j].amplitudes()) {
                *a += c * b;
            }
        }
        let mut dual = PureState::normalized(amps)?;
        // Phase convention: overlap with the partner real positive.
        let overlap = dual.inner(&states[i]);
        let phase = overlap / overlap.norm();
        dual = PureState::new(
            dual.amplitudes().iter().map(|a| a * phase).collect(),
        )?;
        duals.push(dual);
    }
    Ok(duals)
}

/// Rank report from a linear-independence check.
#[derive(Debug, Clone, Copy)]
pub struct RankReport {
    pub independent: bool,
    pub rank: usize,
    pub count: usize,
    pub min_gram_eigenvalue: f64,
}

/// True iff the Gram matrix has full rank (eigenvalues above `RANK_TOL`).
pub fn linear_independence_check(states: &[PureState]) -> Result<RankReport> {
    let gram = gram_matrix(states)?;
    let eig = hermitian_eig(&gram)?;
    let rank = eig.eigenvalues.iter().filter(|&&l| l > RANK_TOL).count();
    Ok(RankReport {
        independent: rank == states.len(),
        rank,
        count: states.len(),
        min_gram_eigenvalue: eig.eigenvalues[0],
    })
}
