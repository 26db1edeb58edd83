//! Unambiguous discrimination: the no-false-conclusive condition,
//! reciprocal-basis POVMs, a barrier solver for the efficiency SDP with an
//! independently checkable dual certificate, the equiprobable reduction to
//! the minimum Gram eigenvalue, and the two-round sequential protocol on
//! the product family (exact values and Monte Carlo sampling).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensembles::{
    gram_matrix, make_product_family, make_symmetric_states, reciprocal_states, Ensemble,
    PureState, SymmetricFamilyParams, PRODUCT_FAMILY_PAIRS,
};
use crate::error::{Error, Result};
use crate::minerr::Povm;
use crate::numerics::{hermitian_eig, min_eigenvalue, ComplexMatrix, Hermitian};

pub const UD_AMBIGUITY_TOL: f64 = 1e-9;

/// Checks that a measurement with an inconclusive outcome never gives a
/// conclusive answer for the wrong state, and returns the per-state
/// conclusive efficiencies `p_i = Tr(E_i |chi_i><chi_i|)`.
pub fn ud_condition_check(povm: &Povm, states: &[PureState]) -> Result<Vec<f64>> {
    let n = states.len();
    if povm.len() != n + 1 {
        return Err(Error::Validation(format!(
            "expected {} POVM elements (conclusive + inconclusive), found {}",
            n + 1,
            povm.len()
        )));
    }
    for (j, state) in states.iter().enumerate() {
        for i in 0..n {
            if i == j {
                continue;
            }
            let response = povm.response(i, state);
            if response > UD_AMBIGUITY_TOL {
                return Err(Error::Ambiguous {
                    element: i,
                    state: j,
                    response,
                });
            }
        }
    }
    Ok(states
        .iter()
        .enumerate()
        .map(|(i, s)| povm.response(i, s))
        .collect())
}

/// The POVM `E_i = eff/|<psi'_i|psi_i>|^2 |psi'_i><psi'_i|` built from the
/// reciprocal states, plus the inconclusive remainder `E_0 = I - sum E_i`.
/// Element order: the `N` conclusive elements first, the remainder last.
pub fn build_reciprocal_povm(states: &[PureState], target_efficiency: f64) -> Result<Povm> {
    if !(target_efficiency > 0.0 && target_efficiency <= 1.0) {
        return Err(Error::Validation(format!(
            "target efficiency must lie in (0,1], got {target_efficiency}"
        )));
    }
    let duals = reciprocal_states(states)?;
    let dim = states[0].dim();

    // Unscaled sum fixes the feasibility ceiling: eff_max = 1/lambda_max.
    let mut unscaled = ComplexMatrix::zeros(dim, dim);
    let mut elements = Vec::with_capacity(states.len() + 1);
    for (state, dual) in states.iter().zip(&duals) {
        let overlap_sq = dual.inner(state).norm_sqr();
        let weight = 1.0 / overlap_sq;
        unscaled.add_outer(Complex64::new(weight, 0.0), dual.amplitudes());
        elements.push(
            dual.projector()
                .scale(Complex64::new(target_efficiency * weight, 0.0)),
        );
    }
    let eig = hermitian_eig(&Hermitian::symmetrized(&unscaled)?)?;
    let lambda_max = *eig.eigenvalues.last().unwrap();
    let max_feasible = 1.0 / lambda_max;

    let mut remainder = ComplexMatrix::identity(dim);
    for e in &elements {
        remainder = remainder.sub(e);
    }
    if min_eigenvalue(&Hermitian::symmetrized(&remainder)?)? < -1e-9 {
        return Err(Error::InfeasibleEfficiency { max_feasible });
    }
    elements.push(remainder);
    Povm::new(elements, ComplexMatrix::identity(dim))
}

/// Optimal unambiguous-discrimination efficiencies and page-matching dual
/// certificate for the program
/// `maximize sum eta_i p_i  s.t.  Gram - diag(p) >= 0, p >= 0`.
#[derive(Debug, Clone)]
pub struct UdSolution {
    pub efficiencies: Vec<f64>,
    pub value: f64,
    pub dual_z_matrix: Hermitian,
    pub dual_z: Vec<f64>,
    pub gap: f64,
}

const BARRIER_GAP_TARGET: f64 = 1e-7;
const NEWTON_MAX_ITERS: usize = 50;

pub fn solve_ud_primal(gram: &Hermitian, priors: &[f64]) -> Result<UdSolution> {
    let n = gram.dim();
    if priors.len() != n {
        return Err(Error::DimensionMismatch(
            "prior count differs from Gram dimension".into(),
        ));
    }
    if priors.iter().any(|&p| p <= 0.0) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::Validation("priors must be positive and sum to 1".into()));
    }
    for i in 0..n {
        if (gram.matrix().get(i, i).re - 1.0).abs() > 1e-10 {
            return Err(Error::Validation("Gram diagonal must be 1".into()));
        }
    }
    let lambda_min = min_eigenvalue(gram)?;
    if lambda_min <= 0.0 {
        return Err(Error::LinearlyDependent { min_eig: lambda_min });
    }

    let mut p = vec![lambda_min / 2.0; n];
    let mut mu = 1.0;
    let mut slack_inv = slack_inverse(gram, &p)?;
    loop {
        for _ in 0..NEWTON_MAX_ITERS {
            // grad_i = eta_i - mu S_ii + mu / p_i, with S the slack inverse.
            let grad: Vec<f64> = (0..n)
                .map(|i| priors[i] - mu * slack_inv.get(i, i).re + mu / p[i])
                .collect();
            let hess = ComplexMatrix::from_fn(n, n, |i, j| {
                let mut h = -mu * slack_inv.get(i, j).norm_sqr();
                if i == j {
                    h -= mu / (p[i] * p[i]);
                }
                Complex64::new(h, 0.0)
            });
            let rhs = ComplexMatrix::from_fn(n, 1, |i, _| Complex64::new(-grad[i], 0.0));
            let step = hess.solve(&rhs)?;
            let direction: Vec<f64> = (0..n).map(|i| step.get(i, 0).re).collect();
            let decrement: f64 = grad
                .iter()
                .zip(&direction)
                .map(|(g, d)| g * d)
                .sum();
            // Newton decrement of the equivalent self-concordant problem
            // (objective divided by mu); the step direction is unchanged.
            let lambda_sq = decrement / mu;
            if lambda_sq < 1e-12 {
                break;
            }

            // Damped Newton step, halved further only if it leaves the
            // open cone.
            let lambda = lambda_sq.sqrt();
            let mut alpha = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            let mut advanced = false;
            for _ in 0..60 {
                let trial: Vec<f64> = p
                    .iter()
                    .zip(&direction)
                    .map(|(x, d)| x + alpha * d)
                    .collect();
                if trial.iter().all(|&x| x > 0.0)
                    && barrier_objective(gram, priors, &trial, mu).is_ok()
                {
                    p = trial;
                    advanced = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !advanced {
                break;
            }
            slack_inv = slack_inverse(gram, &p)?;
        }
        // Exact central-path duality gap 2 n mu.
        if 2.0 * n as f64 * mu <= BARRIER_GAP_TARGET {
            break;
        }
        mu *= 0.5;
    }

    let value: f64 = priors.iter().zip(&p).map(|(e, x)| e * x).sum();
    let dual_z_matrix = Hermitian::symmetrized(&slack_inv.scale(Complex64::new(mu, 0.0)))?;
    let dual_z: Vec<f64> = (0..n)
        .map(|i| dual_z_matrix.matrix().get(i, i).re - priors[i])
        .collect();
    let dual_value = gram.matrix().mul(dual_z_matrix.matrix()).trace().re;
    let gap = dual_value - value;
    if gap.abs() > 1e-6 {
        return Err(Error::SolverFailure(format!(
            "barrier stalled: best value {value:.9}, residual gap {gap:.3e}"
        )));
    }
    Ok(UdSolution {
        efficiencies: p,
        value,
        dual_z_matrix,
        dual_z,
        gap,
    })
}

fn slack_inverse(gram: &Hermitian, p: &[f64]) -> Result<ComplexMatrix> {
    let n = gram.dim();
    let slack = ComplexMatrix::from_fn(n, n, |i, j| {
        let mut v = gram.matrix().get(i, j);
        if i == j {
            v -= Complex64::new(p[i], 0.0);
        }
        v
    });
    slack.solve(&ComplexMatrix::identity(n))
}

/// Barrier objective; errors when the trial point leaves the open cone.
fn barrier_objective(gram: &Hermitian, priors: &[f64], p: &[f64], mu: f64) -> Result<f64> {
    let n = gram.dim();
    let slack = Hermitian::symmetrized(&ComplexMatrix::from_fn(n, n, |i, j| {
        let mut v = gram.matrix().get(i, j);
        if i == j {
            v -= Complex64::new(p[i], 0.0);
        }
        v
    }))?;
    let eig = hermitian_eig(&slack)?;
    if eig.eigenvalues[0] <= 0.0 {
        return Err(Error::Domain("slack left the positive cone".into()));
    }
    let log_det: f64 = eig.eigenvalues.iter().map(|l| l.ln()).sum();
    let linear: f64 = priors.iter().zip(p).map(|(e, x)| e * x).sum();
    Ok(linear + mu * (log_det + p.iter().map(|x| x.ln()).sum::<f64>()))
}

/// Independent check of a dual certificate `(Z, z)` for the UD program.
#[derive(Debug, Clone)]
pub struct DualReport {
    pub feasible: bool,
    pub value: f64,
    pub min_z_matrix_eigenvalue: f64,
    pub min_z_entry: f64,
    pub max_linear_violation: f64,
    pub violations: Vec<String>,
}

pub fn check_dual_certificate(
    gram: &Hermitian,
    priors: &[f64],
    z_matrix: &Hermitian,
    z: &[f64],
) -> Result<DualReport> {
    let n = gram.dim();
    if z_matrix.dim() != n || z.len() != n || priors.len() != n {
        return Err(Error::DimensionMismatch(
            "certificate shapes do not match the Gram matrix".into(),
        ));
    }
    let mut violations = Vec::new();
    let min_eig = min_eigenvalue(z_matrix)?;
    if min_eig < -1e-8 {
        violations.push(format!("Z has eigenvalue {min_eig:.3e} < 0"));
    }
    let min_z_entry = z.iter().cloned().fold(f64::MAX, f64::min);
    if min_z_entry < -1e-8 {
        violations.push(format!("slack vector entry {min_z_entry:.3e} < 0"));
    }
    let mut max_linear_violation: f64 = 0.0;
    for i in 0..n {
        let residual = (z[i] + priors[i] - z_matrix.matrix().get(i, i).re).abs();
        max_linear_violation = max_linear_violation.max(residual);
        if residual > 1e-8 {
            violations.push(format!(
                "linear constraint {i}: |z_i + eta_i - Z_ii| = {residual:.3e}"
            ));
        }
    }
    let value = gram.matrix().mul(z_matrix.matrix()).trace().re;
    Ok(DualReport {
        feasible: violations.is_empty(),
        value,
        min_z_matrix_eigenvalue: min_eig,
        min_z_entry,
        max_linear_violation,
        violations,
    })
}

/// Optimal equal-prior UD efficiency of a permutation-symmetric ensemble:
/// the minimum eigenvalue of the Gram matrix.
pub fn equiprobable_optimum(gram: &Hermitian) -> Result<f64> {
    min_eigenvalue(gram)
}

/// Averaging a feasible efficiency vector over all index permutations gives
/// the uniform vector with the same mean, so the symmetrized solution is a
/// multiple of the identity.
pub fn permutation_symmetrize(efficiencies: &[f64]) -> Vec<f64> {
    let mean = efficiencies.iter().sum::<f64>() / efficiencies.len() as f64;
    vec![mean; efficiencies.len()]
}

/// Result of the two-round sequential protocol on the product family.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub exact_success: f64,
    pub empirical_success: Option<f64>,
    pub std_error: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub per_round_efficiency: f64,
    pub wrong_conclusive: u64,
}

/// First- and second-round measurements of the sequential protocol: the
/// three-state reciprocal POVM for the full factor family, and one
/// two-state reciprocal POVM per excluded index.
struct ProtocolRounds {
    factors: Vec<PureState>,
    first: Povm,
    /// second[a] discriminates the pair with factor index `a` removed;
    /// conclusive element `k` of second[a] names `pair_members[a][k]`.
    second: Vec<Povm>,
    pair_members: Vec<[usize; 2]>,
    per_round_efficiency: f64,
}

impl ProtocolRounds {
    fn new(s: f64) -> Result<Self> {
        let factors = make_symmetric_states(SymmetricFamilyParams { s, n: 3, d: 3 })?;
        let gram3 = gram_matrix(&factors)?;
        let per_round_efficiency = equiprobable_optimum(&gram3)?;
        let first = build_reciprocal_povm(&factors, per_round_efficiency)?;
        let mut second = Vec::with_capacity(3);
        let mut pair_members = Vec::with_capacity(3);
        for excluded in 0..3 {
            let members: Vec<usize> = (0..3).filter(|&k| k != excluded).collect();
            let pair: Vec<PureState> = members.iter().map(|&k| factors[k].clone()).collect();
            let pair_gram = gram_matrix(&pair)?;
            let pair_eff = equiprobable_optimum(&pair_gram)?;
            second.push(build_reciprocal_povm(&pair, pair_eff)?);
            pair_members.push([members[0], members[1]]);
        }
        Ok(Self {
            factors,
            first,
            second,
            pair_members,
            per_round_efficiency,
        })
    }
}

/// Exact success probability of the sequential protocol, computed from the
/// response probabilities of the actual round POVMs averaged over the
/// family (equal priors).
pub fn sequential_protocol_exact(s: f64) -> Result<ProtocolResult> {
    let rounds = ProtocolRounds::new(s)?;
    let mut exact = 0.0;
    for &(a, b) in PRODUCT_FAMILY_PAIRS.iter() {
        let p_alice = rounds.first.response(a, &rounds.factors[a]);
        let bob = &rounds.second[a];
        let slot = rounds.pair_members[a]
            .iter()
            .position(|&m| m == b)
            .expect("family pairs never repeat an index");
        let p_bob = bob.response(slot, &rounds.factors[b]);
        exact += p_alice * p_bob / PRODUCT_FAMILY_PAIRS.len() as f64;
    }
    Ok(ProtocolResult {
        exact_success: exact,
        empirical_success: None,
        std_error: None,
        trials: 0,
        seed: 0,
        per_round_efficiency: rounds.per_round_efficiency,
        wrong_conclusive: 0,
    })
}

fn sample_outcome<R: Rng>(povm: &Povm, state: &PureState, rng: &mut R) -> usize {
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for k in 0..povm.len() {
        acc += povm.response(k, state).max(0.0);
        if draw < acc {
            return k;
        }
    }
    povm.len() - 1
}

/// Samples the sequential protocol: the family state is drawn uniformly,
/// Alice measures factor one, and on a conclusive outcome Bob measures the
/// remaining pair on factor two. A trial succeeds when both rounds conclude
/// with the correct identity.
pub fn monte_carlo_protocol(s: f64, trials: u64, seed: u64) -> Result<ProtocolResult> {
    if trials == 0 {
        return Err(Error::Validation("at least one trial required".into()));
    }
    let rounds = ProtocolRounds::new(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0u64;
    let mut wrong_conclusive = 0u64;
    for _ in 0..trials {
        let (a, b) = PRODUCT_FAMILY_PAIRS[rng.gen_range(0..PRODUCT_FAMILY_PAIRS.len())];
        let alice = sample_outcome(&rounds.first, &rounds.factors[a], &mut rng);
        if alice == 3 {
            continue; // inconclusive first round
        }
        if alice != a {
            wrong_conclusive += 1;
            continue;
        }
        let bob_povm = &rounds.second[alice];
        let bob = sample_outcome(bob_povm, &rounds.factors[b], &mut rng);
        if bob == 2 {
            continue; // inconclusive second round
        }
        let named = rounds.pair_members[alice][bob];
        if named == b {
            successes += 1;
        } else {
            wrong_conclusive += 1;
        }
    }
    let exact = sequential_protocol_exact(s)?;
    let p_hat = successes as f64 / trials as f64;
    let std_error = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    Ok(ProtocolResult {
        exact_success: exact.exact_success,
        empirical_success: Some(p_hat),
        std_error: Some(std_error),
        trials,
        seed,
        per_round_efficiency: rounds.per_round_efficiency,
        wrong_conclusive,
    })
}

/// Convenience entry point: optimal UD value for the six-state family at
/// overlap `s`, by the equiprobable reduction.
pub fn family_ud_optimum(s: f64) -> Result<f64> {
    let ensemble: Ensemble = make_product_family(s)?;
    let gram = gram_matrix(ensemble.states())?;
    equiprobable_optimum(&gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::trine_factors;

    fn product_gram(s: f64) -> Hermitian {
        let ensemble = make_product_family(s).unwrap();
        gram_matrix(ensemble.states()).unwrap()
    }

    #[test]
    fn orthonormal_projectors_have_unit_efficiency() {
        let states = vec![
            PureState::basis_state(2, 0),
            PureState::basis_state(2, 1),
        ];
        let povm = Povm::new(
            vec![
                states[0].projector(),
                states[1].projector(),
                ComplexMatrix::zeros(2, 2),
            ],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let p = ud_condition_check(&povm, &states).unwrap();
        assert!(p.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn swapped_element_is_ambiguous() {
        let states = vec![
            PureState::basis_state(2, 0),
            PureState::basis_state(2, 1),
        ];
        let povm = Povm::new(
            vec![
                states[1].projector(),
                states[0].projector(),
                ComplexMatrix::zeros(2, 2),
            ],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        assert!(matches!(
            ud_condition_check(&povm, &states),
            Err(Error::Ambiguous { .. })
        ));
    }

    #[test]
    fn reciprocal_povm_is_tight_at_the_optimum() {
        let states = make_symmetric_states(SymmetricFamilyParams { s: 0.5, n: 3, d: 3 }).unwrap();
        let povm = build_reciprocal_povm(&states, 0.5).unwrap();
        let p = ud_condition_check(&povm, &states).unwrap();
        assert!(p.iter().all(|&x| (x - 0.5).abs() < 1e-12));
        // The inconclusive element is PSD with a near-zero eigenvalue.
        let e0 = Hermitian::symmetrized(&povm.elements()[3]).unwrap();
        let min = crate::numerics::min_eigenvalue(&e0).unwrap();
        assert!(min.abs() < 1e-10);
        // Anything above the optimum is infeasible and reports the ceiling.
        match build_reciprocal_povm(&states, 0.6) {
            Err(Error::InfeasibleEfficiency { max_feasible }) => {
                assert!((max_feasible - 0.5).abs() < 1e-10);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn orthonormal_states_allow_unit_efficiency() {
        let states = vec![
            PureState::basis_state(2, 0),
            PureState::basis_state(2, 1),
        ];
        let povm = build_reciprocal_povm(&states, 1.0).unwrap();
        let e0 = &povm.elements()[2];
        assert!(e0.max_abs() < 1e-12);
    }

    #[test]
    fn primal_solver_hits_known_optima() {
        // Six-state family: (1-s)^2.
        let sol = solve_ud_primal(&product_gram(0.5), &vec![1.0 / 6.0; 6]).unwrap();
        assert!((sol.value - 0.25).abs() < 1e-6);
        assert!(sol.gap.abs() < 1e-6);
        assert!(sol.gap > -1e-8);
        // Three symmetric states, positive branch: 1-s.
        let states = make_symmetric_states(SymmetricFamilyParams { s: 0.5, n: 3, d: 3 }).unwrap();
        let sol3 = solve_ud_primal(&gram_matrix(&states).unwrap(), &vec![1.0 / 3.0; 3]).unwrap();
        assert!((sol3.value - 0.5).abs() < 1e-6);
        // Negative branch: 1 + (N-1)s.
        let neg = make_symmetric_states(SymmetricFamilyParams { s: -0.3, n: 3, d: 3 }).unwrap();
        let soln = solve_ud_primal(&gram_matrix(&neg).unwrap(), &vec![1.0 / 3.0; 3]).unwrap();
        assert!((soln.value - 0.4).abs() < 1e-6);
    }

    #[test]
    fn primal_solution_is_feasible() {
        let gram = product_gram(0.4);
        let sol = solve_ud_primal(&gram, &vec![1.0 / 6.0; 6]).unwrap();
        let slack = Hermitian::symmetrized(&ComplexMatrix::from_fn(6, 6, |i, j| {
            let mut v = gram.matrix().get(i, j);
            if i == j {
                v -= Complex64::new(sol.efficiencies[i], 0.0);
            }
            v
        }))
        .unwrap();
        assert!(crate::numerics::min_eigenvalue(&slack).unwrap() > -1e-8);
        assert!(sol.efficiencies.iter().all(|&p| p > 0.0 && p <= 1.0));
    }

    #[test]
    fn dual_certificate_checks() {
        let gram = product_gram(0.5);
        let priors = vec![1.0 / 6.0; 6];
        let sol = solve_ud_primal(&gram, &priors).unwrap();
        let report =
            check_dual_certificate(&gram, &priors, &sol.dual_z_matrix, &sol.dual_z).unwrap();
        assert!(report.feasible, "{:?}", report.violations);
        assert!((report.value - 0.25).abs() < 1e-6);
        assert!(report.value >= sol.value - 1e-8);

        // Diagonal certificate Z = diag(priors): trivially feasible with
        // value sum(eta_i * Gram_ii) = 1.
        let z_diag = Hermitian::new(ComplexMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                Complex64::new(priors[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
        .unwrap();
        let trivial = check_dual_certificate(&gram, &priors, &z_diag, &[0.0; 6]).unwrap();
        assert!(trivial.feasible);
        assert!((trivial.value - 1.0).abs() < 1e-12);

        // Lowering Z_11 breaks the linear constraint.
        let mut tampered = sol.dual_z_matrix.matrix().clone();
        tampered.set(0, 0, tampered.get(0, 0) - Complex64::new(0.1, 0.0));
        let bad = check_dual_certificate(
            &gram,
            &priors,
            &Hermitian::symmetrized(&tampered).unwrap(),
            &sol.dual_z,
        )
        .unwrap();
        assert!(!bad.feasible);
    }

    #[test]
    fn permutation_invariance_of_the_value() {
        let gram = product_gram(0.5);
        // Reversal permutation of the six indices.
        let perm = [5usize, 4, 3, 2, 1, 0];
        let permuted = Hermitian::symmetrized(&ComplexMatrix::from_fn(6, 6, |i, j| {
            gram.matrix().get(perm[i], perm[j])
        }))
        .unwrap();
        let priors = vec![1.0 / 6.0; 6];
        let a = solve_ud_primal(&gram, &priors).unwrap();
        let b = solve_ud_primal(&permuted, &priors).unwrap();
        assert!((a.value - b.value).abs() < 1e-8);
        for (i, &pi) in perm.iter().enumerate() {
            assert!((a.efficiencies[pi] - b.efficiencies[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn equiprobable_optimum_on_known_spectra() {
        assert!(
            (equiprobable_optimum(&Hermitian::new(ComplexMatrix::identity(4)).unwrap()).unwrap()
                - 1.0)
                .abs()
                < 1e-14
        );
        let gram = product_gram(0.5);
        assert!((equiprobable_optimum(&gram).unwrap() - 0.25).abs() < 1e-12);
        let sym = permutation_symmetrize(&[0.1, 0.2, 0.3]);
        assert!(sym.iter().all(|&x| (x - 0.2).abs() < 1e-15));
    }

    #[test]
    fn eigenvalue_ordering_from_the_proof() {
        for &s in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let low = (1.0 - s) * (1.0 - s);
            let mid = 1.0 - s;
            assert!(low < mid);
            assert!(mid < f64::min(1.0 + s - 2.0 * s * s, 1.0 + 2.0 * s + 3.0 * s * s));
        }
    }

    #[test]
    fn sequential_protocol_squares_the_round_efficiency() {
        for &s in &[1e-9, 0.25, 0.5, 0.75] {
            let r = sequential_protocol_exact(s).unwrap();
            assert!((r.per_round_efficiency - (1.0 - s)).abs() < 1e-10, "s={s}");
            assert!(
                (r.exact_success - r.per_round_efficiency * r.per_round_efficiency).abs() < 1e-12
            );
            assert!((r.exact_success - (1.0 - s) * (1.0 - s)).abs() < 1e-9);
        }
        assert!((sequential_protocol_exact(0.5).unwrap().exact_success - 0.25).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_unambiguous() {
        let a = monte_carlo_protocol(0.5, 2000, 42).unwrap();
        let b = monte_carlo_protocol(0.5, 2000, 42).unwrap();
        assert_eq!(a.empirical_success, b.empirical_success);
        assert_eq!(a.wrong_conclusive, 0);
        let single = monte_carlo_protocol(0.5, 1, 3).unwrap();
        let e = single.empirical_success.unwrap();
        assert!(e == 0.0 || e == 1.0);
        // Different seeds explore different sample paths.
        let c = monte_carlo_protocol(0.5, 2000, 43).unwrap();
        assert!(a.empirical_success != c.empirical_success || a.seed != c.seed);
    }

    #[test]
    fn family_ud_optimum_matches_closed_form() {
        assert!((family_ud_optimum(0.5).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn trine_gram_rejected_as_dependent() {
        // The three trine states in a qubit are linearly dependent.
        let gram = gram_matrix(&trine_factors()).unwrap();
        assert!(matches!(
            solve_ud_primal(&gram, &vec![1.0 / 3.0; 3]),
            Err(Error::LinearlyDependent { .. })
        ));
    }
}
