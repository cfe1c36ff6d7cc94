//! Numerical checks of the coding bounds on random density operators.
//!
//! Every check builds a concrete encoder, evaluates the length it achieves on
//! the true source and compares it with the entropy bounds. Strict upper
//! bounds `x < u` are tested as `x < u + 1e-9`.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{self, CodesError, Distribution};
use crate::entropy::{
    self, escort, log_k, penalized_entropy, relative_entropy, renyi_divergence, Divergence,
    EntropyError,
};
use crate::linalg::{self, ComplexMatrix, DensityOperator, LinalgError};
use crate::penalty::Penalty;
use crate::qcode::{self, QcodeError, QuantumEncoder};

/// One-sided slack on every bound comparison.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Largest product spectrum [`block_limit_sweep`] will enumerate.
pub const MAX_BLOCK_SYMBOLS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("the bound is infinite: the source is not supported inside the code's design state")]
    InfiniteBound,
    #[error("operator has a zero eigenvalue; Shannon lengths are undefined")]
    ZeroEigenvalue,
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("cost parameter must be finite here, got {0}")]
    InfiniteCost(Penalty),
    #[error("invalid trial configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Codes(#[from] CodesError),
    #[error(transparent)]
    Qcode(#[from] QcodeError),
}

/// Which statement a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Quantum Kraft–McMillan: Tr(U† k^{−Λ} U) ≤ 1.
    Kraft,
    /// Optimal code within one digit above the Rényi entropy.
    OptimalBounds,
    /// Code designed for the wrong source pays a divergence penalty.
    WrongCode,
    /// Residual of the exact entropy + divergence − log β decomposition.
    LengthIdentity,
    /// Standard average of the escort Shannon code against the convex
    /// combination of von Neumann and Rényi entropies.
    Tradeoff,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Kraft => "kraft",
            TheoremId::OptimalBounds => "optimal_bounds",
            TheoremId::WrongCode => "wrong_code",
            TheoremId::LengthIdentity => "length_identity",
            TheoremId::Tradeoff => "tradeoff",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub d: usize,
    pub k: u32,
    pub t: Penalty,
    pub seed: u64,
}

/// Outcome of one bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub lower: f64,
    pub achieved: f64,
    pub upper: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub gap_lower: f64,
    pub gap_upper: f64,
    pub params: TrialParams,
}

impl BoundReport {
    pub fn new(theorem_id: TheoremId, lower: f64, achieved: f64, upper: f64, params: TrialParams) -> Self {
        Self {
            theorem_id,
            lower,
            achieved,
            upper,
            lower_ok: achieved >= lower - BOUND_TOLERANCE,
            upper_ok: achieved < upper + BOUND_TOLERANCE,
            gap_lower: achieved - lower,
            gap_upper: upper - achieved,
            params,
        }
    }

    /// A report for a check that could not be evaluated.
    fn failed(theorem_id: TheoremId, params: TrialParams) -> Self {
        Self::new(theorem_id, f64::NAN, f64::NAN, f64::NAN, params)
    }

    pub fn passed(&self) -> bool {
        self.lower_ok && self.upper_ok
    }

    fn sort_key(&self) -> (TheoremId, usize, u32, f64, u64) {
        let p = &self.params;
        (self.theorem_id, p.d, p.k, p.t.as_f64(), p.seed)
    }
}

fn params(rho: &DensityOperator, k: u32, t: Penalty) -> TrialParams {
    TrialParams {
        d: rho.dim(),
        k,
        t,
        seed: 0,
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// d×d matrix of independent standard complex Gaussians.
pub fn ginibre(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| complex_gaussian(rng))
}

/// ρ = GG†/Tr(GG†) for a Ginibre G, deterministic in `seed`.
pub fn random_density(d: usize, seed: u64) -> Result<DensityOperator, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(d.max(1), &mut rng);
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    Ok(DensityOperator::new(w.scale(Complex64::new(1.0 / tr, 0.0)))?)
}

/// Ginibre sample redrawn (with derived seeds) until it has full rank.
pub fn random_full_rank_density(d: usize, seed: u64) -> Result<DensityOperator, VerifyError> {
    let mut s = seed;
    loop {
        let rho = random_density(d, s)?;
        if rho.rank() == d {
            return Ok(rho);
        }
        s = splitmix64(s);
    }
}

/// Normalized complex Gaussian vector.
pub fn random_state(d: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    let n = linalg::norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Haar-random unitary: Gram–Schmidt on Ginibre columns.
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ginibre(d, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for mut v in g.columns() {
        for u in &cols {
            let proj = linalg::inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = linalg::norm(&v);
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Orthonormal basis drawn from a Haar-random unitary.
pub fn random_basis(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    random_unitary(d, rng).columns()
}

fn spectrum_distribution(rho: &DensityOperator) -> Result<Distribution, VerifyError> {
    Ok(Distribution::from_weights(rho.eigenvalues())?)
}

/// Encoder on ρ's eigenbasis whose code minimizes the t-exponential length.
pub fn optimal_encoder(rho: &DensityOperator, k: u32, t: Penalty) -> Result<QuantumEncoder, VerifyError> {
    let code = codes::exp_huffman(&spectrum_distribution(rho)?, k, t)?;
    Ok(qcode::build_encoder(rho.eigenvectors(), code)?)
}

/// Shannon code for the escort of `design`, on `design`'s eigenbasis.
pub fn escort_shannon_encoder(
    design: &DensityOperator,
    k: u32,
    t: Penalty,
) -> Result<QuantumEncoder, VerifyError> {
    let esc = escort(design, t);
    let code = codes::shannon_code(&spectrum_distribution(&esc)?, k).map_err(|e| match e {
        CodesError::ZeroProbabilitySymbol { .. } => VerifyError::ZeroEigenvalue,
        other => other.into(),
    })?;
    Ok(qcode::build_encoder(esc.eigenvectors(), code)?)
}

/// S_{1/(1+t)}(ρ) ≤ ℓ_t(C_t^opt(ρ)) < S_{1/(1+t)}(ρ) + 1.
pub fn check_optimal_bounds(rho: &DensityOperator, k: u32, t: Penalty) -> Result<BoundReport, VerifyError> {
    let enc = optimal_encoder(rho, k, t)?;
    let lower = penalized_entropy(rho, t, k)?;
    let achieved = qcode::source_t_avg_length(&enc, rho, t)?;
    Ok(BoundReport::new(
        TheoremId::OptimalBounds,
        lower,
        achieved,
        lower + 1.0,
        params(rho, k, t),
    ))
}

/// Excess length of a code designed for τ when the source is ρ:
/// the Rényi divergence S_{1+t}(ρ_t‖τ_t), or S(ρ‖τ) at t = 0.
pub fn design_penalty(
    rho: &DensityOperator,
    tau: &DensityOperator,
    k: u32,
    t: f64,
) -> Result<Divergence, VerifyError> {
    if t == 0.0 {
        Ok(relative_entropy(rho, tau, k)?)
    } else {
        let t = Penalty::Finite(t);
        Ok(renyi_divergence(&escort(rho, t), &escort(tau, t), 1.0 + t.as_f64(), k)?)
    }
}

/// Bounds for the Shannon code of τ's escort applied to the source ρ.
pub fn check_wrong_code(
    rho: &DensityOperator,
    tau: &DensityOperator,
    k: u32,
    t: Penalty,
) -> Result<BoundReport, VerifyError> {
    let tf = t.finite().ok_or(VerifyError::InfiniteCost(t))?;
    let divergence = design_penalty(rho, tau, k, tf)?
        .finite()
        .ok_or(VerifyError::InfiniteBound)?;
    let enc = escort_shannon_encoder(tau, k, t)?;
    let lower = penalized_entropy(rho, t, k)? + divergence;
    let achieved = qcode::source_t_avg_length(&enc, rho, t)?;
    Ok(BoundReport::new(
        TheoremId::WrongCode,
        lower,
        achieved,
        lower + 1.0,
        params(rho, k, t),
    ))
}

/// Both sides of ℓ_t(C(ρ)) = S_{1/(1+t)}(ρ) + S_{1+t}(ρ_t‖σ) − log_k β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthDecomposition {
    pub length: f64,
    pub entropy: f64,
    pub divergence: f64,
    pub log_beta: f64,
}

impl LengthDecomposition {
    pub fn residual(&self) -> f64 {
        (self.length - (self.entropy + self.divergence - self.log_beta)).abs()
    }
}

pub fn length_decomposition(
    enc: &QuantumEncoder,
    rho: &DensityOperator,
    t: Penalty,
) -> Result<LengthDecomposition, VerifyError> {
    let tf = t.finite().ok_or(VerifyError::InfiniteCost(t))?;
    let k = enc.k();
    let (sigma, beta) = qcode::code_induced_state(enc)?;
    let divergence = if tf == 0.0 {
        relative_entropy(rho, &sigma, k)?
    } else {
        renyi_divergence(&escort(rho, t), &sigma, 1.0 + tf, k)?
    };
    Ok(LengthDecomposition {
        length: qcode::source_t_avg_length(enc, rho, t)?,
        entropy: penalized_entropy(rho, t, k)?,
        divergence: divergence.finite().ok_or(VerifyError::InfiniteBound)?,
        log_beta: log_k(beta, k),
    })
}

/// |LHS − RHS| of the exact length decomposition.
pub fn check_length_identity(
    enc: &QuantumEncoder,
    rho: &DensityOperator,
    t: Penalty,
) -> Result<f64, VerifyError> {
    Ok(length_decomposition(enc, rho, t)?.residual())
}

/// Tradeoff check result: the bound report on the standard average plus the
/// code's base length on the source.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCheck {
    pub report: BoundReport,
    pub base_length: u32,
    pub lengths: Vec<u32>,
}

/// Standard average of ρ_t's Shannon code against
/// (1/(1+t)) S(ρ) + (t/(1+t)) S_{1/(1+t)}(ρ) and the same plus one.
pub fn check_tradeoff(rho: &DensityOperator, k: u32, t: Penalty) -> Result<TradeoffCheck, VerifyError> {
    if rho.rank() < rho.dim() {
        return Err(VerifyError::ZeroEigenvalue);
    }
    let enc = escort_shannon_encoder(rho, k, t)?;
    let w = t.mean_weight();
    let vn = entropy::von_neumann(rho, k)?.value;
    let lower = w * vn + (1.0 - w) * penalized_entropy(rho, t, k)?;
    let achieved = qcode::source_t_avg_length(&enc, rho, Penalty::ZERO)?;
    let base = qcode::source_t_avg_length(&enc, rho, Penalty::Infinite)? as u32;
    Ok(TradeoffCheck {
        report: BoundReport::new(TheoremId::Tradeoff, lower, achieved, lower + 1.0, params(rho, k, t)),
        base_length: base,
        lengths: enc.lengths(),
    })
}

/// Kraft report for an encoder: 0 ≤ Tr(U† k^{−Λ} U) ≤ 1.
pub fn kraft_report(enc: &QuantumEncoder, params: TrialParams) -> BoundReport {
    BoundReport::new(TheoremId::Kraft, 0.0, qcode::quantum_kraft_sum(enc), 1.0, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockPoint {
    pub block: usize,
    pub per_source_length: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Per-source t-exponential length of the optimal code for ρ^{⊗K}, K = 1..=k_max.
///
/// ρ^{⊗K} is diagonal in the product eigenbasis, so the code is built on the
/// K-fold product spectrum directly.
pub fn block_limit_sweep(
    rho: &DensityOperator,
    k: u32,
    t: Penalty,
    k_max: usize,
) -> Result<Vec<BlockPoint>, VerifyError> {
    let d = rho.dim();
    let too_large = || {
        VerifyError::InstanceTooLarge(format!("{d}^{k_max} exceeds {MAX_BLOCK_SYMBOLS} symbols"))
    };
    let total = d.checked_pow(k_max as u32).ok_or_else(too_large)?;
    if total > MAX_BLOCK_SYMBOLS {
        return Err(too_large());
    }
    let s = penalized_entropy(rho, t, k)?;
    let single = rho.eigenvalues().to_vec();
    let mut product = vec![1.0];
    let mut out = Vec::with_capacity(k_max);
    for block in 1..=k_max {
        product = product
            .iter()
            .flat_map(|&a| single.iter().map(move |&b| a * b))
            .collect();
        let lengths = codes::exp_huffman_lengths(&product, k, t)?;
        let pairs = product.iter().copied().zip(lengths.lengths().iter().copied());
        let per_source = codes::weighted_t_length(pairs, k, t) / block as f64;
        out.push(BlockPoint {
            block,
            per_source_length: per_source,
            lower: s,
            upper: s + 1.0 / block as f64,
        });
    }
    Ok(out)
}

/// Grid and seeding for [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub master_seed: u64,
    pub dims: Vec<usize>,
    pub ks: Vec<u32>,
    pub ts: Vec<f64>,
    pub trials_per_cell: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            dims: (2..=8).collect(),
            ks: vec![2, 3],
            ts: vec![0.0, 0.5, 1.0, 2.0, 8.0],
            trials_per_cell: 20,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.trials_per_cell == 0 {
            return Err(VerifyError::InvalidConfig("trials_per_cell must be at least 1".into()));
        }
        if self.dims.contains(&0) {
            return Err(VerifyError::InvalidConfig("dimensions must be positive".into()));
        }
        if self.ks.iter().any(|&k| !(2..=codes::MAX_ALPHABET).contains(&k)) {
            return Err(VerifyError::InvalidConfig("alphabet sizes must be in 2..=36".into()));
        }
        if self.ts.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(VerifyError::InvalidConfig("costs must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: fold (d, k, t index, trial index) into the master seed,
/// one SplitMix64 round per component.
pub fn trial_seed(master: u64, d: usize, k: u32, t_index: usize, trial: usize) -> u64 {
    [d as u64, u64::from(k), t_index as u64, trial as u64]
        .into_iter()
        .fold(splitmix64(master), |h, x| splitmix64(h ^ x))
}

fn report_or_failure(
    result: Result<BoundReport, VerifyError>,
    id: TheoremId,
    p: TrialParams,
) -> BoundReport {
    let mut r = result.unwrap_or_else(|_| BoundReport::failed(id, p));
    r.params = p;
    r
}

/// Runs every check over the configured grid. An empty `ts` runs t = 0 only.
///
/// Reports are sorted by (theorem, d, k, t, seed); the order is independent
/// of how the trials are scheduled.
pub fn run_suite(config: &TrialConfig) -> Result<Vec<BoundReport>, VerifyError> {
    config.validate()?;
    let ts = if config.ts.is_empty() { vec![0.0] } else { config.ts.clone() };
    let mut reports = Vec::new();
    for &d in &config.dims {
        for &k in &config.ks {
            for (ti, &t) in ts.iter().enumerate() {
                let t = Penalty::Finite(t);
                for trial in 0..config.trials_per_cell {
                    let seed = trial_seed(config.master_seed, d, k, ti, trial);
                    let p = TrialParams { d, k, t, seed };
                    run_trial(p, &mut reports);
                }
            }
        }
    }
    reports.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(&kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.cmp(&kb.2))
            .then(ka.3.partial_cmp(&kb.3).unwrap_or(Ordering::Equal))
            .then(ka.4.cmp(&kb.4))
    });
    Ok(reports)
}

fn run_trial(p: TrialParams, reports: &mut Vec<BoundReport>) {
    let TrialParams { d, k, t, seed } = p;
    let rho = match random_density(d, seed) {
        Ok(r) => r,
        Err(_) => {
            for id in [TheoremId::OptimalBounds, TheoremId::WrongCode, TheoremId::Tradeoff] {
                reports.push(BoundReport::failed(id, p));
            }
            return;
        }
    };
    let tau = random_full_rank_density(d, splitmix64(seed ^ 0x7A11));

    match optimal_encoder(&rho, k, t) {
        Ok(enc) => reports.push(kraft_report(&enc, p)),
        Err(_) => reports.push(BoundReport::failed(TheoremId::Kraft, p)),
    }
    reports.push(report_or_failure(check_optimal_bounds(&rho, k, t), TheoremId::OptimalBounds, p));

    match tau {
        Ok(tau) => {
            reports.push(report_or_failure(
                check_wrong_code(&rho, &tau, k, t),
                TheoremId::WrongCode,
                p,
            ));
            match escort_shannon_encoder(&tau, k, t) {
                Ok(enc) => {
                    reports.push(kraft_report(&enc, p));
                    let identity = check_length_identity(&enc, &rho, t).map(|residual| {
                        BoundReport::new(TheoremId::LengthIdentity, 0.0, residual, 1e-8, p)
                    });
                    reports.push(report_or_failure(identity, TheoremId::LengthIdentity, p));
                }
                Err(_) => reports.push(BoundReport::failed(TheoremId::Kraft, p)),
            }
        }
        Err(_) => {
            reports.push(BoundReport::failed(TheoremId::WrongCode, p));
            reports.push(BoundReport::failed(TheoremId::LengthIdentity, p));
        }
    }

    reports.push(report_or_failure(
        check_tradeoff(&rho, k, t).map(|c| c.report),
        TheoremId::Tradeoff,
        p,
    ));
}

/// CSV with header
/// `theorem_id,d,k,t,seed,lower,achieved,upper,gap_lower,gap_upper,pass`.
pub fn reports_to_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from("theorem_id,d,k,t,seed,lower,achieved,upper,gap_lower,gap_upper,pass\n");
    for r in reports {
        let p = &r.params;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.theorem_id,
            p.d,
            p.k,
            p.t,
            p.seed,
            r.lower,
            r.achieved,
            r.upper,
            r.gap_lower,
            r.gap_upper,
            r.passed()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::diagonal(p).unwrap()
    }

    #[test]
    fn random_density_examples() {
        let one = random_density(1, 17).unwrap();
        assert_eq!(one.eigenvalues(), &[1.0]);
        let a = random_density(4, 5).unwrap();
        assert_eq!(a.rank(), 4);
        let b = random_density(4, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_density(4, 6).unwrap());
    }

    #[test]
    fn optimal_bounds_dyadic() {
        let rho = diag(&[0.5, 0.25, 0.25]);
        let r = check_optimal_bounds(&rho, 2, Penalty::ZERO).unwrap();
        assert!((r.lower - 1.5).abs() < 1e-14);
        assert!((r.achieved - 1.5).abs() < 1e-14);
        assert!((r.upper - 2.5).abs() < 1e-14);
        assert!(r.passed());
        assert!(r.gap_lower.abs() <= 1e-9);

        let r = check_optimal_bounds(&rho, 2, Penalty::Finite(1.0)).unwrap();
        assert!((r.lower - 1.5431).abs() < 1e-4);
        assert!((r.achieved - 3f64.log2()).abs() < 1e-12);
        assert!((r.upper - 2.5431).abs() < 1e-4);
        assert!(r.passed());
    }

    #[test]
    fn optimal_bounds_at_infinity() {
        let rho = random_density(5, 9).unwrap();
        let r = check_optimal_bounds(&rho, 2, Penalty::Infinite).unwrap();
        assert_eq!(r.achieved, 3.0);
        assert!((r.lower - 5f64.log2()).abs() < 1e-12);
        assert!(r.passed());
    }

    #[test]
    fn wrong_code_commuting_example() {
        let rho = diag(&[0.5, 0.5]);
        let tau = diag(&[2.0 / 3.0, 1.0 / 3.0]);
        let r = check_wrong_code(&rho, &tau, 2, Penalty::ZERO).unwrap();
        assert!((r.lower - 1.0850).abs() < 1e-4);
        assert!((r.achieved - 1.5).abs() < 1e-14);
        assert!(r.passed());
    }

    #[test]
    fn wrong_code_with_self_design_has_no_penalty() {
        let rho = random_density(4, 3).unwrap();
        for t in [0.0, 0.5, 2.0] {
            let d = design_penalty(&rho, &rho, 2, t).unwrap().finite().unwrap();
            assert!(d.abs() <= 1e-9, "t={t}: {d}");
            let r = check_wrong_code(&rho, &rho, 2, Penalty::Finite(t)).unwrap();
            let s = penalized_entropy(&rho, Penalty::Finite(t), 2).unwrap();
            assert!((r.lower - s).abs() <= 1e-9);
            assert!(r.passed());
        }
    }

    #[test]
    fn wrong_code_support_violation() {
        let rho = random_density(3, 1).unwrap();
        let tau = diag(&[0.5, 0.5, 0.0]);
        assert_eq!(
            check_wrong_code(&rho, &tau, 2, Penalty::ZERO).unwrap_err(),
            VerifyError::InfiniteBound
        );
        assert_eq!(
            check_wrong_code(&rho, &tau, 2, Penalty::Finite(1.0)).unwrap_err(),
            VerifyError::InfiniteBound
        );
    }

    #[test]
    fn identity_on_two_word_code() {
        let rho = diag(&[0.5, 0.5]);
        let code = codes::ClassicalCode::new(2, vec!["0".into(), "10".into()]).unwrap();
        let enc = qcode::build_encoder(qcode::standard_basis(2), code).unwrap();
        let parts = length_decomposition(&enc, &rho, Penalty::ZERO).unwrap();
        assert!((parts.length - 1.5).abs() < 1e-14);
        assert!((parts.entropy - 1.0).abs() < 1e-14);
        assert!((parts.divergence - 0.0850).abs() < 1e-4);
        assert!((-parts.log_beta - 0.415).abs() < 1e-3);
        assert!(parts.residual() <= 1e-8);
    }

    #[test]
    fn identity_reduces_to_entropy_for_matched_complete_code() {
        let rho = diag(&[0.5, 0.25, 0.25]);
        let enc = optimal_encoder(&rho, 2, Penalty::ZERO).unwrap();
        let parts = length_decomposition(&enc, &rho, Penalty::ZERO).unwrap();
        assert!(parts.divergence.abs() < 1e-12);
        assert_eq!(parts.log_beta, 0.0);
        assert!((parts.length - parts.entropy).abs() < 1e-12);
    }

    #[test]
    fn tradeoff_example() {
        let rho = diag(&[0.5, 0.25, 0.25]);
        let c = check_tradeoff(&rho, 2, Penalty::Finite(1.0)).unwrap();
        assert_eq!(c.lengths, vec![2, 2, 2]);
        assert_eq!(c.report.achieved, 2.0);
        assert!((c.report.lower - 1.5216).abs() < 1e-4);
        assert!((c.report.upper - 2.5216).abs() < 1e-4);
        assert!(c.report.passed());

        let zero = check_tradeoff(&rho, 2, Penalty::ZERO).unwrap();
        assert!((zero.report.lower - 1.5).abs() < 1e-14);
        assert_eq!(zero.report.achieved, 1.5);

        assert_eq!(
            check_tradeoff(&diag(&[0.5, 0.5, 0.0]), 2, Penalty::ZERO).unwrap_err(),
            VerifyError::ZeroEigenvalue
        );
    }

    #[test]
    fn tradeoff_average_can_drop_with_t() {
        // the standard average is not monotone in t for this spectrum
        let rho = diag(&[0.97, 0.01, 0.01, 0.01]);
        let a0 = check_tradeoff(&rho, 2, Penalty::ZERO).unwrap();
        let a2 = check_tradeoff(&rho, 2, Penalty::Finite(2.0)).unwrap();
        assert_eq!(a0.lengths, vec![1, 7, 7, 7]);
        assert_eq!(a2.lengths, vec![1, 3, 3, 3]);
        assert!(a2.report.achieved < a0.report.achieved);
        assert!(a0.report.passed() && a2.report.passed());
    }

    #[test]
    fn block_limit_uniform_is_exact() {
        let rho = diag(&[0.5, 0.5]);
        for t in [Penalty::ZERO, Penalty::Finite(1.0)] {
            for point in block_limit_sweep(&rho, 2, t, 4).unwrap() {
                assert!((point.per_source_length - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_limit_first_point_matches_optimal_check() {
        let rho = random_density(3, 44).unwrap();
        let t = Penalty::Finite(0.5);
        let pts = block_limit_sweep(&rho, 2, t, 1).unwrap();
        let r = check_optimal_bounds(&rho, 2, t).unwrap();
        assert!((pts[0].per_source_length - r.achieved).abs() < 1e-12);
    }

    #[test]
    fn block_limit_rejects_huge_products() {
        let rho = random_density(8, 2).unwrap();
        assert!(matches!(
            block_limit_sweep(&rho, 2, Penalty::ZERO, 7),
            Err(VerifyError::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn suite_with_no_costs_runs_t_zero_only() {
        let config = TrialConfig {
            master_seed: 3,
            dims: vec![2, 3],
            ks: vec![2],
            ts: vec![],
            trials_per_cell: 2,
        };
        let reports = run_suite(&config).unwrap();
        assert!(!reports.is_empty());
        assert!(reports.iter().all(|r| r.params.t == Penalty::ZERO));
        assert!(reports.iter().all(BoundReport::passed));
        assert_eq!(reports, run_suite(&config).unwrap());
    }

    #[test]
    fn suite_rejects_bad_config() {
        let config = TrialConfig {
            trials_per_cell: 0,
            ..TrialConfig::default()
        };
        assert!(run_suite(&config).is_err());
    }

    #[test]
    fn trial_seeds_differ_per_cell() {
        let a = trial_seed(0, 2, 2, 0, 0);
        assert_ne!(a, trial_seed(0, 2, 2, 0, 1));
        assert_ne!(a, trial_seed(0, 2, 3, 0, 0));
        assert_ne!(a, trial_seed(1, 2, 2, 0, 0));
    }

    #[test]
    fn csv_header_and_rows() {
        let rho = diag(&[0.5, 0.25, 0.25]);
        let r = check_optimal_bounds(&rho, 2, Penalty::ZERO).unwrap();
        let csv = reports_to_csv(&[r]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "theorem_id,d,k,t,seed,lower,achieved,upper,gap_lower,gap_upper,pass"
        );
        assert!(lines.next().unwrap().starts_with("optimal_bounds,3,2,0,0,1.5,1.5,2.5,"));
    }
}
