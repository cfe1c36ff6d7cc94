//! Entropy functionals of density operators, in units of k-ary digits.
//!
//! Single-operator entropies are evaluated on the spectrum. Divergences use
//! the spectral decompositions of both arguments, so they are valid for
//! non-commuting pairs.

use thiserror::Error;

use crate::linalg::{mat_fn, DensityOperator, LinalgError, ZERO_EIGENVALUE};
use crate::penalty::Penalty;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("Renyi order alpha = 1 is the von Neumann entropy")]
    AlphaIsOne,
    #[error("order alpha = {alpha} is outside the supported range")]
    AlphaOutOfRange { alpha: f64 },
    #[error("alphabet size k = {k} must be at least 2")]
    InvalidBase { k: u32 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An entropy value together with the base and order it was computed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub base_k: u32,
    /// Rényi order; 1 denotes von Neumann.
    pub order: f64,
}

/// Value of a divergence, with support violations kept distinct from finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn is_finite(self) -> bool {
        matches!(self, Divergence::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }
}

pub(crate) fn log_k(x: f64, k: u32) -> f64 {
    x.ln() / f64::from(k).ln()
}

fn check_base(k: u32) -> Result<(), EntropyError> {
    if k < 2 {
        return Err(EntropyError::InvalidBase { k });
    }
    Ok(())
}

fn check_dims(a: &DensityOperator, b: &DensityOperator) -> Result<(), EntropyError> {
    if a.dim() != b.dim() {
        return Err(EntropyError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

fn support(rho: &DensityOperator) -> impl Iterator<Item = f64> + '_ {
    rho.eigenvalues()
        .iter()
        .copied()
        .filter(|&x| x > ZERO_EIGENVALUE)
}

/// S(ρ) = −Σ ρ_i log_k ρ_i.
pub fn von_neumann(rho: &DensityOperator, k: u32) -> Result<EntropyValue, EntropyError> {
    check_base(k)?;
    let value = -support(rho).map(|x| x * log_k(x, k)).sum::<f64>();
    Ok(EntropyValue {
        value: value.max(0.0),
        base_k: k,
        order: 1.0,
    })
}

/// S_α(ρ) = log_k(Tr ρ^α) / (1 − α); order 0 is log_k of the rank.
pub fn renyi(rho: &DensityOperator, alpha: f64, k: u32) -> Result<EntropyValue, EntropyError> {
    check_base(k)?;
    if alpha == 1.0 {
        return Err(EntropyError::AlphaIsOne);
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(EntropyError::AlphaOutOfRange { alpha });
    }
    let value = if alpha == 0.0 {
        log_k(rho.rank() as f64, k)
    } else {
        let power_sum: f64 = support(rho).map(|x| x.powf(alpha)).sum();
        log_k(power_sum, k) / (1.0 - alpha)
    };
    Ok(EntropyValue {
        value: value.max(0.0),
        base_k: k,
        order: alpha,
    })
}

/// Rényi entropy of any order α ≥ 0, falling back to von Neumann at α = 1.
pub fn entropy_of_order(
    rho: &DensityOperator,
    alpha: f64,
    k: u32,
) -> Result<EntropyValue, EntropyError> {
    if alpha == 1.0 {
        von_neumann(rho, k)
    } else {
        renyi(rho, alpha, k)
    }
}

/// S_{1/(1+t)}(ρ): the entropy that bounds the t-exponential length.
pub fn penalized_entropy(rho: &DensityOperator, t: Penalty, k: u32) -> Result<f64, EntropyError> {
    Ok(entropy_of_order(rho, t.renyi_order(), k)?.value)
}

/// Weight ⟨σ_j|ρ|σ_j⟩ on each eigenvector of σ, and whether ρ leaks outside supp σ.
fn weights_in_basis_of(rho: &DensityOperator, sigma: &DensityOperator) -> (Vec<f64>, bool) {
    let weights: Vec<f64> = sigma
        .eigenvectors()
        .iter()
        .map(|v| rho.expectation(v).max(0.0))
        .collect();
    let leaks = sigma
        .eigenvalues()
        .iter()
        .zip(&weights)
        .any(|(&s, &w)| s <= ZERO_EIGENVALUE && w > ZERO_EIGENVALUE);
    (weights, leaks)
}

/// S(ρ‖σ) = Tr ρ(log_k ρ − log_k σ).
pub fn relative_entropy(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    k: u32,
) -> Result<Divergence, EntropyError> {
    check_base(k)?;
    check_dims(rho, sigma)?;
    let (weights, leaks) = weights_in_basis_of(rho, sigma);
    if leaks {
        return Ok(Divergence::Infinite);
    }
    let neg_entropy: f64 = support(rho).map(|x| x * log_k(x, k)).sum();
    let cross: f64 = sigma
        .eigenvalues()
        .iter()
        .zip(&weights)
        .filter(|(&s, _)| s > ZERO_EIGENVALUE)
        .map(|(&s, &w)| w * log_k(s, k))
        .sum();
    Ok(Divergence::Finite(neg_entropy - cross))
}

/// Petz–Rényi divergence S_α(ρ‖σ) = log_k(Tr ρ^α σ^{1−α}) / (α − 1), for α > 1.
pub fn renyi_divergence(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
    k: u32,
) -> Result<Divergence, EntropyError> {
    check_base(k)?;
    check_dims(rho, sigma)?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(EntropyError::AlphaOutOfRange { alpha });
    }
    let (_, leaks) = weights_in_basis_of(rho, sigma);
    if leaks {
        return Ok(Divergence::Infinite);
    }
    let rho_pow = mat_fn(rho, |x| if x > 0.0 { x.powf(alpha) } else { 0.0 })?;
    let sigma_pow = mat_fn(sigma, |x| {
        if x > ZERO_EIGENVALUE {
            x.powf(1.0 - alpha)
        } else {
            0.0
        }
    })?;
    let q = rho_pow.matmul(&sigma_pow).trace().re;
    Ok(Divergence::Finite(log_k(q, k) / (alpha - 1.0)))
}

/// Escort operator ρ_t = ρ^{1/(1+t)} / Tr ρ^{1/(1+t)}.
///
/// At t = ∞ this is the normalized projector onto the support of ρ.
pub fn escort(rho: &DensityOperator, t: Penalty) -> DensityOperator {
    if t.is_zero() {
        return rho.clone();
    }
    let alpha = t.renyi_order();
    let weights: Vec<f64> = rho
        .eigenvalues()
        .iter()
        .map(|&x| {
            if x <= ZERO_EIGENVALUE {
                0.0
            } else if alpha == 0.0 {
                1.0
            } else {
                x.powf(alpha)
            }
        })
        .collect();
    DensityOperator::from_spectrum(&weights, &rho.eigenvectors())
        .expect("escort weights are non-negative on an orthonormal basis")
}

/// Escort distribution of a probability vector: p_i^{1/(1+t)} normalized.
pub fn escort_probs(probs: &[f64], t: Penalty) -> Vec<f64> {
    let alpha = t.renyi_order();
    let w: Vec<f64> = probs
        .iter()
        .map(|&p| {
            if p <= 0.0 {
                0.0
            } else if alpha == 0.0 {
                1.0
            } else {
                p.powf(alpha)
            }
        })
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}
