//! Quantum codewords and the lossless encoder.
//!
//! A codeword lives in the Fock space of k-ary strings. Only finitely many
//! strings are ever occupied, so a [`FockVector`] is a sparse map from words
//! to amplitudes. The length observable Λ acts diagonally on words, which
//! means every function of Λ is evaluated term by term.
//!
//! Mixed outputs U ρ U† are never formed: traces against functions of Λ only
//! need the diagonal weights ⟨e_i|ρ|e_i⟩.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{self, ClassicalCode, CodesError, Distribution};
use crate::entropy::log_k;
use crate::linalg::{self, ComplexMatrix, DensityOperator, LinalgError};
use crate::penalty::Penalty;

/// Amplitudes at or below this modulus are dropped from Fock vectors.
pub const PRUNE_AMPLITUDE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcodeError {
    #[error("basis is not orthonormal: max |G - I| = {violation:e}")]
    NonOrthonormalBasis { violation: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("string {word:?} does not parse as {blocks} codeword(s)")]
    UnparsableString { word: String, blocks: usize },
    #[error("state {index} has norm {norm}, expected 1")]
    NotNormalized { index: usize, norm: f64 },
    #[error("alphabet mismatch: encoder uses k = {encoder}, vector uses k = {vector}")]
    AlphabetMismatch { encoder: u32, vector: u32 },
    #[error("block size must be at least 1")]
    EmptyBlock,
    #[error(transparent)]
    Code(#[from] CodesError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Number of letters in a word.
pub fn word_length(word: &str) -> usize {
    word.chars().count()
}

/// A finite superposition of k-ary words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FockJson", into = "FockJson")]
pub struct FockVector {
    k: u32,
    terms: BTreeMap<String, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct FockJson {
    k: u32,
    terms: BTreeMap<String, [f64; 2]>,
}

impl TryFrom<FockJson> for FockVector {
    type Error = QcodeError;

    fn try_from(json: FockJson) -> Result<Self, QcodeError> {
        let terms = json
            .terms
            .into_iter()
            .map(|(w, [re, im])| (w, Complex64::new(re, im)));
        FockVector::from_terms(json.k, terms)
    }
}

impl From<FockVector> for FockJson {
    fn from(v: FockVector) -> Self {
        FockJson {
            k: v.k,
            terms: v
                .terms
                .into_iter()
                .map(|(w, z)| (w, [z.re, z.im]))
                .collect(),
        }
    }
}

impl FockVector {
    pub fn new(k: u32) -> Self {
        Self {
            k,
            terms: BTreeMap::new(),
        }
    }

    /// Sums amplitudes of repeated words and prunes negligible ones.
    pub fn from_terms(
        k: u32,
        terms: impl IntoIterator<Item = (String, Complex64)>,
    ) -> Result<Self, QcodeError> {
        let mut v = Self::new(k);
        for (word, amp) in terms {
            if word.chars().any(|c| codes::letter_value(c, k).is_none()) {
                return Err(CodesError::InvalidWord { word, k }.into());
            }
            *v.terms.entry(word).or_default() += amp;
        }
        v.prune();
        Ok(v)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, z| z.norm() > PRUNE_AMPLITUDE);
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<String, Complex64> {
        &self.terms
    }

    pub fn amplitude(&self, word: &str) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.terms
            .iter()
            .filter_map(|(w, a)| other.terms.get(w).map(|b| a.conj() * b))
            .sum()
    }

    /// ⟨w|Π_ℓ|w⟩ for every occupied length ℓ.
    pub fn length_distribution(&self) -> BTreeMap<usize, f64> {
        let mut dist = BTreeMap::new();
        for (w, z) in &self.terms {
            *dist.entry(word_length(w)).or_insert(0.0) += z.norm_sqr();
        }
        dist
    }

    /// Π_ℓ|w⟩
    pub fn project_length(&self, len: usize) -> FockVector {
        FockVector {
            k: self.k,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| word_length(w) == len)
                .map(|(w, z)| (w.clone(), *z))
                .collect(),
        }
    }

    /// ⟨w|f(Λ)|w⟩
    pub fn length_expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(w, z)| z.norm_sqr() * f(word_length(w)))
            .sum()
    }

    /// Whether the vector is an eigenstate of Λ (all words share one length).
    pub fn is_length_eigenstate(&self) -> bool {
        self.length_distribution().len() <= 1
    }
}

/// ℓ_t(w) = (1/t) log_k ⟨w|k^{tΛ}|w⟩ / ⟨w|w⟩.
///
/// t = 0 gives the mean length and t = ∞ the base length, the longest word
/// with non-negligible amplitude.
pub fn t_codeword_length(w: &FockVector, t: Penalty) -> f64 {
    codes::weighted_t_length(
        w.terms
            .iter()
            .map(|(word, z)| (z.norm_sqr(), word_length(word) as u32)),
        w.k,
        t,
    )
}

/// Base length l(w).
pub fn base_length(w: &FockVector) -> usize {
    w.terms.keys().map(|s| word_length(s)).max().unwrap_or(0)
}

/// U = Σ_i |c(i)⟩⟨e_i|.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumEncoder {
    basis: Vec<Vec<Complex64>>,
    code: ClassicalCode,
    lookup: HashMap<String, usize>,
}

/// Checks the encoder invariants: orthonormal basis, one distinct word per
/// basis vector.
pub fn build_encoder(
    basis: Vec<Vec<Complex64>>,
    code: ClassicalCode,
) -> Result<QuantumEncoder, QcodeError> {
    let d = basis.len();
    if code.len() != d {
        return Err(QcodeError::DimensionMismatch {
            expected: d,
            found: code.len(),
        });
    }
    if let Some(v) = basis.iter().find(|v| v.len() != d) {
        return Err(QcodeError::DimensionMismatch {
            expected: d,
            found: v.len(),
        });
    }
    let violation = linalg::orthonormality_violation(&basis);
    if violation > 1e-9 {
        return Err(QcodeError::NonOrthonormalBasis { violation });
    }
    let lookup = code
        .words()
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    Ok(QuantumEncoder {
        basis,
        code,
        lookup,
    })
}

/// Standard basis of ℂ^d.
pub fn standard_basis(d: usize) -> Vec<Vec<Complex64>> {
    ComplexMatrix::identity(d).columns()
}

impl QuantumEncoder {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn k(&self) -> u32 {
        self.code.k()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn code(&self) -> &ClassicalCode {
        &self.code
    }

    pub fn lengths(&self) -> Vec<u32> {
        self.code.lengths().lengths().to_vec()
    }

    /// ⟨e_i|ρ|e_i⟩ for each basis vector.
    pub fn diagonal_weights(&self, rho: &DensityOperator) -> Vec<f64> {
        self.basis.iter().map(|e| rho.expectation(e).max(0.0)).collect()
    }

    /// U† f(Λ) U = Σ_i f(ℓ_i) |e_i⟩⟨e_i|.
    pub fn pullback(&self, f: impl Fn(u32) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (e, l) in self.basis.iter().zip(self.lengths()) {
            let fl = f(l);
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += e[i] * e[j].conj() * fl;
                }
            }
        }
        out
    }

    /// The basis-state codeword |c(i)⟩.
    pub fn codeword(&self, i: usize) -> FockVector {
        FockVector {
            k: self.k(),
            terms: BTreeMap::from([(self.code.words()[i].clone(), Complex64::new(1.0, 0.0))]),
        }
    }

    fn check_state(&self, s: &[Complex64]) -> Result<(), QcodeError> {
        if s.len() != self.dim() {
            return Err(QcodeError::DimensionMismatch {
                expected: self.dim(),
                found: s.len(),
            });
        }
        Ok(())
    }

    fn coefficients(&self, s: &[Complex64]) -> Vec<Complex64> {
        self.basis.iter().map(|e| linalg::inner(e, s)).collect()
    }
}

/// U|s⟩ = Σ_i ⟨e_i|s⟩ |c(i)⟩.
pub fn encode(enc: &QuantumEncoder, s: &[Complex64]) -> Result<FockVector, QcodeError> {
    enc.check_state(s)?;
    let terms = enc
        .code
        .words()
        .iter()
        .cloned()
        .zip(enc.coefficients(s));
    FockVector::from_terms(enc.k(), terms)
}

/// U^M(|s_1⟩⊗…⊗|s_M⟩): amplitudes Π_m ⟨e_{i_m}|s_m⟩ on concatenated words.
pub fn encode_block(
    enc: &QuantumEncoder,
    states: &[Vec<Complex64>],
) -> Result<FockVector, QcodeError> {
    if states.is_empty() {
        return Err(QcodeError::EmptyBlock);
    }
    let mut acc: Vec<(String, Complex64)> = vec![(String::new(), Complex64::new(1.0, 0.0))];
    for s in states {
        enc.check_state(s)?;
        let coeffs = enc.coefficients(s);
        let mut next = Vec::with_capacity(acc.len() * enc.dim());
        for (prefix, a) in &acc {
            for (word, c) in enc.code.words().iter().zip(&coeffs) {
                let amp = a * c;
                if amp.norm() > PRUNE_AMPLITUDE {
                    next.push((format!("{prefix}{word}"), amp));
                }
            }
        }
        acc = next;
    }
    FockVector::from_terms(enc.k(), acc)
}

/// Coefficients of a decoded block in the product basis |e_{i_1}⋯e_{i_M}⟩,
/// indexed row-major with i_1 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductCoefficients {
    pub dim: usize,
    pub blocks: usize,
    pub coeffs: Vec<Complex64>,
}

impl ProductCoefficients {
    /// The decoded state in the original Hilbert space (ℂ^d)^{⊗M}.
    pub fn to_state(&self, basis: &[Vec<Complex64>]) -> Vec<Complex64> {
        let d = self.dim;
        let total = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let symbols = digits(idx, d, self.blocks);
            let vecs: Vec<&[Complex64]> = symbols.iter().map(|&i| basis[i].as_slice()).collect();
            let product = tensor(&vecs);
            for (o, p) in out.iter_mut().zip(product) {
                *o += c * p;
            }
        }
        out
    }
}

fn digits(mut idx: usize, base: usize, count: usize) -> Vec<usize> {
    let mut out = vec![0; count];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

/// Kronecker product of vectors, first factor most significant.
pub fn tensor(vectors: &[&[Complex64]]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for v in vectors {
        acc = acc
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
    }
    acc
}

/// Inverse of [`encode_block`] on its image: parses every occupied word as
/// exactly `blocks` codewords.
pub fn decode(
    enc: &QuantumEncoder,
    w: &FockVector,
    blocks: usize,
) -> Result<ProductCoefficients, QcodeError> {
    if blocks == 0 {
        return Err(QcodeError::EmptyBlock);
    }
    if w.k() != enc.k() {
        return Err(QcodeError::AlphabetMismatch {
            encoder: enc.k(),
            vector: w.k(),
        });
    }
    let d = enc.dim();
    let size = d.checked_pow(blocks as u32).ok_or(QcodeError::DimensionMismatch {
        expected: usize::MAX,
        found: d,
    })?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); size];
    for (word, &amp) in &w.terms {
        let symbols = parse_word(enc, word, blocks)?;
        let idx = symbols.iter().fold(0, |acc, &i| acc * d + i);
        coeffs[idx] += amp;
    }
    Ok(ProductCoefficients {
        dim: d,
        blocks,
        coeffs,
    })
}

fn parse_word(enc: &QuantumEncoder, word: &str, blocks: usize) -> Result<Vec<usize>, QcodeError> {
    let fail = || QcodeError::UnparsableString {
        word: word.to_string(),
        blocks,
    };
    // the single-symbol code has the empty word; every block is that symbol
    if enc.dim() == 1 {
        return if word.is_empty() { Ok(vec![0; blocks]) } else { Err(fail()) };
    }
    let mut symbols = Vec::with_capacity(blocks);
    let mut start = 0;
    for (pos, _) in word.char_indices().map(|(i, c)| (i + c.len_utf8(), c)) {
        if let Some(&i) = enc.lookup.get(&word[start..pos]) {
            symbols.push(i);
            start = pos;
        }
    }
    if start != word.len() || symbols.len() != blocks {
        return Err(fail());
    }
    Ok(symbols)
}

/// A source emitting |s_n⟩ with probability p_n.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceEnsemble {
    probs: Distribution,
    states: Vec<Vec<Complex64>>,
}

impl SourceEnsemble {
    pub fn new(probs: Distribution, states: Vec<Vec<Complex64>>) -> Result<Self, QcodeError> {
        if probs.len() != states.len() {
            return Err(QcodeError::DimensionMismatch {
                expected: probs.len(),
                found: states.len(),
            });
        }
        let d = states.first().map_or(0, Vec::len);
        for (index, s) in states.iter().enumerate() {
            if s.len() != d {
                return Err(QcodeError::DimensionMismatch {
                    expected: d,
                    found: s.len(),
                });
            }
            let norm = linalg::norm(s);
            if (norm - 1.0).abs() > 1e-9 {
                return Err(QcodeError::NotNormalized { index, norm });
            }
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &Distribution {
        &self.probs
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    /// ρ = Σ_n p_n |s_n⟩⟨s_n|.
    pub fn density(&self) -> Result<DensityOperator, QcodeError> {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d);
        for (&p, s) in self.probs.probs().iter().zip(&self.states) {
            let n2 = linalg::norm(s).powi(2);
            m = m.add(&ComplexMatrix::projector(s).scale(Complex64::new(p / n2, 0.0)));
        }
        Ok(DensityOperator::new(m)?)
    }
}

/// ℓ_t(C(ρ)) = (1/t) log_k Σ_i ⟨e_i|ρ|e_i⟩ k^{tℓ_i}.
pub fn source_t_avg_length(
    enc: &QuantumEncoder,
    rho: &DensityOperator,
    t: Penalty,
) -> Result<f64, QcodeError> {
    if rho.dim() != enc.dim() {
        return Err(QcodeError::DimensionMismatch {
            expected: enc.dim(),
            found: rho.dim(),
        });
    }
    let weights = enc.diagonal_weights(rho);
    let lengths = enc.lengths();
    let pairs = weights
        .iter()
        .zip(&lengths)
        .map(|(&w, &l)| (if w > linalg::ZERO_EIGENVALUE { w } else { 0.0 }, l));
    Ok(codes::weighted_t_length(pairs, enc.k(), t))
}

/// Same average written over the ensemble:
/// (1/t) log_k Σ_n p_n Σ_i |⟨e_i|s_n⟩|² k^{tℓ_i}.
pub fn ensemble_t_avg_length(
    enc: &QuantumEncoder,
    ensemble: &SourceEnsemble,
    t: Penalty,
) -> Result<f64, QcodeError> {
    let lengths = enc.lengths();
    let mut weights = vec![0.0; enc.dim()];
    for (&p, s) in ensemble.probs.probs().iter().zip(&ensemble.states) {
        enc.check_state(s)?;
        for (w, c) in weights.iter_mut().zip(enc.coefficients(s)) {
            *w += p * c.norm_sqr();
        }
    }
    let pairs = weights
        .iter()
        .zip(&lengths)
        .map(|(&w, &l)| (if w > linalg::ZERO_EIGENVALUE { w } else { 0.0 }, l));
    Ok(codes::weighted_t_length(pairs, enc.k(), t))
}

/// Longest base length over the members the source actually emits (p_n > 0).
pub fn source_base_length(
    enc: &QuantumEncoder,
    ensemble: &SourceEnsemble,
) -> Result<usize, QcodeError> {
    let mut longest = 0;
    for (&p, s) in ensemble.probs.probs().iter().zip(&ensemble.states) {
        if p > 0.0 {
            longest = longest.max(base_length(&encode(enc, s)?));
        }
    }
    Ok(longest)
}

/// Tr(U† k^{−Λ} U), summed as ⟨c(i)|k^{−Λ}|c(i)⟩ over the codewords.
pub fn quantum_kraft_sum(enc: &QuantumEncoder) -> f64 {
    let k = f64::from(enc.k());
    (0..enc.dim())
        .map(|i| {
            enc.codeword(i)
                .length_expectation(|l| k.powi(-(l as i32)))
        })
        .sum()
}

/// σ = U† k^{−Λ} U / β with β = Tr(U† k^{−Λ} U).
pub fn code_induced_state(enc: &QuantumEncoder) -> Result<(DensityOperator, f64), QcodeError> {
    let beta = quantum_kraft_sum(enc);
    let k = f64::from(enc.k());
    let weights: Vec<f64> = enc.lengths().iter().map(|&l| k.powi(-(l as i32)) / beta).collect();
    let sigma = DensityOperator::from_spectrum(&weights, enc.basis())?;
    Ok((sigma, beta))
}

/// log_k β, the Kraft deficit term.
pub fn log_kraft(enc: &QuantumEncoder) -> f64 {
    log_k(quantum_kraft_sum(enc), enc.k())
}
