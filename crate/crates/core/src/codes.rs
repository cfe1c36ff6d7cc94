//! Classical k-ary prefix codes.
//!
//! [`exp_huffman`] is the generalized Huffman construction for the
//! t-exponential average length: merging the k lightest nodes produces a
//! parent of weight k^t·(sum of children), so a leaf at depth ℓ contributes
//! p·k^{tℓ} to the root. At t = 0 it is ordinary Huffman coding, and at
//! t = ∞ the weights become (height, mass) pairs compared lexicographically,
//! which minimizes the longest word carrying positive probability.
//!
//! [`oracle_optimal_lengths`] solves the same problem by exhaustive search
//! and is kept free of any tree construction so the two can check each other.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{escort_probs, log_k};
use crate::penalty::Penalty;

/// Kraft sums up to this much above 1 are accepted.
pub const KRAFT_TOLERANCE: f64 = 1e-12;

/// Largest alphabet: words are spelled with `0-9a-z`.
pub const MAX_ALPHABET: u32 = 36;

/// Above this cost the merge weights are kept as logarithms.
const LOG_DOMAIN_ABOVE: f64 = 32.0;

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodesError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("alphabet size k = {k} must be in 2..={MAX_ALPHABET}")]
    InvalidAlphabet { k: u32 },
    #[error("symbol {index} has zero probability; Shannon lengths are undefined")]
    ZeroProbabilitySymbol { index: usize },
    #[error("Kraft sum {sum} exceeds 1")]
    KraftViolated { sum: f64 },
    #[error("instance too large for exhaustive search: {reason}")]
    InstanceTooLarge { reason: String },
    #[error("length cap {l_max} is below the minimum {needed}")]
    CapTooSmall { l_max: u32, needed: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("word {word:?} is not a string over a {k}-ary alphabet")]
    InvalidWord { word: String, k: u32 },
    #[error("codeword {word:?} appears twice")]
    DuplicateCodeword { word: String },
    #[error("codeword {prefix:?} is a prefix of {word:?}")]
    NotPrefixFree { prefix: String, word: String },
    #[error("the empty codeword is only allowed for a single-symbol code")]
    EmptyWord,
    #[error("a code needs at least one symbol")]
    NoSymbols,
}

fn check_alphabet(k: u32) -> Result<(), CodesError> {
    if (2..=MAX_ALPHABET).contains(&k) {
        Ok(())
    } else {
        Err(CodesError::InvalidAlphabet { k })
    }
}

/// A probability vector over d symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, CodesError> {
        if probs.is_empty() {
            return Err(CodesError::NoSymbols);
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(CodesError::InvalidDistribution(format!(
                "probability {p} at index {i} is outside [0, 1]"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(CodesError::InvalidDistribution(format!(
                "probabilities sum to {sum}"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative weights; used for eigenvalue spectra that
    /// already sum to one up to rounding.
    pub fn from_weights(weights: &[f64]) -> Result<Self, CodesError> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(CodesError::InvalidDistribution(
                "weights must be non-negative with positive sum".into(),
            ));
        }
        Self::new(weights.iter().map(|w| (w / sum).min(1.0)).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Codeword lengths over a k-ary alphabet.
///
/// Construction does not enforce the Kraft inequality; [`assign_codewords`]
/// does, and every code built by this module satisfies it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LengthVector {
    lengths: Vec<u32>,
    k: u32,
}

impl LengthVector {
    pub fn new(lengths: Vec<u32>, k: u32) -> Result<Self, CodesError> {
        check_alphabet(k)?;
        Ok(Self { lengths, k })
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn max(&self) -> u32 {
        self.lengths.iter().copied().max().unwrap_or(0)
    }

    /// Lengths as a sorted multiset.
    pub fn sorted(&self) -> Vec<u32> {
        let mut v = self.lengths.clone();
        v.sort_unstable();
        v
    }
}

/// A prefix-free k-ary code; word i encodes symbol i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodebookJson", into = "CodebookJson")]
pub struct ClassicalCode {
    k: u32,
    words: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CodebookJson {
    k: u32,
    words: Vec<String>,
}

impl TryFrom<CodebookJson> for ClassicalCode {
    type Error = CodesError;

    fn try_from(json: CodebookJson) -> Result<Self, CodesError> {
        ClassicalCode::new(json.k, json.words)
    }
}

impl From<ClassicalCode> for CodebookJson {
    fn from(code: ClassicalCode) -> Self {
        CodebookJson {
            k: code.k,
            words: code.words,
        }
    }
}

/// Digit value of a letter, if it belongs to the k-ary alphabet.
pub fn letter_value(c: char, k: u32) -> Option<u32> {
    c.to_digit(36).filter(|&v| v < k)
}

fn spell(digits: &[u32]) -> String {
    digits.iter().map(|&d| DIGITS[d as usize] as char).collect()
}

impl ClassicalCode {
    pub fn new(k: u32, words: Vec<String>) -> Result<Self, CodesError> {
        check_alphabet(k)?;
        if words.is_empty() {
            return Err(CodesError::NoSymbols);
        }
        for w in &words {
            if w.chars().any(|c| letter_value(c, k).is_none() || c.is_ascii_uppercase()) {
                return Err(CodesError::InvalidWord { word: w.clone(), k });
            }
        }
        if words.len() > 1 && words.iter().any(String::is_empty) {
            return Err(CodesError::EmptyWord);
        }
        let mut sorted: Vec<&String> = words.iter().collect();
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(CodesError::DuplicateCodeword {
                    word: pair[0].clone(),
                });
            }
            if pair[1].starts_with(pair[0].as_str()) {
                return Err(CodesError::NotPrefixFree {
                    prefix: pair[0].clone(),
                    word: pair[1].clone(),
                });
            }
        }
        Ok(Self { k, words })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn lengths(&self) -> LengthVector {
        LengthVector {
            lengths: self.words.iter().map(|w| w.chars().count() as u32).collect(),
            k: self.k,
        }
    }
}

/// Σ_i k^{−ℓ_i}.
pub fn kraft_sum(lengths: &LengthVector) -> f64 {
    let k = f64::from(lengths.k);
    lengths.lengths.iter().map(|&l| k.powi(-(l as i32))).sum()
}

/// Canonical prefix-free code for a length vector.
///
/// Symbols are visited by increasing length (ties by index) and each gets the
/// lexicographically smallest word of its length not covered by an earlier one.
pub fn assign_codewords(lengths: &LengthVector) -> Result<ClassicalCode, CodesError> {
    let sum = kraft_sum(lengths);
    if lengths.is_empty() {
        return Err(CodesError::NoSymbols);
    }
    if sum > 1.0 + KRAFT_TOLERANCE {
        return Err(CodesError::KraftViolated { sum });
    }
    let k = lengths.k;
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths.lengths[i], i));

    let mut words = vec![String::new(); lengths.len()];
    let mut current: Option<Vec<u32>> = None;
    for idx in order {
        let len = lengths.lengths[idx] as usize;
        let word = match current.take() {
            None => vec![0; len],
            Some(mut prev) => {
                // increment in base k, then pad with zeros
                let mut pos = prev.len();
                loop {
                    if pos == 0 {
                        return Err(CodesError::KraftViolated { sum });
                    }
                    pos -= 1;
                    prev[pos] += 1;
                    if prev[pos] < k {
                        break;
                    }
                    prev[pos] = 0;
                }
                prev.resize(len, 0);
                prev
            }
        };
        words[idx] = spell(&word);
        current = Some(word);
    }
    ClassicalCode::new(k, words)
}

/// Shannon lengths ⌈−log_k p_i⌉.
///
/// Values within 1e-12 of an integer are rounded before taking the ceiling so
/// exact powers of k do not pick up an extra digit.
pub fn shannon_lengths(p: &Distribution, k: u32) -> Result<LengthVector, CodesError> {
    check_alphabet(k)?;
    let d = p.len();
    let lengths = p
        .probs
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            if pi <= 1e-12 {
                return Err(CodesError::ZeroProbabilitySymbol { index: i });
            }
            let ideal = -log_k(pi, k);
            let l = (ideal - 1e-12).ceil().max(0.0) as u32;
            Ok(if d > 1 { l.max(1) } else { l })
        })
        .collect::<Result<Vec<_>, _>>()?;
    LengthVector::new(lengths, k)
}

/// Shannon code: [`shannon_lengths`] placed on the canonical Kraft tree.
pub fn shannon_code(p: &Distribution, k: u32) -> Result<ClassicalCode, CodesError> {
    assign_codewords(&shannon_lengths(p, k)?)
}

/// L_t = (1/t) log_k Σ p_i k^{tℓ_i}; t = 0 is Σ p_i ℓ_i and t = ∞ the
/// longest length with positive probability.
pub fn classical_avg_length(
    p: &Distribution,
    lengths: &LengthVector,
    t: Penalty,
) -> Result<f64, CodesError> {
    if p.len() != lengths.len() {
        return Err(CodesError::DimensionMismatch {
            expected: p.len(),
            found: lengths.len(),
        });
    }
    Ok(weighted_t_length(
        p.probs.iter().copied().zip(lengths.lengths.iter().copied()),
        lengths.k,
        t,
    ))
}

/// t-exponential mean of integer lengths under (possibly unnormalized)
/// non-negative weights. Weights are normalized by their sum.
pub(crate) fn weighted_t_length(
    pairs: impl Iterator<Item = (f64, u32)> + Clone,
    k: u32,
    t: Penalty,
) -> f64 {
    let total: f64 = pairs.clone().map(|(w, _)| w).sum();
    let live = pairs.filter(|&(w, _)| w > 0.0);
    match t {
        Penalty::Finite(t) if t == 0.0 => {
            live.map(|(w, l)| w * f64::from(l)).sum::<f64>() / total
        }
        Penalty::Finite(t) => {
            // shift by the longest live word so k^{t(ℓ - ℓmax)} ≤ 1
            let lmax = live.clone().map(|(_, l)| l).max().unwrap_or(0);
            let ln_k = f64::from(k).ln();
            let s: f64 = live
                .map(|(w, l)| w * ((f64::from(l) - f64::from(lmax)) * t * ln_k).exp())
                .sum::<f64>()
                / total;
            f64::from(lmax) + s.ln() / (t * ln_k)
        }
        Penalty::Infinite => f64::from(live.map(|(_, l)| l).max().unwrap_or(0)),
    }
}

/// Optimal code for the ordinary average length.
pub fn huffman(p: &Distribution, k: u32) -> Result<ClassicalCode, CodesError> {
    exp_huffman(p, k, Penalty::ZERO)
}

/// Code minimizing the t-exponential average length.
pub fn exp_huffman(p: &Distribution, k: u32, t: Penalty) -> Result<ClassicalCode, CodesError> {
    assign_codewords(&exp_huffman_lengths(p.probs(), k, t)?)
}

/// Leaf depths of the generalized Huffman tree, without spelling out words.
///
/// Accepts unnormalized non-negative weights so product spectra with millions
/// of symbols can be coded directly.
pub fn exp_huffman_lengths(
    weights: &[f64],
    k: u32,
    t: Penalty,
) -> Result<LengthVector, CodesError> {
    check_alphabet(k)?;
    if weights.is_empty() {
        return Err(CodesError::NoSymbols);
    }
    let depths = match t {
        Penalty::Infinite => merge_depths(weights, k, &Minimax),
        Penalty::Finite(t) => {
            let n = padded_leaf_count(weights.len(), k) as f64;
            // a^(n-1) bounds every merge weight relative to the total mass
            let may_overflow = t * (n - 1.0) * f64::from(k).log10() > 250.0;
            if t > LOG_DOMAIN_ABOVE || may_overflow {
                merge_depths(weights, k, &LogScaled { log_a: t * f64::from(k).ln() })
            } else {
                merge_depths(weights, k, &Scaled { a: f64::from(k).powf(t) })
            }
        }
    };
    LengthVector::new(depths, k)
}

fn padded_leaf_count(d: usize, k: u32) -> usize {
    let k = k as usize;
    let mut n = d;
    while (n - 1) % (k - 1) != 0 {
        n += 1;
    }
    n
}

trait MergeRule {
    type Weight: Copy;
    fn leaf(&self, p: f64) -> Self::Weight;
    fn merge(&self, children: &[Self::Weight]) -> Self::Weight;
    fn cmp(&self, a: &Self::Weight, b: &Self::Weight) -> Ordering;
}

/// Parent weight a·Σw with a = k^t.
struct Scaled {
    a: f64,
}

impl MergeRule for Scaled {
    type Weight = f64;

    fn leaf(&self, p: f64) -> f64 {
        p
    }

    fn merge(&self, children: &[f64]) -> f64 {
        self.a * children.iter().sum::<f64>()
    }

    fn cmp(&self, a: &f64, b: &f64) -> Ordering {
        a.total_cmp(b)
    }
}

/// Same rule with weights stored as natural logs.
struct LogScaled {
    log_a: f64,
}

impl MergeRule for LogScaled {
    type Weight = f64;

    fn leaf(&self, p: f64) -> f64 {
        p.ln()
    }

    fn merge(&self, children: &[f64]) -> f64 {
        let m = children.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return m;
        }
        let s: f64 = children.iter().map(|&w| (w - m).exp()).sum();
        self.log_a + m + s.ln()
    }

    fn cmp(&self, a: &f64, b: &f64) -> Ordering {
        a.total_cmp(b)
    }
}

/// Limit t → ∞: weight is (height above the deepest positive leaf, mass at
/// that height); zero-mass subtrees have height −∞.
struct Minimax;

impl MergeRule for Minimax {
    type Weight = (i64, f64);

    fn leaf(&self, p: f64) -> (i64, f64) {
        if p > 0.0 {
            (0, p)
        } else {
            (i64::MIN, 0.0)
        }
    }

    fn merge(&self, children: &[(i64, f64)]) -> (i64, f64) {
        let h = children.iter().map(|c| c.0).max().unwrap_or(i64::MIN);
        if h == i64::MIN {
            return (i64::MIN, 0.0);
        }
        let mass = children.iter().filter(|c| c.0 == h).map(|c| c.1).sum();
        (h + 1, mass)
    }

    fn cmp(&self, a: &(i64, f64), b: &(i64, f64)) -> Ordering {
        a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
    }
}

struct HeapEntry<'r, R: MergeRule> {
    rule: &'r R,
    weight: R::Weight,
    /// Smallest symbol index in the subtree; padding leaves count from d.
    key: usize,
    node: usize,
}

impl<R: MergeRule> PartialEq for HeapEntry<'_, R> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<R: MergeRule> Eq for HeapEntry<'_, R> {}

impl<R: MergeRule> PartialOrd for HeapEntry<'_, R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<R: MergeRule> Ord for HeapEntry<'_, R> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule
            .cmp(&self.weight, &other.weight)
            .then(self.key.cmp(&other.key))
    }
}

fn merge_depths<R: MergeRule>(weights: &[f64], k: u32, rule: &R) -> Vec<u32> {
    let d = weights.len();
    if d == 1 {
        return vec![0];
    }
    let n = padded_leaf_count(d, k);
    let mut parent: Vec<usize> = vec![usize::MAX; n];
    let mut heap = BinaryHeap::with_capacity(n);
    for i in 0..n {
        let p = if i < d { weights[i] } else { 0.0 };
        heap.push(Reverse(HeapEntry {
            rule,
            weight: rule.leaf(p),
            key: i,
            node: i,
        }));
    }
    let mut children = Vec::with_capacity(k as usize);
    while heap.len() > 1 {
        children.clear();
        let id = parent.len();
        parent.push(usize::MAX);
        let mut key = usize::MAX;
        for _ in 0..k {
            let Reverse(e) = heap.pop().expect("leaf count is padded to a full tree");
            parent[e.node] = id;
            key = key.min(e.key);
            children.push(e.weight);
        }
        heap.push(Reverse(HeapEntry {
            rule,
            weight: rule.merge(&children),
            key,
            node: id,
        }));
    }
    // parents always have larger ids than their children, so one reverse pass
    // fills in depths top-down
    let mut depth = vec![0u32; parent.len()];
    for node in (0..parent.len()).rev() {
        if parent[node] != usize::MAX {
            depth[node] = depth[parent[node]] + 1;
        }
    }
    depth.truncate(d);
    depth
}

/// Default search cap for [`oracle_optimal_lengths`]: the larger of d − 1 and
/// the longest Shannon length of the escort distribution (at least
/// ⌈log_k d⌉ and at least 1).
pub fn default_oracle_cap(p: &Distribution, k: u32, t: Penalty) -> u32 {
    let d = p.len();
    let escort = escort_probs(p.probs(), t);
    let shannon_max = escort
        .iter()
        .filter(|&&q| q > 1e-12)
        .map(|&q| (-log_k(q, k) - 1e-12).ceil().max(0.0) as u32)
        .max()
        .unwrap_or(0);
    let floor = min_uniform_length(d, k);
    (d.saturating_sub(1) as u32).max(shannon_max).max(floor).max(1)
}

/// ⌈log_k d⌉, computed in integers.
fn min_uniform_length(d: usize, k: u32) -> u32 {
    let mut len = 0;
    let mut cap: u128 = 1;
    while cap < d as u128 {
        cap *= u128::from(k);
        len += 1;
    }
    len
}

/// Largest d accepted by the exhaustive oracle.
pub const ORACLE_MAX_SYMBOLS: usize = 8;

/// Exhaustive minimizer of Σ p_i k^{tℓ_i} (Σ p_i ℓ_i at t = 0, max ℓ_i over
/// the support at t = ∞) over all Kraft-feasible length vectors with
/// 1 ≤ ℓ_i ≤ `l_max`.
///
/// The search runs over sorted length multisets; each multiset is paired
/// with the probabilities in descending order, which is the best placement of
/// that multiset by the rearrangement inequality. Ties go to the
/// lexicographically smallest sorted multiset.
pub fn oracle_optimal_lengths(
    p: &Distribution,
    k: u32,
    t: Penalty,
    l_max: u32,
) -> Result<LengthVector, CodesError> {
    check_alphabet(k)?;
    let d = p.len();
    if d > ORACLE_MAX_SYMBOLS {
        return Err(CodesError::InstanceTooLarge {
            reason: format!("{d} symbols, oracle accepts at most {ORACLE_MAX_SYMBOLS}"),
        });
    }
    if d == 1 {
        return LengthVector::new(vec![0], k);
    }
    let needed = min_uniform_length(d, k);
    if l_max < needed {
        return Err(CodesError::CapTooSmall { l_max, needed });
    }
    let budget = u128::from(k).checked_pow(l_max).ok_or_else(|| {
        CodesError::InstanceTooLarge {
            reason: format!("k^l_max = {k}^{l_max} overflows"),
        }
    })?;

    let mut by_prob: Vec<usize> = (0..d).collect();
    by_prob.sort_by(|&i, &j| p.probs[j].total_cmp(&p.probs[i]).then(i.cmp(&j)));
    let sorted_probs: Vec<f64> = by_prob.iter().map(|&i| p.probs[i]).collect();

    let mut search = OracleSearch {
        k: u128::from(k),
        l_max,
        budget,
        probs: &sorted_probs,
        objective: Objective::new(t, k),
        current: Vec::with_capacity(d),
        best: None,
    };
    search.descend(1, 0);
    let (best, _) = search.best.expect("uniform lengths ⌈log_k d⌉ are always feasible");

    let mut lengths = vec![0; d];
    for (rank, &symbol) in by_prob.iter().enumerate() {
        lengths[symbol] = best[rank];
    }
    LengthVector::new(lengths, k)
}

#[derive(Clone, Copy)]
enum Objective {
    Mean,
    /// ln Σ p_i k^{tℓ_i}
    LogExp { t_ln_k: f64 },
    Max,
}

impl Objective {
    fn new(t: Penalty, k: u32) -> Self {
        match t {
            Penalty::Finite(t) if t == 0.0 => Objective::Mean,
            Penalty::Finite(t) => Objective::LogExp {
                t_ln_k: t * f64::from(k).ln(),
            },
            Penalty::Infinite => Objective::Max,
        }
    }

    fn eval(self, probs: &[f64], lengths: &[u32]) -> f64 {
        let pairs = probs.iter().zip(lengths).filter(|(&p, _)| p > 0.0);
        match self {
            Objective::Mean => pairs.map(|(&p, &l)| p * f64::from(l)).sum(),
            Objective::LogExp { t_ln_k } => {
                let terms: Vec<f64> = pairs
                    .map(|(&p, &l)| p.ln() + t_ln_k * f64::from(l))
                    .collect();
                let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                m + terms.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
            }
            Objective::Max => pairs.map(|(_, &l)| f64::from(l)).fold(0.0, f64::max),
        }
    }
}

struct OracleSearch<'a> {
    k: u128,
    l_max: u32,
    budget: u128,
    probs: &'a [f64],
    objective: Objective,
    current: Vec<u32>,
    best: Option<(Vec<u32>, f64)>,
}

impl OracleSearch<'_> {
    /// Extends `current` with lengths ≥ `min_len`; `used` is the Kraft mass
    /// spent so far in units of k^{−l_max}.
    fn descend(&mut self, min_len: u32, used: u128) {
        if self.current.len() == self.probs.len() {
            let value = self.objective.eval(self.probs, &self.current);
            let better = match &self.best {
                None => true,
                Some((_, best)) => value < best - 1e-13 * best.abs().max(1.0),
            };
            if better {
                self.best = Some((self.current.clone(), value));
            }
            return;
        }
        let remaining = (self.probs.len() - self.current.len()) as u128;
        for len in min_len..=self.l_max {
            let cost = self.k.pow(self.l_max - len);
            // cheapest completion puts every later symbol at l_max (cost 1 each)
            if used + cost + (remaining - 1) > self.budget {
                continue;
            }
            self.current.push(len);
            self.descend(len, used + cost);
            self.current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[f64]) -> Distribution {
        Distribution::new(p.to_vec()).unwrap()
    }

    fn lv(l: &[u32], k: u32) -> LengthVector {
        LengthVector::new(l.to_vec(), k).unwrap()
    }

    #[test]
    fn huffman_dyadic() {
        let p = dist(&[0.5, 0.25, 0.25]);
        let code = huffman(&p, 2).unwrap();
        assert_eq!(code.words(), &["0", "10", "11"]);
        assert_eq!(classical_avg_length(&p, &code.lengths(), Penalty::ZERO).unwrap(), 1.5);
    }

    #[test]
    fn huffman_single_symbol() {
        let p = dist(&[1.0]);
        let code = huffman(&p, 2).unwrap();
        assert_eq!(code.words(), &[""]);
        assert_eq!(classical_avg_length(&p, &code.lengths(), Penalty::ZERO).unwrap(), 0.0);
    }

    #[test]
    fn huffman_matches_oracle_on_skewed() {
        let p = dist(&[0.7, 0.2, 0.1]);
        let h = huffman(&p, 2).unwrap().lengths();
        let cap = default_oracle_cap(&p, 2, Penalty::ZERO);
        let o = oracle_optimal_lengths(&p, 2, Penalty::ZERO, cap).unwrap();
        let lh = classical_avg_length(&p, &h, Penalty::ZERO).unwrap();
        let lo = classical_avg_length(&p, &o, Penalty::ZERO).unwrap();
        assert!((lh - lo).abs() < 1e-12);
        assert!((lh - 1.3).abs() < 1e-12);
    }

    #[test]
    fn ternary_huffman_pads_with_dummies() {
        // d = 4, k = 3: one dummy so (n - 1) % 2 == 0
        let p = dist(&[0.4, 0.3, 0.2, 0.1]);
        let code = huffman(&p, 3).unwrap();
        assert_eq!(code.lengths().lengths(), &[1, 1, 2, 2]);
        assert!(kraft_sum(&code.lengths()) <= 1.0);
    }

    #[test]
    fn zero_probability_symbols_get_longest_words() {
        let p = dist(&[0.6, 0.4, 0.0]);
        let l = huffman(&p, 2).unwrap().lengths();
        assert_eq!(l.lengths(), &[1, 2, 2]);
        let l = exp_huffman(&p, 2, Penalty::Finite(3.0)).unwrap().lengths();
        assert_eq!(l.lengths()[2], l.max());
    }

    #[test]
    fn exp_huffman_dyadic_t1() {
        let p = dist(&[0.5, 0.25, 0.25]);
        let code = exp_huffman(&p, 2, Penalty::Finite(1.0)).unwrap();
        assert_eq!(code.lengths().lengths(), &[1, 2, 2]);
        let l = classical_avg_length(&p, &code.lengths(), Penalty::Finite(1.0)).unwrap();
        assert!((l - 3f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn exp_huffman_large_t_is_minimax() {
        let p = dist(&[0.9, 0.05, 0.05]);
        let code = exp_huffman(&p, 2, Penalty::Finite(20.0)).unwrap();
        assert_eq!(code.lengths().sorted(), vec![1, 2, 2]);

        // here t changes the tree: Huffman gives {1,2,3,3}, minimax gives all 2
        let p = dist(&[0.4, 0.3, 0.2, 0.1]);
        assert_eq!(huffman(&p, 2).unwrap().lengths().lengths(), &[1, 2, 3, 3]);
        let big = exp_huffman_lengths(p.probs(), 2, Penalty::Finite(64.0)).unwrap();
        assert_eq!(big.lengths(), &[2, 2, 2, 2]);
        let inf = exp_huffman_lengths(p.probs(), 2, Penalty::Infinite).unwrap();
        assert_eq!(inf.lengths(), &[2, 2, 2, 2]);
    }

    #[test]
    fn infinite_cost_minimizes_support_length() {
        let p = dist(&[0.5, 0.2, 0.2, 0.1, 0.0]);
        let l = exp_huffman_lengths(p.probs(), 2, Penalty::Infinite).unwrap();
        let support_max = l.lengths()[..4].iter().max().copied().unwrap();
        assert_eq!(support_max, 3);
        assert!(kraft_sum(&l) <= 1.0);
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_lengths(&dist(&[0.7, 0.2, 0.1]), 2).unwrap().lengths(), &[1, 3, 4]);
        assert_eq!(shannon_lengths(&dist(&[0.5, 0.25, 0.25]), 2).unwrap().lengths(), &[1, 2, 2]);
        assert_eq!(shannon_lengths(&dist(&[1.0]), 3).unwrap().lengths(), &[0]);
        let third = 1.0 / 9.0;
        let p = dist(&[third; 9]);
        assert_eq!(shannon_lengths(&p, 3).unwrap().lengths(), &[2; 9]);
        assert_eq!(
            shannon_lengths(&dist(&[0.5, 0.5, 0.0]), 2).unwrap_err(),
            CodesError::ZeroProbabilitySymbol { index: 2 }
        );
    }

    #[test]
    fn canonical_assignment() {
        assert_eq!(assign_codewords(&lv(&[1, 2, 2], 2)).unwrap().words(), &["0", "10", "11"]);
        assert_eq!(
            assign_codewords(&lv(&[2, 2, 2, 2], 2)).unwrap().words(),
            &["00", "01", "10", "11"]
        );
        let code = assign_codewords(&lv(&[1, 3, 4], 2)).unwrap();
        assert_eq!(code.words(), &["0", "100", "1010"]);
        let words = code.words();
        for a in words {
            for b in words {
                assert!(a == b || !b.starts_with(a.as_str()));
            }
        }
        // unsorted input keeps symbol order
        assert_eq!(assign_codewords(&lv(&[2, 1, 2], 3)).unwrap().words(), &["10", "0", "11"]);
        assert!(matches!(
            assign_codewords(&lv(&[1, 1, 1], 2)),
            Err(CodesError::KraftViolated { .. })
        ));
    }

    #[test]
    fn kraft_examples() {
        assert_eq!(kraft_sum(&lv(&[1, 2, 2], 2)), 1.0);
        assert_eq!(kraft_sum(&lv(&[1, 3, 4], 2)), 0.6875);
        assert_eq!(kraft_sum(&lv(&[0], 2)), 1.0);
    }

    #[test]
    fn oracle_examples() {
        let p = dist(&[0.5, 0.25, 0.25]);
        assert_eq!(oracle_optimal_lengths(&p, 2, Penalty::ZERO, 4).unwrap().lengths(), &[1, 2, 2]);
        let p = dist(&[0.25; 4]);
        assert_eq!(
            oracle_optimal_lengths(&p, 2, Penalty::ZERO, 4).unwrap().lengths(),
            &[2, 2, 2, 2]
        );
        let p = dist(&[0.1; 10]);
        assert!(matches!(
            oracle_optimal_lengths(&p, 2, Penalty::ZERO, 9),
            Err(CodesError::InstanceTooLarge { .. })
        ));
        let p = dist(&[0.25; 4]);
        assert_eq!(
            oracle_optimal_lengths(&p, 2, Penalty::ZERO, 1).unwrap_err(),
            CodesError::CapTooSmall { l_max: 1, needed: 2 }
        );
    }

    #[test]
    fn avg_length_examples() {
        let p = dist(&[0.5, 0.25, 0.25]);
        let l = lv(&[1, 2, 2], 2);
        assert_eq!(classical_avg_length(&p, &l, Penalty::ZERO).unwrap(), 1.5);
        let v = classical_avg_length(&p, &l, Penalty::Finite(1.0)).unwrap();
        assert!((v - 3f64.log2()).abs() < 1e-14);
        let flat = lv(&[3, 3, 3], 2);
        for t in [0.0, 0.5, 7.0, 200.0] {
            let v = classical_avg_length(&p, &flat, Penalty::Finite(t)).unwrap();
            assert!((v - 3.0).abs() < 1e-12);
        }
        assert_eq!(classical_avg_length(&p, &flat, Penalty::Infinite).unwrap(), 3.0);
        assert!(matches!(
            classical_avg_length(&p, &lv(&[1, 1], 2), Penalty::ZERO),
            Err(CodesError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn code_validation() {
        assert_eq!(
            ClassicalCode::new(2, vec!["0".into(), "0".into()]).unwrap_err(),
            CodesError::DuplicateCodeword { word: "0".into() }
        );
        assert!(matches!(
            ClassicalCode::new(2, vec!["0".into(), "01".into()]),
            Err(CodesError::NotPrefixFree { .. })
        ));
        assert!(matches!(
            ClassicalCode::new(2, vec!["0".into(), "2".into()]),
            Err(CodesError::InvalidWord { .. })
        ));
        assert_eq!(
            ClassicalCode::new(2, vec!["".into(), "1".into()]).unwrap_err(),
            CodesError::EmptyWord
        );
        assert!(ClassicalCode::new(2, vec!["".into()]).is_ok());
    }

    #[test]
    fn codebook_json() {
        let code: ClassicalCode = serde_json::from_str(r#"{"k":2,"words":["0","10","11"]}"#).unwrap();
        assert_eq!(code.lengths().lengths(), &[1, 2, 2]);
        assert_eq!(
            serde_json::to_string(&code).unwrap(),
            r#"{"k":2,"words":["0","10","11"]}"#
        );
        assert!(serde_json::from_str::<ClassicalCode>(r#"{"k":2,"words":["0","01"]}"#).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }
}
