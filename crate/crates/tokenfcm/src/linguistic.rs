//! Linguistic-scale calculus for multi-expert risk indices.
//!
//! Experts grade each risk index (occurrence, severity, detection difficulty)
//! on a symmetric scale `s₋ₜ … sₜ`. Per-grade head-counts become a
//! [`TermDistribution`] — a probability distribution over scale indices —
//! and the three index distributions are combined with a weighted product in
//! unit space, then collapsed to a scalar RPN by probability-weighted index
//! averaging.
//!
//! Product results live on *virtual* terms: their indices are real numbers in
//! `[-t, t]`, not necessarily integer grades.

use thiserror::Error;

/// Near-duplicate product indices closer than this are merged into one term.
const MERGE_TOLERANCE: f64 = 1e-9;

/// Validation slack for probability/weight sums that must equal 1.
const SUM_TOLERANCE: f64 = 1e-9;

/// How far the probabilities of an explicitly entered distribution may sum
/// from 1. Printed tables round entries to about two decimals, so a handful
/// of terms can drift a few hundredths; anything beyond that is a typo.
const ROUNDING_SLACK: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum LinguisticError {
    #[error("scale half-range must be at least 1")]
    ZeroHalfRange,
    #[error("tally has {got} grade counts but the scale has {want} grades")]
    TallyLength { got: usize, want: usize },
    #[error("tally contains no expert opinions")]
    EmptyTally,
    #[error("term index {index} lies outside the scale [-{half_range}, {half_range}]")]
    IndexOutOfScale { index: f64, half_range: u32 },
    #[error("unit value {value} lies outside [0, 1]")]
    UnitOutOfRange { value: f64 },
    #[error("index weights must each lie in (0, 1) and sum to 1 (sum was {sum})")]
    BadWeights { sum: f64 },
    #[error("term probabilities must be positive and sum to 1 (sum was {sum})")]
    BadProbabilities { sum: f64 },
    #[error("weighted product needs at least one factor")]
    NoFactors,
    #[error("{factors} factors paired with {weights} weights")]
    FactorWeightArity { factors: usize, weights: usize },
}

/// Symmetric linguistic scale `s₋ₜ … sₜ` with half-range `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinguisticScale {
    half_range: u32,
}

impl LinguisticScale {
    pub fn new(half_range: u32) -> Result<Self, LinguisticError> {
        if half_range == 0 {
            return Err(LinguisticError::ZeroHalfRange);
        }
        Ok(Self { half_range })
    }

    pub fn half_range(self) -> u32 {
        self.half_range
    }

    /// Number of integer grades on the scale (`2t + 1`).
    pub fn grade_count(self) -> usize {
        2 * self.half_range as usize + 1
    }

    /// Maps a (possibly non-integral) term index into unit space:
    /// `g(i) = i/(2t) + 1/2`.
    pub fn term_to_unit(self, index: f64) -> Result<f64, LinguisticError> {
        let t = self.half_range as f64;
        if !index.is_finite() || index < -t || index > t {
            return Err(LinguisticError::IndexOutOfScale {
                index,
                half_range: self.half_range,
            });
        }
        Ok(index / (2.0 * t) + 0.5)
    }

    /// Inverse of [`term_to_unit`](Self::term_to_unit): `g⁻¹(x) = (2x − 1)·t`.
    pub fn unit_to_term(self, unit: f64) -> Result<f64, LinguisticError> {
        if !unit.is_finite() || !(0.0..=1.0).contains(&unit) {
            return Err(LinguisticError::UnitOutOfRange { value: unit });
        }
        Ok((2.0 * unit - 1.0) * self.half_range as f64)
    }
}

/// Per-grade expert head-counts for one risk index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpertTally {
    counts: Vec<u32>,
}

impl ExpertTally {
    /// Validates that `counts` has one entry per grade (`2t + 1`) and at
    /// least one vote in total.
    pub fn new(scale: LinguisticScale, counts: Vec<u32>) -> Result<Self, LinguisticError> {
        if counts.len() != scale.grade_count() {
            return Err(LinguisticError::TallyLength {
                got: counts.len(),
                want: scale.grade_count(),
            });
        }
        if counts.iter().all(|&c| c == 0) {
            return Err(LinguisticError::EmptyTally);
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Total number of collected opinions.
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

/// Probability distribution over linguistic term indices.
///
/// Terms are sorted by index, every stored probability is strictly positive,
/// and the probabilities sum to 1. Indices are real-valued: tallies produce
/// integer grades, products produce virtual terms in between.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDistribution {
    terms: Vec<(f64, f64)>,
}

impl TermDistribution {
    /// Converts a tally to its relative-frequency distribution
    /// (`pⱼ = countⱼ / K`); zero-count grades are dropped.
    pub fn from_tally(
        tally: &ExpertTally,
        scale: LinguisticScale,
    ) -> Result<Self, LinguisticError> {
        if tally.counts.len() != scale.grade_count() {
            return Err(LinguisticError::TallyLength {
                got: tally.counts.len(),
                want: scale.grade_count(),
            });
        }
        let total = tally.total() as f64;
        let t = scale.half_range as i64;
        let terms = tally
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &count)| count > 0)
            .map(|(slot, &count)| ((slot as i64 - t) as f64, count as f64 / total))
            .collect();
        Ok(Self { terms })
    }

    /// Distribution with all mass on a single term.
    pub fn singleton(index: f64, scale: LinguisticScale) -> Result<Self, LinguisticError> {
        scale.term_to_unit(index)?; // range check only
        Ok(Self {
            terms: vec![(index, 1.0)],
        })
    }

    /// Distribution from explicit `(index, probability)` pairs, for opinions
    /// already aggregated elsewhere. Indices must lie on the scale and the
    /// probabilities must sum to 1 up to printing slack (published tables
    /// often round each entry to two decimals, so sums like 0.99 or 1.01 are
    /// legitimate transcriptions). Zero-probability terms are dropped and
    /// duplicate indices merged, but the masses are kept exactly as given —
    /// renormalizing would shift the scalar reading away from the source's.
    pub fn from_terms(
        pairs: &[(f64, f64)],
        scale: LinguisticScale,
    ) -> Result<Self, LinguisticError> {
        let mut sum = 0.0;
        for &(index, p) in pairs {
            scale.term_to_unit(index)?; // range check only
            if !p.is_finite() || p < 0.0 {
                return Err(LinguisticError::BadProbabilities { sum: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > ROUNDING_SLACK {
            return Err(LinguisticError::BadProbabilities { sum });
        }
        Ok(Self {
            terms: Self::tidied(pairs.to_vec()),
        })
    }

    /// `(index, probability)` pairs, sorted by index.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    /// Probability-weighted index sum `Σ kᵢ · p(kᵢ)` — the scalar reading of
    /// the distribution.
    pub fn defuzzify(&self) -> f64 {
        self.terms.iter().map(|&(index, p)| index * p).sum()
    }

    /// Builds a distribution from raw `(index, probability)` pairs produced
    /// by an exact operation: tidies them and rescales to sum 1.
    fn from_raw(raw: Vec<(f64, f64)>) -> Self {
        let mut terms = Self::tidied(raw);
        let mass: f64 = terms.iter().map(|&(_, p)| p).sum();
        if mass > 0.0 {
            for (_, p) in &mut terms {
                *p /= mass;
            }
        }
        Self { terms }
    }

    /// Sorts by index, drops zero mass, and merges runs of near-duplicate
    /// indices. The merged index is the probability-weighted mean, so the
    /// weighted index sum — and with it defuzzification — is unaffected.
    fn tidied(mut raw: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        raw.retain(|&(_, p)| p > 0.0);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut terms: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (index, p) in raw {
            match terms.last_mut() {
                Some((last_index, last_p)) if (index - *last_index).abs() <= MERGE_TOLERANCE => {
                    let mass = *last_p + p;
                    *last_index = (*last_index * *last_p + index * p) / mass;
                    *last_p = mass;
                }
                _ => terms.push((index, p)),
            }
        }
        terms
    }
}

/// Relative importance of occurrence, severity, and detection difficulty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskIndexWeights {
    occurrence: f64,
    severity: f64,
    detection: f64,
}

impl RiskIndexWeights {
    /// Each weight must lie strictly in (0, 1) and the three must sum to 1.
    pub fn new(occurrence: f64, severity: f64, detection: f64) -> Result<Self, LinguisticError> {
        let sum = occurrence + severity + detection;
        let in_range = |w: f64| w.is_finite() && w > 0.0 && w < 1.0;
        if !in_range(occurrence)
            || !in_range(severity)
            || !in_range(detection)
            || (sum - 1.0).abs() > SUM_TOLERANCE
        {
            return Err(LinguisticError::BadWeights { sum });
        }
        Ok(Self {
            occurrence,
            severity,
            detection,
        })
    }

    pub fn occurrence(self) -> f64 {
        self.occurrence
    }

    pub fn severity(self) -> f64 {
        self.severity
    }

    pub fn detection(self) -> f64 {
        self.detection
    }
}

/// Weighted product of term distributions in unit space.
///
/// Every combination of one term per factor contributes a result term with
/// index `g⁻¹(∏ g(sᵢ)^wᵢ)` and probability `∏ pᵢ`. Near-duplicate indices are
/// merged and the result is renormalized.
///
/// Convention: `0^w = 0` for `w > 0`, so a bottom-of-scale factor term
/// (`g = 0`) is absorbing and pins that combination to index `−t`.
pub fn weighted_product(
    factors: &[TermDistribution],
    weights: &[f64],
    scale: LinguisticScale,
) -> Result<TermDistribution, LinguisticError> {
    if factors.is_empty() {
        return Err(LinguisticError::NoFactors);
    }
    if factors.len() != weights.len() {
        return Err(LinguisticError::FactorWeightArity {
            factors: factors.len(),
            weights: weights.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    // A single factor is the identity case: the sum check forces its weight
    // to 1. With several factors every weight must lie strictly in (0, 1).
    let ranges_ok = factors.len() == 1 || weights.iter().all(|&w| w > 0.0 && w < 1.0);
    if !ranges_ok || (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(LinguisticError::BadWeights { sum });
    }

    // Fold the cross product in unit space: `acc` holds (∏ g^w, ∏ p) pairs.
    let mut acc: Vec<(f64, f64)> = vec![(1.0, 1.0)];
    for (factor, &weight) in factors.iter().zip(weights) {
        let mut next = Vec::with_capacity(acc.len() * factor.terms.len());
        for &(unit_acc, p_acc) in &acc {
            for &(index, p) in &factor.terms {
                let unit = scale.term_to_unit(index)?;
                let powered = if unit == 0.0 { 0.0 } else { unit.powf(weight) };
                next.push((unit_acc * powered, p_acc * p));
            }
        }
        acc = next;
    }

    let raw = acc
        .into_iter()
        .map(|(unit, p)| {
            let index = scale
                .unit_to_term(unit)
                .expect("products of unit-space values stay in [0, 1]");
            (index, p)
        })
        .collect();
    Ok(TermDistribution::from_raw(raw))
}

/// Full static pipeline for one risk: tallies → distributions → weighted
/// product → defuzzified risk priority number.
pub fn compute_rpn(
    occurrence: &ExpertTally,
    severity: &ExpertTally,
    detection: &ExpertTally,
    weights: &RiskIndexWeights,
    scale: LinguisticScale,
) -> Result<f64, LinguisticError> {
    let o = TermDistribution::from_tally(occurrence, scale)?;
    let s = TermDistribution::from_tally(severity, scale)?;
    let d = TermDistribution::from_tally(detection, scale)?;
    let product = weighted_product(
        &[o, s, d],
        &[weights.occurrence, weights.severity, weights.detection],
        scale,
    )?;
    Ok(product.defuzzify())
}
