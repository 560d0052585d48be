//! Probability mass functions on a shared finite alphabet, together with the
//! entropy / Kullback-Leibler / Jensen-Shannon kernel.
//!
//! All quantities are in nats. Zero-mass symbols are skipped in every sum,
//! which realizes the continuous extension `0 ln 0 = 0` without evaluating
//! `ln(0)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum(mass) - 1|` accepted by [`Pmf::new`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Tolerance on `|sum(weights) - 1|` accepted by [`convex_combine`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A symbol name: either an integer or a string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

/// Ordered list of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    labels: Vec<Label>,
}

impl Alphabet {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
        }
        Ok(Self { labels })
    }

    /// The alphabet `{1, ..., n}`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((1..=n as i64).map(Label::Int).collect())
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }
}

/// A mixture proportion or prior, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Weight(pub(crate) f64);

impl Weight {
    pub const ZERO: Weight = Weight(0.0);
    pub const HALF: Weight = Weight(0.5);
    pub const ONE: Weight = Weight(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::WeightOutOfRange(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - w`.
    #[inline]
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Weight::new(v).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<f64> for Weight {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Weight::new(value)
    }
}

/// Dense probability vector over an [`Alphabet`].
///
/// Entries are nonnegative and sum to one within [`SUM_TOLERANCE`]. Values are
/// immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    alphabet: Arc<Alphabet>,
    mass: Vec<f64>,
}

impl Pmf {
    /// Validating constructor. Masses must be finite, in `[0, 1]`, and sum to
    /// one within [`SUM_TOLERANCE`]; nothing is rescaled.
    pub fn new(alphabet: Arc<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != alphabet.size() {
            return Err(Error::LengthMismatch {
                expected: alphabet.size(),
                got: mass.len(),
            });
        }
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0 + SUM_TOLERANCE).contains(&value) {
                return Err(Error::InvalidMass { index, value });
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::SumToOne {
                sum,
                tolerance: SUM_TOLERANCE,
            });
        }
        Ok(Self { alphabet, mass })
    }

    /// Rescales nonnegative finite weights so they sum to one.
    pub fn normalized(alphabet: Arc<Alphabet>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != alphabet.size() {
            return Err(Error::LengthMismatch {
                expected: alphabet.size(),
                got: weights.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidMass { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::NotNormalizable(total));
        }
        Self::new(alphabet, weights.into_iter().map(|w| w / total).collect())
    }

    /// Convenience constructor on the alphabet `{1, ..., n}`.
    pub fn from_masses(mass: Vec<f64>) -> Result<Self> {
        let alphabet = Arc::new(Alphabet::indexed(mass.len())?);
        Self::new(alphabet, mass)
    }

    /// Uniform distribution over the whole alphabet.
    pub fn uniform(alphabet: Arc<Alphabet>) -> Self {
        let n = alphabet.size();
        Self {
            alphabet,
            mass: vec![1.0 / n as f64; n],
        }
    }

    /// Builds from masses that are already known to form a distribution
    /// (convex combinations of valid PMFs).
    pub(crate) fn from_parts_unchecked(alphabet: Arc<Alphabet>, mass: Vec<f64>) -> Self {
        debug_assert_eq!(alphabet.size(), mass.len());
        Self { alphabet, mass }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn same_alphabet(&self, other: &Pmf) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet
    }

    pub(crate) fn check_alphabet(&self, other: &Pmf) -> Result<()> {
        if self.same_alphabet(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }
}

/// Indices with strictly positive mass.
pub fn support(r: &Pmf) -> BTreeSet<usize> {
    r.mass
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// `-sum r ln r` over the support of `r`.
pub fn entropy(r: &Pmf) -> f64 {
    entropy_of(&r.mass)
}

pub(crate) fn entropy_of(mass: &[f64]) -> f64 {
    -mass
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * m.ln())
        .sum::<f64>()
}

/// `sum r1 ln(r1 / r2)` over the support of `r1`; `+inf` when `r1` puts mass
/// where `r2` has none.
pub fn kl_divergence(r1: &Pmf, r2: &Pmf) -> Result<f64> {
    r1.check_alphabet(r2)?;
    Ok(kl_of(&r1.mass, &r2.mass))
}

pub(crate) fn kl_of(r1: &[f64], r2: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in r1.iter().zip(r2) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).ln();
        }
    }
    acc
}

/// `pi r1 + (1 - pi) r2`; symbols where both agree keep their exact mass.
fn midpoint(r1: &[f64], r2: &[f64], pi: Weight) -> Vec<f64> {
    let (w1, w2) = (pi.get(), pi.complement());
    r1.iter()
        .zip(r2)
        .map(|(&a, &b)| if a == b { a } else { w1 * a + w2 * b })
        .collect()
}

/// Weighted Jensen-Shannon divergence in its KL form,
/// `pi KL(r1 || r_M) + (1 - pi) KL(r2 || r_M)` with `r_M = pi r1 + (1 - pi) r2`.
pub fn js_divergence(r1: &Pmf, r2: &Pmf, pi: Weight) -> Result<f64> {
    r1.check_alphabet(r2)?;
    Ok(js_of(&r1.mass, &r2.mass, pi))
}

pub(crate) fn js_of(r1: &[f64], r2: &[f64], pi: Weight) -> f64 {
    let m = midpoint(r1, r2, pi);
    // A side with zero weight contributes nothing, even if its KL is infinite.
    let left = if pi.get() > 0.0 {
        pi.get() * kl_of(r1, &m)
    } else {
        0.0
    };
    let right = if pi.complement() > 0.0 {
        pi.complement() * kl_of(r2, &m)
    } else {
        0.0
    };
    (left + right).max(0.0)
}

/// Entropy form `H(r_M) - pi H(r1) - (1 - pi) H(r2)` of the same quantity.
pub fn js_divergence_entropy_form(r1: &Pmf, r2: &Pmf, pi: Weight) -> Result<f64> {
    r1.check_alphabet(r2)?;
    let m = midpoint(&r1.mass, &r2.mass, pi);
    Ok(entropy_of(&m) - pi.get() * entropy(r1) - pi.complement() * entropy(r2))
}

/// Symmetric JS divergence (`pi = 1/2`), bounded by `ln 2`.
pub fn sym_js(r1: &Pmf, r2: &Pmf) -> Result<f64> {
    js_divergence(r1, r2, Weight::HALF)
}

/// `h2(x) = -x ln x - (1 - x) ln(1 - x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let w = Weight::new(x)?;
    Ok(entropy_of(&[w.get(), w.complement()]))
}

/// Entrywise weighted sum of PMFs over a shared alphabet.
pub fn convex_combine(weights: &[Weight], pmfs: &[&Pmf]) -> Result<Pmf> {
    if weights.len() != pmfs.len() {
        return Err(Error::ArityMismatch {
            weights: weights.len(),
            pmfs: pmfs.len(),
        });
    }
    let first = pmfs.first().ok_or(Error::ArityMismatch {
        weights: 0,
        pmfs: 0,
    })?;
    for p in &pmfs[1..] {
        first.check_alphabet(p)?;
    }
    let total: f64 = weights.iter().map(|w| w.get()).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::WeightSum(total));
    }
    let mut mass = vec![0.0; first.len()];
    for (w, p) in weights.iter().zip(pmfs) {
        for (acc, &m) in mass.iter_mut().zip(p.mass()) {
            *acc += w.get() * m;
        }
    }
    Ok(Pmf::from_parts_unchecked(first.alphabet.clone(), mass))
}

/// `w a + (1 - w) b`, the two-point case used throughout the mixture model.
pub(crate) fn blend(a: &[f64], b: &[f64], w: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| w * x + (1.0 - w) * y)
        .collect()
}
