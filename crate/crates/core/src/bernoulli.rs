//! The parameter vector p₁..pₙ of a Poisson-binomial law, with its derived
//! moments and regime quantities.

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Real};

/// Success probabilities sorted ascending, plus the derived moments
/// λ = Σ pⱼ, λ₂ = Σ pⱼ², λ₃ = Σ pⱼ³ and the regime quantities
/// F = max(1,λ)/max(1,λ−λ₂), Q = λ/max(1,λ−λ₂), Q₀ = 1/max(1,λ−λ₂).
///
/// Sorting fixes the summation and convolution order, which makes every
/// derived value a permutation-invariant function of the input, bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliVector<T: Real> {
    probs: Vec<T>,
    lambda: T,
    lambda2: T,
    lambda3: T,
}

/// The moment/regime summary of one instance, reported in f64.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub lambda: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub big_f: f64,
    pub q: f64,
    pub q0: f64,
    pub max_p: f64,
}

impl<T: Real> BernoulliVector<T> {
    pub fn new(probs: impl IntoIterator<Item = f64>) -> Result<Self> {
        let raw: Vec<f64> = probs.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &value) in raw.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let mut sorted = raw;
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("validated probabilities"));
        let probs: Vec<T> = sorted.into_iter().map(T::of).collect();
        let lambda = compensated_sum(probs.iter().copied());
        let lambda2 = compensated_sum(probs.iter().map(|&p| p * p));
        let lambda3 = compensated_sum(probs.iter().map(|&p| p * p * p));
        Ok(Self {
            probs,
            lambda,
            lambda2,
            lambda3,
        })
    }

    /// Probabilities in ascending order.
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn lambda2(&self) -> T {
        self.lambda2
    }

    pub fn lambda3(&self) -> T {
        self.lambda3
    }

    pub fn max_p(&self) -> T {
        *self.probs.last().expect("non-empty")
    }

    /// max(1, λ−λ₂), the common denominator of F, Q, Q₀.
    fn regime_denominator(&self) -> T {
        T::one().max(self.lambda - self.lambda2)
    }

    /// F = max(1,λ)/max(1,λ−λ₂) ≥ 1.
    pub fn big_f(&self) -> T {
        T::one().max(self.lambda) / self.regime_denominator()
    }

    /// Q = λ/max(1,λ−λ₂).
    pub fn q_quantity(&self) -> T {
        self.lambda / self.regime_denominator()
    }

    /// Q₀ = 1/max(1,λ−λ₂).
    pub fn q0_quantity(&self) -> T {
        T::one() / self.regime_denominator()
    }

    /// (λ, λ₂, λ₃, F, Q, Q₀).
    pub fn moments(&self) -> (T, T, T, T, T, T) {
        (
            self.lambda,
            self.lambda2,
            self.lambda3,
            self.big_f(),
            self.q_quantity(),
            self.q0_quantity(),
        )
    }

    /// Entries strictly inside (0,1): the convolution core after zeros are
    /// dropped and exact ones are turned into a deterministic shift.
    pub fn interior(&self) -> &[T] {
        let lo = self.probs.partition_point(|&p| p == T::zero());
        let hi = self.probs.partition_point(|&p| p < T::one());
        &self.probs[lo..hi]
    }

    /// Number of entries equal to 1 (the deterministic shift).
    pub fn ones(&self) -> usize {
        self.probs.len() - self.probs.partition_point(|&p| p < T::one())
    }

    /// Number of entries with pⱼ > 0; the support of W is {ones .. n_effective}.
    pub fn n_effective(&self) -> usize {
        self.probs.len() - self.probs.partition_point(|&p| p == T::zero())
    }

    pub fn is_degenerate(&self) -> bool {
        self.interior().is_empty()
    }

    pub fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            n: self.n(),
            lambda: self.lambda.to_f64(),
            lambda2: self.lambda2.to_f64(),
            lambda3: self.lambda3.to_f64(),
            big_f: self.big_f().to_f64(),
            q: self.q_quantity().to_f64(),
            q0: self.q0_quantity().to_f64(),
            max_p: self.max_p().to_f64(),
        }
    }

    /// Re-embed into another scalar type (exact: probabilities are f64).
    pub fn convert<U: Real>(&self) -> BernoulliVector<U> {
        BernoulliVector::new(self.probs.iter().map(|p| p.to_f64()))
            .expect("already validated")
    }

    /// Concatenation realizes the sum of independent Poisson-binomial
    /// variables.
    pub fn concat(&self, other: &Self) -> Self {
        Self::new(
            self.probs
                .iter()
                .chain(other.probs.iter())
                .map(|p| p.to_f64()),
        )
        .expect("both parts validated")
    }
}
