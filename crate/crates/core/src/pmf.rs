//! Probability mass functions stored as log-probabilities, and the three
//! exact computation routes for the Poisson-binomial law: iterated two-term
//! convolution (reference), brute-force enumeration (oracle, n ≤ 20), and
//! circle-sampled polynomial inversion.

use crate::bernoulli::BernoulliVector;
use crate::cx::Cx;
use crate::error::{Error, Result};
use crate::poisson::poisson_log_pmf;
use crate::scalar::{compensated_sum, Real};

/// Maximum vector length accepted by [`bruteforce`]; the cost is 2ⁿ.
pub const BRUTEFORCE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support<T> {
    /// Complete finite support (degree-n polynomial): nothing omitted.
    ExactFinite,
    /// Truncated rendering of an infinite law; `tail_bound` certifies the
    /// omitted mass.
    Truncated { tail_bound: T },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Provenance<T> {
    Dp,
    Dft,
    Contour,
    Poisson { lambda: T },
    BruteForce,
}

impl<T: Real> Provenance<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::Dp => "dp",
            Provenance::Dft => "dft",
            Provenance::Contour => "contour",
            Provenance::Poisson { .. } => "poisson",
            Provenance::BruteForce => "bruteforce",
        }
    }
}

/// A discrete law on {0, 1, ...} stored as log-probabilities from k = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPmf<T: Real> {
    log_mass: Vec<T>,
    support: Support<T>,
    method: Provenance<T>,
}

impl<T: Real> LogPmf<T> {
    pub fn from_linear(mass: Vec<T>, support: Support<T>, method: Provenance<T>) -> Self {
        let log_mass = mass
            .into_iter()
            .map(|m| {
                if m > T::zero() {
                    m.ln()
                } else {
                    T::neg_infinity()
                }
            })
            .collect();
        Self {
            log_mass,
            support,
            method,
        }
    }

    pub fn from_log(log_mass: Vec<T>, support: Support<T>, method: Provenance<T>) -> Self {
        Self {
            log_mass,
            support,
            method,
        }
    }

    pub fn len(&self) -> usize {
        self.log_mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_mass.is_empty()
    }

    pub fn support(&self) -> Support<T> {
        self.support
    }

    pub fn method(&self) -> Provenance<T> {
        self.method
    }

    pub fn tail_bound(&self) -> T {
        match self.support {
            Support::ExactFinite => T::zero(),
            Support::Truncated { tail_bound } => tail_bound,
        }
    }

    /// Stored log-mass; −∞ beyond the stored range.
    pub fn log_mass(&self, k: usize) -> T {
        self.log_mass
            .get(k)
            .copied()
            .unwrap_or_else(T::neg_infinity)
    }

    /// Log-mass with analytic extension: a Poisson-tagged pmf keeps its true
    /// law beyond the stored range instead of dropping to −∞.
    pub fn log_mass_at(&self, k: usize) -> T {
        if k < self.log_mass.len() {
            return self.log_mass[k];
        }
        match self.method {
            Provenance::Poisson { lambda } => poisson_log_pmf(lambda, k as u64),
            _ => T::neg_infinity(),
        }
    }

    pub fn mass(&self, k: usize) -> T {
        let lm = self.log_mass(k);
        if lm == T::neg_infinity() {
            T::zero()
        } else {
            lm.exp()
        }
    }

    pub fn log_masses(&self) -> &[T] {
        &self.log_mass
    }

    /// Compensated total of the stored masses (ascending k).
    pub fn total_mass(&self) -> T {
        compensated_sum((0..self.len()).map(|k| self.mass(k)))
    }

    /// |total stored mass + tail − 1|, the normalization defect.
    pub fn normalization_defect(&self) -> T {
        (self.total_mass() + self.tail_bound() - T::one()).abs()
    }
}

/// Reference route: iterated two-term convolution over the interior
/// probabilities (ascending), zeros dropped, exact ones applied as a final
/// index shift. O(n²) time, O(n) space, no cancellation (every update is a
/// convex combination).
pub fn dp_pmf<T: Real>(bv: &BernoulliVector<T>) -> LogPmf<T> {
    let interior = bv.interior();
    let shift = bv.ones();
    let mut w: Vec<T> = Vec::with_capacity(interior.len() + 1 + shift);
    w.push(T::one());
    for &p in interior {
        let q = T::one() - p;
        w.push(T::zero());
        let top = w.len() - 1;
        for k in (1..=top).rev() {
            w[k] = w[k] * q + w[k - 1] * p;
        }
        w[0] *= q;
    }
    if shift > 0 {
        let mut shifted = vec![T::zero(); shift];
        shifted.extend(w);
        w = shifted;
    }
    LogPmf::from_linear(w, Support::ExactFinite, Provenance::Dp)
}

/// Oracle route: literal sum over all 0-1 sequences. Exponential cost, so
/// n is capped at [`BRUTEFORCE_LIMIT`].
pub fn bruteforce<T: Real>(bv: &BernoulliVector<T>) -> Result<LogPmf<T>> {
    let n = bv.n();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let probs = bv.probs();
    let mut acc = vec![T::zero(); n + 1];
    for mask in 0u32..(1u32 << n) {
        let mut product = T::one();
        let mut k = 0usize;
        for (j, &p) in probs.iter().enumerate() {
            if mask >> j & 1 == 1 {
                product *= p;
                k += 1;
            } else {
                product *= T::one() - p;
            }
        }
        acc[k] += product;
    }
    Ok(LogPmf::from_linear(
        acc,
        Support::ExactFinite,
        Provenance::BruteForce,
    ))
}

/// Samples the generating function at `node_count` equispaced points on the
/// circle of the given radius and inverts the transform. Exact for the
/// degree-n polynomial (up to rounding) whenever `node_count >= n + 1`.
///
/// Returns all `node_count` inverted values; indices above n carry pure
/// round-off. Negative round-off is clamped to zero; renormalization is left
/// to the caller.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // negation rejects NaN radii
pub fn dft_raw<T: Real>(
    bv: &BernoulliVector<T>,
    radius: T,
    node_count: usize,
) -> Result<Vec<T>> {
    let n = bv.n();
    if node_count < n + 1 {
        return Err(Error::UnderResolved {
            degree: n,
            need: n + 1,
            got: node_count,
        });
    }
    if !(radius > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "dft radius must be positive, got {radius}"
        )));
    }
    let big_n = node_count;
    let interior = bv.interior();
    let shift = bv.ones() as i32;

    // Evaluate g(r e^{iθ_j}); conjugate symmetry halves the work.
    let mut values = vec![Cx::<T>::one(); big_n];
    let step = T::tau() / T::of_usize(big_n);
    for j in 0..=big_n / 2 {
        let theta = step * T::of_usize(j);
        let w = Cx::cis(theta).scale(radius);
        let mut g = Cx::one();
        for &p in interior {
            let q = T::one() - p;
            g = g * Cx::new(q + p * w.re, p * w.im);
        }
        if shift > 0 {
            // Ones contribute the monomial w^m.
            let mut m = shift;
            let mut pw = w;
            let mut acc = Cx::one();
            while m > 0 {
                if m & 1 == 1 {
                    acc = acc * pw;
                }
                pw = pw * pw;
                m >>= 1;
            }
            g = g * acc;
        }
        values[j] = g;
        if j != 0 && j != big_n - j {
            values[big_n - j] = g.conj();
        }
    }

    // w_k = r^{-k} / N * Σ_j G_j e^{-2πijk/N}.
    let spectrum = if big_n.is_power_of_two() {
        fft_pow2(values)
    } else {
        dft_direct(&values)
    };
    let inv_n = T::one() / T::of_usize(big_n);
    let mut out = Vec::with_capacity(big_n);
    let ln_r = radius.ln();
    for (k, z) in spectrum.into_iter().enumerate() {
        let scale = if k == 0 {
            T::one()
        } else {
            (-T::of_usize(k) * ln_r).exp()
        };
        let v = z.re * inv_n * scale;
        out.push(if v < T::zero() { T::zero() } else { v });
    }
    Ok(out)
}

/// [`dft_raw`] truncated to the exact support {0..n}.
pub fn dft_pmf<T: Real>(
    bv: &BernoulliVector<T>,
    radius: T,
    node_count: usize,
) -> Result<LogPmf<T>> {
    let mut raw = dft_raw(bv, radius, node_count)?;
    raw.truncate(bv.n() + 1);
    Ok(LogPmf::from_linear(
        raw,
        Support::ExactFinite,
        Provenance::Dft,
    ))
}

/// Power-of-two default node count for [`dft_pmf`].
pub fn dft_default_nodes(n: usize) -> usize {
    (n + 1).next_power_of_two()
}

/// Σ_j x_j e^{-2πijk/N} for all k; radix-2 in-place transform.
fn fft_pow2<T: Real>(mut data: Vec<Cx<T>>) -> Vec<Cx<T>> {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    if n == 1 {
        return data;
    }
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
    // Twiddle table for the full size; stages stride into it.
    let step = -T::tau() / T::of_usize(n);
    let twiddles: Vec<Cx<T>> = (0..n / 2)
        .map(|j| Cx::cis(step * T::of_usize(j)))
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let w = twiddles[j * stride];
                let a = data[start + j];
                let b = data[start + j + half] * w;
                data[start + j] = a + b;
                data[start + j + half] = a - b;
            }
        }
        len <<= 1;
    }
    data
}

fn dft_direct<T: Real>(values: &[Cx<T>]) -> Vec<Cx<T>> {
    let n = values.len();
    let step = -T::tau() / T::of_usize(n);
    (0..n)
        .map(|k| {
            let mut acc = Cx::new(T::zero(), T::zero());
            for (j, &v) in values.iter().enumerate() {
                let angle = step * T::of_usize((j * k) % n);
                acc += v * Cx::cis(angle);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Bv = BernoulliVector<f64>;

    fn masses(pmf: &LogPmf<f64>) -> Vec<f64> {
        (0..pmf.len()).map(|k| pmf.mass(k)).collect()
    }

    #[test]
    fn dp_two_fair_coins() {
        let pmf = dp_pmf(&Bv::new([0.5, 0.5]).unwrap());
        let m = masses(&pmf);
        assert_eq!(m.len(), 3);
        assert!((m[0] - 0.25).abs() < 1e-15);
        assert!((m[1] - 0.5).abs() < 1e-15);
        assert!((m[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dp_point_mass_at_one() {
        let pmf = dp_pmf(&Bv::new([1.0]).unwrap());
        assert_eq!(masses(&pmf), vec![0.0, 1.0]);
        assert_eq!(pmf.log_mass(0), f64::NEG_INFINITY);
    }

    #[test]
    fn dp_all_ones_is_shifted_point_mass() {
        let pmf = dp_pmf(&Bv::new(std::iter::repeat_n(1.0, 7)).unwrap());
        let m = masses(&pmf);
        assert_eq!(m[7], 1.0);
        assert!(m[..7].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn bruteforce_single_and_binomial() {
        let pmf = bruteforce(&Bv::new([0.3]).unwrap()).unwrap();
        let m = masses(&pmf);
        assert!((m[0] - 0.7).abs() < 1e-16 && (m[1] - 0.3).abs() < 1e-16);

        let pmf = bruteforce(&Bv::new([0.5; 3]).unwrap()).unwrap();
        let m = masses(&pmf);
        for (got, want) in m.iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn bruteforce_rejects_large_n() {
        let bv = Bv::new(std::iter::repeat_n(0.5, 21)).unwrap();
        assert!(matches!(bruteforce(&bv), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn dft_matches_hand_inversion() {
        // (0.5 + 0.5 w)^2 sampled at 4 nodes inverts to (.25, .5, .25, 0).
        let bv = Bv::new([0.5, 0.5]).unwrap();
        let raw = dft_raw(&bv, 1.0, 4).unwrap();
        assert!((raw[0] - 0.25).abs() < 1e-15);
        assert!((raw[1] - 0.5).abs() < 1e-15);
        assert!((raw[2] - 0.25).abs() < 1e-15);
        assert!(raw[3].abs() < 1e-15);
    }

    #[test]
    fn dft_degenerate_at_radius_two() {
        // g(w) = w^2: inversion at radius 2 recovers the point mass at 2.
        let bv = Bv::new([1.0, 1.0]).unwrap();
        let raw = dft_raw(&bv, 2.0, 4).unwrap();
        assert!(raw[0].abs() < 1e-15 && raw[1].abs() < 1e-15);
        assert!((raw[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dft_under_resolution_is_an_error() {
        let bv = Bv::new([0.5; 4]).unwrap();
        assert!(matches!(
            dft_pmf(&bv, 1.0, 4),
            Err(Error::UnderResolved { need: 5, got: 4, .. })
        ));
    }

    #[test]
    fn dft_non_power_of_two_nodes() {
        let bv = Bv::new([0.3, 0.6, 0.9]).unwrap();
        let a = dft_pmf(&bv, 1.0, 5).unwrap();
        let b = dp_pmf(&bv);
        for k in 0..=3 {
            assert!((a.mass(k) - b.mass(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn seeded_cross_method_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240811);
        for _ in 0..100 {
            let n = rng.gen_range(1..=15);
            let probs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let bv = Bv::new(probs).unwrap();
            let a = dp_pmf(&bv);
            let b = bruteforce(&bv).unwrap();
            let c = dft_pmf(&bv, 1.0, dft_default_nodes(n)).unwrap();
            for k in 0..=n {
                let (wa, wb, wc) = (a.mass(k), b.mass(k), c.mass(k));
                assert!(
                    (wa - wb).abs() <= 1e-13 * wb.max(1e-300),
                    "dp vs bruteforce at k={k}: {wa:e} vs {wb:e}"
                );
                assert!((wa - wc).abs() <= 1e-12, "dp vs dft at k={k}");
            }
            assert!(a.normalization_defect() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn dp_mass_is_normalized(probs in proptest::collection::vec(0.0f64..=1.0, 1..40)) {
            let bv = Bv::new(probs).unwrap();
            let pmf = dp_pmf(&bv);
            prop_assert!(pmf.normalization_defect() < 1e-12);
            // P{W=0} = Π qⱼ never exceeds P{Z=0} = e^{−λ}.
            let z0 = (-bv.lambda()).exp();
            prop_assert!(pmf.mass(0) <= z0 * (1.0 + 1e-12));
        }

        #[test]
        fn dp_agrees_with_bruteforce(probs in proptest::collection::vec(0.0f64..=1.0, 1..12)) {
            let bv = Bv::new(probs).unwrap();
            let a = dp_pmf(&bv);
            let b = bruteforce(&bv).unwrap();
            for k in 0..=bv.n() {
                prop_assert!((a.mass(k) - b.mass(k)).abs() < 1e-13);
            }
        }
    }
}
