//! The matched Poisson law: pointwise log-pmf, factorial and pmf sandwich
//! bounds, truncated rendering with a certified tail, and the entropy
//! moments H(Z), H₂(Z).

use crate::error::Result;
use crate::pmf::{LogPmf, Provenance, Support};
use crate::policy::TruncationPolicy;
use crate::scalar::{compensated_sum, Real};

/// ln k!: cumulative log summation up to 20, log-gamma above. The two
/// branches are cross-checked at the seam in tests.
pub fn ln_factorial<T: Real>(k: u64) -> T {
    if k <= 20 {
        let mut acc = T::zero();
        for j in 2..=k {
            acc += T::of(j as f64).ln();
        }
        acc
    } else {
        T::of(k as f64 + 1.0).ln_gamma()
    }
}

/// log P{Z = k} = k·ln λ − λ − ln k!, with the λ = 0 point-mass convention.
pub fn poisson_log_pmf<T: Real>(lambda: T, k: u64) -> T {
    if lambda == T::zero() {
        return if k == 0 { T::zero() } else { T::neg_infinity() };
    }
    T::of(k as f64) * lambda.ln() - lambda - ln_factorial::<T>(k)
}

/// Two-sided factorial bound in log form:
/// ½ln(2π) + (k+½)ln k − k  ≤  ln k!  ≤  1 + (k+½)ln k − k, for k ≥ 1.
pub fn stirling_log_sandwich<T: Real>(k: u64) -> (T, T) {
    debug_assert!(k >= 1);
    let kf = T::of(k as f64);
    let half = T::of(0.5);
    let core = (kf + half) * kf.ln() - kf;
    (half * T::ln_tau() + core, T::one() + core)
}

/// Linear-scale version of [`stirling_log_sandwich`]; overflows to infinity
/// past k ≈ 170, use the log form there.
pub fn stirling_sandwich<T: Real>(k: u64) -> (T, T) {
    let (lo, hi) = stirling_log_sandwich::<T>(k);
    (lo.exp(), hi.exp())
}

/// Gaussian-type bounds on f(k) = P{Z = k}, each tagged by applicability.
#[derive(Clone, Copy, Debug)]
pub struct PmfSandwich<T> {
    /// f(k) ≤ 1/√(2πk); all k ≥ 1.
    pub universal_upper: T,
    /// (1/(e√k))·e^{−(k−λ)²/λ} ≤ f(k) ≤ (1/√(2πk))·e^{−(k−λ)²/(3λ)};
    /// applicable for 1 ≤ k ≤ 2λ.
    pub central: Option<(T, T)>,
    /// f(k) ≥ (1/(e√k))·e^{−(k−λ)²/(2λ)}; applicable for k ≥ λ.
    pub improved_lower: Option<T>,
}

pub fn poisson_pmf_sandwich<T: Real>(lambda: T, k: u64) -> PmfSandwich<T> {
    debug_assert!(k >= 1 && lambda > T::zero());
    let kf = T::of(k as f64);
    let dev = (kf - lambda) * (kf - lambda);
    let inv_sqrt_2pi_k = T::one() / (T::tau() * kf).sqrt();
    let e_lower_base = (-T::one()).exp() / kf.sqrt();
    let central = if kf <= T::of(2.0) * lambda {
        Some((
            e_lower_base * (-dev / lambda).exp(),
            inv_sqrt_2pi_k * (-dev / (T::of(3.0) * lambda)).exp(),
        ))
    } else {
        None
    };
    let improved_lower = if kf >= lambda {
        Some(e_lower_base * (-dev / (T::of(2.0) * lambda)).exp())
    } else {
        None
    };
    PmfSandwich {
        universal_upper: inv_sqrt_2pi_k,
        central,
        improved_lower,
    }
}

/// Ratio-test bound on Σ_{j>k} v_j given v_k: v_k·ρ/(1−ρ) with ρ = λ/(k+1).
/// Valid whenever λ < k + 1.
fn tail_mass_bound<T: Real>(lambda: T, k: usize, v_k: T) -> T {
    let rho = lambda / T::of_usize(k + 1);
    debug_assert!(rho < T::one());
    v_k * rho / (T::one() - rho)
}

/// Render the Poisson law as a truncated [`LogPmf`].
///
/// Truncation stops at the first index past λ (and past `min_len`) where the
/// ratio-test tail bound drops below `trunc.tail_epsilon`, subject to the
/// hard cap; the certified bound on the omitted mass is stored in the
/// support tag.
pub fn poisson_pmf<T: Real>(
    lambda: T,
    min_len: usize,
    trunc: &TruncationPolicy,
) -> Result<LogPmf<T>> {
    if lambda == T::zero() {
        let mut log_mass = vec![T::zero()];
        log_mass.resize(min_len.max(1), T::neg_infinity());
        return Ok(LogPmf::from_log(
            log_mass,
            Support::Truncated { tail_bound: T::zero() },
            Provenance::Poisson { lambda },
        ));
    }
    let lf = lambda.to_f64();
    let cap = trunc.cap_for(lf).max(min_len.saturating_sub(1));
    let eps = T::of(trunc.tail_epsilon);
    let mut log_mass = Vec::with_capacity(cap + 1);
    let mut tail = T::zero();
    for k in 0..=cap {
        let lv = poisson_log_pmf(lambda, k as u64);
        log_mass.push(lv);
        let kf = T::of_usize(k);
        if kf >= lambda && k + 1 >= min_len {
            let bound = tail_mass_bound(lambda, k, lv.exp());
            if bound <= eps {
                tail = bound;
                break;
            }
            tail = bound;
        }
    }
    Ok(LogPmf::from_log(
        log_mass,
        Support::Truncated { tail_bound: tail },
        Provenance::Poisson { lambda },
    ))
}

/// Σ_{j>=1} j^m ρ^j for m = 0..=4, in closed form.
fn geometric_moments<T: Real>(rho: T) -> [T; 5] {
    let one = T::one();
    let d = one - rho;
    let d2 = d * d;
    let d3 = d2 * d;
    let d4 = d2 * d2;
    let d5 = d4 * d;
    [
        rho / d,
        rho / d2,
        rho * (one + rho) / d3,
        rho * (one + T::of(4.0) * rho + rho * rho) / d4,
        rho * (one + T::of(11.0) * rho + T::of(11.0) * rho * rho + rho * rho * rho) / d5,
    ]
}

/// Certified bound on Σ_{j>K} v_j (−ln v_j)^pow (pow = 1 or 2), using
/// v_j ≤ v_K ρ^{j−K} and −ln v_j ≤ λ + (1 + |ln λ|) j² for j ≥ K ≥ 3.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // negation rejects NaN ratios
fn entropy_tail_bound<T: Real>(lambda: T, k_last: usize, v_last: T, pow: u32) -> T {
    let rho = lambda / T::of_usize(k_last + 1);
    if !(rho < T::one()) || v_last == T::zero() {
        return T::zero();
    }
    let c = T::one() + lambda.ln().abs();
    let kf = T::of_usize(k_last);
    let m = geometric_moments(rho);
    // (K+j)^2 and (K+j)^4 expanded in powers of j.
    let s2 = kf * kf * m[0] + T::of(2.0) * kf * m[1] + m[2];
    match pow {
        1 => v_last * (lambda * m[0] + c * s2),
        _ => {
            let k2 = kf * kf;
            let s4 = k2 * k2 * m[0]
                + T::of(4.0) * k2 * kf * m[1]
                + T::of(6.0) * k2 * m[2]
                + T::of(4.0) * kf * m[3]
                + m[4];
            v_last * (T::of(2.0) * lambda * lambda * m[0] + T::of(2.0) * c * c * s4)
        }
    }
}

/// H(Z) = −Σ v_k ln v_k with a certified bound on the omitted tail.
pub fn poisson_entropy<T: Real>(lambda: T, trunc: &TruncationPolicy) -> (T, T) {
    if lambda == T::zero() {
        return (T::zero(), T::zero());
    }
    let cap = trunc.cap_for(lambda.to_f64());
    let terms: Vec<T> = (0..=cap)
        .map(|k| {
            let lv = poisson_log_pmf(lambda, k as u64);
            -lv.exp() * lv
        })
        .collect();
    let h = compensated_sum(terms);
    let v_last = poisson_log_pmf(lambda, cap as u64).exp();
    (h, entropy_tail_bound(lambda, cap, v_last, 1))
}

/// H₂(Z) = (Σ v_k (ln v_k)²)^{1/2} with a certified tail budget
/// (already converted to the H₂ scale).
pub fn poisson_second_log_moment<T: Real>(lambda: T, trunc: &TruncationPolicy) -> (T, T) {
    if lambda == T::zero() {
        return (T::zero(), T::zero());
    }
    let cap = trunc.cap_for(lambda.to_f64());
    let terms: Vec<T> = (0..=cap)
        .map(|k| {
            let lv = poisson_log_pmf(lambda, k as u64);
            lv.exp() * lv * lv
        })
        .collect();
    let s = compensated_sum(terms);
    let v_last = poisson_log_pmf(lambda, cap as u64).exp();
    let raw_tail = entropy_tail_bound(lambda, cap, v_last, 2);
    let h2 = s.sqrt();
    let budget = if h2 > T::zero() {
        raw_tail / (T::of(2.0) * h2)
    } else {
        raw_tail.sqrt()
    };
    (h2, budget)
}
