//! Saddle radius machinery: the monotone concave map
//! F(r) = Σ pₗ r/(qₗ + pₗ r) and the unique radius r(k) with F(r) = k,
//! solved by bracketed Newton; plus the certified bracket, its quantitative
//! refinement, and the explicit modulus/tail lower bounds built on it.

use crate::bernoulli::BernoulliVector;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Real};

/// |F(r) − k| tolerance: 1e-12·max(1, k). The contour identity
/// P{W=k} = R_k(r)·I_k(r) holds at any radius, so solver accuracy only
/// affects conditioning, never correctness.
pub const SADDLE_TOL: f64 = 1e-12;

const MAX_NEWTON_ITER: usize = 256;

#[derive(Clone, Copy, Debug)]
pub struct SaddleSolution<T> {
    pub k: usize,
    /// Saddle radius, the unique solution of F(r) = k.
    pub r: T,
    pub f_at_r: T,
    /// F′(r) = Σ pₗ qₗ/(qₗ + pₗ r)².
    pub f_prime_at_r: T,
    /// Interval certified to contain r.
    pub bracket: (T, T),
    /// R_k(r) = r^{−k} Π (qₗ + pₗ r).
    pub r_k_value: T,
    /// ln R_k(r); stays representable deep in the tails.
    pub log_r_k: T,
}

/// F and F′ over the interior entries, shifted by the count of exact ones:
/// entries with p = 1 contribute the constant 1 to F and 0 to F′.
fn f_and_fprime<T: Real>(interior: &[T], ones: usize, r: T) -> (T, T) {
    let mut f = T::of_usize(ones);
    let mut fp = T::zero();
    for &p in interior {
        let q = T::one() - p;
        let d = q + p * r;
        f += p * r / d;
        fp += p * q / (d * d);
    }
    (f, fp)
}

/// ln R_k(r) over the full vector; exact ones fold into the power of r.
fn log_r_k<T: Real>(interior: &[T], ones: usize, k: usize, r: T) -> T {
    let sum_logs = compensated_sum(
        interior
            .iter()
            .map(|&p| (T::one() - p + p * r).ln()),
    );
    debug_assert!(k >= ones);
    let exponent = k - ones;
    if exponent == 0 {
        sum_logs
    } else {
        sum_logs - T::of_usize(exponent) * r.ln()
    }
}

/// Solve F(r) = k.
///
/// Admissible targets are ones ≤ k < n_effective: below that W has zero mass
/// reachable only at r = 0 with k > 0, above it F never reaches k. The
/// instance must have at least one pⱼ strictly inside (0, 1).
pub fn solve_saddle<T: Real>(bv: &BernoulliVector<T>, k: usize) -> Result<SaddleSolution<T>> {
    if bv.is_degenerate() {
        return Err(Error::DegenerateInstance);
    }
    let ones = bv.ones();
    let n_eff = bv.n_effective();
    if k < ones || k >= n_eff {
        return Err(Error::NoSaddle {
            k,
            min_k: ones,
            max_k: n_eff.saturating_sub(1),
        });
    }
    let interior = bv.interior();
    let target = T::of_usize(k - ones);
    let lambda = bv.lambda();
    let lambda2 = bv.lambda2();
    let k_full = T::of_usize(k);

    // Certified bracket. Lower end from the tangent bound
    // r >= 1 + (k − λ)/(λ − λ₂); ones shift k and λ together, zeros shift
    // neither, so the full-vector form applies directly.
    let mut lo = T::zero().max(T::one() + (k_full - lambda) / (lambda - lambda2));
    let mut hi = if k_full <= lambda {
        T::one()
    } else {
        // Expand geometrically until F(hi) >= k; F -> n_effective < inf
        // guarantees termination for admissible k.
        let mut hi = (T::one() + T::one()).max(lo + lo);
        loop {
            let (f, _) = f_and_fprime(interior, 0, hi);
            if f >= target {
                break hi;
            }
            hi = hi + hi;
        }
    };
    let reported_bracket = (lo, hi);

    let tol = T::of(SADDLE_TOL) * T::one().max(target);
    // Newton with bisection projection; F is increasing and concave, so the
    // bracket shrinks monotonically.
    let mut r = {
        let guess = if lambda > T::zero() { k_full / lambda } else { T::one() };
        guess.max(lo).min(hi)
    };
    if r <= lo || r >= hi {
        r = (lo + hi) * T::of(0.5);
    }
    let mut result = None;
    for _ in 0..MAX_NEWTON_ITER {
        let (f, fp) = f_and_fprime(interior, 0, r);
        let resid = f - target;
        if resid.abs() <= tol {
            result = Some((r, f, fp));
            break;
        }
        if resid > T::zero() {
            hi = hi.min(r);
        } else {
            lo = lo.max(r);
        }
        let step = resid / fp;
        let mut next = r - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) * T::of(0.5);
        }
        r = next;
    }
    let (r, f_at_r, f_prime_at_r) = result.ok_or_else(|| Error::InvalidConfig(format!(
        "saddle iteration did not converge for k = {k}"
    )))?;

    let lrk = log_r_k(interior, 0, k - ones, r);
    Ok(SaddleSolution {
        k,
        r,
        f_at_r: f_at_r + T::of_usize(ones),
        f_prime_at_r,
        bracket: reported_bracket,
        r_k_value: lrk.exp(),
        log_r_k: lrk,
    })
}

/// Quantitative bracket refinement, applicable when
/// |k − λ| ≤ (λ − λ₂)/6: certifies 5/6 ≤ r ≤ 6/5 and back-solves the
/// expansion coefficients
///   r = 1 + (6/5)²·b₁·(k−λ)/(λ−λ₂)
///   r = 1 + (k−λ)/(λ−λ₂) + (6/5)⁹·b₂·((λ₂−λ₃)/(λ−λ₂))·((k−λ)/(λ−λ₂))²,
/// which must land in [0, 1].
#[derive(Clone, Copy, Debug)]
pub struct BracketRefinement<T> {
    pub applicable: bool,
    pub r: T,
    pub b1: T,
    pub b2: T,
    pub in_range: bool,
}

pub fn saddle_bracket_refinement<T: Real>(
    bv: &BernoulliVector<T>,
    k: usize,
) -> Result<BracketRefinement<T>> {
    let lambda = bv.lambda();
    let lambda2 = bv.lambda2();
    let lambda3 = bv.lambda3();
    let spread = lambda - lambda2;
    let k_f = T::of_usize(k);
    let dev = k_f - lambda;
    if dev.abs() > spread / T::of(6.0) {
        return Ok(BracketRefinement {
            applicable: false,
            r: T::zero(),
            b1: T::zero(),
            b2: T::zero(),
            in_range: false,
        });
    }
    let sol = solve_saddle(bv, k)?;
    // Polish the radius to the precision floor: the back-solved coefficients
    // divide by (k−λ)², which amplifies solver tolerance when k sits close
    // to λ.
    let interior = bv.interior();
    let ones = bv.ones();
    let target = T::of_usize(k - ones);
    let mut r = sol.r;
    for _ in 0..3 {
        let (f, fp) = f_and_fprime(interior, 0, r);
        r -= (f - target) / fp;
    }
    let five_sixth = T::of(5.0) / T::of(6.0);
    let six_fifth = T::of(6.0) / T::of(5.0);
    let mut in_range = r >= five_sixth && r <= six_fifth;

    let b1 = if dev == T::zero() {
        T::zero()
    } else {
        (r - T::one()) * spread / (six_fifth * six_fifth * dev)
    };
    let b2 = if dev == T::zero() {
        T::zero()
    } else {
        let residual = r - T::one() - dev / spread;
        residual * spread * spread * spread
            / (six_fifth.powi(9) * (lambda2 - lambda3) * dev * dev)
    };
    // Slack covers the division by (k−λ)² above; the polished radius keeps
    // the propagated error orders of magnitude below this.
    let slack = T::of(1e-6);
    in_range &= b1 >= -slack && b1 <= T::one() + slack;
    in_range &= b2 >= -slack && b2 <= T::one() + slack;
    Ok(BracketRefinement {
        applicable: true,
        r,
        b1,
        b2,
        in_range,
    })
}

/// Applicability gate shared by the modulus and tail lower bounds:
/// 0 ≤ λ − k ≤ (λ − λ₂)/6.
fn central_left_gate<T: Real>(lambda: T, lambda2: T, k: usize) -> bool {
    let dev = lambda - T::of_usize(k);
    dev >= T::zero() && dev <= (lambda - lambda2) / T::of(6.0)
}

/// ln R_k(r(k)) ≥ −4(λ−k)²/(λ−λ₂) on the central-left window.
#[derive(Clone, Copy, Debug)]
pub struct ModulusLowerBound<T> {
    pub applicable: bool,
    pub log_r_k: T,
    pub lower_bound: T,
    pub holds: bool,
}

pub fn r_k_log_lower_bound<T: Real>(
    bv: &BernoulliVector<T>,
    k: usize,
) -> Result<ModulusLowerBound<T>> {
    let lambda = bv.lambda();
    let lambda2 = bv.lambda2();
    if !central_left_gate(lambda, lambda2, k) {
        return Ok(ModulusLowerBound {
            applicable: false,
            log_r_k: T::zero(),
            lower_bound: T::zero(),
            holds: false,
        });
    }
    let sol = solve_saddle(bv, k)?;
    let dev = lambda - T::of_usize(k);
    let bound = -T::of(4.0) * dev * dev / (lambda - lambda2);
    let slack = T::of(1e-12) * T::one().max(bound.abs());
    Ok(ModulusLowerBound {
        applicable: true,
        log_r_k: sol.log_r_k,
        lower_bound: bound,
        holds: sol.log_r_k >= bound - slack,
    })
}

/// Explicit pointwise tail lower bound
/// P{W=k} ≥ (1/(10√(λ−λ₂)))·exp(−4(λ−k)²/(λ−λ₂)),
/// applicable when λ−λ₂ ≥ 100 and 0 ≤ λ−k ≤ (λ−λ₂)/6.
pub fn tail_lower_bound<T: Real>(bv: &BernoulliVector<T>, k: usize) -> Option<T> {
    let lambda = bv.lambda();
    let lambda2 = bv.lambda2();
    let spread = lambda - lambda2;
    if spread < T::of(100.0) || !central_left_gate(lambda, lambda2, k) {
        return None;
    }
    let dev = lambda - T::of_usize(k);
    Some((-T::of(4.0) * dev * dev / spread).exp() / (T::of(10.0) * spread.sqrt()))
}

/// 1/(10√(λ−λ₂)), the central-integral lower bound under the same gate.
pub fn central_integral_lower_bound<T: Real>(bv: &BernoulliVector<T>, k: usize) -> Option<T> {
    let lambda = bv.lambda();
    let lambda2 = bv.lambda2();
    let spread = lambda - lambda2;
    if spread < T::of(100.0) || !central_left_gate(lambda, lambda2, k) {
        return None;
    }
    Some(T::one() / (T::of(10.0) * spread.sqrt()))
}
