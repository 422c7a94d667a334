//! Informational distances between a Poisson-binomial law W and a reference
//! law Z on the nonnegative integers (in practice the matched Poisson law):
//! total variation, relative entropy, χ², the Rényi/Tsallis hierarchy, the
//! Vajda–Pearson distances, Shannon entropies and the entropy gap.
//!
//! Numerical posture: W's mass is renormalized by its compensated total
//! (removing the O(n·ε) convolution drift), Poisson tails are handled
//! analytically with certified budgets, and the Tsallis sums are assembled
//! from `v·expm1(α·Δ)` terms so that near-identical laws lose nothing to
//! cancellation.

use serde::Serialize;

use crate::bernoulli::BernoulliVector;
use crate::error::{Error, Result};
use crate::pmf::{dp_pmf, LogPmf};
use crate::poisson::{poisson_entropy, poisson_pmf, poisson_second_log_moment};
use crate::policy::{PrecisionMode, PrecisionPolicy, TruncationPolicy};
use crate::scalar::{compensated_sum, DoubleDouble, Real};

/// Automatic escalation triggers: χ² above this, or any log-scale exponent
/// beyond ±[`ESCALATE_EXPONENT`], re-runs the report in extended precision.
pub const ESCALATE_CHI2: f64 = 1e12;
pub const ESCALATE_EXPONENT: f64 = 600.0;

/// W's log-masses shifted by ln(total mass); the convolution's mass drift
/// otherwise leaks straight into small divergences.
struct Normalized<T> {
    log_mass: Vec<T>,
}

fn normalize<T: Real>(w: &LogPmf<T>) -> Normalized<T> {
    let total = w.total_mass() + w.tail_bound();
    let ln_norm = total.ln();
    Normalized {
        log_mass: (0..w.len()).map(|k| w.log_mass(k) - ln_norm).collect(),
    }
}

/// Reference mass at k, with the analytic Poisson extension past the stored
/// range.
#[inline]
fn ref_log<T: Real>(v: &LogPmf<T>, k: usize) -> T {
    v.log_mass_at(k)
}

/// d(W,Z) = Σ|w_k − v_k|, the index range covering both supports and the
/// certified Poisson tail added as a bound-respecting term.
pub fn total_variation<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>) -> T {
    let nw = normalize(w);
    let upper = w.len().max(v.len());
    let terms: Vec<T> = (0..upper)
        .map(|k| {
            let wk = exp_or_zero(nw.log_mass.get(k).copied());
            let vk = exp_or_zero(Some(ref_log(v, k)));
            (wk - vk).abs()
        })
        .collect();
    compensated_sum(terms) + v.tail_bound()
}

#[inline]
fn exp_or_zero<T: Real>(lm: Option<T>) -> T {
    match lm {
        Some(x) if x != T::neg_infinity() => x.exp(),
        _ => T::zero(),
    }
}

/// D(W‖Z) = Σ w_k ln(w_k/v_k) with 0·ln 0 = 0; infinite when W charges a
/// point Z does not.
pub fn relative_entropy<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>) -> Result<T> {
    let nw = normalize(w);
    let mut terms = Vec::with_capacity(w.len());
    for (k, &lw) in nw.log_mass.iter().enumerate() {
        if lw == T::neg_infinity() {
            continue;
        }
        let lv = ref_log(v, k);
        if lv == T::neg_infinity() {
            return Err(Error::InfiniteDivergence {
                k,
                mass: lw.exp().to_f64(),
            });
        }
        terms.push(lw.exp() * (lw - lv));
    }
    Ok(compensated_sum(terms))
}

/// χ²(W,Z) = Σ (w_k − v_k)²/v_k, the Poisson mass beyond W's support
/// entering exactly as itself.
pub fn chi_squared<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>) -> Result<T> {
    let nw = normalize(w);
    let upper = w.len().max(v.len());
    let mut terms = Vec::with_capacity(upper);
    for k in 0..upper {
        let lw = nw.log_mass.get(k).copied().unwrap_or_else(T::neg_infinity);
        let lv = ref_log(v, k);
        if lv == T::neg_infinity() {
            if lw == T::neg_infinity() {
                continue;
            }
            return Err(Error::InfiniteDivergence {
                k,
                mass: lw.exp().to_f64(),
            });
        }
        let vk = lv.exp();
        let wk = exp_or_zero(Some(lw));
        if vk == T::zero() {
            // v underflowed while its log stayed finite. A dead w makes the
            // term vanish; a live w is evaluated in log scale (and is then
            // genuinely astronomical).
            if wk > T::zero() {
                terms.push((lw + lw - lv).exp());
            }
            continue;
        }
        let diff = wk - vk;
        terms.push(diff * diff / vk);
    }
    Ok(compensated_sum(terms) + v.tail_bound())
}

/// Internals of the power sum S(α) = Σ w_k^α v_k^{1−α}, exposed in the
/// cancellation-free form S − 1.
pub struct PowerSum<T> {
    /// S − 1, assembled as Σ v·expm1(αΔ) − P{Z ≥ |supp W|}.
    pub s_minus_one: T,
    /// Largest |log-scale| exponent met; drives precision escalation.
    pub max_abs_exponent: f64,
    /// Set when a term overflowed; `s_minus_one` is then +∞.
    pub overflowed: bool,
}

fn power_sum<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>, alpha: T) -> Result<PowerSum<T>> {
    let nw = normalize(w);
    let mut terms = Vec::with_capacity(w.len());
    let mut max_abs_exponent = 0.0f64;
    let mut overflowed = false;
    for (k, &lw) in nw.log_mass.iter().enumerate() {
        let lv = ref_log(v, k);
        if lw == T::neg_infinity() {
            // Interior hole of W: the term w^α v^{1−α} is 0, which in the
            // S − 1 decomposition contributes −v_k.
            if lv != T::neg_infinity() {
                terms.push(-lv.exp());
            }
            continue;
        }
        if lv == T::neg_infinity() {
            if alpha > T::one() {
                return Err(Error::InfiniteDivergence {
                    k,
                    mass: lw.exp().to_f64(),
                });
            }
            continue;
        }
        let delta = lw - lv;
        let exponent = (alpha * delta + lv).to_f64().abs();
        max_abs_exponent = max_abs_exponent.max(exponent);
        // When the e^{αΔ} factor dwarfs everything (or v underflowed with a
        // live w), fall back to the direct log-scale term; the −v correction
        // is immaterial there.
        let ad = alpha * delta;
        let term = if ad.to_f64() > 700.0 {
            (ad + lv).exp()
        } else {
            lv.exp() * ad.exp_m1()
        };
        if !term.is_finite() {
            overflowed = true;
        }
        terms.push(term);
    }
    // Mass of Z beyond W's support: exact stored terms plus the certified
    // tail bound.
    let beyond: T = if v.len() > w.len() {
        compensated_sum((w.len()..v.len()).map(|k| exp_or_zero(Some(v.log_mass(k)))))
            + v.tail_bound()
    } else {
        v.tail_bound()
    };
    Ok(PowerSum {
        s_minus_one: compensated_sum(terms) - beyond,
        max_abs_exponent,
        overflowed,
    })
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // negation rejects NaN orders
fn validate_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "Rényi/Tsallis order must be positive, got {alpha}"
        )));
    }
    if alpha == T::one() {
        return Err(Error::InvalidConfig(
            "order α = 1 is the relative entropy; call relative_entropy".into(),
        ));
    }
    Ok(())
}

/// D_α(W‖Z) = ln S(α) / (α−1).
pub fn renyi<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>, alpha: T) -> Result<T> {
    validate_alpha(alpha)?;
    let ps = power_sum(w, v, alpha)?;
    if ps.overflowed {
        return Ok(T::infinity());
    }
    Ok(ps.s_minus_one.ln_1p() / (alpha - T::one()))
}

/// T_α(W‖Z) = (S(α) − 1)/(α−1).
pub fn tsallis<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>, alpha: T) -> Result<T> {
    validate_alpha(alpha)?;
    let ps = power_sum(w, v, alpha)?;
    Ok(ps.s_minus_one / (alpha - T::one()))
}

/// Independent log-sum-exp route for ln S(α); used to cross-check the
/// structured route at scales where both are exact.
pub fn renyi_log_sum_exp<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>, alpha: T) -> Result<T> {
    validate_alpha(alpha)?;
    let nw = normalize(w);
    let mut exponents = Vec::with_capacity(w.len());
    for (k, &lw) in nw.log_mass.iter().enumerate() {
        if lw == T::neg_infinity() {
            continue;
        }
        let lv = ref_log(v, k);
        if lv == T::neg_infinity() {
            if alpha > T::one() {
                return Err(Error::InfiniteDivergence {
                    k,
                    mass: lw.exp().to_f64(),
                });
            }
            continue;
        }
        exponents.push(alpha * (lw - lv) + lv);
    }
    let m = exponents
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| a.max(b));
    if m == T::neg_infinity() {
        return Ok(T::neg_infinity());
    }
    let shifted = compensated_sum(exponents.iter().map(|&s| (s - m).exp()));
    Ok((m + shifted.ln()) / (alpha - T::one()))
}

/// χ_α(W,Z) = Σ |w_k − v_k|^α / v_k^{α−1} for α ≥ 1; the Poisson mass
/// beyond W's support again enters as itself.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // negation rejects NaN orders
pub fn vajda_pearson<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>, alpha: T) -> Result<T> {
    if !(alpha >= T::one()) {
        return Err(Error::InvalidConfig(format!(
            "Vajda–Pearson order must be >= 1, got {alpha}"
        )));
    }
    let nw = normalize(w);
    let mut terms = Vec::with_capacity(w.len());
    for (k, &lw) in nw.log_mass.iter().enumerate() {
        let lv = ref_log(v, k);
        if lv == T::neg_infinity() {
            if lw != T::neg_infinity() {
                return Err(Error::InfiniteDivergence {
                    k,
                    mass: lw.exp().to_f64(),
                });
            }
            continue;
        }
        let diff = (exp_or_zero(Some(lw)) - lv.exp()).abs();
        if diff == T::zero() {
            continue;
        }
        terms.push((alpha * diff.ln() - (alpha - T::one()) * lv).exp());
    }
    let beyond: T = if v.len() > w.len() {
        compensated_sum((w.len()..v.len()).map(|k| exp_or_zero(Some(v.log_mass(k)))))
            + v.tail_bound()
    } else {
        v.tail_bound()
    };
    Ok(compensated_sum(terms) + beyond)
}

/// −Σ p_k ln p_k over the stored support (exact for finite laws; use the
/// dedicated Poisson routines when a certified tail is needed).
pub fn shannon_entropy<T: Real>(pmf: &LogPmf<T>) -> T {
    let n = normalize(pmf);
    compensated_sum(n.log_mass.iter().filter_map(|&lm| {
        if lm == T::neg_infinity() {
            None
        } else {
            Some(-lm.exp() * lm)
        }
    }))
}

/// (Σ p_k (ln p_k)²)^{1/2} over the stored support.
pub fn second_log_moment<T: Real>(pmf: &LogPmf<T>) -> T {
    let n = normalize(pmf);
    compensated_sum(n.log_mass.iter().filter_map(|&lm| {
        if lm == T::neg_infinity() {
            None
        } else {
            Some(lm.exp() * lm * lm)
        }
    }))
    .sqrt()
}

/// Decomposition diagnostics for the relative entropy:
/// the deficient part −Σ_{w<v} w ln(w/v) (always ≤ 1) and the quadratic
/// minorant ½Σ(w−v)²/max(w,v) (always ≤ D).
pub fn kl_decomposition<T: Real>(w: &LogPmf<T>, v: &LogPmf<T>) -> Result<(T, T)> {
    let nw = normalize(w);
    let upper = w.len().max(v.len());
    let mut neg_terms = Vec::new();
    let mut quad_terms = Vec::new();
    for k in 0..upper {
        let lw = nw.log_mass.get(k).copied().unwrap_or_else(T::neg_infinity);
        let lv = ref_log(v, k);
        // Ordering decided on the log scale: the linear masses may have
        // underflowed even where the logs are perfectly finite.
        let wk = exp_or_zero(Some(lw));
        let vk = exp_or_zero(Some(lv));
        if wk > T::zero() && lw < lv {
            neg_terms.push(-wk * (lw - lv));
        }
        let m = wk.max(vk);
        if m > T::zero() {
            let d = wk - vk;
            quad_terms.push(d * d / m);
        }
    }
    let quad = (compensated_sum(quad_terms) + v.tail_bound()) * T::of(0.5);
    Ok((compensated_sum(neg_terms), quad))
}

/// All distances between one Poisson-binomial law and its matched Poisson
/// law, reported in f64 with the precision mode that produced them.
#[derive(Clone, Debug, Serialize)]
pub struct DivergenceReport {
    pub tv: f64,
    pub kl: f64,
    pub chi2: f64,
    /// (α, D_α) over the requested grid, α = 1 holding the relative entropy.
    pub renyi: Vec<(f64, f64)>,
    /// (α, T_α) over the requested grid, α = 1 holding the relative entropy.
    pub tsallis: Vec<(f64, f64)>,
    /// (α, χ_α) over the requested grid restricted to α ≥ 1.
    pub vajda: Vec<(f64, f64)>,
    pub h_w: f64,
    pub h_z: f64,
    pub h2_z: f64,
    /// H(W‖Z) = H(Z) − H(W).
    pub entropy_diff: f64,
    pub kl_negative_part: f64,
    pub kl_quadratic_lower: f64,
    pub truncation_tail_budget: f64,
    pub precision: PrecisionMode,
    /// True when the binary64 pass tripped an escalation trigger and the
    /// report was recomputed in extended precision.
    pub escalated: bool,
}

impl DivergenceReport {
    pub fn zero(alphas: &[f64], precision: PrecisionMode) -> Self {
        let grid = |a: &[f64]| a.iter().map(|&x| (x, 0.0)).collect::<Vec<_>>();
        Self {
            tv: 0.0,
            kl: 0.0,
            chi2: 0.0,
            renyi: grid(alphas),
            tsallis: grid(alphas),
            vajda: alphas
                .iter()
                .filter(|&&a| a >= 1.0)
                .map(|&a| (a, 0.0))
                .collect(),
            h_w: 0.0,
            h_z: 0.0,
            h2_z: 0.0,
            entropy_diff: 0.0,
            kl_negative_part: 0.0,
            kl_quadratic_lower: 0.0,
            truncation_tail_budget: 0.0,
            precision,
            escalated: false,
        }
    }

    pub fn renyi_at(&self, alpha: f64) -> Option<f64> {
        self.renyi
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|(_, v)| *v)
    }

    pub fn tsallis_at(&self, alpha: f64) -> Option<f64> {
        self.tsallis
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|(_, v)| *v)
    }

    pub fn vajda_at(&self, alpha: f64) -> Option<f64> {
        self.vajda
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|(_, v)| *v)
    }
}

fn build_report<T: Real>(
    bv: &BernoulliVector<T>,
    alphas: &[f64],
    trunc: &TruncationPolicy,
    precision: PrecisionMode,
) -> Result<(DivergenceReport, bool)> {
    let w = dp_pmf(bv);
    let lambda = bv.lambda();
    let v = poisson_pmf(lambda, w.len(), trunc)?;

    let tv = total_variation(&w, &v).to_f64();
    let kl = relative_entropy(&w, &v)?.to_f64();
    let chi2 = chi_squared(&w, &v)?.to_f64();
    let (neg_part, quad_lower) = kl_decomposition(&w, &v)?;

    let mut max_exp = 0.0f64;
    let mut renyi_grid = Vec::with_capacity(alphas.len());
    let mut tsallis_grid = Vec::with_capacity(alphas.len());
    let mut vajda_grid = Vec::new();
    for &a in alphas {
        if a == 1.0 {
            renyi_grid.push((1.0, kl));
            tsallis_grid.push((1.0, kl));
        } else {
            let alpha = T::of(a);
            let ps = power_sum(&w, &v, alpha)?;
            max_exp = max_exp.max(ps.max_abs_exponent);
            let t = if ps.overflowed {
                f64::INFINITY
            } else {
                (ps.s_minus_one / (alpha - T::one())).to_f64()
            };
            let d = if ps.overflowed {
                f64::INFINITY
            } else {
                (ps.s_minus_one.ln_1p() / (alpha - T::one())).to_f64()
            };
            renyi_grid.push((a, d));
            tsallis_grid.push((a, t));
        }
        if a >= 1.0 {
            vajda_grid.push((a, vajda_pearson(&w, &v, T::of(a))?.to_f64()));
        }
    }

    let h_w = shannon_entropy(&w).to_f64();
    let (h_z, h_tail) = poisson_entropy(lambda, trunc);
    let (h2_z, h2_tail) = poisson_second_log_moment(lambda, trunc);
    let budget = v.tail_bound().to_f64() + h_tail.to_f64() + h2_tail.to_f64();

    let report = DivergenceReport {
        tv,
        kl,
        chi2,
        renyi: renyi_grid,
        tsallis: tsallis_grid,
        vajda: vajda_grid,
        h_w,
        h_z: h_z.to_f64(),
        h2_z: h2_z.to_f64(),
        entropy_diff: h_z.to_f64() - h_w,
        kl_negative_part: neg_part.to_f64(),
        kl_quadratic_lower: quad_lower.to_f64(),
        truncation_tail_budget: budget,
        precision,
        escalated: false,
    };
    let fishy = !report.tv.is_finite()
        || !report.kl.is_finite()
        || !report.chi2.is_finite()
        || report.chi2 > ESCALATE_CHI2
        || max_exp > ESCALATE_EXPONENT
        || report.tsallis.iter().any(|(_, t)| !t.is_finite());
    Ok((report, fishy))
}

/// Full divergence report with automatic extended-precision escalation.
pub fn divergence_report(
    bv: &BernoulliVector<f64>,
    alphas: &[f64],
    policy: &PrecisionPolicy,
    trunc: &TruncationPolicy,
) -> Result<DivergenceReport> {
    policy.validate()?;
    if bv.lambda() == 0.0 {
        // Both laws are the point mass at 0; every distance is 0.
        return Ok(DivergenceReport::zero(alphas, policy.mode));
    }
    match policy.mode {
        PrecisionMode::Extended => {
            let ext: BernoulliVector<DoubleDouble> = bv.convert();
            let (report, _) = build_report(&ext, alphas, trunc, PrecisionMode::Extended)?;
            Ok(report)
        }
        PrecisionMode::Binary64 => {
            let (report, fishy) = build_report(bv, alphas, trunc, PrecisionMode::Binary64)?;
            if !fishy {
                return Ok(report);
            }
            let ext: BernoulliVector<DoubleDouble> = bv.convert();
            let (mut rerun, still_fishy) =
                build_report(&ext, alphas, trunc, PrecisionMode::Extended)?;
            rerun.escalated = true;
            if still_fishy && !rerun.chi2.is_finite() {
                return Err(Error::EscalationFailure);
            }
            Ok(rerun)
        }
    }
}
