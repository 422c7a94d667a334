//! Circle-contour evaluation of P{W = k} at the saddle radius:
//! P = R_k(r)·I_k(r), with R_k carried in log space and the oscillatory
//! integral I_k computed by periodic trapezoidal quadrature over normalized
//! factors (each has modulus ≤ 1, so the product neither overflows nor
//! loses scale).

use crate::bernoulli::BernoulliVector;
use crate::cx::Cx;
use crate::error::{Error, Result};
use crate::saddle::{solve_saddle, SaddleSolution};
use crate::scalar::Real;

/// Successive node doublings must agree to this relative tolerance to stop
/// early; exceeding [`QUAD_FAIL`] after the doubling budget is an error.
pub const QUAD_CONVERGED: f64 = 1e-12;
pub const QUAD_FAIL: f64 = 1e-9;

const MAX_DOUBLINGS: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct ContourEstimate<T> {
    /// Central integral over |θ| ≤ π/2 (a real number).
    pub i_k1: T,
    /// Quadrature bound for |outer integral| over π/2 < |θ| < π.
    pub i_k2_abs_bound: T,
    /// Full oscillatory integral I_k = I_k1 + I_k2.
    pub i_k_total: T,
    /// Quadrature resolution that produced the accepted value.
    pub node_count: usize,
    /// R_k(r)·I_k(r), clamped into [0, 1] against negative round-off.
    pub probability: T,
}

/// Default node count: max(256, 8·⌈√n⌉), kept a multiple of 4 so the
/// central/outer split never straddles a node.
pub fn default_node_count(n: usize) -> usize {
    let sqrt_n = (n as f64).sqrt().ceil() as usize;
    (8 * sqrt_n).max(256).next_multiple_of(4)
}

/// One quadrature pass: returns (I_k total, central part, outer |·| sum).
///
/// The interior probabilities arrive sorted, so equal factors are grouped
/// and raised by binary powering: an equal-probability instance costs
/// O(log n) per node instead of O(n).
fn quadrature<T: Real>(
    interior: &[T],
    r: T,
    k_reduced: usize,
    nodes: usize,
) -> (T, T, T) {
    // Midpoint grid on (0, π); conjugate symmetry doubles the real part.
    let half = nodes / 2;
    let step = T::tau() / T::of_usize(nodes);
    let mut groups: Vec<(T, T, T, u64)> = Vec::new();
    for &p in interior {
        match groups.last_mut() {
            Some(g) if g.0 == p => g.3 += 1,
            _ => groups.push((p, T::one() - p, (T::one() - p + p * r).recip(), 1)),
        }
    }
    let kf = T::of_usize(k_reduced);
    let mut total = T::zero();
    let mut central = T::zero();
    let mut outer_abs = T::zero();
    let quarter = T::pi() * T::of(0.5);
    for j in 0..half {
        let theta = step * (T::of_usize(j) + T::of(0.5));
        let (s, c) = theta.sin_cos();
        let mut prod = Cx::one();
        for &(p, q, inv, count) in &groups {
            let pr = p * r;
            let factor = Cx::new((q + pr * c) * inv, pr * s * inv);
            prod = prod
                * if count == 1 {
                    factor
                } else {
                    factor.powu(count)
                };
        }
        let phase = Cx::cis(-(kf * theta));
        let val = prod * phase;
        total += val.re;
        if theta <= quarter {
            central += val.re;
        } else {
            outer_abs += val.abs();
        }
    }
    let scale = (T::one() + T::one()) / T::of_usize(nodes);
    (total * scale, central * scale, outer_abs * scale)
}

/// Contour pmf value at k.
///
/// End points of the support are exact products and are returned without
/// quadrature: P{W = ones} on the reduced vector needs r → 0 and
/// P{W = n_effective} has no saddle at all. Indices outside the support
/// carry exactly zero mass.
pub fn contour_pmf<T: Real>(
    bv: &BernoulliVector<T>,
    k: usize,
    node_count: Option<usize>,
) -> Result<ContourEstimate<T>> {
    if bv.is_degenerate() {
        return Err(Error::DegenerateInstance);
    }
    let ones = bv.ones();
    let n_eff = bv.n_effective();
    let interior = bv.interior();
    if k < ones || k > bv.n() {
        return Ok(exact_estimate(T::zero()));
    }
    if k == ones || k == n_eff {
        // Π qₗ (all interior off) or Π pₗ (all interior on).
        let log_p = crate::scalar::compensated_sum(interior.iter().map(|&p| {
            if k == ones {
                (T::one() - p).ln()
            } else {
                p.ln()
            }
        }));
        return Ok(exact_estimate(log_p.exp()));
    }
    if k > n_eff {
        return Ok(exact_estimate(T::zero()));
    }

    let sol: SaddleSolution<T> = solve_saddle(bv, k)?;
    let k_reduced = k - ones;
    let mut nodes = node_count
        .unwrap_or_else(|| default_node_count(interior.len()))
        .max(8)
        .next_multiple_of(4);
    let mut prev: Option<(T, (T, T, T), usize)> = None;
    for _ in 0..=MAX_DOUBLINGS {
        let (total, central, outer) = quadrature(interior, sol.r, k_reduced, nodes);
        let prob = if total > T::zero() {
            let p = (sol.log_r_k + total.ln()).exp();
            p.min(T::one())
        } else {
            T::zero()
        };
        if let Some((last_prob, _, _)) = prev {
            let scale = prob.abs().max(T::of(1e-300));
            let rel = (prob - last_prob).abs() / scale;
            if rel <= T::of(QUAD_CONVERGED) {
                return Ok(ContourEstimate {
                    i_k1: central,
                    i_k2_abs_bound: outer,
                    i_k_total: total,
                    node_count: nodes,
                    probability: prob,
                });
            }
        }
        prev = Some((prob, (total, central, outer), nodes));
        nodes *= 2;
    }
    let (prob, (total, central, outer), last_nodes) = prev.expect("at least one pass");
    // The loop ran out of doublings; accept only if the final change was
    // within the failure threshold.
    let (total2, central2, outer2) = quadrature(interior, sol.r, k_reduced, last_nodes * 2);
    let prob2 = if total2 > T::zero() {
        (sol.log_r_k + total2.ln()).exp().min(T::one())
    } else {
        T::zero()
    };
    let rel = (prob2 - prob).abs() / prob2.abs().max(T::of(1e-300));
    if rel <= T::of(QUAD_FAIL) {
        let _ = (total, central, outer);
        Ok(ContourEstimate {
            i_k1: central2,
            i_k2_abs_bound: outer2,
            i_k_total: total2,
            node_count: last_nodes * 2,
            probability: prob2,
        })
    } else {
        Err(Error::QuadratureNonConvergence {
            nodes: last_nodes * 2,
            rel_change: rel.to_f64(),
            limit: QUAD_FAIL,
        })
    }
}

fn exact_estimate<T: Real>(p: T) -> ContourEstimate<T> {
    ContourEstimate {
        i_k1: T::one(),
        i_k2_abs_bound: T::zero(),
        i_k_total: T::one(),
        node_count: 0,
        probability: p,
    }
}
