//! Scalar abstraction: every numerical routine in this crate is generic over
//! [`Real`], instantiated with `f64` (binary64 mode) or [`DoubleDouble`]
//! (extended mode, ~31 significant decimal digits).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

pub mod dd;

pub use dd::DoubleDouble;

/// Floating-point scalar with the transcendental operations the library needs.
///
/// `of` must embed an `f64` exactly, so tolerances and input probabilities
/// mean the same thing in both precisions.
pub trait Real:
    Copy
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Send
    + Sync
    + 'static
{
    /// Significant decimal digits carried by this type.
    const DIGITS: u32;

    fn of(x: f64) -> Self;
    fn of_usize(n: usize) -> Self;
    fn to_f64(self) -> f64;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, y: Self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn floor(self) -> Self;
    fn round(self) -> Self;

    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    fn is_finite(self) -> bool;
    fn is_nan(self) -> bool;

    fn infinity() -> Self;
    fn neg_infinity() -> Self;
    fn epsilon() -> Self;
    fn pi() -> Self;
    /// 2π.
    fn tau() -> Self;
    /// ln(2π).
    fn ln_tau() -> Self;

    fn recip(self) -> Self {
        Self::one() / self
    }

    /// Natural log of the Gamma function, for arguments > 0.
    fn ln_gamma(self) -> Self {
        ln_gamma_generic(self)
    }
}

impl Real for f64 {
    const DIGITS: u32 = 15;

    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn of_usize(n: usize) -> Self {
        n as f64
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn powf(self, y: Self) -> Self {
        f64::powf(self, y)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn floor(self) -> Self {
        f64::floor(self)
    }
    #[inline]
    fn round(self) -> Self {
        f64::round(self)
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
    #[inline]
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn is_nan(self) -> bool {
        f64::is_nan(self)
    }
    #[inline]
    fn infinity() -> Self {
        f64::INFINITY
    }
    #[inline]
    fn neg_infinity() -> Self {
        f64::NEG_INFINITY
    }
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn tau() -> Self {
        std::f64::consts::TAU
    }
    #[inline]
    fn ln_tau() -> Self {
        1.837_877_066_409_345_6
    }
}

/// Neumaier-compensated sum in a fixed (caller-supplied) order.
///
/// The order is part of the determinism contract: callers pass slices that
/// are already sorted the way they want them summed.
pub fn compensated_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Bernoulli-number coefficients B_{2i} / ((2i)(2i-1)) of the Stirling series,
/// as exact integer ratios (numerator, denominator).
const STIRLING_COEFF: [(f64, f64); 12] = [
    (1.0, 12.0),              // B2/(2*1)
    (-1.0, 360.0),            // B4/(4*3)
    (1.0, 1260.0),            // B6/(6*5)
    (-1.0, 1680.0),           // B8/(8*7)
    (1.0, 1188.0),            // B10/(10*9)
    (-691.0, 360360.0),       // B12/(12*11)
    (1.0, 156.0),             // B14/(14*13)
    (-3617.0, 122400.0),      // B16/(16*15)
    (43867.0, 244188.0),      // B18/(18*17)
    (-174611.0, 125400.0),    // B20/(20*19)
    (77683.0, 5796.0),        // B22/(22*21)
    (-236364091.0, 1506960.0) // B24/(24*23)
];

/// ln Γ(x) for x > 0 via the Stirling series, lifting small arguments with
/// the recurrence Γ(x) = Γ(x+1)/x. Twelve series terms keep the truncation
/// error below the double-double target for x >= 32.
pub fn ln_gamma_generic<T: Real>(x: T) -> T {
    assert!(
        x > T::zero(),
        "ln_gamma requires a positive argument, got {x}"
    );
    let threshold = T::of(32.0);
    let mut shift = T::zero();
    let mut z = x;
    while z < threshold {
        shift += z.ln();
        z += T::one();
    }
    let half = T::of(0.5);
    let ln_z = z.ln();
    let mut acc = (z - half) * ln_z - z + half * T::ln_tau();
    let z2 = z * z;
    let mut zp = z;
    let eps = T::epsilon();
    for &(num, den) in STIRLING_COEFF.iter() {
        let term = T::of(num) / (T::of(den) * zp);
        acc += term;
        if term.abs() <= acc.abs() * eps {
            break;
        }
        zp *= z2;
    }
    acc - shift
}
