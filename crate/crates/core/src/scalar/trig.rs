//! π and sin/cos at extended precision.
//!
//! Only what the root-of-unity determinant formula needs: arguments are plain
//! angles in `[0, 2π]`-ish range, results rounded to the requested width.
//! π comes from Machin's formula, sin/cos from Taylor series after quadrant
//! reduction; both use guard bits so the returned digits are trustworthy.

use super::real::Real;

/// atan(1/x) for integer x ≥ 2, by the alternating Taylor series.
fn atan_inv(x: u64, wbits: usize) -> Real {
    let u2 = Real::from_u64(x * x, wbits).recip();
    let threshold = Real::pow2(-(wbits as isize) - 8, 32);
    let mut power = Real::from_u64(x, wbits).recip();
    let mut sum = power.clone();
    let mut j = 1u64;
    loop {
        power = power * &u2;
        let contrib = &power / &Real::from_u64(2 * j + 1, wbits);
        if contrib < threshold {
            break;
        }
        if j % 2 == 1 {
            sum = sum - contrib;
        } else {
            sum = sum + contrib;
        }
        j += 1;
    }
    sum
}

/// π to `bits` of significand.
pub fn pi(bits: usize) -> Real {
    let wbits = bits + 32;
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let a = atan_inv(5, wbits) * Real::from_u64(16, wbits);
    let b = atan_inv(239, wbits) * Real::from_u64(4, wbits);
    (a - b).with_bits(bits)
}

/// Simultaneous sin/cos for θ ∈ [0, 4π], via quadrant reduction + Taylor.
pub fn sin_cos(theta: &Real, bits: usize) -> (Real, Real) {
    assert!(!theta.is_negative(), "sin_cos expects a non-negative angle");
    let wbits = bits + 64;
    let theta = theta.with_bits(wbits);
    let half_pi = pi(wbits) / Real::from_u64(2, wbits);
    let quadrant = (&theta / &half_pi).floor_bigint();
    let q: u64 = (&quadrant % 4u32)
        .try_into()
        .expect("quadrant index fits in u64");
    let r = theta - Real::from_rational(&quadrant.into(), wbits) * &half_pi;
    let (s, c) = sin_cos_taylor(&r, wbits);
    let (s, c) = match q {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    (s.with_bits(bits), c.with_bits(bits))
}

/// Taylor sums for r ∈ [0, π/2).
fn sin_cos_taylor(r: &Real, wbits: usize) -> (Real, Real) {
    let threshold = Real::pow2(-(wbits as isize) - 8, 32);
    let r2 = r * r;
    let mut sin = r.clone();
    let mut cos = Real::one().with_bits(wbits);
    // running terms r^(2j+1)/(2j+1)! and r^(2j)/(2j)!
    let mut sin_term = r.clone();
    let mut cos_term = Real::one().with_bits(wbits);
    let mut j = 1u64;
    loop {
        cos_term = cos_term * &r2 / Real::from_u64((2 * j - 1) * (2 * j), wbits);
        sin_term = sin_term * &r2 / Real::from_u64((2 * j) * (2 * j + 1), wbits);
        if j % 2 == 1 {
            sin = sin - &sin_term;
            cos = cos - &cos_term;
        } else {
            sin = sin + &sin_term;
            cos = cos + &cos_term;
        }
        if sin_term.abs() < threshold && cos_term.abs() < threshold {
            break;
        }
        j += 1;
    }
    (sin, cos)
}
