//! Greedy and quasi-greedy digit expansions in alternate bases.
//!
//! The greedy recurrence is x₀ = x, aₙ = ⌊β·xₙ⌋, xₙ₊₁ = β·xₙ − aₙ; the
//! quasi-greedy expansion of unity runs x₀ = 1 with aₙ = ⌈β·xₙ⌉ − 1, the
//! largest digit keeping the remainder strictly positive. Finite precision
//! makes ⌊·⌋/⌈·⌉ fragile exactly when β·xₙ sits at an integer — which happens
//! for real algebraic bases — so every digit carries a reliability flag and
//! the round-trip driver escalates precision when a digit cannot be decided.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::digit_seq::ParryList;
use crate::scalar::Real;
use crate::solver::{solve_base, AltBase, SolveCertificate, SolveError, SolverConfig};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumerationError {
    #[error("x must lie in [0, 1)")]
    XOutOfRange,
    #[error("shift offset {offset} out of range for period {p}")]
    OffsetOutOfRange { offset: usize, p: usize },
    #[error("at least one digit must be requested")]
    ZeroDigits,
    #[error("digit at position {position} does not fit in u64")]
    DigitOverflow { position: usize },
}

/// Confidence in a single emitted digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reliability {
    /// β·xₙ was far from every integer.
    Exact,
    /// β·xₙ was an integer to within the working accuracy; the step was
    /// snapped to the exact tie.
    Guarded,
    /// β·xₙ was suspiciously close to an integer but not decidably a tie.
    Unreliable,
}

impl fmt::Display for Reliability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reliability::Exact => "exact",
            Reliability::Guarded => "guarded",
            Reliability::Unreliable => "unreliable",
        };
        f.write_str(s)
    }
}

/// A computed expansion prefix with its final remainder.
#[derive(Clone, Debug)]
pub struct ExpansionPrefix {
    pub digits: Vec<u64>,
    pub remainder: Real,
    pub base: AltBase,
    /// Which shift σ^ℓ(B) the expansion ran in.
    pub start_offset: usize,
    pub reliability: Vec<Reliability>,
}

impl ExpansionPrefix {
    pub fn has_unreliable(&self) -> bool {
        self.reliability.contains(&Reliability::Unreliable)
    }

    /// Σ aₙ/(β_ℓ⋯β_{ℓ+n}) + remainder/(β_ℓ⋯β_{ℓ+N−1}).
    pub fn reconstruct(&self) -> Real {
        let mut sum = Real::zero();
        let mut denom = Real::one();
        for (n, &a) in self.digits.iter().enumerate() {
            denom = denom * self.base.beta_mod(self.start_offset + n);
            if a != 0 {
                sum = sum + Real::from_u64(a, denom.bits()) / &denom;
            }
        }
        sum + &self.remainder / &denom
    }
}

/// Outcome of the finite-window admissibility check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmissibilityVerdict {
    Admissible,
    /// The suffix starting at the reported index exceeds its bound.
    Inadmissible(usize),
    /// Some suffix equals its bound through the end of the window, so strict
    /// admissibility cannot be decided from this prefix.
    TightAtWindow(usize),
}

// tie-detection threshold, as a power of two of the working precision
fn eps_assume_exp(bits: usize) -> isize {
    -((2 * bits / 3) as isize)
}

enum StepKind {
    Greedy,
    QuasiGreedy,
}

/// Outcome of one digit step: the digit, the next remainder, its confidence,
/// and the log2 error exponent carried into the next step.
struct Step {
    digit: u64,
    remainder: Real,
    reliability: Reliability,
    err_exp: f64,
}

/// One digit step shared by both expansions.
///
/// `v_err_exp` is the log2 absolute error bound on v = β·xₙ accumulated so
/// far; the recurrence is expanding, so this grows by log2 β per step unless
/// a snapped tie resets the remainder to an exact value (`floor_exp`). A
/// digit is trusted only when the distance of v from the nearest integer
/// clears the accumulated error band with margin.
fn digit_step(
    v: &Real,
    bits: usize,
    kind: &StepKind,
    position: usize,
    v_err_exp: f64,
    floor_exp: f64,
) -> Result<Step, NumerationError> {
    let nearest: BigInt = v.round_bigint();
    let dist = (v - &Real::from_rational(&nearest.clone().into(), bits)).abs();
    let to_u64 = |b: &BigInt, shift: i64| -> Result<u64, NumerationError> {
        (b + BigInt::from(shift))
            .to_u64()
            .ok_or(NumerationError::DigitOverflow { position })
    };
    let assume_exp = eps_assume_exp(bits);
    let snap_safe = v_err_exp <= assume_exp as f64 - 4.0;
    if snap_safe && dist <= Real::pow2(assume_exp, 32) {
        // confidently an exact tie: snap to it
        match kind {
            StepKind::Greedy => {
                return Ok(Step {
                    digit: to_u64(&nearest, 0)?,
                    remainder: Real::zero(),
                    reliability: Reliability::Guarded,
                    err_exp: floor_exp,
                });
            }
            StepKind::QuasiGreedy => {
                if nearest > BigInt::zero() {
                    return Ok(Step {
                        digit: to_u64(&nearest, -1)?,
                        remainder: Real::one().with_bits(bits),
                        reliability: Reliability::Guarded,
                        err_exp: floor_exp,
                    });
                }
                // remainder collapsed toward zero: not a usable tie
                return Ok(Step {
                    digit: 0,
                    remainder: v.clone(),
                    reliability: Reliability::Unreliable,
                    err_exp: v_err_exp,
                });
            }
        }
    }
    let decision_band = Real::pow2((v_err_exp as isize).saturating_add(16), 32);
    let reliability = if v_err_exp > -16.0 || dist <= decision_band {
        Reliability::Unreliable
    } else {
        Reliability::Exact
    };
    let (digit_int, remainder) = match kind {
        StepKind::Greedy => {
            let d = v.floor_bigint();
            let rem = v - &Real::from_rational(&d.clone().into(), bits);
            (d, rem)
        }
        StepKind::QuasiGreedy => {
            let d: BigInt = v.ceil_bigint() - 1;
            let rem = v - &Real::from_rational(&d.clone().into(), bits);
            (d, rem)
        }
    };
    // a non-positive v (possible only in degenerate quasi-greedy states)
    // yields digit 0 with the value itself as remainder
    let (digit, remainder) = if digit_int.is_negative() {
        (0, v.clone())
    } else {
        (to_u64(&digit_int, 0)?, remainder)
    };
    Ok(Step {
        digit,
        remainder,
        reliability,
        err_exp: v_err_exp,
    })
}

fn expand(
    base: &AltBase,
    x0: Real,
    offset: usize,
    n_digits: usize,
    kind: StepKind,
) -> Result<ExpansionPrefix, NumerationError> {
    let bits = base.precision_bits();
    let floor_exp = 24.0 - bits as f64;
    let mut digits = Vec::with_capacity(n_digits);
    let mut reliability = Vec::with_capacity(n_digits);
    let mut x = x0.with_bits(bits);
    let mut err_exp = floor_exp;
    for n in 0..n_digits {
        let beta = base.beta_mod(offset + n);
        let v = beta * &x;
        let v_err_exp = (err_exp + beta.to_f64().log2().max(0.0) + 0.2).max(floor_exp);
        let step = digit_step(&v, bits, &kind, n, v_err_exp, floor_exp)?;
        digits.push(step.digit);
        reliability.push(step.reliability);
        x = step.remainder;
        err_exp = step.err_exp;
    }
    Ok(ExpansionPrefix {
        digits,
        remainder: x,
        base: base.clone(),
        start_offset: offset,
        reliability,
    })
}

/// First `n_digits` digits of the greedy expansion (x)_B for x ∈ [0, 1).
pub fn greedy_expand(
    base: &AltBase,
    x: &Real,
    n_digits: usize,
) -> Result<ExpansionPrefix, NumerationError> {
    if n_digits == 0 {
        return Err(NumerationError::ZeroDigits);
    }
    if x.is_negative() || *x >= Real::one() {
        return Err(NumerationError::XOutOfRange);
    }
    expand(base, x.clone(), 0, n_digits, StepKind::Greedy)
}

/// First `n_digits` digits of the quasi-greedy expansion of unity in the
/// shifted base σ^ℓ(B).
pub fn quasi_greedy_unity(
    base: &AltBase,
    offset: usize,
    n_digits: usize,
) -> Result<ExpansionPrefix, NumerationError> {
    if n_digits == 0 {
        return Err(NumerationError::ZeroDigits);
    }
    if offset >= base.p() {
        return Err(NumerationError::OffsetOutOfRange {
            offset,
            p: base.p(),
        });
    }
    expand(base, Real::one(), offset, n_digits, StepKind::QuasiGreedy)
}

/// Check a finite digit word against the admissibility bound of `list`,
/// starting at shift 0: every suffix must stay lexicographically below the
/// corresponding quasi-greedy sequence.
pub fn is_admissible(digits: &[u64], list: &ParryList) -> AdmissibilityVerdict {
    let mut tight: Option<usize> = None;
    for n in 0..digits.len() {
        let suffix = &digits[n..];
        let bound = list.seq_mod(n);
        let mut decided = false;
        for (j, &d) in suffix.iter().enumerate() {
            match d.cmp(&bound.digit_at(j)) {
                std::cmp::Ordering::Greater => return AdmissibilityVerdict::Inadmissible(n),
                std::cmp::Ordering::Less => {
                    decided = true;
                    break;
                }
                std::cmp::Ordering::Equal => {}
            }
        }
        if !decided && tight.is_none() {
            tight = Some(n);
        }
    }
    match tight {
        Some(n) => AdmissibilityVerdict::TightAtWindow(n),
        None => AdmissibilityVerdict::Admissible,
    }
}

/// Per-sequence outcome of a round trip.
#[derive(Clone, Debug)]
pub struct SeqRoundtrip {
    pub expected: Vec<u64>,
    pub produced: Vec<u64>,
    pub reliability: Vec<Reliability>,
    /// Positions where produced ≠ expected, unreliable positions excluded.
    pub mismatches: Vec<usize>,
    pub unreliable: Vec<usize>,
}

/// Result of solve → re-expand → compare.
#[derive(Clone, Debug)]
pub struct RoundtripReport {
    pub base: AltBase,
    pub certificate: SolveCertificate,
    pub per_seq: Vec<SeqRoundtrip>,
    pub bits_used: usize,
    pub escalations: usize,
}

impl RoundtripReport {
    pub fn all_match(&self) -> bool {
        self.per_seq.iter().all(|s| s.mismatches.is_empty())
    }

    pub fn unreliable_positions(&self) -> usize {
        self.per_seq.iter().map(|s| s.unreliable.len()).sum()
    }

    pub fn total_positions(&self) -> usize {
        self.per_seq.iter().map(|s| s.produced.len()).sum()
    }
}

const MAX_ESCALATIONS: usize = 3;
const MAX_BITS: usize = 1024;

/// Solve for the base of `list`, re-derive every quasi-greedy expansion of
/// unity to `n_digits`, and compare against the list itself.
///
/// If any digit comes back unreliable the whole pipeline is retried at double
/// precision, up to three times; whatever is still unreliable after that is
/// reported and excluded from the match decision.
pub fn roundtrip(
    list: &ParryList,
    n_digits: usize,
    cfg: &SolverConfig,
) -> Result<RoundtripReport, SolveError> {
    let mut bits = cfg.precision_bits;
    let mut escalations = 0usize;
    loop {
        let attempt_cfg = SolverConfig {
            precision_bits: bits,
            ..cfg.clone()
        };
        let (base, certificate) = solve_base(list, &attempt_cfg)?;
        let expansions: Vec<ExpansionPrefix> = (0..list.p())
            .map(|l| quasi_greedy_unity(&base, l, n_digits))
            .collect::<Result<_, _>>()
            .map_err(|e| SolveError::InternalInvariant(e.to_string()))?;
        let any_unreliable = expansions.iter().any(ExpansionPrefix::has_unreliable);
        if any_unreliable && escalations < MAX_ESCALATIONS && bits < MAX_BITS {
            bits = (bits * 2).min(MAX_BITS);
            escalations += 1;
            continue;
        }
        let per_seq = expansions
            .iter()
            .enumerate()
            .map(|(l, exp)| {
                let expected: Vec<u64> =
                    (0..n_digits).map(|n| list.seqs()[l].digit_at(n)).collect();
                let mut mismatches = Vec::new();
                let mut unreliable = Vec::new();
                for n in 0..n_digits {
                    if exp.reliability[n] == Reliability::Unreliable {
                        unreliable.push(n);
                    } else if exp.digits[n] != expected[n] {
                        mismatches.push(n);
                    }
                }
                SeqRoundtrip {
                    expected,
                    produced: exp.digits.clone(),
                    reliability: exp.reliability.clone(),
                    mismatches,
                    unreliable,
                }
            })
            .collect();
        return Ok(RoundtripReport {
            base,
            certificate,
            per_seq,
            bits_used: bits,
            escalations,
        });
    }
}
