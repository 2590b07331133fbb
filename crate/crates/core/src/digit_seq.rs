//! Eventually periodic digit sequences and the Parry condition.
//!
//! An infinite sequence of non-negative integer digits is stored as a finite
//! preperiod plus a repeating period, kept in canonical form (minimal period,
//! minimal preperiod) so that equality of values is equality of
//! representations and lexicographic comparison is decidable on a finite
//! window.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use rand::Rng;

/// Eventually periodic sequence of non-negative integer digits.
///
/// Always canonical: the period is primitive (not a repetition of a shorter
/// word) and the preperiod cannot be shortened by rotating the period.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EpDigits {
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DigitSeqError {
    #[error("period must be non-empty")]
    EmptyPeriod,
    #[error("a Parry list must contain at least one sequence")]
    EmptyList,
}

fn minimal_period(period: &[u64]) -> Vec<u64> {
    let q = period.len();
    for d in 1..=q {
        if q % d != 0 {
            continue;
        }
        if (d..q).all(|i| period[i] == period[i - d]) {
            return period[..d].to_vec();
        }
    }
    unreachable!("d = q always matches");
}

impl EpDigits {
    pub fn new(preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self, DigitSeqError> {
        if period.is_empty() {
            return Err(DigitSeqError::EmptyPeriod);
        }
        let mut period = minimal_period(&period);
        let mut preperiod = preperiod;
        // absorb the preperiod tail into a rotation of the period
        while preperiod.last() == period.last() {
            preperiod.pop();
            period.rotate_right(1);
        }
        Ok(EpDigits { preperiod, period })
    }

    /// Purely periodic sequence.
    pub fn periodic(period: Vec<u64>) -> Result<Self, DigitSeqError> {
        Self::new(Vec::new(), period)
    }

    /// The constant sequence `digit digit digit …`.
    pub fn constant(digit: u64) -> Self {
        EpDigits {
            preperiod: Vec::new(),
            period: vec![digit],
        }
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn preperiod_len(&self) -> usize {
        self.preperiod.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// The n-th digit of the infinite sequence.
    pub fn digit_at(&self, n: usize) -> u64 {
        if n < self.preperiod.len() {
            self.preperiod[n]
        } else {
            self.period[(n - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn leading_digit(&self) -> u64 {
        self.digit_at(0)
    }

    pub fn max_digit(&self) -> u64 {
        let pre = self.preperiod.iter().copied().max().unwrap_or(0);
        let per = self.period.iter().copied().max().unwrap_or(0);
        pre.max(per)
    }

    pub fn period_all_zero(&self) -> bool {
        self.period.iter().all(|&d| d == 0)
    }

    /// The sequence starting at index `n`, in canonical form.
    pub fn shift(&self, n: usize) -> EpDigits {
        let m = self.preperiod.len();
        if n <= m {
            EpDigits::new(self.preperiod[n..].to_vec(), self.period.clone())
                .expect("period stays non-empty")
        } else {
            let r = (n - m) % self.period.len();
            let mut period = self.period.clone();
            period.rotate_left(r);
            EpDigits::new(Vec::new(), period).expect("period stays non-empty")
        }
    }

    /// Exact lexicographic comparison of the two infinite sequences.
    ///
    /// Beyond `max(m1, m2) + lcm(q1, q2)` digits both sequences are jointly
    /// periodic, so agreement on that window implies equality.
    pub fn lex_compare(&self, other: &EpDigits) -> Ordering {
        let window = self.joint_window(other);
        for n in 0..window {
            match self.digit_at(n).cmp(&other.digit_at(n)) {
                Ordering::Equal => continue,
                non_eq => return non_eq,
            }
        }
        Ordering::Equal
    }

    /// Number of digits that decides `lex_compare` against `other`.
    pub fn joint_window(&self, other: &EpDigits) -> usize {
        let m = self.preperiod.len().max(other.preperiod.len());
        m + self.period.len().lcm(&other.period.len())
    }
}

impl PartialOrd for EpDigits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpDigits {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_compare(other)
    }
}

impl fmt::Debug for EpDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for EpDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.preperiod {
            write!(f, "{d} ")?;
        }
        write!(f, "(")?;
        for (i, d) in self.period.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")^ω")
    }
}

/// A list of `p` digit sequences to be checked against the Parry condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParryList {
    seqs: Vec<EpDigits>,
    digit_bound: u64,
}

/// Which clause of the Parry condition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParryRule {
    /// d₀ must be positive.
    LeadingDigit,
    /// Infinitely many digits must be positive (period not all zero).
    InfinitelyPositive,
    /// A shifted sequence must not exceed its comparison sequence.
    LexShift,
    /// No digit may exceed the bound H (implied by the lex clause).
    DigitBound,
}

impl fmt::Display for ParryRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ParryRule::LeadingDigit => "leading-digit",
            ParryRule::InfinitelyPositive => "infinitely-positive",
            ParryRule::LexShift => "lex-shift",
            ParryRule::DigitBound => "digit-bound",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: ParryRule,
    /// Index ℓ of the offending sequence.
    pub seq: usize,
    /// Shift or digit position the rule failed at.
    pub position: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ParryList {
    pub fn new(seqs: Vec<EpDigits>) -> Result<Self, DigitSeqError> {
        if seqs.is_empty() {
            return Err(DigitSeqError::EmptyList);
        }
        let digit_bound = seqs.iter().map(EpDigits::leading_digit).max().unwrap();
        Ok(ParryList { seqs, digit_bound })
    }

    pub fn p(&self) -> usize {
        self.seqs.len()
    }

    pub fn seqs(&self) -> &[EpDigits] {
        &self.seqs
    }

    /// dⁿ for arbitrary n ≥ 0, i.e. the sequence with index n mod p.
    pub fn seq_mod(&self, n: usize) -> &EpDigits {
        &self.seqs[n % self.seqs.len()]
    }

    /// H, the maximum over the leading digits.
    pub fn digit_bound(&self) -> u64 {
        self.digit_bound
    }

    /// Full Parry-condition check.
    ///
    /// The shift clause is verified for shifts `n < m_ℓ + lcm(q_ℓ, p)`; past
    /// the preperiod the pair (shifted content, comparison index) repeats with
    /// period `lcm(q_ℓ, p)`, so this window is exhaustive.
    pub fn validate(&self) -> ValidationReport {
        let p = self.p();
        let mut violations = Vec::new();
        for (l, seq) in self.seqs.iter().enumerate() {
            if seq.leading_digit() == 0 {
                violations.push(Violation {
                    rule: ParryRule::LeadingDigit,
                    seq: l,
                    position: 0,
                    detail: format!("d^({l}) starts with 0"),
                });
            }
            if seq.period_all_zero() {
                violations.push(Violation {
                    rule: ParryRule::InfinitelyPositive,
                    seq: l,
                    position: seq.preperiod_len(),
                    detail: format!("d^({l}) is eventually zero"),
                });
            }
            let window = seq.preperiod_len() + seq.period_len().lcm(&p);
            for n in 0..window {
                let shifted = seq.shift(n);
                let target = self.seq_mod(l + n);
                if shifted.lex_compare(target) == Ordering::Greater {
                    violations.push(Violation {
                        rule: ParryRule::LexShift,
                        seq: l,
                        position: n,
                        detail: format!(
                            "shift {n} of d^({l}) = {shifted} exceeds d^({}) = {target}",
                            (l + n) % p
                        ),
                    });
                    break;
                }
            }
            if let Some(v) = self.digit_bound_violation(l) {
                violations.push(v);
            }
        }
        ValidationReport { violations }
    }

    fn digit_bound_violation(&self, l: usize) -> Option<Violation> {
        let seq = &self.seqs[l];
        let h = self.digit_bound;
        let scan = seq.preperiod_len() + seq.period_len();
        (0..scan).find(|&n| seq.digit_at(n) > h).map(|n| Violation {
            rule: ParryRule::DigitBound,
            seq: l,
            position: n,
            detail: format!("digit {} at position {n} exceeds H = {h}", seq.digit_at(n)),
        })
    }

    /// Re-check the shift clause for `extra` shifts beyond the proven window.
    pub fn shift_spot_check(&self, extra: usize) -> Option<Violation> {
        for (l, seq) in self.seqs.iter().enumerate() {
            for n in 0..extra {
                let shifted = seq.shift(n);
                if shifted.lex_compare(self.seq_mod(l + n)) == Ordering::Greater {
                    return Some(Violation {
                        rule: ParryRule::LexShift,
                        seq: l,
                        position: n,
                        detail: format!("spot check failed at shift {n} of d^({l})"),
                    });
                }
            }
        }
        None
    }
}

/// Draw a random Parry-valid list by biased rejection sampling.
///
/// Leading digits are positive, later digits are biased to stay at or below
/// the leading digit of their own sequence; candidates failing `validate` are
/// discarded.
pub fn random_valid_list(
    rng: &mut impl Rng,
    max_p: usize,
    max_digit: u64,
    max_preperiod: usize,
    max_period: usize,
) -> ParryList {
    assert!(max_p >= 1 && max_digit >= 1 && max_period >= 1);
    loop {
        let p = rng.random_range(1..=max_p);
        let mut seqs = Vec::with_capacity(p);
        for _ in 0..p {
            let lead = rng.random_range(1..=max_digit);
            let m = rng.random_range(0..=max_preperiod);
            let q = rng.random_range(1..=max_period);
            let mut digits: Vec<u64> = Vec::with_capacity(m + q);
            digits.push(lead);
            for _ in 1..(m + q) {
                digits.push(rng.random_range(0..=lead));
            }
            let period: Vec<u64> = digits.split_off(m);
            let ep = match EpDigits::new(digits, period) {
                Ok(ep) if !ep.period_all_zero() => ep,
                _ => break,
            };
            seqs.push(ep);
        }
        if seqs.len() < p {
            continue;
        }
        let list = ParryList::new(seqs).expect("p >= 1");
        if list.validate().is_valid() {
            return list;
        }
    }
}
