//! Alternate power series and the map Ψ.
//!
//! A series of type p maps y ∈ [0,1)^p to Σ aₙ·y₀y₁⋯yₙ (indices mod p), with
//! eventually periodic non-negative integer coefficients. Ψ stacks p such
//! series, the i-th evaluated at the argument rotated by i. Evaluation has
//! two routes: an exact closed form that folds the periodic tail into a
//! geometric sum, and a plain truncation with a rigorous tail bound. The
//! closed form is the workhorse; the truncation cross-checks it.
//!
//! The structural facts the solver leans on are exposed as predicates: the
//! Jacobian of Ψ times diag(y) has strictly cyclically monotone rows, and all
//! principal minors of the Jacobian are positive.

use num_integer::Integer;

use crate::cyclic_matrix::{CycMatrix, MonotoneClass};
use crate::digit_seq::{EpDigits, ParryList};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series requires a positive leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("series requires infinitely many positive coefficients")]
    EventuallyZero,
    #[error("type parameter p must be at least 1")]
    ZeroType,
    #[error("argument has length {got}, series has type {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("argument component {index} outside {domain}")]
    DomainViolation { index: usize, domain: &'static str },
    #[error("truncation did not reach the target bound within {terms} terms")]
    TruncationCap { terms: usize },
    #[error("Ψ requires at least one series")]
    EmptyMap,
    #[error("series {index} has type {got}, expected {expected}")]
    MixedTypes {
        index: usize,
        got: usize,
        expected: usize,
    },
}

/// Value with a rigorous error bound and the number of terms summed.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: Real,
    pub error_bound: Real,
    pub terms_used: usize,
}

/// Alternate power series of type p with eventually periodic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AltSeries {
    p: usize,
    coeffs: EpDigits,
}

impl AltSeries {
    /// Requires a₀ > 0 and infinitely many positive coefficients.
    pub fn new(p: usize, coeffs: EpDigits) -> Result<Self, SeriesError> {
        if p == 0 {
            return Err(SeriesError::ZeroType);
        }
        if coeffs.leading_digit() == 0 {
            return Err(SeriesError::ZeroLeadingCoefficient);
        }
        if coeffs.period_all_zero() {
            return Err(SeriesError::EventuallyZero);
        }
        Ok(AltSeries { p, coeffs })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &EpDigits {
        &self.coeffs
    }

    /// Solver-grade flag: a₀ ≥ 1 and a₀ + aₙ > 1 for some n ≥ 1.
    pub fn is_solver_grade(&self) -> bool {
        if self.coeffs.leading_digit() < 1 {
            return false;
        }
        let a0 = self.coeffs.leading_digit();
        let scan = self.coeffs.preperiod_len() + self.coeffs.period_len() + 1;
        (1..=scan).any(|n| a0 + self.coeffs.digit_at(n) > 1)
    }

    /// Coefficient bound H (P1); digits are bounded by construction.
    pub fn coeff_bound(&self) -> u64 {
        self.coeffs.max_digit()
    }

    fn check_arg(&self, y: &[Real], open: bool) -> Result<(), SeriesError> {
        if y.len() != self.p {
            return Err(SeriesError::LengthMismatch {
                got: y.len(),
                expected: self.p,
            });
        }
        let one = Real::one();
        for (i, yi) in y.iter().enumerate() {
            let ok = if open {
                yi.is_positive() && *yi < one
            } else {
                !yi.is_negative() && *yi < one
            };
            if !ok {
                return Err(SeriesError::DomainViolation {
                    index: i,
                    domain: if open { "(0,1)" } else { "[0,1)" },
                });
            }
        }
        Ok(())
    }

    /// Exact evaluation: head below the joint period, periodic tail folded
    /// into a geometric sum. The error bound is zero by construction.
    pub fn eval(&self, y: &[Real]) -> Result<EvalResult, SeriesError> {
        self.check_arg(y, false)?;
        let (value, _) = self.eval_closed(y);
        Ok(EvalResult {
            value,
            error_bound: Real::zero(),
            terms_used: self.head_len(),
        })
    }

    /// Truncated evaluation stopping once the geometric tail bound
    /// H·y_max^(N+1)/(1−y_max) drops below `eps`.
    pub fn eval_truncated(&self, y: &[Real], eps: &Real) -> Result<EvalResult, SeriesError> {
        self.check_arg(y, false)?;
        const CAP: usize = 4_000_000;
        let h = Real::from_u64(self.coeff_bound().max(1), 64);
        let y_max = y.iter().cloned().fold(Real::zero(), Real::max);
        let mut sum = Real::zero();
        if y_max.is_zero() {
            return Ok(EvalResult {
                value: sum,
                error_bound: Real::zero(),
                terms_used: 1,
            });
        }
        let one_minus = Real::one() - &y_max;
        let mut product = Real::one();
        let mut power = Real::one();
        for n in 0..CAP {
            product = product * &y[n % self.p];
            power = power * &y_max;
            let a = self.coeffs.digit_at(n);
            if a != 0 {
                sum = sum + Real::from_u64(a, 64) * &product;
            }
            let bound = &h * &power / &one_minus;
            if bound < *eps {
                return Ok(EvalResult {
                    value: sum,
                    error_bound: bound,
                    terms_used: n + 1,
                });
            }
        }
        Err(SeriesError::TruncationCap { terms: CAP })
    }

    /// Head length m + lcm(q, p) of the closed-form split.
    fn head_len(&self) -> usize {
        let m = self.coeffs.preperiod_len();
        let l = self.coeffs.period_len().lcm(&self.p);
        m + l
    }

    /// Shared closed-form pass: value plus the scaled partials
    /// gⱼ = yⱼ·∂f/∂yⱼ for every j.
    ///
    /// With L = lcm(q, p) the products satisfy P_{n+L} = Pₙ·Z where
    /// Z = (y₀⋯y_{p−1})^(L/p), and the multiplicity of yⱼ in Pₙ grows by L/p
    /// per block, so both the value and the partials have geometric closed
    /// forms: Σ aₙσⱼ(n)Pₙ = headⱼ + Sⱼ/(1−Z) + (L/p)·B·Z/(1−Z)².
    fn eval_closed_with_partials(&self, y: &[Real]) -> (Real, Vec<Real>) {
        let p = self.p;
        let m = self.coeffs.preperiod_len();
        let l = self.coeffs.period_len().lcm(&p);
        let mut head_val = Real::zero();
        let mut head_g = vec![Real::zero(); p];
        let mut block_val = Real::zero();
        let mut block_g = vec![Real::zero(); p];
        let mut product = Real::one();
        for n in 0..(m + l) {
            product = product * &y[n % p];
            let a = self.coeffs.digit_at(n);
            if a != 0 {
                let term = Real::from_u64(a, 64) * &product;
                let (val, g) = if n < m {
                    (&mut head_val, &mut head_g)
                } else {
                    (&mut block_val, &mut block_g)
                };
                *val = val.clone() + &term;
                for (j, gj) in g.iter_mut().enumerate() {
                    let sigma = multiplicity(n, j, p);
                    if sigma != 0 {
                        *gj = gj.clone() + Real::from_u64(sigma, 64) * &term;
                    }
                }
            }
        }
        let z = y
            .iter()
            .fold(Real::one(), |acc, yi| acc * yi)
            .powi((l / p) as i64);
        let one_minus_z = Real::one() - &z;
        let tail_scale = (&z / &one_minus_z) / &one_minus_z;
        let blocks_per_cycle = Real::from_u64((l / p) as u64, 64);
        let value = &head_val + &(&block_val / &one_minus_z);
        let g = (0..p)
            .map(|j| {
                &head_g[j]
                    + &(&block_g[j] / &one_minus_z)
                    + &blocks_per_cycle * &block_val * &tail_scale
            })
            .collect();
        (value, g)
    }

    fn eval_closed(&self, y: &[Real]) -> (Real, Vec<Real>) {
        // partials come for free; callers that only need the value ignore them
        self.eval_closed_with_partials(y)
    }
}

/// Multiplicity of y_j in the product P_n = y_0·y_1⋯y_n (indices mod p).
fn multiplicity(n: usize, j: usize, p: usize) -> u64 {
    if n >= j {
        ((n - j) / p + 1) as u64
    } else {
        0
    }
}

/// Verdict on the principal minors of the Jacobian.
#[derive(Clone, Debug)]
pub enum MinorsVerdict {
    AllPositive,
    /// A minor failed to clear its accumulated error bound.
    Inconclusive {
        subset: Vec<usize>,
        value: Real,
        bound: Real,
    },
    NonPositive {
        subset: Vec<usize>,
        value: Real,
    },
}

impl MinorsVerdict {
    pub fn is_all_positive(&self) -> bool {
        matches!(self, MinorsVerdict::AllPositive)
    }
}

/// The vector map Ψ: component i evaluates series i at y rotated by i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiMap {
    series: Vec<AltSeries>,
}

impl PsiMap {
    pub fn new(series: Vec<AltSeries>) -> Result<Self, SeriesError> {
        let p = series.len();
        if p == 0 {
            return Err(SeriesError::EmptyMap);
        }
        for (index, s) in series.iter().enumerate() {
            if s.p() != p {
                return Err(SeriesError::MixedTypes {
                    index,
                    got: s.p(),
                    expected: p,
                });
            }
        }
        Ok(PsiMap { series })
    }

    /// Series ℓ takes its coefficients from d^(ℓ).
    pub fn from_parry(list: &ParryList) -> Result<Self, SeriesError> {
        let p = list.p();
        let series = list
            .seqs()
            .iter()
            .map(|seq| AltSeries::new(p, seq.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        PsiMap::new(series)
    }

    pub fn p(&self) -> usize {
        self.series.len()
    }

    pub fn series(&self) -> &[AltSeries] {
        &self.series
    }

    pub fn is_solver_grade(&self) -> bool {
        self.series.iter().all(AltSeries::is_solver_grade)
    }

    fn rotated(&self, y: &[Real], i: usize) -> Vec<Real> {
        let p = self.p();
        (0..p).map(|k| y[(i + k) % p].clone()).collect()
    }

    /// Ψ(y) componentwise, closed form.
    pub fn eval(&self, y: &[Real]) -> Result<Vec<EvalResult>, SeriesError> {
        self.series
            .iter()
            .enumerate()
            .map(|(i, f)| f.eval(&self.rotated(y, i)))
            .collect()
    }

    /// A single component ψ_i(y).
    pub fn eval_component(&self, i: usize, y: &[Real]) -> Result<EvalResult, SeriesError> {
        self.series[i].eval(&self.rotated(y, i))
    }

    /// Ψ(y) via the truncation route; the independent check of `eval`.
    pub fn eval_truncated(&self, y: &[Real], eps: &Real) -> Result<Vec<EvalResult>, SeriesError> {
        self.series
            .iter()
            .enumerate()
            .map(|(i, f)| f.eval_truncated(&self.rotated(y, i), eps))
            .collect()
    }

    /// Jacobian entries by term-wise differentiation of the truncated sum,
    /// with tail bound H·Σ_{n≥N}(n+1)·y_max^n / y_min per entry.
    pub fn jacobian_truncated(
        &self,
        y: &[Real],
        eps: &Real,
    ) -> Result<Vec<Vec<EvalResult>>, SeriesError> {
        let p = self.p();
        self.series[0].check_arg(y, true)?;
        const CAP: usize = 4_000_000;
        let y_max = y.iter().cloned().fold(Real::zero(), Real::max);
        let y_min = y.iter().cloned().fold(Real::one(), Real::min);
        let one_minus = Real::one() - &y_max;
        let mut rows = Vec::with_capacity(p);
        for (i, f) in self.series.iter().enumerate() {
            let u = self.rotated(y, i);
            let h = Real::from_u64(f.coeff_bound().max(1), 64);
            let mut g = vec![Real::zero(); p];
            let mut product = Real::one();
            let mut power = Real::one();
            let mut bound = Real::one();
            let mut terms = 0usize;
            for n in 0..CAP {
                product = product * &u[n % p];
                power = power * &y_max;
                let a = f.coeffs.digit_at(n);
                if a != 0 {
                    let term = Real::from_u64(a, 64) * &product;
                    for (k, gk) in g.iter_mut().enumerate() {
                        let sigma = multiplicity(n, k, p);
                        if sigma != 0 {
                            *gk = gk.clone() + Real::from_u64(sigma, 64) * &term;
                        }
                    }
                }
                // tail of sum (n+1) y_max^n from N = n+1 onward:
                // y_max^N (N+1 - N y_max) / (1-y_max)^2
                let n_next = Real::from_u64(n as u64 + 1, 64);
                let tail = &power * (&n_next + &Real::one() - &(&n_next * &y_max))
                    / (&one_minus * &one_minus);
                bound = &h * &tail / &y_min;
                if bound < *eps {
                    terms = n + 1;
                    break;
                }
                if n + 1 == CAP {
                    return Err(SeriesError::TruncationCap { terms: CAP });
                }
            }
            let mut row = Vec::with_capacity(p);
            for j in 0..p {
                let k = (p + j - i) % p;
                row.push(EvalResult {
                    value: &g[k] / &y[j],
                    error_bound: bound.clone(),
                    terms_used: terms,
                });
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Jacobian entries ∂ψ_i/∂y_j from the closed form, for y ∈ (0,1)^p.
    pub fn jacobian(&self, y: &[Real]) -> Result<Vec<Vec<EvalResult>>, SeriesError> {
        let p = self.p();
        let scaled = self.scaled_jacobian(y)?;
        let mut rows = Vec::with_capacity(p);
        for i in 0..p {
            let mut row = Vec::with_capacity(p);
            for j in 0..p {
                row.push(EvalResult {
                    value: scaled.at(i, j) / &y[j],
                    error_bound: Real::zero(),
                    terms_used: self.series[i].head_len(),
                });
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// J_Ψ(y)·diag(y); entry (i,j) is y_j·∂ψ_i/∂y_j.
    ///
    /// Row i read cyclically from the diagonal is exactly the chain
    /// y_i·∂ψ_i/∂y_i > y_{i+1}·∂ψ_i/∂y_{i+1} ≥ … ≥ 0, hence the monotone
    /// classification below must come out strict for every valid input.
    pub fn scaled_jacobian(&self, y: &[Real]) -> Result<CycMatrix<Real>, SeriesError> {
        let p = self.p();
        self.series[0].check_arg(y, true)?;
        let mut rows = Vec::with_capacity(p);
        for (i, f) in self.series.iter().enumerate() {
            let u = self.rotated(y, i);
            let (_, g) = f.eval_closed_with_partials(&u);
            // g[k] pairs with variable y_{(i+k) mod p}; scatter back to columns
            let mut row = vec![Real::zero(); p];
            for (k, gk) in g.into_iter().enumerate() {
                row[(i + k) % p] = gk;
            }
            rows.push(row);
        }
        CycMatrix::from_rows(rows).map_err(|_| SeriesError::DomainViolation {
            index: 0,
            domain: "(0,1) (scaled Jacobian entries must be non-negative)",
        })
    }

    pub fn scaled_jacobian_class(&self, y: &[Real]) -> Result<MonotoneClass, SeriesError> {
        Ok(self.scaled_jacobian(y)?.classify_monotone())
    }

    /// Check positivity of every principal minor of J_Ψ(y).
    ///
    /// Minors are expanded as permutation sums over the entry values; the
    /// accumulated bound combines the entry error bounds with a roundoff
    /// allowance, and a minor that cannot clear its bound is reported as
    /// inconclusive rather than decided.
    pub fn principal_minors(&self, y: &[Real]) -> Result<MinorsVerdict, SeriesError> {
        let p = self.p();
        let jac = self.jacobian(y)?;
        let bits = y
            .iter()
            .map(Real::bits)
            .max()
            .unwrap_or(crate::scalar::DEFAULT_BITS);
        for mask in 1u32..(1 << p) {
            let subset: Vec<usize> = (0..p).filter(|i| mask & (1 << i) != 0).collect();
            let (value, bound) = minor_with_bound(&jac, &subset, bits);
            if value.is_negative() || value.is_zero() {
                if value.abs() <= bound {
                    return Ok(MinorsVerdict::Inconclusive {
                        subset,
                        value,
                        bound,
                    });
                }
                return Ok(MinorsVerdict::NonPositive { subset, value });
            }
            if value <= bound {
                return Ok(MinorsVerdict::Inconclusive {
                    subset,
                    value,
                    bound,
                });
            }
        }
        Ok(MinorsVerdict::AllPositive)
    }
}

/// Permutation-sum minor over the chosen index subset, with first-order error
/// accumulation: each term contributes Π(|a|+b) − Π|a|, plus a machine-level
/// allowance for the rounded arithmetic itself.
fn minor_with_bound(jac: &[Vec<EvalResult>], subset: &[usize], bits: usize) -> (Real, Real) {
    let k = subset.len();
    let mut order: Vec<usize> = (0..k).collect();
    let mut det = Real::zero();
    let mut err = Real::zero();
    let mut scale = Real::one().with_bits(32);
    for &i in subset {
        for &j in subset {
            scale = scale.max(jac[i][j].value.abs() + &jac[i][j].error_bound);
        }
    }
    let mut positive = true;
    let mut counters = vec![0usize; k];
    let apply = |order: &[usize], positive: bool, det: &mut Real, err: &mut Real| {
        let mut prod = Real::one();
        let mut prod_hi = Real::one();
        for (r, &c) in order.iter().enumerate() {
            let e = &jac[subset[r]][subset[c]];
            prod = prod * &e.value;
            prod_hi = prod_hi * (e.value.abs() + &e.error_bound);
        }
        *err = err.clone() + (prod_hi - prod.abs());
        if positive {
            *det = det.clone() + prod;
        } else {
            *det = det.clone() - prod;
        }
    };
    apply(&order, positive, &mut det, &mut err);
    let mut i = 1;
    while i < k {
        if counters[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(counters[i], i);
            }
            positive = !positive;
            apply(&order, positive, &mut det, &mut err);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    let ops = (1..=k as u64)
        .try_fold(1u64, |a, b| a.checked_mul(b))
        .unwrap_or(u64::MAX)
        .saturating_mul(k as u64 + 1);
    let roundoff =
        scale.powi(k as i64) * Real::from_u64(ops.max(1), 64) * Real::pow2(6 - bits as isize, 32);
    (det, err + roundoff)
}
