//! Recovering the base: solve Ψ(y) = t on (0,1)^p.
//!
//! Newton iteration with residual backtracking is the primary method; the
//! Jacobian is provably regular on the whole open cube, which is asserted at
//! every accepted iterate via the scaled-Jacobian classification. When Newton
//! stalls, a cyclic coordinate bisection takes over — each component ψ_i is
//! strictly increasing in y_i, so the one-dimensional slices always bracket.
//! Solving with target (1,…,1) and reciprocating the solution yields the
//! unique alternate base associated with a Parry-valid digit list.

use std::fmt;

use crate::cyclic_matrix::MonotoneClass;
use crate::digit_seq::{ParryList, ValidationReport};
use crate::power_series::{PsiMap, SeriesError};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub precision_bits: usize,
    /// Residual tolerance in the ∞-norm.
    pub tol: f64,
    pub max_newton: usize,
    pub max_backtrack: usize,
    pub max_sweeps: usize,
    /// Iterates are confined to [clamp, 1 − clamp]^p.
    pub clamp: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            precision_bits: 128,
            tol: 1e-10,
            max_newton: 50,
            max_backtrack: 60,
            max_sweeps: 500,
            clamp: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn with_bits(bits: usize) -> Self {
        SolverConfig {
            precision_bits: bits,
            ..Default::default()
        }
    }

    fn check(&self) -> Result<(), SolveError> {
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(SolveError::InvalidConfig("tol must be positive"));
        }
        if !(self.clamp > 0.0 && self.clamp < 0.5) {
            return Err(SolveError::InvalidConfig("clamp must lie in (0, 1/2)"));
        }
        if self.precision_bits < 32 {
            return Err(SolveError::InvalidConfig(
                "precision_bits must be at least 32",
            ));
        }
        Ok(())
    }
}

/// How an accepted step was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodStep {
    Newton,
    Damped,
    CoordinateBisection,
}

impl fmt::Display for MethodStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MethodStep::Newton => "newton",
            MethodStep::Damped => "damped",
            MethodStep::CoordinateBisection => "coordinate_bisection",
        };
        f.write_str(s)
    }
}

/// Solution with its residual and the steps that produced it.
#[derive(Clone, Debug)]
pub struct SolveCertificate {
    pub y: Vec<Real>,
    pub target: Vec<Real>,
    pub residual_inf: Real,
    pub iterations: usize,
    pub method_path: Vec<MethodStep>,
    /// ∞-norm residual after each accepted step, parallel to `method_path`.
    pub residual_trace: Vec<Real>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolveError {
    #[error("solver did not converge: residual {residual} after {iterations} steps")]
    NonConvergence {
        residual: Real,
        iterations: usize,
        certificate: Box<SolveCertificate>,
    },
    #[error("series are not solver grade (need a₀ ≥ 1 and a₀ + aₙ > 1 for some n)")]
    InvalidSeries,
    #[error("target component {index} outside (0, 1]")]
    TargetOutOfRange { index: usize },
    #[error("digit list fails the Parry condition ({} violations)", report.violations.len())]
    InvalidParryList { report: ValidationReport },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// An alternate base: p reals > 1, indexed cyclically.
#[derive(Clone, Debug, PartialEq)]
pub struct AltBase {
    betas: Vec<Real>,
    precision_bits: usize,
}

impl AltBase {
    /// Requires every β > 1.
    pub fn new(betas: Vec<Real>, precision_bits: usize) -> Result<Self, SolveError> {
        if betas.is_empty() {
            return Err(SolveError::InvalidConfig("base needs at least one beta"));
        }
        if betas.iter().any(|b| *b <= Real::one()) {
            return Err(SolveError::InvalidConfig("every beta must exceed 1"));
        }
        Ok(AltBase {
            betas,
            precision_bits,
        })
    }

    /// Integer Cantor base, e.g. (2, 3).
    pub fn from_integers(betas: &[u64], precision_bits: usize) -> Result<Self, SolveError> {
        AltBase::new(
            betas
                .iter()
                .map(|&b| Real::from_u64(b, precision_bits))
                .collect(),
            precision_bits,
        )
    }

    pub fn p(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[Real] {
        &self.betas
    }

    /// β_n with cyclic indexing.
    pub fn beta_mod(&self, n: usize) -> &Real {
        &self.betas[n % self.betas.len()]
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }
}

/// Starting point y_i = t_i/(a₀^(i) + 1): the solution satisfies
/// a₀·y_i < ψ_i(y) = t_i, so this sits strictly inside the admissible box.
fn initial_guess(psi: &PsiMap, target: &[Real], bits: usize) -> Vec<Real> {
    psi.series()
        .iter()
        .zip(target)
        .map(|(f, t)| t.with_bits(bits) / Real::from_u64(f.coeffs().leading_digit() + 1, bits))
        .collect()
}

/// Standard initial point for the unit target: y_i = 1/(d₀^(i) + 1).
pub fn initial_point(list: &ParryList, bits: usize) -> Vec<Real> {
    list.seqs()
        .iter()
        .map(|s| Real::one().with_bits(bits) / Real::from_u64(s.leading_digit() + 1, bits))
        .collect()
}

fn inf_norm(v: &[Real]) -> Real {
    v.iter().fold(Real::zero(), |acc, x| acc.max(x.abs()))
}

fn residual(psi: &PsiMap, y: &[Real], target: &[Real]) -> Result<Vec<Real>, SeriesError> {
    let vals = psi.eval(y)?;
    Ok(vals
        .into_iter()
        .zip(target)
        .map(|(v, t)| v.value - t)
        .collect())
}

/// Partial-pivot Gaussian elimination; `None` when a pivot vanishes.
fn linear_solve(mut a: Vec<Vec<Real>>, mut b: Vec<Real>) -> Option<Vec<Real>> {
    let n = b.len();
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| {
            a[i][k]
                .abs()
                .partial_cmp(&a[j][k].abs())
                .expect("reals are ordered")
        })?;
        if a[pivot][k].is_zero() {
            return None;
        }
        a.swap(k, pivot);
        b.swap(k, pivot);
        let pivot_row = a[k].clone();
        let pivot_rhs = b[k].clone();
        for i in k + 1..n {
            let factor = &a[i][k] / &pivot_row[k];
            for j in k..n {
                let v = &a[i][j] - &(&factor * &pivot_row[j]);
                a[i][j] = v;
            }
            let v = &b[i] - &(&factor * &pivot_rhs);
            b[i] = v;
        }
    }
    let mut x = vec![Real::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for j in k + 1..n {
            acc = acc - &a[k][j] * &x[j];
        }
        x[k] = acc / &a[k][k];
    }
    Some(x)
}

/// Solve Ψ(y) = t for t ∈ (0,1]^p.
///
/// Existence holds for every such target and uniqueness for every solution,
/// so a converged residual certifies the answer. Newton steps are backtracked
/// until the ∞-norm residual decreases and iterates are clamped into
/// [clamp, 1−clamp]^p; once the tolerance is met the iteration keeps polishing
/// toward the precision floor so downstream digit extraction sees a base
/// accurate to nearly full working precision.
pub fn solve_psi(
    psi: &PsiMap,
    target: &[Real],
    cfg: &SolverConfig,
) -> Result<SolveCertificate, SolveError> {
    solve_psi_from(psi, target, None, cfg)
}

/// [`solve_psi`] with an explicit starting point (used for multi-start
/// uniqueness checks). `None` falls back to the standard initial guess.
pub fn solve_psi_from(
    psi: &PsiMap,
    target: &[Real],
    start: Option<&[Real]>,
    cfg: &SolverConfig,
) -> Result<SolveCertificate, SolveError> {
    cfg.check()?;
    let p = psi.p();
    if target.len() != p {
        return Err(SeriesError::LengthMismatch {
            got: target.len(),
            expected: p,
        }
        .into());
    }
    if !psi.is_solver_grade() {
        return Err(SolveError::InvalidSeries);
    }
    for (index, t) in target.iter().enumerate() {
        if !t.is_positive() || *t > Real::one() {
            return Err(SolveError::TargetOutOfRange { index });
        }
    }
    let bits = cfg.precision_bits;
    let target: Vec<Real> = target.iter().map(|t| t.with_bits(bits)).collect();
    let lo = Real::from_f64(cfg.clamp, bits);
    let hi = Real::one() - &lo;
    let clamp_vec = |y: Vec<Real>| -> Vec<Real> {
        y.into_iter()
            .map(|v| v.max(lo.clone()).min(hi.clone()))
            .collect()
    };
    let tol = Real::from_f64(cfg.tol, bits);
    // polishing floor: keep sharpening well past tol while progress is cheap
    let floor = Real::pow2(24 - bits as isize, 32);

    let mut y = clamp_vec(match start {
        Some(y0) => {
            if y0.len() != p {
                return Err(SeriesError::LengthMismatch {
                    got: y0.len(),
                    expected: p,
                }
                .into());
            }
            y0.iter().map(|v| v.with_bits(bits)).collect()
        }
        None => initial_guess(psi, &target, bits),
    });
    let mut path: Vec<MethodStep> = Vec::new();
    let mut trace: Vec<Real> = Vec::new();
    let mut res = residual(psi, &y, &target)?;
    let mut res_norm = inf_norm(&res);

    for _ in 0..cfg.max_newton {
        if res_norm <= floor {
            break;
        }
        let scaled = psi.scaled_jacobian(&y)?;
        if scaled.classify_monotone() != MonotoneClass::StrictlyMonotone {
            return Err(SolveError::InternalInvariant(
                "scaled Jacobian not strictly cyclically monotone".into(),
            ));
        }
        let jac: Vec<Vec<Real>> = (0..p)
            .map(|i| (0..p).map(|j| scaled.at(i, j) / &y[j]).collect())
            .collect();
        let Some(delta) = linear_solve(jac, res.clone()) else {
            return Err(SolveError::InternalInvariant(
                "Newton system numerically singular".into(),
            ));
        };
        let mut alpha_exp = 0u32; // step is delta / 2^alpha_exp
        let mut accepted = false;
        for _ in 0..cfg.max_backtrack {
            let scale = Real::pow2(-(alpha_exp as isize), 32);
            let candidate: Vec<Real> = y
                .iter()
                .zip(&delta)
                .map(|(yi, di)| yi - &(di * &scale))
                .collect();
            let candidate = clamp_vec(candidate);
            let cand_res = residual(psi, &candidate, &target)?;
            let cand_norm = inf_norm(&cand_res);
            if cand_norm < res_norm {
                y = candidate;
                res = cand_res;
                res_norm = cand_norm;
                path.push(if alpha_exp == 0 {
                    MethodStep::Newton
                } else {
                    MethodStep::Damped
                });
                trace.push(res_norm.clone());
                accepted = true;
                break;
            }
            alpha_exp += 1;
        }
        if !accepted {
            break;
        }
    }

    if res_norm > tol {
        // fallback: cyclic coordinate bisection, each slice strictly increasing
        let steps = bits.min(400) + 8;
        for _ in 0..cfg.max_sweeps {
            for i in 0..p {
                y[i] = bisect_component(psi, &y, i, &target[i], &lo, &hi, steps)?;
            }
            res = residual(psi, &y, &target)?;
            res_norm = inf_norm(&res);
            path.push(MethodStep::CoordinateBisection);
            trace.push(res_norm.clone());
            if res_norm <= tol {
                break;
            }
        }
    }

    let iterations = path.len();
    let certificate = SolveCertificate {
        y,
        target,
        residual_inf: res_norm.clone(),
        iterations,
        method_path: path,
        residual_trace: trace,
    };
    if res_norm <= tol {
        Ok(certificate)
    } else {
        Err(SolveError::NonConvergence {
            residual: res_norm,
            iterations,
            certificate: Box::new(certificate),
        })
    }
}

/// Bisect ψ_i(y with y_i = v) = t for v in [lo, hi].
fn bisect_component(
    psi: &PsiMap,
    y: &[Real],
    i: usize,
    t: &Real,
    lo: &Real,
    hi: &Real,
    steps: usize,
) -> Result<Real, SeriesError> {
    let mut work = y.to_vec();
    let eval_at = |v: &Real, work: &mut Vec<Real>| -> Result<Real, SeriesError> {
        work[i] = v.clone();
        Ok(psi.eval_component(i, work)?.value)
    };
    let mut a = lo.clone();
    let mut b = hi.clone();
    if &eval_at(&b, &mut work)? <= t {
        return Ok(b);
    }
    if &eval_at(&a, &mut work)? >= t {
        return Ok(a);
    }
    let half = Real::pow2(-1, 32);
    for _ in 0..steps {
        let mid = (&a + &b) * &half;
        if &eval_at(&mid, &mut work)? < t {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((&a + &b) * &half)
}

/// Re-evaluate a certificate's residual through the truncation route.
pub fn recheck_residual(
    psi: &PsiMap,
    cert: &SolveCertificate,
    eps: &Real,
) -> Result<Real, SeriesError> {
    let vals = psi.eval_truncated(&cert.y, eps)?;
    let diffs: Vec<Real> = vals
        .into_iter()
        .zip(&cert.target)
        .map(|(v, t)| v.value - t)
        .collect();
    Ok(inf_norm(&diffs))
}

/// Recover the unique alternate base whose quasi-greedy expansions of unity
/// are the given Parry-valid list: solve Ψ(y) = (1,…,1) and set β_i = 1/y_i.
pub fn solve_base(
    list: &ParryList,
    cfg: &SolverConfig,
) -> Result<(AltBase, SolveCertificate), SolveError> {
    let report = list.validate();
    if !report.is_valid() {
        return Err(SolveError::InvalidParryList { report });
    }
    let psi = PsiMap::from_parry(list)?;
    let ones = vec![Real::one(); list.p()];
    let cert = solve_psi(&psi, &ones, cfg)?;
    let betas: Vec<Real> = cert.y.iter().map(Real::recip).collect();
    for b in &betas {
        if *b <= Real::one() {
            return Err(SolveError::InternalInvariant(
                "recovered beta not greater than 1".into(),
            ));
        }
    }
    let base = AltBase {
        betas,
        precision_bits: cfg.precision_bits,
    };
    Ok((base, cert))
}
