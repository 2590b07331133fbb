//! Square matrices with cyclically monotone rows.
//!
//! A row is cyclically monotone when, read cyclically starting from the
//! diagonal entry, it never increases. The central fact driving the rest of
//! the crate: such matrices have non-negative determinant, strictly positive
//! when additionally every diagonal entry strictly dominates its right
//! neighbour. The module also covers the transformations that preserve the
//! class (cyclic shift, conic combinations, principal submatrices, monotone
//! row additions), the two proof-device constructions (prefix substitution
//! and first-row flattening), and circulants with the constant-block
//! singularity classification.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{roots_of_unity, Complex, Rational, Real};

/// Entry types the matrix operations work over.
pub trait Scalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialOrd
        + Zero
        + One
        + Neg<Output = Self>
        + Add<Output = Self>
        + Sub<Output = Self>
        + Mul<Output = Self>
        + Div<Output = Self>
{
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CyclicMatrixError {
    #[error("matrix must be square and non-empty, got {rows} rows and a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("entries must be non-negative (violated at row {row}, column {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("operands have mismatched sizes: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("no matrices given")]
    EmptyInput,
    #[error("coefficients must be non-negative")]
    NegativeCoefficient,
    #[error("index set must be a proper subset of the row indices")]
    IndexSetNotProper,
    #[error("index {0} out of range for size {1}")]
    IndexOutOfRange(usize, usize),
    #[error("row vector must be non-increasing and non-negative")]
    BadRowVector,
    #[error("prefix index {l} out of range for size {p}")]
    PrefixOutOfRange { l: usize, p: usize },
    #[error("defining vector must be non-increasing")]
    NotNonIncreasing,
}

/// Where a matrix sits relative to the cyclic-monotonicity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MonotoneClass {
    NotMonotone,
    Monotone,
    StrictlyMonotone,
}

impl MonotoneClass {
    /// Cyclically monotone rows (strict counts as monotone).
    pub fn is_monotone(self) -> bool {
        self >= MonotoneClass::Monotone
    }

    pub fn is_strict(self) -> bool {
        self == MonotoneClass::StrictlyMonotone
    }
}

impl fmt::Display for MonotoneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MonotoneClass::NotMonotone => "NotMonotone",
            MonotoneClass::Monotone => "Monotone",
            MonotoneClass::StrictlyMonotone => "StrictlyMonotone",
        };
        f.write_str(s)
    }
}

/// Regular/singular verdict for a monotone circulant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CirculantClass {
    Regular,
    /// The defining vector is `k` constant blocks of length `d ≥ 2` (maximal d).
    Singular {
        k: usize,
        d: usize,
    },
}

/// Square matrix of non-negative scalars, indexed mod p.
#[derive(Clone, PartialEq, Eq)]
pub struct CycMatrix<T> {
    p: usize,
    entries: Vec<T>,
}

impl<T: Scalar> CycMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, CyclicMatrixError> {
        let p = rows.len();
        if p == 0 {
            return Err(CyclicMatrixError::NotSquare { rows: 0, cols: 0 });
        }
        let mut entries = Vec::with_capacity(p * p);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(CyclicMatrixError::NotSquare {
                    rows: p,
                    cols: row.len(),
                });
            }
            for (k, x) in row.into_iter().enumerate() {
                if x < T::zero() {
                    return Err(CyclicMatrixError::NegativeEntry { row: j, col: k });
                }
                entries.push(x);
            }
        }
        Ok(CycMatrix { p, entries })
    }

    pub fn identity(p: usize) -> Self {
        let mut entries = vec![T::zero(); p * p];
        for j in 0..p {
            entries[j * p + j] = T::one();
        }
        CycMatrix { p, entries }
    }

    pub fn size(&self) -> usize {
        self.p
    }

    pub fn at(&self, j: usize, k: usize) -> &T {
        &self.entries[j * self.p + k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.p)
    }

    /// Classification against the monotone-row conditions.
    pub fn classify_monotone(&self) -> MonotoneClass {
        let p = self.p;
        for j in 0..p {
            for k in 0..p.saturating_sub(1) {
                if self.at(j, (j + k) % p) < self.at(j, (j + k + 1) % p) {
                    return MonotoneClass::NotMonotone;
                }
            }
        }
        let strict = if p == 1 {
            *self.at(0, 0) > T::zero()
        } else {
            (0..p).all(|j| self.at(j, j) > self.at(j, (j + 1) % p))
        };
        if strict {
            MonotoneClass::StrictlyMonotone
        } else {
            MonotoneClass::Monotone
        }
    }

    /// Simultaneous cyclic permutation of rows and columns: a'_{j,k} = a_{j+1,k+1}.
    ///
    /// Preserves both the monotone class and the determinant.
    pub fn cyclic_shift(&self) -> Self {
        let p = self.p;
        let mut entries = Vec::with_capacity(p * p);
        for j in 0..p {
            for k in 0..p {
                entries.push(self.at((j + 1) % p, (k + 1) % p).clone());
            }
        }
        CycMatrix { p, entries }
    }

    /// Rows/columns with indices in `remove` are deleted; `remove` must be a
    /// proper subset. An empty set returns the matrix unchanged.
    pub fn principal_submatrix(&self, remove: &[usize]) -> Result<Self, CyclicMatrixError> {
        let p = self.p;
        let mut drop = vec![false; p];
        for &i in remove {
            if i >= p {
                return Err(CyclicMatrixError::IndexOutOfRange(i, p));
            }
            drop[i] = true;
        }
        let keep: Vec<usize> = (0..p).filter(|&i| !drop[i]).collect();
        if keep.is_empty() {
            return Err(CyclicMatrixError::IndexSetNotProper);
        }
        let q = keep.len();
        let mut entries = Vec::with_capacity(q * q);
        for &j in &keep {
            for &k in &keep {
                entries.push(self.at(j, k).clone());
            }
        }
        Ok(CycMatrix { p: q, entries })
    }

    /// Add a non-increasing non-negative vector `c` to row `j`.
    ///
    /// The returned flag says whether the monotone class is preserved:
    /// `j = 0` always preserves, otherwise c₀ − c_{p−1} ≤ a_{j,p−1} − a_{j,0}
    /// is required.
    pub fn row_addition(&self, j: usize, c: &[T]) -> Result<(Self, bool), CyclicMatrixError> {
        let p = self.p;
        if j >= p {
            return Err(CyclicMatrixError::IndexOutOfRange(j, p));
        }
        if c.len() != p {
            return Err(CyclicMatrixError::SizeMismatch(c.len(), p));
        }
        if c.windows(2).any(|w| w[0] < w[1]) || c.iter().any(|x| *x < T::zero()) {
            return Err(CyclicMatrixError::BadRowVector);
        }
        let mut out = self.clone();
        for k in 0..p {
            out.entries[j * p + k] = self.at(j, k).clone() + c[k].clone();
        }
        let preserved = j == 0 || {
            let lhs = c[0].clone() - c[p - 1].clone();
            let rhs = self.at(j, p - 1).clone() - self.at(j, 0).clone();
            lhs <= rhs
        };
        Ok((out, preserved))
    }

    /// The proof-device family A^(ℓ)(x): first row becomes x on columns 0..=ℓ.
    pub fn substitute_prefix(&self, l: usize, x: T) -> Result<Self, CyclicMatrixError> {
        let p = self.p;
        if p < 2 || l > p - 2 {
            return Err(CyclicMatrixError::PrefixOutOfRange { l, p });
        }
        if x < T::zero() {
            return Err(CyclicMatrixError::NegativeEntry { row: 0, col: 0 });
        }
        let mut out = self.clone();
        for k in 0..=l {
            out.entries[k] = x.clone();
        }
        Ok(out)
    }

    /// Replace the whole first row by its smallest element a_{0,p−1}.
    ///
    /// For monotone input the determinant never increases, strictly decreases
    /// for strictly monotone input of size ≥ 2.
    pub fn flatten_first_row(&self) -> Self {
        let p = self.p;
        let v = self.at(0, p - 1).clone();
        let mut out = self.clone();
        for k in 0..p {
            out.entries[k] = v.clone();
        }
        out
    }
}

/// Non-negative linear combination Σ λ_k A_k.
pub fn conic_combination<T: Scalar>(
    mats: &[CycMatrix<T>],
    lambdas: &[T],
) -> Result<CycMatrix<T>, CyclicMatrixError> {
    if mats.is_empty() {
        return Err(CyclicMatrixError::EmptyInput);
    }
    if mats.len() != lambdas.len() {
        return Err(CyclicMatrixError::SizeMismatch(mats.len(), lambdas.len()));
    }
    if lambdas.iter().any(|l| *l < T::zero()) {
        return Err(CyclicMatrixError::NegativeCoefficient);
    }
    let p = mats[0].p;
    for m in mats {
        if m.p != p {
            return Err(CyclicMatrixError::SizeMismatch(m.p, p));
        }
    }
    let mut entries = vec![T::zero(); p * p];
    for (m, l) in mats.iter().zip(lambdas) {
        for (acc, x) in entries.iter_mut().zip(&m.entries) {
            *acc = acc.clone() + l.clone() * x.clone();
        }
    }
    Ok(CycMatrix { p, entries })
}

/// Circulant matrix from its defining vector: row j is `c` rotated right j times.
pub fn circulant<T: Scalar>(c: &[T]) -> Result<CycMatrix<T>, CyclicMatrixError> {
    let n = c.len();
    if n == 0 {
        return Err(CyclicMatrixError::NotSquare { rows: 0, cols: 0 });
    }
    for (k, x) in c.iter().enumerate() {
        if *x < T::zero() {
            return Err(CyclicMatrixError::NegativeEntry { row: 0, col: k });
        }
    }
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            entries.push(c[(n + k - j) % n].clone());
        }
    }
    Ok(CycMatrix { p: n, entries })
}

/// Singularity classification of a monotone circulant by block structure.
///
/// Singular iff the vector splits into k constant blocks of length d ≥ 2; the
/// maximal such d is reported. The degenerate singleton zero vector is the
/// one monotone circulant that is singular without such a decomposition
/// (`[[0]]` has rank 0); it is reported as `Singular { k: 1, d: 1 }` so the
/// verdict always agrees with the exact rank.
pub fn classify_circulant(c: &[Rational]) -> Result<CirculantClass, CyclicMatrixError> {
    let n = c.len();
    if n == 0 {
        return Err(CyclicMatrixError::NotSquare { rows: 0, cols: 0 });
    }
    if c.windows(2).any(|w| w[0] < w[1]) || c[n - 1] < Rational::zero() {
        return Err(CyclicMatrixError::NotNonIncreasing);
    }
    if n == 1 && c[0].is_zero() {
        return Ok(CirculantClass::Singular { k: 1, d: 1 });
    }
    for d in (2..=n).rev() {
        if n % d != 0 {
            continue;
        }
        let blocks_constant = (0..n / d).all(|b| {
            let first = &c[b * d];
            (1..d).all(|i| &c[b * d + i] == first)
        });
        if blocks_constant {
            return Ok(CirculantClass::Singular { k: n / d, d });
        }
    }
    Ok(CirculantClass::Regular)
}

/// Determinant of the circulant with defining vector `c`, via the
/// root-of-unity product ∏_k (c₀ + c₁ω_k + … + c_{n−1}ω_k^{n−1}) evaluated in
/// complex extended precision.
///
/// The error bound is a forward-error estimate from operation counts; at the
/// default 128 bits it is far below any quantity of interest at desk scale.
pub fn circulant_determinant(
    c: &[Rational],
    bits: usize,
) -> Result<CirculantDet, CyclicMatrixError> {
    let n = c.len();
    if n == 0 {
        return Err(CyclicMatrixError::NotSquare { rows: 0, cols: 0 });
    }
    let coeffs: Vec<Real> = c.iter().map(|q| Real::from_rational(q, bits)).collect();
    let omegas = roots_of_unity(n, bits);
    let mut product = Complex::one(bits);
    for omega in &omegas {
        // factor = sum_j c_j * omega^j, powers accumulated
        let mut power = Complex::one(bits);
        let mut factor = Complex::from_real(coeffs[0].clone());
        for coeff in &coeffs[1..] {
            power = &power * omega;
            factor = &factor + &power.scale(coeff);
        }
        product = &product * &factor;
    }
    // forward-error estimate: the magnitudes are bounded by (sum |c_j|)^n and
    // the computation performs O(n^2) rounded operations
    let row_sum = coeffs.iter().fold(Real::zero(), |acc, x| acc + x.abs());
    let magnitude = row_sum.max(Real::one()).powi(n as i64);
    let op_count = Real::from_u64((8 * n * n + 64) as u64, 32);
    let error_bound = magnitude * op_count * Real::pow2(4 - bits as isize, 32);
    Ok(CirculantDet {
        value: product.re,
        imag: product.im,
        error_bound,
    })
}

/// Result of the root-of-unity determinant evaluation.
#[derive(Clone, Debug)]
pub struct CirculantDet {
    pub value: Real,
    /// Imaginary residue of the product; should vanish within the bound.
    pub imag: Real,
    pub error_bound: Real,
}

/// Seeded generator of (strictly) cyclically monotone integer matrices.
///
/// Each row is `p` integers from `[0, bound]` sorted non-increasingly and laid
/// out starting at the diagonal. With `strict`, a tie in the first step is
/// broken by incrementing the diagonal entry (and a zero 1×1 matrix is bumped
/// to 1).
pub fn random_monotone(p: usize, strict: bool, bound: u64, seed: u64) -> CycMatrix<Rational> {
    assert!(p >= 1 && bound >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_monotone_with(&mut rng, p, strict, bound)
}

/// Same as [`random_monotone`] but drawing from a caller-owned RNG.
pub fn random_monotone_with(
    rng: &mut impl Rng,
    p: usize,
    strict: bool,
    bound: u64,
) -> CycMatrix<Rational> {
    let mut rows = Vec::with_capacity(p);
    for j in 0..p {
        let mut vals: Vec<u64> = (0..p).map(|_| rng.random_range(0..=bound)).collect();
        vals.sort_unstable_by(|a, b| b.cmp(a));
        if strict {
            if p == 1 {
                if vals[0] == 0 {
                    vals[0] = 1;
                }
            } else if vals[0] == vals[1] {
                vals[0] += 1;
            }
        }
        let mut row = vec![Rational::zero(); p];
        for (offset, v) in vals.into_iter().enumerate() {
            row[(j + offset) % p] = Rational::from_integer(v.into());
        }
        rows.push(row);
    }
    CycMatrix::from_rows(rows).expect("generated entries are non-negative")
}

impl CycMatrix<Rational> {
    /// Exact determinant: permutation sum for p ≤ 8, fraction-free elimination
    /// beyond. The two code paths cross-validate each other in tests.
    pub fn determinant(&self) -> Rational {
        if self.p <= 8 {
            self.det_permutation_sum()
        } else {
            self.det_fraction_free()
        }
    }

    /// Leibniz expansion over all p! permutations (p ≤ 8 only).
    pub fn det_permutation_sum(&self) -> Rational {
        assert!(self.p <= 8, "permutation sum is restricted to p <= 8");
        if let Some(ints) = self.as_small_integers() {
            return Rational::from_integer(leibniz_i128(&ints, self.p).into());
        }
        let p = self.p;
        let mut perm: Vec<usize> = (0..p).collect();
        let mut det = Rational::zero();
        let mut sign_positive = true;
        // Heap's algorithm; each swap flips the permutation sign
        let mut counters = vec![0usize; p];
        let term = |perm: &[usize], positive: bool, det: &mut Rational| {
            let mut prod = Rational::one();
            for (j, &k) in perm.iter().enumerate() {
                prod *= self.at(j, k).clone();
            }
            if positive {
                *det += prod;
            } else {
                *det -= prod;
            }
        };
        term(&perm, sign_positive, &mut det);
        let mut i = 1;
        while i < p {
            if counters[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(counters[i], i);
                }
                sign_positive = !sign_positive;
                term(&perm, sign_positive, &mut det);
                counters[i] += 1;
                i = 1;
            } else {
                counters[i] = 0;
                i += 1;
            }
        }
        det
    }

    /// Bareiss-style fraction-free elimination; exact over rationals.
    pub fn det_fraction_free(&self) -> Rational {
        let p = self.p;
        let mut m: Vec<Vec<Rational>> = self.rows().map(|r| r.to_vec()).collect();
        let mut sign_positive = true;
        let mut prev = Rational::one();
        for k in 0..p.saturating_sub(1) {
            if m[k][k].is_zero() {
                let Some(r) = (k + 1..p).find(|&r| !m[r][k].is_zero()) else {
                    return Rational::zero();
                };
                m.swap(k, r);
                sign_positive = !sign_positive;
            }
            let pivot_row = m[k].clone();
            for i in k + 1..p {
                let lead = m[i][k].clone();
                for j in k + 1..p {
                    let v = (&pivot_row[k] * &m[i][j] - &lead * &pivot_row[j]) / &prev;
                    m[i][j] = v;
                }
                m[i][k] = Rational::zero();
            }
            prev = m[k][k].clone();
        }
        let det = m[p - 1][p - 1].clone();
        if sign_positive {
            det
        } else {
            -det
        }
    }

    /// Entries as i128 when that is exact and the Leibniz sum cannot overflow.
    fn as_small_integers(&self) -> Option<Vec<i128>> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut max_abs: i128 = 0;
        for q in &self.entries {
            if !q.is_integer() {
                return None;
            }
            let v: i128 = q.numer().try_into().ok()?;
            max_abs = max_abs.max(v.checked_abs()?);
            out.push(v);
        }
        // p! * max^p must stay far inside i128
        let factorial: i128 = (1..=self.p as i128).product();
        let mut bound: i128 = factorial;
        for _ in 0..self.p {
            bound = bound.checked_mul(max_abs.max(1))?;
        }
        let _ = bound; // overflow-checked above; the value itself is not needed
        Some(out)
    }

    pub fn to_real(&self, bits: usize) -> CycMatrix<Real> {
        CycMatrix {
            p: self.p,
            entries: self
                .entries
                .iter()
                .map(|q| Real::from_rational(q, bits))
                .collect(),
        }
    }
}

fn leibniz_i128(entries: &[i128], p: usize) -> i128 {
    let mut perm: Vec<usize> = (0..p).collect();
    let mut counters = vec![0usize; p];
    let mut det: i128 = 0;
    let mut sign: i128 = 1;
    let term = |perm: &[usize], sign: i128| -> i128 {
        let mut prod: i128 = sign;
        for (j, &k) in perm.iter().enumerate() {
            prod *= entries[j * p + k];
        }
        prod
    };
    det += term(&perm, sign);
    let mut i = 1;
    while i < p {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            det += term(&perm, sign);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    det
}

impl CycMatrix<Real> {
    /// Best-effort determinant by partial-pivot elimination, with a heuristic
    /// first-order error estimate (not a certified enclosure).
    pub fn determinant_with_error(&self) -> (Real, Real) {
        let p = self.p;
        let bits = self
            .entries
            .iter()
            .map(Real::bits)
            .max()
            .unwrap_or(crate::scalar::DEFAULT_BITS)
            .max(32);
        let mut m: Vec<Vec<Real>> = self.rows().map(|r| r.to_vec()).collect();
        let mut det = Real::one().with_bits(bits);
        let mut negate = false;
        let mut scale = Real::one().with_bits(32);
        for k in 0..p {
            let active_max = (k..p)
                .flat_map(|i| m[i][k..].iter())
                .fold(Real::zero(), |acc, x| acc.max(x.abs()));
            scale = scale * active_max.clone().max(Real::one());
            let pivot_row = (k..p)
                .max_by(|&a, &b| {
                    m[a][k]
                        .abs()
                        .partial_cmp(&m[b][k].abs())
                        .expect("reals are ordered")
                })
                .expect("non-empty range");
            if m[pivot_row][k].is_zero() {
                return (Real::zero(), self.float_det_error(&scale, bits));
            }
            if pivot_row != k {
                m.swap(k, pivot_row);
                negate = !negate;
            }
            det = det * m[k][k].clone();
            let pivot = m[k].clone();
            for i in k + 1..p {
                let factor = &m[i][k] / &pivot[k];
                for j in k..p {
                    let v = &m[i][j] - &(&factor * &pivot[j]);
                    m[i][j] = v;
                }
            }
        }
        if negate {
            det = -det;
        }
        let bound = self.float_det_error(&scale, bits);
        (det, bound)
    }

    pub fn determinant(&self) -> Real {
        self.determinant_with_error().0
    }

    fn float_det_error(&self, scale: &Real, bits: usize) -> Real {
        let p = self.p as u64;
        scale.clone() * Real::from_u64(p * p * p + 16, 32) * Real::pow2(4 - bits as isize, 32)
    }
}

impl<T: Scalar + fmt::Display> fmt::Debug for CycMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CycMatrix(p={})", self.p)?;
        for row in self.rows() {
            write!(f, "  [")?;
            for (k, x) in row.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
