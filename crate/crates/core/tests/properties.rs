//! Cross-module invariant suites: structural properties checked by
//! enumeration, seeded random sweeps, and proptest.

use std::cmp::Ordering;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use altbase::cyclic_matrix::{
    circulant, circulant_determinant, classify_circulant, conic_combination, random_monotone_with,
    CirculantClass, CycMatrix, MonotoneClass,
};
use altbase::digit_seq::{random_valid_list, EpDigits};
use altbase::numeration::{greedy_expand, is_admissible, quasi_greedy_unity, AdmissibilityVerdict};
use altbase::power_series::{AltSeries, PsiMap};
use altbase::solver::{solve_base, SolverConfig};
use altbase::{Rational, Real};

fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

// ---------------------------------------------------------------------------
// cyclic_matrix

#[test]
fn cyclic_shift_preserves_class_and_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let p = rng.random_range(1..=6);
        let strict = rng.random_bool(0.5);
        let m = random_monotone_with(&mut rng, p, strict, 9);
        let shifted = m.cyclic_shift();
        assert_eq!(shifted.classify_monotone(), m.classify_monotone());
        assert_eq!(shifted.determinant(), m.determinant());
    }
}

#[test]
fn principal_submatrix_preserves_class_exhaustively() {
    // every proper removal set, p <= 5
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let p = rng.random_range(2..=5usize);
        let strict = rng.random_bool(0.5);
        let m = random_monotone_with(&mut rng, p, strict, 9);
        let class = m.classify_monotone();
        for mask in 0u32..(1 << p) - 1 {
            let remove: Vec<usize> = (0..p).filter(|i| mask & (1 << i) != 0).collect();
            let sub = m.principal_submatrix(&remove).unwrap();
            assert!(
                sub.classify_monotone() >= class,
                "class degraded for remove set {remove:?}"
            );
        }
    }
}

#[test]
fn conic_combinations_of_monotone_stay_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..100 {
        let p = rng.random_range(1..=5usize);
        let a = random_monotone_with(&mut rng, p, false, 9);
        let b = random_monotone_with(&mut rng, p, true, 9);
        let la = rat(rng.random_range(0..=4));
        let lb = rat(rng.random_range(0..=4));
        let sum = conic_combination(&[a, b], &[la, lb.clone()]).unwrap();
        assert!(sum.classify_monotone().is_monotone());
        if lb > rat(0) {
            assert!(sum.classify_monotone().is_strict());
        }
    }
}

#[test]
fn substitute_prefix_determinant_monotone_in_x() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..60 {
        let p = rng.random_range(2..=5usize);
        let strict = rng.random_bool(0.5);
        let m = random_monotone_with(&mut rng, p, strict, 9);
        for l in 0..=(p - 2) {
            let mut last = None;
            for x in 0..10i64 {
                let det = m.substitute_prefix(l, rat(x)).unwrap().determinant();
                if let Some(prev) = last {
                    if strict {
                        assert!(det > prev, "not strictly increasing at x={x}, l={l}");
                    } else {
                        assert!(det >= prev, "decreased at x={x}, l={l}");
                    }
                }
                last = Some(det);
            }
        }
    }
}

#[test]
fn flatten_first_row_never_raises_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..150 {
        let p = rng.random_range(2..=6usize);
        let strict = rng.random_bool(0.5);
        let m = random_monotone_with(&mut rng, p, strict, 9);
        let flattened = m.flatten_first_row();
        assert!(flattened.classify_monotone().is_monotone());
        if strict {
            assert!(m.determinant() > flattened.determinant());
        } else {
            assert!(m.determinant() >= flattened.determinant());
        }
    }
}

#[test]
fn circulant_product_formula_tracks_exact_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let tol = Real::parse_decimal("1e-10", 64).unwrap();
    for _ in 0..60 {
        let n = rng.random_range(1..=8usize);
        let mut c: Vec<Rational> = (0..n).map(|_| rat(rng.random_range(0..=9))).collect();
        c.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let exact = circulant(&c).unwrap().determinant();
        let approx = circulant_determinant(&c, 128).unwrap();
        let exact_r = Real::from_rational(&exact, 128);
        let diff = (&approx.value - &exact_r).abs();
        assert!(diff <= approx.error_bound, "outside reported bound");
        let scale = exact_r.abs().max(Real::one());
        assert!(&diff / &scale < tol, "relative error too large: {diff}");
    }
}

#[test]
fn circulant_block_rule_matches_rank_sampled() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..100 {
        let n = rng.random_range(1..=6usize);
        let mut c: Vec<Rational> = (0..n).map(|_| rat(rng.random_range(0..=3))).collect();
        c.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let det = circulant(&c).unwrap().determinant();
        match classify_circulant(&c).unwrap() {
            CirculantClass::Singular { k, d } => {
                assert_eq!(det, rat(0), "declared singular but det = {det}");
                assert_eq!(k * d, n);
                assert!(d >= 2 || n == 1, "d = {d} for n = {n}");
            }
            CirculantClass::Regular => assert_ne!(det, rat(0), "declared regular but singular"),
        }
    }
}

proptest! {
    #[test]
    fn determinant_sign_small_matrices(
        rows in proptest::collection::vec(proptest::collection::vec(0i64..=9, 4), 4)
    ) {
        let m = CycMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
        ).unwrap();
        let class = m.classify_monotone();
        if class.is_monotone() {
            let det = m.determinant();
            prop_assert!(det >= rat(0));
            if class.is_strict() {
                prop_assert!(det >= rat(1));
            }
        }
        // cyclic shift preserves class and determinant for any matrix
        let shifted = m.cyclic_shift();
        prop_assert_eq!(shifted.classify_monotone(), class);
        prop_assert_eq!(shifted.determinant(), m.determinant());
    }
}

// ---------------------------------------------------------------------------
// digit_seq

fn arb_ep() -> impl Strategy<Value = EpDigits> {
    (
        proptest::collection::vec(0u64..=9, 0..4),
        proptest::collection::vec(0u64..=9, 1..5),
    )
        .prop_map(|(pre, per)| EpDigits::new(pre, per).unwrap())
}

proptest! {
    #[test]
    fn lex_compare_is_reflexive_and_antisymmetric(a in arb_ep(), b in arb_ep()) {
        prop_assert_eq!(a.lex_compare(&a), Ordering::Equal);
        match a.lex_compare(&b) {
            Ordering::Less => prop_assert_eq!(b.lex_compare(&a), Ordering::Greater),
            Ordering::Greater => prop_assert_eq!(b.lex_compare(&a), Ordering::Less),
            Ordering::Equal => prop_assert_eq!(&a, &b),
        }
    }

    #[test]
    fn lex_compare_is_transitive(a in arb_ep(), b in arb_ep(), c in arb_ep()) {
        let mut v = [a, b, c];
        v.sort();
        prop_assert!(v[0] <= v[1] && v[1] <= v[2] && v[0] <= v[2]);
    }

    #[test]
    fn canonicalization_is_idempotent(s in arb_ep()) {
        let again = EpDigits::new(s.preperiod().to_vec(), s.period().to_vec()).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn shift_matches_digit_reindexing(s in arb_ep(), n in 0usize..20) {
        let shifted = s.shift(n);
        for k in 0..30 {
            prop_assert_eq!(shifted.digit_at(k), s.digit_at(n + k));
        }
    }
}

#[test]
fn lex_compare_agrees_with_truncated_oracle() {
    // naive digit-by-digit comparison out to four decision windows
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..10_000 {
        let mk = |rng: &mut ChaCha8Rng| {
            let m = rng.random_range(0..4usize);
            let q = rng.random_range(1..5usize);
            let pre: Vec<u64> = (0..m).map(|_| rng.random_range(0..=9)).collect();
            let per: Vec<u64> = (0..q).map(|_| rng.random_range(0..=9)).collect();
            EpDigits::new(pre, per).unwrap()
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let window = 4 * a.joint_window(&b);
        let naive = (0..window)
            .map(|n| a.digit_at(n).cmp(&b.digit_at(n)))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal);
        assert_eq!(a.lex_compare(&b), naive);
    }
}

#[test]
fn valid_lists_satisfy_shift_condition_beyond_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    for _ in 0..50 {
        let list = random_valid_list(&mut rng, 4, 9, 3, 4);
        assert!(list.shift_spot_check(200).is_none());
    }
}

// ---------------------------------------------------------------------------
// power_series

fn random_point(rng: &mut ChaCha8Rng, p: usize, bits: usize) -> Vec<Real> {
    (0..p)
        .map(|_| {
            let v = rng.random_range(0.05..0.95f64);
            Real::from_f64(v, bits)
        })
        .collect()
}

#[test]
fn closed_form_agrees_with_truncation_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let eps = Real::pow2(-80, 32);
    for _ in 0..1000 {
        let p = rng.random_range(1..=4usize);
        let m = rng.random_range(0..3usize);
        let q = rng.random_range(1..4usize);
        let lead = rng.random_range(1..=9u64);
        let mut digits: Vec<u64> = vec![lead];
        for _ in 1..(m + q) {
            digits.push(rng.random_range(0..=9));
        }
        let mut period = digits.split_off(m);
        if period.iter().all(|&d| d == 0) {
            period[0] = 1;
        }
        let Ok(coeffs) = EpDigits::new(digits, period) else {
            continue;
        };
        let Ok(series) = AltSeries::new(p, coeffs) else {
            continue;
        };
        let y = random_point(&mut rng, p, 128);
        let exact = series.eval(&y).unwrap();
        let trunc = series.eval_truncated(&y, &eps).unwrap();
        let diff = (&exact.value - &trunc.value).abs();
        assert!(
            diff <= trunc.error_bound,
            "diff {diff} exceeds {}",
            trunc.error_bound
        );
    }
}

#[test]
fn scaled_jacobian_rows_satisfy_derivative_chain() {
    // row i of J·diag(y), read cyclically from the diagonal, is the chain
    // y_i ∂ψ_i/∂y_i > y_{i+1} ∂ψ_i/∂y_{i+1} >= ... >= 0
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    for _ in 0..100 {
        let list = random_valid_list(&mut rng, 4, 9, 3, 4);
        let psi = PsiMap::from_parry(&list).unwrap();
        let y = random_point(&mut rng, list.p(), 128);
        let scaled = psi.scaled_jacobian(&y).unwrap();
        let p = list.p();
        for i in 0..p {
            let diag = scaled.at(i, i);
            let next = scaled.at(i, (i + 1) % p);
            assert!(
                diag > next || p == 1,
                "first chain step not strict at row {i}"
            );
            for k in 0..p - 1 {
                let a = scaled.at(i, (i + k) % p);
                let b = scaled.at(i, (i + k + 1) % p);
                assert!(a >= b, "chain not monotone at row {i}, step {k}");
            }
            assert!(!scaled.at(i, (i + p - 1) % p).is_negative());
        }
        assert_eq!(scaled.classify_monotone(), MonotoneClass::StrictlyMonotone);
    }
}

// ---------------------------------------------------------------------------
// numeration

#[test]
fn expansions_preserve_order_of_reals() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    let cfg = SolverConfig::default();
    let mut bases = Vec::new();
    for _ in 0..8 {
        let list = random_valid_list(&mut rng, 3, 9, 2, 3);
        if let Ok((base, _)) = solve_base(&list, &cfg) {
            bases.push(base);
        }
    }
    assert!(!bases.is_empty());
    let mut checked = 0;
    for _ in 0..1000 {
        let base = &bases[rng.random_range(0..bases.len())];
        let a = rng.random_range(0.0..1.0f64);
        let b = rng.random_range(0.0..1.0f64);
        if (a - b).abs() < 1e-9 {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let lo_digits = greedy_expand(base, &Real::from_f64(lo, 128), 30)
            .unwrap()
            .digits;
        let hi_digits = greedy_expand(base, &Real::from_f64(hi, 128), 30)
            .unwrap()
            .digits;
        assert!(
            lo_digits <= hi_digits,
            "order violated: {lo} -> {lo_digits:?}, {hi} -> {hi_digits:?}"
        );
        checked += 1;
    }
    assert!(checked > 900);
}

#[test]
fn greedy_expansions_are_admissible_for_their_own_list() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let cfg = SolverConfig::default();
    for _ in 0..20 {
        let list = random_valid_list(&mut rng, 3, 9, 2, 3);
        let Ok((base, _)) = solve_base(&list, &cfg) else {
            continue;
        };
        for _ in 0..10 {
            let x = rng.random_range(0.0..1.0f64);
            let digits = greedy_expand(&base, &Real::from_f64(x, 128), 25)
                .unwrap()
                .digits;
            match is_admissible(&digits, &list) {
                AdmissibilityVerdict::Inadmissible(n) => {
                    panic!("greedy expansion of {x} inadmissible at {n}: {digits:?}")
                }
                AdmissibilityVerdict::Admissible | AdmissibilityVerdict::TightAtWindow(_) => {}
            }
        }
    }
}

#[test]
fn remainders_stay_in_their_half_open_ranges() {
    let mut rng = ChaCha8Rng::seed_from_u64(89);
    let cfg = SolverConfig::default();
    for _ in 0..10 {
        let list = random_valid_list(&mut rng, 3, 9, 2, 3);
        let Ok((base, _)) = solve_base(&list, &cfg) else {
            continue;
        };
        for n in [1usize, 5, 17] {
            let x = Real::from_f64(rng.random_range(0.0..1.0f64), 128);
            let g = greedy_expand(&base, &x, n).unwrap();
            assert!(!g.remainder.is_negative() && g.remainder < Real::one());
            for l in 0..base.p() {
                let qg = quasi_greedy_unity(&base, l, n).unwrap();
                assert!(qg.remainder.is_positive() && qg.remainder <= Real::one());
                // the quasi-greedy expansion of unity reconstructs 1
                let err = (qg.reconstruct() - Real::one()).abs();
                assert!(err < Real::pow2(-64, 32), "unity off by {err}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// solver

#[test]
fn recovered_bases_have_betas_strictly_above_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let cfg = SolverConfig::default();
    for _ in 0..25 {
        let list = random_valid_list(&mut rng, 4, 9, 3, 4);
        let (base, cert) = solve_base(&list, &cfg).unwrap();
        for b in base.betas() {
            assert!(*b > Real::one());
        }
        assert!(cert.residual_inf < Real::from_f64(cfg.tol, 64));
    }
}
