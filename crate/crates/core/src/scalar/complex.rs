//! Minimal complex arithmetic over [`Real`], plus roots of unity.

use std::ops::{Add, Mul, Sub};

use super::real::Real;
use super::trig;

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        Complex {
            im: Real::zero(),
            re,
        }
    }

    pub fn one(bits: usize) -> Self {
        Complex::new(Real::one().with_bits(bits), Real::zero())
    }

    pub fn modulus(&self) -> Real {
        (&self.re * &self.re + &self.im * &self.im).sqrt()
    }

    pub fn scale(&self, factor: &Real) -> Self {
        Complex::new(&self.re * factor, &self.im * factor)
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        Complex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

/// The n-th roots of unity ω_k = exp(2πik/n), k = 0, …, n−1.
pub fn roots_of_unity(n: usize, bits: usize) -> Vec<Complex> {
    assert!(n >= 1);
    let wbits = bits + 32;
    let two_pi = trig::pi(wbits) * Real::from_u64(2, wbits);
    let mut roots = Vec::with_capacity(n);
    roots.push(Complex::one(bits));
    for k in 1..n {
        let theta = &two_pi * &Real::from_u64(k as u64, wbits) / Real::from_u64(n as u64, wbits);
        let (sin, cos) = trig::sin_cos(&theta, bits);
        roots.push(Complex::new(cos, sin));
    }
    roots
}
