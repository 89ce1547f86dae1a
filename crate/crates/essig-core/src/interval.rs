//! Expected signature of one-dimensional Brownian motion on `[-1, 1]`.
//!
//! In one dimension a level-`n` tensor is a single `e1^(x)n` coefficient,
//! so each level is a plain polynomial in the starting point `x`. Three
//! independent routes produce the same levels and are cross-checked
//! exactly: the closed form, the ODE recursion
//! `rho_n'' = -rho_(n-2) - 2 rho_(n-1)'` with zero boundary data, and the
//! two-point exit enumeration.

use crate::scalar::{Rational, Scalar};

/// Dense univariate polynomial over rationals, coefficients by ascending
/// power, trailing zeros stripped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivarPoly {
    coeffs: Vec<Rational>,
}

impl UnivarPoly {
    pub fn zero() -> Self {
        UnivarPoly { coeffs: Vec::new() }
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UnivarPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![<Rational as Scalar>::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&Rational::from_int(-1)))
    }

    pub fn scale(&self, lambda: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * lambda).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out =
            vec![<Rational as Scalar>::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_int(i as i64))
            .collect();
        Self::new(coeffs)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![<Rational as Scalar>::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / Rational::from_int(i as i64 + 1)),
        );
        Self::new(coeffs)
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        let mut acc = <Rational as Scalar>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn evaluate_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    /// `(a + b x)^n` by repeated multiplication.
    pub fn affine_power(a: i64, b: i64, n: usize) -> Self {
        let base = Self::new(vec![Rational::from_int(a), Rational::from_int(b)]);
        let mut acc = Self::constant(Rational::from_int(1));
        for _ in 0..n {
            acc = acc.mul(&base);
        }
        acc
    }
}

fn factorial(n: usize) -> Rational {
    let mut acc = Rational::from_int(1);
    for k in 2..=n {
        acc *= Rational::from_int(k as i64);
    }
    acc
}

/// Closed form for level `n >= 2`:
/// `(1/(2 n!)) (1 - x^2) ((1 - x)^(n-1) - (-1 - x)^(n-1))`.
pub fn closed_form_level(n: usize) -> UnivarPoly {
    assert!(n >= 2, "levels 0 and 1 are the constants 1 and 0");
    let one_minus_sq = UnivarPoly::new(vec![
        Rational::from_int(1),
        <Rational as Scalar>::zero(),
        Rational::from_int(-1),
    ]);
    let diff = UnivarPoly::affine_power(1, -1, n - 1).sub(&UnivarPoly::affine_power(-1, -1, n - 1));
    let scale = Rational::from_int(1) / (Rational::from_int(2) * factorial(n));
    one_minus_sq.mul(&diff).scale(&scale)
}

/// Levels `0..=n` by the ODE recursion: `rho_k'' = -rho_(k-2) - 2 rho_(k-1)'`
/// with `rho_k(1) = rho_k(-1) = 0` for `k >= 2`. The double antiderivative
/// is corrected by the unique affine term matching the boundary conditions.
pub fn ode_recursion(truncation: usize) -> Vec<UnivarPoly> {
    let mut levels = Vec::with_capacity(truncation + 1);
    levels.push(UnivarPoly::constant(Rational::from_int(1)));
    if truncation >= 1 {
        levels.push(UnivarPoly::zero());
    }
    for k in 2..=truncation {
        let rhs = levels[k - 2]
            .scale(&Rational::from_int(-1))
            .sub(&levels[k - 1].derivative().scale(&Rational::from_int(2)));
        let particular = rhs.antiderivative().antiderivative();
        let at_plus = particular.evaluate(&Rational::from_int(1));
        let at_minus = particular.evaluate(&Rational::from_int(-1));
        let half = crate::scalar::ratio(1, 2);
        let a = -(&at_plus + &at_minus) * &half;
        let b = -(&at_plus - &at_minus) * &half;
        levels.push(particular.add(&UnivarPoly::new(vec![a, b])));
    }
    levels
}

/// Independent oracle: the walk exits at `1` with probability `(x+1)/2` and
/// at `-1` with probability `(1-x)/2`; level `n` is the exit-increment
/// moment `sum_p P(exit at p) (p - x)^n / n!`.
pub fn exit_enumeration_level(n: usize) -> UnivarPoly {
    let half = crate::scalar::ratio(1, 2);
    let p_plus = UnivarPoly::new(vec![half.clone(), half.clone()]); // (x+1)/2
    let p_minus = UnivarPoly::new(vec![half.clone(), -half]); // (1-x)/2
    let inc_plus = UnivarPoly::affine_power(1, -1, n); // (1-x)^n
    let inc_minus = UnivarPoly::affine_power(-1, -1, n); // (-1-x)^n
    let inv_fact = Rational::from_int(1) / factorial(n);
    inc_plus
        .mul(&p_plus)
        .add(&inc_minus.mul(&p_minus))
        .scale(&inv_fact)
}

/// JSON: `{"truncation":N,"levels":[[coeff,...],...]}` with rational
/// coefficient strings by ascending power.
pub fn levels_to_json(levels: &[UnivarPoly]) -> serde_json::Value {
    let arr: Vec<serde_json::Value> = levels
        .iter()
        .map(|p| serde_json::Value::Array(p.coeffs().iter().map(|c| c.to_json()).collect()))
        .collect();
    serde_json::json!({
        "truncation": levels.len().saturating_sub(1),
        "levels": arr,
    })
}
