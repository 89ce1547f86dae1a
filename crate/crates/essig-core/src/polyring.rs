//! Exact bivariate polynomials over rationals, with the calculus used by
//! the disk solver: formal partial derivatives, the Laplacian, homogeneous
//! decomposition, and exact division by a fixed divisor.
//!
//! Storage is a sparse monomial map `(i, j) -> coefficient` for
//! `z1^i z2^j`; the parity structure of the disk solution keeps roughly
//! half of all monomials at zero, so dense triangular storage would waste
//! most of its entries.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::{parse_rational, Rational, Scalar};

/// Remainder left by a division that was expected to be exact.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("division is not exact; remainder {remainder}")]
pub struct RemainderError {
    pub quotient: BivarPoly,
    pub remainder: BivarPoly,
}

/// A bivariate polynomial in `z1, z2` with rational coefficients.
///
/// Invariant: no explicit zero coefficients are stored, and `degree` is the
/// cached total degree (`None` for the zero polynomial).
#[derive(Clone, PartialEq, Eq)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Rational>,
    degree: Option<u32>,
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.monomials() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if i > 0 {
                write!(f, "*z1^{i}")?;
            }
            if j > 0 {
                write!(f, "*z2^{j}")?;
            }
        }
        Ok(())
    }
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly {
            terms: BTreeMap::new(),
            degree: None,
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_int(n))
    }

    /// `c * z1^i * z2^j`.
    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        let degree = terms.keys().next().map(|&(i, j)| i + j);
        BivarPoly { terms, degree }
    }

    /// The fixed boundary factor `1 - z1^2 - z2^2`.
    pub fn disk_factor() -> Self {
        let mut p = Self::from_int(1);
        p = p.sub(&Self::monomial(2, 0, Rational::from_int(1)));
        p.sub(&Self::monomial(0, 2, Rational::from_int(1)))
    }

    fn from_terms(terms: BTreeMap<(u32, u32), Rational>) -> Self {
        let degree = terms.keys().map(|&(i, j)| i + j).max();
        BivarPoly { terms, degree }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.degree
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(<Rational as Scalar>::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&key, c) in &rhs.terms {
            let entry = terms.entry(key).or_insert_with(<Rational as Scalar>::zero);
            *entry += c;
            if Scalar::is_zero(entry) {
                terms.remove(&key);
            }
        }
        Self::from_terms(terms)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(&k, c)| (k, -c)).collect();
        Self::from_terms(terms)
    }

    pub fn scale(&self, lambda: &Rational) -> Self {
        if Scalar::is_zero(lambda) {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(&k, c)| (k, c * lambda)).collect();
        Self::from_terms(terms)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut terms: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                let key = (i1 + i2, j1 + j2);
                let entry = terms.entry(key).or_insert_with(<Rational as Scalar>::zero);
                *entry += c1 * c2;
            }
        }
        terms.retain(|_, c| !Scalar::is_zero(c));
        Self::from_terms(terms)
    }

    /// Formal partial derivative; `axis` is 1 or 2.
    pub fn partial(&self, axis: u8) -> Self {
        assert!(axis == 1 || axis == 2, "axis must be 1 or 2");
        let mut terms = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            let (exp, key) = match axis {
                1 if i > 0 => (i, (i - 1, j)),
                2 if j > 0 => (j, (i, j - 1)),
                _ => continue,
            };
            terms.insert(key, c * Rational::from_int(exp as i64));
        }
        Self::from_terms(terms)
    }

    pub fn laplacian(&self) -> Self {
        self.partial(1).partial(1).add(&self.partial(2).partial(2))
    }

    /// Decomposition into homogeneous parts, keyed by degree. Empty map for
    /// the zero polynomial; the parts sum back to `self`.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, BivarPoly> {
        let mut parts: BTreeMap<u32, BTreeMap<(u32, u32), Rational>> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            parts.entry(i + j).or_default().insert((i, j), c.clone());
        }
        parts
            .into_iter()
            .map(|(deg, terms)| (deg, Self::from_terms(terms)))
            .collect()
    }

    /// The homogeneous part of top total degree (the "leading terms"), or
    /// zero for the zero polynomial.
    pub fn leading_part(&self) -> Self {
        match self.degree {
            None => Self::zero(),
            Some(d) => {
                let terms = self
                    .terms
                    .iter()
                    .filter(|(&(i, j), _)| i + j == d)
                    .map(|(&k, c)| (k, c.clone()))
                    .collect();
                Self::from_terms(terms)
            }
        }
    }

    /// Exact multivariate division: returns `r` with `self = q * r` when the
    /// division leaves no remainder, reducing by the leading monomial of `q`
    /// in lexicographic order (`z1 > z2`). Otherwise the error carries the
    /// quotient computed so far and the nonzero remainder.
    pub fn divide_exact(&self, q: &Self) -> Result<Self, RemainderError> {
        assert!(!q.is_zero(), "division by the zero polynomial");
        let (&lead_key, lead_coeff) = q
            .terms
            .iter()
            .next_back()
            .expect("nonzero divisor has a leading term");
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let mut tail = Self::zero();
        while let Some((&(i, j), c)) = rem.terms.iter().next_back() {
            if i >= lead_key.0 && j >= lead_key.1 {
                let factor = Self::monomial(i - lead_key.0, j - lead_key.1, c / lead_coeff);
                quot = quot.add(&factor);
                rem = rem.sub(&factor.mul(q));
            } else {
                // leading term not reducible: move it to the remainder
                let t = Self::monomial(i, j, c.clone());
                tail = tail.add(&t);
                rem = rem.sub(&t);
            }
        }
        if tail.is_zero() {
            Ok(quot)
        } else {
            Err(RemainderError {
                quotient: quot,
                remainder: tail,
            })
        }
    }

    pub fn evaluate(&self, z1: &Rational, z2: &Rational) -> Rational {
        let mut acc = <Rational as Scalar>::zero();
        for (&(i, j), c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..i {
                term *= z1;
            }
            for _ in 0..j {
                term *= z2;
            }
            acc += term;
        }
        acc
    }

    pub fn evaluate_f64(&self, z1: f64, z2: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.to_f64() * z1.powi(i as i32) * z2.powi(j as i32))
            .sum()
    }

    /// Substitutes `z -> -z`: flips the sign of odd-total-degree monomials.
    pub fn reflect(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| {
                let c = if (i + j) % 2 == 1 { -c } else { c.clone() };
                ((i, j), c)
            })
            .collect();
        Self::from_terms(terms)
    }

    /// JSON monomial form `[{"e1":i,"e2":j,"c":"p/q"},...]` sorted by
    /// (total degree, e1) ascending.
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries: Vec<(u32, u32)> = self.terms.keys().cloned().collect();
        entries.sort_by_key(|&(i, j)| (i + j, i));
        let arr: Vec<serde_json::Value> = entries
            .into_iter()
            .map(|(i, j)| {
                serde_json::json!({"e1": i, "e2": j, "c": self.terms[&(i, j)].to_json()})
            })
            .collect();
        serde_json::Value::Array(arr)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        let arr = value.as_array().ok_or("expected monomial array")?;
        let mut terms = BTreeMap::new();
        for m in arr {
            let i = m["e1"].as_u64().ok_or("missing e1")? as u32;
            let j = m["e2"].as_u64().ok_or("missing e2")? as u32;
            let c = m["c"].as_str().ok_or("missing coefficient")?;
            let c = parse_rational(c)?;
            if !Scalar::is_zero(&c) {
                terms.insert((i, j), c);
            }
        }
        Ok(Self::from_terms(terms))
    }
}
