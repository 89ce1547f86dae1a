//! Truncated free tensor algebra `T^(N)(R^d)`.
//!
//! A [`TruncatedTensor`] stores one dense coefficient array per level
//! `0..=N`; level `k` has `d^k` entries indexed by words (first letter most
//! significant, see [`Word`]). Arithmetic never touches levels above `N`:
//! truncation is silent, as in the quotient algebra.

use std::fmt;

use thiserror::Error;

use crate::scalar::{Scalar, ScalarKind};
use crate::word::Word;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("cannot invert: level-0 coefficient is zero")]
    SingularElement,
    #[error("word `{word}` does not fit tensor with d={dim}, N={truncation}")]
    WordOutOfRange {
        word: String,
        dim: usize,
        truncation: usize,
    },
    #[error("level {level} exceeds truncation {truncation}")]
    LevelOutOfRange { level: usize, truncation: usize },
    #[error("malformed tensor JSON: {0}")]
    Json(String),
}

/// An element of `T^(N)(R^d)` with dense per-level storage.
#[derive(Clone, PartialEq)]
pub struct TruncatedTensor<S: Scalar> {
    dim: usize,
    truncation: usize,
    levels: Vec<Vec<S>>,
}

impl<S: Scalar> fmt::Debug for TruncatedTensor<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedTensor(d={}, N={}", self.dim, self.truncation)?;
        for (k, level) in self.levels.iter().enumerate() {
            for (i, c) in level.iter().enumerate() {
                if !c.is_zero() {
                    let w = Word::from_index(i, k, self.dim);
                    write!(f, ", {w}: {c:?}")?;
                }
            }
        }
        write!(f, ")")
    }
}

impl<S: Scalar> TruncatedTensor<S> {
    /// The zero element `0`.
    pub fn zeros(dim: usize, truncation: usize) -> Self {
        assert!(dim >= 1, "tensor dimension must be >= 1");
        let levels = (0..=truncation)
            .map(|k| vec![S::zero(); dim.pow(k as u32)])
            .collect();
        TruncatedTensor {
            dim,
            truncation,
            levels,
        }
    }

    /// The unit `1 = (1, 0, 0, ...)`.
    pub fn unit(dim: usize, truncation: usize) -> Self {
        let mut t = Self::zeros(dim, truncation);
        t.levels[0][0] = S::one();
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        S::KIND
    }

    /// Level slice `rho_n`.
    pub fn level(&self, n: usize) -> &[S] {
        &self.levels[n]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [S] {
        &mut self.levels[n]
    }

    /// `rho_n` as an owned array, or an error above the truncation.
    pub fn project_level(&self, n: usize) -> Result<Vec<S>, TensorError> {
        self.levels
            .get(n)
            .cloned()
            .ok_or(TensorError::LevelOutOfRange {
                level: n,
                truncation: self.truncation,
            })
    }

    /// Coordinate functional `pi^I`.
    pub fn project_word(&self, word: &Word) -> Result<S, TensorError> {
        if word.len() > self.truncation || !word.fits(self.dim) {
            return Err(TensorError::WordOutOfRange {
                word: word.to_string(),
                dim: self.dim,
                truncation: self.truncation,
            });
        }
        Ok(self.levels[word.len()][word.index(self.dim)].clone())
    }

    /// `pi^I` by text form, e.g. `t.coeff("12")`. Panics on malformed words;
    /// intended for tests and fixtures.
    pub fn coeff(&self, word: &str) -> S {
        let w: Word = word.parse().expect("malformed word literal");
        self.project_word(&w).expect("word out of range")
    }

    pub fn set_coeff(&mut self, word: &Word, value: S) {
        assert!(
            word.len() <= self.truncation && word.fits(self.dim),
            "word out of range"
        );
        let idx = word.index(self.dim);
        self.levels[word.len()][idx] = value;
    }

    fn check_compat(&self, rhs: &Self) {
        assert_eq!(self.dim, rhs.dim, "tensor dimension mismatch");
        assert_eq!(self.truncation, rhs.truncation, "tensor truncation mismatch");
    }

    /// Componentwise sum.
    pub fn add(&self, rhs: &Self) -> Self {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (lo, lr) in out.levels.iter_mut().zip(&rhs.levels) {
            for (o, r) in lo.iter_mut().zip(lr) {
                o.add_assign(r);
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (lo, lr) in out.levels.iter_mut().zip(&rhs.levels) {
            for (o, r) in lo.iter_mut().zip(lr) {
                *o = o.sub(r);
            }
        }
        out
    }

    /// Scalar action `lambda * a`.
    pub fn scale(&self, lambda: &S) -> Self {
        let mut out = self.clone();
        for level in out.levels.iter_mut() {
            for c in level.iter_mut() {
                *c = c.mul(lambda);
            }
        }
        out
    }

    /// Graded truncated convolution `c_n = sum_k a_k (x) b_(n-k)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_compat(rhs);
        let mut out = Self::zeros(self.dim, self.truncation);
        self.mul_into(rhs, &mut out);
        out
    }

    /// As [`TruncatedTensor::mul`], writing into `out` without allocating.
    /// `out` must have matching shape; prior contents are overwritten.
    pub fn mul_into(&self, rhs: &Self, out: &mut Self) {
        self.check_compat(rhs);
        self.check_compat(out);
        for level in out.levels.iter_mut() {
            for c in level.iter_mut() {
                *c = S::zero();
            }
        }
        for n in 0..=self.truncation {
            for k in 0..=n {
                let a = &self.levels[k];
                let b = &rhs.levels[n - k];
                let stride = b.len();
                let out_level = &mut out.levels[n];
                for (ia, av) in a.iter().enumerate() {
                    if av.is_zero() {
                        continue;
                    }
                    let base = ia * stride;
                    for (ib, bv) in b.iter().enumerate() {
                        if bv.is_zero() {
                            continue;
                        }
                        out_level[base + ib].add_assign(&av.mul(bv));
                    }
                }
            }
        }
    }

    /// Inverse of an element with nonzero level-0 coefficient, by the finite
    /// geometric series `(1/a0) sum_(k=0)^N (1 - a/a0)^k`; terms beyond `N`
    /// vanish because `1 - a/a0` has zero level-0 part.
    pub fn inverse(&self) -> Result<Self, TensorError> {
        let a0 = self.levels[0][0].clone();
        if a0.is_zero() {
            return Err(TensorError::SingularElement);
        }
        let unit = Self::unit(self.dim, self.truncation);
        // x = 1 - a/a0
        let inv_a0 = S::one().div(&a0);
        let x = unit.sub(&self.scale(&inv_a0));
        // Horner: acc = 1 + x (x) (1 + x (x) (...))
        let mut acc = unit.clone();
        for _ in 0..self.truncation {
            acc = unit.add(&x.mul(&acc));
        }
        Ok(acc.scale(&inv_a0))
    }

    /// Signature of the straight-line segment with increment `v`: level `n`
    /// is `v^(x)n / n!`.
    pub fn exp_increment(v: &[S], truncation: usize) -> Self {
        let mut out = Self::zeros(v.len(), truncation);
        Self::exp_increment_into(v, &mut out);
        out
    }

    /// As [`TruncatedTensor::exp_increment`], into a preallocated tensor of
    /// the same dimension.
    pub fn exp_increment_into(v: &[S], out: &mut Self) {
        assert_eq!(v.len(), out.dim, "increment dimension mismatch");
        out.levels[0][0] = S::one();
        for n in 1..=out.truncation {
            let inv_n = S::one().div(&S::from_int(n as i64));
            let (lower, upper) = out.levels.split_at_mut(n);
            let prev = &lower[n - 1];
            let cur = &mut upper[0];
            for (ip, pv) in prev.iter().enumerate() {
                let base = ip * out.dim;
                for (j, vj) in v.iter().enumerate() {
                    cur[base + j] = pv.mul(vj).mul(&inv_n);
                }
            }
        }
    }

    /// Dilation `<eps, a>`: level `n` scaled by `eps^n`. Defined for
    /// `eps >= 0` in the group setting; arbitrary scalars are accepted.
    pub fn dilate(&self, eps: &S) -> Self {
        let mut out = self.clone();
        let mut power = S::one();
        for level in out.levels.iter_mut() {
            for c in level.iter_mut() {
                *c = c.mul(&power);
            }
            power = power.mul(eps);
        }
        out
    }

    /// Letter-wise action of a 2x2 matrix `R`: level `n` transformed by
    /// `R^(x)n`. Only `d = 2` is supported.
    ///
    /// Applied one tensor slot at a time, so the cost is `n * 2^n` per level
    /// rather than `4^n`.
    pub fn rotate(&self, r: &[[S; 2]; 2]) -> Self {
        assert_eq!(self.dim, 2, "rotate is only defined for d = 2");
        let mut out = self.clone();
        for n in 1..=self.truncation {
            let level = &mut out.levels[n];
            let mut scratch = vec![S::zero(); level.len()];
            for slot in 0..n {
                let stride = 1usize << (n - 1 - slot);
                for (idx, s) in scratch.iter_mut().enumerate() {
                    let i_letter = (idx / stride) & 1;
                    let base = idx - i_letter * stride;
                    // sum over the source letter in this slot
                    let from0 = &level[base];
                    let from1 = &level[base + stride];
                    *s = r[i_letter][0].mul(from0).add(&r[i_letter][1].mul(from1));
                }
                std::mem::swap(level, &mut scratch);
            }
        }
        out
    }

    /// Homogeneous norm `max_(i=1..N) |rho_i(a)|^(1/i)` with the Euclidean
    /// norm on each level.
    pub fn homogeneous_norm(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, level) in self.levels.iter().enumerate().skip(1) {
            let sq: f64 = level.iter().map(|c| c.to_f64().powi(2)).sum();
            best = best.max(sq.sqrt().powf(1.0 / i as f64));
        }
        best
    }

    /// Copy truncated to a lower level `m <= N`.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.truncation);
        TruncatedTensor {
            dim: self.dim,
            truncation: m,
            levels: self.levels[..=m].to_vec(),
        }
    }

    /// Largest absolute coefficient (as `f64`), across all levels.
    pub fn max_abs(&self) -> f64 {
        self.levels
            .iter()
            .flatten()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Componentwise conversion to `f64` coefficients.
    pub fn to_f64(&self) -> TruncatedTensor<f64> {
        TruncatedTensor {
            dim: self.dim,
            truncation: self.truncation,
            levels: self
                .levels
                .iter()
                .map(|l| l.iter().map(|c| c.to_f64()).collect())
                .collect(),
        }
    }

    /// JSON form:
    /// `{"dimension":d,"truncation":N,"scalar":...,"levels":[{"level":k,"coeffs":{...}}]}`
    /// with zero coefficients omitted and rationals as `"p/q"` strings.
    pub fn to_json(&self) -> serde_json::Value {
        assert!(self.dim <= 9, "word text form requires d <= 9");
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, level)| {
                let mut coeffs = serde_json::Map::new();
                for (i, c) in level.iter().enumerate() {
                    if !c.is_zero() {
                        let w = Word::from_index(i, k, self.dim);
                        coeffs.insert(w.to_string(), c.to_json());
                    }
                }
                serde_json::json!({"level": k, "coeffs": serde_json::Value::Object(coeffs)})
            })
            .collect();
        serde_json::json!({
            "dimension": self.dim,
            "truncation": self.truncation,
            "scalar": S::KIND.as_str(),
            "levels": levels,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, TensorError> {
        let err = |m: &str| TensorError::Json(m.to_string());
        let dim = value["dimension"].as_u64().ok_or_else(|| err("dimension"))? as usize;
        let truncation = value["truncation"].as_u64().ok_or_else(|| err("truncation"))? as usize;
        let kind = value["scalar"].as_str().ok_or_else(|| err("scalar"))?;
        if kind != S::KIND.as_str() {
            return Err(TensorError::Json(format!(
                "scalar kind mismatch: file has `{kind}`, expected `{}`",
                S::KIND.as_str()
            )));
        }
        let mut out = Self::zeros(dim, truncation);
        let levels = value["levels"].as_array().ok_or_else(|| err("levels"))?;
        for entry in levels {
            let k = entry["level"].as_u64().ok_or_else(|| err("level"))? as usize;
            if k > truncation {
                return Err(err("level above truncation"));
            }
            let coeffs = entry["coeffs"].as_object().ok_or_else(|| err("coeffs"))?;
            for (word, v) in coeffs {
                let w: Word = word.parse().map_err(TensorError::Json)?;
                if w.len() != k || !w.fits(dim) {
                    return Err(TensorError::Json(format!("word `{word}` at level {k}")));
                }
                let c = S::from_json(v)
                    .ok_or_else(|| TensorError::Json(format!("bad coefficient for `{word}`")))?;
                out.levels[k][w.index(dim)] = c;
            }
        }
        Ok(out)
    }
}

impl TruncatedTensor<f64> {
    /// Rotation by angle `theta` (counterclockwise), `d = 2`.
    pub fn rotate_by_angle(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        self.rotate(&[[c, -s], [s, c]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn e1(n: usize) -> TruncatedTensor<Rational> {
        let mut t = TruncatedTensor::zeros(2, n);
        t.set_coeff(&"1".parse().unwrap(), ratio(1, 1));
        t
    }

    #[test]
    fn unit_and_zero() {
        let u: TruncatedTensor<Rational> = TruncatedTensor::unit(2, 3);
        let z: TruncatedTensor<Rational> = TruncatedTensor::zeros(2, 3);
        assert_eq!(u.coeff(""), ratio(1, 1));
        assert_eq!(z.add(&u), u);
        assert_eq!(u.add(&u).coeff(""), ratio(2, 1));
        for k in 0..=3 {
            assert_eq!(u.level(k).len(), 2usize.pow(k as u32));
        }
    }

    #[test]
    fn scale_and_additive_inverse() {
        let a = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 2), ratio(-1, 3)], 3);
        let z = TruncatedTensor::zeros(2, 3);
        assert_eq!(a.scale(&ratio(0, 1)), z);
        assert_eq!(a.add(&a.scale(&ratio(-1, 1))), z);
    }

    #[test]
    fn mul_unital_and_single_split() {
        let u: TruncatedTensor<Rational> = TruncatedTensor::unit(2, 4);
        let a = TruncatedTensor::<Rational>::exp_increment(&[ratio(2, 1), ratio(3, 1)], 4);
        assert_eq!(u.mul(&a), a);
        assert_eq!(a.mul(&u), a);

        // a = 1 + e1, b = 1 + e2: only the split u="1", v="2" feeds word "12".
        let mut a = TruncatedTensor::<Rational>::unit(2, 2);
        a.set_coeff(&"1".parse().unwrap(), ratio(1, 1));
        let mut b = TruncatedTensor::<Rational>::unit(2, 2);
        b.set_coeff(&"2".parse().unwrap(), ratio(1, 1));
        let ab = a.mul(&b);
        assert_eq!(ab.coeff("12"), ratio(1, 1));
        assert_eq!(ab.coeff("21"), ratio(0, 1));
    }

    #[test]
    fn mul_associative_exact() {
        // Direct expansion of the graded convolution at small N: three
        // pseudo-random rational tensors, exact equality.
        let mut seed = 1u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ratio(((seed >> 33) % 19) as i64 - 9, ((seed >> 13) % 7 + 1) as i64)
        };
        let mut rand_tensor = || {
            let mut t = TruncatedTensor::<Rational>::zeros(2, 4);
            for k in 0..=4 {
                for i in 0..t.level(k).len() {
                    t.level_mut(k)[i] = next();
                }
            }
            t
        };
        let (a, b, c) = (rand_tensor(), rand_tensor(), rand_tensor());
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn inverse_of_unit_and_group_likes() {
        let u: TruncatedTensor<Rational> = TruncatedTensor::unit(2, 5);
        assert_eq!(u.inverse().unwrap(), u);

        let a = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 1), ratio(0, 1)], 4);
        let b = TruncatedTensor::<Rational>::exp_increment(&[ratio(-1, 1), ratio(0, 1)], 4);
        assert_eq!(a.inverse().unwrap(), b);

        // Random group-like (product of segment signatures), N = 5.
        let g = TruncatedTensor::<Rational>::exp_increment(&[ratio(2, 3), ratio(-1, 2)], 5)
            .mul(&TruncatedTensor::exp_increment(&[ratio(-1, 5), ratio(4, 3)], 5));
        assert_eq!(g.mul(&g.inverse().unwrap()), TruncatedTensor::unit(2, 5));

        let z: TruncatedTensor<Rational> = TruncatedTensor::zeros(2, 3);
        assert_eq!(z.inverse(), Err(TensorError::SingularElement));
    }

    #[test]
    fn exp_increment_levels() {
        let t = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 1), ratio(0, 1)], 3);
        assert_eq!(t.coeff(""), ratio(1, 1));
        assert_eq!(t.coeff("1"), ratio(1, 1));
        assert_eq!(t.coeff("11"), ratio(1, 2));
        assert_eq!(t.coeff("111"), ratio(1, 6));
        assert_eq!(t.coeff("2"), ratio(0, 1));

        let z = TruncatedTensor::<Rational>::exp_increment(&[ratio(0, 1), ratio(0, 1)], 3);
        assert_eq!(z, TruncatedTensor::unit(2, 3));

        // v = (1,1): pi^{12} = double integral over the simplex = 1/2.
        let t = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 1), ratio(1, 1)], 2);
        assert_eq!(t.coeff("12"), ratio(1, 2));
    }

    #[test]
    fn projections() {
        let u: TruncatedTensor<Rational> = TruncatedTensor::unit(2, 3);
        assert_eq!(u.project_word(&Word::empty()).unwrap(), ratio(1, 1));
        let t = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 1), ratio(0, 1)], 3);
        assert_eq!(t.coeff("11"), ratio(1, 2));
        let too_long: Word = "11111".parse().unwrap();
        assert!(t.project_word(&too_long).is_err());
        assert!(t.project_level(4).is_err());
    }

    #[test]
    fn dilation() {
        let a = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 2), ratio(1, 3)], 4);
        assert_eq!(a.dilate(&ratio(1, 1)), a);

        let killed = a.dilate(&ratio(0, 1));
        assert_eq!(killed.coeff(""), ratio(1, 1));
        assert_eq!(killed.coeff("1"), ratio(0, 1));
        assert_eq!(killed.coeff("22"), ratio(0, 1));

        // <2, exp(v)> = exp(2v), level by level.
        let doubled = a.dilate(&ratio(2, 1));
        let direct = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 1), ratio(2, 3)], 4);
        assert_eq!(doubled, direct);
    }

    #[test]
    fn rotation_basics() {
        let ident = [
            [ratio(1, 1), ratio(0, 1)],
            [ratio(0, 1), ratio(1, 1)],
        ];
        let quarter = [
            [ratio(0, 1), ratio(-1, 1)],
            [ratio(1, 1), ratio(0, 1)],
        ];
        let a = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 3), ratio(-2, 5)], 3);
        assert_eq!(a.rotate(&ident), a);

        // Theta(pi/2) sends e1 to e2.
        let b = e1(2).add(&TruncatedTensor::unit(2, 2));
        let rb = b.rotate(&quarter);
        assert_eq!(rb.coeff("1"), ratio(0, 1));
        assert_eq!(rb.coeff("2"), ratio(1, 1));
        assert_eq!(rb.coeff(""), ratio(1, 1));

        // Rotation acts as exp(v) -> exp(Rv) on segment signatures.
        let rotated = a.rotate(&quarter);
        let direct = TruncatedTensor::<Rational>::exp_increment(&[ratio(2, 5), ratio(1, 3)], 3);
        assert_eq!(rotated, direct);
    }

    #[test]
    fn rotation_composition_floats() {
        let a = TruncatedTensor::<f64>::exp_increment(&[0.3, -0.7], 4);
        let theta = 0.813;
        let back = a.rotate_by_angle(theta).rotate_by_angle(-theta);
        for k in 0..=4 {
            for (x, y) in back.level(k).iter().zip(a.level(k)) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn homogeneous_norm_values() {
        let u: TruncatedTensor<f64> = TruncatedTensor::unit(2, 3);
        assert_eq!(u.homogeneous_norm(), 0.0);

        let t = TruncatedTensor::<f64>::exp_increment(&[3.0, 4.0], 1);
        assert!((t.homogeneous_norm() - 5.0).abs() < 1e-15);

        // Homogeneity under dilation.
        let a = TruncatedTensor::<f64>::exp_increment(&[0.4, -0.9], 4);
        let eps = 1.7;
        let lhs = a.dilate(&eps).homogeneous_norm();
        let rhs = eps * a.homogeneous_norm();
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn json_round_trip_and_schema() {
        let t = TruncatedTensor::<Rational>::exp_increment(&[ratio(1, 1), ratio(0, 1)], 2);
        let v = t.to_json();
        assert_eq!(v["scalar"], "rational");
        assert_eq!(v["levels"][2]["coeffs"]["11"], "1/2");
        // zero coefficients omitted
        assert!(v["levels"][2]["coeffs"].get("12").is_none());
        let back = TruncatedTensor::<Rational>::from_json(&v).unwrap();
        assert_eq!(back, t);

        let f = TruncatedTensor::<f64>::exp_increment(&[1.0, 0.0], 2);
        assert!(TruncatedTensor::<Rational>::from_json(&f.to_json()).is_err());
    }
}
