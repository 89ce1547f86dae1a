//! Expected signature of the simple random walk on a finite lattice domain,
//! stopped at first exit.
//!
//! The interior is supplied; the boundary is derived as the lattice
//! neighbors outside it, which rules out inconsistent interior/boundary
//! pairs by construction. Level `n` solves a discrete Dirichlet problem
//! whose right-hand side involves *all* lower levels at the neighbors (not
//! just `n-1` and `n-2` as in the Brownian case). After solving, the walk
//! fixed-point identity
//! `Phi(x) = sum_(|e|=1) (1/2d) exp(e) (x) Phi(x+e)`
//! is re-verified at every interior point, exactly.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linsolve::{solve_exact, SingularMatrix};
use crate::scalar::{Rational, Scalar};
use crate::tensor::TruncatedTensor;
use crate::word::Word;

pub type Point = Vec<i64>;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("domain has no interior points")]
    EmptyDomain,
    #[error("malformed domain file: {0}")]
    Malformed(String),
    #[error("discrete Dirichlet system is singular; the domain is malformed")]
    Singular(#[from] SingularMatrix),
    #[error("fixed-point identity violated after solve at point {0:?}")]
    FixedPointViolated(Point),
}

/// A finite set of interior lattice points with its derived boundary.
#[derive(Clone, Debug)]
pub struct LatticeDomain {
    dim: usize,
    interior: Vec<Point>,
    boundary: Vec<Point>,
    interior_index: HashMap<Point, usize>,
    boundary_set: BTreeSet<Point>,
}

impl LatticeDomain {
    /// Builds a domain from its interior points; duplicates are merged and
    /// the points are kept in sorted order so that downstream output is
    /// deterministic.
    pub fn new(dim: usize, points: impl IntoIterator<Item = Point>) -> Result<Self, LatticeError> {
        assert!(dim >= 1, "lattice dimension must be >= 1");
        let interior_set: BTreeSet<Point> = points.into_iter().collect();
        if interior_set.is_empty() {
            return Err(LatticeError::EmptyDomain);
        }
        for p in &interior_set {
            if p.len() != dim {
                return Err(LatticeError::Malformed(format!(
                    "point {p:?} does not have dimension {dim}"
                )));
            }
        }
        let mut boundary_set = BTreeSet::new();
        for p in &interior_set {
            for nb in neighbors(p) {
                if !interior_set.contains(&nb) {
                    boundary_set.insert(nb);
                }
            }
        }
        let interior: Vec<Point> = interior_set.into_iter().collect();
        let interior_index = interior
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        Ok(LatticeDomain {
            dim,
            interior,
            boundary: boundary_set.iter().cloned().collect(),
            interior_index,
            boundary_set,
        })
    }

    /// Parses the domain file format: a header `d N`, then one interior
    /// point per line as `d` whitespace-separated integers. Returns the
    /// domain and the truncation from the header.
    pub fn parse(text: &str) -> Result<(Self, usize), LatticeError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| LatticeError::Malformed("empty file".into()))?;
        let mut parts = header.split_whitespace();
        let dim: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .filter(|&d| d >= 1)
            .ok_or_else(|| LatticeError::Malformed("header must start with d >= 1".into()))?;
        let truncation: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LatticeError::Malformed("header must be `d N`".into()))?;
        if parts.next().is_some() {
            return Err(LatticeError::Malformed("header must be exactly `d N`".into()));
        }
        let mut points = Vec::new();
        for line in lines {
            let coords: Result<Point, _> = line
                .split_whitespace()
                .map(|s| s.parse::<i64>())
                .collect();
            let coords =
                coords.map_err(|e| LatticeError::Malformed(format!("bad point `{line}`: {e}")))?;
            if coords.len() != dim {
                return Err(LatticeError::Malformed(format!(
                    "point `{line}` does not have {dim} coordinates"
                )));
            }
            points.push(coords);
        }
        let domain = Self::new(dim, points)?;
        Ok((domain, truncation))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior(&self) -> &[Point] {
        &self.interior
    }

    pub fn boundary(&self) -> &[Point] {
        &self.boundary
    }

    pub fn interior_index(&self, p: &[i64]) -> Option<usize> {
        self.interior_index.get(p).copied()
    }

    pub fn is_interior(&self, p: &[i64]) -> bool {
        self.interior_index.contains_key(p)
    }

    pub fn is_boundary(&self, p: &[i64]) -> bool {
        self.boundary_set.contains(p)
    }
}

fn neighbors(p: &[i64]) -> impl Iterator<Item = Point> + '_ {
    (0..p.len()).flat_map(move |axis| {
        [1i64, -1].into_iter().map(move |step| {
            let mut q = p.to_vec();
            q[axis] += step;
            q
        })
    })
}

/// The expected-signature field: one truncated tensor per point of the
/// closed domain, with the boundary pinned at the unit tensor.
#[derive(Clone, Debug)]
pub struct LatticeField<S: Scalar> {
    domain: LatticeDomain,
    truncation: usize,
    values: Vec<TruncatedTensor<S>>,
}

impl<S: Scalar> LatticeField<S> {
    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Field value at a point of the closed domain; boundary points carry
    /// the unit tensor. `None` outside the closed domain.
    pub fn value(&self, p: &[i64]) -> Option<TruncatedTensor<S>> {
        if let Some(i) = self.domain.interior_index(p) {
            Some(self.values[i].clone())
        } else if self.domain.is_boundary(p) {
            Some(TruncatedTensor::unit(self.domain.dim, self.truncation))
        } else {
            None
        }
    }

    fn word_at(&self, level: usize, word_idx: usize, p: &[i64]) -> S {
        match self.domain.interior_index(p) {
            Some(i) => self.values[i].level(level)[word_idx].clone(),
            None => {
                debug_assert!(self.domain.is_boundary(p));
                if level == 0 {
                    S::one()
                } else {
                    S::zero()
                }
            }
        }
    }

    /// Walk generator `(1/2d) sum_(|e|=1) f(x+e) - f(x)` applied to one
    /// word coefficient at an interior point.
    pub fn discrete_laplacian(&self, word: &Word, p: &[i64]) -> S {
        assert!(self.domain.is_interior(p), "laplacian needs an interior point");
        let level = word.len();
        let idx = word.index(self.domain.dim);
        let inv = S::one().div(&S::from_int(2 * self.domain.dim as i64));
        let mut acc = S::zero();
        for nb in neighbors(p) {
            acc.add_assign(&self.word_at(level, idx, &nb).mul(&inv));
        }
        acc.sub(&self.word_at(level, idx, p))
    }

    /// Maximum absolute gap in the fixed-point identity
    /// `Phi(x) = sum (1/2d) exp(e) (x) Phi(x+e)` over interior points,
    /// measured on `f64` images of the coefficients.
    pub fn fixed_point_gap(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in self.domain.interior() {
            let gap = self.fixed_point_delta(p);
            worst = worst.max(gap.max_abs());
        }
        worst
    }

    /// Exact fixed-point verification (coefficients compared for equality).
    pub fn fixed_point_exact(&self) -> Result<(), LatticeError> {
        for p in self.domain.interior() {
            let delta = self.fixed_point_delta(p);
            let zero = TruncatedTensor::zeros(self.domain.dim, self.truncation);
            if delta != zero {
                return Err(LatticeError::FixedPointViolated(p.clone()));
            }
        }
        Ok(())
    }

    fn fixed_point_delta(&self, p: &[i64]) -> TruncatedTensor<S> {
        let d = self.domain.dim;
        let inv = S::one().div(&S::from_int(2 * d as i64));
        let mut rhs = TruncatedTensor::zeros(d, self.truncation);
        for nb in neighbors(p) {
            let mut step = vec![S::zero(); d];
            for axis in 0..d {
                step[axis] = S::from_int(nb[axis] - p[axis]);
            }
            let seg = TruncatedTensor::exp_increment(&step, self.truncation);
            let phi_nb = self.value(&nb).expect("neighbor lies in the closed domain");
            rhs = rhs.add(&seg.mul(&phi_nb).scale(&inv));
        }
        self.value(p).expect("interior point").sub(&rhs)
    }

    /// Right-hand side `g_n(x)` of the level-`n` Dirichlet problem:
    /// `sum_(|e_j|=1) (1/2d) sum_(i=1..n) e_j^(x)i / i! (x) rho_(n-i)(Phi(x+e_j))`.
    /// Levels below `n` must already be solved.
    pub fn rhs_level(&self, n: usize, p: &[i64]) -> Vec<S> {
        assert!(n >= 2, "the recursion starts at level 2");
        assert!(n <= self.truncation);
        let d = self.domain.dim;
        let size = d.pow(n as u32);
        let inv_2d = S::one().div(&S::from_int(2 * d as i64));
        let mut out = vec![S::zero(); size];
        for nb in neighbors(p) {
            let axis = (0..d).find(|&a| nb[a] != p[a]).expect("neighbor differs");
            let sign = nb[axis] - p[axis];
            // words starting with i copies of the step letter: peel one
            // letter per iteration
            let mut prefix_index = 0usize;
            let mut inv_fact = S::one();
            let mut sign_pow = 1i64;
            for i in 1..=n {
                prefix_index = prefix_index * d + axis;
                inv_fact = inv_fact.div(&S::from_int(i as i64));
                sign_pow *= sign;
                let weight = inv_fact.mul(&inv_2d).mul(&S::from_int(sign_pow));
                let suffix_size = d.pow((n - i) as u32);
                let base = prefix_index * suffix_size;
                for s in 0..suffix_size {
                    let v = self.word_at(n - i, s, &nb);
                    if !v.is_zero() {
                        out[base + s].add_assign(&v.mul(&weight));
                    }
                }
            }
        }
        out
    }

    /// JSON keyed by point string `"x1,x2,..."`, boundary points included
    /// with unit tensors.
    pub fn to_json(&self) -> serde_json::Value {
        let mut field = serde_json::Map::new();
        for p in self.domain.interior().iter().chain(self.domain.boundary()) {
            let key = point_key(p);
            let tensor = self.value(p).expect("point in closed domain");
            field.insert(key, tensor.to_json());
        }
        serde_json::json!({
            "dimension": self.domain.dim,
            "truncation": self.truncation,
            "scalar": S::KIND.as_str(),
            "field": serde_json::Value::Object(field),
        })
    }
}

pub fn point_key(p: &[i64]) -> String {
    p.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Assembles and solves the level-`n` Dirichlet problems for every word,
/// given the already-solved lower levels, exactly over rationals.
fn solve_level_exact(
    domain: &LatticeDomain,
    field: &LatticeField<Rational>,
    n: usize,
) -> Result<Vec<Vec<Rational>>, LatticeError> {
    let m = domain.interior.len();
    let inv_2d = Rational::from_int(1) / Rational::from_int(2 * domain.dim as i64);
    // f(x) - (1/2d) sum_(nb interior) f(nb) = g_n(x); boundary terms are 0.
    let mut matrix = vec![vec![<Rational as Scalar>::zero(); m]; m];
    for (row, p) in domain.interior.iter().enumerate() {
        matrix[row][row] = Rational::from_int(1);
        for nb in neighbors(p) {
            if let Some(col) = domain.interior_index(&nb) {
                matrix[row][col] = -&inv_2d + &matrix[row][col];
            }
        }
    }
    let rhs_per_point: Vec<Vec<Rational>> = domain
        .interior
        .iter()
        .map(|p| field.rhs_level(n, p))
        .collect();
    let words = domain.dim.pow(n as u32);
    // one independent Dirichlet system per word
    let per_word_solutions: Vec<Vec<Rational>> = (0..words)
        .into_par_iter()
        .map(|w| {
            let b: Vec<Rational> = rhs_per_point.iter().map(|g| g[w].clone()).collect();
            solve_exact(matrix.clone(), b)
        })
        .collect::<Result<_, _>>()?;
    // transpose back to per-point layout
    Ok((0..m)
        .map(|x| (0..words).map(|w| per_word_solutions[w][x].clone()).collect())
        .collect())
}

/// Gauss-Seidel sweep solve of the same systems in floats.
fn solve_level_gauss_seidel(
    domain: &LatticeDomain,
    field: &LatticeField<f64>,
    n: usize,
) -> Vec<Vec<f64>> {
    const TOLERANCE: f64 = 1e-12;
    const MAX_SWEEPS: usize = 1_000_000;
    let m = domain.interior.len();
    let inv_2d = 1.0 / (2.0 * domain.dim as f64);
    let g: Vec<Vec<f64>> = domain
        .interior
        .iter()
        .map(|p| field.rhs_level(n, p))
        .collect();
    let interior_neighbors: Vec<Vec<usize>> = domain
        .interior
        .iter()
        .map(|p| neighbors(p).filter_map(|nb| domain.interior_index(&nb)).collect())
        .collect();
    let words = domain.dim.pow(n as u32);
    let mut values = vec![vec![0.0f64; words]; m];
    for w in 0..words {
        for _ in 0..MAX_SWEEPS {
            let mut change: f64 = 0.0;
            for x in 0..m {
                let mut acc = g[x][w];
                for &nb in &interior_neighbors[x] {
                    acc += inv_2d * values[nb][w];
                }
                change = change.max((acc - values[x][w]).abs());
                values[x][w] = acc;
            }
            if change < TOLERANCE {
                break;
            }
        }
    }
    values
}

fn initial_field<S: Scalar>(domain: &LatticeDomain, truncation: usize) -> LatticeField<S> {
    let values = vec![
        TruncatedTensor::unit(domain.dim, truncation);
        domain.interior.len()
    ];
    LatticeField {
        domain: domain.clone(),
        truncation,
        values,
    }
}

/// Exact expected signature of the simple random walk, levels `2..=N`
/// solved as discrete Dirichlet problems; the fixed-point identity is
/// verified exactly before returning.
pub fn expected_signature(
    domain: &LatticeDomain,
    truncation: usize,
) -> Result<LatticeField<Rational>, LatticeError> {
    let mut field = initial_field::<Rational>(domain, truncation);
    for n in 2..=truncation {
        let solved = solve_level_exact(domain, &field, n)?;
        for (values, tensor) in solved.into_iter().zip(field.values.iter_mut()) {
            tensor.level_mut(n).clone_from_slice(&values);
        }
    }
    field.fixed_point_exact()?;
    Ok(field)
}

/// Float fast path: Gauss-Seidel per level, tolerance 1e-12, at most 10^6
/// sweeps per word.
pub fn expected_signature_f64(
    domain: &LatticeDomain,
    truncation: usize,
) -> LatticeField<f64> {
    let mut field = initial_field::<f64>(domain, truncation);
    for n in 2..=truncation {
        let solved = solve_level_gauss_seidel(domain, &field, n);
        for (values, tensor) in solved.into_iter().zip(field.values.iter_mut()) {
            tensor.level_mut(n).copy_from_slice(&values);
        }
    }
    field
}

/// Monte Carlo estimate of `f(x) = E^x[sum_(j<tau) g(S_j)]` for one level:
/// `g` is indexed `[interior point][word]`. Returns per-word means and
/// standard errors. Deterministic given `(seed, paths)`.
pub fn representation_estimate(
    domain: &LatticeDomain,
    g: &[Vec<f64>],
    start: &[i64],
    paths: u64,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(g.len(), domain.interior.len(), "g must cover the interior");
    let words = g.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![0.0f64; words];
    let mut sum_sq = vec![0.0f64; words];
    let mut acc = vec![0.0f64; words];
    let mut pos: Point = start.to_vec();
    for _ in 0..paths {
        acc.iter_mut().for_each(|a| *a = 0.0);
        pos.clear();
        pos.extend_from_slice(start);
        while let Some(i) = domain.interior_index(&pos) {
            for (a, gv) in acc.iter_mut().zip(&g[i]) {
                *a += gv;
            }
            let dir = rng.random_range(0..2 * domain.dim);
            let axis = dir / 2;
            pos[axis] += if dir % 2 == 0 { 1 } else { -1 };
        }
        for w in 0..words {
            sum[w] += acc[w];
            sum_sq[w] += acc[w] * acc[w];
        }
    }
    let count = paths as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / count).collect();
    let se: Vec<f64> = (0..words)
        .map(|w| {
            if paths < 2 {
                return 0.0;
            }
            let var = (sum_sq[w] - count * mean[w] * mean[w]).max(0.0) / (count - 1.0);
            (var / count).sqrt()
        })
        .collect();
    (mean, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn single_point_1d() -> LatticeDomain {
        LatticeDomain::new(1, vec![vec![0]]).unwrap()
    }

    fn segment_1d() -> LatticeDomain {
        LatticeDomain::new(1, vec![vec![1], vec![2], vec![3]]).unwrap()
    }

    fn block_2d(side: i64) -> LatticeDomain {
        let mut pts = Vec::new();
        for x in 0..side {
            for y in 0..side {
                pts.push(vec![x, y]);
            }
        }
        LatticeDomain::new(2, pts).unwrap()
    }

    #[test]
    fn derived_boundary_is_consistent() {
        let dom = block_2d(3);
        assert_eq!(dom.interior().len(), 9);
        assert_eq!(dom.boundary().len(), 12);
        for p in dom.interior() {
            assert!(!dom.is_boundary(p));
            for nb in neighbors(p) {
                assert!(dom.is_interior(&nb) || dom.is_boundary(&nb));
            }
            assert_eq!(neighbors(p).count(), 2 * dom.dim());
        }
    }

    #[test]
    fn parse_domain_file() {
        let (dom, n) = LatticeDomain::parse("1 4\n0\n").unwrap();
        assert_eq!(n, 4);
        assert_eq!(dom.interior().to_vec(), vec![vec![0]]);
        assert_eq!(dom.boundary().to_vec(), vec![vec![-1], vec![1]]);

        assert!(LatticeDomain::parse("").is_err());
        assert!(LatticeDomain::parse("2 4\n0\n").is_err()); // wrong coordinate count
        assert!(LatticeDomain::parse("0 4\n").is_err());
    }

    #[test]
    fn discrete_laplacian_values() {
        let dom = segment_1d();
        let field = expected_signature(&dom, 2).unwrap();
        // constant field level 0: laplacian 0
        let w0 = Word::empty();
        for p in dom.interior() {
            assert_eq!(field.discrete_laplacian(&w0, p), ratio(0, 1));
        }

        // 1-D single point: f(0)=c, f(+-1)=0 -> laplacian -c at 0.
        let dom0 = single_point_1d();
        let f0 = expected_signature(&dom0, 2).unwrap();
        let w: Word = "11".parse().unwrap();
        let c = f0.value(&[0]).unwrap().coeff("11");
        assert_eq!(f0.discrete_laplacian(&w, &[0]), -&c);

        // random small field vs direct re-summation
        let field = expected_signature(&segment_1d(), 4).unwrap();
        let w: Word = "1111".parse().unwrap();
        for p in dom.interior() {
            let direct = {
                let half = ratio(1, 2);
                let left = field.value(&[p[0] - 1]).unwrap().coeff("1111");
                let right = field.value(&[p[0] + 1]).unwrap().coeff("1111");
                (left + right) * half - field.value(p).unwrap().coeff("1111")
            };
            assert_eq!(field.discrete_laplacian(&w, p), direct);
        }
    }

    #[test]
    fn rhs_level_single_point() {
        // d=1, Gamma={0}, n=2: only the i=2 term survives; g2 = 1/2.
        let dom = single_point_1d();
        let field = initial_field::<Rational>(&dom, 2);
        let g = field.rhs_level(2, &[0]);
        assert_eq!(g, vec![ratio(1, 2)]);
    }

    #[test]
    fn rhs_with_vanishing_lower_levels_keeps_only_top_term() {
        // all neighbors on the boundary: g_n(x) = sum_j (1/2d) e_j^(x)n / n!
        let dom = LatticeDomain::new(2, vec![vec![0, 0]]).unwrap();
        let field = initial_field::<Rational>(&dom, 3);
        let g = field.rhs_level(3, &[0, 0]);
        let w111: Word = "111".parse().unwrap();
        let w222: Word = "222".parse().unwrap();
        // odd power: +1/6 and -1/6 from the two signs cancel
        assert_eq!(g[w111.index(2)], ratio(0, 1));
        assert_eq!(g[w222.index(2)], ratio(0, 1));

        let g2 = field.rhs_level(2, &[0, 0]);
        let w11: Word = "11".parse().unwrap();
        let w12: Word = "12".parse().unwrap();
        // even power: 2 * (1/4) * (1/2) = 1/4 per axis
        assert_eq!(g2[w11.index(2)], ratio(1, 4));
        assert_eq!(g2[w12.index(2)], ratio(0, 1));
    }

    #[test]
    fn single_point_field_is_one_step_enumeration() {
        // the walk exits in one step with increment +-1, so the field at 0
        // is the average of exp(+1) and exp(-1)
        let dom = single_point_1d();
        let field = expected_signature(&dom, 4).unwrap();
        let phi = field.value(&[0]).unwrap();
        assert_eq!(phi.coeff(""), ratio(1, 1));
        assert_eq!(phi.coeff("1"), ratio(0, 1));
        assert_eq!(phi.coeff("11"), ratio(1, 2));
        assert_eq!(phi.coeff("111"), ratio(0, 1));
        assert_eq!(phi.coeff("1111"), ratio(1, 24));

        // boundary values stay at the unit tensor
        let b = field.value(&[1]).unwrap();
        assert_eq!(b.coeff(""), ratio(1, 1));
        assert_eq!(b.coeff("11"), ratio(0, 1));
    }

    #[test]
    fn three_point_segment_center_value() {
        // Gamma = {1,2,3}: level 2 at the center is E[tau]/2 = 2 (the walk
        // exits at 0 or 4, displacement +-2, and pi^{11} = disp^2/2 ... the
        // absorbing-chain value below pins the exact constant).
        let dom = segment_1d();
        let field = expected_signature(&dom, 2).unwrap();
        assert_eq!(field.value(&[2]).unwrap().coeff("11"), ratio(2, 1));
    }

    #[test]
    fn value_iteration_oracle_agrees() {
        // independent route: iterate the fixed-point map in floats until
        // stationary, then compare with the exact solve
        let dom = segment_1d();
        let n = 4;
        let exact = expected_signature(&dom, n).unwrap();

        let m = dom.interior().len();
        let mut current: Vec<TruncatedTensor<f64>> =
            vec![TruncatedTensor::unit(1, n); m];
        let half = 0.5f64;
        let plus = TruncatedTensor::<f64>::exp_increment(&[1.0], n);
        let minus = TruncatedTensor::<f64>::exp_increment(&[-1.0], n);
        for _ in 0..10_000 {
            let mut next = Vec::with_capacity(m);
            let mut change: f64 = 0.0;
            for p in dom.interior() {
                let value_at = |q: i64| -> TruncatedTensor<f64> {
                    match dom.interior_index(&[q]) {
                        Some(i) => current[i].clone(),
                        None => TruncatedTensor::unit(1, n),
                    }
                };
                let rhs = plus
                    .mul(&value_at(p[0] + 1))
                    .add(&minus.mul(&value_at(p[0] - 1)))
                    .scale(&half);
                let i = dom.interior_index(p).unwrap();
                change = change.max(rhs.sub(&current[i]).max_abs());
                next.push(rhs);
            }
            current = next;
            if change < 1e-13 {
                break;
            }
        }
        for (i, p) in dom.interior().iter().enumerate() {
            let exact_f = exact.value(p).unwrap().to_f64();
            assert!(current[i].sub(&exact_f).max_abs() < 1e-9);
        }
    }

    #[test]
    fn float_solver_agrees_with_exact() {
        let dom = block_2d(3);
        let n = 3;
        let exact = expected_signature(&dom, n).unwrap();
        let float = expected_signature_f64(&dom, n);
        for p in dom.interior() {
            let gap = float
                .value(p)
                .unwrap()
                .sub(&exact.value(p).unwrap().to_f64())
                .max_abs();
            assert!(gap < 1e-9, "float/exact gap {gap} at {p:?}");
        }
        assert!(float.fixed_point_gap() < 1e-10);
    }

    #[test]
    fn symmetry_of_centered_square() {
        // swapping the two axes maps the field to itself with letters 1<->2
        let dom = LatticeDomain::new(
            2,
            (-1..=1).flat_map(|x| (-1..=1).map(move |y| vec![x, y])),
        )
        .unwrap();
        let field = expected_signature(&dom, 3).unwrap();
        for p in dom.interior() {
            let swapped_point = vec![p[1], p[0]];
            let here = field.value(p).unwrap();
            let there = field.value(&swapped_point).unwrap();
            for k in 0..=3 {
                for idx in 0..here.level(k).len() {
                    let w = Word::from_index(idx, k, 2);
                    let swapped_letters: Vec<u8> =
                        w.letters().iter().map(|&l| 3 - l).collect();
                    let sw = Word::new(swapped_letters);
                    assert_eq!(
                        here.level(k)[idx],
                        there.level(k)[sw.index(2)],
                        "level {k} word {w}"
                    );
                }
            }
        }
    }

    #[test]
    fn representation_estimate_deterministic_case() {
        // d=1, Gamma={0}: every walk exits in one step, so the estimate is
        // exactly g(0) = 1/2 with zero standard error.
        let dom = single_point_1d();
        let field = initial_field::<Rational>(&dom, 2);
        let g: Vec<Vec<f64>> = vec![field
            .rhs_level(2, &[0])
            .iter()
            .map(Scalar::to_f64)
            .collect()];
        let (mean, se) = representation_estimate(&dom, &g, &[0], 500, 42);
        assert_eq!(mean, vec![0.5]);
        assert_eq!(se, vec![0.0]);

        // zero g -> zero estimate
        let gz = vec![vec![0.0]];
        let (mean, se) = representation_estimate(&dom, &gz, &[0], 100, 7);
        assert_eq!(mean, vec![0.0]);
        assert_eq!(se, vec![0.0]);
    }

    #[test]
    fn representation_estimate_three_points() {
        let dom = segment_1d();
        let exact = expected_signature(&dom, 2).unwrap();
        let g: Vec<Vec<f64>> = dom
            .interior()
            .iter()
            .map(|p| exact.rhs_level(2, p).iter().map(Scalar::to_f64).collect())
            .collect();
        let (mean, se) = representation_estimate(&dom, &g, &[2], 40_000, 11);
        let target = exact.value(&[2]).unwrap().coeff("11").to_f64();
        assert!(
            (mean[0] - target).abs() <= 3.0 * se[0],
            "estimate {} +- {} vs {}",
            mean[0],
            se[0],
            target
        );
    }

    #[test]
    fn json_key_format() {
        let dom = block_2d(2);
        let field = expected_signature(&dom, 2).unwrap();
        let v = field.to_json();
        assert!(v["field"]["0,0"].is_object());
        assert!(v["field"]["-1,0"].is_object()); // boundary point present
        assert_eq!(v["field"]["-1,0"]["levels"][0]["coeffs"][""], "1/1");
    }
}
