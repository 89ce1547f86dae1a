//! Exact expected signature of planar Brownian motion stopped at the first
//! exit from the unit disk.
//!
//! Level `n` of the expected signature solves a Poisson problem on the disk
//! whose right-hand side is assembled from levels `n-1` and `n-2`, with zero
//! boundary data. Every coefficient turns out to be a polynomial of total
//! degree at most `n` carrying the factor `1 - z1^2 - z2^2`, so the whole
//! field is computed exactly: the Poisson problems are solved by peeling the
//! leading homogeneous part with the `M_n` linear systems, never by
//! quadrature.

use rayon::prelude::*;

use crate::linsolve::solve_exact;
use crate::polyring::BivarPoly;
use crate::scalar::{Rational, Scalar};
use crate::tensor::TruncatedTensor;
use crate::word::Word;

/// The expected-signature field on the unit disk: level `n` holds `2^n`
/// polynomial coefficients, one per word.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTensor {
    truncation: usize,
    levels: Vec<Vec<BivarPoly>>,
}

impl PolyTensor {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Polynomial coefficients of level `n`, indexed by word.
    pub fn level(&self, n: usize) -> &[BivarPoly] {
        &self.levels[n]
    }

    #[cfg(test)]
    pub(crate) fn level_mut(&mut self, n: usize) -> &mut [BivarPoly] {
        &mut self.levels[n]
    }

    /// Word coefficient by text form, e.g. `phi.word_poly("1111")`.
    pub fn word_poly(&self, word: &str) -> &BivarPoly {
        let w: Word = word.parse().expect("malformed word literal");
        assert!(w.len() <= self.truncation && w.fits(2), "word out of range");
        &self.levels[w.len()][w.index(2)]
    }

    /// Copy truncated to a lower level.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.truncation);
        PolyTensor {
            truncation: m,
            levels: self.levels[..=m].to_vec(),
        }
    }

    /// Exact evaluation at a rational point of the closed disk.
    pub fn evaluate(&self, z: &[Rational; 2]) -> TruncatedTensor<Rational> {
        let mut out = TruncatedTensor::zeros(2, self.truncation);
        for (n, level) in self.levels.iter().enumerate() {
            let slot = out.level_mut(n);
            for (i, p) in level.iter().enumerate() {
                slot[i] = p.evaluate(&z[0], &z[1]);
            }
        }
        out
    }

    /// Float evaluation at a point of the closed disk.
    pub fn evaluate_f64(&self, z: [f64; 2]) -> TruncatedTensor<f64> {
        let mut out = TruncatedTensor::zeros(2, self.truncation);
        for (n, level) in self.levels.iter().enumerate() {
            let slot = out.level_mut(n);
            for (i, p) in level.iter().enumerate() {
                slot[i] = p.evaluate_f64(z[0], z[1]);
            }
        }
        out
    }

    /// JSON: the tensor schema with polynomial coefficient values in
    /// monomial form.
    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, level)| {
                let mut coeffs = serde_json::Map::new();
                for (i, p) in level.iter().enumerate() {
                    if !p.is_zero() {
                        let w = Word::from_index(i, k, 2);
                        coeffs.insert(w.to_string(), p.to_json());
                    }
                }
                serde_json::json!({"level": k, "coeffs": serde_json::Value::Object(coeffs)})
            })
            .collect();
        serde_json::json!({
            "dimension": 2,
            "truncation": self.truncation,
            "scalar": "rational",
            "levels": levels,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        let truncation = value["truncation"].as_u64().ok_or("truncation")? as usize;
        if value["dimension"].as_u64() != Some(2) {
            return Err("dimension must be 2".into());
        }
        let mut levels: Vec<Vec<BivarPoly>> = (0..=truncation)
            .map(|k| vec![BivarPoly::zero(); 1 << k])
            .collect();
        for entry in value["levels"].as_array().ok_or("levels")? {
            let k = entry["level"].as_u64().ok_or("level")? as usize;
            if k > truncation {
                return Err(format!("level {k} above truncation {truncation}"));
            }
            for (word, v) in entry["coeffs"].as_object().ok_or("coeffs")? {
                let w: Word = word.parse()?;
                if w.len() != k || !w.fits(2) {
                    return Err(format!("word `{word}` invalid at level {k}"));
                }
                levels[k][w.index(2)] = BivarPoly::from_json(v)?;
            }
        }
        Ok(PolyTensor { truncation, levels })
    }
}

/// The `(n+1) x (n+1)` integer system matching the leading homogeneous part
/// when solving `Delta((1 - |z|^2) g) = f` on the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct MnSystem {
    degree: usize,
    matrix: Vec<Vec<i64>>,
}

impl MnSystem {
    /// Entries: `M(j,j) = -4(n+1) - j(j-1) - (n-j)(n-j-1)` (each product
    /// vanishing outside its range absorbs the small-`n` case split),
    /// `M(j,j+2) = -(j+2)(j+1)` for `j <= n-2`, and
    /// `M(j,j-2) = -(n-j+2)(n-j+1)` for `j >= 2`.
    pub fn new(n: usize) -> Self {
        let n_i = n as i64;
        let mut matrix = vec![vec![0i64; n + 1]; n + 1];
        for j in 0..=n_i {
            matrix[j as usize][j as usize] =
                -4 * (n_i + 1) - j * (j - 1) - (n_i - j) * (n_i - j - 1);
            if j <= n_i - 2 {
                matrix[j as usize][(j + 2) as usize] = -(j + 2) * (j + 1);
            }
            if j >= 2 {
                matrix[j as usize][(j - 2) as usize] = -(n_i - j + 2) * (n_i - j + 1);
            }
        }
        MnSystem { degree: n, matrix }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// Column-wise dominance margin `|M(j,j)| - sum_(i != j) |M(i,j)|`;
    /// equals `4(n+1)` for every column, which is what makes the system
    /// solvable at every degree.
    pub fn column_dominance_margin(&self, j: usize) -> i64 {
        let diag = self.matrix[j][j].abs();
        let off: i64 = (0..=self.degree)
            .filter(|&i| i != j)
            .map(|i| self.matrix[i][j].abs())
            .sum();
        diag - off
    }

    /// Exact solve of `M_n a = b`.
    pub fn solve(&self, b: &[Rational]) -> Vec<Rational> {
        assert_eq!(b.len(), self.degree + 1);
        let a: Vec<Vec<Rational>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        solve_exact(a, b.to_vec()).expect("M_n is strictly diagonally dominant")
    }
}

/// `L(h) = Delta((1 - |z|^2) h)`, the operator the peeling loop inverts.
fn peel_operator(h: &BivarPoly) -> BivarPoly {
    BivarPoly::disk_factor().mul(h).laplacian()
}

/// Solves `Delta F = f` on the unit disk with `F = 0` on the circle,
/// exactly. The solution is `(1 - z1^2 - z2^2) g` with `deg g <= deg f`.
///
/// Peeling loop: cancel the leading homogeneous part of the residual with
/// `g_m` obtained from the `M_m` system; `L(g_m)` removes that part and
/// feeds back only strictly lower degree, so the residual degree descends
/// to zero.
pub fn poisson_solve(f: &BivarPoly) -> BivarPoly {
    let mut residual = f.clone();
    let mut g = BivarPoly::zero();
    while let Some(m) = residual.degree() {
        let leading = residual.leading_part();
        let b: Vec<Rational> = (0..=m).map(|j| leading.coeff(j, m - j)).collect();
        let a = MnSystem::new(m as usize).solve(&b);
        let mut g_m = BivarPoly::zero();
        for (j, coeff) in a.into_iter().enumerate() {
            g_m = g_m.add(&BivarPoly::monomial(j as u32, m - j as u32, coeff));
        }
        residual = residual.sub(&peel_operator(&g_m));
        g = g.add(&g_m);
    }
    BivarPoly::disk_factor().mul(&g)
}

/// Right-hand side `Delta rho_n` of the level-`n` Poisson problems: for the
/// word `I = (i1, ..., in)`,
/// `RHS(I) = -2 d/dz_(i1) [rho_(n-1)(i2..in)] - [i1 = i2] rho_(n-2)(i3..in)`.
pub fn rhs_level(n: usize, levels: &[Vec<BivarPoly>]) -> Vec<BivarPoly> {
    assert!(n >= 2, "the recursion starts at level 2");
    let prev = &levels[n - 1];
    let prev2 = &levels[n - 2];
    let size = 1usize << n;
    let mut out = Vec::with_capacity(size);
    let minus_two = Rational::from_int(-2);
    for idx in 0..size {
        // first letter most significant: i1 selects the derivative axis
        let i1 = idx >> (n - 1);
        let suffix = idx & ((1 << (n - 1)) - 1);
        let mut rhs = prev[suffix].partial(i1 as u8 + 1).scale(&minus_two);
        let i2 = suffix >> (n - 2);
        if i1 == i2 {
            let suffix2 = suffix & ((1 << (n - 2)) - 1);
            rhs = rhs.sub(&prev2[suffix2]);
        }
        out.push(rhs);
    }
    out
}

/// Computes the expected-signature field on the unit disk up to level `n`:
/// levels 0 and 1 are the constants 1 and 0; each higher level solves its
/// Poisson problems word by word. Levels are sequential (each needs the two
/// below); the words of one level are independent and solved in parallel.
pub fn expected_signature(truncation: usize) -> PolyTensor {
    let mut levels: Vec<Vec<BivarPoly>> = Vec::with_capacity(truncation + 1);
    levels.push(vec![BivarPoly::from_int(1)]);
    if truncation >= 1 {
        levels.push(vec![BivarPoly::zero(); 2]);
    }
    for n in 2..=truncation {
        let rhs = rhs_level(n, &levels);
        let solved: Vec<BivarPoly> = rhs.par_iter().map(poisson_solve).collect();
        levels.push(solved);
    }
    PolyTensor { truncation, levels }
}

/// Expected signature for exit from the disk of radius `r` centered at `c`,
/// started at `z`: translate, scale to the unit disk, evaluate, and dilate
/// back.
pub fn transport(
    phi: &PolyTensor,
    center: &[Rational; 2],
    radius: &Rational,
    z: &[Rational; 2],
) -> TruncatedTensor<Rational> {
    let local = [
        (&z[0] - &center[0]) / radius,
        (&z[1] - &center[1]) / radius,
    ];
    phi.evaluate(&local).dilate(radius)
}

pub fn transport_f64(
    phi: &PolyTensor,
    center: [f64; 2],
    radius: f64,
    z: [f64; 2],
) -> TruncatedTensor<f64> {
    let local = [(z[0] - center[0]) / radius, (z[1] - center[1]) / radius];
    phi.evaluate_f64(local).dilate(&radius)
}

/// Exact check that level `n` satisfies its PDE:
/// `Delta rho_n + 2 sum_i e_i (x) d rho_(n-1)/dz_i + (sum_i e_i (x) e_i) (x) rho_(n-2) = 0`.
pub fn residual_check(phi: &PolyTensor, n: usize) -> bool {
    assert!(n >= 2 && n <= phi.truncation());
    let rhs = rhs_level(n, &phi.levels);
    phi.levels[n]
        .iter()
        .zip(&rhs)
        .all(|(p, r)| p.laplacian().sub(r).is_zero())
}

/// Exact check that every level-`n` coefficient carries the boundary factor
/// `1 - z1^2 - z2^2` with quotient degree at most `n - 2`.
pub fn boundary_factor_check(phi: &PolyTensor, n: usize) -> bool {
    let factor = BivarPoly::disk_factor();
    phi.levels[n].iter().all(|p| match p.divide_exact(&factor) {
        Ok(q) => q
            .degree()
            .is_none_or(|d| d as usize <= n.saturating_sub(2)),
        Err(_) => false,
    })
}
