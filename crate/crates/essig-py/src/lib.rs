//! Python bindings for the expected-signature engines.
//!
//! Exposes the float tensor algebra (`Tensor`), the exact disk field
//! (`DiskField`), and the interval / lattice / Monte Carlo entry points.
//! Exact rational results cross the boundary as JSON strings; float results
//! as native numbers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use essig_core::scalar::parse_rational;
use essig_core::tensor::TruncatedTensor;
use essig_core::word::Word;
use essig_core::{disk, interval, lattice, mc};

fn parse_word(word: &str) -> PyResult<Word> {
    word.parse().map_err(PyValueError::new_err)
}

/// An element of the truncated tensor algebra with float coefficients.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Tensor {
    inner: TruncatedTensor<f64>,
}

#[pymethods]
impl Tensor {
    /// The unit element 1 = (1, 0, 0, ...).
    #[staticmethod]
    fn unit(dim: usize, truncation: usize) -> PyResult<Self> {
        if !(1..=9).contains(&dim) {
            return Err(PyValueError::new_err(
                "dimension must be in 1..=9 (words are digit strings)",
            ));
        }
        Ok(Tensor {
            inner: TruncatedTensor::unit(dim, truncation),
        })
    }

    /// Signature of a straight segment with the given increment.
    #[staticmethod]
    fn exp(increment: Vec<f64>, truncation: usize) -> PyResult<Self> {
        if increment.is_empty() || increment.len() > 9 {
            return Err(PyValueError::new_err(
                "increment dimension must be in 1..=9 (words are digit strings)",
            ));
        }
        Ok(Tensor {
            inner: TruncatedTensor::exp_increment(&increment, truncation),
        })
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn truncation(&self) -> usize {
        self.inner.truncation()
    }

    fn add(&self, other: &Tensor) -> PyResult<Tensor> {
        self.check_shape(other)?;
        Ok(Tensor {
            inner: self.inner.add(&other.inner),
        })
    }

    /// Truncated tensor product.
    fn mul(&self, other: &Tensor) -> PyResult<Tensor> {
        self.check_shape(other)?;
        Ok(Tensor {
            inner: self.inner.mul(&other.inner),
        })
    }

    fn scale(&self, factor: f64) -> Tensor {
        Tensor {
            inner: self.inner.scale(&factor),
        }
    }

    fn inverse(&self) -> PyResult<Tensor> {
        self.inner
            .inverse()
            .map(|inner| Tensor { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Dilation: level n scaled by eps^n.
    fn dilate(&self, eps: f64) -> Tensor {
        Tensor {
            inner: self.inner.dilate(&eps),
        }
    }

    /// Letter-wise rotation by an angle (d = 2 only).
    fn rotate(&self, theta: f64) -> PyResult<Tensor> {
        if self.inner.dim() != 2 {
            return Err(PyValueError::new_err("rotate requires dimension 2"));
        }
        Ok(Tensor {
            inner: self.inner.rotate_by_angle(theta),
        })
    }

    /// Coefficient of a word given in text form, e.g. "112".
    fn coeff(&self, word: &str) -> PyResult<f64> {
        let w = parse_word(word)?;
        self.inner
            .project_word(&w)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Dense coefficient array of one level.
    fn level(&self, n: usize) -> PyResult<Vec<f64>> {
        self.inner
            .project_level(n)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn homogeneous_norm(&self) -> f64 {
        self.inner.homogeneous_norm()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Tensor(d={}, N={}, |.|={:.6})",
            self.inner.dim(),
            self.inner.truncation(),
            self.inner.homogeneous_norm()
        )
    }
}

impl Tensor {
    fn check_shape(&self, other: &Tensor) -> PyResult<()> {
        if self.inner.dim() != other.inner.dim()
            || self.inner.truncation() != other.inner.truncation()
        {
            return Err(PyValueError::new_err("tensor shape mismatch"));
        }
        Ok(())
    }
}

/// The exact expected-signature field of Brownian motion on the unit disk.
#[pyclass]
struct DiskField {
    inner: disk::PolyTensor,
}

#[pymethods]
impl DiskField {
    #[new]
    fn new(truncation: usize) -> Self {
        DiskField {
            inner: disk::expected_signature(truncation),
        }
    }

    #[getter]
    fn truncation(&self) -> usize {
        self.inner.truncation()
    }

    /// Float evaluation at a point of the closed disk.
    fn evaluate(&self, z1: f64, z2: f64) -> PyResult<Tensor> {
        if z1 * z1 + z2 * z2 > 1.0 + 1e-12 {
            return Err(PyValueError::new_err("point lies outside the unit disk"));
        }
        Ok(Tensor {
            inner: self.inner.evaluate_f64([z1, z2]),
        })
    }

    /// Exact evaluation; coordinates are rational literals like "3/10" or
    /// "0.3", and the result is the tensor JSON with exact coefficients.
    fn evaluate_exact(&self, z1: &str, z2: &str) -> PyResult<String> {
        let x = parse_rational(z1).map_err(PyValueError::new_err)?;
        let y = parse_rational(z2).map_err(PyValueError::new_err)?;
        Ok(self.inner.evaluate(&[x, y]).to_json().to_string())
    }

    /// Expected signature for the disk of radius r centered at (c1, c2),
    /// started at (z1, z2).
    fn transport(&self, c1: f64, c2: f64, r: f64, z1: f64, z2: f64) -> PyResult<Tensor> {
        if r <= 0.0 {
            return Err(PyValueError::new_err("radius must be positive"));
        }
        if (z1 - c1).powi(2) + (z2 - c2).powi(2) > r * r + 1e-12 {
            return Err(PyValueError::new_err("point lies outside the disk"));
        }
        Ok(Tensor {
            inner: disk::transport_f64(&self.inner, [c1, c2], r, [z1, z2]),
        })
    }

    /// Exact polynomial of one word coefficient, as JSON monomials.
    fn word_polynomial(&self, word: &str) -> PyResult<String> {
        let w = parse_word(word)?;
        if w.len() > self.inner.truncation() || !w.fits(2) {
            return Err(PyValueError::new_err("word out of range"));
        }
        Ok(self.inner.level(w.len())[w.index(2)].to_json().to_string())
    }

    /// Exact PDE residual check for one level.
    fn residual_ok(&self, level: usize) -> PyResult<bool> {
        if level < 2 || level > self.inner.truncation() {
            return Err(PyValueError::new_err("level must be in 2..=truncation"));
        }
        Ok(disk::residual_check(&self.inner, level))
    }

    /// Exact boundary-factor check for one level.
    fn boundary_factor_ok(&self, level: usize) -> PyResult<bool> {
        if level < 2 || level > self.inner.truncation() {
            return Err(PyValueError::new_err("level must be in 2..=truncation"));
        }
        Ok(disk::boundary_factor_check(&self.inner, level))
    }

    /// Residual of the circle mean-value identity at truncation 2.
    fn mean_value_residual(&self, z1: f64, z2: f64, eps: f64) -> PyResult<f64> {
        if self.inner.truncation() < 2 {
            return Err(PyValueError::new_err("needs truncation >= 2"));
        }
        Ok(mc::mean_value_check([z1, z2], eps, &self.inner, 1024))
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!("DiskField(N={})", self.inner.truncation())
    }
}

/// Levels of the 1-D expected signature on [-1, 1]: rational coefficient
/// strings by ascending power.
#[pyfunction]
fn interval_levels(truncation: usize) -> Vec<Vec<String>> {
    interval::ode_recursion(truncation)
        .iter()
        .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect())
        .collect()
}

/// The same levels evaluated at a starting point x.
#[pyfunction]
fn interval_eval(truncation: usize, x: f64) -> PyResult<Vec<f64>> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(PyValueError::new_err("x must lie in [-1, 1]"));
    }
    Ok(interval::ode_recursion(truncation)
        .iter()
        .map(|p| p.evaluate_f64(x))
        .collect())
}

/// Exact expected signature of the simple random walk on the lattice domain
/// with the given interior points; returns the field as a JSON string keyed
/// by point.
#[pyfunction]
fn lattice_signature(dim: usize, points: Vec<Vec<i64>>, truncation: usize) -> PyResult<String> {
    if dim == 0 || dim > 9 {
        return Err(PyValueError::new_err("dimension must be in 1..=9"));
    }
    let domain = lattice::LatticeDomain::new(dim, points)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let field = lattice::expected_signature(&domain, truncation)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(field.to_json().to_string())
}

/// Truncated signature of a piecewise-linear 2-D path.
#[pyfunction]
fn signature_of_path(points: Vec<(f64, f64)>, truncation: usize) -> PyResult<Tensor> {
    if points.is_empty() {
        return Err(PyValueError::new_err("path needs at least one point"));
    }
    let pts: Vec<[f64; 2]> = points.into_iter().map(|(x, y)| [x, y]).collect();
    Ok(Tensor {
        inner: mc::signature_from_points(&pts, truncation),
    })
}

/// Monte Carlo estimate of the disk expected signature; returns the mean
/// tensor and the per-word standard errors. Deterministic for a fixed seed.
#[pyfunction]
#[pyo3(signature = (start, center, radius, truncation, paths, dt, seed=0))]
#[allow(clippy::too_many_arguments)]
fn mc_estimate(
    start: (f64, f64),
    center: (f64, f64),
    radius: f64,
    truncation: usize,
    paths: u64,
    dt: f64,
    seed: u64,
) -> PyResult<(Tensor, Tensor)> {
    if paths < 1 {
        return Err(PyValueError::new_err("paths must be >= 1"));
    }
    if dt <= 0.0 || radius <= 0.0 {
        return Err(PyValueError::new_err("dt and radius must be positive"));
    }
    let d = (start.0 - center.0).powi(2) + (start.1 - center.1).powi(2);
    if d.sqrt() > radius + 1e-9 {
        return Err(PyValueError::new_err("start lies outside the disk"));
    }
    let est = mc::estimate_phi(
        [start.0, start.1],
        [center.0, center.1],
        radius,
        truncation,
        paths,
        dt,
        seed,
    );
    Ok((Tensor { inner: est.mean }, Tensor { inner: est.std_err }))
}

#[pymodule]
fn essig_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Tensor>()?;
    m.add_class::<DiskField>()?;
    m.add_function(wrap_pyfunction!(interval_levels, m)?)?;
    m.add_function(wrap_pyfunction!(interval_eval, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_signature, m)?)?;
    m.add_function(wrap_pyfunction!(signature_of_path, m)?)?;
    m.add_function(wrap_pyfunction!(mc_estimate, m)?)?;
    Ok(())
}
