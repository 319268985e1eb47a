//! Python bindings for `confmap`.

use confmap::diagnostics as diag;
use confmap::geometry::{DomainSpec, GeometryError, Location};
use confmap::maps::{self, MapError, MapOptions, Target};
use confmap::rational::{self, Direction, RationalError};
use confmap::render::{self, RenderSpec};
use confmap::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(confmap, ConfmapError, PyException);
create_exception!(confmap, GeometryFailure, ConfmapError);
create_exception!(confmap, SolverFailure, ConfmapError);
create_exception!(confmap, ToleranceNotReached, SolverFailure);

fn geometry_err(e: GeometryError) -> PyErr {
    GeometryFailure::new_err(e.to_string())
}

fn map_err(e: MapError) -> PyErr {
    match e {
        MapError::TolUnreachable { .. } => ToleranceNotReached::new_err(e.to_string()),
        MapError::NotSimplyConnected(_)
        | MapError::WrongConnectivity(_)
        | MapError::CenterOutside(_)
        | MapError::NoQuadMarking
        | MapError::PointOutsideDomain(_) => GeometryFailure::new_err(e.to_string()),
        e => SolverFailure::new_err(e.to_string()),
    }
}

fn rational_err(e: RationalError) -> PyErr {
    match e {
        RationalError::DegreeExhausted { .. } => ToleranceNotReached::new_err(e.to_string()),
        e => SolverFailure::new_err(e.to_string()),
    }
}

/// A bounded planar domain with at most one hole.
#[pyclass(name = "Domain", module = "confmap", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDomain {
    inner: DomainSpec,
}

#[pymethods]
impl PyDomain {
    /// Parses the JSON domain format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        DomainSpec::from_json(text).map(|inner| PyDomain { inner }).map_err(geometry_err)
    }

    /// Polygon through `vertices` (counterclockwise), optionally marked as a quadrilateral.
    #[staticmethod]
    #[pyo3(signature = (vertices, quad=None))]
    fn polygon(vertices: Vec<Complex64>, quad: Option<[usize; 4]>) -> PyResult<Self> {
        let arcs = confmap::geometry::fixtures::polygon_arcs(&vertices);
        confmap::geometry::build_domain(arcs, vec![], quad)
            .map(|inner| PyDomain { inner })
            .map_err(geometry_err)
    }

    /// Disk of the given center and radius.
    #[staticmethod]
    #[pyo3(signature = (center=Complex64::new(0.0, 0.0), radius=1.0))]
    fn disk(center: Complex64, radius: f64) -> PyResult<Self> {
        if !(radius > 0.0) {
            return Err(PyValueError::new_err("radius must be positive"));
        }
        Ok(PyDomain {
            inner: confmap::geometry::fixtures::disk(center, radius),
        })
    }

    /// `r_inner < |z - center| < r_outer`.
    #[staticmethod]
    #[pyo3(signature = (r_inner, r_outer, center=Complex64::new(0.0, 0.0)))]
    fn annulus(r_inner: f64, r_outer: f64, center: Complex64) -> PyResult<Self> {
        use confmap::geometry::fixtures::circle_arcs;
        confmap::geometry::build_domain(
            circle_arcs(center, r_outer, false),
            vec![circle_arcs(center, r_inner, true)],
            None,
        )
        .map(|inner| PyDomain { inner })
        .map_err(geometry_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_raw().to_json()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    #[getter]
    fn area(&self) -> f64 {
        self.inner.area()
    }

    #[getter]
    fn holes(&self) -> usize {
        self.inner.holes().len()
    }

    #[getter]
    fn corners(&self) -> Vec<(Complex64, f64)> {
        self.inner.corners().iter().map(|c| (c.location, c.interior_angle)).collect()
    }

    #[getter]
    fn quad(&self) -> Option<[usize; 4]> {
        self.inner.quad()
    }

    /// `"inside"`, `"outside"` or `"boundary"`.
    fn contains(&self, z: Complex64) -> &'static str {
        match self.inner.contains(z) {
            Location::Inside => "inside",
            Location::Outside => "outside",
            Location::Boundary => "boundary",
        }
    }

    fn conjugate(&self) -> PyResult<Self> {
        self.inner
            .conjugate_quad()
            .map(|inner| PyDomain { inner })
            .ok_or_else(|| GeometryFailure::new_err("domain has no quadrilateral marking"))
    }

    /// Image under `z ↦ a z + b`.
    fn transformed(&self, a: Complex64, b: Complex64) -> PyResult<Self> {
        self.inner
            .transformed(a, b)
            .map(|inner| PyDomain { inner })
            .map_err(geometry_err)
    }

    fn elongation(&self) -> f64 {
        diag::elongation_estimate(&self.inner).l
    }

    fn __repr__(&self) -> String {
        format!(
            "Domain(arcs={}, holes={}, corners={})",
            self.inner.outer().len(),
            self.inner.holes().len(),
            self.inner.corners().len()
        )
    }
}

/// A certified conformal map onto the disk, an annulus or a rectangle.
#[pyclass(name = "ConformalMap", module = "confmap", frozen)]
struct PyMap {
    inner: maps::ConformalMap,
}

#[pymethods]
impl PyMap {
    #[getter]
    fn target(&self) -> String {
        self.inner.target.to_string()
    }

    /// `R` for the annulus, `μ` for the rectangle.
    #[getter]
    fn modulus(&self) -> Option<f64> {
        self.inner.modulus
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual().max_residual
    }

    #[getter]
    fn dof(&self) -> usize {
        self.inner.residual().fitted_dof
    }

    #[getter]
    fn certified(&self) -> bool {
        self.inner.certified
    }

    #[getter]
    fn center(&self) -> Complex64 {
        self.inner.center
    }

    #[getter]
    fn domain(&self) -> PyDomain {
        PyDomain {
            inner: self.inner.domain.clone(),
        }
    }

    /// Values `f(z)`.
    fn __call__(&self, py: Python<'_>, points: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        Ok(self.evaluate(py, points)?.into_iter().map(|(f, _)| f).collect())
    }

    /// Pairs `(f(z), f'(z))`.
    fn evaluate(&self, py: Python<'_>, points: Vec<Complex64>) -> PyResult<Vec<(Complex64, Complex64)>> {
        py.detach(|| maps::evaluate_map(&self.inner, &points)).map_err(map_err)
    }

    /// Preimages of canonical-domain points.
    fn invert(&self, py: Python<'_>, targets: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        py.detach(|| maps::invert_map(&self.inner, &targets)).map_err(map_err)
    }

    /// `log |f(z)|` for a disk map.
    fn green(&self, z: Complex64) -> PyResult<f64> {
        maps::green_function(&self.inner, z).map_err(map_err)
    }

    /// Rational approximants `(forward, inverse)` fitted to `samples` boundary points.
    #[pyo3(signature = (samples=2000, tol=1e-6, max_degree=200))]
    fn compress(
        &self,
        py: Python<'_>,
        samples: usize,
        tol: f64,
        max_degree: usize,
    ) -> PyResult<(PyRational, PyRational)> {
        py.detach(|| {
            let table = rational::boundary_correspondence(&self.inner, samples)?;
            let f = rational::fit_rational(&table, Direction::Forward, tol, max_degree)?;
            let g = rational::fit_rational(&table, Direction::Inverse, tol, max_degree)?;
            Ok((PyRational { inner: f }, PyRational { inner: g }))
        })
        .map_err(rational_err)
    }

    /// Boundary distortion `max |f'| / min |f'|` away from corners.
    #[pyo3(signature = (samples=2000, corner_clearance=0.0))]
    fn distortion(&self, samples: usize, corner_clearance: f64) -> f64 {
        diag::boundary_distortion(&self.inner, samples, corner_clearance)
    }

    #[pyo3(signature = (radial=8, angular=16))]
    fn grid_svg(&self, py: Python<'_>, radial: usize, angular: usize) -> PyResult<String> {
        py.detach(|| render::render_grid_svg(&self.inner, &RenderSpec::grid(radial, angular)))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[pyo3(signature = (resolution=120))]
    fn field_svg(&self, resolution: usize) -> PyResult<String> {
        let spec = RenderSpec {
            resolution,
            ..Default::default()
        };
        render::render_field_svg(&self.inner, &spec).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        let r = self.inner.residual();
        format!(
            "ConformalMap(target={}, modulus={:?}, residual={:.3e}, dof={})",
            self.inner.target, self.inner.modulus, r.max_residual, r.fitted_dof
        )
    }
}

/// Barycentric rational approximant.
#[pyclass(name = "RationalApproximant", module = "confmap", frozen)]
struct PyRational {
    inner: rational::RationalApproximant,
}

#[pymethods]
impl PyRational {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        rational::RationalApproximant::from_json(text)
            .map(|inner| PyRational { inner })
            .map_err(rational_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn accuracy(&self) -> f64 {
        self.inner.accuracy
    }

    #[getter]
    fn direction(&self) -> &'static str {
        match self.inner.direction {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        }
    }

    #[getter]
    fn support(&self) -> Vec<Complex64> {
        self.inner.support.clone()
    }

    fn poles(&self) -> Vec<Complex64> {
        self.inner.poles()
    }

    fn __call__(&self, py: Python<'_>, points: Vec<Complex64>) -> Vec<Complex64> {
        py.detach(|| rational::evaluate_rational(&self.inner, &points))
    }

    fn __repr__(&self) -> String {
        format!(
            "RationalApproximant(direction={}, degree={}, accuracy={:.3e})",
            self.direction(),
            self.inner.degree(),
            self.inner.accuracy
        )
    }
}

/// Map `domain` onto `"disk"`, `"annulus"` or `"rectangle"`.
#[pyfunction]
#[pyo3(signature = (domain, target="disk", center=None, tol=1e-8, max_dof=2000, best_effort=false))]
fn conformal_map(
    py: Python<'_>,
    domain: &PyDomain,
    target: &str,
    center: Option<Complex64>,
    tol: f64,
    max_dof: usize,
    best_effort: bool,
) -> PyResult<PyMap> {
    let target: Target = target.parse().map_err(|e: String| PyValueError::new_err(e))?;
    let mut opts = MapOptions::new(tol).with_max_dof(max_dof);
    if best_effort {
        opts = opts.best_effort();
    }
    let d = &domain.inner;
    py.detach(|| maps::conformal_map(d, target, center, &opts))
        .map(|inner| PyMap { inner })
        .map_err(map_err)
}

/// `(asymptotic, series_value, terms_used)` for the rectangle `(-μ, μ) × (-1, 1)`.
#[pyfunction]
fn end_hitting_probability(mu: f64) -> PyResult<(f64, f64, usize)> {
    diag::end_hitting_probability(mu)
        .map(|p| (p.asymptotic, p.series_value, p.terms_used))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `(scale, representable_in_double)` for elongation `L`.
#[pyfunction]
fn crowding_forecast(l: f64) -> PyResult<(f64, bool)> {
    diag::crowding_forecast(l)
        .map(|f| (f.scale, f.representable_in_double))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn resistance_of_quadrilateral(mu: f64, rho: f64) -> PyResult<f64> {
    diag::resistance_of_quadrilateral(mu, rho).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
#[pyo3(name = "confmap")]
fn confmap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", confmap::VERSION)?;
    m.add_class::<PyDomain>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyRational>()?;
    m.add_function(wrap_pyfunction!(conformal_map, m)?)?;
    m.add_function(wrap_pyfunction!(end_hitting_probability, m)?)?;
    m.add_function(wrap_pyfunction!(crowding_forecast, m)?)?;
    m.add_function(wrap_pyfunction!(resistance_of_quadrilateral, m)?)?;
    let py = m.py();
    m.add("ConfmapError", py.get_type::<ConfmapError>())?;
    m.add("GeometryFailure", py.get_type::<GeometryFailure>())?;
    m.add("SolverFailure", py.get_type::<SolverFailure>())?;
    m.add("ToleranceNotReached", py.get_type::<ToleranceNotReached>())?;
    Ok(())
}
