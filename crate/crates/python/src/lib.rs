use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use slitspiral::cli::{self, Format, InputDocument, Params, PathDocument, PlanOutput, ValidatedDomain};
use slitspiral::error::ErrorClass;
use slitspiral::geometry::Point;
use slitspiral::slitmap::MappingSolution;
use slitspiral::Error;

create_exception!(slitspiral, SlitspiralError, PyException);
create_exception!(slitspiral, ValidationError, SlitspiralError);
create_exception!(slitspiral, PlanningError, SlitspiralError);
create_exception!(slitspiral, NumericalError, SlitspiralError);

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err.class() {
        ErrorClass::Validation => ValidationError::new_err(msg),
        ErrorClass::Planning => PlanningError::new_err(msg),
        ErrorClass::Numerical => NumericalError::new_err(msg),
        ErrorClass::Io => PyOSError::new_err(msg),
    }
}

/// Round-trip a serializable value through JSON into plain Python objects.
fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = cli::to_json(value).map_err(to_py)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn xy(points: &[Point]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.re, p.im)).collect()
}

/// Parameters of `doc` with keyword overrides applied. Unknown keys are
/// rejected the same way the JSON document rejects them.
fn merged_params(doc: &InputDocument, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Params> {
    let Some(kw) = overrides.filter(|kw| !kw.is_empty()) else {
        return Ok(doc.params.clone());
    };
    let text: String = kw.py().import("json")?.call_method1("dumps", (kw,))?.extract()?;
    let patch: serde_json::Value = serde_json::from_str(&text).map_err(|e| to_py(e.into()))?;
    let mut base = serde_json::to_value(&doc.params).map_err(|e| to_py(e.into()))?;
    if let (Some(base), Some(patch)) = (base.as_object_mut(), patch.as_object()) {
        for (k, v) in patch {
            base.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(base).map_err(|e| to_py(e.into()))
}

/// A domain document: outer boundary, holes and default parameters.
#[pyclass(module = "slitspiral", frozen)]
struct Domain {
    doc: InputDocument,
}

impl Domain {
    fn validated(&self, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<(ValidatedDomain, Params)> {
        let params = merged_params(&self.doc, overrides)?;
        let domain = cli::validate_spec(&self.doc, &params).map_err(to_py)?;
        Ok((domain, params))
    }
}

#[pymethods]
impl Domain {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Domain {
            doc: InputDocument::parse(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Domain {
            doc: InputDocument::load(&path).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        cli::to_json(&self.doc).map_err(to_py)
    }

    /// Number of holes.
    #[getter]
    fn holes(&self) -> usize {
        self.doc.boundaries.len().saturating_sub(1)
    }

    #[getter]
    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_object(py, &self.doc.params)
    }

    /// Validation warnings (for example reversed boundaries) under the
    /// given parameter overrides.
    #[pyo3(signature = (**overrides))]
    fn warnings(&self, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Vec<String>> {
        Ok(self.validated(overrides)?.0.warnings)
    }

    /// Run the full pipeline. Keyword arguments override `params`.
    #[pyo3(signature = (**overrides))]
    fn plan(&self, py: Python<'_>, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Plan> {
        let (domain, params) = self.validated(overrides)?;
        let out = py.detach(|| cli::plan(&domain, &params)).map_err(to_py)?;
        Ok(Plan { out })
    }

    /// Solve the slit map only.
    #[pyo3(signature = (**overrides))]
    fn solve_map(&self, py: Python<'_>, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<SlitMap> {
        let (domain, params) = self.validated(overrides)?;
        let (solution, report) = py.detach(|| cli::map(&domain, &params)).map_err(to_py)?;
        let report = cli::to_json(&report).map_err(to_py)?;
        Ok(SlitMap { solution, report })
    }

    /// Largest inscribed circle of the domain, and of the band between the
    /// preimages of `|w| = gap[0]` and `|w| = gap[1]` when given.
    #[pyo3(signature = (gap=None, **overrides))]
    fn mic<'py>(
        &self,
        py: Python<'py>,
        gap: Option<(f64, f64)>,
        overrides: Option<&Bound<'py, PyDict>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (domain, params) = self.validated(overrides)?;
        let report = py.detach(|| cli::mic(&domain, &params, gap)).map_err(to_py)?;
        to_object(py, &report)
    }

    /// Score a path document (as written by `Plan.path_json`) against the domain.
    #[pyo3(signature = (path_json, **overrides))]
    fn rescore<'py>(
        &self,
        py: Python<'py>,
        path_json: &str,
        overrides: Option<&Bound<'py, PyDict>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (domain, params) = self.validated(overrides)?;
        let doc: PathDocument = serde_json::from_str(path_json).map_err(|e| to_py(e.into()))?;
        let report = py.detach(|| cli::rescore(&domain, &params, &doc)).map_err(to_py)?;
        to_object(py, &report)
    }
}

/// Result of `Domain.plan`.
#[pyclass(module = "slitspiral", frozen)]
struct Plan {
    out: PlanOutput,
}

#[pymethods]
impl Plan {
    /// Fused tool path as `(x, y)` tuples.
    #[getter]
    fn points(&self) -> Vec<(f64, f64)> {
        xy(&self.out.path.points)
    }

    /// Per-vertex flag marking fusion blends.
    #[getter]
    fn blend(&self) -> Vec<bool> {
        self.out.path.blend.clone()
    }

    #[getter]
    fn k(&self) -> usize {
        self.out.report.k
    }

    #[getter]
    fn coverage(&self) -> f64 {
        self.out.report.path.coverage_fraction
    }

    #[getter]
    fn length(&self) -> f64 {
        self.out.report.path.length
    }

    #[getter]
    fn iso_radii(&self) -> Vec<f64> {
        self.out.family.radii.clone()
    }

    /// Preimages of the iso-parameter circles, outermost first.
    #[getter]
    fn iso_curves(&self) -> Vec<Vec<(f64, f64)>> {
        self.out.family.curves.iter().map(|c| xy(c)).collect()
    }

    #[getter]
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_object(py, &self.out.report)
    }

    fn path_json(&self) -> PyResult<String> {
        cli::to_json(&self.out.path).map_err(to_py)
    }

    fn path_csv(&self) -> String {
        cli::path_csv(&self.out.path.points)
    }

    fn svg(&self) -> String {
        cli::render_svg(&self.out)
    }

    /// Write artifacts into `dir`; `formats` picks from json, csv, svg, report.
    #[pyo3(signature = (dir, formats=None))]
    fn write(&self, dir: PathBuf, formats: Option<Vec<String>>) -> PyResult<Vec<PathBuf>> {
        let formats = match formats {
            None => cli::ALL_FORMATS.to_vec(),
            Some(names) => names
                .iter()
                .map(|s| {
                    serde_json::from_value::<Format>(serde_json::Value::String(s.to_lowercase()))
                        .map_err(|_| ValidationError::new_err(format!("unknown format {s:?}")))
                })
                .collect::<PyResult<_>>()?,
        };
        cli::write_plan(&self.out, &dir, &formats).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Plan(k={}, points={}, coverage={:.4})",
            self.out.report.k,
            self.out.path.points.len(),
            self.out.report.path.coverage_fraction
        )
    }
}

/// A solved slit map.
#[pyclass(module = "slitspiral", frozen)]
struct SlitMap {
    solution: MappingSolution,
    report: String,
}

#[pymethods]
impl SlitMap {
    /// `"disc"` or `"annular"`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.solution.kind {
            slitspiral::slitmap::MapKind::Disc => "disc",
            slitspiral::slitmap::MapKind::Annular { .. } => "annular",
        }
    }

    /// Mapped radius of every boundary.
    #[getter]
    fn radii(&self) -> Vec<f64> {
        self.solution.radii.clone()
    }

    /// Slits as `(boundary, radius, start, extent)`.
    #[getter]
    fn slits(&self) -> Vec<(usize, f64, f64, f64)> {
        self.solution
            .slits
            .iter()
            .map(|s| (s.boundary, s.radius, s.start, s.extent))
            .collect()
    }

    #[getter]
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        py.import("json")?.call_method1("loads", (self.report.as_str(),))
    }

    fn forward(&self, z: Complex64) -> PyResult<Complex64> {
        self.solution.forward_eval(z).map_err(to_py)
    }

    fn inverse(&self, w: Complex64) -> PyResult<Complex64> {
        self.solution.inverse_eval(w).map_err(to_py)
    }

    /// Preimage of the circle `|w| = radius`.
    #[pyo3(signature = (radius, samples=1000))]
    fn circle_preimage(&self, radius: f64, samples: usize) -> Vec<(f64, f64)> {
        xy(&self.solution.circle_preimage(radius, samples))
    }

    fn __repr__(&self) -> String {
        format!("SlitMap(kind={:?}, radii={:?})", self.kind(), self.solution.radii)
    }
}

/// Spiral-to-traditional ratio for a run that took `elapsed_seconds`.
#[pyfunction]
fn str_ratio(m: usize, n: usize, n_hat: usize, k: usize, epsilon: f64, elapsed_seconds: f64) -> PyResult<f64> {
    slitspiral::metrics::str_ratio(m, n, n_hat, k, epsilon, elapsed_seconds).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "slitspiral")]
fn slitspiral_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Domain>()?;
    m.add_class::<Plan>()?;
    m.add_class::<SlitMap>()?;
    m.add_function(wrap_pyfunction!(str_ratio, m)?)?;
    m.add("SlitspiralError", py.get_type::<SlitspiralError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("PlanningError", py.get_type::<PlanningError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    Ok(())
}
