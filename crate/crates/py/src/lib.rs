//! Python bindings: `import formation`.
//!
//! Structured results cross the boundary as plain dicts and lists with the
//! same shape as the CLI and HTTP payloads. Failures raise
//! `formation.FormationError` with `code` and `details` attributes.

use formation_core::analysis::convex_hull as hull;
use formation_core::assessment::{self, Correspondence};
use formation_core::persistence::{self, ReportFormat};
use formation_core::Point;
use formation_service::analysis::{analyze, AnalysisRequest};
use formation_service::edits::{apply_edit, EditRequest};
use formation_service::pipeline::{run_assessment, AssessmentInput};
use formation_service::ServiceError;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use serde::Serialize;

create_exception!(formation, FormationError, PyValueError);

fn raise(py: Python<'_>, err: impl Into<ServiceError>) -> PyErr {
    let err = err.into();
    let body = err.to_json();
    let py_err = FormationError::new_err(format!("{}: {}", err.code(), err));
    let value = py_err.value(py);
    let attached = value
        .setattr("code", err.code())
        .and_then(|()| value.setattr("details", to_py(py, &body["error"])?));
    match attached {
        Ok(()) => py_err,
        Err(e) => e,
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_py<T: serde::de::DeserializeOwned>(py: Python<'_>, value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = py.import("json")?.call_method1("dumps", (value,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| {
        raise(
            py,
            ServiceError::BadRequest {
                code: "INVALID_REQUEST",
                message: e.to_string(),
                location: None,
            },
        )
    })
}

fn point((x, y): (f64, f64)) -> Point {
    Point::new(x, y)
}

/// A choreography document.
#[pyclass(module = "formation", skip_from_py_object)]
#[derive(Clone)]
struct Choreography {
    inner: formation_core::Choreography,
}

#[pymethods]
impl Choreography {
    /// Parses and validates a document given as `str` or `bytes`.
    #[staticmethod]
    fn load(py: Python<'_>, document: &Bound<'_, PyAny>) -> PyResult<Self> {
        let bytes: Vec<u8> = match document.extract::<String>() {
            Ok(text) => text.into_bytes(),
            Err(_) => document.extract()?,
        };
        let inner = persistence::load(&bytes).map_err(|e| raise(py, e))?;
        Ok(Self { inner })
    }

    /// Builds a choreography from a dict in document form.
    #[staticmethod]
    fn from_dict(py: Python<'_>, document: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text: String = py.import("json")?.call_method1("dumps", (document,))?.extract()?;
        Self::load(py, PyBytes::new(py, text.as_bytes()).as_any())
    }

    /// Deterministic document bytes.
    fn save<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let bytes = persistence::save(&self.inner).map_err(|e| raise(py, e))?;
        Ok(PyBytes::new(py, &bytes))
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    /// Model-level violations as `[{"code", "message", "location"}]`.
    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &formation_core::validate(&self.inner))
    }

    /// Applies one edit operation, e.g. `{"op": "move_entity", ...}`, and
    /// returns its result. The choreography is unchanged when it fails.
    fn edit(&mut self, py: Python<'_>, operation: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        let request: EditRequest = from_py(py, operation)?;
        let mut next = self.inner.clone();
        let result = apply_edit(&mut next, request).map_err(|e| raise(py, e))?;
        self.inner = next;
        to_py(py, &result)
    }

    /// Distances, collisions and heatmap. With no arguments every section is
    /// computed with default parameters.
    #[pyo3(signature = (distances=None, collisions=None, heatmap=None))]
    fn analyze(
        &self,
        py: Python<'_>,
        distances: Option<bool>,
        collisions: Option<f64>,
        heatmap: Option<f64>,
    ) -> PyResult<Py<PyAny>> {
        let mut request = AnalysisRequest {
            distances: distances.unwrap_or(false),
            collisions,
            heatmap,
        };
        if request.is_empty() {
            request = AnalysisRequest::everything();
        }
        let document = analyze(&self.inner, &request).map_err(|e| raise(py, e))?;
        to_py(py, &document)
    }

    /// Runs the assessment pipeline on a track document and
    /// `[((u, v), (x, y)), ...]` pixel/floor correspondences.
    #[pyo3(signature = (tracks_xml, correspondences, stride=1, select=None, format="json"))]
    fn assess(
        &self,
        py: Python<'_>,
        tracks_xml: &str,
        correspondences: Vec<((f64, f64), (f64, f64))>,
        stride: u32,
        select: Option<Vec<String>>,
        format: &str,
    ) -> PyResult<Py<PyAny>> {
        let correspondences: Vec<_> = correspondences
            .into_iter()
            .map(|(video, floor)| Correspondence::new(point(video), point(floor)))
            .collect();
        let input = AssessmentInput {
            tracks_xml,
            correspondences: &correspondences,
            stride,
            select: select.as_deref(),
        };
        let report = py
            .detach(|| run_assessment(&self.inner, &input))
            .map_err(|e| raise(py, e))?;
        match format {
            "json" => to_py(py, &report),
            "csv" => {
                let bytes = persistence::export_report(&report, ReportFormat::Csv).map_err(|e| raise(py, e))?;
                Ok(String::from_utf8_lossy(&bytes).into_owned().into_pyobject(py)?.into_any().unbind())
            }
            other => Err(raise(py, persistence::PersistError::UnknownFormat(other.to_owned()))),
        }
    }

    #[getter]
    fn title(&self) -> String {
        self.inner.title.clone()
    }

    #[getter]
    fn revision(&self) -> u64 {
        self.inner.revision
    }

    #[getter]
    fn formation_ids(&self) -> Vec<String> {
        self.inner.formations.iter().map(|f| f.id.to_string()).collect()
    }

    #[getter]
    fn entity_ids(&self) -> Vec<String> {
        self.inner.entities.iter().map(|e| e.id.to_string()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Choreography(title={:?}, revision={}, formations={})",
            self.inner.title,
            self.inner.revision,
            self.inner.formations.len()
        )
    }
}

/// A pixel-to-floor projective transform.
#[pyclass(module = "formation", skip_from_py_object)]
#[derive(Clone)]
struct Homography {
    inner: assessment::Homography,
    #[pyo3(get)]
    rms_residual: f64,
    #[pyo3(get)]
    max_residual: f64,
}

#[pymethods]
impl Homography {
    #[new]
    fn new(py: Python<'_>, rows: [[f64; 3]; 3]) -> PyResult<Self> {
        let inner = assessment::Homography::from_rows(rows).map_err(|e| raise(py, e))?;
        Ok(Self {
            inner,
            rms_residual: 0.0,
            max_residual: 0.0,
        })
    }

    #[getter]
    fn matrix(&self) -> [[f64; 3]; 3] {
        self.inner.rows()
    }

    /// Maps a pixel `(u, v)` to floor metres `(x, y)`.
    fn project(&self, py: Python<'_>, pixel: (f64, f64)) -> PyResult<(f64, f64)> {
        let p = self.inner.project(point(pixel)).map_err(|e| raise(py, e))?;
        Ok((p.x, p.y))
    }

    fn inverse(&self, py: Python<'_>) -> PyResult<Self> {
        let inner = self.inner.inverse().map_err(|e| raise(py, e))?;
        Ok(Self {
            inner,
            rms_residual: 0.0,
            max_residual: 0.0,
        })
    }

    fn __repr__(&self) -> String {
        format!("Homography({:?})", self.inner.rows())
    }
}

/// Estimates the pixel-to-floor homography from `[((u, v), (x, y)), ...]`.
#[pyfunction]
fn estimate_homography(py: Python<'_>, correspondences: Vec<((f64, f64), (f64, f64))>) -> PyResult<Homography> {
    let correspondences: Vec<_> = correspondences
        .into_iter()
        .map(|(video, floor)| Correspondence::new(point(video), point(floor)))
        .collect();
    let estimate = assessment::estimate_homography(&correspondences).map_err(|e| raise(py, e))?;
    Ok(Homography {
        inner: estimate.homography,
        rms_residual: estimate.rms_residual,
        max_residual: estimate.max_residual,
    })
}

/// Counter-clockwise hull vertices of a point set.
#[pyfunction]
fn convex_hull(py: Python<'_>, points: Vec<(f64, f64)>) -> PyResult<Vec<(f64, f64)>> {
    let points: Vec<_> = points.into_iter().map(point).collect();
    let vertices = hull(&points).map_err(|e| raise(py, e))?;
    Ok(vertices.into_iter().map(|p| (p.x, p.y)).collect())
}

/// The choreography document JSON Schema.
#[pyfunction]
fn schema(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &persistence::schema())
}

#[pymodule]
#[pyo3(name = "formation")]
fn formation(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FormationError", m.py().get_type::<FormationError>())?;
    m.add("SCHEMA_VERSION", formation_core::SCHEMA_VERSION)?;
    m.add_class::<Choreography>()?;
    m.add_class::<Homography>()?;
    m.add_function(wrap_pyfunction!(estimate_homography, m)?)?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(schema, m)?)?;
    Ok(())
}
