//! Python bindings: channels, rate regions, property suites and the link simulator.
//!
//! Structured results (reports, information tables) are returned as Python dicts and
//! lists built from their JSON form.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use swsc::channels::Channel as RsChannel;
use swsc::corpus::{discrete_corpus, CORPUS_SEED};
use swsc::mi::MiCache;
use swsc::regions::{fm_project, rs_gap_demo, FmMode, FmSystem, GapConfig, IcInfo, RateRegion2};
use swsc::simulator::{schedules, simulate as rs_simulate, theory_point as rs_theory_point, BlockSchedule, SimConfig};
use swsc::verify::{run_suite, Suite};

fn err(e: swsc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A two-user interference channel (finite-alphabet or Gaussian with symbol maps).
#[pyclass(module = "pyswsc", frozen)]
pub struct Channel {
    inner: RsChannel,
}

#[pymethods]
impl Channel {
    /// Parses a channel JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: RsChannel::from_json(text).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self { inner: RsChannel::load(std::path::Path::new(path)).map_err(err)? })
    }

    /// Channel `index` of the bundled seeded discrete corpus.
    #[staticmethod]
    fn corpus(index: usize) -> Self {
        let ic = discrete_corpus(CORPUS_SEED, index + 1).pop().expect("count is positive");
        Self { inner: RsChannel::Discrete(ic) }
    }

    /// Symmetric Gaussian channel with named symbol maps.
    #[staticmethod]
    #[pyo3(signature = (snr_db, inr_db, x_map = "4pam_natural", w_map = "bpsk"))]
    fn gaussian(snr_db: f64, inr_db: f64, x_map: &str, w_map: &str) -> PyResult<Self> {
        let text = serde_json::json!({
            "type": "gaussian", "snr_db": snr_db, "inr_db": inr_db, "x_map": x_map, "w_map": w_map,
        })
        .to_string();
        Self::from_json(&text)
    }

    /// The ten single-letter mutual informations, keyed like `I(X;Y1|W)`.
    fn info<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let joint = self.inner.to_joint().map_err(err)?;
        let info = IcInfo::new(&MiCache::new(joint)).map_err(err)?;
        let mut m = serde_json::Map::new();
        for (k, r) in info.rx.iter().enumerate() {
            let (own, other) = if k == 0 { ("X", "W") } else { ("W", "X") };
            let y = format!("Y{}", k + 1);
            m.insert(format!("I({own};{y})"), r.own.into());
            m.insert(format!("I({other};{y})"), r.other.into());
            m.insert(format!("I({own};{y}|{other})"), r.own_given.into());
            m.insert(format!("I({other};{y}|{own})"), r.other_given.into());
            m.insert(format!("I(X,W;{y})"), r.both.into());
        }
        to_py(py, &m)
    }

    /// Region of a scheme: ian, scd, sd, mix, snd, rs, swsc, swsc-union or hk.
    #[pyo3(signature = (scheme, split = None, order = None, grid = 21))]
    fn region(&self, py: Python<'_>, scheme: &str, split: Option<&str>, order: Option<&str>, grid: usize) -> PyResult<Region> {
        let inner = py
            .detach(|| swsc::cli::scheme_region(&self.inner, scheme, split, order, grid))
            .map_err(err)?;
        Ok(Region { inner })
    }
}

/// A union of convex polygons in the (R1, R2) plane.
#[pyclass(module = "pyswsc", frozen)]
pub struct Region {
    inner: RateRegion2,
}

#[pymethods]
impl Region {
    #[pyo3(signature = (r1, r2, tol = 1e-9))]
    fn contains(&self, r1: f64, r2: f64, tol: f64) -> bool {
        self.inner.contains(r1, r2, tol)
    }

    fn r1_max(&self) -> f64 {
        self.inner.r1_max()
    }

    fn r2_max(&self) -> f64 {
        self.inner.r2_max()
    }

    /// Largest R2 at the given R1, or None beyond the region.
    fn max_r2(&self, r1: f64) -> Option<f64> {
        self.inner.max_r2(r1)
    }

    fn max_symmetric(&self) -> f64 {
        self.inner.max_symmetric()
    }

    /// Boundary samples as (R1, R2, source label).
    #[pyo3(signature = (samples = 200))]
    fn boundary(&self, samples: usize) -> Vec<(f64, f64, String)> {
        self.inner.boundary(samples).into_iter().map(|p| (p.r1, p.r2, p.label)).collect()
    }

    #[pyo3(signature = (samples = 200))]
    fn boundary_csv(&self, samples: usize) -> String {
        self.inner.boundary_csv(samples)
    }

    fn constraints<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.constraints_json())
    }

    fn __len__(&self) -> usize {
        self.inner.conjunctions.len()
    }
}

/// Runs a property suite; returns the report with one entry per check.
#[pyfunction]
fn verify<'py>(py: Python<'py>, suite: &str) -> PyResult<Bound<'py, PyAny>> {
    let s: Suite = suite.parse().map_err(err)?;
    let r = py.detach(|| run_suite(s)).map_err(err)?;
    let v = serde_json::json!({ "suite": r.suite, "passed": r.passed(), "checks": r.checks, "elapsed_s": r.elapsed_s });
    to_py(py, &v)
}

/// Projects a part-rate system onto (R1, R2). `stream_of[i]` is the message of part i;
/// each atom is (parts, value). Returns (a, b, rhs, atom multiplicities) per constraint.
#[pyfunction]
#[pyo3(signature = (stream_of, atoms, symbolic = false))]
fn fm_project_atoms(
    stream_of: Vec<usize>,
    atoms: Vec<(Vec<usize>, f64)>,
    symbolic: bool,
) -> PyResult<Vec<(u32, u32, f64, Vec<u32>)>> {
    let mut sys = FmSystem::new(stream_of).map_err(err)?;
    for (parts, v) in &atoms {
        sys.add(parts, *v).map_err(err)?;
    }
    let mode = if symbolic { FmMode::Symbolic } else { FmMode::Numeric };
    let p = fm_project(&sys, mode).map_err(err)?;
    Ok(p.constraints.into_iter().map(|c| (c.a, c.b, c.rhs, c.atoms)).collect())
}

/// Theoretical symmetric rates (IAN, SWCM, SND) of the symmetric Gaussian channel.
#[pyfunction]
#[pyo3(signature = (snr_db, inr_db, x_map = "4pam_natural", w_map = "bpsk"))]
fn theory_point<'py>(py: Python<'py>, snr_db: f64, inr_db: f64, x_map: &str, w_map: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = py.detach(|| rs_theory_point(snr_db, inr_db, x_map, w_map)).map_err(err)?;
    to_py(py, &p)
}

/// Link simulation from a JSON config (missing fields take defaults); returns the
/// SWSC and IAN reports.
#[pyfunction]
#[pyo3(signature = (config_json = "{}"))]
fn simulate<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SimConfig::from_json(config_json).map_err(err)?;
    let r = py.detach(|| rs_simulate(&cfg)).map_err(err)?;
    to_py(py, &r)
}

/// Block schedule table of a K-layer sender over `blocks` blocks.
#[pyfunction]
#[pyo3(signature = (layers, blocks, stream = 1, name = "X"))]
fn schedule_table(layers: usize, blocks: usize, stream: usize, name: &str) -> PyResult<String> {
    Ok(BlockSchedule::new(layers, blocks).map_err(err)?.table(stream, name))
}

/// Schedules of both senders for a simulation config.
#[pyfunction]
#[pyo3(signature = (config_json = "{}"))]
fn config_schedules<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SimConfig::from_json(config_json).map_err(err)?;
    to_py(py, &schedules(&cfg).map_err(err)?)
}

/// The rate-splitting shortfall search at (snr_db, inr_db).
#[pyfunction]
#[pyo3(signature = (snr_db = 6.0, inr_db = 9.0))]
fn gap_demo<'py>(py: Python<'py>, snr_db: f64, inr_db: f64) -> PyResult<Bound<'py, PyAny>> {
    let cfg = GapConfig { snr_db, inr_db, ..Default::default() };
    let r = py.detach(|| rs_gap_demo(&cfg)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn pyswsc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Channel>()?;
    m.add_class::<Region>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(fm_project_atoms, m)?)?;
    m.add_function(wrap_pyfunction!(theory_point, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(schedule_table, m)?)?;
    m.add_function(wrap_pyfunction!(config_schedules, m)?)?;
    m.add_function(wrap_pyfunction!(gap_demo, m)?)?;
    Ok(())
}
