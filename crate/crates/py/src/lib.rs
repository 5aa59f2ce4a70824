//! Python bindings. Reports cross the boundary as the same JSON the CLI
//! prints, decoded into plain dicts and lists.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use randstab_core::discrete::{extract_pmf as core_extract_pmf, DiscretePgf, PmfTable, DEFAULT_N_MAX, DEFAULT_RADIUS};
use randstab_core::harness::cli::{run_experiment, Command, Settings};
use randstab_core::harness::{ks_two_sample as core_ks, tv_distance_pmf as core_tv};
use randstab_core::sample::{
    sample_compounder, sample_discrete, sample_transform, RandomSource, SampleBatch, DEFAULT_SEED,
};
use randstab_core::transform::{PgfFamily, Transform};
use randstab_core::Error;

create_exception!(randstab, RandstabError, PyValueError);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Overflow(_) => PyOverflowError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => RandstabError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for randstab_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

fn json_to_py<'py>(py: Python<'py>, bytes: &[u8]) -> PyResult<Bound<'py, PyAny>> {
    let text = std::str::from_utf8(bytes).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let bytes = serde_json::to_vec(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &bytes)
}

fn run<'py>(py: Python<'py>, command: Command, settings: Settings) -> PyResult<Bound<'py, PyAny>> {
    let outcome = py.detach(|| run_experiment(command, &settings, None)).py_err()?;
    json_to_py(py, &outcome.output)
}

fn pmf_dict<'py>(py: Python<'py>, table: &PmfTable) -> PyResult<Bound<'py, PyAny>> {
    serialize(py, table)
}

fn counts(batch: SampleBatch) -> PyResult<Vec<u64>> {
    batch.counts().map(<[u64]>::to_vec).py_err()
}

/// Compounder PGF such as `harris:a=3,k=2`.
#[pyclass(frozen, module = "randstab")]
struct Compounder {
    inner: PgfFamily,
}

#[pymethods]
impl Compounder {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        Ok(Compounder {
            inner: descriptor.parse().py_err()?,
        })
    }

    /// `P(t)` for complex `t` in the closed unit disc.
    fn eval(&self, t: Complex64) -> PyResult<Complex64> {
        self.inner.eval(t).py_err()
    }

    fn eval_real(&self, t: f64) -> PyResult<f64> {
        self.inner.eval_real(t).py_err()
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    #[pyo3(signature = (n_max = DEFAULT_N_MAX, radius = DEFAULT_RADIUS))]
    fn pmf<'py>(&self, py: Python<'py>, n_max: usize, radius: f64) -> PyResult<Bound<'py, PyAny>> {
        pmf_dict(py, &core_extract_pmf(&self.inner, n_max, radius).py_err()?)
    }

    #[pyo3(signature = (n, seed = DEFAULT_SEED, stream = 0))]
    fn sample(&self, py: Python<'_>, n: usize, seed: u64, stream: u64) -> PyResult<Vec<u64>> {
        let batch = py.detach(|| sample_compounder(&self.inner, n, &mut RandomSource::new(seed, stream))).py_err()?;
        counts(batch)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Compounder('{}')", self.inner)
    }
}

/// Laplace transform or characteristic function such as `gamma:beta=0.5`.
#[pyclass(frozen, module = "randstab")]
struct Law {
    inner: Transform,
}

#[pymethods]
impl Law {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        Ok(Law {
            inner: descriptor.parse().py_err()?,
        })
    }

    /// `"lt"` or `"cf"`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner {
            Transform::Lt(_) => "lt",
            Transform::Cf(_) => "cf",
        }
    }

    /// `φ(x)`: real for a LT (`x ≥ 0`), complex for a CF.
    fn eval(&self, x: f64) -> PyResult<Complex64> {
        match &self.inner {
            Transform::Lt(phi) => phi.eval(x).map(|v| Complex64::new(v, 0.0)).py_err(),
            Transform::Cf(phi) => Ok(phi.eval(x)),
        }
    }

    #[pyo3(signature = (n, seed = DEFAULT_SEED, stream = 0))]
    fn sample(&self, py: Python<'_>, n: usize, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
        let batch = py.detach(|| sample_transform(&self.inner, n, &mut RandomSource::new(seed, stream))).py_err()?;
        batch.reals().map(<[f64]>::to_vec).py_err()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Law('{}')", self.inner)
    }
}

/// Discrete law such as `dml:alpha=0.5,lambda=1@0.25`.
#[pyclass(frozen, module = "randstab")]
struct DiscreteLaw {
    inner: DiscretePgf,
}

#[pymethods]
impl DiscreteLaw {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        Ok(DiscreteLaw {
            inner: descriptor.parse().py_err()?,
        })
    }

    fn eval(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.eval(s).py_err()
    }

    fn eval_real(&self, s: f64) -> PyResult<f64> {
        self.inner.eval_real(s).py_err()
    }

    #[pyo3(signature = (n_max = DEFAULT_N_MAX, radius = DEFAULT_RADIUS))]
    fn pmf<'py>(&self, py: Python<'py>, n_max: usize, radius: f64) -> PyResult<Bound<'py, PyAny>> {
        pmf_dict(py, &core_extract_pmf(&self.inner, n_max, radius).py_err()?)
    }

    #[pyo3(signature = (n, seed = DEFAULT_SEED, stream = 0))]
    fn sample(&self, py: Python<'_>, n: usize, seed: u64, stream: u64) -> PyResult<Vec<u64>> {
        let batch = py.detach(|| sample_discrete(&self.inner, n, &mut RandomSource::new(seed, stream))).py_err()?;
        counts(batch)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("DiscreteLaw('{}')", self.inner)
    }
}

/// `transform` takes a LT/CF descriptor, `discrete` a discrete one.
/// Without `c` the scale is solved for.
#[pyfunction]
#[pyo3(signature = (compounder, transform = None, discrete = None, c = None, c_sweep = None, grid = None, tol = None))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    compounder: String,
    transform: Option<String>,
    discrete: Option<String>,
    c: Option<f64>,
    c_sweep: Option<String>,
    grid: Option<String>,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let settings = Settings {
        compounder: Some(compounder),
        transform,
        discrete,
        c,
        c_sweep,
        grid,
        tol,
        ..Settings::default()
    };
    run(py, Command::Verify, settings)
}

#[pyfunction]
#[pyo3(signature = (transform = None, discrete = None, c = None, c_sweep = None, candidates = None))]
fn identify<'py>(
    py: Python<'py>,
    transform: Option<String>,
    discrete: Option<String>,
    c: Option<f64>,
    c_sweep: Option<String>,
    candidates: Option<String>,
) -> PyResult<Bound<'py, PyAny>> {
    let settings = Settings {
        transform,
        discrete,
        c,
        c_sweep,
        candidates,
        ..Settings::default()
    };
    run(py, Command::Identify, settings)
}

/// Coefficients of a compounder or discrete-law PGF.
#[pyfunction]
#[pyo3(signature = (descriptor, n_max = DEFAULT_N_MAX, radius = DEFAULT_RADIUS))]
fn extract_pmf<'py>(py: Python<'py>, descriptor: &str, n_max: usize, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let table = match descriptor.parse::<PgfFamily>() {
        Ok(p) => core_extract_pmf(&p, n_max, radius),
        Err(first) => match descriptor.parse::<DiscretePgf>() {
            Ok(q) => core_extract_pmf(&q, n_max, radius),
            Err(_) => Err(first),
        },
    }
    .py_err()?;
    pmf_dict(py, &table)
}

/// `(statistic, p_value)` of the two-sample KS test.
#[pyfunction]
fn ks_two_sample(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    let r = core_ks(&SampleBatch::continuous("x", 0, 0, x), &SampleBatch::continuous("y", 0, 0, y)).py_err()?;
    Ok((r.statistic, r.p_value))
}

/// TV distance between observed counts and an exact pmf table.
#[pyfunction]
fn tv_distance_pmf(counts: Vec<u64>, table: Vec<f64>) -> PyResult<f64> {
    let deficiency = 1.0 - table.iter().sum::<f64>();
    let exact = PmfTable::from_coeffs(table, 1.0);
    let exact = PmfTable {
        mass_deficiency: deficiency,
        ..exact
    };
    core_tv(&SampleBatch::discrete("counts", 0, 0, counts), &exact).py_err()
}

/// Simulates `c·S_N` for `N ~ n` and summands `x`, and compares with `x`.
#[pyfunction]
#[pyo3(signature = (n, x, c, samples = 100_000, seed = DEFAULT_SEED))]
fn monte_carlo<'py>(
    py: Python<'py>,
    n: String,
    x: String,
    c: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let settings = Settings {
        count: Some(n),
        summand: Some(x),
        c: Some(c),
        samples: Some(samples),
        seed: Some(seed),
        ..Settings::default()
    };
    run(py, Command::Mc, settings)
}

#[pyfunction]
#[pyo3(signature = (seed = DEFAULT_SEED))]
fn run_suite(py: Python<'_>, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let settings = Settings {
        seed: Some(seed),
        ..Settings::default()
    };
    run(
        py,
        Command::Suite {
            name: randstab_core::harness::cli::SuiteName::Paper,
        },
        settings,
    )
}

#[pymodule]
fn randstab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RandstabError", m.py().get_type::<RandstabError>())?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_class::<Compounder>()?;
    m.add_class::<Law>()?;
    m.add_class::<DiscreteLaw>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(identify, m)?)?;
    m.add_function(wrap_pyfunction!(extract_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
