//! Python bindings: the environment, baseline policies, episode runner and
//! the scalar physics helpers.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use swipt_mec::channel::{rates, LinkGeometry};
use swipt_mec::harness::{make_policy, run_episode as run_rs};
use swipt_mec::policy::PolicyKind;
use swipt_mec::server::Response;
use swipt_mec::trace::trace_to_json;
use swipt_mec::{energy, Action, Error, ScenarioConfig};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::EpisodeFinished | Error::NotReset => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn value_to_py(py: Python<'_>, value: &Value) -> PyResult<Py<PyAny>> {
    match value {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_py_any(py),
            (None, Some(i)) => i.into_py_any(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_py_any(py),
        },
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, value_to_py(py, v)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn serialize<T: serde::Serialize>(item: &T) -> PyResult<Value> {
    serde_json::to_value(item).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_config(config_json: Option<&str>) -> PyResult<ScenarioConfig> {
    let cfg = match config_json {
        Some(text) => ScenarioConfig::from_json_str(text).map_err(to_py_err)?,
        None => ScenarioConfig::default(),
    };
    cfg.validate().map_err(to_py_err)?;
    Ok(cfg)
}

/// Reset/step environment. `config_json` is a JSON object of overrides.
#[pyclass(name = "Env", module = "swipt_mec_py")]
struct PyEnv {
    inner: swipt_mec::Env,
}

#[pymethods]
impl PyEnv {
    #[new]
    #[pyo3(signature = (config_json=None))]
    fn new(config_json: Option<&str>) -> PyResult<Self> {
        Ok(Self {
            inner: swipt_mec::Env::new(parse_config(config_json)?).map_err(to_py_err)?,
        })
    }

    /// Start an episode; returns the normalized observation `[x, y]`.
    #[pyo3(signature = (seed=None))]
    fn reset(&mut self, seed: Option<u64>) -> PyResult<[f64; 2]> {
        let seed = seed.unwrap_or(self.inner.config().seed);
        Ok(self.inner.reset(seed).map_err(to_py_err)?.normalized)
    }

    /// Apply one action; returns `(obs, reward, done, info)`.
    fn step(&mut self, py: Python<'_>, v: f64, theta: f64) -> PyResult<([f64; 2], f64, bool, Py<PyAny>)> {
        let out = self.inner.step(Action::new(v, theta)).map_err(to_py_err)?;
        let info = match serialize(&Response::from_step(&out))? {
            Value::Object(mut map) => map.remove("info").unwrap_or(Value::Null),
            _ => Value::Null,
        };
        Ok((out.observation.normalized, out.reward, out.done, value_to_py(py, &info)?))
    }

    #[getter]
    fn done(&self) -> bool {
        self.inner.is_done()
    }

    /// Raw UAV position in metres.
    fn position(&self) -> PyResult<[f64; 2]> {
        Ok(self.inner.uav().map_err(to_py_err)?.position())
    }

    fn batteries(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.terminals().map_err(to_py_err)?.iter().map(|t| t.battery).collect())
    }

    fn terminals(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        value_to_py(py, &serialize(&self.inner.terminals().map_err(to_py_err)?)?)
    }

    fn config(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        value_to_py(py, &serialize(self.inner.config())?)
    }

    /// Trace of the episode so far as a JSON string.
    fn trace_json(&self) -> PyResult<String> {
        trace_to_json(&self.inner.trace().map_err(to_py_err)?).map_err(to_py_err)
    }
}

/// Run one episode with a named baseline (hover, random, seeker, external)
/// and return its trace as a JSON string.
#[pyfunction]
#[pyo3(signature = (policy, seed, config_json=None, actions=None))]
fn run_episode(policy: &str, seed: u64, config_json: Option<&str>, actions: Option<Vec<(f64, f64)>>) -> PyResult<String> {
    let kind: PolicyKind = policy.parse().map_err(to_py_err)?;
    let cfg = parse_config(config_json)?;
    let actions: Vec<Action> = actions
        .unwrap_or_default()
        .into_iter()
        .map(|(v, theta)| Action::new(v, theta))
        .collect();
    let mut policy = make_policy(kind, seed, &actions);
    let trace = run_rs(&cfg, seed, policy.as_mut()).map_err(to_py_err)?;
    trace_to_json(&trace).map_err(to_py_err)
}

#[pyfunction]
fn default_config_json() -> String {
    serde_json::to_string(&ScenarioConfig::default()).expect("default config serializes")
}

#[pyfunction]
fn jain_index(batteries: Vec<f64>) -> PyResult<f64> {
    swipt_mec::jain_index(&batteries).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (p_in, a2=150.0, b2=0.014, p_eh_max=0.024))]
fn eh_logistic(p_in: f64, a2: f64, b2: f64, p_eh_max: f64) -> f64 {
    energy::eh_logistic(p_in, a2, b2, p_eh_max)
}

#[pyfunction]
#[pyo3(signature = (v, config_json=None))]
fn propulsion_power(v: f64, config_json: Option<&str>) -> PyResult<f64> {
    Ok(energy::propulsion_power(v, &parse_config(config_json)?.propulsion))
}

/// Link budget at horizontal distance `d_horiz` from a UAV at the configured
/// altitude, as a dict (rates in bit/s, harvested power in W).
#[pyfunction]
#[pyo3(signature = (d_horiz, config_json=None))]
fn link_budget(py: Python<'_>, d_horiz: f64, config_json: Option<&str>) -> PyResult<Py<PyAny>> {
    let cfg = parse_config(config_json)?;
    let budget = rates(&LinkGeometry::new(d_horiz, cfg.altitude), &cfg).map_err(to_py_err)?;
    let mut value = serialize(&budget)?;
    if let Value::Object(map) = &mut value {
        map.insert("eh_power".into(), serialize(&energy::eh_rate(&budget, &cfg))?);
    }
    value_to_py(py, &value)
}

#[pymodule]
fn swipt_mec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnv>()?;
    m.add_function(wrap_pyfunction!(run_episode, m)?)?;
    m.add_function(wrap_pyfunction!(default_config_json, m)?)?;
    m.add_function(wrap_pyfunction!(jain_index, m)?)?;
    m.add_function(wrap_pyfunction!(eh_logistic, m)?)?;
    m.add_function(wrap_pyfunction!(propulsion_power, m)?)?;
    m.add_function(wrap_pyfunction!(link_budget, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
