//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde::Serialize;
use serde_json::Value;

use robust_risk::axioms::{self, Claim1Witness};
use robust_risk::market::{self, ArbitrageVerdict};
use robust_risk::portfolio;
use robust_risk::risk::{self, acceptance_cone};
use robust_risk::shortfall::{self, LossFunction, SrSpec, DEFAULT_BISECTION_TOL};
use robust_risk::{ErrorClass, Payoff, ProbabilityVector, ScenarioFile};

fn err(e: robust_risk::Error) -> PyErr {
    match e.class() {
        ErrorClass::Input => PyValueError::new_err(e.to_string()),
        ErrorClass::Numerical => PyArithmeticError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn dict<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &value)
}

fn payoff(values: Vec<f64>) -> PyResult<Payoff> {
    Payoff::new(values).map_err(err)
}

/// Convex hull of finitely many probability vectors.
#[pyclass(name = "AmbiguitySet", module = "robust_risk", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAmbiguitySet {
    inner: risk::AmbiguitySet,
}

#[pymethods]
impl PyAmbiguitySet {
    #[new]
    fn new(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        let vertices = vertices
            .into_iter()
            .map(ProbabilityVector::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(PyAmbiguitySet {
            inner: risk::AmbiguitySet::new(vertices).map_err(err)?,
        })
    }

    #[staticmethod]
    fn full_simplex(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(PyValueError::new_err("n must be at least 1"));
        }
        Ok(PyAmbiguitySet {
            inner: risk::AmbiguitySet::full_simplex(n),
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices().iter().map(|v| v.weights().to_vec()).collect()
    }

    /// `min over vertices of E_pi[x]`.
    fn utility(&self, x: Vec<f64>) -> PyResult<f64> {
        risk::utility(&self.inner, &payoff(x)?).map_err(err)
    }

    /// Dict with `value`, `utility`, `argmin_vertex` and `acceptable`.
    fn maxmin<'py>(&self, py: Python<'py>, x: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        dict(py, &risk::maxmin_utility(&self.inner, &payoff(x)?).map_err(err)?)
    }

    /// Coherent risk of `x` under the acceptance cone of this set.
    fn rho(&self, x: Vec<f64>) -> PyResult<f64> {
        risk::rho_crm(&acceptance_cone(&self.inner), &payoff(x)?).map_err(err)
    }

    /// Shortfall risk. `loss` is one of `identity`, `linear`, `exponential`,
    /// `positive_part`.
    #[pyo3(signature = (x, loss = "identity", lam = 0.0, slope = 1.0, intercept = 0.0, rate = 1.0, tol = DEFAULT_BISECTION_TOL))]
    #[allow(clippy::too_many_arguments)]
    fn shortfall_risk(
        &self,
        x: Vec<f64>,
        loss: &str,
        lam: f64,
        slope: f64,
        intercept: f64,
        rate: f64,
        tol: f64,
    ) -> PyResult<f64> {
        let loss = match loss {
            "identity" => LossFunction::Identity,
            "linear" => LossFunction::Linear { slope, intercept },
            "exponential" => LossFunction::Exponential { rate },
            "positive_part" => LossFunction::PositivePart,
            other => return Err(PyValueError::new_err(format!("unknown loss {other:?}"))),
        };
        let spec = SrSpec::new(loss, lam, self.inner.clone()).map_err(err)?;
        shortfall::shortfall_risk(&spec, &payoff(x)?, tol).map_err(err)
    }

    /// Randomized axiom battery for the maxmin preference of this set.
    #[pyo3(signature = (trials = 1000, seed = 0))]
    fn axioms<'py>(&self, py: Python<'py>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        if trials == 0 {
            return Err(PyValueError::new_err("trials must be at least 1"));
        }
        let report = axioms::run_axiom_battery(&self.inner, self.inner.dim(), trials, seed).map_err(err)?;
        dict(py, &report)
    }

    /// Position accepted under `pi_hat` but outside this set's acceptance
    /// cone; raises `ValueError` when `pi_hat` lies in the hull.
    fn claim1_witness<'py>(&self, py: Python<'py>, pi_hat: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        let pi = ProbabilityVector::new(pi_hat).map_err(err)?;
        let w: Claim1Witness = axioms::claim1_witness(&self.inner, &pi).map_err(err)?;
        dict(py, &w)
    }

    fn __len__(&self) -> usize {
        self.inner.vertices().len()
    }

    fn __repr__(&self) -> String {
        format!("AmbiguitySet(dim={}, vertices={})", self.inner.dim(), self.inner.vertices().len())
    }
}

/// One-period market. `payoff_matrix[n][j]` is asset `j`'s payoff in state `n`.
#[pyclass(name = "Market", module = "robust_risk", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMarket {
    inner: market::Market,
}

#[pymethods]
impl PyMarket {
    #[new]
    #[pyo3(signature = (payoff_matrix, prices, endowment, wealth, bond_column = None))]
    fn new(
        payoff_matrix: Vec<Vec<f64>>,
        prices: Vec<f64>,
        endowment: Vec<f64>,
        wealth: f64,
        bond_column: Option<usize>,
    ) -> PyResult<Self> {
        let inner = market::Market::new(payoff_matrix, prices, payoff(endowment)?, wealth, bond_column)
            .map_err(err)?;
        Ok(PyMarket { inner })
    }

    #[getter]
    fn states(&self) -> usize {
        self.inner.states()
    }

    #[getter]
    fn assets(&self) -> usize {
        self.inner.assets()
    }

    /// Dict tagged by `verdict`: `no_arbitrage` with state prices, or
    /// `arbitrage` with a witness portfolio.
    fn check_arbitrage<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        dict(py, &market::check_arbitrage(&self.inner).map_err(err)?)
    }

    fn is_arbitrage_free(&self) -> PyResult<bool> {
        Ok(matches!(
            market::check_arbitrage(&self.inner).map_err(err)?,
            ArbitrageVerdict::NoArbitrage(_)
        ))
    }

    /// `(price, portfolio)` of the cheapest super-replicating portfolio.
    fn superreplication_price(&self, target: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        let s = market::superreplication_price(&self.inner, &payoff(target)?).map_err(err)?;
        Ok((s.price, s.portfolio))
    }

    fn valuation_bound(&self, target: Vec<f64>) -> PyResult<f64> {
        market::valuation_bound(&self.inner, &payoff(target)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Market(states={}, assets={})", self.inner.states(), self.inner.assets())
    }
}

/// A market paired with an ambiguity set.
#[pyclass(name = "Scenario", module = "robust_risk", frozen)]
struct PyScenario {
    inner: portfolio::Scenario,
    digest: Option<String>,
}

#[pymethods]
impl PyScenario {
    #[new]
    fn new(market: &PyMarket, ambiguity: &PyAmbiguitySet) -> PyResult<Self> {
        Ok(PyScenario {
            inner: portfolio::Scenario::new(market.inner.clone(), ambiguity.inner.clone()).map_err(err)?,
            digest: None,
        })
    }

    /// Builds a scenario from the JSON scenario-file format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = ScenarioFile::parse(text).map_err(err)?;
        Ok(PyScenario {
            inner: file.scenario().map_err(err)?,
            digest: Some(file.digest()),
        })
    }

    /// SHA-256 of the canonical scenario file, when built from JSON.
    #[getter]
    fn digest(&self) -> Option<String> {
        self.digest.clone()
    }

    #[getter]
    fn market(&self) -> PyMarket {
        PyMarket {
            inner: self.inner.market().clone(),
        }
    }

    #[getter]
    fn ambiguity(&self) -> PyAmbiguitySet {
        PyAmbiguitySet {
            inner: self.inner.ambiguity().clone(),
        }
    }

    fn optimize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        dict(py, &portfolio::solve_program1(&self.inner).map_err(err)?)
    }

    fn equivalence<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        dict(py, &portfolio::equivalence_report(&self.inner).map_err(err)?)
    }

    fn prudence<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        dict(py, &portfolio::prudence_check(&self.inner).map_err(err)?)
    }
}

/// Checks monotonicity, cash invariance, subadditivity and positive
/// homogeneity of `-U` for the given ambiguity set.
#[pyfunction]
#[pyo3(signature = (ambiguity, trials = 1000, seed = 0))]
fn check_coherence<'py>(
    py: Python<'py>,
    ambiguity: &PyAmbiguitySet,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    if trials == 0 {
        return Err(PyValueError::new_err("trials must be at least 1"));
    }
    let d = &ambiguity.inner;
    let report = risk::check_coherence(|x| -risk::utility(d, x).expect("dimension matches"), d.dim(), trials, seed);
    dict(py, &report)
}

#[pymodule]
#[pyo3(name = "robust_risk")]
fn robust_risk_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyAmbiguitySet>()?;
    m.add_class::<PyMarket>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(check_coherence, m)?)?;
    Ok(())
}
