//! Python bindings for the hyperpath library.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hyperpath::analysis::{self, Method};
use hyperpath::boundary::s_matrix;
use hyperpath::fullmatrix;
use hyperpath::mcb::{self, McbMatrix};
use hyperpath::numtheory::{primes_in, PrimeModulus};
use hyperpath::report;
use hyperpath::scomplex::{build_complex, ComplexSpec};
use hyperpath::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Disagreement(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_method(method: &str) -> PyResult<Method> {
    method.parse().map_err(py_err)
}

/// Verdict for one (n, c).
#[pyclass(get_all, frozen, skip_from_py_object, name = "ClassificationRecord")]
#[derive(Clone)]
struct PyRecord {
    n: u64,
    c: u64,
    o_c: u64,
    log_c: u64,
    predicted_nonacyclic: bool,
    fast_singular: bool,
    witness_k: Option<usize>,
    codim: usize,
    is_hypertree: bool,
}

impl From<analysis::ClassificationRecord> for PyRecord {
    fn from(r: analysis::ClassificationRecord) -> Self {
        Self {
            n: r.n,
            c: r.c,
            o_c: r.o_c,
            log_c: r.log_c,
            predicted_nonacyclic: r.predicted_nonacyclic,
            fast_singular: r.fast_singular,
            witness_k: r.witness_k,
            codim: r.codim,
            is_hypertree: r.is_hypertree,
        }
    }
}

#[pymethods]
impl PyRecord {
    fn __repr__(&self) -> String {
        format!(
            "ClassificationRecord(n={}, c={}, codim={}, is_hypertree={}, witness_k={:?})",
            self.n, self.c, self.codim, self.is_hypertree, self.witness_k
        )
    }
}

/// A t x t matrix of r x r circulant blocks with rational coefficients.
#[pyclass(frozen, name = "Mcb")]
struct PyMcb {
    inner: McbMatrix,
}

#[pymethods]
impl PyMcb {
    /// blocks[i][j] is the length-r integer coefficient vector of block (i, j).
    #[new]
    fn new(r: usize, t: usize, blocks: Vec<Vec<Vec<i64>>>) -> PyResult<Self> {
        Ok(Self {
            inner: McbMatrix::from_int_blocks(r, t, &blocks).map_err(py_err)?,
        })
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    /// (singular, smallest witness k).
    #[pyo3(signature = (seed = 0))]
    fn is_singular(&self, seed: u64) -> (bool, Option<usize>) {
        let d = mcb::is_singular_fast_seeded(&self.inner, seed);
        (d.singular, d.witness_k)
    }

    #[pyo3(signature = (seed = 0))]
    fn codimension(&self, seed: u64) -> usize {
        mcb::codimension_seeded(&self.inner, seed)
    }

    /// [(k, nullity of the k-th evaluation)] over the divisors k of r.
    #[pyo3(signature = (seed = 0))]
    fn nullity_profile(&self, seed: u64) -> Vec<(usize, usize)> {
        mcb::nullity_profile(&self.inner, seed)
    }

    /// Integer coefficients of block (i, j), or None if they are not integers.
    fn block(&self, i: usize, j: usize) -> PyResult<Option<Vec<i64>>> {
        if i >= self.inner.t() || j >= self.inner.t() {
            return Err(PyValueError::new_err("block index out of range"));
        }
        Ok(mcb::poly_to_i64(self.inner.block(i, j), self.inner.r()))
    }

    fn __mul__(&self, other: &PyMcb) -> PyResult<PyMcb> {
        Ok(PyMcb {
            inner: mcb::mcb_multiply(&self.inner, &other.inner).map_err(py_err)?,
        })
    }
}

#[pyfunction]
#[pyo3(signature = (n, c, method = "fast", seed = 0))]
fn classify(n: u64, c: u64, method: &str, seed: u64) -> PyResult<PyRecord> {
    Ok(analysis::classify_seeded(n, c, parse_method(method)?, seed)
        .map_err(py_err)?
        .into())
}

#[pyfunction]
#[pyo3(signature = (min, max, method = "fast", jobs = 1))]
fn scan(min: u64, max: u64, method: &str, jobs: usize) -> PyResult<Vec<PyRecord>> {
    let records =
        analysis::scan(&primes_in(min, max), parse_method(method)?, jobs).map_err(py_err)?;
    Ok(records.into_iter().map(Into::into).collect())
}

/// Classification CSV for the primes in [min, max].
#[pyfunction]
#[pyo3(signature = (min, max, method = "fast", jobs = 1))]
fn scan_csv(min: u64, max: u64, method: &str, jobs: usize) -> PyResult<String> {
    let records =
        analysis::scan(&primes_in(min, max), parse_method(method)?, jobs).map_err(py_err)?;
    report::classification_csv(&records).map_err(py_err)
}

/// Ratio CSV for the primes in [min, max], by the early-exit decision.
#[pyfunction]
#[pyo3(signature = (min, max, jobs = 1))]
fn ratio_csv(min: u64, max: u64, jobs: usize) -> PyResult<String> {
    let decisions = analysis::decide_all(&primes_in(min, max), jobs).map_err(py_err)?;
    report::ratio_csv(&analysis::ratio_rows(&decisions)).map_err(py_err)
}

#[pyfunction]
fn s_matrix_of(n: u64, c: u64) -> PyResult<PyMcb> {
    Ok(PyMcb {
        inner: s_matrix(n, c).map_err(py_err)?,
    })
}

/// Sorted vertex triples of X_{2,n,c}.
#[pyfunction]
fn faces(n: u64, c: u64) -> PyResult<Vec<Vec<u64>>> {
    let fs = build_complex(ComplexSpec::new(2, n, c).map_err(py_err)?).map_err(py_err)?;
    Ok(fs.faces.into_iter().map(|f| f.vertices).collect())
}

#[pyfunction]
fn predict_nonacyclic(n: u64, c: u64) -> PyResult<bool> {
    analysis::predict_nonacyclic(n, c).map_err(py_err)
}

#[pyfunction]
fn valid_ks(n: u64, c: u64) -> PyResult<Vec<usize>> {
    analysis::valid_ks(n, c).map_err(py_err)
}

/// Exact check of the explicit kernel vector for S(w_k).
#[pyfunction]
fn verify_kernel(n: u64, c: u64, k: usize) -> PyResult<bool> {
    let v = analysis::kernel_vector(n, c, k).map_err(py_err)?;
    Ok(!v.is_zero() && v.verify().map_err(py_err)?)
}

#[pyfunction]
fn golden_ratio_cs(n: u64) -> Vec<u64> {
    analysis::golden_ratio_cs(n)
}

/// (u, log u, order of u) for the fixed generator of F_n^*.
#[pyfunction]
fn log_order_table(n: u64) -> PyResult<Vec<(u64, u64, u64)>> {
    Ok(PrimeModulus::new(n).map_err(py_err)?.log_order_table())
}

#[pyfunction]
fn rank_full(n: u64, c: u64) -> PyResult<usize> {
    fullmatrix::rank_full(n, c).map_err(py_err)
}

/// (rank F, full, hypertree, implication holds).
#[pyfunction]
fn check_full_rank_implication(n: u64, c: u64) -> PyResult<(usize, bool, bool, bool)> {
    let r = fullmatrix::check_full_rank_implication(n, c).map_err(py_err)?;
    Ok((r.rank_f, r.full, r.hypertree, r.implication_holds))
}

#[pymodule]
fn hyperpath_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRecord>()?;
    m.add_class::<PyMcb>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(scan_csv, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_csv, m)?)?;
    m.add_function(wrap_pyfunction!(s_matrix_of, m)?)?;
    m.add_function(wrap_pyfunction!(faces, m)?)?;
    m.add_function(wrap_pyfunction!(predict_nonacyclic, m)?)?;
    m.add_function(wrap_pyfunction!(valid_ks, m)?)?;
    m.add_function(wrap_pyfunction!(verify_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(golden_ratio_cs, m)?)?;
    m.add_function(wrap_pyfunction!(log_order_table, m)?)?;
    m.add_function(wrap_pyfunction!(rank_full, m)?)?;
    m.add_function(wrap_pyfunction!(check_full_rank_implication, m)?)?;
    Ok(())
}
