use pyo3::prelude::*;

#[pyfunction]
fn ping() -> f64 { levylab_core::placeholder() }

#[pymodule]
fn levylab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ping, m)?)?;
    Ok(())
}
