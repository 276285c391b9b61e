use pyo3::prelude::*;

#[pymodule]
fn pbp_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
