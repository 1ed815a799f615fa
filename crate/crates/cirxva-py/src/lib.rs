use pyo3::prelude::*;
#[pymodule]
fn cirxva_py(_m: &Bound<PyModule>) -> PyResult<()> { Ok(()) }
