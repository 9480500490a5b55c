//! Python bindings. Instances travel as JSON documents, results as plain
//! Python values; solver errors raise `ValueError`.

use mpg_duel::cli;
use mpg_duel::codes::{covering_radius as radius, ForbiddenSet};
use mpg_duel::error::Error;
use mpg_duel::finite;
use mpg_duel::gallery::build_example;
use mpg_duel::instance::{parse_instance, GameInstance, StartSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(document: &str, start_vertices: Option<(String, String)>) -> PyResult<(GameInstance, StartSpec)> {
    let inst = parse_instance(document).map_err(err)?;
    let start = match start_vertices {
        Some((v, u)) => StartSpec::vertices(&v, &u),
        None => inst
            .start
            .clone()
            .ok_or_else(|| PyValueError::new_err("document has no start; pass start_vertices"))?,
    };
    Ok((inst, start))
}

/// Runs the command-line front end; returns `(output, exit_code)`.
#[pyfunction]
fn execute(args: Vec<String>) -> (String, i32) {
    cli::execute(std::iter::once("mpg-duel".to_string()).chain(args))
}

/// Non-alternating `rounds`-round value as a string (`"a/b"` or a float).
/// Returns `(value, alice_walk, bob_walk)` with walks as edge ids.
#[pyfunction]
#[pyo3(signature = (document, rounds, start_vertices=None))]
fn value_nonalt_finite(
    document: &str,
    rounds: usize,
    start_vertices: Option<(String, String)>,
) -> PyResult<(String, Vec<String>, Vec<String>)> {
    let (inst, start) = load(document, start_vertices)?;
    let r = finite::value_nonalt_finite(&inst, rounds, &start).map_err(err)?;
    Ok((
        r.value.to_string(),
        r.witness_alice.ids(&inst.graph_g),
        r.witness_bob.ids(&inst.graph_h),
    ))
}

#[pyfunction]
#[pyo3(signature = (document, rounds, start_vertices=None))]
fn value_alt_finite(document: &str, rounds: usize, start_vertices: Option<(String, String)>) -> PyResult<String> {
    let (inst, start) = load(document, start_vertices)?;
    Ok(finite::value_alt_finite(&inst, rounds, &start).map_err(err)?.to_string())
}

/// Covering radius of the length-`n` code avoiding `forbidden` (e.g. `"00,11"`).
#[pyfunction]
#[pyo3(signature = (forbidden, n, k=None))]
fn covering_radius(forbidden: &str, n: usize, k: Option<usize>) -> PyResult<usize> {
    let f = ForbiddenSet::parse(forbidden, k).map_err(err)?;
    Ok(radius(&f, n).map_err(err)?.radius)
}

/// Instance document of a gallery example.
#[pyfunction]
fn gallery_document(name: &str) -> PyResult<String> {
    Ok(build_example(name).map_err(err)?.instance.to_json())
}

#[pymodule]
#[pyo3(name = "mpg_duel")]
fn mpg_duel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA", cli::SCHEMA)?;
    m.add_function(wrap_pyfunction!(execute, m)?)?;
    m.add_function(wrap_pyfunction!(value_nonalt_finite, m)?)?;
    m.add_function(wrap_pyfunction!(value_alt_finite, m)?)?;
    m.add_function(wrap_pyfunction!(covering_radius, m)?)?;
    m.add_function(wrap_pyfunction!(gallery_document, m)?)?;
    Ok(())
}
