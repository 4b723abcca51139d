//! Python bindings: thin wrappers over the core engine. Weights cross the
//! boundary as lists/tuples of integers in doubled coordinates; characters
//! and decompositions come back as dicts keyed by coordinate tuples.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use weylquant::charring::{
    decompose_into_k, freudenthal_multiplicities, weyl_character, FormalCharacter,
};
use weylquant::fixedpoint;
use weylquant::multiplicity::{
    self, gp_comparison, kostant_branching, multiplicity_spectrum, multiplicity_theorem,
    partition_count, partition_problem, Window,
};
use weylquant::quantize::{gkrs_multiplet, localization_character, main_formula_character};
use weylquant::rootsys::{self, GroupSide, Weight};

fn err(e: weylquant::Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn side(group: &str) -> PyResult<GroupSide> {
    match group {
        "G" | "g" | "ambient" => Ok(GroupSide::Ambient),
        "K" | "k" | "subgroup" => Ok(GroupSide::Subgroup),
        other => Err(PyValueError::new_err(format!(
            "group must be \"G\" or \"K\", got {other:?}"
        ))),
    }
}

fn char_to_dict<'py>(py: Python<'py>, chi: &FormalCharacter) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    for (w, c) in chi.terms() {
        dict.set_item(pyo3::types::PyTuple::new(py, w.coords())?, c)?;
    }
    Ok(dict)
}

fn map_to_dict<'py>(
    py: Python<'py>,
    map: &BTreeMap<Weight, i64>,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    for (w, c) in map {
        dict.set_item(pyo3::types::PyTuple::new(py, w.coords())?, c)?;
    }
    Ok(dict)
}

/// An equal-rank pair K ⊂ G given by a Cartan type and simple roots of the
/// subgroup (doubled coordinates; empty list for K = T).
#[pyclass(name = "Pair")]
struct PyPair {
    inner: rootsys::SubgroupPair,
}

#[pymethods]
impl PyPair {
    #[new]
    #[pyo3(signature = (cartan_type, k_simple_roots = Vec::new()))]
    fn new(cartan_type: &str, k_simple_roots: Vec<Vec<i64>>) -> PyResult<Self> {
        let rs = rootsys::build_root_system(cartan_type).map_err(err)?;
        let roots: Vec<Weight> = k_simple_roots.into_iter().map(Weight).collect();
        Ok(PyPair { inner: rootsys::make_pair(rs, &roots).map_err(err)? })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        self.inner.g.cartan.clone()
    }

    fn positive_roots(&self) -> Vec<Vec<i64>> {
        self.inner.g.positive_roots.iter().map(|w| w.coords().to_vec()).collect()
    }

    fn k_positive_roots(&self) -> Vec<Vec<i64>> {
        self.inner.k_positive_roots.iter().map(|w| w.coords().to_vec()).collect()
    }

    fn weyl_order(&self) -> usize {
        self.inner.weyl_g.len()
    }

    fn weyl_k_order(&self) -> usize {
        self.inner.weyl_k.len()
    }

    fn rho_g(&self) -> Vec<i64> {
        self.inner.rho_g.coords().to_vec()
    }

    fn rho_k(&self) -> Vec<i64> {
        self.inner.rho_k.coords().to_vec()
    }

    /// Character of the irreducible representation with the given highest
    /// weight, as {weight tuple: multiplicity}.
    #[pyo3(signature = (lam, group = "G"))]
    fn character<'py>(
        &self,
        py: Python<'py>,
        lam: Vec<i64>,
        group: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let chi = weyl_character(&self.inner, &Weight(lam), side(group)?).map_err(err)?;
        char_to_dict(py, &chi)
    }

    /// Same contract computed by the independent recursion.
    #[pyo3(signature = (lam, group = "G"))]
    fn freudenthal<'py>(
        &self,
        py: Python<'py>,
        lam: Vec<i64>,
        group: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let chi =
            freudenthal_multiplicities(&self.inner, &Weight(lam), side(group)?).map_err(err)?;
        char_to_dict(py, &chi)
    }

    /// Decomposition of the irreducible ambient character into subgroup
    /// characters: {highest weight tuple: multiplicity}.
    fn branch<'py>(&self, py: Python<'py>, nu: Vec<i64>) -> PyResult<Bound<'py, PyDict>> {
        let chi = weyl_character(&self.inner, &Weight(nu), GroupSide::Ambient).map_err(err)?;
        let dec = decompose_into_k(&self.inner, &chi).map_err(err)?;
        map_to_dict(py, &dec)
    }

    /// Branching multiplicity for a regular ambient highest weight, by the
    /// signed partition-count sum.
    fn kostant_branching(&self, nu: Vec<i64>, lam: Vec<i64>) -> PyResult<i64> {
        kostant_branching(&self.inner, &Weight(nu), &Weight(lam)).map_err(err)
    }

    /// The alternating multiplet: list of (sign, weight tuple) pairs. The
    /// defining identity is verified exactly before returning.
    fn gkrs(&self, py: Python<'_>, lam: Vec<i64>) -> PyResult<Py<PyAny>> {
        let m = gkrs_multiplet(&self.inner, &Weight(lam)).map_err(err)?;
        let rows: Vec<(i64, Vec<i64>)> =
            m.multiplet.into_iter().map(|(s, w)| (s, w.coords().to_vec())).collect();
        Ok(rows.into_pyobject(py)?.unbind().into_any())
    }

    /// Number of ways to write zeta as a non-negative integer combination
    /// of the generators.
    fn partition_count(&self, generators: Vec<Vec<i64>>, zeta: Vec<i64>) -> PyResult<i64> {
        let gens: Vec<Weight> = generators.into_iter().map(Weight).collect();
        let pp = partition_problem(&self.inner, &gens).map_err(err)?;
        Ok(partition_count(&pp, &Weight(zeta)))
    }
}

/// A validated fixed-point data set.
#[pyclass(name = "Fixture")]
struct PyFixture {
    inner: fixedpoint::FixedPointSet,
}

#[pymethods]
impl PyFixture {
    /// Parse a fixture file (JSON text).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyFixture { inner: fixedpoint::fixture_from_json(text).map_err(err)? })
    }

    /// Fixed-point data of the coadjoint orbit through a dominant weight.
    #[staticmethod]
    #[pyo3(signature = (pair, lam, sign = 1))]
    fn coadjoint(pair: &PyPair, lam: Vec<i64>, sign: i64) -> PyResult<Self> {
        let fps = fixedpoint::coadjoint_fixed_point_set(&pair.inner, &Weight(lam), sign)
            .map_err(err)?;
        Ok(PyFixture { inner: fps })
    }

    #[getter]
    fn num_points(&self) -> usize {
        self.inner.points.len()
    }

    #[getter]
    fn num_orbits(&self) -> usize {
        self.inner.orbits.len()
    }

    /// Character from the fixed-point localization sum.
    fn localization_character<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let chi = localization_character(&self.inner).map_err(err)?;
        char_to_dict(py, &chi)
    }

    /// Character and decomposition via the orbit formula, cross-checked
    /// against the localization sum; returns the full report as JSON text.
    fn character_report(&self) -> PyResult<String> {
        let rep = main_formula_character(&self.inner).map_err(err)?;
        let order = weylquant::charring::TermOrder::new(
            self.inner.pair.g.weight_functional(&self.inner.pair.rho_g),
        );
        let body = serde_json::json!({
            "character": rep.character.sorted_pairs(&order),
            "denominator_factors":
                rep.denominator_factors.iter().map(|w| w.coords().to_vec()).collect::<Vec<_>>(),
            "k_decomposition": rep.k_decomposition.iter()
                .map(|(w, c)| (w.coords().to_vec(), *c)).collect::<Vec<_>>(),
        });
        Ok(body.to_string())
    }

    /// Decomposition of the quantisation into subgroup characters.
    fn decomposition<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rep = main_formula_character(&self.inner).map_err(err)?;
        map_to_dict(py, &rep.k_decomposition)
    }

    /// Multiplicity of one subgroup highest weight, by the signed sum over
    /// the pair set Z.
    fn multiplicity(&self, lam: Vec<i64>) -> PyResult<i64> {
        multiplicity_theorem(&self.inner, &Weight(lam)).map_err(err)
    }

    /// Nonzero multiplicities over a symmetric window, checked against the
    /// character decomposition.
    fn spectrum<'py>(&self, py: Python<'py>, radius: i64) -> PyResult<Bound<'py, PyDict>> {
        let window = Window::symmetric(self.inner.rank(), radius);
        let map = multiplicity_spectrum(&self.inner, &window).map_err(err)?;
        map_to_dict(py, &map)
    }

    /// Comparison rows against the regular-points-only formula:
    /// list of (lambda tuple, ours, gp, delta).
    fn gp_table(&self, py: Python<'_>, radius: i64) -> PyResult<Py<PyAny>> {
        let window = Window::symmetric(self.inner.rank(), radius);
        let rows = gp_comparison(&self.inner, &window).map_err(err)?;
        let out: Vec<(Vec<i64>, i64, i64, i64)> = rows
            .into_iter()
            .map(|r| (r.lambda.coords().to_vec(), r.multiplicity, r.gp_value, r.delta))
            .collect();
        Ok(out.into_pyobject(py)?.unbind().into_any())
    }

    /// Partition-cone support bound sanity: nonzero multiplicities found in
    /// the window covering the character.
    fn support_window(&self) -> PyResult<(Vec<i64>, Vec<i64>)> {
        let rep = main_formula_character(&self.inner).map_err(err)?;
        let w = multiplicity::Window::covering_character(&rep.character);
        Ok((w.lo, w.hi))
    }
}

#[pymodule]
fn weylquant_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPair>()?;
    m.add_class::<PyFixture>()?;
    Ok(())
}
