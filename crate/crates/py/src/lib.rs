//! Python bindings for the `ilw` laboratory. Fields cross the boundary as
//! lists of floats; complex values as Python `complex`.

use ilw::linear_dispersion::{self as ld, Band, Frame, KernelOptions, XGrid};
use ilw::normal_form::{self as nf, Lattice};
use ilw::solver::{self, Datum, DatumKind, Model, SimConfig};
use ilw::vectorfield::{self as vf, VectorFieldContext};
use ilw::{grid as g, paradiff, symbols, DyadicIndex, ProjectionMode};
use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: ilw::Error) -> PyErr {
    match e {
        ilw::Error::Io(_) => PyOSError::new_err(e.to_string()),
        ilw::Error::Instability { .. } | ilw::Error::UnderResolved(_) | ilw::Error::WrapContamination { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn model(name: &str) -> PyResult<Model> {
    Model::parse(name).map_err(err)
}

fn frame(name: &str) -> PyResult<Frame> {
    match name {
        "transport" => Ok(Frame::Transport),
        "comoving" => Ok(Frame::Comoving),
        _ => Err(PyValueError::new_err(format!("unknown frame `{name}` (transport, comoving)"))),
    }
}

#[pyclass(name = "GridSpec", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(ilw::GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (period, n_points, origin=None))]
    fn new(period: f64, n_points: usize, origin: Option<f64>) -> PyResult<Self> {
        let grid = ilw::GridSpec::new(period, n_points).map_err(err)?;
        Ok(Self(match origin {
            Some(o) => grid.with_origin(o),
            None => grid,
        }))
    }

    #[getter]
    fn period(&self) -> f64 {
        self.0.period()
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn origin(&self) -> f64 {
        self.0.origin()
    }

    fn xs(&self) -> Vec<f64> {
        (0..self.0.len()).map(|j| self.0.x(j)).collect()
    }

    fn wavenumbers(&self) -> Vec<f64> {
        self.0.wavenumbers()
    }

    fn __repr__(&self) -> String {
        format!("GridSpec(period={}, n_points={}, origin={})", self.0.period(), self.0.len(), self.0.origin())
    }
}

#[pyclass(name = "Field", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField(ilw::Field);

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        ilw::Field::new(grid.0, values).map(Self).map_err(err)
    }

    /// Samples a datum: `gaussian`, `sech2`, `odd_gaussian`, `two_bump` or `shell`.
    #[staticmethod]
    #[pyo3(signature = (grid, kind, amplitude, width=1.0, center=0.0, shell_k=-1))]
    fn datum(grid: &PyGrid, kind: &str, amplitude: f64, width: f64, center: f64, shell_k: i32) -> PyResult<Self> {
        let kind = match kind {
            "gaussian" => DatumKind::Gaussian,
            "sech2" => DatumKind::Sech2,
            "odd_gaussian" => DatumKind::OddGaussian,
            "two_bump" => DatumKind::TwoBump,
            "shell" => DatumKind::Shell { k: shell_k },
            other => return Err(PyValueError::new_err(format!("unknown datum `{other}`"))),
        };
        Datum { kind, amplitude, width, center }.sample(&grid.0).map(Self).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        ilw::io::read_field(path.as_ref()).map(Self).map_err(err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let p: &std::path::Path = path.as_ref();
        if p.extension().is_some_and(|e| e == "bin") {
            ilw::io::write_field_binary(&self.0, p).map_err(err)
        } else {
            ilw::io::write_field_csv(&self.0, p).map_err(err)
        }
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    fn sup_norm(&self) -> f64 {
        self.0.sup_norm()
    }

    fn besov_norm(&self) -> f64 {
        g::norm_besov(&self.0)
    }

    #[pyo3(signature = (delta=1.0))]
    fn tilbert_half_norm(&self, delta: f64) -> f64 {
        g::norm_tilbert_half(&self.0, delta)
    }

    #[pyo3(signature = (order, delta=1.0))]
    fn energy(&self, order: usize, delta: f64) -> PyResult<f64> {
        solver::energy(&self.0, order, delta).map_err(err)
    }

    fn derivative(&self, order: u32) -> Self {
        Self(self.0.derivative(order))
    }

    #[pyo3(signature = (k, smooth=true))]
    fn lp_project(&self, k: i32, smooth: bool) -> Self {
        let mode = if smooth { ProjectionMode::Smooth } else { ProjectionMode::ExactShell };
        Self(g::lp_project(&self.0, DyadicIndex::new(k), mode))
    }

    fn dyadic_l2_norms(&self) -> Vec<(i32, f64)> {
        g::dyadic_l2_norms(&self.0, ProjectionMode::Smooth)
    }

    fn sentinel_fraction(&self) -> f64 {
        g::sentinel_fraction(&self.0)
    }

    #[pyo3(signature = (delta=1.0))]
    fn rescale_delta(&self, delta: f64) -> PyResult<Self> {
        solver::rescale_delta(&self.0, delta).map(Self).map_err(err)
    }

    #[pyo3(signature = (t, delta=1.0, frame="transport"))]
    fn propagate(&self, t: f64, delta: f64, frame: &str) -> PyResult<Self> {
        Ok(Self(ld::propagate(&self.0, t, delta, self::frame(frame)?)))
    }

    #[pyo3(signature = (t, delta=1.0, frame="transport"))]
    fn vectorfield_l(&self, t: f64, delta: f64, frame: &str) -> PyResult<Self> {
        ld::vectorfield_l(&self.0, t, delta, self::frame(frame)?).map(Self).map_err(err)
    }

    #[pyo3(signature = (t, model="ilw_transport", delta=1.0))]
    fn build_v(&self, t: f64, model: &str, delta: f64) -> PyResult<Self> {
        vf::build_v(&self.0, t, self::model(model)?, delta).map(Self).map_err(err)
    }

    #[pyo3(signature = (dt, model="ilw", delta=1.0))]
    fn step(&self, dt: f64, model: &str, delta: f64) -> PyResult<Self> {
        solver::step_etdrk4(&self.0, dt, self::model(model)?, delta).map(Self).map_err(err)
    }

    /// Samples of `ψ_k⁺` as complex numbers.
    fn gauge_psi(&self, k: i32) -> PyResult<Vec<Complex64>> {
        paradiff::gauge_psi_k(&self.0, DyadicIndex::plus(k)).map(|f| f.values().to_vec()).map_err(err)
    }

    /// `(bk_constant, commutator_gain, gauge_defect, psi_norm)` at shell `k`.
    fn shell_diagnostics(&self, k: i32) -> PyResult<(f64, f64, f64, f64)> {
        let d = paradiff::shell_diagnostics(&self.0, k).map_err(err)?;
        Ok((d.bk_constant, d.commutator_gain, d.gauge_defect, d.psi_norm))
    }
}

#[pyclass(name = "NormalForm", frozen)]
struct PyNormalForm(nf::NormalForm);

#[pymethods]
impl PyNormalForm {
    #[staticmethod]
    #[pyo3(signature = (delta=1.0))]
    fn ilw(delta: f64) -> Self {
        Self(nf::NormalForm::ilw(delta))
    }

    #[staticmethod]
    fn benjamin_ono() -> Self {
        Self(nf::NormalForm::benjamin_ono())
    }

    fn b(&self, xi: f64, eta: f64) -> f64 {
        self.0.b(xi, eta)
    }

    fn c(&self, xi: f64, eta: f64) -> Complex64 {
        self.0.c(xi, eta)
    }

    fn d(&self, xi: f64, eta: f64) -> f64 {
        self.0.d(xi, eta)
    }

    fn ctilde_a(&self, xi: f64, eta: f64) -> f64 {
        self.0.ctilde_a(xi, eta)
    }

    fn omega(&self, xi: f64, eta: f64) -> f64 {
        self.0.omega(xi, eta)
    }

    fn r(&self, xi: f64, eta: f64, zeta: f64) -> Complex64 {
        self.0.r(xi, eta, zeta)
    }

    /// Identity checks on an `n × n` lattice: name → (passed, max off-band, max in-band).
    #[pyo3(signature = (n=400, max=25.0))]
    fn verify_identities(&self, n: usize, max: f64) -> PyResult<Vec<(String, bool, f64, f64)>> {
        let rep = nf::verify_quadratic_identity(&self.0, &Lattice::new(n, max).map_err(err)?);
        Ok(rep.checks.iter().map(|c| (c.name.to_string(), c.passed(), c.max_off_band, c.max_in_band)).collect())
    }

    #[pyo3(signature = (n=201, max=30.0, cube_n=31, cube_max=15.0))]
    fn decay_ladder(&self, n: usize, max: f64, cube_n: usize, cube_max: f64) -> PyResult<Vec<(String, f64)>> {
        let lat = Lattice::new(n, max).map_err(err)?;
        let cube = Lattice::new(cube_n, cube_max).map_err(err)?;
        Ok(nf::decay_ladder(&self.0, &lat, &cube).as_array().iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

#[pyclass(name = "Trace", frozen)]
struct PyTrace(solver::SimTrace);

#[pymethods]
impl PyTrace {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn field(&self, i: usize) -> PyResult<PyField> {
        self.0.fields.get(i).cloned().map(PyField).ok_or_else(|| PyValueError::new_err("snapshot index out of range"))
    }

    /// Largest relative drift of `E_order`; needs a trace run with diagnostics.
    fn energy_drift(&self, order: usize) -> PyResult<f64> {
        if self.0.diagnostics.is_empty() {
            return Err(PyValueError::new_err("trace was run without diagnostics"));
        }
        Ok(self.0.energy_drift(order))
    }

    /// `(t, residual, ‖v‖)` rows of the v-equation residual.
    #[pyo3(signature = (stride=1))]
    fn v_residual(&self, stride: usize) -> PyResult<Vec<(f64, f64, f64)>> {
        let ctx = VectorFieldContext::for_trace(&self.0, None).map_err(err)?;
        let rows = vf::v_equation_residual(&self.0, &ctx, stride).map_err(err)?;
        Ok(rows.iter().map(|r| (r.t, r.residual, r.v_norm)).collect())
    }

    /// Decay report rows keyed by column name.
    #[pyo3(signature = (kappa=ld::DEFAULT_KAPPA))]
    fn decay(&self, kappa: f64) -> PyResult<Vec<Vec<(&'static str, f64)>>> {
        let ctx = VectorFieldContext::for_trace(&self.0, None).map_err(err)?;
        let rep = vf::track_decay(&self.0, &ctx, kappa).map_err(err)?;
        let cols = vf::DecayReport::columns();
        Ok(rep.as_rows().into_iter().map(|r| cols.iter().copied().zip(r).collect()).collect())
    }
}

#[pyfunction]
#[pyo3(signature = (datum, dt, t_end, model="ilw_transport", delta=1.0, cadence=1, diagnostics=false))]
fn simulate(
    datum: &PyField,
    dt: f64,
    t_end: f64,
    model: &str,
    delta: f64,
    cadence: usize,
    diagnostics: bool,
) -> PyResult<PyTrace> {
    let cfg = SimConfig {
        grid: *datum.0.grid(),
        delta,
        model: self::model(model)?,
        dt,
        t_end,
        datum: Datum::gaussian(1.0, 1.0),
        dealias: true,
        cadence,
    };
    cfg.validate().map_err(err)?;
    solver::evolve_from(&cfg, datum.0.clone(), diagnostics).map(PyTrace).map_err(err)
}

/// Samples `(xs, K)` of the linear kernel on `n` points from `x0`; `band`
/// is `None` for the full kernel, an integer for a shell, or `"high"`.
#[pyfunction]
#[pyo3(signature = (t, x0, dx, n, shell=None, high=false, delta=1.0))]
fn kernel(t: f64, x0: f64, dx: f64, n: usize, shell: Option<i32>, high: bool, delta: f64) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    let band = match (shell, high) {
        (Some(j), false) => Band::Shell(j),
        (None, true) => Band::High,
        (None, false) => Band::Full,
        _ => return Err(PyValueError::new_err("pass either shell or high, not both")),
    };
    let xs = XGrid { x0, dx, n };
    let opts = KernelOptions { delta, ..KernelOptions::default() };
    let s = ld::kernel(t, band, &xs, &opts).map_err(err)?;
    Ok((xs.xs(), s.k))
}

#[pyfunction]
#[pyo3(signature = (t, x, which=0, kappa=ld::DEFAULT_KAPPA))]
fn weight_omega(t: f64, x: f64, which: u8, kappa: f64) -> PyResult<f64> {
    let w = match which {
        0 => ld::Weight::Omega0,
        1 => ld::Weight::Omega1,
        _ => return Err(PyValueError::new_err("which must be 0 or 1")),
    };
    ld::weight_omega(t, x, w, kappa).map_err(err)
}

/// `(t, r0, r1)` rows of the linear decay ratios.
#[pyfunction]
#[pyo3(signature = (datum, times, delta=1.0, kappa=ld::DEFAULT_KAPPA))]
fn ks_ratio(datum: &PyField, times: Vec<f64>, delta: f64, kappa: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let rep = ld::ks_ratio(&datum.0, &times, delta, Frame::Transport, kappa).map_err(err)?;
    Ok(rep.rows.iter().map(|r| (r.t, r.r0, r.r1)).collect())
}

#[pyfunction]
#[pyo3(signature = (xi, delta=1.0))]
fn dispersion_a(xi: f64, delta: f64) -> f64 {
    symbols::dispersion_a(xi, delta)
}

#[pyfunction]
#[pyo3(signature = (xi, delta=1.0))]
fn dispersion_big_a(xi: f64, delta: f64) -> f64 {
    symbols::dispersion_big_a(xi, delta)
}

#[pyfunction]
#[pyo3(signature = (xi, delta=1.0))]
fn group_velocity(xi: f64, delta: f64) -> f64 {
    symbols::group_velocity(xi, delta)
}

#[pyfunction]
#[pyo3(signature = (xi, eta, delta=1.0))]
fn resonance_omega(xi: f64, eta: f64, delta: f64) -> f64 {
    symbols::resonance_omega(xi, eta, delta)
}

#[pymodule]
fn ilw_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyNormalForm>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(weight_omega, m)?)?;
    m.add_function(wrap_pyfunction!(ks_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_a, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_big_a, m)?)?;
    m.add_function(wrap_pyfunction!(group_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(resonance_omega, m)?)?;
    Ok(())
}
