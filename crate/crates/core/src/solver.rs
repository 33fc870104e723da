//! Pseudo-spectral time integration of `φ_t = i p(D) φ + ½(φ²)_x`.
//!
//! The phase `p` is `a(ξ) = ξ²coth(δξ)` for ILW, `A(ξ) = a(ξ) - ξ/δ` for ILW
//! with the transport term removed, `ξ|ξ|` for Benjamin-Ono and `δξ³/3` for
//! KdV. The linear part is advanced exactly; the nonlinearity by the fourth
//! order exponential Runge-Kutta scheme of Krogstad (ETDRK4), with the
//! φ-functions evaluated by contour averages.

use crate::error::{Error, Result};
use crate::grid::{
    dealiased_spectral_product, fft_forward, fft_inverse, lp_project, norm_besov, norm_tilbert_half,
    DyadicIndex, Field, GridSpec, ProjectionMode,
};
use crate::symbols;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::PathBuf;

type C64 = Complex64;

/// Largest admitted `dt·max|p(ξ)|` on the lattice.
pub const MAX_PHASE_PER_STEP: f64 = 100.0;

const CONTOUR_POINTS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Ilw,
    IlwTransport,
    BenjaminOno,
    Kdv,
}

impl Model {
    pub fn phase(&self, xi: f64, delta: f64) -> f64 {
        match self {
            Model::Ilw => symbols::dispersion_a(xi, delta),
            Model::IlwTransport => symbols::dispersion_big_a(xi, delta),
            Model::BenjaminOno => xi * xi.abs(),
            Model::Kdv => delta * xi * xi * xi / 3.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Ilw => "ilw",
            Model::IlwTransport => "ilw_transport",
            Model::BenjaminOno => "bo",
            Model::Kdv => "kdv",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ilw" => Ok(Model::Ilw),
            "ilw_transport" => Ok(Model::IlwTransport),
            "bo" => Ok(Model::BenjaminOno),
            "kdv" => Ok(Model::Kdv),
            _ => Err(Error::InvalidParameter(format!(
                "unknown model `{s}` (expected ilw, ilw_transport, bo, kdv)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatumKind {
    /// `ε e^{-(x-c)²/w²}` minus its mean.
    Gaussian,
    /// `ε sech²((x-c)/w)` minus its mean.
    Sech2,
    /// `ε √(2e) ((x-c)/w) e^{-(x-c)²/w²}`: localized, mean zero, peak `ε`.
    OddGaussian,
    /// `ε (e^{-4(x-c+w)²/w²} - e^{-4(x-c-w)²/w²})`: opposite bumps of width
    /// `w/2` at `c ∓ w`.
    TwoBump,
    /// `P_k` of a gaussian of width `2^{-k}·8`, normalized to peak `ε`.
    Shell { k: i32 },
    /// Samples read from a field file (CSV or binary), scaled by `ε`.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Datum {
    pub kind: DatumKind,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
}

impl Datum {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        Self { kind: DatumKind::Gaussian, amplitude, width, center: 0.0 }
    }

    pub fn odd_gaussian(amplitude: f64, width: f64) -> Self {
        Self { kind: DatumKind::OddGaussian, amplitude, width, center: 0.0 }
    }

    pub fn at(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<Field> {
        let (eps, w, c) = (self.amplitude, self.width, self.center);
        if !(w > 0.0) && !matches!(self.kind, DatumKind::File(_)) {
            return Err(Error::InvalidParameter(format!("datum width must be positive, got {w}")));
        }
        let f = match &self.kind {
            DatumKind::Gaussian => Field::from_fn(*grid, |x| eps * (-((x - c) / w).powi(2)).exp()).without_mean(),
            DatumKind::Sech2 => Field::from_fn(*grid, |x| eps / ((x - c) / w).cosh().powi(2)).without_mean(),
            DatumKind::OddGaussian => {
                let norm = (2.0 * std::f64::consts::E).sqrt();
                Field::from_fn(*grid, |x| {
                    let s = (x - c) / w;
                    eps * norm * s * (-s * s).exp()
                })
            }
            DatumKind::TwoBump => {
                let h = 0.5 * w;
                Field::from_fn(*grid, |x| {
                    eps * ((-((x - c + w) / h).powi(2)).exp() - (-((x - c - w) / h).powi(2)).exp())
                })
            }
            DatumKind::Shell { k } => {
                let wk = 8.0 * 2f64.powi(-k);
                let g = Field::from_fn(*grid, |x| (-((x - c) / wk).powi(2)).exp());
                let p = lp_project(&g, DyadicIndex::new(*k), ProjectionMode::Smooth);
                let peak = p.sup_norm();
                if peak == 0.0 {
                    return Err(Error::InvalidParameter(format!("shell {k} is not resolved on this grid")));
                }
                p.scale(eps / peak)
            }
            DatumKind::File(path) => {
                let f = crate::io::read_field(path)?;
                if f.grid().len() != grid.len() || (f.grid().period() - grid.period()).abs() > 1e-12 * grid.period() {
                    return Err(Error::GridMismatch(format!(
                        "datum file {} has a different grid",
                        path.display()
                    )));
                }
                Field::new(*grid, f.into_values())?.scale(eps)
            }
        };
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub delta: f64,
    pub model: Model,
    pub dt: f64,
    pub t_end: f64,
    pub datum: Datum,
    pub dealias: bool,
    /// Steps between stored snapshots.
    pub cadence: usize,
}

impl SimConfig {
    pub fn n_steps(&self) -> Result<usize> {
        let r = self.t_end / self.dt;
        let n = r.round();
        if (r - n).abs() > 1e-9 * r.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        if self.cadence == 0 {
            return Err(Error::InvalidParameter("cadence must be at least 1".into()));
        }
        self.n_steps()?;
        stiffness_guard(&self.grid, self.model, self.delta, self.dt)
    }
}

fn stiffness_guard(grid: &GridSpec, model: Model, delta: f64, dt: f64) -> Result<()> {
    let pmax = (0..grid.len()).map(|i| model.phase(grid.wavenumber(i), delta).abs()).fold(0.0, f64::max);
    if dt.abs() * pmax > MAX_PHASE_PER_STEP {
        return Err(Error::InvalidParameter(format!(
            "dt·max|p(ξ)| = {:.3e} exceeds {MAX_PHASE_PER_STEP}",
            dt.abs() * pmax
        )));
    }
    Ok(())
}

/// `φ₁, φ₂, φ₃` at `z` by averaging the closed forms over a circle of radius 1
/// around `z`.
pub fn phi_functions(z: C64) -> [C64; 3] {
    let mut acc = [C64::new(0.0, 0.0); 3];
    for j in 0..CONTOUR_POINTS {
        let theta = PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        // Upper half circle and its mirror; their average is real for real z.
        for r in [C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta)] {
            let w = z + r;
            let e = w.exp();
            acc[0] += (e - 1.0) / w;
            acc[1] += (e - 1.0 - w) / (w * w);
            acc[2] += (e - 1.0 - w - 0.5 * w * w) / (w * w * w);
        }
    }
    let m = 2.0 * CONTOUR_POINTS as f64;
    acc.map(|v| v / m)
}

/// Precomputed ETDRK4 coefficients for one grid, model and step.
#[derive(Clone, Debug)]
pub struct Integrator {
    grid: GridSpec,
    dt: f64,
    dealias: bool,
    deriv: Vec<C64>,
    e: Vec<C64>,
    e_half: Vec<C64>,
    half_phi1: Vec<C64>,
    half_phi2: Vec<C64>,
    phi1: Vec<C64>,
    phi2: Vec<C64>,
    f_u: Vec<C64>,
    f_ab: Vec<C64>,
    f_c: Vec<C64>,
}

impl Integrator {
    /// `dt` may be negative to run the flow backwards.
    pub fn new(grid: GridSpec, model: Model, delta: f64, dt: f64, dealias: bool) -> Result<Self> {
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be nonzero, got {dt}")));
        }
        stiffness_guard(&grid, model, delta, dt)?;
        let n = grid.len();
        let mut it = Integrator {
            grid,
            dt,
            dealias,
            deriv: Vec::with_capacity(n),
            e: Vec::with_capacity(n),
            e_half: Vec::with_capacity(n),
            half_phi1: Vec::with_capacity(n),
            half_phi2: Vec::with_capacity(n),
            phi1: Vec::with_capacity(n),
            phi2: Vec::with_capacity(n),
            f_u: Vec::with_capacity(n),
            f_ab: Vec::with_capacity(n),
            f_c: Vec::with_capacity(n),
        };
        for i in 0..n {
            let xi = grid.wavenumber(i);
            // The Nyquist mode is dropped by the dealiased product; keep it inert.
            let nyq = i == n / 2;
            it.deriv.push(if nyq { C64::new(0.0, 0.0) } else { C64::new(0.0, 0.5 * xi) });
            let z = C64::new(0.0, dt * model.phase(xi, delta));
            let [p1h, p2h, _] = phi_functions(0.5 * z);
            let [p1, p2, p3] = phi_functions(z);
            it.e.push(z.exp());
            it.e_half.push((0.5 * z).exp());
            it.half_phi1.push(0.5 * dt * p1h);
            it.half_phi2.push(dt * p2h);
            it.phi1.push(dt * p1);
            it.phi2.push(2.0 * dt * p2);
            it.f_u.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
            it.f_ab.push(dt * (2.0 * p2 - 4.0 * p3));
            it.f_c.push(dt * (4.0 * p3 - p2));
        }
        Ok(it)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Spectrum of `½(φ²)_x`.
    fn nonlinear(&self, spec: &[C64]) -> Vec<C64> {
        let mut sq = if self.dealias {
            dealiased_spectral_product(spec, spec)
        } else {
            let mut phys = spec.to_vec();
            fft_inverse(&mut phys);
            for v in phys.iter_mut() {
                *v = C64::new(v.re * v.re, 0.0);
            }
            fft_forward(&mut phys);
            phys
        };
        for (s, d) in sq.iter_mut().zip(&self.deriv) {
            *s *= d;
        }
        sq
    }

    /// One step on a spectrum.
    pub fn step_spectrum(&self, u: &[C64]) -> Vec<C64> {
        let n = u.len();
        let nu = self.nonlinear(u);
        let a: Vec<C64> = (0..n).map(|i| self.e_half[i] * u[i] + self.half_phi1[i] * nu[i]).collect();
        let na = self.nonlinear(&a);
        let b: Vec<C64> = (0..n).map(|i| a[i] + self.half_phi2[i] * (na[i] - nu[i])).collect();
        let nb = self.nonlinear(&b);
        let c: Vec<C64> =
            (0..n).map(|i| self.e[i] * u[i] + self.phi1[i] * nu[i] + self.phi2[i] * (nb[i] - nu[i])).collect();
        let nc = self.nonlinear(&c);
        (0..n)
            .map(|i| self.e[i] * u[i] + self.f_u[i] * nu[i] + self.f_ab[i] * (na[i] + nb[i]) + self.f_c[i] * nc[i])
            .collect()
    }

    pub fn step(&self, f: &Field) -> Result<Field> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("field grid differs from integrator grid".into()));
        }
        Ok(Field::from_spectrum(self.grid, &self.step_spectrum(&f.spectrum())))
    }
}

/// Single ETDRK4 step of size `dt` for `model`.
pub fn step_etdrk4(state: &Field, dt: f64, model: Model, delta: f64) -> Result<Field> {
    Integrator::new(*state.grid(), model, delta, dt, true)?.step(state)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub linf: f64,
    pub besov: f64,
    pub tilbert_half: f64,
    /// `(k, ‖P_k φ‖∞)` over the represented shells.
    pub dyadic_sups: Vec<(i32, f64)>,
}

impl Diagnostics {
    pub fn compute(f: &Field, t: f64, delta: f64) -> Result<Self> {
        let g = f.grid();
        Ok(Self {
            t,
            e0: energy(f, 0, delta)?,
            e1: energy(f, 1, delta)?,
            e2: energy(f, 2, delta)?,
            linf: f.sup_norm(),
            besov: norm_besov(f),
            tilbert_half: norm_tilbert_half(f, delta),
            dyadic_sups: (g.k_min()..=g.k_max())
                .map(|k| (k, lp_project(f, DyadicIndex::new(k), ProjectionMode::Smooth).sup_norm()))
                .collect(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SimTrace {
    pub config: SimConfig,
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    pub diagnostics: Vec<Diagnostics>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&Field> {
        self.fields.last()
    }

    /// Largest relative deviation of `E_order` from its initial value.
    pub fn energy_drift(&self, order: usize) -> f64 {
        let pick = |d: &Diagnostics| match order {
            0 => d.e0,
            1 => d.e1,
            _ => d.e2,
        };
        let e0 = pick(&self.diagnostics[0]);
        self.diagnostics.iter().map(|d| ((pick(d) - e0) / e0).abs()).fold(0.0, f64::max)
    }
}

/// Runs the configured flow, storing a snapshot (with diagnostics) every
/// `cadence` steps and at the final time.
pub fn evolve(config: &SimConfig) -> Result<SimTrace> {
    evolve_with(config, true)
}

/// As [`evolve`]; `diagnostics = false` skips the per-snapshot diagnostics.
pub fn evolve_with(config: &SimConfig, diagnostics: bool) -> Result<SimTrace> {
    config.validate()?;
    let phi0 = config.datum.sample(&config.grid)?;
    phi0.check_mean_zero()?;
    evolve_from(config, phi0, diagnostics)
}

/// As [`evolve_with`] with an explicit initial field.
pub fn evolve_from(config: &SimConfig, phi0: Field, diagnostics: bool) -> Result<SimTrace> {
    config.validate()?;
    let steps = config.n_steps()?;
    let it = Integrator::new(config.grid, config.model, config.delta, config.dt, config.dealias)?;
    let mut trace = SimTrace { config: config.clone(), times: vec![], fields: vec![], diagnostics: vec![] };
    let record = |f: &Field, t: f64, trace: &mut SimTrace| -> Result<()> {
        if diagnostics {
            trace.diagnostics.push(Diagnostics::compute(f, t, config.delta)?);
        }
        trace.times.push(t);
        trace.fields.push(f.clone());
        Ok(())
    };
    let mut spec = phi0.spectrum();
    let mut sup = phi0.sup_norm();
    record(&phi0, 0.0, &mut trace)?;
    for s in 1..=steps {
        spec = it.step_spectrum(&spec);
        let t = s as f64 * config.dt;
        let f = Field::from_spectrum(config.grid, &spec);
        let new_sup = f.values().iter().fold(0.0f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { f64::INFINITY });
        if !new_sup.is_finite() || (sup > 0.0 && new_sup > 10.0 * sup) {
            return Err(Error::Instability {
                t,
                reason: format!("sup norm jumped from {sup:.3e} to {new_sup:.3e}"),
            });
        }
        sup = new_sup;
        if s % config.cadence == 0 || s == steps {
            record(&f, t, &mut trace)?;
        }
    }
    Ok(trace)
}

/// `T⁻¹∂x φ`, symbol `-ξ coth(δξ)`, mean sent to 0.
pub fn tilbert_inverse_dx(f: &Field, delta: f64) -> Field {
    f.apply_multiplier(|xi| C64::new(-xi * symbols::coth(delta * xi), 0.0), C64::new(0.0, 0.0))
        .expect("finite symbol")
}

/// Conserved quantities of ILW, by spectral quadrature:
/// `E0 = ∫½φ²`, `E1 = ∫φT⁻¹φ_x - ⅓φ³`,
/// `E2 = ∫½φ_x² - (3/2)φ²T⁻¹φ_x + ¼φ⁴ + (3/2)(T⁻¹φ_x)²`.
pub fn energy(f: &Field, order: usize, delta: f64) -> Result<f64> {
    let dx = f.grid().dx();
    let v = f.values();
    match order {
        0 => Ok(0.5 * f.l2_norm_sq()),
        1 | 2 => {
            f.check_mean_zero()?;
            let k = tilbert_inverse_dx(f, delta);
            let k = k.values();
            if order == 1 {
                Ok(v.iter().zip(k).map(|(p, q)| p * q - p * p * p / 3.0).sum::<f64>() * dx)
            } else {
                let fx = f.derivative(1);
                Ok(v.iter()
                    .zip(k)
                    .zip(fx.values())
                    .map(|((p, q), d)| 0.5 * d * d - 1.5 * p * p * q + 0.25 * p.powi(4) + 1.5 * q * q)
                    .sum::<f64>()
                    * dx)
            }
        }
        _ => Err(Error::InvalidParameter(format!("energy order must be 0, 1 or 2, got {order}"))),
    }
}

/// `δ·f(δx)` on the grid of period `L/δ`: maps a solution of the depth-`δ`
/// equation at time `t` to a solution of the depth-1 equation at time `δ²t`.
pub fn rescale_delta(f: &Field, delta: f64) -> Result<Field> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let g = f.grid();
    let grid = GridSpec::new(g.period() / delta, g.len())?.with_origin(g.origin() / delta);
    Field::new(grid, f.values().iter().map(|v| delta * v).collect())
}
