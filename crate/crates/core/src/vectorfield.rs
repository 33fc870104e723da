//! The corrected vector field `v = Lu + tB(u,u)`, the residual of its
//! evolution equation `Pv = C(u,v) + tR(u,u,u) + D(u,u)` along a solver trace,
//! and the decay quantities tracked over the cubic time scale.

use crate::error::{Error, Result};
use crate::grid::{
    dyadic_l2_norms, lp_project, norm_besov, norm_tilbert_half, sentinel_fraction, DyadicIndex, Field, GridSpec,
    ProjectionMode, TabulatedBilinear,
};
use crate::linear_dispersion::{self, Frame, Weight, WRAP_TOLERANCE};
use crate::normal_form::{Fault, NormalForm};
use crate::solver::{Model, SimTrace};
use crate::symbols;
use num_complex::Complex64;

type C64 = Complex64;

/// Largest interaction phase change per snapshot interval admitted by the
/// time-difference stencil.
pub const MAX_PHASE_PER_SNAPSHOT: f64 = 0.5;

/// Symbols of `B`, `C`, `D` tabulated on one grid, with the dispersion of the
/// flow they belong to.
pub struct VectorFieldContext {
    model: Model,
    delta: f64,
    nf: NormalForm,
    b: TabulatedBilinear,
    c: TabulatedBilinear,
    d: TabulatedBilinear,
}

impl VectorFieldContext {
    /// `model` must be one of the ILW flows or Benjamin-Ono.
    pub fn new(grid: GridSpec, model: Model, delta: f64, fault: Option<Fault>) -> Result<Self> {
        let mut nf = match model {
            Model::Ilw | Model::IlwTransport => NormalForm::ilw(delta),
            Model::BenjaminOno => NormalForm::benjamin_ono(),
            Model::Kdv => {
                return Err(Error::InvalidParameter("no normal form is defined for the KdV model".into()))
            }
        };
        if let Some(f) = fault {
            nf = nf.with_fault(f);
        }
        let m = grid.len() / 2;
        let b = TabulatedBilinear::new(grid, m, |x, y| C64::new(nf.b(x, y), 0.0))?;
        let c = TabulatedBilinear::new(grid, m, |x, y| nf.c(x, y))?;
        let d = TabulatedBilinear::new(grid, m, |x, y| C64::new(nf.d(x, y), 0.0))?;
        Ok(Self { model, delta, nf, b, c, d })
    }

    pub fn for_trace(trace: &SimTrace, fault: Option<Fault>) -> Result<Self> {
        let cfg = &trace.config;
        Self::new(cfg.grid, cfg.model, cfg.delta, fault)
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Frame in which the decay weights are centred.
    pub fn frame(&self) -> Frame {
        match self.model {
            Model::Ilw => Frame::Comoving,
            _ => Frame::Transport,
        }
    }

    fn group_velocity(&self, xi: f64) -> f64 {
        match self.model {
            Model::Ilw => symbols::group_velocity(xi, self.delta),
            Model::BenjaminOno => 2.0 * xi.abs(),
            _ => symbols::group_velocity_big_a(xi, self.delta),
        }
    }

    /// `Lu = xu + t·A'(D)u` for the flow's own dispersion.
    pub fn l(&self, u: &Field, t: f64) -> Result<Field> {
        let mass = sentinel_fraction(u);
        if mass > WRAP_TOLERANCE {
            return Err(Error::WrapContamination { mass });
        }
        let at_zero = C64::new(self.group_velocity(0.0), 0.0);
        let drift = u.apply_multiplier(|xi| C64::new(self.group_velocity(xi), 0.0), at_zero)?;
        u.x_times().axpy(t, &drift)
    }

    pub fn b_form(&self, u: &Field, v: &Field) -> Result<Field> {
        self.b.apply(u, v)
    }

    pub fn c_form(&self, u: &Field, v: &Field) -> Result<Field> {
        self.c.apply(u, v)
    }

    pub fn d_form(&self, u: &Field, v: &Field) -> Result<Field> {
        self.d.apply(u, v)
    }

    /// `R(u,u,u) = 2B(u, u u_x) - C(u, B(u,u))`.
    pub fn r_form(&self, u: &Field) -> Result<Field> {
        let uux = u.dealiased_product(&u.derivative(1))?;
        let buu = self.b_form(u, u)?;
        self.b_form(u, &uux)?.scale(2.0).sub(&self.c_form(u, &buu)?)
    }

    pub fn build_v(&self, u: &Field, t: f64) -> Result<Field> {
        u.check_mean_zero()?;
        let lu = self.l(u, t)?;
        if t == 0.0 {
            return Ok(lu);
        }
        lu.axpy(t, &self.b_form(u, u)?)
    }

    /// Right side `C(u,v) + tR(u,u,u) + D(u,u)` of the `v` equation.
    pub fn v_rhs(&self, u: &Field, v: &Field, t: f64) -> Result<Field> {
        self.c_form(u, v)?.axpy(t, &self.r_form(u)?)?.add(&self.d_form(u, u)?)
    }

    fn phase(&self, xi: f64) -> f64 {
        self.model.phase(xi, self.delta)
    }
}

/// `v = Lu + tB(u,u)` for a single evaluation.
pub fn build_v(u: &Field, t: f64, model: Model, delta: f64) -> Result<Field> {
    VectorFieldContext::new(*u.grid(), model, delta, None)?.build_v(u, t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualRow {
    pub t: f64,
    /// `‖Pv - C(u,v) - tR(u,u,u) - D(u,u)‖`.
    pub residual: f64,
    pub v_norm: f64,
    /// `‖Pv‖`, the size of what the right side has to match.
    pub pv_norm: f64,
}

impl ResidualRow {
    pub fn relative(&self) -> f64 {
        self.residual / self.v_norm
    }
}

fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 5 {
        return Err(Error::InvalidParameter("the difference stencil needs at least five snapshots".into()));
    }
    let tau = times[1] - times[0];
    for w in times.windows(2) {
        if ((w[1] - w[0]) - tau).abs() > 1e-9 * tau.abs() {
            return Err(Error::InvalidParameter("snapshots are not uniformly spaced".into()));
        }
    }
    Ok(tau)
}

/// Largest `|A(ξ)|` over the modes of `u` carrying more than `1e-6` of its
/// peak amplitude; bounds the interaction frequencies of the quadratic terms.
fn active_phase(ctx: &VectorFieldContext, u: &Field) -> f64 {
    let g = *u.grid();
    let spec = u.spectrum();
    let peak = spec.iter().fold(0.0, |m: f64, c| m.max(c.norm()));
    spec.iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-6 * peak)
        .map(|(i, _)| ctx.phase(g.wavenumber(i)).abs())
        .fold(0.0, f64::max)
}

/// Residual of the `v` equation at every `stride`-th interior snapshot.
///
/// `Pv` is obtained from the interaction-picture field `w = e^{-itA}v`, which
/// varies on the slow scale of the nonlinearity: `Pv = e^{itA}∂ₜw` with a
/// fourth-order central difference for `∂ₜw`.
pub fn v_equation_residual(trace: &SimTrace, ctx: &VectorFieldContext, stride: usize) -> Result<Vec<ResidualRow>> {
    let tau = uniform_spacing(&trace.times)?;
    let omega = 3.0 * trace.fields.iter().map(|u| active_phase(ctx, u)).fold(0.0, f64::max);
    if tau.abs() * omega > MAX_PHASE_PER_SNAPSHOT {
        return Err(Error::UnderResolved(format!(
            "snapshot spacing {tau} leaves {:.3} rad of interaction phase per interval (limit {MAX_PHASE_PER_SNAPSHOT})",
            tau.abs() * omega
        )));
    }
    let g = trace.config.grid;
    let wavenumbers = g.wavenumbers();
    // Interaction-picture spectra, computed lazily per snapshot.
    let w_spec = |j: usize| -> Result<Vec<C64>> {
        let t = trace.times[j];
        let v = ctx.build_v(&trace.fields[j], t)?;
        let mut s = v.spectrum();
        for (c, &xi) in s.iter_mut().zip(&wavenumbers) {
            *c *= C64::from_polar(1.0, -t * ctx.phase(xi));
        }
        Ok(s)
    };
    let stride = stride.max(1);
    let mut rows = Vec::new();
    let mut cache: Vec<Option<Vec<C64>>> = vec![None; trace.len()];
    let mut j = 2;
    while j + 2 < trace.len() {
        for i in j - 2..=j + 2 {
            if cache[i].is_none() {
                cache[i] = Some(w_spec(i)?);
            }
        }
        let ws: Vec<&Vec<C64>> = (j - 2..=j + 2).map(|i| cache[i].as_ref().expect("filled")).collect();
        let t = trace.times[j];
        let mut pv = vec![C64::new(0.0, 0.0); g.len()];
        for (i, p) in pv.iter_mut().enumerate() {
            let d = (ws[0][i] - 8.0 * ws[1][i] + 8.0 * ws[3][i] - ws[4][i]) / (12.0 * tau);
            *p = d * C64::from_polar(1.0, t * ctx.phase(wavenumbers[i]));
        }
        let pv = Field::from_spectrum(g, &pv);
        let u = &trace.fields[j];
        let v = Field::from_spectrum(g, &{
            let mut s = ws[2].clone();
            for (c, &xi) in s.iter_mut().zip(&wavenumbers) {
                *c *= C64::from_polar(1.0, t * ctx.phase(xi));
            }
            s
        });
        let rhs = ctx.v_rhs(u, &v, t)?;
        rows.push(ResidualRow {
            t,
            residual: pv.sub(&rhs)?.l2_norm(),
            v_norm: v.l2_norm(),
            pv_norm: pv.l2_norm(),
        });
        j += stride;
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRow {
    pub t: f64,
    /// `‖|T|^{1/2} v‖`.
    pub tilbert_half_v: f64,
    pub besov_u: f64,
    /// `sup_x |u|/ω₀`.
    pub sup_u_omega0: f64,
    /// `sup_x |Tu|/ω₁`.
    pub sup_tu_omega1: f64,
    /// `max_{k<0} 2^{k/2} t^{1/2} ‖P_k u‖_∞`.
    pub dyadic_sup: f64,
    /// `max_{k<0} |d/dt ‖P_k u‖²| / (ε³ 2^{3k/2} t^{-1/2} max(|k|,1))`, by
    /// central differences; zero at the ends of the trace.
    pub besov_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub epsilon: f64,
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    pub fn columns() -> [&'static str; 7] {
        ["t", "tilbert_half_v", "besov_u", "sup_u_omega0", "sup_tu_omega1", "dyadic_sup", "besov_rate"]
    }

    pub fn as_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                vec![r.t, r.tilbert_half_v, r.besov_u, r.sup_u_omega0, r.sup_tu_omega1, r.dyadic_sup, r.besov_rate]
            })
            .collect()
    }

    pub fn max_of(&self, f: impl Fn(&DecayRow) -> f64) -> f64 {
        self.rows.iter().map(f).fold(0.0, f64::max)
    }

    /// The row whose time is closest to `t`.
    pub fn at(&self, t: f64) -> Option<&DecayRow> {
        self.rows.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

/// Decay quantities at every snapshot with `t > 0`. `ε` is the datum
/// amplitude of the trace.
pub fn track_decay(trace: &SimTrace, ctx: &VectorFieldContext, kappa: f64) -> Result<DecayReport> {
    let delta = trace.config.delta;
    let eps = trace.config.datum.amplitude;
    let frame = ctx.frame();
    let low_shells = |u: &Field| -> Vec<(i32, f64)> {
        dyadic_l2_norms(u, ProjectionMode::Smooth).into_iter().filter(|&(k, _)| k < 0).collect()
    };
    let shells: Vec<Vec<(i32, f64)>> = trace.fields.iter().map(low_shells).collect();
    let mut rows = Vec::new();
    for (j, (u, &t)) in trace.fields.iter().zip(&trace.times).enumerate() {
        if t <= 0.0 {
            continue;
        }
        let g = *u.grid();
        let v = ctx.build_v(u, t)?;
        let tu = linear_dispersion::tilbert(u, delta);
        let mut sup0: f64 = 0.0;
        let mut sup1: f64 = 0.0;
        for i in 0..g.len() {
            let x = g.x(i);
            let w0 = linear_dispersion::weight_omega_in(t, x, Weight::Omega0, kappa, frame, delta)?;
            let w1 = linear_dispersion::weight_omega_in(t, x, Weight::Omega1, kappa, frame, delta)?;
            sup0 = sup0.max(u.values()[i].abs() / w0);
            sup1 = sup1.max(tu.values()[i].abs() / w1);
        }
        let dyadic_sup = shells[j]
            .iter()
            .map(|&(k, _)| {
                let uk = lp_project(u, DyadicIndex::new(k), ProjectionMode::Smooth);
                2f64.powf(k as f64 / 2.0) * t.sqrt() * uk.sup_norm()
            })
            .fold(0.0, f64::max);
        let besov_rate = if j > 0 && j + 1 < trace.len() {
            let h = trace.times[j + 1] - trace.times[j - 1];
            shells[j]
                .iter()
                .zip(&shells[j - 1])
                .zip(&shells[j + 1])
                .map(|((&(k, _), &(_, a)), &(_, b))| {
                    let rate = ((b * b - a * a) / h).abs();
                    rate / (eps.powi(3) * 2f64.powf(1.5 * k as f64) * t.powf(-0.5) * (k.abs().max(1) as f64))
                })
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        rows.push(DecayRow {
            t,
            tilbert_half_v: norm_tilbert_half(&v, delta),
            besov_u: norm_besov(u),
            sup_u_omega0: sup0,
            sup_tu_omega1: sup1,
            dyadic_sup,
            besov_rate,
        });
    }
    Ok(DecayReport { epsilon: eps, rows })
}
