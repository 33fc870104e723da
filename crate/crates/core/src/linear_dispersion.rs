//! The linear flow `φ_t = iA(D)φ`: its kernel, dyadic pieces, decay weights,
//! the vector field `L = x + tA'(D)` and the pointwise decay ratios.
//!
//! Kernels are computed by trapezoid quadrature of the windowed inverse
//! Fourier integral `(1/2π)∫ W(ξ) e^{i(xξ + tA(ξ))} dξ` on a uniform
//! frequency grid. When the output points are equispaced the quadrature sum
//! is a DFT, so all points are evaluated with one FFT.

use crate::error::{Error, Result};
use crate::grid::{bump, fft_inverse, sentinel_fraction, Field};
use crate::symbols;
use num_complex::Complex64;
use std::f64::consts::PI;

type C64 = Complex64;

pub const DEFAULT_KAPPA: f64 = 0.05;

/// Largest admitted sentinel mass fraction for operators that use `x`.
pub const WRAP_TOLERANCE: f64 = 1e-8;

/// Whether the transport term `∂x/δ` is kept in the flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Frame {
    /// Phase `A(ξ) = a(ξ) - ξ/δ`.
    #[default]
    Transport,
    /// Phase `a(ξ)`; every wave drifts by an extra `-t/δ`.
    Comoving,
}

impl Frame {
    pub fn phase(&self, xi: f64, delta: f64) -> f64 {
        match self {
            Frame::Transport => symbols::dispersion_big_a(xi, delta),
            Frame::Comoving => symbols::dispersion_a(xi, delta),
        }
    }

    pub fn phase_derivative(&self, xi: f64, delta: f64) -> f64 {
        match self {
            Frame::Transport => symbols::group_velocity_big_a(xi, delta),
            Frame::Comoving => symbols::group_velocity(xi, delta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Omega0,
    Omega1,
}

fn bracket(y: f64) -> f64 {
    (1.0 + y * y).sqrt()
}

/// Decay weights `ω₀`, `ω₁` in the transport frame.
pub fn weight_omega(t: f64, x: f64, which: Weight, kappa: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("weights need t > 0, got {t}")));
    }
    if x < -t {
        return Ok(t.powf(-0.5));
    }
    let s = t.cbrt();
    let y = x / s;
    let yp = x.max(0.0) / s;
    Ok(match which {
        Weight::Omega0 => bracket(y).powf(-0.25) * bracket(yp).powf(-0.75 - kappa) / s,
        Weight::Omega1 => bracket(y).powf(0.25) * bracket(yp).powf(-1.25) / (s * s),
    })
}

/// Weight evaluated in `frame`: the comoving frame shifts `x` by `t/δ`.
pub fn weight_omega_in(t: f64, x: f64, which: Weight, kappa: f64, frame: Frame, delta: f64) -> Result<f64> {
    match frame {
        Frame::Transport => weight_omega(t, x, which, kappa),
        Frame::Comoving => weight_omega(t, x + t / delta, which, kappa),
    }
}

/// Frequency band of a kernel piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Band {
    /// All frequencies, as the sum of the low remainder, the shells `j ≤ 0`
    /// and the tapered high part.
    Full,
    /// `P_j K` with the smooth shell window.
    Shell(i32),
    /// `P_{>0} K = (1 - ψ(ξ)) K`, tapered at `Ξ_max`.
    High,
}

impl Band {
    pub fn label(&self) -> String {
        match self {
            Band::Full => "full".into(),
            Band::Shell(j) => format!("shell{j}"),
            Band::High => "high".into(),
        }
    }
}

/// Equispaced output points `x0 + l·dx`, `l < n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XGrid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl XGrid {
    pub fn x(&self, l: usize) -> f64 {
        self.x0 + l as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|l| self.x(l)).collect()
    }

    fn max_abs(&self) -> f64 {
        self.x0.abs().max(self.x(self.n.saturating_sub(1)).abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelOptions {
    pub delta: f64,
    pub frame: Frame,
    /// Quadrature cells per `2π` of phase; the phase changes by at most
    /// `2π/oversampling` per cell.
    pub oversampling: f64,
    /// Taper radius for the unbounded bands; chosen from the probed `x` range
    /// when `None`, but never above `π/dx`.
    pub xi_max: Option<f64>,
    /// Lowest shell of the dyadic sum for [`Band::Full`]; lower frequencies
    /// form one remainder piece.
    pub j_low: i32,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { delta: 1.0, frame: Frame::Transport, oversampling: 8.0, xi_max: None, j_low: -10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSample {
    pub t: f64,
    pub band: Band,
    pub xs: XGrid,
    pub k: Vec<C64>,
    /// Samples of `T(D)K`, with `T ↔ -i tanh(δξ)`.
    pub tk: Vec<C64>,
    /// Taper radius used by unbounded bands.
    pub xi_max: f64,
}

impl KernelSample {
    pub fn sup(&self) -> f64 {
        self.k.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Location of the largest `|K|`.
    pub fn peak(&self) -> f64 {
        let (l, _) = self
            .k
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bl, bv), (l, c)| if c.norm() > bv { (l, c.norm()) } else { (bl, bv) });
        self.xs.x(l)
    }

    /// `Σ K(x_l) dx`.
    pub fn integral(&self) -> C64 {
        self.k.iter().sum::<C64>() * self.xs.dx
    }
}

/// One window with its frequency support `|ξ| ≤ sup`.
struct Piece {
    window: Box<dyn Fn(f64) -> f64>,
    sup: f64,
}

fn taper_radius(t: f64, xs: &XGrid, opts: &KernelOptions) -> f64 {
    if let Some(r) = opts.xi_max {
        return r;
    }
    // Stationary points solve tA'(ξ) = -x; A'(ξ) ≥ 2|ξ| - 1/δ - 1 for large |ξ|.
    let xi_s = 0.5 * (xs.max_abs() / t + 1.0 / opts.delta + 1.0);
    // Capped by the output Nyquist; stationary points beyond the cap are then
    // cut off by the taper rather than rejected.
    (4.0 * xi_s).max(8.0).min(PI / xs.dx)
}

fn pieces(band: Band, xi_max: f64, j_low: i32) -> Vec<Piece> {
    let shell = |j: i32| Piece {
        window: Box::new(move |xi: f64| bump(xi / 2f64.powi(j)) - bump(xi / 2f64.powi(j - 1))),
        sup: 2f64.powi(j + 1),
    };
    let high = Piece {
        window: Box::new(move |xi: f64| (1.0 - bump(xi)) * bump(2.0 * xi / xi_max)),
        sup: xi_max,
    };
    match band {
        Band::Shell(j) => vec![shell(j)],
        Band::High => vec![high],
        Band::Full => {
            let mut v = vec![Piece { window: Box::new(move |xi: f64| bump(xi / 2f64.powi(j_low))), sup: 2f64.powi(j_low + 1) }];
            v.extend((j_low + 1..=0).map(shell));
            v.push(high);
            v
        }
    }
}

/// Kernel of `e^{itA(D)}` restricted to `band`, sampled on `xs`.
pub fn kernel(t: f64, band: Band, xs: &XGrid, opts: &KernelOptions) -> Result<KernelSample> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("kernel needs t > 0, got {t}")));
    }
    if xs.n == 0 || !(xs.dx > 0.0) {
        return Err(Error::InvalidParameter("empty output grid".into()));
    }
    if !(opts.oversampling >= 8.0) {
        return Err(Error::UnderResolved(format!(
            "oversampling {} leaves more than π/4 of phase per cell",
            opts.oversampling
        )));
    }
    let xi_max = taper_radius(t, xs, opts);
    let parts = pieces(band, xi_max, opts.j_low);
    let xi_sup = parts.iter().map(|p| p.sup).fold(0.0, f64::max);
    if xi_sup > PI / xs.dx {
        return Err(Error::UnderResolved(format!(
            "band reaches |ξ| = {xi_sup:.3}, beyond the output Nyquist π/dx = {:.3}",
            PI / xs.dx
        )));
    }
    let dphase = xs.max_abs() + t * opts.frame.phase_derivative(xi_sup, opts.delta).abs().max(1.0 / opts.delta);
    let h_req = 2.0 * PI / (opts.oversampling * dphase);
    let n_min = (2.0 * PI / (xs.dx * h_req)).ceil() as usize;
    let n_fft = n_min.max(xs.n).next_power_of_two();
    let h = 2.0 * PI / (n_fft as f64 * xs.dx);
    if h * dphase > PI / 4.0 * (8.0 / opts.oversampling) * (1.0 + 1e-12) {
        return Err(Error::UnderResolved("quadrature cell exceeds the phase budget".into()));
    }

    let mut k = vec![C64::new(0.0, 0.0); xs.n];
    let mut tk = vec![C64::new(0.0, 0.0); xs.n];
    for p in &parts {
        let mut g = vec![C64::new(0.0, 0.0); n_fft];
        let mut gt = vec![C64::new(0.0, 0.0); n_fft];
        for (i, (gv, gtv)) in g.iter_mut().zip(gt.iter_mut()).enumerate() {
            let m = if i < n_fft / 2 { i as f64 } else { i as f64 - n_fft as f64 };
            let xi = m * h;
            if xi.abs() >= p.sup {
                continue;
            }
            let w = (p.window)(xi);
            if w == 0.0 {
                continue;
            }
            let v = w * C64::from_polar(1.0, t * opts.frame.phase(xi, opts.delta) + xi * xs.x0);
            *gv = v;
            *gtv = v * C64::new(0.0, -symbols::sigma(xi, opts.delta));
        }
        fft_inverse(&mut g);
        fft_inverse(&mut gt);
        // (h/2π)·N·ifft = (1/dx)·ifft
        for l in 0..xs.n {
            k[l] += g[l] / xs.dx;
            tk[l] += gt[l] / xs.dx;
        }
    }
    Ok(KernelSample { t, band, xs: *xs, k, tk, xi_max })
}

/// `Lf = x·f + t·A'(D)f` (or `a'(D)` in the comoving frame).
pub fn vectorfield_l(f: &Field, t: f64, delta: f64, frame: Frame) -> Result<Field> {
    let mass = sentinel_fraction(f);
    if mass > WRAP_TOLERANCE {
        return Err(Error::WrapContamination { mass });
    }
    let at_zero = match frame {
        Frame::Transport => 0.0,
        Frame::Comoving => 1.0 / delta,
    };
    let drift = f.apply_multiplier(
        |xi| C64::new(frame.phase_derivative(xi, delta), 0.0),
        C64::new(at_zero, 0.0),
    )?;
    f.x_times().axpy(t, &drift)
}

/// `e^{itA(D)} f`.
pub fn propagate(f: &Field, t: f64, delta: f64, frame: Frame) -> Field {
    f.apply_multiplier(|xi| C64::from_polar(1.0, t * frame.phase(xi, delta)), C64::new(1.0, 0.0))
        .expect("unimodular symbol")
}

/// `T f` with symbol `-i tanh(δξ)`.
pub fn tilbert(f: &Field, delta: f64) -> Field {
    f.apply_multiplier(|xi| symbols::tilbert_symbol(xi, delta), C64::new(0.0, 0.0))
        .expect("bounded symbol")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsRow {
    pub t: f64,
    pub r0: f64,
    pub r1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KsReport {
    pub rows: Vec<KsRow>,
}

impl KsReport {
    pub fn max_r0(&self) -> f64 {
        self.rows.iter().map(|r| r.r0).fold(0.0, f64::max)
    }

    pub fn max_r1(&self) -> f64 {
        self.rows.iter().map(|r| r.r1).fold(0.0, f64::max)
    }

    /// `max/min` of `r₀` and of `r₁` over the times.
    pub fn spread(&self) -> (f64, f64) {
        let s = |f: fn(&KsRow) -> f64| {
            let max = self.rows.iter().map(f).fold(0.0, f64::max);
            let min = self.rows.iter().map(f).fold(f64::INFINITY, f64::min);
            max / min
        };
        (s(|r| r.r0), s(|r| r.r1))
    }
}

/// Pointwise decay ratios of the linear evolution of `datum`:
/// `r₀ = sup|φ|/(ω₀ N)`, `r₁ = sup|Tφ|/(ω₁ N)` with `N = ‖φ‖_B + ‖Lφ‖_{T,1/2}`.
pub fn ks_ratio(datum: &Field, times: &[f64], delta: f64, frame: Frame, kappa: f64) -> Result<KsReport> {
    datum.check_mean_zero()?;
    let g = *datum.grid();
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let phi = propagate(datum, t, delta, frame);
        let lphi = vectorfield_l(&phi, t, delta, frame)?;
        let norm = crate::grid::norm_besov(&phi) + crate::grid::norm_tilbert_half(&lphi, delta);
        let tphi = tilbert(&phi, delta);
        let mut r0: f64 = 0.0;
        let mut r1: f64 = 0.0;
        for j in 0..g.len() {
            let x = g.x(j);
            let w0 = weight_omega_in(t, x, Weight::Omega0, kappa, frame, delta)?;
            let w1 = weight_omega_in(t, x, Weight::Omega1, kappa, frame, delta)?;
            r0 = r0.max(phi.values()[j].abs() / w0);
            r1 = r1.max(tphi.values()[j].abs() / w1);
        }
        rows.push(KsRow { t, r0: r0 / norm, r1: r1 / norm });
    }
    Ok(KsReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_examples() {
        assert!((weight_omega(8.0, 0.0, Weight::Omega0, 0.05).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(weight_omega(1.0, -2.0, Weight::Omega0, 0.05).unwrap(), 1.0);
        assert!(weight_omega(0.0, 1.0, Weight::Omega0, 0.05).is_err());
    }
}
