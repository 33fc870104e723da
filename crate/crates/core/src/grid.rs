//! Periodic spectral discretization of the line.
//!
//! A [`GridSpec`] samples `[x0, x0 + L)` at `n` equispaced nodes. Spectra are
//! stored in FFT order (mode `m` at index `m` for `m >= 0`, at `n + m` for
//! `m < 0`) and are unnormalized forward DFTs, so multipliers act on them
//! directly. The origin offset `x0` only matters for operations that use the
//! coordinate `x` itself.

use crate::error::{Error, Result};
use crate::symbols;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    period: f64,
    n_points: usize,
    origin: f64,
}

impl GridSpec {
    /// Domain `[-L/2, L/2)`.
    pub fn new(period: f64, n_points: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 16, got {n_points}"
            )));
        }
        Ok(Self { period, n_points, origin: -0.5 * period })
    }

    /// Moves the left end of the domain to `x0`.
    pub fn with_origin(mut self, x0: f64) -> Self {
        self.origin = x0;
        self
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn dx(&self) -> f64 {
        self.period / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Lattice spacing `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn nyquist(&self) -> f64 {
        PI * self.n_points as f64 / self.period
    }

    /// Signed mode number of FFT index `idx`; the Nyquist index maps to `-n/2`.
    pub fn mode(&self, idx: usize) -> i64 {
        let n = self.n_points as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let n = self.n_points as i64;
        if m >= -n / 2 && m < n / 2 {
            Some(m.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.mode(idx) as f64 * self.dk()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.wavenumber(i)).collect()
    }

    /// Lowest dyadic shell; it absorbs every nonzero frequency below it.
    pub fn k_min(&self) -> i32 {
        self.dk().log2().ceil() as i32
    }

    /// Highest shell that meets the lattice.
    pub fn k_max(&self) -> i32 {
        self.nyquist().log2().ceil() as i32
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
        })
        .clone()
}

/// In-place unnormalized forward DFT.
pub fn fft_forward(data: &mut [C64]) {
    plans(data.len()).forward.process(data);
}

/// In-place inverse DFT including the `1/n` factor.
pub fn fft_inverse(data: &mut [C64]) {
    let n = data.len();
    plans(n).inverse.process(data);
    let s = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= s;
    }
}

/// Real samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample at index {j}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self { grid, values: grid.xs().into_iter().map(f).collect() }
    }

    /// Real part of the inverse transform of `spec`.
    pub fn from_spectrum(grid: GridSpec, spec: &[C64]) -> Self {
        let mut buf = spec.to_vec();
        fft_inverse(&mut buf);
        Self { grid, values: buf.into_iter().map(|c| c.re).collect() }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> Vec<C64> {
        let mut buf: Vec<C64> = self.values.iter().map(|&v| C64::new(v, 0.0)).collect();
        fft_forward(&mut buf);
        buf
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn without_mean(&self) -> Field {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Field {
        self.map(|v| v * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + s * b)
    }

    /// Pointwise product on the grid, without dealiasing.
    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `x·f` with `x` the grid coordinate.
    pub fn x_times(&self) -> Field {
        let g = self.grid;
        Field {
            grid: g,
            values: self.values.iter().enumerate().map(|(j, v)| g.x(j) * v).collect(),
        }
    }

    /// Product with the 3/2-rule: exact on every retained mode.
    pub fn dealiased_product(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let prod = dealiased_spectral_product(&self.spectrum(), &other.spectrum());
        Ok(Field::from_spectrum(self.grid, &prod))
    }

    /// `m(D) f`. The symbol is evaluated on every nonzero lattice point and
    /// `at_zero` is used for the mean mode.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> C64, at_zero: C64) -> Result<Field> {
        let mut spec = self.spectrum();
        multiply_spectrum(&self.grid, &mut spec, m, at_zero)?;
        Ok(Field::from_spectrum(self.grid, &spec))
    }

    /// Spectral derivative of order `k`.
    pub fn derivative(&self, k: u32) -> Field {
        self.apply_multiplier(|xi| C64::new(0.0, xi).powu(k), C64::new(0.0, 0.0))
            .expect("polynomial symbol is finite")
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            values: self.values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        }
    }

    fn require_mean_zero(&self) -> Result<()> {
        let m = self.mean();
        if m.abs() > 1e-10 * self.sup_norm().max(1.0) {
            return Err(Error::NotMeanZero { mean: m });
        }
        Ok(())
    }

    /// Errors when the mean exceeds `1e-10·max(1, ‖f‖∞)`.
    pub fn check_mean_zero(&self) -> Result<()> {
        self.require_mean_zero()
    }
}

fn multiply_spectrum(
    grid: &GridSpec,
    spec: &mut [C64],
    m: impl Fn(f64) -> C64,
    at_zero: C64,
) -> Result<()> {
    spec[0] *= at_zero;
    for (i, s) in spec.iter_mut().enumerate().skip(1) {
        let xi = grid.wavenumber(i);
        let v = m(xi);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::UndefinedMultiplier { xi });
        }
        *s *= v;
    }
    Ok(())
}

/// Product of two spectra (same length `n`, FFT order) via zero padding to
/// `3n/2`; modes beyond the original band are dropped.
pub fn dealiased_spectral_product(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len();
    let big = 3 * n / 2;
    let pad = |s: &[C64]| {
        let mut out = vec![C64::new(0.0, 0.0); big];
        for i in 0..n {
            let m = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
            if m == -(n as i64) / 2 {
                continue;
            }
            out[m.rem_euclid(big as i64) as usize] = s[i];
        }
        fft_inverse(&mut out);
        out
    };
    let pa = pad(a);
    let pb = pad(b);
    let mut prod: Vec<C64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    fft_forward(&mut prod);
    // Forward(inverse(a)·inverse(b)) on the big grid carries a factor big/n² relative
    // to the length-n convention.
    let scale = big as f64 / n as f64;
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, o) in out.iter_mut().enumerate() {
        let m = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
        if m == -(n as i64) / 2 {
            continue;
        }
        *o = prod[m.rem_euclid(big as i64) as usize] * scale;
    }
    out
}

/// Complex samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_spectrum(grid: GridSpec, spec: &[C64]) -> Self {
        let mut buf = spec.to_vec();
        fft_inverse(&mut buf);
        Self { grid, values: buf }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn spectrum(&self) -> Vec<C64> {
        let mut buf = self.values.clone();
        fft_forward(&mut buf);
        buf
    }

    pub fn re(&self) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|c| c.re).collect() }
    }

    pub fn im(&self) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|c| c.im).collect() }
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn mean(&self) -> C64 {
        self.values.iter().sum::<C64>() / self.values.len() as f64
    }

    pub fn zip_with(&self, other: &ComplexField, f: impl Fn(C64, C64) -> C64) -> Result<ComplexField> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(ComplexField { grid: self.grid, values })
    }

    pub fn add(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> ComplexField {
        ComplexField { grid: self.grid, values: self.values.iter().map(|&v| v * s).collect() }
    }

    /// Pointwise multiplication by a unimodular phase or any other sample-wise factor.
    pub fn pointwise_mul(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn dealiased_product(&self, other: &ComplexField) -> Result<ComplexField> {
        self.grid.check_same(&other.grid)?;
        let prod = dealiased_spectral_product(&self.spectrum(), &other.spectrum());
        Ok(ComplexField::from_spectrum(self.grid, &prod))
    }

    pub fn apply_multiplier(&self, m: impl Fn(f64) -> C64, at_zero: C64) -> Result<ComplexField> {
        let mut spec = self.spectrum();
        multiply_spectrum(&self.grid, &mut spec, m, at_zero)?;
        Ok(ComplexField::from_spectrum(self.grid, &spec))
    }
}

/// Littlewood-Paley shell label, optionally restricted to one sign of frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicIndex {
    pub k: i32,
    pub sign: Option<Sign>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl DyadicIndex {
    pub fn new(k: i32) -> Self {
        Self { k, sign: None }
    }

    pub fn plus(k: i32) -> Self {
        Self { k, sign: Some(Sign::Plus) }
    }

    pub fn minus(k: i32) -> Self {
        Self { k, sign: Some(Sign::Minus) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProjectionMode {
    /// Sharp cutoff at `2^{k±1/2}`; the shells are disjoint.
    ExactShell,
    /// `ψ(ξ/2^k) - ψ(ξ/2^{k-1})` with the mollified bump `ψ`.
    #[default]
    Smooth,
}

fn mollifier_tail(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth bump: 1 on `[-1, 1]`, 0 outside `(-2, 2)`,
/// `ψ(r) = h(2-|r|) / (h(2-|r|) + h(|r|-1))` with `h(x) = e^{-1/x}` for `x > 0`.
pub fn bump(r: f64) -> f64 {
    let a = r.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let p = mollifier_tail(2.0 - a);
    let q = mollifier_tail(a - 1.0);
    p / (p + q)
}

fn low_window(xi: f64, k: i32, mode: ProjectionMode) -> f64 {
    let r = xi.abs() / 2f64.powi(k);
    match mode {
        ProjectionMode::Smooth => bump(r),
        ProjectionMode::ExactShell => {
            if r < std::f64::consts::SQRT_2 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Window of `P_k` at a nonzero frequency on `grid`; the shell `k_min` takes
/// in everything below it.
pub fn shell_window(grid: &GridSpec, xi: f64, k: i32, mode: ProjectionMode) -> f64 {
    if xi == 0.0 || k < grid.k_min() {
        return 0.0;
    }
    if k == grid.k_min() {
        return low_window(xi, k, mode);
    }
    low_window(xi, k, mode) - low_window(xi, k - 1, mode)
}

/// Window of `P_{<k}` (mean excluded).
pub fn below_window(grid: &GridSpec, xi: f64, k: i32, mode: ProjectionMode) -> f64 {
    if xi == 0.0 || k <= grid.k_min() {
        return 0.0;
    }
    low_window(xi, k - 1, mode)
}

fn sign_window(xi: f64, sign: Option<Sign>) -> f64 {
    match sign {
        None => 1.0,
        Some(Sign::Plus) => (xi > 0.0) as i32 as f64,
        Some(Sign::Minus) => (xi < 0.0) as i32 as f64,
    }
}

fn window_spectrum(grid: &GridSpec, spec: &mut [C64], w: impl Fn(f64) -> f64) {
    for (i, s) in spec.iter_mut().enumerate() {
        *s *= w(grid.wavenumber(i));
    }
}

/// `P_k f` for a real field (`d.sign` must be `None`; use [`lp_project_signed`]).
pub fn lp_project(f: &Field, d: DyadicIndex, mode: ProjectionMode) -> Field {
    if d.sign.is_some() {
        return lp_project_signed(&f.to_complex(), d, mode).re();
    }
    let g = *f.grid();
    let mut spec = f.spectrum();
    window_spectrum(&g, &mut spec, |xi| shell_window(&g, xi, d.k, mode));
    Field::from_spectrum(g, &spec)
}

/// `P_k^± f`, complex valued.
pub fn lp_project_signed(f: &ComplexField, d: DyadicIndex, mode: ProjectionMode) -> ComplexField {
    let g = *f.grid();
    let mut spec = f.spectrum();
    window_spectrum(&g, &mut spec, |xi| shell_window(&g, xi, d.k, mode) * sign_window(xi, d.sign));
    ComplexField::from_spectrum(g, &spec)
}

/// `P_{<k} f`, mean excluded.
pub fn lp_below(f: &Field, k: i32, mode: ProjectionMode) -> Field {
    let g = *f.grid();
    let mut spec = f.spectrum();
    window_spectrum(&g, &mut spec, |xi| below_window(&g, xi, k, mode));
    Field::from_spectrum(g, &spec)
}

/// `P_{≥k} f = f - mean - P_{<k} f`.
pub fn lp_at_or_above(f: &Field, k: i32, mode: ProjectionMode) -> Field {
    let g = *f.grid();
    let mut spec = f.spectrum();
    window_spectrum(&g, &mut spec, |xi| if xi == 0.0 { 0.0 } else { 1.0 - below_window(&g, xi, k, mode) });
    Field::from_spectrum(g, &spec)
}

/// Half-line projection `P_±`, zero mode excluded.
pub fn half_line(f: &ComplexField, sign: Sign) -> ComplexField {
    let g = *f.grid();
    let mut spec = f.spectrum();
    window_spectrum(&g, &mut spec, |xi| sign_window(xi, Some(sign)));
    ComplexField::from_spectrum(g, &spec)
}

/// Dyadic L² norms `‖P_k f‖` for `k = k_min..=k_max`, computed by Parseval.
pub fn dyadic_l2_norms(f: &Field, mode: ProjectionMode) -> Vec<(i32, f64)> {
    let g = *f.grid();
    let spec = f.spectrum();
    let w = g.period() / (g.len() as f64).powi(2);
    (g.k_min()..=g.k_max())
        .map(|k| {
            let s: f64 = spec
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let win = shell_window(&g, g.wavenumber(i), k, mode);
                    win * win * c.norm_sqr()
                })
                .sum();
            (k, (s * w).sqrt())
        })
        .collect()
}

/// `(‖f‖² + sup_{k<0} 2^{-k}‖P_k f‖²)^{1/2}` with smooth shells.
pub fn norm_besov(f: &Field) -> f64 {
    let low = dyadic_l2_norms(f, ProjectionMode::Smooth)
        .into_iter()
        .filter(|&(k, _)| k < 0)
        .map(|(k, n)| 2f64.powi(-k) * n * n)
        .fold(0.0, f64::max);
    (f.l2_norm_sq() + low).sqrt()
}

/// `‖|T|^{1/2} f‖` with multiplier `|tanh(δξ)|^{1/2}`.
pub fn norm_tilbert_half(f: &Field, delta: f64) -> f64 {
    let g = *f.grid();
    let spec = f.spectrum();
    let w = g.period() / (g.len() as f64).powi(2);
    let s: f64 = spec
        .iter()
        .enumerate()
        .map(|(i, c)| symbols::sigma(g.wavenumber(i), delta).abs() * c.norm_sqr())
        .sum();
    (s * w).sqrt()
}

/// Slowly varying majorant of the dyadic L² norms.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyEnvelope {
    pub k_min: i32,
    pub slack: f64,
    pub values: Vec<f64>,
}

impl FrequencyEnvelope {
    pub fn get(&self, k: i32) -> Option<f64> {
        let i = k.checked_sub(self.k_min)?;
        self.values.get(usize::try_from(i).ok()?).copied()
    }

    pub fn ks(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.k_min + i as i32)
    }

    pub fn l2_sum(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Minimal envelope `c_k = max_j 2^{-δ|j-k|} ‖P_j f‖`.
pub fn frequency_envelope(f: &Field, slack: f64) -> Result<FrequencyEnvelope> {
    if !(slack > 0.0 && slack <= 1.0) {
        return Err(Error::InvalidParameter(format!("envelope slack must lie in (0, 1], got {slack}")));
    }
    let norms = dyadic_l2_norms(f, ProjectionMode::Smooth);
    Ok(envelope_of(&norms, slack))
}

pub(crate) fn envelope_of(norms: &[(i32, f64)], slack: f64) -> FrequencyEnvelope {
    let values = norms
        .iter()
        .map(|&(k, _)| {
            norms
                .iter()
                .map(|&(j, n)| 2f64.powf(-slack * (j - k).abs() as f64) * n)
                .fold(0.0, f64::max)
        })
        .collect();
    FrequencyEnvelope { k_min: norms.first().map_or(0, |p| p.0), slack, values }
}

/// Fraction of `∫f²` lying within `L/20` of either end of the domain, where a
/// periodic field wraps around.
pub fn sentinel_fraction(f: &Field) -> f64 {
    let g = f.grid();
    let band = g.period() / 20.0;
    let (lo, hi) = (g.origin() + band, g.origin() + g.period() - band);
    let total: f64 = f.values().iter().map(|v| v * v).sum();
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = f
        .values()
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let x = g.x(*j);
            x < lo || x > hi
        })
        .map(|(_, v)| v * v)
        .sum();
    edge / total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dealias {
    /// Out-of-band outputs are dropped, as with zero padding to `3n/2`.
    #[default]
    Pad,
    /// Outputs wrap modulo `n`; rejected when inputs reach the top third.
    Wrap,
}

/// Relative level below which a mode counts as empty.
const ACTIVE_TOL: f64 = 1e-15;

fn active_modes(grid: &GridSpec, spec: &[C64]) -> Vec<(i64, C64)> {
    let peak = spec.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    spec.iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > ACTIVE_TOL * peak)
        .map(|(i, &c)| (grid.mode(i), c))
        .collect()
}

fn check_wrap_guard(grid: &GridSpec, u: &[(i64, C64)], v: &[(i64, C64)]) -> Result<()> {
    let third = grid.len() as i64 / 3;
    if u.iter().chain(v).any(|(m, _)| m.abs() > third) {
        return Err(Error::Aliasing("inputs occupy the top third of the spectrum".into()));
    }
    Ok(())
}

/// Bilinear form with symbol `b`: `F[B(u,v)](ζ) = Σ_{ξ+η=ζ} b(ξ,η) û(ξ) v̂(η) / n`,
/// evaluated as a direct convolution over the occupied modes.
pub fn bilinear_apply(
    b: impl Fn(f64, f64) -> C64,
    u: &Field,
    v: &Field,
    dealias: Dealias,
) -> Result<Field> {
    u.grid.check_same(&v.grid)?;
    let spec = bilinear_spectrum(&u.grid, &b, &u.spectrum(), &v.spectrum(), dealias)?;
    Ok(Field::from_spectrum(u.grid, &spec))
}

pub fn bilinear_apply_complex(
    b: impl Fn(f64, f64) -> C64,
    u: &ComplexField,
    v: &ComplexField,
    dealias: Dealias,
) -> Result<ComplexField> {
    u.grid.check_same(&v.grid)?;
    let spec = bilinear_spectrum(&u.grid, &b, &u.spectrum(), &v.spectrum(), dealias)?;
    Ok(ComplexField::from_spectrum(u.grid, &spec))
}

fn bilinear_spectrum(
    grid: &GridSpec,
    b: &impl Fn(f64, f64) -> C64,
    us: &[C64],
    vs: &[C64],
    dealias: Dealias,
) -> Result<Vec<C64>> {
    let n = grid.len() as i64;
    let dk = grid.dk();
    let au = active_modes(grid, us);
    let av = active_modes(grid, vs);
    if dealias == Dealias::Wrap {
        check_wrap_guard(grid, &au, &av)?;
    }
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let inv_n = 1.0 / n as f64;
    for &(m1, c1) in &au {
        let xi = m1 as f64 * dk;
        for &(m2, c2) in &av {
            let m = m1 + m2;
            let idx = match dealias {
                Dealias::Pad => match grid.index_of_mode(m) {
                    Some(i) => i,
                    None => continue,
                },
                Dealias::Wrap => m.rem_euclid(n) as usize,
            };
            let s = b(xi, m2 as f64 * dk);
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(Error::UndefinedMultiplier { xi });
            }
            out[idx] += s * c1 * c2 * inv_n;
        }
    }
    Ok(out)
}

/// Bilinear symbol tabulated on the lattice `|m1|, |m2| <= m_max` so that
/// repeated applications avoid re-evaluating it.
#[derive(Clone, Debug)]
pub struct TabulatedBilinear {
    grid: GridSpec,
    m_max: i64,
    values: Vec<C64>,
}

impl TabulatedBilinear {
    pub fn new(grid: GridSpec, m_max: usize, b: impl Fn(f64, f64) -> C64) -> Result<Self> {
        let m_max = (m_max as i64).min(grid.len() as i64 / 2);
        let w = (2 * m_max + 1) as usize;
        let dk = grid.dk();
        let mut values = Vec::with_capacity(w * w);
        for m1 in -m_max..=m_max {
            for m2 in -m_max..=m_max {
                let s = b(m1 as f64 * dk, m2 as f64 * dk);
                if !(s.re.is_finite() && s.im.is_finite()) {
                    return Err(Error::UndefinedMultiplier { xi: m1 as f64 * dk });
                }
                values.push(s);
            }
        }
        Ok(Self { grid, m_max, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    fn at(&self, m1: i64, m2: i64) -> C64 {
        let w = 2 * self.m_max + 1;
        self.values[((m1 + self.m_max) * w + m2 + self.m_max) as usize]
    }

    /// Applies the form to spectra, dropping out-of-band outputs. Modes above
    /// `m_max` must be empty.
    pub fn apply_spectrum(&self, us: &[C64], vs: &[C64]) -> Result<Vec<C64>> {
        let g = &self.grid;
        let au = active_modes(g, us);
        let av = active_modes(g, vs);
        if let Some(&(m, _)) = au.iter().chain(&av).find(|(m, _)| m.abs() > self.m_max) {
            return Err(Error::Aliasing(format!("mode {m} lies outside the tabulated band")));
        }
        let inv_n = 1.0 / g.len() as f64;
        let mut out = vec![C64::new(0.0, 0.0); g.len()];
        for &(m1, c1) in &au {
            let c1 = c1 * inv_n;
            for &(m2, c2) in &av {
                if let Some(idx) = g.index_of_mode(m1 + m2) {
                    out[idx] += self.at(m1, m2) * c1 * c2;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, u: &Field, v: &Field) -> Result<Field> {
        self.grid.check_same(u.grid())?;
        self.grid.check_same(v.grid())?;
        let s = self.apply_spectrum(&u.spectrum(), &v.spectrum())?;
        Ok(Field::from_spectrum(self.grid, &s))
    }
}
