//! Symbols of the quadratic normal form and of the vector-field equation.
//!
//! With `P = ∂t - iA(D)` and `Pu = u u_x`, the corrected vector field
//! `v = Lu + tB(u,u)` satisfies `Pv = C(u,v) + tR(u,u,u) + D(u,u)`. This
//! module evaluates the symbols of `B`, `C`, `D`, `R` and their pieces, for
//! ILW (`σ = tanh(δ·)`) and for the Benjamin-Ono surrogate (`σ = sgn`).
//!
//! All quotients by the resonance function are taken in factored form,
//! `Ω = ξη(ξ+η)·W`, so nothing is divided by a vanishing quantity.

use crate::error::{Error, Result};
use crate::grid::{bilinear_apply, Dealias, Field};
use crate::symbols::{self, sgn, LINE_BAND};
use num_complex::Complex64;
use std::fmt;
use std::io::Write;
use std::sync::OnceLock;

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymbolModel {
    Ilw { delta: f64 },
    BenjaminOno,
}

/// Deliberate sign errors used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    FlipB2,
    FlipDDerivative,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalForm {
    pub model: SymbolModel,
    pub fault: Option<Fault>,
}

impl NormalForm {
    pub fn ilw(delta: f64) -> Self {
        Self { model: SymbolModel::Ilw { delta }, fault: None }
    }

    pub fn benjamin_ono() -> Self {
        Self { model: SymbolModel::BenjaminOno, fault: None }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn sigma(&self, x: f64) -> f64 {
        match self.model {
            SymbolModel::Ilw { delta } => symbols::sigma(x, delta),
            SymbolModel::BenjaminOno => sgn(x),
        }
    }

    fn sigma_prime(&self, x: f64) -> f64 {
        match self.model {
            SymbolModel::Ilw { delta } => {
                let c = (delta * x).cosh();
                if c.is_infinite() {
                    0.0
                } else {
                    delta / (c * c)
                }
            }
            SymbolModel::BenjaminOno => 0.0,
        }
    }

    /// Dispersion phase `a(ξ)` of the model.
    pub fn phase(&self, x: f64) -> f64 {
        match self.model {
            SymbolModel::Ilw { delta } => symbols::dispersion_a(x, delta),
            SymbolModel::BenjaminOno => x * x.abs(),
        }
    }

    /// `a'(ξ)`.
    pub fn phase_derivative(&self, x: f64) -> f64 {
        match self.model {
            SymbolModel::Ilw { delta } => symbols::group_velocity(x, delta),
            SymbolModel::BenjaminOno => 2.0 * x.abs(),
        }
    }

    /// `Ω(ξ,η) = a(ξ+η) - a(ξ) - a(η)`.
    pub fn omega(&self, xi: f64, eta: f64) -> f64 {
        match self.model {
            SymbolModel::Ilw { delta } => symbols::resonance_omega(xi, eta, delta),
            SymbolModel::BenjaminOno => {
                let z = xi + eta;
                z * z.abs() - xi * xi.abs() - eta * eta.abs()
            }
        }
    }

    /// `b₁ = N₁/Ω`, tending to 3 at the origin and 2 at infinity.
    pub fn b1(&self, xi: f64, eta: f64) -> f64 {
        match self.model {
            SymbolModel::Ilw { delta } => {
                symbols::weighted_resonance_weight(xi, eta, delta) / symbols::resonance_weight(xi, eta, delta)
            }
            SymbolModel::BenjaminOno => 2.0,
        }
    }

    /// `K = c̃ᵃ/(ξη)`, bounded.
    fn ctilde_quotient(&self, xi: f64, eta: f64, delta: f64) -> f64 {
        let s = symbols::sigma(xi + eta, delta);
        0.25 * (symbols::tanh_quotient(xi, delta) * (s - symbols::sigma(eta, delta))
            - symbols::tanh_quotient(eta, delta) * (s - symbols::sigma(xi, delta)))
    }

    /// `c̃ᵃ = -¼ξσ(η)(σ(ξ+η) - σ(ξ)) + ¼ησ(ξ)(σ(ξ+η) - σ(η))`.
    pub fn ctilde_a(&self, xi: f64, eta: f64) -> f64 {
        match self.model {
            SymbolModel::Ilw { delta } => xi * eta * self.ctilde_quotient(xi, eta, delta),
            SymbolModel::BenjaminOno => {
                let (sx, se, sz) = (sgn(xi), sgn(eta), sgn(xi + eta));
                -0.25 * xi * se * (sz - sx) + 0.25 * eta * sx * (sz - se)
            }
        }
    }

    /// `b₂ = c̃ᵃ(a'(η) - a'(ξ)) / Ω`.
    pub fn b2(&self, xi: f64, eta: f64) -> f64 {
        let v = match self.model {
            SymbolModel::Ilw { delta } => {
                let k = self.ctilde_quotient(xi, eta, delta);
                let m = symbols::group_velocity_quotient(xi, eta, delta);
                k * (eta - xi) * m / symbols::resonance_weight(xi, eta, delta)
            }
            SymbolModel::BenjaminOno => -0.25 * (1.0 - sgn(xi) * sgn(eta)),
        };
        if self.fault == Some(Fault::FlipB2) {
            -v
        } else {
            v
        }
    }

    /// `b = b₁/2 + b₂`.
    pub fn b(&self, xi: f64, eta: f64) -> f64 {
        0.5 * self.b1(xi, eta) + self.b2(xi, eta)
    }

    /// `b♯ = 3/4 + ¼σ(ξ)σ(η)`.
    pub fn b_sharp(&self, xi: f64, eta: f64) -> f64 {
        0.75 + 0.25 * self.sigma(xi) * self.sigma(eta)
    }

    pub fn b_residual(&self, xi: f64, eta: f64) -> f64 {
        self.b(xi, eta) - self.b_sharp(xi, eta)
    }

    /// `c = iη - 2i c̃ᵃ`.
    pub fn c(&self, xi: f64, eta: f64) -> C64 {
        I * (eta - 2.0 * self.ctilde_a(xi, eta))
    }

    /// `c(ξ,η) + c(ξ,-ξ-η)`.
    pub fn c_sym3(&self, xi: f64, eta: f64) -> C64 {
        self.c(xi, eta) + self.c(xi, -xi - eta)
    }

    /// `c_sym3` in factored form, `-iξ sech²(δξ)sech²(δη)/(1 + tanh(δξ)tanh(δη))`,
    /// written as `-iξ / (cosh(δξ) cosh(δη) cosh(δ(ξ+η)))`. The plain sum
    /// [`NormalForm::c_sym3`] cannot resolve values below `ε|ξ|`.
    pub fn c_sym3_factored(&self, xi: f64, eta: f64) -> C64 {
        match self.model {
            SymbolModel::Ilw { delta } => {
                let sech = |t: f64| {
                    let e = (-2.0 * (delta * t).abs()).exp();
                    2.0 * (-(delta * t).abs()).exp() / (1.0 + e)
                };
                -I * xi * sech(xi) * sech(eta) * sech(xi + eta)
            }
            SymbolModel::BenjaminOno => C64::new(0.0, 0.0),
        }
    }

    /// `G = σ(ξ+η)σ(ξ) + σ(ξ+η)σ(η) - σ(ξ)σ(η) + 1`.
    pub fn g_aux(&self, xi: f64, eta: f64) -> f64 {
        let (sx, se, sz) = (self.sigma(xi), self.sigma(eta), self.sigma(xi + eta));
        sz * sx + sz * se - sx * se + 1.0
    }

    /// `(∂η - ∂ξ) c̃ᵃ`, symmetric.
    pub fn ctilde_a_derivative(&self, xi: f64, eta: f64) -> f64 {
        let (sx, se, sz) = (self.sigma(xi), self.sigma(eta), self.sigma(xi + eta));
        let (px, pe) = (self.sigma_prime(xi), self.sigma_prime(eta));
        0.25 * (sx * (sz - se) + se * (sz - sx)
            - xi * pe * (sz - sx)
            - xi * se * px
            - eta * sx * pe
            - eta * px * (sz - se))
    }

    /// `d = b - 1 + (∂η - ∂ξ)c̃ᵃ`.
    pub fn d(&self, xi: f64, eta: f64) -> f64 {
        let deriv = self.ctilde_a_derivative(xi, eta);
        let sign = if self.fault == Some(Fault::FlipDDerivative) { -1.0 } else { 1.0 };
        self.b(xi, eta) - 1.0 + sign * deriv
    }

    /// Symmetrization over the six orderings of
    /// `i(η+ζ) b(ξ, η+ζ) - c(ξ, η+ζ) b(η, ζ)`.
    pub fn r(&self, xi: f64, eta: f64, zeta: f64) -> C64 {
        let term = |x: f64, y: f64, z: f64| -> C64 {
            let s = y + z;
            I * s * self.b(x, s) - self.c(x, s) * self.b(y, z)
        };
        (term(xi, eta, zeta)
            + term(xi, zeta, eta)
            + term(eta, xi, zeta)
            + term(eta, zeta, xi)
            + term(zeta, xi, eta)
            + term(zeta, eta, xi))
            / 6.0
    }

    pub fn b_form(&self, u: &Field, v: &Field) -> Result<Field> {
        bilinear_apply(|x, y| C64::new(self.b(x, y), 0.0), u, v, Dealias::Pad)
    }

    pub fn c_form(&self, u: &Field, v: &Field) -> Result<Field> {
        bilinear_apply(|x, y| self.c(x, y), u, v, Dealias::Pad)
    }

    pub fn d_form(&self, u: &Field, v: &Field) -> Result<Field> {
        bilinear_apply(|x, y| C64::new(self.d(x, y), 0.0), u, v, Dealias::Pad)
    }

    /// `R(u,u,u) = 2B(u, u u_x) - C(u, B(u,u))`.
    pub fn apply_r(&self, u: &Field) -> Result<Field> {
        let uux = u.dealiased_product(&u.derivative(1))?;
        let buu = self.b_form(u, u)?;
        self.b_form(u, &uux)?.scale(2.0).sub(&self.c_form(u, &buu)?)
    }

    pub fn symbol(&self, kind: SymbolKind, xi: f64, eta: f64) -> C64 {
        let re = |v: f64| C64::new(v, 0.0);
        match kind {
            SymbolKind::B1 => re(self.b1(xi, eta)),
            SymbolKind::B2 => re(self.b2(xi, eta)),
            SymbolKind::B => re(self.b(xi, eta)),
            SymbolKind::BSharp => re(self.b_sharp(xi, eta)),
            SymbolKind::BResidual => re(self.b_residual(xi, eta)),
            SymbolKind::CTildeA => re(self.ctilde_a(xi, eta)),
            SymbolKind::C => self.c(xi, eta),
            SymbolKind::CSym3 => self.c_sym3(xi, eta),
            SymbolKind::G => re(self.g_aux(xi, eta)),
            SymbolKind::D => re(self.d(xi, eta)),
            SymbolKind::Omega => re(self.omega(xi, eta)),
        }
    }
}

/// Closed-form Benjamin-Ono values off the coordinate axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoSymbols {
    pub b: f64,
    pub ctilde_a: f64,
    pub c: C64,
}

pub fn bo_symbols(xi: f64, eta: f64) -> Result<BoSymbols> {
    if xi == 0.0 || eta == 0.0 || xi + eta == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Benjamin-Ono symbols need frequencies off the axes, got ({xi}, {eta})"
        )));
    }
    let nf = NormalForm::benjamin_ono();
    Ok(BoSymbols { b: nf.b(xi, eta), ctilde_a: nf.ctilde_a(xi, eta), c: nf.c(xi, eta) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    B1,
    B2,
    B,
    BSharp,
    BResidual,
    CTildeA,
    C,
    CSym3,
    G,
    D,
    Omega,
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 11] = [
        SymbolKind::B1,
        SymbolKind::B2,
        SymbolKind::B,
        SymbolKind::BSharp,
        SymbolKind::BResidual,
        SymbolKind::CTildeA,
        SymbolKind::C,
        SymbolKind::CSym3,
        SymbolKind::G,
        SymbolKind::D,
        SymbolKind::Omega,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SymbolKind::B1 => "b1",
            SymbolKind::B2 => "b2",
            SymbolKind::B => "b",
            SymbolKind::BSharp => "b_sharp",
            SymbolKind::BResidual => "b_residual",
            SymbolKind::CTildeA => "ctilde_a",
            SymbolKind::C => "c",
            SymbolKind::CSym3 => "c_sym3",
            SymbolKind::G => "g",
            SymbolKind::D => "d",
            SymbolKind::Omega => "omega",
        }
    }

    fn index(&self) -> usize {
        Self::ALL.iter().position(|k| k == self).expect("listed")
    }
}

/// Points `max·(2i - (n-1))/(n-1)`, `i < n`; exactly symmetric under negation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub n: usize,
    pub max: f64,
}

impl Lattice {
    pub fn new(n: usize, max: f64) -> Result<Self> {
        if n < 2 || !(max > 0.0 && max.is_finite()) {
            return Err(Error::InvalidParameter(format!("lattice needs n >= 2 and max > 0, got {n}, {max}")));
        }
        Ok(Self { n, max })
    }

    pub fn point(&self, i: usize) -> f64 {
        let m = (self.n - 1) as f64;
        self.max * (2.0 * i as f64 - m) / m
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Lattice with twice the resolution on the same box.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n - 1, max: self.max }
    }
}

/// Symbol values on a rectangular `(ξ, η)` lattice, computed on first use.
pub struct SymbolGrid {
    pub nf: NormalForm,
    pub lattice: Lattice,
    cache: Vec<OnceLock<Vec<C64>>>,
}

impl SymbolGrid {
    pub fn new(nf: NormalForm, lattice: Lattice) -> Self {
        Self { nf, lattice, cache: (0..SymbolKind::ALL.len()).map(|_| OnceLock::new()).collect() }
    }

    /// Row-major values: index `i·n + j` holds `(ξ_i, η_j)`.
    pub fn values(&self, kind: SymbolKind) -> &[C64] {
        self.cache[kind.index()].get_or_init(|| {
            let pts = self.lattice.points();
            let mut out = Vec::with_capacity(pts.len() * pts.len());
            for &x in &pts {
                for &y in &pts {
                    out.push(self.nf.symbol(kind, x, y));
                }
            }
            out
        })
    }

    /// CSV with columns `xi,eta,value_re,value_im`.
    pub fn write_csv(&self, kind: SymbolKind, header: &str, w: &mut impl Write) -> std::io::Result<()> {
        write!(w, "{header}")?;
        writeln!(w, "xi,eta,value_re,value_im")?;
        let pts = self.lattice.points();
        let vals = self.values(kind);
        for (i, &x) in pts.iter().enumerate() {
            for (j, &y) in pts.iter().enumerate() {
                let v = vals[i * pts.len() + j];
                writeln!(w, "{x:.12e},{y:.12e},{:.15e},{:.15e}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Outcome of one symbol identity over a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Largest scaled residual away from the Taylor bands.
    pub max_off_band: f64,
    /// Largest scaled residual inside the bands.
    pub max_in_band: f64,
    pub worst: (f64, f64),
    pub tol_off_band: f64,
    pub tol_in_band: f64,
}

impl IdentityCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            max_off_band: 0.0,
            max_in_band: 0.0,
            worst: (f64::NAN, f64::NAN),
            tol_off_band: 1e-10,
            tol_in_band: 1e-6,
        }
    }

    fn record(&mut self, xi: f64, eta: f64, residual: f64) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        let old = (self.max_off_band / self.tol_off_band).max(self.max_in_band / self.tol_in_band);
        let tol = if in_band(xi, eta) {
            self.max_in_band = self.max_in_band.max(r);
            self.tol_in_band
        } else {
            self.max_off_band = self.max_off_band.max(r);
            self.tol_off_band
        };
        if r / tol > old {
            self.worst = (xi, eta);
        }
    }

    pub fn passed(&self) -> bool {
        self.max_off_band <= self.tol_off_band && self.max_in_band <= self.tol_in_band
    }
}

fn in_band(xi: f64, eta: f64) -> bool {
    let w = 2.0 * LINE_BAND;
    xi.abs() < w || eta.abs() < w || (xi + eta).abs() < w || (xi.abs() - eta.abs()).abs() < w
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub lattice: Lattice,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lattice {}x{} on [-{}, {}]^2", self.lattice.n, self.lattice.n, self.lattice.max, self.lattice.max)?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<22} {}  off-band {:.3e} (tol {:.0e})  in-band {:.3e} (tol {:.0e})  worst at ({:.6}, {:.6})",
                c.name,
                if c.passed() { "PASS" } else { "FAIL" },
                c.max_off_band,
                c.tol_off_band,
                c.max_in_band,
                c.tol_in_band,
                c.worst.0,
                c.worst.1
            )?;
        }
        Ok(())
    }
}

/// Fourth-order central difference of `f` at `x`.
fn five_point(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Checks the symbol identities implied by the quadratic identity on a lattice:
/// the tanh triple identity, the symmetrization of `c`, the closed form of
/// `c_sym3`, the definition of `b₂`, the time-coefficient identity linking
/// `b`, `Ω` and `c`, and the definition of `d` against finite differences of `c`.
pub fn verify_quadratic_identity(nf: &NormalForm, lattice: &Lattice) -> IdentityReport {
    let mut triple = IdentityCheck::new("tanh_triple");
    let mut first_c = IdentityCheck::new("c_symmetrization");
    let mut csym = IdentityCheck::new("c_sym3_closed_form");
    let mut b2def = IdentityCheck::new("b2_reconstruction");
    let mut second_c = IdentityCheck::new("time_coefficients");
    let mut dcheck = IdentityCheck::new("d_definition");
    let pts = lattice.points();
    let fd_step = 1e-3;
    for &x in &pts {
        for &y in &pts {
            let (sx, sy, sz) = (nf.sigma(x), nf.sigma(y), nf.sigma(x + y));
            triple.record(x, y, (sz * sx * sy - (sx + sy - sz)).abs());

            let scale_c = 1.0 + x.abs() + y.abs();
            first_c.record(x, y, (nf.c(x, y) + nf.c(y, x) - I * (x + y)).norm() / scale_c);

            let closed = nf.c_sym3_factored(x, y);
            let on_axis = nf.model == SymbolModel::BenjaminOno && (x == 0.0 || y == 0.0 || x + y == 0.0);
            if !on_axis {
                csym.record(x, y, (nf.c_sym3(x, y) - closed).norm() / scale_c);
            }

            let (ax, ay, az) = (nf.phase_derivative(x), nf.phase_derivative(y), nf.phase_derivative(x + y));
            let om = nf.omega(x, y);
            let ct = nf.ctilde_a(x, y);
            let lhs = nf.b2(x, y) * om;
            let rhs = ct * (ay - ax);
            b2def.record(x, y, (lhs - rhs).abs() / (1.0 + ct.abs() * (ax.abs() + ay.abs())));

            // (i/2)cᵃ(a'(η) - a'(ξ)) - ¼(ξ+η)(a'(ξ) + a'(η)) = bΩ - ½(ξ+η)a'(ξ+η)
            let ca = 0.5 * (nf.c(x, y) - nf.c(y, x));
            let left = (0.5 * I * ca * (ay - ax)).re - 0.25 * (x + y) * (ax + ay);
            let right = nf.b(x, y) * om - 0.5 * (x + y) * az;
            let scale_t = 1.0 + (x * ax).abs() + (y * ay).abs() + ((x + y) * az).abs();
            second_c.record(x, y, (left - right).abs() / scale_t);

            // d = b + i·sym(∂η c), derivative by finite differences of c alone.
            let near_kink = nf.model == SymbolModel::BenjaminOno
                && (x.abs() < 4.0 * fd_step || y.abs() < 4.0 * fd_step || (x + y).abs() < 4.0 * fd_step);
            if !near_kink {
                let dc_xy = five_point(|t| nf.c(x, t).im, y, fd_step);
                let dc_yx = five_point(|t| nf.c(y, t).im, x, fd_step);
                // i·(i·Im ∂c) = -Im ∂c; the real part of ∂c vanishes.
                let d_fd = nf.b(x, y) - 0.5 * (dc_xy + dc_yx);
                dcheck.record(x, y, (nf.d(x, y) - d_fd).abs() / scale_c);
            }
        }
    }
    // Finite differences of c carry truncation error ~h⁴ c⁽⁵⁾ and rounding ~ε|c|/h.
    dcheck.tol_off_band = 1e-9;
    IdentityReport { lattice: *lattice, checks: vec![triple, first_c, csym, b2def, second_c, dcheck] }
}

/// The four decay suprema over a lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayLadder {
    /// `sup |c_sym3| e^{ξ_hi} / (1 + ξ_hi)`.
    pub c_sym3: f64,
    /// `sup (1 + ξ_hi) e^{ξ_lo} |bʳ|`.
    pub b_residual: f64,
    /// `sup e^{ξ_lo} |d|`.
    pub d: f64,
    /// `sup |r| / (|σ(ξ)| + |σ(η)| + |σ(ζ)|)`, origin excluded.
    pub r: f64,
    /// `sup |b|`.
    pub b_max: f64,
}

impl DecayLadder {
    pub fn as_array(&self) -> [(&'static str, f64); 4] {
        [("c_sym3", self.c_sym3), ("b_residual", self.b_residual), ("d", self.d), ("r", self.r)]
    }
}

/// Suprema of the decay ladder on `lattice` (for the two-frequency symbols) and
/// on the cube `cube` (for `r`).
pub fn decay_ladder(nf: &NormalForm, lattice: &Lattice, cube: &Lattice) -> DecayLadder {
    let pts = lattice.points();
    let mut out = DecayLadder { c_sym3: 0.0, b_residual: 0.0, d: 0.0, r: 0.0, b_max: 0.0 };
    for &x in &pts {
        for &y in &pts {
            let z = -x - y;
            let hi = x.abs().max(y.abs()).max(z.abs());
            let lo = x.abs().min(y.abs()).min(z.abs());
            out.c_sym3 = out.c_sym3.max(nf.c_sym3_factored(x, y).norm() * hi.exp() / (1.0 + hi));
            out.b_residual = out.b_residual.max((1.0 + hi) * lo.exp() * nf.b_residual(x, y).abs());
            out.d = out.d.max(lo.exp() * nf.d(x, y).abs());
            out.b_max = out.b_max.max(nf.b(x, y).abs());
        }
    }
    let cp = cube.points();
    for &x in &cp {
        for &y in &cp {
            for &z in &cp {
                let s = nf.sigma(x).abs() + nf.sigma(y).abs() + nf.sigma(z).abs();
                if s == 0.0 {
                    continue;
                }
                out.r = out.r.max(nf.r(x, y, z).norm() / s);
            }
        }
    }
    out
}
