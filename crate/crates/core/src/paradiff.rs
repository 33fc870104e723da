//! Dyadic paradifferential objects: the normal form correction `B_k`, the
//! primitive `Φ` with `Φ_x = φ/2`, and the gauged variable
//! `ψ_k⁺ = (P_k⁺φ + B_k) e^{-iΦ_{<k}}`.

use crate::error::{Error, Result};
use crate::grid::{
    frequency_envelope, lp_at_or_above, lp_below, lp_project_signed, ComplexField, DyadicIndex, Field, ProjectionMode,
    Sign,
};
use crate::symbols::hilbert_symbol;
use num_complex::Complex64;

type C64 = Complex64;

const MODE: ProjectionMode = ProjectionMode::Smooth;

fn check_shell(phi: &Field, k: DyadicIndex) -> Result<()> {
    let g = phi.grid();
    if k.k < g.k_min() || k.k > g.k_max() {
        return Err(Error::InvalidParameter(format!(
            "shell {} outside the lattice range [{}, {}]",
            k.k,
            g.k_min(),
            g.k_max()
        )));
    }
    if k.sign == Some(Sign::Minus) {
        return Err(Error::InvalidParameter("the gauge is built on positive frequencies".into()));
    }
    Ok(())
}

/// `∂ₓ⁻¹` on a band without zero mode.
fn antiderivative(f: &Field) -> Result<Field> {
    f.apply_multiplier(|xi| C64::new(0.0, -1.0 / xi), C64::new(0.0, 0.0))
}

fn hilbert(f: &ComplexField) -> ComplexField {
    f.apply_multiplier(hilbert_symbol, C64::new(0.0, 0.0)).expect("bounded symbol")
}

fn project_plus(f: &ComplexField, k: i32) -> ComplexField {
    lp_project_signed(f, DyadicIndex::plus(k), MODE)
}

fn times_real(a: &Field, b: &ComplexField) -> Result<ComplexField> {
    a.to_complex().dealiased_product(b)
}

/// The three terms of `B_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BkParts {
    /// `-½[P_k⁺H, ∂ₓ⁻¹φ_{<k}]φ`.
    pub commutator: ComplexField,
    /// `-¼P_k⁺(Hφ·∂ₓ⁻¹φ_{≥k})`.
    pub high_outer: ComplexField,
    /// `-¼P_k⁺H(φ·∂ₓ⁻¹φ_{≥k})`.
    pub high_inner: ComplexField,
}

impl BkParts {
    pub fn total(&self) -> ComplexField {
        self.commutator
            .add(&self.high_outer)
            .and_then(|s| s.add(&self.high_inner))
            .expect("same grid")
    }
}

pub fn nf_bk_parts(phi: &Field, k: DyadicIndex) -> Result<BkParts> {
    phi.check_mean_zero()?;
    check_shell(phi, k)?;
    let kk = k.k;
    let low = antiderivative(&lp_below(phi, kk, MODE))?;
    let high = antiderivative(&lp_at_or_above(phi, kk, MODE))?;
    let phic = phi.to_complex();
    let h_phi = hilbert(&phic);

    let low_phi = times_real(&low, &phic)?;
    let commutator = project_plus(&hilbert(&low_phi), kk)
        .sub(&times_real(&low, &project_plus(&h_phi, kk))?)?
        .scale(C64::new(-0.5, 0.0));
    let high_outer = project_plus(&times_real(&high, &h_phi)?, kk).scale(C64::new(-0.25, 0.0));
    let high_inner = project_plus(&hilbert(&times_real(&high, &phic)?), kk).scale(C64::new(-0.25, 0.0));
    Ok(BkParts { commutator, high_outer, high_inner })
}

/// Quadratic correction `B_k(φ, φ)` at the positive shell `k`.
pub fn nf_bk(phi: &Field, k: DyadicIndex) -> Result<ComplexField> {
    Ok(nf_bk_parts(phi, k)?.total())
}

/// Mean-zero primitive with `Φₓ = φ/2`.
pub fn primitive_phi(phi: &Field) -> Result<Field> {
    phi.check_mean_zero()?;
    Ok(antiderivative(phi)?.scale(0.5))
}

/// `Φ_{<k} = P_{<k}Φ`.
pub fn primitive_below(phi: &Field, k: i32) -> Result<Field> {
    Ok(lp_below(&primitive_phi(phi)?, k, MODE))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    /// `P_k⁺φ + B_k`.
    pub corrected: ComplexField,
    /// `ψ_k⁺`.
    pub psi: ComplexField,
    pub phase: Field,
}

pub fn gauge(phi: &Field, k: DyadicIndex) -> Result<Gauge> {
    let bk = nf_bk(phi, k)?;
    let corrected = project_plus(&phi.to_complex(), k.k).add(&bk)?;
    let phase = primitive_below(phi, k.k)?;
    let rot = ComplexField::new(
        *phi.grid(),
        phase.values().iter().map(|&p| C64::from_polar(1.0, -p)).collect(),
    )?;
    let psi = corrected.pointwise_mul(&rot)?;
    Ok(Gauge { corrected, psi, phase })
}

/// `ψ_k⁺ = (P_k⁺φ + B_k)e^{-iΦ_{<k}}`.
pub fn gauge_psi_k(phi: &Field, k: DyadicIndex) -> Result<ComplexField> {
    Ok(gauge(phi, k)?.psi)
}

/// `ψ_k⁺ - (φ_k⁺ + B_k - iΦ_{<k}φ_k⁺)`, cubic in the amplitude of `φ`.
pub fn gauge_expansion_defect(phi: &Field, k: DyadicIndex) -> Result<ComplexField> {
    let g = gauge(phi, k)?;
    let phik = project_plus(&phi.to_complex(), k.k);
    let rotated = g.phase.to_complex().pointwise_mul(&phik)?.scale(C64::new(0.0, -1.0));
    let bk = g.corrected.sub(&phik)?;
    let expansion = phik.add(&bk)?.add(&rotated)?;
    g.psi.sub(&expansion)
}

/// Measured constants of the paradifferential objects for one datum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellDiagnostics {
    pub k: i32,
    /// `‖B_k‖ / (‖φ‖‖φ‖_∞)`.
    pub bk_constant: f64,
    /// `‖commutator‖ / (2^{-k}‖∂ₓφ_{<k}‖_∞‖φ_k‖)`.
    pub commutator_gain: f64,
    /// `|‖ψ_k⁺‖ - ‖P_k⁺φ + B_k‖|`.
    pub gauge_defect: f64,
    pub psi_norm: f64,
}

pub fn shell_diagnostics(phi: &Field, k: i32) -> Result<ShellDiagnostics> {
    let d = DyadicIndex::plus(k);
    let parts = nf_bk_parts(phi, d)?;
    let g = gauge(phi, d)?;
    let bk = parts.total();
    let dlow = lp_below(phi, k, MODE).derivative(1).sup_norm();
    let phik = lp_project_signed(&phi.to_complex(), DyadicIndex::new(k), MODE).l2_norm();
    let denom = 2f64.powi(-k) * dlow * phik;
    Ok(ShellDiagnostics {
        k,
        bk_constant: bk.l2_norm() / (phi.l2_norm() * phi.sup_norm()),
        commutator_gain: if denom > 0.0 { parts.commutator.l2_norm() / denom } else { 0.0 },
        gauge_defect: (g.psi.l2_norm() - g.corrected.l2_norm()).abs(),
        psi_norm: g.psi.l2_norm(),
    })
}

/// `max_k ‖ψ_k⁺‖ / c_k` over `ks`, with `c_k` the frequency envelope of `φ`.
pub fn envelope_transfer(phi: &Field, ks: &[i32], slack: f64) -> Result<f64> {
    let env = frequency_envelope(phi, slack)?;
    let mut c: f64 = 0.0;
    for &k in ks {
        let ck = env.get(k).unwrap_or(0.0);
        let psi = gauge_psi_k(phi, DyadicIndex::plus(k))?.l2_norm();
        if ck > 0.0 {
            c = c.max(psi / ck);
        }
    }
    Ok(c)
}
