//! Scalar Fourier symbols of the ILW dispersion and its relatives.
//!
//! Conventions: `f̂(ξ) = ∫ e^{-ixξ} f(x) dx`, so `∂x ↔ iξ`. The dispersion is
//! `a(ξ) = ξ² coth(δξ)` and `A(ξ) = a(ξ) - ξ/δ` is the same relation with the
//! transport term `u_x/δ` removed. Both are odd.
//!
//! Near the origin both are evaluated from the Taylor series of `y coth y`,
//! whose coefficients are `β_n = 2^{2n} B_{2n} / (2n)!`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Below this `|δξ|` the series of `y coth y` is used for `a` and `a'`.
pub const SERIES_SWITCH: f64 = 1e-2;

/// Below this `|δξ|` the series is used for `A` and its derivatives. `A` loses
/// relative precision to cancellation much earlier than `a` does.
pub const SERIES_SWITCH_TRANSPORT: f64 = 0.5;

/// Lines `ξ = 0`, `η = 0`, `ξ + η = 0` are treated by Taylor expansion inside
/// this distance.
pub const LINE_BAND: f64 = 1e-3;

const N_SERIES: usize = 14;

/// Taylor coefficients of `y coth y = Σ β_n y^{2n}`.
pub fn xcoth_coefficients() -> &'static [f64; N_SERIES] {
    static COEFFS: OnceLock<[f64; N_SERIES]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        // y cosh y / sinh y: divide Σ y^{2k}/(2k)! by Σ y^{2k}/(2k+1)!.
        let mut fact = [1.0f64; 2 * N_SERIES + 2];
        for k in 1..fact.len() {
            fact[k] = fact[k - 1] * k as f64;
        }
        let mut beta = [0.0; N_SERIES];
        for n in 0..N_SERIES {
            let mut acc = 1.0 / fact[2 * n];
            for k in 0..n {
                acc -= beta[k] / fact[2 * (n - k) + 1];
            }
            beta[n] = acc;
        }
        beta
    })
}

/// `coth y`, infinite at zero.
pub fn coth(y: f64) -> f64 {
    if y == 0.0 {
        return f64::INFINITY;
    }
    let s = y.signum();
    s * (1.0 + 2.0 / (2.0 * y.abs()).exp_m1())
}

/// `y coth y`, equal to 1 at the origin.
pub fn xcoth(y: f64) -> f64 {
    let ay = y.abs();
    if ay < SERIES_SWITCH {
        let y2 = y * y;
        let b = xcoth_coefficients();
        1.0 + y2 * (b[1] + y2 * (b[2] + y2 * b[3]))
    } else {
        ay * coth(ay)
    }
}

/// `σ(ξ) = tanh(δξ)`.
pub fn sigma(xi: f64, delta: f64) -> f64 {
    (delta * xi).tanh()
}

/// `tanh(δx)/x`, equal to `δ` at the origin.
pub fn tanh_quotient(x: f64, delta: f64) -> f64 {
    let y = delta * x;
    if y.abs() < 1e-4 {
        delta * (1.0 - y * y / 3.0)
    } else {
        y.tanh() / x
    }
}

/// ILW dispersion `a(ξ) = ξ² coth(δξ)`.
pub fn dispersion_a(xi: f64, delta: f64) -> f64 {
    xi / delta * xcoth(delta * xi)
}

/// Sum `Σ_{n≥1} w_n β_n y^{2n}` with weights `w_n`.
fn weighted_tail(y: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let b = xcoth_coefficients();
    let y2 = y * y;
    let mut acc = 0.0;
    for n in (1..N_SERIES).rev() {
        acc = acc * y2 + weight(n) * b[n];
    }
    acc * y2
}

/// Transport-removed dispersion `A(ξ) = ξ² coth(δξ) - ξ/δ`.
pub fn dispersion_big_a(xi: f64, delta: f64) -> f64 {
    let y = delta * xi;
    if y.abs() < SERIES_SWITCH_TRANSPORT {
        xi / delta * weighted_tail(y, |_| 1.0)
    } else {
        xi / delta * (xcoth(y) - 1.0)
    }
}

/// Group velocity symbol `a'(ξ) = 2ξ coth(δξ) - δξ²/sinh²(δξ)`.
pub fn group_velocity(xi: f64, delta: f64) -> f64 {
    let y = (delta * xi).abs();
    if y < SERIES_SWITCH {
        (1.0 + weighted_tail(y, |n| (2 * n + 1) as f64)) / delta
    } else {
        let sh = y.sinh();
        (2.0 * y * coth(y) - y * y / (sh * sh)) / delta
    }
}

/// `A'(ξ) = a'(ξ) - 1/δ`.
pub fn group_velocity_big_a(xi: f64, delta: f64) -> f64 {
    let y = (delta * xi).abs();
    if y < SERIES_SWITCH_TRANSPORT {
        weighted_tail(y, |n| (2 * n + 1) as f64) / delta
    } else {
        group_velocity(xi, delta) - 1.0 / delta
    }
}

/// Derivatives `A^{(k)}(ξ)` for `k = 0..=6`.
pub fn big_a_derivatives(xi: f64, delta: f64) -> [f64; 7] {
    let y = delta * xi;
    let mut out = [0.0; 7];
    if y.abs() < SERIES_SWITCH_TRANSPORT {
        // A = δ^{-2} Σ β_n y^{2n+1}, differentiate term by term.
        let b = xcoth_coefficients();
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for n in 1..N_SERIES {
                let p = 2 * n + 1;
                if p < k {
                    continue;
                }
                let mut falling = 1.0;
                for j in 0..k {
                    falling *= (p - j) as f64;
                }
                acc += b[n] * falling * y.powi((p - k) as i32);
            }
            *slot = acc * delta.powi(k as i32 - 2);
        }
        return out;
    }
    // coth^{(k)}(δξ) = δ^k P_k(c), P_{k+1}(c) = P_k'(c)(1 - c²).
    let c = coth(y);
    let mut poly: Vec<f64> = vec![0.0, 1.0];
    let mut cd = [0.0; 7];
    for (k, slot) in cd.iter_mut().enumerate() {
        let val = poly.iter().rev().fold(0.0, |acc, &p| acc * c + p);
        *slot = val * delta.powi(k as i32);
        let mut deriv = vec![0.0; poly.len().max(2) - 1];
        for (j, &p) in poly.iter().enumerate().skip(1) {
            deriv[j - 1] = j as f64 * p;
        }
        let mut next = vec![0.0; deriv.len() + 2];
        for (j, &d) in deriv.iter().enumerate() {
            next[j] += d;
            next[j + 2] -= d;
        }
        poly = next;
    }
    for (n, slot) in out.iter_mut().enumerate() {
        let mut v = xi * xi * cd[n];
        if n >= 1 {
            v += 2.0 * n as f64 * xi * cd[n - 1];
        }
        if n >= 2 {
            v += (n * (n - 1)) as f64 * cd[n - 2];
        }
        *slot = v;
    }
    out[0] -= xi / delta;
    out[1] -= 1.0 / delta;
    out
}

/// Hilbert transform symbol `i sgn ξ`.
pub fn hilbert_symbol(xi: f64) -> Complex64 {
    Complex64::new(0.0, sgn(xi))
}

/// Symbol of `T⁻¹`: `i coth(δξ)`, taken as 0 at `ξ = 0`.
pub fn tilbert_inverse_symbol(xi: f64, delta: f64) -> Complex64 {
    if xi == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, coth(delta * xi))
    }
}

/// Symbol of `T`: `-i tanh(δξ)`.
pub fn tilbert_symbol(xi: f64, delta: f64) -> Complex64 {
    Complex64::new(0.0, -sigma(xi, delta))
}

/// Symbol of the smoothing operator `𝒫 = H - T⁻¹`: `i(sgn ξ - coth δξ)`, 0 at the origin.
pub fn smoothing_symbol(xi: f64, delta: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let y = (delta * xi).abs();
    // sgn - coth = -2 sgn / expm1(2|y|)
    Complex64::new(0.0, -2.0 * sgn(xi) / (2.0 * y).exp_m1())
}

/// Symbol of `𝒫 ∂x`: `ξ coth(δξ) - |ξ|`, equal to `1/δ` at the origin.
pub fn smoothing_dx_symbol(xi: f64, delta: f64) -> f64 {
    let y = (delta * xi).abs();
    if y == 0.0 {
        return 1.0 / delta;
    }
    2.0 * xi.abs() / (2.0 * y).exp_m1()
}

pub(crate) fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Resonance function `Ω(ξ,η) = a(ξ+η) - a(ξ) - a(η)`.
///
/// It vanishes on the three lines `ξη(ξ+η) = 0`; the value is returned as
/// `ξη(ξ+η) W(ξ,η)` with `W` from [`resonance_weight`], which keeps full
/// relative precision near the lines.
pub fn resonance_omega(xi: f64, eta: f64, delta: f64) -> f64 {
    xi * eta * (xi + eta) * resonance_weight(xi, eta, delta)
}

/// `W(ξ,η) = Ω(ξ,η) / (ξη(ξ+η))`, smooth and positive.
pub fn resonance_weight(xi: f64, eta: f64, delta: f64) -> f64 {
    cubic_quotient(xi, eta, delta, Kind::Omega)
}

/// `N₁(ξ,η) / (ξη(ξ+η))` where `N₁ = (ξ+η)a'(ξ+η) - ξa'(ξ) - ηa'(η)`.
pub fn weighted_resonance_weight(xi: f64, eta: f64, delta: f64) -> f64 {
    cubic_quotient(xi, eta, delta, Kind::N1)
}

#[derive(Clone, Copy)]
enum Kind {
    Omega,
    N1,
}

/// Origin radius for the power-sum series.
fn origin_radius(delta: f64) -> f64 {
    SERIES_SWITCH_TRANSPORT / delta
}

fn cubic_quotient(xi: f64, eta: f64, delta: f64, kind: Kind) -> f64 {
    let zeta = xi + eta;
    let big = xi.abs().max(eta.abs()).max(zeta.abs());
    if big < origin_radius(delta) {
        return origin_series(xi, eta, delta, kind);
    }
    let small = xi.abs().min(eta.abs()).min(zeta.abs());
    if small >= LINE_BAND {
        let f = |x: f64| match kind {
            Kind::Omega => dispersion_big_a(x, delta),
            Kind::N1 => x * group_velocity_big_a(x, delta),
        };
        return (f(zeta) - f(xi) - f(eta)) / (xi * eta * zeta);
    }
    if eta.abs() == small {
        line_quotient(xi, eta, delta, kind) / (xi * zeta)
    } else if xi.abs() == small {
        line_quotient(eta, xi, delta, kind) / (eta * zeta)
    } else {
        // F(ξ+η) - F(ξ) - F(η) = -[F(s-η) - F(-η) - F(s)] with s = ξ+η, F odd.
        -line_quotient(-eta, zeta, delta, kind) / (xi * eta)
    }
}

/// `[F(p+s) - F(p) - F(s)] / s` by Taylor expansion in `s`.
fn line_quotient(p: f64, s: f64, delta: f64, kind: Kind) -> f64 {
    let dp = big_a_derivatives(p, delta);
    let d0 = big_a_derivatives(0.0, delta);
    let deriv = |d: &[f64; 7], x: f64, n: usize| -> f64 {
        match kind {
            Kind::Omega => d[n],
            // g = x A'(x): g^{(n)} = n A^{(n)} + x A^{(n+1)}
            Kind::N1 => n as f64 * d[n] + x * d[n + 1],
        }
    };
    let mut acc = 0.0;
    let mut pow = 1.0;
    let mut fact = 1.0;
    for n in 1..=5 {
        fact *= n as f64;
        acc += pow / fact * (deriv(&dp, p, n) - deriv(&d0, 0.0, n));
        pow *= s;
    }
    acc
}

fn origin_series(xi: f64, eta: f64, delta: f64, kind: Kind) -> f64 {
    // Power sums p_m of (ξ, η, -ξ-η): p_m = -e2 p_{m-2} + e3 p_{m-3}.
    // O_m = p_m / e3 = -e2 O_{m-2} + p_{m-3}.
    let e2 = -(xi * xi + xi * eta + eta * eta);
    let e3 = -xi * eta * (xi + eta);
    let b = xcoth_coefficients();
    let m_max = 2 * N_SERIES + 1;
    let mut p = vec![0.0; m_max + 1];
    let mut o = vec![0.0; m_max + 1];
    p[0] = 3.0;
    p[2] = -2.0 * e2;
    o[1] = 0.0;
    for m in 3..=m_max {
        p[m] = -e2 * p[m - 2] + e3 * p[m - 3];
        o[m] = -e2 * o[m - 2] + p[m - 3];
    }
    let mut acc = 0.0;
    let mut dpow = delta;
    for n in 1..N_SERIES {
        let w = match kind {
            Kind::Omega => 1.0,
            Kind::N1 => (2 * n + 1) as f64,
        };
        acc += w * b[n] * dpow * o[2 * n + 1];
        dpow *= delta * delta;
    }
    acc
}

/// `M(ξ,η) = (A'(η) - A'(ξ)) / (η² - ξ²)`, smooth and even in each variable.
pub fn group_velocity_quotient(xi: f64, eta: f64, delta: f64) -> f64 {
    let p = xi.abs();
    let q = eta.abs();
    if p.max(q) < origin_radius(delta) {
        // A'(x) = Σ (2n+1) β_n δ^{2n-1} x^{2n}; (v^n - u^n)/(v - u) = h_{n-1}(u, v).
        let (u, v) = (p * p, q * q);
        let b = xcoth_coefficients();
        let mut acc = 0.0;
        let mut dpow = delta;
        let mut h = 1.0;
        let mut upow = 1.0;
        for n in 1..N_SERIES {
            if n > 1 {
                upow *= u;
                h = h * v + upow;
            }
            acc += (2 * n + 1) as f64 * b[n] * dpow * h;
            dpow *= delta * delta;
        }
        return acc;
    }
    let d = q - p;
    if d.abs() < LINE_BAND {
        let m = 0.5 * (p + q);
        let der = big_a_derivatives(m, delta);
        let slope = der[2] + d * d / 24.0 * der[4] + d.powi(4) / 1920.0 * der[6];
        return slope / (2.0 * m);
    }
    (group_velocity_big_a(q, delta) - group_velocity_big_a(p, delta)) / (q * q - p * p)
}

/// A frequency, or a frequency pair with `ζ = -ξ-η`, at depth `δ ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolPoint {
    pub xi: f64,
    pub eta: Option<f64>,
    pub delta: f64,
}

impl SymbolPoint {
    pub fn new(xi: f64, delta: f64) -> Result<Self> {
        if !(delta >= 1.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("depth must satisfy delta >= 1, got {delta}")));
        }
        if !xi.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite frequency {xi}")));
        }
        Ok(Self { xi, eta: None, delta })
    }

    pub fn pair(xi: f64, eta: f64, delta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite frequency {eta}")));
        }
        Ok(Self { eta: Some(eta), ..Self::new(xi, delta)? })
    }

    /// `ζ = -ξ-η`, so the three frequencies sum to zero exactly.
    pub fn zeta(&self) -> Option<f64> {
        self.eta.map(|e| -self.xi - e)
    }

    pub fn dispersion_a(&self) -> f64 {
        dispersion_a(self.xi, self.delta)
    }

    #[allow(non_snake_case)]
    pub fn dispersion_A(&self) -> f64 {
        dispersion_big_a(self.xi, self.delta)
    }

    pub fn group_velocity(&self) -> f64 {
        group_velocity(self.xi, self.delta)
    }

    /// `i(sgn ξ - coth δξ)`; singular at `ξ = 0`.
    pub fn smoothing_p(&self) -> Result<Complex64> {
        if self.xi == 0.0 {
            return Err(Error::UndefinedMultiplier { xi: 0.0 });
        }
        Ok(smoothing_symbol(self.xi, self.delta))
    }

    pub fn sigma_tanh(&self) -> f64 {
        sigma(self.xi, self.delta)
    }

    /// `Ω(ξ,η)`; needs a pair.
    pub fn resonance_omega2(&self) -> Result<f64> {
        let eta = self
            .eta
            .ok_or_else(|| Error::InvalidParameter("resonance needs a frequency pair".into()))?;
        Ok(resonance_omega(self.xi, eta, self.delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_match_bernoulli() {
        let b = xcoth_coefficients();
        let known = [1.0, 1.0 / 3.0, -1.0 / 45.0, 2.0 / 945.0, -1.0 / 4725.0, 2.0 / 93555.0];
        for (k, v) in known.iter().enumerate() {
            assert!((b[k] - v).abs() < 1e-15 * v.abs().max(1e-3), "beta_{k}");
        }
    }

    #[test]
    fn series_and_closed_forms_agree_at_switch() {
        for &delta in &[0.3, 1.0, 2.5] {
            for &y in &[0.49, 0.51, 0.0099, 0.0101] {
                let xi = y / delta;
                let direct = xi * xi * coth(delta * xi) - xi / delta;
                let a = dispersion_big_a(xi, delta);
                assert!((a - direct).abs() < 1e-12 * a.abs().max(1e-300) + 1e-15, "{delta} {y}");
            }
        }
    }

    #[test]
    fn derivative_array_matches_finite_differences() {
        for &delta in &[0.5, 1.0, 2.0] {
            for &xi in &[0.1, 0.4, 0.7, 1.3, -2.2, 5.0] {
                let d = big_a_derivatives(xi, delta);
                let h = 1e-3;
                for k in 0..6 {
                    let dp = big_a_derivatives(xi + h, delta)[k];
                    let dm = big_a_derivatives(xi - h, delta)[k];
                    let fd = (dp - dm) / (2.0 * h);
                    assert!((fd - d[k + 1]).abs() < 1e-4 * (1.0 + d[k + 1].abs()), "k={k} xi={xi}");
                }
            }
        }
    }

    #[test]
    fn origin_derivatives() {
        let d = big_a_derivatives(0.0, 1.7);
        assert!((d[3] - 2.0 * 1.7).abs() < 1e-14);
        assert!((d[5] + 8.0 / 3.0 * 1.7f64.powi(3)).abs() < 1e-12);
        assert_eq!(d[1], 0.0);
    }
}
