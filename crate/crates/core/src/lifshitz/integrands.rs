//! Dimensionless imaginary-axis integrands.
//!
//! With `q = QL`, `x = ξL/c` and `k = √(q² + x²) = κL`, each thermodynamic
//! quantity is a prefactor times a sum or integral over `x` of
//! `J(x) = ∫₀^∞ dq q h(q, x)`, where `h` is built from `Rμ e^{−2k}` with
//! `Rμ = r_{μ1} r_{μ2}`.

use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::kinematics::{FrequencyAxis, Polarization, Sector, SpectralPoint, SPEED_OF_LIGHT};
use crate::mirrors::{PassivityViolation, PASSIVITY_TOLERANCE};
use crate::quadrature::{integrate_to_infinity, Estimate, Tolerance};

use super::PlanarCavity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    /// `Σμ ln(1 − Rμ e^{−2k})`.
    Free,
    /// `d/dx [x · (free integrand)]` at fixed `q`.
    Entropy,
    /// `x · d/dx (free integrand)` at fixed `q`.
    Energy,
    /// `k Σμ Rμ e^{−2k}/(1 − Rμ e^{−2k})`.
    Pressure,
}

fn amplitude<S: Scalar>(cav: &PlanarCavity, which: usize, q: f64, xi: S, pol: Polarization) -> Result<S> {
    let mirror = if which == 0 { &cav.mirror1 } else { &cav.mirror2 };
    let r = mirror.reflection_imaginary(q, xi, pol)?;
    let v = r.value();
    if !(v.abs() <= 1.0 + PASSIVITY_TOLERANCE) {
        return Err(Error::Passivity(PassivityViolation {
            sector: Sector::Propagating,
            amplitude: num_complex::Complex64::new(v, 0.0),
            excess: v.abs() - 1.0,
            point: SpectralPoint::new(q, FrequencyAxis::Imaginary(xi.value()), pol).ok(),
        }));
    }
    Ok(r)
}

/// `Σμ ln(1 − Rμ e^{−2k})` and `k Σμ Rμe^{−2k}/(1 − Rμe^{−2k})` at one point.
fn point<S: Scalar>(cav: &PlanarCavity, q: f64, x: S) -> Result<(S, S)> {
    let l = cav.gap;
    let (q_si, xi_si) = (q / l, x * (SPEED_OF_LIGHT / l));
    let k = (x * x + q * q).sqrt();
    let decay = (k * -2.0).exp();
    let mut log_sum = S::constant(0.0);
    let mut force_sum = S::constant(0.0);
    for pol in Polarization::BOTH {
        let big_r = amplitude(cav, 0, q_si, xi_si, pol)? * amplitude(cav, 1, q_si, xi_si, pol)?;
        let y = big_r * decay;
        if !(y.value() < 1.0) {
            return Err(Error::Pole {
                context: "Matsubara integrand",
                location: format!("Q = {q_si:e} 1/m, xi = {:e} rad/s, {pol:?}: r1 r2 exp(-2 kappa L) = {}", xi_si.value(), y.value()),
            });
        }
        log_sum = log_sum + (-y).ln_1p();
        force_sum = force_sum + y / (-y + 1.0);
    }
    Ok((log_sum, k * force_sum))
}

pub(crate) fn integrand(cav: &PlanarCavity, kind: Kind, q: f64, x: f64) -> Result<f64> {
    if q == 0.0 {
        return Ok(0.0);
    }
    let v = match kind {
        Kind::Free => point(cav, q, x)?.0,
        Kind::Pressure => point(cav, q, x)?.1,
        Kind::Entropy | Kind::Energy => {
            let (f, _) = point(cav, q, Dual::variable(x))?;
            if kind == Kind::Entropy {
                f.re + x * f.eps
            } else {
                x * f.eps
            }
        }
    };
    Ok(q * v)
}

/// `∫_{k₀}^∞ kⁿ e^{−2k} dk / (1 − e^{−2k₀})` times two polarizations, for n = 1, 2.
fn moment_tail(k0: f64, n: u32) -> f64 {
    let e = (-2.0 * k0).exp();
    let poly = match n {
        1 => 0.5 * k0 + 0.25,
        _ => 0.5 * k0 * k0 + 0.5 * k0 + 0.25,
    };
    2.0 * poly * e / (-(-2.0 * k0).exp_m1())
}

/// Bound on `|∫_{q₀}^∞ dq q h(q, x)|` for passive mirrors (`|Rμ| ≤ 1`).
pub(crate) fn inner_tail(kind: Kind, q0: f64, x: f64) -> f64 {
    let k0 = q0.hypot(x);
    match kind {
        Kind::Free => moment_tail(k0, 1),
        Kind::Pressure => moment_tail(k0, 2),
        // The x-derivative brings down at most 2x·x/k from e^{−2k}, plus the
        // slow dispersion of R; a factor of four covers both in practice.
        Kind::Entropy | Kind::Energy => 4.0 * (1.0 + x) * moment_tail(k0, 2),
    }
}

/// `Σ_{n≥1} 1/n³`.
const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Bound on `|J(x)|` alone.
pub(crate) fn term_bound(kind: Kind, x: f64) -> f64 {
    // Both moments integrate to ζ(3)/2 at x = 0; |J| only shrinks with x.
    let cap = match kind {
        Kind::Free | Kind::Pressure => 0.5 * ZETA3,
        Kind::Entropy | Kind::Energy => 2.0 * (1.0 + x) * ZETA3,
    };
    inner_tail(kind, 0.0, x).min(cap)
}

/// Bound on `∫_X^∞ |J(x)| dx`.
pub(crate) fn outer_tail(kind: Kind, x0: f64) -> f64 {
    let e = (-2.0 * x0).exp();
    let den = -(-2.0 * x0).exp_m1();
    match kind {
        Kind::Free => (0.5 * x0 + 0.5) * e / den,
        Kind::Pressure => (0.5 * x0 * x0 + x0 + 0.75) * e / den,
        Kind::Entropy | Kind::Energy => 4.0 * (1.0 + x0) * (0.5 * x0 * x0 + x0 + 0.75) * e / den,
    }
}

/// `J(x) = ∫₀^∞ dq q h(q, x)`.
pub(crate) fn inner(cav: &PlanarCavity, kind: Kind, x: f64, rel: f64) -> Result<Estimate> {
    let scale = x.sqrt().max(1.0);
    integrate_to_infinity(
        |q| integrand(cav, kind, q, x),
        0.0,
        scale,
        |q0| inner_tail(kind, q0, x),
        Tolerance { rel, abs: 1e-6 * rel * term_bound(kind, x) },
    )
}
