//! Fresnel amplitudes for half-spaces and layered stacks.
//!
//! Real-axis amplitudes use complex arithmetic with the kinematics branch
//! rule. On the imaginary axis every normal wavevector is `iκ` with real
//! `κ > 0`, so the same formulas collapse to real arithmetic; those paths
//! are generic over [`Scalar`] so that `d/dξ` is available.

use num_complex::Complex64;

use super::permittivity::{ImaginaryResponse, PermittivityModel};
use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::kinematics::{normal_wavevector, Polarization, SpectralPoint, FrequencyAxis, UnitSystem};

/// One finite layer of a stack.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub medium: PermittivityModel,
    /// Thickness [m].
    pub thickness: f64,
}

/// Layers listed from the cavity side outwards, then a substrate
/// (`None` means the stack ends in vacuum).
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    pub layers: Vec<Layer>,
    pub substrate: Option<PermittivityModel>,
}

impl Stack {
    pub fn new(layers: Vec<Layer>, substrate: Option<PermittivityModel>) -> Result<Self> {
        for (i, l) in layers.iter().enumerate() {
            if !(l.thickness > 0.0) || !l.thickness.is_finite() {
                return Err(Error::invalid(format!("layer {i} thickness must be positive, got {}", l.thickness)));
            }
        }
        Ok(Self { layers, substrate })
    }
}

fn checked_ratio(num: Complex64, den: Complex64, context: &'static str, point: &SpectralPoint) -> Result<Complex64> {
    if den.norm() == 0.0 || !den.norm().is_finite() {
        return Err(Error::Pole { context, location: format!("{point:?}") });
    }
    Ok(num / den)
}

/// Interface amplitude for a wave in medium `a` hitting medium `b`.
fn interface_real(ka: Complex64, ea: Complex64, kb: Complex64, eb: Complex64, pol: Polarization, point: &SpectralPoint) -> Result<Complex64> {
    match pol {
        Polarization::S => checked_ratio(ka - kb, ka + kb, "s-polarized Fresnel amplitude", point),
        Polarization::P => checked_ratio(eb * ka - ea * kb, eb * ka + ea * kb, "p-polarized Fresnel amplitude", point),
    }
}

/// Vacuum/half-space Fresnel amplitude on the real axis:
/// `r_s = (k_v − k_m)/(k_v + k_m)`, `r_p = (ε k_v − k_m)/(ε k_v + k_m)`.
pub fn reflect_halfspace(point: &SpectralPoint, eps: Complex64, units: UnitSystem) -> Result<Complex64> {
    match point.axis() {
        FrequencyAxis::Real(w) => {
            let one = Complex64::new(1.0, 0.0);
            let kv = normal_wavevector(point.q(), w, one, units)?.value;
            let km = normal_wavevector(point.q(), w, eps, units)?.value;
            interface_real(kv, one, km, eps, point.polarization(), point)
        }
        FrequencyAxis::Imaginary(xi) => {
            if eps.im != 0.0 {
                return Err(Error::invalid("imaginary-axis Fresnel amplitudes need a real permittivity"));
            }
            let c = units.c();
            let response = ImaginaryResponse { eps_inv: 1.0 / eps.re, chi_xi2: xi * xi * (eps.re - 1.0) / (c * c) };
            let kappa = crate::kinematics::imaginary_axis_kappa(point.q(), xi, units)?;
            Ok(Complex64::new(halfspace_imaginary(kappa, response, point.polarization()), 0.0))
        }
    }
}

/// Half-space amplitude at `ω = iξ` given vacuum `κ` and the medium response
/// with `chi_xi2` already divided by `c²`.
pub(crate) fn halfspace_imaginary<S: Scalar>(kappa: S, medium: ImaginaryResponse<S>, pol: Polarization) -> S {
    let km = (kappa * kappa + medium.chi_xi2).sqrt();
    match pol {
        // κ − κ_m written without cancellation.
        Polarization::S => -medium.chi_xi2 / ((kappa + km) * (kappa + km)),
        Polarization::P => {
            let km_eff = km * medium.eps_inv;
            (kappa - km_eff) / (kappa + km_eff)
        }
    }
}

fn interface_imaginary<S: Scalar>(ka: S, ea_inv: S, kb: S, eb_inv: S, pol: Polarization) -> S {
    match pol {
        Polarization::S => (ka - kb) / (ka + kb),
        Polarization::P => (ka * ea_inv - kb * eb_inv) / (ka * ea_inv + kb * eb_inv),
    }
}

fn combine<S: Scalar>(r_top: S, r_below: S, phase: S) -> S {
    let rp = r_below * phase;
    (r_top + rp) / (r_top * rp + 1.0)
}

/// Stack amplitude on the real axis, combining interfaces innermost-out with
/// `r = (r_top + r_below e^{2ikd})/(1 + r_top r_below e^{2ikd})`.
pub fn reflect_stack_real(stack: &Stack, point: &SpectralPoint, units: UnitSystem) -> Result<Complex64> {
    let FrequencyAxis::Real(w) = point.axis() else {
        return Err(Error::invalid("reflect_stack_real needs a real-axis point"));
    };
    let pol = point.polarization();
    let q = point.q();
    let omega_si = units.frequency_to_si(w);
    let medium = |m: &PermittivityModel| -> Result<(Complex64, Complex64)> {
        let eps = m.permittivity(FrequencyAxis::Real(omega_si))?;
        Ok((normal_wavevector(q, w, eps, units)?.value, eps))
    };
    let one = Complex64::new(1.0, 0.0);
    let vacuum = (normal_wavevector(q, w, one, units)?.value, one);
    let mut media = Vec::with_capacity(stack.layers.len() + 2);
    media.push(vacuum);
    for l in &stack.layers {
        media.push(medium(&l.medium)?);
    }
    media.push(match &stack.substrate {
        Some(m) => medium(m)?,
        None => vacuum,
    });
    let n = media.len();
    let (ka, ea) = media[n - 2];
    let (kb, eb) = media[n - 1];
    let mut r = interface_real(ka, ea, kb, eb, pol, point)?;
    for j in (0..stack.layers.len()).rev() {
        let (ka, ea) = media[j];
        let (kb, eb) = media[j + 1];
        let r_top = interface_real(ka, ea, kb, eb, pol, point)?;
        let d = units.length_from_si(stack.layers[j].thickness);
        let phase = (Complex64::new(0.0, 2.0) * kb * d).exp();
        let den = one + r_top * r * phase;
        r = checked_ratio(r_top + r * phase, den, "stack recursion", point)?;
    }
    Ok(r)
}

/// Stack amplitude on the imaginary axis. `q` in rad/m, `xi` in rad/s.
pub(crate) fn reflect_stack_imaginary<S: Scalar>(stack: &Stack, q: f64, xi: S, pol: Polarization) -> Result<S> {
    let c2 = crate::kinematics::SPEED_OF_LIGHT * crate::kinematics::SPEED_OF_LIGHT;
    let kappa = (xi * xi / c2 + q * q).sqrt();
    let medium = |m: &PermittivityModel| -> Result<(S, S)> {
        let r = m.imaginary_response(xi)?;
        Ok(((kappa * kappa + r.chi_xi2 / c2).sqrt(), r.eps_inv))
    };
    let vacuum = (kappa, S::constant(1.0));
    let mut media = Vec::with_capacity(stack.layers.len() + 2);
    media.push(vacuum);
    for l in &stack.layers {
        media.push(medium(&l.medium)?);
    }
    media.push(match &stack.substrate {
        Some(m) => medium(m)?,
        None => vacuum,
    });
    let n = media.len();
    let (ka, ea) = media[n - 2];
    let (kb, eb) = media[n - 1];
    let mut r = interface_imaginary(ka, ea, kb, eb, pol);
    for j in (0..stack.layers.len()).rev() {
        let (ka, ea) = media[j];
        let (kb, eb) = media[j + 1];
        let r_top = interface_imaginary(ka, ea, kb, eb, pol);
        let phase = (kb * (-2.0 * stack.layers[j].thickness)).exp();
        r = combine(r_top, r, phase);
    }
    if !r.value().is_finite() {
        return Err(Error::Pole { context: "imaginary-axis stack recursion", location: format!("Q = {q:e}, xi = {:e}", xi.value()) });
    }
    Ok(r)
}
