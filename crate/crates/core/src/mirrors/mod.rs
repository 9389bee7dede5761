//! Reflection amplitudes of the cavity walls.
//!
//! The thermodynamics only ever sees the walls through `r_s` and `r_p`, so
//! this module is the single material input of the crate: a perfect mirror,
//! a local half-space, a layered stack, or amplitudes read from a table.

mod fresnel;
mod permittivity;
mod table;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

pub use fresnel::{reflect_halfspace, reflect_stack_real, Layer, Stack};
pub use permittivity::{ImaginaryResponse, PermittivityModel};
pub use table::{OutOfRange, PermittivityTail, ReflectionTable, TabulatedPermittivity};

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::kinematics::{normal_wavevector, FrequencyAxis, Polarization, Sector, SpectralPoint, UnitSystem, SPEED_OF_LIGHT};

/// Relative tolerance of [`passivity_check`].
pub const PASSIVITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MirrorModel {
    /// `r_s = −1`, `r_p = +1` everywhere.
    Perfect,
    HalfSpace(PermittivityModel),
    Stack(Stack),
    /// Imaginary-axis amplitudes read from a file.
    Tabulated(Arc<ReflectionTable>),
}

/// A passivity failure, with the offending point when known.
#[derive(Debug, Clone, PartialEq)]
pub struct PassivityViolation {
    pub sector: Sector,
    pub amplitude: Complex64,
    /// `|r| − 1` for propagating waves, `−Im r` for evanescent ones.
    pub excess: f64,
    pub point: Option<SpectralPoint>,
}

impl fmt::Display for PassivityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match self.sector {
            Sector::Propagating => "|r| <= 1",
            Sector::Evanescent => "Im r >= 0",
        };
        write!(f, "passivity violated ({rule}): r = {} exceeds the bound by {:e}", self.amplitude, self.excess)?;
        if let Some(p) = &self.point {
            let (axis, w) = match p.axis() {
                FrequencyAxis::Real(w) => ("omega", w),
                FrequencyAxis::Imaginary(xi) => ("xi", xi),
            };
            write!(f, " at Q = {:e}, {axis} = {w:e}, {:?}", p.q(), p.polarization())?;
        }
        Ok(())
    }
}

impl std::error::Error for PassivityViolation {}

/// Gain check: `|r| ≤ 1` for propagating waves, `Im r ≥ 0` for evanescent ones.
pub fn passivity_check(r: Complex64, sector: Sector) -> Result<(), PassivityViolation> {
    let excess = match sector {
        Sector::Propagating => r.norm() - 1.0,
        Sector::Evanescent => -r.im,
    };
    let allowed = match sector {
        Sector::Propagating => PASSIVITY_TOLERANCE,
        Sector::Evanescent => PASSIVITY_TOLERANCE * r.norm().max(1.0),
    };
    if excess > allowed || r.re.is_nan() || r.im.is_nan() {
        return Err(PassivityViolation { sector, amplitude: r, excess, point: None });
    }
    Ok(())
}

impl MirrorModel {
    /// Amplitude at `point`, whose coordinates are expressed in `units`.
    pub fn reflection(&self, point: &SpectralPoint, units: UnitSystem) -> Result<Complex64> {
        let si = units.point_to_si(point);
        let pol = si.polarization();
        match si.axis() {
            FrequencyAxis::Imaginary(xi) => Ok(Complex64::new(self.reflection_imaginary(si.q(), xi, pol)?, 0.0)),
            FrequencyAxis::Real(w) => match self {
                MirrorModel::Perfect => Ok(Complex64::new(perfect(pol), 0.0)),
                MirrorModel::HalfSpace(m) => {
                    let eps = m.permittivity(FrequencyAxis::Real(w))?;
                    fresnel::reflect_halfspace(&si, eps, UnitSystem::Si)
                }
                MirrorModel::Stack(s) => fresnel::reflect_stack_real(s, &si, UnitSystem::Si),
                MirrorModel::Tabulated(_) => Err(Error::RealAxisTable),
            },
        }
    }

    /// Imaginary-axis amplitude in SI units (`q` [rad/m], `xi` [rad/s]).
    pub fn reflection_imaginary<S: Scalar>(&self, q: f64, xi: S, pol: Polarization) -> Result<S> {
        match self {
            MirrorModel::Perfect => Ok(S::constant(perfect(pol))),
            MirrorModel::HalfSpace(m) => {
                let c2 = SPEED_OF_LIGHT * SPEED_OF_LIGHT;
                let kappa = (xi * xi / c2 + q * q).sqrt();
                let mut resp = m.imaginary_response(xi)?;
                resp.chi_xi2 = resp.chi_xi2 / c2;
                let r = fresnel::halfspace_imaginary(kappa, resp, pol);
                if !r.value().is_finite() {
                    return Err(Error::Pole { context: "half-space amplitude", location: format!("Q = {q:e}, xi = {:e}", xi.value()) });
                }
                Ok(r)
            }
            MirrorModel::Stack(s) => fresnel::reflect_stack_imaginary(s, q, xi, pol),
            MirrorModel::Tabulated(t) => t.amplitude(q, xi, pol),
        }
    }

    /// Evaluate and check passivity, attaching the point to any violation.
    pub fn checked_reflection(&self, point: &SpectralPoint, units: UnitSystem) -> Result<Complex64> {
        let r = self.reflection(point, units)?;
        let sector = match point.axis() {
            FrequencyAxis::Real(w) => normal_wavevector(point.q(), w, Complex64::new(1.0, 0.0), units)?.sector,
            // On the imaginary axis amplitudes are real and bounded by one.
            FrequencyAxis::Imaginary(_) => Sector::Propagating,
        };
        passivity_check(r, sector).map_err(|mut v| {
            v.point = Some(*point);
            Error::Passivity(v)
        })?;
        Ok(r)
    }
}

fn perfect(pol: Polarization) -> f64 {
    match pol {
        Polarization::S => -1.0,
        Polarization::P => 1.0,
    }
}
