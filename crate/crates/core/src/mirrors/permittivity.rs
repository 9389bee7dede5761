use std::sync::Arc;

use num_complex::Complex64;

use super::table::TabulatedPermittivity;
use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::kinematics::FrequencyAxis;

/// Dielectric function of a local, isotropic medium. Frequencies are SI [rad/s].
#[derive(Debug, Clone, PartialEq)]
pub enum PermittivityModel {
    Constant(Complex64),
    Drude { plasma: f64, damping: f64 },
    Plasma { plasma: f64 },
    Tabulated(Arc<TabulatedPermittivity>),
}

/// Imaginary-axis response in the form the reflection formulas need.
///
/// `eps_inv = 1/ε(iξ)` and `chi_xi2 = ξ²(ε(iξ) − 1)` stay finite at `ξ = 0`
/// for conductors, where `ε` itself diverges.
#[derive(Debug, Clone, Copy)]
pub struct ImaginaryResponse<S> {
    pub eps_inv: S,
    pub chi_xi2: S,
}

impl PermittivityModel {
    pub fn drude(plasma: f64, damping: f64) -> Result<Self> {
        if !(plasma > 0.0) || !(damping >= 0.0) {
            return Err(Error::invalid(format!("Drude needs plasma > 0 and damping >= 0, got {plasma}, {damping}")));
        }
        Ok(PermittivityModel::Drude { plasma, damping })
    }

    pub fn plasma(plasma: f64) -> Result<Self> {
        if !(plasma > 0.0) {
            return Err(Error::invalid(format!("plasma frequency must be positive, got {plasma}")));
        }
        Ok(PermittivityModel::Plasma { plasma })
    }

    /// `ε` on either axis. Imaginary-axis values are real.
    pub fn permittivity(&self, axis: FrequencyAxis) -> Result<Complex64> {
        match axis {
            FrequencyAxis::Real(w) => self.permittivity_real(w),
            FrequencyAxis::Imaginary(xi) => {
                if xi == 0.0 && !matches!(self, PermittivityModel::Constant(_)) {
                    return Err(Error::Pole { context: "permittivity", location: "xi = 0".into() });
                }
                let r = self.imaginary_response(xi)?;
                Ok(Complex64::new(1.0 / r.eps_inv, 0.0))
            }
        }
    }

    fn permittivity_real(&self, w: f64) -> Result<Complex64> {
        match self {
            PermittivityModel::Constant(eps) => Ok(*eps),
            PermittivityModel::Drude { plasma, damping } => {
                if w == 0.0 {
                    return Err(Error::Pole { context: "Drude permittivity", location: "omega = 0".into() });
                }
                Ok(Complex64::new(1.0, 0.0) - plasma * plasma / (w * Complex64::new(w, *damping)))
            }
            PermittivityModel::Plasma { plasma } => {
                if w == 0.0 {
                    return Err(Error::Pole { context: "plasma permittivity", location: "omega = 0".into() });
                }
                Ok(Complex64::new(1.0 - plasma * plasma / (w * w), 0.0))
            }
            PermittivityModel::Tabulated(_) => Err(Error::RealAxisTable),
        }
    }

    /// Response at `ω = iξ`, generic so that `d/dξ` comes along with [`crate::dual::Dual`].
    pub fn imaginary_response<S: Scalar>(&self, xi: S) -> Result<ImaginaryResponse<S>> {
        match self {
            PermittivityModel::Constant(eps) => {
                if eps.im != 0.0 {
                    return Err(Error::invalid(
                        "a constant permittivity must be real to be continued to the imaginary axis",
                    ));
                }
                Ok(ImaginaryResponse { eps_inv: S::constant(1.0 / eps.re), chi_xi2: xi * xi * (eps.re - 1.0) })
            }
            PermittivityModel::Drude { plasma, damping } => {
                let wp2 = plasma * plasma;
                if *damping == 0.0 {
                    return Ok(plasma_response(xi, wp2));
                }
                let d = xi * (xi + *damping);
                Ok(ImaginaryResponse { eps_inv: d / (d + wp2), chi_xi2: xi * wp2 / (xi + *damping) })
            }
            PermittivityModel::Plasma { plasma } => Ok(plasma_response(xi, plasma * plasma)),
            PermittivityModel::Tabulated(table) => table.imaginary_response(xi),
        }
    }
}

fn plasma_response<S: Scalar>(xi: S, wp2: f64) -> ImaginaryResponse<S> {
    let x2 = xi * xi;
    ImaginaryResponse { eps_inv: x2 / (x2 + wp2), chi_xi2: S::constant(wp2) }
}
