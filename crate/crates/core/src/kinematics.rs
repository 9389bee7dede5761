//! Constants, unit conventions and the normal-wavevector branch rule.
//!
//! Every spectral quantity in the crate is indexed by a parallel wavevector
//! `Q`, a frequency on either the real or the imaginary axis, and a
//! polarization. The normal component of the wavevector is always taken on
//! the branch with non-negative imaginary part, so that fields decay away
//! from the surface that emits them.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant [J/K].
pub const BOLTZMANN: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    S,
    P,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::S, Polarization::P];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyAxis {
    /// Real frequency `ω` [rad/s or c/L].
    Real(f64),
    /// Imaginary frequency `ω = iξ`; holds `ξ`.
    Imaginary(f64),
}

impl FrequencyAxis {
    pub fn magnitude(self) -> f64 {
        match self {
            FrequencyAxis::Real(w) | FrequencyAxis::Imaginary(w) => w,
        }
    }
}

/// The `(Q, ω, μ)` triple every reflection amplitude and integrand is indexed by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    q: f64,
    axis: FrequencyAxis,
    polarization: Polarization,
}

impl SpectralPoint {
    pub fn new(q: f64, axis: FrequencyAxis, polarization: Polarization) -> Result<Self> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::invalid(format!("parallel wavevector must be finite and >= 0, got {q}")));
        }
        let w = axis.magnitude();
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::invalid(format!("frequency must be finite and >= 0, got {w}")));
        }
        Ok(Self { q, axis, polarization })
    }

    pub fn real(q: f64, omega: f64, polarization: Polarization) -> Result<Self> {
        Self::new(q, FrequencyAxis::Real(omega), polarization)
    }

    pub fn imaginary(q: f64, xi: f64, polarization: Polarization) -> Result<Self> {
        Self::new(q, FrequencyAxis::Imaginary(xi), polarization)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn axis(&self) -> FrequencyAxis {
        self.axis
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn with_polarization(self, polarization: Polarization) -> Self {
        Self { polarization, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Propagating,
    Evanescent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalWavevector {
    pub value: Complex64,
    pub sector: Sector,
}

impl NormalWavevector {
    /// `κ` for an evanescent wave written as `k = iκ`.
    pub fn kappa(&self) -> f64 {
        self.value.im
    }
}

/// Unit convention for frequencies and lengths.
///
/// `Natural` measures lengths in units of the gap and frequencies in units
/// of `c / gap`, so that `c = 1` inside the inner loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitSystem {
    Si,
    Natural { gap: f64 },
}

impl UnitSystem {
    pub fn natural(gap: f64) -> Result<Self> {
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(Error::invalid(format!("gap must be positive, got {gap}")));
        }
        Ok(UnitSystem::Natural { gap })
    }

    /// Speed of light expressed in this system.
    pub fn c(self) -> f64 {
        match self {
            UnitSystem::Si => SPEED_OF_LIGHT,
            UnitSystem::Natural { .. } => 1.0,
        }
    }

    fn length_scale(self) -> f64 {
        match self {
            UnitSystem::Si => 1.0,
            UnitSystem::Natural { gap } => gap,
        }
    }

    fn frequency_scale(self) -> f64 {
        match self {
            UnitSystem::Si => 1.0,
            UnitSystem::Natural { gap } => SPEED_OF_LIGHT / gap,
        }
    }

    pub fn length_to_si(self, x: f64) -> f64 {
        x * self.length_scale()
    }

    pub fn length_from_si(self, x: f64) -> f64 {
        x / self.length_scale()
    }

    pub fn frequency_to_si(self, w: f64) -> f64 {
        w * self.frequency_scale()
    }

    pub fn frequency_from_si(self, w: f64) -> f64 {
        w / self.frequency_scale()
    }

    /// Wavevectors scale as inverse lengths.
    pub fn wavevector_to_si(self, q: f64) -> f64 {
        q / self.length_scale()
    }

    pub fn wavevector_from_si(self, q: f64) -> f64 {
        q * self.length_scale()
    }

    /// Re-express a spectral point given in this system in SI units.
    pub fn point_to_si(self, point: &SpectralPoint) -> SpectralPoint {
        let axis = match point.axis() {
            FrequencyAxis::Real(w) => FrequencyAxis::Real(self.frequency_to_si(w)),
            FrequencyAxis::Imaginary(xi) => FrequencyAxis::Imaginary(self.frequency_to_si(xi)),
        };
        SpectralPoint { q: self.wavevector_to_si(point.q()), axis, polarization: point.polarization() }
    }
}

/// Square root on the branch `Im ≥ 0`, and `Re ≥ 0` when the imaginary part vanishes.
pub fn branch_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Normal wavevector `√(ε ω²/c² − Q²)` in a medium of permittivity `eps` on the real axis.
pub fn normal_wavevector(q: f64, omega: f64, eps: Complex64, units: UnitSystem) -> Result<NormalWavevector> {
    if !(q >= 0.0) {
        return Err(Error::invalid(format!("parallel wavevector must be >= 0, got {q}")));
    }
    if !(omega >= 0.0) {
        return Err(Error::invalid(format!("frequency must be >= 0, got {omega}")));
    }
    if q == 0.0 && omega == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let w = omega / units.c();
    let z = eps * w * w - q * q;
    let sector = if z.re >= 0.0 { Sector::Propagating } else { Sector::Evanescent };
    Ok(NormalWavevector { value: branch_sqrt(z), sector })
}

/// `κ = √(ξ²/c² + Q²)`; on the imaginary axis `e^{2ik_vL}` becomes `e^{−2κL}`.
pub fn imaginary_axis_kappa(q: f64, xi: f64, units: UnitSystem) -> Result<f64> {
    if !(q >= 0.0) || !(xi >= 0.0) {
        return Err(Error::invalid(format!("need Q >= 0 and xi >= 0, got Q = {q}, xi = {xi}")));
    }
    if q == 0.0 && xi == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    Ok((xi / units.c()).hypot(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: UnitSystem = UnitSystem::Natural { gap: 1.0 };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normal_incidence_in_vacuum() {
        let k = normal_wavevector(0.0, 1.0, c(1.0, 0.0), NAT).unwrap();
        assert_eq!(k.value, c(1.0, 0.0));
        assert_eq!(k.sector, Sector::Propagating);
    }

    #[test]
    fn beyond_light_line_is_evanescent() {
        let k = normal_wavevector(2.0, 1.0, c(1.0, 0.0), NAT).unwrap();
        assert_eq!(k.sector, Sector::Evanescent);
        assert!(k.value.re.abs() < 1e-15);
        assert!((k.kappa() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dense_medium() {
        let k = normal_wavevector(1.0, 1.0, c(4.0, 0.0), NAT).unwrap();
        assert_eq!(k.sector, Sector::Propagating);
        assert!((k.value - c(3f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn light_line_is_propagating_with_zero_wavevector() {
        let k = normal_wavevector(1.0, 1.0, c(1.0, 0.0), NAT).unwrap();
        assert_eq!(k.sector, Sector::Propagating);
        assert_eq!(k.value, c(0.0, 0.0));
    }

    #[test]
    fn degenerate_point_rejected() {
        assert!(matches!(normal_wavevector(0.0, 0.0, c(1.0, 0.0), NAT), Err(Error::DegeneratePoint)));
        assert!(matches!(imaginary_axis_kappa(0.0, 0.0, NAT), Err(Error::DegeneratePoint)));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(imaginary_axis_kappa(3.0, 4.0, NAT).unwrap(), 5.0);
        assert_eq!(imaginary_axis_kappa(1.0, 0.0, NAT).unwrap(), 1.0);
        assert_eq!(imaginary_axis_kappa(0.0, 2.0, NAT).unwrap(), 2.0);
    }

    #[test]
    fn si_speed_of_light() {
        let k = normal_wavevector(0.0, SPEED_OF_LIGHT, c(1.0, 0.0), UnitSystem::Si).unwrap();
        assert!((k.value.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_zero_imaginary_part_lands_on_upper_branch() {
        let s = branch_sqrt(c(-4.0, -0.0));
        assert_eq!(s, c(0.0, 2.0));
    }
}
