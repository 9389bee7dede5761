//! Normal modes of a cavity closed by delayed lossless walls.
//!
//! Each wall is a real mirror wrapped in the delay form, which makes it
//! lossless: the cavity then has real eigenfrequencies, packed ever more
//! densely as the delay grows. Counting them in a window and subtracting the
//! count with transparent walls recovers the wall density of states.
//!
//! All quantities are expressed in the [`UnitSystem`] of the [`CavityConfig`].

mod census;
mod local;
mod roots;

use num_complex::Complex64;

pub use census::{
    census, count_modes_argument_principle, dos_census_study, CensusRow, CensusStudy, DosResult,
};
pub use roots::{find_modes, find_modes_with_step};

use crate::error::{Error, Result};
use crate::fictitious::total_reflection_delay;
use crate::kinematics::{normal_wavevector, FrequencyAxis, Polarization, Sector, SpectralPoint, UnitSystem};
use crate::mirrors::MirrorModel;
use crate::quadrature::Estimate;

/// Source of a wall's real-axis reflection amplitude.
#[derive(Debug, Clone, PartialEq)]
pub enum Wall {
    /// Frequency-independent amplitude.
    Constant(Complex64),
    Model(MirrorModel),
}

impl Wall {
    pub fn amplitude(&self, q: f64, omega: f64, pol: Polarization, units: UnitSystem) -> Result<Complex64> {
        match self {
            Wall::Constant(r) => Ok(*r),
            Wall::Model(m) => m.reflection(&SpectralPoint::real(q, omega, pol)?, units),
        }
    }
}

/// A wall with delay `T` and slow phase `δ(ω) = offset + slope·ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedMirror {
    pub wall: Wall,
    pub delay: f64,
    pub phase_offset: f64,
    pub phase_slope: f64,
}

impl DelayedMirror {
    pub fn new(wall: Wall, delay: f64) -> Result<Self> {
        Ok(Self { wall, delay: check_delay(delay)?, phase_offset: 0.0, phase_slope: 0.0 })
    }

    pub fn with_phase(mut self, offset: f64, slope: f64) -> Self {
        self.phase_offset = offset;
        self.phase_slope = slope;
        self
    }

    /// `δ(ω) + ωT`.
    pub fn round_trip_phase(&self, omega: f64) -> f64 {
        self.phase_offset + (self.phase_slope + self.delay) * omega
    }

    fn phase_rate(&self) -> f64 {
        (self.phase_slope + self.delay).abs()
    }

    /// Lossless total amplitude `r_t` at a real frequency.
    pub fn total_reflection(&self, q: f64, omega: f64, pol: Polarization, units: UnitSystem) -> Result<Complex64> {
        let r = self.wall.amplitude(q, omega, pol, units)?;
        let sector = normal_wavevector(q, omega, Complex64::new(1.0, 0.0), units)?.sector;
        if is_lossless(r, sector) {
            return Ok(r);
        }
        total_reflection_delay(r, self.round_trip_phase(omega), sector)
    }
}

fn check_delay(delay: f64) -> Result<f64> {
    if !(delay > 0.0) || !delay.is_finite() {
        return Err(Error::invalid(format!("delay must be positive and finite, got {delay}")));
    }
    Ok(delay)
}

/// A wall that neither absorbs nor transmits needs no delayed re-injection.
pub(crate) fn is_lossless(r: Complex64, sector: Sector) -> bool {
    match sector {
        Sector::Propagating => r.norm() >= 1.0 - 1e-12,
        Sector::Evanescent => r.im.abs() <= 1e-12 * r.norm().max(1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub mirror1: DelayedMirror,
    pub mirror2: DelayedMirror,
    /// Gap width, in the length unit of `units`.
    pub gap: f64,
    pub units: UnitSystem,
}

impl CavityConfig {
    pub fn new(mirror1: DelayedMirror, mirror2: DelayedMirror, gap: f64, units: UnitSystem) -> Result<Self> {
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(Error::invalid(format!("gap must be positive and finite, got {gap}")));
        }
        Ok(Self { mirror1, mirror2, gap, units })
    }

    pub fn mirrors(&self) -> [&DelayedMirror; 2] {
        [&self.mirror1, &self.mirror2]
    }

    /// Same cavity with both delays replaced.
    pub fn with_delays(&self, t1: f64, t2: f64) -> Result<Self> {
        let mut out = self.clone();
        out.mirror1.delay = check_delay(t1)?;
        out.mirror2.delay = check_delay(t2)?;
        Ok(out)
    }

    /// Same cavity with `shift` added to both slow phases.
    pub fn with_phase_shift(&self, shift: f64) -> Self {
        let mut out = self.clone();
        out.mirror1.phase_offset += shift;
        out.mirror2.phase_offset += shift;
        out
    }

    /// [`wall_dos`] for the undelayed walls of this cavity.
    pub fn wall_dos(&self, q: f64, pol: Polarization, omega: f64) -> Result<f64> {
        Ok(self.wall_dos_estimate(q, pol, omega)?.value)
    }

    pub fn wall_dos_estimate(&self, q: f64, pol: Polarization, omega: f64) -> Result<Estimate> {
        let r1 = |w: f64| self.mirror1.wall.amplitude(q, w, pol, self.units);
        let r2 = |w: f64| self.mirror2.wall.amplitude(q, w, pol, self.units);
        wall_dos_estimate(r1, r2, q, omega, self.gap, self.units)
    }
}

/// Frequency window `[center − width/2, center + width/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeWindow {
    pub center: f64,
    pub width: f64,
}

impl ModeWindow {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !(center - 0.5 * width >= 0.0) || !center.is_finite() {
            return Err(Error::Window(format!("need width > 0 and a non-negative lower edge, got center {center}, width {width}")));
        }
        Ok(Self { center, width })
    }

    pub fn lo(&self) -> f64 {
        self.center - 0.5 * self.width
    }

    pub fn hi(&self) -> f64 {
        self.center + 0.5 * self.width
    }
}

/// `1 − r₁ r₂ e^{2ik_vL}`.
pub fn dispersion_d(r1: Complex64, r2: Complex64, k_v: Complex64, gap: f64) -> Complex64 {
    1.0 - r1 * r2 * (2.0 * Complex64::i() * k_v * gap).exp()
}

/// Dispersion function of the delayed cavity, `1 − r₁ₜ r₂ₜ e^{2ik_vL}`.
pub fn dispersion_dt(config: &CavityConfig, point: &SpectralPoint) -> Result<Complex64> {
    let FrequencyAxis::Real(omega) = point.axis() else {
        return Err(Error::invalid("the delayed dispersion relation is defined on the real frequency axis"));
    };
    let (q, pol) = (point.q(), point.polarization());
    let k = normal_wavevector(q, omega, Complex64::new(1.0, 0.0), config.units)?;
    let r1 = config.mirror1.total_reflection(q, omega, pol, config.units)?;
    let r2 = config.mirror2.total_reflection(q, omega, pol, config.units)?;
    Ok(dispersion_d(r1, r2, k.value, config.gap))
}

/// Wall contribution to the density of states per unit frequency at fixed `(Q, μ)`:
/// `ρ = −(1/π) Im d/dω ln(1 − r₁r₂e^{2ik_vL})`.
pub fn wall_dos<R1, R2>(r1: R1, r2: R2, q: f64, omega: f64, gap: f64, units: UnitSystem) -> Result<f64>
where
    R1: Fn(f64) -> Result<Complex64>,
    R2: Fn(f64) -> Result<Complex64>,
{
    Ok(wall_dos_estimate(r1, r2, q, omega, gap, units)?.value)
}

/// [`wall_dos`] with the last Richardson correction as its error.
pub fn wall_dos_estimate<R1, R2>(r1: R1, r2: R2, q: f64, omega: f64, gap: f64, units: UnitSystem) -> Result<Estimate>
where
    R1: Fn(f64) -> Result<Complex64>,
    R2: Fn(f64) -> Result<Complex64>,
{
    let d = |w: f64| -> Result<Complex64> {
        let k = normal_wavevector(q, w, Complex64::new(1.0, 0.0), units)?;
        Ok(dispersion_d(r1(w)?, r2(w)?, k.value, gap))
    };
    let d0 = d(omega)?;
    if d0.norm() == 0.0 {
        return Err(Error::Pole { context: "wall density of states", location: format!("omega = {omega:e} is a real mode") });
    }
    let light_line = q * units.c();
    let mut h = 1e-3 * omega.abs().max(1e-300);
    let dist = (omega - light_line).abs();
    if dist > 0.0 {
        h = h.min(0.25 * dist);
    }
    let (dd, correction) = richardson(&d, omega, h, 1e-12 * omega.abs(), d0.norm())?;
    let pi = std::f64::consts::PI;
    Ok(Estimate::new(-(dd / d0).im / pi, correction / (d0.norm() * pi)))
}

/// Central differences extrapolated in the step; the step is cut tenfold
/// until the tableau converges, and refused below `min_step`.
fn richardson<F>(f: &F, x: f64, mut h: f64, min_step: f64, scale: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    while h >= min_step && h > 0.0 {
        let mut prev: Vec<Complex64> = Vec::new();
        let mut step = h;
        for i in 0..10 {
            let mut row = vec![(f(x + step)? - f(x - step)?) / (2.0 * step)];
            let mut factor = 1.0;
            for j in 1..=i {
                factor *= 4.0;
                let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
                row.push(v);
            }
            if i > 0 {
                let diff = (row[i] - prev[i - 1]).norm();
                if diff <= 1e-10 * row[i].norm() || diff <= 1e-14 * scale / h {
                    return Ok((row[i], diff));
                }
            }
            prev = row;
            step *= 0.5;
        }
        h *= 0.1;
    }
    Err(Error::Derivative(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const NAT: UnitSystem = UnitSystem::Natural { gap: 1.0 };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_cavity(r: Complex64, t: f64) -> CavityConfig {
        let m = DelayedMirror::new(Wall::Constant(r), t).unwrap();
        CavityConfig::new(m.clone(), m, 1.0, NAT).unwrap()
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion_d(c(0.0, 0.0), c(0.0, 0.0), c(1.3, 0.0), 1.0), c(1.0, 0.0));
        assert!(dispersion_d(c(1.0, 0.0), c(1.0, 0.0), c(PI, 0.0), 1.0).norm() < 1e-15);
        let d = dispersion_d(c(0.5, 0.0), c(0.5, 0.0), c(PI / 4.0, 0.0), 1.0);
        assert!((d - c(1.0, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn vacuum_walls_follow_the_delay_lattice() {
        // With transparent walls D_t = 1 − e^{i(δ + ωT + 2ωL)} at Q = 0.
        let cav = constant_cavity(c(0.0, 0.0), 50.0);
        let t = 100.0 + 2.0;
        for l in 1..5 {
            let w = 2.0 * PI * l as f64 / t;
            let d = dispersion_dt(&cav, &SpectralPoint::real(0.0, w, Polarization::S).unwrap()).unwrap();
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn perfect_mirrors_ignore_the_delay() {
        let m = DelayedMirror::new(Wall::Model(MirrorModel::Perfect), 37.0).unwrap();
        let cav = CavityConfig::new(m.clone(), m, 1.0, NAT).unwrap();
        for pol in Polarization::BOTH {
            let p = SpectralPoint::real(0.0, 2.0 * PI / 2.0, pol).unwrap();
            let dt = dispersion_dt(&cav, &p).unwrap();
            let d = dispersion_d(c(if pol == Polarization::S { -1.0 } else { 1.0 }, 0.0), c(if pol == Polarization::S { -1.0 } else { 1.0 }, 0.0), c(PI, 0.0), 1.0);
            assert!((dt - d).norm() < 1e-15 && d.norm() < 1e-15);
        }
    }

    #[test]
    fn density_of_states_for_constant_walls() {
        let r = |_: f64| Ok(c(0.5, 0.0));
        for &w in &[0.3, 1.0, 2.2] {
            let rho = wall_dos(r, r, 0.0, w, 1.0, NAT).unwrap();
            let e = Complex64::from_polar(1.0, 2.0 * w);
            let exact = -(-0.25 * 2.0 * Complex64::i() * e / (1.0 - 0.25 * e)).im / PI;
            assert!((rho - exact).abs() < 1e-9 * exact.abs().max(1.0), "{rho} vs {exact}");
        }
        let zero = |_: f64| Ok(c(0.0, 0.0));
        assert_eq!(wall_dos(zero, r, 0.0, 1.0, 1.0, NAT).unwrap(), 0.0);
    }

    #[test]
    fn density_of_states_depends_on_the_product_only() {
        let u = Complex64::from_polar(1.0, 0.7);
        let r1 = |w: f64| Ok(c(0.3, 0.2 * w));
        let r2 = |_: f64| Ok(c(-0.6, 0.1));
        let a = wall_dos(r1, r2, 0.5, 1.3, 1.0, NAT).unwrap();
        let b = wall_dos(r2, r1, 0.5, 1.3, 1.0, NAT).unwrap();
        let c2 = wall_dos(|w| Ok(r1(w)? * u), |w| Ok(r2(w)? / u), 0.5, 1.3, 1.0, NAT).unwrap();
        assert!((a - b).abs() < 1e-12 && (a - c2).abs() < 1e-9);
    }
}
