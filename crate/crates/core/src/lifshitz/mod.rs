//! Cavity thermodynamics from the wall density of states.
//!
//! All production evaluation happens on the imaginary frequency axis, where
//! the integrands are real, smooth and exponentially decaying. At finite
//! temperature the frequency integral becomes a Matsubara sum; at `T = 0` it
//! is kept as a genuine integral.
//!
//! Results are per unit mirror area in SI units. Pressure is negative for
//! attraction.

mod integrands;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::mirrors::MirrorModel;
use crate::quadrature::{integrate_to_infinity, Estimate, Tolerance};
use crate::summation::Neumaier;

use integrands::{inner, outer_tail, term_bound, Kind};

/// Two mirrors facing each other across a vacuum gap [m].
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCavity {
    pub mirror1: MirrorModel,
    pub mirror2: MirrorModel,
    pub gap: f64,
}

impl PlanarCavity {
    pub fn new(mirror1: MirrorModel, mirror2: MirrorModel, gap: f64) -> Result<Self> {
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(Error::invalid(format!("gap must be positive and finite, got {gap}")));
        }
        Ok(Self { mirror1, mirror2, gap })
    }

    pub fn with_gap(&self, gap: f64) -> Result<Self> {
        Self::new(self.mirror1.clone(), self.mirror2.clone(), gap)
    }
}

/// Accuracy settings for the imaginary-axis evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance of every reported quantity.
    pub rel_tol: f64,
    /// Tolerance of the free energies that feed finite-difference cross-checks.
    pub check_rel_tol: f64,
    /// Hard cap on the number of Matsubara terms.
    pub max_matsubara: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, check_rel_tol: 1e-11, max_matsubara: 1_000_000 }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::invalid(format!("relative tolerance must lie in (0, 1), got {rel_tol}")));
        }
        Ok(Self { rel_tol, check_rel_tol: rel_tol.clamp(1e-13, 1e-11), ..Self::default() })
    }

    fn inner_rel(&self) -> f64 {
        0.1 * self.rel_tol
    }
}

/// Imaginary frequencies `ξₙ = 2πn k_BT/ħ` with the `n = 0` term at half weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraLattice {
    /// Spacing `2π k_BT/ħ` [rad/s].
    pub spacing: f64,
}

impl MatsubaraLattice {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::invalid(format!("Matsubara lattice needs T > 0, got {temperature}")));
        }
        Ok(Self { spacing: 2.0 * PI * BOLTZMANN * temperature / HBAR })
    }

    pub fn frequency(&self, n: usize) -> f64 {
        self.spacing * n as f64
    }

    pub fn weight(&self, n: usize) -> f64 {
        if n == 0 {
            0.5
        } else {
            1.0
        }
    }

    /// Spacing in units of `c/L`.
    pub fn dimensionless_spacing(&self, gap: f64) -> f64 {
        self.spacing * gap / SPEED_OF_LIGHT
    }

    /// `(ξₙ, weight)` for `n = 0, 1, 2, …`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..).map(move |n| (self.frequency(n), self.weight(n)))
    }
}

fn check_temperature(temperature: f64) -> Result<()> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(format!("temperature must be finite and >= 0, got {temperature}")));
    }
    Ok(())
}

/// Matsubara terms evaluated per parallel batch.
const BATCH: usize = 32;
/// Beyond this dimensionless frequency every term is below `e^{−120}`.
const X_MAX: f64 = 60.0;

/// `Σ'ₙ J(xₙ)` with the tail cut once its bound is negligible.
fn matsubara_sum(cav: &PlanarCavity, temperature: f64, kind: Kind, rel: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    let tau = MatsubaraLattice::new(temperature)?.dimensionless_spacing(cav.gap);
    let inner_rel = 0.1 * rel;
    let mut terms: Vec<Estimate> = Vec::new();
    loop {
        let start = terms.len();
        let batch = (start..start + BATCH)
            .into_par_iter()
            .map(|n| {
                let x = n as f64 * tau;
                let weight = if n == 0 { 0.5 } else { 1.0 };
                if n == 0 && kind == Kind::Energy {
                    return Ok(Estimate::default());
                }
                Ok(inner(cav, kind, x, inner_rel)?.scaled(weight))
            })
            .collect::<Result<Vec<_>>>()?;
        terms.extend(batch);
        let sum: Neumaier = terms.iter().map(|t| t.value).collect();
        let total = sum.total();
        let x_next = terms.len() as f64 * tau;
        let tail = term_bound(kind, x_next) + outer_tail(kind, x_next) / tau;
        if tail <= 1e-2 * rel * total.abs() || x_next > X_MAX {
            let error: f64 = terms.iter().map(|t| t.error).sum();
            return Ok(Estimate::new(total, error + tail));
        }
        if terms.len() >= quad.max_matsubara {
            return Err(Error::Quadrature { a: 0.0, b: x_next, error: tail, requested: rel * total.abs() });
        }
    }
}

/// `∫₀^∞ dx J(x)`.
fn frequency_integral(cav: &PlanarCavity, kind: Kind, rel: f64) -> Result<Estimate> {
    let inner_rel = 0.1 * rel;
    let est = integrate_to_infinity(
        |x| Ok(inner(cav, kind, x, inner_rel)?.value),
        0.0,
        1.0,
        |x0| outer_tail(kind, x0),
        Tolerance::relative(rel),
    )?;
    Ok(Estimate::new(est.value, est.error + inner_rel * est.value.abs()))
}

fn free_energy_at(cav: &PlanarCavity, temperature: f64, rel: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    check_temperature(temperature)?;
    let l = cav.gap;
    if temperature == 0.0 {
        let j = frequency_integral(cav, Kind::Free, rel)?;
        return Ok(j.scaled(HBAR * SPEED_OF_LIGHT / (4.0 * PI * PI * l.powi(3))));
    }
    let j = matsubara_sum(cav, temperature, Kind::Free, rel, quad)?;
    Ok(j.scaled(BOLTZMANN * temperature / (2.0 * PI * l * l)))
}

/// Zero-temperature energy per unit area [J/m²].
pub fn ground_state_energy(cav: &PlanarCavity, quad: &QuadratureSpec) -> Result<Estimate> {
    free_energy_at(cav, 0.0, quad.rel_tol, quad)
}

/// Helmholtz free energy per unit area [J/m²]; equals [`ground_state_energy`] at `T = 0`.
pub fn free_energy(cav: &PlanarCavity, temperature: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    free_energy_at(cav, temperature, quad.rel_tol, quad)
}

/// Entropy per unit area [J/(K m²)], from the temperature derivative of the
/// Matsubara representation taken analytically. Zero at `T = 0`.
pub fn entropy(cav: &PlanarCavity, temperature: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    check_temperature(temperature)?;
    if temperature == 0.0 {
        return Ok(Estimate::default());
    }
    let j = matsubara_sum(cav, temperature, Kind::Entropy, quad.rel_tol, quad)?;
    Ok(j.scaled(-BOLTZMANN / (2.0 * PI * cav.gap * cav.gap)))
}

/// `−∂F/∂T` by central difference with step `10⁻⁴ T`.
pub fn entropy_finite_difference(cav: &PlanarCavity, temperature: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    if !(temperature > 0.0) {
        return Err(Error::invalid(format!("finite-difference entropy needs T > 0, got {temperature}")));
    }
    let dt = 1e-4 * temperature;
    let hi = free_energy_at(cav, temperature + dt, quad.check_rel_tol, quad)?;
    let lo = free_energy_at(cav, temperature - dt, quad.check_rel_tol, quad)?;
    Ok(Estimate::new(-(hi.value - lo.value) / (2.0 * dt), (hi.error + lo.error) / (2.0 * dt)))
}

/// Internal energy by the two independent routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalEnergy {
    /// `F + T·S`.
    pub primary: Estimate,
    /// Direct Matsubara evaluation of the mode average of `ħω g`.
    pub direct: Estimate,
}

/// Internal energy per unit area [J/m²].
pub fn internal_energy(cav: &PlanarCavity, temperature: f64, quad: &QuadratureSpec) -> Result<InternalEnergy> {
    check_temperature(temperature)?;
    let f = free_energy(cav, temperature, quad)?;
    if temperature == 0.0 {
        return Ok(InternalEnergy { primary: f, direct: f });
    }
    let s = entropy(cav, temperature, quad)?;
    let j = matsubara_sum(cav, temperature, Kind::Energy, quad.rel_tol, quad)?;
    let direct = j.scaled(-BOLTZMANN * temperature / (2.0 * PI * cav.gap * cav.gap));
    Ok(InternalEnergy { primary: f + s.scaled(temperature), direct })
}

/// Casimir pressure `P = −∂(F/A)/∂L` [Pa], negative for attraction.
pub fn casimir_pressure(cav: &PlanarCavity, temperature: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    check_temperature(temperature)?;
    let l = cav.gap;
    if temperature == 0.0 {
        let j = frequency_integral(cav, Kind::Pressure, quad.rel_tol)?;
        return Ok(j.scaled(-HBAR * SPEED_OF_LIGHT / (2.0 * PI * PI * l.powi(4))));
    }
    let j = matsubara_sum(cav, temperature, Kind::Pressure, quad.rel_tol, quad)?;
    Ok(j.scaled(-BOLTZMANN * temperature / (PI * l.powi(3))))
}

/// `−ΔF/ΔL` by central difference with step `10⁻⁴ L`.
pub fn pressure_finite_difference(cav: &PlanarCavity, temperature: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    let dl = 1e-4 * cav.gap;
    let hi = free_energy_at(&cav.with_gap(cav.gap + dl)?, temperature, quad.check_rel_tol, quad)?;
    let lo = free_energy_at(&cav.with_gap(cav.gap - dl)?, temperature, quad.check_rel_tol, quad)?;
    Ok(Estimate::new(-(hi.value - lo.value) / (2.0 * dl), (hi.error + lo.error) / (2.0 * dl)))
}

/// The force formula with the prefactor `ħ/2π²` in front of `Re ∫dQ Q ∫dω g k_v/(ζ − 1)`,
/// rotated to the imaginary axis. It evaluates to exactly half of
/// [`casimir_pressure`] and is kept for comparison only.
pub fn printed_force_diagnostic(pressure: Estimate) -> Estimate {
    pressure.scaled(0.5)
}

/// Zero-temperature mode average per unit area of a real quantity `W(ω)`.
///
/// `weight_slope(ξ)` must return `Re dW/dω` at `ω = iξ` (SI units). For
/// `W = ħω/2` the slope is `ħ/2` and the result is the ground-state energy.
/// The slope should grow at most polynomially; otherwise the frequency
/// integral fails to converge and an error is returned.
pub fn spectral_average<W>(cav: &PlanarCavity, weight_slope: W, quad: &QuadratureSpec) -> Result<Estimate>
where
    W: Fn(f64) -> f64,
{
    let l = cav.gap;
    let to_si = SPEED_OF_LIGHT / l;
    let inner_rel = quad.inner_rel();
    let slope = |x: f64| -> Result<f64> {
        let w = weight_slope(x * to_si);
        if !w.is_finite() {
            return Err(Error::invalid(format!("weight slope is not finite at xi = {:e} rad/s", x * to_si)));
        }
        Ok(w)
    };
    let est = integrate_to_infinity(
        |x| {
            let w = slope(x)?;
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * inner(cav, Kind::Free, x, inner_rel)?.value)
        },
        0.0,
        1.0,
        |x0| slope(x0).map(f64::abs).unwrap_or(f64::INFINITY) * (1.0 + x0) * outer_tail(Kind::Free, x0),
        Tolerance { rel: quad.rel_tol, abs: 0.0 },
    )?;
    Ok(Estimate::new(est.value, est.error + inner_rel * est.value.abs()).scaled(to_si / (2.0 * PI * PI * l * l)))
}

/// A disagreement between two evaluation paths of the same quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDisagreement {
    pub quantity: &'static str,
    pub primary: f64,
    pub check: f64,
    pub allowed: f64,
}

impl std::fmt::Display for PathDisagreement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: primary {:e} vs cross-check {:e} differ by {:e} (allowed {:e})",
            self.quantity,
            self.primary,
            self.check,
            (self.primary - self.check).abs(),
            self.allowed
        )
    }
}

/// Everything computed for one `(cavity, T)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoResult {
    pub temperature: f64,
    pub gap: f64,
    pub ground_state_energy: Estimate,
    pub free_energy: Estimate,
    pub entropy: Estimate,
    /// Absent at `T = 0`.
    pub entropy_fd: Option<Estimate>,
    pub internal_energy: Estimate,
    pub internal_energy_direct: Estimate,
    pub pressure: Estimate,
    pub pressure_fd: Estimate,
    pub pressure_printed: Estimate,
}

/// Relative tolerance of the finite-difference cross-checks.
pub const FD_TOLERANCE: f64 = 1e-4;

impl ThermoResult {
    /// Cross-check paths that disagree beyond their tolerance.
    pub fn disagreements(&self) -> Vec<PathDisagreement> {
        let mut out = Vec::new();
        let mut check = |quantity, primary: Estimate, check: Estimate, allowed: f64| {
            if !((primary.value - check.value).abs() <= allowed) {
                out.push(PathDisagreement { quantity, primary: primary.value, check: check.value, allowed });
            }
        };
        if let Some(fd) = self.entropy_fd {
            let allowed = FD_TOLERANCE * self.entropy.value.abs() + self.entropy.error + fd.error;
            check("entropy", self.entropy, fd, allowed);
        }
        let allowed = 1e-6 * self.free_energy.value.abs() + self.internal_energy.error + self.internal_energy_direct.error;
        check("internal energy", self.internal_energy, self.internal_energy_direct, allowed);
        let allowed = FD_TOLERANCE * self.pressure.value.abs() + self.pressure.error + self.pressure_fd.error;
        check("pressure", self.pressure, self.pressure_fd, allowed);
        out
    }
}

/// All thermodynamic outputs and their cross-checks.
pub fn thermodynamics(cav: &PlanarCavity, temperature: f64, quad: &QuadratureSpec) -> Result<ThermoResult> {
    check_temperature(temperature)?;
    let ground = ground_state_energy(cav, quad)?;
    let free = if temperature == 0.0 { ground } else { free_energy(cav, temperature, quad)? };
    let (s, s_fd, u_direct) = if temperature == 0.0 {
        (Estimate::default(), None, ground)
    } else {
        let j = matsubara_sum(cav, temperature, Kind::Energy, quad.rel_tol, quad)?;
        (
            entropy(cav, temperature, quad)?,
            Some(entropy_finite_difference(cav, temperature, quad)?),
            j.scaled(-BOLTZMANN * temperature / (2.0 * PI * cav.gap * cav.gap)),
        )
    };
    let pressure = casimir_pressure(cav, temperature, quad)?;
    Ok(ThermoResult {
        temperature,
        gap: cav.gap,
        ground_state_energy: ground,
        free_energy: free,
        entropy: s,
        entropy_fd: s_fd,
        internal_energy: free + s.scaled(temperature),
        internal_energy_direct: u_direct,
        pressure,
        pressure_fd: pressure_finite_difference(cav, temperature, quad)?,
        pressure_printed: printed_force_diagnostic(pressure),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mirrors::PermittivityModel;
    use num_complex::Complex64;

    fn ideal(gap: f64) -> PlanarCavity {
        PlanarCavity::new(MirrorModel::Perfect, MirrorModel::Perfect, gap).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn ideal_mirror_closed_forms() {
        let q = QuadratureSpec::default();
        let l = 1e-6;
        let hc = HBAR * SPEED_OF_LIGHT;
        let u0 = ground_state_energy(&ideal(l), &q).unwrap();
        assert!(rel(u0.value, -PI.powi(2) * hc / (720.0 * l.powi(3))) < 1e-7, "{u0:?}");
        let p = casimir_pressure(&ideal(l), 0.0, &q).unwrap();
        assert!(rel(p.value, -PI.powi(2) * hc / (240.0 * l.powi(4))) < 1e-7, "{p:?}");
        assert!((p.value + 1.30e-3).abs() < 0.005e-3);
    }

    #[test]
    fn transparent_mirror_gives_nothing() {
        let q = QuadratureSpec::default();
        let vacuum = MirrorModel::HalfSpace(PermittivityModel::Constant(Complex64::new(1.0, 0.0)));
        let cav = PlanarCavity::new(vacuum, MirrorModel::Perfect, 1e-6).unwrap();
        assert_eq!(ground_state_energy(&cav, &q).unwrap().value, 0.0);
        assert_eq!(free_energy(&cav, 300.0, &q).unwrap().value, 0.0);
        assert_eq!(entropy(&cav, 300.0, &q).unwrap().value, 0.0);
        assert_eq!(casimir_pressure(&cav, 300.0, &q).unwrap().value, 0.0);
    }

    #[test]
    fn lattice() {
        let m = MatsubaraLattice::new(300.0).unwrap();
        assert!(rel(m.frequency(1), 2.47e14) < 2e-3);
        assert_eq!(m.weight(0), 0.5);
        let half = MatsubaraLattice::new(150.0).unwrap();
        assert!(rel(half.spacing, 0.5 * m.spacing) < 1e-15);
        assert!(MatsubaraLattice::new(0.0).is_err());
    }

    #[test]
    fn spectral_average_of_zero_point_energy() {
        let q = QuadratureSpec::default();
        let cav = ideal(1e-6);
        let u0 = ground_state_energy(&cav, &q).unwrap();
        let avg = spectral_average(&cav, |_| HBAR / 2.0, &q).unwrap();
        assert!(rel(avg.value, u0.value) < 1e-7);
        assert_eq!(spectral_average(&cav, |_| 0.0, &q).unwrap().value, 0.0);
    }

    #[test]
    fn low_temperature_approaches_ground_state() {
        let q = QuadratureSpec::default();
        let cav = ideal(1e-6);
        let u0 = ground_state_energy(&cav, &q).unwrap();
        let f = free_energy(&cav, 1.0, &q).unwrap();
        assert!(rel(f.value, u0.value) < 1e-6, "{} vs {}", f.value, u0.value);
    }

    #[test]
    fn thermodynamic_identity_for_ideal_mirrors() {
        let q = QuadratureSpec::default();
        let l = 1e-6;
        // k_BT = 0.1 ħc/L
        let t = 0.1 * HBAR * SPEED_OF_LIGHT / (BOLTZMANN * l);
        let r = thermodynamics(&ideal(l), t, &q).unwrap();
        assert!(rel(r.internal_energy.value, r.internal_energy_direct.value) < 1e-6);
        assert!(rel(r.entropy.value, r.entropy_fd.unwrap().value) < 1e-4);
        assert!(rel(r.pressure.value, r.pressure_fd.value) < 1e-4);
        assert!(r.disagreements().is_empty(), "{:?}", r.disagreements());
        assert!(r.free_energy.value < 0.0 && r.pressure.value < 0.0);
    }
}
