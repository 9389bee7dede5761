//! Lossless fictitious walls that mimic a lossy real mirror.
//!
//! A thin scattering interface separates the vacuum gap from a fictitious
//! dielectric terminated by a perfect mirror. Everything the interface lets
//! through comes back after a long delay, so the composite wall is lossless
//! yet reproduces the real reflection amplitude `r_v` coherently.
//!
//! Field amplitudes are compared through the energy flux along the normal
//! with the common prefactor `c²/8πω` dropped.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{NormalWavevector, Sector};
use crate::mirrors::{passivity_check, PassivityViolation};

/// Denominator magnitude below which a total amplitude is reported as singular.
pub const RESONANCE_THRESHOLD: f64 = 1e-14;

/// Phase of `r_d` relative to `r_v*` used by [`InterfaceScattering::propagating`].
///
/// With this value a transparent interface (`r_v = 0`, `k_v = k_d`) has `t_v = t_d = 1`.
pub const DEFAULT_PROPAGATING_PHASE: f64 = PI;

/// Phase of `r_d` used by [`InterfaceScattering::evanescent`].
pub const DEFAULT_EVANESCENT_PHASE: f64 = 0.0;

/// Net flux towards the interface carried by an incoming/outgoing pair on the vacuum side.
///
/// Propagating: `k(|i|² − |o|²)`. Evanescent (`k = iκ`): `2κ Im(i* o)`.
pub fn energy_flux(incoming: Complex64, outgoing: Complex64, k: NormalWavevector) -> f64 {
    match k.sector {
        Sector::Propagating => k.value.re * (incoming.norm_sqr() - outgoing.norm_sqr()),
        Sector::Evanescent => 2.0 * k.kappa() * (incoming.conj() * outgoing).im,
    }
}

/// Amplitudes of a thin interface between vacuum (`v`) and the fictitious dielectric (`d`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceScattering {
    pub r_v: Complex64,
    pub r_d: Complex64,
    pub t_v: Complex64,
    pub t_d: Complex64,
    pub k_v: NormalWavevector,
    pub k_d: f64,
    /// The free phase `δ`: `r_d = e^{iδ} r_v*` when propagating, `r_d = e^{iδ}` when evanescent.
    pub phase: f64,
}

fn passivity(r: Complex64, sector: Sector) -> Result<()> {
    passivity_check(r, sector).map_err(|v: PassivityViolation| Error::Passivity(v))
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

impl InterfaceScattering {
    /// Unitary interface for a wave propagating on both sides, with `t_v` real and positive.
    pub fn propagating(r_v: Complex64, k_v: f64, k_d: f64) -> Result<Self> {
        Self::propagating_with_phase(r_v, k_v, k_d, DEFAULT_PROPAGATING_PHASE)
    }

    pub fn propagating_with_phase(r_v: Complex64, k_v: f64, k_d: f64, phase: f64) -> Result<Self> {
        positive("k_v", k_v)?;
        positive("k_d", k_d)?;
        passivity(r_v, Sector::Propagating)?;
        let e = Complex64::from_polar(1.0, phase);
        let t_v = ((k_v / k_d) * (1.0 - r_v.norm_sqr()).max(0.0)).sqrt();
        Ok(Self {
            r_v,
            r_d: e * r_v.conj(),
            t_v: Complex64::new(t_v, 0.0),
            t_d: -e * (k_d / k_v) * t_v,
            k_v: NormalWavevector { value: Complex64::new(k_v, 0.0), sector: Sector::Propagating },
            k_d,
            phase,
        })
    }

    /// Interface for a wave evanescent in vacuum (`k_v = iκ`) but propagating in the dielectric.
    pub fn evanescent(r_v: Complex64, kappa: f64, k_d: f64) -> Result<Self> {
        Self::evanescent_with_phase(r_v, kappa, k_d, DEFAULT_EVANESCENT_PHASE)
    }

    pub fn evanescent_with_phase(r_v: Complex64, kappa: f64, k_d: f64, phase: f64) -> Result<Self> {
        positive("kappa", kappa)?;
        positive("k_d", k_d)?;
        passivity(r_v, Sector::Evanescent)?;
        let r_d = Complex64::from_polar(1.0, phase);
        let t_v = Complex64::new((2.0 * kappa * r_v.im.max(0.0) / k_d).sqrt(), 0.0);
        Ok(Self {
            r_v,
            r_d,
            t_v,
            t_d: Complex64::i() * (k_d / kappa) * t_v.conj() * r_d,
            k_v: NormalWavevector { value: Complex64::new(0.0, kappa), sector: Sector::Evanescent },
            k_d,
            phase,
        })
    }

    pub fn sector(&self) -> Sector {
        self.k_v.sector
    }

    /// Outgoing amplitudes `(o_v, o_d)` for incoming `(i_v, i_d)`.
    pub fn scatter(&self, i_v: Complex64, i_d: Complex64) -> (Complex64, Complex64) {
        (self.r_v * i_v + self.t_d * i_d, self.t_v * i_v + self.r_d * i_d)
    }

    /// `S_vz − S_dz` for the given incoming amplitudes; zero when energy is conserved.
    pub fn flux_imbalance(&self, i_v: Complex64, i_d: Complex64) -> f64 {
        let (o_v, o_d) = self.scatter(i_v, i_d);
        let s_v = energy_flux(i_v, o_v, self.k_v);
        let s_d = self.k_d * (o_d.norm_sqr() - i_d.norm_sqr());
        s_v - s_d
    }

    /// Flux-normalized scattering matrix. Only defined when `k_v` is real.
    pub fn s_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        if self.sector() != Sector::Propagating {
            return None;
        }
        let ratio = self.k_v.value.re / self.k_d;
        Some([[self.r_v, self.t_d * ratio.sqrt()], [self.t_v / ratio.sqrt(), self.r_d]])
    }

    /// Largest entry of `|S†S − 1|` and `|SS† − 1|`.
    pub fn unitarity_defect(&self) -> Option<f64> {
        let s = self.s_matrix()?;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                let sds: Complex64 = (0..2).map(|k| s[k][i].conj() * s[k][j]).sum();
                let ssd: Complex64 = (0..2).map(|k| s[i][k] * s[j][k].conj()).sum();
                worst = worst.max((sds - id).norm()).max((ssd - id).norm());
            }
        }
        Some(worst)
    }

    /// `(R_v, R_d, T_v, T_d)`; only meaningful for propagating waves.
    pub fn reflectance_transmittance(&self) -> (f64, f64, f64, f64) {
        let ratio = self.k_d / self.k_v.value.re;
        (self.r_v.norm_sqr(), self.r_d.norm_sqr(), ratio * self.t_v.norm_sqr(), self.t_d.norm_sqr() / ratio)
    }
}

/// Total amplitude of the interface backed by a perfect mirror at depth `depth`,
/// summed over all multiple reflections in closed form.
pub fn total_reflection_multiple(iface: &InterfaceScattering, depth: f64) -> Result<Complex64> {
    if !(depth > 0.0) {
        return Err(Error::invalid(format!("dielectric depth must be positive, got {depth}")));
    }
    let e = Complex64::from_polar(1.0, 2.0 * iface.k_d * depth);
    let den = 1.0 + iface.r_d * e;
    if den.norm() < RESONANCE_THRESHOLD {
        return Err(Error::Resonance(den.norm()));
    }
    Ok((iface.r_v + (iface.r_v * iface.r_d - iface.t_v * iface.t_d) * e) / den)
}

/// The same amplitude as an explicit bounce series, stopped after `max_bounces`
/// terms or once the geometric remainder drops below `1e-17`.
pub fn total_reflection_bounces(iface: &InterfaceScattering, depth: f64, max_bounces: usize) -> Complex64 {
    let e = Complex64::from_polar(1.0, 2.0 * iface.k_d * depth);
    let step = -iface.r_d * e;
    let floor = 1e-17 * (1.0 - step.norm()).max(0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut series = Complex64::new(0.0, 0.0);
    for _ in 0..max_bounces {
        series += term;
        term *= step;
        if term.norm() < floor {
            break;
        }
    }
    iface.r_v - iface.t_v * iface.t_d * e * series
}

/// Delay form of the total amplitude; `phase` is `δ + ωT`.
///
/// Propagating results are unimodular and evanescent ones real, by construction.
pub fn total_reflection_delay(r_v: Complex64, phase: f64, sector: Sector) -> Result<Complex64> {
    passivity(r_v, sector)?;
    match sector {
        Sector::Propagating => {
            if r_v.norm() >= 1.0 {
                return Ok(r_v);
            }
            // (r + u)/(1 + r* u) = u w/w* with w = 1 + r/u.
            let w = 1.0 + r_v * Complex64::from_polar(1.0, -phase);
            Ok(Complex64::from_polar(1.0, phase + 2.0 * w.arg()))
        }
        Sector::Evanescent => {
            // (r + r* u)/(1 + u) = Re(r e^{−iφ/2}) / cos(φ/2).
            let half = Complex64::from_polar(1.0, -0.5 * phase);
            let cos = half.re;
            if (2.0 * cos).abs() < RESONANCE_THRESHOLD {
                return Err(Error::Pole {
                    context: "evanescent delay amplitude",
                    location: format!("delta + omega T = {phase} (odd multiple of pi)"),
                });
            }
            Ok(Complex64::new((r_v * half).re / cos, 0.0))
        }
    }
}

/// `(a, b)` of `r_t = (r_v + a e^{iωT})/(1 + b e^{iωT})` for slow phase `δ`.
pub fn delay_coefficients(r_v: Complex64, delta: f64, sector: Sector) -> (Complex64, Complex64) {
    let e = Complex64::from_polar(1.0, delta);
    match sector {
        Sector::Propagating => (e, r_v.conj() * e),
        Sector::Evanescent => (r_v.conj() * e, e),
    }
}

/// Bounce cap of [`delay_consistency_check`].
pub const MAX_BOUNCES: usize = 1_000_000;

/// Largest deviation between the interface construction and the delay form
/// over the given round-trip phases `ωT = 2k_d L_d`.
///
/// When the bounce series converges within [`MAX_BOUNCES`] terms it is compared as well.
pub fn delay_consistency_check(iface: &InterfaceScattering, round_trips: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let converges = iface.r_d.norm() < 1.0 - 1e-4;
    for &wt in round_trips {
        let depth = wt / (2.0 * iface.k_d);
        let delayed = total_reflection_delay(iface.r_v, iface.phase + wt, iface.sector())?;
        let multiple = total_reflection_multiple(iface, depth)?;
        worst = worst.max((multiple - delayed).norm());
        if converges {
            worst = worst.max((total_reflection_bounces(iface, depth, MAX_BOUNCES) - delayed).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flux_examples() {
        let prop = |k| NormalWavevector { value: c(k, 0.0), sector: Sector::Propagating };
        assert_eq!(energy_flux(c(1.0, 0.0), c(1.0, 0.0), prop(1.0)), 0.0);
        assert_eq!(energy_flux(c(1.0, 0.0), c(0.0, 0.0), prop(2.0)), 2.0);
        let ev = NormalWavevector { value: c(0.0, 1.0), sector: Sector::Evanescent };
        assert_eq!(energy_flux(c(1.0, 0.0), c(0.0, 1.0), ev), 2.0);
    }

    #[test]
    fn transparent_interface_is_identity() {
        let s = InterfaceScattering::propagating(c(0.0, 0.0), 1.0, 1.0).unwrap();
        assert!((s.t_v - 1.0).norm() < 1e-15 && (s.t_d - 1.0).norm() < 1e-15);
        assert_eq!(s.r_d, c(0.0, 0.0));
    }

    #[test]
    fn unitarity_relations() {
        let s = InterfaceScattering::propagating(c(0.6, 0.0), 1.0, 2.0).unwrap();
        assert!((s.t_v.norm_sqr() - 0.32).abs() < 1e-15);
        assert!(s.unitarity_defect().unwrap() < 1e-12);
        let (k_v, k_d): (f64, f64) = (1.0, 2.0);
        let cross = s.r_v.conj() * s.t_d * (k_v / k_d).sqrt() + s.r_d * s.t_v.conj() * (k_d / k_v).sqrt();
        assert!(cross.norm() < 1e-15);
        let (rv, rd, tv, td) = s.reflectance_transmittance();
        assert!((rv - rd).abs() < 1e-15 && (tv - td).abs() < 1e-15 && (rv + tv - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gain_is_rejected() {
        assert!(matches!(InterfaceScattering::propagating(c(1.1, 0.0), 1.0, 1.0), Err(Error::Passivity(_))));
        assert!(matches!(InterfaceScattering::evanescent(c(0.3, -0.1), 1.0, 1.0), Err(Error::Passivity(_))));
    }

    #[test]
    fn evanescent_interface() {
        let s = InterfaceScattering::evanescent(c(0.3, 0.4), 1.0, 2.0).unwrap();
        assert!((s.t_v.norm_sqr() - 0.4).abs() < 1e-15);
        assert!((s.r_d.norm() - 1.0).abs() < 1e-15);
        for &(a, b) in &[(c(1.0, 0.0), c(0.0, 0.0)), (c(0.3, -1.2), c(2.0, 0.7))] {
            assert!(s.flux_imbalance(a, b).abs() < 1e-12);
        }
        let lossless = InterfaceScattering::evanescent(c(0.7, 0.0), 1.0, 2.0).unwrap();
        assert_eq!(lossless.t_v, c(0.0, 0.0));
    }

    #[test]
    fn multiple_reflections() {
        let s = InterfaceScattering::propagating(c(0.0, 0.0), 1.0, 1.0).unwrap();
        let r = total_reflection_multiple(&s, 0.3).unwrap();
        let expected = -s.t_v * s.t_d * Complex64::from_polar(1.0, 0.6);
        assert!((r - expected).norm() < 1e-15 && (r.norm() - 1.0).abs() < 1e-15);

        let s = InterfaceScattering::propagating(c(0.5, 0.0), 1.0, 1.5).unwrap();
        let r = total_reflection_multiple(&s, 1.0 / 1.5).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-12);

        let s = InterfaceScattering::evanescent(c(0.3, 0.4), 1.0, 2.0).unwrap();
        let r = total_reflection_multiple(&s, 0.35).unwrap();
        assert!(r.im.abs() < 1e-12);
    }

    #[test]
    fn resonance_is_reported() {
        // r_d = 1 and a quarter-wave depth make the denominator vanish.
        let s = InterfaceScattering::evanescent(c(0.3, 0.4), 1.0, 1.0).unwrap();
        assert!(matches!(total_reflection_multiple(&s, PI / 2.0), Err(Error::Resonance(_))));
    }

    #[test]
    fn delay_form_examples() {
        let phase = 0.8;
        let r = total_reflection_delay(c(0.0, 0.0), phase, Sector::Propagating).unwrap();
        assert!((r - Complex64::from_polar(1.0, phase)).norm() < 1e-15);
        for &p in &[0.0, 1.0, 2.5, -3.0] {
            let r = total_reflection_delay(c(0.42, 0.0), p, Sector::Evanescent).unwrap();
            assert!((r - 0.42).norm() < 1e-15);
        }
        let r = total_reflection_delay(c(0.5, 0.0), PI / 3.0, Sector::Propagating).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-12);
        assert!(matches!(total_reflection_delay(c(0.3, 0.4), PI, Sector::Evanescent), Err(Error::Pole { .. })));
        let lossless = c(0.6, 0.8);
        assert_eq!(total_reflection_delay(lossless, 1.3, Sector::Propagating).unwrap(), lossless);
    }

    #[test]
    fn delay_form_matches_explicit_ratio() {
        let r = c(0.3, -0.5);
        for k in 0..50 {
            let p = 0.13 * k as f64;
            let u = Complex64::from_polar(1.0, p);
            let direct = (r + u) / (1.0 + r.conj() * u);
            assert!((total_reflection_delay(r, p, Sector::Propagating).unwrap() - direct).norm() < 1e-14);
        }
        let r = c(0.3, 0.5);
        for k in 0..50 {
            let p = 0.13 * k as f64 + 0.01;
            let u = Complex64::from_polar(1.0, p);
            let direct = (r + r.conj() * u) / (1.0 + u);
            assert!((total_reflection_delay(r, p, Sector::Evanescent).unwrap() - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn equilibrium_coefficients() {
        let r = c(0.2, 0.5);
        let (a, b) = delay_coefficients(r, 0.7, Sector::Propagating);
        assert!((b - r.conj() * a).norm() < 1e-15);
        assert!((r.norm_sqr() + a.norm_sqr() - 1.0 - b.norm_sqr()).abs() < 1e-15);
        let (a, b) = delay_coefficients(r, 0.7, Sector::Evanescent);
        assert!((a - r.conj() * b).norm() < 1e-15);
    }

    #[test]
    fn constructions_agree() {
        let sweep: Vec<f64> = (0..200).map(|k| 0.05 + 0.031 * k as f64).collect();
        let s = InterfaceScattering::propagating(c(0.6, 0.1), 1.0, 3.0).unwrap();
        assert!(delay_consistency_check(&s, &sweep).unwrap() < 1e-12);
        let s = InterfaceScattering::evanescent(c(0.3, 0.4), 1.0, 2.0).unwrap();
        assert!(delay_consistency_check(&s, &sweep).unwrap() < 1e-12);
        let s = InterfaceScattering::evanescent(c(0.0, 0.0), 1.0, 2.0).unwrap();
        assert!(total_reflection_multiple(&s, 0.2).unwrap().norm() < 1e-15);
    }
}
