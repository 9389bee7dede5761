//! Real eigenfrequencies of the delayed cavity.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::local::Local;
use super::{CavityConfig, ModeWindow};
use crate::error::{Error, Result};
use crate::kinematics::{Polarization, Sector};

/// Samples allowed per window before the step is refused outright.
const MAX_SAMPLES: f64 = 5e7;

/// Eigenfrequencies in `[lo, hi)` of the window, ascending.
///
/// Propagating modes solve `arg(r₁ₜ r₂ₜ e^{2ik_vL}) = 2πℓ`, tracked as a
/// continuous phase sampled with an automatically chosen step. Evanescent
/// modes are sign changes of the real function `D_t·cos(φ₁/2)cos(φ₂/2)`.
pub fn find_modes(config: &CavityConfig, q: f64, pol: Polarization, window: ModeWindow) -> Result<Vec<f64>> {
    let local = Local::new(config, q, pol, window)?;
    modes_in(&local, None)
}

/// [`find_modes`] with a caller-chosen sampling step.
pub fn find_modes_with_step(
    config: &CavityConfig,
    q: f64,
    pol: Polarization,
    window: ModeWindow,
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::invalid(format!("step must be positive, got {step}")));
    }
    let local = Local::new(config, q, pol, window)?;
    modes_in(&local, Some(step))
}

pub(super) fn modes_in(local: &Local<'_>, step: Option<f64>) -> Result<Vec<f64>> {
    match local.sector {
        Sector::Propagating => propagating(local, step),
        Sector::Evanescent => evanescent(local, step),
    }
}

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    let n = ((hi - lo) / step).ceil().max(16.0);
    if n > MAX_SAMPLES {
        return Err(Error::StepTooCoarse { advance: PI / 2.0 * n / MAX_SAMPLES, required: step });
    }
    let n = n as usize;
    Ok((0..=n).map(|j| if j == n { hi } else { lo + (hi - lo) * j as f64 / n as f64 }).collect())
}

/// Phase of `r₁ₜ r₂ₜ e^{2ik_vL}` split into a part that is continuous by
/// construction and the raw argument of the lossless walls.
fn phase_parts(local: &Local<'_>, omega: f64) -> Result<(f64, f64)> {
    let mut smooth = 2.0 * local.normal(omega) * local.config.gap;
    let mut raw = 0.0;
    for w in &local.walls {
        let r = local.amplitude(w, omega)?;
        if w.lossless {
            raw += r.arg();
        } else {
            // arg[(r + u)/(1 + r* u)] = φ + 2 arg(1 + r e^{−iφ}), and Re(1 + r e^{−iφ}) > 0.
            let phi = w.mirror.round_trip_phase(omega);
            smooth += phi + 2.0 * (1.0 + r * Complex64::from_polar(1.0, -phi)).arg();
        }
    }
    Ok((smooth, raw))
}

fn propagating(local: &Local<'_>, step: Option<f64>) -> Result<Vec<f64>> {
    if local.walls.iter().any(|w| w.lossless && w.vacuum) {
        return Ok(Vec::new());
    }
    let (lo, hi) = (local.window.lo(), local.window.hi());
    let step = step.unwrap_or_else(|| {
        let mut rate = 0.0;
        for w in &local.walls {
            let m = w.r0.norm();
            rate += if w.lossless {
                w.dr.norm() / m
            } else {
                1.5 * w.mirror.phase_rate() * (1.0 + m) / (1.0 - m)
            };
        }
        let c = local.config.units.c();
        let k_min = local.normal(lo).max(local.normal(lo + 1e-3 * (hi - lo)));
        rate += local.gap_rate() * (hi / c) / k_min.max(1e-300);
        0.5 * PI / rate
    });
    let omegas = grid(lo, hi, step)?;
    let mut samples = Vec::with_capacity(omegas.len());
    let mut unwrapped = 0.0;
    let mut prev_raw = None;
    for &w in &omegas {
        let (smooth, raw) = phase_parts(local, w)?;
        unwrapped += match prev_raw {
            None => raw,
            Some(p) => wrap(raw - p),
        };
        prev_raw = Some(raw);
        samples.push((w, smooth, raw, smooth + unwrapped));
    }
    let mut roots = Vec::new();
    for pair in samples.windows(2) {
        let (a, _, raw_a, phi_a) = pair[0];
        let (b, _, _, phi_b) = pair[1];
        let advance = (phi_b - phi_a).abs();
        if advance > PI {
            return Err(Error::StepTooCoarse { advance, required: (b - a) * 0.5 * PI / advance });
        }
        let lossless_a = phi_a - pair[0].1;
        let level_at = |w: f64| -> Result<f64> {
            let (smooth, raw) = phase_parts(local, w)?;
            Ok(smooth + lossless_a + wrap(raw - raw_a))
        };
        let (lo_phi, hi_phi) = (phi_a.min(phi_b), phi_a.max(phi_b));
        let first = (lo_phi / (2.0 * PI)).ceil() as i64;
        let last = (hi_phi / (2.0 * PI)).ceil() as i64 - 1;
        for l in first..=last {
            let target = 2.0 * PI * l as f64;
            let root = solve(|w| Ok(level_at(w)? - target), a, b, phi_a - target, phi_b - target)?;
            roots.push(root);
        }
    }
    Ok(roots)
}

/// `g = Πcᵢ − ΠAᵢ e^{−2κL}`, real and equal to `D_t` times `Π cos(φᵢ/2)`.
fn evanescent_g(local: &Local<'_>, omega: f64) -> Result<f64> {
    let mut c = 1.0;
    let mut a = 1.0;
    for w in &local.walls {
        let r = local.amplitude(w, omega)?;
        if w.lossless {
            a *= r.re;
        } else {
            let half = Complex64::from_polar(1.0, -0.5 * w.mirror.round_trip_phase(omega));
            c *= half.re;
            a *= (r * half).re;
        }
    }
    Ok(c - a * (-2.0 * local.normal(omega) * local.config.gap).exp())
}

fn evanescent(local: &Local<'_>, step: Option<f64>) -> Result<Vec<f64>> {
    let (lo, hi) = (local.window.lo(), local.window.hi());
    let step = step.unwrap_or_else(|| 0.125 * PI / (local.delay_rate() + local.gap_rate()));
    let omegas = grid(lo, hi, step)?;
    let values = omegas.iter().map(|&w| evanescent_g(local, w)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for j in 0..omegas.len() - 1 {
        let (ga, gb) = (values[j], values[j + 1]);
        if ga == 0.0 {
            roots.push(omegas[j]);
        } else if ga * gb < 0.0 {
            roots.push(solve(|w| evanescent_g(local, w), omegas[j], omegas[j + 1], ga, gb)?);
        }
    }
    Ok(roots)
}

/// Bracketed root of `h` on `[a, b]` by Illinois false position.
fn solve<H>(h: H, mut a: f64, mut b: f64, mut ha: f64, mut hb: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    if ha == 0.0 {
        return Ok(a);
    }
    if hb == 0.0 {
        return Ok(b);
    }
    let mut side = 0;
    for _ in 0..200 {
        let mut x = (a * hb - b * ha) / (hb - ha);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let hx = h(x)?;
        if hx == 0.0 || (b - a) <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(x);
        }
        if (hx > 0.0) == (ha > 0.0) {
            a = x;
            ha = hx;
            if side == -1 {
                hb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            hb = hx;
            if side == 1 {
                ha *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::super::{dispersion_dt, DelayedMirror, Wall};
    use super::*;
    use crate::kinematics::{SpectralPoint, UnitSystem};
    use crate::mirrors::MirrorModel;

    const NAT: UnitSystem = UnitSystem::Natural { gap: 1.0 };

    fn cavity(r1: Complex64, r2: Complex64, t1: f64, t2: f64) -> CavityConfig {
        CavityConfig::new(
            DelayedMirror::new(Wall::Constant(r1), t1).unwrap(),
            DelayedMirror::new(Wall::Constant(r2), t2).unwrap(),
            1.0,
            NAT,
        )
        .unwrap()
    }

    #[test]
    fn vacuum_lattice() {
        let zero = Complex64::new(0.0, 0.0);
        let cav = cavity(zero, zero, 40.0, 60.0);
        let window = ModeWindow::new(1.0, 0.5).unwrap();
        let modes = find_modes(&cav, 0.0, Polarization::S, window).unwrap();
        let t = 100.0 + 2.0;
        let expected: Vec<f64> = (0..100)
            .map(|l| 2.0 * PI * l as f64 / t)
            .filter(|&w| w >= window.lo() && w < window.hi())
            .collect();
        assert_eq!(modes.len(), expected.len());
        for (a, b) in modes.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_fabry_perot() {
        let m = DelayedMirror::new(Wall::Model(MirrorModel::Perfect), 10.0).unwrap();
        let cav = CavityConfig::new(m.clone(), m, 1.0, NAT).unwrap();
        let modes = find_modes(&cav, 0.0, Polarization::P, ModeWindow::new(6.5, 11.0).unwrap()).unwrap();
        let expected: Vec<f64> = (1..=3).map(|l| l as f64 * PI).collect();
        assert_eq!(modes.len(), expected.len());
        for (a, b) in modes.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn propagating_roots_are_zeros_of_the_dispersion_function() {
        let cav = cavity(Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.4), 300.0, 170.0);
        let modes = find_modes(&cav, 0.4, Polarization::S, ModeWindow::new(1.0, 0.2).unwrap()).unwrap();
        assert!(modes.len() > 10);
        for &w in &modes {
            let d = dispersion_dt(&cav, &SpectralPoint::real(0.4, w, Polarization::S).unwrap()).unwrap();
            assert!(d.norm() < 1e-9, "|D_t({w})| = {}", d.norm());
        }
    }

    #[test]
    fn evanescent_roots_are_zeros_of_the_dispersion_function() {
        let cav = cavity(Complex64::new(0.3, 0.4), Complex64::new(0.5, 0.1), 300.0, 170.0);
        let modes = find_modes(&cav, 2.0, Polarization::P, ModeWindow::new(1.0, 0.2).unwrap()).unwrap();
        assert!(modes.len() > 5);
        for &w in &modes {
            let d = dispersion_dt(&cav, &SpectralPoint::real(2.0, w, Polarization::P).unwrap()).unwrap();
            assert!(d.norm() < 1e-9, "|D_t({w})| = {}", d.norm());
        }
    }

    #[test]
    fn coarse_step_is_refused() {
        let cav = cavity(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0), 1e4, 1e4);
        let r = find_modes_with_step(&cav, 0.0, Polarization::S, ModeWindow::new(1.0, 0.1).unwrap(), 1e-3);
        match r {
            Err(Error::StepTooCoarse { required, .. }) => assert!(required < 1e-3),
            other => panic!("{other:?}"),
        }
    }
}
