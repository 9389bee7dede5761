//! Mode counting by the argument principle and the density-of-states census.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::local::Local;
use super::roots::modes_in;
use super::{CavityConfig, ModeWindow};
use crate::error::{Error, Result};
use crate::kinematics::{Polarization, Sector};

/// Contour retries allowed when it passes too close to a zero.
const MAX_NUDGES: usize = 5;

/// Largest phase increment accepted between neighbouring contour samples.
const MAX_PHASE_STEP: f64 = 0.5;

/// One census of a window against the density of states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DosResult {
    pub omega_bar: f64,
    /// Wall density of states at the window center.
    pub rho: f64,
    /// Census estimate `(N − N₀)/Δω` from the smoothed count.
    pub estimate: f64,
    /// `|estimate − rho|`.
    pub deviation: f64,
    /// Integer mode counts with the real walls and with transparent walls.
    pub modes: usize,
    pub vacuum_modes: usize,
    /// Whether `Δω·(T₁ + T₂)` exceeds 10³.
    pub resolved: bool,
}

impl DosResult {
    /// `N − N₀`.
    pub fn excess_modes(&self) -> i64 {
        self.modes as i64 - self.vacuum_modes as i64
    }
}

struct NearZero;

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// Change of `arg f` along the segment `a → b`, refining wherever the phase moves too fast.
fn segment_phase<F>(f: &F, a: Complex64, b: Complex64, rate: f64) -> std::result::Result<f64, NearZero>
where
    F: Fn(Complex64) -> Complex64,
{
    let eval = |z: Complex64| {
        let v = f(z);
        if v.norm() < 1e-280 || !v.re.is_finite() || !v.im.is_finite() {
            Err(NearZero)
        } else {
            Ok(v)
        }
    };
    let n = ((b - a).norm() * rate / MAX_PHASE_STEP).ceil().clamp(8.0, 1e8) as usize;
    let mut total = 0.0;
    let mut za = a;
    let mut fa = eval(a)?;
    for j in 1..=n {
        let zb = if j == n { b } else { a + (b - a) * (j as f64 / n as f64) };
        let fb = eval(zb)?;
        total += refine(&eval, za, fa, zb, fb, 40)?;
        za = zb;
        fa = fb;
    }
    Ok(total)
}

fn refine<E>(eval: &E, za: Complex64, fa: Complex64, zb: Complex64, fb: Complex64, depth: u32) -> std::result::Result<f64, NearZero>
where
    E: Fn(Complex64) -> std::result::Result<Complex64, NearZero>,
{
    let d = wrap(fb.arg() - fa.arg());
    if d.abs() <= MAX_PHASE_STEP {
        return Ok(d);
    }
    if depth == 0 || (zb - za).norm() <= 1e-12 * za.norm().max(1e-300) {
        return Err(NearZero);
    }
    let zm = 0.5 * (za + zb);
    let fm = eval(zm)?;
    Ok(refine(eval, za, fa, zm, fm, depth - 1)? + refine(eval, zm, fm, zb, fb, depth - 1)?)
}

fn sampling_rate(local: &Local<'_>, eta: f64) -> f64 {
    local.delay_rate() + local.gap_rate() + 1.0 / eta
}

fn winding(local: &Local<'_>, lo: f64, hi: f64, eta: f64) -> std::result::Result<f64, NearZero> {
    let f = |z: Complex64| local.counting_function(z);
    let rate = sampling_rate(local, eta);
    let corners = [
        Complex64::new(lo, -eta),
        Complex64::new(hi, -eta),
        Complex64::new(hi, eta),
        Complex64::new(lo, eta),
    ];
    let mut total = 0.0;
    for i in 0..4 {
        total += segment_phase(&f, corners[i], corners[(i + 1) % 4], rate)?;
    }
    Ok(total / (2.0 * PI))
}

fn contour_count(local: &Local<'_>) -> Result<usize> {
    let w = local.window;
    let rate = local.delay_rate() + local.gap_rate();
    let eta0 = (0.25 * w.width).min(4.0 / rate.max(f64::MIN_POSITIVE));
    for attempt in 0..=MAX_NUDGES {
        let shift = attempt as f64 * 1e-9 * w.width;
        let eta = eta0 * (1.0 + 0.1 * attempt as f64);
        if let Ok(n) = winding(local, w.lo() + shift, w.hi() + shift, eta) {
            let rounded = n.round();
            if (n - rounded).abs() < 0.05 && rounded >= 0.0 {
                return Ok(rounded as usize);
            }
        }
    }
    Err(Error::ContourNudge(MAX_NUDGES))
}

/// Number of modes in the window from the winding of the analytic counting
/// function around a rectangle enclosing it.
pub fn count_modes_argument_principle(config: &CavityConfig, q: f64, pol: Polarization, window: ModeWindow) -> Result<usize> {
    contour_count(&Local::new(config, q, pol, window)?)
}

/// `(1/2π)[Δarg f(ω − iη) − Δarg f(ω + iη)]` across the window.
///
/// This is the contour count without the short vertical sides, which carry
/// the order-one fluctuation of the integer count.
fn open_count(local: &Local<'_>, eta: f64) -> Result<f64> {
    let f = |z: Complex64| local.counting_function(z);
    let (lo, hi) = (local.window.lo(), local.window.hi());
    for attempt in 0..=MAX_NUDGES {
        let e = eta * (1.0 + 0.1 * attempt as f64);
        let rate = sampling_rate(local, e);
        let below = segment_phase(&f, Complex64::new(lo, -e), Complex64::new(hi, -e), rate);
        let above = segment_phase(&f, Complex64::new(lo, e), Complex64::new(hi, e), rate);
        if let (Ok(b), Ok(a)) = (below, above) {
            return Ok((b - a) / (2.0 * PI));
        }
    }
    Err(Error::ContourNudge(MAX_NUDGES))
}

/// Modes of the transparent-wall reference.
fn vacuum_count(vacuum: &Local<'_>) -> Result<usize> {
    match vacuum.sector {
        Sector::Propagating => Ok(modes_in(vacuum, None)?.len()),
        Sector::Evanescent => {
            // Zeros of Π(1 + e^{iφᵢ}): each delayed wall contributes the lattice φᵢ ≡ π.
            let (lo, hi) = (vacuum.window.lo(), vacuum.window.hi());
            let mut n = 0;
            for w in vacuum.walls.iter().filter(|w| !w.lossless) {
                let (a, b) = (w.mirror.round_trip_phase(lo), w.mirror.round_trip_phase(hi));
                let level = |p: f64| ((p - PI) / (2.0 * PI)).ceil() as i64;
                n += (level(a.max(b)) - level(a.min(b))).unsigned_abs() as usize;
            }
            Ok(n)
        }
    }
}

/// Census of one window: integer counts, smoothed estimate of `ρ` and its deviation from [`super::wall_dos`].
pub fn census(config: &CavityConfig, q: f64, pol: Polarization, window: ModeWindow) -> Result<DosResult> {
    let local = Local::new(config, q, pol, window)?;
    let vacuum = local.vacuum();
    let rho = config.wall_dos(q, pol, window.center)?;
    let delay = local.delay_rate();
    let eta = if delay > 0.0 { (0.1 * window.width).min(30.0 / delay) } else { 0.1 * window.width };
    let estimate = (open_count(&local, eta)? - open_count(&vacuum, eta)?) / window.width;
    Ok(DosResult {
        omega_bar: window.center,
        rho,
        estimate,
        deviation: (estimate - rho).abs(),
        modes: modes_in(&local, None)?.len(),
        vacuum_modes: vacuum_count(&vacuum)?,
        resolved: window.width * delay > 1e3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusRow {
    /// Common delay of both walls.
    pub delay: f64,
    pub result: DosResult,
    /// Argument-principle count of the same window.
    pub contour_modes: usize,
    /// Census with both slow phases shifted.
    pub shifted: DosResult,
}

impl CensusRow {
    /// Whether the two independent counts agree.
    pub fn counts_agree(&self) -> bool {
        self.contour_modes == self.result.modes
    }

    /// Change of `N − N₀` under the phase shift.
    pub fn shift_change(&self) -> i64 {
        self.shifted.excess_modes() - self.result.excess_modes()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusStudy {
    pub rows: Vec<CensusRow>,
    /// Deviations never grow by more than the counting quantum `1/(Δω·ΣT)`.
    pub monotone: bool,
}

/// Census of one window for each delay (applied to both walls), with and
/// without a shift of the slow phases.
pub fn dos_census_study(
    config: &CavityConfig,
    q: f64,
    pol: Polarization,
    window: ModeWindow,
    delays: &[f64],
    phase_shift: f64,
) -> Result<CensusStudy> {
    let rows = delays
        .par_iter()
        .map(|&t| {
            let cfg = config.with_delays(t, t)?;
            Ok(CensusRow {
                delay: t,
                result: census(&cfg, q, pol, window)?,
                contour_modes: count_modes_argument_principle(&cfg, q, pol, window)?,
                shifted: census(&cfg.with_phase_shift(phase_shift), q, pol, window)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|p| {
        let quantum = 1.0 / (window.width * 2.0 * p[1].delay);
        p[1].result.deviation <= p[0].result.deviation + quantum
    });
    Ok(CensusStudy { rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::super::{find_modes, DelayedMirror, Wall};
    use super::*;
    use crate::kinematics::UnitSystem;

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
    fn contour_agrees_with_root_finder() {
        let cases = [
            (Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.4), 0.0),
            (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0), 0.7),
            (Complex64::new(0.3, 0.4), Complex64::new(0.5, 0.1), 2.0),
        ];
        for (r1, r2, q) in cases {
            let cav = cavity(r1, r2, 300.0, 170.0);
            let window = ModeWindow::new(1.0, 0.2).unwrap();
            let roots = find_modes(&cav, q, Polarization::S, window).unwrap();
            let n = count_modes_argument_principle(&cav, q, Polarization::S, window).unwrap();
            assert_eq!(n, roots.len(), "r1 = {r1}, Q = {q}");
        }
    }

    #[test]
    fn counts_are_additive() {
        let cav = cavity(Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.4), 500.0, 230.0);
        let whole = count_modes_argument_principle(&cav, 0.0, Polarization::P, ModeWindow::new(1.0, 0.2).unwrap()).unwrap();
        let left = count_modes_argument_principle(&cav, 0.0, Polarization::P, ModeWindow::new(0.95, 0.1).unwrap()).unwrap();
        let right = count_modes_argument_principle(&cav, 0.0, Polarization::P, ModeWindow::new(1.05, 0.1).unwrap()).unwrap();
        assert_eq!(whole, left + right);
    }

    #[test]
    fn vacuum_census_is_empty() {
        let zero = Complex64::new(0.0, 0.0);
        for q in [0.0, 2.0] {
            let r = census(&cavity(zero, zero, 400.0, 300.0), q, Polarization::S, ModeWindow::new(1.0, 0.1).unwrap()).unwrap();
            assert_eq!(r.excess_modes(), 0);
            assert_eq!(r.estimate, 0.0);
            assert_eq!(r.rho, 0.0);
        }
    }

    #[test]
    fn evanescent_census_tracks_the_density_of_states() {
        let cav = cavity(Complex64::new(0.3, 0.4), Complex64::new(0.5, 0.1), 3000.0, 1700.0);
        let r = census(&cav, 1.5, Polarization::S, ModeWindow::new(1.0, 0.1).unwrap()).unwrap();
        assert!(r.deviation < 0.05 * r.rho.abs(), "{r:?}");
    }
}
