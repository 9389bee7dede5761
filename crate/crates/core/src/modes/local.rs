//! A cavity frozen onto one analysis window.

use num_complex::Complex64;

use super::{is_lossless, CavityConfig, DelayedMirror, ModeWindow};
use crate::error::{Error, Result};
use crate::kinematics::{Polarization, Sector};
use crate::mirrors::passivity_check;

/// Largest `|d ln r/dω|·Δω` a window may span.
pub(super) const WINDOW_SMALLNESS: f64 = 0.01;

pub(super) struct LocalWall<'a> {
    pub mirror: &'a DelayedMirror,
    pub vacuum: bool,
    pub lossless: bool,
    /// Amplitude and its slope at the window center.
    pub r0: Complex64,
    pub dr: Complex64,
}

pub(super) struct Local<'a> {
    pub config: &'a CavityConfig,
    pub q: f64,
    pub pol: Polarization,
    pub sector: Sector,
    pub window: ModeWindow,
    pub walls: [LocalWall<'a>; 2],
}

impl<'a> Local<'a> {
    pub fn new(config: &'a CavityConfig, q: f64, pol: Polarization, window: ModeWindow) -> Result<Self> {
        let light = q * config.units.c();
        let sector = if window.lo() >= light {
            Sector::Propagating
        } else if window.hi() <= light {
            Sector::Evanescent
        } else {
            return Err(Error::Window(format!(
                "[{:e}, {:e}] straddles the light line at {light:e}",
                window.lo(),
                window.hi()
            )));
        };
        let wall = |mirror: &'a DelayedMirror| -> Result<LocalWall<'a>> {
            let amp = |w: f64| mirror.wall.amplitude(q, w, pol, config.units);
            let r0 = amp(window.center)?;
            passivity_check(r0, sector)?;
            let h = 1e-3 * window.width;
            let dr = match mirror.wall {
                super::Wall::Constant(_) => Complex64::new(0.0, 0.0),
                super::Wall::Model(_) => (amp(window.center + h)? - amp(window.center - h)?) / (2.0 * h),
            };
            let drift = if r0.norm() > 0.0 { dr.norm() / r0.norm() } else { dr.norm() } * window.width;
            if drift >= WINDOW_SMALLNESS {
                return Err(Error::Window(format!(
                    "the wall amplitude changes by {drift:.3e} (relative) across the window; narrow it below {:e}",
                    window.width * WINDOW_SMALLNESS / drift
                )));
            }
            Ok(LocalWall { mirror, vacuum: false, lossless: is_lossless(r0, sector), r0, dr })
        };
        let walls = [wall(&config.mirror1)?, wall(&config.mirror2)?];
        Ok(Self { config, q, pol, sector, window, walls })
    }

    /// The same window with transparent walls and unchanged delays.
    pub fn vacuum(&self) -> Self {
        let blank = |w: &LocalWall<'a>| LocalWall {
            mirror: w.mirror,
            vacuum: true,
            lossless: w.lossless,
            r0: Complex64::new(0.0, 0.0),
            dr: Complex64::new(0.0, 0.0),
        };
        Self {
            config: self.config,
            q: self.q,
            pol: self.pol,
            sector: self.sector,
            window: self.window,
            walls: [blank(&self.walls[0]), blank(&self.walls[1])],
        }
    }

    pub fn amplitude(&self, wall: &LocalWall<'_>, omega: f64) -> Result<Complex64> {
        if wall.vacuum {
            return Ok(Complex64::new(0.0, 0.0));
        }
        wall.mirror.wall.amplitude(self.q, omega, self.pol, self.config.units)
    }

    /// Sum of the phase rates `|dφᵢ/dω|` of the delayed walls.
    pub fn delay_rate(&self) -> f64 {
        self.walls.iter().filter(|w| !w.lossless).map(|w| w.mirror.phase_rate()).sum()
    }

    /// `2L/c`, the rate of the gap round-trip phase away from the light line.
    pub fn gap_rate(&self) -> f64 {
        2.0 * self.config.gap / self.config.units.c()
    }

    /// `k_v` (propagating) or `κ` (evanescent) at a real frequency.
    pub fn normal(&self, omega: f64) -> f64 {
        let c = self.config.units.c();
        let z = (omega / c).powi(2) - self.q * self.q;
        match self.sector {
            Sector::Propagating => z.max(0.0).sqrt(),
            Sector::Evanescent => (-z).max(0.0).sqrt(),
        }
    }

    /// Analytic counting function whose zeros are the modes of the delayed cavity.
    ///
    /// Built from first-order surrogates of `r` and `r*` about the window
    /// center, since `r*` itself is not analytic.
    pub fn counting_function(&self, z: Complex64) -> Complex64 {
        let c = self.config.units.c();
        let i = Complex64::i();
        let zc = z / c;
        let round_trip = match self.sector {
            Sector::Propagating => (2.0 * i * self.config.gap * (zc * zc - self.q * self.q).sqrt()).exp(),
            Sector::Evanescent => (-2.0 * self.config.gap * (self.q * self.q - zc * zc).sqrt()).exp(),
        };
        let mut den = Complex64::new(1.0, 0.0);
        let mut num = Complex64::new(1.0, 0.0);
        for w in &self.walls {
            let dz = z - self.window.center;
            let r = w.r0 + dz * w.dr;
            if w.lossless {
                num *= r;
                continue;
            }
            let rc = w.r0.conj() + dz * w.dr.conj();
            let m = w.mirror;
            let u = (i * (m.phase_offset + (m.phase_slope + m.delay) * z)).exp();
            match self.sector {
                Sector::Propagating => {
                    num *= r + u;
                    den *= 1.0 + rc * u;
                }
                Sector::Evanescent => {
                    num *= r + rc * u;
                    den *= 1.0 + u;
                }
            }
        }
        den - num * round_trip
    }
}
