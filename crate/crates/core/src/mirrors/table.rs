//! Tabulated imaginary-axis data and its plain-text file format.
//!
//! Lines starting with `#` and blank lines are ignored. Permittivity files
//! have two columns `xi_rad_per_s eps_at_i_xi`; reflection files have four
//! columns `xi_rad_per_s Q_rad_per_m r_s r_p`. Frequencies must be strictly
//! increasing (reflection files: strictly increasing across blocks of equal
//! `xi`, with the same strictly increasing `Q` list in every block).

use std::path::{Path, PathBuf};

use super::permittivity::ImaginaryResponse;
use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::kinematics::Polarization;

/// Behaviour above the last tabulated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PermittivityTail {
    /// Queries past the grid are errors.
    None,
    /// `ε = 1 + A/ξ²`; `None` picks `A` so the tail joins the last sample.
    DrudeAsymptote(Option<f64>),
}

/// `ε(iξ)` on a strictly increasing grid, interpolated by a monotone
/// piecewise cubic in `ln ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPermittivity {
    log_xi: Vec<f64>,
    xi: Vec<f64>,
    eps: Vec<f64>,
    slopes: Vec<f64>,
    tail_coefficient: Option<f64>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_columns(path: &Path, line: usize, text: &str, n: usize) -> Result<Vec<f64>> {
    let cols: Vec<&str> = text.split_whitespace().collect();
    if cols.len() != n {
        return Err(Error::Parse { path: path.into(), line, message: format!("expected {n} columns, found {}", cols.len()) });
    }
    cols.iter()
        .map(|c| {
            c.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse { path: path.into(), line, message: format!("not a finite number: {c:?}") })
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })
}

/// Fritsch–Carlson slopes: zero at local extrema, weighted harmonic means elsewhere.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

impl TabulatedPermittivity {
    pub fn new(xi: Vec<f64>, eps: Vec<f64>, tail: PermittivityTail) -> Result<Self> {
        Self::build(xi, eps, tail, Path::new("<memory>"), &[])
    }

    fn build(xi: Vec<f64>, eps: Vec<f64>, tail: PermittivityTail, path: &Path, lines: &[usize]) -> Result<Self> {
        let line_of = |i: usize| lines.get(i).copied().unwrap_or(i + 1);
        if xi.len() < 2 || xi.len() != eps.len() {
            return Err(Error::Parse { path: path.into(), line: 0, message: "need at least two samples".into() });
        }
        for i in 0..xi.len() {
            if !(xi[i] > 0.0) {
                return Err(Error::Parse { path: path.into(), line: line_of(i), message: "xi must be positive".into() });
            }
            if !(eps[i] >= 1.0) {
                return Err(Error::Parse {
                    path: path.into(),
                    line: line_of(i),
                    message: format!("eps(i xi) must be real and >= 1, got {}", eps[i]),
                });
            }
            if i > 0 && xi[i] == xi[i - 1] {
                return Err(Error::Parse { path: path.into(), line: line_of(i), message: "duplicate row".into() });
            }
            if i > 0 && xi[i] < xi[i - 1] {
                return Err(Error::Parse { path: path.into(), line: line_of(i), message: "xi must be strictly increasing".into() });
            }
        }
        let log_xi: Vec<f64> = xi.iter().map(|x| x.ln()).collect();
        let slopes = monotone_slopes(&log_xi, &eps);
        let last = xi.len() - 1;
        let tail_coefficient = match tail {
            PermittivityTail::None => None,
            PermittivityTail::DrudeAsymptote(Some(a)) => {
                if !(a >= 0.0) {
                    return Err(Error::invalid(format!("tail coefficient must be >= 0, got {a}")));
                }
                Some(a)
            }
            PermittivityTail::DrudeAsymptote(None) => Some((eps[last] - 1.0) * xi[last] * xi[last]),
        };
        Ok(Self { log_xi, xi, eps, slopes, tail_coefficient })
    }

    pub fn from_str(text: &str, path: &Path, tail: PermittivityTail) -> Result<Self> {
        let mut xi = Vec::new();
        let mut eps = Vec::new();
        let mut lines = Vec::new();
        for (line, l) in data_lines(text) {
            let c = parse_columns(path, line, l, 2)?;
            xi.push(c[0]);
            eps.push(c[1]);
            lines.push(line);
        }
        Self::build(xi, eps, tail, path, &lines)
    }

    pub fn from_path(path: impl AsRef<Path>, tail: PermittivityTail) -> Result<Self> {
        let path = path.as_ref();
        Self::from_str(&read(path)?, path, tail)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xi[0], *self.xi.last().unwrap())
    }

    pub(crate) fn imaginary_response<S: Scalar>(&self, xi: S) -> Result<ImaginaryResponse<S>> {
        let x = xi.value();
        let (lo, hi) = self.range();
        if x > hi {
            if let Some(a) = self.tail_coefficient {
                let x2 = xi * xi;
                return Ok(ImaginaryResponse { eps_inv: x2 / (x2 + a), chi_xi2: S::constant(a) });
            }
        }
        if !(x >= lo && x <= hi) {
            return Err(Error::Extrapolation { xi: x, lo, hi });
        }
        let t = xi.ln();
        let tv = t.value();
        let k = match self.log_xi.binary_search_by(|p| p.total_cmp(&tv)) {
            Ok(i) => i.min(self.xi.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xi.len() - 2),
        };
        let h = self.log_xi[k + 1] - self.log_xi[k];
        let s = (t - self.log_xi[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = s3 * 2.0 - s2 * 3.0 + 1.0;
        let h10 = s3 - s2 * 2.0 + s;
        let h01 = s2 * 3.0 - s3 * 2.0;
        let h11 = s3 - s2;
        let eps = h00 * self.eps[k] + h10 * (h * self.slopes[k]) + h01 * self.eps[k + 1] + h11 * (h * self.slopes[k + 1]);
        Ok(ImaginaryResponse { eps_inv: eps.recip(), chi_xi2: xi * xi * (eps - 1.0) })
    }
}

/// What a [`ReflectionTable`] does for points outside its grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutOfRange {
    Error,
    ClampToEdge,
}

/// Imaginary-axis reflection amplitudes on a rectangular `(ξ, Q)` grid,
/// interpolated bilinearly.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionTable {
    xi: Vec<f64>,
    q: Vec<f64>,
    // Row-major over (xi, q).
    rs: Vec<f64>,
    rp: Vec<f64>,
    out_of_range: OutOfRange,
    source: PathBuf,
}

impl ReflectionTable {
    pub fn from_str(text: &str, path: &Path, out_of_range: OutOfRange) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { path: path.into(), line, message };
        let mut xi: Vec<f64> = Vec::new();
        let mut q: Vec<f64> = Vec::new();
        let mut rs = Vec::new();
        let mut rp = Vec::new();
        let mut block_q: Vec<f64> = Vec::new();
        let mut last_line = 0;
        let close_block = |block_q: &mut Vec<f64>, q: &mut Vec<f64>, line: usize| -> Result<()> {
            if q.is_empty() {
                *q = std::mem::take(block_q);
            } else if *block_q != *q {
                return Err(err(line, "every xi block must list the same Q values".into()));
            } else {
                block_q.clear();
            }
            Ok(())
        };
        for (line, l) in data_lines(text) {
            let c = parse_columns(path, line, l, 4)?;
            let (x, qq, s, p) = (c[0], c[1], c[2], c[3]);
            if x < 0.0 || qq < 0.0 {
                return Err(err(line, "xi and Q must be >= 0".into()));
            }
            if s.abs() > 1.0 || p.abs() > 1.0 {
                return Err(err(line, format!("reflection amplitudes must satisfy |r| <= 1, got {s}, {p}")));
            }
            match xi.last() {
                Some(&prev) if x == prev => {
                    let last_q = *block_q.last().unwrap();
                    if qq == last_q {
                        return Err(err(line, "duplicate row".into()));
                    }
                    if qq < last_q {
                        return Err(err(line, "Q must be strictly increasing within an xi block".into()));
                    }
                }
                Some(&prev) if x < prev => return Err(err(line, "xi must be strictly increasing".into())),
                Some(_) => {
                    close_block(&mut block_q, &mut q, line)?;
                    xi.push(x);
                }
                None => xi.push(x),
            }
            block_q.push(qq);
            rs.push(s);
            rp.push(p);
            last_line = line;
        }
        if xi.is_empty() {
            return Err(err(0, "no data rows".into()));
        }
        close_block(&mut block_q, &mut q, last_line)?;
        if xi.len() < 2 || q.len() < 2 {
            return Err(err(last_line, "need at least two xi values and two Q values".into()));
        }
        Ok(Self { xi, q, rs, rp, out_of_range, source: path.into() })
    }

    pub fn from_path(path: impl AsRef<Path>, out_of_range: OutOfRange) -> Result<Self> {
        let path = path.as_ref();
        Self::from_str(&read(path)?, path, out_of_range)
    }

    pub fn source(&self) -> &Path {
        &self.source
    }

    fn locate(&self, grid: &[f64], x: f64) -> Result<(usize, f64)> {
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        let x = if x < lo || x > hi {
            match self.out_of_range {
                OutOfRange::Error => return Err(Error::Extrapolation { xi: x, lo, hi }),
                OutOfRange::ClampToEdge => x.clamp(lo, hi),
            }
        } else {
            x
        };
        let k = match grid.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(grid.len() - 2),
        };
        Ok((k, x))
    }

    /// Bilinear interpolation; generic in `ξ` so derivatives pass through.
    pub fn amplitude<S: Scalar>(&self, q: f64, xi: S, polarization: Polarization) -> Result<S> {
        let (i, xv) = self.locate(&self.xi, xi.value())?;
        let (j, qv) = self.locate(&self.q, q)?;
        let data = match polarization {
            Polarization::S => &self.rs,
            Polarization::P => &self.rp,
        };
        let nq = self.q.len();
        let at = |a: usize, b: usize| data[a * nq + b];
        let u = (qv - self.q[j]) / (self.q[j + 1] - self.q[j]);
        let lower = at(i, j) * (1.0 - u) + at(i, j + 1) * u;
        let upper = at(i + 1, j) * (1.0 - u) + at(i + 1, j + 1) * u;
        let span = self.xi[i + 1] - self.xi[i];
        // Clamped points have no ξ dependence.
        let t = if xv != xi.value() { S::constant((xv - self.xi[i]) / span) } else { (xi - self.xi[i]) / span };
        Ok(t * (upper - lower) + lower)
    }
}
