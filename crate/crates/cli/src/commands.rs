use std::f64::consts::PI;
use std::path::PathBuf;

use cavity_casimir::fictitious::{
    delay_consistency_check, InterfaceScattering, DEFAULT_EVANESCENT_PHASE, DEFAULT_PROPAGATING_PHASE,
};
use cavity_casimir::lifshitz::{
    casimir_pressure, entropy, entropy_finite_difference, free_energy, ground_state_energy, internal_energy,
    pressure_finite_difference, printed_force_diagnostic, PlanarCavity, QuadratureSpec, FD_TOLERANCE,
};
use cavity_casimir::modes::{
    census, count_modes_argument_principle, find_modes, CavityConfig, DelayedMirror, ModeWindow, Wall,
};
use cavity_casimir::quadrature::Estimate;
use cavity_casimir::{MirrorModel, Polarization, Sector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::args::{Cavity, Common, DosArgs, ModesArgs, SmatrixArgs, ThermoArgs};
use crate::error::{CliError, CliResult};
use crate::mirror_spec::parse_mirror;
use crate::output::{Cell, Format, Table, VERSION};
use crate::settings::{self, count, number, positive, scalar_or_sweep, Settings};
use crate::units::{Units, DEFAULT_LENGTH_UNIT};

/// Records plus any numerical flags raised while producing them.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub flags: Vec<String>,
}

/// Resolved output and accuracy settings.
pub struct Run {
    pub settings: Settings,
    pub units: Units,
    pub quad: QuadratureSpec,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pool: rayon::ThreadPool,
}

impl Run {
    pub fn new(c: &Common) -> CliResult<Self> {
        let settings = Settings::new(c.config.as_deref())?;
        let length = settings.parse("length-unit", &c.length_unit, positive)?.unwrap_or(DEFAULT_LENGTH_UNIT);
        let units = settings
            .parse("units", &c.units, |s| Units::parse(s, length))?
            .unwrap_or(Units::Si);
        let tol = settings.parse("tol", &c.tol, |s| {
            let v = positive(s)?;
            QuadratureSpec::with_rel_tol(v).map_err(|e| e.to_string())?;
            Ok(v)
        })?;
        let quad = tol.map_or(Ok(QuadratureSpec::default()), QuadratureSpec::with_rel_tol)?;
        let format = settings.parse("format", &c.format, Format::parse)?.unwrap_or(Format::Csv);
        let out = settings.get("out", &c.out).map(|s| s.resolve(&s.value));
        let jobs = settings.parse("jobs", &c.jobs, count)?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = jobs {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::config(format!("--jobs: {e}")))?;
        Ok(Self { settings, units, tol: quad.rel_tol, quad, format, out, pool })
    }

    /// `f` over `items` on the worker pool; results stay in input order.
    fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> CliResult<R> + Sync + Send) -> CliResult<Vec<R>> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    fn mirror(&self, key: &str, flag: &Option<String>) -> CliResult<(String, MirrorModel)> {
        let src = self.settings.get(key, flag).ok_or_else(|| CliError::config(format!("--{key} is required")))?;
        Ok((src.value.trim().to_string(), parse_mirror(&src, self.units)?))
    }

    fn single_gap(&self, cavity: &Cavity) -> CliResult<f64> {
        if let Some(s) = self.settings.get("gap-sweep", &cavity.gap_sweep) {
            return Err(s.error("this command takes a single --gap"));
        }
        self.settings.require("gap", &cavity.gap, positive)
    }

    fn polarization(&self, flag: &Option<String>) -> CliResult<Polarization> {
        Ok(self
            .settings
            .parse("polarization", flag, |s| match s {
                "s" | "S" => Ok(Polarization::S),
                "p" | "P" => Ok(Polarization::P),
                other => Err(format!("polarization must be `s` or `p`, got `{other}`")),
            })?
            .unwrap_or(Polarization::S))
    }

    /// Walls from `--r-product` or from the two mirror specs, with their labels.
    fn walls(&self, cavity: &Cavity, r_product: &Option<String>) -> CliResult<([String; 2], [Wall; 2])> {
        match self.settings.get("r-product", r_product) {
            Some(src) => {
                for (key, flag) in [("mirror1", &cavity.mirror1), ("mirror2", &cavity.mirror2)] {
                    if let Some(m) = self.settings.get(key, flag) {
                        return Err(CliError::config(format!("{} and {} are mutually exclusive", src.origin, m.origin)));
                    }
                }
                let p = src.parse(|s| {
                    let p = number(s)?;
                    if p.abs() > 1.0 {
                        return Err(format!("|r1 r2| must not exceed 1, got {p}"));
                    }
                    Ok(p)
                })?;
                let r = p.abs().sqrt();
                let label = format!("constant:r={r}");
                let sign = if p < 0.0 { -1.0 } else { 1.0 };
                Ok((
                    [label.clone(), format!("constant:r={}", sign * r)],
                    [Wall::Constant(Complex64::new(r, 0.0)), Wall::Constant(Complex64::new(sign * r, 0.0))],
                ))
            }
            None => {
                let (l1, m1) = self.mirror("mirror1", &cavity.mirror1)?;
                let (l2, m2) = self.mirror("mirror2", &cavity.mirror2)?;
                Ok(([l1, l2], [Wall::Model(m1), Wall::Model(m2)]))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Force,
    Energy,
    FreeEnergy,
    Entropy,
}

fn label(name: &str, unit: &str) -> String {
    format!("{name} [{unit}]")
}

/// `|a − b|` beyond `rel·|a|` plus both error estimates.
fn disagree(a: Estimate, b: Estimate, rel: f64) -> bool {
    !((a.value - b.value).abs() <= rel * a.value.abs() + a.error + b.error)
}

pub fn thermo(quantity: Quantity, args: &ThermoArgs) -> CliResult<(Run, Outcome)> {
    let run = Run::new(&args.common)?;
    let u = run.units;
    let (name1, m1) = run.mirror("mirror1", &args.cavity.mirror1)?;
    let (name2, m2) = run.mirror("mirror2", &args.cavity.mirror2)?;
    let gaps = scalar_or_sweep(&run.settings, "gap", &args.cavity.gap, "gap-sweep", &args.cavity.gap_sweep, positive)?;
    let temps = scalar_or_sweep(
        &run.settings,
        "temperature",
        &args.temperature,
        "temperature-sweep",
        &args.temperature_sweep,
        settings::non_negative,
    )?;
    let points: Vec<(f64, f64)> = gaps.iter().flat_map(|&l| temps.iter().map(move |&t| (l, t))).collect();

    let mut columns = vec![
        "mirror1".to_string(),
        "mirror2".to_string(),
        "units".to_string(),
        label("gap", u.length_label()),
        label("temperature", u.temperature_label()),
        "tol".to_string(),
    ];
    let outputs: Vec<String> = match quantity {
        Quantity::Force => vec![
            label("pressure (negative = attraction)", u.pressure_label()),
            label("pressure_err", u.pressure_label()),
            label("pressure_fd", u.pressure_label()),
            label("pressure_fd_err", u.pressure_label()),
            label("pressure_printed_prefactor", u.pressure_label()),
        ],
        Quantity::Energy => vec![
            label("internal_energy", u.energy_label()),
            label("internal_energy_err", u.energy_label()),
            label("internal_energy_direct", u.energy_label()),
            label("internal_energy_direct_err", u.energy_label()),
            label("free_energy", u.energy_label()),
        ],
        Quantity::FreeEnergy => vec![
            label("free_energy", u.energy_label()),
            label("free_energy_err", u.energy_label()),
            label("ground_state_energy", u.energy_label()),
            label("ground_state_energy_err", u.energy_label()),
        ],
        Quantity::Entropy => vec![
            label("entropy", u.entropy_label()),
            label("entropy_err", u.entropy_label()),
            label("entropy_fd", u.entropy_label()),
            label("entropy_fd_err", u.entropy_label()),
        ],
    };
    columns.extend(outputs);
    columns.push("flag".into());
    columns.push("version".into());

    let quad = run.quad;
    let rows = run.map(&points, |&(gap, t)| {
        let cav = PlanarCavity::new(m1.clone(), m2.clone(), u.length_to_si(gap))?;
        let t_si = u.temperature_to_si(t);
        let at = |e: CliError| match e {
            CliError::Numerical(m) => CliError::Numerical(format!("gap {gap:e}, temperature {t:e}: {m}")),
            other => other,
        };
        let compute = || -> CliResult<(Vec<Cell>, Option<String>)> {
            let es = |e: Estimate, conv: &dyn Fn(f64) -> f64| -> [Cell; 2] { [conv(e.value).into(), conv(e.error).into()] };
            Ok(match quantity {
                Quantity::Force => {
                    let p = casimir_pressure(&cav, t_si, &quad)?;
                    let fd = pressure_finite_difference(&cav, t_si, &quad)?;
                    let conv = |v| u.pressure_from_si(v);
                    let flag = disagree(p, fd, FD_TOLERANCE)
                        .then(|| format!("pressure {:e} Pa vs finite difference {:e} Pa", p.value, fd.value));
                    let mut c = es(p, &conv).to_vec();
                    c.extend(es(fd, &conv));
                    c.push(conv(printed_force_diagnostic(p).value).into());
                    (c, flag)
                }
                Quantity::Energy => {
                    let e = internal_energy(&cav, t_si, &quad)?;
                    let f = free_energy(&cav, t_si, &quad)?;
                    let conv = |v| u.energy_from_si(v);
                    let flag = disagree(e.direct, e.primary, 1e-6 * f.value.abs() / e.direct.value.abs().max(f64::MIN_POSITIVE))
                        .then(|| format!("internal energy F + TS = {:e} vs direct {:e} J/m^2", e.primary.value, e.direct.value));
                    let mut c = es(e.primary, &conv).to_vec();
                    c.extend(es(e.direct, &conv));
                    c.push(conv(f.value).into());
                    (c, flag)
                }
                Quantity::FreeEnergy => {
                    let f = free_energy(&cav, t_si, &quad)?;
                    let g = if t_si == 0.0 { f } else { ground_state_energy(&cav, &quad)? };
                    let conv = |v| u.energy_from_si(v);
                    let mut c = es(f, &conv).to_vec();
                    c.extend(es(g, &conv));
                    (c, None)
                }
                Quantity::Entropy => {
                    let s = entropy(&cav, t_si, &quad)?;
                    let conv = |v| u.entropy_from_si(v);
                    let mut c = es(s, &conv).to_vec();
                    if t_si > 0.0 {
                        let fd = entropy_finite_difference(&cav, t_si, &quad)?;
                        c.extend(es(fd, &conv));
                        let flag = disagree(s, fd, FD_TOLERANCE)
                            .then(|| format!("entropy {:e} vs finite difference {:e} J/(K m^2)", s.value, fd.value));
                        (c, flag)
                    } else {
                        c.extend([Cell::Empty, Cell::Empty]);
                        (c, None)
                    }
                }
            })
        };
        let (outputs, flag) = compute().map_err(at)?;
        let mut row: Vec<Cell> =
            vec![name1.as_str().into(), name2.as_str().into(), u.name().into(), gap.into(), t.into(), run.tol.into()];
        row.extend(outputs);
        row.push(flag.clone().map_or(Cell::Empty, Cell::from));
        row.push(VERSION.into());
        Ok((row, flag.map(|f| format!("gap {gap:e}, temperature {t:e}: {f}"))))
    })?;
    let mut table = Table::new(columns);
    let mut flags = Vec::new();
    for (row, flag) in rows {
        table.push(row);
        flags.extend(flag);
    }
    Ok((run, Outcome { table, flags }))
}

fn pol_name(p: Polarization) -> &'static str {
    match p {
        Polarization::S => "s",
        Polarization::P => "p",
    }
}

pub fn dos(args: &DosArgs) -> CliResult<(Run, Outcome)> {
    let run = Run::new(&args.common)?;
    let u = run.units;
    let ([n1, n2], [w1, w2]) = run.walls(&args.cavity, &args.r_product)?;
    let gap = run.single_gap(&args.cavity)?;
    let (a, b) = run.settings.require("window", &args.window, settings::window)?;
    let n = run.settings.parse("points", &args.points, count)?.unwrap_or(101);
    let q = run.settings.parse("q", &args.q, settings::non_negative)?.unwrap_or(0.0);
    let pol = run.polarization(&args.polarization)?;
    // The density of states sees the bare walls; the delay is a placeholder.
    let cfg = CavityConfig::new(DelayedMirror::new(w1, 1.0)?, DelayedMirror::new(w2, 1.0)?, gap, u.core())?;
    let omegas: Vec<f64> = if n == 1 { vec![0.5 * (a + b)] } else { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() };
    let rho = run.map(&omegas, |&w| {
        cfg.wall_dos_estimate(q, pol, w)
            .map_err(|e| CliError::from(e).with_context(&format!("omega {w:e}")))
    })?;
    let mut table = Table::new(vec![
        "mirror1".into(),
        "mirror2".into(),
        "units".into(),
        label("gap", u.length_label()),
        label("q", u.wavevector_label()),
        "polarization".into(),
        label("omega", u.frequency_label()),
        label("rho", u.dos_label()),
        label("rho_err", u.dos_label()),
        "version".into(),
    ]);
    for (w, r) in omegas.iter().zip(rho) {
        table.push(vec![
            n1.as_str().into(),
            n2.as_str().into(),
            u.name().into(),
            gap.into(),
            q.into(),
            pol_name(pol).into(),
            (*w).into(),
            r.value.into(),
            r.error.into(),
            VERSION.into(),
        ]);
    }
    Ok((run, Outcome { table, flags: Vec::new() }))
}

pub fn modes(args: &ModesArgs) -> CliResult<(Run, Outcome)> {
    let run = Run::new(&args.common)?;
    let u = run.units;
    let ([n1, n2], [w1, w2]) = run.walls(&args.cavity, &args.r_product)?;
    let gap = run.single_gap(&args.cavity)?;
    let (a, b) = run.settings.require("window", &args.window, settings::window)?;
    let q = run.settings.parse("q", &args.q, settings::non_negative)?.unwrap_or(0.0);
    let pol = run.polarization(&args.polarization)?;
    let (t1, t2) = run.settings.require("delay", &args.delay, |s| match s.split_once(',') {
        Some((x, y)) => Ok((positive(x)?, positive(y)?)),
        None => positive(s).map(|t| (t, t)),
    })?;
    let cfg = CavityConfig::new(DelayedMirror::new(w1, t1)?, DelayedMirror::new(w2, t2)?, gap, u.core())?;
    let window = ModeWindow::new(0.5 * (a + b), b - a)?;
    let mut columns: Vec<String> = vec![
        "mirror1".into(),
        "mirror2".into(),
        "units".into(),
        label("gap", u.length_label()),
        label("q", u.wavevector_label()),
        "polarization".into(),
        label("delay1", &format!("1/({})", u.frequency_label())),
        label("delay2", &format!("1/({})", u.frequency_label())),
        label("window_lo", u.frequency_label()),
        label("window_hi", u.frequency_label()),
    ];
    let inputs = || -> Vec<Cell> {
        vec![
            n1.as_str().into(),
            n2.as_str().into(),
            u.name().into(),
            gap.into(),
            q.into(),
            pol_name(pol).into(),
            t1.into(),
            t2.into(),
            a.into(),
            b.into(),
        ]
    };
    let mut flags = Vec::new();
    let table = if args.census {
        let r = census(&cfg, q, pol, window)?;
        let contour = count_modes_argument_principle(&cfg, q, pol, window)?;
        columns.extend([
            "modes".into(),
            "vacuum_modes".into(),
            "contour_modes".into(),
            label("estimate", u.dos_label()),
            label("rho", u.dos_label()),
            label("deviation", u.dos_label()),
            "resolved".into(),
            "flag".into(),
            "version".into(),
        ]);
        let flag = (contour != r.modes)
            .then(|| format!("root finder found {} modes, argument principle counts {contour}", r.modes));
        flags.extend(flag.clone());
        let mut t = Table::new(columns);
        let mut row = inputs();
        row.extend([
            r.modes.into(),
            r.vacuum_modes.into(),
            contour.into(),
            r.estimate.into(),
            r.rho.into(),
            r.deviation.into(),
            r.resolved.into(),
            flag.map_or(Cell::Empty, Cell::from),
            VERSION.into(),
        ]);
        t.push(row);
        t
    } else {
        let found = find_modes(&cfg, q, pol, window)?;
        columns.extend(["index".into(), label("omega", u.frequency_label()), "version".into()]);
        let mut t = Table::new(columns);
        for (i, w) in found.iter().enumerate() {
            let mut row = inputs();
            row.extend([i.into(), (*w).into(), VERSION.into()]);
            t.push(row);
        }
        t
    };
    Ok((run, Outcome { table, flags }))
}

/// Deviations above this fail `smatrix-check`.
pub const SMATRIX_TOLERANCE: f64 = 1e-12;

pub fn smatrix_check(args: &SmatrixArgs) -> CliResult<(Run, Outcome)> {
    let run = Run::new(&args.common)?;
    let s = &run.settings;
    let r = s.require("r", &args.r, |v| {
        v.trim().replace(' ', "").parse::<Complex64>().map_err(|_| format!("`{v}` is not a complex number like 0.3+0.4i"))
    })?;
    let sector = s
        .parse("sector", &args.sector, |v| match v {
            "propagating" => Ok(Sector::Propagating),
            "evanescent" => Ok(Sector::Evanescent),
            other => Err(format!("sector must be `propagating` or `evanescent`, got `{other}`")),
        })?
        .unwrap_or(Sector::Propagating);
    let kv = s.parse("k-vacuum", &args.k_vacuum, positive)?.unwrap_or(1.0);
    let kd = s.parse("k-dielectric", &args.k_dielectric, positive)?.unwrap_or(1.0);
    let phase = s.parse("phase", &args.phase, number)?.unwrap_or(match sector {
        Sector::Propagating => DEFAULT_PROPAGATING_PHASE,
        Sector::Evanescent => DEFAULT_EVANESCENT_PHASE,
    });
    let sweep = s.parse("sweep", &args.sweep, settings::sweep)?.unwrap_or_else(|| (0..64).map(|i| 0.05 + 0.1 * i as f64).collect());
    let iface = match sector {
        Sector::Propagating => InterfaceScattering::propagating_with_phase(r, kv, kd, phase)?,
        Sector::Evanescent => InterfaceScattering::evanescent_with_phase(r, kv, kd, phase)?,
    };
    let inputs = [
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
    ];
    let flux = inputs
        .iter()
        .map(|&(iv, id)| {
            let scale = kv * iv.norm_sqr() * (1.0 + r.norm_sqr()) + kd * id.norm_sqr();
            iface.flux_imbalance(iv, id).abs() / scale
        })
        .fold(0.0, f64::max);
    let unitarity = iface.unitarity_defect();
    let identities = (sector == Sector::Propagating).then(|| {
        let (rv, rd, tv, td) = iface.reflectance_transmittance();
        (rv - rd).abs().max((tv - td).abs()).max((rv + tv - 1.0).abs())
    });
    let delay = delay_consistency_check(&iface, &sweep)?;
    let worst = [Some(flux), unitarity, identities, Some(delay)].into_iter().flatten().fold(0.0, f64::max);
    let mut flags = Vec::new();
    if !(worst <= SMATRIX_TOLERANCE) {
        flags.push(format!("largest deviation {worst:e} exceeds {SMATRIX_TOLERANCE:e}"));
    }
    let mut table = Table::new(
        [
            "r_v_re", "r_v_im", "sector", "k_vacuum", "k_dielectric", "phase [rad]", "sweep_points", "unitarity_defect",
            "flux_imbalance", "reflectance_transmittance_residual", "delay_max_deviation", "pass", "version",
        ]
        .map(String::from)
        .to_vec(),
    );
    table.push(vec![
        r.re.into(),
        r.im.into(),
        match sector {
            Sector::Propagating => "propagating",
            Sector::Evanescent => "evanescent",
        }
        .into(),
        kv.into(),
        kd.into(),
        (phase % (2.0 * PI)).into(),
        sweep.len().into(),
        unitarity.into(),
        flux.into(),
        identities.into(),
        delay.into(),
        flags.is_empty().into(),
        VERSION.into(),
    ]);
    Ok((run, Outcome { table, flags }))
}
