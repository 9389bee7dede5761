use cavity_casimir::kinematics::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use cavity_casimir::UnitSystem;

/// Units of every number read from flags or written to output.
///
/// `Natural` sets `ħ = c = k_B = 1` and measures lengths in `length` metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Units {
    Si,
    Natural { length: f64 },
}

pub const DEFAULT_LENGTH_UNIT: f64 = 1e-6;

impl Units {
    pub fn parse(name: &str, length: f64) -> Result<Self, String> {
        match name {
            "si" => Ok(Units::Si),
            "natural" => Ok(Units::Natural { length }),
            other => Err(format!("units must be `si` or `natural`, got `{other}`")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Units::Si => "si",
            Units::Natural { .. } => "natural",
        }
    }

    fn ell(&self) -> f64 {
        match self {
            Units::Si => 1.0,
            Units::Natural { length } => *length,
        }
    }

    pub fn core(&self) -> UnitSystem {
        match self {
            Units::Si => UnitSystem::Si,
            Units::Natural { length } => UnitSystem::Natural { gap: *length },
        }
    }

    pub fn length_to_si(&self, x: f64) -> f64 {
        x * self.ell()
    }

    pub fn frequency_to_si(&self, w: f64) -> f64 {
        match self {
            Units::Si => w,
            Units::Natural { length } => w * SPEED_OF_LIGHT / length,
        }
    }

    pub fn temperature_to_si(&self, t: f64) -> f64 {
        match self {
            Units::Si => t,
            Units::Natural { length } => t * HBAR * SPEED_OF_LIGHT / (BOLTZMANN * length),
        }
    }

    /// SI value divided by `ħc/ℓⁿ`.
    fn from_si_hbar_c(&self, v: f64, n: i32) -> f64 {
        match self {
            Units::Si => v,
            Units::Natural { length } => v * length.powi(n) / (HBAR * SPEED_OF_LIGHT),
        }
    }

    pub fn pressure_from_si(&self, p: f64) -> f64 {
        self.from_si_hbar_c(p, 4)
    }

    pub fn energy_from_si(&self, e: f64) -> f64 {
        self.from_si_hbar_c(e, 3)
    }

    pub fn entropy_from_si(&self, s: f64) -> f64 {
        match self {
            Units::Si => s,
            Units::Natural { length } => s * length * length / BOLTZMANN,
        }
    }

    pub fn length_label(&self) -> &'static str {
        self.pick("m", "l")
    }

    pub fn frequency_label(&self) -> &'static str {
        self.pick("rad/s", "c/l")
    }

    pub fn wavevector_label(&self) -> &'static str {
        self.pick("1/m", "1/l")
    }

    /// Density of states per unit frequency.
    pub fn dos_label(&self) -> &'static str {
        self.pick("s/rad", "l/c")
    }

    pub fn temperature_label(&self) -> &'static str {
        self.pick("K", "hbar c/(k_B l)")
    }

    pub fn pressure_label(&self) -> &'static str {
        self.pick("Pa", "hbar c/l^4")
    }

    pub fn energy_label(&self) -> &'static str {
        self.pick("J/m^2", "hbar c/l^3")
    }

    pub fn entropy_label(&self) -> &'static str {
        self.pick("J/(K m^2)", "k_B/l^2")
    }

    fn pick(&self, si: &'static str, natural: &'static str) -> &'static str {
        match self {
            Units::Si => si,
            Units::Natural { .. } => natural,
        }
    }
}
