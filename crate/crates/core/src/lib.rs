//! Casimir free energy, entropy and pressure of a planar cavity, plus the
//! fictitious-cavity mode analysis of its walls.

pub mod dual;
mod error;
pub mod fictitious;
pub mod kinematics;
pub mod lifshitz;
pub mod modes;
pub mod mirrors;
pub mod quadrature;
pub mod summation;

pub use error::{Error, Result};
pub use kinematics::{FrequencyAxis, NormalWavevector, Polarization, Sector, SpectralPoint, UnitSystem};
pub use mirrors::{MirrorModel, PassivityViolation, PermittivityModel};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/mirrors.md")]
    mod mirrors {}
    #[doc = include_str!("../../../book/src/thermodynamics.md")]
    mod thermodynamics {}
    #[doc = include_str!("../../../book/src/fictitious.md")]
    mod fictitious {}
    #[doc = include_str!("../../../book/src/modes.md")]
    mod modes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
