//! Physical constants, unit conventions and Matsubara frequencies.
//!
//! Every frequency, imaginary frequency and transverse wave vector is
//! carried as an energy in eV. A wave vector `k` is stored as `ħc·k`, so
//! a ratio such as `v k / ξ` becomes `(v/c) · k̂ / ξ`. Separations are in
//! μm, temperatures in K, and pressures come out in eV/μm³ before the
//! final conversion to Pa.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// ħc in eV·μm.
pub const HBAR_C: f64 = 0.197_326_980_4;
/// Boltzmann constant in eV/K.
pub const BOLTZMANN: f64 = 8.617_333_262e-5;
/// 1 eV/μm³ expressed in Pa.
pub const EV_PER_UM3_TO_PASCAL: f64 = 0.160_217_663_4;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Fermi velocity of gold in m/s.
pub const GOLD_FERMI_VELOCITY: f64 = 1.38e6;
/// Apéry's constant ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// eV·μm
    pub hbar_c: f64,
    /// eV/K
    pub boltzmann: f64,
    pub ev_per_um3_to_pascal: f64,
    /// v_F/c for gold.
    pub fermi_velocity_ratio_default: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar_c: HBAR_C,
    boltzmann: BOLTZMANN,
    ev_per_um3_to_pascal: EV_PER_UM3_TO_PASCAL,
    fermi_velocity_ratio_default: GOLD_FERMI_VELOCITY / SPEED_OF_LIGHT,
};

/// A Matsubara frequency together with its index and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraPoint {
    pub index: u64,
    /// ħξ_l in eV.
    pub xi: f64,
    /// Kelvin.
    pub temperature: f64,
}

impl MatsubaraPoint {
    pub fn new(index: u64, temperature: f64) -> Result<Self> {
        Ok(Self {
            index,
            xi: matsubara_xi(index, temperature)?,
            temperature,
        })
    }
}

/// Spacing of the Matsubara ladder, 2π k_B T, in eV.
pub fn matsubara_step(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(domain(format!(
            "temperature must be positive and finite, got {temperature}"
        )));
    }
    Ok(2.0 * PI * BOLTZMANN * temperature)
}

/// ħξ_l = 2π k_B T l in eV.
///
/// Computed as `l · ξ_1`, so the ladder is exactly linear in `l`.
pub fn matsubara_xi(l: u64, temperature: f64) -> Result<f64> {
    Ok(l as f64 * matsubara_step(temperature)?)
}

pub fn pressure_to_pascal(p_ev_per_um3: f64) -> f64 {
    p_ev_per_um3 * EV_PER_UM3_TO_PASCAL
}
