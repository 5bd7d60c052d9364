//! Dielectric response models on the imaginary and real frequency axes.
//!
//! Frequencies and `k̂ = ħc k⊥` are energies in eV. The nonlocal pair
//! depends on the transverse wave vector only through `v k⊥ / ω`, which
//! in these units is `(v/c) · k̂ / ω`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::CONSTANTS;
use crate::error::{domain, CasimirError, Result};
use crate::optical_data::CoreTable;

/// Name of the shipped gold parameter set.
pub const GOLD_DEFAULT: &str = "gold-default";

/// Local Drude parameters, both as energies (ħω_p, ħγ) in eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrudeParams {
    pub omega_p: f64,
    pub gamma: f64,
}

impl DrudeParams {
    /// ħω_p = 9.0 eV, ħγ = 35 meV.
    pub const GOLD: DrudeParams = DrudeParams {
        omega_p: 9.0,
        gamma: 0.035,
    };

    pub fn new(omega_p: f64, gamma: f64) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) {
            return Err(domain(format!(
                "plasma frequency must be positive, got {omega_p}"
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(domain(format!(
                "relaxation must be non-negative, got {gamma}"
            )));
        }
        Ok(Self { omega_p, gamma })
    }
}

/// Drude parameters plus the two nonlocal velocities, stored as `v/c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlocalParams {
    pub drude: DrudeParams,
    pub v_t_ratio: f64,
    pub v_l_ratio: f64,
}

impl NonlocalParams {
    pub fn new(drude: DrudeParams, v_t_ratio: f64, v_l_ratio: f64) -> Result<Self> {
        if !(v_t_ratio >= 0.0 && v_t_ratio.is_finite())
            || !(v_l_ratio >= 0.0 && v_l_ratio.is_finite())
        {
            return Err(domain(format!(
                "nonlocal velocities must be non-negative, got v_T/c={v_t_ratio}, v_L/c={v_l_ratio}"
            )));
        }
        Ok(Self {
            drude,
            v_t_ratio,
            v_l_ratio,
        })
    }

    /// Velocities given as multiples of the gold Fermi velocity.
    pub fn from_fermi_multiples(
        drude: DrudeParams,
        vt_over_vf: f64,
        vl_over_vf: f64,
    ) -> Result<Self> {
        let vf = CONSTANTS.fermi_velocity_ratio_default;
        Self::new(drude, vt_over_vf * vf, vl_over_vf * vf)
    }

    /// Gold with v^T = v^L = 7 v_F.
    pub fn gold_default() -> Self {
        Self::from_fermi_multiples(DrudeParams::GOLD, 7.0, 7.0).expect("valid preset")
    }

    /// `v^T k⊥` as an energy.
    pub fn vt_k(&self, k_hat: f64) -> f64 {
        self.v_t_ratio * k_hat
    }

    pub fn vl_k(&self, k_hat: f64) -> f64 {
        self.v_l_ratio * k_hat
    }
}

/// Look up a named parameter preset.
pub fn preset(name: &str) -> Option<NonlocalParams> {
    match name {
        GOLD_DEFAULT => Some(NonlocalParams::gold_default()),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub enum ResponseModel {
    Drude(DrudeParams),
    Plasma {
        omega_p: f64,
    },
    NonlocalAlt(NonlocalParams),
    PerfectReflector,
    /// An inner model whose vacuum unity is replaced by an interband core.
    WithCore {
        inner: Box<ResponseModel>,
        core: Arc<CoreTable>,
    },
}

impl ResponseModel {
    pub fn plasma(omega_p: f64) -> Result<Self> {
        DrudeParams::new(omega_p, 0.0)?;
        Ok(ResponseModel::Plasma { omega_p })
    }

    pub fn with_core(self, core: Arc<CoreTable>) -> Self {
        ResponseModel::WithCore {
            inner: Box::new(self),
            core,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            ResponseModel::Drude(_) => "drude".into(),
            ResponseModel::Plasma { .. } => "plasma".into(),
            ResponseModel::NonlocalAlt(_) => "nonlocal".into(),
            ResponseModel::PerfectReflector => "perfect".into(),
            ResponseModel::WithCore { inner, .. } => format!("{}+core", inner.label()),
        }
    }

    pub fn eval_imag_axis(&self, xi: f64, k_hat: f64) -> Result<EpsPair<f64>> {
        eval_imag_axis(self, xi, k_hat)
    }

    pub fn eval_real_axis(&self, omega: f64, k_hat: f64) -> Result<RealAxisEps> {
        eval_real_axis(self, omega, k_hat)
    }
}

/// Transverse and longitudinal permittivities at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsPair<T> {
    pub eps_t: T,
    pub eps_l: T,
}

impl<T: Copy> EpsPair<T> {
    pub fn local(eps: T) -> Self {
        Self {
            eps_t: eps,
            eps_l: eps,
        }
    }
}

/// Real-axis permittivities with a flag for negative absorption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealAxisEps {
    pub eps: EpsPair<Complex64>,
    /// Set when either component has Im ε < 0.
    pub non_passive: bool,
}

fn check_k(k_hat: f64) -> Result<()> {
    if !(k_hat >= 0.0 && k_hat.is_finite()) {
        return Err(domain(format!(
            "transverse wave vector must be >= 0, got {k_hat}"
        )));
    }
    Ok(())
}

/// Permittivities at the imaginary frequency iξ.
pub fn eval_imag_axis(model: &ResponseModel, xi: f64, k_hat: f64) -> Result<EpsPair<f64>> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(domain(format!(
            "imaginary-axis evaluation needs xi > 0, got {xi}; use the zero-frequency limits"
        )));
    }
    check_k(k_hat)?;
    match model {
        ResponseModel::Drude(p) => Ok(EpsPair::local(1.0 + drude_imag(p, xi))),
        ResponseModel::Plasma { omega_p } => {
            Ok(EpsPair::local(1.0 + omega_p * omega_p / (xi * xi)))
        }
        ResponseModel::NonlocalAlt(p) => {
            let d = drude_imag(&p.drude, xi);
            Ok(EpsPair {
                eps_t: 1.0 + d * (1.0 + p.vt_k(k_hat) / xi),
                eps_l: 1.0 + d / (1.0 + p.vl_k(k_hat) / xi),
            })
        }
        ResponseModel::PerfectReflector => Err(CasimirError::Unsupported(
            "a perfect reflector has no permittivity; it fixes the reflection amplitudes".into(),
        )),
        ResponseModel::WithCore { inner, core } => {
            let base = eval_imag_axis(inner, xi, k_hat)?;
            let shift = core.value(xi)? - 1.0;
            Ok(EpsPair {
                eps_t: base.eps_t + shift,
                eps_l: base.eps_l + shift,
            })
        }
    }
}

fn drude_imag(p: &DrudeParams, xi: f64) -> f64 {
    p.omega_p * p.omega_p / (xi * (xi + p.gamma))
}

/// Permittivities at real frequency ω > 0.
pub fn eval_real_axis(model: &ResponseModel, omega: f64, k_hat: f64) -> Result<RealAxisEps> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(domain(format!(
            "real-axis evaluation needs omega > 0, got {omega}"
        )));
    }
    let eps = eval_real_axis_continued(model, omega, k_hat)?;
    Ok(RealAxisEps {
        non_passive: eps.eps_t.im < 0.0 || eps.eps_l.im < 0.0,
        eps,
    })
}

/// Real-axis permittivities continued to any ω ≠ 0, including negative
/// frequencies where ε(−ω) = ε(ω)*.
pub fn eval_real_axis_continued(
    model: &ResponseModel,
    omega: f64,
    k_hat: f64,
) -> Result<EpsPair<Complex64>> {
    if !(omega != 0.0 && omega.is_finite()) {
        return Err(domain(format!(
            "frequency must be finite and non-zero, got {omega}"
        )));
    }
    check_k(k_hat)?;
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    match model {
        ResponseModel::Drude(p) => Ok(EpsPair::local(one - drude_real(p, omega))),
        ResponseModel::Plasma { omega_p } => {
            Ok(EpsPair::local(one - omega_p * omega_p / (omega * omega)))
        }
        ResponseModel::NonlocalAlt(p) => {
            let d = drude_real(&p.drude, omega);
            Ok(EpsPair {
                eps_t: one - d * (one + i * (p.vt_k(k_hat) / omega)),
                eps_l: one - d / (one + i * (p.vl_k(k_hat) / omega)),
            })
        }
        ResponseModel::PerfectReflector => Err(CasimirError::Unsupported(
            "a perfect reflector has no permittivity".into(),
        )),
        ResponseModel::WithCore { .. } => Err(CasimirError::Unsupported(
            "the interband core is only tabulated on the imaginary axis".into(),
        )),
    }
}

/// ω_p² / (ω(ω + iγ))
fn drude_real(p: &DrudeParams, omega: f64) -> Complex64 {
    Complex64::new(p.omega_p * p.omega_p, 0.0) / (omega * Complex64::new(omega, p.gamma))
}

/// Static (ω → 0) real part of the transverse conductivity, in eV.
///
/// Equals ω_p²(γ − v^T k⊥)/(4πγ²); at k̂ = 0 this is the Drude value
/// ω_p²/(4πγ).
pub fn static_transverse_conductivity(params: &NonlocalParams, k_hat: f64) -> Result<f64> {
    check_k(k_hat)?;
    let DrudeParams { omega_p, gamma } = params.drude;
    if gamma == 0.0 {
        return Err(domain("static conductivity has a pole at gamma = 0"));
    }
    Ok(omega_p * omega_p * (gamma - params.vt_k(k_hat))
        / (4.0 * std::f64::consts::PI * gamma * gamma))
}
