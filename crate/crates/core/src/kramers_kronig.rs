//! Numerical checks of the dispersion relations obeyed by the nonlocal
//! permittivities.
//!
//! The transverse permittivity has a second-order pole at ω = 0, so its
//! relations carry explicit subtraction terms; the longitudinal one is
//! analytic on the real axis once `v^L k⊥ > 0`. All integrals over the
//! real line are folded onto (0, cutoff) with ε(−x) = ε(x)*.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::quadrature::{integrate_partition, CompensatedSum, Integral, QuadSettings};
use crate::response::{
    eval_real_axis_continued, static_transverse_conductivity, NonlocalParams, ResponseModel,
};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PVSettings {
    /// Half-width of the window around the pole integrated by symmetric
    /// pairing, eV.
    pub window: f64,
    /// Upper integration limit, eV; the tail beyond it is estimated as
    /// f(cutoff)·cutoff.
    pub cutoff: f64,
    pub tol: f64,
}

impl Default for PVSettings {
    fn default() -> Self {
        Self {
            window: 1e-3,
            cutoff: 1e4,
            tol: 1e-6,
        }
    }
}

impl PVSettings {
    fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(domain(format!(
                "PV window must be > 0, got {}",
                self.window
            )));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(domain(format!(
                "PV cutoff must be > 0, got {}",
                self.cutoff
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(domain(format!(
                "PV tolerance must lie in (0, 1), got {}",
                self.tol
            )));
        }
        Ok(())
    }

    /// Quadrature settings for results of typical magnitude `scale`.
    fn quad(&self, scale: f64) -> QuadSettings {
        QuadSettings::relative(self.tol).with_abs_tol(self.tol * scale.max(1.0))
    }
}

/// Principal value of ∫_lower^upper f(x) dx for `f` with a simple pole at
/// `pole`. The window (pole − w, pole + w) is integrated as
/// ∫_0^w [f(pole + t) + f(pole − t)] dt, in which the pole cancels.
/// `breakpoints` outside the window refine the initial partition.
pub fn pv_integral<F>(
    f: F,
    pole: f64,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    s: &PVSettings,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    pv_with(f, pole, lower, upper, breakpoints, s, s.quad(1.0))
}

fn pv_with<F>(
    f: F,
    pole: f64,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    s: &PVSettings,
    q: QuadSettings,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    s.validate()?;
    if !(lower < pole && pole < upper) {
        return Err(domain(format!(
            "pole {pole} must lie inside ({lower}, {upper})"
        )));
    }
    let w = s.window.min(0.5 * (pole - lower)).min(0.5 * (upper - pole));
    let (left_end, right_start) = (pole - w, pole + w);
    let mut left = vec![lower, left_end];
    let mut right = vec![right_start, upper];
    for &b in breakpoints {
        if b > lower && b < left_end {
            left.push(b);
        } else if b > right_start && b < upper {
            right.push(b);
        }
    }
    for v in [&mut left, &mut right] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let parts = [
        integrate_partition(&f, &left, q)?,
        integrate_partition(|t| f(pole + t) + f(pole - t), &[0.0, w], q)?,
        integrate_partition(&f, &right, q)?,
    ];
    let value: CompensatedSum = parts.iter().map(|p| p.value).collect();
    Ok(Integral {
        value: value.sum(),
        error: parts.iter().map(|p| p.error).sum(),
        evaluations: parts.iter().map(|p| p.evaluations).sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KKRelation {
    /// Re ε_T from Im ε_T on the real axis.
    TransverseRealFromImag,
    /// Im ε_T from Re ε_T on the real axis.
    TransverseImagFromReal,
    /// ε_T(iξ) from Im ε_T on the real axis.
    TransverseImagAxis,
    LongitudinalRealFromImag,
    LongitudinalImagFromReal,
    LongitudinalImagAxis,
}

impl KKRelation {
    pub const ALL: [KKRelation; 6] = [
        KKRelation::TransverseRealFromImag,
        KKRelation::TransverseImagFromReal,
        KKRelation::TransverseImagAxis,
        KKRelation::LongitudinalRealFromImag,
        KKRelation::LongitudinalImagFromReal,
        KKRelation::LongitudinalImagAxis,
    ];

    pub fn id(self) -> &'static str {
        match self {
            KKRelation::TransverseRealFromImag => "transverse-real-from-imag",
            KKRelation::TransverseImagFromReal => "transverse-imag-from-real",
            KKRelation::TransverseImagAxis => "transverse-imag-axis",
            KKRelation::LongitudinalRealFromImag => "longitudinal-real-from-imag",
            KKRelation::LongitudinalImagFromReal => "longitudinal-imag-from-real",
            KKRelation::LongitudinalImagAxis => "longitudinal-imag-axis",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.id() == id)
    }

    fn transverse(self) -> bool {
        matches!(
            self,
            KKRelation::TransverseRealFromImag
                | KKRelation::TransverseImagFromReal
                | KKRelation::TransverseImagAxis
        )
    }

    fn on_imag_axis(self) -> bool {
        matches!(
            self,
            KKRelation::TransverseImagAxis | KKRelation::LongitudinalImagAxis
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KKReport {
    pub relation: KKRelation,
    pub k_hat: f64,
    /// ω for real-axis relations, ξ for imaginary-axis ones (eV).
    pub grid: Vec<f64>,
    /// Closed-form value of the permittivity component.
    pub lhs: Vec<f64>,
    /// Value reconstructed from the dispersion integral.
    pub rhs: Vec<f64>,
    /// |lhs − rhs| / max(|lhs|, |rhs|, 1)
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Explicit non-integral terms of a relation at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleTerms {
    /// Term from the second-order pole of ε_T, ω_p² v^T k⊥/(γ ω²) (or ξ²).
    pub second_order: f64,
    /// Term from a first-order pole, 4π σ₀/ω.
    pub first_order: f64,
}

pub fn residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

struct Ctx<'a> {
    model: ResponseModel,
    p: &'a NonlocalParams,
    k_hat: f64,
    s: &'a PVSettings,
}

impl Ctx<'_> {
    fn eps(&self, relation: KKRelation, x: f64) -> num_complex::Complex64 {
        // k_hat and x are validated up front, so evaluation cannot fail.
        let e = eval_real_axis_continued(&self.model, x, self.k_hat).expect("validated arguments");
        if relation.transverse() {
            e.eps_t
        } else {
            e.eps_l
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = (-4..=4).map(|e| 10f64.powi(e)).collect();
        let g = self.p.drude.gamma;
        b.extend([
            g,
            self.p.vt_k(self.k_hat),
            self.p.vl_k(self.k_hat),
            self.p.drude.omega_p,
        ]);
        b.retain(|&x| x > 0.0 && x < self.s.cutoff);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn pole_terms(&self, relation: KKRelation, freq: f64) -> Result<PoleTerms> {
        let wp2 = self.p.drude.omega_p.powi(2);
        let g = self.p.drude.gamma;
        let mut t = PoleTerms {
            second_order: 0.0,
            first_order: 0.0,
        };
        match relation {
            KKRelation::TransverseRealFromImag | KKRelation::TransverseImagAxis => {
                t.second_order = wp2 * self.p.vt_k(self.k_hat) / (g * freq * freq);
            }
            KKRelation::TransverseImagFromReal => {
                t.first_order =
                    4.0 * PI * static_transverse_conductivity(self.p, self.k_hat)? / freq;
            }
            KKRelation::LongitudinalImagFromReal => {
                // ε_L has a simple pole at 0 only when one of γ, v^L k⊥ vanishes.
                let b = self.p.vl_k(self.k_hat);
                if b == 0.0 || g == 0.0 {
                    t.first_order = wp2 / ((g + b) * freq);
                }
            }
            _ => {}
        }
        Ok(t)
    }

    fn lhs(&self, relation: KKRelation, freq: f64) -> Result<f64> {
        Ok(match relation {
            KKRelation::TransverseImagAxis => self.model.eval_imag_axis(freq, self.k_hat)?.eps_t,
            KKRelation::LongitudinalImagAxis => self.model.eval_imag_axis(freq, self.k_hat)?.eps_l,
            KKRelation::TransverseRealFromImag | KKRelation::LongitudinalRealFromImag => {
                self.eps(relation, freq).re
            }
            KKRelation::TransverseImagFromReal | KKRelation::LongitudinalImagFromReal => {
                self.eps(relation, freq).im
            }
        })
    }

    /// Right-hand side; `with_poles = false` drops the explicit pole terms.
    /// `scale` is the expected magnitude, used for the absolute tolerance.
    fn rhs(&self, relation: KKRelation, freq: f64, with_poles: bool, scale: f64) -> Result<f64> {
        let poles = self.pole_terms(relation, freq)?;
        let q = self.s.quad(PI * scale);
        let pts = self.breakpoints();
        let c = self.s.cutoff;
        let w2 = freq * freq;
        let sub = |x: f64| {
            if relation == KKRelation::TransverseImagFromReal {
                let wp2 = self.p.drude.omega_p.powi(2);
                wp2 * self.p.vt_k(self.k_hat) / (self.p.drude.gamma * x * x)
            } else {
                0.0
            }
        };
        let (integral, pole_sum) = match relation {
            KKRelation::TransverseRealFromImag | KKRelation::LongitudinalRealFromImag => {
                let f = |x: f64| 2.0 * x * self.eps(relation, x).im / ((x - freq) * (x + freq));
                let i = pv_with(f, freq, 0.0, c, &pts, self.s, q)?.value + f(c) * c;
                (1.0 + i / PI, -poles.second_order)
            }
            KKRelation::TransverseImagFromReal | KKRelation::LongitudinalImagFromReal => {
                // PV∫_0^∞ 2ω/(x² − ω²) dx = 0, so the unit background drops.
                let f = |x: f64| {
                    2.0 * freq * (self.eps(relation, x).re + sub(x) - 1.0)
                        / ((x - freq) * (x + freq))
                };
                // Near 0 the subtraction cancels a 1/x² growth and leaves
                // rounding noise; the bounded integrand is taken as
                // constant on (0, x_lo).
                let x_lo = 1e-4 * self.p.drude.gamma.min(freq);
                let i =
                    pv_with(f, freq, x_lo, c, &pts, self.s, q)?.value + f(c) * c + f(x_lo) * x_lo;
                (-i / PI, poles.first_order)
            }
            KKRelation::TransverseImagAxis | KKRelation::LongitudinalImagAxis => {
                let f = |x: f64| x * self.eps(relation, x).im / (x * x + w2);
                let mut all = vec![0.0];
                all.extend(pts.iter().copied().filter(|&x| x != freq));
                all.push(freq.min(c));
                all.push(c);
                all.sort_by(f64::total_cmp);
                all.dedup();
                let i = integrate_partition(f, &all, q)?.value + f(c) * c;
                (1.0 + 2.0 * i / PI, poles.second_order)
            }
        };
        Ok(if with_poles {
            integral + pole_sum
        } else {
            integral
        })
    }
}

fn context<'a>(
    relation: KKRelation,
    p: &'a NonlocalParams,
    k_hat: f64,
    s: &'a PVSettings,
) -> Result<Ctx<'a>> {
    s.validate()?;
    if !(k_hat >= 0.0 && k_hat.is_finite()) {
        return Err(domain(format!("k_hat must be >= 0, got {k_hat}")));
    }
    let g = p.drude.gamma;
    if relation.transverse() {
        if g <= 0.0 {
            return Err(domain("transverse dispersion relations need gamma > 0"));
        }
    } else if g == 0.0 && p.vl_k(k_hat) == 0.0 {
        return Err(domain(
            "gamma = v^L k = 0 puts a double pole of the longitudinal permittivity on the real axis",
        ));
    }
    if s.cutoff <= 10.0 * p.drude.omega_p {
        return Err(domain(format!(
            "PV cutoff {} must greatly exceed the plasma frequency {}",
            s.cutoff, p.drude.omega_p
        )));
    }
    Ok(Ctx {
        model: ResponseModel::NonlocalAlt(*p),
        p,
        k_hat,
        s,
    })
}

fn check_grid(grid: &[f64], s: &PVSettings) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("frequency grid is empty"));
    }
    if let Some(&x) = grid.iter().find(|&&x| !(x > 0.0 && x < s.cutoff)) {
        return Err(domain(format!(
            "grid frequencies must lie in (0, cutoff), got {x}"
        )));
    }
    Ok(())
}

/// Evaluates both sides of `relation` on `grid`.
pub fn verify(
    relation: KKRelation,
    p: &NonlocalParams,
    k_hat: f64,
    grid: &[f64],
    s: &PVSettings,
) -> Result<KKReport> {
    let ctx = context(relation, p, k_hat, s)?;
    check_grid(grid, s)?;
    let pairs: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&x| {
            let l = ctx.lhs(relation, x)?;
            Ok((l, ctx.rhs(relation, x, true, l.abs())?))
        })
        .collect::<Result<_>>()?;
    let residuals: Vec<f64> = pairs.iter().map(|&(l, r)| residual(l, r)).collect();
    Ok(KKReport {
        relation,
        k_hat,
        grid: grid.to_vec(),
        lhs: pairs.iter().map(|p| p.0).collect(),
        rhs: pairs.iter().map(|p| p.1).collect(),
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
    })
}

/// Residual at `freq` when the explicit pole terms are left out. `None`
/// when the relation has no such term at this `k_hat`.
pub fn negative_control(
    relation: KKRelation,
    p: &NonlocalParams,
    k_hat: f64,
    freq: f64,
    s: &PVSettings,
) -> Result<Option<f64>> {
    let ctx = context(relation, p, k_hat, s)?;
    check_grid(&[freq], s)?;
    let t = ctx.pole_terms(relation, freq)?;
    if t.first_order == 0.0 && t.second_order == 0.0 {
        return Ok(None);
    }
    let l = ctx.lhs(relation, freq)?;
    Ok(Some(residual(l, ctx.rhs(relation, freq, false, l.abs())?)))
}

pub fn pole_terms(
    relation: KKRelation,
    p: &NonlocalParams,
    k_hat: f64,
    freq: f64,
) -> Result<PoleTerms> {
    let s = PVSettings::default();
    context(relation, p, k_hat, &s)?.pole_terms(relation, freq)
}

pub fn verify_kk_real_from_imag_t(
    p: &NonlocalParams,
    k_hat: f64,
    omega_grid: &[f64],
    s: &PVSettings,
) -> Result<KKReport> {
    verify(KKRelation::TransverseRealFromImag, p, k_hat, omega_grid, s)
}

pub fn verify_kk_imag_from_real_t(
    p: &NonlocalParams,
    k_hat: f64,
    omega_grid: &[f64],
    s: &PVSettings,
) -> Result<KKReport> {
    verify(KKRelation::TransverseImagFromReal, p, k_hat, omega_grid, s)
}

pub fn verify_kk_imag_axis_t(
    p: &NonlocalParams,
    k_hat: f64,
    xi_grid: &[f64],
    s: &PVSettings,
) -> Result<KKReport> {
    verify(KKRelation::TransverseImagAxis, p, k_hat, xi_grid, s)
}

/// The three longitudinal relations: real from imaginary, imaginary from
/// real, and the imaginary-axis form.
pub fn verify_kk_l(
    p: &NonlocalParams,
    k_hat: f64,
    omega_grid: &[f64],
    xi_grid: &[f64],
    s: &PVSettings,
) -> Result<[KKReport; 3]> {
    Ok([
        verify(
            KKRelation::LongitudinalRealFromImag,
            p,
            k_hat,
            omega_grid,
            s,
        )?,
        verify(
            KKRelation::LongitudinalImagFromReal,
            p,
            k_hat,
            omega_grid,
            s,
        )?,
        verify(KKRelation::LongitudinalImagAxis, p, k_hat, xi_grid, s)?,
    ])
}

/// Every relation with the grid for its axis.
pub fn verify_all(
    p: &NonlocalParams,
    k_hat: f64,
    omega_grid: &[f64],
    xi_grid: &[f64],
    s: &PVSettings,
) -> Result<Vec<KKReport>> {
    KKRelation::ALL
        .iter()
        .map(|&r| {
            verify(
                r,
                p,
                k_hat,
                if r.on_imag_axis() {
                    xi_grid
                } else {
                    omega_grid
                },
                s,
            )
        })
        .collect()
}
