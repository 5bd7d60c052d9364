//! Casimir pressure between two thick parallel plates.
//!
//! The transverse wave-vector integral is taken in `y = 2a q̂/ħc`, which
//! makes the exponential factor explicit:
//!
//! ```text
//! P = −k_BT/(8πa³) Σ′_l ∫_{y_l}^∞ y² Σ_α r_α² e^{−y} / (1 − r_α² e^{−y}) dy
//! ```
//!
//! with `y_l = 2aξ_l/ħc` and the `l = 0` term halved.

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{matsubara_step, pressure_to_pascal, BOLTZMANN, HBAR_C, ZETA_3};
use crate::error::{domain, CasimirError, Result};
use crate::quadrature::{integrate_partition, CompensatedSum, QuadSettings};
use crate::reflection::{imag_axis_coeffs, zero_freq_limit, ReflectionPair};
use crate::response::ResponseModel;

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
pub const DEFAULT_TERM_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_TERMS: u64 = 2_000_000;

/// Integrand values below this fraction of the running peak end the range.
const TAIL_FRACTION: f64 = 1e-16;
const CHUNK: usize = 64;

#[derive(Debug, Clone)]
pub struct PressureQuery {
    /// Plate separation in μm.
    pub separation: f64,
    /// Temperature in K.
    pub temperature: f64,
    pub model: ResponseModel,
    pub quad_tol: f64,
    pub term_tol: f64,
    pub max_terms: u64,
    /// Keep the individual Matsubara contributions in the result.
    pub keep_terms: bool,
}

impl PressureQuery {
    pub fn new(separation: f64, temperature: f64, model: ResponseModel) -> Self {
        Self {
            separation,
            temperature,
            model,
            quad_tol: DEFAULT_QUAD_TOL,
            term_tol: DEFAULT_TERM_TOL,
            max_terms: DEFAULT_MAX_TERMS,
            keep_terms: false,
        }
    }

    pub fn with_tolerances(mut self, quad_tol: f64, term_tol: f64) -> Self {
        self.quad_tol = quad_tol;
        self.term_tol = term_tol;
        self
    }

    fn settings(&self) -> SumSettings {
        SumSettings {
            separation: self.separation,
            temperature: self.temperature,
            quad_tol: self.quad_tol,
            term_tol: self.term_tol,
            max_terms: self.max_terms,
            keep_terms: self.keep_terms,
        }
    }
}

/// Numerical parameters of the Matsubara sum, independent of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumSettings {
    pub separation: f64,
    pub temperature: f64,
    pub quad_tol: f64,
    pub term_tol: f64,
    pub max_terms: u64,
    pub keep_terms: bool,
}

impl SumSettings {
    fn validate(&self) -> Result<()> {
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(domain(format!(
                "separation must be > 0, got {}",
                self.separation
            )));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(domain(format!(
                "temperature must be > 0, got {}",
                self.temperature
            )));
        }
        for (name, t) in [("quad_tol", self.quad_tol), ("term_tol", self.term_tol)] {
            if !(t > 0.0 && t <= 1e-3) {
                return Err(domain(format!("{name} must lie in (0, 1e-3], got {t}")));
            }
        }
        if self.max_terms == 0 {
            return Err(domain("max_terms must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureResult {
    /// Pressure in Pa; negative means attraction.
    pub pressure: f64,
    pub terms_used: u64,
    /// Weighted contribution of each Matsubara term in Pa, if requested.
    pub per_term: Option<Vec<f64>>,
    /// Quadrature error plus an estimate of the truncated remainder, in Pa.
    pub quad_error_estimate: f64,
}

pub fn casimir_pressure(q: &PressureQuery) -> Result<PressureResult> {
    let model = &q.model;
    pressure_from_coefficients(&q.settings(), |l, xi, k| {
        if l == 0 {
            zero_freq_limit(model, k)
        } else {
            imag_axis_coeffs(model, xi, k)
        }
    })
}

/// The Matsubara sum for arbitrary reflection amplitudes
/// `coeffs(l, ξ_l, k̂)`.
pub fn pressure_from_coefficients<F>(s: &SumSettings, coeffs: F) -> Result<PressureResult>
where
    F: Fn(u64, f64, f64) -> Result<ReflectionPair<f64>> + Sync,
{
    s.validate()?;
    let step = matsubara_step(s.temperature)?;
    let h = HBAR_C / (2.0 * s.separation);
    let prefactor =
        -BOLTZMANN * s.temperature / (8.0 * std::f64::consts::PI * s.separation.powi(3));
    let prefactor = pressure_to_pascal(prefactor);

    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    let mut per_term = Vec::new();
    let mut prev_term: Option<f64> = None;
    let mut next = 0u64;
    while next < s.max_terms {
        let end = (next + CHUNK as u64).min(s.max_terms);
        let chunk: Vec<Result<(f64, f64)>> = (next..end)
            .into_par_iter()
            .map(|l| matsubara_term(l, l as f64 * step, h, s.quad_tol, &coeffs))
            .collect();
        for (offset, r) in chunk.into_iter().enumerate() {
            let l = next + offset as u64;
            let (value, error) = r?;
            let weight = if l == 0 { 0.5 } else { 1.0 };
            let term = prefactor * weight * value;
            sum.add(term);
            err += (prefactor * weight * error).abs();
            if s.keep_terms {
                per_term.push(term);
            }
            let total = sum.sum();
            let done = if total == 0.0 {
                term == 0.0
            } else {
                term.abs() <= s.term_tol * total.abs()
            };
            if done {
                err += remainder_estimate(prev_term, term);
                return Ok(PressureResult {
                    pressure: total,
                    terms_used: l + 1,
                    per_term: s.keep_terms.then_some(per_term),
                    quad_error_estimate: err,
                });
            }
            prev_term = Some(term);
        }
        next = end;
    }
    Err(CasimirError::Convergence {
        context: "Matsubara sum".into(),
        estimate: sum.sum(),
        error: prev_term.map_or(f64::INFINITY, f64::abs),
    })
}

/// Geometric-series bound on the discarded terms.
fn remainder_estimate(prev: Option<f64>, last: f64) -> f64 {
    match prev {
        Some(p) if p != 0.0 => {
            let ratio = (last / p).abs();
            if ratio < 1.0 {
                last.abs() * ratio / (1.0 - ratio)
            } else {
                last.abs()
            }
        }
        _ => last.abs(),
    }
}

/// ∫ y² Σ_α r² e^{−y}/(1 − r² e^{−y}) dy over [y_l, ∞) and its error.
fn matsubara_term<F>(l: u64, xi: f64, h: f64, tol: f64, coeffs: &F) -> Result<(f64, f64)>
where
    F: Fn(u64, f64, f64) -> Result<ReflectionPair<f64>>,
{
    let y_l = xi / h;
    let integrand = |y: f64, k: f64| -> Result<f64> {
        let r = coeffs(l, xi, k)?;
        Ok(y * y * (mode_factor(r.r_tm, y) + mode_factor(r.r_te, y)))
    };

    let eval_y = |y: f64| -> Result<f64> {
        let k = h * ((y - y_l) * (y + y_l)).max(0.0).sqrt();
        integrand(y, k)
    };
    let mut peak: f64 = 0.0;
    let mut dy = 0.25;
    let mut y = y_l;
    loop {
        y += dy;
        let v = eval_y(y)?.abs();
        peak = peak.max(v);
        if v <= TAIL_FRACTION * peak || y - y_l > 2000.0 {
            break;
        }
        dy = (dy * 1.25).min(2.0);
    }
    let span = y - y_l;

    let settings = QuadSettings::relative(tol);
    // The quadrature takes a plain f64 closure; keep the first error aside.
    let failure = std::cell::Cell::new(None);
    let guarded = |k: f64, y: f64, jac: f64| match integrand(y, k) {
        Ok(v) => v * jac,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let res = if l == 0 {
        let pts = partition(span, |t| t);
        integrate_partition(|y| guarded(h * y, y, 1.0), &pts, settings)
    } else {
        // y = y_l + s² removes the square-root edge at k̂ = 0.
        let pts = partition(span, f64::sqrt);
        integrate_partition(
            |sv| {
                let s2 = sv * sv;
                let k = h * sv * (2.0 * y_l + s2).sqrt();
                guarded(k, y_l + s2, 2.0 * sv)
            },
            &pts,
            settings,
        )
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let res = res.map_err(|e| match e {
        CasimirError::Convergence {
            estimate, error, ..
        } => CasimirError::Convergence {
            context: format!("transverse wave-vector integral at l = {l}"),
            estimate,
            error,
        },
        other => other,
    })?;
    Ok((res.value, res.error))
}

/// Breakpoints at fixed offsets in y, mapped to the integration variable.
fn partition(span: f64, map: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    for off in [0.5, 2.0, 6.0, 15.0] {
        if off < span {
            pts.push(map(off));
        }
    }
    pts.push(map(span));
    pts
}

/// r² e^{−y}/(1 − r² e^{−y}) with the denominator written as
/// (1 − r²) − r² expm1(−y) so that r² → 1, y → 0 stays accurate.
fn mode_factor(r: f64, y: f64) -> f64 {
    let r2 = r * r;
    if r2 == 0.0 {
        return 0.0;
    }
    r2 * (-y).exp() / ((1.0 - r2) - r2 * (-y).exp_m1())
}

/// Large-separation limit of the pressure in Pa: only the static TM
/// term survives, plus the static TE term when `te_zero_weight` is 1.
pub fn classical_limit_pressure(a: f64, temperature: f64, te_zero_weight: u8) -> Result<f64> {
    if !(a > 0.0 && temperature > 0.0) {
        return Err(domain(format!(
            "need a > 0 and T > 0, got ({a}, {temperature})"
        )));
    }
    if te_zero_weight > 1 {
        return Err(domain("te_zero_weight must be 0 or 1"));
    }
    let p = -ZETA_3 * BOLTZMANN * temperature / (8.0 * std::f64::consts::PI * a.powi(3));
    Ok(pressure_to_pascal(p * (1.0 + te_zero_weight as f64)))
}

/// Zero-temperature pressure between ideal mirrors, in Pa.
pub fn ideal_metal_pressure_zero_t(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(domain(format!("separation must be > 0, got {a}")));
    }
    let pi2 = std::f64::consts::PI.powi(2);
    Ok(pressure_to_pascal(-pi2 * HBAR_C / (240.0 * a.powi(4))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::{DrudeParams, NonlocalParams};

    fn drude() -> ResponseModel {
        ResponseModel::Drude(DrudeParams::GOLD)
    }

    #[test]
    fn analytic_oracles() {
        let p1 = ideal_metal_pressure_zero_t(1.0).unwrap();
        assert!((p1 / -1.30022e-3 - 1.0).abs() < 2e-3, "{p1}");
        assert!((ideal_metal_pressure_zero_t(0.5).unwrap() / p1 - 16.0).abs() < 1e-12);
        let c = classical_limit_pressure(50.0, 300.0, 0).unwrap();
        assert!((c / -1.5848e-9 - 1.0).abs() < 1e-3, "{c}");
        assert_eq!(classical_limit_pressure(50.0, 300.0, 1).unwrap(), 2.0 * c);
        assert!((classical_limit_pressure(25.0, 300.0, 0).unwrap() / c - 8.0).abs() < 1e-12);
        assert!(classical_limit_pressure(0.0, 300.0, 0).is_err());
        assert!(ideal_metal_pressure_zero_t(-1.0).is_err());
    }

    #[test]
    fn perfect_reflector_matches_zero_temperature() {
        let q = PressureQuery::new(0.5, 1.0, ResponseModel::PerfectReflector);
        let r = casimir_pressure(&q).unwrap();
        let exact = ideal_metal_pressure_zero_t(0.5).unwrap();
        assert!(
            (r.pressure / exact - 1.0).abs() < 2e-3,
            "{} vs {exact}",
            r.pressure
        );
    }

    #[test]
    fn drude_large_separation_is_classical() {
        let r = casimir_pressure(&PressureQuery::new(50.0, 300.0, drude())).unwrap();
        let c = classical_limit_pressure(50.0, 300.0, 0).unwrap();
        assert!((r.pressure / c - 1.0).abs() < 1e-3, "{} vs {c}", r.pressure);
        let p = casimir_pressure(&PressureQuery::new(
            50.0,
            300.0,
            ResponseModel::plasma(9.0).unwrap(),
        ))
        .unwrap();
        assert!((p.pressure / r.pressure - 2.0).abs() < 0.03);
    }

    #[test]
    fn zero_reflection_gives_exact_zero() {
        let s = PressureQuery::new(1.0, 300.0, drude()).settings();
        let r = pressure_from_coefficients(&s, |_, _, _| {
            Ok(ReflectionPair {
                r_tm: 0.0,
                r_te: 0.0,
            })
        })
        .unwrap();
        assert_eq!(r.pressure, 0.0);
        assert_eq!(r.terms_used, 1);
    }

    #[test]
    fn coefficient_errors_propagate() {
        let s = PressureQuery::new(1.0, 300.0, drude()).settings();
        let r = pressure_from_coefficients(&s, |l, _, _| {
            if l == 3 {
                Err(CasimirError::Singularity("test".into()))
            } else {
                Ok(ReflectionPair {
                    r_tm: 0.5,
                    r_te: -0.5,
                })
            }
        });
        assert!(matches!(r, Err(CasimirError::Singularity(_))));
    }

    #[test]
    fn term_cap_reports_non_convergence() {
        let mut q = PressureQuery::new(0.5, 1.0, ResponseModel::PerfectReflector);
        q.max_terms = 10;
        assert!(matches!(
            casimir_pressure(&q),
            Err(CasimirError::Convergence { .. })
        ));
    }

    #[test]
    fn rejects_bad_queries() {
        for q in [
            PressureQuery::new(0.0, 300.0, drude()),
            PressureQuery::new(1.0, 0.0, drude()),
            PressureQuery::new(1.0, 300.0, drude()).with_tolerances(0.0, 1e-10),
            PressureQuery::new(1.0, 300.0, drude()).with_tolerances(1e-9, 1e-2),
        ] {
            assert!(matches!(casimir_pressure(&q), Err(CasimirError::Domain(_))));
        }
    }

    #[test]
    fn per_term_record_sums_to_pressure() {
        let mut q = PressureQuery::new(1.0, 300.0, drude());
        q.keep_terms = true;
        let r = casimir_pressure(&q).unwrap();
        let terms = r.per_term.clone().unwrap();
        assert_eq!(terms.len() as u64, r.terms_used);
        let s: CompensatedSum = terms.iter().copied().collect();
        assert_eq!(s.sum(), r.pressure);
        let last = *terms.last().unwrap();
        assert!(last.abs() <= q.term_tol * r.pressure.abs());
    }

    #[test]
    fn deterministic_across_thread_pools() {
        let q = PressureQuery::new(
            1.0,
            300.0,
            ResponseModel::NonlocalAlt(NonlocalParams::gold_default()),
        );
        let a = casimir_pressure(&q).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| casimir_pressure(&q)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tolerance_contract() {
        let base = PressureQuery::new(2.0, 300.0, drude()).with_tolerances(1e-6, 1e-6);
        let r1 = casimir_pressure(&base).unwrap();
        let r2 = casimir_pressure(&base.clone().with_tolerances(5e-7, 5e-7)).unwrap();
        assert!((r1.pressure - r2.pressure).abs() < r1.quad_error_estimate);
    }
}
