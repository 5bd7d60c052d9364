//! Reflection amplitudes on the imaginary and real frequency axes.
//!
//! On the imaginary axis the amplitudes follow from the transverse and
//! longitudinal permittivities through the surface impedances. When the
//! permittivities depend on `k⊥` only, the impedance integrals have a
//! closed form; [`impedance_numeric`] evaluates them by quadrature for
//! arbitrary `(k⊥, k_z)` dependence and serves as the independent check.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::{Complex64, ComplexFloat};
use serde::Serialize;

use crate::error::{domain, CasimirError, Result};
use crate::quadrature::{integrate_partition, QuadSettings};
use crate::response::{eval_real_axis, DrudeParams, EpsPair, NonlocalParams, ResponseModel};

/// TM and TE reflection amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionPair<T> {
    pub r_tm: T,
    pub r_te: T,
}

/// Surface impedances, normalised so that `ξ Z_TM` and `q Z_TE` are
/// compared against `q` and `ξ` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpedancePair {
    pub z_tm: f64,
    pub z_te: f64,
}

/// Wave vectors at one imaginary-axis point, all as energies in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicPoint {
    pub xi: f64,
    pub k_hat: f64,
    /// √(k̂² + ξ²)
    pub q: f64,
    /// √(k̂² + ε_T ξ²)
    pub k_t: f64,
}

impl KinematicPoint {
    pub fn new(xi: f64, k_hat: f64, eps_t: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(domain(format!(
                "reflection needs xi > 0, got {xi}; use zero_freq_limit for the static term"
            )));
        }
        if !(k_hat >= 0.0 && k_hat.is_finite()) {
            return Err(domain(format!("k_hat must be >= 0, got {k_hat}")));
        }
        let k_t2 = k_hat * k_hat + eps_t * xi * xi;
        if !(k_t2 >= 0.0 && k_t2.is_finite()) {
            return Err(domain(format!("eps_t = {eps_t} gives no decaying wave")));
        }
        Ok(Self {
            xi,
            k_hat,
            q: k_hat.hypot(xi),
            k_t: k_t2.sqrt(),
        })
    }
}

/// TM/TE amplitudes of a half-space whose transverse and longitudinal
/// permittivities depend on `k⊥` only. With `eps_l == eps_t` the
/// correction term is exactly zero and the Fresnel form results.
fn nonlocal_kernel<T: ComplexFloat>(eps_t: T, eps_l: T, q: T, k_t: T, k: T) -> ReflectionPair<T> {
    let corr = k * (eps_t - eps_l) / eps_l;
    let a = eps_t * q;
    ReflectionPair {
        r_tm: (a - k_t - corr) / (a + k_t + corr),
        r_te: (q - k_t) / (q + k_t),
    }
}

/// Fresnel amplitudes for a local permittivity `eps ≥ 1`.
pub fn fresnel(eps: f64, xi: f64, k_hat: f64) -> Result<ReflectionPair<f64>> {
    if !(eps >= 1.0) {
        return Err(domain(format!(
            "Fresnel amplitudes need eps >= 1, got {eps}"
        )));
    }
    let kin = KinematicPoint::new(xi, k_hat, eps)?;
    Ok(nonlocal_kernel(eps, eps, kin.q, kin.k_t, k_hat))
}

/// Amplitudes for a `k⊥`-dependent transverse/longitudinal pair.
pub fn nonlocal_coeffs(eps: EpsPair<f64>, xi: f64, k_hat: f64) -> Result<ReflectionPair<f64>> {
    if eps.eps_l == 0.0 {
        return Err(CasimirError::Singularity(
            "longitudinal permittivity vanishes".into(),
        ));
    }
    let kin = KinematicPoint::new(xi, k_hat, eps.eps_t)?;
    Ok(nonlocal_kernel(eps.eps_t, eps.eps_l, kin.q, kin.k_t, k_hat))
}

/// Closed-form impedances for a `k⊥`-only dependence.
pub fn impedance_closed(eps: EpsPair<f64>, xi: f64, k_hat: f64) -> Result<ImpedancePair> {
    if eps.eps_l == 0.0 {
        return Err(CasimirError::Singularity(
            "longitudinal permittivity vanishes".into(),
        ));
    }
    let kin = KinematicPoint::new(xi, k_hat, eps.eps_t)?;
    // (k_T - k)/(ξ ε_T) rewritten as ξ/(k_T + k) to avoid cancellation.
    Ok(ImpedancePair {
        z_tm: k_hat / (xi * eps.eps_l) + xi / (kin.k_t + k_hat),
        z_te: xi / kin.k_t,
    })
}

/// Amplitudes from surface impedances.
pub fn reflection_from_impedance(z: ImpedancePair, xi: f64, k_hat: f64) -> ReflectionPair<f64> {
    let q = k_hat.hypot(xi);
    let a = xi * z.z_tm;
    let b = q * z.z_te;
    ReflectionPair {
        r_tm: (q - a) / (q + a),
        r_te: (b - xi) / (b + xi),
    }
}

/// Impedances from the k_z integrals over the full line, for
/// permittivities given as functions of `(ξ, k̂⊥, k̂_z)`.
///
/// The central interval is widened geometrically until the `1/k_z²`
/// tail beyond the cut, bounded by `2 K |f(±K)|`, falls below
/// `tol · |Z|`.
pub fn impedance_numeric<F>(eps_of_k: F, xi: f64, k_hat: f64, tol: f64) -> Result<ImpedancePair>
where
    F: Fn(f64, f64, f64) -> EpsPair<f64>,
{
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(xi > 0.0 && xi.is_finite()) || !(k_hat >= 0.0 && k_hat.is_finite()) {
        return Err(domain(format!(
            "need xi > 0 and k_hat >= 0, got ({xi}, {k_hat})"
        )));
    }
    let k2 = k_hat * k_hat;
    let xi2 = xi * xi;
    let k_t_at = |kz: f64| (k2 + eps_of_k(xi, k_hat, kz).eps_t * xi2).sqrt();

    let tm = |kz: f64| {
        let e = eps_of_k(xi, k_hat, kz);
        let kz2 = kz * kz;
        let full = k2 + kz2;
        let longitudinal = if k_hat == 0.0 {
            0.0
        } else {
            k2 / (xi2 * e.eps_l * full)
        };
        // kz²/k² tends to 1 at k⊥ = 0.
        let ratio = if full > 0.0 { kz2 / full } else { 1.0 };
        longitudinal + ratio / (k2 + e.eps_t * xi2 + kz2)
    };
    let te = |kz: f64| {
        let e = eps_of_k(xi, k_hat, kz);
        1.0 / (k2 + e.eps_t * xi2 + kz * kz)
    };

    let k_t0 = k_t_at(0.0);
    let scale = k_hat.max(k_t0).max(xi);
    let z_tm = line_integral(&tm, scale, &[k_hat, k_t0], tol, "TM impedance integral")?;
    let z_te = line_integral(&te, scale, &[k_t0], tol, "TE impedance integral")?;
    Ok(ImpedancePair {
        z_tm: xi / PI * z_tm,
        z_te: xi / PI * z_te,
    })
}

fn line_integral<F: Fn(f64) -> f64>(
    f: &F,
    scale: f64,
    features: &[f64],
    tol: f64,
    context: &str,
) -> Result<f64> {
    const MAX_WIDENINGS: usize = 40;
    let inner = 4.0 * scale;
    let mut pts: Vec<f64> = vec![-inner, 0.0, inner];
    for &x in features {
        for y in [x, 0.1 * x, 10.0 * x] {
            if y > 0.0 && y < inner {
                pts.push(y);
                pts.push(-y);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let q = QuadSettings::relative(0.05 * tol);
    let mut total = integrate_partition(f, &pts, q)?.value;

    let mut k_cut = inner;
    for _ in 0..MAX_WIDENINGS {
        let tail = 2.0 * k_cut * f(k_cut).abs().max(f(-k_cut).abs());
        if tail <= tol * total.abs() {
            return Ok(total);
        }
        let next = 10.0 * k_cut;
        let abs = QuadSettings::relative(0.05 * tol).with_abs_tol(0.01 * tol * total.abs());
        // u = 1/k_z maps each annulus to a finite, smooth range.
        let g_pos = |u: f64| f(1.0 / u) / (u * u);
        let g_neg = |u: f64| f(-1.0 / u) / (u * u);
        let bounds = [1.0 / next, 1.0 / k_cut];
        total += integrate_partition(g_pos, &bounds, abs)?.value;
        total += integrate_partition(g_neg, &bounds, abs)?.value;
        k_cut = next;
    }
    Err(CasimirError::Convergence {
        context: context.into(),
        estimate: total,
        error: 2.0 * k_cut * f(k_cut).abs(),
    })
}

/// Static (ξ = 0) amplitudes, evaluated analytically per model.
pub fn zero_freq_limit(model: &ResponseModel, k_hat: f64) -> Result<ReflectionPair<f64>> {
    if !(k_hat > 0.0 && k_hat.is_finite()) {
        return Err(domain(format!("static limit needs k_hat > 0, got {k_hat}")));
    }
    match model {
        ResponseModel::Drude(_) => Ok(ReflectionPair {
            r_tm: 1.0,
            r_te: 0.0,
        }),
        ResponseModel::Plasma { omega_p } => Ok(ReflectionPair {
            r_tm: 1.0,
            r_te: static_te(k_hat, omega_p * omega_p),
        }),
        ResponseModel::NonlocalAlt(p) => nonlocal_static(p, k_hat, 1.0),
        ResponseModel::PerfectReflector => Ok(ReflectionPair {
            r_tm: 1.0,
            r_te: -1.0,
        }),
        ResponseModel::WithCore { inner, core } => match inner.as_ref() {
            ResponseModel::NonlocalAlt(p) => nonlocal_static(p, k_hat, core.static_value),
            other => zero_freq_limit(other, k_hat),
        },
    }
}

/// (k − √(k² + C))/(k + √(k² + C)), written as −C/(k + √(k² + C))².
fn static_te(k: f64, c: f64) -> f64 {
    let s = (k * k + c).sqrt();
    -c / ((k + s) * (k + s))
}

/// Static limit of the nonlocal pair. `background` is the ξ → 0 value of
/// whatever replaces the vacuum unity (1 without an interband core).
fn nonlocal_static(p: &NonlocalParams, k_hat: f64, background: f64) -> Result<ReflectionPair<f64>> {
    let DrudeParams { omega_p, gamma } = p.drude;
    if gamma == 0.0 {
        return Err(domain("nonlocal static limit is undefined at gamma = 0"));
    }
    let wp2 = omega_p * omega_p;
    let vl_term = 2.0 * gamma * p.vl_k(k_hat);
    let r_tm = if background == 1.0 {
        wp2 / (wp2 + vl_term)
    } else {
        // (ε_L(0) − 1)/(ε_L(0) + 1) with ε_L(0) = background + ω_p²/(γ v^L k⊥)
        let w = 0.5 * vl_term;
        (wp2 + (background - 1.0) * w) / (wp2 + (background + 1.0) * w)
    };
    Ok(ReflectionPair {
        r_tm,
        r_te: static_te(k_hat, wp2 * p.vt_k(k_hat) / gamma),
    })
}

/// Amplitudes at the Matsubara frequency `xi > 0` for any model.
pub fn imag_axis_coeffs(model: &ResponseModel, xi: f64, k_hat: f64) -> Result<ReflectionPair<f64>> {
    match model {
        ResponseModel::PerfectReflector => {
            KinematicPoint::new(xi, k_hat, 1.0)?;
            Ok(ReflectionPair {
                r_tm: 1.0,
                r_te: -1.0,
            })
        }
        _ => nonlocal_coeffs(model.eval_imag_axis(xi, k_hat)?, xi, k_hat),
    }
}

/// Square root on the branch with non-negative imaginary part.
fn sqrt_upper(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Amplitudes of a plane wave incident at angle `theta` with frequency
/// `omega`, on shell (`k̂ = ω sinθ`).
pub fn real_axis_coeffs(
    model: &ResponseModel,
    omega: f64,
    theta: f64,
) -> Result<ReflectionPair<Complex64>> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(domain(format!(
            "incidence angle must lie in [0, π/2), got {theta}"
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(domain(format!("omega must be positive, got {omega}")));
    }
    if let ResponseModel::PerfectReflector = model {
        return Ok(ReflectionPair {
            r_tm: Complex64::new(1.0, 0.0),
            r_te: Complex64::new(-1.0, 0.0),
        });
    }
    let (sin, cos) = theta.sin_cos();
    let eps = eval_real_axis(model, omega, omega * sin)?.eps;
    let (e_t, e_l) = (eps.eps_t, eps.eps_l);
    let root = sqrt_upper(e_t - sin * sin);
    // Continuation of the imaginary-axis form to ξ = −iω; the longitudinal
    // correction enters with a factor −i.
    let corr = Complex64::new(0.0, -sin) * (e_t - e_l) / e_l;
    let a = e_t * cos;
    Ok(ReflectionPair {
        r_tm: (a - root + corr) / (a + root - corr),
        r_te: (cos - root) / (cos + root),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectanceDeviation {
    pub r_tm: f64,
    pub r_te: f64,
    pub r_tm_local: f64,
    pub r_te_local: f64,
    /// (R − R_loc)/R_loc for TM.
    pub d_tm: f64,
    pub d_te: f64,
}

/// Reflectances |r|² of `model_nl` and their relative deviation from
/// those of `model_loc`.
pub fn reflectance_deviation(
    model_nl: &ResponseModel,
    model_loc: &ResponseModel,
    omega: f64,
    theta: f64,
) -> Result<ReflectanceDeviation> {
    let a = real_axis_coeffs(model_nl, omega, theta)?;
    let b = real_axis_coeffs(model_loc, omega, theta)?;
    let (r_tm, r_te) = (a.r_tm.norm_sqr(), a.r_te.norm_sqr());
    let (r_tm_local, r_te_local) = (b.r_tm.norm_sqr(), b.r_te.norm_sqr());
    if r_tm_local == 0.0 || r_te_local == 0.0 {
        return Err(CasimirError::Division(format!(
            "local reflectance vanishes at omega={omega}, theta={theta}"
        )));
    }
    Ok(ReflectanceDeviation {
        r_tm,
        r_te,
        r_tm_local,
        r_te_local,
        d_tm: (r_tm - r_tm_local) / r_tm_local,
        d_te: (r_te - r_te_local) / r_te_local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::DrudeParams;
    use proptest::prelude::*;

    const XI1: f64 = 0.162433;

    fn gold() -> NonlocalParams {
        NonlocalParams::gold_default()
    }

    #[test]
    fn fresnel_examples() {
        let r = fresnel(2526.8, XI1, 1.0).unwrap();
        assert!((r.r_tm - 0.99359).abs() < 1e-5, "{}", r.r_tm);
        assert!((r.r_te + 0.78070).abs() < 1e-5, "{}", r.r_te);
        let v = fresnel(1.0, XI1, 1.0).unwrap();
        assert_eq!((v.r_tm, v.r_te), (0.0, 0.0));
        let pc = fresnel(1e20, XI1, 1.0).unwrap();
        assert!((pc.r_tm - 1.0).abs() < 1e-6 && (pc.r_te + 1.0).abs() < 1e-6);
        assert!(fresnel(2.0, 0.0, 1.0).is_err());
        assert!(fresnel(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn nonlocal_gold_point() {
        let m = ResponseModel::NonlocalAlt(gold());
        let eps = m.eval_imag_axis(XI1, 1.0).unwrap();
        assert!((eps.eps_t - 3027.8).abs() < 0.2);
        let r = nonlocal_coeffs(eps, XI1, 1.0).unwrap();
        let q = 1.0f64.hypot(XI1);
        let kt = (1.0 + eps.eps_t * XI1 * XI1).sqrt();
        assert!((r.r_te - (q - kt) / (q + kt)).abs() < 1e-15);
        let via_z = reflection_from_impedance(impedance_closed(eps, XI1, 1.0).unwrap(), XI1, 1.0);
        assert!((via_z.r_tm - r.r_tm).abs() < 1e-12 && (via_z.r_te - r.r_te).abs() < 1e-12);
    }

    #[test]
    fn singular_longitudinal_permittivity() {
        let e = EpsPair {
            eps_t: 2.0,
            eps_l: 0.0,
        };
        assert!(matches!(
            nonlocal_coeffs(e, 1.0, 1.0),
            Err(CasimirError::Singularity(_))
        ));
        assert!(matches!(
            impedance_closed(e, 1.0, 1.0),
            Err(CasimirError::Singularity(_))
        ));
    }

    #[test]
    fn impedance_local_limit() {
        let (eps, xi, k) = (40.0, 0.3, 0.7);
        let z = impedance_closed(EpsPair::local(eps), xi, k).unwrap();
        let kl = (k * k + eps * xi * xi).sqrt();
        assert!((z.z_tm - kl / (xi * eps)).abs() < 1e-14);
        assert!((z.z_te - xi / kl).abs() < 1e-15);
        let big = impedance_closed(
            EpsPair {
                eps_t: eps,
                eps_l: 1e300,
            },
            xi,
            k,
        )
        .unwrap();
        assert!((big.z_tm - (kl - k) / (xi * eps)).abs() < 1e-12);
    }

    #[test]
    fn numeric_impedance_local_oracle() {
        let (eps, xi, k) = (40.0, 0.3, 0.7);
        let z = impedance_numeric(|_, _, _| EpsPair::local(eps), xi, k, 1e-8).unwrap();
        let kl = (k * k + eps * xi * xi).sqrt();
        assert!(((z.z_tm - kl / (xi * eps)) / z.z_tm).abs() < 1e-8, "{z:?}");
        assert!(((z.z_te - xi / kl) / z.z_te).abs() < 1e-8, "{z:?}");
    }

    #[test]
    fn numeric_impedance_nonlocal_gold() {
        let m = ResponseModel::NonlocalAlt(gold());
        let eps_of_k = |x: f64, k: f64, _kz: f64| m.eval_imag_axis(x, k).unwrap();
        let closed = impedance_closed(m.eval_imag_axis(XI1, 1.0).unwrap(), XI1, 1.0).unwrap();
        let z = impedance_numeric(eps_of_k, XI1, 1.0, 1e-9).unwrap();
        assert!(((z.z_tm - closed.z_tm) / closed.z_tm).abs() < 1e-6);
        assert!(((z.z_te - closed.z_te) / closed.z_te).abs() < 1e-6);
        let loose = impedance_numeric(eps_of_k, XI1, 1.0, 1e-3).unwrap();
        assert!(((loose.z_tm - z.z_tm) / z.z_tm).abs() < 1e-3);
        assert!(((loose.z_te - z.z_te) / z.z_te).abs() < 1e-3);
        assert!(impedance_numeric(eps_of_k, XI1, 1.0, 0.0).is_err());
    }

    #[test]
    fn numeric_impedance_at_normal_incidence() {
        let z = impedance_numeric(|_, _, _| EpsPair::local(9.0), 0.5, 0.0, 1e-9).unwrap();
        // k⊥ = 0: Z_TM = Z_TE = 1/√ε
        assert!((z.z_tm - 1.0 / 3.0).abs() < 1e-8);
        assert!((z.z_te - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn numeric_impedance_with_kz_dependence_is_positive() {
        // A k_z-dependent longitudinal response has no closed form here.
        let z = impedance_numeric(
            |x, k, kz| EpsPair {
                eps_t: 1.0 + 81.0 / (x * (x + 0.035)),
                eps_l: 1.0 + 81.0 / (x * (x + 0.035) + 0.01 * (k * k + kz * kz)),
            },
            0.2,
            0.5,
            1e-7,
        )
        .unwrap();
        assert!(z.z_tm > 0.0 && z.z_te > 0.0);
    }

    #[test]
    fn static_limit_examples() {
        let p = ResponseModel::plasma(9.0).unwrap();
        let r = zero_freq_limit(&p, 9.0).unwrap();
        assert_eq!(r.r_tm, 1.0);
        assert!((r.r_te + 0.17158).abs() < 1e-5, "{}", r.r_te);
        let nl = ResponseModel::NonlocalAlt(gold());
        assert!((zero_freq_limit(&nl, 1.0).unwrap().r_tm - 0.999972).abs() < 1e-6);
        assert!((zero_freq_limit(&nl, 0.1).unwrap().r_te + 0.92939).abs() < 1e-5);
        let local =
            ResponseModel::NonlocalAlt(NonlocalParams::new(DrudeParams::GOLD, 0.0, 0.0).unwrap());
        assert_eq!(
            zero_freq_limit(&local, 0.4).unwrap(),
            ReflectionPair {
                r_tm: 1.0,
                r_te: 0.0
            }
        );
        let d = ResponseModel::Drude(DrudeParams::GOLD);
        assert_eq!(
            zero_freq_limit(&d, 0.4).unwrap(),
            ReflectionPair {
                r_tm: 1.0,
                r_te: 0.0
            }
        );
        assert_eq!(
            zero_freq_limit(&ResponseModel::PerfectReflector, 0.4).unwrap(),
            ReflectionPair {
                r_tm: 1.0,
                r_te: -1.0
            }
        );
        let collisionless = ResponseModel::NonlocalAlt(
            NonlocalParams::new(DrudeParams::new(9.0, 0.0).unwrap(), 0.03, 0.03).unwrap(),
        );
        assert!(zero_freq_limit(&collisionless, 1.0).is_err());
        assert!(zero_freq_limit(&d, 0.0).is_err());
    }

    #[test]
    fn static_limit_is_continuous() {
        let nl = ResponseModel::NonlocalAlt(gold());
        for k in [0.1, 1.0, 9.0] {
            let r0 = zero_freq_limit(&nl, k).unwrap();
            let r = imag_axis_coeffs(&nl, 1e-6, k).unwrap();
            assert!((r.r_tm - r0.r_tm).abs() < 1e-4, "{k}: {r:?} vs {r0:?}");
            assert!((r.r_te - r0.r_te).abs() < 1e-4, "{k}: {r:?} vs {r0:?}");
        }
    }

    #[test]
    fn real_axis_normal_incidence() {
        for m in [
            ResponseModel::NonlocalAlt(gold()),
            ResponseModel::Drude(DrudeParams::GOLD),
            ResponseModel::plasma(9.0).unwrap(),
        ] {
            let r = real_axis_coeffs(&m, 0.7, 0.0).unwrap();
            assert!((r.r_tm + r.r_te).norm() < 1e-14);
        }
        let d = ResponseModel::Drude(DrudeParams::GOLD);
        assert!(real_axis_coeffs(&d, 0.7, FRAC_PI_2).is_err());
        assert!(real_axis_coeffs(&d, 0.7, -0.1).is_err());
        assert!(real_axis_coeffs(&d, 0.0, 0.3).is_err());
    }

    #[test]
    fn real_axis_local_reduction() {
        let local =
            ResponseModel::NonlocalAlt(NonlocalParams::new(DrudeParams::GOLD, 0.0, 0.0).unwrap());
        let d = ResponseModel::Drude(DrudeParams::GOLD);
        for (w, th) in [(0.1, 0.3), (0.5, 1.0), (2.0, 1.4)] {
            let a = real_axis_coeffs(&local, w, th).unwrap();
            let b = real_axis_coeffs(&d, w, th).unwrap();
            assert_eq!(a, b);
            // Standard Fresnel form.
            let (s, c) = f64::sin_cos(th);
            let e = d.eval_real_axis(w, w * s).unwrap().eps.eps_t;
            let root = (e - s * s).sqrt();
            assert!((b.r_tm - (e * c - root) / (e * c + root)).norm() < 1e-14);
        }
    }

    /// The real-axis amplitudes must be the boundary values of the
    /// imaginary-axis kernel continued to ξ = η − iω.
    #[test]
    fn real_axis_is_continuation_of_kernel() {
        let p = gold();
        let m = ResponseModel::NonlocalAlt(p);
        for (w, th) in [(0.1, 0.5), (0.5, std::f64::consts::FRAC_PI_3), (1.0, 1.2)] {
            let k = w * f64::sin(th);
            let xi = Complex64::new(1e-10, -w);
            let d = p.drude.omega_p * p.drude.omega_p / (xi * (xi + p.drude.gamma));
            let e_t = 1.0 + d * (1.0 + p.vt_k(k) / xi);
            let e_l = 1.0 + d / (1.0 + p.vl_k(k) / xi);
            let kc = Complex64::new(k, 0.0);
            let q = (kc * kc + xi * xi).sqrt();
            let kt = (kc * kc + e_t * xi * xi).sqrt();
            let cont = nonlocal_kernel(e_t, e_l, q, kt, kc);
            let r = real_axis_coeffs(&m, w, th).unwrap();
            assert!(
                (cont.r_tm - r.r_tm).norm() < 1e-7,
                "{} vs {}",
                cont.r_tm,
                r.r_tm
            );
            assert!(
                (cont.r_te - r.r_te).norm() < 1e-7,
                "{} vs {}",
                cont.r_te,
                r.r_te
            );
        }
    }

    #[test]
    fn reflectance_deviation_edges() {
        let nl = ResponseModel::NonlocalAlt(gold());
        let d = ResponseModel::Drude(DrudeParams::GOLD);
        let same = reflectance_deviation(&d, &d, 0.4, 0.8).unwrap();
        assert_eq!((same.d_tm, same.d_te), (0.0, 0.0));
        let normal = reflectance_deviation(&nl, &d, 0.4, 0.0).unwrap();
        assert_eq!((normal.d_tm, normal.d_te), (0.0, 0.0));
        let oblique = reflectance_deviation(&nl, &d, 0.5, std::f64::consts::FRAC_PI_3).unwrap();
        assert!(oblique.d_tm.abs() < 1e-2 && oblique.d_te.abs() < 1e-2);
        assert!(oblique.r_tm <= 1.0 && oblique.r_te <= 1.0);
    }

    proptest! {
        #[test]
        fn imag_axis_bounds(xi in 1e-3f64..1e2, k in 0.0f64..1e2, vt in 0.0f64..0.1, vl in 0.0f64..0.1) {
            let models = [
                ResponseModel::Drude(DrudeParams::GOLD),
                ResponseModel::plasma(9.0).unwrap(),
                ResponseModel::NonlocalAlt(NonlocalParams::new(DrudeParams::GOLD, vt, vl).unwrap()),
                ResponseModel::PerfectReflector,
            ];
            for m in &models {
                let r = imag_axis_coeffs(m, xi, k).unwrap();
                prop_assert!((0.0..=1.0).contains(&r.r_tm), "{:?}", r);
                prop_assert!((-1.0..=0.0).contains(&r.r_te), "{:?}", r);
            }
        }

        #[test]
        fn impedance_route_matches_direct(xi in 1e-3f64..1e2, k in 0.0f64..1e2, vt in 0.0f64..0.1, vl in 0.0f64..0.1) {
            let m = ResponseModel::NonlocalAlt(NonlocalParams::new(DrudeParams::GOLD, vt, vl).unwrap());
            let eps = m.eval_imag_axis(xi, k).unwrap();
            let direct = nonlocal_coeffs(eps, xi, k).unwrap();
            let z = impedance_closed(eps, xi, k).unwrap();
            prop_assert!(z.z_tm > 0.0 && z.z_te > 0.0);
            let via = reflection_from_impedance(z, xi, k);
            prop_assert!((via.r_tm - direct.r_tm).abs() < 1e-12);
            prop_assert!((via.r_te - direct.r_te).abs() < 1e-12);
        }

        #[test]
        fn passive_reflectance_bounded(omega in 0.05f64..3.0, theta in 0.0f64..1.5) {
            let p = gold();
            let m = ResponseModel::NonlocalAlt(p);
            let eps = m.eval_real_axis(omega, omega * theta.sin()).unwrap();
            prop_assume!(!eps.non_passive);
            let r = real_axis_coeffs(&m, omega, theta).unwrap();
            prop_assert!(r.r_tm.norm_sqr() <= 1.0 + 1e-12 && r.r_te.norm_sqr() <= 1.0 + 1e-12);
        }
    }
}
