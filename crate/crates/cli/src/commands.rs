use std::fs::File;
use std::io::BufReader;

use anyhow::{Context, Result};
use rayon::prelude::*;

use casimir_core::kramers_kronig::{verify, KKRelation, KKReport, PVSettings};
use casimir_core::lifshitz::{casimir_pressure, PressureQuery};
use casimir_core::quadrature::{lin_space, log_space};
use casimir_core::reflection::reflectance_deviation;
use casimir_core::response::ResponseModel;
use casimir_core::sphere_plate::{
    force_gradient, parse_experimental_csv, Beta, SpherePlateConfig, SpherePlateWarning,
};

use crate::args::{
    Axis, EpsilonArgs, Format, GradientArgs, Grid, KkArgs, ModelKind, PressureArgs, ReflectanceArgs,
};
use crate::models::{reject_core, Materials};
use crate::table::{fmt_num, Table};
use crate::UsageError;

/// Data ready for emission plus anything destined for standard error.
pub struct Output {
    pub data: String,
    pub notes: Vec<String>,
    /// Set when the run completed but a check failed.
    pub check_failed: bool,
}

impl Output {
    fn data(data: String) -> Self {
        Self {
            data,
            notes: Vec::new(),
            check_failed: false,
        }
    }
}

fn grid(lo: f64, hi: f64, g: &Grid, default_points: usize, what: &str) -> Result<Vec<f64>> {
    let n = g.points.unwrap_or(default_points);
    if n == 0 {
        return Err(UsageError(format!("{what} grid needs at least one point")).into());
    }
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0) {
        return Err(UsageError(format!(
            "{what} grid bounds must be positive, got [{lo}, {hi}]"
        ))
        .into());
    }
    if hi < lo || (n > 1 && hi == lo) {
        return Err(UsageError(format!("{what} grid must be increasing, got [{lo}, {hi}]")).into());
    }
    Ok(if g.log {
        log_space(lo, hi, n)
    } else {
        lin_space(lo, hi, n)
    })
}

fn format_of(f: Option<Format>) -> Format {
    f.unwrap_or(Format::Csv)
}

fn dedup_models(models: &[ModelKind]) -> Result<Vec<ModelKind>> {
    let mut out = Vec::new();
    for &m in models {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(UsageError("no models selected".into()).into());
    }
    Ok(out)
}

pub fn epsilon(a: &EpsilonArgs) -> Result<Output> {
    let mats = Materials::from_common(&a.common)?;
    let mut mats = mats;
    if a.axis == Axis::Real {
        reject_core(&a.common, "real-axis epsilon")?;
    } else {
        mats.load_core(&a.common, None)?;
    }
    let kinds = dedup_models(&a.models)?;
    if kinds.contains(&ModelKind::Perfect) {
        return Err(UsageError("a perfect reflector has no permittivity".into()).into());
    }
    let models: Vec<ResponseModel> = kinds
        .iter()
        .map(|&k| mats.model(k))
        .collect::<Result<_>>()?;
    let freqs = grid(a.freq_min, a.freq_max, &a.grid, 50, "frequency")?;

    let mut cols = vec![match a.axis {
        Axis::Imag => "xi_eV".to_string(),
        Axis::Real => "omega_eV".to_string(),
    }];
    for k in &kinds {
        let n = k.name();
        match a.axis {
            Axis::Imag => cols.extend([format!("eps_T_{n}"), format!("eps_L_{n}")]),
            Axis::Real => cols.extend([
                format!("re_eps_T_{n}"),
                format!("im_eps_T_{n}"),
                format!("re_eps_L_{n}"),
                format!("im_eps_L_{n}"),
            ]),
        }
    }
    let mut t = Table::new(cols);
    t.meta("command", "epsilon");
    mats.echo(&mut t, &a.common);
    t.meta("kperp_eV", a.kperp);
    let rows: Vec<Vec<Option<f64>>> = freqs
        .par_iter()
        .map(|&x| {
            let mut row = vec![Some(x)];
            for m in &models {
                match a.axis {
                    Axis::Imag => {
                        let e = m.eval_imag_axis(x, a.kperp)?;
                        row.extend([Some(e.eps_t), Some(e.eps_l)]);
                    }
                    Axis::Real => {
                        let e = m.eval_real_axis(x, a.kperp)?.eps;
                        row.extend([e.eps_t.re, e.eps_t.im, e.eps_l.re, e.eps_l.im].map(Some));
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rows.into_iter().for_each(|r| t.push(r));
    Ok(Output::data(t.render(format_of(a.common.format))))
}

fn pressure_at(
    m: &ResponseModel,
    name: &str,
    a: f64,
    temp: f64,
    quad_tol: f64,
    term_tol: f64,
) -> Result<f64> {
    let q = PressureQuery::new(a, temp, m.clone()).with_tolerances(quad_tol, term_tol);
    Ok(casimir_pressure(&q)
        .with_context(|| format!("pressure for model {name} at a = {a} um, T = {temp} K"))?
        .pressure)
}

pub fn pressure(a: &PressureArgs) -> Result<Output> {
    let mut mats = Materials::from_common(&a.common)?;
    mats.load_core(&a.common, Some(a.a_min))?;
    let kinds = dedup_models(&a.models)?;
    let models: Vec<ResponseModel> = kinds
        .iter()
        .map(|&k| mats.model(k))
        .collect::<Result<_>>()?;
    let seps = grid(a.a_min, a.a_max, &a.grid, 25, "separation")?;

    let mut cols = vec!["a_um".to_string()];
    cols.extend(kinds.iter().map(|k| format!("P_{}_Pa", k.name())));
    let drude_col = kinds.iter().position(|&k| k == ModelKind::Drude);
    if drude_col.is_some() {
        cols.extend(
            kinds
                .iter()
                .filter(|&&k| k != ModelKind::Drude)
                .map(|k| format!("ratio_{}_drude", k.tag())),
        );
    }
    let mut t = Table::new(cols);
    t.meta("command", "pressure");
    mats.echo(&mut t, &a.common);
    t.meta(
        "models",
        kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","),
    );
    t.meta("quad_tol", a.quad_tol);
    t.meta("term_tol", a.term_tol);

    let jobs: Vec<(usize, usize)> = (0..seps.len())
        .flat_map(|i| (0..models.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, j)| {
            pressure_at(
                &models[j],
                kinds[j].name(),
                seps[i],
                a.common.temp,
                a.quad_tol,
                a.term_tol,
            )
        })
        .collect::<Result<_>>()?;
    for (i, &sep) in seps.iter().enumerate() {
        let ps = &values[i * models.len()..(i + 1) * models.len()];
        let mut row = vec![Some(sep)];
        row.extend(ps.iter().map(|&p| Some(p)));
        if let Some(d) = drude_col {
            row.extend(
                kinds
                    .iter()
                    .zip(ps)
                    .filter(|(&k, _)| k != ModelKind::Drude)
                    .map(|(_, &p)| Some(p / ps[d])),
            );
        }
        t.push(row);
    }
    Ok(Output::data(t.render(format_of(a.common.format))))
}

pub fn gradient(a: &GradientArgs) -> Result<Output> {
    let mut mats = Materials::from_common(&a.common)?;
    let cfg = SpherePlateConfig::new(a.radius)?
        .with_roughness(a.delta_s, a.delta_p)?
        .with_beta(Beta::Constant(a.beta));

    let expt = match &a.expt {
        Some(path) => {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let pts = parse_experimental_csv(BufReader::new(f))
                .with_context(|| format!("reading {}", path.display()))?;
            let lo = a.a_min.unwrap_or(f64::NEG_INFINITY);
            let hi = a.a_max.unwrap_or(f64::INFINITY);
            let kept: Vec<_> = pts.into_iter().filter(|p| p.a >= lo && p.a <= hi).collect();
            if kept.is_empty() {
                return Err(
                    UsageError("no measured separations inside [a-min, a-max]".into()).into(),
                );
            }
            Some(kept)
        }
        None => None,
    };
    let seps: Vec<f64> = match &expt {
        Some(pts) => pts.iter().map(|p| p.a).collect(),
        None => {
            let (Some(lo), Some(hi)) = (a.a_min, a.a_max) else {
                return Err(
                    UsageError("gradient needs --a-min and --a-max, or --expt".into()).into(),
                );
            };
            grid(lo, hi, &a.grid, 30, "separation")?
        }
    };
    let a_min = seps.iter().copied().fold(f64::INFINITY, f64::min);
    mats.load_core(&a.common, Some(a_min))?;
    let model = mats.model(a.model)?;
    let name = a.model.name();
    let temp = a.common.temp;

    let results: Vec<_> = seps
        .par_iter()
        .map(|&sep| {
            force_gradient(sep, &cfg, |x| {
                casimir_pressure(&PressureQuery::new(x, temp, model.clone())).map(|r| r.pressure)
            })
            .with_context(|| {
                format!("force gradient for model {name} at a = {sep} um, T = {temp} K")
            })
        })
        .collect::<Result<_>>()?;

    let mut cols = vec!["a_um".to_string(), "Fprime_theor".to_string()];
    if expt.is_some() {
        cols.extend(["Fprime_expt".to_string(), "diff".to_string()]);
    }
    let mut t = Table::new(cols);
    t.meta("command", "gradient");
    mats.echo(&mut t, &a.common);
    t.meta("model", name);
    t.meta("radius_um", a.radius);
    t.meta("beta", a.beta);
    t.meta("delta_s_um", a.delta_s);
    t.meta("delta_p_um", a.delta_p);
    t.meta("units", "Fprime in N/m; diff = Fprime_expt - Fprime_theor");
    if let Some(p) = &a.expt {
        t.meta("experimental_data", p.display());
    }

    let mut notes = Vec::new();
    let mut warned = Vec::new();
    for (i, (&sep, g)) in seps.iter().zip(&results).enumerate() {
        for w in &g.warnings {
            if !warned.contains(w) {
                warned.push(*w);
                notes.push(match w {
                    SpherePlateWarning::LargeAspectRatio => {
                        format!("warning: a/R = {} exceeds 0.1; the proximity approximation is doubtful", sep / a.radius)
                    }
                    SpherePlateWarning::LargeRoughness => {
                        format!("warning: roughness correction exceeds 0.5 at a = {sep} um")
                    }
                });
            }
        }
        let mut row = vec![Some(sep), Some(g.value)];
        if let Some(pts) = &expt {
            row.extend([Some(pts[i].fprime), Some(pts[i].fprime - g.value)]);
        }
        t.push(row);
    }
    let mut out = Output::data(t.render(format_of(a.common.format)));
    out.notes = notes;
    Ok(out)
}

pub fn reflectance(a: &ReflectanceArgs) -> Result<Output> {
    reject_core(&a.common, "reflectance")?;
    let mats = Materials::from_common(&a.common)?;
    let model = mats.model(a.model)?;
    let local = ResponseModel::Drude(mats.drude);
    let omegas = grid(a.omega_min, a.omega_max, &a.grid, 50, "frequency")?;
    let rows: Vec<_> = omegas
        .par_iter()
        .map(|&w| {
            reflectance_deviation(&model, &local, w, a.theta)
                .with_context(|| format!("reflectance at omega = {w} eV, theta = {} rad", a.theta))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        ["omega_eV", "R_TM", "R_TE", "dR_TM", "dR_TE"]
            .map(String::from)
            .to_vec(),
    );
    t.meta("command", "reflectance");
    mats.echo(&mut t, &a.common);
    t.meta("model", a.model.name());
    t.meta("reference", "drude");
    t.meta("theta_rad", a.theta);
    t.meta("theta_deg", a.theta.to_degrees());
    for (&w, r) in omegas.iter().zip(&rows) {
        t.push(vec![
            Some(w),
            Some(r.r_tm),
            Some(r.r_te),
            Some(r.d_tm),
            Some(r.d_te),
        ]);
    }
    Ok(Output::data(t.render(format_of(a.common.format))))
}

pub fn kk_verify(a: &KkArgs) -> Result<Output> {
    reject_core(&a.common, "kk-verify")?;
    let mats = Materials::from_common(&a.common)?;
    let relations: Vec<KKRelation> = if a.relations.trim() == "all" {
        KKRelation::ALL.to_vec()
    } else {
        a.relations
            .split(',')
            .map(|id| {
                KKRelation::from_id(id.trim()).ok_or_else(|| {
                    let known: Vec<_> = KKRelation::ALL.iter().map(|r| r.id()).collect();
                    UsageError(format!(
                        "unknown relation {id:?}; known: all, {}",
                        known.join(", ")
                    ))
                })
            })
            .collect::<std::result::Result<_, _>>()?
    };
    if a.kperp.is_empty() {
        return Err(UsageError("no --kperp values".into()).into());
    }
    let freq = grid(
        a.freq_min,
        a.freq_max,
        &Grid {
            points: Some(a.points),
            log: true,
        },
        40,
        "frequency",
    )?;
    let settings = PVSettings {
        window: a.window,
        cutoff: a.cutoff,
        tol: a.tol,
    };
    let mut reports = Vec::new();
    for &k in &a.kperp {
        for &rel in &relations {
            let r = verify(rel, &mats.nonlocal, k, &freq, &settings)
                .with_context(|| format!("relation {} at kperp = {k} eV", rel.id()))?;
            reports.push(r);
        }
    }
    let data = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports)?;
            s.push('\n');
            s
        }
        Format::Csv => kk_csv(&reports, &mats, a),
    };
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !(r.max_residual <= a.threshold))
        .map(|r| {
            format!(
                "{} at kperp = {}: max residual {:e}",
                r.relation.id(),
                r.k_hat,
                r.max_residual
            )
        })
        .collect();
    let mut out = Output::data(data);
    out.check_failed = !failing.is_empty();
    out.notes = failing
        .into_iter()
        .map(|f| format!("residual above threshold {:e}: {f}", a.threshold))
        .collect();
    Ok(out)
}

fn kk_csv(reports: &[KKReport], mats: &Materials, a: &KkArgs) -> String {
    let mut meta = Table::new(Vec::new());
    meta.meta("command", "kk-verify");
    mats.echo(&mut meta, &a.common);
    meta.meta("window_eV", a.window);
    meta.meta("cutoff_eV", a.cutoff);
    meta.meta("tol", a.tol);
    let mut s: String = meta
        .metadata
        .iter()
        .map(|(k, v)| format!("# {k}: {v}\n"))
        .collect();
    s.push_str("relation,kperp_eV,freq_eV,lhs,rhs,residual\n");
    for r in reports {
        for i in 0..r.grid.len() {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.relation.id(),
                fmt_num(r.k_hat),
                fmt_num(r.grid[i]),
                fmt_num(r.lhs[i]),
                fmt_num(r.rhs[i]),
                fmt_num(r.residuals[i])
            ));
        }
    }
    s
}
