//! Sphere-plate force gradient from the plate-plate pressure, with
//! beyond-proximity and roughness corrections.

use std::io::Read;

use serde::Serialize;

use crate::error::{domain, CasimirError, Result};

/// Above this a/R the proximity approximation is doubtful.
pub const ASPECT_WARNING: f64 = 0.1;
/// Above this the multiplicative roughness factor is doubtful.
pub const ROUGHNESS_WARNING: f64 = 0.5;

/// Beyond-proximity correction coefficient β(a, R).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Beta {
    Constant(f64),
    /// (a in μm, β) pairs, interpolated linearly; strictly increasing in a.
    Tabulated(Vec<(f64, f64)>),
}

impl Default for Beta {
    fn default() -> Self {
        Beta::Constant(0.0)
    }
}

impl Beta {
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("beta table is empty"));
        }
        if points.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(domain("beta table holds non-finite values"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(domain("beta table separations must be strictly increasing"));
        }
        Ok(Beta::Tabulated(points))
    }

    pub fn at(&self, a: f64) -> Result<f64> {
        match self {
            Beta::Constant(b) => Ok(*b),
            Beta::Tabulated(pts) => {
                let (first, last) = (pts[0], pts[pts.len() - 1]);
                if a < first.0 || a > last.0 {
                    return Err(domain(format!(
                        "a = {a} outside the beta table [{}, {}]",
                        first.0, last.0
                    )));
                }
                if pts.len() == 1 {
                    return Ok(first.1);
                }
                let i = pts.partition_point(|p| p.0 <= a).clamp(1, pts.len() - 1);
                let ((a0, b0), (a1, b1)) = (pts[i - 1], pts[i]);
                Ok(b0 + (b1 - b0) * (a - a0) / (a1 - a0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpherePlateConfig {
    /// Sphere radius in μm.
    pub radius: f64,
    pub beta: Beta,
    /// RMS roughness of sphere and plate, μm.
    pub delta_s: f64,
    pub delta_p: f64,
}

impl SpherePlateConfig {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain(format!("sphere radius must be > 0, got {radius}")));
        }
        Ok(Self {
            radius,
            beta: Beta::default(),
            delta_s: 0.0,
            delta_p: 0.0,
        })
    }

    pub fn with_roughness(mut self, delta_s: f64, delta_p: f64) -> Result<Self> {
        if !(delta_s >= 0.0 && delta_p >= 0.0 && delta_s.is_finite() && delta_p.is_finite()) {
            return Err(domain(format!(
                "roughness must be >= 0, got ({delta_s}, {delta_p})"
            )));
        }
        self.delta_s = delta_s;
        self.delta_p = delta_p;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: Beta) -> Self {
        self.beta = beta;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpherePlateWarning {
    LargeAspectRatio,
    LargeRoughness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceGradient {
    /// N/m; positive for an attractive pressure.
    pub value: f64,
    pub warnings: Vec<SpherePlateWarning>,
}

/// F′ = −2πR (1 + β a/R)(1 + 10(δ_s² + δ_p²)/a²) P(a), with R in metres.
pub fn force_gradient<P>(a: f64, cfg: &SpherePlateConfig, pressure: P) -> Result<ForceGradient>
where
    P: FnOnce(f64) -> Result<f64>,
{
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain(format!("separation must be > 0, got {a}")));
    }
    if !(cfg.radius > 0.0) {
        return Err(domain(format!(
            "sphere radius must be > 0, got {}",
            cfg.radius
        )));
    }
    if cfg.delta_s < 0.0 || cfg.delta_p < 0.0 {
        return Err(domain("roughness must be >= 0"));
    }
    let aspect = a / cfg.radius;
    let rough = 10.0 * (cfg.delta_s.powi(2) + cfg.delta_p.powi(2)) / (a * a);
    let mut warnings = Vec::new();
    if aspect > ASPECT_WARNING {
        warnings.push(SpherePlateWarning::LargeAspectRatio);
    }
    if rough >= ROUGHNESS_WARNING {
        warnings.push(SpherePlateWarning::LargeRoughness);
    }
    let beta = cfg.beta.at(a)?;
    let p = pressure(a)?;
    let radius_m = cfg.radius * 1e-6;
    Ok(ForceGradient {
        value: -2.0 * std::f64::consts::PI * radius_m * (1.0 + beta * aspect) * (1.0 + rough) * p,
        warnings,
    })
}

/// One measured gradient point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentalPoint {
    /// μm
    pub a: f64,
    /// N/m
    pub fprime: f64,
    /// N/m
    pub sigma: f64,
}

/// Reads `a[μm], Fprime[N/m], sigma[N/m]` rows. A first line that does
/// not parse as numbers is taken as a header; `#` starts a comment line.
pub fn parse_experimental_csv<R: Read>(reader: R) -> Result<Vec<ExperimentalPoint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    let mut seen_record = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CasimirError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let fail = |message: String| CasimirError::Parse { line, message };
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let first = !seen_record;
        seen_record = true;
        if rec.len() != 3 {
            return Err(fail(format!("expected 3 fields, found {}", rec.len())));
        }
        let nums: Vec<Option<f64>> = rec.iter().map(|f| f.parse::<f64>().ok()).collect();
        if first && nums.iter().all(Option::is_none) {
            continue;
        }
        let mut vals = [0.0; 3];
        for (i, (v, raw)) in nums.iter().zip(rec.iter()).enumerate() {
            match v {
                Some(x) if x.is_finite() => vals[i] = *x,
                _ => {
                    return Err(fail(format!(
                        "field {} is not a finite number: {raw:?}",
                        i + 1
                    )))
                }
            }
        }
        let [a, fprime, sigma] = vals;
        if a <= 0.0 {
            return Err(fail(format!("separation must be > 0, got {a}")));
        }
        if sigma < 0.0 {
            return Err(fail(format!("sigma must be >= 0, got {sigma}")));
        }
        out.push(ExperimentalPoint { a, fprime, sigma });
    }
    if out.is_empty() {
        return Err(CasimirError::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceRow {
    pub a: f64,
    pub theory: f64,
    pub experiment: f64,
    /// experiment − theory
    pub diff: f64,
    pub sigma: f64,
}

pub fn difference_table<T>(
    points: &[ExperimentalPoint],
    mut theory: T,
) -> Result<Vec<DifferenceRow>>
where
    T: FnMut(f64) -> Result<f64>,
{
    points
        .iter()
        .map(|p| {
            let t = theory(p.a)?;
            Ok(DifferenceRow {
                a: p.a,
                theory: t,
                experiment: p.fprime,
                diff: p.fprime - t,
                sigma: p.sigma,
            })
        })
        .collect()
}
