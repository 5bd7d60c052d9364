//! Tabulated optical constants and the interband core function.
//!
//! Input files are UTF-8 text with three whitespace-separated columns
//! `E n k` (photon energy in eV, refractive index, extinction
//! coefficient). Lines whose first non-blank character is `#` and blank
//! lines are skipped.

use std::f64::consts::PI;
use std::io::BufRead;
use std::sync::Arc;

use crate::error::{domain, CasimirError, Result};
use crate::response::DrudeParams;

/// Interband transitions in gold set in above this photon energy (eV).
pub const INTERBAND_ONSET: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalRow {
    pub energy: f64,
    pub n: f64,
    pub k: f64,
}

impl OpticalRow {
    /// Im ε = 2nk.
    pub fn im_eps(&self) -> f64 {
        2.0 * self.n * self.k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    rows: Vec<OpticalRow>,
}

impl OpticalTable {
    pub fn new(rows: Vec<OpticalRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(CasimirError::Parse {
                line: 0,
                message: format!("need at least 2 data rows, found {}", rows.len()),
            });
        }
        for (i, r) in rows.iter().enumerate() {
            validate_row(r).map_err(|message| CasimirError::Parse {
                line: i + 1,
                message,
            })?;
            if i > 0 && !(r.energy > rows[i - 1].energy) {
                return Err(CasimirError::Parse {
                    line: i + 1,
                    message: "photon energies must be strictly increasing".into(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[OpticalRow] {
        &self.rows
    }

    pub fn min_energy(&self) -> f64 {
        self.rows[0].energy
    }

    pub fn max_energy(&self) -> f64 {
        self.rows[self.rows.len() - 1].energy
    }
}

fn validate_row(r: &OpticalRow) -> std::result::Result<(), String> {
    if !(r.energy.is_finite() && r.n.is_finite() && r.k.is_finite()) {
        return Err("non-finite value".into());
    }
    if !(r.energy > 0.0) {
        return Err(format!("photon energy must be positive, got {}", r.energy));
    }
    if r.n < 0.0 || r.k < 0.0 {
        return Err(format!(
            "n and k must be non-negative, got n={} k={}",
            r.n, r.k
        ));
    }
    Ok(())
}

/// Parse an `E n k` table from text.
pub fn parse_optical_table_str(text: &str) -> Result<OpticalTable> {
    let mut rows: Vec<OpticalRow> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(CasimirError::Parse {
                line: line_no,
                message: format!("expected 3 columns (E n k), found {}", fields.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f.parse::<f64>().map_err(|e| CasimirError::Parse {
                line: line_no,
                message: format!("invalid number {f:?}: {e}"),
            })?;
        }
        let row = OpticalRow {
            energy: vals[0],
            n: vals[1],
            k: vals[2],
        };
        validate_row(&row).map_err(|message| CasimirError::Parse {
            line: line_no,
            message,
        })?;
        if let Some(prev) = rows.last() {
            if !(row.energy > prev.energy) {
                return Err(CasimirError::Parse {
                    line: line_no,
                    message: format!(
                        "energy {} does not exceed the previous row's {}",
                        row.energy, prev.energy
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(CasimirError::Parse {
            line: text.lines().count(),
            message: format!("need at least 2 data rows, found {}", rows.len()),
        });
    }
    Ok(OpticalTable { rows })
}

/// Parse an `E n k` table from a reader.
pub fn parse_optical_table<R: BufRead>(mut reader: R) -> Result<OpticalTable> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| CasimirError::Parse {
            line: 0,
            message: format!("read failed: {e}"),
        })?;
    parse_optical_table_str(&text)
}

/// Im ε of the interband transitions sampled on the table grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InterbandSpectrum {
    pub energies: Vec<f64>,
    pub im_eps: Vec<f64>,
    pub drude: DrudeParams,
}

/// Im ε_Drude(ω) = ω_p²γ / (ω(ω² + γ²)).
pub fn drude_im_eps(drude: &DrudeParams, omega: f64) -> f64 {
    let DrudeParams { omega_p, gamma } = *drude;
    omega_p * omega_p * gamma / (omega * (omega * omega + gamma * gamma))
}

/// Subtract the Drude absorption from the measured 2nk and clamp at zero.
pub fn interband_im_eps(table: &OpticalTable, drude: &DrudeParams) -> Result<InterbandSpectrum> {
    if table.max_energy() < INTERBAND_ONSET {
        return Err(domain(format!(
            "optical table ends at {} eV, below the interband onset {INTERBAND_ONSET} eV",
            table.max_energy()
        )));
    }
    let energies: Vec<f64> = table.rows().iter().map(|r| r.energy).collect();
    let im_eps = table
        .rows()
        .iter()
        .map(|r| (r.im_eps() - drude_im_eps(drude, r.energy)).max(0.0))
        .collect();
    Ok(InterbandSpectrum {
        energies,
        im_eps,
        drude: *drude,
    })
}

impl InterbandSpectrum {
    /// (2/π) ∫ x Im ε(x) / (x² + ξ²) dx, trapezoidal on the grid.
    fn dispersion_integral(&self, xi: f64) -> f64 {
        let g = |x: f64, im: f64| x * im / (x * x + xi * xi);
        let s: f64 = self
            .energies
            .windows(2)
            .zip(self.im_eps.windows(2))
            .map(|(e, v)| 0.5 * (e[1] - e[0]) * (g(e[0], v[0]) + g(e[1], v[1])))
            .sum();
        2.0 / PI * s
    }
}

/// Interband core ε_core(iξ) = 1 + (2/π)∫ x Im ε_ib(x)/(x² + ξ²) dx.
pub fn core_imag_axis(ib: &InterbandSpectrum, xi: f64) -> Result<f64> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(domain(format!("core function needs xi > 0, got {xi}")));
    }
    Ok(1.0 + ib.dispersion_integral(xi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreProvenance {
    pub source: String,
    pub drude: DrudeParams,
}

/// ε_core precomputed on a ξ grid, linearly interpolated between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreTable {
    pub xi_grid: Vec<f64>,
    pub core_values: Vec<f64>,
    pub static_value: f64,
    pub provenance: CoreProvenance,
    spectrum: Arc<InterbandSpectrum>,
}

impl CoreTable {
    pub fn build(
        spectrum: InterbandSpectrum,
        mut xi_grid: Vec<f64>,
        source: impl Into<String>,
    ) -> Result<Self> {
        xi_grid.retain(|&x| x > 0.0);
        if xi_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("core grid must be strictly increasing"));
        }
        let core_values = xi_grid
            .iter()
            .map(|&x| core_imag_axis(&spectrum, x))
            .collect::<Result<Vec<_>>>()?;
        let static_value = 1.0 + spectrum.dispersion_integral(0.0);
        Ok(Self {
            xi_grid,
            core_values,
            static_value,
            provenance: CoreProvenance {
                source: source.into(),
                drude: spectrum.drude,
            },
            spectrum: Arc::new(spectrum),
        })
    }

    /// Grid of Matsubara frequencies `l·ξ_1` for `l = 1..=l_max`.
    pub fn for_matsubara(
        spectrum: InterbandSpectrum,
        temperature: f64,
        l_max: u64,
        source: impl Into<String>,
    ) -> Result<Self> {
        let grid = (1..=l_max)
            .map(|l| crate::constants::matsubara_xi(l, temperature))
            .collect::<Result<Vec<_>>>()?;
        Self::build(spectrum, grid, source)
    }

    pub fn spectrum(&self) -> &InterbandSpectrum {
        &self.spectrum
    }

    /// ε_core(iξ); interpolated on the grid, computed directly outside it.
    pub fn value(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(domain(format!("core function needs xi > 0, got {xi}")));
        }
        let g = &self.xi_grid;
        if g.is_empty() || xi < g[0] || xi > g[g.len() - 1] {
            return core_imag_axis(&self.spectrum, xi);
        }
        let j = g.partition_point(|&x| x <= xi);
        if j == 0 || j >= g.len() {
            return Ok(self.core_values[j.min(g.len()) - 1]);
        }
        let (x0, x1) = (g[j - 1], g[j]);
        let (y0, y1) = (self.core_values[j - 1], self.core_values[j]);
        Ok(y0 + (y1 - y0) * (xi - x0) / (x1 - x0))
    }
}
