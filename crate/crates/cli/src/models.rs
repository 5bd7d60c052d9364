//! Material parameters and models assembled from the common flags.

use std::fs::File;
use std::io::BufReader;
use std::sync::Arc;

use anyhow::{Context, Result};
use casimir_core::constants::{matsubara_step, CONSTANTS, HBAR_C};
use casimir_core::optical_data::{interband_im_eps, parse_optical_table, CoreTable};
use casimir_core::response::{preset, DrudeParams, NonlocalParams, ResponseModel};

use crate::args::{Common, ModelKind};
use crate::table::Table;
use crate::UsageError;

#[derive(Debug, Clone)]
pub struct Materials {
    pub drude: DrudeParams,
    pub nonlocal: NonlocalParams,
    pub core: Option<Arc<CoreTable>>,
}

impl Materials {
    /// Preset values overridden by any explicit flags.
    pub fn from_common(c: &Common) -> Result<Self> {
        let base = preset(&c.preset)
            .ok_or_else(|| UsageError(format!("unknown preset {:?}", c.preset)))?;
        let vf = CONSTANTS.fermi_velocity_ratio_default;
        let drude = DrudeParams::new(
            c.omega_p.unwrap_or(base.drude.omega_p),
            c.gamma.unwrap_or(base.drude.gamma),
        )?;
        let nonlocal = NonlocalParams::from_fermi_multiples(
            drude,
            c.vt.unwrap_or(base.v_t_ratio / vf),
            c.vl.unwrap_or(base.v_l_ratio / vf),
        )?;
        Ok(Self {
            drude,
            nonlocal,
            core: None,
        })
    }

    /// Loads the optical table, if any, and tabulates the core on the
    /// Matsubara frequencies that matter down to separation `a_min`.
    pub fn load_core(&mut self, c: &Common, a_min: Option<f64>) -> Result<()> {
        let Some(path) = &c.optical_data else {
            return Ok(());
        };
        let file =
            File::open(path).with_context(|| format!("opening optical data {}", path.display()))?;
        let table = parse_optical_table(BufReader::new(file))
            .with_context(|| format!("reading optical data {}", path.display()))?;
        let spectrum = interband_im_eps(&table, &self.drude)?;
        let step = matsubara_step(c.temp)?;
        // Terms beyond y = 2aξ/ħc ≈ 60 are negligible.
        let l_max = match a_min {
            Some(a) if a > 0.0 => {
                ((60.0 * HBAR_C / (2.0 * a * step)).ceil() as u64).clamp(1, 20_000)
            }
            _ => 200,
        };
        let core = CoreTable::for_matsubara(spectrum, c.temp, l_max, path.display().to_string())?;
        self.core = Some(Arc::new(core));
        Ok(())
    }

    pub fn model(&self, kind: ModelKind) -> Result<ResponseModel> {
        let m = match kind {
            ModelKind::Drude => ResponseModel::Drude(self.drude),
            ModelKind::Nonlocal => ResponseModel::NonlocalAlt(self.nonlocal),
            ModelKind::Plasma => ResponseModel::plasma(self.drude.omega_p)?,
            ModelKind::Perfect => return Ok(ResponseModel::PerfectReflector),
        };
        Ok(match &self.core {
            Some(core) => m.with_core(core.clone()),
            None => m,
        })
    }

    pub fn echo(&self, t: &mut Table, c: &Common) {
        let vf = CONSTANTS.fermi_velocity_ratio_default;
        t.meta("preset", &c.preset);
        t.meta("omega_p_eV", self.drude.omega_p);
        t.meta("gamma_eV", self.drude.gamma);
        t.meta("vt_over_vF", self.nonlocal.v_t_ratio / vf);
        t.meta("vl_over_vF", self.nonlocal.v_l_ratio / vf);
        t.meta("temperature_K", c.temp);
        match &c.optical_data {
            Some(p) => t.meta("optical_data", p.display()),
            None => t.meta("optical_data", "none"),
        }
    }
}

pub fn reject_core(c: &Common, what: &str) -> Result<()> {
    if c.optical_data.is_some() {
        return Err(UsageError(format!(
            "--optical-data is not supported by {what}: the interband core is tabulated on the imaginary axis only"
        ))
        .into());
    }
    Ok(())
}
