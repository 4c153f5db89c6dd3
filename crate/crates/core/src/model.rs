//! A distribution system as planned: horizon, expansion project, tariff,
//! candidate NWAs and the (possibly uncertain) base load.

use serde::{Deserialize, Serialize};

use crate::capex::CapexParams;
use crate::nwa::NwaSpec;
use crate::plan::PlanningProblem;
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

/// Prices faced by the utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tariff {
    /// Energy price per (year, period), $/MWh.
    pub energy_price: Vec<f64>,
    /// Demand charge on each year's peak, $/MW-year.
    pub demand_charge: f64,
}

impl Tariff {
    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        grid.check_len("energy price", self.energy_price.len())?;
        if self.energy_price.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("energy prices must be finite"));
        }
        if !(self.demand_charge >= 0.0 && self.demand_charge.is_finite()) {
            return Err(Error::config(format!(
                "demand charge must be >= 0, got {}",
                self.demand_charge
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemModel {
    pub grid: TimeGrid,
    pub capex: CapexParams,
    pub tariff: Tariff,
    pub nwas: Vec<NwaSpec>,
    /// Nominal base load per (year, period), MW.
    pub base_load: Vec<f64>,
    /// Half-width of the base-load interval per (year, period); empty =
    /// certain.
    #[serde(default)]
    pub load_deviation: Vec<f64>,
}

impl SystemModel {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.tariff.validate(&self.grid)?;
        check_load(&self.grid, &self.base_load, &self.load_deviation)?;
        for spec in &self.nwas {
            spec.compile(&self.grid)
                .map_err(|e| e.context(format!("NWA {}", spec.name())))?;
        }
        Ok(())
    }

    /// The planning problem at protection level `gamma`.
    pub fn problem(&self, gamma: f64) -> Result<PlanningProblem> {
        let blocks = self
            .nwas
            .iter()
            .map(|s| s.compile(&self.grid).map_err(|e| e.context(format!("NWA {}", s.name()))))
            .collect::<Result<Vec<_>>>()?;
        PlanningProblem::new(
            self.grid,
            blocks,
            self.base_load.clone(),
            self.load_deviation.clone(),
            self.capex,
            self.tariff.clone(),
            gamma,
        )
    }
}

pub(crate) fn check_load(grid: &TimeGrid, load: &[f64], deviation: &[f64]) -> Result<()> {
    grid.check_len("base load", load.len())?;
    if load.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(Error::config("base load must be finite and >= 0"));
    }
    if !deviation.is_empty() {
        grid.check_len("base-load deviation", deviation.len())?;
        if deviation.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::config("base-load deviation must be finite and >= 0"));
        }
    }
    Ok(())
}
