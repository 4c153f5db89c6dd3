//! JSON configuration of a planning study.
//!
//! Units: money in $, power in MW, energy in MWh, time in hours, rates as
//! fractions. Per-cell inputs (energy prices, load, PV profile, EE accuracy)
//! may be given either for every (year, period) cell, year-major, or as a
//! single year of `n_periods` values repeated over the horizon (the load
//! profile is then grown by `load.growth` per year).
//!
//! ```json
//! {
//!   "grid":   { "n_years": 3, "n_periods": 24, "dt_hours": 1.0 },
//!   "capex":  { "cost": 1.0e8, "limit": 60.0, "rho": 0.07 },
//!   "tariff": { "energy_price": 50.0, "demand_charge": 120000.0 },
//!   "load":   { "nominal": [..], "deviation": [..], "growth": 0.02 },
//!   "nwa": {
//!     "ee": { "segment_sizes": [3, 3, 4], "segment_costs": [5e5, 1.5e6, 4e6] },
//!     "pv": { "capacity_cost": 2.0e6, "max_capacity": 20.0, "profile": [..] },
//!     "dr": { "capacity_cost": 2.0e5, "max_capacity": 10.0, "rebound": 1.1 },
//!     "es": { "energy_cost": 2.5e5, "max_capacity": 40.0 }
//!   },
//!   "robust":    { "gamma": 1.0 },
//!   "scenarios": { "load": "load.csv", "pv": "pv.csv", "load_growth": 0.0 },
//!   "assess":    { "n_draws": 200, "voll": 10000.0, "seed": 7 }
//! }
//! ```
//!
//! When a scenario file is given, the min/max envelope of its scenarios
//! replaces the corresponding nominal values and deviations (load, PV
//! profile or EE accuracy). Relative scenario paths are resolved against the
//! configuration file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assess::{ScenarioSets, DEFAULT_VOLL};
use crate::capex::CapexParams;
use crate::model::{SystemModel, Tariff};
use crate::nwa::{DrSpec, EeSpec, EsSpec, NwaSpec, PvSpec};
use crate::scenario::{self, ScenarioKind, ScenarioSet};
use crate::timegrid::{Discount, TimeGrid};
use crate::{Error, Result};

/// Per-cell values: a constant, one year of periods, or every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Constant(f64),
    Values(Vec<f64>),
}

impl Schedule {
    /// Expands to one value per cell; a one-year profile is repeated with
    /// year `a` scaled by `(1 + growth)^(a-1)`.
    fn expand(&self, what: &str, grid: &TimeGrid, growth: f64) -> Result<Vec<f64>> {
        match self {
            Schedule::Constant(v) => Ok((0..grid.len())
                .map(|k| v * (1.0 + growth).powi(grid.unflat(k).0 as i32 - 1))
                .collect()),
            Schedule::Values(v) if v.len() == grid.len() => Ok(v.clone()),
            Schedule::Values(v) if v.len() == grid.n_periods => Ok((0..grid.len())
                .map(|k| {
                    let (a, t) = grid.unflat(k);
                    v[t - 1] * (1.0 + growth).powi(a as i32 - 1)
                })
                .collect()),
            Schedule::Values(v) => Err(Error::config(format!(
                "{what} has {} values; expected {} (one year) or {} (every year)",
                v.len(),
                grid.n_periods,
                grid.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapexConfig {
    /// Expansion project cost, $.
    pub cost: f64,
    /// Pre-expansion capacity limit, MW.
    pub limit: f64,
    /// Annual discount rate.
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffConfig {
    /// Energy price, $/MWh.
    pub energy_price: Schedule,
    /// Demand charge on each year's peak, $/MW-year.
    pub demand_charge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    /// Nominal base load, MW.
    pub nominal: Schedule,
    /// Half-width of the base-load interval, MW.
    #[serde(default)]
    pub deviation: Option<Schedule>,
    /// Annual growth applied when `nominal` is a one-year profile.
    #[serde(default)]
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EeConfig {
    /// Segment sizes, % of the base-year load.
    pub segment_sizes: Vec<f64>,
    /// Marginal cost per % of each segment, $.
    pub segment_costs: Vec<f64>,
    /// Accuracy factor (default 1).
    #[serde(default)]
    pub accuracy: Option<Schedule>,
    #[serde(default)]
    pub accuracy_deviation: Option<Schedule>,
    /// Base-year load per period, MW (default: first-year nominal load).
    #[serde(default)]
    pub base_year_load: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvConfig {
    /// $ per MW of installed capacity.
    pub capacity_cost: f64,
    /// MW.
    pub max_capacity: f64,
    /// Availability per unit of capacity; required unless PV scenarios are
    /// given.
    #[serde(default)]
    pub profile: Option<Schedule>,
    #[serde(default)]
    pub profile_deviation: Option<Schedule>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NwaConfig {
    #[serde(default)]
    pub ee: Option<EeConfig>,
    #[serde(default)]
    pub pv: Option<PvConfig>,
    #[serde(default)]
    pub dr: Option<DrSpec>,
    #[serde(default)]
    pub es: Option<EsSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustConfig {
    /// Protection level in `[0, 1]`.
    #[serde(default)]
    pub gamma: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub load: Option<PathBuf>,
    #[serde(default)]
    pub pv: Option<PathBuf>,
    #[serde(default)]
    pub ee: Option<PathBuf>,
    /// Annual growth applied to the load scenarios.
    #[serde(default)]
    pub load_growth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AssessConfig {
    pub n_draws: usize,
    /// Value of lost load, $/MWh.
    pub voll: f64,
    pub seed: u64,
}

impl Default for AssessConfig {
    fn default() -> Self {
        AssessConfig {
            n_draws: 200,
            voll: DEFAULT_VOLL,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: TimeGrid,
    pub capex: CapexConfig,
    pub tariff: TariffConfig,
    #[serde(default)]
    pub load: Option<LoadConfig>,
    #[serde(default)]
    pub nwa: NwaConfig,
    #[serde(default)]
    pub robust: RobustConfig,
    #[serde(default)]
    pub scenarios: ScenarioConfig,
    #[serde(default)]
    pub assess: AssessConfig,
}

/// A configuration resolved into a model, its scenario sets and settings.
#[derive(Debug, Clone)]
pub struct Study {
    pub config: Config,
    pub model: SystemModel,
    pub sets: Option<ScenarioSets>,
}

impl Study {
    pub fn gamma(&self) -> f64 {
        self.config.robust.gamma
    }

    /// The scenario sets, or an error naming what is missing.
    pub fn require_sets(&self) -> Result<&ScenarioSets> {
        self.sets
            .as_ref()
            .ok_or_else(|| Error::config("assessment needs load scenarios (scenarios.load)"))
    }
}

/// Parses configuration JSON; errors name the offending field.
pub fn parse(text: &str) -> Result<Config> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(format!("at `{path}`: {}", e.into_inner()))
    })
}

/// Reads, parses and resolves a configuration file.
pub fn load(path: impl AsRef<Path>) -> Result<Study> {
    let path = path.as_ref();
    let ctx = || format!("configuration {}", path.display());
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).context(ctx()))?;
    let config = parse(&text).map_err(|e| e.context(ctx()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve(config, base).map_err(|e| e.context(ctx()))
}

fn at(field: &str) -> impl FnOnce(Error) -> Error + '_ {
    move |e| e.context(field.to_string())
}

/// Builds the model and scenario sets, resolving relative scenario paths
/// against `base_dir`.
pub fn resolve(config: Config, base_dir: &Path) -> Result<Study> {
    let grid = config.grid;
    grid.validate().map_err(at("grid"))?;
    let c = &config.capex;
    let capex = Discount::new(c.rho)
        .and_then(|d| CapexParams::new(c.cost, c.limit, d))
        .map_err(at("capex"))?;
    let tariff = Tariff {
        energy_price: config
            .tariff
            .energy_price
            .expand("energy price", &grid, 0.0)
            .map_err(at("tariff.energy_price"))?,
        demand_charge: config.tariff.demand_charge,
    };
    tariff.validate(&grid).map_err(at("tariff"))?;

    let read = |field: &str, p: &Option<PathBuf>, kind: ScenarioKind| -> Result<Option<ScenarioSet>> {
        p.as_ref()
            .map(|p| scenario::load_csv(base_dir.join(p), grid, kind).map_err(at(field)))
            .transpose()
    };
    let sc = &config.scenarios;
    let load_set = read("scenarios.load", &sc.load, ScenarioKind::Load)?
        .map(|s| scenario::apply_growth(&s, sc.load_growth))
        .transpose()
        .map_err(at("scenarios.load_growth"))?;
    let pv_set = read("scenarios.pv", &sc.pv, ScenarioKind::PvProfile)?;
    let ee_set = read("scenarios.ee", &sc.ee, ScenarioKind::EeAccuracy)?;

    let (base_load, load_deviation) = match (&load_set, &config.load) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "give either `load` or `scenarios.load`, not both",
            ))
        }
        (Some(set), None) => {
            let env = scenario::envelope(set).map_err(at("scenarios.load"))?;
            (env.nominal, env.deviation)
        }
        (None, Some(l)) => {
            let nominal = l.nominal.expand("nominal load", &grid, l.growth).map_err(at("load.nominal"))?;
            let deviation = match &l.deviation {
                Some(d) => d.expand("load deviation", &grid, l.growth).map_err(at("load.deviation"))?,
                None => Vec::new(),
            };
            (nominal, deviation)
        }
        (None, None) => return Err(Error::config("missing `load` (or `scenarios.load`)")),
    };

    let mut nwas = Vec::new();
    if let Some(ee) = &config.nwa.ee {
        let (accuracy, accuracy_deviation) = match &ee_set {
            Some(set) => {
                let env = scenario::envelope(set).map_err(at("scenarios.ee"))?;
                (env.nominal, env.deviation)
            }
            None => (
                ee.accuracy
                    .as_ref()
                    .unwrap_or(&Schedule::Constant(1.0))
                    .expand("EE accuracy", &grid, 0.0)
                    .map_err(at("nwa.ee.accuracy"))?,
                expand_opt(&ee.accuracy_deviation, "EE accuracy deviation", &grid)
                    .map_err(at("nwa.ee.accuracy_deviation"))?,
            ),
        };
        nwas.push(NwaSpec::Ee(EeSpec {
            segment_sizes: ee.segment_sizes.clone(),
            segment_costs: ee.segment_costs.clone(),
            accuracy,
            accuracy_deviation,
            base_year_load: ee
                .base_year_load
                .clone()
                .unwrap_or_else(|| base_load[..grid.n_periods].to_vec()),
        }));
    }
    if let Some(pv) = &config.nwa.pv {
        let (profile, profile_deviation) = match (&pv_set, &pv.profile) {
            (Some(set), _) => {
                let env = scenario::envelope(set).map_err(at("scenarios.pv"))?;
                (env.nominal, env.deviation)
            }
            (None, Some(p)) => (
                p.expand("PV profile", &grid, 0.0).map_err(at("nwa.pv.profile"))?,
                expand_opt(&pv.profile_deviation, "PV profile deviation", &grid)
                    .map_err(at("nwa.pv.profile_deviation"))?,
            ),
            (None, None) => {
                return Err(Error::config(
                    "nwa.pv: give `profile` or PV scenarios (scenarios.pv)",
                ))
            }
        };
        nwas.push(NwaSpec::Pv(PvSpec {
            capacity_cost: pv.capacity_cost,
            max_capacity: pv.max_capacity,
            profile,
            profile_deviation,
        }));
    }
    if let Some(dr) = &config.nwa.dr {
        nwas.push(NwaSpec::Dr(dr.clone()));
    }
    if let Some(es) = &config.nwa.es {
        nwas.push(NwaSpec::Es(es.clone()));
    }
    for spec in &nwas {
        spec.compile(&grid)
            .map_err(at(&format!("nwa.{}", spec.name().to_lowercase())))?;
    }

    let model = SystemModel {
        grid,
        capex,
        tariff,
        nwas,
        base_load,
        load_deviation,
    };
    model.validate().map_err(at("load"))?;
    if !(0.0..=1.0).contains(&config.robust.gamma) {
        return Err(Error::config(format!(
            "robust.gamma: protection level {} outside [0, 1]",
            config.robust.gamma
        )));
    }
    let a = &config.assess;
    if a.n_draws == 0 {
        return Err(Error::config("assess.n_draws must be at least 1"));
    }
    if !(a.voll >= 0.0 && a.voll.is_finite()) {
        return Err(Error::config(format!("assess.voll must be >= 0, got {}", a.voll)));
    }

    let sets = match load_set {
        Some(load) => Some(ScenarioSets::new(load, pv_set, ee_set)?),
        None if pv_set.is_some() || ee_set.is_some() => {
            return Err(Error::config(
                "PV or EE scenarios need load scenarios (scenarios.load) as well",
            ))
        }
        None => None,
    };
    Ok(Study {
        config,
        model,
        sets,
    })
}

fn expand_opt(s: &Option<Schedule>, what: &str, grid: &TimeGrid) -> Result<Vec<f64>> {
    match s {
        Some(s) => s.expand(what, grid, 0.0),
        None => Ok(Vec::new()),
    }
}
