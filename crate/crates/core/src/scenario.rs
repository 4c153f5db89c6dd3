//! Scenario sets: ingestion, growth, envelopes and resampling.
//!
//! A scenario is one value per (year, period) cell of the horizon: base load
//! in MW, PV availability per unit of capacity, or EE accuracy. Sets feed
//! the robust model through their min/max [`envelope`] and the Monte Carlo
//! assessment through uniform resampling ([`sample`]).
//!
//! CSV layout: header `scenario,year,period,value`, one row per
//! (scenario, year, period), years and periods 1-based. Scenario labels are
//! arbitrary; scenarios keep the order of their first appearance.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::timegrid::TimeGrid;
use crate::{Error, Result};

/// What the values of a scenario set mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Base load, MW, nonnegative.
    Load,
    /// PV availability per unit of installed capacity, in `[0, 1]`.
    PvProfile,
    /// EE accuracy factor, positive (0.9 = savings overestimated by 10%).
    EeAccuracy,
}

impl ScenarioKind {
    /// Checks one value, returning a description of the violation.
    fn check(self, v: f64) -> std::result::Result<(), String> {
        if !v.is_finite() {
            return Err(format!("value {v} is not finite"));
        }
        match self {
            ScenarioKind::Load if v < 0.0 => Err(format!("negative load {v}")),
            ScenarioKind::PvProfile if !(0.0..=1.0).contains(&v) => {
                Err(format!("PV availability {v} outside [0, 1]"))
            }
            ScenarioKind::EeAccuracy if v <= 0.0 => Err(format!("EE accuracy {v} must be positive")),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScenarioKind::Load => "load",
            ScenarioKind::PvProfile => "PV profile",
            ScenarioKind::EeAccuracy => "EE accuracy",
        })
    }
}

/// Equally likely scenarios of one uncertain quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub kind: ScenarioKind,
    pub grid: TimeGrid,
    /// Scenario labels, parallel to `scenarios`.
    pub labels: Vec<String>,
    /// One flat (year, period) vector per scenario.
    pub scenarios: Vec<Vec<f64>>,
}

impl ScenarioSet {
    /// Builds a set with labels `1, 2, …` and validates it.
    pub fn new(kind: ScenarioKind, grid: TimeGrid, scenarios: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (1..=scenarios.len()).map(|i| i.to_string()).collect();
        let set = ScenarioSet {
            kind,
            grid,
            labels,
            scenarios,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.labels.len() != self.scenarios.len() {
            return Err(Error::config(format!(
                "{} labels for {} scenarios",
                self.labels.len(),
                self.scenarios.len()
            )));
        }
        for (label, s) in self.labels.iter().zip(&self.scenarios) {
            self.grid
                .check_len(&format!("{} scenario {label}", self.kind), s.len())?;
            for (k, &v) in s.iter().enumerate() {
                if let Err(msg) = self.kind.check(v) {
                    let (a, t) = self.grid.unflat(k);
                    return Err(Error::config(format!(
                        "{} scenario {label}, year {a}, period {t}: {msg}",
                        self.kind
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Writes the set in the CSV layout read by [`load_csv`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["scenario", "year", "period", "value"])
            .map_err(csv_io)?;
        for (label, s) in self.labels.iter().zip(&self.scenarios) {
            for (k, v) in s.iter().enumerate() {
                let (a, t) = self.grid.unflat(k);
                w.write_record([label.clone(), a.to_string(), t.to_string(), format!("{v}")])
                    .map_err(csv_io)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    scenario: String,
    year: usize,
    period: usize,
    value: f64,
}

/// Reads a scenario CSV file (see the module documentation for the layout).
pub fn load_csv(path: impl AsRef<Path>, grid: TimeGrid, kind: ScenarioKind) -> Result<ScenarioSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::from(e).context(format!("opening {}", path.display())))?;
    parse_csv(file, path, grid, kind)
}

/// Parses scenario CSV from any reader; `path` only labels error messages.
pub fn parse_csv<R: Read>(reader: R, path: &Path, grid: TimeGrid, kind: ScenarioKind) -> Result<ScenarioSet> {
    grid.validate()?;
    let parse_err = |line: u64, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let expected = ["scenario", "year", "period", "value"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(parse_err(
            1,
            format!("header must be `{}`", expected.join(",")),
        ));
    }

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut values: Vec<Vec<Option<f64>>> = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = rdr.read_record(&mut record).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        let row: CsvRow = record
            .deserialize(Some(&headers))
            .map_err(|e| parse_err(line, e.to_string()))?;
        if !(1..=grid.n_years).contains(&row.year) {
            return Err(parse_err(
                line,
                format!("year {} outside 1..={}", row.year, grid.n_years),
            ));
        }
        if !(1..=grid.n_periods).contains(&row.period) {
            return Err(parse_err(
                line,
                format!("period {} outside 1..={}", row.period, grid.n_periods),
            ));
        }
        if let Err(msg) = kind.check(row.value) {
            return Err(parse_err(line, msg));
        }
        let s = *index.entry(row.scenario.clone()).or_insert_with(|| {
            labels.push(row.scenario.clone());
            values.push(vec![None; grid.len()]);
            labels.len() - 1
        });
        let cell = grid.flat(row.year, row.period);
        if values[s][cell].replace(row.value).is_some() {
            return Err(parse_err(
                line,
                format!(
                    "duplicate entry for scenario {}, year {}, period {}",
                    row.scenario, row.year, row.period
                ),
            ));
        }
    }
    if labels.is_empty() {
        return Err(parse_err(1, "no scenarios".into()));
    }

    let mut scenarios = Vec::with_capacity(labels.len());
    for (label, v) in labels.iter().zip(values) {
        let mut full = Vec::with_capacity(v.len());
        for (k, x) in v.into_iter().enumerate() {
            match x {
                Some(x) => full.push(x),
                None => {
                    let (a, t) = grid.unflat(k);
                    return Err(Error::Config(format!(
                        "{}: scenario {label} is missing year {a}, period {t} \
                         (expected {} years x {} periods)",
                        path.display(),
                        grid.n_years,
                        grid.n_periods
                    )));
                }
            }
        }
        scenarios.push(full);
    }
    Ok(ScenarioSet {
        kind,
        grid,
        labels,
        scenarios,
    })
}

/// Scales year `a` of every load scenario by `(1 + rate)^(a-1)`.
pub fn apply_growth(set: &ScenarioSet, rate: f64) -> Result<ScenarioSet> {
    if set.kind != ScenarioKind::Load {
        return Err(Error::domain(format!("growth applies to load scenarios, not {}", set.kind)));
    }
    if !(rate > -1.0 && rate.is_finite()) {
        return Err(Error::domain(format!("growth rate {rate} must exceed -1")));
    }
    let mut out = set.clone();
    for s in &mut out.scenarios {
        for (k, v) in s.iter_mut().enumerate() {
            let (a, _) = set.grid.unflat(k);
            *v *= (1.0 + rate).powi(a as i32 - 1);
        }
    }
    Ok(out)
}

/// Midpoint and half-width of a scenario set, per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub nominal: Vec<f64>,
    pub deviation: Vec<f64>,
}

/// Elementwise `(min + max) / 2` and `(max - min) / 2` over the scenarios.
pub fn envelope(set: &ScenarioSet) -> Result<Envelope> {
    let first = set
        .scenarios
        .first()
        .ok_or_else(|| Error::domain("envelope of an empty scenario set"))?;
    let mut lo = first.clone();
    let mut hi = first.clone();
    for s in &set.scenarios[1..] {
        for (k, &v) in s.iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let nominal = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let deviation = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (h - l)).collect();
    Ok(Envelope { nominal, deviation })
}

/// Indices of `n` scenarios drawn uniformly with replacement from `len`.
pub fn sample_indices(len: usize, n: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..len)).collect()
}

/// `n` scenarios drawn uniformly with replacement, reproducibly under `seed`.
pub fn sample(set: &ScenarioSet, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if set.is_empty() {
        return Err(Error::domain("cannot sample from an empty scenario set"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_indices(set.len(), n, &mut rng)
        .into_iter()
        .map(|i| set.scenarios[i].clone())
        .collect())
}

/// Parameters of the synthetic load sampler.
///
/// Each scenario draws one annual growth rate uniformly from `growth` and
/// multiplies every cell by an independent factor uniform in
/// `[1 - noise, 1 + noise]`:
/// `load[a,t] = shape[t] · (1 + g)^(a-1) · (1 + ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLoad {
    /// First-year load per period, MW.
    pub shape: Vec<f64>,
    /// Range of the annual growth rate.
    pub growth: (f64, f64),
    /// Relative per-cell noise amplitude, in `[0, 1)`.
    pub noise: f64,
}

/// Parameters of the synthetic PV sampler.
///
/// Each (scenario, year) draws a cloudiness level `c` uniform in
/// `[0, cloudiness]`; each cell then gets
/// `profile[t] · (1 - c) · (1 + ε)` with `ε` uniform in `[-noise, noise]`,
/// clipped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPv {
    /// Clear-sky availability per period, in `[0, 1]`.
    pub profile: Vec<f64>,
    pub cloudiness: f64,
    pub noise: f64,
}

/// Draws `n` synthetic load scenarios.
pub fn synthesize_load(grid: TimeGrid, params: &SyntheticLoad, n: usize, seed: u64) -> Result<ScenarioSet> {
    grid.validate()?;
    if params.shape.len() != grid.n_periods {
        return Err(Error::config(format!(
            "load shape has {} periods, expected {}",
            params.shape.len(),
            grid.n_periods
        )));
    }
    let (g_lo, g_hi) = params.growth;
    if !(g_lo > -1.0 && g_lo <= g_hi && g_hi.is_finite()) {
        return Err(Error::config(format!("invalid growth range ({g_lo}, {g_hi})")));
    }
    if !(0.0..1.0).contains(&params.noise) {
        return Err(Error::config(format!("noise {} outside [0, 1)", params.noise)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenarios = (0..n)
        .map(|_| {
            let g = if g_hi > g_lo { rng.gen_range(g_lo..=g_hi) } else { g_lo };
            (0..grid.len())
                .map(|k| {
                    let (a, t) = grid.unflat(k);
                    let eps = noise(&mut rng, params.noise);
                    params.shape[t - 1] * (1.0 + g).powi(a as i32 - 1) * (1.0 + eps)
                })
                .collect()
        })
        .collect();
    ScenarioSet::new(ScenarioKind::Load, grid, scenarios)
}

/// Draws `n` synthetic PV availability scenarios.
pub fn synthesize_pv(grid: TimeGrid, params: &SyntheticPv, n: usize, seed: u64) -> Result<ScenarioSet> {
    grid.validate()?;
    if params.profile.len() != grid.n_periods {
        return Err(Error::config(format!(
            "PV profile has {} periods, expected {}",
            params.profile.len(),
            grid.n_periods
        )));
    }
    if !(0.0..=1.0).contains(&params.cloudiness) || !(0.0..1.0).contains(&params.noise) {
        return Err(Error::config("cloudiness must lie in [0, 1] and noise in [0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenarios = (0..n)
        .map(|_| {
            let mut out = Vec::with_capacity(grid.len());
            for _ in grid.years() {
                let c = rng.gen_range(0.0..=params.cloudiness);
                for t in 0..grid.n_periods {
                    let eps = noise(&mut rng, params.noise);
                    out.push((params.profile[t] * (1.0 - c) * (1.0 + eps)).clamp(0.0, 1.0));
                }
            }
            out
        })
        .collect();
    ScenarioSet::new(ScenarioKind::PvProfile, grid, scenarios)
}

fn noise(rng: &mut impl Rng, amplitude: f64) -> f64 {
    if amplitude > 0.0 {
        rng.gen_range(-amplitude..=amplitude)
    } else {
        0.0
    }
}
