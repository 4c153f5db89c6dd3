//! Time indexing and discounting.
//!
//! Years are numbered `1..=n_years` and periods `1..=n_periods`. Per-(year,
//! period) data is stored year-major in flat vectors of length
//! `n_years * n_periods`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub n_years: usize,
    pub n_periods: usize,
    /// Length of one operating period in hours.
    pub dt_hours: f64,
}

impl TimeGrid {
    pub fn new(n_years: usize, n_periods: usize, dt_hours: f64) -> Result<Self> {
        let grid = TimeGrid {
            n_years,
            n_periods,
            dt_hours,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_years == 0 || self.n_periods == 0 {
            return Err(Error::config("time grid needs at least one year and one period"));
        }
        if !(self.dt_hours > 0.0 && self.dt_hours.is_finite()) {
            return Err(Error::config(format!(
                "period length must be positive, got {}",
                self.dt_hours
            )));
        }
        Ok(())
    }

    /// Number of (year, period) cells.
    pub fn len(&self) -> usize {
        self.n_years * self.n_periods
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of 1-based `(year, period)`.
    #[inline]
    pub fn flat(&self, year: usize, period: usize) -> usize {
        debug_assert!((1..=self.n_years).contains(&year));
        debug_assert!((1..=self.n_periods).contains(&period));
        (year - 1) * self.n_periods + (period - 1)
    }

    /// Inverse of [`TimeGrid::flat`].
    #[inline]
    pub fn unflat(&self, index: usize) -> (usize, usize) {
        (index / self.n_periods + 1, index % self.n_periods + 1)
    }

    /// Flat index range covering every period of `year`.
    pub fn year_range(&self, year: usize) -> std::ops::Range<usize> {
        let start = (year - 1) * self.n_periods;
        start..start + self.n_periods
    }

    pub fn years(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n_years
    }

    /// Checks that a per-cell vector has the grid's shape.
    pub fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::config(format!(
                "{what} has {len} entries, expected {} ({} years x {} periods)",
                self.len(),
                self.n_years,
                self.n_periods
            )));
        }
        Ok(())
    }
}

/// Annual discount rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discount {
    pub rho: f64,
}

impl Discount {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::config(format!(
                "discount rate must be positive, got {rho}"
            )));
        }
        Ok(Discount { rho })
    }

    /// `1 / (1 + rho)^year`.
    pub fn factor(&self, year: i64) -> Result<f64> {
        discount_factor(*self, year)
    }

    /// Factor for a year already known to be non-negative.
    #[inline]
    pub(crate) fn at(&self, year: usize) -> f64 {
        1.0 / (1.0 + self.rho).powi(year as i32)
    }
}

pub fn discount_factor(d: Discount, year: i64) -> Result<f64> {
    if year < 0 {
        return Err(Error::domain(format!("negative year {year}")));
    }
    Ok(d.at(year as usize))
}
