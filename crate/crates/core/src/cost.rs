//! Synthesis cost estimate from total nucleotide count.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RATE_USD_PER_BASE: f64 = 0.004;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    pub rate_usd_per_base: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            rate_usd_per_base: DEFAULT_RATE_USD_PER_BASE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub total_nt: u64,
    pub rate_usd_per_base: f64,
    /// Unrounded product.
    pub total_usd: f64,
    pub total_cents: u64,
}

impl CostReport {
    /// Rounded to cents.
    pub fn usd(&self) -> f64 {
        self.total_cents as f64 / 100.0
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{:02} USD",
            self.total_cents / 100,
            self.total_cents % 100
        )
    }
}

pub fn estimate_cost(total_nt: u64, config: CostConfig) -> Result<CostReport> {
    let rate = config.rate_usd_per_base;
    if rate.is_nan() || rate < 0.0 || rate.is_infinite() {
        return Err(Error::NegativeRate(rate));
    }
    let total_usd = total_nt as f64 * rate;
    Ok(CostReport {
        total_nt,
        rate_usd_per_base: rate,
        total_usd,
        total_cents: (total_usd * 100.0).round() as u64,
    })
}
