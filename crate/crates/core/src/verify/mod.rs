//! Property suite behind `cube-interact verify`.
//!
//! Each property draws random instances from a seeded generator and compares
//! the library against an independent computation or an algebraic law.

mod gen;
mod oracles;
mod properties;

use std::time::{Duration, Instant};

pub use gen::Gen;
pub use oracles::{
    continuous_least_squares, discrete_least_squares, monomial_inner_product, solve,
};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    /// Adds the Monte Carlo checks.
    Full,
}

const MAX_DETAILS: usize = 8;

/// Collects checks made by one property.
#[derive(Debug, Default)]
pub struct Probe {
    checks: usize,
    failed: usize,
    details: Vec<String>,
}

impl Probe {
    pub fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.details.len() < MAX_DETAILS {
                self.details.push(detail());
            }
        }
    }

    pub fn close(&mut self, observed: f64, expected: f64, tol: f64, what: impl FnOnce() -> String) {
        let ok = (observed - expected).abs() <= tol;
        self.check(ok, || {
            format!("{}: observed {observed:e}, expected {expected:e}", what())
        });
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub checks: usize,
    pub failed: usize,
    /// Inputs and observed/expected values of the first failures.
    pub details: Vec<String>,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug)]
pub struct Report {
    pub level: Level,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    pub fn total_checks(&self) -> usize {
        self.outcomes.iter().map(|o| o.checks).sum()
    }
}

pub(crate) struct Ctx {
    pub level: Level,
    pub seed: u64,
}

impl Ctx {
    pub fn gen(&self, stream: u64) -> Gen {
        Gen::new(self.seed, stream)
    }

    pub fn count(&self, quick: usize, full: usize) -> usize {
        match self.level {
            Level::Quick => quick,
            Level::Full => full,
        }
    }

    pub fn full(&self) -> bool {
        self.level == Level::Full
    }
}

pub(crate) type PropertyFn = fn(&mut Probe, &Ctx) -> Result<()>;

pub(crate) struct Property {
    pub name: &'static str,
    pub full_only: bool,
    pub run: PropertyFn,
}

/// Names of the properties run at `level`, in order.
pub fn property_names(level: Level) -> Vec<&'static str> {
    properties::ALL
        .iter()
        .filter(|p| level == Level::Full || !p.full_only)
        .map(|p| p.name)
        .collect()
}

/// Runs the properties whose name contains `filter` (all when `None`).
pub fn run_filtered(level: Level, seed: u64, filter: Option<&str>) -> Report {
    let ctx = Ctx { level, seed };
    let outcomes = properties::ALL
        .iter()
        .filter(|p| level == Level::Full || !p.full_only)
        .filter(|p| filter.is_none_or(|f| p.name.contains(f)))
        .map(|p| {
            let start = Instant::now();
            let mut probe = Probe::default();
            if let Err(e) = (p.run)(&mut probe, &ctx) {
                probe.check(false, || format!("error: {e}"));
            }
            Outcome {
                name: p.name,
                checks: probe.checks,
                failed: probe.failed,
                details: probe.details,
                elapsed: start.elapsed(),
            }
        })
        .collect();
    Report {
        level,
        seed,
        outcomes,
    }
}

pub fn run(level: Level, seed: u64) -> Report {
    run_filtered(level, seed, None)
}
