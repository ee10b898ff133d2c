//! Bounds on exhaustive enumeration.

use crate::error::{Error, Result};

pub const DEFAULT_BOUND: u128 = 10_000_000;
pub const GUARD_ENV: &str = "KLEISLIKIT_GUARD";

/// Refuses enumerations whose naive search space exceeds `bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guard {
    pub bound: u128,
}

impl Default for Guard {
    fn default() -> Self {
        Guard {
            bound: DEFAULT_BOUND,
        }
    }
}

impl Guard {
    pub fn new(bound: u128) -> Self {
        Guard { bound }
    }

    /// Default bound, overridden by `KLEISLIKIT_GUARD` when it parses.
    pub fn from_env() -> Self {
        std::env::var(GUARD_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .map(Guard::new)
            .unwrap_or_default()
    }

    pub fn check(&self, what: impl Into<String>, space: u128) -> Result<()> {
        if space > self.bound {
            Err(Error::SizeGuard {
                what: what.into(),
                space,
                bound: self.bound,
            })
        } else {
            Ok(())
        }
    }

    /// Product of choice counts, saturating.
    pub fn space<I: IntoIterator<Item = usize>>(counts: I) -> u128 {
        counts
            .into_iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c as u128))
    }

    pub fn power(base: usize, exp: usize) -> u128 {
        let mut acc = 1u128;
        for _ in 0..exp {
            acc = acc.saturating_mul(base as u128);
        }
        acc
    }
}
