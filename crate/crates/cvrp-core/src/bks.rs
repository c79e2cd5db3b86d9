use std::collections::BTreeMap;

use crate::{CvrpError, Result};

/// Relative gap of `cost` above the best-known cost, in percent.
pub fn gap_percent(cost: f64, bks: f64) -> Result<f64> {
    if bks <= 0.0 || bks.is_nan() {
        return Err(CvrpError::NonPositiveBks(bks));
    }
    Ok(100.0 * (cost - bks) / bks)
}

/// Best-known solution costs keyed by instance name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BksRegistry {
    costs: BTreeMap<String, u64>,
}

impl BksRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses the two-column `name cost` format. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reg = BksRegistry::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: &str| CvrpError::MalformedRegistry {
                line: idx + 1,
                message: message.to_string(),
            };
            let mut toks = line.split_whitespace();
            let (Some(name), Some(cost), None) = (toks.next(), toks.next(), toks.next()) else {
                return Err(bad("expected `name cost`"));
            };
            let cost: u64 = cost.parse().map_err(|_| bad("cost is not a positive integer"))?;
            reg.insert(name, cost)?;
        }
        Ok(reg)
    }

    pub fn insert(&mut self, name: impl Into<String>, cost: u64) -> Result<()> {
        if cost == 0 {
            return Err(CvrpError::NonPositiveBks(0.0));
        }
        self.costs.insert(name.into(), cost);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.costs.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.costs
            .iter()
            .map(|(name, cost)| format!("{name} {cost}\n"))
            .collect()
    }
}
