use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::{ExperimentSpec, Operation};
use super::experiment::{run_experiment, BoundKind, BudgetCheck};
use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};

/// Rows of the results table that carry an explicit, checkable bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Table1Row {
    UrtBroadcast,
    UrtAllToAll,
    UrtConsensus,
    UrtByzBroadcast,
    UrtByzAllToAll,
    UrtAdvBroadcast,
    DerBroadcast,
    UrtBroadcastLower,
    UrtConsensusLower,
    UrtAdvBroadcastLower,
    DerBroadcastLower,
}

impl Table1Row {
    pub const ALL: [Table1Row; 11] = [
        Table1Row::UrtBroadcast,
        Table1Row::UrtAllToAll,
        Table1Row::UrtConsensus,
        Table1Row::UrtByzBroadcast,
        Table1Row::UrtByzAllToAll,
        Table1Row::UrtAdvBroadcast,
        Table1Row::DerBroadcast,
        Table1Row::UrtBroadcastLower,
        Table1Row::UrtConsensusLower,
        Table1Row::UrtAdvBroadcastLower,
        Table1Row::DerBroadcastLower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table1Row::UrtBroadcast => "urt-broadcast",
            Table1Row::UrtAllToAll => "urt-all-to-all",
            Table1Row::UrtConsensus => "urt-consensus",
            Table1Row::UrtByzBroadcast => "urt-byz-broadcast",
            Table1Row::UrtByzAllToAll => "urt-byz-all-to-all",
            Table1Row::UrtAdvBroadcast => "urt-adv-broadcast",
            Table1Row::DerBroadcast => "der-broadcast",
            Table1Row::UrtBroadcastLower => "urt-broadcast-lower",
            Table1Row::UrtConsensusLower => "urt-consensus-lower",
            Table1Row::UrtAdvBroadcastLower => "urt-adv-broadcast-lower",
            Table1Row::DerBroadcastLower => "der-broadcast-lower",
        }
    }

    fn kind(self) -> BoundKind {
        match self {
            Table1Row::UrtBroadcastLower
            | Table1Row::UrtConsensusLower
            | Table1Row::UrtAdvBroadcastLower
            | Table1Row::DerBroadcastLower => BoundKind::Lower,
            _ => BoundKind::Upper,
        }
    }

    /// The concrete model and operation at scale `n`. Byzantine and
    /// adversarial rows use the largest `f`/`k` the model admits.
    pub fn experiment(self, n: usize) -> Result<(ModelSpec, Operation)> {
        let most = (2 * n).saturating_sub(3) / 3;
        Ok(match self {
            Table1Row::UrtBroadcast | Table1Row::UrtBroadcastLower => {
                (ModelSpec::urt(n)?, Operation::Broadcast)
            }
            Table1Row::UrtAllToAll => (ModelSpec::urt(n)?, Operation::AllToAll),
            Table1Row::UrtConsensus => (ModelSpec::urt(n)?, Operation::Consensus),
            Table1Row::UrtConsensusLower => (ModelSpec::urt(n)?, Operation::AllSources),
            Table1Row::UrtByzBroadcast => (ModelSpec::urt_byz(n, most)?, Operation::Broadcast),
            Table1Row::UrtByzAllToAll => (ModelSpec::urt_byz(n, most)?, Operation::AllToAll),
            Table1Row::UrtAdvBroadcast | Table1Row::UrtAdvBroadcastLower => {
                (ModelSpec::urt_adv(n, most)?, Operation::Broadcast)
            }
            Table1Row::DerBroadcast | Table1Row::DerBroadcastLower => {
                (ModelSpec::der(n, n)?, Operation::Broadcast)
            }
        })
    }
}

impl fmt::Display for Table1Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Table1Row {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Table1Row::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown table row `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Result {
    pub row: Table1Row,
    pub model: String,
    pub operation: String,
    pub check: BudgetCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Report {
    pub trials: usize,
    pub seed: u64,
    pub c: f64,
    pub results: Vec<Table1Result>,
}

impl Table1Report {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.check.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let c = &r.check;
            let rel = match c.kind {
                BoundKind::Upper => "<=",
                BoundKind::Lower => ">=",
            };
            out += &format!(
                "{:<24} {:<28} t={:<5} P(incomplete)={:.4} [{:.4}, {:.4}] {rel} {:.4}  {}\n",
                r.row.name(),
                r.model,
                c.rounds,
                c.frequency,
                c.interval.lo,
                c.interval.hi,
                c.bound,
                if c.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

/// Runs each selected row at each scale and tests its bound.
pub fn table1_reproduce(
    rows: &[Table1Row],
    scales: &[usize],
    trials: usize,
    seed: u64,
    c: f64,
    threads: Option<usize>,
) -> Result<Table1Report> {
    let mut results = Vec::new();
    for &n in scales {
        for &row in rows {
            let (model, operation) = row.experiment(n)?;
            let mut spec = ExperimentSpec::new(model, operation, trials);
            spec.seed = seed;
            spec.c = c;
            spec.threads = threads;
            spec.name = format!("{}-n{n}", row.name());
            let summary = run_experiment(&spec)?;
            let check = summary
                .check(row.kind())
                .cloned()
                .ok_or_else(|| Error::InvalidArgument(format!("row {row} has no bound at n={n}")))?;
            results.push(Table1Result {
                row,
                model: model.to_string(),
                operation: operation.name().into(),
                check,
            });
        }
    }
    Ok(Table1Report {
        trials,
        seed,
        c,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_names_round_trip() {
        for r in Table1Row::ALL {
            assert_eq!(r.name().parse::<Table1Row>().unwrap(), r);
        }
        assert!("nope".parse::<Table1Row>().is_err());
    }

    #[test]
    fn adversarial_row_uses_largest_k() {
        let (m, _) = Table1Row::UrtAdvBroadcast.experiment(30).unwrap();
        assert_eq!(m.k, 19);
    }

    #[test]
    fn small_table_passes() {
        let rows = [Table1Row::UrtBroadcast, Table1Row::UrtBroadcastLower, Table1Row::DerBroadcast];
        let report = table1_reproduce(&rows, &[32], 300, 5, 1.0, None).unwrap();
        assert_eq!(report.results.len(), 3);
        assert!(report.all_pass(), "{}", report.to_text());
    }
}
