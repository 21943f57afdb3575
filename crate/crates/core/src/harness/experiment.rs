use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentSpec, Operation};
use crate::analysis::{
    adversarial_lower_bound, consensus_lower_bound_rounds, er_lower_bound_rounds,
    predicted_round_budget, urt_lower_bound_rounds, RoundBudget,
};
use crate::dynamics::{
    default_round_cap, run_all_sources, run_broadcast, ModelKind, ModelSpec, RunOptions,
    TrialRecord,
};
use crate::error::{Error, Result};
use crate::graphgen::RngStream;
use crate::protocols::algorithm1_with_completion;
use crate::stats::{quantile, wilson_interval, Interval, Z99};

/// Version of the JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    /// `P(not complete by rounds) ≤ bound` is claimed.
    Upper,
    /// `P(not complete by rounds) ≥ bound` is claimed.
    Lower,
}

/// One claimed probability bound, tested against the trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetCheck {
    pub kind: BoundKind,
    pub rounds: usize,
    pub bound: f64,
    pub formula: String,
    /// Trials not complete by `rounds`.
    pub incomplete: u64,
    pub frequency: f64,
    /// Wilson 99% interval of `frequency`.
    pub interval: Interval,
    /// The interval does not exclude the claim.
    pub pass: bool,
}

impl BudgetCheck {
    fn evaluate(
        kind: BoundKind,
        rounds: usize,
        bound: f64,
        formula: String,
        records: &[TrialRecord],
    ) -> Self {
        let trials = records.len() as u64;
        let incomplete = records.iter().filter(|r| !r.completed_by(rounds)).count() as u64;
        let interval = wilson_interval(incomplete, trials, Z99);
        let pass = match kind {
            BoundKind::Upper => interval.lo <= bound,
            BoundKind::Lower => interval.hi >= bound,
        };
        BudgetCheck {
            kind,
            rounds,
            bound,
            formula,
            incomplete,
            frequency: incomplete as f64 / trials as f64,
            interval,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfPoint {
    pub round: usize,
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Nearest-rank quantiles of the completion round; `None` where the rank
/// falls on a trial that hit the cap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub p50: Option<usize>,
    pub p90: Option<usize>,
    pub p99: Option<usize>,
    pub max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub schema_version: u32,
    pub name: String,
    pub operation: String,
    pub model: ModelSpec,
    pub model_label: String,
    pub strategy: String,
    pub trials: usize,
    pub seed: u64,
    pub c: f64,
    pub round_cap: usize,
    pub capped: u64,
    pub quantiles: Quantiles,
    pub checks: Vec<BudgetCheck>,
    /// Empirical `P(complete by round t)` with Wilson 99% intervals.
    pub completion_cdf: Vec<CdfPoint>,
    /// Excluded from the JSON so outputs stay byte-reproducible.
    #[serde(skip)]
    pub wall_clock_ms: u128,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl ExperimentSummary {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, kind: BoundKind) -> Option<&BudgetCheck> {
        self.checks.iter().find(|c| c.kind == kind)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.records.len() + 1));
        s.push_str(TrialRecord::CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }

    /// Gnuplot-ready completion CDF.
    pub fn to_dat(&self) -> String {
        let mut s = String::from("# round p_complete wilson99_lo wilson99_hi\n");
        for p in &self.completion_cdf {
            let _ = writeln!(s, "{} {:.6} {:.6} {:.6}", p.round, p.p, p.lo, p.hi);
        }
        s
    }

    /// One line per traced trial: the seed label, then `N_0 N_1 ...`.
    pub fn to_trace(&self) -> Option<String> {
        let mut s = String::new();
        for r in &self.records {
            let t = r.trace.as_ref()?;
            s.push_str(&r.seed);
            for x in t {
                let _ = write!(s, " {x}");
            }
            s.push('\n');
        }
        Some(s)
    }

    /// Writes `<name>.csv`, `<name>.json` and `<name>.dat` into `dir`, plus
    /// `<name>.trace` when every record carries a trace.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        let io = |path: &Path, e: std::io::Error| Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        };
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for (ext, body) in [("csv", self.to_csv()), ("json", self.to_json()), ("dat", self.to_dat())] {
            let path = dir.join(format!("{}.{ext}", self.name));
            fs::write(&path, body).map_err(|e| io(&path, e))?;
        }
        if let Some(body) = self.to_trace().filter(|_| !self.records.is_empty()) {
            let path = dir.join(format!("{}.trace", self.name));
            fs::write(&path, body).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

/// Worker pool honoring the explicit thread count, then `ROMA_SIM_THREADS`.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let threads = threads.or_else(|| {
        std::env::var("ROMA_SIM_THREADS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&t| t > 0)
    });
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    b.build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// The upper-bound budget for an operation: broadcast as predicted, all-to-all
/// by a union bound over sources, flooding consensus doubling the failure.
pub fn operation_budget(spec: &ExperimentSpec) -> Result<RoundBudget> {
    let mut b = predicted_round_budget(&spec.model, spec.c)?;
    match spec.operation {
        Operation::Broadcast | Operation::AllSources => {}
        Operation::AllToAll => {
            b.failure *= spec.model.n as f64;
            b.formula += ", union bound over n sources";
        }
        Operation::Consensus => {
            b.failure *= 2.0;
        }
    }
    Ok(b)
}

/// Lower-bound claim attached to an operation, if any.
fn lower_bound(model: &ModelSpec, op: Operation) -> Option<(usize, f64, String)> {
    let n = model.n;
    if n < 2 {
        return None;
    }
    match (op, model.kind) {
        (Operation::AllSources, ModelKind::Urt) => Some((
            consensus_lower_bound_rounds(n),
            0.5,
            "no source done by floor(log2 n / 2)".into(),
        )),
        (Operation::Broadcast, ModelKind::Urt) => Some((
            urt_lower_bound_rounds(n),
            0.25,
            "not done by floor(log2 n)".into(),
        )),
        (Operation::Broadcast, ModelKind::UrtAdv) if model.k + 1 < n => {
            let r = adversarial_lower_bound(n, model.k);
            // completion >= r  <=>  incomplete after ceil(r) - 1 rounds
            Some((
                (r.ceil() as usize).saturating_sub(1),
                0.25,
                "not done before kn / (2(n-k-1))".into(),
            ))
        }
        (Operation::Broadcast, ModelKind::Der) => Some((
            er_lower_bound_rounds(n, model.m),
            0.5,
            "not done by floor((log2 n - 1) / log2(1 + m/n))".into(),
        )),
        _ => None,
    }
}

fn run_trial(spec: &ExperimentSpec, opts: &RunOptions, cap: usize, i: u64) -> Result<TrialRecord> {
    let stream = RngStream::new(spec.seed, 0).split(i);
    let mut rng = stream.rng();
    let seed = format!("{}:{}", spec.seed, i);
    let model = &spec.model;
    let mut rec = match spec.operation {
        Operation::Broadcast => run_broadcast(model, opts, 0, cap, &mut rng)?,
        Operation::AllToAll | Operation::AllSources => {
            let r = run_all_sources(model, opts, cap, &mut rng)?;
            let completion = if spec.operation == Operation::AllToAll {
                r.all_to_all
            } else {
                r.radius
            };
            TrialRecord {
                spec: *model,
                strategy: spec.operation.name().into(),
                seed: String::new(),
                completion_round: completion,
                capped: completion.is_none(),
                trace: None,
            }
        }
        Operation::Consensus => {
            let inputs: Vec<u8> = (0..model.n).map(|v| (v % 2) as u8).collect();
            let (_, completion) = algorithm1_with_completion(model, &inputs, spec.c, &mut rng)?;
            TrialRecord {
                spec: *model,
                strategy: "alg1".into(),
                seed: String::new(),
                completion_round: completion,
                capped: completion.is_none(),
                trace: None,
            }
        }
    };
    rec.seed = seed;
    Ok(rec)
}

/// Runs the trials in parallel (trial `i` on stream `split(seed, i)`),
/// aggregates them and, if an output directory is set, writes the outputs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let start = Instant::now();
    let budget = operation_budget(spec)?;
    let cap = spec
        .round_cap
        .unwrap_or_else(|| default_round_cap(&spec.model, spec.c).max(budget.rounds));
    let mut opts = RunOptions::for_spec(&spec.model);
    opts.engine = spec.engine;
    opts.step.scheme = spec.scheme;
    opts.step.byzantine = spec.byzantine;
    opts.trace = spec.trace;
    let pool = thread_pool(spec.threads)?;
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..spec.trials as u64)
            .into_par_iter()
            .map(|i| run_trial(spec, &opts, cap, i))
            .collect::<Result<_>>()
    })?;

    let mut checks = vec![BudgetCheck::evaluate(
        BoundKind::Upper,
        budget.rounds,
        budget.failure,
        budget.formula.clone(),
        &records,
    )];
    if let Some((rounds, bound, formula)) = lower_bound(&spec.model, spec.operation) {
        checks.push(BudgetCheck::evaluate(BoundKind::Lower, rounds, bound, formula, &records));
    }
    if spec.operation == Operation::AllSources {
        // The radius has no upper-bound claim of its own.
        checks.remove(0);
    }

    let trials = records.len() as u64;
    let mut rounds: Vec<f64> = records
        .iter()
        .map(|r| r.completion_round.map_or(f64::INFINITY, |x| x as f64))
        .collect();
    rounds.sort_by(f64::total_cmp);
    let q = |p: f64| quantile(&rounds, p).filter(|x| x.is_finite()).map(|x| x as usize);
    let max_done = records.iter().filter_map(|r| r.completion_round).max().unwrap_or(0);
    let horizon = max_done.max(checks.iter().map(|c| c.rounds).max().unwrap_or(0)).min(cap);
    let mut done_by = vec![0u64; horizon + 1];
    for r in records.iter().filter_map(|r| r.completion_round) {
        if r <= horizon {
            done_by[r] += 1;
        }
    }
    let mut acc = 0;
    let completion_cdf = done_by
        .iter()
        .enumerate()
        .map(|(t, &d)| {
            acc += d;
            let ci = wilson_interval(acc, trials, Z99);
            CdfPoint {
                round: t,
                p: acc as f64 / trials as f64,
                lo: ci.lo,
                hi: ci.hi,
            }
        })
        .collect();

    let summary = ExperimentSummary {
        schema_version: SCHEMA_VERSION,
        name: spec.name.clone(),
        operation: spec.operation.name().into(),
        model: spec.model,
        model_label: spec.model.to_string(),
        strategy: records.first().map(|r| r.strategy.clone()).unwrap_or_default(),
        trials: spec.trials,
        seed: spec.seed,
        c: spec.c,
        round_cap: cap,
        capped: records.iter().filter(|r| r.capped).count() as u64,
        quantiles: Quantiles {
            p50: q(0.5),
            p90: q(0.9),
            p99: q(0.99),
            max: q(1.0),
        },
        checks,
        completion_cdf,
        wall_clock_ms: start.elapsed().as_millis(),
        records,
    };
    if let Some(dir) = &spec.out_dir {
        summary.write_outputs(dir)?;
    }
    Ok(summary)
}

/// All-to-all broadcast: every honest source must reach every honest node.
pub fn all_to_all_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let mut spec = spec.clone();
    spec.operation = Operation::AllToAll;
    run_experiment(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_quantiles() {
        let spec = ExperimentSpec::new(ModelSpec::urt(4).unwrap(), Operation::Broadcast, 1);
        let s = run_experiment(&spec).unwrap();
        assert_eq!(s.records.len(), 1);
        let r = s.records[0].completion_round;
        assert_eq!(s.quantiles.p50, r);
        assert_eq!(s.quantiles.max, r);
        assert_eq!(s.records[0].seed, "1:0");
    }

    #[test]
    fn deterministic_csv_independent_of_threads() {
        let mut spec = ExperimentSpec::new(ModelSpec::urt_adv(12, 5).unwrap(), Operation::Broadcast, 200);
        spec.threads = Some(1);
        let a = run_experiment(&spec).unwrap();
        spec.threads = Some(4);
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_dat(), b.to_dat());
    }

    #[test]
    fn all_to_all_n2() {
        let mut spec = ExperimentSpec::new(ModelSpec::urt(2).unwrap(), Operation::Broadcast, 300);
        spec.round_cap = Some(10);
        let s = all_to_all_experiment(&spec).unwrap();
        assert_eq!(s.capped, 0);
        assert!(s.records.iter().all(|r| r.completion_round.unwrap() <= 10));
    }

    #[test]
    fn writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = ExperimentSpec::new(ModelSpec::der(8, 8).unwrap(), Operation::Broadcast, 20);
        spec.out_dir = Some(dir.path().to_path_buf());
        spec.name = "der".into();
        let s = run_experiment(&spec).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("der.csv")).unwrap();
        assert_eq!(csv, s.to_csv());
        assert_eq!(csv.lines().count(), 21);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("der.json")).unwrap()).unwrap();
        assert_eq!(json["schema_version"], SCHEMA_VERSION);
        assert!(dir.path().join("der.dat").exists());
    }

    #[test]
    fn consensus_and_radius_operations() {
        let s = run_experiment(&ExperimentSpec::new(ModelSpec::urt(16).unwrap(), Operation::Consensus, 50)).unwrap();
        assert!(s.all_pass());
        let r = run_experiment(&ExperimentSpec::new(ModelSpec::urt(16).unwrap(), Operation::AllSources, 50)).unwrap();
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.checks[0].kind, BoundKind::Lower);
    }
}
