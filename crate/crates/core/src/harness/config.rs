use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::{ByzantineBehavior, Engine, ErScheme, ModelKind, ModelSpec};
use crate::error::{Error, Result};

/// What an experiment measures per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Operation {
    /// Single-source broadcast from node 0.
    Broadcast,
    /// Every honest source reaches every honest node.
    AllToAll,
    /// Earliest completing source (dynamic radius).
    AllSources,
    /// Flooding consensus; a trial fails if any node outputs `⊥`.
    Consensus,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Broadcast => "broadcast",
            Operation::AllToAll => "all-to-all",
            Operation::AllSources => "all-sources",
            Operation::Consensus => "consensus",
        }
    }
}

impl FromStr for Operation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "broadcast" => Operation::Broadcast,
            "all-to-all" => Operation::AllToAll,
            "all-sources" => Operation::AllSources,
            "consensus" => Operation::Consensus,
            _ => return Err(Error::InvalidArgument(format!("unknown operation `{s}`"))),
        })
    }
}

/// A fully specified Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    pub operation: Operation,
    pub trials: usize,
    /// Defaults to the larger of the predicted budget and a generous cap.
    pub round_cap: Option<usize>,
    pub c: f64,
    pub seed: u64,
    pub engine: Engine,
    pub scheme: ErScheme,
    pub byzantine: ByzantineBehavior,
    /// Worker threads; `None` defers to `ROMA_SIM_THREADS` or all cores.
    pub threads: Option<usize>,
    /// Directory for `<name>.csv`, `<name>.json` and `<name>.dat`.
    pub out_dir: Option<PathBuf>,
    pub name: String,
    /// Record `N_t` per round and write `<name>.trace`.
    pub trace: bool,
}

impl ExperimentSpec {
    pub fn new(model: ModelSpec, operation: Operation, trials: usize) -> Self {
        ExperimentSpec {
            model,
            operation,
            trials,
            round_cap: None,
            c: 1.0,
            seed: 1,
            engine: Engine::Auto,
            scheme: ErScheme::WithoutReplacement,
            byzantine: ByzantineBehavior::Silent,
            threads: None,
            out_dir: None,
            name: "experiment".into(),
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if !(self.c >= 1.0 && self.c.is_finite()) {
            return Err(Error::InvalidArgument(format!("c must be at least 1, got {}", self.c)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be positive".into()));
        }
        Ok(())
    }

    /// Builds a spec from flat `key = value` pairs (config file and CLI flags
    /// share the keys).
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        for key in pairs.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidArgument(format!("unknown key `{key}`")));
            }
        }
        let get = |k: &str| pairs.get(k).map(String::as_str);
        let num = |k: &str, default: usize| -> Result<usize> {
            get(k).map_or(Ok(default), |v| parse_value(k, v))
        };
        let kind: ModelKind = get("model").unwrap_or("URT").parse()?;
        let model = ModelSpec::new(kind, num("n", 16)?, num("f", 0)?, num("k", 0)?, num("m", 0)?)?;
        let operation = get("operation").unwrap_or("broadcast").parse()?;
        let mut spec = ExperimentSpec::new(model, operation, num("trials", 1000)?);
        spec.round_cap = get("cap").map(|v| parse_value("cap", v)).transpose()?;
        if let Some(v) = get("c") {
            spec.c = parse_value("c", v)?;
        }
        if let Some(v) = get("seed") {
            spec.seed = parse_value("seed", v)?;
        }
        if let Some(v) = get("engine") {
            spec.engine = match v {
                "auto" => Engine::Auto,
                "full" => Engine::Full,
                "fast" => Engine::Fast,
                _ => return Err(Error::InvalidArgument(format!("unknown engine `{v}`"))),
            };
        }
        if let Some(v) = get("scheme") {
            spec.scheme = match v {
                "1" => ErScheme::WithoutReplacement,
                "2" => ErScheme::WithReplacement,
                _ => return Err(Error::InvalidArgument(format!("scheme must be 1 or 2, got `{v}`"))),
            };
        }
        if let Some(v) = get("byzantine") {
            spec.byzantine = parse_byzantine(v)?;
        }
        spec.threads = get("threads").map(|v| parse_value("threads", v)).transpose()?;
        spec.out_dir = get("out").map(PathBuf::from);
        if let Some(v) = get("name") {
            spec.name = v.to_string();
        }
        if let Some(v) = get("trace") {
            spec.trace = parse_value("trace", v)?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Keys accepted in config files.
pub const KEYS: &[&str] = &[
    "model", "n", "f", "k", "m", "operation", "trials", "cap", "c", "seed", "engine", "scheme",
    "byzantine", "threads", "out", "name", "trace",
];

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value `{v}` for `{key}`")))
}

/// `silent`, `forward` or `random:<p>`.
pub fn parse_byzantine(v: &str) -> Result<ByzantineBehavior> {
    Ok(match v {
        "silent" => ByzantineBehavior::Silent,
        "forward" => ByzantineBehavior::Forward,
        _ => match v.strip_prefix("random:") {
            Some(p) => ByzantineBehavior::Random(parse_value("byzantine", p)?),
            None => return Err(Error::InvalidArgument(format!("unknown behavior `{v}`"))),
        },
    })
}

/// Parses a flat `key = value` document; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected key = value, got `{line}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "empty key".into(),
            });
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("duplicate key `{k}`"),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_build() {
        let text = "# demo\nmodel = urt-adv\nn = 30\nk = 19  # edges\ntrials=10\nseed = 7\n";
        let pairs = parse_config(text).unwrap();
        let spec = ExperimentSpec::from_pairs(&pairs).unwrap();
        assert_eq!(spec.model, ModelSpec::urt_adv(30, 19).unwrap());
        assert_eq!(spec.trials, 10);
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.operation, Operation::Broadcast);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_config("n 4"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_config("n=4\nn=5").is_err());
        let mut pairs = parse_config("n=4\nbogus=1").unwrap();
        assert!(ExperimentSpec::from_pairs(&pairs).is_err());
        pairs.remove("bogus");
        pairs.insert("trials".into(), "0".into());
        assert!(ExperimentSpec::from_pairs(&pairs).is_err());
        pairs.insert("trials".into(), "5".into());
        pairs.insert("model".into(), "URT_BYZ".into());
        pairs.insert("f".into(), "3".into());
        assert!(ExperimentSpec::from_pairs(&pairs).is_err());
    }

    #[test]
    fn behaviors() {
        assert_eq!(parse_byzantine("random:0.5").unwrap(), ByzantineBehavior::Random(0.5));
        assert!(parse_byzantine("loud").is_err());
    }
}
