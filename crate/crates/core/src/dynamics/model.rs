use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::treecount::Node;

/// The six communication-graph distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Uniformly random rooted tree.
    Urt,
    /// Uniformly random rooted tree with `f` Byzantine nodes.
    UrtByz,
    /// Uniformly random rooted tree containing `k` adversary edges.
    UrtAdv,
    /// Directed Erdős–Rényi graph with `m` edges.
    Der,
    DerByz,
    DerAdv,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Urt => "URT",
            ModelKind::UrtByz => "URT_BYZ",
            ModelKind::UrtAdv => "URT_ADV",
            ModelKind::Der => "DER",
            ModelKind::DerByz => "DER_BYZ",
            ModelKind::DerAdv => "DER_ADV",
        }
    }

    pub fn is_tree(self) -> bool {
        matches!(self, ModelKind::Urt | ModelKind::UrtByz | ModelKind::UrtAdv)
    }

    pub fn is_byzantine(self) -> bool {
        matches!(self, ModelKind::UrtByz | ModelKind::DerByz)
    }

    pub fn is_adversarial(self) -> bool {
        matches!(self, ModelKind::UrtAdv | ModelKind::DerAdv)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "URT" => ModelKind::Urt,
            "URT_BYZ" => ModelKind::UrtByz,
            "URT_ADV" => ModelKind::UrtAdv,
            "DER" => ModelKind::Der,
            "DER_BYZ" => ModelKind::DerByz,
            "DER_ADV" => ModelKind::DerAdv,
            _ => return Err(Error::InvalidModel(format!("unknown model `{s}`"))),
        })
    }
}

/// A model variant with its parameters. Unused parameters are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    /// Byzantine nodes.
    pub f: usize,
    /// Adversary-controlled edges.
    pub k: usize,
    /// Edges per round (Erdős–Rényi variants).
    pub m: usize,
}

impl ModelSpec {
    /// Builds and validates a spec; parameters the variant does not use must
    /// be zero.
    pub fn new(kind: ModelKind, n: usize, f: usize, k: usize, m: usize) -> Result<Self> {
        let spec = ModelSpec { kind, n, f, k, m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn urt(n: usize) -> Result<Self> {
        Self::new(ModelKind::Urt, n, 0, 0, 0)
    }

    pub fn urt_byz(n: usize, f: usize) -> Result<Self> {
        Self::new(ModelKind::UrtByz, n, f, 0, 0)
    }

    pub fn urt_adv(n: usize, k: usize) -> Result<Self> {
        Self::new(ModelKind::UrtAdv, n, 0, k, 0)
    }

    pub fn der(n: usize, m: usize) -> Result<Self> {
        Self::new(ModelKind::Der, n, 0, 0, m)
    }

    pub fn der_byz(n: usize, m: usize, f: usize) -> Result<Self> {
        Self::new(ModelKind::DerByz, n, f, 0, m)
    }

    pub fn der_adv(n: usize, m: usize, k: usize) -> Result<Self> {
        Self::new(ModelKind::DerAdv, n, 0, k, m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        let ModelSpec { kind, n, f, k, m } = *self;
        if n == 0 {
            return bad("n must be positive".into());
        }
        if !kind.is_byzantine() && f != 0 {
            return bad(format!("{kind} has no Byzantine nodes, got f={f}"));
        }
        if !kind.is_adversarial() && k != 0 {
            return bad(format!("{kind} has no adversary edges, got k={k}"));
        }
        if kind.is_tree() && m != 0 {
            return bad(format!("{kind} has no edge count, got m={m}"));
        }
        let n2 = n * n;
        match kind {
            ModelKind::Urt => {}
            // f ≤ 2n/3 - 1
            ModelKind::UrtByz if 3 * f + 3 > 2 * n => {
                return bad(format!("URT_BYZ needs f <= 2n/3 - 1, got f={f}, n={n}"))
            }
            ModelKind::UrtAdv if 3 * k + 3 > 2 * n => {
                return bad(format!("URT_ADV needs k <= 2n/3 - 1, got k={k}, n={n}"))
            }
            ModelKind::UrtByz | ModelKind::UrtAdv => {}
            _ if m == 0 || m > n2 => return bad(format!("need 1 <= m <= n^2, got m={m}")),
            ModelKind::DerByz if 3 * f >= 2 * n => {
                return bad(format!("DER_BYZ needs f < 2n/3, got f={f}, n={n}"))
            }
            ModelKind::DerAdv if k > m || 4 * k >= 3 * n2 => {
                return bad(format!("DER_ADV needs k <= m and k < 3n^2/4, got k={k}, m={m}"))
            }
            _ => {}
        }
        Ok(())
    }

    /// Default Byzantine set: the last `f` ids.
    pub fn default_byzantine(&self) -> Vec<Node> {
        (self.n - self.f..self.n).collect()
    }

    /// Number of honest nodes.
    pub fn honest(&self) -> usize {
        self.n - self.f
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}(n={}", self.kind, self.n)?;
        if self.kind.is_byzantine() {
            write!(fm, ", f={}", self.f)?;
        }
        if self.kind.is_adversarial() {
            write!(fm, ", k={}", self.k)?;
        }
        if !self.kind.is_tree() {
            write!(fm, ", m={}", self.m)?;
        }
        write!(fm, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrictions() {
        assert!(ModelSpec::urt_byz(9, 5).is_ok());
        assert!(ModelSpec::urt_byz(9, 6).is_err());
        assert!(ModelSpec::urt_adv(30, 19).is_ok());
        assert!(ModelSpec::urt_adv(30, 20).is_err());
        assert!(ModelSpec::der(3, 9).is_ok());
        assert!(ModelSpec::der(3, 10).is_err());
        assert!(ModelSpec::der(3, 0).is_err());
        assert!(ModelSpec::der_byz(9, 10, 5).is_ok());
        assert!(ModelSpec::der_byz(9, 10, 6).is_err());
        assert!(ModelSpec::der_adv(4, 12, 11).is_ok());
        assert!(ModelSpec::der_adv(4, 13, 12).is_err());
        assert!(ModelSpec::der_adv(4, 5, 6).is_err());
        assert!(ModelSpec::new(ModelKind::Urt, 4, 1, 0, 0).is_err());
        assert!(ModelSpec::urt(0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in [
            ModelKind::Urt,
            ModelKind::UrtByz,
            ModelKind::UrtAdv,
            ModelKind::Der,
            ModelKind::DerByz,
            ModelKind::DerAdv,
        ] {
            assert_eq!(kind.name().parse::<ModelKind>().unwrap(), kind);
        }
        assert_eq!("urt-byz".parse::<ModelKind>().unwrap(), ModelKind::UrtByz);
        assert_eq!(ModelSpec::der_byz(5, 7, 1).unwrap().to_string(), "DER_BYZ(n=5, f=1, m=7)");
        assert_eq!(ModelSpec::urt_byz(6, 2).unwrap().default_byzantine(), vec![4, 5]);
    }
}
