use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goalgen::GeneratorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Cusp,
    DomainRandomization,
    PairedSingle,
    SingleLearner,
    AspSparse,
    AspDense,
}

impl MethodKind {
    pub const ALL: [MethodKind; 6] = [
        MethodKind::Cusp,
        MethodKind::DomainRandomization,
        MethodKind::PairedSingle,
        MethodKind::SingleLearner,
        MethodKind::AspSparse,
        MethodKind::AspDense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Cusp => "cusp",
            MethodKind::DomainRandomization => "domain_randomization",
            MethodKind::PairedSingle => "paired_single",
            MethodKind::SingleLearner => "single_learner",
            MethodKind::AspSparse => "asp_sparse",
            MethodKind::AspDense => "asp_dense",
        }
    }

    /// Whether the method trains goal generators on a regret signal.
    pub fn uses_generators(self) -> bool {
        matches!(
            self,
            MethodKind::Cusp | MethodKind::PairedSingle | MethodKind::SingleLearner
        )
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        let alias = match s.as_str() {
            "dr" => Some(MethodKind::DomainRandomization),
            "paired" => Some(MethodKind::PairedSingle),
            _ => None,
        };
        alias
            .or_else(|| MethodKind::ALL.into_iter().find(|k| k.name() == s))
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

/// Ablation switches for the regret-based methods.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ablations {
    /// Train generators only on the current round's proposals.
    pub no_buffer: bool,
    /// Pin the generator temperature at zero.
    pub alpha_zero: bool,
    /// Drop the second generator (CuSP becomes the single-generator game).
    pub no_symmetrize: bool,
    /// Overrides the refresh blend weight; 1 disables refresh.
    pub beta: Option<f64>,
    /// Overrides the first refresh round.
    pub refresh_start: Option<u64>,
}

impl Ablations {
    /// Parses a comma-separated list such as `no_buffer,alpha_zero,beta=1`.
    pub fn parse_list(list: &str) -> Result<Self> {
        let mut out = Ablations::default();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = match item.split_once('=') {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (item, None),
            };
            let number = |v: Option<&str>| -> Result<f64> {
                v.and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Config(format!("ablation '{key}' needs a numeric value")))
            };
            match key.replace('-', "_").as_str() {
                "no_buffer" => out.no_buffer = true,
                "alpha_zero" => out.alpha_zero = true,
                "no_symmetrize" => out.no_symmetrize = true,
                "beta" => out.beta = Some(number(value)?),
                "refresh_start" => out.refresh_start = Some(number(value)? as u64),
                other => return Err(Error::Config(format!("unknown ablation '{other}'"))),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub kind: MethodKind,
    #[serde(default)]
    pub ablations: Ablations,
}

impl MethodSpec {
    pub fn new(kind: MethodKind) -> Self {
        Self {
            kind,
            ablations: Ablations::default(),
        }
    }

    pub fn cusp() -> Self {
        Self::new(MethodKind::Cusp)
    }

    /// The single-generator regret game with no entropy, no stored history
    /// and no refresh.
    pub fn paired_ablation() -> Self {
        Self {
            kind: MethodKind::PairedSingle,
            ablations: Ablations {
                no_buffer: true,
                alpha_zero: true,
                no_symmetrize: true,
                beta: Some(1.0),
                refresh_start: None,
            },
        }
    }

    /// The round structure actually run, after `no_symmetrize`.
    pub fn effective_kind(&self) -> MethodKind {
        match self.kind {
            MethodKind::Cusp if self.ablations.no_symmetrize => MethodKind::PairedSingle,
            k => k,
        }
    }

    /// Generator configuration with the ablations applied.
    pub fn generator_config(&self, base: &GeneratorConfig) -> GeneratorConfig {
        let mut cfg = base.clone();
        if !self.kind.uses_generators() {
            return cfg;
        }
        let a = &self.ablations;
        if a.no_buffer {
            cfg.keep_history = false;
        }
        if a.alpha_zero {
            cfg.sac.fixed_alpha = true;
            cfg.sac.init_alpha = 0.0;
        }
        if let Some(beta) = a.beta {
            cfg.beta = beta;
        }
        if let Some(t) = a.refresh_start {
            cfg.refresh_start = t;
        }
        cfg
    }

    pub fn label(&self) -> String {
        let a = &self.ablations;
        let mut flags = Vec::new();
        if a.no_buffer {
            flags.push("no_buffer".to_string());
        }
        if a.alpha_zero {
            flags.push("alpha_zero".to_string());
        }
        if a.no_symmetrize {
            flags.push("no_symmetrize".to_string());
        }
        if let Some(b) = a.beta {
            flags.push(format!("beta={b}"));
        }
        if let Some(t) = a.refresh_start {
            flags.push(format!("refresh_start={t}"));
        }
        if flags.is_empty() || !self.kind.uses_generators() {
            self.kind.to_string()
        } else {
            format!("{}[{}]", self.kind, flags.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_and_aliases() {
        assert_eq!("cusp".parse::<MethodKind>().unwrap(), MethodKind::Cusp);
        assert_eq!(
            "dr".parse::<MethodKind>().unwrap(),
            MethodKind::DomainRandomization
        );
        assert_eq!(
            "asp-dense".parse::<MethodKind>().unwrap(),
            MethodKind::AspDense
        );
        assert!("goalgan".parse::<MethodKind>().is_err());
    }

    #[test]
    fn ablation_list_round_trip() {
        let a = Ablations::parse_list("no_buffer, alpha_zero,beta=1,refresh_start=20").unwrap();
        assert!(a.no_buffer && a.alpha_zero && !a.no_symmetrize);
        assert_eq!(a.beta, Some(1.0));
        assert_eq!(a.refresh_start, Some(20));
        assert!(Ablations::parse_list("beta").is_err());
        assert!(Ablations::parse_list("warp_speed").is_err());
    }

    #[test]
    fn full_ablation_reaches_single_generator_game() {
        let spec = MethodSpec {
            kind: MethodKind::Cusp,
            ablations: MethodSpec::paired_ablation().ablations,
        };
        assert_eq!(spec.effective_kind(), MethodKind::PairedSingle);
        let cfg = spec.generator_config(&GeneratorConfig::default());
        assert!(!cfg.keep_history);
        assert!(cfg.sac.fixed_alpha);
        assert_eq!(cfg.sac.init_alpha, 0.0);
        assert_eq!(cfg.beta, 1.0);
    }

    #[test]
    fn domain_randomization_ignores_flags() {
        let base = GeneratorConfig::default();
        let spec = MethodSpec {
            kind: MethodKind::DomainRandomization,
            ablations: MethodSpec::paired_ablation().ablations,
        };
        assert_eq!(spec.generator_config(&base), base);
        assert_eq!(spec.label(), "domain_randomization");
    }
}
