// SPDX-License-Identifier: Apache-2.0

//! Scenario files.
//!
//! A scenario is a TOML document. Top-level keys describe the field, the
//! one-way function and the seed; `scheme` selects which of the remaining
//! keys apply:
//!
//! ```toml
//! scheme = "single"          # single | multi | chain
//! prime = 199                # integer or decimal string
//! oneway = "modexp:3"        # modexp:g | modsquare | sha256
//! seed = 2024
//! mode = "strict"            # constant_term | strict
//! tick_budget = 100
//!
//! threshold = 3              # single and multi
//! public_keys = [1, 2, 3, 4, 5]
//! secret = 42                # single
//! # secrets = [..]           # multi, with message_len
//! active = [1, 2, 3]         # 1-based, defaults to everyone
//!
//! [behaviors]                # participant index (or node id for chain)
//! 2 = "corrupt:5"            # honest | silent | corrupt:N | late:N
//!                            # chain only: forge, or forge+<behavior>
//! [chain]
//! nodes = 100
//! intervals = 10
//!
//! [output]
//! transcript = "transcript.jsonl"
//! chain = "chain.bin"
//! ```
//!
//! Relative output paths resolve against the scenario file's directory.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tlss_core::chain::{DealerBehavior, NodeProfile, WorldConfig};
use tlss_core::mss::SecretVector;
use tlss_core::protocol::{Behavior, SecretInput, SessionConfig, DEFAULT_TICK_BUDGET};
use tlss_core::sss::{SchemeParams, VerificationMode};
use tlss_core::{OneWayFn, OneWayKind, PrimeField};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid scenario: {0}")]
    Parse(String),
    #[error("invalid scenario field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Single,
    Multi,
    Chain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrimeValue {
    Int(u64),
    Text(String),
}

impl PrimeValue {
    fn to_biguint(&self) -> Result<BigUint, ConfigError> {
        match self {
            PrimeValue::Int(v) => Ok(BigUint::from(*v)),
            PrimeValue::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| field_err("prime", format!("`{s}` is not a decimal integer"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub committee_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub committee_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipients: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau0: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau1: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub txs_per_interval: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_amount: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_nonce: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<PathBuf>,
}

impl OutputSection {
    fn is_empty(&self) -> bool {
        self.transcript.is_none() && self.chain.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scheme: SchemeKind,
    pub prime: PrimeValue,
    pub oneway: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<VerificationMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tick_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub public_keys: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secrets: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub behaviors: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSection>,
    #[serde(default, skip_serializing_if = "OutputSection::is_empty")]
    pub output: OutputSection,
}

/// A protocol session ready to run.
#[derive(Debug, Clone)]
pub struct SharingScenario {
    pub params: SchemeParams,
    pub oneway: OneWayFn,
    pub secret: SecretInput,
    pub profiles: Vec<Behavior>,
    /// 0-based participant indices.
    pub active: Vec<usize>,
    pub seed: u64,
    pub config: SessionConfig,
}

#[derive(Debug, Clone)]
pub struct ChainScenario {
    pub world: WorldConfig,
    pub intervals: u64,
}

#[derive(Debug, Clone)]
pub enum Scenario {
    Sharing(Box<SharingScenario>),
    Chain(ChainScenario),
}

#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    pub transcript_path: Option<PathBuf>,
    pub chain_path: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Checks every downstream constraint and builds the runnable scenario.
    pub fn validate(&self) -> Result<Scenario, ConfigError> {
        let p = self.prime.to_biguint()?;
        let field = PrimeField::new(p).map_err(|e| field_err("prime", e))?;
        let kind: OneWayKind = self.oneway.parse().map_err(|e| field_err("oneway", e))?;
        let oneway = OneWayFn::new(kind.clone(), &field).map_err(|e| field_err("oneway", e))?;
        match self.scheme {
            SchemeKind::Single | SchemeKind::Multi => self.validate_sharing(&field, oneway),
            SchemeKind::Chain => self.validate_chain(field, kind),
        }
    }

    fn reject_present(&self, scheme: &str, fields: &[(&str, bool)]) -> Result<(), ConfigError> {
        match fields.iter().find(|(_, present)| *present) {
            Some((name, _)) => Err(field_err(name, format!("not used by scheme `{scheme}`"))),
            None => Ok(()),
        }
    }

    fn validate_sharing(
        &self,
        field: &PrimeField,
        oneway: OneWayFn,
    ) -> Result<Scenario, ConfigError> {
        let single = self.scheme == SchemeKind::Single;
        let name = if single { "single" } else { "multi" };
        self.reject_present(
            name,
            &[
                ("chain", self.chain.is_some()),
                ("output.chain", self.output.chain.is_some()),
            ],
        )?;
        if single {
            self.reject_present(
                name,
                &[
                    ("secrets", self.secrets.is_some()),
                    ("message_len", self.message_len.is_some()),
                ],
            )?;
        } else {
            self.reject_present(name, &[("secret", self.secret.is_some())])?;
        }
        let t = self
            .threshold
            .ok_or_else(|| field_err("threshold", "required"))?;
        let keys = self
            .public_keys
            .as_ref()
            .ok_or_else(|| field_err("public_keys", "required"))?;
        let params = SchemeParams::setup(field.modulus().clone(), t, keys.len(), keys)
            .map_err(|e| field_err("public_keys", e))?;
        let m = keys.len();

        let secret = if single {
            let s = self.secret.ok_or_else(|| field_err("secret", "required"))?;
            SecretInput::Single(field.element(s))
        } else {
            let values = self
                .secrets
                .as_ref()
                .ok_or_else(|| field_err("secrets", "required"))?;
            let k = self
                .message_len
                .ok_or_else(|| field_err("message_len", "required"))?;
            let v = SecretVector::new(values.iter().map(|&s| field.element(s)).collect(), k)
                .map_err(|e| field_err("secrets", e))?;
            tlss_core::mss::derive(&v, &params, &oneway).map_err(|e| field_err("secrets", e))?;
            SecretInput::Multi(v)
        };

        let mut profiles = vec![Behavior::Honest; m];
        for (key, value) in &self.behaviors {
            let at = format!("behaviors.{key}");
            let i: usize = key
                .parse()
                .map_err(|_| field_err(&at, "key must be a participant number"))?;
            if i == 0 || i > m {
                return Err(field_err(&at, format!("no participant {i} (1..={m})")));
            }
            profiles[i - 1] = value.parse().map_err(|e| field_err(&at, e))?;
        }

        let active = match &self.active {
            None => (0..m).collect(),
            Some(list) => {
                let mut out = Vec::with_capacity(list.len());
                for &i in list {
                    if i == 0 || i > m {
                        return Err(field_err("active", format!("no participant {i} (1..={m})")));
                    }
                    if out.contains(&(i - 1)) {
                        return Err(field_err("active", format!("participant {i} listed twice")));
                    }
                    out.push(i - 1);
                }
                out
            }
        };

        let config = SessionConfig {
            mode: self.mode.unwrap_or_default(),
            tick_budget: self.tick_budget.unwrap_or(DEFAULT_TICK_BUDGET),
        };
        if config.tick_budget == 0 {
            return Err(field_err("tick_budget", "must be positive"));
        }
        Ok(Scenario::Sharing(Box::new(SharingScenario {
            params,
            oneway,
            secret,
            profiles,
            active,
            seed: self.seed,
            config,
        })))
    }

    fn validate_chain(
        &self,
        field: PrimeField,
        oneway: OneWayKind,
    ) -> Result<Scenario, ConfigError> {
        self.reject_present(
            "chain",
            &[
                ("threshold", self.threshold.is_some()),
                ("public_keys", self.public_keys.is_some()),
                ("secret", self.secret.is_some()),
                ("secrets", self.secrets.is_some()),
                ("message_len", self.message_len.is_some()),
                ("active", self.active.is_some()),
                ("tick_budget", self.tick_budget.is_some()),
            ],
        )?;
        let section = self.chain.clone().unwrap_or_default();
        let d = WorldConfig::default();
        let mut world = WorldConfig {
            node_count: section.nodes.unwrap_or(d.node_count),
            profiles: BTreeMap::new(),
            committee_min: section.committee_min.unwrap_or(d.committee_min),
            committee_max: section.committee_max.unwrap_or(d.committee_max),
            recipients: section.recipients.unwrap_or(d.recipients),
            nbits: section.nbits.unwrap_or(d.nbits),
            tau0: section.tau0.unwrap_or(d.tau0),
            tau1: section.tau1.unwrap_or(d.tau1),
            prime: field.modulus().clone(),
            oneway,
            seed: self.seed,
            txs_per_interval: section.txs_per_interval.unwrap_or(d.txs_per_interval),
            max_amount: section.max_amount.unwrap_or(d.max_amount),
            mode: self.mode.unwrap_or(VerificationMode::Strict),
            max_nonce: section.max_nonce.unwrap_or(d.max_nonce),
        };
        if world.committee_min == 0 || world.committee_min > world.committee_max {
            return Err(field_err(
                "chain.committee_min",
                "must be in 1..=committee_max",
            ));
        }
        if world.txs_per_interval == 0 {
            return Err(field_err("chain.txs_per_interval", "must be positive"));
        }
        if world.nbits > 32 {
            return Err(field_err("chain.nbits", "at most 32"));
        }
        for (key, value) in &self.behaviors {
            let at = format!("behaviors.{key}");
            let node: u32 = key
                .parse()
                .map_err(|_| field_err(&at, "key must be a node id"))?;
            if node == 0 || node > world.node_count {
                return Err(field_err(
                    &at,
                    format!("no node {node} (1..={})", world.node_count),
                ));
            }
            world.profiles.insert(
                node,
                parse_node_profile(value).map_err(|e| field_err(&at, e))?,
            );
        }
        let intervals = section.intervals.unwrap_or(10);
        tlss_core::chain::World::new(world.clone()).map_err(|e| field_err("chain", e))?;
        Ok(Scenario::Chain(ChainScenario { world, intervals }))
    }
}

/// `forge`, a share behavior, or both joined by `+`.
fn parse_node_profile(text: &str) -> Result<NodeProfile, String> {
    let mut profile = NodeProfile::default();
    for part in text.split('+') {
        if part.trim() == "forge" {
            profile.dealer = DealerBehavior::ForgeCommitment;
        } else {
            profile.share = part
                .parse()
                .map_err(|e: tlss_core::protocol::ProtocolError| e.to_string())?;
        }
    }
    Ok(profile)
}

/// Reads, parses and validates a scenario file.
pub fn load(path: &Path) -> Result<LoadedScenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let config = ScenarioConfig::parse(&text)?;
    let scenario = config.validate()?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));
    Ok(LoadedScenario {
        transcript_path: resolve(&config.output.transcript),
        chain_path: resolve(&config.output.chain),
        config,
        scenario,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = r#"
scheme = "single"
prime = 199
oneway = "modexp:3"
seed = 2024
threshold = 3
public_keys = [1, 2, 3, 4, 5]
secret = 42

[behaviors]
2 = "corrupt:5"
"#;

    #[test]
    fn parses_single() {
        let cfg = ScenarioConfig::parse(SINGLE).unwrap();
        let Scenario::Sharing(s) = cfg.validate().unwrap() else {
            panic!("expected sharing")
        };
        assert_eq!(s.params.threshold(), 3);
        assert_eq!(s.profiles[1], Behavior::CorruptHShare(5));
        assert_eq!(s.active, vec![0, 1, 2, 3, 4]);
        assert_eq!(s.config.mode, VerificationMode::ConstantTerm);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = ScenarioConfig::parse(SINGLE).unwrap();
        let again = ScenarioConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(again.to_toml(), cfg.to_toml());
    }

    #[test]
    fn large_prime_as_text() {
        let text = SINGLE.replace("prime = 199", "prime = \"2305843009213693951\"");
        assert!(ScenarioConfig::parse(&text).unwrap().validate().is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        let err =
            ScenarioConfig::parse(&format!("{SINGLE}\n[output]\nfile = \"x\"\n")).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
        let err = ScenarioConfig::parse(&SINGLE.replace("seed", "sead")).unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    fn field_of(text: &str) -> String {
        match ScenarioConfig::parse(text).unwrap().validate().unwrap_err() {
            ConfigError::Field { field, .. } => field,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn semantic_errors_name_the_field() {
        assert_eq!(
            field_of(&SINGLE.replace("prime = 199", "prime = 200")),
            "prime"
        );
        assert_eq!(
            field_of(&SINGLE.replace("threshold = 3", "threshold = 6")),
            "public_keys"
        );
        assert_eq!(field_of(&SINGLE.replace("2 = ", "9 = ")), "behaviors.9");
        assert_eq!(
            field_of(&SINGLE.replace("corrupt:5", "sneaky")),
            "behaviors.2"
        );
        assert_eq!(
            field_of(&SINGLE.replace("modexp:3", "modexp:199")),
            "oneway"
        );
        assert_eq!(
            field_of(&SINGLE.replace("secret = 42", "secrets = [1, 2]")),
            "secrets"
        );
        assert_eq!(field_of(&format!("active = [1, 1]\n{SINGLE}")), "active");
    }

    #[test]
    fn chain_profiles() {
        let text = r#"
scheme = "chain"
prime = 2305843009213693951
oneway = "sha256"
[chain]
nodes = 40
[behaviors]
3 = "forge"
4 = "forge+silent"
5 = "corrupt:2"
"#;
        let Scenario::Chain(c) = ScenarioConfig::parse(text).unwrap().validate().unwrap() else {
            panic!("expected chain")
        };
        assert_eq!(c.world.node_count, 40);
        assert_eq!(c.world.mode, VerificationMode::Strict);
        assert_eq!(c.world.profiles[&3].dealer, DealerBehavior::ForgeCommitment);
        assert_eq!(c.world.profiles[&4].share, Behavior::Silent);
        assert_eq!(c.world.profiles[&5].share, Behavior::CorruptHShare(2));
        assert_eq!(
            field_of(&text.replace("prime = 2305843009213693951", "prime = 199")),
            "chain"
        );
    }
}
