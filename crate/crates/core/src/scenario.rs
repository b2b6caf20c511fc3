//! The scenario file format shared by every CLI command: one TOML document
//! describing the network, the channel gains, and optional per-user rate
//! thresholds.
//!
//! Direct networks list `h_sd` per user; relayed networks list `h_sr` and
//! `h_rd` plus a relay assignment. Mixing the two styles in one file is
//! rejected. Round-trips are lossless.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{ChannelGains, NetworkTopology, RelayNode, SourceNode, User};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub version: u32,
    pub network: NetworkSection,
    #[serde(default)]
    pub sources: Vec<SourceSection>,
    #[serde(default)]
    pub relays: Vec<RelaySection>,
    #[serde(default)]
    pub users: Vec<UserSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSection {
    pub total_bandwidth: f64,
    pub noise_psd: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceSection {
    pub id: usize,
    pub power_budget: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelaySection {
    pub id: usize,
    pub power_budget: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UserSection {
    pub id: usize,
    pub source: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relay: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_sd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_sr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_rd: Option<f64>,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub topology: NetworkTopology,
    pub gains: ChannelGains,
    /// Present only when every user states `c_min`.
    pub thresholds: Option<Vec<f64>>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        Scenario::from_file(&file)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_toml(&text)
    }

    pub fn from_file(file: &ScenarioFile) -> Result<Scenario> {
        if file.version != FORMAT_VERSION {
            return Err(Error::Scenario(format!(
                "version: expected {FORMAT_VERSION}, found {}",
                file.version
            )));
        }
        if file.users.is_empty() {
            return Err(Error::Scenario("users: at least one required".into()));
        }
        if !(file.network.total_bandwidth > 0.0) {
            return Err(Error::Scenario("network.total_bandwidth: must be > 0".into()));
        }
        if !(file.network.noise_psd > 0.0) {
            return Err(Error::Scenario("network.noise_psd: must be > 0".into()));
        }
        for s in &file.sources {
            if !(s.power_budget > 0.0) {
                return Err(Error::Scenario(format!(
                    "sources[{}].power_budget: must be > 0",
                    s.id
                )));
            }
        }
        for r in &file.relays {
            if !(r.power_budget > 0.0) {
                return Err(Error::Scenario(format!(
                    "relays[{}].power_budget: must be > 0",
                    r.id
                )));
            }
        }

        let relayed = file.users[0].relay.is_some();
        let mut users = Vec::with_capacity(file.users.len());
        let mut direct = Vec::new();
        let mut source_relay = Vec::new();
        let mut relay_dest = Vec::new();
        let mut thresholds = Vec::new();
        let mut any_c = false;
        let mut all_c = true;

        for u in &file.users {
            let tag = format!("users[{}]", u.id);
            if file.sources.iter().all(|s| s.id != u.source) {
                return Err(Error::Scenario(format!(
                    "{tag}.source: unknown source id {}",
                    u.source
                )));
            }
            if u.relay.is_some() != relayed {
                return Err(Error::Scenario(format!(
                    "{tag}.relay: all users must agree on relaying"
                )));
            }
            match (relayed, u.h_sd, u.h_sr, u.h_rd, u.relay) {
                (false, Some(h), None, None, None) => {
                    if !(h > 0.0) {
                        return Err(Error::Scenario(format!("{tag}.h_sd: must be > 0")));
                    }
                    direct.push(h);
                }
                (true, None, Some(h1), Some(h2), Some(rid)) => {
                    if file.relays.iter().all(|r| r.id != rid) {
                        return Err(Error::Scenario(format!(
                            "{tag}.relay: unknown relay id {rid}"
                        )));
                    }
                    if !(h1 > 0.0) || !(h2 > 0.0) {
                        return Err(Error::Scenario(format!(
                            "{tag}.h_sr/h_rd: must be > 0"
                        )));
                    }
                    source_relay.push(h1);
                    relay_dest.push(h2);
                }
                (false, None, ..) => {
                    return Err(Error::Scenario(format!("{tag}.h_sd: missing")));
                }
                (true, _, h1, h2, _) => {
                    let missing = if h1.is_none() { "h_sr" } else if h2.is_none() { "h_rd" } else { "h_sd" };
                    return Err(Error::Scenario(format!(
                        "{tag}.{missing}: relayed users need h_sr and h_rd only"
                    )));
                }
                (false, Some(_), ..) => {
                    return Err(Error::Scenario(format!(
                        "{tag}: direct users take h_sd only"
                    )));
                }
            }
            match u.c_min {
                Some(c) => {
                    if !(c > 0.0) {
                        return Err(Error::Scenario(format!("{tag}.c_min: must be > 0")));
                    }
                    any_c = true;
                    thresholds.push(c);
                }
                None => {
                    all_c = false;
                    thresholds.push(0.0);
                }
            }
            users.push(User {
                id: u.id,
                source_id: u.source,
                relay_id: u.relay,
                c_min: u.c_min.unwrap_or(0.0),
            });
        }
        if any_c && !all_c {
            return Err(Error::Scenario(
                "users.c_min: set for all users or for none".into(),
            ));
        }

        let topology = NetworkTopology {
            sources: file
                .sources
                .iter()
                .map(|s| SourceNode {
                    id: s.id,
                    power_budget: s.power_budget,
                })
                .collect(),
            relays: file
                .relays
                .iter()
                .map(|r| RelayNode {
                    id: r.id,
                    power_budget: r.power_budget,
                })
                .collect(),
            users,
            total_bandwidth: file.network.total_bandwidth,
            noise_psd: file.network.noise_psd,
        };
        let gains = if relayed {
            ChannelGains::Relayed {
                source_relay,
                relay_dest,
            }
        } else {
            ChannelGains::Direct(direct)
        };
        Ok(Scenario {
            topology,
            gains,
            thresholds: all_c.then_some(thresholds),
        })
    }

    pub fn to_file(&self) -> ScenarioFile {
        let users = self
            .topology
            .users
            .iter()
            .enumerate()
            .map(|(i, u)| UserSection {
                id: u.id,
                source: u.source_id,
                relay: u.relay_id,
                c_min: self.thresholds.as_ref().map(|t| t[i]),
                h_sd: (!self.gains.is_relayed()).then(|| self.gains.first_hop(i)),
                h_sr: self.gains.is_relayed().then(|| self.gains.first_hop(i)),
                h_rd: self.gains.second_hop(i),
            })
            .collect();
        ScenarioFile {
            version: FORMAT_VERSION,
            network: NetworkSection {
                total_bandwidth: self.topology.total_bandwidth,
                noise_psd: self.topology.noise_psd,
            },
            sources: self
                .topology
                .sources
                .iter()
                .map(|s| SourceSection {
                    id: s.id,
                    power_budget: s.power_budget,
                })
                .collect(),
            relays: self
                .topology
                .relays
                .iter()
                .map(|r| RelaySection {
                    id: r.id,
                    power_budget: r.power_budget,
                })
                .collect(),
            users,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(&self.to_file()).map_err(|e| Error::Scenario(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EXAMPLE: &str = r#"
version = 1

[network]
total_bandwidth = 1.37
noise_psd = 1.0

[[sources]]
id = 0
power_budget = 1.1

[[users]]
id = 1
source = 0
c_min = 1.0
h_sd = 4.0

[[users]]
id = 2
source = 0
c_min = 1.1
h_sd = 5.0

[[users]]
id = 3
source = 0
c_min = 1.2
h_sd = 6.0
"#;

    #[test]
    fn parses_direct_scenario() {
        let s = Scenario::from_toml(EXAMPLE).unwrap();
        assert_eq!(s.topology.n_users(), 3);
        assert_eq!(s.gains.direct().unwrap(), &[4.0, 5.0, 6.0]);
        assert_eq!(s.thresholds, Some(vec![1.0, 1.1, 1.2]));
        assert!(!s.topology.is_relayed());
    }

    #[test]
    fn round_trip_is_lossless() {
        let s = Scenario::from_toml(EXAMPLE).unwrap();
        let text = s.to_toml().unwrap();
        let s2 = Scenario::from_toml(&text).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn rejects_unknown_source() {
        let bad = EXAMPLE.replace("source = 0", "source = 7");
        let err = Scenario::from_toml(&bad).unwrap_err();
        assert!(err.to_string().contains("source"), "{err}");
    }

    #[test]
    fn rejects_mixed_gain_styles() {
        let bad = EXAMPLE.replacen("h_sd = 4.0", "h_sr = 4.0\nh_rd = 2.0", 1);
        assert!(Scenario::from_toml(&bad).is_err());
    }

    #[test]
    fn rejects_partial_thresholds() {
        let bad = EXAMPLE.replacen("c_min = 1.0\n", "", 1);
        let err = Scenario::from_toml(&bad).unwrap_err();
        assert!(err.to_string().contains("c_min"), "{err}");
    }

    #[test]
    fn rejects_wrong_version() {
        let bad = EXAMPLE.replace("version = 1", "version = 9");
        assert!(Scenario::from_toml(&bad).is_err());
    }

    #[test]
    fn parses_relayed_scenario() {
        let text = r#"
version = 1

[network]
total_bandwidth = 10.0
noise_psd = 1.0

[[sources]]
id = 0
power_budget = 20.0

[[relays]]
id = 0
power_budget = 40.0

[[users]]
id = 1
source = 0
relay = 0
h_sr = 2.0
h_rd = 3.0
"#;
        let s = Scenario::from_toml(text).unwrap();
        assert!(s.topology.is_relayed());
        assert!(s.gains.is_relayed());
        assert_eq!(s.gains.first_hop(0), 2.0);
        assert_eq!(s.gains.second_hop(0), Some(3.0));
        assert_eq!(s.thresholds, None);
        let text2 = s.to_toml().unwrap();
        assert_eq!(s, Scenario::from_toml(&text2).unwrap());
    }

    proptest! {
        #[test]
        fn random_direct_scenarios_round_trip(
            n in 1usize..6,
            budgets in proptest::collection::vec(0.1f64..100.0, 1..4),
            seedgains in proptest::collection::vec(0.01f64..50.0, 6),
            w in 0.1f64..100.0,
        ) {
            let n_sources = budgets.len();
            let scenario = Scenario {
                topology: NetworkTopology {
                    sources: budgets
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| SourceNode { id: i, power_budget: b })
                        .collect(),
                    relays: vec![],
                    users: (0..n)
                        .map(|i| User {
                            id: i,
                            source_id: i % n_sources,
                            relay_id: None,
                            c_min: 0.0,
                        })
                        .collect(),
                    total_bandwidth: w,
                    noise_psd: 1.0,
                },
                gains: ChannelGains::Direct(seedgains[..n].to_vec()),
                thresholds: None,
            };
            let text = scenario.to_toml().unwrap();
            prop_assert_eq!(scenario, Scenario::from_toml(&text).unwrap());
        }
    }
}
