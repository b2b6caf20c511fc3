//! Domain types shared by every solver: topologies, channel gains and
//! allocations, with constraint validation.
//!
//! All types are immutable values after construction and safe to share
//! across threads.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A one-hop (or, with a relay, two-hop) source-to-destination link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: usize,
    pub source_id: usize,
    pub relay_id: Option<usize>,
    /// Minimum acceptable capacity, nats/second. Must be positive.
    pub c_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceNode {
    pub id: usize,
    pub power_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayNode {
    pub id: usize,
    pub power_budget: f64,
}

/// Static description of the network: nodes, budgets, spectrum and noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub sources: Vec<SourceNode>,
    pub relays: Vec<RelayNode>,
    pub users: Vec<User>,
    pub total_bandwidth: f64,
    pub noise_psd: f64,
}

impl NetworkTopology {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    /// True when every user has a designated relay.
    pub fn is_relayed(&self) -> bool {
        !self.users.is_empty() && self.users.iter().all(|u| u.relay_id.is_some())
    }

    pub fn source(&self, id: usize) -> Option<&SourceNode> {
        self.sources.iter().find(|s| s.id == id)
    }

    pub fn relay(&self, id: usize) -> Option<&RelayNode> {
        self.relays.iter().find(|r| r.id == id)
    }

    /// Indices of the users served by the given source.
    pub fn users_of_source(&self, source_id: usize) -> Vec<usize> {
        self.users
            .iter()
            .enumerate()
            .filter(|(_, u)| u.source_id == source_id)
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of the users served by the given relay.
    pub fn users_of_relay(&self, relay_id: usize) -> Vec<usize> {
        self.users
            .iter()
            .enumerate()
            .filter(|(_, u)| u.relay_id == Some(relay_id))
            .map(|(i, _)| i)
            .collect()
    }

    /// Capacity thresholds in user order.
    pub fn thresholds(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.c_min).collect()
    }
}

/// Per-user channel power gains. `Direct` carries the source-destination
/// gain; `Relayed` carries the source-relay and relay-destination gains.
/// All gains must be strictly positive and finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ChannelGains {
    Direct(Vec<f64>),
    Relayed {
        source_relay: Vec<f64>,
        relay_dest: Vec<f64>,
    },
}

impl ChannelGains {
    pub fn len(&self) -> usize {
        match self {
            ChannelGains::Direct(v) => v.len(),
            ChannelGains::Relayed { source_relay, .. } => source_relay.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_relayed(&self) -> bool {
        matches!(self, ChannelGains::Relayed { .. })
    }

    pub fn direct(&self) -> Option<&[f64]> {
        match self {
            ChannelGains::Direct(v) => Some(v),
            _ => None,
        }
    }

    /// First-hop gain of a user (source-destination or source-relay).
    pub fn first_hop(&self, i: usize) -> f64 {
        match self {
            ChannelGains::Direct(v) => v[i],
            ChannelGains::Relayed { source_relay, .. } => source_relay[i],
        }
    }

    /// Second-hop gain; only defined for relayed gains.
    pub fn second_hop(&self, i: usize) -> Option<f64> {
        match self {
            ChannelGains::Direct(_) => None,
            ChannelGains::Relayed { relay_dest, .. } => Some(relay_dest[i]),
        }
    }

    /// First-hop gain normalized by the noise PSD, h / N0.
    pub fn first_hop_normalized(&self, i: usize, noise_psd: f64) -> f64 {
        self.first_hop(i) / noise_psd
    }

    fn all_gains(&self) -> Vec<f64> {
        match self {
            ChannelGains::Direct(v) => v.clone(),
            ChannelGains::Relayed {
                source_relay,
                relay_dest,
            } => source_relay.iter().chain(relay_dest).copied().collect(),
        }
    }
}

/// One user's share of a transmission phase. Constructed through [`new`],
/// which pins the invariant that zero bandwidth carries zero power, so
/// sparse optima never produce a 0 * ln(inf) ambiguity.
///
/// [`new`]: PhaseShare::new
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShare {
    power: f64,
    bandwidth: f64,
}

impl PhaseShare {
    pub const ZERO: PhaseShare = PhaseShare {
        power: 0.0,
        bandwidth: 0.0,
    };

    pub fn new(power: f64, bandwidth: f64) -> PhaseShare {
        if bandwidth == 0.0 {
            PhaseShare::ZERO
        } else {
            PhaseShare { power, bandwidth }
        }
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

/// A complete resource assignment: per user, a first-phase (source) share
/// and, for relayed networks, a second-phase (relay) share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub source_shares: Vec<PhaseShare>,
    pub relay_shares: Option<Vec<PhaseShare>>,
}

impl Allocation {
    pub fn direct(shares: Vec<PhaseShare>) -> Allocation {
        Allocation {
            source_shares: shares,
            relay_shares: None,
        }
    }

    pub fn relayed(source: Vec<PhaseShare>, relay: Vec<PhaseShare>) -> Allocation {
        Allocation {
            source_shares: source,
            relay_shares: Some(relay),
        }
    }

    pub fn zeros(n: usize, relayed: bool) -> Allocation {
        Allocation {
            source_shares: vec![PhaseShare::ZERO; n],
            relay_shares: relayed.then(|| vec![PhaseShare::ZERO; n]),
        }
    }

    pub fn len(&self) -> usize {
        self.source_shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_shares.is_empty()
    }
}

/// One topology invariant violation, as found by [`validate_topology`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

/// Report-style validation result; empty iff the topology is well formed.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }
}

/// Checks every structural invariant of a topology and, when given, its
/// channel gains. Returns all violations rather than stopping at the first.
pub fn validate_topology(topology: &NetworkTopology, gains: Option<&ChannelGains>) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !(topology.total_bandwidth > 0.0) {
        report.push("total_bandwidth", "must be > 0");
    }
    if !(topology.noise_psd > 0.0) {
        report.push("noise_psd", "must be > 0");
    }
    for s in &topology.sources {
        if !(s.power_budget > 0.0) {
            report.push(format!("sources[{}].power_budget", s.id), "must be > 0");
        }
    }
    for r in &topology.relays {
        if !(r.power_budget > 0.0) {
            report.push(format!("relays[{}].power_budget", r.id), "must be > 0");
        }
    }

    let any_relay = topology.users.iter().any(|u| u.relay_id.is_some());
    for u in &topology.users {
        if !(u.c_min > 0.0) {
            report.push(format!("users[{}].c_min", u.id), "must be > 0");
        }
        if topology.source(u.source_id).is_none() {
            report.push(
                format!("users[{}].source_id", u.id),
                format!("references unknown source {}", u.source_id),
            );
        }
        match u.relay_id {
            Some(rid) => {
                if topology.relay(rid).is_none() {
                    report.push(
                        format!("users[{}].relay_id", u.id),
                        format!("references unknown relay {rid}"),
                    );
                }
            }
            None => {
                if any_relay {
                    report.push(
                        format!("users[{}].relay_id", u.id),
                        "missing in a relay-mode topology",
                    );
                }
            }
        }
    }

    if let Some(g) = gains {
        if g.len() != topology.users.len() {
            report.push(
                "gains",
                format!("{} entries for {} users", g.len(), topology.users.len()),
            );
        }
        if g.is_relayed() != any_relay && !topology.users.is_empty() {
            report.push("gains", "gain mode does not match topology relay mode");
        }
        for (i, h) in g.all_gains().iter().enumerate() {
            if !(h.is_finite() && *h > 0.0) {
                report.push(format!("gains[{i}]"), "must be strictly positive and finite");
            }
        }
    }

    report
}

/// Slack of one resource cap. Positive slack means unused budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSlack {
    pub name: String,
    pub limit: f64,
    pub used: f64,
    pub slack: f64,
}

/// Per-constraint slack report produced by [`check_feasibility`].
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    pub entries: Vec<ConstraintSlack>,
    pub tol: f64,
}

impl ConstraintReport {
    pub fn satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.slack >= -self.tol)
    }

    pub fn worst(&self) -> Option<&ConstraintSlack> {
        self.entries
            .iter()
            .min_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap())
    }
}

/// Evaluates every source/relay power cap and phase bandwidth cap against
/// an allocation, reporting per-constraint slack.
pub fn check_feasibility(
    topology: &NetworkTopology,
    allocation: &Allocation,
    tol: f64,
) -> Result<ConstraintReport> {
    if allocation.len() != topology.users.len() {
        return Err(Error::DimensionMismatch {
            expected: topology.users.len(),
            got: allocation.len(),
        });
    }
    let mut entries = Vec::new();

    for s in &topology.sources {
        let used: f64 = topology
            .users_of_source(s.id)
            .iter()
            .map(|&i| allocation.source_shares[i].power())
            .sum();
        entries.push(ConstraintSlack {
            name: format!("source {} power", s.id),
            limit: s.power_budget,
            used,
            slack: s.power_budget - used,
        });
    }
    let w_used: f64 = allocation.source_shares.iter().map(|s| s.bandwidth()).sum();
    entries.push(ConstraintSlack {
        name: "phase-1 bandwidth".into(),
        limit: topology.total_bandwidth,
        used: w_used,
        slack: topology.total_bandwidth - w_used,
    });

    if let Some(relay_shares) = &allocation.relay_shares {
        for r in &topology.relays {
            let used: f64 = topology
                .users_of_relay(r.id)
                .iter()
                .map(|&i| relay_shares[i].power())
                .sum();
            entries.push(ConstraintSlack {
                name: format!("relay {} power", r.id),
                limit: r.power_budget,
                used,
                slack: r.power_budget - used,
            });
        }
        let w_used: f64 = relay_shares.iter().map(|s| s.bandwidth()).sum();
        entries.push(ConstraintSlack {
            name: "phase-2 bandwidth".into(),
            limit: topology.total_bandwidth,
            used: w_used,
            slack: topology.total_bandwidth - w_used,
        });
    }

    Ok(ConstraintReport { entries, tol })
}
