//! The minimum-total-bandwidth oracle G(I): the least spectrum that gives
//! every user in a set its threshold capacity subject to per-source power
//! budgets. Decomposes per source; each single-source problem is solved by
//! a scalar dual bisection on the shared power price.

use crate::capacity::min_bandwidth_raw;
use crate::model::{ChannelGains, NetworkTopology};
use crate::{Error, Result};

/// Relative tolerance on budget exhaustion in the outer dual bisection.
const BUDGET_REL_TOL: f64 = 1e-9;
/// Per-user inner root tolerance; tighter than the outer loop so the power
/// sum seen by the bisection is stable.
const INNER_REL_TOL: f64 = 1e-11;

/// Result of a G(I) evaluation.
#[derive(Debug, Clone)]
pub struct BandwidthDemand {
    /// Per-user (p*, w*), aligned with the instance's user order. Users
    /// outside the queried subset hold (0, 0).
    pub per_user: Vec<(f64, f64)>,
    /// G value: the summed optimal bandwidth. `f64::INFINITY` when the
    /// instance is infeasible.
    pub total: f64,
    /// Optimal dual multiplier per source group, in group order.
    pub duals: Vec<f64>,
    pub feasible: bool,
}

impl BandwidthDemand {
    fn infeasible(n: usize, n_groups: usize) -> BandwidthDemand {
        BandwidthDemand {
            per_user: vec![(0.0, 0.0); n],
            total: f64::INFINITY,
            duals: vec![0.0; n_groups],
            feasible: false,
        }
    }
}

/// One user as seen by the oracle: a noise-normalized gain and a capacity
/// threshold.
#[derive(Debug, Clone, Copy)]
pub struct OracleUser {
    /// Global user index in the originating instance.
    pub index: usize,
    /// Channel gain divided by the noise PSD.
    pub gain: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct SourceGroup {
    pub source_id: usize,
    pub budget: f64,
    pub users: Vec<OracleUser>,
}

/// A full multi-source instance of the bandwidth-minimization problem.
/// For relayed networks one `GProblem` describes a single transmission
/// phase (sources with first-hop gains, or relays with second-hop gains).
#[derive(Debug, Clone)]
pub struct GProblem {
    pub groups: Vec<SourceGroup>,
    pub n_users: usize,
}

impl GProblem {
    /// Phase-1 view: sources with first-hop gains (h_sd or h_sr).
    pub fn phase1(
        topology: &NetworkTopology,
        gains: &ChannelGains,
        thresholds: &[f64],
    ) -> Result<GProblem> {
        check_dims(topology, gains, thresholds)?;
        let groups = topology
            .sources
            .iter()
            .map(|s| SourceGroup {
                source_id: s.id,
                budget: s.power_budget,
                users: topology
                    .users_of_source(s.id)
                    .into_iter()
                    .map(|i| OracleUser {
                        index: i,
                        gain: gains.first_hop(i) / topology.noise_psd,
                        threshold: thresholds[i],
                    })
                    .collect(),
            })
            .collect();
        Ok(GProblem {
            groups,
            n_users: topology.n_users(),
        })
    }

    /// Phase-2 view: relays acting as sources with second-hop gains.
    pub fn phase2(
        topology: &NetworkTopology,
        gains: &ChannelGains,
        thresholds: &[f64],
    ) -> Result<GProblem> {
        check_dims(topology, gains, thresholds)?;
        if !gains.is_relayed() {
            return Err(Error::InvalidInput(
                "phase-2 problem requires relayed gains".into(),
            ));
        }
        let groups = topology
            .relays
            .iter()
            .map(|r| SourceGroup {
                source_id: r.id,
                budget: r.power_budget,
                users: topology
                    .users_of_relay(r.id)
                    .into_iter()
                    .map(|i| OracleUser {
                        index: i,
                        gain: gains.second_hop(i).unwrap() / topology.noise_psd,
                        threshold: thresholds[i],
                    })
                    .collect(),
            })
            .collect();
        Ok(GProblem {
            groups,
            n_users: topology.n_users(),
        })
    }

    /// Evaluates G on a subset of global user indices. The empty set costs
    /// zero bandwidth; an infeasible subset returns the +inf sentinel.
    pub fn demand(&self, subset: &[usize]) -> BandwidthDemand {
        let member = membership(subset, self.n_users);
        let mut per_user = vec![(0.0, 0.0); self.n_users];
        let mut duals = Vec::with_capacity(self.groups.len());
        let mut total = 0.0;
        let mut feasible = true;
        for group in &self.groups {
            let active: Vec<&OracleUser> = group
                .users
                .iter()
                .filter(|u| member[u.index])
                .collect();
            let pairs: Vec<(f64, f64)> = active.iter().map(|u| (u.gain, u.threshold)).collect();
            let sub = min_bandwidth_one_source(&pairs, group.budget);
            if !sub.feasible {
                feasible = false;
            }
            total += sub.total;
            duals.push(sub.duals[0]);
            if sub.feasible {
                for (u, &(p, w)) in active.iter().zip(&sub.per_user) {
                    per_user[u.index] = (p, w);
                }
            }
        }
        if !feasible {
            let mut d = BandwidthDemand::infeasible(self.n_users, self.groups.len());
            d.duals = duals;
            return d;
        }
        BandwidthDemand {
            per_user,
            total,
            duals,
            feasible: true,
        }
    }

    /// Evaluates G on all users with the stored thresholds replaced; used
    /// by the max-min bisection, which sweeps a uniform target.
    pub fn demand_all(&self, thresholds: &[f64]) -> BandwidthDemand {
        let mut per_user = vec![(0.0, 0.0); self.n_users];
        let mut duals = Vec::with_capacity(self.groups.len());
        let mut total = 0.0;
        let mut feasible = true;
        for group in &self.groups {
            let pairs: Vec<(f64, f64)> = group
                .users
                .iter()
                .map(|u| (u.gain, thresholds[u.index]))
                .collect();
            let sub = min_bandwidth_one_source(&pairs, group.budget);
            if !sub.feasible {
                feasible = false;
            }
            total += sub.total;
            duals.push(sub.duals[0]);
            if sub.feasible {
                for (u, &(p, w)) in group.users.iter().zip(&sub.per_user) {
                    per_user[u.index] = (p, w);
                }
            }
        }
        if !feasible {
            let mut d = BandwidthDemand::infeasible(self.n_users, self.groups.len());
            d.duals = duals;
            return d;
        }
        BandwidthDemand {
            per_user,
            total,
            duals,
            feasible: true,
        }
    }

    pub fn all_users(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .groups
            .iter()
            .flat_map(|g| g.users.iter().map(|u| u.index))
            .collect();
        v.sort_unstable();
        v
    }
}

fn check_dims(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    thresholds: &[f64],
) -> Result<()> {
    if gains.len() != topology.n_users() || thresholds.len() != topology.n_users() {
        return Err(Error::DimensionMismatch {
            expected: topology.n_users(),
            got: gains.len().min(thresholds.len()),
        });
    }
    Ok(())
}

fn membership(subset: &[usize], n: usize) -> Vec<bool> {
    let mut member = vec![false; n];
    for &i in subset {
        member[i] = true;
    }
    member
}

/// G for a single source: minimize the total bandwidth of `users` (pairs of
/// normalized gain and threshold) subject to a shared power budget.
///
/// Since each F_i is strictly decreasing, the optimum spends the whole
/// budget; the stationarity condition couples all users through one scalar
/// multiplier, which is found by bisection. Infeasible when the per-user
/// power floors already exhaust the budget (sum of c_i/h_i >= budget).
pub fn min_bandwidth_one_source(users: &[(f64, f64)], power_budget: f64) -> BandwidthDemand {
    assert!(
        power_budget > 0.0 && users.iter().all(|&(h, c)| h > 0.0 && c > 0.0),
        "invalid oracle inputs"
    );
    let n = users.len();
    if n == 0 {
        return BandwidthDemand {
            per_user: Vec::new(),
            total: 0.0,
            duals: vec![0.0],
            feasible: true,
        };
    }
    let floors: f64 = users.iter().map(|&(h, c)| c / h).sum();
    if floors >= power_budget {
        return BandwidthDemand::infeasible(n, 1);
    }
    if n == 1 {
        let (h, c) = users[0];
        let w = min_bandwidth_raw(h * power_budget, c);
        let t = c / w;
        let dual = (t.exp() * (t - 1.0) + 1.0) / h;
        return BandwidthDemand {
            per_user: vec![(power_budget, w)],
            total: w,
            duals: vec![dual],
            feasible: true,
        };
    }

    let power_sum = |mu: f64| -> f64 {
        users
            .iter()
            .map(|&(h, c)| user_power_at_price(h, c, mu))
            .sum()
    };

    // Bracket the dual price: power spend grows monotonically with it and
    // tends to the floor sum as the price vanishes.
    let mut lo = 1.0;
    let mut hi = 1.0;
    while power_sum(lo) > power_budget {
        lo *= 0.5;
        if lo < 1e-300 {
            break;
        }
    }
    while power_sum(hi) < power_budget {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    let mut mu = 0.5 * (lo + hi);
    for _ in 0..200 {
        mu = 0.5 * (lo + hi);
        let s = power_sum(mu);
        if (s - power_budget).abs() <= BUDGET_REL_TOL * power_budget {
            break;
        }
        if s < power_budget {
            lo = mu;
        } else {
            hi = mu;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }

    let mut powers: Vec<f64> = users
        .iter()
        .map(|&(h, c)| user_power_at_price(h, c, mu))
        .collect();
    // Exact budget exhaustion, then consistent bandwidths from F.
    let scale = power_budget / powers.iter().sum::<f64>();
    let mut per_user = Vec::with_capacity(n);
    let mut total = 0.0;
    for (p, &(h, c)) in powers.iter_mut().zip(users) {
        *p *= scale;
        let w = min_bandwidth_raw(h * *p, c);
        total += w;
        per_user.push((*p, w));
    }
    BandwidthDemand {
        per_user,
        total,
        duals: vec![mu],
        feasible: true,
    }
}

/// Optimal power of one user at dual price mu > 0: solve the stationarity
/// condition (e^t (t - 1) + 1) / h = mu for t = c / w, then map through the
/// inverse bandwidth formula. The left side grows monotonically in t from 0,
/// so the root is unique.
fn user_power_at_price(h: f64, c: f64, mu: f64) -> f64 {
    let target = mu * h;
    let g = |t: f64| t.exp() * (t - 1.0) + 1.0;
    let mut hi = 1.0;
    while g(hi) < target {
        hi *= 2.0;
        if hi > 700.0 {
            // e^t overflows beyond ~709; power is astronomically large there.
            hi = 700.0;
            break;
        }
    }
    let mut lo = hi * 0.5;
    while g(lo) > target {
        lo *= 0.5;
        if lo < 1e-300 {
            break;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        t = 0.5 * (lo + hi);
        if g(t) < target {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= INNER_REL_TOL * hi {
            break;
        }
    }
    // p = F^{-1}(c / t) = (e^t - 1) (c / t) / h.
    (t.exp() - 1.0) * (c / t) / h
}

/// G over an arbitrary subset of a no-relay instance; sums the decoupled
/// per-source solutions.
pub fn min_total_bandwidth(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    thresholds: &[f64],
    subset: &[usize],
) -> Result<BandwidthDemand> {
    let problem = GProblem::phase1(topology, gains, thresholds)?;
    if subset.iter().any(|&i| i >= topology.n_users()) {
        return Err(Error::InvalidInput("subset index out of range".into()));
    }
    Ok(problem.demand(subset))
}
