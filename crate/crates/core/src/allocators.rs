//! The three allocation objectives for networks with and without relaying,
//! plus the equal-bandwidth baseline schemes.
//!
//! Sum capacity without relaying has a closed form (all source power to the
//! best user, bandwidth split proportionally to gain times power). The relay
//! variant goes through the barrier solver on its epigraph form. Worst-user
//! maximization bisects the common threshold against the bandwidth oracle;
//! power minimization runs the barrier solver with capacity floors.

use nalgebra::DVector;

use crate::bandwidth_min::{BandwidthDemand, GProblem};
use crate::capacity::{cap_raw, inv_min_bandwidth};
use crate::model::{Allocation, ChannelGains, NetworkTopology, PhaseShare};
use crate::solver_core::{
    self, CapacityGapFn, CapacityTarget, ConvexProgram, FixedBandwidthCapacityGapFn, LinearFn,
    SmoothFn, SolverConfig, SolverStatus,
};
use crate::{Error, Result};

/// Allocation objective selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    SumCapacity,
    MaxMin,
    PowerMin,
}

/// Allocation scheme selector: the optimal joint allocation or one of the
/// equal-bandwidth baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Obpa,
    Ebopa,
    Ebpa,
}

/// Relative solver slack used in bisection termination.
const BISECT_REL_TOL: f64 = 1e-8;
/// Pairs below this fraction of the relevant budget are rounded to exact
/// zeros after a barrier solve.
const SPARSIFY_FRACTION: f64 = 1e-7;

/// Per-user achieved capacities (min of the two hops when relayed).
pub fn user_capacities(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    allocation: &Allocation,
) -> Result<Vec<f64>> {
    if allocation.len() != topology.n_users() || gains.len() != topology.n_users() {
        return Err(Error::DimensionMismatch {
            expected: topology.n_users(),
            got: allocation.len().min(gains.len()),
        });
    }
    let n0 = topology.noise_psd;
    let mut caps = Vec::with_capacity(topology.n_users());
    for i in 0..topology.n_users() {
        let s = &allocation.source_shares[i];
        let first = cap_raw(s.power(), s.bandwidth(), gains.first_hop(i) / n0);
        let c = match (&allocation.relay_shares, gains.second_hop(i)) {
            (Some(relay), Some(h_rd)) => {
                let r = &relay[i];
                first.min(cap_raw(r.power(), r.bandwidth(), h_rd / n0))
            }
            _ => first,
        };
        caps.push(c);
    }
    Ok(caps)
}

/// Single entry point dispatching on scheme, objective, and relaying.
/// Thresholds are needed only for power minimization.
pub fn solve(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    thresholds: Option<&[f64]>,
    scheme: Scheme,
    objective: Objective,
) -> Result<(Allocation, f64)> {
    let relayed = gains.is_relayed();
    let need_thresholds = || {
        thresholds.ok_or_else(|| {
            Error::InvalidInput("power minimization needs per-user thresholds".into())
        })
    };
    match scheme {
        Scheme::Obpa => match objective {
            Objective::SumCapacity => {
                if relayed {
                    sum_capacity_relay(topology, gains)
                } else {
                    sum_capacity_no_relay(topology, gains)
                }
            }
            Objective::MaxMin => {
                if relayed {
                    max_min_relay(topology, gains)
                } else {
                    max_min_no_relay(topology, gains)
                }
            }
            Objective::PowerMin => {
                let c = need_thresholds()?;
                if relayed {
                    power_min_relay(topology, gains, c)
                } else {
                    power_min_no_relay(topology, gains, c)
                }
            }
        },
        Scheme::Ebopa => {
            let c = if objective == Objective::PowerMin {
                Some(need_thresholds()?)
            } else {
                None
            };
            ebopa(topology, gains, objective, c)
        }
        Scheme::Ebpa => {
            let allocation = ebpa(topology, gains)?;
            let caps = user_capacities(topology, gains, &allocation)?;
            let value = match objective {
                Objective::SumCapacity => caps.iter().sum(),
                Objective::MaxMin => caps.iter().copied().fold(f64::INFINITY, f64::min),
                Objective::PowerMin => {
                    allocation.source_shares.iter().map(|s| s.power()).sum::<f64>()
                        + allocation
                            .relay_shares
                            .as_ref()
                            .map(|r| r.iter().map(|s| s.power()).sum::<f64>())
                            .unwrap_or(0.0)
                }
            };
            Ok((allocation, value))
        }
    }
}

// ---------------------------------------------------------------------------
// Sum capacity
// ---------------------------------------------------------------------------

/// Closed-form sum-capacity optimum without relaying: each source gives its
/// whole budget to its highest-gain user (lowest id on ties) and the
/// spectrum is split across the winners proportionally to gain * power.
pub fn sum_capacity_no_relay(
    topology: &NetworkTopology,
    gains: &ChannelGains,
) -> Result<(Allocation, f64)> {
    let direct = gains
        .direct()
        .ok_or_else(|| Error::InvalidInput("expected direct gains".into()))?;
    let n = topology.n_users();
    if direct.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: direct.len(),
        });
    }

    let mut winners: Vec<(usize, f64)> = Vec::new(); // (user index, power)
    for s in &topology.sources {
        let members = topology.users_of_source(s.id);
        if members.is_empty() {
            continue;
        }
        let best = members
            .into_iter()
            .max_by(|&a, &b| {
                direct[a]
                    .partial_cmp(&direct[b])
                    .unwrap()
                    .then(topology.users[b].id.cmp(&topology.users[a].id))
            })
            .unwrap();
        winners.push((best, s.power_budget));
    }

    let weight_sum: f64 = winners.iter().map(|&(i, p)| direct[i] * p).sum();
    let mut shares = vec![PhaseShare::ZERO; n];
    let mut total = 0.0;
    for &(i, p) in &winners {
        let w = topology.total_bandwidth * direct[i] * p / weight_sum;
        shares[i] = PhaseShare::new(p, w);
        total += cap_raw(p, w, direct[i] / topology.noise_psd);
    }
    Ok((Allocation::direct(shares), total))
}

/// Sum-capacity optimum with decode-and-forward relaying, via the epigraph
/// program. Users dominated on both hops by a peer sharing their source and
/// relay are pre-assigned zeros and removed from the program.
pub fn sum_capacity_relay(
    topology: &NetworkTopology,
    gains: &ChannelGains,
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    let served = prune_dominated(topology, gains);
    let program = relay_sum_program(topology, gains, &served, None)?;
    let result = solver_core::solve(&program, &SolverConfig::default())?;
    if result.status == SolverStatus::NumericalFailure {
        return Err(Error::NumericalFailure(
            "relay sum-capacity solve failed".into(),
        ));
    }

    let k = served.len();
    let mut source = vec![PhaseShare::ZERO; n];
    let mut relay = vec![PhaseShare::ZERO; n];
    let mut raw: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(k);
    for j in 0..k {
        raw.push((
            result.x[j],
            result.x[k + j],
            result.x[2 * k + j],
            result.x[3 * k + j],
        ));
    }
    sparsify_relay(topology, &served, &mut raw);
    for (j, &(p_s, w_s, p_r, w_r)) in raw.iter().enumerate() {
        source[served[j]] = PhaseShare::new(p_s, w_s);
        relay[served[j]] = PhaseShare::new(p_r, w_r);
    }
    let allocation = Allocation::relayed(source, relay);
    let total = user_capacities(topology, gains, &allocation)?.iter().sum();
    Ok((allocation, total))
}

/// Dominance pruning: a user weakly beaten on both hops, strictly on at
/// least one (exact ties keep the lower id), never carries sum-capacity
/// traffic within its (source, relay) pair and can be dropped up front.
fn prune_dominated(topology: &NetworkTopology, gains: &ChannelGains) -> Vec<usize> {
    let n = topology.n_users();
    let mut served: Vec<usize> = (0..n).collect();
    served.retain(|&j| {
        let uj = &topology.users[j];
        let (hj1, hj2) = (gains.first_hop(j), gains.second_hop(j).unwrap_or(0.0));
        !(0..n).any(|i| {
            if i == j {
                return false;
            }
            let ui = &topology.users[i];
            if ui.source_id != uj.source_id || ui.relay_id != uj.relay_id {
                return false;
            }
            let (hi1, hi2) = (gains.first_hop(i), gains.second_hop(i).unwrap_or(0.0));
            if hi1 >= hj1 && hi2 >= hj2 && (hi1 > hj1 || hi2 > hj2) {
                return true;
            }
            // exact tie on both hops: the higher id is pruned
            hi1 == hj1 && hi2 == hj2 && ui.id < uj.id
        })
    });
    served
}

/// Builds the relay epigraph program over the served users. With
/// `fixed_bandwidth` set, the bandwidth variables disappear and the layout
/// shrinks to [p_s, p_r, T] (the equal-bandwidth baseline).
fn relay_sum_program(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    served: &[usize],
    fixed_bandwidth: Option<f64>,
) -> Result<ConvexProgram> {
    let k = served.len();
    let n0 = topology.noise_psd;
    let w_total = topology.total_bandwidth;
    let fixed = fixed_bandwidth.is_some();
    // variable layout: [p_s, w_s, p_r, w_r, T] or [p_s, p_r, T] when fixed
    let (pr_off, t_off, n_vars) = if fixed { (k, 2 * k, 3 * k) } else { (2 * k, 4 * k, 5 * k) };

    let mut inequalities: Vec<Box<dyn SmoothFn>> = Vec::new();
    let mut start = DVector::zeros(n_vars);

    for s in &topology.sources {
        let local: Vec<usize> = (0..k)
            .filter(|&j| topology.users[served[j]].source_id == s.id)
            .collect();
        if local.is_empty() {
            continue;
        }
        inequalities.push(Box::new(LinearFn::sum_le(n_vars, &local, s.power_budget)));
        for &j in &local {
            start[j] = s.power_budget / (local.len() as f64 + 1.0);
        }
    }
    for r in &topology.relays {
        let local: Vec<usize> = (0..k)
            .filter(|&j| topology.users[served[j]].relay_id == Some(r.id))
            .map(|j| pr_off + j)
            .collect();
        if local.is_empty() {
            continue;
        }
        inequalities.push(Box::new(LinearFn::sum_le(n_vars, &local, r.power_budget)));
        for &idx in &local {
            start[idx] = r.power_budget / (local.len() as f64 + 1.0);
        }
    }
    if !fixed {
        let ws: Vec<usize> = (k..2 * k).collect();
        let wr: Vec<usize> = (3 * k..4 * k).collect();
        inequalities.push(Box::new(LinearFn::sum_le(n_vars, &ws, w_total)));
        inequalities.push(Box::new(LinearFn::sum_le(n_vars, &wr, w_total)));
        for j in 0..k {
            start[k + j] = w_total / (k as f64 + 1.0);
            start[3 * k + j] = w_total / (k as f64 + 1.0);
        }
    }
    // nonnegativity of all power (and bandwidth) variables
    for idx in 0..t_off {
        inequalities.push(Box::new(LinearFn::nonneg(n_vars, idx)));
    }

    for j in 0..k {
        let i = served[j];
        let w_s = fixed_bandwidth.unwrap_or(0.0);
        if fixed {
            inequalities.push(Box::new(FixedBandwidthCapacityGapFn {
                target: CapacityTarget::Var(t_off + j),
                p_idx: j,
                bandwidth: w_s,
                gain: gains.first_hop(i),
                noise_psd: n0,
            }));
            inequalities.push(Box::new(FixedBandwidthCapacityGapFn {
                target: CapacityTarget::Var(t_off + j),
                p_idx: pr_off + j,
                bandwidth: w_s,
                gain: gains.second_hop(i).unwrap(),
                noise_psd: n0,
            }));
        } else {
            inequalities.push(Box::new(CapacityGapFn {
                target: CapacityTarget::Var(t_off + j),
                p_idx: j,
                w_idx: k + j,
                gain: gains.first_hop(i),
                noise_psd: n0,
            }));
            inequalities.push(Box::new(CapacityGapFn {
                target: CapacityTarget::Var(t_off + j),
                p_idx: pr_off + j,
                w_idx: 3 * k + j,
                gain: gains.second_hop(i).unwrap(),
                noise_psd: n0,
            }));
        }
    }

    for j in 0..k {
        let i = served[j];
        let (w1, w2) = if fixed {
            (fixed_bandwidth.unwrap(), fixed_bandwidth.unwrap())
        } else {
            (start[k + j], start[3 * k + j])
        };
        let c1 = cap_raw(start[j], w1, gains.first_hop(i) / n0);
        let c2 = cap_raw(start[pr_off + j], w2, gains.second_hop(i).unwrap() / n0);
        start[t_off + j] = 0.5 * c1.min(c2);
    }

    let objective = {
        let mut a = DVector::zeros(n_vars);
        for j in 0..k {
            a[t_off + j] = -1.0;
        }
        Box::new(LinearFn { a, b: 0.0 })
    };

    Ok(ConvexProgram {
        n: n_vars,
        objective,
        inequalities,
        equalities: None,
        start,
    })
}

/// Rounds near-zero pairs to exact zeros and gives their bandwidth back to
/// the remaining users, proportionally, per phase.
fn sparsify_relay(
    topology: &NetworkTopology,
    served: &[usize],
    raw: &mut [(f64, f64, f64, f64)],
) {
    let w_total = topology.total_bandwidth;
    let mut dead = vec![false; raw.len()];
    for (j, entry) in raw.iter().enumerate() {
        let i = served[j];
        let p_s_budget = topology
            .source(topology.users[i].source_id)
            .map(|s| s.power_budget)
            .unwrap_or(1.0);
        let p_r_budget = topology.users[i]
            .relay_id
            .and_then(|rid| topology.relay(rid))
            .map(|r| r.power_budget)
            .unwrap_or(1.0);
        let tiny_first =
            entry.0 < SPARSIFY_FRACTION * p_s_budget && entry.1 < SPARSIFY_FRACTION * w_total;
        let tiny_second =
            entry.2 < SPARSIFY_FRACTION * p_r_budget && entry.3 < SPARSIFY_FRACTION * w_total;
        if tiny_first || tiny_second {
            dead[j] = true;
        }
    }
    if dead.iter().all(|&d| !d) || dead.iter().all(|&d| d) {
        return;
    }
    let sum_ws_before: f64 = raw.iter().map(|e| e.1).sum();
    let sum_wr_before: f64 = raw.iter().map(|e| e.3).sum();
    for (j, entry) in raw.iter_mut().enumerate() {
        if dead[j] {
            *entry = (0.0, 0.0, 0.0, 0.0);
        }
    }
    let sum_ws_after: f64 = raw.iter().map(|e| e.1).sum();
    let sum_wr_after: f64 = raw.iter().map(|e| e.3).sum();
    if sum_ws_after > 0.0 && sum_wr_after > 0.0 {
        let f1 = sum_ws_before / sum_ws_after;
        let f2 = sum_wr_before / sum_wr_after;
        for entry in raw.iter_mut() {
            entry.1 *= f1;
            entry.3 *= f2;
        }
    }
}

// ---------------------------------------------------------------------------
// Worst-user capacity
// ---------------------------------------------------------------------------

/// Max-min allocation without relaying: bisect the common capacity target
/// against the bandwidth oracle, then stretch the spectrum to use the full
/// band.
pub fn max_min_no_relay(
    topology: &NetworkTopology,
    gains: &ChannelGains,
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    if n == 0 {
        return Err(Error::InvalidInput("no users".into()));
    }
    let problem = GProblem::phase1(topology, gains, &vec![1.0; n])?;
    let (demand, _) = max_min_phase(&problem, topology, gains, false)?;
    let shares = scaled_shares(&demand, topology.total_bandwidth, n);
    let allocation = Allocation::direct(shares);
    let caps = user_capacities(topology, gains, &allocation)?;
    let t_star = caps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((allocation, t_star))
}

/// Max-min allocation with relaying. Given the target, the two phases
/// decouple; the overall optimum is the smaller of the per-phase optima.
pub fn max_min_relay(
    topology: &NetworkTopology,
    gains: &ChannelGains,
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    if n == 0 {
        return Err(Error::InvalidInput("no users".into()));
    }
    let dummy = vec![1.0; n];
    let phase1 = GProblem::phase1(topology, gains, &dummy)?;
    let phase2 = GProblem::phase2(topology, gains, &dummy)?;
    let (_, t1) = max_min_phase(&phase1, topology, gains, false)?;
    let (_, t2) = max_min_phase(&phase2, topology, gains, true)?;
    let t_star = t1.min(t2);

    // Re-solve both phases at the binding target and stretch each phase's
    // spectrum to the full band.
    let thresholds = vec![t_star; n];
    let d1 = phase1.demand_all(&thresholds);
    let d2 = phase2.demand_all(&thresholds);
    let source = scaled_shares(&d1, topology.total_bandwidth, n);
    let relay = scaled_shares(&d2, topology.total_bandwidth, n);
    let allocation = Allocation::relayed(source, relay);
    let caps = user_capacities(topology, gains, &allocation)?;
    let achieved = caps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((allocation, achieved))
}

/// Bisects the uniform capacity target of one phase; returns the demand at
/// the highest feasible target and that target.
fn max_min_phase(
    problem: &GProblem,
    topology: &NetworkTopology,
    gains: &ChannelGains,
    second_phase: bool,
) -> Result<(BandwidthDemand, f64)> {
    let n = topology.n_users();
    let w_total = topology.total_bandwidth;
    // Upper bracket: no user can beat its own full-resource capacity.
    let mut t_high = f64::INFINITY;
    for i in 0..n {
        let (h, budget) = if second_phase {
            let rid = topology.users[i].relay_id.expect("relayed topology");
            (
                gains.second_hop(i).unwrap(),
                topology.relay(rid).unwrap().power_budget,
            )
        } else {
            (
                gains.first_hop(i),
                topology
                    .source(topology.users[i].source_id)
                    .unwrap()
                    .power_budget,
            )
        };
        t_high = t_high.min(cap_raw(budget, w_total, h / topology.noise_psd));
    }
    let mut lo = 0.0f64;
    let mut hi = t_high;
    let mut best = problem.demand_all(&vec![lo.max(t_high * 1e-12); n]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let d = problem.demand_all(&vec![mid; n]);
        if d.feasible && d.total <= w_total {
            best = d;
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECT_REL_TOL * t_high {
            break;
        }
    }
    Ok((best, lo))
}

/// Turns a demand into phase shares, scaling bandwidth so the full band is
/// used (capacities can only grow).
fn scaled_shares(demand: &BandwidthDemand, w_total: f64, n: usize) -> Vec<PhaseShare> {
    let factor = if demand.total > 0.0 {
        w_total / demand.total
    } else {
        1.0
    };
    (0..n)
        .map(|i| {
            let (p, w) = demand.per_user[i];
            PhaseShare::new(p, w * factor)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Power minimization
// ---------------------------------------------------------------------------

/// Minimum total source power meeting every user's threshold, without
/// relaying.
pub fn power_min_no_relay(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    thresholds: &[f64],
) -> Result<(Allocation, f64)> {
    let problem = GProblem::phase1(topology, gains, thresholds)?;
    let (shares, total) = power_min_phase(&problem, topology.total_bandwidth, "")?;
    Ok((Allocation::direct(shares), total))
}

/// Minimum total source-plus-relay power with relaying; the two phases are
/// independent once the thresholds are fixed.
pub fn power_min_relay(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    thresholds: &[f64],
) -> Result<(Allocation, f64)> {
    let phase1 = GProblem::phase1(topology, gains, thresholds)?;
    let phase2 = GProblem::phase2(topology, gains, thresholds)?;
    let (source, total1) = power_min_phase(&phase1, topology.total_bandwidth, "phase 1")?;
    let (relay, total2) = power_min_phase(&phase2, topology.total_bandwidth, "phase 2")?;
    Ok((Allocation::relayed(source, relay), total1 + total2))
}

/// One phase of power minimization over noise-normalized gains, via the
/// barrier solver, warm-started from the bandwidth-oracle solution.
fn power_min_phase(
    problem: &GProblem,
    w_total: f64,
    phase_label: &str,
) -> Result<(Vec<PhaseShare>, f64)> {
    let n = problem.n_users;
    let all: Vec<usize> = problem.all_users();
    let demand = problem.demand(&all);
    if !demand.feasible || demand.total > w_total {
        return Err(Error::InfeasibleInstance {
            required: demand.total,
            available: w_total,
            phase: if phase_label.is_empty() {
                String::new()
            } else {
                format!(" ({phase_label})")
            },
        });
    }
    let slack = w_total - demand.total;
    if slack <= 1e-9 * w_total {
        // Boundary case: the oracle solution is the only feasible point
        // worth reporting; no interior exists for the barrier.
        let shares: Vec<PhaseShare> = demand
            .per_user
            .iter()
            .map(|&(p, w)| PhaseShare::new(p, w))
            .collect();
        let total = shares.iter().map(|s| s.power()).sum();
        return Ok((shares, total));
    }

    // Flattened (gain, threshold, group) per active user.
    let mut meta: Vec<(usize, f64, f64)> = Vec::new(); // (user idx, gain, c)
    for g in &problem.groups {
        for u in &g.users {
            meta.push((u.index, u.gain, u.threshold));
        }
    }
    meta.sort_by_key(|&(i, _, _)| i);
    let k = meta.len();
    let pos: std::collections::HashMap<usize, usize> =
        meta.iter().enumerate().map(|(j, &(i, _, _))| (i, j)).collect();

    // variable layout: [p_0..p_k, w_0..w_k]
    let n_vars = 2 * k;
    let mut inequalities: Vec<Box<dyn SmoothFn>> = Vec::new();
    for g in &problem.groups {
        if g.users.is_empty() {
            continue;
        }
        let idxs: Vec<usize> = g.users.iter().map(|u| pos[&u.index]).collect();
        inequalities.push(Box::new(LinearFn::sum_le(n_vars, &idxs, g.budget)));
    }
    let w_idxs: Vec<usize> = (k..2 * k).collect();
    inequalities.push(Box::new(LinearFn::sum_le(n_vars, &w_idxs, w_total)));
    for j in 0..k {
        let (_, gain, c) = meta[j];
        inequalities.push(Box::new(CapacityGapFn {
            target: CapacityTarget::Const(c),
            p_idx: j,
            w_idx: k + j,
            gain,
            noise_psd: 1.0,
        }));
    }
    for idx in 0..n_vars {
        inequalities.push(Box::new(LinearFn::nonneg(n_vars, idx)));
    }

    // Strictly feasible start: inflate the oracle bandwidths into half the
    // spare spectrum, then back the powers off just enough to keep every
    // capacity strictly above threshold.
    let inflate = 1.0 + 0.5 * slack / demand.total;
    let mut start = DVector::zeros(n_vars);
    for j in 0..k {
        let (i, _, _) = meta[j];
        start[j] = demand.per_user[i].0;
        start[k + j] = demand.per_user[i].1 * inflate;
    }
    let mut shrink = 1e-2;
    loop {
        let ok = (0..k).all(|j| {
            let (_, gain, c) = meta[j];
            cap_raw(start[j] * (1.0 - shrink), start[k + j], gain) > c
        });
        if ok {
            for j in 0..k {
                start[j] *= 1.0 - shrink;
            }
            break;
        }
        shrink *= 0.1;
        if shrink < 1e-14 {
            break;
        }
    }

    let objective = {
        let mut a = DVector::zeros(n_vars);
        for j in 0..k {
            a[j] = 1.0;
        }
        Box::new(LinearFn { a, b: 0.0 })
    };
    let program = ConvexProgram {
        n: n_vars,
        objective,
        inequalities,
        equalities: None,
        start,
    };
    let result = solver_core::solve(&program, &SolverConfig::default())?;
    if result.status == SolverStatus::NumericalFailure {
        return Err(Error::NumericalFailure("power minimization failed".into()));
    }

    // Capacity constraints are active at the optimum; tighten them exactly
    // by dropping each power to the inverse-bandwidth formula.
    let mut shares = vec![PhaseShare::ZERO; n];
    let mut total = 0.0;
    for j in 0..k {
        let (i, gain, c) = meta[j];
        let w = result.x[k + j];
        let p = inv_min_bandwidth(w, gain, c)?;
        total += p;
        shares[i] = PhaseShare::new(p, w);
    }
    Ok((shares, total))
}

// ---------------------------------------------------------------------------
// Equal-bandwidth baselines
// ---------------------------------------------------------------------------

/// Equal bandwidth with optimal power: every user gets W/N per phase and
/// only the powers are optimized for the requested objective. Thresholds
/// are required for the power-minimization objective.
pub fn ebopa(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    objective: Objective,
    thresholds: Option<&[f64]>,
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    if n == 0 {
        return Err(Error::InvalidInput("no users".into()));
    }
    let w = topology.total_bandwidth / n as f64;
    match objective {
        Objective::SumCapacity => {
            if gains.is_relayed() {
                ebopa_sum_relay(topology, gains, w)
            } else {
                ebopa_sum_direct(topology, gains, w)
            }
        }
        Objective::MaxMin => ebopa_max_min(topology, gains, w),
        Objective::PowerMin => {
            let thresholds = thresholds.ok_or_else(|| {
                Error::InvalidInput("power minimization needs thresholds".into())
            })?;
            ebopa_power_min(topology, gains, w, thresholds)
        }
    }
}

/// Water-filling over one source's users at a common fixed bandwidth.
/// Active-set elimination on the water level: p_i = (w/nu - w n0 / h_i)+.
fn water_fill(gains: &[f64], w: f64, n0: f64, budget: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).unwrap());
    for active in (1..=order.len()).rev() {
        let set = &order[..active];
        let inv_sum: f64 = set.iter().map(|&i| 1.0 / gains[i]).sum();
        let level = (budget + w * n0 * inv_sum) / active as f64; // = w / nu
        let worst = set[active - 1];
        if level - w * n0 / gains[worst] >= 0.0 {
            let mut powers = vec![0.0; gains.len()];
            for &i in set {
                powers[i] = level - w * n0 / gains[i];
            }
            return powers;
        }
    }
    vec![0.0; gains.len()]
}

fn ebopa_sum_direct(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    w: f64,
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    let n0 = topology.noise_psd;
    let mut shares = vec![PhaseShare::ZERO; n];
    for s in &topology.sources {
        let members = topology.users_of_source(s.id);
        if members.is_empty() {
            continue;
        }
        let hs: Vec<f64> = members.iter().map(|&i| gains.first_hop(i)).collect();
        let powers = water_fill(&hs, w, n0, s.power_budget);
        for (&i, &p) in members.iter().zip(&powers) {
            shares[i] = PhaseShare::new(p, w);
        }
    }
    let allocation = Allocation::direct(shares);
    let total = user_capacities(topology, gains, &allocation)?.iter().sum();
    Ok((allocation, total))
}

fn ebopa_sum_relay(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    w: f64,
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    let served: Vec<usize> = (0..n).collect();
    let program = relay_sum_program(topology, gains, &served, Some(w))?;
    let result = solver_core::solve(&program, &SolverConfig::default())?;
    if result.status == SolverStatus::NumericalFailure {
        return Err(Error::NumericalFailure("relay EBOPA solve failed".into()));
    }
    let mut source = Vec::with_capacity(n);
    let mut relay = Vec::with_capacity(n);
    for j in 0..n {
        source.push(PhaseShare::new(result.x[j], w));
        relay.push(PhaseShare::new(result.x[n + j], w));
    }
    let allocation = Allocation::relayed(source, relay);
    let total = user_capacities(topology, gains, &allocation)?.iter().sum();
    Ok((allocation, total))
}

fn ebopa_max_min(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    w: f64,
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    let n0 = topology.noise_psd;
    // Per source (and relay), the highest common target at fixed bandwidth
    // has a closed form; the network target is the worst of them.
    let mut t_star = f64::INFINITY;
    for s in &topology.sources {
        let members = topology.users_of_source(s.id);
        if members.is_empty() {
            continue;
        }
        let inv_sum: f64 = members.iter().map(|&i| 1.0 / gains.first_hop(i)).sum();
        t_star = t_star.min(w * (1.0 + s.power_budget / (w * n0 * inv_sum)).ln());
    }
    if gains.is_relayed() {
        for r in &topology.relays {
            let members = topology.users_of_relay(r.id);
            if members.is_empty() {
                continue;
            }
            let inv_sum: f64 = members
                .iter()
                .map(|&i| 1.0 / gains.second_hop(i).unwrap())
                .sum();
            t_star = t_star.min(w * (1.0 + r.power_budget / (w * n0 * inv_sum)).ln());
        }
    }
    let factor = (t_star / w).exp() - 1.0;
    let source: Vec<PhaseShare> = (0..n)
        .map(|i| PhaseShare::new(w * n0 * factor / gains.first_hop(i), w))
        .collect();
    let relay = gains.is_relayed().then(|| {
        (0..n)
            .map(|i| PhaseShare::new(w * n0 * factor / gains.second_hop(i).unwrap(), w))
            .collect()
    });
    let allocation = Allocation {
        source_shares: source,
        relay_shares: relay,
    };
    let caps = user_capacities(topology, gains, &allocation)?;
    let achieved = caps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((allocation, achieved))
}

fn ebopa_power_min(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    w: f64,
    thresholds: &[f64],
) -> Result<(Allocation, f64)> {
    let n = topology.n_users();
    if thresholds.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: thresholds.len(),
        });
    }
    let n0 = topology.noise_psd;
    let mut source = Vec::with_capacity(n);
    for i in 0..n {
        let p = inv_min_bandwidth(w, gains.first_hop(i) / n0, thresholds[i])?;
        source.push(PhaseShare::new(p, w));
    }
    for s in &topology.sources {
        let used: f64 = topology
            .users_of_source(s.id)
            .iter()
            .map(|&i| source[i].power())
            .sum();
        if used > s.power_budget {
            return Err(Error::InfeasibleInstance {
                required: used,
                available: s.power_budget,
                phase: format!(" (source {} at equal bandwidth)", s.id),
            });
        }
    }
    let relay = if gains.is_relayed() {
        let mut relay = Vec::with_capacity(n);
        for i in 0..n {
            let p = inv_min_bandwidth(w, gains.second_hop(i).unwrap() / n0, thresholds[i])?;
            relay.push(PhaseShare::new(p, w));
        }
        for r in &topology.relays {
            let used: f64 = topology
                .users_of_relay(r.id)
                .iter()
                .map(|&i| relay[i].power())
                .sum();
            if used > r.power_budget {
                return Err(Error::InfeasibleInstance {
                    required: used,
                    available: r.power_budget,
                    phase: format!(" (relay {} at equal bandwidth)", r.id),
                });
            }
        }
        Some(relay)
    } else {
        None
    };
    let allocation = Allocation {
        source_shares: source,
        relay_shares: relay,
    };
    let total = allocation.source_shares.iter().map(|s| s.power()).sum::<f64>()
        + allocation
            .relay_shares
            .as_ref()
            .map(|r| r.iter().map(|s| s.power()).sum::<f64>())
            .unwrap_or(0.0);
    Ok((allocation, total))
}

/// Equal bandwidth and power: W/N spectrum per user per phase, budgets split
/// evenly across each source's (and relay's) users.
pub fn ebpa(topology: &NetworkTopology, gains: &ChannelGains) -> Result<Allocation> {
    let n = topology.n_users();
    if n == 0 {
        return Err(Error::InvalidInput("no users".into()));
    }
    let w = topology.total_bandwidth / n as f64;
    let mut source = vec![PhaseShare::ZERO; n];
    for s in &topology.sources {
        let members = topology.users_of_source(s.id);
        for &i in &members {
            source[i] = PhaseShare::new(s.power_budget / members.len() as f64, w);
        }
    }
    let relay = gains.is_relayed().then(|| {
        let mut relay = vec![PhaseShare::ZERO; n];
        for r in &topology.relays {
            let members = topology.users_of_relay(r.id);
            for &i in &members {
                relay[i] = PhaseShare::new(r.power_budget / members.len() as f64, w);
            }
        }
        relay
    });
    Ok(Allocation {
        source_shares: source,
        relay_shares: relay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RelayNode, SourceNode, User};
    use approx::assert_relative_eq;

    fn one_source(n: usize, power: f64, w_total: f64, c_min: f64) -> NetworkTopology {
        NetworkTopology {
            sources: vec![SourceNode {
                id: 0,
                power_budget: power,
            }],
            relays: vec![],
            users: (0..n)
                .map(|i| User {
                    id: i,
                    source_id: 0,
                    relay_id: None,
                    c_min,
                })
                .collect(),
            total_bandwidth: w_total,
            noise_psd: 1.0,
        }
    }

    fn per_user_sources(n: usize, power: f64, w_total: f64) -> NetworkTopology {
        NetworkTopology {
            sources: (0..n)
                .map(|i| SourceNode {
                    id: i,
                    power_budget: power,
                })
                .collect(),
            relays: vec![],
            users: (0..n)
                .map(|i| User {
                    id: i,
                    source_id: i,
                    relay_id: None,
                    c_min: 1.0,
                })
                .collect(),
            total_bandwidth: w_total,
            noise_psd: 1.0,
        }
    }

    fn relay_pair(h_sr: Vec<f64>, h_rd: Vec<f64>, p_s: f64, p_r: f64, w: f64) -> (NetworkTopology, ChannelGains) {
        let n = h_sr.len();
        let topology = NetworkTopology {
            sources: vec![SourceNode {
                id: 0,
                power_budget: p_s,
            }],
            relays: vec![RelayNode {
                id: 0,
                power_budget: p_r,
            }],
            users: (0..n)
                .map(|i| User {
                    id: i,
                    source_id: 0,
                    relay_id: Some(0),
                    c_min: 1.0,
                })
                .collect(),
            total_bandwidth: w,
            noise_psd: 1.0,
        };
        let gains = ChannelGains::Relayed {
            source_relay: h_sr,
            relay_dest: h_rd,
        };
        (topology, gains)
    }

    #[test]
    fn sum_capacity_single_source_picks_best_gain() {
        let topology = one_source(3, 1.1, 1.0, 1.0);
        let gains = ChannelGains::Direct(vec![4.0, 5.0, 6.0]);
        let (alloc, total) = sum_capacity_no_relay(&topology, &gains).unwrap();
        assert_eq!(alloc.source_shares[0].power(), 0.0);
        assert_eq!(alloc.source_shares[1].power(), 0.0);
        assert_relative_eq!(alloc.source_shares[2].power(), 1.1);
        assert_relative_eq!(alloc.source_shares[2].bandwidth(), 1.0);
        assert_relative_eq!(total, (1.0f64 + 6.0 * 1.1).ln(), max_relative = 1e-12);
    }

    #[test]
    fn sum_capacity_bandwidth_proportional_to_gain_power() {
        let mut topology = per_user_sources(2, 1.0, 10.0);
        topology.sources[1].power_budget = 3.0;
        let gains = ChannelGains::Direct(vec![2.0, 4.0]);
        let (alloc, _) = sum_capacity_no_relay(&topology, &gains).unwrap();
        // weights 2*1 = 2 and 4*3 = 12
        assert_relative_eq!(alloc.source_shares[0].bandwidth(), 10.0 * 2.0 / 14.0);
        assert_relative_eq!(alloc.source_shares[1].bandwidth(), 10.0 * 12.0 / 14.0);
    }

    #[test]
    fn sum_capacity_tie_goes_to_lowest_id() {
        let topology = one_source(2, 1.0, 1.0, 1.0);
        let gains = ChannelGains::Direct(vec![5.0, 5.0]);
        let (alloc, _) = sum_capacity_no_relay(&topology, &gains).unwrap();
        assert!(alloc.source_shares[0].power() > 0.0);
        assert_eq!(alloc.source_shares[1].power(), 0.0);
    }

    #[test]
    fn dominated_user_is_pruned() {
        let (topology, gains) = relay_pair(vec![5.0, 2.0], vec![4.0, 3.0], 1.0, 1.0, 1.0);
        let served = prune_dominated(&topology, &gains);
        assert_eq!(served, vec![0]);
        // no dominance when the hops disagree
        let gains2 = ChannelGains::Relayed {
            source_relay: vec![5.0, 2.0],
            relay_dest: vec![3.0, 4.0],
        };
        assert_eq!(prune_dominated(&topology, &gains2), vec![0, 1]);
    }

    #[test]
    fn relay_sum_capacity_single_user_takes_everything() {
        let (topology, gains) = relay_pair(vec![4.0], vec![6.0], 2.0, 1.5, 3.0);
        let (alloc, total) = sum_capacity_relay(&topology, &gains).unwrap();
        let c1 = cap_raw(2.0, 3.0, 4.0);
        let c2 = cap_raw(1.5, 3.0, 6.0);
        assert_relative_eq!(total, c1.min(c2), max_relative = 1e-4);
        assert!(alloc.source_shares[0].power() > 1.99);
        assert!(alloc.source_shares[0].bandwidth() > 2.99);
    }

    #[test]
    fn relay_sum_capacity_beats_equal_split() {
        let (topology, gains) = relay_pair(vec![6.0, 1.0], vec![5.0, 1.2], 2.0, 2.0, 2.0);
        let (_, opt) = sum_capacity_relay(&topology, &gains).unwrap();
        let even = ebpa(&topology, &gains).unwrap();
        let even_total: f64 = user_capacities(&topology, &gains, &even).unwrap().iter().sum();
        assert!(opt >= even_total - 1e-6);
    }

    #[test]
    fn max_min_single_user_full_resources() {
        let topology = one_source(1, 2.0, 3.0, 1.0);
        let gains = ChannelGains::Direct(vec![4.0]);
        let (alloc, t_star) = max_min_no_relay(&topology, &gains).unwrap();
        assert_relative_eq!(t_star, cap_raw(2.0, 3.0, 4.0), max_relative = 1e-6);
        assert_relative_eq!(alloc.source_shares[0].bandwidth(), 3.0, max_relative = 1e-9);
    }

    #[test]
    fn max_min_symmetric_users_equalize() {
        let topology = one_source(3, 3.0, 6.0, 1.0);
        let gains = ChannelGains::Direct(vec![2.0, 2.0, 2.0]);
        let (alloc, t_star) = max_min_no_relay(&topology, &gains).unwrap();
        let caps = user_capacities(&topology, &gains, &alloc).unwrap();
        for c in &caps {
            assert_relative_eq!(*c, t_star, max_relative = 1e-6);
        }
        let w_sum: f64 = alloc.source_shares.iter().map(|s| s.bandwidth()).sum();
        let p_sum: f64 = alloc.source_shares.iter().map(|s| s.power()).sum();
        assert_relative_eq!(w_sum, 6.0, max_relative = 1e-9);
        assert!(p_sum <= 3.0 + 1e-9);
        assert_relative_eq!(t_star, cap_raw(1.0, 2.0, 2.0), max_relative = 1e-6);
    }

    #[test]
    fn max_min_weak_user_gets_more_spectrum() {
        let topology = one_source(2, 2.0, 4.0, 1.0);
        let gains = ChannelGains::Direct(vec![1.0, 9.0]);
        let (alloc, t_star) = max_min_no_relay(&topology, &gains).unwrap();
        assert!(alloc.source_shares[0].bandwidth() > alloc.source_shares[1].bandwidth());
        let caps = user_capacities(&topology, &gains, &alloc).unwrap();
        assert_relative_eq!(caps[0], caps[1], max_relative = 1e-5);
        assert!(t_star > 0.0);
    }

    #[test]
    fn max_min_relay_symmetric() {
        let (topology, gains) = relay_pair(vec![4.0, 4.0], vec![6.0, 6.0], 2.0, 1.0, 2.0);
        let (alloc, t_star) = max_min_relay(&topology, &gains).unwrap();
        // second hop binds: each user gets half the relay power and half
        // the band, and C(0.5, 1, 6) < C(1, 1, 4)
        let bound = cap_raw(0.5, 1.0, 6.0);
        assert_relative_eq!(t_star, bound, max_relative = 1e-5);
        let caps = user_capacities(&topology, &gains, &alloc).unwrap();
        assert_relative_eq!(caps[0], caps[1], max_relative = 1e-5);
    }

    #[test]
    fn power_min_single_user_uses_full_band() {
        let topology = one_source(1, 5.0, 1.0, 1.0);
        let gains = ChannelGains::Direct(vec![1.0]);
        let (alloc, total) = power_min_no_relay(&topology, &gains, &[1.0]).unwrap();
        // ln(1 + p) = 1 at w = 1 gives p = e - 1
        assert_relative_eq!(total, 1.0f64.exp() - 1.0, max_relative = 1e-6);
        assert_relative_eq!(alloc.source_shares[0].bandwidth(), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn power_min_symmetric_pair_splits_the_band() {
        let topology = one_source(2, 20.0, 2.0, 1.0);
        let gains = ChannelGains::Direct(vec![3.0, 3.0]);
        let (alloc, total) = power_min_no_relay(&topology, &gains, &[1.0, 1.0]).unwrap();
        let expect = 2.0 * inv_min_bandwidth(1.0, 3.0, 1.0).unwrap();
        assert_relative_eq!(total, expect, max_relative = 1e-5);
        let caps = user_capacities(&topology, &gains, &alloc).unwrap();
        for c in &caps {
            assert!(*c >= 1.0 - 1e-9);
            assert_relative_eq!(*c, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn power_min_meets_thresholds_exactly() {
        let topology = one_source(2, 50.0, 3.0, 1.0);
        let gains = ChannelGains::Direct(vec![2.0, 7.0]);
        let thresholds = [1.0, 1.4];
        let (alloc, total) = power_min_no_relay(&topology, &gains, &thresholds).unwrap();
        let caps = user_capacities(&topology, &gains, &alloc).unwrap();
        for (c, t) in caps.iter().zip(&thresholds) {
            assert_relative_eq!(*c, *t, max_relative = 1e-9);
        }
        let w_sum: f64 = alloc.source_shares.iter().map(|s| s.bandwidth()).sum();
        assert!(w_sum <= 3.0 + 1e-7);
        assert!(total > 0.0);
    }

    #[test]
    fn power_min_infeasible_when_band_too_small() {
        let topology = one_source(1, 1.05, 0.1, 1.0);
        let gains = ChannelGains::Direct(vec![1.0]);
        let err = power_min_no_relay(&topology, &gains, &[1.0]).unwrap_err();
        assert!(matches!(err, Error::InfeasibleInstance { .. }));
    }

    #[test]
    fn power_min_relay_symmetric() {
        let (topology, gains) = relay_pair(vec![2.0, 2.0], vec![3.0, 3.0], 50.0, 50.0, 2.0);
        let (alloc, total) = power_min_relay(&topology, &gains, &[1.0, 1.0]).unwrap();
        let expect =
            2.0 * (inv_min_bandwidth(1.0, 2.0, 1.0).unwrap() + inv_min_bandwidth(1.0, 3.0, 1.0).unwrap());
        assert_relative_eq!(total, expect, max_relative = 1e-5);
        let caps = user_capacities(&topology, &gains, &alloc).unwrap();
        for c in &caps {
            assert_relative_eq!(*c, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn ebpa_even_split() {
        let topology = per_user_sources(4, 20.0, 10.0);
        let gains = ChannelGains::Direct(vec![1.0, 2.0, 3.0, 4.0]);
        let alloc = ebpa(&topology, &gains).unwrap();
        for s in &alloc.source_shares {
            assert_relative_eq!(s.power(), 20.0);
            assert_relative_eq!(s.bandwidth(), 2.5);
        }
    }

    #[test]
    fn ebpa_shared_source_splits_power() {
        let topology = one_source(4, 20.0, 10.0, 1.0);
        let gains = ChannelGains::Direct(vec![1.0; 4]);
        let alloc = ebpa(&topology, &gains).unwrap();
        for s in &alloc.source_shares {
            assert_relative_eq!(s.power(), 5.0);
            assert_relative_eq!(s.bandwidth(), 2.5);
        }
    }

    #[test]
    fn water_fill_matches_hand_case() {
        // two users, equal gains: split evenly
        let p = water_fill(&[2.0, 2.0], 1.0, 1.0, 4.0);
        assert_relative_eq!(p[0], 2.0);
        assert_relative_eq!(p[1], 2.0);
        // strongly uneven gains with a small budget: weak user shut off
        let p = water_fill(&[10.0, 0.01], 1.0, 1.0, 0.5);
        assert_relative_eq!(p[0], 0.5);
        assert_eq!(p[1], 0.0);
        // total always matches the budget when someone is active
        let p = water_fill(&[1.0, 3.0, 7.0], 2.0, 1.0, 5.0);
        assert_relative_eq!(p.iter().sum::<f64>(), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn ebopa_sum_upgrades_ebpa() {
        let topology = one_source(3, 6.0, 6.0, 1.0);
        let gains = ChannelGains::Direct(vec![0.5, 2.0, 8.0]);
        let (alloc, total) = ebopa(&topology, &gains, Objective::SumCapacity, None).unwrap();
        for s in &alloc.source_shares {
            assert_relative_eq!(s.bandwidth(), 2.0);
        }
        let even = ebpa(&topology, &gains).unwrap();
        let even_total: f64 = user_capacities(&topology, &gains, &even).unwrap().iter().sum();
        assert!(total >= even_total - 1e-9);
    }

    #[test]
    fn ebopa_max_min_closed_form() {
        let topology = one_source(2, 4.0, 4.0, 1.0);
        let gains = ChannelGains::Direct(vec![1.0, 3.0]);
        let (alloc, t_star) = ebopa(&topology, &gains, Objective::MaxMin, None).unwrap();
        let w = 2.0f64;
        let inv_sum = 1.0 + 1.0 / 3.0;
        let expect = w * (1.0 + 4.0 / (w * inv_sum)).ln();
        assert_relative_eq!(t_star, expect, max_relative = 1e-9);
        let caps = user_capacities(&topology, &gains, &alloc).unwrap();
        assert_relative_eq!(caps[0], caps[1], max_relative = 1e-9);
        let p_sum: f64 = alloc.source_shares.iter().map(|s| s.power()).sum();
        assert_relative_eq!(p_sum, 4.0, max_relative = 1e-9);
    }

    #[test]
    fn ebopa_power_min_inverse_formula() {
        let topology = one_source(2, 50.0, 2.0, 1.0);
        let gains = ChannelGains::Direct(vec![2.0, 5.0]);
        let (alloc, total) =
            ebopa(&topology, &gains, Objective::PowerMin, Some(&[1.0, 1.0])).unwrap();
        let p0 = inv_min_bandwidth(1.0, 2.0, 1.0).unwrap();
        let p1 = inv_min_bandwidth(1.0, 5.0, 1.0).unwrap();
        assert_relative_eq!(alloc.source_shares[0].power(), p0, max_relative = 1e-12);
        assert_relative_eq!(alloc.source_shares[1].power(), p1, max_relative = 1e-12);
        assert_relative_eq!(total, p0 + p1, max_relative = 1e-12);
    }

    #[test]
    fn ebopa_power_min_rejects_tight_budget() {
        let topology = one_source(2, 0.5, 2.0, 1.0);
        let gains = ChannelGains::Direct(vec![2.0, 5.0]);
        let err = ebopa(&topology, &gains, Objective::PowerMin, Some(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::InfeasibleInstance { .. }));
    }

    #[test]
    fn obpa_power_min_never_worse_than_ebopa() {
        let topology = one_source(3, 60.0, 3.0, 1.0);
        let gains = ChannelGains::Direct(vec![1.0, 4.0, 9.0]);
        let thresholds = [1.0, 1.2, 0.8];
        let (_, opt) = power_min_no_relay(&topology, &gains, &thresholds).unwrap();
        let (_, base) = ebopa(&topology, &gains, Objective::PowerMin, Some(&thresholds)).unwrap();
        assert!(opt <= base + 1e-7);
    }
}
