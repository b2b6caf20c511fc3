//! Shared helpers for the integration suite: random instance builders and
//! brute-force grid oracles that are independent of the library's solvers.

#![allow(dead_code)]

use bpalloc::model::{ChannelGains, NetworkTopology, RelayNode, SourceNode, User};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Single source, direct links, one user per entry of `h`.
pub fn single_source(
    h: &[f64],
    c: &[f64],
    power: f64,
    bandwidth: f64,
) -> (NetworkTopology, ChannelGains, Vec<f64>) {
    let users = (0..h.len())
        .map(|i| User {
            id: i,
            source_id: 0,
            relay_id: None,
            c_min: c[i],
        })
        .collect();
    let topology = NetworkTopology {
        sources: vec![SourceNode {
            id: 0,
            power_budget: power,
        }],
        relays: vec![],
        users,
        total_bandwidth: bandwidth,
        noise_psd: 1.0,
    };
    (topology, ChannelGains::Direct(h.to_vec()), c.to_vec())
}

/// Several sources, direct links; `user_sources[i]` maps user i to a source.
pub fn multi_source(
    budgets: &[f64],
    user_sources: &[usize],
    h: &[f64],
    c: &[f64],
    bandwidth: f64,
) -> (NetworkTopology, ChannelGains, Vec<f64>) {
    let sources = budgets
        .iter()
        .enumerate()
        .map(|(id, &p)| SourceNode {
            id,
            power_budget: p,
        })
        .collect();
    let users = (0..h.len())
        .map(|i| User {
            id: i,
            source_id: user_sources[i],
            relay_id: None,
            c_min: c[i],
        })
        .collect();
    let topology = NetworkTopology {
        sources,
        relays: vec![],
        users,
        total_bandwidth: bandwidth,
        noise_psd: 1.0,
    };
    (topology, ChannelGains::Direct(h.to_vec()), c.to_vec())
}

/// One source, one relay, every user decode-and-forward relayed.
pub fn single_relay(
    h_sr: &[f64],
    h_rd: &[f64],
    c: &[f64],
    source_power: f64,
    relay_power: f64,
    bandwidth: f64,
) -> (NetworkTopology, ChannelGains, Vec<f64>) {
    let users = (0..h_sr.len())
        .map(|i| User {
            id: i,
            source_id: 0,
            relay_id: Some(0),
            c_min: c[i],
        })
        .collect();
    let topology = NetworkTopology {
        sources: vec![SourceNode {
            id: 0,
            power_budget: source_power,
        }],
        relays: vec![RelayNode {
            id: 0,
            power_budget: relay_power,
        }],
        users,
        total_bandwidth: bandwidth,
        noise_psd: 1.0,
    };
    let gains = ChannelGains::Relayed {
        source_relay: h_sr.to_vec(),
        relay_dest: h_rd.to_vec(),
    };
    (topology, gains, c.to_vec())
}

/// Shannon capacity with unit noise density; zero outside the domain.
pub fn cap(p: f64, w: f64, h: f64) -> f64 {
    if p <= 0.0 || w <= 0.0 {
        0.0
    } else {
        w * (1.0 + h * p / w).ln()
    }
}

/// Minimum bandwidth sustaining threshold `c` at power `p` and gain `h`,
/// found by plain bisection on w -> C(p, w) (increasing in w).
pub fn grid_f(p: f64, h: f64, c: f64) -> f64 {
    if p * h <= c {
        // C(p, w) -> h p as w -> inf, so the threshold is unreachable.
        return f64::INFINITY;
    }
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while cap(p, hi, h) < c {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cap(p, mid, h) < c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Coarse-to-fine minimization of `f` on [lo, hi]. `f` may return infinity;
/// the box shrinks around the incumbent each level.
pub fn refine_min_1d(
    mut lo: f64,
    mut hi: f64,
    pts: usize,
    levels: usize,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let mut best_val = f64::INFINITY;
    for _ in 0..levels {
        let step = (hi - lo) / (pts - 1) as f64;
        let mut best_i = 0;
        for i in 0..pts {
            let v = f(lo + step * i as f64);
            if v < best_val {
                best_val = v;
                best_i = i;
            }
        }
        let center = lo + step * best_i as f64;
        lo = (center - 2.0 * step).max(lo);
        hi = (center + 2.0 * step).min(hi);
    }
    best_val
}

/// Minimum total bandwidth for a single source group, by direct grid search
/// over the power split. Supports 1-3 users.
pub fn grid_g(h: &[f64], c: &[f64], power: f64) -> f64 {
    let floors: Vec<f64> = h.iter().zip(c).map(|(&h, &c)| c / h).collect();
    if floors.iter().sum::<f64>() >= power {
        return f64::INFINITY;
    }
    match h.len() {
        1 => grid_f(power, h[0], c[0]),
        2 => refine_min_1d(floors[0], power - floors[1], 201, 10, |p0| {
            grid_f(p0, h[0], c[0]) + grid_f(power - p0, h[1], c[1])
        }),
        3 => {
            // 2-d simplex search: outer refinement over p0, inner over p1.
            refine_min_1d(floors[0], power - floors[1] - floors[2], 61, 6, |p0| {
                refine_min_1d(floors[1], power - p0 - floors[2], 61, 6, |p1| {
                    grid_f(p0, h[0], c[0])
                        + grid_f(p1, h[1], c[1])
                        + grid_f(power - p0 - p1, h[2], c[2])
                })
            })
        }
        n => panic!("grid_g supports up to 3 users, got {n}"),
    }
}

/// Minimum total source power meeting both thresholds inside `bandwidth`,
/// two users on one direct source. Capacity constraints are tight at the
/// optimum, so this is a line search over the bandwidth split.
pub fn grid_power_min_two(h: &[f64], c: &[f64], bandwidth: f64) -> f64 {
    let inv = |w: f64, h: f64, c: f64| ((c / w).exp() - 1.0) * w / h;
    let eps = bandwidth * 1e-9;
    refine_min_1d(eps, bandwidth - eps, 201, 10, |w0| {
        inv(w0, h[0], c[0]) + inv(bandwidth - w0, h[1], c[1])
    })
}

/// Two-user decode-and-forward sum capacity by grid search over the four
/// free dimensions (power split and bandwidth split per phase; each phase
/// reuses the whole band). The program is concave, so shrinking the box
/// around the incumbent converges.
pub fn grid_relay_sum_two(
    h_sr: &[f64],
    h_rd: &[f64],
    source_power: f64,
    relay_power: f64,
    bandwidth: f64,
) -> f64 {
    const PTS: usize = 9;
    const LEVELS: usize = 16;
    let value = |x: &[f64; 4]| -> f64 {
        let [a, b, ws0, wr0] = *x;
        let (ws1, wr1) = (bandwidth - ws0, bandwidth - wr0);
        let (ps0, ps1) = (a * source_power, (1.0 - a) * source_power);
        let (pr0, pr1) = (b * relay_power, (1.0 - b) * relay_power);
        cap(ps0, ws0, h_sr[0]).min(cap(pr0, wr0, h_rd[0]))
            + cap(ps1, ws1, h_sr[1]).min(cap(pr1, wr1, h_rd[1]))
    };
    let mut lo = [0.0, 0.0, 0.0, 0.0];
    let mut hi = [1.0, 1.0, bandwidth, bandwidth];
    let mut best_val = f64::NEG_INFINITY;
    for _ in 0..LEVELS {
        let step: Vec<f64> = (0..4).map(|d| (hi[d] - lo[d]) / (PTS - 1) as f64).collect();
        let mut best_x = lo;
        let mut idx = [0usize; 4];
        loop {
            let mut x = [0.0; 4];
            for d in 0..4 {
                x[d] = lo[d] + step[d] * idx[d] as f64;
            }
            let v = value(&x);
            if v > best_val {
                best_val = v;
                best_x = x;
            }
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < PTS {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == 4 {
                    break;
                }
            }
            if d == 4 {
                break;
            }
        }
        for d in 0..4 {
            lo[d] = (best_x[d] - 1.5 * step[d]).max(lo[d]);
            hi[d] = (best_x[d] + 1.5 * step[d]).min(hi[d]);
        }
    }
    best_val
}

/// Random direct instance: 1-3 sources, `n` users, gains in [0.5, 8].
pub fn random_direct(
    rng: &mut ChaCha12Rng,
    n: usize,
) -> (NetworkTopology, ChannelGains, Vec<f64>) {
    let n_sources = rng.gen_range(1..=n.min(3));
    let budgets: Vec<f64> = (0..n_sources).map(|_| rng.gen_range(0.8..5.0)).collect();
    let mut user_sources: Vec<usize> = (0..n).map(|i| i % n_sources).collect();
    for i in n_sources..n {
        user_sources[i] = rng.gen_range(0..n_sources);
    }
    let h: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..8.0)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.5)).collect();
    let w = rng.gen_range(2.0..10.0);
    multi_source(&budgets, &user_sources, &h, &c, w)
}

/// Random relayed instance: one source, one relay, `n` users.
pub fn random_relayed(
    rng: &mut ChaCha12Rng,
    n: usize,
) -> (NetworkTopology, ChannelGains, Vec<f64>) {
    let h_sr: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..8.0)).collect();
    let h_rd: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..8.0)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.0)).collect();
    let p_s = rng.gen_range(1.0..5.0);
    let p_r = rng.gen_range(1.0..5.0);
    let w = rng.gen_range(2.0..10.0);
    single_relay(&h_sr, &h_rd, &c, p_s, p_r, w)
}
