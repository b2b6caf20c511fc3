//! Seeded Monte-Carlo experiments: random scenario generation, scheme
//! sweeps, admission-probability curves, and the greedy-vs-exhaustive
//! admission benchmark.
//!
//! Every random draw comes from a counter-based stream keyed by (master
//! seed, run index, stream id), so results do not depend on execution order
//! or worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admission::{
    exhaustive_admission_no_relay, exhaustive_admission_relay, greedy_admission_no_relay,
    greedy_admission_relay,
};
use crate::allocators::{self, Objective, Scheme};
use crate::bandwidth_min::GProblem;
use crate::model::{ChannelGains, NetworkTopology, RelayNode, SourceNode, User};
use crate::{Error, Result};

/// Per-user minimum-rate specification for generated scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThresholdSpec {
    /// Every user gets the same threshold.
    Fixed(f64),
    /// Per-user draw from [low, low + width].
    Uniform { low: f64, width: f64 },
}

/// Everything needed to generate random scenarios and run experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub area_min: (f64, f64),
    pub area_max: (f64, f64),
    pub source_budgets: Vec<f64>,
    pub relay_budgets: Vec<f64>,
    pub relay_positions: Vec<(f64, f64)>,
    /// Per user: index into `source_budgets`.
    pub user_sources: Vec<usize>,
    /// Per user: index into `relay_budgets`; present iff the network relays.
    pub user_relays: Option<Vec<usize>>,
    pub total_bandwidth: f64,
    pub noise_psd: f64,
    /// Mean fading power gain (sigma squared).
    pub fading_variance: f64,
    pub thresholds: ThresholdSpec,
    pub runs: usize,
    pub master_seed: u64,
}

impl ScenarioConfig {
    /// The default network: four single-user sources, two relays at (5,3)
    /// and (5,7) serving two users each, P_S = 20, P_R = 40, W = 10,
    /// sigma^2 = 5, c = 1, unit noise.
    pub fn default_network() -> ScenarioConfig {
        ScenarioConfig {
            area_min: (0.0, 0.0),
            area_max: (10.0, 10.0),
            source_budgets: vec![20.0; 4],
            relay_budgets: vec![40.0; 2],
            relay_positions: vec![(5.0, 3.0), (5.0, 7.0)],
            user_sources: vec![0, 1, 2, 3],
            user_relays: Some(vec![0, 0, 1, 1]),
            total_bandwidth: 10.0,
            noise_psd: 1.0,
            fading_variance: 5.0,
            thresholds: ThresholdSpec::Fixed(1.0),
            runs: 1000,
            master_seed: 1,
        }
    }

    /// The four admission benchmark networks: eight users, thresholds drawn
    /// from [c0, c0 + 4], sigma^2 = 10.
    ///
    /// 1: four sources with two users each, P_S = 40, no relays.
    /// 2: two sources with four users each, P_S = 80, no relays.
    /// 3: setup 1 plus four relays at (5,2)..(5,8), two users each, P_R = 40.
    /// 4: setup 2 plus two relays at (5,3) and (5,7), P_R = 80.
    pub fn greedy_setup(id: u8, c0: f64) -> Result<ScenarioConfig> {
        let mut config = ScenarioConfig {
            area_min: (0.0, 0.0),
            area_max: (10.0, 10.0),
            source_budgets: vec![],
            relay_budgets: vec![],
            relay_positions: vec![],
            user_sources: vec![],
            user_relays: None,
            total_bandwidth: 10.0,
            noise_psd: 1.0,
            fading_variance: 10.0,
            thresholds: ThresholdSpec::Uniform { low: c0, width: 4.0 },
            runs: 20,
            master_seed: 1,
        };
        match id {
            1 | 3 => {
                config.source_budgets = vec![40.0; 4];
                config.user_sources = vec![0, 0, 1, 1, 2, 2, 3, 3];
            }
            2 | 4 => {
                config.source_budgets = vec![80.0; 2];
                config.user_sources = vec![0, 0, 0, 0, 1, 1, 1, 1];
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "benchmark setup must be 1..=4, got {id}"
                )))
            }
        }
        match id {
            3 => {
                config.relay_budgets = vec![40.0; 4];
                config.relay_positions =
                    vec![(5.0, 2.0), (5.0, 4.0), (5.0, 6.0), (5.0, 8.0)];
                config.user_relays = Some(vec![0, 0, 1, 1, 2, 2, 3, 3]);
            }
            4 => {
                config.relay_budgets = vec![80.0; 2];
                config.relay_positions = vec![(5.0, 3.0), (5.0, 7.0)];
                config.user_relays = Some(vec![0, 0, 1, 1, 1, 1, 0, 0]);
            }
            _ => {}
        }
        Ok(config)
    }

    pub fn n_users(&self) -> usize {
        self.user_sources.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidInput("run count must be >= 1".into()));
        }
        if !(self.fading_variance > 0.0) {
            return Err(Error::InvalidInput("fading variance must be > 0".into()));
        }
        if !(self.area_max.0 > self.area_min.0) || !(self.area_max.1 > self.area_min.1) {
            return Err(Error::InvalidInput("empty area".into()));
        }
        if self.user_sources.is_empty() {
            return Err(Error::InvalidInput("no users".into()));
        }
        if self.relay_budgets.len() != self.relay_positions.len() {
            return Err(Error::InvalidInput(
                "relay budget and position counts differ".into(),
            ));
        }
        for &(x, y) in &self.relay_positions {
            if x < self.area_min.0 || x > self.area_max.0 || y < self.area_min.1 || y > self.area_max.1
            {
                return Err(Error::InvalidInput(format!(
                    "relay position ({x}, {y}) outside the area"
                )));
            }
        }
        for &s in &self.user_sources {
            if s >= self.source_budgets.len() {
                return Err(Error::InvalidInput(format!("unknown source index {s}")));
            }
        }
        match &self.user_relays {
            Some(assign) => {
                if assign.len() != self.user_sources.len() {
                    return Err(Error::InvalidInput(
                        "relay assignment length mismatch".into(),
                    ));
                }
                for &r in assign {
                    if r >= self.relay_budgets.len() {
                        return Err(Error::InvalidInput(format!("unknown relay index {r}")));
                    }
                }
            }
            None => {
                if !self.relay_budgets.is_empty() {
                    return Err(Error::InvalidInput(
                        "relays present but no user assignment".into(),
                    ));
                }
            }
        }
        if let ThresholdSpec::Uniform { low, width } = self.thresholds {
            if !(low > 0.0) || !(width >= 0.0) {
                return Err(Error::InvalidInput("bad threshold interval".into()));
            }
        }
        Ok(())
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream ids used by the generator.
const STREAM_POSITIONS: u64 = 0;
const STREAM_FADING: u64 = 1;
const STREAM_THRESHOLDS: u64 = 2;

/// Counter-based per-(seed, run, stream) generator.
fn stream_rng(master_seed: u64, run: u64, stream: u64) -> ChaCha12Rng {
    let mut state = master_seed;
    let a = splitmix64(&mut state);
    state ^= run.wrapping_mul(0xA076_1D64_78BD_642F);
    let b = splitmix64(&mut state);
    state ^= stream.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);
    let mut seed = [0u8; 32];
    for (chunk, word) in seed.chunks_exact_mut(8).zip([a, b, c, d]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}

/// Squared-inverse-distance path loss.
pub fn path_loss(distance: f64) -> f64 {
    1.0 / (distance * distance)
}

/// One fading power gain draw: exponential with mean `variance` (Rayleigh
/// amplitude fading). Swap the distribution here to change the model.
pub fn fading_power<R: Rng>(rng: &mut R, variance: f64) -> f64 {
    let u: f64 = rng.gen();
    -variance * (1.0 - u).ln()
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

const MAX_REDRAWS: usize = 100;

/// Generates the topology, channel gains, and thresholds for one run.
/// Deterministic in (master seed, run index).
pub fn generate_scenario(
    config: &ScenarioConfig,
    run: usize,
) -> Result<(NetworkTopology, ChannelGains, Vec<f64>)> {
    config.validate()?;
    let n = config.n_users();
    let mut rng_pos = stream_rng(config.master_seed, run as u64, STREAM_POSITIONS);
    let mut rng_fade = stream_rng(config.master_seed, run as u64, STREAM_FADING);
    let mut rng_c = stream_rng(config.master_seed, run as u64, STREAM_THRESHOLDS);

    let draw_point = |rng: &mut ChaCha12Rng| {
        (
            rng.gen_range(config.area_min.0..config.area_max.0),
            rng.gen_range(config.area_min.1..config.area_max.1),
        )
    };
    // sources must not sit on a relay
    let mut source_pos = Vec::with_capacity(config.source_budgets.len());
    for _ in 0..config.source_budgets.len() {
        let mut p = draw_point(&mut rng_pos);
        let mut tries = 0;
        while config.relay_positions.iter().any(|&r| dist(p, r) == 0.0) {
            tries += 1;
            if tries > MAX_REDRAWS {
                return Err(Error::NumericalFailure("degenerate geometry".into()));
            }
            p = draw_point(&mut rng_pos);
        }
        source_pos.push(p);
    }
    // destinations must not sit on their own transmitter
    let mut dest_pos = Vec::with_capacity(n);
    for i in 0..n {
        let near = match &config.user_relays {
            Some(assign) => config.relay_positions[assign[i]],
            None => source_pos[config.user_sources[i]],
        };
        let mut p = draw_point(&mut rng_pos);
        let mut tries = 0;
        while dist(p, near) == 0.0 {
            tries += 1;
            if tries > MAX_REDRAWS {
                return Err(Error::NumericalFailure("degenerate geometry".into()));
            }
            p = draw_point(&mut rng_pos);
        }
        dest_pos.push(p);
    }

    let gains = match &config.user_relays {
        None => {
            let mut h = Vec::with_capacity(n);
            for i in 0..n {
                let d = dist(source_pos[config.user_sources[i]], dest_pos[i]);
                h.push(path_loss(d) * fading_power(&mut rng_fade, config.fading_variance));
            }
            ChannelGains::Direct(h)
        }
        Some(assign) => {
            let mut h_sr = Vec::with_capacity(n);
            let mut h_rd = Vec::with_capacity(n);
            for i in 0..n {
                let relay = config.relay_positions[assign[i]];
                let d1 = dist(source_pos[config.user_sources[i]], relay);
                let d2 = dist(relay, dest_pos[i]);
                h_sr.push(path_loss(d1) * fading_power(&mut rng_fade, config.fading_variance));
                h_rd.push(path_loss(d2) * fading_power(&mut rng_fade, config.fading_variance));
            }
            ChannelGains::Relayed {
                source_relay: h_sr,
                relay_dest: h_rd,
            }
        }
    };

    let thresholds: Vec<f64> = match config.thresholds {
        ThresholdSpec::Fixed(c) => vec![c; n],
        ThresholdSpec::Uniform { low, width } => {
            (0..n).map(|_| low + width * rng_c.gen::<f64>()).collect()
        }
    };

    let topology = NetworkTopology {
        sources: config
            .source_budgets
            .iter()
            .enumerate()
            .map(|(id, &power_budget)| SourceNode { id, power_budget })
            .collect(),
        relays: config
            .relay_budgets
            .iter()
            .enumerate()
            .map(|(id, &power_budget)| RelayNode { id, power_budget })
            .collect(),
        users: (0..n)
            .map(|i| User {
                id: i,
                source_id: config.user_sources[i],
                relay_id: config.user_relays.as_ref().map(|a| a[i]),
                c_min: thresholds[i],
            })
            .collect(),
        total_bandwidth: config.total_bandwidth,
        noise_psd: config.noise_psd,
    };
    Ok((topology, gains, thresholds))
}

/// Solves one scheme for one objective and returns the scalar metric: sum
/// capacity, worst-user capacity, or total transmit power.
pub fn solve_metric(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    thresholds: &[f64],
    scheme: Scheme,
    objective: Objective,
) -> Result<f64> {
    let relayed = gains.is_relayed();
    match scheme {
        Scheme::Obpa => match objective {
            Objective::SumCapacity => {
                let (_, v) = if relayed {
                    allocators::sum_capacity_relay(topology, gains)?
                } else {
                    allocators::sum_capacity_no_relay(topology, gains)?
                };
                Ok(v)
            }
            Objective::MaxMin => {
                let (_, v) = if relayed {
                    allocators::max_min_relay(topology, gains)?
                } else {
                    allocators::max_min_no_relay(topology, gains)?
                };
                Ok(v)
            }
            Objective::PowerMin => {
                let (_, v) = if relayed {
                    allocators::power_min_relay(topology, gains, thresholds)?
                } else {
                    allocators::power_min_no_relay(topology, gains, thresholds)?
                };
                Ok(v)
            }
        },
        Scheme::Ebopa => {
            let c = (objective == Objective::PowerMin).then_some(thresholds);
            let (_, v) = allocators::ebopa(topology, gains, objective, c)?;
            Ok(v)
        }
        Scheme::Ebpa => {
            let allocation = allocators::ebpa(topology, gains)?;
            let caps = allocators::user_capacities(topology, gains, &allocation)?;
            match objective {
                Objective::SumCapacity => Ok(caps.iter().sum()),
                Objective::MaxMin => Ok(caps.iter().copied().fold(f64::INFINITY, f64::min)),
                Objective::PowerMin => {
                    for (c, t) in caps.iter().zip(thresholds) {
                        if c < t {
                            return Err(Error::InfeasibleInstance {
                                required: *t,
                                available: *c,
                                phase: " (equal allocation)".into(),
                            });
                        }
                    }
                    let power = allocation.source_shares.iter().map(|s| s.power()).sum::<f64>()
                        + allocation
                            .relay_shares
                            .as_ref()
                            .map(|r| r.iter().map(|s| s.power()).sum::<f64>())
                            .unwrap_or(0.0);
                    Ok(power)
                }
            }
        }
    }
}

/// The swept parameter of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    RelayPower,
    SourcePower,
    Bandwidth,
    Threshold,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::RelayPower => "relay_power",
            SweepParameter::SourcePower => "source_power",
            SweepParameter::Bandwidth => "bandwidth",
            SweepParameter::Threshold => "threshold",
        }
    }

    fn apply(self, config: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = config.clone();
        match self {
            SweepParameter::RelayPower => c.relay_budgets.iter_mut().for_each(|b| *b = value),
            SweepParameter::SourcePower => c.source_budgets.iter_mut().for_each(|b| *b = value),
            SweepParameter::Bandwidth => c.total_bandwidth = value,
            SweepParameter::Threshold => c.thresholds = ThresholdSpec::Fixed(value),
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// One (value, scheme) aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub scheme: Scheme,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    /// Runs the scheme could not satisfy (infeasible thresholds).
    pub infeasible: usize,
    /// Runs lost to solver errors; must be zero on acceptance sweeps.
    pub failures: usize,
}

/// Mean pairwise improvement of the first scheme over the baseline, over
/// runs where both produced a value.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementRow {
    pub value: f64,
    pub scheme: Scheme,
    pub baseline: Scheme,
    pub mean_ratio: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub objective: Objective,
    pub rows: Vec<SweepRow>,
    pub improvements: Vec<ImprovementRow>,
}

pub fn scheme_name(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::Obpa => "obpa",
        Scheme::Ebopa => "ebopa",
        Scheme::Ebpa => "ebpa",
    }
}

pub fn objective_name(objective: Objective) -> &'static str {
    match objective {
        Objective::SumCapacity => "sum_capacity",
        Objective::MaxMin => "max_min",
        Objective::PowerMin => "power_min",
    }
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs every scheme on every (value, run) scenario and aggregates. Runs
/// execute in parallel; aggregation order is fixed by run index, so the
/// table does not depend on the worker count.
pub fn run_sweep(
    config: &ScenarioConfig,
    sweep: &Sweep,
    schemes: &[Scheme],
    objective: Objective,
) -> Result<SweepTable> {
    config.validate()?;
    if sweep.values.is_empty() {
        return Err(Error::InvalidInput("empty sweep".into()));
    }
    let mut rows = Vec::new();
    let mut improvements = Vec::new();

    for &value in &sweep.values {
        let local = sweep.parameter.apply(config, value);
        // per run, per scheme: Ok(metric), infeasible, or failure
        let outcomes: Vec<Result<Vec<Result<f64>>>> = (0..local.runs)
            .into_par_iter()
            .map(|run| {
                let (topology, gains, thresholds) = generate_scenario(&local, run)?;
                Ok(schemes
                    .iter()
                    .map(|&s| solve_metric(&topology, &gains, &thresholds, s, objective))
                    .collect())
            })
            .collect();
        let mut per_scheme: Vec<Vec<Option<f64>>> = vec![Vec::new(); schemes.len()];
        let mut infeasible = vec![0usize; schemes.len()];
        let mut failures = vec![0usize; schemes.len()];
        for run_result in outcomes {
            let metrics = run_result?;
            for (si, m) in metrics.into_iter().enumerate() {
                match m {
                    Ok(v) => per_scheme[si].push(Some(v)),
                    Err(Error::InfeasibleInstance { .. }) | Err(Error::InfeasiblePower { .. }) => {
                        infeasible[si] += 1;
                        per_scheme[si].push(None);
                    }
                    Err(_) => {
                        failures[si] += 1;
                        per_scheme[si].push(None);
                    }
                }
            }
        }
        for (si, &scheme) in schemes.iter().enumerate() {
            let ok: Vec<f64> = per_scheme[si].iter().filter_map(|&v| v).collect();
            let (mean, stderr) = mean_stderr(&ok);
            rows.push(SweepRow {
                value,
                scheme,
                mean,
                stderr,
                n: ok.len(),
                infeasible: infeasible[si],
                failures: failures[si],
            });
        }
        // pairwise improvements of the first scheme over each other one
        if schemes.len() > 1 {
            for bi in 1..schemes.len() {
                let ratios: Vec<f64> = (0..local.runs)
                    .filter_map(|r| match (per_scheme[0][r], per_scheme[bi][r]) {
                        (Some(a), Some(b)) if b != 0.0 => Some(match objective {
                            Objective::PowerMin => (b - a) / b,
                            _ => (a - b) / b,
                        }),
                        _ => None,
                    })
                    .collect();
                let (mean_ratio, _) = mean_stderr(&ratios);
                improvements.push(ImprovementRow {
                    value,
                    scheme: schemes[0],
                    baseline: schemes[bi],
                    mean_ratio,
                    n: ratios.len(),
                });
            }
        }
    }
    Ok(SweepTable {
        parameter: sweep.parameter,
        objective,
        rows,
        improvements,
    })
}

impl SweepTable {
    /// Tab-separated rendering with a header row; byte-deterministic.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("parameter\tvalue\tscheme\tmean\tstderr\tn\tinfeasible\tfailures\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                self.parameter.name(),
                r.value,
                scheme_name(r.scheme),
                r.mean,
                r.stderr,
                r.n,
                r.infeasible,
                r.failures
            ));
        }
        for r in &self.improvements {
            out.push_str(&format!(
                "{}\t{}\t{}_vs_{}\t{}\t\t{}\t\t\n",
                self.parameter.name(),
                r.value,
                scheme_name(r.scheme),
                scheme_name(r.baseline),
                r.mean_ratio,
                r.n
            ));
        }
        out
    }
}

/// One point of the admission-probability curve.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionPoint {
    pub threshold: f64,
    pub obpa: f64,
    pub ebopa: f64,
    pub ebpa: f64,
}

/// Whether all users fit under the optimal allocation: each phase's total
/// bandwidth requirement within the band.
fn obpa_admissible(
    topology: &NetworkTopology,
    gains: &ChannelGains,
    thresholds: &[f64],
) -> Result<bool> {
    let w = topology.total_bandwidth;
    let all: Vec<usize> = (0..topology.n_users()).collect();
    let p1 = GProblem::phase1(topology, gains, thresholds)?;
    let d1 = p1.demand(&all);
    if !d1.feasible || d1.total > w {
        return Ok(false);
    }
    if gains.is_relayed() {
        let p2 = GProblem::phase2(topology, gains, thresholds)?;
        let d2 = p2.demand(&all);
        if !d2.feasible || d2.total > w {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fraction of runs in which every user's threshold is satisfiable, per
/// scheme, for each swept threshold.
pub fn admission_probability(
    config: &ScenarioConfig,
    thresholds: &[f64],
) -> Result<Vec<AdmissionPoint>> {
    config.validate()?;
    let mut points = Vec::with_capacity(thresholds.len());
    for &c in thresholds {
        let local = SweepParameter::Threshold.apply(config, c);
        let flags: Vec<Result<(bool, bool, bool)>> = (0..local.runs)
            .into_par_iter()
            .map(|run| {
                let (topology, gains, th) = generate_scenario(&local, run)?;
                let obpa = obpa_admissible(&topology, &gains, &th)?;
                let ebopa =
                    solve_metric(&topology, &gains, &th, Scheme::Ebopa, Objective::PowerMin)
                        .is_ok();
                let ebpa =
                    solve_metric(&topology, &gains, &th, Scheme::Ebpa, Objective::PowerMin)
                        .is_ok();
                Ok((obpa, ebopa, ebpa))
            })
            .collect();
        let mut counts = (0usize, 0usize, 0usize);
        for f in flags {
            let (a, b, c) = f?;
            counts.0 += a as usize;
            counts.1 += b as usize;
            counts.2 += c as usize;
        }
        let n = local.runs as f64;
        points.push(AdmissionPoint {
            threshold: c,
            obpa: counts.0 as f64 / n,
            ebopa: counts.1 as f64 / n,
            ebpa: counts.2 as f64 / n,
        });
    }
    Ok(points)
}

/// One row of the greedy-vs-exhaustive admission benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub c0: f64,
    pub greedy_admitted: f64,
    pub exhaustive_admitted: f64,
    pub greedy_calls: f64,
    pub exhaustive_calls: f64,
    /// Greedy wall time over exhaustive wall time.
    pub time_ratio: f64,
}

/// Runs both admission algorithms on the benchmark setups over a range of
/// threshold floors. Sequential on purpose: the wall-time ratio is part of
/// the output.
pub fn greedy_benchmark(
    setup: u8,
    c0_values: &[f64],
    runs: usize,
    master_seed: u64,
) -> Result<Vec<BenchmarkRow>> {
    let mut rows = Vec::with_capacity(c0_values.len());
    for &c0 in c0_values {
        let mut config = ScenarioConfig::greedy_setup(setup, c0)?;
        config.runs = runs;
        config.master_seed = master_seed;
        let relayed = config.user_relays.is_some();
        let mut admitted = (0usize, 0usize);
        let mut calls = (0usize, 0usize);
        let mut times = (0.0f64, 0.0f64);
        for run in 0..runs {
            let (topology, gains, th) = generate_scenario(&config, run)?;
            let t0 = std::time::Instant::now();
            let greedy = if relayed {
                greedy_admission_relay(&topology, &gains, &th)?
            } else {
                greedy_admission_no_relay(&topology, &gains, &th)?
            };
            let t1 = std::time::Instant::now();
            let exhaustive = if relayed {
                exhaustive_admission_relay(&topology, &gains, &th)?
            } else {
                exhaustive_admission_no_relay(&topology, &gains, &th)?
            };
            let t2 = std::time::Instant::now();
            admitted.0 += greedy.admitted.len();
            admitted.1 += exhaustive.admitted.len();
            calls.0 += greedy.oracle_calls;
            calls.1 += exhaustive.oracle_calls;
            times.0 += (t1 - t0).as_secs_f64();
            times.1 += (t2 - t1).as_secs_f64();
        }
        let n = runs as f64;
        rows.push(BenchmarkRow {
            c0,
            greedy_admitted: admitted.0 as f64 / n,
            exhaustive_admitted: admitted.1 as f64 / n,
            greedy_calls: calls.0 as f64 / n,
            exhaustive_calls: calls.1 as f64 / n,
            time_ratio: if times.1 > 0.0 { times.0 / times.1 } else { f64::NAN },
        });
    }
    Ok(rows)
}

/// Machine-readable record of what produced a result set.
pub fn manifest(config: &ScenarioConfig) -> Result<String> {
    #[derive(Serialize)]
    struct Manifest<'a> {
        package_version: &'static str,
        config: &'a ScenarioConfig,
    }
    toml::to_string_pretty(&Manifest {
        package_version: env!("CARGO_PKG_VERSION"),
        config,
    })
    .map_err(|e| Error::Scenario(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn path_loss_formula() {
        assert_eq!(path_loss(1.0), 1.0);
        assert_eq!(path_loss(2.0), 0.25);
    }

    #[test]
    fn fading_mean_matches_variance() {
        let mut rng = stream_rng(7, 0, 9);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| fading_power(&mut rng, 5.0)).sum::<f64>() / n as f64;
        assert!((mean - 5.0).abs() / 5.0 < 0.05, "mean {mean}");
    }

    #[test]
    fn generation_is_deterministic() {
        let config = ScenarioConfig::default_network();
        let (t1, g1, c1) = generate_scenario(&config, 3).unwrap();
        let (t2, g2, c2) = generate_scenario(&config, 3).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(c1, c2);
        assert_eq!(t1.users, t2.users);
        let (_, g3, _) = generate_scenario(&config, 4).unwrap();
        assert_ne!(g1, g3);
    }

    #[test]
    fn default_config_shape() {
        let config = ScenarioConfig::default_network();
        config.validate().unwrap();
        let (topology, gains, thresholds) = generate_scenario(&config, 0).unwrap();
        assert_eq!(topology.n_users(), 4);
        assert_eq!(topology.sources.len(), 4);
        assert_eq!(topology.relays.len(), 2);
        assert!(gains.is_relayed());
        assert_eq!(thresholds, vec![1.0; 4]);
    }

    #[test]
    fn setups_validate() {
        for id in 1..=4 {
            let config = ScenarioConfig::greedy_setup(id, 0.5).unwrap();
            config.validate().unwrap();
            assert_eq!(config.n_users(), 8);
            assert_eq!(config.user_relays.is_some(), id >= 3);
        }
        assert!(ScenarioConfig::greedy_setup(5, 0.5).is_err());
    }

    #[test]
    fn thresholds_stay_in_interval() {
        let config = ScenarioConfig::greedy_setup(1, 2.0).unwrap();
        let (_, _, c) = generate_scenario(&config, 0).unwrap();
        for v in c {
            assert!((2.0..=6.0).contains(&v));
        }
    }

    #[test]
    fn single_cell_sweep() {
        let mut config = ScenarioConfig::default_network();
        config.runs = 1;
        let sweep = Sweep {
            parameter: SweepParameter::Bandwidth,
            values: vec![10.0],
        };
        let table = run_sweep(&config, &sweep, &[Scheme::Ebpa], Objective::SumCapacity).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.improvements.is_empty());
        assert_eq!(table.rows[0].n, 1);
        assert!(table.rows[0].mean > 0.0);
    }

    #[test]
    fn sweep_is_worker_independent() {
        let mut config = ScenarioConfig::default_network();
        config.runs = 6;
        let sweep = Sweep {
            parameter: SweepParameter::RelayPower,
            values: vec![20.0, 40.0],
        };
        let schemes = [Scheme::Ebopa, Scheme::Ebpa];
        let solo = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let t1 = solo
            .install(|| run_sweep(&config, &sweep, &schemes, Objective::SumCapacity))
            .unwrap();
        let t2 = many
            .install(|| run_sweep(&config, &sweep, &schemes, Objective::SumCapacity))
            .unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.to_tsv(), t2.to_tsv());
    }

    #[test]
    fn admission_probability_extremes() {
        let mut config = ScenarioConfig::default_network();
        config.runs = 10;
        let points = admission_probability(&config, &[1e-6, 1e6]).unwrap();
        assert_eq!(points[0].obpa, 1.0);
        assert_eq!(points[0].ebopa, 1.0);
        assert_eq!(points[0].ebpa, 1.0);
        assert_eq!(points[1].obpa, 0.0);
        assert_eq!(points[1].ebpa, 0.0);
    }

    #[test]
    fn benchmark_greedy_never_beats_exhaustive() {
        let rows = greedy_benchmark(1, &[1.0], 5, 11).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!(r.greedy_admitted <= r.exhaustive_admitted + 1e-12);
        assert!(r.greedy_calls <= r.exhaustive_calls);
    }

    #[test]
    fn mean_stderr_basics() {
        let (m, s) = mean_stderr(&[2.0, 4.0, 6.0]);
        assert_relative_eq!(m, 4.0);
        assert_relative_eq!(s, (4.0f64 / 3.0).sqrt());
        let (m1, s1) = mean_stderr(&[3.5]);
        assert_relative_eq!(m1, 3.5);
        assert_eq!(s1, 0.0);
    }
}
