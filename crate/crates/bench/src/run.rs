//! Strategy comparison over instances, profiles and strategies.

use std::io;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use riodbg_core::{run_session, CautiousnessState, FaultPriors, QueryOptions, SessionConfig, SimulatedOracle, StrategyKind};
use serde::{Deserialize, Serialize};

use crate::instance::AlignedInstance;
use crate::profile::PriorProfile;
use crate::target::{fix_target, TargetMode};

/// Session settings shared by every run; priors come from the profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub sigma: f64,
    pub cautiousness: CautiousnessState,
    pub target: TargetMode,
    /// Base seed; instance `i` fixes its target with `seed + i`.
    pub seed: u64,
    pub query_options: QueryOptions,
    /// Worker threads; 0 uses the available parallelism.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let priors = FaultPriors::Axiom { probs: Default::default(), default: None };
        let base = SessionConfig::new(StrategyKind::Rio, priors);
        BenchConfig {
            n: base.n,
            // Sessions run until the target is the only diagnosis left, so `q`
            // counts the queries needed to identify it.
            sigma: 1.0,
            cautiousness: base.cautiousness,
            target: TargetMode::FromReference,
            seed: 0,
            query_options: QueryOptions::default(),
            threads: 0,
        }
    }
}

/// One session. Serializes to the CSV columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub seed: u64,
    pub profile: String,
    pub strategy: StrategyKind,
    pub q: usize,
    pub debug_ms: f64,
    pub react_ms_mean: f64,
    pub found_target: bool,
    pub dt_size: usize,
    #[serde(skip)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub profile: String,
    pub strategy: StrategyKind,
    pub runs: usize,
    pub mean_q: f64,
    pub mean_debug_ms: f64,
    pub found_target: usize,
}

/// RIO against the other two strategies over matched sessions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trend {
    /// Matched (instance, profile) sessions with all three strategies.
    pub sessions: usize,
    pub mean_rio: f64,
    /// Mean over sessions of `max(q_SPL, q_ENT)`.
    pub mean_worse: f64,
    /// Fraction of sessions with `q_RIO <= min(q_SPL, q_ENT)`.
    pub rio_best_fraction: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is UTF-8")
    }

    /// Mean figures per (profile, strategy), in order of first appearance.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut keys: Vec<(String, StrategyKind)> = Vec::new();
        for row in &self.rows {
            let key = (row.profile.clone(), row.strategy);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys.into_iter()
            .map(|(profile, strategy)| {
                let rows: Vec<&BenchRow> =
                    self.rows.iter().filter(|r| r.profile == profile && r.strategy == strategy).collect();
                let n = rows.len() as f64;
                Aggregate {
                    runs: rows.len(),
                    mean_q: rows.iter().map(|r| r.q as f64).sum::<f64>() / n,
                    mean_debug_ms: rows.iter().map(|r| r.debug_ms).sum::<f64>() / n,
                    found_target: rows.iter().filter(|r| r.found_target).count(),
                    profile,
                    strategy,
                }
            })
            .collect()
    }

    /// Trend figures over sessions of `profile`, or over all profiles.
    pub fn trend(&self, profile: Option<&str>) -> Trend {
        let mut sessions: Vec<(&str, &str)> = Vec::new();
        for row in &self.rows {
            let key = (row.instance_id.as_str(), row.profile.as_str());
            if profile.is_none_or(|p| p == row.profile) && !sessions.contains(&key) {
                sessions.push(key);
            }
        }
        let q = |inst: &str, prof: &str, kind: StrategyKind| {
            self.rows
                .iter()
                .find(|r| r.instance_id == inst && r.profile == prof && r.strategy == kind)
                .map(|r| r.q as f64)
        };
        let mut matched = Vec::new();
        for (inst, prof) in sessions {
            if let (Some(spl), Some(ent), Some(rio)) =
                (q(inst, prof, StrategyKind::Spl), q(inst, prof, StrategyKind::Ent), q(inst, prof, StrategyKind::Rio))
            {
                matched.push((spl, ent, rio));
            }
        }
        let n = matched.len() as f64;
        Trend {
            sessions: matched.len(),
            mean_rio: matched.iter().map(|m| m.2).sum::<f64>() / n,
            mean_worse: matched.iter().map(|m| m.0.max(m.1)).sum::<f64>() / n,
            rio_best_fraction: matched.iter().filter(|m| m.2 <= m.0.min(m.1)).count() as f64 / n,
        }
    }
}

/// Runs every (instance, profile, strategy) with a simulated oracle for the
/// instance's fixed target. Rows come back in that nesting order; failures
/// are recorded in the row rather than aborting the run.
pub fn run_benchmark(
    instances: &[AlignedInstance],
    strategies: &[StrategyKind],
    profiles: &[PriorProfile],
    config: &BenchConfig,
) -> BenchReport {
    let mut jobs = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for profile in profiles {
            for &strategy in strategies {
                jobs.push((i, inst, profile, strategy));
            }
        }
    }
    let targets: Vec<_> = instances
        .iter()
        .enumerate()
        .map(|(i, inst)| fix_target(inst, config.target, config.seed + i as u64))
        .collect();

    let threads = match config.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        t => t,
    }
    .min(jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, inst, profile, strategy)) = jobs.get(k) else { break };
                let row = run_one(inst, config.seed + i as u64, &targets[i], profile, strategy, config);
                results.lock().expect("no worker panics while holding the lock")[k] = Some(row);
            });
        }
    });
    BenchReport { rows: results.into_inner().expect("workers joined").into_iter().flatten().collect() }
}

fn run_one(
    inst: &AlignedInstance,
    seed: u64,
    target: &Result<riodbg_core::Diagnosis, crate::target::TargetError>,
    profile: &PriorProfile,
    strategy: StrategyKind,
    config: &BenchConfig,
) -> BenchRow {
    let mut row = BenchRow {
        instance_id: inst.id.clone(),
        seed,
        profile: profile.name().to_owned(),
        strategy,
        q: 0,
        debug_ms: 0.0,
        react_ms_mean: 0.0,
        found_target: false,
        dt_size: 0,
        error: None,
    };
    let target = match target {
        Ok(t) => t,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.dt_size = target.len();
    let session = SessionConfig {
        strategy,
        n: config.n,
        sigma: config.sigma,
        cautiousness: config.cautiousness,
        priors: profile.priors(inst),
        seed,
        query_options: config.query_options,
    };
    let dpi = inst.dpi();
    let mut oracle = SimulatedOracle::for_dpi(&dpi, target);
    match run_session(dpi, session, &mut oracle) {
        Ok((found, trace)) => {
            row.q = trace.queries();
            row.debug_ms = trace.debug_ms;
            row.react_ms_mean = trace.react_ms_mean();
            row.found_target = &found == target;
        }
        Err(failure) => {
            row.q = failure.trace.queries();
            row.debug_ms = failure.trace.debug_ms;
            row.react_ms_mean = failure.trace.react_ms_mean();
            row.error = Some(failure.error.to_string());
        }
    }
    row
}
