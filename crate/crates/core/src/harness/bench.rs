//! Failure-rate estimation and the benchmark grid.

use rayon::prelude::*;
use serde::Deserialize;

use super::gen::{gen_planted, PlantedConfig};
use crate::error::{Error, Result};
use crate::ring::RingSpec;
use crate::verify::{derive_seed, run, verify_exact, Algorithm, Answer, Instance, Params};

/// Environment variable capping the worker threads (0 or unset = auto).
pub const THREADS_ENV: &str = "MMV_THREADS";

/// Instances are derived from `seed ^ INSTANCE_SALT` so they never share a
/// seed with the verifier runs of the same trial index.
const INSTANCE_SALT: u64 = 0x005E_ED0F_1257_A4CE;

pub const CSV_HEADER: [&str; 10] =
    ["alg", "ring", "n", "t", "eps", "trials", "false_accepts", "random_bits_mean", "elem_ops_mean", "wall_nanos_mean"];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub alg: Algorithm,
    pub ring: RingSpec,
    pub n: usize,
    pub t: u64,
    pub eps: f64,
    pub trials: u64,
    pub false_accepts: u64,
    /// Verdicts of `NotEqual` on true instances; always 0 for a correct
    /// one-sided verifier.
    pub false_rejects: u64,
    pub random_bits_mean: f64,
    pub elem_ops_mean: f64,
    pub wall_nanos_mean: f64,
}

impl BenchRow {
    pub fn false_accept_rate(&self) -> f64 {
        self.false_accepts as f64 / self.trials as f64
    }

    pub fn csv_record(&self) -> [String; 10] {
        [
            self.alg.to_string(),
            self.ring.to_string(),
            self.n.to_string(),
            self.t.to_string(),
            format!("{}", self.eps),
            self.trials.to_string(),
            self.false_accepts.to_string(),
            format!("{:.4}", self.random_bits_mean),
            format!("{:.4}", self.elem_ops_mean),
            format!("{:.1}", self.wall_nanos_mean),
        ]
    }
}

/// Seed of the `j`-th pooled instance for a master seed.
pub fn instance_seed(master: u64, j: u64) -> u64 {
    derive_seed(master ^ INSTANCE_SALT, j)
}

/// The pooled instances used by [`estimate_failure_rate`].
pub fn instance_pool(cfg: &PlantedConfig, pool: usize) -> Result<Vec<Instance>> {
    (0..pool.max(1) as u64)
        .into_par_iter()
        .map(|j| gen_planted(&PlantedConfig { seed: instance_seed(cfg.seed, j), ..cfg.clone() }))
        .collect()
}

#[derive(Default, Clone, Copy)]
struct Totals {
    false_accepts: u64,
    false_rejects: u64,
    random_bits: u128,
    elem_ops: u128,
    wall_nanos: u128,
}

impl Totals {
    fn merge(self, o: Totals) -> Totals {
        Totals {
            false_accepts: self.false_accepts + o.false_accepts,
            false_rejects: self.false_rejects + o.false_rejects,
            random_bits: self.random_bits + o.random_bits,
            elem_ops: self.elem_ops + o.elem_ops,
            wall_nanos: self.wall_nanos + o.wall_nanos,
        }
    }
}

/// Runs `trials` seeded trials of `alg`. Trial `i` runs on pooled instance
/// `i mod pool` with verifier seed `derive_seed(cfg.seed, i)`; the result
/// does not depend on the number of threads.
pub fn estimate_failure_rate(
    alg: Algorithm,
    cfg: &PlantedConfig,
    params: &Params,
    trials: u64,
    pool: usize,
) -> Result<BenchRow> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let instances = instance_pool(cfg, pool)?;
    let truths: Vec<Answer> =
        instances.par_iter().map(|inst| verify_exact(inst).map(|v| v.answer)).collect::<Result<_>>()?;
    let totals = (0..trials)
        .into_par_iter()
        .map(|i| {
            let j = (i % instances.len() as u64) as usize;
            let v = run(alg, &instances[j], params, derive_seed(cfg.seed, i))?;
            Ok::<_, Error>(Totals {
                false_accepts: (v.answer == Answer::Equal && truths[j] == Answer::NotEqual) as u64,
                false_rejects: (v.answer == Answer::NotEqual && truths[j] == Answer::Equal) as u64,
                random_bits: v.stats.random_bits as u128,
                elem_ops: v.stats.elem_ops as u128,
                wall_nanos: v.stats.wall_nanos as u128,
            })
        })
        .try_reduce(Totals::default, |a, b| Ok(a.merge(b)))?;
    let mean = |x: u128| x as f64 / trials as f64;
    Ok(BenchRow {
        alg,
        ring: cfg.ring.clone(),
        n: cfg.n,
        t: params.t.unwrap_or(cfg.s),
        eps: params.eps,
        trials,
        false_accepts: totals.false_accepts,
        false_rejects: totals.false_rejects,
        random_bits_mean: mean(totals.random_bits),
        elem_ops_mean: mean(totals.elem_ops),
        wall_nanos_mean: mean(totals.wall_nanos),
    })
}

/// A size given as a number or relative to `n` / `s`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SizeExpr {
    Value(u64),
    Symbol(String),
}

impl SizeExpr {
    fn eval(&self, n: usize, s: Option<u64>) -> Result<u64> {
        match self {
            SizeExpr::Value(v) => Ok(*v),
            SizeExpr::Symbol(x) if x == "n" => Ok(n as u64),
            SizeExpr::Symbol(x) if x == "s" => s.ok_or_else(|| Error::Config("`s` cannot refer to itself".into())),
            SizeExpr::Symbol(x) => Err(Error::Config(format!("unknown size `{x}`; use a number, \"n\" or \"s\""))),
        }
    }
}

/// Benchmark grid, read from TOML:
///
/// ```toml
/// seed = 7
/// trials = 200
/// ring = "int:1024"
/// algs = ["det-sparse", "rand-sparse"]
/// n = [64, 128]
/// s = [1, "n"]       # planted errors
/// eps = [0.25]       # rand-sparse failure bound
/// t = "s"            # sparsity parameter handed to the verifiers
/// pool = 8           # distinct instances per grid cell
/// rounds = 1         # freivalds rounds
/// ```
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub trials: u64,
    pub ring: String,
    #[serde(default)]
    pub algs: Vec<String>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default = "default_s")]
    pub s: Vec<SizeExpr>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_t")]
    pub t: SizeExpr,
    #[serde(default = "default_pool")]
    pub pool: usize,
    #[serde(default = "default_rounds")]
    pub rounds: u32,
}

fn default_s() -> Vec<SizeExpr> {
    vec![SizeExpr::Value(1)]
}
fn default_eps() -> Vec<f64> {
    vec![0.25]
}
fn default_t() -> SizeExpr {
    SizeExpr::Symbol("s".into())
}
fn default_pool() -> usize {
    8
}
fn default_rounds() -> u32 {
    1
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: BenchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if cfg.pool == 0 {
            return Err(Error::Config("pool must be at least 1".into()));
        }
        Ok(cfg)
    }
}

/// Thread pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs the grid in the order alg, n, s, eps.
pub fn bench_rows(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let ring: RingSpec = cfg.ring.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    let algs: Vec<Algorithm> =
        cfg.algs.iter().map(|a| a.parse().map_err(|e: Error| Error::Config(e.to_string()))).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &alg in &algs {
        for &n in &cfg.n {
            for s in &cfg.s {
                let s = s.eval(n, None)?;
                for &eps in &cfg.eps {
                    let t = cfg.t.eval(n, Some(s))?;
                    let planted = PlantedConfig { n, ring: ring.clone(), s, seed: cfg.seed };
                    let params = Params { t: Some(t), eps, rounds: cfg.rounds, ..Params::default() };
                    rows.push(estimate_failure_rate(alg, &planted, &params, cfg.trials, cfg.pool)?);
                }
            }
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r.csv_record()).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses a config, runs it on the [`THREADS_ENV`]-sized pool and renders
/// the CSV.
pub fn bench_run(config_text: &str) -> Result<String> {
    let cfg = BenchConfig::from_toml(config_text)?;
    let rows = thread_pool()?.install(|| bench_rows(&cfg))?;
    rows_to_csv(&rows)
}
