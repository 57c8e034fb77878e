//! Simulation driver: scenario presets, per-repetition runs of each method,
//! CSV output, summaries and boxplots.

mod score;
mod summary;
mod svg;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use score::{k_means, score_baseline, KMeansResult};
pub use summary::{summarize, Summary};
pub use svg::{emit_boxplot_svg, render_boxplot_svg};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, LabelVector};
use crate::loss::{misclassification, weighted_misclassification};
use crate::model::{sample_adjacency_with, validate_space, DcbmParams, ProbabilityPolicy, SpaceDescriptor, ThetaLaw};
use crate::refine::{detect_provable, refine_iterated};
use crate::rng::{self, tags};
use crate::spectral::{initialize, InitConfig, Threshold, DEFAULT_C1};

pub const CSV_HEADER: &str = "scenario,method,rep,seed,loss,weighted_loss,wall_time_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Init,
    Refine1,
    Refine10,
    Provable,
    Score,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Init, Method::Refine1, Method::Refine10, Method::Provable, Method::Score];

    pub fn name(self) -> &'static str {
        match self {
            Method::Init => "init",
            Method::Refine1 => "refine1",
            Method::Refine10 => "refine10",
            Method::Provable => "provable",
            Method::Score => "score",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_beta() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.1
}

fn default_restarts() -> usize {
    10
}

fn default_c1() -> f64 {
    DEFAULT_C1
}

fn default_iterations() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub p: f64,
    pub q: f64,
    pub theta_law: ThetaLaw,
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Size and normalization slack used when validating each draw.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_c1")]
    pub c1: f64,
    /// Rounds of the iterated refinement.
    #[serde(default = "default_iterations")]
    pub refine_iterations: usize,
    /// Record wall-clock times; off by default so that output is reproducible.
    #[serde(default)]
    pub timings: bool,
}

impl ScenarioConfig {
    /// Two communities of 100 and 200 nodes, `p = 0.1`, `q = 3p/10`,
    /// `theta_i = |Z_i| + 1 - (2 pi)^(-1/2)` with `Z_i ~ N(0, 1/4)`.
    pub fn scenario1() -> Self {
        Self {
            name: "scenario1".into(),
            n: 300,
            k: 2,
            sizes: vec![100, 200],
            p: 0.1,
            q: 0.03,
            theta_law: ThetaLaw::Halfnormal { sd: 0.5 },
            repetitions: 100,
            seed: 1,
            methods: Method::ALL.to_vec(),
            beta: 1.5,
            delta: default_delta(),
            restarts: default_restarts(),
            c1: DEFAULT_C1,
            refine_iterations: default_iterations(),
            timings: false,
        }
    }

    /// Four communities of 200 nodes, `p = 0.1`, `q = 3p/10`, Pareto theta
    /// with shape 5 and scale 4/5. The leave-one-out method is left out by
    /// default because it needs `n` extra initializations per repetition.
    pub fn scenario2() -> Self {
        Self {
            name: "scenario2".into(),
            n: 800,
            k: 4,
            sizes: vec![200; 4],
            p: 0.1,
            q: 0.03,
            theta_law: ThetaLaw::Pareto { shape: 5.0, scale: 0.8 },
            repetitions: 100,
            seed: 2,
            methods: vec![Method::Init, Method::Refine1, Method::Refine10, Method::Score],
            beta: 1.0,
            ..Self::scenario1()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "scenario1" => Ok(Self::scenario1()),
            "scenario2" => Ok(Self::scenario2()),
            other => Err(Error::Config(format!("unknown scenario preset {other:?}"))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.sizes.len() != self.k || self.k == 0 {
            return fail(format!("{} sizes given for k = {}", self.sizes.len(), self.k));
        }
        if self.sizes.iter().sum::<usize>() != self.n {
            return fail(format!("sizes sum to {} but n = {}", self.sizes.iter().sum::<usize>(), self.n));
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.methods.is_empty() {
            return fail("no methods selected".into());
        }
        if !(0.0 <= self.q && self.q <= self.p && self.p <= 1.0) {
            return fail(format!("need 0 <= q <= p <= 1, got p = {}, q = {}", self.p, self.q));
        }
        if !(self.beta >= 1.0 && self.delta >= 0.0) {
            return fail(format!("need beta >= 1 and delta >= 0, got {} and {}", self.beta, self.delta));
        }
        if self.refine_iterations == 0 || self.restarts == 0 || !(self.c1 > 0.0) {
            return fail("refine_iterations, restarts and c1 must be positive".into());
        }
        Ok(())
    }

    fn init_config(&self, seed: u64) -> InitConfig {
        InitConfig { threshold: Threshold::AverageDegree(self.c1), restarts: self.restarts, seed, ..InitConfig::default() }
    }

    /// Seed of repetition `rep`.
    pub fn repetition_seed(&self, rep: usize) -> u64 {
        rng::derive(rng::derive(self.seed, tags::REPETITION), rep as u64)
    }

    /// Ground truth and graph of repetition `rep`.
    pub fn draw(&self, rep: usize) -> Result<(DcbmParams, AdjacencyMatrix)> {
        let seed = self.repetition_seed(rep);
        let theta = self.theta_law.sample(self.n, rng::derive(seed, tags::THETA))?;
        let params = DcbmParams::planted(theta, self.p, self.q, LabelVector::from_sizes(&self.sizes))?;
        let desc = SpaceDescriptor { p: self.p, q: self.q, k: self.k, beta: self.beta, delta: self.delta, alpha: None };
        let report = validate_space(&params, &desc);
        if !report.pass {
            log::warn!("{} rep {rep}: draw outside the parameter space: {:?}", self.name, report.violations);
        }
        let a = sample_adjacency_with(&params, rng::derive(seed, tags::GRAPH), ProbabilityPolicy::Clamp)?;
        Ok((params, a))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub scenario: String,
    pub method: Method,
    pub rep: usize,
    pub seed: u64,
    /// Misclassification proportion; `None` when the run failed.
    pub loss: Option<f64>,
    /// `(1/n) sum_i theta_i 1{node i misclassified}` under the best relabeling.
    pub weighted_loss: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub error: Option<String>,
}

fn evaluate(estimate: &LabelVector, params: &DcbmParams) -> Result<(f64, f64)> {
    let loss = misclassification(estimate, params.z())?.value;
    let weighted = weighted_misclassification(estimate, params.z(), params.theta())?.value / params.n() as f64;
    Ok((loss, weighted))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> (Result<T>, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn make_row(config: &ScenarioConfig, method: Method, rep: usize, scored: Result<(f64, f64)>, ms: f64) -> RunResult {
    if let Err(e) = &scored {
        log::error!("{} rep {rep} {method}: {e}", config.name);
    }
    RunResult {
        scenario: config.name.clone(),
        method,
        rep,
        seed: config.repetition_seed(rep),
        loss: scored.as_ref().ok().map(|s| s.0),
        weighted_loss: scored.as_ref().ok().map(|s| s.1),
        wall_time_ms: config.timings.then_some(ms),
        error: scored.err().map(|e| e.to_string()),
    }
}

/// Runs every method on repetition `rep` of `config`.
pub fn run_repetition(config: &ScenarioConfig, rep: usize) -> Vec<RunResult> {
    let seed = config.repetition_seed(rep);
    let (params, a) = match config.draw(rep) {
        Ok(draw) => draw,
        Err(e) => {
            return config.methods.iter().map(|&m| make_row(config, m, rep, Err(e.clone()), 0.0)).collect();
        }
    };
    let init_config = config.init_config(rng::derive(seed, tags::INIT));
    let needs_init = config.methods.iter().any(|m| matches!(m, Method::Init | Method::Refine1 | Method::Refine10));
    let (init, init_ms) = if needs_init {
        timed(|| initialize(&a, config.k, &init_config))
    } else {
        (Err(Error::Domain("initialization skipped".into())), 0.0)
    };
    config
        .methods
        .iter()
        .map(|&method| {
            let (outcome, ms) = match method {
                Method::Init => (init.clone(), init_ms),
                Method::Refine1 | Method::Refine10 => {
                    let rounds = if method == Method::Refine1 { 1 } else { config.refine_iterations };
                    let (out, ms) = timed(|| init.clone().and_then(|z0| refine_iterated(&a, &z0, config.k, rounds)));
                    (out, ms + init_ms)
                }
                Method::Provable => timed(|| detect_provable(&a, config.k, &init_config)),
                Method::Score => timed(|| score_baseline(&a, config.k, rng::derive(seed, tags::SCORE))),
            };
            make_row(config, method, rep, outcome.and_then(|z| evaluate(&z, &params)), ms)
        })
        .collect()
}

/// All repetitions of `config`, ordered by method (in configuration order) and then repetition.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<RunResult>> {
    config.validate()?;
    let mut rows: Vec<RunResult> = (0..config.repetitions)
        .into_par_iter()
        .flat_map_iter(|rep| run_repetition(config, rep))
        .collect();
    let rank = |m: Method| config.methods.iter().position(|&x| x == m).unwrap_or(usize::MAX);
    rows.sort_by_key(|r| (rank(r.method), r.rep));
    Ok(rows)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn write_csv<W: Write>(mut out: W, results: &[RunResult]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.scenario,
            r.method,
            r.rep,
            r.seed,
            fmt_opt(r.loss),
            fmt_opt(r.weighted_loss),
            fmt_opt(r.wall_time_ms)
        )?;
    }
    Ok(())
}

pub fn format_csv(results: &[RunResult]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, results).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}
