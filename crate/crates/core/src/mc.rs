//! Deterministic Monte Carlo estimation and the experiment runner.
//!
//! Each sample index owns its random stream (see [`crate::rng`]). Workers
//! take indices `w, w + W, w + 2W, ...`; values are put back in index order
//! before reduction, so estimates are bit-identical for any worker count.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, MatrixJson};
use crate::linear_examples::{circle_phi, sample_circle, sample_sphere, sphere_phi};
use crate::perm::FinitaryPermutation;
use crate::rep::UnitaryMatrix;
use crate::rng::{stream, StreamRng};
use crate::thoma::ThomaParams;
use crate::vk::sample_config;

pub const DEFAULT_Z: f64 = 4.0;
pub const STDERR_FLOOR: f64 = 1e-12;
pub const MIN_SAMPLES: u64 = 100;

/// Mean and standard error of a batch of samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Produces one value of `φ_ω(g)` per call from a fresh point `ω`.
pub trait Sampler: Sync {
    fn sample(&self, rng: &mut StreamRng) -> Result<Complex64>;
}

impl<F> Sampler for F
where
    F: Fn(&mut StreamRng) -> Result<Complex64> + Sync,
{
    fn sample(&self, rng: &mut StreamRng) -> Result<Complex64> {
        self(rng)
    }
}

/// Count, mean and sum of squared deviations; mergeable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialEstimate {
    pub count: u64,
    pub mean: Complex64,
    pub m2: f64,
    /// Set while every value seen so far is bit-identical.
    constant: Option<Complex64>,
}

impl PartialEstimate {
    pub fn empty() -> Self {
        Self {
            count: 0,
            mean: linalg::ZERO,
            m2: 0.0,
            constant: None,
        }
    }

    /// Two-pass mean and deviation sum over `values` in order.
    pub fn from_values(values: &[Complex64]) -> Self {
        if values.is_empty() {
            return Self::empty();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<Complex64>() / n;
        let m2 = values.iter().map(|x| (x - mean).norm_sqr()).sum();
        let first = values[0];
        let constant = values.iter().all(|x| x == &first).then_some(first);
        Self {
            count: values.len() as u64,
            mean: constant.unwrap_or(mean),
            m2: if constant.is_some() { 0.0 } else { m2 },
            constant,
        }
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let constant = match (self.constant, other.constant) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        };
        Self {
            count: self.count + other.count,
            mean: constant.unwrap_or((self.mean * na + other.mean * nb) / n),
            m2: if constant.is_some() {
                0.0
            } else {
                self.m2 + other.m2 + delta.norm_sqr() * na * nb / n
            },
            constant,
        }
    }

    pub fn finish(&self, seed: u64) -> MCEstimate {
        let stderr = if self.count < 2 || self.constant.is_some() {
            0.0
        } else {
            let n = self.count as f64;
            (self.m2 / (n - 1.0) / n).sqrt()
        };
        MCEstimate {
            mean: self.mean,
            stderr,
            samples: self.count,
            seed,
        }
    }
}

fn default_workers() -> usize {
    rayon::current_num_threads().max(1)
}

/// Values of samples `0..n` in index order, computed by `workers` threads.
pub fn sample_values<S: Sampler + ?Sized>(
    sampler: &S,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<Complex64>> {
    let workers = workers.max(1);
    let run = |i: u64| sampler.sample(&mut stream(seed, i));
    let results: Vec<Result<Complex64>> = if workers == 1 {
        (0..n).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
        let chunks: Vec<Vec<Result<Complex64>>> = pool.install(|| {
            (0..workers as u64)
                .into_par_iter()
                .map(|w| (w..n).step_by(workers).map(run).collect())
                .collect()
        });
        let mut slots: Vec<Option<Result<Complex64>>> = (0..n).map(|_| None).collect();
        for (w, chunk) in chunks.into_iter().enumerate() {
            for (k, v) in chunk.into_iter().enumerate() {
                slots[w + k * workers] = Some(v);
            }
        }
        slots.into_iter().map(|s| s.expect("every index is visited")).collect()
    };
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Sample {
                index: i as u64,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Monte Carlo mean of `n` samples using the default worker count.
pub fn estimate<S: Sampler + ?Sized>(sampler: &S, n: u64, seed: u64) -> Result<MCEstimate> {
    estimate_with_workers(sampler, n, seed, default_workers())
}

pub fn estimate_with_workers<S: Sampler + ?Sized>(
    sampler: &S,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<MCEstimate> {
    if n < MIN_SAMPLES {
        return Err(Error::Config {
            field: "samples",
            msg: format!("need at least {MIN_SAMPLES} samples, got {n}"),
        });
    }
    let values = sample_values(sampler, n, seed, workers)?;
    Ok(PartialEstimate::from_values(&values).finish(seed))
}

/// Result of comparing an estimate against a target value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub zscore: f64,
    pub threshold: f64,
}

/// Pass iff `|mean - target| ≤ z · max(stderr, 1e-12)`.
pub fn compare(est: &MCEstimate, target: Complex64, z: f64) -> Verdict {
    let zscore = (est.mean - target).norm() / est.stderr.max(STDERR_FLOOR);
    Verdict {
        pass: zscore <= z,
        zscore,
        threshold: z,
    }
}

/// `φ_ω(g)` for the sign-cocycle model, sampling `max(support(g))` coordinates.
#[derive(Debug, Clone)]
pub struct VkSampler {
    pub params: ThomaParams,
    pub element: FinitaryPermutation,
}

impl Sampler for VkSampler {
    fn sample(&self, rng: &mut StreamRng) -> Result<Complex64> {
        let n = self.element.max_support().max(1);
        let omega = sample_config(&self.params, n, rng);
        Ok(Complex64::new(omega.phi(&self.element)?, 0.0))
    }
}

/// Indicator of `g.ω = ω` on the same coordinate space.
#[derive(Debug, Clone)]
pub struct StabilizerSampler {
    pub params: ThomaParams,
    pub element: FinitaryPermutation,
}

impl Sampler for StabilizerSampler {
    fn sample(&self, rng: &mut StreamRng) -> Result<Complex64> {
        let n = self.element.max_support().max(1);
        let omega = sample_config(&self.params, n, rng);
        Ok(if omega.is_fixed(&self.element)? {
            linalg::ONE
        } else {
            linalg::ZERO
        })
    }
}

/// `⟨γξ, ξ⟩` for uniform `ξ` on the sphere.
#[derive(Debug, Clone)]
pub struct SphereSampler {
    pub gamma: UnitaryMatrix,
}

impl Sampler for SphereSampler {
    fn sample(&self, rng: &mut StreamRng) -> Result<Complex64> {
        let xi = sample_sphere(self.gamma.dim(), rng);
        sphere_phi(&self.gamma, &xi)
    }
}

/// `z^k` for uniform `z` on the circle.
#[derive(Debug, Clone, Copy)]
pub struct CircleSampler {
    pub k: i64,
}

impl Sampler for CircleSampler {
    fn sample(&self, rng: &mut StreamRng) -> Result<Complex64> {
        circle_phi(sample_circle(rng), self.k)
    }
}

/// Which random positive definite function an experiment samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    /// Sign-cocycle model; elements are permutations, target `τ_{α,β}`.
    Vk {
        #[serde(default)]
        alpha: Vec<f64>,
        #[serde(default)]
        beta: Vec<f64>,
    },
    /// Stabilizer indicator on the same space; target `τ` with `β` merged into `α`.
    Stabilizer {
        #[serde(default)]
        alpha: Vec<f64>,
        #[serde(default)]
        beta: Vec<f64>,
    },
    /// Always `value`; elements are permutations and only label the rows.
    Constant { value: [f64; 2] },
    /// Sphere states; elements are unitary matrices, target `tr(γ)/n`.
    Sphere,
    /// Circle characters; elements are integers `k`, target `[k = 0]`.
    Circle,
}

fn default_z() -> f64 {
    DEFAULT_Z
}

/// Row label, sampler and target value.
type Job = (String, Box<dyn Sampler>, Complex64);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sampler: SamplerSpec,
    pub elements: Vec<serde_json::Value>,
    pub samples: u64,
    pub seed: u64,
    /// CSV path; the JSON summary goes next to it with extension `.json`.
    pub output: PathBuf,
    #[serde(default = "default_z")]
    pub z_threshold: f64,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::Config {
                field: "samples",
                msg: format!("must be at least {MIN_SAMPLES}, got {}", self.samples),
            });
        }
        if !(self.z_threshold > 0.0) {
            return Err(Error::Config {
                field: "z_threshold",
                msg: format!("must be positive, got {}", self.z_threshold),
            });
        }
        if self.elements.is_empty() {
            return Err(Error::Config {
                field: "elements",
                msg: "at least one element is required".into(),
            });
        }
        if self.workers == Some(0) {
            return Err(Error::Config {
                field: "workers",
                msg: "must be at least 1".into(),
            });
        }
        self.jobs().map(|_| ())
    }

    fn params(alpha: &[f64], beta: &[f64]) -> Result<ThomaParams> {
        ThomaParams::new(alpha.to_vec(), beta.to_vec()).map_err(|e| Error::Config {
            field: "sampler",
            msg: e.to_string(),
        })
    }

    fn permutations(&self) -> Result<Vec<FinitaryPermutation>> {
        self.elements
            .iter()
            .map(|v| {
                let s = v.as_str().ok_or_else(|| Error::Config {
                    field: "elements",
                    msg: format!("expected a cycle-notation string, got {v}"),
                })?;
                s.parse().map_err(|e: Error| Error::Config {
                    field: "elements",
                    msg: e.to_string(),
                })
            })
            .collect()
    }

    /// One `(label, sampler, target)` triple per element.
    fn jobs(&self) -> Result<Vec<Job>> {
        let mut jobs: Vec<Job> = Vec::new();
        match &self.sampler {
            SamplerSpec::Vk { alpha, beta } => {
                let params = Self::params(alpha, beta)?;
                for g in self.permutations()? {
                    let target = Complex64::new(params.tau(&g), 0.0);
                    let sampler = VkSampler {
                        params: params.clone(),
                        element: g.clone(),
                    };
                    jobs.push((g.to_string(), Box::new(sampler), target));
                }
            }
            SamplerSpec::Stabilizer { alpha, beta } => {
                let params = Self::params(alpha, beta)?;
                let merged = params.merged_atoms();
                for g in self.permutations()? {
                    let target = Complex64::new(merged.tau(&g), 0.0);
                    let sampler = StabilizerSampler {
                        params: params.clone(),
                        element: g.clone(),
                    };
                    jobs.push((g.to_string(), Box::new(sampler), target));
                }
            }
            SamplerSpec::Constant { value } => {
                let value = Complex64::new(value[0], value[1]);
                for g in self.permutations()? {
                    let sampler = move |_: &mut StreamRng| -> Result<Complex64> { Ok(value) };
                    jobs.push((g.to_string(), Box::new(sampler), value));
                }
            }
            SamplerSpec::Sphere => {
                for (i, v) in self.elements.iter().enumerate() {
                    let m: MatrixJson = serde_json::from_value(v.clone()).map_err(|e| Error::Config {
                        field: "elements",
                        msg: format!("element {i}: expected a matrix of [re, im] pairs ({e})"),
                    })?;
                    let gamma = UnitaryMatrix::new(m.to_matrix()?).map_err(|e| Error::Config {
                        field: "elements",
                        msg: format!("element {i}: {e}"),
                    })?;
                    let target = gamma.normalized_trace();
                    jobs.push((format!("U{i}"), Box::new(SphereSampler { gamma }), target));
                }
            }
            SamplerSpec::Circle => {
                for v in &self.elements {
                    let k = v.as_i64().ok_or_else(|| Error::Config {
                        field: "elements",
                        msg: format!("expected an integer, got {v}"),
                    })?;
                    let target = if k == 0 { linalg::ONE } else { linalg::ZERO };
                    jobs.push((k.to_string(), Box::new(CircleSampler { k }), target));
                }
            }
        }
        Ok(jobs)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub element: String,
    pub mean_re: f64,
    pub mean_im: f64,
    pub stderr: f64,
    pub target_re: f64,
    pub target_im: f64,
    pub zscore: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub failures: Vec<String>,
    pub seed: u64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// Runs every job of the config without touching the filesystem.
pub fn evaluate_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let workers = config.workers.unwrap_or_else(default_workers);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (label, sampler, target) in config.jobs()? {
        let est = estimate_with_workers(sampler.as_ref(), config.samples, config.seed, workers)?;
        let verdict = compare(&est, target, config.z_threshold);
        if !verdict.pass {
            failures.push(label.clone());
        }
        rows.push(ReportRow {
            element: label,
            mean_re: est.mean.re,
            mean_im: est.mean.im,
            stderr: est.stderr,
            target_re: target.re,
            target_im: target.im,
            zscore: verdict.zscore,
            verdict: if verdict.pass { "pass" } else { "fail" }.into(),
        });
    }
    Ok(ExperimentReport {
        rows,
        summary: Summary {
            pass: failures.is_empty(),
            failures,
            seed: config.seed,
            samples: config.samples,
        },
    })
}

/// Runs the experiment and writes the CSV report and JSON summary.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = evaluate_experiment(config)?;
    if let Some(dir) = config.output.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    report.write_csv(std::fs::File::create(&config.output)?)?;
    let summary_path = config.output.with_extension("json");
    let mut f = std::fs::File::create(summary_path)?;
    serde_json::to_writer_pretty(&mut f, &report.summary)?;
    writeln!(f)?;
    Ok(report)
}
