use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use irpdf_core::fixalg::{self, FiniteActionSpace};
use irpdf_core::icc;
use irpdf_core::linalg::MatrixJson;
use irpdf_core::linear_examples::{matrix_group_closure, word_ball};
use irpdf_core::mc::{self, ExperimentConfig, SphereSampler};
use irpdf_core::rng::stream;
use irpdf_core::{
    gram, psd_check, sample_config, FinitaryPermutation, FiniteGroup, FiniteRepresentation,
    ThomaParams, UnitaryMatrix,
};

#[derive(Parser)]
#[command(name = "irpdf", version, about = "Invariant random positive definite functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Thoma characters of S_∞.
    #[command(subcommand)]
    Thoma(ThomaCmd),
    /// The sign-cocycle model over S_∞.
    #[command(subcommand)]
    Vk(VkCmd),
    /// Gram matrix positivity.
    #[command(subcommand)]
    Pd(PdCmd),
    /// Linear examples.
    #[command(subcommand)]
    Examples(ExamplesCmd),
    /// Fixed-point algebra of a finite action and a representation.
    Fixalg(FixalgArgs),
    /// Infinite conjugacy class witnesses.
    #[command(subcommand)]
    Icc(IccCmd),
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Comma-separated, non-increasing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Vec<f64>,
}

impl ParamArgs {
    fn params(&self) -> Result<ThomaParams> {
        Ok(ThomaParams::new(self.alpha.clone(), self.beta.clone())?)
    }
}

#[derive(Subcommand)]
enum ThomaCmd {
    /// Print τ_{α,β}(g) to 12 significant digits.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        perm: String,
    },
}

#[derive(Subcommand)]
enum VkCmd {
    /// Print one sampled configuration.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo estimate of E[φ_ω(g)] against τ_{α,β}(g).
    Expect {
        #[command(flatten)]
        params: ParamArgs,
        /// Semicolon-separated permutations.
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = mc::DEFAULT_Z)]
        z: f64,
        /// Use the stabilizer indicator instead of the signed function.
        #[arg(long)]
        stabilizer: bool,
        /// Write the report rows here as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PdCmd {
    /// Gram matrix report for a named function on a list of permutations.
    Check {
        /// JSON list of cycle strings, inline or as a file path.
        #[arg(long)]
        elements: String,
        /// thoma | vk | stabilizer
        #[arg(long, default_value = "thoma")]
        source: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Seed for the sampled point of the random sources.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = irpdf_core::DEFAULT_TOLERANCE)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum ExamplesCmd {
    /// Compare E[⟨γξ, ξ⟩] with tr(γ)/n over a matrix group.
    Sphere {
        #[arg(long)]
        dim: usize,
        /// JSON list of generator matrices ([re, im] entries), inline or file.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Word length used when the group is too large to enumerate.
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = mc::DEFAULT_Z)]
        z: f64,
    },
}

#[derive(Args)]
struct FixalgArgs {
    /// Multiplication table, JSON.
    #[arg(long)]
    group: String,
    /// One unitary matrix per group element, JSON.
    #[arg(long)]
    rep: String,
    /// `action[g][ω] = g.ω`, JSON.
    #[arg(long)]
    action: String,
    /// Point weights, JSON; uniform when omitted.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value_t = fixalg::DEFAULT_PROJECTION_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum IccCmd {
    /// Find γ with γFγ⁻¹ ∩ F ⊆ {e}.
    Witness {
        /// Semicolon-separated permutations.
        #[arg(long)]
        set: String,
    },
    /// Count distinct conjugates over k random conjugators.
    Bound {
        #[arg(long)]
        perm: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Inline JSON when the argument looks like JSON, else a file path.
fn json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        return serde_json::from_str(arg).context("invalid inline JSON");
    }
    let text = std::fs::read_to_string(Path::new(arg)).with_context(|| format!("reading {arg}"))?;
    serde_json::from_str(&text).with_context(|| format!("invalid JSON in {arg}"))
}

fn perm_list(s: &str) -> Result<Vec<FinitaryPermutation>> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| Ok(p.parse()?))
        .collect()
}

/// Fixed-point decimal with `digits` significant digits.
fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn thoma(cmd: ThomaCmd) -> Result<()> {
    match cmd {
        ThomaCmd::Eval { params, perm } => {
            let g: FinitaryPermutation = perm.parse()?;
            println!("{}", significant(params.params()?.tau(&g), 12));
        }
    }
    Ok(())
}

fn vk(cmd: VkCmd) -> Result<bool> {
    match cmd {
        VkCmd::Sample { params, n, seed } => {
            let omega = sample_config(&params.params()?, n, &mut stream(seed, 0));
            let labels: Vec<String> = omega.labels().iter().map(ToString::to_string).collect();
            println!("{}", labels.join(" "));
            Ok(true)
        }
        VkCmd::Expect {
            params,
            perm,
            samples,
            seed,
            workers,
            z,
            stabilizer,
            csv,
        } => {
            let params = params.params()?;
            let sampler = if stabilizer {
                json!({"kind": "stabilizer", "alpha": params.alpha(), "beta": params.beta()})
            } else {
                json!({"kind": "vk", "alpha": params.alpha(), "beta": params.beta()})
            };
            let elements: Vec<serde_json::Value> =
                perm_list(&perm)?.iter().map(|g| json!(g.to_string())).collect();
            let config: ExperimentConfig = serde_json::from_value(json!({
                "sampler": sampler,
                "elements": elements,
                "samples": samples,
                "seed": seed,
                "output": csv.clone().unwrap_or_default(),
                "z_threshold": z,
                "workers": workers,
            }))?;
            let report = match csv {
                Some(_) => mc::run_experiment(&config)?,
                None => mc::evaluate_experiment(&config)?,
            };
            println!("element\tmean\tstderr\ttarget\tzscore\tverdict");
            for row in &report.rows {
                println!(
                    "{}\t{:.6}\t{:.3e}\t{:.6}\t{:.2}\t{}",
                    row.element, row.mean_re, row.stderr, row.target_re, row.zscore, row.verdict
                );
            }
            Ok(report.summary.pass)
        }
    }
}

fn pd(cmd: PdCmd) -> Result<bool> {
    match cmd {
        PdCmd::Check {
            elements,
            source,
            params,
            seed,
            tol,
        } => {
            let names: Vec<String> = json_arg(&elements)?;
            let elements: Vec<FinitaryPermutation> =
                names.iter().map(|s| s.parse()).collect::<irpdf_core::Result<_>>()?;
            let params = params.params()?;
            let n = elements.iter().map(FinitaryPermutation::max_support).max().unwrap_or(0).max(1);
            let matrix = match source.as_str() {
                "thoma" => gram(&|g: &FinitaryPermutation| Complex64::new(params.tau(g), 0.0), &elements)?,
                "vk" | "stabilizer" => {
                    let omega = sample_config(&params, n, &mut stream(seed, 0));
                    let signed = source == "vk";
                    let phi = |g: &FinitaryPermutation| {
                        let v = if signed {
                            omega.phi(g).expect("support within sampled length")
                        } else if omega.is_fixed(g).expect("support within sampled length") {
                            1.0
                        } else {
                            0.0
                        };
                        Complex64::new(v, 0.0)
                    };
                    gram(&phi, &elements)?
                }
                other => bail!("unknown source `{other}`; expected thoma, vk or stabilizer"),
            };
            let report = psd_check(&matrix, tol)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.psd)
        }
    }
}

fn examples(cmd: ExamplesCmd) -> Result<bool> {
    match cmd {
        ExamplesCmd::Sphere {
            dim,
            group,
            samples,
            seed,
            radius,
            z,
        } => {
            let raw: Vec<MatrixJson> = json_arg(&group)?;
            let generators = raw
                .iter()
                .map(|m| Ok(UnitaryMatrix::new(m.to_matrix()?)?))
                .collect::<Result<Vec<_>>>()?;
            if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
                bail!("generator of dimension {} given with --dim {dim}", g.dim());
            }
            let elements = match matrix_group_closure(&generators) {
                Ok(all) => all,
                Err(_) => word_ball(&generators, radius),
            };
            println!("element,mean_re,mean_im,stderr,target_re,target_im,zscore,verdict");
            let mut pass = true;
            for (i, gamma) in elements.into_iter().enumerate() {
                let target = gamma.normalized_trace();
                let est = mc::estimate(&SphereSampler { gamma }, samples, seed)?;
                let v = mc::compare(&est, target, z);
                pass &= v.pass;
                println!(
                    "{i},{},{},{},{},{},{},{}",
                    est.mean.re,
                    est.mean.im,
                    est.stderr,
                    target.re,
                    target.im,
                    v.zscore,
                    if v.pass { "pass" } else { "fail" }
                );
            }
            Ok(pass)
        }
    }
}

fn fixalg_cmd(args: FixalgArgs) -> Result<()> {
    let table: Vec<Vec<usize>> = json_arg(&args.group)?;
    let group = Arc::new(FiniteGroup::from_table(table)?);
    let mats: Vec<MatrixJson> = json_arg(&args.rep)?;
    let mats = mats.iter().map(MatrixJson::to_matrix).collect::<irpdf_core::Result<Vec<_>>>()?;
    let rep = FiniteRepresentation::new(Arc::clone(&group), mats)?;
    let action: Vec<Vec<usize>> = json_arg(&args.action)?;
    let points = action.first().map_or(0, Vec::len);
    let weights: Vec<f64> = match &args.weights {
        Some(w) => json_arg(w)?,
        None => vec![1.0 / points.max(1) as f64; points],
    };
    let space = FiniteActionSpace::new(Arc::clone(&group), action, weights)?;
    let generators: Vec<usize> = (0..group.order()).collect();
    let basis = fixalg::fixed_space(&space, &rep, &generators)?;
    let (structure, projections) = fixalg::decompose(&basis, args.seed)?;
    let traces: Vec<f64> = projections.iter().map(|p| p.trace(&space).re).collect();
    let out = json!({
        "dimension": basis.dimension(),
        "center_dimension": structure.center_dimension,
        "block_sizes": structure.block_sizes,
        "minimal_projections": projections.len(),
        "traces": traces,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn icc_cmd(cmd: IccCmd) -> Result<()> {
    match cmd {
        IccCmd::Witness { set } => {
            let report = icc::displacing_element(&perm_list(&set)?);
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        IccCmd::Bound { perm, k, seed } => {
            let g: FinitaryPermutation = perm.parse()?;
            println!("{}", icc::conjugacy_lower_bound(&g, k, seed));
        }
    }
    Ok(())
}

fn run(config: &Path) -> Result<bool> {
    let config = ExperimentConfig::from_path(config)?;
    let report = mc::run_experiment(&config)?;
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    Ok(report.summary.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Thoma(c) => thoma(c).map(|_| true),
        Command::Vk(c) => vk(c),
        Command::Pd(c) => pd(c),
        Command::Examples(c) => examples(c),
        Command::Fixalg(a) => fixalg_cmd(a).map(|_| true),
        Command::Icc(c) => icc_cmd(c).map(|_| true),
        Command::Run { config } => run(&config),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
