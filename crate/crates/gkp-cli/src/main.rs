//! `gkpsim`: experiment runner producing CSV tables of logical error rates.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{parse_bool, parse_count, parse_f64_list, parse_list, parse_sigmas, pick, ConfigFile};
use gkp_concat::analytic;
use gkp_concat::montecarlo::{estimate_decoder, ErrorRateEstimate, Execution, MonteCarloConfig};
use gkp_concat::qudit::{self, QuditParams};
use gkp_concat::{CodeFamily, CodeInstance, CodeSpec, Decoder, Scheme};

#[derive(Parser, Debug)]
#[command(name = "gkpsim", version, about = "Logical error rates of GKP-concatenated codes")]
struct Cli {
    /// Worker threads for Monte Carlo sampling (default: all cores).
    #[arg(long, global = true, env = "GKPSIM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate logical error rates over codes, schemes and noise levels.
    Run(RunArgs),
    /// Closed-form rates for rep3; same options as `run` with the method fixed.
    Analytic(RunArgs),
    /// Rate ratios p(alpha)/p(1) under lattice squeezing.
    Squeeze(SqueezeArgs),
    /// Two-qudit GKP-repetition demo.
    Qudit(QuditArgs),
    /// Print the encoder blocks, stabilizers and lattices of a code.
    Report {
        #[arg(long)]
        code: String,
        #[arg(long)]
        scheme: String,
    },
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Flat key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma separated code ids: rep3, rep5, rep7, 513, steane, shor,
    /// unbiased-gkp-rep:N.
    #[arg(long)]
    code: Option<String>,
    /// Comma separated schemes: I, II, III.
    #[arg(long)]
    scheme: Option<String>,
    /// start:stop:step or a comma separated list.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    alpha_aux: Option<String>,
    #[arg(long)]
    alpha_logical: Option<String>,
    /// montecarlo or analytic.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    reduce_generators: Option<String>,
    /// Stop a cell early once stderr/p_emp falls below this.
    #[arg(long)]
    target_rel_stderr: Option<String>,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct SqueezeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    /// I squeezes every mode, III only the ancillas.
    #[arg(long)]
    scheme: Option<String>,
    /// Comma separated squeezing factors.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    reduce_generators: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QuditArgs {
    #[arg(long, default_value_t = 16)]
    d: i64,
    #[arg(long, default_value_t = 4)]
    r: i64,
    /// Exhaustive sweep over in-window errors.
    #[arg(long, conflicts_with = "sample")]
    sweep: bool,
    /// Sample i.i.d. rounded-Gaussian exponents.
    #[arg(long)]
    sample: bool,
    #[arg(long, default_value_t = 3.0)]
    sigma: f64,
    #[arg(long, default_value = "1000000")]
    draws: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    MonteCarlo,
    Analytic,
}

struct RunConfig {
    codes: Vec<CodeFamily>,
    schemes: Vec<Scheme>,
    sigmas: Vec<f64>,
    samples: u64,
    seed: u64,
    alpha_aux: Option<f64>,
    alpha_logical: f64,
    method: Method,
    reduce: bool,
    target_rel_stderr: Option<f64>,
    out: Option<PathBuf>,
}

fn execution(threads: Option<usize>) -> Execution {
    match threads {
        Some(0) | None => Execution::Parallel,
        Some(t) => Execution::Threads(t),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    path.as_deref().map(ConfigFile::load).transpose().map(Option::unwrap_or_default)
}

fn parse_codes(s: &str) -> Result<Vec<CodeFamily>> {
    parse_list(s).iter().map(|c| c.parse().map_err(anyhow::Error::from)).collect()
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>> {
    parse_list(s).iter().map(|c| c.parse().map_err(anyhow::Error::from)).collect()
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse().with_context(|| format!("bad {what} `{s}`"))
}

impl RunConfig {
    fn resolve(args: RunArgs, file: &ConfigFile) -> Result<Self> {
        let code = pick(args.code, file, "code").ok_or_else(|| anyhow!("--code is required"))?;
        let scheme = pick(args.scheme, file, "scheme").ok_or_else(|| anyhow!("--scheme is required"))?;
        let sigma = pick(args.sigma, file, "sigma").ok_or_else(|| anyhow!("--sigma is required"))?;
        let method = match pick(args.method, file, "method").as_deref().unwrap_or("montecarlo") {
            "montecarlo" | "mc" => Method::MonteCarlo,
            "analytic" => Method::Analytic,
            other => bail!("unknown method `{other}`"),
        };
        let samples = parse_count(&pick(args.samples, file, "samples").unwrap_or_else(|| "1000000".into()))?;
        if samples == 0 {
            bail!("--samples must be at least 1");
        }
        Ok(Self {
            codes: parse_codes(&code)?,
            schemes: parse_schemes(&scheme)?,
            sigmas: parse_sigmas(&sigma)?,
            samples,
            seed: parse_count(&pick(args.seed, file, "seed").unwrap_or_else(|| "1".into()))?,
            alpha_aux: pick(args.alpha_aux, file, "alpha-aux").map(|s| parse_f64(&s, "alpha")).transpose()?,
            alpha_logical: pick(args.alpha_logical, file, "alpha-logical")
                .map(|s| parse_f64(&s, "alpha"))
                .transpose()?
                .unwrap_or(2.0),
            method,
            reduce: pick(args.reduce_generators, file, "reduce-generators")
                .map(|s| parse_bool(&s))
                .transpose()?
                .unwrap_or(true),
            target_rel_stderr: pick(args.target_rel_stderr, file, "target-rel-stderr")
                .map(|s| parse_f64(&s, "target"))
                .transpose()?,
            out: args.out.or_else(|| file.get("out").map(PathBuf::from)),
        })
    }

    fn spec(&self, family: CodeFamily, scheme: Scheme) -> CodeSpec {
        let mut spec = CodeSpec::new(family, scheme)
            .with_logical_alpha(self.alpha_logical)
            .with_reduction(self.reduce);
        if let Some(a) = self.alpha_aux {
            spec = spec.with_aux_alpha(a);
        }
        spec
    }

    fn render(&self) -> String {
        let codes: Vec<String> = self.codes.iter().map(|c| c.id()).collect();
        let schemes: Vec<String> = self.schemes.iter().map(|s| s.to_string()).collect();
        let sigmas: Vec<String> = self.sigmas.iter().map(|s| s.to_string()).collect();
        format!(
            "code={};scheme={};sigma={};samples={};seed={};alpha-aux={};alpha-logical={};method={};reduce-generators={}",
            codes.join(","),
            schemes.join(","),
            sigmas.join(","),
            self.samples,
            self.seed,
            self.alpha_aux.map_or("default".into(), |a| a.to_string()),
            self.alpha_logical,
            match self.method {
                Method::MonteCarlo => "montecarlo",
                Method::Analytic => "analytic",
            },
            self.reduce
        )
    }
}

fn analytic_rate(spec: &CodeSpec, sigma: f64) -> Result<f64> {
    let default_lattices = spec.aux_alpha.is_none() && spec.logical_alpha == 2.0;
    if spec.family != CodeFamily::Repetition(3) || !default_lattices {
        bail!("analytic rates exist only for rep3 with default lattices");
    }
    Ok(match spec.scheme {
        Scheme::I => analytic::scheme1_rep3_rate(sigma),
        Scheme::II => analytic::scheme2_rep3_rate(sigma),
        Scheme::III => {
            let b = analytic::scheme3_rep3_breakdown(sigma, analytic::QuadratureGrid::default());
            if let Some(w) = b.warning {
                eprintln!("warning: rep3 III at sigma {sigma}: {w}");
            }
            b.rate
        }
    })
}

fn metadata(seed: u64, flags: &str, file: &ConfigFile) -> String {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!(
        "# gkpsim {} seed={} timestamp={} flags={} config={}\n",
        env!("CARGO_PKG_VERSION"),
        seed,
        ts,
        flags,
        if file.entries.is_empty() { "none".into() } else { file.render() }
    )
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Returns the number of failed cells.
fn run(args: RunArgs, threads: Option<usize>) -> Result<usize> {
    let file = load_config(&args.config)?;
    let cfg = RunConfig::resolve(args, &file)?;
    let mut out = open_out(&cfg.out)?;
    out.write_all(metadata(cfg.seed, &cfg.render(), &file).as_bytes())?;
    writeln!(out, "{}", ErrorRateEstimate::CSV_HEADER)?;
    let mc = MonteCarloConfig::new(cfg.samples, cfg.seed)
        .with_execution(execution(threads))
        .with_target_relative_stderr(cfg.target_rel_stderr);
    let mut failures = 0;
    let mut cell = 0;
    for &family in &cfg.codes {
        for &scheme in &cfg.schemes {
            let spec = cfg.spec(family, scheme);
            let decoder = match cfg.method {
                Method::MonteCarlo => CodeInstance::build(spec).and_then(|c| Decoder::new(&c)).map(Some),
                Method::Analytic => spec.validate().map(|_| None),
            };
            for &sigma in &cfg.sigmas {
                let this_cell = cell;
                cell += 1;
                let row = match (&decoder, cfg.method) {
                    (Err(e), _) => Err(anyhow!("{e}")),
                    (Ok(Some(d)), _) => estimate_decoder(d, &family.id(), sigma, &mc.with_cell(this_cell)).map_err(Into::into),
                    (Ok(None), _) => analytic_rate(&spec, sigma).map(|r| ErrorRateEstimate::analytic(family.id(), scheme, sigma, r)),
                };
                match row {
                    Ok(e) => writeln!(out, "{}", e.csv_row())?,
                    Err(e) => {
                        failures += 1;
                        eprintln!("error: {} scheme {scheme} sigma {sigma}: {e}", family.id());
                    }
                }
            }
        }
    }
    out.flush()?;
    Ok(failures)
}

fn squeeze(args: SqueezeArgs, threads: Option<usize>) -> Result<usize> {
    let file = load_config(&args.config)?;
    let code: CodeFamily = pick(args.code, &file, "code")
        .ok_or_else(|| anyhow!("--code is required"))?
        .parse()?;
    let scheme: Scheme = pick(args.scheme, &file, "scheme").unwrap_or_else(|| "III".into()).parse()?;
    if scheme == Scheme::II {
        bail!("the squeezing study covers schemes I and III");
    }
    let alphas = parse_f64_list(&pick(args.alpha, &file, "alpha").unwrap_or_else(|| "0.5,1,2,4".into()))?;
    if let Some(bad) = alphas.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        bail!("alpha must be positive, got {bad}");
    }
    let sigma = parse_f64(&pick(args.sigma, &file, "sigma").unwrap_or_else(|| "0.2".into()), "sigma")?;
    let samples = parse_count(&pick(args.samples, &file, "samples").unwrap_or_else(|| "1000000".into()))?;
    let seed = parse_count(&pick(args.seed, &file, "seed").unwrap_or_else(|| "1".into()))?;
    let reduce = pick(args.reduce_generators, &file, "reduce-generators")
        .map(|s| parse_bool(&s))
        .transpose()?
        .unwrap_or(true);
    let out_path = args.out.or_else(|| file.get("out").map(PathBuf::from));

    // Every alpha shares cell 0, so alpha = 1 reproduces the baseline exactly.
    let mc = MonteCarloConfig::new(samples, seed).with_execution(execution(threads));
    let rate = |alpha: f64| -> Result<ErrorRateEstimate> {
        let spec = CodeSpec::new(code, scheme).with_reduction(reduce);
        let spec = match scheme {
            Scheme::I => spec.with_logical_alpha(2.0 * alpha).with_aux_alpha(2.0 * alpha),
            _ => spec.with_aux_alpha(alpha),
        };
        let c = CodeInstance::build(spec)?;
        Ok(estimate_decoder(&Decoder::new(&c)?, &code.id(), sigma, &mc)?)
    };
    let base = rate(1.0)?;
    let mut out = open_out(&out_path)?;
    let flags = format!(
        "code={};scheme={scheme};alpha={};sigma={sigma};samples={samples};seed={seed};reduce-generators={reduce}",
        code.id(),
        alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
    );
    out.write_all(metadata(seed, &flags, &file).as_bytes())?;
    writeln!(out, "code,scheme,sigma,alpha,samples,p_emp,stderr,ratio,seed")?;
    let mut failures = 0;
    for &alpha in &alphas {
        match rate(alpha) {
            Ok(e) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                e.code,
                e.scheme,
                gkp_concat::montecarlo::sig6(sigma),
                gkp_concat::montecarlo::sig6(alpha),
                e.samples,
                gkp_concat::montecarlo::sig6(e.p_emp),
                gkp_concat::montecarlo::sig6(e.stderr),
                gkp_concat::montecarlo::sig6(e.p_emp / base.p_emp),
                seed
            )?,
            Err(e) => {
                failures += 1;
                eprintln!("error: alpha {alpha}: {e}");
            }
        }
    }
    out.flush()?;
    Ok(failures)
}

fn qudit_cmd(args: QuditArgs) -> Result<usize> {
    let params = QuditParams::new(args.d, args.r)?;
    if args.sample {
        let draws = parse_count(&args.draws)?;
        let s = qudit::sample(&params, args.sigma, draws, args.seed)?;
        println!("d,r,sigma,draws,recovered,var_a1,var_residual,ratio,var_residual_continuum,ratio_continuum");
        println!(
            "{},{},{},{},{},{},{},{},{},{}",
            args.d,
            args.r,
            args.sigma,
            s.draws,
            s.recovered,
            gkp_concat::montecarlo::sig6(s.var_a1),
            gkp_concat::montecarlo::sig6(s.var_residual),
            gkp_concat::montecarlo::sig6(s.ratio()),
            gkp_concat::montecarlo::sig6(s.var_residual_continuum),
            gkp_concat::montecarlo::sig6(s.ratio_continuum())
        );
        Ok(0)
    } else {
        let s = qudit::sweep(&params);
        println!("d,r,cases,recovered,z_leaks,x_syndrome_mismatches");
        println!("{},{},{},{},{},{}", args.d, args.r, s.cases, s.recovered, s.z_leaks, s.x_syndrome_mismatches);
        Ok((s.z_leaks + s.x_syndrome_mismatches + (s.cases - s.recovered)) as usize)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a, cli.threads),
        Command::Analytic(a) => run(RunArgs { method: Some("analytic".into()), ..a }, cli.threads),
        Command::Squeeze(a) => squeeze(a, cli.threads),
        Command::Qudit(a) => qudit_cmd(a),
        Command::Report { code, scheme } => CodeSpec::parse(&code, &scheme)
            .and_then(CodeInstance::build)
            .map(|c| {
                print!("{}", c.report());
                0
            })
            .map_err(Into::into),
    };
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} cell(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
