//! Command-line front end. The binary only forwards `argv` to [`main_with_args`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::discrete::DiscretePgf;
use crate::error::{Error, Result};
use crate::identify::{identify, parse_candidates, IdentifyOptions, IdentifySource, Verdict};
use crate::sample::{sample_compounder, sample_discrete, sample_transform, RandomSource, DEFAULT_SEED};
use crate::stability::{
    solve_scale, verify_continuous, verify_discrete, GridSpec, StabilityReport, StabilityTarget, DEFAULT_TOLERANCE,
};
use crate::transform::{PgfFamily, Transform};

use super::mc::{monte_carlo, McTarget};
use super::suite::run_suite;

/// Environment variable consulted when neither a flag nor the config file sets a seed.
pub const SEED_ENV: &str = "RANDSTAB_SEED";
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Points of the identification curve written in CSV mode.
pub const CURVE_POINTS: usize = 101;
/// Bracket searched by `verify` when no scale is given.
pub const SCALE_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-9);

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Bin,
}

fn parse_seed(text: &str) -> std::result::Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| format!("`{text}` is not a decimal or 0x-prefixed u64"))
}

/// Experiment settings. The same keys are accepted as flags and in a
/// TOML config file; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Compounder PGF, e.g. `harris:a=3,k=2`.
    #[arg(long, global = true)]
    pub compounder: Option<String>,
    /// Continuous law as a LT or CF descriptor, e.g. `gamma:beta=0.5`.
    #[arg(long, global = true)]
    pub transform: Option<String>,
    /// Discrete law, e.g. `dml:alpha=0.5,lambda=1@0.25`.
    #[arg(long, global = true)]
    pub discrete: Option<String>,
    /// Scale c.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Sweep of scales `lo:hi:n`.
    #[arg(long, global = true, value_name = "LO:HI:N", allow_hyphen_values = true)]
    pub c_sweep: Option<String>,
    /// Evaluation grid `lo:hi:n`.
    #[arg(long, global = true, value_name = "LO:HI:N", allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Batch size.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub stream: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Whitespace-separated candidate families for `identify`.
    #[arg(long, global = true)]
    pub candidates: Option<String>,
    /// Count law of the random sum for `mc`.
    #[arg(long = "n", global = true, value_name = "PGF")]
    #[serde(rename = "n")]
    pub count: Option<String>,
    /// Summand law for `mc`.
    #[arg(long = "x", global = true, value_name = "LAW")]
    #[serde(rename = "x")]
    pub summand: Option<String>,
}

impl Settings {
    /// Fills every unset field from `base`.
    pub fn or(self, base: Settings) -> Settings {
        Settings {
            compounder: self.compounder.or(base.compounder),
            transform: self.transform.or(base.transform),
            discrete: self.discrete.or(base.discrete),
            c: self.c.or(base.c),
            c_sweep: self.c_sweep.or(base.c_sweep),
            grid: self.grid.or(base.grid),
            tol: self.tol.or(base.tol),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            stream: self.stream.or(base.stream),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            candidates: self.candidates.or(base.candidates),
            count: self.count.or(base.count),
            summand: self.summand.or(base.summand),
        }
    }

    pub fn from_toml(text: &str) -> Result<Settings> {
        toml::from_str(text).map_err(|e| Error::descriptor("config", e.to_string()))
    }

    /// Flag, then config file, then `RANDSTAB_SEED`, then the default.
    pub fn resolve_seed(&self, env: Option<&str>) -> Result<u64> {
        match (self.seed, env) {
            (Some(seed), _) => Ok(seed),
            (None, Some(text)) => parse_seed(text).map_err(|reason| Error::descriptor(SEED_ENV, reason)),
            (None, None) => Ok(DEFAULT_SEED),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the stability equation, or solve for c when none is given.
    Verify,
    /// Recover the compounder that stabilises a law at scale c.
    Identify,
    /// Draw a seeded batch from a compounder, transform or discrete law.
    Sample,
    /// Compare c·S_N with X by simulation.
    Mc,
    /// Run a named regression suite.
    Suite {
        #[arg(default_value = "paper")]
        name: SuiteName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Paper,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "randstab", version, about = "Stability of random sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with default settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

/// What an experiment produced. `output` is written verbatim; `summary`
/// goes to stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub output: Vec<u8>,
    pub pass: bool,
    pub summary: String,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| Error::descriptor(flag, "this flag is required here"))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("reports serialise");
    out.push(b'\n');
    out
}

fn json_only(format: Format, what: &str) -> Result<()> {
    if format == Format::Bin {
        return Err(Error::descriptor("bin", format!("binary output is only available for sample, not {what}")));
    }
    Ok(())
}

fn verdict_line(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn sweep_points(text: &str) -> Result<Vec<f64>> {
    Ok(GridSpec::parse(text)?.points())
}

fn run_verify(s: &Settings, format: Format) -> Result<RunOutcome> {
    json_only(format, "verify")?;
    let p: PgfFamily = required(&s.compounder, "--compounder")?.parse()?;
    let target = match (&s.transform, &s.discrete) {
        (Some(t), None) => StabilityTarget::Continuous(t.parse()?),
        (None, Some(d)) => StabilityTarget::Discrete(d.parse()?),
        _ => return Err(Error::descriptor("--transform/--discrete", "give exactly one of the two")),
    };
    let grid = match (&s.grid, &target) {
        (Some(text), _) => GridSpec::parse(text)?,
        (None, StabilityTarget::Continuous(Transform::Lt(_))) => GridSpec::lt_default(),
        (None, StabilityTarget::Continuous(Transform::Cf(_))) => GridSpec::cf_default(),
        (None, StabilityTarget::Discrete(_)) => GridSpec::unit_default(),
    };
    let tol = s.tol.unwrap_or(DEFAULT_TOLERANCE);
    let check = |c: f64| -> Result<StabilityReport> {
        match &target {
            StabilityTarget::Continuous(phi) => verify_continuous(&p, phi, c, &grid, tol),
            StabilityTarget::Discrete(q) => verify_discrete(&p, q, c, &grid, tol),
        }
    };
    if let Some(sweep) = &s.c_sweep {
        let reports = sweep_points(sweep)?.into_iter().map(check).collect::<Result<Vec<_>>>()?;
        let pass = reports.iter().any(|r| r.pass);
        let output = match format {
            Format::Csv => {
                let mut csv = String::from("c,max_residual,pass\n");
                for r in &reports {
                    csv.push_str(&format!("{:e},{:e},{}\n", r.c, r.max_residual, r.pass));
                }
                csv.into_bytes()
            }
            _ => to_json(&json!({ "pass": pass, "sweep": reports })),
        };
        let passing = reports.iter().filter(|r| r.pass).count();
        return Ok(RunOutcome {
            output,
            pass,
            summary: format!("{passing}/{} scales pass", reports.len()),
        });
    }
    let (report, solution) = match s.c {
        Some(c) => (check(c)?, None),
        None => {
            let solution = solve_scale(&p, &target, SCALE_BRACKET, &grid, tol)?;
            (check(solution.c)?, Some(solution))
        }
    };
    let summary = format!("{} at c = {}: max residual {:.3e}", verdict_line(report.pass), report.c, report.max_residual);
    let output = match format {
        Format::Csv => report.to_csv().into_bytes(),
        _ => match solution {
            Some(solution) => to_json(&json!({ "pass": report.pass, "solution": solution, "report": report })),
            None => to_json(&report),
        },
    };
    Ok(RunOutcome {
        output,
        pass: report.pass,
        summary,
    })
}

fn identify_source(s: &Settings) -> Result<IdentifySource> {
    match (&s.transform, &s.discrete) {
        (Some(t), None) => match t.parse::<Transform>()? {
            Transform::Lt(phi) => Ok(phi.into()),
            Transform::Cf(_) => Err(Error::descriptor(t.as_str(), "identification needs a Laplace transform")),
        },
        (None, Some(d)) => Ok(d.parse::<DiscretePgf>()?.into()),
        _ => Err(Error::descriptor("--transform/--discrete", "give exactly one of the two")),
    }
}

fn run_identify(s: &Settings, format: Format) -> Result<RunOutcome> {
    json_only(format, "identify")?;
    let source = identify_source(s)?;
    let mut options = IdentifyOptions::default();
    if let Some(text) = &s.candidates {
        options.candidates = parse_candidates(text)?;
    }
    let curve_points = match &s.grid {
        Some(text) => GridSpec::parse(text)?.n,
        None => CURVE_POINTS,
    };
    if let Some(sweep) = &s.c_sweep {
        let results = crate::identify::identify_sweep(source, &sweep_points(sweep)?, &options)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let pass = results.iter().any(|r| r.verdict == Verdict::ValidPgf);
        let output = match format {
            Format::Csv => {
                let mut csv = String::from("c,verdict,matched\n");
                for r in &results {
                    let family = r.matched.map(|m| m.family.to_string()).unwrap_or_default();
                    let verdict = serde_json::to_value(r.verdict).expect("verdict serialises");
                    csv.push_str(&format!("{:e},{},{family}\n", r.c, verdict.as_str().unwrap_or_default()));
                }
                csv.into_bytes()
            }
            _ => to_json(&json!({ "pass": pass, "sweep": results })),
        };
        let valid = results.iter().filter(|r| r.verdict == Verdict::ValidPgf).count();
        return Ok(RunOutcome {
            output,
            pass,
            summary: format!("{valid}/{} scales give a valid PGF", results.len()),
        });
    }
    let c = s.c.ok_or_else(|| Error::descriptor("--c", "identify needs --c or --c-sweep"))?;
    let result = identify(source, c, &options)?;
    let pass = result.verdict == Verdict::ValidPgf;
    let summary = match result.matched {
        Some(m) => format!("{}: matched {} (sup distance {:.3e})", verdict_line(pass), m.family, m.sup_distance),
        None if pass => "pass: valid PGF, no closed-form family".to_string(),
        None => format!("fail: not a PGF (min coefficient {:.3e})", result.pmf.min_coeff()),
    };
    let output = match format {
        Format::Csv => result.curve.to_csv(curve_points)?.into_bytes(),
        _ => to_json(&result),
    };
    Ok(RunOutcome { output, pass, summary })
}

fn run_sample(s: &Settings, format: Format, seed: u64) -> Result<RunOutcome> {
    let n = s.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut src = RandomSource::new(seed, s.stream.unwrap_or(0));
    let batch = match (&s.compounder, &s.transform, &s.discrete) {
        (Some(p), None, None) => sample_compounder(&p.parse()?, n, &mut src)?,
        (None, Some(t), None) => sample_transform(&t.parse()?, n, &mut src)?,
        (None, None, Some(d)) => sample_discrete(&d.parse()?, n, &mut src)?,
        _ => {
            return Err(Error::descriptor(
                "--compounder/--transform/--discrete",
                "give exactly one law to sample",
            ))
        }
    };
    let output = match format {
        Format::Json => to_json(&batch),
        Format::Csv => batch.to_csv().into_bytes(),
        Format::Bin => batch.to_bin()?,
    };
    Ok(RunOutcome {
        output,
        pass: true,
        summary: format!("{} values of {} (seed {seed}, mean {:.6})", batch.len(), batch.family, batch.mean()),
    })
}

fn run_mc(s: &Settings, format: Format, seed: u64) -> Result<RunOutcome> {
    json_only(format, "mc")?;
    let count: PgfFamily = required(&s.count, "--n")?.parse()?;
    let target = McTarget::parse(required(&s.summand, "--x")?)?;
    let c = s.c.ok_or_else(|| Error::descriptor("--c", "mc needs a scale"))?;
    let verdict = monte_carlo(&count, &target, c, s.samples.unwrap_or(DEFAULT_SAMPLES), seed)?;
    let summary = match verdict.p_value {
        Some(p) => format!("{}: KS D = {:.5}, p = {p:.4}", verdict_line(verdict.pass), verdict.statistic),
        None => format!("{}: TV = {:.5}", verdict_line(verdict.pass), verdict.statistic),
    };
    let output = match format {
        Format::Csv => format!(
            "test,statistic,p_value,threshold,n,pass\n{},{:e},{},{:e},{},{}\n",
            serde_json::to_value(verdict.test).expect("tag serialises").as_str().unwrap_or_default(),
            verdict.statistic,
            verdict.p_value.map(|p| format!("{p:e}")).unwrap_or_default(),
            verdict.threshold,
            verdict.n,
            verdict.pass
        )
        .into_bytes(),
        _ => to_json(&verdict),
    };
    Ok(RunOutcome {
        output,
        pass: verdict.pass,
        summary,
    })
}

fn run_suite_command(format: Format, seed: u64) -> Result<RunOutcome> {
    json_only(format, "suite")?;
    let report = run_suite("paper", seed)?;
    let output = match format {
        Format::Csv => {
            let mut csv = String::from("group,id,pass,value\n");
            for e in &report.entries {
                csv.push_str(&format!("{},{},{},{:e}\n", e.group.label(), e.id, e.pass, e.value));
            }
            csv.into_bytes()
        }
        _ => to_json(&report),
    };
    Ok(RunOutcome {
        output,
        pass: report.pass,
        summary: report.table(),
    })
}

/// Dispatches one experiment. `env_seed` is the value of `RANDSTAB_SEED`.
pub fn run_experiment(command: Command, settings: &Settings, env_seed: Option<&str>) -> Result<RunOutcome> {
    let format = settings.format.unwrap_or_default();
    let seed = settings.resolve_seed(env_seed)?;
    match command {
        Command::Verify => run_verify(settings, format),
        Command::Identify => run_identify(settings, format),
        Command::Sample => run_sample(settings, format, seed),
        Command::Mc => run_mc(settings, format, seed),
        Command::Suite { name: SuiteName::Paper } => run_suite_command(format, seed),
    }
}

fn execute(cli: Cli) -> Result<RunOutcome> {
    let file = match &cli.config {
        Some(path) => Settings::from_toml(&std::fs::read_to_string(path)?)?,
        None => Settings::default(),
    };
    let settings = cli.settings.or(file);
    let env_seed = std::env::var(SEED_ENV).ok();
    let outcome = run_experiment(cli.command, &settings, env_seed.as_deref())?;
    match &settings.out {
        Some(path) => std::fs::write(path, &outcome.output)?,
        None => std::io::stdout().write_all(&outcome.output)?,
    }
    Ok(outcome)
}

/// Parses `args`, runs the experiment and returns the process exit code:
/// 0 pass, 2 fail, 1 usage or domain error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    match execute(cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary.trim_end());
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        let flag = Settings {
            seed: Some(7),
            ..Settings::default()
        };
        let file = Settings::from_toml("seed = 9\nsamples = 10").unwrap();
        assert_eq!(flag.clone().or(file.clone()).resolve_seed(Some("11")).unwrap(), 7);
        assert_eq!(Settings::default().or(file).resolve_seed(Some("11")).unwrap(), 9);
        assert_eq!(Settings::default().resolve_seed(Some("0x10")).unwrap(), 16);
        assert_eq!(Settings::default().resolve_seed(None).unwrap(), DEFAULT_SEED);
        assert!(Settings::default().resolve_seed(Some("seven")).is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(Settings::from_toml("sead = 1").is_err());
        let s = Settings::from_toml("n = \"geometric1:p=0.5\"\nx = \"gamma:beta=1\"\nc-sweep = \"0.1:0.9:5\"").unwrap();
        assert_eq!(s.count.as_deref(), Some("geometric1:p=0.5"));
        assert_eq!(s.c_sweep.as_deref(), Some("0.1:0.9:5"));
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["randstab", "mc", "--n", "degenerate:k=4", "--x", "gamma:beta=1", "--seed", "0xC0FFEE"])
            .unwrap();
        assert_eq!(cli.command, Command::Mc);
        assert_eq!(cli.settings.seed, Some(0xC0FFEE));
        assert_eq!(cli.settings.count.as_deref(), Some("degenerate:k=4"));
    }

    #[test]
    fn verify_example_passes() {
        let s = Settings {
            compounder: Some("harris:a=3,k=2".into()),
            transform: Some("gamma:beta=0.5".into()),
            c: Some(1.0 / 3.0),
            ..Settings::default()
        };
        let out = run_experiment(Command::Verify, &s, None).unwrap();
        assert!(out.pass);
    }
}
