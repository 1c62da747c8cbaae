//! Command-line front-end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use oddcover_core::covering::verify_cover;
use oddcover_core::elliptic::{lattice_init, solve_theta, verify_solution, EllipticError};
use oddcover_core::enumeration::{EnumerationError, EnumerationTask, Shard};
use oddcover_core::monodromy::{build_tuple, check_conditions, MonodromyError, RamificationProfile};
use oddcover_core::spin::{count_profiles, enumerate_profiles, residue_quadric, spin_parity};

use crate::census::{run_census, CensusError, CensusOptions};
use crate::formats::{
    join, parse_complex, parse_profile, write_csv, write_json, BuildJson, CensusCsvRow, CensusJson, ProfileCsvRow,
    ProfileJson, ProfileListJson, QuadricCsvRow, QuadricJson, ReportJson, SolutionCsvRow, SolutionsJson, TupleInput,
    TupleJson, VerifyRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "oddcover", version, about = "Hyperelliptic odd coverings: monodromy, census and genus-one solver")]
pub struct RunConfig {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every profile of genus G with its spin parity.
    Profiles { g: u32 },
    /// Build a monodromy tuple for a profile and verify it.
    Build {
        g: u32,
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = oddcover_core::monodromy::DEFAULT_MAX_ATTEMPTS)]
        max_attempts: u32,
    },
    /// Verify a tuple read from JSON.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exhaustive census of monodromy classes.
    Census {
        g: u32,
        #[arg(long)]
        profile: Option<String>,
        /// Shard as index/total.
        #[arg(long, default_value = "0/1")]
        shard: String,
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, env = "ODDCOVER_JOBS")]
        jobs: Option<usize>,
        /// Keep tuples whose monodromy group is not transitive.
        #[arg(long)]
        allow_intransitive: bool,
    },
    /// Solve for the four residue vectors on the lattice Z + tau Z.
    Elliptic {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
    /// Residue quadric of a profile.
    Quadric {
        g: u32,
        #[arg(long)]
        profile: String,
    },
}

#[derive(Debug)]
pub enum Failure {
    /// Exit 1.
    Verification(String),
    /// Exit 2.
    InvalidInput(String),
    /// Exit 3.
    Refused(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::InvalidInput(_) => 2,
            Failure::Refused(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Verification(_) => "verification_failed",
            Failure::InvalidInput(_) => "invalid_input",
            Failure::Refused(_) => "refused",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::InvalidInput(m) | Failure::Refused(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.message(), "exit_code": self.exit_code() })
            .to_string()
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::InvalidInput(e.to_string())
}

impl From<EnumerationError> for Failure {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::SearchSpaceTooLarge { .. } => Failure::Refused(e.to_string()),
            _ => invalid(e),
        }
    }
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::Enumeration(inner) => inner.into(),
            other => invalid(other),
        }
    }
}

impl From<EllipticError> for Failure {
    fn from(e: EllipticError) -> Self {
        match e {
            EllipticError::DegenerateLattice | EllipticError::ResidueSumNonzero(_) => invalid(e),
            other => Failure::Verification(other.to_string()),
        }
    }
}

/// The result of one subcommand, rendered after the fact.
type Render = Box<dyn FnOnce(&mut dyn Write) -> anyhow::Result<()>>;

struct Output {
    json: Render,
    csv: Render,
    failure: Option<Failure>,
}

impl Output {
    fn new<J: Serialize + 'static, R: Serialize + 'static>(json: J, rows: Vec<R>) -> Result<Self, Failure> {
        Ok(Output {
            json: Box::new(move |w| write_json(w, &json)),
            csv: Box::new(move |w| write_csv(w, &rows)),
            failure: None,
        })
    }
}

fn profile_arg(g: u32, s: &str) -> Result<RamificationProfile, Failure> {
    let n = parse_profile(s).map_err(invalid)?;
    RamificationProfile::new(g, n).map_err(invalid)
}

fn execute(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Profiles { g } => {
            if *g == 0 {
                return Err(invalid("genus must be at least 1"));
            }
            let profiles: Vec<ProfileJson> = enumerate_profiles(*g)
                .iter()
                .map(|p| spin_parity(p).map(|s| ProfileJson::with_spin(p, &s)).map_err(invalid))
                .collect::<Result<_, _>>()?;
            let rows: Vec<ProfileCsvRow> = profiles
                .iter()
                .map(|p| ProfileCsvRow {
                    g: p.g,
                    profile: join(&p.n),
                    parity: p.parity.clone().unwrap_or_default(),
                    h0: p.h0.unwrap_or(0),
                })
                .collect();
            let count = u64::try_from(count_profiles(*g)).map_err(invalid)?;
            Output::new(ProfileListJson { g: *g, count, profiles }, rows)
        }
        Command::Build { g, profile, seed, max_attempts } => {
            let p = profile_arg(*g, profile)?;
            log::info!("building g={g} profile {profile} with seed {seed}");
            let tuple = build_tuple(&p, *seed, *max_attempts).map_err(|e| match e {
                MonodromyError::TransitivityNotFound { .. } => Failure::Verification(e.to_string()),
                other => invalid(other),
            })?;
            let mut report = ReportJson::from(&verify_cover(&tuple));
            report.conditions.profile_match = check_conditions(&tuple, Some(&p)).profile_match;
            let pass = report.all_pass && report.conditions.profile_match == Some(true);
            let rows = vec![VerifyRow::new(*g, &report)];
            let mut out = Output::new(BuildJson { tuple: TupleJson::from(&tuple), report }, rows)?;
            if !pass {
                out.failure = Some(Failure::Verification("built tuple failed verification".into()));
            }
            Ok(out)
        }
        Command::Verify { input } => {
            let text = std::fs::read_to_string(input).map_err(|e| invalid(format!("{}: {e}", input.display())))?;
            let parsed: TupleInput =
                serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", input.display())))?;
            let tuple = parsed.into_tuple().to_tuple().map_err(invalid)?;
            let report = ReportJson::from(&verify_cover(&tuple));
            let pass = report.all_pass;
            let rows = vec![VerifyRow::new(tuple.genus(), &report)];
            let mut out = Output::new(report, rows)?;
            if !pass {
                out.failure = Some(Failure::Verification("tuple failed verification".into()));
            }
            Ok(out)
        }
        Command::Census { g, profile, shard, resume, checkpoint, jobs, allow_intransitive } => {
            let (index, total) = shard
                .split_once('/')
                .and_then(|(i, k)| Some((i.trim().parse().ok()?, k.trim().parse().ok()?)))
                .ok_or_else(|| invalid(format!("shard must look like i/k, got {shard:?}")))?;
            let mut task =
                EnumerationTask::new(*g).with_shard(Shard::new(index, total)?).with_transitivity(!allow_intransitive);
            if let Some(s) = profile {
                let n = parse_profile(s).map_err(invalid)?;
                if n.len() != 2 * *g as usize + 2 {
                    return Err(invalid(format!("profile for genus {g} needs {} entries", 2 * g + 2)));
                }
                task = task.with_profile(n);
            }
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let options =
                CensusOptions { jobs, checkpoint: checkpoint.clone(), resume: resume.clone(), max_blocks: None };
            let run = run_census(&task, &options)?;
            let json = CensusJson::from(&run.census);
            let rows: Vec<CensusCsvRow> = json.counts.iter().map(CensusCsvRow::from).collect();
            Output::new(json, rows)
        }
        Command::Elliptic { tau } => {
            let [re, im] = parse_complex(tau).map_err(invalid)?;
            let lat = lattice_init(Complex64::new(re, im))?;
            let sols = solve_theta(&lat)?;
            let mut failure = None;
            for s in &sols {
                if let Err(e) = verify_solution(&lat, s) {
                    failure = Some(Failure::from(e));
                }
            }
            let json = SolutionsJson::new([re, im], &sols);
            let rows: Vec<SolutionCsvRow> = json.solutions.iter().map(SolutionCsvRow::from).collect();
            let mut out = Output::new(json, rows)?;
            out.failure = failure;
            Ok(out)
        }
        Command::Quadric { g, profile } => {
            let p = profile_arg(*g, profile)?;
            let json = QuadricJson::from(&residue_quadric(&p));
            let rows: Vec<QuadricCsvRow> = json
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, [numerator, denominator])| QuadricCsvRow {
                    point: i + 1,
                    numerator: *numerator,
                    denominator: *denominator,
                })
                .collect();
            Output::new(json, rows)
        }
    }
}

/// Runs a parsed configuration and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let result = execute(&config.command).and_then(|out| {
        let mut sink: Box<dyn Write> = match &config.out {
            Some(path) => {
                Box::new(BufWriter::new(File::create(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?))
            }
            None => Box::new(io::stdout().lock()),
        };
        let written = match config.format {
            Format::Json => (out.json)(&mut sink),
            Format::Csv => (out.csv)(&mut sink),
        };
        written.and_then(|_| Ok(sink.flush()?)).map_err(invalid)?;
        match out.failure {
            Some(f) => Err(f),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", f.to_json());
            f.exit_code()
        }
    }
}
