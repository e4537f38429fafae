use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use selfsim_core::tower::SelfSimilarParams;
use selfsim_core::DEFAULT_STAGE_CAP;

use crate::literal;
use crate::output::Format;
use crate::CliError;

/// Exact computations on self-similar rank-one towers and flows.
///
/// Exit status: 0 on success, 1 when a computation fails (for example the
/// stage cap is too small), 2 on invalid arguments.
#[derive(Debug, Parser)]
#[command(name = "selfsim", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for batch sweeps (scan times, flow times).
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TowerArgs {
    /// Initial tower height.
    #[arg(long = "h", default_value_t = 1)]
    pub h: u64,

    /// Type-(h,p) construction: two cuts, spacer multipliers (1, p-3).
    #[arg(
        long = "p",
        conflicts_with = "spacers",
        required_unless_present = "spacers"
    )]
    pub p: Option<u32>,

    /// General construction: comma-separated spacer multipliers, one per cut.
    #[arg(long = "s", value_name = "S1,S2,...")]
    pub spacers: Option<String>,

    /// Highest stage a computation may escalate to.
    #[arg(long, default_value_t = DEFAULT_STAGE_CAP)]
    pub stage_cap: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stage layout: height, width, column offsets, spacer ranges.
    ///
    /// CSV columns: kind,start,end (one row per column or spacer block).
    Build {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        stage: u32,
    },
    /// Correlation sequence a_n = mu(T^n A ∩ B) for n = 0..=n_max.
    ///
    /// CSV columns: n,value,float with value as num/den.
    Corr {
        #[command(flatten)]
        tower: TowerArgs,
        /// Level set literal `level:<stage>:<i>[,<i>...]`.
        #[arg(long)]
        set_a: String,
        /// Second set; defaults to the first.
        #[arg(long)]
        set_b: Option<String>,
        #[arg(long)]
        n_max: usize,
    },
    /// Best weak-limit candidate 2^-m T^q at each time.
    ///
    /// CSV columns: time,exponent,shift,residual,residual_float; times whose
    /// correlations all vanish get exponent and shift `zero`.
    Scan {
        #[command(flatten)]
        tower: TowerArgs,
        /// Test pair `A/B` of level set literals (`A` alone means `A/A`); repeatable.
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
        /// Comma-separated times.
        #[arg(long)]
        times: String,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        shift_min: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        shift_max: i64,
        /// Scan the correlations of the product of the tower with itself.
        #[arg(long)]
        tensor: bool,
    },
    /// Fejér density of an autocorrelation sequence on a uniform grid.
    ///
    /// CSV columns: g,theta,density.
    Spectrum {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        set_a: String,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        grid: usize,
    },
    /// Ratios f(θ + 2π/p^k) / f(θ) of the Fejér density.
    ///
    /// CSV columns: p,rotations,step,considered,degenerate,min_ratio,max_ratio,median_ratio.
    Qinv {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        set_a: String,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        grid: usize,
        /// Rotation by 2π/q^k; q defaults to the similarity coefficient.
        #[arg(long, default_value_t = 1)]
        rotations: u32,
        #[arg(long)]
        rotation_base: Option<u64>,
        /// Points below this fraction of the maximum density are ignored.
        #[arg(long, default_value_t = 0.01)]
        floor: f64,
    },
    /// Checks the self-similarity conjugacy on the stage-J invariant set.
    ///
    /// CSV columns: stage,attempted,passed,skipped,first_failure.
    Check {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        stage: u32,
    },
    /// Invariance defect of each residue class of levels under T^q.
    ///
    /// CSV columns: component,gained,lost,total.
    Components {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        stage: u32,
    },
    /// Self-similar flow with rational coefficient q > 2.
    Flow {
        #[command(subcommand)]
        command: FlowCommand,
    },
    /// Times n_i with q n_i = p^i + s_i.
    ///
    /// CSV columns: i,n,s,reduced_exponent,reduced_n,reduced_s.
    Times {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        i_max: u32,
    },
    /// Exhaustive search for m p^j = n p^i + s with exponents up to a bound.
    ///
    /// CSV columns: j,i.
    Collide {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        bound: u32,
    },
    /// Distance from q^n to the nearest integer for the Pisot root of a polynomial.
    ///
    /// CSV columns: n,trace,nearest,distance.
    Pisot {
        /// Monic integer coefficients, highest degree first, e.g. 1,-2,-1.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        n_max: u32,
    },
    /// Evaluates a spectrum expression such as `exp(2*C5 + 3*C7, D=3)`.
    ///
    /// CSV columns: theta,multiplicity.
    Fock {
        #[arg(long)]
        expr: String,
        /// Leave rotation number 0 out of the multiplicity set.
        #[arg(long)]
        exclude_zero: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum FlowCommand {
    /// mu(T_t A ∩ B) at the given times.
    ///
    /// CSV columns: t,value,float.
    Corr {
        #[arg(long)]
        q: String,
        /// Set literal `rect:<stage>:<a>-<b>[,...]`; defaults to the stage-1 tower.
        #[arg(long)]
        set_a: Option<String>,
        #[arg(long)]
        set_b: Option<String>,
        /// Comma-separated rational times.
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = DEFAULT_STAGE_CAP)]
        stage_cap: u32,
    },
    /// Checks Φ∘T_{qt} = T_t∘Φ on grid samples of a stage tower.
    ///
    /// CSV columns: t,attempted,passed,first_failure.
    Check {
        #[arg(long)]
        q: String,
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 2)]
        stage: u32,
        #[arg(long, default_value_t = DEFAULT_STAGE_CAP)]
        stage_cap: u32,
    },
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Construction parameters, for the commands that take a tower.
    pub params: Option<SelfSimilarParams>,
    pub stage_cap: u32,
    pub n_max: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub jobs: usize,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let (tower, n_max) = match &cli.command {
            Command::Build { tower, .. }
            | Command::Check { tower, .. }
            | Command::Components { tower, .. } => (Some(tower), 0),
            Command::Scan { tower, .. } => (Some(tower), 0),
            Command::Corr { tower, n_max, .. }
            | Command::Spectrum { tower, n_max, .. }
            | Command::Qinv { tower, n_max, .. } => (Some(tower), *n_max),
            Command::Pisot { n_max, .. } => (None, *n_max as usize),
            _ => (None, 0),
        };
        let stage_cap = match (&cli.command, tower) {
            (_, Some(t)) => t.stage_cap,
            (
                Command::Flow {
                    command: FlowCommand::Corr { stage_cap, .. },
                },
                _,
            )
            | (
                Command::Flow {
                    command: FlowCommand::Check { stage_cap, .. },
                },
                _,
            ) => *stage_cap,
            _ => DEFAULT_STAGE_CAP,
        };
        if stage_cap < 2 {
            return Err(CliError::Usage("--stage-cap must be at least 2".into()));
        }
        let params = tower.map(tower_params).transpose()?;
        Ok(RunConfig {
            params,
            stage_cap,
            n_max,
            format: cli.format,
            output: cli.output.clone(),
            jobs: cli.jobs.max(1),
        })
    }

    pub fn params(&self) -> &SelfSimilarParams {
        self.params
            .as_ref()
            .expect("tower command without parameters")
    }
}

fn tower_params(tower: &TowerArgs) -> Result<SelfSimilarParams, CliError> {
    match (&tower.p, &tower.spacers) {
        (Some(p), None) => SelfSimilarParams::hp(tower.h, *p),
        (None, Some(s)) => {
            SelfSimilarParams::new(tower.h, literal::int_list(s).map_err(CliError::Usage)?)
        }
        _ => return Err(CliError::Usage("give exactly one of --p and --s".into())),
    }
    .map_err(|e| CliError::Usage(e.to_string()))
}
